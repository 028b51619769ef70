//! Browser bindings for the demo page in `www/`.
//!
//! Every binding takes the model as model-file text and returns plain text
//! (a report or CSV), so the page needs no serialization library. The
//! `*_text` functions hold the logic and are plain Rust, testable natively.

use levy_ruin::config::parse_config_str;
use levy_ruin::report::{to_csv_string, CurveRow, EstimateRow};
use levy_ruin::simulator::{estimate_ruin_curve, SimulationConfig};
use levy_ruin::{classify, validate, LaplaceExponent, DEFAULT_ROOT_TOL};
use wasm_bindgen::prelude::*;

/// Hard cap on simulated paths per call, to keep the page responsive.
pub const MAX_PATHS: u32 = 200_000;

pub fn classify_text(config: &str) -> Result<String, String> {
    let t = parse_config_str(config).map_err(|e| e.to_string())?;
    let class = classify(&t, DEFAULT_ROOT_TOL).map_err(|e| e.to_string())?;
    Ok(format!("{}{}{}\n", validate(&t), class, class.summary_line()))
}

pub fn psi_curve_text(config: &str, n: u32) -> Result<String, String> {
    let t = parse_config_str(config).map_err(|e| e.to_string())?;
    let le = LaplaceExponent::new(&t).map_err(|e| e.to_string())?;
    let rows: Vec<CurveRow> = le
        .curve(n as usize)
        .map_err(|e| e.to_string())?
        .iter()
        .map(CurveRow::from)
        .collect();
    to_csv_string(&rows).map_err(|e| e.to_string())
}

pub fn ruin_curve_text(
    config: &str,
    u_max: f64,
    n_u: u32,
    paths: u32,
    horizon: f64,
    dt: f64,
    seed: u32,
) -> Result<String, String> {
    if !(u_max >= 0.0 && u_max.is_finite()) || n_u == 0 {
        return Err("need u_max >= 0 and at least one capital level".into());
    }
    if paths == 0 || paths > MAX_PATHS {
        return Err(format!("paths must be between 1 and {MAX_PATHS}"));
    }
    let t = parse_config_str(config).map_err(|e| e.to_string())?;
    let class = classify(&t, DEFAULT_ROOT_TOL).ok();
    let us: Vec<f64> = if n_u == 1 {
        vec![u_max]
    } else {
        (0..n_u).map(|i| u_max * i as f64 / (n_u - 1) as f64).collect()
    };
    let cfg = SimulationConfig::new(horizon, dt, paths as u64, seed as u64);
    let est = estimate_ruin_curve(&t, class.as_ref(), &cfg, &us).map_err(|e| e.to_string())?;
    let rows: Vec<EstimateRow> = est.iter().map(EstimateRow::from).collect();
    to_csv_string(&rows).map_err(|e| e.to_string())
}

/// Validation and classification report; the last line is the one-line summary.
#[wasm_bindgen]
pub fn classify_config(config: &str) -> Result<String, JsError> {
    classify_text(config).map_err(|e| JsError::new(&e))
}

/// CSV `gamma,psi,psi_prime` with `n` rows.
#[wasm_bindgen]
pub fn psi_curve(config: &str, n: u32) -> Result<String, JsError> {
    psi_curve_text(config, n).map_err(|e| JsError::new(&e))
}

/// CSV of ruin-frequency estimates on `n_u` capitals spread over `[0, u_max]`.
#[wasm_bindgen]
pub fn ruin_curve(
    config: &str,
    u_max: f64,
    n_u: u32,
    paths: u32,
    horizon: f64,
    dt: f64,
    seed: u32,
) -> Result<String, JsError> {
    ruin_curve_text(config, u_max, n_u, paths, horizon, dt, seed).map_err(|e| JsError::new(&e))
}
