//! Monte Carlo simulation of `X_t = p t + σ W_t + Σ jumps`.
//!
//! Jumps are compound Poisson and placed exactly in time; only the Brownian
//! part lives on the `dt` grid. Between consecutive nodes the path minimum can
//! be sampled from the Brownian bridge law, so sub-grid crossings are not
//! missed.
//!
//! Each path owns two ChaCha8 streams keyed by the master seed: stream `2i`
//! drives the path and stream `2i + 1` the bridge minima. Results depend only
//! on `(master_seed, path_index)`, never on the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Result, RuinError};
use crate::laplace_exponent::LaplaceExponent;
use crate::levy_model::{validate, JumpComponent, LevyTriplet, TemperedPareto};
use crate::quadrature::{integrate, Tolerance};
use crate::ruin_classifier::{classify, RuinClassification, DEFAULT_ROOT_TOL};

/// Cells in the inverse-CDF table of a tempered Pareto jump law.
const TEMPERED_TABLE_CELLS: usize = 4096;
/// `estimate ≤ bound + CERTIFY_SIGMAS · stderr` certifies a bound.
pub const CERTIFY_SIGMAS: f64 = 3.0;
/// Diagnostics pass within this many standard errors.
pub const DIAGNOSTIC_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub horizon: f64,
    pub dt: f64,
    pub n_paths: u64,
    pub master_seed: u64,
    pub bridge_correction: bool,
    /// Worker threads; 0 uses the global pool. Has no effect on results.
    pub workers: usize,
}

impl SimulationConfig {
    pub fn new(horizon: f64, dt: f64, n_paths: u64, master_seed: u64) -> Self {
        Self {
            horizon,
            dt,
            n_paths,
            master_seed,
            bridge_correction: true,
            workers: 0,
        }
    }

    pub fn without_bridge(mut self) -> Self {
        self.bridge_correction = false;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn check(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(RuinError::Simulation(format!("horizon must be > 0, got {}", self.horizon)));
        }
        if !(self.dt > 0.0 && self.dt <= self.horizon) {
            return Err(RuinError::Simulation(format!(
                "dt must satisfy 0 < dt <= horizon, got dt = {} with horizon {}",
                self.dt, self.horizon
            )));
        }
        if self.n_paths == 0 {
            return Err(RuinError::Simulation("n_paths must be >= 1".to_owned()));
        }
        Ok(())
    }
}

/// Truncation horizon for ultimate-ruin estimates: `max(10³, 50 u / δ)` when
/// `δ > 0`, else 10³.
pub fn default_horizon(delta: f64, u_max: f64) -> f64 {
    if delta > 0.0 {
        (50.0 * u_max / delta).max(1e3)
    } else {
        1e3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    Violation,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Certified => "certified",
            Verdict::Violation => "violation",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Ruin frequency over `[0, T]`, which under-estimates the ultimate ruin
/// probability; a bound that holds against it is certified one-sidedly.
#[derive(Debug, Clone, PartialEq)]
pub struct RuinEstimate {
    pub u: f64,
    pub n_paths: u64,
    pub ruined_count: u64,
    pub estimate: f64,
    pub stderr: f64,
    /// Bound at `u`; NaN when the model could not be classified.
    pub bound: f64,
    pub case: Option<char>,
    pub verdict: Verdict,
    pub horizon: f64,
}

impl RuinEstimate {
    fn new(u: f64, n_paths: u64, ruined_count: u64, class: Option<&RuinClassification>, horizon: f64) -> Result<Self> {
        let estimate = ruined_count as f64 / n_paths as f64;
        let stderr = (estimate * (1.0 - estimate) / n_paths as f64).sqrt();
        let (bound, case, verdict) = match class {
            Some(c) => {
                let b = c.bound(u)?;
                let verdict = if estimate <= b + CERTIFY_SIGMAS * stderr {
                    Verdict::Certified
                } else {
                    Verdict::Violation
                };
                (b, Some(c.case.letter()), verdict)
            }
            None => (f64::NAN, None, Verdict::Inconclusive),
        };
        Ok(Self {
            u,
            n_paths,
            ruined_count,
            estimate,
            stderr,
            bound,
            case,
            verdict,
            horizon,
        })
    }
}

/// Inverse-CDF table for magnitudes `y ≥ x0` with density `∝ e^{-αy} y^{-ρ}`.
///
/// Under `y = x0 - ln(1 - s)/α` the exponential factor becomes uniform in
/// `s ∈ [0, 1)` and the density in `s` is `(y(s)/x0)^{-ρ}`, bounded and
/// decreasing; its CDF is tabulated on a uniform `s` grid.
#[derive(Debug, Clone)]
struct TemperedTable {
    alpha: f64,
    cutoff: f64,
    cdf: Vec<f64>,
}

impl TemperedTable {
    fn new(tp: &TemperedPareto) -> Self {
        let (alpha, x0, rho) = (tp.alpha, tp.cutoff, tp.power);
        let g = |s: f64| {
            let y = x0 - (-s).ln_1p() / alpha;
            (y / x0).powf(-rho)
        };
        let n = TEMPERED_TABLE_CELLS;
        let h = 1.0 / n as f64;
        let mut cdf = Vec::with_capacity(n + 1);
        cdf.push(0.0);
        let mut acc = 0.0;
        for i in 0..n {
            let lo = i as f64 * h;
            acc += integrate(g, lo, lo + h, Tolerance::new(1e-300, 1e-12)).value;
            cdf.push(acc);
        }
        for c in cdf.iter_mut() {
            *c /= acc;
        }
        Self { alpha, cutoff: x0, cdf }
    }

    fn sample(&self, v: f64) -> f64 {
        let n = self.cdf.len() - 1;
        let i = self.cdf.partition_point(|&c| c <= v).clamp(1, n) - 1;
        let (c0, c1) = (self.cdf[i], self.cdf[i + 1]);
        let frac = if c1 > c0 { ((v - c0) / (c1 - c0)).clamp(0.0, 1.0) } else { 0.5 };
        let s = ((i as f64 + frac) / n as f64).min(1.0 - f64::EPSILON);
        self.cutoff - (-s).ln_1p() / self.alpha
    }
}

#[derive(Debug, Clone)]
enum SizeLaw {
    Exponential { alpha: f64, sign: f64 },
    Tempered(TemperedTable),
}

/// Model data prepared once per simulation run and shared read-only.
#[derive(Debug, Clone)]
pub struct PreparedModel {
    premium: f64,
    sigma: f64,
    jump_rate: f64,
    /// Cumulative selection probabilities, one per component.
    selection: Vec<f64>,
    laws: Vec<SizeLaw>,
}

impl PreparedModel {
    pub fn new(triplet: &LevyTriplet) -> Result<Self> {
        validate(triplet).into_result()?;
        let comps = triplet.jumps.components();
        let rates: Vec<f64> = comps.iter().map(JumpComponent::intensity).collect();
        let jump_rate: f64 = rates.iter().sum();
        let mut selection = Vec::with_capacity(rates.len());
        let mut acc = 0.0;
        for r in &rates {
            acc += r;
            selection.push(acc / jump_rate);
        }
        let laws = comps
            .iter()
            .map(|c| match *c {
                JumpComponent::ExponentialNegative { alpha, .. } => SizeLaw::Exponential { alpha, sign: -1.0 },
                JumpComponent::ExponentialPositive { alpha, .. } => SizeLaw::Exponential { alpha, sign: 1.0 },
                JumpComponent::TemperedParetoNegative(tp) => SizeLaw::Tempered(TemperedTable::new(&tp)),
            })
            .collect();
        Ok(Self {
            premium: triplet.premium,
            sigma: triplet.sigma2.sqrt(),
            jump_rate,
            selection,
            laws,
        })
    }

    fn sample_jump<R: Rng>(&self, rng: &mut R) -> f64 {
        let law = if self.laws.len() == 1 {
            &self.laws[0]
        } else {
            let v: f64 = rng.random();
            let i = self.selection.partition_point(|&c| c <= v).min(self.laws.len() - 1);
            &self.laws[i]
        };
        match law {
            SizeLaw::Exponential { alpha, sign } => {
                let e: f64 = rng.sample(Exp1);
                sign * e / alpha
            }
            SizeLaw::Tempered(table) => -table.sample(rng.random()),
        }
    }

    fn next_arrival<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.jump_rate > 0.0 {
            let e: f64 = rng.sample(Exp1);
            e / self.jump_rate
        } else {
            f64::INFINITY
        }
    }
}

fn seed_key(master_seed: u64) -> [u8; 32] {
    // splitmix64 expansion of the master seed
    let mut state = master_seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        chunk.copy_from_slice(&(z ^ (z >> 31)).to_le_bytes());
    }
    key
}

/// The two independent streams owned by one path.
fn path_streams(master_seed: u64, path_index: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let key = seed_key(master_seed);
    let mut main = ChaCha8Rng::from_seed(key);
    main.set_stream(path_index.wrapping_mul(2));
    let mut bridge = ChaCha8Rng::from_seed(key);
    bridge.set_stream(path_index.wrapping_mul(2).wrapping_add(1));
    (main, bridge)
}

/// Walks one path node by node. `visit(t, x, min)` sees every node after
/// `t = 0`, with `min` the path minimum over `(0, t]`; returning `false` stops
/// the walk. Returns the number of jumps taken.
fn walk<F>(model: &PreparedModel, cfg: &SimulationConfig, path_index: u64, mut visit: F) -> u64
where
    F: FnMut(f64, f64, f64) -> bool,
{
    let (mut main, mut bridge) = path_streams(cfg.master_seed, path_index);
    let horizon = cfg.horizon;
    let sigma = model.sigma;
    let gridded = sigma > 0.0;
    let variance_rate = sigma * sigma;

    let mut t = 0.0;
    let mut x = 0.0;
    let mut min = f64::INFINITY;
    let mut jumps = 0;
    let mut next_jump = model.next_arrival(&mut main);
    let mut grid_index: u64 = 1;
    let mut next_grid = if gridded { cfg.dt } else { f64::INFINITY };

    loop {
        let end = horizon.min(next_grid).min(next_jump);
        let h = end - t;
        let mut x_end = x + model.premium * h;
        if gridded && h > 0.0 {
            let z: f64 = main.sample(StandardNormal);
            x_end += sigma * h.sqrt() * z;
            if cfg.bridge_correction {
                // minimum of a Brownian bridge from x to x_end over time h
                let v: f64 = 1.0 - bridge.random::<f64>();
                let d = x_end - x;
                let m = 0.5 * (x + x_end - (d * d - 2.0 * variance_rate * h * v.ln()).sqrt());
                min = min.min(m);
            }
        }
        x = x_end;
        t = end;
        min = min.min(x);
        if end == next_jump {
            x += model.sample_jump(&mut main);
            min = min.min(x);
            jumps += 1;
            next_jump = t + model.next_arrival(&mut main);
        }
        if end == next_grid {
            grid_index += 1;
            next_grid = grid_index as f64 * cfg.dt;
        }
        if !visit(t, x, min) || t >= horizon {
            break;
        }
    }
    jumps
}

/// Node-level record of one simulated path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSkeleton {
    /// Node times, starting at 0 and ending at the horizon.
    pub times: Vec<f64>,
    /// Post-jump values at the nodes.
    pub values: Vec<f64>,
    /// Running minimum over `[0, t]`, including bridge minima.
    pub running_min: Vec<f64>,
    pub jumps: u64,
}

/// Simulates path `path_index` of the run described by `config`.
pub fn simulate_path(triplet: &LevyTriplet, config: &SimulationConfig, path_index: u64) -> Result<PathSkeleton> {
    config.check()?;
    let model = PreparedModel::new(triplet)?;
    let mut sk = PathSkeleton {
        times: vec![0.0],
        values: vec![0.0],
        running_min: vec![0.0],
        jumps: 0,
    };
    sk.jumps = walk(&model, config, path_index, |t, x, m| {
        sk.times.push(t);
        sk.values.push(x);
        sk.running_min.push(m.min(0.0));
        true
    });
    Ok(sk)
}

/// Minimum of the path over `(0, T]`, stopping early once it reaches
/// `stop_level`.
pub fn path_minimum(model: &PreparedModel, config: &SimulationConfig, path_index: u64, stop_level: f64) -> f64 {
    let mut out = f64::INFINITY;
    walk(model, config, path_index, |_, _, m| {
        out = m;
        m > stop_level
    });
    out
}

/// Maps `f` over `0..n` in path order, in parallel when the feature is on.
fn map_paths<T, F>(n: u64, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let run = || (0..n).into_par_iter().map(&f).collect::<Vec<T>>();
        if workers > 0 {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
                return pool.install(run);
            }
        }
        run()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        (0..n).map(f).collect()
    }
}

/// Ruin frequencies at every `u` in `us` from one set of paths (common random
/// numbers: path `i` is the same path for every `u`).
pub fn estimate_ruin_curve(
    triplet: &LevyTriplet,
    classification: Option<&RuinClassification>,
    config: &SimulationConfig,
    us: &[f64],
) -> Result<Vec<RuinEstimate>> {
    config.check()?;
    if let Some(&u) = us.iter().find(|u| !(**u >= 0.0)) {
        return Err(RuinError::NegativeCapital(u));
    }
    if us.is_empty() {
        return Ok(Vec::new());
    }
    let model = PreparedModel::new(triplet)?;
    let u_max = us.iter().copied().fold(0.0, f64::max);
    let minima = map_paths(config.n_paths, config.workers, |i| path_minimum(&model, config, i, -u_max));
    us.iter()
        .map(|&u| {
            let ruined = minima.iter().filter(|&&m| m <= -u).count() as u64;
            RuinEstimate::new(u, config.n_paths, ruined, classification, config.horizon)
        })
        .collect()
}

/// Ruin frequency at capital `u`, compared against the model's bound.
pub fn estimate_ruin(triplet: &LevyTriplet, config: &SimulationConfig, u: f64) -> Result<RuinEstimate> {
    if !(u >= 0.0) {
        return Err(RuinError::NegativeCapital(u));
    }
    let class = classify(triplet, DEFAULT_ROOT_TOL).ok();
    let mut out = estimate_ruin_curve(triplet, class.as_ref(), config, &[u])?;
    Ok(out.remove(0))
}

/// Exact draw of `X_t`: drift, one Gaussian increment and the compound
/// Poisson sum over `[0, t]`.
fn terminal_value(model: &PreparedModel, master_seed: u64, path_index: u64, t: f64) -> f64 {
    let (mut rng, _) = path_streams(master_seed, path_index);
    let mut x = model.premium * t;
    if model.sigma > 0.0 {
        let z: f64 = rng.sample(StandardNormal);
        x += model.sigma * t.sqrt() * z;
    }
    let mut clock = model.next_arrival(&mut rng);
    while clock <= t {
        x += model.sample_jump(&mut rng);
        clock += model.next_arrival(&mut rng);
    }
    x
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn within(mean: f64, target: f64, stderr: f64) -> bool {
    (mean - target).abs() <= DIAGNOSTIC_SIGMAS * stderr
}

#[derive(Debug, Clone, PartialEq)]
pub struct LlnReport {
    pub n_paths: u64,
    pub horizon: f64,
    pub delta: f64,
    pub mean: f64,
    pub stderr: f64,
    pub passed: bool,
}

/// Checks `X_T / T ≈ δ`: the sample mean over paths must lie within four
/// standard errors of `δ`.
pub fn lln_diagnostic(triplet: &LevyTriplet, config: &SimulationConfig) -> Result<LlnReport> {
    config.check()?;
    let model = PreparedModel::new(triplet)?;
    let delta = triplet.delta()?;
    let t = config.horizon;
    let ratios = map_paths(config.n_paths, config.workers, |i| {
        terminal_value(&model, config.master_seed, i, t) / t
    });
    let (mean, stderr) = mean_and_stderr(&ratios);
    Ok(LlnReport {
        n_paths: config.n_paths,
        horizon: t,
        delta,
        mean,
        stderr,
        passed: within(mean, delta, stderr),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub gamma: f64,
    pub mean: f64,
    pub stderr: f64,
    /// `e^{tΨ(γ)}`
    pub expected: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleReport {
    pub gamma0: f64,
    pub t: f64,
    pub mean: f64,
    pub stderr: f64,
    pub passed: bool,
    /// `E[e^{-γX_t}] = e^{tΨ(γ)}` at `γ₀/2` and `3γ₀/4`.
    pub identity_checks: Vec<IdentityCheck>,
}

impl MartingaleReport {
    pub fn all_passed(&self) -> bool {
        self.passed && self.identity_checks.iter().all(|c| c.passed)
    }
}

/// Monte Carlo check that `E[e^{-γ₀ X_t}] = 1`, plus the general identity
/// at two interior exponents. Uses `n_paths` and `master_seed` from `config`.
pub fn martingale_diagnostic(
    triplet: &LevyTriplet,
    gamma0: f64,
    t: f64,
    config: &SimulationConfig,
) -> Result<MartingaleReport> {
    let le = LaplaceExponent::new(triplet)?;
    if !(gamma0 >= 0.0 && gamma0 < le.gamma_c()) {
        return Err(RuinError::Domain {
            gamma: gamma0,
            gamma_c: le.gamma_c(),
        });
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(RuinError::Simulation(format!("t must be > 0, got {t}")));
    }
    if config.n_paths == 0 {
        return Err(RuinError::Simulation("n_paths must be >= 1".to_owned()));
    }
    let model = PreparedModel::new(triplet)?;
    let xs = map_paths(config.n_paths, config.workers, |i| terminal_value(&model, config.master_seed, i, t));

    let moment = |gamma: f64| {
        let vals: Vec<f64> = xs.iter().map(|x| (-gamma * x).exp()).collect();
        mean_and_stderr(&vals)
    };
    let (mean, stderr) = moment(gamma0);
    let mut identity_checks = Vec::new();
    if gamma0 > 0.0 {
        for gamma in [0.5 * gamma0, 0.75 * gamma0] {
            let (m, se) = moment(gamma);
            let expected = (t * le.psi(gamma)?).exp();
            identity_checks.push(IdentityCheck {
                gamma,
                mean: m,
                stderr: se,
                expected,
                passed: within(m, expected, se),
            });
        }
    }
    Ok(MartingaleReport {
        gamma0,
        t,
        mean,
        stderr,
        passed: within(mean, 1.0, stderr),
        identity_checks,
    })
}
