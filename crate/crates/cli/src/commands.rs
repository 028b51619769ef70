use std::io::Write;
use std::path::Path;

use levy_ruin::gallery::{self, GalleryModel};
use levy_ruin::report::{to_csv_string, CertifyRow, CurveRow, EstimateRow};
use levy_ruin::simulator::{default_horizon, estimate_ruin_curve, SimulationConfig};
use levy_ruin::{classify as classify_model, cross_check, validate, JumpComponent, LaplaceExponent, LevyTriplet, PerturbedModel};
use levy_ruin::{RuinClassification, RuinError, Verdict};

use crate::manifest::RunManifest;
use crate::model::{read_model_file, ResolvedModel};
use crate::{CertifyArgs, ClassifyArgs, CliError, GalleryArgs, Outcome, PsiCurveArgs, SimArgs, SimulateArgs};

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

/// Parses `a:b:n` into `n` evenly spaced points from `a` to `b`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("capital grid must look like a:b:n with 0 <= a <= b and n >= 1, got `{spec}`"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(bad());
    };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if !(a >= 0.0 && b >= a && b.is_finite()) || n == 0 {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    let step = (b - a) / (n - 1) as f64;
    Ok((0..n).map(|i| if i + 1 == n { b } else { a + step * i as f64 }).collect())
}

/// The closed-form comparison applies when the model is exactly a premium,
/// a Brownian part and one family of exponential claims.
fn as_perturbed(t: &LevyTriplet) -> Option<PerturbedModel> {
    match t.jumps.components() {
        [JumpComponent::ExponentialNegative { beta, alpha }] => PerturbedModel::new(t.premium, t.sigma2, *beta, *alpha).ok(),
        _ => None,
    }
}

fn classification_report(t: &LevyTriplet, class: &RuinClassification, tol: f64) -> String {
    let mut s = String::from("validation:\n");
    for line in validate(t).to_string().lines() {
        s.push_str(&format!("  {line}\n"));
    }
    s.push_str("classification:\n");
    for line in class.to_string().lines() {
        s.push_str(&format!("  {line}\n"));
    }
    if let Some(m) = as_perturbed(t) {
        let a = cross_check(&m, tol.max(1e-9));
        s.push_str("closed form:\n");
        s.push_str(&format!("  discriminant:  {}\n", m.discriminant()));
        s.push_str(&format!("  gamma_minus:   {}\n", m.gamma_minus()));
        s.push_str(&format!("  gamma_plus:    {}\n", m.gamma_plus()));
        s.push_str(&format!("  case:          {}\n", a.closed_form.case.letter()));
        s.push_str(&format!("  agrees:        {}\n", a.agree));
        for n in &a.notes {
            s.push_str(&format!("  note:          {n}\n"));
        }
    }
    s.push_str(&class.summary_line());
    s.push('\n');
    s
}

pub fn classify(args: ClassifyArgs) -> Result<Outcome, CliError> {
    let model = args.model.resolve()?;
    if !(args.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be > 0, got {}", args.tol)));
    }
    let class = classify_model(&model.triplet, args.tol)?;
    let text = if args.summary {
        format!("{}\n", class.summary_line())
    } else {
        classification_report(&model.triplet, &class, args.tol)
    };
    emit(None, &text)?;

    let mut m = RunManifest::new("classify");
    m.with_model(&model).param("tol", args.tol).param("summary", args.summary);
    m.write(args.manifest.as_deref(), None)?;
    Ok(Outcome::Ok)
}

pub fn psi_curve(args: PsiCurveArgs) -> Result<Outcome, CliError> {
    let model = args.model.resolve()?;
    let le = LaplaceExponent::new(&model.triplet)?;
    let points = match args.upper {
        Some(u) => le.curve_to(args.n, u)?,
        None => le.curve(args.n)?,
    };
    let rows: Vec<CurveRow> = points.iter().map(CurveRow::from).collect();
    emit(args.out.as_deref(), &to_csv_string(&rows)?)?;

    let mut m = RunManifest::new("psi-curve");
    m.with_model(&model).param("n", args.n).param("upper", args.upper);
    if let Some(o) = &args.out {
        m.outputs.push(o.display().to_string());
    }
    m.write(args.manifest.as_deref(), args.out.as_deref())?;
    Ok(Outcome::Ok)
}

fn sim_config(sim: &SimArgs, triplet: &LevyTriplet, u_max: f64) -> Result<SimulationConfig, CliError> {
    let horizon = match sim.horizon {
        Some(h) => h,
        None => default_horizon(triplet.delta()?, u_max),
    };
    let mut cfg = SimulationConfig::new(horizon, sim.dt.min(horizon), sim.paths, sim.seed).with_workers(sim.workers);
    if sim.no_bridge {
        cfg = cfg.without_bridge();
    }
    cfg.check()?;
    Ok(cfg)
}

fn record_sim(m: &mut RunManifest, sim: &SimArgs) {
    m.param("paths", sim.paths)
        .param("dt", sim.dt)
        .param("bridge_correction", !sim.no_bridge)
        .param("workers", sim.workers);
    m.seed = Some(sim.seed);
}

fn outcome_of(verdicts: impl IntoIterator<Item = Verdict>) -> Outcome {
    let mut out = Outcome::Ok;
    for v in verdicts {
        match v {
            Verdict::Violation => return Outcome::Violation,
            Verdict::Inconclusive => out = Outcome::Inconclusive,
            Verdict::Certified => {}
        }
    }
    out
}

/// Classification for a simulation run; an inconclusive classification is
/// not fatal, it just leaves the rows without a bound.
fn try_classify(triplet: &LevyTriplet, tol: f64) -> Result<Option<RuinClassification>, CliError> {
    match classify_model(triplet, tol) {
        Ok(c) => Ok(Some(c)),
        Err(e @ (RuinError::Inconclusive { .. } | RuinError::NoRoot { .. } | RuinError::Quadrature { .. })) => {
            eprintln!("warning: classification inconclusive: {e}");
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn simulate(args: SimulateArgs) -> Result<Outcome, CliError> {
    let model = args.model.resolve()?;
    let us = match (&args.u, &args.u_grid) {
        (Some(u), None) => vec![*u],
        (None, Some(g)) => parse_grid(g)?,
        _ => return Err(CliError::Usage("give exactly one of --u and --u-grid".into())),
    };
    if let Some(&u) = us.iter().find(|u| !(**u >= 0.0)) {
        return Err(RuinError::NegativeCapital(u).into());
    }
    let u_max = us.iter().copied().fold(0.0, f64::max);
    let cfg = sim_config(&args.sim, &model.triplet, u_max)?;
    let class = try_classify(&model.triplet, levy_ruin::DEFAULT_ROOT_TOL)?;
    let estimates = estimate_ruin_curve(&model.triplet, class.as_ref(), &cfg, &us)?;
    let rows: Vec<EstimateRow> = estimates.iter().map(EstimateRow::from).collect();
    emit(args.out.as_deref(), &to_csv_string(&rows)?)?;
    eprintln!("horizon T = {}: estimates are lower bounds on the ultimate ruin probability", cfg.horizon);

    let mut m = RunManifest::new("simulate");
    m.with_model(&model).param("u", &us).param("horizon", cfg.horizon);
    record_sim(&mut m, &args.sim);
    if let Some(o) = &args.out {
        m.outputs.push(o.display().to_string());
    }
    m.write(args.manifest.as_deref(), args.out.as_deref())?;
    Ok(outcome_of(estimates.iter().map(|e| e.verdict)))
}

struct Certified {
    rows: Vec<CertifyRow>,
    class: Option<RuinClassification>,
    horizon: f64,
}

fn certify_one(name: &str, triplet: &LevyTriplet, us: &[f64], sim: &SimArgs, tol: f64) -> Result<Certified, CliError> {
    let u_max = us.iter().copied().fold(0.0, f64::max);
    let cfg = sim_config(sim, triplet, u_max)?;
    let class = try_classify(triplet, tol)?;
    let estimates = estimate_ruin_curve(triplet, class.as_ref(), &cfg, us)?;
    Ok(Certified {
        rows: estimates.iter().map(|e| CertifyRow::new(name, e)).collect(),
        class,
        horizon: cfg.horizon,
    })
}

fn certify_gallery(u_grid: Option<&[f64]>, sim: &SimArgs, tol: f64) -> Result<Vec<(GalleryModel, Certified)>, CliError> {
    gallery::gallery()
        .into_iter()
        .map(|g| {
            let us = u_grid.unwrap_or(g.capitals);
            let c = certify_one(g.name, &g.triplet, us, sim, tol)?;
            Ok((g, c))
        })
        .collect()
}

fn print_verdicts(rows: &[CertifyRow]) {
    for r in rows {
        eprintln!(
            "{:<16} u={:<6} estimate={:<10.6} stderr={:<10.3e} bound={:<10.6} {}",
            r.model, r.u, r.estimate, r.stderr, r.bound, r.verdict
        );
    }
}

pub fn certify(args: CertifyArgs) -> Result<Outcome, CliError> {
    let grid = args.u_grid.as_deref().map(parse_grid).transpose()?;
    let mut m = RunManifest::new("certify");
    let mut rows = Vec::new();
    if args.gallery {
        for (g, c) in certify_gallery(grid.as_deref(), &args.sim, args.tol)? {
            m.param(&format!("horizon.{}", g.name), c.horizon);
            rows.extend(c.rows);
        }
        m.param("models", "gallery");
    } else {
        let path = args.config.as_ref().ok_or_else(|| CliError::Usage("give --config or --gallery".into()))?;
        let model: ResolvedModel = read_model_file(path)?;
        let us = grid.unwrap_or_else(|| vec![1.0, 2.0, 3.0, 4.0]);
        let c = certify_one("config", &model.triplet, &us, &args.sim, args.tol)?;
        m.with_model(&model).param("horizon", c.horizon);
        rows = c.rows;
    }
    emit(args.out.as_deref(), &to_csv_string(&rows)?)?;
    print_verdicts(&rows);

    m.param("u_grid", &args.u_grid).param("tol", args.tol);
    record_sim(&mut m, &args.sim);
    if let Some(o) = &args.out {
        m.outputs.push(o.display().to_string());
    }
    m.write(args.manifest.as_deref(), args.out.as_deref())?;
    Ok(outcome_of(rows.iter().map(|r| verdict_of(&r.verdict))))
}

fn verdict_of(s: &str) -> Verdict {
    match s {
        "certified" => Verdict::Certified,
        "violation" => Verdict::Violation,
        _ => Verdict::Inconclusive,
    }
}

pub fn gallery(args: GalleryArgs) -> Result<Outcome, CliError> {
    let tol = levy_ruin::DEFAULT_ROOT_TOL;
    let results = certify_gallery(None, &args.sim, tol)?;
    let mut summary = String::new();
    let mut mismatched = Vec::new();
    let mut rows = Vec::new();
    for (g, c) in results {
        let line = match &c.class {
            Some(class) => {
                if class.case.letter() != g.expected_case {
                    mismatched.push(g.name);
                }
                class.summary_line()
            }
            None => {
                mismatched.push(g.name);
                "case=? (inconclusive)".to_owned()
            }
        };
        let certified = c.rows.iter().filter(|r| r.verdict == "certified").count();
        summary.push_str(&format!(
            "{:<16} expected={} {} certified={}/{}\n",
            g.name,
            g.expected_case,
            line,
            certified,
            c.rows.len()
        ));
        rows.extend(c.rows);
    }
    emit(None, &summary)?;
    if let Some(out) = &args.out {
        emit(Some(out), &to_csv_string(&rows)?)?;
    }

    let mut m = RunManifest::new("gallery");
    record_sim(&mut m, &args.sim);
    if let Some(o) = &args.out {
        m.outputs.push(o.display().to_string());
    }
    m.write(args.manifest.as_deref(), args.out.as_deref())?;

    if !mismatched.is_empty() {
        return Err(CliError::Usage(format!("gallery models landed in the wrong case: {}", mismatched.join(", "))));
    }
    Ok(outcome_of(rows.iter().map(|r| verdict_of(&r.verdict))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1:4:4").unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(parse_grid("0:1:1").unwrap(), vec![0.0]);
        assert_eq!(parse_grid("0:0.3:4").unwrap().last(), Some(&0.3));
        for bad in ["1:4", "4:1:3", "-1:2:3", "0:1:0", "a:b:c"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn perturbed_shape_detection() {
        use levy_ruin::JumpMeasure;
        let t = LevyTriplet::new(2.0, 1.0, JumpMeasure::exponential_negative(1.0, 1.0));
        assert!(as_perturbed(&t).is_some());
        let t0 = LevyTriplet::new(2.0, 0.0, JumpMeasure::exponential_negative(1.0, 1.0));
        assert!(as_perturbed(&t0).is_none());
    }
}
