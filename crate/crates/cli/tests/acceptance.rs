//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when any
//! criterion fails. Runs as a plain binary (`harness = false`) so the lines
//! appear in `cargo test` output.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use levy_ruin::gallery;
use levy_ruin::simulator::{estimate_ruin_curve, lln_diagnostic, martingale_diagnostic, SimulationConfig};
use levy_ruin::{
    classify, cross_check, find_root, EvaluationMode, JumpComponent, JumpMeasure, LaplaceExponent, LevyTriplet,
    PerturbedModel, TemperedPareto, Verdict, DEFAULT_ROOT_TOL,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn perturbed() -> LevyTriplet {
    LevyTriplet::new(2.0, 1.0, JumpMeasure::exponential_negative(1.0, 1.0))
}

fn within_time(elapsed: Duration, limit: Duration) -> (bool, String) {
    (elapsed < limit, format!("{:.2}s, limit {:.0}s", elapsed.as_secs_f64(), limit.as_secs_f64()))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let t = perturbed();
    let closed = LaplaceExponent::with_mode(&t, EvaluationMode::ClosedForm).unwrap();
    let quad = LaplaceExponent::with_mode(&t, EvaluationMode::Quadrature).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let g = 0.99 * i as f64 / 199.0;
        let (c, q) = (closed.psi(g).unwrap(), quad.psi(g).unwrap());
        let rel = if c == q { 0.0 } else { (c - q).abs() / c.abs() };
        worst = worst.max(rel);
    }
    let (fast, timing) = within_time(start.elapsed(), Duration::from_secs(1));
    outcome(
        worst <= 1e-8 && fast,
        format!("max relative difference {worst:.3e} over 200 points (tol 1e-8); {timing}"),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let target = (5.0 - 17f64.sqrt()) / 2.0;
    let g = classify(&perturbed(), DEFAULT_ROOT_TOL).unwrap().case.rate();
    let e1 = (g - target).abs();

    let classical = LaplaceExponent::new(&LevyTriplet::new(2.0, 0.0, JumpMeasure::exponential_negative(1.0, 1.0))).unwrap();
    let e2 = (find_root(&classical, DEFAULT_ROOT_TOL).unwrap() - (1.0 - 1.0 / 2.0)).abs();

    let brownian = LaplaceExponent::new(&LevyTriplet::new(1.0, 2.0, JumpMeasure::none())).unwrap();
    let e3 = (find_root(&brownian, DEFAULT_ROOT_TOL).unwrap() - 2.0 * 1.0 / 2.0).abs();

    let (fast, timing) = within_time(start.elapsed(), Duration::from_secs(1));
    outcome(
        e1 <= 1e-9 && e2 <= 1e-10 && e3 <= 1e-10 && fast,
        format!("|γ₀ − γ₋| = {e1:.2e} (tol 1e-9), classical {e2:.2e}, Brownian {e3:.2e} (tol 1e-10); {timing}"),
    )
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

fn random_component(rng: &mut ChaCha8Rng) -> JumpComponent {
    match rng.random_range(0..3) {
        0 => JumpComponent::ExponentialNegative {
            beta: log_uniform(rng, 1e-2, 1e2),
            alpha: log_uniform(rng, 1e-2, 1e2),
        },
        1 => JumpComponent::ExponentialPositive {
            beta: log_uniform(rng, 1e-2, 1e2),
            alpha: log_uniform(rng, 1e-2, 1e2),
        },
        _ => JumpComponent::TemperedParetoNegative(TemperedPareto::new(
            log_uniform(rng, 1e-2, 1e2),
            log_uniform(rng, 1e-2, 1e2),
            rng.random_range(2.0..6.0),
            rng.random_range(1.0..4.0),
        )),
    }
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut counts = [0usize; 4];
    let mut failures = Vec::new();
    for i in 0..10_000 {
        let n = rng.random_range(0..=2);
        let comps: Vec<JumpComponent> = (0..n).map(|_| random_component(&mut rng)).collect();
        let premium = rng.random_range(-10.0..10.0);
        let sigma2 = if rng.random_bool(0.5) { 0.0 } else { log_uniform(&mut rng, 1e-2, 1e2) };
        let t = LevyTriplet::new(premium, sigma2, JumpMeasure::from_components(comps));
        match classify(&t, DEFAULT_ROOT_TOL) {
            Ok(c) => counts[(c.case.letter() as u8 - b'A') as usize] += 1,
            Err(e) => failures.push(format!("draw {i}: {e}")),
        }
    }

    let mut agree = 0;
    let mut d_hits = 0;
    let sweeps = 10_000;
    for _ in 0..sweeps {
        let m = PerturbedModel::new(
            log_uniform(&mut rng, 1e-2, 1e2),
            log_uniform(&mut rng, 1e-2, 1e2),
            log_uniform(&mut rng, 1e-2, 1e2),
            log_uniform(&mut rng, 1e-2, 1e2),
        )
        .unwrap();
        let r = cross_check(&m, 1e-9);
        agree += r.agree as usize;
        d_hits += (r.closed_form.case.letter() == 'D') as usize;
        if !r.agree && failures.len() < 5 {
            failures.push(format!("{m:?}: {:?}", r.notes));
        }
    }
    let (fast, timing) = within_time(start.elapsed(), Duration::from_secs(30));
    let mut detail = format!(
        "A/B/C/D = {}/{}/{}/{}, errors {}; perturbed agreement {agree}/{sweeps}, case-D hits {d_hits}; {timing}",
        counts[0],
        counts[1],
        counts[2],
        counts[3],
        failures.len()
    );
    if let Some(f) = failures.first() {
        detail.push_str(&format!("; first failure: {f}"));
    }
    outcome(
        failures.is_empty() && counts.iter().sum::<usize>() == 10_000 && agree == sweeps && d_hits == 0 && fast,
        detail,
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let m = gallery::lundberg();
    let class = classify(&m.triplet, DEFAULT_ROOT_TOL).unwrap();
    let cfg = SimulationConfig::new(1000.0, 1.0, 1_000_000, 4);
    let est = estimate_ruin_curve(&m.triplet, Some(&class), &cfg, &[1.0, 2.0, 4.0]).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for e in &est {
        let bound = (-0.5 * e.u).exp();
        ok &= e.estimate <= bound + 3.0 * e.stderr && e.estimate < bound && e.verdict == Verdict::Certified;
        // exact ultimate ruin probability for exponential claims, for reference
        let exact = 0.5 * (-0.5 * e.u).exp();
        parts.push(format!("u={}: {:.5}±{:.1e} (exact {exact:.5}, bound {bound:.5})", e.u, e.estimate, e.stderr));
    }
    let (fast, timing) = within_time(start.elapsed(), Duration::from_secs(600));
    outcome(ok && fast, format!("{}; {timing}", parts.join(", ")))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let m = gallery::critical_exponent();
    let class = classify(&m.triplet, DEFAULT_ROOT_TOL).unwrap();
    let cfg = SimulationConfig::new(1000.0, 1.0, 100_000, 5);
    let est = estimate_ruin_curve(&m.triplet, Some(&class), &cfg, &[1.0, 2.0]).unwrap();
    let mut ok = class.case.letter() == 'D';
    let mut parts = Vec::new();
    for e in &est {
        let bound = (-e.u).exp();
        ok &= e.estimate <= bound + 3.0 * e.stderr && e.verdict == Verdict::Certified;
        parts.push(format!("u={}: {:.5}±{:.1e} (bound {bound:.5})", e.u, e.estimate, e.stderr));
    }
    let (fast, timing) = within_time(start.elapsed(), Duration::from_secs(600));
    outcome(ok && fast, format!("case {}; {}; {timing}", class.case.letter(), parts.join(", ")))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let a = gallery::almost_sure_ruin();
    let cfg = SimulationConfig::new(1e4, 0.1, 10_000, 6);
    let est_a = estimate_ruin_curve(&a.triplet, None, &cfg, a.capitals).unwrap();
    let worst_a = est_a.iter().map(|e| e.estimate).fold(1.0, f64::min);

    let c = gallery::never_ruin();
    let est_c = estimate_ruin_curve(&c.triplet, None, &cfg, c.capitals).unwrap();
    let ruined_c: u64 = est_c.iter().map(|e| e.ruined_count).sum();

    let (fast, timing) = within_time(start.elapsed(), Duration::from_secs(60));
    outcome(
        worst_a >= 0.99 && ruined_c == 0 && fast,
        format!("δ<0 model min frequency {worst_a} at T=1e4 (need ≥ 0.99); subordinator ruined {ruined_c} paths; {timing}"),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let lln = lln_diagnostic(&perturbed(), &SimulationConfig::new(1000.0, 1.0, 10_000, 7)).unwrap();
    let mut ok = lln.passed;
    let mut parts = vec![format!("LLN mean {:.5}±{:.1e} vs δ={}", lln.mean, lln.stderr, lln.delta)];

    let cfg = SimulationConfig::new(1.0, 1.0, 100_000, 70);
    for (name, t) in [("perturbed", perturbed()), ("classical", gallery::lundberg().triplet)] {
        let g0 = classify(&t, DEFAULT_ROOT_TOL).unwrap().case.rate();
        let r = martingale_diagnostic(&t, g0, 1.0, &cfg).unwrap();
        ok &= r.passed;
        parts.push(format!("{name} E[e^(-γ₀X₁)] = {:.5}±{:.1e}", r.mean, r.stderr));
    }
    let (fast, timing) = within_time(start.elapsed(), Duration::from_secs(60));
    outcome(ok && fast, format!("{} (4 SE); {timing}", parts.join(", ")))
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |workers: &str| {
        let out = dir.path().join(format!("certify-{workers}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_levy-ruin"))
            .args(["certify", "--gallery", "--paths", "5000", "--seed", "88", "--workers", workers, "--out"])
            .arg(&out)
            .stderr(std::process::Stdio::null())
            .status()
            .unwrap();
        (status.code(), std::fs::read(&out).unwrap_or_default())
    };
    let (c1, a) = run("1");
    let (c4, b) = run("4");
    outcome(
        c1 == Some(0) && c4 == Some(0) && !a.is_empty() && a == b,
        format!("exit codes {c1:?}/{c4:?}, {} vs {} bytes, identical: {}", a.len(), b.len(), a == b),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("Laplace-exponent oracle agreement", criterion_1),
        ("root cross-check", criterion_2),
        ("exhaustiveness sweep", criterion_3),
        ("Lundberg bound certification", criterion_4),
        ("critical-exponent bound certification", criterion_5),
        ("almost-sure and never-ruin behaviour", criterion_6),
        ("LLN and martingale diagnostics", criterion_7),
        ("determinism across worker counts", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        failed += (!o.passed) as usize;
        println!("{} criterion {}: {name} — {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
