//! Four-way classification of the ultimate ruin probability
//! `P(τ(u) < ∞)`, `τ(u) = inf{t ≥ 0 : X_t ≤ -u}`, from the shape of `Ψ`.
//!
//! | case | condition                          | bound          |
//! |------|------------------------------------|----------------|
//! | A    | `δ ≤ 0`                            | 1              |
//! | B    | `Ψ(γ₀) = 0` for some `γ₀ ∈ (0,γ_c)` | `e^{-γ₀ u}`    |
//! | C    | non-decreasing paths, `δ > 0`      | 0              |
//! | D    | `γ_c < ∞`, `Ψ < 0` on `(0, γ_c)`   | `e^{-γ_c u}`   |

use std::fmt;

use crate::error::{Result, RuinError};
use crate::laplace_exponent::{LaplaceExponent, PsiLimit};
use crate::levy_model::{validate, LevyTriplet};

/// Absolute tolerance on the root residual `|Ψ(γ₀)|`.
pub const DEFAULT_ROOT_TOL: f64 = 1e-10;

const MAX_BISECTIONS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RuinCase {
    /// (A) ruin is certain for every initial capital.
    AlmostSureRuin,
    /// (B) Lundberg bound with adjustment coefficient `gamma0`.
    Lundberg { gamma0: f64 },
    /// (C) the process never decreases; ruin never happens.
    NeverRuin,
    /// (D) no root below the critical exponent; decay at rate `gamma_c`.
    CriticalExponent { gamma_c: f64 },
}

impl RuinCase {
    pub fn letter(&self) -> char {
        match self {
            RuinCase::AlmostSureRuin => 'A',
            RuinCase::Lundberg { .. } => 'B',
            RuinCase::NeverRuin => 'C',
            RuinCase::CriticalExponent { .. } => 'D',
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            RuinCase::AlmostSureRuin => "almost-sure ruin",
            RuinCase::Lundberg { .. } => "Lundberg bound",
            RuinCase::NeverRuin => "never ruined",
            RuinCase::CriticalExponent { .. } => "critical-exponent bound",
        }
    }

    /// Exponential decay rate of the bound: 0 for A, `+∞` for C.
    pub fn rate(&self) -> f64 {
        match *self {
            RuinCase::AlmostSureRuin => 0.0,
            RuinCase::Lundberg { gamma0 } => gamma0,
            RuinCase::NeverRuin => f64::INFINITY,
            RuinCase::CriticalExponent { gamma_c } => gamma_c,
        }
    }

    pub fn bound(&self, u: f64) -> Result<f64> {
        if !(u >= 0.0) {
            return Err(RuinError::NegativeCapital(u));
        }
        Ok(match *self {
            RuinCase::AlmostSureRuin => 1.0,
            RuinCase::Lundberg { gamma0: rate } | RuinCase::CriticalExponent { gamma_c: rate } => (-rate * u).exp(),
            RuinCase::NeverRuin => 0.0,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuinClassification {
    pub case: RuinCase,
    pub delta: f64,
    pub gamma_c: f64,
    /// Every `(γ, Ψ(γ))` evaluated while deciding the case.
    pub psi_samples: Vec<(f64, f64)>,
    /// `|Ψ(γ₀)|` in case B.
    pub root_residual: Option<f64>,
    pub warnings: Vec<String>,
}

impl RuinClassification {
    pub fn bound(&self, u: f64) -> Result<f64> {
        self.case.bound(u)
    }

    /// `case=<A|B|C|D> rate=<float> delta=<float> gamma_c=<float|inf>`
    pub fn summary_line(&self) -> String {
        format!(
            "case={} rate={} delta={} gamma_c={}",
            self.case.letter(),
            self.case.rate(),
            self.delta,
            self.gamma_c
        )
    }
}

impl fmt::Display for RuinClassification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "case:          {} ({})", self.case.letter(), self.case.description())?;
        writeln!(f, "rate:          {}", self.case.rate())?;
        writeln!(f, "delta:         {}", self.delta)?;
        writeln!(f, "gamma_c:       {}", self.gamma_c)?;
        match self.root_residual {
            Some(r) => writeln!(f, "root residual: {r:e}")?,
            None => writeln!(f, "root residual: n/a")?,
        }
        writeln!(f, "psi samples:   {}", self.psi_samples.len())?;
        let bound = match self.case {
            RuinCase::AlmostSureRuin => "P(ruin) = 1".to_owned(),
            RuinCase::NeverRuin => "P(ruin) = 0".to_owned(),
            RuinCase::Lundberg { gamma0: r } | RuinCase::CriticalExponent { gamma_c: r } => {
                format!("P(ruin) <= exp(-{r} u)")
            }
        };
        writeln!(f, "bound:         {bound}")?;
        for w in &self.warnings {
            writeln!(f, "warning:       {w}")?;
        }
        Ok(())
    }
}

/// `bound(u)` for a classification; rejects negative `u`.
pub fn bound(classification: &RuinClassification, u: f64) -> Result<f64> {
    classification.bound(u)
}

/// Positive root of `Ψ` by geometric bracketing from `tol` followed by
/// bisection. Needs `δ > 0`.
pub fn find_root(le: &LaplaceExponent, tol: f64) -> Result<f64> {
    find_root_traced(le, tol, &mut Vec::new())
}

fn find_root_traced(le: &LaplaceExponent, tol: f64, samples: &mut Vec<(f64, f64)>) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(RuinError::InvalidParameter {
            name: "tol",
            reason: format!("must be > 0, got {tol}"),
        });
    }
    if !(le.delta() > 0.0) {
        return Err(RuinError::InvalidParameter {
            name: "delta",
            reason: format!("root search needs delta > 0, got {}", le.delta()),
        });
    }
    let gamma_c = le.gamma_c();
    let cap = if gamma_c.is_finite() {
        gamma_c * (1.0 - 2f64.powi(-40))
    } else {
        2f64.powi(1000)
    };

    let mut lo = 0.0;
    let mut g = tol.min(cap);
    let mut hi = loop {
        let v = le.psi(g)?;
        samples.push((g, v));
        if v == 0.0 {
            return Ok(g);
        }
        if v > 0.0 {
            break g;
        }
        lo = g;
        if g >= cap {
            return Err(RuinError::NoRoot { gamma_c });
        }
        g = (2.0 * g).min(cap);
    };

    let mut best = (hi, f64::INFINITY);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = le.psi(mid)?;
        samples.push((mid, v));
        if v.abs() < best.1 {
            best = (mid, v.abs());
        }
        if v < 0.0 {
            lo = mid;
        } else if v > 0.0 {
            hi = mid;
        } else {
            return Ok(mid);
        }
        if hi - lo <= tol * mid.max(1.0) && v.abs() <= tol {
            return Ok(mid);
        }
    }
    // Bracket exhausted at floating-point resolution.
    Ok(best.0)
}

/// Classifies `triplet` into case A, B, C or D.
pub fn classify(triplet: &LevyTriplet, tol: f64) -> Result<RuinClassification> {
    validate(triplet).into_result()?;
    let le = LaplaceExponent::new(triplet)?;
    let delta = le.delta();
    let gamma_c = le.gamma_c();
    let mut out = RuinClassification {
        case: RuinCase::AlmostSureRuin,
        delta,
        gamma_c,
        psi_samples: Vec::new(),
        root_residual: None,
        warnings: Vec::new(),
    };

    if delta <= 0.0 {
        return Ok(out);
    }
    // Premium form: with no Gaussian part and no downward jumps the drift
    // between jumps is the premium, so the paths are non-decreasing iff p ≥ 0.
    if triplet.is_subordinator_shape() && triplet.premium >= 0.0 {
        out.case = RuinCase::NeverRuin;
        return Ok(out);
    }

    let has_root = if gamma_c.is_finite() {
        let probe = le.limit_at_gamma_c()?;
        out.psi_samples.extend_from_slice(&probe.samples);
        match probe.limit {
            PsiLimit::Diverges => true,
            PsiLimit::Finite(v) => v > 0.0,
            PsiLimit::Inconclusive { last } => {
                return Err(RuinError::Inconclusive {
                    gamma_c,
                    refinements: probe.samples.len() as u32,
                    last,
                })
            }
        }
    } else {
        true
    };

    if has_root {
        let gamma0 = find_root_traced(&le, tol, &mut out.psi_samples)?;
        out.root_residual = Some(le.psi(gamma0)?.abs());
        out.case = RuinCase::Lundberg { gamma0 };
    } else {
        out.case = RuinCase::CriticalExponent { gamma_c };
    }
    Ok(out)
}
