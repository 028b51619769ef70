//! Closed-form analysis of the Brownian-perturbed Cramér-Lundberg model
//! `Y_t = u + p t + σ W_t - Σ_{n ≤ N_t} U_n`, `N` Poisson(β), `U_n` ~ Exp(α).
//!
//! For `γ ∈ [0, α)`, `Ψ(γ) = -A(γ) B(γ) / 2` with `A(γ) = γ / (α - γ)` and the
//! quadratic `B(γ) = σ²γ² - (σ²α + 2p)γ + 2(pα - β)`, whose discriminant is
//! `Δ = (σ²α - 2p)² + 8σ²β > 0`.

use crate::error::{Result, RuinError};
use crate::levy_model::{JumpMeasure, LevyTriplet};
use crate::ruin_classifier::{classify, RuinCase, RuinClassification};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbedModel {
    pub p: f64,
    pub sigma2: f64,
    pub beta: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factorization {
    pub a: f64,
    pub b: f64,
    pub psi: f64,
}

impl PerturbedModel {
    pub fn new(p: f64, sigma2: f64, beta: f64, alpha: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("sigma2", sigma2), ("beta", beta), ("alpha", alpha)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(RuinError::InvalidParameter {
                    name,
                    reason: format!("must be finite and > 0, got {v}"),
                });
            }
        }
        Ok(Self { p, sigma2, beta, alpha })
    }

    pub fn triplet(&self) -> LevyTriplet {
        LevyTriplet::new(self.p, self.sigma2, JumpMeasure::exponential_negative(self.beta, self.alpha))
    }

    pub fn delta(&self) -> f64 {
        self.p - self.beta / self.alpha
    }

    pub fn discriminant(&self) -> f64 {
        let d = self.sigma2 * self.alpha - 2.0 * self.p;
        d * d + 8.0 * self.sigma2 * self.beta
    }

    /// `(γ₋, γ₊)`. The larger-magnitude root comes from the quadratic formula
    /// and the smaller from the product of roots `c / a`, so `γ₋` keeps full
    /// precision when `√Δ ≈ σ²α + 2p`.
    pub fn roots(&self) -> (f64, f64) {
        let s = self.sigma2 * self.alpha + 2.0 * self.p;
        let q = 0.5 * (s + self.discriminant().sqrt());
        let c = 2.0 * (self.p * self.alpha - self.beta);
        (c / q, q / self.sigma2)
    }

    pub fn gamma_minus(&self) -> f64 {
        self.roots().0
    }

    pub fn gamma_plus(&self) -> f64 {
        self.roots().1
    }

    pub fn b(&self, gamma: f64) -> f64 {
        self.sigma2 * gamma * gamma - (self.sigma2 * self.alpha + 2.0 * self.p) * gamma
            + 2.0 * (self.p * self.alpha - self.beta)
    }

    /// `A(γ)`, `B(γ)` and `Ψ(γ) = -A(γ)B(γ)/2` on `[0, α)`.
    pub fn factor_psi(&self, gamma: f64) -> Result<Factorization> {
        if !(gamma >= 0.0 && gamma < self.alpha) {
            return Err(RuinError::Domain {
                gamma,
                gamma_c: self.alpha,
            });
        }
        let a = gamma / (self.alpha - gamma);
        let b = self.b(gamma);
        Ok(Factorization { a, b, psi: -0.5 * a * b })
    }
}

/// Free-function form of [`PerturbedModel::factor_psi`].
pub fn factor_psi(m: &PerturbedModel, gamma: f64) -> Result<Factorization> {
    m.factor_psi(gamma)
}

/// Classification read off the closed form: A when `p ≤ β/α`, otherwise B with
/// rate `γ₋` if `γ₋ < α`, else D with rate `α`.
pub fn classify_perturbed(m: &PerturbedModel) -> RuinClassification {
    let delta = m.delta();
    let mut out = RuinClassification {
        case: RuinCase::AlmostSureRuin,
        delta,
        gamma_c: m.alpha,
        psi_samples: Vec::new(),
        root_residual: None,
        warnings: Vec::new(),
    };
    if delta <= 0.0 {
        return out;
    }
    let gamma_minus = m.gamma_minus();
    if gamma_minus < m.alpha {
        out.case = RuinCase::Lundberg { gamma0: gamma_minus };
        if let Ok(f) = m.factor_psi(gamma_minus) {
            out.psi_samples.push((gamma_minus, f.psi));
            out.root_residual = Some(f.psi.abs());
        }
    } else {
        // B(α) = -2β < 0 puts α strictly between the roots, so this branch
        // should be unreachable.
        out.case = RuinCase::CriticalExponent { gamma_c: m.alpha };
        out.warnings.push(format!(
            "gamma_minus = {gamma_minus} >= alpha = {}: closed-form branch D reached",
            m.alpha
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agreement {
    pub closed_form: RuinClassification,
    pub generic: Result<RuinClassification>,
    pub same_case: bool,
    pub rate_difference: f64,
    pub agree: bool,
    pub notes: Vec<String>,
}

/// Runs [`classify_perturbed`] and the generic [`classify`] on the same model
/// and compares case and rate. Rate agreement is `|Δrate| ≤ tol max(1, rate)`.
pub fn cross_check(m: &PerturbedModel, tol: f64) -> Agreement {
    let closed_form = classify_perturbed(m);
    let generic = classify(&m.triplet(), tol.min(crate::ruin_classifier::DEFAULT_ROOT_TOL));
    let mut notes = Vec::new();
    let (same_case, rate_difference) = match &generic {
        Ok(g) => {
            let same = g.case.letter() == closed_form.case.letter();
            let (a, b) = (g.case.rate(), closed_form.case.rate());
            let diff = if a == b { 0.0 } else { (a - b).abs() };
            if !same {
                notes.push(format!(
                    "case mismatch: closed form {} vs generic {}",
                    closed_form.case.letter(),
                    g.case.letter()
                ));
            }
            (same, diff)
        }
        Err(e) => {
            notes.push(format!("generic classification failed: {e}"));
            (false, f64::NAN)
        }
    };
    let scale = closed_form.case.rate().max(1.0);
    let agree = same_case && rate_difference <= tol * scale;
    if same_case && !agree {
        notes.push(format!("rate difference {rate_difference} exceeds {}", tol * scale));
    }
    notes.extend(closed_form.warnings.iter().cloned());
    Agreement {
        closed_form,
        generic,
        same_case,
        rate_difference,
        agree,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laplace_exponent::LaplaceExponent;

    fn model(p: f64, s2: f64, b: f64, a: f64) -> PerturbedModel {
        PerturbedModel::new(p, s2, b, a).unwrap()
    }

    #[test]
    fn factor_psi_examples() {
        let m = model(2.0, 1.0, 1.0, 1.0);
        let f = m.factor_psi(0.5).unwrap();
        assert_eq!((f.a, f.b, f.psi), (1.0, -0.25, 0.125));
        let le = LaplaceExponent::new(&m.triplet()).unwrap();
        assert!((le.psi(0.5).unwrap() - f.psi).abs() < 1e-15);

        let f0 = m.factor_psi(0.0).unwrap();
        assert_eq!((f0.a, f0.b, f0.psi), (0.0, 2.0, 0.0));

        let root = (5.0 - 17f64.sqrt()) / 2.0;
        let fr = m.factor_psi(root).unwrap();
        assert!(fr.b.abs() < 1e-14 && fr.psi.abs() < 1e-14);

        assert!(m.factor_psi(1.0).is_err());
    }

    #[test]
    fn classify_perturbed_examples() {
        assert_eq!(classify_perturbed(&model(1.0, 1.0, 2.0, 1.0)).case, RuinCase::AlmostSureRuin);
        let b = classify_perturbed(&model(2.0, 1.0, 1.0, 1.0));
        assert!((b.case.rate() - (5.0 - 17f64.sqrt()) / 2.0).abs() < 1e-15);
        assert_eq!(b.case.letter(), 'B');
        let b = classify_perturbed(&model(2.0, 10.0, 1.0, 1.0));
        assert!((b.case.rate() - (14.0 - 116f64.sqrt()) / 20.0).abs() < 1e-15);
        assert!((b.case.rate() - 0.161_483_5).abs() < 1e-7);
    }

    #[test]
    fn stable_root_matches_textbook_formula_away_from_cancellation() {
        let m = model(2.0, 1.0, 1.0, 1.0);
        let naive = (m.sigma2 * m.alpha + 2.0 * m.p - m.discriminant().sqrt()) / (2.0 * m.sigma2);
        assert!((m.gamma_minus() - naive).abs() < 1e-15);
        let naive_plus = (m.sigma2 * m.alpha + 2.0 * m.p + m.discriminant().sqrt()) / (2.0 * m.sigma2);
        assert!((m.gamma_plus() - naive_plus).abs() < 1e-15);
    }

    #[test]
    fn near_critical_root_keeps_precision() {
        // p barely above β/α: γ₋ ≈ small, where the naive formula cancels
        let m = model(1.0 + 1e-9, 1e-3, 1.0, 1.0);
        let g = m.gamma_minus();
        let residual = m.b(g);
        assert!(residual.abs() < 1e-20, "{residual}");
        assert!(g > 0.0);
    }

    #[test]
    fn cross_check_examples() {
        let r = cross_check(&model(2.0, 1.0, 1.0, 1.0), 1e-9);
        assert!(r.agree, "{:?}", r.notes);
        assert!(r.rate_difference <= 1e-9);
        let r = cross_check(&model(1.0, 1.0, 2.0, 1.0), 1e-9);
        assert!(r.agree && r.closed_form.case == RuinCase::AlmostSureRuin);
    }

    #[test]
    fn rejects_non_positive_parameters() {
        assert!(PerturbedModel::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(PerturbedModel::new(1.0, 1.0, 1.0, f64::NAN).is_err());
    }
}
