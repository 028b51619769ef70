//! Integrable Lévy triplets with parametric jump measures.
//!
//! The process is written in premium form,
//! `X_t = p t + σ W_t + Σ_{s ≤ t} ΔX_s`, with every shipped jump family of
//! finite activity. Its mean drift is `δ = E[X_1] = p + ∫ x Π(dx)`.

use std::fmt;

use crate::error::{Result, RuinError};
use crate::quadrature::{integrate, integrate_to_infinity, Tolerance};

const MOMENT_TOL: Tolerance = Tolerance::new(1e-300, 1e-13);

/// Value of an integral that may diverge analytically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailIntegral {
    Finite(f64),
    Divergent,
}

impl TailIntegral {
    pub fn is_finite(&self) -> bool {
        matches!(self, TailIntegral::Finite(_))
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            TailIntegral::Finite(v) => Some(v),
            TailIntegral::Divergent => None,
        }
    }
}

impl fmt::Display for TailIntegral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailIntegral::Finite(v) => write!(f, "{v}"),
            TailIntegral::Divergent => f.write_str("divergent"),
        }
    }
}

/// Negative jumps with Lévy density `c e^{α x} |x|^{-ρ}` on `x ≤ -x0`.
///
/// With `ρ ≥ 2` the negative tail integral `∫ e^{-γ x} Π(dx)` still converges
/// at `γ = α`, so the Laplace exponent has a finite limit at its critical
/// exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperedPareto {
    pub scale: f64,
    pub alpha: f64,
    pub power: f64,
    pub cutoff: f64,
}

impl TemperedPareto {
    pub fn new(scale: f64, alpha: f64, power: f64, cutoff: f64) -> Self {
        Self {
            scale,
            alpha,
            power,
            cutoff,
        }
    }

    /// `∫_{x0}^∞ y^{k-ρ} e^{-κ y} dy` for jump magnitudes `y = -x`.
    pub fn magnitude_moment(&self, k: f64, kappa: f64) -> f64 {
        let exponent = k - self.power;
        if kappa == 0.0 {
            debug_assert!(exponent < -1.0);
            return self.cutoff.powf(exponent + 1.0) / -(exponent + 1.0);
        }
        let x0 = self.cutoff;
        let scale = (1.0 / kappa).min(x0.max(1.0) * 1e6).max(x0 * 1e-3);
        integrate_to_infinity(
            |y| (-kappa * (y - x0)).exp() * (y / x0).powf(exponent),
            x0,
            scale,
            MOMENT_TOL,
        )
        .value
            * (-kappa * x0).exp()
            * x0.powf(exponent)
    }

    pub fn intensity(&self) -> f64 {
        self.scale * self.magnitude_moment(0.0, self.alpha)
    }

    pub fn mean_magnitude_rate(&self) -> f64 {
        self.scale * self.magnitude_moment(1.0, self.alpha)
    }

    pub fn density(&self, y: f64) -> f64 {
        if y < self.cutoff {
            0.0
        } else {
            self.scale * (-self.alpha * y).exp() * y.powf(-self.power)
        }
    }
}

/// One independent jump component of a Lévy measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JumpComponent {
    /// `Π(dx) = β α e^{α x} dx` on `x ≤ 0`: claims arriving at rate `β` with
    /// Exp(α) sizes.
    ExponentialNegative { beta: f64, alpha: f64 },
    /// `Π(dx) = β α e^{-α x} dx` on `x ≥ 0`.
    ExponentialPositive { beta: f64, alpha: f64 },
    TemperedParetoNegative(TemperedPareto),
}

impl JumpComponent {
    pub fn family_name(&self) -> &'static str {
        match self {
            JumpComponent::ExponentialNegative { .. } => "exponential_negative",
            JumpComponent::ExponentialPositive { .. } => "exponential_positive",
            JumpComponent::TemperedParetoNegative(_) => "tempered_pareto_negative",
        }
    }

    pub fn has_negative_jumps(&self) -> bool {
        !matches!(self, JumpComponent::ExponentialPositive { .. })
    }

    /// Total mass `Π(ℝ)`, i.e. the arrival rate of jumps.
    pub fn intensity(&self) -> f64 {
        match *self {
            JumpComponent::ExponentialNegative { beta, .. } | JumpComponent::ExponentialPositive { beta, .. } => beta,
            JumpComponent::TemperedParetoNegative(tp) => tp.intensity(),
        }
    }

    /// Signed `∫ x Π(dx)`.
    pub fn mean_jump_rate(&self) -> f64 {
        match *self {
            JumpComponent::ExponentialNegative { beta, alpha } => -beta / alpha,
            JumpComponent::ExponentialPositive { beta, alpha } => beta / alpha,
            JumpComponent::TemperedParetoNegative(tp) => -tp.mean_magnitude_rate(),
        }
    }

    pub fn gamma_c(&self) -> f64 {
        match *self {
            JumpComponent::ExponentialNegative { alpha, .. } => alpha,
            JumpComponent::ExponentialPositive { .. } => f64::INFINITY,
            JumpComponent::TemperedParetoNegative(tp) => tp.alpha,
        }
    }

    /// `∫_{-∞}^{-1} e^{-γ x} Π(dx)`.
    pub fn negative_tail_integral(&self, gamma: f64) -> TailIntegral {
        match *self {
            JumpComponent::ExponentialPositive { .. } => TailIntegral::Finite(0.0),
            JumpComponent::ExponentialNegative { beta, alpha } => {
                if gamma >= alpha {
                    TailIntegral::Divergent
                } else {
                    let k = alpha - gamma;
                    TailIntegral::Finite(beta * alpha * (-k).exp() / k)
                }
            }
            JumpComponent::TemperedParetoNegative(tp) => {
                if gamma > tp.alpha {
                    TailIntegral::Divergent
                } else {
                    // cutoff ≥ 1, so the whole support lies in the tail
                    TailIntegral::Finite(tp.scale * tp.magnitude_moment(0.0, tp.alpha - gamma))
                }
            }
        }
    }

    /// `∫ (x² ∧ 1) Π(dx)`.
    pub fn small_jump_integral(&self) -> f64 {
        match *self {
            JumpComponent::ExponentialNegative { beta, alpha } | JumpComponent::ExponentialPositive { beta, alpha } => {
                let inner = integrate(|y| y * y * alpha * (-alpha * y).exp(), 0.0, 1.0, MOMENT_TOL).value;
                beta * (inner + (-alpha).exp())
            }
            JumpComponent::TemperedParetoNegative(tp) => tp.intensity(),
        }
    }

    /// `∫_{|x| ≥ 1} |x| Π(dx)`.
    pub fn large_jump_integral(&self) -> f64 {
        match *self {
            JumpComponent::ExponentialNegative { beta, alpha } | JumpComponent::ExponentialPositive { beta, alpha } => {
                beta * (-alpha).exp() * (1.0 + 1.0 / alpha)
            }
            JumpComponent::TemperedParetoNegative(tp) => tp.mean_magnitude_rate(),
        }
    }

    fn check_parameters(&self, problems: &mut Vec<String>) {
        let family = self.family_name();
        let mut positive = |name: &str, v: f64| {
            if !(v.is_finite() && v > 0.0) {
                problems.push(format!("{family} {name} must be finite and > 0, got {v}"));
            }
        };
        match *self {
            JumpComponent::ExponentialNegative { beta, alpha } | JumpComponent::ExponentialPositive { beta, alpha } => {
                positive("beta", beta);
                positive("alpha", alpha);
            }
            JumpComponent::TemperedParetoNegative(tp) => {
                positive("scale", tp.scale);
                positive("alpha", tp.alpha);
                if !(tp.power.is_finite() && tp.power >= 2.0) {
                    problems.push(format!("tempered_pareto_negative power must be >= 2, got {}", tp.power));
                }
                if !(tp.cutoff.is_finite() && tp.cutoff >= 1.0) {
                    problems.push(format!("tempered_pareto_negative cutoff must be >= 1, got {}", tp.cutoff));
                }
            }
        }
    }
}

/// A superposition of independent jump components; empty means no jumps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct JumpMeasure {
    components: Vec<JumpComponent>,
}

impl JumpMeasure {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn single(component: JumpComponent) -> Self {
        Self {
            components: vec![component],
        }
    }

    pub fn exponential_negative(beta: f64, alpha: f64) -> Self {
        Self::single(JumpComponent::ExponentialNegative { beta, alpha })
    }

    pub fn exponential_positive(beta: f64, alpha: f64) -> Self {
        Self::single(JumpComponent::ExponentialPositive { beta, alpha })
    }

    pub fn tempered_pareto_negative(scale: f64, alpha: f64, power: f64, cutoff: f64) -> Self {
        Self::single(JumpComponent::TemperedParetoNegative(TemperedPareto::new(
            scale, alpha, power, cutoff,
        )))
    }

    pub fn from_components(components: Vec<JumpComponent>) -> Self {
        Self { components }
    }

    /// Superposition of two independent jump measures.
    pub fn plus(mut self, other: JumpMeasure) -> Self {
        self.components.extend(other.components);
        self
    }

    pub fn components(&self) -> &[JumpComponent] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn has_negative_jumps(&self) -> bool {
        self.components.iter().any(JumpComponent::has_negative_jumps)
    }

    pub fn intensity(&self) -> f64 {
        self.components.iter().map(JumpComponent::intensity).sum()
    }

    pub fn mean_jump_rate(&self) -> f64 {
        self.components.iter().map(JumpComponent::mean_jump_rate).sum()
    }
}

/// Premium drift `p`, Gaussian variance rate `σ²` and jump measure `Π`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyTriplet {
    pub premium: f64,
    pub sigma2: f64,
    pub jumps: JumpMeasure,
}

impl LevyTriplet {
    pub fn new(premium: f64, sigma2: f64, jumps: JumpMeasure) -> Self {
        Self {
            premium,
            sigma2,
            jumps,
        }
    }

    /// Builds the triplet whose mean drift equals `delta` by solving for the
    /// premium.
    pub fn with_mean_drift(delta: f64, sigma2: f64, jumps: JumpMeasure) -> Self {
        let premium = delta - jumps.mean_jump_rate();
        Self::new(premium, sigma2, jumps)
    }

    pub fn delta(&self) -> Result<f64> {
        delta(self)
    }

    pub fn gamma_c(&self) -> f64 {
        gamma_c(&self.jumps)
    }

    /// Non-decreasing paths: no Gaussian part and no negative jumps.
    pub fn is_subordinator_shape(&self) -> bool {
        self.sigma2 == 0.0 && !self.jumps.has_negative_jumps()
    }
}

/// Critical exponent `γ_c = sup{γ ≥ 0 : ∫_{-∞}^{-1} e^{-γx} Π(dx) < ∞}`; the
/// minimum over components, `+∞` without negative jumps.
pub fn gamma_c(jumps: &JumpMeasure) -> f64 {
    jumps
        .components()
        .iter()
        .map(JumpComponent::gamma_c)
        .fold(f64::INFINITY, f64::min)
}

/// Mean drift `δ = E[X_1]`.
pub fn delta(triplet: &LevyTriplet) -> Result<f64> {
    let mut problems = Vec::new();
    for c in triplet.jumps.components() {
        c.check_parameters(&mut problems);
    }
    if !triplet.premium.is_finite() {
        problems.push(format!("premium must be finite, got {}", triplet.premium));
    }
    if !problems.is_empty() {
        return Err(RuinError::InvalidModel(problems.join("; ")));
    }
    Ok(triplet.premium + triplet.jumps.mean_jump_rate())
}

/// `∫_{-∞}^{-1} e^{-γx} Π(dx)` summed over components.
pub fn mean_tail_moment(jumps: &JumpMeasure, gamma: f64) -> Result<TailIntegral> {
    if !(gamma >= 0.0) {
        return Err(RuinError::InvalidParameter {
            name: "gamma",
            reason: format!("must be >= 0, got {gamma}"),
        });
    }
    let mut total = 0.0;
    for c in jumps.components() {
        match c.negative_tail_integral(gamma) {
            TailIntegral::Finite(v) => total += v,
            TailIntegral::Divergent => return Ok(TailIntegral::Divergent),
        }
    }
    Ok(TailIntegral::Finite(total))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            return Ok(());
        }
        let msg = self
            .failures()
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect::<Vec<_>>()
            .join("; ");
        Err(RuinError::InvalidModel(msg))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "[{}] {}: {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Checks parameter ranges, integrability, the light-tail condition and
/// non-degeneracy. Every check is reported; nothing short-circuits except the
/// integrals, which are skipped when parameters are out of range.
pub fn validate(triplet: &LevyTriplet) -> ValidationReport {
    let mut checks = Vec::new();

    let mut problems = Vec::new();
    if !triplet.premium.is_finite() {
        problems.push(format!("premium must be finite, got {}", triplet.premium));
    }
    if !(triplet.sigma2.is_finite() && triplet.sigma2 >= 0.0) {
        problems.push(format!("sigma2 must be finite and >= 0, got {}", triplet.sigma2));
    }
    for c in triplet.jumps.components() {
        c.check_parameters(&mut problems);
    }
    let params_ok = problems.is_empty();
    checks.push(Check {
        name: "parameters",
        passed: params_ok,
        detail: if params_ok {
            "all parameters in range".to_owned()
        } else {
            problems.join("; ")
        },
    });

    let integral_check = |name: &'static str, label: &str, value: Option<f64>| match value {
        Some(v) => Check {
            name,
            passed: v.is_finite(),
            detail: format!("{label} = {v}"),
        },
        None => Check {
            name,
            passed: false,
            detail: "not evaluated (invalid parameters)".to_owned(),
        },
    };
    let comps = triplet.jumps.components();
    let small = params_ok.then(|| comps.iter().map(JumpComponent::small_jump_integral).sum());
    let large = params_ok.then(|| comps.iter().map(JumpComponent::large_jump_integral).sum());
    checks.push(integral_check("levy_measure", "∫(x²∧1)Π(dx)", small));
    checks.push(integral_check("integrability", "∫_{|x|≥1}|x|Π(dx)", large));

    let gc = gamma_c(&triplet.jumps);
    checks.push(Check {
        name: "light_tail",
        passed: gc > 0.0,
        detail: format!("gamma_c = {gc}"),
    });

    let degenerate = triplet.premium == 0.0 && triplet.sigma2 == 0.0 && triplet.jumps.is_empty();
    checks.push(Check {
        name: "non_degenerate",
        passed: !degenerate,
        detail: if degenerate {
            "the zero process is excluded".to_owned()
        } else {
            "process is not identically zero".to_owned()
        },
    });

    ValidationReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_to_infinity;

    fn tp() -> JumpMeasure {
        JumpMeasure::tempered_pareto_negative(1.0, 1.0, 3.0, 1.0)
    }

    #[test]
    fn gamma_c_of_families() {
        assert_eq!(gamma_c(&JumpMeasure::exponential_negative(1.0, 1.5)), 1.5);
        assert_eq!(gamma_c(&JumpMeasure::none()), f64::INFINITY);
        assert_eq!(gamma_c(&JumpMeasure::exponential_positive(2.0, 4.0)), f64::INFINITY);
        assert_eq!(gamma_c(&tp()), 1.0);
    }

    #[test]
    fn tempered_tail_is_finite_at_gamma_c() {
        // at γ = α the integrand is exactly y^{-3} on [1, ∞)
        let v = mean_tail_moment(&tp(), 1.0).unwrap();
        assert_eq!(v, TailIntegral::Finite(0.5));
        assert_eq!(mean_tail_moment(&tp(), 1.0 + 1e-9).unwrap(), TailIntegral::Divergent);
    }

    #[test]
    fn delta_examples() {
        let t = LevyTriplet::new(2.0, 1.0, JumpMeasure::exponential_negative(1.0, 1.0));
        assert_eq!(delta(&t).unwrap(), 1.0);
        assert_eq!(delta(&LevyTriplet::new(3.0, 0.0, JumpMeasure::none())).unwrap(), 3.0);
        let t = LevyTriplet::new(1.0, 0.0, JumpMeasure::exponential_positive(2.0, 4.0));
        assert_eq!(delta(&t).unwrap(), 1.5);
    }

    #[test]
    fn delta_rejects_bad_parameters() {
        let t = LevyTriplet::new(1.0, 0.0, JumpMeasure::exponential_negative(1.0, -1.0));
        assert!(matches!(delta(&t), Err(RuinError::InvalidModel(_))));
    }

    #[test]
    fn mean_tail_moment_examples() {
        let m = JumpMeasure::exponential_negative(1.0, 1.0);
        let v = mean_tail_moment(&m, 0.5).unwrap().value().unwrap();
        assert!((v - 2.0 * (-0.5f64).exp()).abs() < 1e-15);
        // quadrature cross-check of the closed form
        let q = integrate_to_infinity(|y| (0.5 * y).exp() * (-y).exp(), 1.0, 2.0, Default::default()).value;
        assert!((v - q).abs() < 1e-12);
        assert_eq!(mean_tail_moment(&m, 1.0).unwrap(), TailIntegral::Divergent);
        assert_eq!(mean_tail_moment(&JumpMeasure::none(), 7.0).unwrap(), TailIntegral::Finite(0.0));
        assert!(mean_tail_moment(&m, -1.0).is_err());
    }

    #[test]
    fn validate_examples() {
        let ok = validate(&LevyTriplet::new(2.0, 1.0, JumpMeasure::exponential_negative(1.0, 1.0)));
        assert!(ok.is_valid(), "{ok}");

        let zero = validate(&LevyTriplet::new(0.0, 0.0, JumpMeasure::none()));
        assert!(!zero.is_valid());
        let failed: Vec<_> = zero.failures().map(|c| c.name).collect();
        assert_eq!(failed, vec!["non_degenerate"]);

        let tempered = validate(&LevyTriplet::new(1.0, 0.0, tp()));
        assert!(tempered.is_valid(), "{tempered}");
    }

    #[test]
    fn validate_lists_every_failure() {
        let bad = LevyTriplet::new(
            f64::NAN,
            -1.0,
            JumpMeasure::tempered_pareto_negative(1.0, 1.0, 1.5, 0.5),
        );
        let report = validate(&bad);
        let params = &report.checks[0];
        assert!(!params.passed);
        assert!(params.detail.contains("premium"));
        assert!(params.detail.contains("sigma2"));
        assert!(params.detail.contains("power"));
        assert!(params.detail.contains("cutoff"));
    }

    #[test]
    fn tempered_intensity_matches_exponential_integral() {
        // E_3(1) = ∫_1^∞ e^{-y} y^{-3} dy, E_2(1) = ∫_1^∞ e^{-y} y^{-2} dy
        let t = TemperedPareto::new(1.0, 1.0, 3.0, 1.0);
        assert!((t.intensity() - 0.109_691_967_197_760_14).abs() < 1e-13);
        assert!((t.mean_magnitude_rate() - 0.148_495_506_775_922_05).abs() < 1e-13);
    }

    #[test]
    fn with_mean_drift_solves_premium() {
        let t = LevyTriplet::with_mean_drift(1.0, 0.0, tp());
        assert!((delta(&t).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scaling_jump_sizes_scales_gamma_c() {
        for c in [0.5, 2.0, 7.0] {
            let m = JumpMeasure::exponential_negative(1.0, 3.0 / c);
            assert!((gamma_c(&m) - 3.0 / c).abs() < 1e-15);
        }
    }
}
