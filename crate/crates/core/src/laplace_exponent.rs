//! The Laplace exponent `Ψ(γ) = log E[e^{-γ X_1}]` on `[0, γ_c)`:
//!
//! `Ψ(γ) = -δγ + σ²γ²/2 + ∫ (e^{-γx} - 1 + γx) Π(dx)`,
//! `Ψ'(γ) = -δ + σ²γ + ∫ x (1 - e^{-γx}) Π(dx)`.
//!
//! Exponential families have closed forms. The tempered Pareto family, and
//! every family in [`EvaluationMode::Quadrature`], goes through adaptive
//! Gauss-Kronrod with the jump integral split at `|x| = 1`.

use crate::error::{Result, RuinError};
use crate::levy_model::{validate, JumpComponent, LevyTriplet, TemperedPareto};
use crate::quadrature::{integrate, integrate_to_infinity, Integral, Tolerance};

const QUAD_TOL: Tolerance = Tolerance::new(1e-300, 1e-13);
/// Largest accepted quadrature error, relative to the integral.
const QUAD_ACCEPT: f64 = 1e-8;
const MODE_AGREEMENT: f64 = 1e-8;

/// Refinement cap for [`LaplaceExponent::limit_at_gamma_c`].
pub const LIMIT_MAX_REFINEMENTS: u32 = 60;
/// Values above this, with growing increments, are read as divergence.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;
const LIMIT_CONVERGENCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvaluationMode {
    /// Closed forms where the family has one, quadrature otherwise.
    #[default]
    ClosedForm,
    /// Quadrature for every jump component.
    Quadrature,
    /// Both routes; disagreement beyond 1e-8 relative is an error.
    CrossChecked,
}

/// `e^z - 1 - z` without cancellation near zero.
pub(crate) fn exp_excess(z: f64) -> f64 {
    let a = z.abs();
    if a < 1e-4 {
        z * z * (0.5 + z * (1.0 / 6.0 + z / 24.0))
    } else if a < 1.0 {
        let mut term = z * z / 2.0;
        let mut sum = term;
        let mut k = 2.0;
        while term.abs() > 1e-17 * sum.abs() {
            k += 1.0;
            term *= z / k;
            sum += term;
        }
        sum
    } else {
        z.exp_m1() - z
    }
}

/// `(e^z - 1 - z) e^{w}` without overflow when `z` is large and `w` very
/// negative.
fn excess_weighted(z: f64, log_w: f64) -> f64 {
    if z > 30.0 {
        (z + log_w).exp() - (1.0 + z) * log_w.exp()
    } else {
        exp_excess(z) * log_w.exp()
    }
}

/// `(e^z - 1) e^{w}`, same guard.
fn expm1_weighted(z: f64, log_w: f64) -> f64 {
    if z > 30.0 {
        (z + log_w).exp() - log_w.exp()
    } else {
        z.exp_m1() * log_w.exp()
    }
}

fn accept(what: &'static str, r: Integral) -> Result<f64> {
    if r.value.is_finite() && r.error <= (QUAD_ACCEPT * r.value.abs()).max(1e-14) {
        Ok(r.value)
    } else {
        Err(RuinError::Quadrature {
            what,
            value: r.value,
            error: r.error,
        })
    }
}

fn tail_scale(decay: f64) -> f64 {
    (1.0 / decay).clamp(1e-3, 1e6)
}

/// Which integrand a jump-magnitude quadrature evaluates.
#[derive(Clone, Copy)]
enum Kernel {
    Psi,
    PsiPrime,
}

/// Quadrature of the jump part over magnitudes `y > 0`, where the jump is
/// `x = sign * y` and the magnitude density is `e^{log_density(y)}`.
fn jump_quadrature(
    kernel: Kernel,
    gamma: f64,
    sign: f64,
    support_start: f64,
    decay: f64,
    log_density: impl Fn(f64) -> f64,
) -> Result<f64> {
    // z = -γx = -γ sign y
    let f = |y: f64| {
        let z = -gamma * sign * y;
        match kernel {
            Kernel::Psi => excess_weighted(z, log_density(y)),
            // x (1 - e^{-γx}) = -sign y (e^z - 1)
            Kernel::PsiPrime => -sign * y * expm1_weighted(z, log_density(y)),
        }
    };
    let mut total = 0.0;
    if support_start < 1.0 {
        total += accept("jump integral on |x| < 1", integrate(f, support_start, 1.0, QUAD_TOL))?;
    }
    let start = support_start.max(1.0);
    total += accept(
        "jump integral on |x| >= 1",
        integrate_to_infinity(f, start, tail_scale(decay), QUAD_TOL),
    )?;
    Ok(total)
}

fn tempered_quadrature(kernel: Kernel, gamma: f64, tp: &TemperedPareto) -> Result<f64> {
    let ln_c = tp.scale.ln();
    let decay = (tp.alpha - gamma).max(tp.alpha * 1e-6);
    jump_quadrature(kernel, gamma, -1.0, tp.cutoff, decay, |y| {
        ln_c - tp.alpha * y - tp.power * y.ln()
    })
}

fn exponential_quadrature(kernel: Kernel, gamma: f64, beta: f64, alpha: f64, sign: f64) -> Result<f64> {
    let ln_ba = (beta * alpha).ln();
    let decay = if sign < 0.0 { alpha - gamma } else { alpha };
    jump_quadrature(kernel, gamma, sign, 0.0, decay, |y| ln_ba - alpha * y)
}

fn closed_form(kernel: Kernel, gamma: f64, c: &JumpComponent) -> Option<f64> {
    match (*c, kernel) {
        (JumpComponent::ExponentialNegative { beta, alpha }, Kernel::Psi) => {
            Some(beta * gamma * gamma / (alpha * (alpha - gamma)))
        }
        (JumpComponent::ExponentialNegative { beta, alpha }, Kernel::PsiPrime) => {
            let d = alpha - gamma;
            Some(beta * gamma * (2.0 * alpha - gamma) / (alpha * d * d))
        }
        (JumpComponent::ExponentialPositive { beta, alpha }, Kernel::Psi) => {
            Some(beta * gamma * gamma / (alpha * (alpha + gamma)))
        }
        (JumpComponent::ExponentialPositive { beta, alpha }, Kernel::PsiPrime) => {
            let s = alpha + gamma;
            Some(beta * gamma * (2.0 * alpha + gamma) / (alpha * s * s))
        }
        (JumpComponent::TemperedParetoNegative(_), _) => None,
    }
}

fn quadrature_form(kernel: Kernel, gamma: f64, c: &JumpComponent) -> Result<f64> {
    match *c {
        JumpComponent::ExponentialNegative { beta, alpha } => exponential_quadrature(kernel, gamma, beta, alpha, -1.0),
        JumpComponent::ExponentialPositive { beta, alpha } => exponential_quadrature(kernel, gamma, beta, alpha, 1.0),
        JumpComponent::TemperedParetoNegative(tp) => tempered_quadrature(kernel, gamma, &tp),
    }
}

/// Status of `lim_{γ→γ_c-} Ψ(γ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PsiLimit {
    Finite(f64),
    Diverges,
    Inconclusive { last: f64 },
}

/// Result of the refinement `γ_k = γ_c (1 - 2^{-k})`, with every sample taken.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitProbe {
    pub limit: PsiLimit,
    pub samples: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub gamma: f64,
    pub psi: f64,
    pub psi_prime: f64,
}

/// Evaluator of `Ψ` and `Ψ'` for a validated triplet. Immutable; safe to share
/// across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceExponent {
    triplet: LevyTriplet,
    delta: f64,
    gamma_c: f64,
    mode: EvaluationMode,
}

impl LaplaceExponent {
    pub fn new(triplet: &LevyTriplet) -> Result<Self> {
        Self::with_mode(triplet, EvaluationMode::default())
    }

    pub fn with_mode(triplet: &LevyTriplet, mode: EvaluationMode) -> Result<Self> {
        validate(triplet).into_result()?;
        Ok(Self {
            delta: triplet.delta()?,
            gamma_c: triplet.gamma_c(),
            triplet: triplet.clone(),
            mode,
        })
    }

    pub fn triplet(&self) -> &LevyTriplet {
        &self.triplet
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gamma_c(&self) -> f64 {
        self.gamma_c
    }

    pub fn mode(&self) -> EvaluationMode {
        self.mode
    }

    fn check_domain(&self, gamma: f64) -> Result<()> {
        if gamma >= 0.0 && gamma < self.gamma_c {
            Ok(())
        } else {
            Err(RuinError::Domain {
                gamma,
                gamma_c: self.gamma_c,
            })
        }
    }

    fn jump_part(&self, kernel: Kernel, gamma: f64) -> Result<f64> {
        let mut total = 0.0;
        for c in self.triplet.jumps.components() {
            let closed = closed_form(kernel, gamma, c);
            total += match (self.mode, closed) {
                (EvaluationMode::ClosedForm, Some(v)) => v,
                (EvaluationMode::CrossChecked, Some(v)) => {
                    let q = quadrature_form(kernel, gamma, c)?;
                    if (v - q).abs() > MODE_AGREEMENT * v.abs().max(q.abs()) {
                        return Err(RuinError::ModeDisagreement {
                            gamma,
                            closed: v,
                            quadrature: q,
                        });
                    }
                    v
                }
                _ => quadrature_form(kernel, gamma, c)?,
            };
        }
        Ok(total)
    }

    /// `Ψ(γ)` for `γ ∈ [0, γ_c)`.
    pub fn psi(&self, gamma: f64) -> Result<f64> {
        self.check_domain(gamma)?;
        if gamma == 0.0 {
            return Ok(0.0);
        }
        let jumps = self.jump_part(Kernel::Psi, gamma)?;
        Ok(-self.delta * gamma + 0.5 * self.triplet.sigma2 * gamma * gamma + jumps)
    }

    /// `Ψ'(γ)`; at `γ = 0` this is the right limit `-δ`.
    pub fn psi_prime(&self, gamma: f64) -> Result<f64> {
        self.check_domain(gamma)?;
        if gamma == 0.0 {
            return Ok(-self.delta);
        }
        let jumps = self.jump_part(Kernel::PsiPrime, gamma)?;
        Ok(-self.delta + self.triplet.sigma2 * gamma + jumps)
    }

    /// Probes `lim_{γ→γ_c-} Ψ(γ)` along `γ_k = γ_c (1 - 2^{-k})`.
    ///
    /// Divergence is declared once a value exceeds [`DIVERGENCE_THRESHOLD`]
    /// while the last three increments grow; a finite limit once the increment
    /// drops below `1e-12 max(1, |Ψ|)`, extrapolated geometrically. The probe
    /// ends early when `γ_k` is no longer representable below `γ_c`.
    pub fn limit_at_gamma_c(&self) -> Result<LimitProbe> {
        if !self.gamma_c.is_finite() {
            return Err(RuinError::InvalidParameter {
                name: "gamma_c",
                reason: "the limit probe needs a finite critical exponent".to_owned(),
            });
        }
        let mut samples: Vec<(f64, f64)> = Vec::new();
        let mut increments: Vec<f64> = Vec::new();
        for k in 1..=LIMIT_MAX_REFINEMENTS {
            let gamma = self.gamma_c * (1.0 - 0.5f64.powi(k as i32));
            if gamma >= self.gamma_c || samples.last().is_some_and(|&(g, _)| gamma <= g) {
                break;
            }
            let value = self.psi(gamma)?;
            if let Some(&(_, prev)) = samples.last() {
                increments.push(value - prev);
            }
            samples.push((gamma, value));

            let n = increments.len();
            if value > DIVERGENCE_THRESHOLD && n >= 3 && increments[n - 1] > increments[n - 2] && increments[n - 2] > increments[n - 3] {
                return Ok(LimitProbe {
                    limit: PsiLimit::Diverges,
                    samples,
                });
            }
            if n >= 2 {
                let d = increments[n - 1];
                if d.abs() <= LIMIT_CONVERGENCE * value.abs().max(1.0) {
                    let ratio = d / increments[n - 2];
                    let tail = if ratio > 0.0 && ratio < 1.0 {
                        d * ratio / (1.0 - ratio)
                    } else {
                        0.0
                    };
                    return Ok(LimitProbe {
                        limit: PsiLimit::Finite(value + tail),
                        samples,
                    });
                }
            }
        }
        let last = samples.last().map_or(f64::NAN, |s| s.1);
        Ok(LimitProbe {
            limit: PsiLimit::Inconclusive { last },
            samples,
        })
    }

    /// Default right end of a plotted curve: `γ_c` when finite, otherwise twice
    /// the first power of two (from 1) where `Ψ` turns positive, capped at
    /// `2^20`.
    pub fn default_curve_span(&self) -> Result<f64> {
        if self.gamma_c.is_finite() {
            return Ok(self.gamma_c);
        }
        let mut gamma = 1.0;
        while gamma < 1048576.0 && self.psi(gamma)? <= 0.0 {
            gamma *= 2.0;
        }
        Ok(if gamma >= 1048576.0 { 4.0 } else { 2.0 * gamma })
    }

    /// `n ≥ 2` samples of `(γ, Ψ, Ψ')` starting at `γ = 0`.
    pub fn curve(&self, n: usize) -> Result<Vec<CurvePoint>> {
        let span = self.default_curve_span()?;
        self.curve_to(n, span)
    }

    /// Samples on `[0, upper]` (or `[0, γ_c)` when `upper ≥ γ_c`).
    ///
    /// Against a finite `γ_c` about half the points are uniform on
    /// `[0, 0.9 γ_c)` and the rest approach `γ_c` geometrically, the last at
    /// `γ_c (1 - 2^{-20})`.
    pub fn curve_to(&self, n: usize, upper: f64) -> Result<Vec<CurvePoint>> {
        if n < 2 {
            return Err(RuinError::InvalidParameter {
                name: "n",
                reason: format!("need at least 2 samples, got {n}"),
            });
        }
        if !(upper > 0.0) {
            return Err(RuinError::InvalidParameter {
                name: "upper",
                reason: format!("must be > 0, got {upper}"),
            });
        }
        let grid: Vec<f64> = if upper >= self.gamma_c {
            let gc = self.gamma_c;
            let n_lin = n.div_ceil(2);
            let n_geo = n - n_lin;
            let mut g: Vec<f64> = (0..n_lin).map(|i| 0.9 * gc * i as f64 / n_lin as f64).collect();
            if n_geo == 1 {
                g.push(gc * (1.0 - 2f64.powi(-20)));
            } else if n_geo > 1 {
                // gaps 0.1 r^j with 0.1 r^{n_geo-1} = 2^{-20}
                let r = (2f64.powi(-20) / 0.1).powf(1.0 / (n_geo - 1) as f64);
                g.extend((0..n_geo).map(|j| gc * (1.0 - 0.1 * r.powi(j as i32))));
            }
            g
        } else {
            (0..n).map(|i| upper * i as f64 / (n - 1) as f64).collect()
        };
        grid.into_iter()
            .map(|gamma| {
                Ok(CurvePoint {
                    gamma,
                    psi: self.psi(gamma)?,
                    psi_prime: self.psi_prime(gamma)?,
                })
            })
            .collect()
    }
}

/// `Ψ(γ)` in one call.
pub fn psi(triplet: &LevyTriplet, gamma: f64) -> Result<f64> {
    LaplaceExponent::new(triplet)?.psi(gamma)
}

/// `Ψ'(γ)` in one call.
pub fn psi_prime(triplet: &LevyTriplet, gamma: f64) -> Result<f64> {
    LaplaceExponent::new(triplet)?.psi_prime(gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_model::JumpMeasure;

    fn perturbed(p: f64, s2: f64, beta: f64, alpha: f64) -> LevyTriplet {
        LevyTriplet::new(p, s2, JumpMeasure::exponential_negative(beta, alpha))
    }

    /// The printed closed form `-pγ + σ²γ²/2 - βα/(γ-α) - β`.
    fn printed_psi(p: f64, s2: f64, beta: f64, alpha: f64, g: f64) -> f64 {
        -p * g + 0.5 * s2 * g * g - beta * alpha / (g - alpha) - beta
    }

    #[test]
    fn exp_excess_is_accurate_across_regimes() {
        for z in [1e-8_f64, -3e-5, 2e-3, -0.4, 0.9, 1.5, -7.0, 20.0] {
            let naive = z.exp() - 1.0 - z;
            let e = exp_excess(z);
            if z.abs() > 0.5 {
                assert!(((e - naive) / naive).abs() < 1e-13, "z={z}");
            }
            // series reference from exp_m1: e^z - 1 - z
            let reference = z.exp_m1() - z;
            if z.abs() > 1e-2 {
                assert!(((e - reference) / e).abs() < 1e-12, "z={z}");
            }
        }
        // z²/2 + z³/6 at z = 1e-8
        assert!(((exp_excess(1e-8) - (5e-17 + 1e-24 / 6.0)) / 5e-17).abs() < 1e-15);
    }

    #[test]
    fn psi_examples() {
        let le = LaplaceExponent::new(&perturbed(2.0, 1.0, 1.0, 1.0)).unwrap();
        assert!((le.psi(0.5).unwrap() - 0.125).abs() < 1e-15);
        assert_eq!(le.psi(0.0).unwrap(), 0.0);
        let le0 = LaplaceExponent::new(&perturbed(2.0, 0.0, 1.0, 1.0)).unwrap();
        assert!(le0.psi(0.5).unwrap().abs() < 1e-15);
    }

    #[test]
    fn psi_matches_printed_closed_form() {
        let (p, s2, b, a) = (2.0, 1.0, 1.0, 1.0);
        let le = LaplaceExponent::new(&perturbed(p, s2, b, a)).unwrap();
        for i in 1..100 {
            let g = 0.0099 * i as f64;
            let expected = printed_psi(p, s2, b, a, g);
            let got = le.psi(g).unwrap();
            assert!((got - expected).abs() <= 1e-12 * expected.abs().max(1.0), "γ={g}");
        }
    }

    #[test]
    fn domain_errors() {
        let le = LaplaceExponent::new(&perturbed(2.0, 1.0, 1.0, 1.0)).unwrap();
        assert!(matches!(le.psi(1.0), Err(RuinError::Domain { .. })));
        assert!(matches!(le.psi(-0.1), Err(RuinError::Domain { .. })));
        assert!(matches!(le.psi_prime(2.0), Err(RuinError::Domain { .. })));
        assert!(le.psi(f64::NAN).is_err());
    }

    #[test]
    fn invalid_triplet_is_rejected() {
        let t = LevyTriplet::new(0.0, 0.0, JumpMeasure::none());
        assert!(matches!(LaplaceExponent::new(&t), Err(RuinError::InvalidModel(_))));
    }

    #[test]
    fn psi_prime_examples() {
        let le = LaplaceExponent::new(&perturbed(2.0, 1.0, 1.0, 1.0)).unwrap();
        assert_eq!(le.psi_prime(0.0).unwrap(), -1.0);
        assert!((le.psi_prime(1e-9).unwrap() + 1.0).abs() < 1e-8);
        let bm = LaplaceExponent::new(&LevyTriplet::new(0.0, 2.0, JumpMeasure::none())).unwrap();
        assert_eq!(bm.psi_prime(3.0).unwrap(), 6.0);
        let h = 1e-5;
        let fd = (le.psi(0.5 + h).unwrap() - le.psi(0.5 - h).unwrap()) / (2.0 * h);
        let d = le.psi_prime(0.5).unwrap();
        assert!((fd - d).abs() <= 1e-6f64.max(1e-4 * d.abs()));
    }

    #[test]
    fn quadrature_agrees_with_closed_form_for_two_sided_model() {
        let t = LevyTriplet::new(
            1.0,
            0.3,
            JumpMeasure::exponential_negative(1.5, 2.0).plus(JumpMeasure::exponential_positive(0.7, 3.0)),
        );
        let cf = LaplaceExponent::new(&t).unwrap();
        let qd = LaplaceExponent::with_mode(&t, EvaluationMode::Quadrature).unwrap();
        for i in 0..=99 {
            let g = 0.0198 * i as f64;
            let (a, b) = (cf.psi(g).unwrap(), qd.psi(g).unwrap());
            assert!((a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1e-3), "γ={g}: {a} vs {b}");
            let (a, b) = (cf.psi_prime(g).unwrap(), qd.psi_prime(g).unwrap());
            assert!((a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1e-3), "γ={g}: {a} vs {b}");
        }
    }

    #[test]
    fn cross_checked_mode_passes() {
        let le = LaplaceExponent::with_mode(&perturbed(2.0, 1.0, 1.0, 1.0), EvaluationMode::CrossChecked).unwrap();
        assert!((le.psi(0.5).unwrap() - 0.125).abs() < 1e-14);
    }

    #[test]
    fn limit_diverges_for_exponential_claims() {
        let le = LaplaceExponent::new(&perturbed(2.0, 1.0, 1.0, 1.0)).unwrap();
        let probe = le.limit_at_gamma_c().unwrap();
        assert_eq!(probe.limit, PsiLimit::Diverges);
    }

    #[test]
    fn limit_is_finite_and_negative_for_tempered_claims() {
        let t = LevyTriplet::with_mean_drift(1.0, 0.0, JumpMeasure::tempered_pareto_negative(1.0, 1.0, 3.0, 1.0));
        let le = LaplaceExponent::new(&t).unwrap();
        let probe = le.limit_at_gamma_c().unwrap();
        let PsiLimit::Finite(v) = probe.limit else {
            panic!("expected a finite limit, got {:?}", probe.limit)
        };
        assert!(v <= -0.5, "{v}");
        // Ψ(1) = -1 + ∫_1^∞ (1 - e^{-y} - y e^{-y}) y^{-3} dy
        let oracle = -1.0
            + crate::quadrature::integrate_to_infinity(
                |y| (1.0 - (-y).exp() - y * (-y).exp()) * y.powi(-3),
                1.0,
                1.0,
                Tolerance::default(),
            )
            .value;
        assert!((v - oracle).abs() < 1e-9, "{v} vs {oracle}");
    }

    #[test]
    fn limit_requires_finite_gamma_c() {
        let le = LaplaceExponent::new(&LevyTriplet::new(1.0, 1.0, JumpMeasure::none())).unwrap();
        assert!(le.limit_at_gamma_c().is_err());
    }

    #[test]
    fn curve_examples() {
        let bm = LaplaceExponent::new(&LevyTriplet::new(0.0, 1.5, JumpMeasure::none())).unwrap();
        let rows = bm.curve_to(3, 2.0).unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert_eq!(r.psi, 0.75 * r.gamma * r.gamma);
        }

        let le = LaplaceExponent::new(&perturbed(2.0, 1.0, 1.0, 1.0)).unwrap();
        let rows = le.curve(100).unwrap();
        assert_eq!(rows.len(), 100);
        assert_eq!((rows[0].gamma, rows[0].psi), (0.0, 0.0));
        assert!(rows.windows(2).all(|w| w[0].gamma < w[1].gamma));
        assert!(rows.last().unwrap().gamma < 1.0);
        let crossings: Vec<_> = rows
            .windows(2)
            .filter(|w| w[0].psi < 0.0 && w[1].psi >= 0.0)
            .map(|w| (w[0].gamma, w[1].gamma))
            .collect();
        assert_eq!(crossings.len(), 1);
        let root = (5.0 - 17f64.sqrt()) / 2.0;
        assert!(crossings[0].0 < root && root <= crossings[0].1);
        assert!(le.curve(1).is_err());
    }
}
