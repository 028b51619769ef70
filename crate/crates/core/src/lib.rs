//! Ruin-regime classification for integrable Lévy risk processes with
//! light-tailed negative jumps.
//!
//! A model is a [`LevyTriplet`]: a premium drift, a Gaussian variance rate and a
//! parametric [`JumpMeasure`]. From it the crate evaluates the Laplace exponent
//! `Ψ(γ) = log E[exp(-γ X_1)]`, classifies the model into one of four ruin
//! regimes, and reports the matching exponential bound on the ultimate ruin
//! probability `P(inf_t X_t <= -u)`. The [`simulator`] module checks those
//! bounds by Monte Carlo.
//!
//! ```
//! use levy_ruin::{classify, JumpMeasure, LevyTriplet, DEFAULT_ROOT_TOL};
//!
//! let model = LevyTriplet::new(2.0, 1.0, JumpMeasure::exponential_negative(1.0, 1.0));
//! let class = classify(&model, DEFAULT_ROOT_TOL).unwrap();
//! assert_eq!(class.case.letter(), 'B');
//! assert!((class.case.rate() - (5.0 - 17f64.sqrt()) / 2.0).abs() < 1e-9);
//! ```

pub mod config;
pub mod error;
pub mod gallery;
pub mod laplace_exponent;
pub mod levy_model;
pub mod perturbed;
pub mod quadrature;
pub mod report;
pub mod ruin_classifier;
pub mod simulator;

pub use error::RuinError;
pub use laplace_exponent::{EvaluationMode, LaplaceExponent, LimitProbe, PsiLimit};
pub use levy_model::{
    delta, gamma_c, mean_tail_moment, validate, JumpComponent, JumpMeasure, LevyTriplet,
    TailIntegral, TemperedPareto, ValidationReport,
};
pub use perturbed::{classify_perturbed, cross_check, PerturbedModel};
pub use ruin_classifier::{bound, classify, find_root, RuinCase, RuinClassification, DEFAULT_ROOT_TOL};
pub use simulator::{estimate_ruin, RuinEstimate, SimulationConfig, Verdict};
