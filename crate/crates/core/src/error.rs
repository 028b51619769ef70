use thiserror::Error;

pub type Result<T, E = RuinError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuinError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("model rejected: {0}")]
    InvalidModel(String),

    #[error("gamma = {gamma} is outside the domain [0, {gamma_c})")]
    Domain { gamma: f64, gamma_c: f64 },

    #[error("initial capital must be non-negative, got {0}")]
    NegativeCapital(f64),

    #[error("no sign change of the Laplace exponent below gamma_c = {gamma_c}")]
    NoRoot { gamma_c: f64 },

    #[error("limit of the Laplace exponent at gamma_c = {gamma_c} is inconclusive after {refinements} refinements (last value {last})")]
    Inconclusive {
        gamma_c: f64,
        refinements: u32,
        last: f64,
    },

    #[error("quadrature failed to reach tolerance on {what}: estimate {value}, error {error}")]
    Quadrature {
        what: &'static str,
        value: f64,
        error: f64,
    },

    #[error("closed-form and quadrature evaluations disagree at gamma = {gamma}: {closed} vs {quadrature}")]
    ModeDisagreement {
        gamma: f64,
        closed: f64,
        quadrature: f64,
    },

    #[error("invalid simulation setting: {0}")]
    Simulation(String),
}
