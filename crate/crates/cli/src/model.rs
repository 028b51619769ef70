use std::path::PathBuf;

use clap::{Args, ValueEnum};
use levy_ruin::config::{parse_config_str, to_config_string};
use levy_ruin::{LevyTriplet, PerturbedModel};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    /// Premium plus Brownian perturbation minus Exp(α) claims at rate β
    Perturbed,
}

/// A model given either as a file or as perturbed-model flags.
#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Model file (`key = value` lines)
    #[arg(long, value_name = "FILE", conflicts_with = "model", required_unless_present = "model")]
    pub config: Option<PathBuf>,
    /// Built-in parametric model given by flags
    #[arg(long, value_enum, requires_all = ["p", "sigma2", "beta", "alpha"])]
    pub model: Option<ModelKind>,
    /// Premium rate
    #[arg(long, requires = "model", allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// Brownian variance rate
    #[arg(long, requires = "model", allow_negative_numbers = true)]
    pub sigma2: Option<f64>,
    /// Claim arrival rate
    #[arg(long, requires = "model", allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Exponential claim-size rate
    #[arg(long, requires = "model", allow_negative_numbers = true)]
    pub alpha: Option<f64>,
}

/// A resolved model plus what is needed to reproduce it.
pub struct ResolvedModel {
    pub triplet: LevyTriplet,
    pub source: String,
    /// Raw bytes of the model file, when one was read.
    pub config_bytes: Option<Vec<u8>>,
    /// The model in file format; identical for flag- and file-based input.
    pub canonical: String,
}

impl ResolvedModel {
    pub fn from_triplet(triplet: LevyTriplet, source: String, config_bytes: Option<Vec<u8>>) -> Self {
        let canonical = to_config_string(&triplet).unwrap_or_default();
        Self {
            triplet,
            source,
            config_bytes,
            canonical,
        }
    }
}

pub fn read_model_file(path: &PathBuf) -> Result<ResolvedModel, CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let text = String::from_utf8_lossy(&bytes);
    let triplet = parse_config_str(&text)?;
    Ok(ResolvedModel::from_triplet(triplet, path.display().to_string(), Some(bytes)))
}

impl ModelArgs {
    pub fn resolve(&self) -> Result<ResolvedModel, CliError> {
        if let Some(path) = &self.config {
            return read_model_file(path);
        }
        match self.model {
            Some(ModelKind::Perturbed) => {
                let (Some(p), Some(s2), Some(b), Some(a)) = (self.p, self.sigma2, self.beta, self.alpha) else {
                    return Err(CliError::Usage("--model perturbed needs --p, --sigma2, --beta and --alpha".into()));
                };
                let m = PerturbedModel::new(p, s2, b, a)?;
                Ok(ResolvedModel::from_triplet(m.triplet(), "perturbed flags".into(), None))
            }
            None => Err(CliError::Usage("give either --config or --model".into())),
        }
    }
}
