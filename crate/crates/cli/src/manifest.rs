use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::model::ResolvedModel;
use crate::CliError;

/// Everything needed to repeat a run: the subcommand, every resolved
/// parameter, the seed, the tool version and digests of the input model.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub parameters: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub model_source: Option<String>,
    /// SHA-256 of the model file as read, when a file was given.
    pub config_sha256: Option<String>,
    /// The model in file format and its SHA-256.
    pub model: Option<String>,
    pub model_sha256: Option<String>,
    pub outputs: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new(subcommand: &'static str) -> Self {
        Self {
            tool: env!("CARGO_BIN_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            parameters: BTreeMap::new(),
            seed: None,
            model_source: None,
            config_sha256: None,
            model: None,
            model_sha256: None,
            outputs: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.parameters.insert(key.to_owned(), v);
        self
    }

    pub fn with_model(&mut self, m: &ResolvedModel) -> &mut Self {
        self.model_source = Some(m.source.clone());
        self.config_sha256 = m.config_bytes.as_deref().map(sha256_hex);
        self.model_sha256 = Some(sha256_hex(m.canonical.as_bytes()));
        self.model = Some(m.canonical.clone());
        self
    }

    /// Writes to `explicit` when given, else next to `out` as
    /// `<out>.manifest.json`; does nothing when neither is set.
    pub fn write(&self, explicit: Option<&Path>, out: Option<&Path>) -> Result<(), CliError> {
        let target: PathBuf = match (explicit, out) {
            (Some(p), _) => p.to_path_buf(),
            (None, Some(o)) => {
                let mut name = o.as_os_str().to_owned();
                name.push(".manifest.json");
                PathBuf::from(name)
            }
            (None, None) => return Ok(()),
        };
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&target, text).map_err(|source| CliError::Io {
            path: target.display().to_string(),
            source,
        })
    }
}
