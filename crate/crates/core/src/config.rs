//! Model files: one `key = value` pair per line, `#` starts a comment.
//!
//! ```text
//! premium     = 2
//! sigma2      = 1
//! jump_family = exponential_negative
//! jump_beta   = 1
//! jump_alpha  = 1
//! ```
//!
//! A second, independent jump component uses the same keys prefixed with
//! `pos_` (`pos_jump_family`, `pos_jump_beta`, ...). Parsing collects every
//! problem in the file before failing.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::levy_model::{validate, JumpComponent, JumpMeasure, LevyTriplet, TemperedPareto};

const FAMILY_KEYS: [&str; 7] = [
    "jump_family",
    "jump_beta",
    "jump_alpha",
    "tp_scale",
    "tp_alpha",
    "tp_power",
    "tp_cutoff",
];

/// One problem found in a model file; `line` is 1-based, 0 when the problem
/// is not tied to a single line (a missing key, a model-level check).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub line: usize,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: ", self.line)?;
        }
        if let Some(k) = &self.key {
            write!(f, "`{k}`: ")?;
        }
        f.write_str(&self.message)
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid model file:\n{}", render(.0))]
    Invalid(Vec<ConfigIssue>),
}

impl ConfigError {
    pub fn issues(&self) -> &[ConfigIssue] {
        match self {
            ConfigError::Invalid(v) => v,
            ConfigError::Io { .. } => &[],
        }
    }
}

fn render(issues: &[ConfigIssue]) -> String {
    issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n")
}

struct Entry {
    line: usize,
    value: String,
}

struct Parser {
    entries: BTreeMap<String, Entry>,
    issues: Vec<ConfigIssue>,
}

impl Parser {
    fn issue(&mut self, line: usize, key: &str, message: impl Into<String>) {
        self.issues.push(ConfigIssue {
            line,
            key: Some(key.to_owned()),
            message: message.into(),
        });
    }

    fn number(&mut self, key: &str, required: bool) -> Option<(usize, f64)> {
        let Some(entry) = self.entries.get(key) else {
            if required {
                self.issue(0, key, "missing required key");
            }
            return None;
        };
        let (line, raw) = (entry.line, entry.value.clone());
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Some((line, v)),
            _ => {
                self.issue(line, key, format!("expected a finite number, got `{raw}`"));
                None
            }
        }
    }

    fn positive(&mut self, key: &str) -> Option<f64> {
        let (line, v) = self.number(key, true)?;
        if v > 0.0 {
            Some(v)
        } else {
            self.issue(line, key, format!("must be > 0, got {v}"));
            None
        }
    }

    fn at_least(&mut self, key: &str, min: f64) -> Option<f64> {
        let (line, v) = self.number(key, true)?;
        if v >= min {
            Some(v)
        } else {
            self.issue(line, key, format!("must be >= {min}, got {v}"));
            None
        }
    }

    /// Parses the component described by `prefix`-ed family keys. `Ok(None)`
    /// means no jumps; `Err(())` means issues were recorded.
    fn component(&mut self, prefix: &str, required: bool) -> Result<Option<JumpComponent>, ()> {
        let key = |k: &str| format!("{prefix}{k}");
        let family_key = key("jump_family");
        let Some(entry) = self.entries.get(&family_key) else {
            if required {
                self.issue(0, &family_key, "missing required key");
                return Err(());
            }
            let stray: Vec<String> = FAMILY_KEYS[1..]
                .iter()
                .map(|k| key(k))
                .filter(|k| self.entries.contains_key(k))
                .collect();
            for k in stray {
                let line = self.entries[&k].line;
                self.issue(line, &k, format!("given without `{family_key}`"));
            }
            return Ok(None);
        };
        let (family_line, family) = (entry.line, entry.value.clone());
        let before = self.issues.len();
        let used: &[&str] = match family.as_str() {
            "none" => &[],
            "exponential_negative" | "exponential_positive" => &["jump_beta", "jump_alpha"],
            "tempered_pareto_negative" => &["tp_scale", "tp_alpha", "tp_power", "tp_cutoff"],
            other => {
                self.issue(
                    family_line,
                    &family_key,
                    format!(
                        "unknown family `{other}` (expected none, exponential_negative, exponential_positive or tempered_pareto_negative)"
                    ),
                );
                return Err(());
            }
        };
        for k in &FAMILY_KEYS[1..] {
            let full = key(k);
            if !used.contains(k) {
                if let Some(e) = self.entries.get(&full) {
                    let line = e.line;
                    self.issue(line, &full, format!("not a parameter of family `{family}`"));
                }
            }
        }
        let comp = match family.as_str() {
            "none" => None,
            "exponential_negative" | "exponential_positive" => {
                let beta = self.positive(&key("jump_beta"));
                let alpha = self.positive(&key("jump_alpha"));
                match (beta, alpha) {
                    (Some(beta), Some(alpha)) if family == "exponential_negative" => {
                        Some(JumpComponent::ExponentialNegative { beta, alpha })
                    }
                    (Some(beta), Some(alpha)) => Some(JumpComponent::ExponentialPositive { beta, alpha }),
                    _ => None,
                }
            }
            _ => {
                let scale = self.positive(&key("tp_scale"));
                let alpha = self.positive(&key("tp_alpha"));
                let power = self.at_least(&key("tp_power"), 2.0);
                let cutoff = self.at_least(&key("tp_cutoff"), 1.0);
                match (scale, alpha, power, cutoff) {
                    (Some(s), Some(a), Some(p), Some(c)) => {
                        Some(JumpComponent::TemperedParetoNegative(TemperedPareto::new(s, a, p, c)))
                    }
                    _ => None,
                }
            }
        };
        if self.issues.len() > before {
            Err(())
        } else {
            Ok(comp)
        }
    }
}

fn is_known(key: &str) -> bool {
    let bare = key.strip_prefix("pos_").unwrap_or(key);
    key == "premium" || key == "sigma2" || FAMILY_KEYS.contains(&bare)
}

/// Parses model text; see the module docs for the format.
pub fn parse_config_str(text: &str) -> Result<LevyTriplet, ConfigError> {
    let mut p = Parser {
        entries: BTreeMap::new(),
        issues: Vec::new(),
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            p.issues.push(ConfigIssue {
                line,
                key: None,
                message: format!("expected `key = value`, got `{content}`"),
            });
            continue;
        };
        let (k, v) = (k.trim(), v.trim());
        if !is_known(k) {
            p.issue(line, k, "unknown key");
        } else if let Some(prev) = p.entries.get(k) {
            let msg = format!("duplicate key (first set on line {})", prev.line);
            p.issue(line, k, msg);
        } else {
            p.entries.insert(
                k.to_owned(),
                Entry {
                    line,
                    value: v.to_owned(),
                },
            );
        }
    }

    let premium = p.number("premium", true).map(|(_, v)| v);
    let sigma2 = match p.number("sigma2", true) {
        Some((line, v)) if v < 0.0 => {
            p.issue(line, "sigma2", format!("must be >= 0, got {v}"));
            None
        }
        other => other.map(|(_, v)| v),
    };
    let first = p.component("", true);
    let second = p.component("pos_", false);

    if !p.issues.is_empty() {
        p.issues.sort_by_key(|i| i.line);
        return Err(ConfigError::Invalid(p.issues));
    }
    let (Some(premium), Some(sigma2), Ok(first), Ok(second)) = (premium, sigma2, first, second) else {
        unreachable!("every failed field records an issue");
    };
    let jumps = JumpMeasure::from_components(first.into_iter().chain(second).collect());
    let triplet = LevyTriplet::new(premium, sigma2, jumps);

    let report = validate(&triplet);
    if !report.is_valid() {
        let issues = report
            .failures()
            .map(|c| ConfigIssue {
                line: 0,
                key: None,
                message: format!("{}: {}", c.name, c.detail),
            })
            .collect();
        return Err(ConfigError::Invalid(issues));
    }
    Ok(triplet)
}

/// Reads and parses a model file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<LevyTriplet, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_str(&text)
}

/// Writes `triplet` in the model-file format. Fails for measures with more
/// than two components, which the format cannot express.
pub fn to_config_string(triplet: &LevyTriplet) -> Option<String> {
    let comps = triplet.jumps.components();
    if comps.len() > 2 {
        return None;
    }
    let mut out = format!("premium = {}\nsigma2 = {}\n", triplet.premium, triplet.sigma2);
    if comps.is_empty() {
        out.push_str("jump_family = none\n");
    }
    for (c, prefix) in comps.iter().zip(["", "pos_"]) {
        out.push_str(&format!("{prefix}jump_family = {}\n", c.family_name()));
        match *c {
            JumpComponent::ExponentialNegative { beta, alpha } | JumpComponent::ExponentialPositive { beta, alpha } => {
                out.push_str(&format!("{prefix}jump_beta = {beta}\n{prefix}jump_alpha = {alpha}\n"));
            }
            JumpComponent::TemperedParetoNegative(tp) => {
                out.push_str(&format!(
                    "{prefix}tp_scale = {}\n{prefix}tp_alpha = {}\n{prefix}tp_power = {}\n{prefix}tp_cutoff = {}\n",
                    tp.scale, tp.alpha, tp.power, tp.cutoff
                ));
            }
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_pure_drift() {
        let t = parse_config_str("premium = 3\nsigma2 = 0\njump_family = none\n").unwrap();
        assert_eq!(t, LevyTriplet::new(3.0, 0.0, JumpMeasure::none()));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# perturbed model\n\npremium = 2 # p\nsigma2=1\njump_family = exponential_negative\njump_beta = 1\njump_alpha = 1\n";
        let t = parse_config_str(text).unwrap();
        assert_eq!(t, LevyTriplet::new(2.0, 1.0, JumpMeasure::exponential_negative(1.0, 1.0)));
    }

    #[test]
    fn negative_alpha_names_key_and_line() {
        let text = "premium = 2\nsigma2 = 1\njump_family = exponential_negative\njump_beta = 1\njump_alpha = -1\n";
        let err = parse_config_str(text).unwrap_err();
        let issues = err.issues();
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].line, 5);
        assert_eq!(issues[0].key.as_deref(), Some("jump_alpha"));
        assert!(err.to_string().contains("line 5"));
    }

    #[test]
    fn every_problem_is_listed() {
        let text = "premium = x\ncolour = blue\nsigma2 = -1\njump_family = exponential_negative\njump_beta = 0\nsigma2 = 2\n";
        let err = parse_config_str(text).unwrap_err();
        let keys: Vec<_> = err.issues().iter().map(|i| i.key.clone().unwrap_or_default()).collect();
        for k in ["premium", "colour", "sigma2", "jump_beta", "jump_alpha"] {
            assert!(keys.iter().any(|x| x == k), "{k} missing from {keys:?}");
        }
        // duplicate sigma2 on line 6
        assert!(err.issues().iter().any(|i| i.line == 6 && i.message.contains("duplicate")));
    }

    #[test]
    fn missing_keys() {
        let err = parse_config_str("premium = 1\n").unwrap_err();
        let keys: Vec<_> = err.issues().iter().filter_map(|i| i.key.as_deref()).collect();
        assert_eq!(keys, ["sigma2", "jump_family"]);
    }

    #[test]
    fn second_component_and_round_trip() {
        let text = "premium = 1\nsigma2 = 0.5\njump_family = tempered_pareto_negative\ntp_scale = 1\ntp_alpha = 1\ntp_power = 3\ntp_cutoff = 1\npos_jump_family = exponential_positive\npos_jump_beta = 2\npos_jump_alpha = 4\n";
        let t = parse_config_str(text).unwrap();
        assert_eq!(t.jumps.components().len(), 2);
        let again = parse_config_str(&to_config_string(&t).unwrap()).unwrap();
        assert_eq!(t, again);
    }

    #[test]
    fn tempered_ranges() {
        let text = "premium = 1\nsigma2 = 0\njump_family = tempered_pareto_negative\ntp_scale = 1\ntp_alpha = 1\ntp_power = 1.5\ntp_cutoff = 0.5\n";
        let err = parse_config_str(text).unwrap_err();
        let lines: Vec<_> = err.issues().iter().map(|i| i.line).collect();
        assert_eq!(lines, [6, 7]);
    }

    #[test]
    fn family_mismatch_and_degenerate_model() {
        let text = "premium = 1\nsigma2 = 0\njump_family = none\njump_beta = 1\n";
        assert!(parse_config_str(text).is_err());
        let err = parse_config_str("premium = 0\nsigma2 = 0\njump_family = none\n").unwrap_err();
        assert!(err.to_string().contains("non_degenerate"));
        let err = parse_config_str("premium = 0\nsigma2 = 0\njump_family = gamma\n").unwrap_err();
        assert!(err.to_string().contains("unknown family"));
    }
}
