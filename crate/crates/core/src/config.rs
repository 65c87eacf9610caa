//! Plain-text `key = value` configuration, one key per line, `#` comments.
//!
//! ```text
//! # file mode
//! input = regions.csv
//! component_rule = kaiser        # or fixed:5, cumulative:75
//! k_regions = 4
//! cluster_space = both           # components | raw | both
//! k_vars = 4
//! output = out
//! ```
//!
//! Synthetic mode replaces `input` with `synthetic = true` plus optional
//! `synthetic.<field>` keys and `seed`.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::ingest::{Delimiter, ParseOptions};
use crate::pca::SelectionRule;
use crate::synthetic::SyntheticSpec;

/// Parsed `key = value` lines with their 1-based line numbers.
#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    entries: Vec<(usize, String, String)>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(usize, String, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected `key = value`, got {content:?}"),
            })?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(Error::Config {
                    line,
                    message: "empty key".into(),
                });
            }
            if entries.iter().any(|(_, k, _)| *k == key) {
                return Err(Error::Config {
                    line,
                    message: format!("duplicate key {key:?}"),
                });
            }
            entries.push((line, key, value.trim().to_string()));
        }
        Ok(KeyValues { entries })
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &str, &str)> {
        self.entries
            .iter()
            .map(|(l, k, v)| (*l, k.as_str(), v.as_str()))
    }

    pub fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.iter()
            .find(|(_, k, _)| *k == key)
            .map(|(l, _, v)| (l, v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClusterSpace {
    Components,
    Raw,
    #[default]
    Both,
}

/// Which score columns feed region clustering in component space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreColumns {
    #[default]
    Retained,
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputMode {
    File(PathBuf),
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub input: InputMode,
    pub parse: ParseOptions,
    pub component_rule: SelectionRule,
    pub k_regions: usize,
    pub cluster_space: ClusterSpace,
    pub k_vars: usize,
    pub score_columns: ScoreColumns,
    pub component_labels: Vec<String>,
    pub output: PathBuf,
}

impl PipelineConfig {
    /// Defaults around the given input and output.
    pub fn new(input: InputMode, output: PathBuf) -> Self {
        PipelineConfig {
            input,
            parse: ParseOptions::default(),
            component_rule: SelectionRule::Kaiser,
            k_regions: 4,
            cluster_space: ClusterSpace::Both,
            k_vars: 4,
            score_columns: ScoreColumns::Retained,
            component_labels: Vec::new(),
            output,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Parses config text; relative paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let kv = KeyValues::parse(text)?;
        let resolve = |v: &str| {
            let p = PathBuf::from(v);
            if p.is_absolute() {
                p
            } else {
                base_dir.join(p)
            }
        };
        let synthetic_on = match kv.get("synthetic") {
            Some((_, "true" | "yes")) => true,
            Some((_, "false" | "no")) | None => false,
            Some((line, other)) => {
                return Err(Error::Config {
                    line,
                    message: format!("synthetic: expected true or false, got {other:?}"),
                })
            }
        };

        let input = match (kv.get("input"), synthetic_on) {
            (Some((line, _)), true) => {
                return Err(Error::Config {
                    line,
                    message: "`input` and `synthetic = true` are mutually exclusive".into(),
                })
            }
            (Some((_, path)), false) => InputMode::File(resolve(path)),
            (None, true) => {
                let mut spec_keys = KeyValues::default();
                for (line, key, value) in kv.iter() {
                    if let Some(field) = key.strip_prefix("synthetic.") {
                        spec_keys
                            .entries
                            .push((line, field.to_string(), value.to_string()));
                    } else if key == "seed" {
                        spec_keys
                            .entries
                            .push((line, "seed".into(), value.to_string()));
                    }
                }
                InputMode::Synthetic(SyntheticSpec::from_key_values(&spec_keys, "")?)
            }
            (None, false) => {
                return Err(Error::Config {
                    line: 0,
                    message: "one of `input` or `synthetic = true` is required".into(),
                })
            }
        };
        let output = match kv.get("output") {
            Some((_, v)) => resolve(v),
            None => {
                return Err(Error::Config {
                    line: 0,
                    message: "`output` is required".into(),
                })
            }
        };
        let mut cfg = PipelineConfig::new(input, output);

        for (line, key, value) in kv.iter() {
            let err = |message: String| Error::Config { line, message };
            let count = |what: &str| -> Result<usize> {
                match value.parse::<usize>() {
                    Ok(k) if k >= 1 => Ok(k),
                    _ => Err(err(format!(
                        "{what} must be a positive integer, got {value:?}"
                    ))),
                }
            };
            match key {
                "input" | "output" | "synthetic" => {}
                _ if key == "seed" || key.starts_with("synthetic.") => {
                    if !synthetic_on {
                        return Err(err(format!("{key} is only valid with `synthetic = true`")));
                    }
                }
                "delimiter" => {
                    cfg.parse.delimiter = match value {
                        "comma" | "," => Delimiter::Comma,
                        "semicolon" | ";" => Delimiter::Semicolon,
                        _ => return Err(err(format!("unknown delimiter {value:?}"))),
                    }
                }
                "decimal" => {
                    cfg.parse.decimal_comma = match value {
                        "period" | "." => false,
                        "comma" | "," => true,
                        _ => return Err(err(format!("unknown decimal separator {value:?}"))),
                    }
                }
                "component_rule" => {
                    cfg.component_rule = value.parse().map_err(|e: Error| err(e.to_string()))?
                }
                "k_regions" => cfg.k_regions = count("k_regions")?,
                "k_vars" => cfg.k_vars = count("k_vars")?,
                "cluster_space" => {
                    cfg.cluster_space = match value {
                        "components" => ClusterSpace::Components,
                        "raw" => ClusterSpace::Raw,
                        "both" => ClusterSpace::Both,
                        _ => return Err(err(format!("unknown cluster_space {value:?}"))),
                    }
                }
                "score_columns" => {
                    cfg.score_columns = match value {
                        "retained" => ScoreColumns::Retained,
                        "all" => ScoreColumns::All,
                        _ => return Err(err(format!("unknown score_columns {value:?}"))),
                    }
                }
                "component_labels" => {
                    cfg.component_labels = value.split(',').map(|s| s.trim().to_string()).collect()
                }
                _ => return Err(err(format!("unknown key {key:?}"))),
            }
        }
        if cfg.parse.decimal_comma && cfg.parse.delimiter == Delimiter::Comma {
            return Err(Error::Config {
                line: kv.get("decimal").map_or(0, |(l, _)| l),
                message: "decimal comma requires `delimiter = semicolon`".into(),
            });
        }
        Ok(cfg)
    }
}
