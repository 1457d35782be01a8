//! Rule data for the deterministic derivation function. All domain knowledge
//! (drug-class maps, bucket boundaries, agent lexicons, boolean cue words)
//! lives in a versioned JSON file, never in code, so the rules stay
//! auditable. See `docs/interfaces.md` for the schema.

use crate::value::canonical_text;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Read;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("unknown {kind} {name:?}")]
    UnknownRule { kind: &'static str, name: String },
    #[error("bucket spec {name:?}: boundaries must be strictly increasing")]
    BadBoundaries { name: String },
    #[error("bucket spec {name:?}: expected {expected} labels for {boundaries} boundaries")]
    BadLabelCount {
        name: String,
        expected: usize,
        boundaries: usize,
    },
    #[error("mapping {name:?} maps {key:?} to {label:?}, which is outside its label set")]
    LabelOutsideSet {
        name: String,
        key: String,
        label: String,
    },
    #[error("invalid regex in metadata rule {name:?}: {detail}")]
    BadRegex { name: String, detail: String },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// A closed-label normalization mapping (e.g. ICI generic name to class).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Mapping {
    /// The closed label set; classification never emits anything else.
    pub labels: Vec<String>,
    /// Match key (canonicalized at load) to label.
    pub entries: BTreeMap<String, String>,
}

/// An ordered bucket spec: `boundaries` strictly increasing, one more label
/// than boundaries, half-open `[b_i, b_{i+1})` intervals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BucketSpec {
    pub boundaries: Vec<f64>,
    pub labels: Vec<String>,
}

/// An extraction lexicon: match key to canonical emitted form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lexicon {
    pub entries: BTreeMap<String, String>,
}

/// Keyword cue sets for boolean interpretation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BooleanRule {
    pub positive: Vec<String>,
    pub negative: Vec<String>,
}

/// Endpoint-role derivation: the evidence text is split into segments, the
/// segment naming the endpoint is classified by marker, and `default` (if
/// any) covers marker-free segments.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoleRule {
    /// Marker substring to label, tried longest-first.
    pub markers: BTreeMap<String, String>,
    #[serde(default)]
    pub default: Option<String>,
}

/// Regex with one capture group for metadata extraction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetadataRule {
    pub pattern: String,
}

/// The full rule file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RuleSet {
    #[serde(default)]
    pub mappings: BTreeMap<String, Mapping>,
    #[serde(default)]
    pub buckets: BTreeMap<String, BucketSpec>,
    #[serde(default)]
    pub lexicons: BTreeMap<String, Lexicon>,
    #[serde(default)]
    pub booleans: BTreeMap<String, BooleanRule>,
    #[serde(default)]
    pub roles: BTreeMap<String, RoleRule>,
    #[serde(default)]
    pub metadata: BTreeMap<String, MetadataRule>,
}

impl RuleSet {
    pub fn from_json_reader<R: Read>(reader: R) -> Result<Self, RuleError> {
        let mut rules: RuleSet = serde_json::from_reader(reader)?;
        rules.canonicalize_keys();
        rules.validate()?;
        Ok(rules)
    }

    pub fn from_json_str(text: &str) -> Result<Self, RuleError> {
        Self::from_json_reader(text.as_bytes())
    }

    /// Canonicalize every match key so lookups agree with table values.
    fn canonicalize_keys(&mut self) {
        for mapping in self.mappings.values_mut() {
            mapping.entries = mapping
                .entries
                .iter()
                .map(|(k, v)| (canonical_text(k), v.clone()))
                .collect();
        }
        for lexicon in self.lexicons.values_mut() {
            lexicon.entries = lexicon
                .entries
                .iter()
                .map(|(k, v)| (canonical_text(k), v.clone()))
                .collect();
        }
        for rule in self.booleans.values_mut() {
            rule.positive = rule.positive.iter().map(|k| canonical_text(k)).collect();
            rule.negative = rule.negative.iter().map(|k| canonical_text(k)).collect();
        }
    }

    fn validate(&self) -> Result<(), RuleError> {
        for (name, mapping) in &self.mappings {
            for (key, label) in &mapping.entries {
                if !mapping.labels.contains(label) {
                    return Err(RuleError::LabelOutsideSet {
                        name: name.clone(),
                        key: key.clone(),
                        label: label.clone(),
                    });
                }
            }
        }
        for (name, spec) in &self.buckets {
            if spec.boundaries.windows(2).any(|w| w[0] >= w[1]) {
                return Err(RuleError::BadBoundaries { name: name.clone() });
            }
            if spec.labels.len() != spec.boundaries.len() + 1 {
                return Err(RuleError::BadLabelCount {
                    name: name.clone(),
                    expected: spec.boundaries.len() + 1,
                    boundaries: spec.boundaries.len(),
                });
            }
        }
        for (name, rule) in &self.metadata {
            regex::Regex::new(&rule.pattern).map_err(|e| RuleError::BadRegex {
                name: name.clone(),
                detail: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn mapping(&self, name: &str) -> Result<&Mapping, RuleError> {
        self.mappings.get(name).ok_or(RuleError::UnknownRule {
            kind: "mapping",
            name: name.to_string(),
        })
    }

    pub fn bucket(&self, name: &str) -> Result<&BucketSpec, RuleError> {
        self.buckets.get(name).ok_or(RuleError::UnknownRule {
            kind: "bucket spec",
            name: name.to_string(),
        })
    }

    pub fn lexicon(&self, name: &str) -> Result<&Lexicon, RuleError> {
        self.lexicons.get(name).ok_or(RuleError::UnknownRule {
            kind: "lexicon",
            name: name.to_string(),
        })
    }

    pub fn boolean(&self, name: &str) -> Result<&BooleanRule, RuleError> {
        self.booleans.get(name).ok_or(RuleError::UnknownRule {
            kind: "boolean rule",
            name: name.to_string(),
        })
    }

    pub fn role(&self, name: &str) -> Result<&RoleRule, RuleError> {
        self.roles.get(name).ok_or(RuleError::UnknownRule {
            kind: "role rule",
            name: name.to_string(),
        })
    }

    pub fn metadata_rule(&self, name: &str) -> Result<&MetadataRule, RuleError> {
        self.metadata.get(name).ok_or(RuleError::UnknownRule {
            kind: "metadata rule",
            name: name.to_string(),
        })
    }
}
