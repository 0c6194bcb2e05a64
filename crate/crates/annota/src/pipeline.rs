//! Annotator contract, registry and pipeline executor.
//!
//! Annotators declare the capabilities they require and provide. The
//! executor validates the user-supplied order (it never reorders): each
//! annotator's requirements must be satisfied by the built-in `text`
//! capability plus the provides-sets of the annotators placed before it.
//!
//! A built [`Pipeline`] is immutable and safe to share across threads;
//! [`Pipeline::annotate`] may run concurrently on distinct texts.

use std::collections::{BTreeMap, BTreeSet};
use std::error::Error;
use std::fmt;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::doc::Document;

/// Capability automatically available to the first annotator.
pub const TEXT_CAPABILITY: &str = "text";

pub type BoxedError = Box<dyn Error + Send + Sync>;

/// A pipeline stage. Construction-time resources (models, lexicons) are
/// immutable; per-call scratch state lives on the stack, so a single
/// instance may serve concurrent `annotate` calls.
pub trait Annotator: Send + Sync {
    fn annotate(&self, doc: &mut Document) -> Result<(), BoxedError>;
}

/// Declared name plus requires/provides capability sets.
///
/// Capability names are an open vocabulary; the annotators shipped here use
/// `tokens`, `sentences`, `pos`, `morph` and `lemma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotatorSpec {
    name: String,
    requires: BTreeSet<String>,
    provides: BTreeSet<String>,
}

impl AnnotatorSpec {
    pub fn new(name: impl Into<String>) -> Self {
        AnnotatorSpec {
            name: name.into(),
            requires: BTreeSet::new(),
            provides: BTreeSet::new(),
        }
    }

    pub fn requires<I, S>(mut self, capabilities: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.requires.extend(capabilities.into_iter().map(Into::into));
        self
    }

    pub fn provides<I, S>(mut self, capabilities: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.provides.extend(capabilities.into_iter().map(Into::into));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn required(&self) -> &BTreeSet<String> {
        &self.requires
    }

    pub fn provided(&self) -> &BTreeSet<String> {
        &self.provides
    }
}

/// Per-annotator configuration properties (string key/value pairs).
pub type Properties = BTreeMap<String, String>;

type Factory = Box<dyn Fn(&Properties) -> Result<Box<dyn Annotator>, BoxedError> + Send + Sync>;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("annotator {0:?} is already registered")]
    DuplicateAnnotator(String),
    #[error("annotator {0:?} is not registered")]
    UnknownAnnotator(String),
    #[error("annotator {annotator:?} requires capability {capability:?} which no earlier annotator provides")]
    UnsatisfiedRequirement { annotator: String, capability: String },
    #[error("invalid spec for annotator {annotator:?}: {reason}")]
    InvalidSpec { annotator: String, reason: String },
    #[error("failed to construct annotator {annotator:?}")]
    Construction {
        annotator: String,
        #[source]
        cause: BoxedError,
    },
    #[error("annotator {annotator:?} failed")]
    AnnotatorFailure {
        annotator: String,
        #[source]
        cause: BoxedError,
    },
}

/// Registry of annotator factories keyed by name.
#[derive(Default)]
pub struct Registry {
    entries: BTreeMap<String, (AnnotatorSpec, Factory)>,
}

impl fmt::Debug for Registry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("annotators", &self.entries.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl Registry {
    pub fn new() -> Self {
        Registry::default()
    }

    /// Registers a factory under `spec.name`. Duplicate names are rejected
    /// and a spec must provide at least one capability.
    pub fn register<F>(&mut self, spec: AnnotatorSpec, factory: F) -> Result<(), PipelineError>
    where
        F: Fn(&Properties) -> Result<Box<dyn Annotator>, BoxedError> + Send + Sync + 'static,
    {
        if spec.provides.is_empty() {
            return Err(PipelineError::InvalidSpec {
                annotator: spec.name.clone(),
                reason: "provides set is empty".to_string(),
            });
        }
        if self.entries.contains_key(&spec.name) {
            return Err(PipelineError::DuplicateAnnotator(spec.name.clone()));
        }
        self.entries
            .insert(spec.name.clone(), (spec, Box::new(factory)));
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn spec(&self, name: &str) -> Option<&AnnotatorSpec> {
        self.entries.get(name).map(|(spec, _)| spec)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|k| k.as_str())
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    MalformedLine { line: usize },
    #[error("missing `annotators` key")]
    MissingAnnotators,
    #[error("failed to read config file")]
    Io(#[from] std::io::Error),
}

/// Ordered annotator names plus per-annotator properties.
///
/// Loads from a properties-style text file: one `key = value` per line,
/// `#` comments, UTF-8. The `annotators` key lists the pipeline order,
/// dotted keys (`tokenize.abbrevFile = ...`) configure one annotator.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PipelineConfig {
    annotators: Vec<String>,
    properties: BTreeMap<String, Properties>,
}

impl PipelineConfig {
    pub fn new<I, S>(annotators: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        PipelineConfig {
            annotators: annotators.into_iter().map(Into::into).collect(),
            properties: BTreeMap::new(),
        }
    }

    pub fn from_properties_str(text: &str) -> Result<Self, ConfigError> {
        let mut annotators: Option<Vec<String>> = None;
        let mut properties: BTreeMap<String, Properties> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(ConfigError::MalformedLine { line: lineno + 1 })?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(ConfigError::MalformedLine { line: lineno + 1 });
            }
            if key == "annotators" {
                annotators = Some(
                    value
                        .split(',')
                        .map(|s| s.trim().to_string())
                        .filter(|s| !s.is_empty())
                        .collect(),
                );
            } else if let Some((prefix, rest)) = key.split_once('.') {
                properties
                    .entry(prefix.to_string())
                    .or_default()
                    .insert(rest.to_string(), value.to_string());
            }
            // Undotted keys other than `annotators` are tolerated and ignored.
        }
        Ok(PipelineConfig {
            annotators: annotators.ok_or(ConfigError::MissingAnnotators)?,
            properties,
        })
    }

    pub fn from_properties_file(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path)?;
        Self::from_properties_str(&text)
    }

    pub fn set_property(
        &mut self,
        annotator: impl Into<String>,
        key: impl Into<String>,
        value: impl Into<String>,
    ) {
        self.properties
            .entry(annotator.into())
            .or_default()
            .insert(key.into(), value.into());
    }

    pub fn annotators(&self) -> &[String] {
        &self.annotators
    }

    pub fn properties_for(&self, annotator: &str) -> Properties {
        self.properties.get(annotator).cloned().unwrap_or_default()
    }
}

/// Validated, immutable pipeline. Sharing across threads is safe; each
/// `annotate` call owns its document.
pub struct Pipeline {
    stages: Vec<(AnnotatorSpec, Box<dyn Annotator>)>,
}

impl fmt::Debug for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Pipeline")
            .field(
                "stages",
                &self.stages.iter().map(|(s, _)| s.name()).collect::<Vec<_>>(),
            )
            .finish()
    }
}

/// Builds a pipeline from the user-given order, validating that every
/// requirement is satisfied by `text` plus earlier provides.
pub fn build_pipeline(registry: &Registry, config: &PipelineConfig) -> Result<Pipeline, PipelineError> {
    build_pipeline_over(registry, config, &[])
}

/// Like [`build_pipeline`] but seeds the available capabilities with
/// `preset`, for pipelines that run over documents annotated elsewhere
/// (e.g. documents built from gold token boundaries).
pub fn build_pipeline_over(
    registry: &Registry,
    config: &PipelineConfig,
    preset: &[&str],
) -> Result<Pipeline, PipelineError> {
    let mut available: BTreeSet<String> = BTreeSet::new();
    available.insert(TEXT_CAPABILITY.to_string());
    available.extend(preset.iter().map(|s| s.to_string()));

    let mut ordered = Vec::new();
    for name in config.annotators() {
        let (spec, _) = registry
            .entries
            .get(name)
            .ok_or_else(|| PipelineError::UnknownAnnotator(name.clone()))?;
        for cap in &spec.requires {
            if !available.contains(cap) {
                return Err(PipelineError::UnsatisfiedRequirement {
                    annotator: name.clone(),
                    capability: cap.clone(),
                });
            }
        }
        available.extend(spec.provides.iter().cloned());
        ordered.push(name.clone());
    }

    let mut stages = Vec::with_capacity(ordered.len());
    for name in ordered {
        let (spec, factory) = &registry.entries[&name];
        let props = config.properties_for(&name);
        let annotator = factory(&props).map_err(|cause| PipelineError::Construction {
            annotator: name.clone(),
            cause,
        })?;
        stages.push((spec.clone(), annotator));
    }
    Ok(Pipeline { stages })
}

impl Pipeline {
    /// Runs every annotator in order over a fresh document. Fails fast:
    /// annotators after a failing one do not run.
    pub fn annotate(&self, text: &str) -> Result<Document, PipelineError> {
        let mut doc = Document::new(text);
        self.annotate_document(&mut doc)?;
        Ok(doc)
    }

    /// Runs the stages over an existing document (e.g. one built from gold
    /// token boundaries).
    pub fn annotate_document(&self, doc: &mut Document) -> Result<(), PipelineError> {
        for (spec, annotator) in &self.stages {
            annotator
                .annotate(doc)
                .map_err(|cause| PipelineError::AnnotatorFailure {
                    annotator: spec.name().to_string(),
                    cause,
                })?;
        }
        Ok(())
    }

    pub fn annotator_names(&self) -> Vec<&str> {
        self.stages.iter().map(|(s, _)| s.name()).collect()
    }

    pub fn specs(&self) -> impl Iterator<Item = &AnnotatorSpec> {
        self.stages.iter().map(|(s, _)| s)
    }

    pub(crate) fn stages(&self) -> &[(AnnotatorSpec, Box<dyn Annotator>)] {
        &self.stages
    }
}
