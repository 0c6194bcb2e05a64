//! Table-driven parsing of Morph-it style tag strings.
//!
//! A tag string is `HEAD` or `HEAD:f1+f2+...`; the head splits on `-` into
//! a category code plus feature codes (e.g. `NOUN-M:s`,
//! `VER:ind+pres+3+s`). The grammar lives in a resource file so new codes
//! never require a rebuild.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use crate::morph::{MorphAnalysis, MorphCategory};
use crate::resources;
use crate::tokenize::ResourceError;

#[derive(Clone, Debug)]
pub struct TagGrammar {
    categories: HashMap<String, MorphCategory>,
    features: HashMap<String, (String, String)>,
}

impl TagGrammar {
    pub fn parse(text: &str) -> Result<Self, ResourceError> {
        let mut categories = HashMap::new();
        let mut features = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim_end();
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let bad = || ResourceError::BadPatternLine { line: lineno + 1 };
            if fields.len() != 3 {
                return Err(bad());
            }
            match fields[0] {
                "cat" => {
                    let category = MorphCategory::from_name(fields[2]).ok_or_else(bad)?;
                    categories.insert(fields[1].to_string(), category);
                }
                "feat" => {
                    let (key, value) = fields[2].split_once('=').ok_or_else(bad)?;
                    features.insert(
                        fields[1].to_string(),
                        (key.to_lowercase(), value.to_string()),
                    );
                }
                _ => return Err(bad()),
            }
        }
        Ok(TagGrammar { categories, features })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ResourceError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ResourceError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn default_italian() -> &'static TagGrammar {
        static DEFAULT: OnceLock<TagGrammar> = OnceLock::new();
        DEFAULT.get_or_init(|| Self::parse(resources::TAG_GRAMMAR_IT).expect("bundled tag grammar"))
    }

    /// Parses one tag string into an analysis for `lemma`. Unknown category
    /// codes map to `other`; unknown feature codes are skipped.
    pub fn analysis(&self, lemma: &str, tag: &str) -> MorphAnalysis {
        let (head, tail) = match tag.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (tag, None),
        };
        let mut head_parts = head.split('-');
        let category = head_parts
            .next()
            .and_then(|code| self.categories.get(code))
            .copied()
            .unwrap_or(MorphCategory::Other);
        let mut analysis = MorphAnalysis::new(lemma, category);
        let codes = head_parts.chain(tail.into_iter().flat_map(|t| t.split('+')));
        for code in codes {
            if let Some((key, value)) = self.features.get(code) {
                analysis
                    .features
                    .entry(key.clone())
                    .or_insert_with(|| value.clone());
            }
        }
        analysis
    }
}
