//! Prefix-root-infix-suffix decomposition for complex forms.
//!
//! Forms like `portarglielo`, `portacene` or `bidirezionale` rarely appear
//! in a full-form lexicon. This module enumerates splits into an optional
//! productive prefix, a root that must resolve in the store, and an
//! optional enclitic cluster (one clitic, or a legal first+second pair).
//! Truncated infinitives are restored before resolution (`portar` →
//! `portare`), and a bare verb stem may resolve through its infinitive
//! (`porta` → `portare`) without changing the recorded root.

use std::collections::HashSet;
use std::fs;
use std::sync::OnceLock;

use crate::morph::store::{CasePolicy, LexiconStore};
use crate::morph::{MorphAnalysis, MorphCategory};
use crate::resources;
use crate::tokenize::ResourceError;

/// Minimum character length for a root; shorter candidates produce too
/// many spurious splits.
const MIN_ROOT_CHARS: usize = 3;

/// One decomposition of a surface form. `prefix + root + infixes + suffix`
/// reconstructs the surface, modulo the final-vowel elision of truncated
/// infinitives (`portar` ⇄ `portare`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub prefix: Option<String>,
    pub root: String,
    pub infixes: Vec<String>,
    pub suffix: Option<String>,
    pub root_analysis: Box<MorphAnalysis>,
}

impl Decomposition {
    pub fn affix_count(&self) -> usize {
        usize::from(self.prefix.is_some()) + self.infixes.len() + usize::from(self.suffix.is_some())
    }

    /// Checks the reconstruction invariant against `surface`.
    pub fn reconstructs(&self, surface: &str) -> bool {
        let mut with_root = String::new();
        if let Some(p) = &self.prefix {
            with_root.push_str(p);
        }
        with_root.push_str(&self.root);
        let mut rest = String::new();
        for i in &self.infixes {
            rest.push_str(i);
        }
        if let Some(s) = &self.suffix {
            rest.push_str(s);
        }
        if format!("{with_root}{rest}") == surface {
            return true;
        }
        // Truncated infinitive: the surface drops the root's final vowel.
        if let Some(stripped) = self.root.strip_suffix('e')
            && stripped.ends_with('r') {
                let mut elided = String::new();
                if let Some(p) = &self.prefix {
                    elided.push_str(p);
                }
                elided.push_str(stripped);
                elided.push_str(&rest);
                return elided == surface;
            }
        false
    }
}

/// Prefix and enclitic inventories used by [`decompose`].
#[derive(Clone, Debug)]
pub struct AffixTables {
    prefixes: Vec<String>,
    singles: HashSet<String>,
    firsts: HashSet<String>,
    seconds: HashSet<String>,
}

impl AffixTables {
    pub fn parse(prefix_text: &str, clitic_text: &str) -> Result<Self, ResourceError> {
        let mut prefixes: Vec<String> = prefix_text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect();
        // Longest prefix first keeps enumeration order deterministic.
        prefixes.sort_by(|a, b| b.chars().count().cmp(&a.chars().count()).then(a.cmp(b)));

        let mut singles = HashSet::new();
        let mut firsts = HashSet::new();
        let mut seconds = HashSet::new();
        for (lineno, raw) in clitic_text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (role, form) = line
                .split_once('\t')
                .ok_or(ResourceError::BadPatternLine { line: lineno + 1 })?;
            let form = form.trim().to_string();
            match role.trim() {
                "single" => singles.insert(form),
                "first" => firsts.insert(form),
                "second" => seconds.insert(form),
                _ => return Err(ResourceError::BadPatternLine { line: lineno + 1 }),
            };
        }
        Ok(AffixTables {
            prefixes,
            singles,
            firsts,
            seconds,
        })
    }

    pub fn from_files(
        prefix_path: Option<&str>,
        clitic_path: Option<&str>,
    ) -> Result<Self, ResourceError> {
        let read = |path: &str| {
            fs::read_to_string(path).map_err(|source| ResourceError::Io {
                path: path.to_string(),
                source,
            })
        };
        let prefix_text = match prefix_path {
            Some(p) => read(p)?,
            None => resources::PREFIXES_IT.to_string(),
        };
        let clitic_text = match clitic_path {
            Some(p) => read(p)?,
            None => resources::CLITICS_IT.to_string(),
        };
        Self::parse(&prefix_text, &clitic_text)
    }

    pub fn default_italian() -> &'static AffixTables {
        static DEFAULT: OnceLock<AffixTables> = OnceLock::new();
        DEFAULT.get_or_init(|| {
            Self::parse(resources::PREFIXES_IT, resources::CLITICS_IT)
                .expect("bundled affix tables")
        })
    }
}

/// Clitic split of a string: (infixes, suffix, stem).
fn clitic_splits<'a>(rest: &'a str, tables: &AffixTables) -> Vec<(Vec<String>, Option<String>, &'a str)> {
    let mut out: Vec<(Vec<String>, Option<String>, &str)> = Vec::new();
    out.push((Vec::new(), None, rest));
    let long_enough = |stem: &str| stem.chars().count() >= MIN_ROOT_CHARS;
    let mut singles: Vec<&String> = tables.singles.iter().collect();
    singles.sort();
    for single in singles {
        if let Some(stem) = rest.strip_suffix(single.as_str())
            && long_enough(stem) {
                out.push((Vec::new(), Some(single.clone()), stem));
            }
    }
    let mut seconds: Vec<&String> = tables.seconds.iter().collect();
    seconds.sort();
    let mut firsts: Vec<&String> = tables.firsts.iter().collect();
    firsts.sort();
    for second in &seconds {
        let Some(mid) = rest.strip_suffix(second.as_str()) else {
            continue;
        };
        for first in &firsts {
            if let Some(stem) = mid.strip_suffix(first.as_str())
                && long_enough(stem) {
                    out.push((vec![(*first).clone()], Some((*second).clone()), stem));
                }
        }
    }
    out
}

/// Root lookup candidates for a stem: the stem itself, the restored
/// infinitive when the stem is r-final, and the stem's own infinitive
/// (stem + "re"). The first element of each pair is the root recorded in
/// the decomposition, the second is the store key to resolve.
fn root_candidates(stem: &str) -> Vec<(String, String)> {
    let mut out = vec![(stem.to_string(), stem.to_string())];
    if stem.ends_with('r') {
        let restored = format!("{stem}e");
        out.push((restored.clone(), restored));
    }
    out.push((stem.to_string(), format!("{stem}re")));
    out
}

/// Enumerates every resolving decomposition of `surface`, best first
/// (fewest affixes, then longest root). Returns an empty list when nothing
/// resolves; never errors.
pub fn decompose(store: &LexiconStore, surface: &str, tables: &AffixTables) -> Vec<Decomposition> {
    let mut results: Vec<Decomposition> = Vec::new();
    let mut prefixes: Vec<Option<&str>> = vec![None];
    prefixes.extend(tables.prefixes.iter().map(|p| Some(p.as_str())));

    for prefix in prefixes {
        let rest = match prefix {
            Some(p) => match surface.strip_prefix(p) {
                Some(r) if r.chars().count() >= MIN_ROOT_CHARS => r,
                _ => continue,
            },
            None => surface,
        };
        for (infixes, suffix, stem) in clitic_splits(rest, tables) {
            // The whole surface resolving directly is a lookup hit, not a
            // decomposition.
            if prefix.is_none() && infixes.is_empty() && suffix.is_none() {
                continue;
            }
            let clitics_present = suffix.is_some();
            for (root, key) in root_candidates(stem) {
                let analyses = store.lookup(&key, CasePolicy::Exact);
                let chosen = if clitics_present {
                    // Clitics attach to verb forms only.
                    analyses.iter().find(|a| a.category == MorphCategory::Verb)
                } else {
                    analyses.first()
                };
                if let Some(analysis) = chosen {
                    let d = Decomposition {
                        prefix: prefix.map(str::to_string),
                        root,
                        infixes: infixes.clone(),
                        suffix: suffix.clone(),
                        root_analysis: Box::new(analysis.clone()),
                    };
                    if d.reconstructs(surface) && !results.contains(&d) {
                        results.push(d);
                    }
                    break;
                }
            }
        }
    }

    results.sort_by(|a, b| {
        a.affix_count()
            .cmp(&b.affix_count())
            .then(b.root.chars().count().cmp(&a.root.chars().count()))
            .then(a.root.cmp(&b.root))
            .then(a.infixes.cmp(&b.infixes))
    });
    results
}
