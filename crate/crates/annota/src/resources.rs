//! Default linguistic resources bundled with the crate.
//!
//! Every table here is plain data in a versioned resource file so it can be
//! edited without touching code; pipeline properties accept file paths that
//! override these defaults (same formats).

/// Italian non-breaking abbreviations, one per line, `#` comments.
pub const ABBREVIATIONS_IT: &str = include_str!("../resources/abbreviations_it.txt");

/// Token-merge patterns: `kind<TAB>regex` lines.
pub const PATTERNS_IT: &str = include_str!("../resources/patterns_it.tsv");

/// Morph-it style tag-string grammar.
pub const TAG_GRAMMAR_IT: &str = include_str!("../resources/tag_grammar_it.tsv");

/// Productive prefixes for affix decomposition.
pub const PREFIXES_IT: &str = include_str!("../resources/prefixes_it.txt");

/// Enclitic inventory (singles and legal pairs).
pub const CLITICS_IT: &str = include_str!("../resources/clitics_it.tsv");

/// Article table used for noun gender/number disambiguation.
pub const ARTICLES_IT: &str = include_str!("../resources/articles_it.tsv");

/// Morphological category / UPOS compatibility pairs.
pub const POS_COMPAT: &str = include_str!("../resources/pos_compat.tsv");

/// UPOS to coarse evaluation tag mapping.
pub const COARSE_MAP: &str = include_str!("../resources/coarse_map.tsv");
