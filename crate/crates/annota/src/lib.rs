//! Fast, modular text-annotation pipeline for Italian.
//!
//! The crate provides rule-based tokenization and sentence splitting,
//! lexicon-backed morphological analysis with affix decomposition, a
//! trainable part-of-speech tagger, a POS-disambiguating rule-based
//! lemmatizer, CoNLL-U / JSON I/O, and an evaluation and throughput
//! harness.
//!
//! Annotators compose through [`pipeline::Registry`] and run in a
//! validated, user-given order:
//!
//! ```
//! use annota::pipeline::{PipelineConfig, build_pipeline};
//! use annota::standard_registry;
//!
//! let registry = standard_registry();
//! let config = PipelineConfig::new(["tokenize"]);
//! let pipeline = build_pipeline(&registry, &config).unwrap();
//! let doc = pipeline.annotate("Il dott. Rossi arriva.").unwrap();
//! assert_eq!(doc.tokens().len(), 5);
//! assert_eq!(doc.sentences().len(), 1);
//! ```

pub mod doc;
pub mod eval;
pub mod fixtures;
pub mod formats;
pub mod lemma;
pub mod morph;
pub mod pipeline;
pub mod pos;
pub mod resources;
pub mod tokenize;
mod util;

pub use doc::{Document, PatternKind, SentenceSpan, Span, Token};
pub use lemma::{LemmaAnnotator, LemmaDecision, LemmaSource};
pub use morph::{LexiconStore, MorphAnalysis, MorphAnnotator, MorphCategory};
pub use pipeline::{
    Annotator, AnnotatorSpec, Pipeline, PipelineConfig, PipelineError, Registry, build_pipeline,
    build_pipeline_over,
};
pub use pos::{CoarseTag, CoarseTagMap, PosAnnotator, TaggerModel};
pub use tokenize::{AbbreviationList, PatternSet, TokenizeAnnotator};

use pipeline::BoxedError;

/// Registry with the four standard annotators registered:
///
/// | name       | requires                        | provides             |
/// |------------|---------------------------------|----------------------|
/// | `tokenize` | text                            | tokens, sentences    |
/// | `morph`    | tokens                          | morph                |
/// | `pos`      | tokens, sentences               | pos                  |
/// | `lemma`    | tokens, sentences, pos, morph   | lemma                |
///
/// Plugins register additional annotators on the same registry.
pub fn standard_registry() -> Registry {
    let mut registry = Registry::new();
    registry
        .register(
            AnnotatorSpec::new("tokenize")
                .requires(["text"])
                .provides(["tokens", "sentences"]),
            |props| {
                TokenizeAnnotator::from_properties(props)
                    .map(|a| Box::new(a) as Box<dyn Annotator>)
                    .map_err(|e| Box::new(e) as BoxedError)
            },
        )
        .expect("fresh registry");
    registry
        .register(
            AnnotatorSpec::new("morph").requires(["tokens"]).provides(["morph"]),
            |props| {
                MorphAnnotator::from_properties(props)
                    .map(|a| Box::new(a) as Box<dyn Annotator>)
                    .map_err(|e| Box::new(e) as BoxedError)
            },
        )
        .expect("fresh registry");
    registry
        .register(
            AnnotatorSpec::new("pos")
                .requires(["tokens", "sentences"])
                .provides(["pos"]),
            |props| {
                PosAnnotator::from_properties(props)
                    .map(|a| Box::new(a) as Box<dyn Annotator>)
                    .map_err(|e| Box::new(e) as BoxedError)
            },
        )
        .expect("fresh registry");
    registry
        .register(
            AnnotatorSpec::new("lemma")
                .requires(["tokens", "sentences", "pos", "morph"])
                .provides(["lemma"]),
            |props| {
                LemmaAnnotator::from_properties(props)
                    .map(|a| Box::new(a) as Box<dyn Annotator>)
                    .map_err(|e| Box::new(e) as BoxedError)
            },
        )
        .expect("fresh registry");
    registry
}
