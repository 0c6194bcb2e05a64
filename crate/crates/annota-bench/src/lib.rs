//! Shared setup for the criterion benchmarks: desk-scale corpus, compiled
//! lexicon store and trained tagger model, built once per process.

use std::sync::{Arc, OnceLock};

use annota::formats::read_conllu_str;
use annota::morph::store::{LexiconStore, compile_lexicon_bytes};
use annota::morph::tags::TagGrammar;
use annota::pos::{TaggerModel, TrainOptions, train, training_sentences};
use annota::{
    LemmaAnnotator, MorphAnnotator, PosAnnotator, TokenizeAnnotator, fixtures,
};

pub struct BenchAssets {
    pub text: String,
    pub tokenize: TokenizeAnnotator,
    pub morph: MorphAnnotator,
    pub pos: PosAnnotator,
    pub lemma: LemmaAnnotator,
}

/// Corpus plus annotators over the bundled fixture vocabulary.
pub fn assets(corpus_tokens: usize) -> &'static BenchAssets {
    static ASSETS: OnceLock<BenchAssets> = OnceLock::new();
    ASSETS.get_or_init(|| {
        let corpus = fixtures::mini_italian_corpus(17, 1_200, 0, 0);
        let (store_bytes, _) =
            compile_lexicon_bytes(&corpus.lexicon_tsv, TagGrammar::default_italian())
                .expect("fixture lexicon compiles");
        let store = Arc::new(LexiconStore::from_bytes(store_bytes).expect("store opens"));

        let train_sents = read_conllu_str(&corpus.train_conllu).expect("fixture corpus parses");
        let outcome = train(
            &training_sentences(&train_sents).expect("gold tags present"),
            TrainOptions { epochs: 5, seed: 1 },
        )
        .expect("training succeeds");
        let model: Arc<TaggerModel> = Arc::new(outcome.model);

        BenchAssets {
            text: fixtures::throughput_text(23, corpus_tokens),
            tokenize: TokenizeAnnotator::default_italian(),
            morph: MorphAnnotator::new(store),
            pos: PosAnnotator::new(model),
            lemma: LemmaAnnotator::new(),
        }
    })
}
