//! Trainable part-of-speech tagger.
//!
//! A greedy averaged linear (perceptron-style) sequence tagger over the
//! feature templates in [`features`]. Training is single-threaded and
//! deterministic for a fixed (corpus, epochs, seed); per-epoch shuffling
//! uses an owned seeded generator. Models persist bit-exactly.

pub mod features;
mod io;

use std::collections::HashMap;
use std::sync::Arc;
use std::sync::OnceLock;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::doc::Document;
use crate::formats::ConlluSentence;
use crate::pipeline::{Annotator, BoxedError, Properties};
use crate::resources;
use crate::util::SplitMix64;

pub use features::{BOUNDARY_LEFT, BOUNDARY_RIGHT, TEMPLATE_VERSION, extract_features};
pub use io::ModelIoError;

/// The UPOS inventory.
pub const UPOS_TAGS: [&str; 17] = [
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM", "PART", "PRON", "PROPN",
    "PUNCT", "SCONJ", "SYM", "VERB", "X",
];

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("sentence {sentence}, token {index}: missing gold tag")]
    MissingGoldTag { sentence: usize, index: usize },
}

/// One training sentence: words with their gold tags.
#[derive(Clone, Debug)]
pub struct TrainSentence {
    pub words: Vec<String>,
    pub tags: Vec<String>,
}

/// Extracts (word, gold UPOS) training pairs from CoNLL-U sentences.
/// Multiword range rows are skipped; their component rows are used.
pub fn training_sentences(sentences: &[ConlluSentence]) -> Result<Vec<TrainSentence>, TrainError> {
    let mut out = Vec::with_capacity(sentences.len());
    for (si, sent) in sentences.iter().enumerate() {
        let mut words = Vec::new();
        let mut tags = Vec::new();
        for (ti, row) in sent.words().enumerate() {
            if row.upos.is_empty() || row.upos == "_" {
                return Err(TrainError::MissingGoldTag {
                    sentence: si,
                    index: ti,
                });
            }
            words.push(row.form.clone());
            tags.push(row.upos.clone());
        }
        if !words.is_empty() {
            out.push(TrainSentence { words, tags });
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub struct TrainOptions {
    pub epochs: u32,
    pub seed: u64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions { epochs: 5, seed: 1 }
    }
}

/// Trained model: ordered tagset, template version and learned weights.
///
/// The tagset is ordered by descending training frequency (ties broken
/// lexicographically), so argmax ties (including the all-zero-weights
/// case) fall back to the most-frequent-tag prior.
#[derive(Clone, Debug, PartialEq)]
pub struct TaggerModel {
    tagset: Vec<String>,
    template_version: u16,
    epochs: u32,
    corpus_checksum: [u8; 32],
    weights: HashMap<String, Vec<f64>>,
}

/// Training result: the model plus per-epoch training accuracy.
#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub model: TaggerModel,
    pub epoch_accuracy: Vec<f64>,
}

#[derive(Clone, Copy, Default)]
struct Cell {
    weight: f64,
    total: f64,
    stamp: u64,
}

/// Canonical corpus fingerprint recorded in the model file.
fn corpus_checksum(corpus: &[TrainSentence]) -> [u8; 32] {
    let mut hasher = Sha256::new();
    for sent in corpus {
        for (w, t) in sent.words.iter().zip(&sent.tags) {
            hasher.update(w.as_bytes());
            hasher.update(b"\t");
            hasher.update(t.as_bytes());
            hasher.update(b"\n");
        }
        hasher.update(b"\n");
    }
    hasher.finalize().into()
}

/// Greedy left-to-right averaged-perceptron training.
///
/// The instance counter advances once per token; on a wrong guess the gold
/// tag's weights get +1 and the guess's -1 for every active feature, with
/// lazily accumulated totals so the final weights are the average over all
/// instances.
pub fn train(corpus: &[TrainSentence], opts: TrainOptions) -> Result<TrainOutcome, TrainError> {
    if corpus.is_empty() || corpus.iter().all(|s| s.words.is_empty()) {
        return Err(TrainError::EmptyCorpus);
    }
    for (si, sent) in corpus.iter().enumerate() {
        if sent.tags.len() != sent.words.len() {
            return Err(TrainError::MissingGoldTag {
                sentence: si,
                index: sent.tags.len().min(sent.words.len()),
            });
        }
        if let Some(ti) = sent.tags.iter().position(|t| t.is_empty() || t == "_") {
            return Err(TrainError::MissingGoldTag {
                sentence: si,
                index: ti,
            });
        }
    }

    // Tagset ordered by descending frequency, then lexicographically.
    let mut freq: HashMap<&str, u64> = HashMap::new();
    for sent in corpus {
        for tag in &sent.tags {
            *freq.entry(tag.as_str()).or_default() += 1;
        }
    }
    let mut tagset: Vec<String> = freq.keys().map(|t| t.to_string()).collect();
    tagset.sort_by(|a, b| freq[b.as_str()].cmp(&freq[a.as_str()]).then(a.cmp(b)));
    let tag_index: HashMap<&str, usize> = tagset
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();
    let ntags = tagset.len();

    let mut cells: HashMap<String, Vec<Cell>> = HashMap::new();
    let mut rng = SplitMix64::new(opts.seed);
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    let mut feats: Vec<String> = Vec::with_capacity(32);
    let mut scores: Vec<f64> = vec![0.0; ntags];
    let mut instances: u64 = 0;
    let mut epoch_accuracy = Vec::with_capacity(opts.epochs as usize);

    for _epoch in 0..opts.epochs {
        rng.shuffle(&mut order);
        let mut correct = 0u64;
        let mut seen = 0u64;
        for &si in &order {
            let sent = &corpus[si];
            let words: Vec<&str> = sent.words.iter().map(|w| w.as_str()).collect();
            let mut prev = BOUNDARY_LEFT.to_string();
            let mut prev2 = BOUNDARY_LEFT.to_string();
            for i in 0..words.len() {
                instances += 1;
                extract_features(&words, i, &prev, &prev2, &mut feats);
                scores.iter_mut().for_each(|s| *s = 0.0);
                for f in &feats {
                    if let Some(row) = cells.get(f.as_str()) {
                        for (s, c) in scores.iter_mut().zip(row) {
                            *s += c.weight;
                        }
                    }
                }
                let guess = argmax(&scores);
                let gold = tag_index[sent.tags[i].as_str()];
                if guess == gold {
                    correct += 1;
                } else {
                    for f in &feats {
                        let row = cells
                            .entry(f.clone())
                            .or_insert_with(|| vec![Cell::default(); ntags]);
                        bump(&mut row[gold], 1.0, instances);
                        bump(&mut row[guess], -1.0, instances);
                    }
                }
                seen += 1;
                prev2 = std::mem::replace(&mut prev, tagset[guess].clone());
            }
        }
        epoch_accuracy.push(if seen == 0 {
            0.0
        } else {
            correct as f64 / seen as f64
        });
    }

    // Flush pending totals and average; zero rows are dropped.
    let mut weights: HashMap<String, Vec<f64>> = HashMap::with_capacity(cells.len());
    if instances > 0 {
        for (feature, row) in cells {
            let averaged: Vec<f64> = row
                .into_iter()
                .map(|mut c| {
                    c.total += (instances - c.stamp) as f64 * c.weight;
                    c.total / instances as f64
                })
                .collect();
            if averaged.iter().any(|w| *w != 0.0) {
                weights.insert(feature, averaged);
            }
        }
    }

    Ok(TrainOutcome {
        model: TaggerModel {
            tagset,
            template_version: TEMPLATE_VERSION,
            epochs: opts.epochs,
            corpus_checksum: corpus_checksum(corpus),
            weights,
        },
        epoch_accuracy,
    })
}

fn bump(cell: &mut Cell, delta: f64, now: u64) {
    cell.total += (now - cell.stamp) as f64 * cell.weight;
    cell.stamp = now;
    cell.weight += delta;
}

/// Lowest index wins ties, i.e. tagset order.
fn argmax(scores: &[f64]) -> usize {
    let mut best = 0usize;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if *s > scores[best] {
            best = i;
        }
    }
    best
}

impl TaggerModel {
    pub fn tagset(&self) -> &[String] {
        &self.tagset
    }

    pub fn epochs(&self) -> u32 {
        self.epochs
    }

    pub fn corpus_checksum(&self) -> &[u8; 32] {
        &self.corpus_checksum
    }

    pub fn template_version(&self) -> u16 {
        self.template_version
    }

    pub fn feature_count(&self) -> usize {
        self.weights.len()
    }

    pub(crate) fn weights(&self) -> &HashMap<String, Vec<f64>> {
        &self.weights
    }

    pub(crate) fn from_parts(
        tagset: Vec<String>,
        template_version: u16,
        epochs: u32,
        corpus_checksum: [u8; 32],
        weights: HashMap<String, Vec<f64>>,
    ) -> Self {
        TaggerModel {
            tagset,
            template_version,
            epochs,
            corpus_checksum,
            weights,
        }
    }

    /// Weight row for one feature, in tagset order. Test instrumentation.
    pub fn feature_weights(&self, feature: &str) -> Option<&[f64]> {
        self.weights.get(feature).map(|v| v.as_slice())
    }

    fn score_into(&self, feats: &[String], scores: &mut [f64]) {
        scores.iter_mut().for_each(|s| *s = 0.0);
        for f in feats {
            if let Some(row) = self.weights.get(f.as_str()) {
                for (s, w) in scores.iter_mut().zip(row) {
                    *s += w;
                }
            }
        }
    }

    /// Greedy tagging: one tag per word, every tag from the tagset, ties
    /// broken by tagset order. Total over any input.
    pub fn tag_sentence(&self, words: &[&str]) -> Vec<String> {
        let mut tags = Vec::with_capacity(words.len());
        let mut feats: Vec<String> = Vec::with_capacity(32);
        let mut scores = vec![0.0; self.tagset.len()];
        let mut prev = BOUNDARY_LEFT.to_string();
        let mut prev2 = BOUNDARY_LEFT.to_string();
        for i in 0..words.len() {
            extract_features(words, i, &prev, &prev2, &mut feats);
            self.score_into(&feats, &mut scores);
            let guess = argmax(&scores);
            prev2 = std::mem::replace(&mut prev, self.tagset[guess].clone());
            tags.push(self.tagset[guess].clone());
        }
        tags
    }

    /// Beam-search tagging. `beam = 1` is exactly the greedy decoder.
    pub fn tag_sentence_beam(&self, words: &[&str], beam: usize) -> Vec<String> {
        let beam = beam.max(1);
        if beam == 1 {
            return self.tag_sentence(words);
        }
        struct Hyp {
            score: f64,
            tags: Vec<usize>,
        }
        let mut hyps = vec![Hyp {
            score: 0.0,
            tags: Vec::new(),
        }];
        let mut feats: Vec<String> = Vec::with_capacity(32);
        let mut scores = vec![0.0; self.tagset.len()];
        for i in 0..words.len() {
            let mut next: Vec<Hyp> = Vec::with_capacity(hyps.len() * self.tagset.len());
            for hyp in &hyps {
                let prev = hyp
                    .tags
                    .last()
                    .map_or(BOUNDARY_LEFT, |&t| self.tagset[t].as_str());
                let prev2 = match hyp.tags.len() {
                    0 | 1 => BOUNDARY_LEFT,
                    n => self.tagset[hyp.tags[n - 2]].as_str(),
                };
                extract_features(words, i, prev, prev2, &mut feats);
                self.score_into(&feats, &mut scores);
                for (t, s) in scores.iter().enumerate() {
                    let mut tags = hyp.tags.clone();
                    tags.push(t);
                    next.push(Hyp {
                        score: hyp.score + s,
                        tags,
                    });
                }
            }
            // Stable sort keeps (earlier hypothesis, lower tag index) on ties.
            next.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap_or(std::cmp::Ordering::Equal));
            next.truncate(beam);
            hyps = next;
        }
        hyps.first()
            .map(|h| h.tags.iter().map(|&t| self.tagset[t].clone()).collect())
            .unwrap_or_default()
    }
}

/// Coarse evaluation tag: N(ouns), V(erbs), B (adverbs), A(djectives),
/// O(ther).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoarseTag {
    N,
    V,
    B,
    A,
    O,
}

impl CoarseTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoarseTag::N => "N",
            CoarseTag::V => "V",
            CoarseTag::B => "B",
            CoarseTag::A => "A",
            CoarseTag::O => "O",
        }
    }

    fn from_str(s: &str) -> Option<Self> {
        match s {
            "N" => Some(CoarseTag::N),
            "V" => Some(CoarseTag::V),
            "B" => Some(CoarseTag::B),
            "A" => Some(CoarseTag::A),
            "O" => Some(CoarseTag::O),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
#[error("unknown UPOS tag {0:?}")]
pub struct UnknownTag(pub String);

/// Total mapping from the UPOS inventory onto the 5-tag coarse set.
#[derive(Clone, Debug)]
pub struct CoarseTagMap {
    map: HashMap<String, CoarseTag>,
}

impl CoarseTagMap {
    pub fn from_tsv(text: &str) -> Result<Self, crate::tokenize::ResourceError> {
        let mut map = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || crate::tokenize::ResourceError::BadPatternLine { line: lineno + 1 };
            let (upos, coarse) = line.split_once('\t').ok_or_else(bad)?;
            let coarse = CoarseTag::from_str(coarse.trim()).ok_or_else(bad)?;
            map.insert(upos.trim().to_string(), coarse);
        }
        Ok(CoarseTagMap { map })
    }

    /// Bundled default covering all 17 UPOS tags.
    pub fn default_upos() -> &'static CoarseTagMap {
        static DEFAULT: OnceLock<CoarseTagMap> = OnceLock::new();
        DEFAULT.get_or_init(|| {
            let map = Self::from_tsv(resources::COARSE_MAP).expect("bundled coarse map");
            for tag in UPOS_TAGS {
                assert!(map.map.contains_key(tag), "coarse map misses {tag}");
            }
            map
        })
    }

    pub fn map(&self, upos: &str) -> Result<CoarseTag, UnknownTag> {
        self.map
            .get(upos)
            .copied()
            .ok_or_else(|| UnknownTag(upos.to_string()))
    }
}

/// Annotator requiring `tokens` and `sentences`, providing `pos`.
pub struct PosAnnotator {
    model: Arc<TaggerModel>,
    beam: usize,
}

impl PosAnnotator {
    pub fn new(model: Arc<TaggerModel>) -> Self {
        PosAnnotator { model, beam: 1 }
    }

    pub fn with_beam(mut self, beam: usize) -> Self {
        self.beam = beam.max(1);
        self
    }

    /// Builds from pipeline properties: `model` (required path), optional
    /// `beam`.
    pub fn from_properties(props: &Properties) -> Result<Self, ModelIoError> {
        let path = props.get("model").ok_or(ModelIoError::MissingModelPath)?;
        let model = Arc::new(TaggerModel::load(path)?);
        let beam = props
            .get("beam")
            .and_then(|b| b.parse::<usize>().ok())
            .unwrap_or(1);
        Ok(PosAnnotator { model, beam })
    }

    pub fn model(&self) -> &Arc<TaggerModel> {
        &self.model
    }
}

impl Annotator for PosAnnotator {
    fn annotate(&self, doc: &mut Document) -> Result<(), BoxedError> {
        let mut assignments: Vec<(usize, String)> = Vec::with_capacity(doc.tokens().len());
        for sentence in doc.sentences() {
            let tokens = doc.sentence_tokens(sentence);
            let words: Vec<&str> = tokens.iter().map(|t| t.surface()).collect();
            let tags = self.model.tag_sentence_beam(&words, self.beam);
            for (tok, tag) in tokens.iter().zip(tags) {
                assignments.push((tok.index(), tag));
            }
        }
        for (index, tag) in assignments {
            doc.tokens_mut()[index].set_pos(tag);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sent(words: &[&str], tags: &[&str]) -> TrainSentence {
        TrainSentence {
            words: words.iter().map(|w| w.to_string()).collect(),
            tags: tags.iter().map(|t| t.to_string()).collect(),
        }
    }

    /// Small separable corpus: determiners, two nouns, two verbs, an
    /// adverb, punctuation.
    fn toy_corpus() -> Vec<TrainSentence> {
        vec![
            sent(&["il", "cane", "dorme", "."], &["DET", "NOUN", "VERB", "PUNCT"]),
            sent(&["la", "casa", "brucia", "."], &["DET", "NOUN", "VERB", "PUNCT"]),
            sent(&["il", "cane", "brucia", "."], &["DET", "NOUN", "VERB", "PUNCT"]),
            sent(&["la", "casa", "dorme", "."], &["DET", "NOUN", "VERB", "PUNCT"]),
            sent(
                &["il", "cane", "dorme", "bene", "."],
                &["DET", "NOUN", "VERB", "ADV", "PUNCT"],
            ),
            sent(
                &["la", "casa", "brucia", "bene", "."],
                &["DET", "NOUN", "VERB", "ADV", "PUNCT"],
            ),
            sent(&["cane", "e", "casa", "."], &["NOUN", "CCONJ", "NOUN", "PUNCT"]),
            sent(&["dorme", "."], &["VERB", "PUNCT"]),
            sent(&["brucia", "."], &["VERB", "PUNCT"]),
            sent(&["bene", "."], &["ADV", "PUNCT"]),
        ]
    }

    #[test]
    fn toy_corpus_reaches_full_training_accuracy() {
        let corpus = toy_corpus();
        let outcome = train(&corpus, TrainOptions { epochs: 5, seed: 3 }).unwrap();
        for s in &corpus {
            let words: Vec<&str> = s.words.iter().map(|w| w.as_str()).collect();
            let tags = outcome.model.tag_sentence(&words);
            assert_eq!(tags, s.tags, "sentence {:?}", s.words);
        }
        assert_eq!(outcome.epoch_accuracy.len(), 5);
    }

    #[test]
    fn zero_epochs_yield_empty_weights_and_prior_tag() {
        let corpus = toy_corpus();
        let outcome = train(&corpus, TrainOptions { epochs: 0, seed: 1 }).unwrap();
        assert_eq!(outcome.model.feature_count(), 0);
        // PUNCT is the most frequent tag in the toy corpus.
        assert_eq!(outcome.model.tagset()[0], "PUNCT");
        let tags = outcome.model.tag_sentence(&["qualsiasi", "cosa"]);
        assert_eq!(tags, ["PUNCT", "PUNCT"]);
    }

    #[test]
    fn training_is_deterministic() {
        let corpus = toy_corpus();
        let opts = TrainOptions { epochs: 3, seed: 9 };
        let a = train(&corpus, opts).unwrap().model;
        let b = train(&corpus, opts).unwrap().model;
        assert_eq!(a.to_bytes(), b.to_bytes());
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(
            train(&[], TrainOptions::default()),
            Err(TrainError::EmptyCorpus)
        ));
    }

    #[test]
    fn missing_gold_tag_is_reported_with_position() {
        let corpus = vec![sent(&["uno", "due"], &["NUM", "_"])];
        let err = train(&corpus, TrainOptions::default()).unwrap_err();
        assert!(matches!(
            err,
            TrainError::MissingGoldTag { sentence: 0, index: 1 }
        ));
    }

    #[test]
    fn coarse_map_covers_upos_and_rejects_unknowns() {
        let map = CoarseTagMap::default_upos();
        assert_eq!(map.map("NOUN").unwrap(), CoarseTag::N);
        assert_eq!(map.map("PROPN").unwrap(), CoarseTag::N);
        assert_eq!(map.map("VERB").unwrap(), CoarseTag::V);
        assert_eq!(map.map("AUX").unwrap(), CoarseTag::V);
        assert_eq!(map.map("ADV").unwrap(), CoarseTag::B);
        assert_eq!(map.map("ADJ").unwrap(), CoarseTag::A);
        assert_eq!(map.map("DET").unwrap(), CoarseTag::O);
        for tag in UPOS_TAGS {
            map.map(tag).unwrap();
        }
        assert!(map.map("NN").is_err());
    }

    #[test]
    fn unseen_mente_word_gets_adverb_via_suffix_features() {
        // Every -mente word in training is ADV; the suffix features must
        // carry that to unseen -mente words.
        let mut corpus = Vec::new();
        for adv in ["lentamente", "velocemente", "dolcemente", "fortemente"] {
            corpus.push(sent(&["cammina", adv, "."], &["VERB", "ADV", "PUNCT"]));
            corpus.push(sent(&["parla", adv, "."], &["VERB", "ADV", "PUNCT"]));
        }
        for noun in ["cane", "pane", "fiume"] {
            corpus.push(sent(&["il", noun, "."], &["DET", "NOUN", "PUNCT"]));
        }
        let outcome = train(&corpus, TrainOptions { epochs: 5, seed: 1 }).unwrap();
        let tags = outcome.model.tag_sentence(&["cammina", "serenamente", "."]);
        assert_eq!(tags[1], "ADV");
    }

    #[test]
    fn tagging_is_total_and_in_tagset() {
        let outcome = train(&toy_corpus(), TrainOptions::default()).unwrap();
        let words = ["xyz", "@@", "", "., .", "è"];
        let refs: Vec<&str> = words.to_vec();
        let tags = outcome.model.tag_sentence(&refs);
        assert_eq!(tags.len(), refs.len());
        for t in &tags {
            assert!(outcome.model.tagset().contains(t));
        }
        assert!(outcome.model.tag_sentence(&[]).is_empty());
    }

    #[test]
    fn beam_one_equals_greedy() {
        let outcome = train(&toy_corpus(), TrainOptions::default()).unwrap();
        let words = vec!["il", "cane", "dorme", "bene", "."];
        assert_eq!(
            outcome.model.tag_sentence(&words),
            outcome.model.tag_sentence_beam(&words, 1)
        );
        let beam3 = outcome.model.tag_sentence_beam(&words, 3);
        assert_eq!(beam3.len(), words.len());
    }

    /// Hand-computed averaging trace: one 2-token sentence, one epoch.
    ///
    /// Tagset by frequency then lexicographic: [T1, T2] (one of each).
    /// Token 1 (instance 1): all-zero scores, guess T1, gold T2 → every
    /// feature gets w[T2]=+1, w[T1]=-1.
    /// Token 2 (instance 2): its features share shape=x, t-2=<S>, w-2=<S>
    /// and w+2=</S> with token 1 (score +4 for T2), guess T2, gold T1 →
    /// update. Averaged over 2 instances:
    ///   token-1-only features:  T1 -0.5, T2 +0.5
    ///   shared features:        T1 -0.5, T2 +0.5 (weights returned to 0
    ///                           at instance 2, so only 1 instance counts)
    ///   token-2-only features:  0 (updated at the final instance).
    #[test]
    fn averaged_weights_match_hand_trace() {
        let corpus = vec![sent(&["a", "b"], &["T2", "T1"])];
        let outcome = train(&corpus, TrainOptions { epochs: 1, seed: 1 }).unwrap();
        let model = &outcome.model;
        assert_eq!(model.tagset(), ["T1", "T2"]);

        // Token-1-only feature.
        let row = model.feature_weights("w=a").unwrap();
        assert_eq!(row, [-0.5, 0.5]);
        // Shared feature: +1 at instance 1, -1 at instance 2 → average 0.5.
        let row = model.feature_weights("shape=x").unwrap();
        assert_eq!(row, [-0.5, 0.5]);
        // Token-2-only features were updated at the last instance: their
        // averaged weight is 0 and the row is pruned.
        assert!(model.feature_weights("w=b").is_none());
    }
}
