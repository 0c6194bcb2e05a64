//! Evaluation harness: token alignment across differing tokenizations,
//! coarse POS and lemma accuracy, and averaged throughput measurement.
//!
//! Accuracy is computed over the gold side: only exactly-aligned tokens
//! can score, every other gold token counts as an error, and the
//! denominator is the total number of gold tokens.

use std::time::Instant;

use thiserror::Error;

use crate::doc::{Document, SentenceSpan, Span, Token};
use crate::formats::ConlluSentence;
use crate::pipeline::{Pipeline, PipelineError};
use crate::pos::{CoarseTagMap, UnknownTag};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{side} token {index} has span {begin}..{end} outside text of length {len}")]
    OffsetDomain {
        side: &'static str,
        index: usize,
        begin: usize,
        end: usize,
        len: usize,
    },
    #[error("{side} tokens are not ordered at index {index}")]
    UnorderedSpans { side: &'static str, index: usize },
    #[error("gold corpus has no tokens")]
    EmptyGold,
    #[error("document text does not match the text reconstructed from the gold corpus")]
    TextMismatch,
    #[error(transparent)]
    UnknownTag(#[from] UnknownTag),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

/// How one alignment group relates the two sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlignKind {
    /// Identical spans.
    Exact,
    /// One system token covering two or more gold tokens.
    Merged,
    /// Two or more system tokens covering one gold token.
    Split,
    /// Anything else (boundary disagreement, one-sided tokens).
    Mismatched,
}

/// One alignment group: token indexes on each side (either may be empty
/// for one-sided tokens, never both).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlignGroup {
    pub system: Vec<usize>,
    pub gold: Vec<usize>,
    pub kind: AlignKind,
}

/// Alignment of two tokenizations of the same text, with per-kind group
/// counts. Projection of the groups onto either side preserves order and
/// covers every token exactly once.
#[derive(Clone, Debug, Default)]
pub struct Alignment {
    pub groups: Vec<AlignGroup>,
    pub exact: usize,
    pub merged: usize,
    pub split: usize,
    pub mismatched: usize,
}

impl Alignment {
    fn push(&mut self, group: AlignGroup) {
        match group.kind {
            AlignKind::Exact => self.exact += 1,
            AlignKind::Merged => self.merged += 1,
            AlignKind::Split => self.split += 1,
            AlignKind::Mismatched => self.mismatched += 1,
        }
        self.groups.push(group);
    }
}

fn check_spans(spans: &[Span], side: &'static str, text_len: usize) -> Result<(), EvalError> {
    let mut prev_end = 0usize;
    for (i, s) in spans.iter().enumerate() {
        if s.begin >= s.end || s.end > text_len {
            return Err(EvalError::OffsetDomain {
                side,
                index: i,
                begin: s.begin,
                end: s.end,
                len: text_len,
            });
        }
        if s.begin < prev_end {
            return Err(EvalError::UnorderedSpans { side, index: i });
        }
        prev_end = s.end;
    }
    Ok(())
}

fn contiguous(spans: &[Span], indexes: &[usize]) -> bool {
    indexes
        .windows(2)
        .all(|w| spans[w[0]].end == spans[w[1]].begin)
}

/// Greedy offset-interval alignment of two ordered tokenizations over the
/// same text.
pub fn align_tokens(
    system: &[Span],
    gold: &[Span],
    text_len: usize,
) -> Result<Alignment, EvalError> {
    check_spans(system, "system", text_len)?;
    check_spans(gold, "gold", text_len)?;

    let mut alignment = Alignment::default();
    let mut i = 0usize;
    let mut j = 0usize;
    while i < system.len() || j < gold.len() {
        if j == gold.len() || (i < system.len() && system[i].end <= gold[j].begin) {
            alignment.push(AlignGroup {
                system: vec![i],
                gold: vec![],
                kind: AlignKind::Mismatched,
            });
            i += 1;
            continue;
        }
        if i == system.len() || gold[j].end <= system[i].begin {
            alignment.push(AlignGroup {
                system: vec![],
                gold: vec![j],
                kind: AlignKind::Mismatched,
            });
            j += 1;
            continue;
        }
        // Overlapping: grow the group until both sides close at the same
        // character, or no further token overlaps.
        let mut sys_group = vec![i];
        let mut gold_group = vec![j];
        let mut sys_end = system[i].end;
        let mut gold_end = gold[j].end;
        loop {
            if sys_end < gold_end {
                if i + 1 < system.len() && system[i + 1].begin < gold_end {
                    i += 1;
                    sys_group.push(i);
                    sys_end = system[i].end;
                } else {
                    break;
                }
            } else if gold_end < sys_end {
                if j + 1 < gold.len() && gold[j + 1].begin < sys_end {
                    j += 1;
                    gold_group.push(j);
                    gold_end = gold[j].end;
                } else {
                    break;
                }
            } else {
                break;
            }
        }
        let sys_first = system[sys_group[0]];
        let gold_first = gold[gold_group[0]];
        let boundaries_agree = sys_first.begin == gold_first.begin && sys_end == gold_end;
        let kind = if sys_group.len() == 1 && gold_group.len() == 1 {
            if boundaries_agree {
                AlignKind::Exact
            } else {
                AlignKind::Mismatched
            }
        } else if sys_group.len() == 1
            && gold_group.len() >= 2
            && boundaries_agree
            && contiguous(gold, &gold_group)
        {
            AlignKind::Merged
        } else if gold_group.len() == 1
            && sys_group.len() >= 2
            && boundaries_agree
            && contiguous(system, &sys_group)
        {
            AlignKind::Split
        } else {
            AlignKind::Mismatched
        };
        alignment.push(AlignGroup {
            system: sys_group,
            gold: gold_group,
            kind,
        });
        i += 1;
        j += 1;
    }
    Ok(alignment)
}

/// One gold token extracted from CoNLL-U, with its span in the
/// reconstructed text.
#[derive(Clone, Debug)]
pub struct GoldToken {
    pub span: Span,
    pub form: String,
    pub upos: String,
    pub lemma: String,
    pub sentence_initial: bool,
}

/// Gold corpus layout: text reconstructed from the word forms (forms
/// joined by single spaces, sentences by single newlines) plus token
/// spans and sentence ranges.
#[derive(Clone, Debug)]
pub struct GoldLayout {
    pub text: String,
    pub tokens: Vec<GoldToken>,
    pub sentences: Vec<(usize, usize)>,
}

/// Deterministic detokenization of gold sentences. Multiword range rows
/// contribute through their component word rows only.
pub fn gold_layout(gold: &[ConlluSentence]) -> GoldLayout {
    let mut text = String::new();
    let mut tokens = Vec::new();
    let mut sentences = Vec::new();
    let mut at = 0usize;
    for (si, sent) in gold.iter().enumerate() {
        if si > 0 {
            text.push('\n');
            at += 1;
        }
        let first_token = tokens.len();
        for (wi, row) in sent.words().enumerate() {
            if wi > 0 {
                text.push(' ');
                at += 1;
            }
            let len = row.form.chars().count();
            tokens.push(GoldToken {
                span: Span::new(at, at + len),
                form: row.form.clone(),
                upos: row.upos.clone(),
                lemma: row.lemma.clone(),
                sentence_initial: wi == 0,
            });
            text.push_str(&row.form);
            at += len;
        }
        if tokens.len() > first_token {
            sentences.push((first_token, tokens.len() - 1));
        }
    }
    GoldLayout {
        text,
        tokens,
        sentences,
    }
}

/// Builds a document from gold token boundaries (tokens and sentences
/// populated, no other layers), for pipelines that skip tokenization.
pub fn document_from_gold(gold: &[ConlluSentence]) -> Document {
    let layout = gold_layout(gold);
    let mut doc = Document::new(layout.text.clone());
    let tokens: Vec<Token> = layout
        .tokens
        .iter()
        .enumerate()
        .map(|(i, g)| Token::new(i, g.span.begin, g.span.end, g.form.clone()))
        .collect();
    doc.set_tokens(tokens).expect("gold layout is consistent");
    doc.set_sentences(
        layout
            .sentences
            .iter()
            .map(|&(first, last)| SentenceSpan::new(first, last))
            .collect(),
    )
    .expect("gold layout is consistent");
    doc
}

/// Accuracy outcome: correct over total gold tokens.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalOutcome {
    pub correct: usize,
    pub total_gold: usize,
}

impl EvalOutcome {
    pub fn accuracy(&self) -> f64 {
        if self.total_gold == 0 {
            0.0
        } else {
            self.correct as f64 / self.total_gold as f64
        }
    }
}

fn eval_aligned<F>(
    doc: &Document,
    gold: &[ConlluSentence],
    mut token_correct: F,
) -> Result<EvalOutcome, EvalError>
where
    F: FnMut(&Token, &GoldToken) -> Result<bool, EvalError>,
{
    let layout = gold_layout(gold);
    if layout.tokens.is_empty() {
        return Err(EvalError::EmptyGold);
    }
    if doc.text() != layout.text {
        return Err(EvalError::TextMismatch);
    }
    let system_spans: Vec<Span> = doc.tokens().iter().map(|t| t.span()).collect();
    let gold_spans: Vec<Span> = layout.tokens.iter().map(|t| t.span).collect();
    let alignment = align_tokens(&system_spans, &gold_spans, layout.text.chars().count())?;

    let mut correct = 0usize;
    for group in &alignment.groups {
        if group.kind == AlignKind::Exact {
            let sys = &doc.tokens()[group.system[0]];
            let gold_tok = &layout.tokens[group.gold[0]];
            if token_correct(sys, gold_tok)? {
                correct += 1;
            }
        }
        // Merged, split and mismatched gold tokens count as errors.
    }
    Ok(EvalOutcome {
        correct,
        total_gold: layout.tokens.len(),
    })
}

/// Coarse 5-class POS accuracy of an annotated document against gold
/// CoNLL-U, on the gold-side denominator.
pub fn eval_pos(
    doc: &Document,
    gold: &[ConlluSentence],
    map: &CoarseTagMap,
) -> Result<EvalOutcome, EvalError> {
    eval_aligned(doc, gold, |sys, gold_tok| {
        let gold_coarse = map.map(&gold_tok.upos)?;
        Ok(match sys.pos() {
            Some(tag) => map.map(tag)? == gold_coarse,
            None => false,
        })
    })
}

/// Lemma accuracy. Comparison is case-sensitive, except sentence-initial
/// non-PROPN tokens which compare lowercased (gold conventions lowercase
/// sentence-initial capitalization for ordinary words).
pub fn eval_lemma(doc: &Document, gold: &[ConlluSentence]) -> Result<EvalOutcome, EvalError> {
    eval_aligned(doc, gold, |sys, gold_tok| {
        Ok(match sys.lemma() {
            Some(lemma) => {
                if gold_tok.sentence_initial && gold_tok.upos != "PROPN" {
                    lemma.to_lowercase() == gold_tok.lemma.to_lowercase()
                } else {
                    lemma == gold_tok.lemma
                }
            }
            None => false,
        })
    })
}

/// One measured run.
#[derive(Clone, Copy, Debug)]
pub struct BenchRun {
    pub seconds: f64,
    pub tokens: usize,
}

/// Throughput report: per-run wall times (warmup runs excluded), mean
/// tokens/second and an environment note.
#[derive(Clone, Debug)]
pub struct BenchReport {
    pub stage: String,
    pub runs: Vec<BenchRun>,
    pub warmup_excluded: usize,
    pub environment: String,
}

impl BenchReport {
    pub fn mean_seconds(&self) -> f64 {
        if self.runs.is_empty() {
            return 0.0;
        }
        self.runs.iter().map(|r| r.seconds).sum::<f64>() / self.runs.len() as f64
    }

    pub fn tokens(&self) -> usize {
        self.runs.first().map_or(0, |r| r.tokens)
    }

    /// Total tokens of one run divided by the mean wall time; 0 for an
    /// empty corpus (never a division error).
    pub fn tokens_per_sec(&self) -> f64 {
        let tokens = self.tokens();
        let mean = self.mean_seconds();
        if tokens == 0 || mean == 0.0 {
            return 0.0;
        }
        tokens as f64 / mean
    }

    /// TSV rendering: a header line, one line per measured run, and a
    /// summary line carrying the environment note.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str("stage\trun\tseconds\ttokens\n");
        for (i, run) in self.runs.iter().enumerate() {
            out.push_str(&format!(
                "{}\t{}\t{:.6}\t{}\n",
                self.stage,
                i + 1,
                run.seconds,
                run.tokens
            ));
        }
        out.push_str(&format!(
            "{}\tmean\t{:.6}\t{}\ttok/sec\t{:.0}\twarmup_excluded\t{}\tenv\t{}\n",
            self.stage,
            self.mean_seconds(),
            self.tokens(),
            self.tokens_per_sec(),
            self.warmup_excluded,
            self.environment
        ));
        out
    }
}

fn environment_note() -> String {
    format!(
        "single-threaded, multi-threading disabled; {}-{}",
        std::env::consts::OS,
        std::env::consts::ARCH
    )
}

/// Pipeline stage selection for throughput measurement. `Pos` and `Lemma`
/// time only the stage itself (tokenization runs unmeasured beforehand);
/// `Lemma` covers morphology plus lemmatization, the two stages that
/// produce a lemma together.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchStage {
    Tokenize,
    Pos,
    Lemma,
    Full,
}

impl BenchStage {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "tokenize" => Some(BenchStage::Tokenize),
            "pos" => Some(BenchStage::Pos),
            "lemma" => Some(BenchStage::Lemma),
            "full" => Some(BenchStage::Full),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            BenchStage::Tokenize => "tokenize",
            BenchStage::Pos => "pos",
            BenchStage::Lemma => "lemma",
            BenchStage::Full => "full",
        }
    }

    /// Capabilities whose providers are timed for this stage.
    fn timed_capabilities(&self) -> &'static [&'static str] {
        match self {
            BenchStage::Tokenize => &["tokens", "sentences"],
            BenchStage::Pos => &["pos"],
            BenchStage::Lemma => &["morph", "lemma"],
            BenchStage::Full => &[],
        }
    }
}

/// Runs `warmup` unmeasured plus `runs` measured single-threaded
/// executions of the selected stage over `text`. Stages are invoked
/// serially; only the annotators providing the stage's capabilities are
/// timed, earlier stages run unmeasured in each iteration.
pub fn bench_stage(
    pipeline: &Pipeline,
    stage: BenchStage,
    text: &str,
    runs: usize,
    warmup: usize,
) -> Result<BenchReport, EvalError> {
    let targets = stage.timed_capabilities();
    let timed: Vec<bool> = pipeline
        .stages()
        .iter()
        .map(|(spec, _)| {
            stage == BenchStage::Full
                || spec.provided().iter().any(|c| targets.contains(&c.as_str()))
        })
        .collect();

    let mut measured = Vec::with_capacity(runs);
    for iteration in 0..warmup + runs {
        let mut doc = Document::new(text);
        let mut elapsed = 0.0f64;
        for ((spec, annotator), is_timed) in pipeline.stages().iter().zip(&timed) {
            if *is_timed {
                let start = Instant::now();
                annotator.annotate(&mut doc).map_err(|cause| {
                    PipelineError::AnnotatorFailure {
                        annotator: spec.name().to_string(),
                        cause,
                    }
                })?;
                elapsed += start.elapsed().as_secs_f64();
            } else {
                annotator.annotate(&mut doc).map_err(|cause| {
                    PipelineError::AnnotatorFailure {
                        annotator: spec.name().to_string(),
                        cause,
                    }
                })?;
            }
        }
        if iteration >= warmup {
            measured.push(BenchRun {
                seconds: elapsed,
                tokens: doc.tokens().len(),
            });
        }
    }
    Ok(BenchReport {
        stage: stage.as_str().to_string(),
        runs: measured,
        warmup_excluded: warmup,
        environment: environment_note(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::read_conllu_str;

    fn spans(pairs: &[(usize, usize)]) -> Vec<Span> {
        pairs.iter().map(|&(b, e)| Span::new(b, e)).collect()
    }

    #[test]
    fn identical_tokenizations_align_exactly() {
        let a = spans(&[(0, 2), (3, 7), (8, 9)]);
        let alignment = align_tokens(&a, &a, 9).unwrap();
        assert_eq!(alignment.exact, 3);
        assert_eq!(alignment.merged + alignment.split + alignment.mismatched, 0);
    }

    #[test]
    fn spa_merges_one_system_token_against_six_gold() {
        // System: one token "S.p.A." (0..6); gold: S . p . A . as six
        // single-character tokens.
        let system = spans(&[(0, 6)]);
        let gold = spans(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6)]);
        let alignment = align_tokens(&system, &gold, 6).unwrap();
        assert_eq!(alignment.groups.len(), 1);
        let g = &alignment.groups[0];
        assert_eq!(g.kind, AlignKind::Merged);
        assert_eq!(g.system, [0]);
        assert_eq!(g.gold, [0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn split_is_the_mirror_case() {
        let system = spans(&[(0, 1), (1, 2)]);
        let gold = spans(&[(0, 2)]);
        let alignment = align_tokens(&system, &gold, 2).unwrap();
        assert_eq!(alignment.split, 1);
        assert_eq!(alignment.groups[0].kind, AlignKind::Split);
    }

    #[test]
    fn disjoint_spans_are_mismatched_but_partition_both_sides() {
        let system = spans(&[(0, 2), (5, 7)]);
        let gold = spans(&[(3, 4), (8, 9)]);
        let alignment = align_tokens(&system, &gold, 10).unwrap();
        assert_eq!(alignment.mismatched, 4);
        let sys_count: usize = alignment.groups.iter().map(|g| g.system.len()).sum();
        let gold_count: usize = alignment.groups.iter().map(|g| g.gold.len()).sum();
        assert_eq!(sys_count, 2);
        assert_eq!(gold_count, 2);
    }

    #[test]
    fn boundary_disagreement_is_mismatched() {
        let system = spans(&[(0, 3), (3, 5)]);
        let gold = spans(&[(0, 2), (2, 5)]);
        let alignment = align_tokens(&system, &gold, 5).unwrap();
        assert_eq!(alignment.exact, 0);
        assert!(alignment.mismatched >= 1);
    }

    #[test]
    fn out_of_domain_spans_error() {
        let system = spans(&[(0, 12)]);
        let gold = spans(&[(0, 2)]);
        let err = align_tokens(&system, &gold, 5).unwrap_err();
        assert!(matches!(err, EvalError::OffsetDomain { side: "system", .. }));
    }

    const GOLD: &str = "\
1\tIl\til\tDET\t_\t_\t_\t_\t_\t_
2\tcane\tcane\tNOUN\t_\t_\t_\t_\t_\t_
3\tdorme\tdormire\tVERB\t_\t_\t_\t_\t_\t_
4\t.\t.\tPUNCT\t_\t_\t_\t_\t_\t_
";

    fn gold_sentences() -> Vec<ConlluSentence> {
        read_conllu_str(GOLD).unwrap()
    }

    fn system_doc(tags: &[&str]) -> Document {
        let gold = gold_sentences();
        let mut doc = document_from_gold(&gold);
        for (i, tag) in tags.iter().enumerate() {
            doc.tokens_mut()[i].set_pos(*tag);
        }
        doc
    }

    #[test]
    fn gold_layout_reconstructs_space_joined_text() {
        let layout = gold_layout(&gold_sentences());
        assert_eq!(layout.text, "Il cane dorme .");
        assert_eq!(layout.tokens.len(), 4);
        assert!(layout.tokens[0].sentence_initial);
        assert!(!layout.tokens[1].sentence_initial);
    }

    #[test]
    fn eval_pos_perfect_tags_score_one() {
        let doc = system_doc(&["DET", "NOUN", "VERB", "PUNCT"]);
        let outcome = eval_pos(&doc, &gold_sentences(), CoarseTagMap::default_upos()).unwrap();
        assert_eq!(outcome.correct, 4);
        assert_eq!(outcome.total_gold, 4);
        assert_eq!(outcome.accuracy(), 1.0);
    }

    #[test]
    fn eval_pos_counts_coarse_classes_not_upos() {
        // PROPN for NOUN and AUX for VERB are coarse-equivalent.
        let doc = system_doc(&["PRON", "PROPN", "AUX", "SYM"]);
        let outcome = eval_pos(&doc, &gold_sentences(), CoarseTagMap::default_upos()).unwrap();
        assert_eq!(outcome.correct, 4);
    }

    #[test]
    fn eval_pos_merged_away_token_counts_as_error() {
        // System merges "cane dorme" into one token: 2 exact tokens are
        // left plus the merged pair; 3 correct of 4 gold would need all
        // exact, here 2 of 4 remain scoreable plus "." and "Il".
        let gold = gold_sentences();
        let layout = gold_layout(&gold);
        let mut doc = Document::new(layout.text.clone());
        doc.set_tokens(vec![
            Token::new(0, 0, 2, "Il"),
            Token::new(0, 3, 13, "cane dorme"),
            Token::new(0, 14, 15, "."),
        ])
        .unwrap();
        doc.tokens_mut()[0].set_pos("DET");
        doc.tokens_mut()[1].set_pos("NOUN");
        doc.tokens_mut()[2].set_pos("PUNCT");
        let outcome = eval_pos(&doc, &gold, CoarseTagMap::default_upos()).unwrap();
        assert_eq!(outcome.total_gold, 4);
        assert_eq!(outcome.correct, 2);
        assert_eq!(outcome.accuracy(), 0.5);
    }

    #[test]
    fn eval_lemma_sentence_initial_casing() {
        let gold = gold_sentences();
        let mut doc = document_from_gold(&gold);
        let lemmas = ["il", "cane", "dormire", "."];
        for (i, lemma) in lemmas.iter().enumerate() {
            doc.tokens_mut()[i].set_pos("X");
            doc.tokens_mut()[i].set_lemma(crate::lemma::LemmaDecision {
                lemma: lemma.to_string(),
                source: crate::lemma::LemmaSource::LexiconMatch,
                chosen_analysis: None,
            });
        }
        let outcome = eval_lemma(&doc, &gold).unwrap();
        assert_eq!(outcome.accuracy(), 1.0);

        // "Il" lemmatized with initial capital still counts at sentence
        // start (non-PROPN lowercase comparison).
        doc.tokens_mut()[0].set_lemma(crate::lemma::LemmaDecision {
            lemma: "Il".to_string(),
            source: crate::lemma::LemmaSource::FallbackSurface,
            chosen_analysis: None,
        });
        let outcome = eval_lemma(&doc, &gold).unwrap();
        assert_eq!(outcome.accuracy(), 1.0);
    }

    #[test]
    fn eval_lemma_one_wrong_in_ten() {
        let mut rows = String::new();
        for i in 1..=10 {
            rows.push_str(&format!("{i}\tw{i}\tw{i}\tNOUN\t_\t_\t_\t_\t_\t_\n"));
        }
        let gold = read_conllu_str(&rows).unwrap();
        let mut doc = document_from_gold(&gold);
        for i in 0..10 {
            let lemma = if i == 4 { "sbagliato".to_string() } else { format!("w{}", i + 1) };
            doc.tokens_mut()[i].set_pos("NOUN");
            doc.tokens_mut()[i].set_lemma(crate::lemma::LemmaDecision {
                lemma,
                source: crate::lemma::LemmaSource::LexiconMatch,
                chosen_analysis: None,
            });
        }
        let outcome = eval_lemma(&doc, &gold).unwrap();
        assert!((outcome.accuracy() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn empty_gold_is_an_error() {
        let doc = Document::new("");
        assert!(matches!(
            eval_pos(&doc, &[], CoarseTagMap::default_upos()),
            Err(EvalError::EmptyGold)
        ));
    }

    #[test]
    fn bench_report_mean_is_arithmetic_mean() {
        let report = BenchReport {
            stage: "tokenize".into(),
            runs: vec![
                BenchRun { seconds: 0.25, tokens: 100 },
                BenchRun { seconds: 0.5, tokens: 100 },
                BenchRun { seconds: 0.75, tokens: 100 },
            ],
            warmup_excluded: 2,
            environment: "test".into(),
        };
        let expected = (0.25 + 0.5 + 0.75) / 3.0;
        assert_eq!(report.mean_seconds(), expected);
        assert_eq!(report.tokens_per_sec(), 100.0 / expected);
    }

    #[test]
    fn bench_empty_corpus_reports_zero() {
        let report = BenchReport {
            stage: "tokenize".into(),
            runs: vec![BenchRun { seconds: 0.0, tokens: 0 }],
            warmup_excluded: 0,
            environment: "test".into(),
        };
        assert_eq!(report.tokens_per_sec(), 0.0);
    }

    #[test]
    fn bench_stage_over_a_real_pipeline() {
        let registry = crate::standard_registry();
        let config = crate::PipelineConfig::new(["tokenize"]);
        let pipeline = crate::build_pipeline(&registry, &config).unwrap();

        let report = bench_stage(&pipeline, BenchStage::Tokenize, "", 2, 0).unwrap();
        assert_eq!(report.runs.len(), 2);
        assert_eq!(report.tokens_per_sec(), 0.0);

        let a = bench_stage(&pipeline, BenchStage::Tokenize, "Piove. Esco.", 3, 1).unwrap();
        let b = bench_stage(&pipeline, BenchStage::Tokenize, "Piove. Esco.", 3, 1).unwrap();
        assert_eq!(a.tokens(), b.tokens());
        assert_eq!(a.runs.len(), 3);
        assert!(!a.environment.is_empty());
        assert!(a.to_tsv().contains("tok/sec"));
    }
}
