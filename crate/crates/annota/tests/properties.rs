//! Property-based invariants across the pipeline modules.

use std::collections::BTreeSet;

use proptest::prelude::*;

use annota::doc::{Document, Span, slice_chars};
use annota::eval::{AlignKind, align_tokens, document_from_gold, eval_lemma, eval_pos};
use annota::formats::{ConlluSentence, read_conllu_str, render_conllu, write_conll, write_json};
use annota::lemma::{LemmaDecision, LemmaSource};
use annota::morph::store::{CasePolicy, LexiconStore, compile_lexicon_bytes};
use annota::morph::tags::TagGrammar;
use annota::pos::CoarseTagMap;
use annota::tokenize::{AbbreviationList, PatternSet, tokenize_text};

/// Text made of Italian-ish words, digits, punctuation and whitespace,
/// including multibyte characters.
fn arb_text() -> impl Strategy<Value = String> {
    let piece = prop_oneof![
        "[a-zA-Z]{1,8}",
        "[àèéìòù]{1,3}",
        "[0-9]{1,5}",
        Just(".".to_string()),
        Just(",".to_string()),
        Just("!".to_string()),
        Just("?".to_string()),
        Just("…".to_string()),
        Just("«parola»".to_string()),
        Just("dott.".to_string()),
        Just("S.p.A.".to_string()),
        Just("user@example.com".to_string()),
        Just("www.example.com".to_string()),
        Just("12,5%".to_string()),
        Just("日本語".to_string()),
    ];
    let sep = prop_oneof![
        4 => Just(" ".to_string()),
        1 => Just("\n".to_string()),
        1 => Just("\t".to_string()),
        1 => Just("".to_string()),
    ];
    prop::collection::vec((piece, sep), 0..30).prop_map(|pairs| {
        let mut text = String::new();
        for (p, s) in pairs {
            text.push_str(&p);
            text.push_str(&s);
        }
        text
    })
}

proptest! {
    /// Token spans re-slice to surfaces; gaps are pure whitespace; no
    /// token contains whitespace; concatenation reconstructs the input.
    #[test]
    fn tokenizer_is_lossless(text in arb_text()) {
        let (tokens, sentences) = tokenize_text(
            &text,
            AbbreviationList::default_italian(),
            PatternSet::default_italian(),
        );
        let mut reconstructed = String::new();
        let mut cursor = 0usize;
        for tok in &tokens {
            prop_assert_eq!(slice_chars(&text, tok.begin(), tok.end()), tok.surface());
            prop_assert!(!tok.surface().chars().any(char::is_whitespace));
            let gap = slice_chars(&text, cursor, tok.begin());
            prop_assert!(gap.chars().all(char::is_whitespace), "gap {gap:?}");
            reconstructed.push_str(gap);
            reconstructed.push_str(tok.surface());
            cursor = tok.end();
        }
        let tail = slice_chars(&text, cursor, text.chars().count());
        prop_assert!(tail.chars().all(char::is_whitespace));
        reconstructed.push_str(tail);
        prop_assert_eq!(reconstructed, text);

        // Sentences partition the token list.
        let mut next = 0usize;
        for s in &sentences {
            prop_assert_eq!(s.first, next);
            prop_assert!(s.last >= s.first);
            next = s.last + 1;
        }
        prop_assert_eq!(next, tokens.len());
    }

    /// Merging never reorders and never changes covered characters.
    #[test]
    fn merge_preserves_covered_positions(text in arb_text()) {
        use annota::tokenize::{gross_tokenize, merge_tokens};
        let proto = gross_tokenize(&text);
        let merged = merge_tokens(
            &proto,
            &text,
            AbbreviationList::default_italian(),
            PatternSet::default_italian(),
        );
        let proto_covered: BTreeSet<usize> =
            proto.iter().flat_map(|s| s.begin..s.end).collect();
        let merged_covered: BTreeSet<usize> =
            merged.iter().flat_map(|t| t.begin()..t.end()).collect();
        prop_assert_eq!(proto_covered, merged_covered);
        prop_assert!(merged.windows(2).all(|w| w[0].end() <= w[1].begin()));
    }
}

/// Random lexicon rows: lowercase forms, optional ambiguity.
fn arb_lexicon() -> impl Strategy<Value = Vec<(String, String, String)>> {
    let row = (
        "[a-zàè]{2,10}",
        "[a-z]{2,8}",
        prop_oneof![
            Just("NOUN-M:s".to_string()),
            Just("NOUN-F:p".to_string()),
            Just("VER:ind+pres+3+s".to_string()),
            Just("ADJ:pos+f+p".to_string()),
            Just("ADV".to_string()),
        ],
    );
    prop::collection::vec(row, 0..60)
}

proptest! {
    /// compile → lookup returns exactly the written analyses for every
    /// form, and keys iterate in strictly increasing byte order.
    #[test]
    fn store_round_trip(rows in arb_lexicon()) {
        let grammar = TagGrammar::default_italian();
        let tsv: String = rows
            .iter()
            .map(|(f, l, t)| format!("{f}\t{l}\t{t}\n"))
            .collect();
        let (bytes, report) = compile_lexicon_bytes(&tsv, grammar).unwrap();
        let store = LexiconStore::from_bytes(bytes).unwrap();

        let mut expected: std::collections::BTreeMap<&str, Vec<annota::MorphAnalysis>> =
            std::collections::BTreeMap::new();
        for (f, l, t) in &rows {
            let a = grammar.analysis(l, t);
            let list = expected.entry(f.as_str()).or_default();
            if !list.contains(&a) {
                list.push(a);
            }
        }
        prop_assert_eq!(report.header.entry_count, expected.len() as u64);
        for (form, analyses) in &expected {
            let got = store.lookup(form, CasePolicy::Exact);
            prop_assert_eq!(&got, analyses, "form {}", form);
        }
        let keys: Vec<&str> = store.keys().collect();
        prop_assert!(keys.windows(2).all(|w| w[0].as_bytes() < w[1].as_bytes()));
        prop_assert_eq!(keys.len() as u64, store.len());
    }
}

/// Ordered, non-overlapping spans over a small text domain.
fn arb_spans(max_tokens: usize) -> impl Strategy<Value = Vec<Span>> {
    prop::collection::vec((1usize..4, 0usize..3), 0..max_tokens).prop_map(|steps| {
        let mut spans = Vec::new();
        let mut at = 0usize;
        for (len, gap) in steps {
            at += gap;
            spans.push(Span::new(at, at + len));
            at += len;
        }
        spans
    })
}

/// Independent grouping oracle: connected components of the pairwise
/// overlap relation, scanned in order.
fn overlap_components(system: &[Span], gold: &[Span]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let overlaps = |a: &Span, b: &Span| a.begin < b.end && b.begin < a.end;
    let mut groups: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let mut used_sys = vec![false; system.len()];
    let mut used_gold = vec![false; gold.len()];
    loop {
        // Seed with the earliest unused token on either side.
        let next_sys = used_sys.iter().position(|u| !u);
        let next_gold = used_gold.iter().position(|u| !u);
        let (mut sys_set, mut gold_set): (BTreeSet<usize>, BTreeSet<usize>) =
            match (next_sys, next_gold) {
                (None, None) => break,
                (Some(i), None) => ([i].into(), BTreeSet::new()),
                (None, Some(j)) => (BTreeSet::new(), [j].into()),
                (Some(i), Some(j)) => {
                    if system[i].begin <= gold[j].begin {
                        ([i].into(), BTreeSet::new())
                    } else {
                        (BTreeSet::new(), [j].into())
                    }
                }
            };
        // Transitive closure of the overlap relation.
        loop {
            let mut grew = false;
            for (j, g) in gold.iter().enumerate() {
                if !used_gold[j]
                    && !gold_set.contains(&j)
                    && sys_set.iter().any(|&i| overlaps(&system[i], g))
                {
                    gold_set.insert(j);
                    grew = true;
                }
            }
            for (i, s) in system.iter().enumerate() {
                if !used_sys[i]
                    && !sys_set.contains(&i)
                    && gold_set.iter().any(|&j| overlaps(s, &gold[j]))
                {
                    sys_set.insert(i);
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        for &i in &sys_set {
            used_sys[i] = true;
        }
        for &j in &gold_set {
            used_gold[j] = true;
        }
        groups.push((
            sys_set.into_iter().collect(),
            gold_set.into_iter().collect(),
        ));
    }
    groups
}

proptest! {
    /// The greedy alignment produces exactly the overlap components, in
    /// order, and every token lands in exactly one group.
    #[test]
    fn alignment_matches_overlap_components(
        system in arb_spans(8),
        gold in arb_spans(8),
    ) {
        let text_len = 64usize;
        let alignment = align_tokens(&system, &gold, text_len).unwrap();

        // Partition check.
        let mut sys_seen = Vec::new();
        let mut gold_seen = Vec::new();
        for g in &alignment.groups {
            prop_assert!(!g.system.is_empty() || !g.gold.is_empty());
            sys_seen.extend_from_slice(&g.system);
            gold_seen.extend_from_slice(&g.gold);
        }
        prop_assert_eq!(&sys_seen, &(0..system.len()).collect::<Vec<_>>());
        prop_assert_eq!(&gold_seen, &(0..gold.len()).collect::<Vec<_>>());

        // Group structure equals the exhaustive overlap components.
        let expected = overlap_components(&system, &gold);
        let got: Vec<(Vec<usize>, Vec<usize>)> = alignment
            .groups
            .iter()
            .map(|g| (g.system.clone(), g.gold.clone()))
            .collect();
        prop_assert_eq!(got, expected);

        // Count bookkeeping.
        let exact = alignment
            .groups
            .iter()
            .filter(|g| g.kind == AlignKind::Exact)
            .count();
        prop_assert_eq!(exact, alignment.exact);
    }
}

/// Small random annotated documents rendered as gold CoNLL-U plus a
/// matching system document with injected errors.
#[derive(Debug, Clone)]
struct EvalCase {
    gold: String,
    tags: Vec<(String, String)>,    // (system tag, gold tag)
    lemmas: Vec<(String, String)>,  // (system lemma, gold lemma)
}

fn arb_eval_case() -> impl Strategy<Value = EvalCase> {
    let upos = prop_oneof![
        Just("NOUN"),
        Just("VERB"),
        Just("ADJ"),
        Just("ADV"),
        Just("DET"),
        Just("PUNCT"),
    ];
    prop::collection::vec(("[a-z]{1,6}", upos, prop::bool::ANY, prop::bool::ANY), 1..12).prop_map(
        |rows| {
            let mut gold = String::new();
            let mut tags = Vec::new();
            let mut lemmas = Vec::new();
            for (i, (form, gold_tag, flip_tag, flip_lemma)) in rows.iter().enumerate() {
                let gold_lemma = format!("{form}a");
                gold.push_str(&format!(
                    "{}\t{}\t{}\t{}\t_\t_\t_\t_\t_\t_\n",
                    i + 1,
                    form,
                    gold_lemma,
                    gold_tag
                ));
                let sys_tag = if *flip_tag {
                    if *gold_tag == "NOUN" { "VERB" } else { "NOUN" }
                } else {
                    gold_tag
                };
                let sys_lemma = if *flip_lemma {
                    format!("{form}x")
                } else {
                    gold_lemma.clone()
                };
                tags.push((sys_tag.to_string(), gold_tag.to_string()));
                lemmas.push((sys_lemma, gold_lemma));
            }
            EvalCase { gold, tags, lemmas }
        },
    )
}

proptest! {
    /// eval_pos and eval_lemma agree with a direct brute-force recount on
    /// identically tokenized documents with injected errors.
    #[test]
    fn eval_matches_brute_force(case in arb_eval_case()) {
        let gold: Vec<ConlluSentence> = read_conllu_str(&case.gold).unwrap();
        let map = CoarseTagMap::default_upos();
        let mut doc = document_from_gold(&gold);
        for (i, (sys_tag, _)) in case.tags.iter().enumerate() {
            doc.tokens_mut()[i].set_pos(sys_tag.clone());
            doc.tokens_mut()[i].set_lemma(LemmaDecision {
                lemma: case.lemmas[i].0.clone(),
                source: LemmaSource::LexiconMatch,
                chosen_analysis: None,
            });
        }

        let pos_expected = case
            .tags
            .iter()
            .filter(|(s, g)| map.map(s).unwrap() == map.map(g).unwrap())
            .count();
        let outcome = eval_pos(&doc, &gold, map).unwrap();
        prop_assert_eq!(outcome.correct, pos_expected);
        prop_assert_eq!(outcome.total_gold, case.tags.len());

        let lemma_expected = case
            .lemmas
            .iter()
            .filter(|(s, g)| s == g)
            .count();
        let outcome = eval_lemma(&doc, &gold).unwrap();
        prop_assert_eq!(outcome.correct, lemma_expected);
    }
}

proptest! {
    /// write_conll output re-parses with identical token counts and
    /// columns 1-4; write_json offsets re-slice the text.
    #[test]
    fn writers_round_trip(text in arb_text()) {
        let (tokens, sentences) = tokenize_text(
            &text,
            AbbreviationList::default_italian(),
            PatternSet::default_italian(),
        );
        let mut doc = Document::new(text.clone());
        doc.set_tokens(tokens).unwrap();
        doc.set_sentences(sentences).unwrap();

        let conll = write_conll(&doc);
        let reparsed = read_conllu_str(&conll).unwrap();
        let words: usize = reparsed.iter().map(|s| s.word_count()).sum();
        prop_assert_eq!(words, doc.tokens().len());
        let mut at = 0usize;
        for sent in &reparsed {
            for row in sent.words() {
                prop_assert_eq!(&row.form, doc.tokens()[at].surface());
                prop_assert_eq!(&row.upos, "_");
                at += 1;
            }
        }
        // Identity of render∘read on the written output.
        prop_assert_eq!(render_conllu(&reparsed), conll);

        let v: serde_json::Value = serde_json::from_str(&write_json(&doc)).unwrap();
        let chars: Vec<char> = text.chars().collect();
        for tok in v["tokens"].as_array().unwrap() {
            let begin = tok["begin"].as_u64().unwrap() as usize;
            let end = tok["end"].as_u64().unwrap() as usize;
            let surface: String = chars[begin..end].iter().collect();
            prop_assert_eq!(surface, tok["surface"].as_str().unwrap());
        }
    }
}
