//! Deterministic synthetic Italian corpus and lexicon for tests and
//! benchmarks.
//!
//! Sentences are generated from a template grammar over a closed
//! vocabulary with gender/number agreement, a Morph-it style lexicon
//! covering that vocabulary, and a held-out slice of test-only words
//! (suffix-regular nouns, adjectives, adverbs and clitic verb forms) so
//! that evaluation genuinely exercises unknown-word handling. Everything
//! is seeded: the same seed always yields byte-identical output.

use crate::util::SplitMix64;

/// Generated corpus splits (CoNLL-U text) plus the matching full-form
/// lexicon (TSV).
#[derive(Clone, Debug)]
pub struct MiniCorpus {
    pub train_conllu: String,
    pub dev_conllu: String,
    pub test_conllu: String,
    pub lexicon_tsv: String,
}

struct Tok {
    form: String,
    upos: &'static str,
    lemma: String,
}

fn tok(form: impl Into<String>, upos: &'static str, lemma: impl Into<String>) -> Tok {
    Tok {
        form: form.into(),
        upos,
        lemma: lemma.into(),
    }
}

/// (singular, plural, gender). The lemma is the singular form.
type Noun = (&'static str, &'static str, char);

const NOUNS: &[Noun] = &[
    ("cane", "cani", 'm'),
    ("gatto", "gatti", 'm'),
    ("libro", "libri", 'm'),
    ("tavolo", "tavoli", 'm'),
    ("treno", "treni", 'm'),
    ("ragazzo", "ragazzi", 'm'),
    ("bambino", "bambini", 'm'),
    ("maestro", "maestri", 'm'),
    ("dottore", "dottori", 'm'),
    ("professore", "professori", 'm'),
    ("giornale", "giornali", 'm'),
    ("giorno", "giorni", 'm'),
    ("mese", "mesi", 'm'),
    ("vino", "vini", 'm'),
    ("pesce", "pesci", 'm'),
    ("fiore", "fiori", 'm'),
    ("bosco", "boschi", 'm'),
    ("mare", "mari", 'm'),
    ("cielo", "cieli", 'm'),
    ("vento", "venti", 'm'),
    ("mercato", "mercati", 'm'),
    ("museo", "musei", 'm'),
    ("padre", "padri", 'm'),
    ("figlio", "figli", 'm'),
    ("fratello", "fratelli", 'm'),
    ("nonno", "nonni", 'm'),
    ("negozio", "negozi", 'm'),
    ("sentiero", "sentieri", 'm'),
    ("ponte", "ponti", 'm'),
    ("fiume", "fiumi", 'm'),
    ("monte", "monti", 'm'),
    ("prato", "prati", 'm'),
    ("campo", "campi", 'm'),
    ("paese", "paesi", 'm'),
    ("palazzo", "palazzi", 'm'),
    ("sale", "sali", 'm'),
    ("pane", "pani", 'm'),
    ("casa", "case", 'f'),
    ("sedia", "sedie", 'f'),
    ("finestra", "finestre", 'f'),
    ("porta", "porte", 'f'),
    ("strada", "strade", 'f'),
    ("stazione", "stazioni", 'f'),
    ("ragazza", "ragazze", 'f'),
    ("bambina", "bambine", 'f'),
    ("lettera", "lettere", 'f'),
    ("parola", "parole", 'f'),
    ("notte", "notti", 'f'),
    ("mattina", "mattine", 'f'),
    ("sera", "sere", 'f'),
    ("settimana", "settimane", 'f'),
    ("mano", "mani", 'f'),
    ("mela", "mele", 'f'),
    ("pera", "pere", 'f'),
    ("scuola", "scuole", 'f'),
    ("piazza", "piazze", 'f'),
    ("chiesa", "chiese", 'f'),
    ("madre", "madri", 'f'),
    ("figlia", "figlie", 'f'),
    ("sorella", "sorelle", 'f'),
    ("nonna", "nonne", 'f'),
    ("famiglia", "famiglie", 'f'),
    ("montagna", "montagne", 'f'),
    ("stella", "stelle", 'f'),
    ("luna", "lune", 'f'),
    ("canzone", "canzoni", 'f'),
    ("lezione", "lezioni", 'f'),
    ("ragione", "ragioni", 'f'),
    ("direzione", "direzioni", 'f'),
    ("decisione", "decisioni", 'f'),
    ("passione", "passioni", 'f'),
    ("barca", "barche", 'f'),
    ("torre", "torri", 'f'),
    ("voce", "voci", 'f'),
    ("legge", "leggi", 'f'),
    ("parte", "parti", 'f'),
    ("volpe", "volpi", 'f'),
    ("nave", "navi", 'f'),
    ("città", "città", 'f'),
];

/// Test-only nouns; the bool says whether the lexicon covers them. The
/// uncovered ones produce honest lemmatization errors on inflected forms.
const TEST_NOUNS: &[(Noun, bool)] = &[
    (("emozione", "emozioni", 'f'), true),
    (("tradizione", "tradizioni", 'f'), true),
    (("colazione", "colazioni", 'f'), true),
    (("soluzione", "soluzioni", 'f'), false),
    (("condizione", "condizioni", 'f'), false),
    (("quaderno", "quaderni", 'm'), true),
    (("sapore", "sapori", 'm'), true),
];

/// (infinitive, pres 3sg, pres 3pl, past participle m.sg, takes essere,
/// transitive).
type Verb = (
    &'static str,
    &'static str,
    &'static str,
    &'static str,
    bool,
    bool,
);

const VERBS: &[Verb] = &[
    ("portare", "porta", "portano", "portato", false, true),
    ("mangiare", "mangia", "mangiano", "mangiato", false, true),
    ("leggere", "legge", "leggono", "letto", false, true),
    ("vedere", "vede", "vedono", "visto", false, true),
    ("comprare", "compra", "comprano", "comprato", false, true),
    ("vendere", "vende", "vendono", "venduto", false, true),
    ("prendere", "prende", "prendono", "preso", false, true),
    ("trovare", "trova", "trovano", "trovato", false, true),
    ("cercare", "cerca", "cercano", "cercato", false, true),
    ("guardare", "guarda", "guardano", "guardato", false, true),
    ("ascoltare", "ascolta", "ascoltano", "ascoltato", false, true),
    ("chiamare", "chiama", "chiamano", "chiamato", false, true),
    ("scrivere", "scrive", "scrivono", "scritto", false, true),
    ("aprire", "apre", "aprono", "aperto", false, true),
    ("chiudere", "chiude", "chiudono", "chiuso", false, true),
    ("preparare", "prepara", "preparano", "preparato", false, true),
    ("raccontare", "racconta", "raccontano", "raccontato", false, true),
    ("cantare", "canta", "cantano", "cantato", false, true),
    ("dare", "dà", "danno", "dato", false, true),
    ("dormire", "dorme", "dormono", "dormito", false, false),
    ("correre", "corre", "corrono", "corso", false, false),
    ("parlare", "parla", "parlano", "parlato", false, false),
    ("giocare", "gioca", "giocano", "giocato", false, false),
    ("lavorare", "lavora", "lavorano", "lavorato", false, false),
    ("camminare", "cammina", "camminano", "camminato", false, false),
    ("pensare", "pensa", "pensano", "pensato", false, false),
    ("arrivare", "arriva", "arrivano", "arrivato", true, false),
    ("partire", "parte", "partono", "partito", true, false),
    ("entrare", "entra", "entrano", "entrato", true, false),
    ("uscire", "esce", "escono", "uscito", true, false),
    ("salire", "sale", "salgono", "salito", true, false),
    ("scendere", "scende", "scendono", "sceso", true, false),
    ("tornare", "torna", "tornano", "tornato", true, false),
    ("restare", "resta", "restano", "restato", true, false),
];

/// Verbs taking a `che` clause.
const SAY_VERBS: &[(&str, &str)] = &[("dice", "dire"), ("crede", "credere"), ("sa", "sapere")];

/// Modal 3sg forms followed by an infinitive.
const MODALS: &[(&str, &str)] = &[("vuole", "volere"), ("deve", "dovere"), ("può", "potere")];

/// (m.sg, f.sg, m.pl, f.pl); lemma is the m.sg form.
type Adj = (&'static str, &'static str, &'static str, &'static str);

const ADJS: &[Adj] = &[
    ("bello", "bella", "belli", "belle"),
    ("piccolo", "piccola", "piccoli", "piccole"),
    ("grande", "grande", "grandi", "grandi"),
    ("verde", "verde", "verdi", "verdi"),
    ("forte", "forte", "forti", "forti"),
    ("felice", "felice", "felici", "felici"),
    ("triste", "triste", "tristi", "tristi"),
    ("veloce", "veloce", "veloci", "veloci"),
    ("gentile", "gentile", "gentili", "gentili"),
    ("grosso", "grossa", "grossi", "grosse"),
    ("difficile", "difficile", "difficili", "difficili"),
    ("facile", "facile", "facili", "facili"),
    ("dolce", "dolce", "dolci", "dolci"),
    ("rosso", "rossa", "rossi", "rosse"),
    ("nero", "nera", "neri", "nere"),
    ("bianco", "bianca", "bianchi", "bianche"),
    ("nuovo", "nuova", "nuovi", "nuove"),
    ("vecchio", "vecchia", "vecchi", "vecchie"),
    ("giovane", "giovane", "giovani", "giovani"),
    ("lungo", "lunga", "lunghi", "lunghe"),
    ("corto", "corta", "corti", "corte"),
    ("caldo", "calda", "caldi", "calde"),
    ("freddo", "fredda", "freddi", "fredde"),
    ("buono", "buona", "buoni", "buone"),
    ("cattivo", "cattiva", "cattivi", "cattive"),
    ("moderno", "moderna", "moderni", "moderne"),
    ("chiaro", "chiara", "chiari", "chiare"),
    ("scuro", "scura", "scuri", "scure"),
    ("pieno", "piena", "pieni", "piene"),
    ("vuoto", "vuota", "vuoti", "vuote"),
    ("stanco", "stanca", "stanchi", "stanche"),
    ("contento", "contenta", "contenti", "contente"),
    ("sereno", "serena", "sereni", "serene"),
    ("strano", "strana", "strani", "strane"),
    ("speciale", "speciale", "speciali", "speciali"),
    ("direzionale", "direzionale", "direzionali", "direzionali"),
];

const TEST_ADJS: &[(Adj, bool)] = &[
    (("luminoso", "luminosa", "luminosi", "luminose"), true),
    (("famoso", "famosa", "famosi", "famose"), true),
    (("silenzioso", "silenziosa", "silenziosi", "silenziose"), false),
    (
        ("bidirezionale", "bidirezionale", "bidirezionali", "bidirezionali"),
        false,
    ),
];

const ADVS: &[&str] = &[
    "molto",
    "poco",
    "sempre",
    "mai",
    "oggi",
    "domani",
    "ieri",
    "qui",
    "là",
    "subito",
    "presto",
    "tardi",
    "bene",
    "male",
    "ancora",
    "già",
    "forse",
    "davvero",
    "spesso",
    "ora",
    "adesso",
    "lentamente",
    "velocemente",
    "dolcemente",
    "fortemente",
    "gentilmente",
    "raramente",
    "attentamente",
    "felicemente",
    "certamente",
    "finalmente",
];

/// Test-only adverbs, deliberately absent from the lexicon: the surface
/// fallback still lemmatizes them correctly.
const TEST_ADVS: &[&str] = &[
    "serenamente",
    "rapidamente",
    "chiaramente",
    "sicuramente",
    "probabilmente",
    "tranquillamente",
];

const PREPS: &[&str] = &["per", "con", "tra", "fra", "verso", "senza", "dopo", "durante"];
const PLACE_PREPS: &[&str] = &["a", "da", "per", "verso"];

const PERSONS: &[&str] = &[
    "Maria", "Anna", "Luca", "Marco", "Paolo", "Giulia", "Sofia", "Elena", "Franco", "Carla",
];
const PLACES: &[&str] = &[
    "Roma", "Milano", "Napoli", "Torino", "Firenze", "Venezia", "Bologna", "Genova",
];
const SURNAMES: &[&str] = &["Rossi", "Bianchi", "Verdi", "Russo", "Ferrari"];

/// (abbreviated title, lemma, gender).
const TITLES: &[(&str, &str, char)] = &[
    ("dott.", "dottore", 'm'),
    ("sig.", "signore", 'm'),
    ("prof.", "professore", 'm'),
    ("ing.", "ingegnere", 'm'),
    ("avv.", "avvocato", 'm'),
];

const NUM_WORDS: &[&str] = &[
    "due", "tre", "quattro", "cinque", "sei", "sette", "otto", "nove", "dieci",
];
const DIGITS: &[&str] = &["2", "3", "5", "7", "10", "12", "42", "100", "2024", "1.234,56"];
const DATES: &[&str] = &["05/05/2024", "12/10/2023", "1/1/2020", "3-6-2019"];

/// Clitic verb forms with their lemmas; none are in the lexicon, so the
/// lemma must come through decomposition. Split between train and
/// test-only so the tagger also meets unseen clitic shapes.
const TRAIN_CLITICS: &[(&str, &str)] = &[
    ("vederlo", "vedere"),
    ("mangiarla", "mangiare"),
    ("leggerli", "leggere"),
    ("prenderlo", "prendere"),
    ("portarglielo", "portare"),
    ("comprarle", "comprare"),
];
const TEST_CLITICS: &[(&str, &str)] = &[
    ("scriverle", "scrivere"),
    ("darglielo", "dare"),
    ("portarcene", "portare"),
];

const CCONJS: &[&str] = &["e", "ma", "o"];

struct Gen {
    rng: SplitMix64,
    test_mode: bool,
}

impl Gen {
    fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.rng.next_below(items.len())]
    }

    fn chance(&mut self, percent: usize) -> bool {
        self.rng.next_below(100) < percent
    }

    fn noun(&mut self) -> Noun {
        if self.test_mode && self.chance(12) {
            self.pick(TEST_NOUNS).0
        } else {
            *self.pick(NOUNS)
        }
    }

    fn adj(&mut self) -> Adj {
        if self.test_mode && self.chance(15) {
            self.pick(TEST_ADJS).0
        } else {
            *self.pick(ADJS)
        }
    }

    fn adv(&mut self) -> &'static str {
        if self.test_mode && self.chance(15) {
            self.pick(TEST_ADVS)
        } else {
            self.pick(ADVS)
        }
    }

    fn clitic(&mut self) -> (&'static str, &'static str) {
        if self.test_mode && self.chance(40) {
            *self.pick(TEST_CLITICS)
        } else {
            *self.pick(TRAIN_CLITICS)
        }
    }

    /// Determiner agreeing with (gender, plural): (form, lemma).
    fn determiner(&mut self, gender: char, plural: bool) -> (&'static str, &'static str) {
        let roll = self.rng.next_below(10);
        match (gender, plural) {
            ('m', false) => {
                if roll < 6 {
                    ("il", "il")
                } else if roll < 8 {
                    ("un", "un")
                } else {
                    ("questo", "questo")
                }
            }
            ('f', false) => {
                if roll < 6 {
                    ("la", "la")
                } else if roll < 8 {
                    ("una", "una")
                } else {
                    ("questa", "questo")
                }
            }
            ('m', true) => {
                if roll < 7 {
                    ("i", "i")
                } else {
                    ("questi", "questo")
                }
            }
            _ => {
                if roll < 7 {
                    ("le", "le")
                } else {
                    ("queste", "questo")
                }
            }
        }
    }

    /// Determiner + noun, choosing number: returns tokens plus (gender,
    /// plural) for later agreement.
    fn noun_phrase(&mut self, out: &mut Vec<Tok>) -> (char, bool) {
        let (sing, plur, gender) = self.noun();
        let plural = self.chance(30);
        let (det, det_lemma) = self.determiner(gender, plural);
        out.push(tok(det, "DET", det_lemma));
        out.push(tok(if plural { plur } else { sing }, "NOUN", sing));
        (gender, plural)
    }

    fn verb_3(&mut self, plural: bool, transitive_only: bool) -> Tok {
        loop {
            let (inf, s3, p3, _, _, trans) = *self.pick(VERBS);
            if transitive_only && !trans {
                continue;
            }
            return tok(if plural { p3 } else { s3 }, "VERB", inf);
        }
    }

    fn terminator(&mut self) -> Tok {
        let roll = self.rng.next_below(100);
        let t = if roll < 82 {
            "."
        } else if roll < 90 {
            "!"
        } else if roll < 97 {
            "?"
        } else {
            "…"
        };
        tok(t, "PUNCT", t)
    }

    fn adj_form(&self, adj: Adj, gender: char, plural: bool) -> (&'static str, &'static str) {
        let (ms, fs, mp, fp) = adj;
        let form = match (gender, plural) {
            ('m', false) => ms,
            ('f', false) => fs,
            ('m', true) => mp,
            _ => fp,
        };
        (form, ms)
    }

    fn sentence(&mut self) -> Vec<Tok> {
        let mut out = Vec::with_capacity(10);
        let template = self.rng.next_below(100);
        match template {
            0..=11 => {
                // Il cane dorme (bene).
                let (_, plural) = self.noun_phrase(&mut out);
                out.push(self.verb_3(plural, false));
                if self.chance(40) {
                    let a = self.adv();
                    out.push(tok(a, "ADV", a));
                }
            }
            12..=21 => {
                // Il gatto nero dorme.
                let (gender, plural) = self.noun_phrase(&mut out);
                let adj = self.adj();
                let (form, lemma) = self.adj_form(adj, gender, plural);
                out.push(tok(form, "ADJ", lemma));
                out.push(self.verb_3(plural, false));
            }
            22..=33 => {
                // Il ragazzo legge il libro.
                let (_, plural) = self.noun_phrase(&mut out);
                out.push(self.verb_3(plural, true));
                self.noun_phrase(&mut out);
            }
            34..=41 => {
                // Maria compra una mela.
                let person = *self.pick(PERSONS);
                out.push(tok(person, "PROPN", person));
                out.push(self.verb_3(false, true));
                self.noun_phrase(&mut out);
            }
            42..=47 => {
                // Luca parte per Roma.
                let person = *self.pick(PERSONS);
                out.push(tok(person, "PROPN", person));
                out.push(self.verb_3(false, false));
                let prep = *self.pick(PLACE_PREPS);
                out.push(tok(prep, "ADP", prep));
                let place = *self.pick(PLACES);
                out.push(tok(place, "PROPN", place));
            }
            48..=53 => {
                // La ragazza parla con il maestro.
                let (_, plural) = self.noun_phrase(&mut out);
                out.push(self.verb_3(plural, false));
                let prep = *self.pick(PREPS);
                out.push(tok(prep, "ADP", prep));
                self.noun_phrase(&mut out);
            }
            54..=60 => {
                // La bambina è arrivata. / Il nonno ha mangiato.
                let (gender, plural) = self.noun_phrase(&mut out);
                let (_, _, _, part, essere, _) = *self.pick(VERBS);
                let aux = if essere {
                    if plural { ("sono", "essere") } else { ("è", "essere") }
                } else if plural {
                    ("hanno", "avere")
                } else {
                    ("ha", "avere")
                };
                out.push(tok(aux.0, "AUX", aux.1));
                let lemma = part.to_string();
                let form = if essere {
                    let stem = &part[..part.len() - 1];
                    let ending = match (gender, plural) {
                        ('m', false) => "o",
                        ('f', false) => "a",
                        ('m', true) => "i",
                        _ => "e",
                    };
                    format!("{stem}{ending}")
                } else {
                    part.to_string()
                };
                out.push(Tok {
                    form,
                    upos: "VERB",
                    lemma,
                });
            }
            61..=64 => {
                // Maria e Luca parlano.
                let a = *self.pick(PERSONS);
                let b = *self.pick(PERSONS);
                let c = *self.pick(CCONJS);
                out.push(tok(a, "PROPN", a));
                out.push(tok(c, "CCONJ", c));
                out.push(tok(b, "PROPN", b));
                out.push(self.verb_3(true, false));
            }
            65..=68 => {
                // Oggi arriva il professore.
                let a = self.adv();
                out.push(tok(a, "ADV", a));
                out.push(self.verb_3(false, false));
                self.noun_phrase(&mut out);
            }
            69..=72 => {
                // Maria dice che il cane dorme.
                let person = *self.pick(PERSONS);
                out.push(tok(person, "PROPN", person));
                let (form, lemma) = *self.pick(SAY_VERBS);
                out.push(tok(form, "VERB", lemma));
                out.push(tok("che", "SCONJ", "che"));
                let (_, plural) = self.noun_phrase(&mut out);
                out.push(self.verb_3(plural, false));
            }
            73..=76 => {
                // Due cani dormono. / Maria compra 3 mele.
                if self.chance(50) {
                    let n = *self.pick(NUM_WORDS);
                    out.push(tok(n, "NUM", n));
                    let (_, plur, _) = self.noun();
                    out.push(tok(plur, "NOUN", self.last_noun_lemma(plur)));
                    out.push(self.verb_3(true, false));
                } else {
                    let person = *self.pick(PERSONS);
                    out.push(tok(person, "PROPN", person));
                    out.push(self.verb_3(false, true));
                    let d = *self.pick(DIGITS);
                    out.push(tok(d, "NUM", d));
                    let (_, plur, _) = self.noun();
                    out.push(tok(plur, "NOUN", self.last_noun_lemma(plur)));
                }
            }
            77..=79 => {
                // Il dott. Rossi arriva (a Milano).
                let (title, lemma, gender) = *self.pick(TITLES);
                out.push(tok(if gender == 'm' { "il" } else { "la" }, "DET", if gender == 'm' { "il" } else { "la" }));
                out.push(tok(title, "NOUN", lemma));
                let surname = *self.pick(SURNAMES);
                out.push(tok(surname, "PROPN", surname));
                out.push(self.verb_3(false, false));
                if self.chance(40) {
                    let prep = *self.pick(PLACE_PREPS);
                    out.push(tok(prep, "ADP", prep));
                    let place = *self.pick(PLACES);
                    out.push(tok(place, "PROPN", place));
                }
            }
            80..=83 => {
                // Maria vuole vederlo.
                let person = *self.pick(PERSONS);
                out.push(tok(person, "PROPN", person));
                let (form, lemma) = *self.pick(MODALS);
                out.push(tok(form, "VERB", lemma));
                let (clitic, clitic_lemma) = self.clitic();
                out.push(tok(clitic, "VERB", clitic_lemma));
            }
            84..=86 => {
                // Arriva il treno?
                out.push(self.verb_3(false, false));
                self.noun_phrase(&mut out);
                out.push(tok("?", "PUNCT", "?"));
                return self.finish(out, false);
            }
            87..=89 => {
                // Il mare è verde.
                let (gender, plural) = self.noun_phrase(&mut out);
                out.push(tok(
                    if plural { "sono" } else { "è" },
                    "AUX",
                    "essere",
                ));
                let adj = self.adj();
                let (form, lemma) = self.adj_form(adj, gender, plural);
                out.push(tok(form, "ADJ", lemma));
            }
            90..=92 => {
                // Lui dorme. / Loro partono.
                let (pron, plural) = if self.chance(60) {
                    (if self.chance(50) { "lui" } else { "lei" }, false)
                } else {
                    ("loro", true)
                };
                out.push(tok(pron, "PRON", pron));
                out.push(self.verb_3(plural, false));
                if self.chance(30) {
                    let a = self.adv();
                    out.push(tok(a, "ADV", a));
                }
            }
            93..=94 => {
                // Maria compra il latte. / Maria vende le latte.
                let person = *self.pick(PERSONS);
                out.push(tok(person, "PROPN", person));
                let (vf, vl) = if self.chance(50) {
                    ("compra", "comprare")
                } else {
                    ("vende", "vendere")
                };
                out.push(tok(vf, "VERB", vl));
                match self.rng.next_below(3) {
                    0 => {
                        out.push(tok("il", "DET", "il"));
                        out.push(tok("latte", "NOUN", "latte"));
                    }
                    1 => {
                        out.push(tok("le", "DET", "le"));
                        out.push(tok("latte", "NOUN", "latta"));
                    }
                    _ => {
                        out.push(tok("la", "DET", "la"));
                        out.push(tok("latta", "NOUN", "latta"));
                    }
                }
            }
            95..=96 => {
                // Quando il treno arriva , la ragazza parte.
                let sc = if self.chance(50) { "quando" } else { "se" };
                out.push(tok(sc, "SCONJ", sc));
                let (_, plural) = self.noun_phrase(&mut out);
                out.push(self.verb_3(plural, false));
                out.push(tok(",", "PUNCT", ","));
                let (_, plural2) = self.noun_phrase(&mut out);
                out.push(self.verb_3(plural2, false));
            }
            97 => {
                // Portamene due!
                let (form, lemma) = if self.test_mode && self.chance(50) {
                    ("Portacene", "portare")
                } else {
                    ("Portamene", "portare")
                };
                out.push(tok(form, "VERB", lemma));
                let n = *self.pick(NUM_WORDS);
                out.push(tok(n, "NUM", n));
                out.push(tok("!", "PUNCT", "!"));
                return self.finish(out, false);
            }
            98 => {
                // Il treno parte il 05/05/2024.
                self.noun_phrase(&mut out);
                out.push(self.verb_3(false, false));
                out.push(tok("il", "DET", "il"));
                let d = *self.pick(DATES);
                out.push(tok(d, "NUM", d));
            }
            _ => {
                // Il libro di Maria è nuovo.
                let (gender, plural) = self.noun_phrase(&mut out);
                out.push(tok("di", "ADP", "di"));
                let person = *self.pick(PERSONS);
                out.push(tok(person, "PROPN", person));
                out.push(tok(
                    if plural { "sono" } else { "è" },
                    "AUX",
                    "essere",
                ));
                let adj = self.adj();
                let (form, lemma) = self.adj_form(adj, gender, plural);
                out.push(tok(form, "ADJ", lemma));
            }
        }
        self.finish(out, true)
    }

    fn last_noun_lemma(&self, plural_form: &str) -> String {
        for (sing, plur, _) in NOUNS {
            if *plur == plural_form {
                return sing.to_string();
            }
        }
        for ((sing, plur, _), _) in TEST_NOUNS {
            if *plur == plural_form {
                return sing.to_string();
            }
        }
        plural_form.to_string()
    }

    fn finish(&mut self, mut out: Vec<Tok>, add_terminator: bool) -> Vec<Tok> {
        if add_terminator {
            let t = self.terminator();
            out.push(t);
        }
        // Capitalize the sentence-initial token; lemmas stay as given.
        if let Some(first) = out.first_mut() {
            let mut chars = first.form.chars();
            if let Some(c) = chars.next() {
                first.form = c.to_uppercase().collect::<String>() + chars.as_str();
            }
        }
        out
    }
}

fn render_split(g: &mut Gen, id_prefix: &str, sentences: usize) -> String {
    let mut out = String::new();
    for i in 0..sentences {
        let toks = g.sentence();
        out.push_str(&format!("# sent_id = {id_prefix}-{:05}\n", i + 1));
        for (j, t) in toks.iter().enumerate() {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t_\t_\t_\t_\t_\t_\n",
                j + 1,
                t.form,
                t.lemma,
                t.upos
            ));
        }
        out.push('\n');
    }
    out
}

/// Generates the corpus splits and the covering lexicon. `seed` fixes
/// everything; train/dev use the core vocabulary, the test split mixes in
/// the held-out words.
pub fn mini_italian_corpus(seed: u64, train: usize, dev: usize, test: usize) -> MiniCorpus {
    let mut train_gen = Gen {
        rng: SplitMix64::new(seed),
        test_mode: false,
    };
    let train_conllu = render_split(&mut train_gen, "train", train);
    let mut dev_gen = Gen {
        rng: SplitMix64::new(seed.wrapping_add(1)),
        test_mode: false,
    };
    let dev_conllu = render_split(&mut dev_gen, "dev", dev);
    let mut test_gen = Gen {
        rng: SplitMix64::new(seed.wrapping_add(2)),
        test_mode: true,
    };
    let test_conllu = render_split(&mut test_gen, "test", test);

    MiniCorpus {
        train_conllu,
        dev_conllu,
        test_conllu,
        lexicon_tsv: lexicon_tsv(),
    }
}

/// The Morph-it style lexicon covering the generator vocabulary (minus
/// the deliberately uncovered test-only words).
pub fn lexicon_tsv() -> String {
    let mut out = String::new();
    let mut noun = |sing: &str, plur: &str, gender: char, lemma: &str| {
        let g = if gender == 'm' { 'M' } else { 'F' };
        out.push_str(&format!("{sing}\t{lemma}\tNOUN-{g}:s\n"));
        out.push_str(&format!("{plur}\t{lemma}\tNOUN-{g}:p\n"));
    };
    for (sing, plur, gender) in NOUNS {
        noun(sing, plur, *gender, sing);
    }
    for ((sing, plur, gender), covered) in TEST_NOUNS {
        if *covered {
            noun(sing, plur, *gender, sing);
        }
    }
    // The paper's ambiguity pair: "latte" is both milk (m.sg) and the
    // plural of "latta" (metal sheet).
    out.push_str("latte\tlatte\tNOUN-M:s\n");
    out.push_str("latte\tlatta\tNOUN-F:p\n");
    out.push_str("latta\tlatta\tNOUN-F:s\n");

    for (inf, s3, p3, part, _, _) in VERBS {
        out.push_str(&format!("{inf}\t{inf}\tVER:inf+pres\n"));
        out.push_str(&format!("{s3}\t{inf}\tVER:ind+pres+3+s\n"));
        out.push_str(&format!("{p3}\t{inf}\tVER:ind+pres+3+p\n"));
        let stem = &part[..part.len() - 1];
        for (ending, fg) in [("o", "m+s"), ("a", "f+s"), ("i", "m+p"), ("e", "f+p")] {
            out.push_str(&format!("{stem}{ending}\t{inf}\tVER:part+past+{fg}\n"));
        }
    }
    for (form, lemma) in SAY_VERBS {
        out.push_str(&format!("{form}\t{lemma}\tVER:ind+pres+3+s\n"));
        out.push_str(&format!("{lemma}\t{lemma}\tVER:inf+pres\n"));
    }
    for (form, lemma) in MODALS {
        out.push_str(&format!("{form}\t{lemma}\tVER:ind+pres+3+s\n"));
        out.push_str(&format!("{lemma}\t{lemma}\tVER:inf+pres\n"));
    }
    out.push_str("è\tessere\tVER:ind+pres+3+s\n");
    out.push_str("sono\tessere\tVER:ind+pres+3+p\n");
    out.push_str("ha\tavere\tVER:ind+pres+3+s\n");
    out.push_str("hanno\tavere\tVER:ind+pres+3+p\n");
    out.push_str("essere\tessere\tVER:inf+pres\n");
    out.push_str("avere\tavere\tVER:inf+pres\n");

    let mut adj = |a: &Adj| {
        let (ms, fs, mp, fp) = *a;
        out.push_str(&format!("{ms}\t{ms}\tADJ:pos+m+s\n"));
        out.push_str(&format!("{fs}\t{ms}\tADJ:pos+f+s\n"));
        out.push_str(&format!("{mp}\t{ms}\tADJ:pos+m+p\n"));
        out.push_str(&format!("{fp}\t{ms}\tADJ:pos+f+p\n"));
    };
    for a in ADJS {
        adj(a);
    }
    for (a, covered) in TEST_ADJS {
        if *covered {
            adj(a);
        }
    }

    for a in ADVS {
        out.push_str(&format!("{a}\t{a}\tADV\n"));
    }

    for (art, g, n) in [
        ("il", 'M', 's'),
        ("lo", 'M', 's'),
        ("la", 'F', 's'),
        ("i", 'M', 'p'),
        ("gli", 'M', 'p'),
        ("le", 'F', 'p'),
        ("un", 'M', 's'),
        ("uno", 'M', 's'),
        ("una", 'F', 's'),
    ] {
        out.push_str(&format!("{art}\t{art}\tART-{g}:{n}\n"));
    }
    for (form, fg) in [
        ("questo", "m+s"),
        ("questa", "f+s"),
        ("questi", "m+p"),
        ("queste", "f+p"),
    ] {
        out.push_str(&format!("{form}\tquesto\tDET-DEMO:{fg}\n"));
    }

    for p in PREPS {
        out.push_str(&format!("{p}\t{p}\tPRE\n"));
    }
    for p in ["a", "da", "di", "in", "su"] {
        out.push_str(&format!("{p}\t{p}\tPRE\n"));
    }
    for c in CCONJS {
        out.push_str(&format!("{c}\t{c}\tCON\n"));
    }
    for c in ["che", "quando", "se", "perché"] {
        out.push_str(&format!("{c}\t{c}\tCON\n"));
    }
    for p in ["lui", "lei", "loro", "io", "tu", "noi", "voi"] {
        out.push_str(&format!("{p}\t{p}\tPRO-PERS\n"));
    }
    for n in NUM_WORDS {
        out.push_str(&format!("{n}\t{n}\tNUM\n"));
    }
    for (title, lemma, gender) in TITLES {
        let g = if *gender == 'm' { 'M' } else { 'F' };
        out.push_str(&format!("{title}\t{lemma}\tNOUN-{g}:s\n"));
    }
    out
}

/// Plain-text corpus with natural spacing (punctuation attached to the
/// previous word, one sentence per line) of at least `min_tokens` tokens.
pub fn throughput_text(seed: u64, min_tokens: usize) -> String {
    let mut g = Gen {
        rng: SplitMix64::new(seed),
        test_mode: false,
    };
    let mut out = String::new();
    let mut tokens = 0usize;
    while tokens < min_tokens {
        let toks = g.sentence();
        let mut line = String::new();
        for (i, t) in toks.iter().enumerate() {
            let attach = matches!(t.form.as_str(), "." | "," | "!" | "?" | "…" | ";" | ":");
            if i > 0 && !attach {
                line.push(' ');
            }
            line.push_str(&t.form);
        }
        tokens += toks.len();
        out.push_str(&line);
        out.push('\n');
    }
    out
}
