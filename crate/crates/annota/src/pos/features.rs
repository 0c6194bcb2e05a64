//! Feature templates for the sequence tagger.
//!
//! Every feature string is prefixed by its template id (`w=`, `suf3=`,
//! `t-1=`, ...) so feature sets are comparable across runs and model
//! files. [`TEMPLATE_VERSION`] is bumped whenever the template inventory
//! changes; models record it and refuse to load under a different
//! extractor.

/// Version id of the template inventory below.
pub const TEMPLATE_VERSION: u16 = 1;

/// Padding beyond the left sentence boundary (words and tags).
pub const BOUNDARY_LEFT: &str = "<S>";
/// Padding beyond the right sentence boundary.
pub const BOUNDARY_RIGHT: &str = "</S>";

/// Word shape: uppercase → X, lowercase → x, digit → d, other characters
/// kept as-is. "E-mail" → "X-xxxx".
fn shape(word: &str) -> String {
    word.chars()
        .map(|c| {
            if c.is_uppercase() {
                'X'
            } else if c.is_lowercase() {
                'x'
            } else if c.is_numeric() {
                'd'
            } else {
                c
            }
        })
        .collect()
}

fn push(out: &mut Vec<String>, template: &str, value: &str) {
    let mut s = String::with_capacity(template.len() + value.len());
    s.push_str(template);
    s.push_str(value);
    out.push(s);
}

/// Extracts the feature strings for position `i`, given the one and two
/// previously predicted tags. Deterministic: same inputs, same list, same
/// order. Context words are lowercased; the current word also appears
/// verbatim.
pub fn extract_features(
    words: &[&str],
    i: usize,
    prev_tag: &str,
    prev_tag2: &str,
    out: &mut Vec<String>,
) {
    out.clear();
    let word = words[i];
    let chars: Vec<char> = word.chars().collect();
    let len = chars.len();

    push(out, "w=", word);
    let lower = word.to_lowercase();
    push(out, "wl=", &lower);
    for n in 1..=4usize {
        if n <= len {
            let suffix: String = chars[len - n..].iter().collect();
            push(out, &format!("suf{n}="), &suffix);
        }
    }
    for n in 1..=2usize {
        if n <= len {
            let prefix: String = chars[..n].iter().collect();
            push(out, &format!("pre{n}="), &prefix);
        }
    }
    if chars.iter().any(|c| c.is_numeric()) {
        out.push("hasDigit=1".to_string());
    }
    if chars.contains(&'-') {
        out.push("hasHyphen=1".to_string());
    }
    if chars.first().is_some_and(|c| c.is_uppercase()) {
        out.push("cap=1".to_string());
    }
    push(out, "shape=", &shape(word));
    push(out, "t-1=", prev_tag);
    push(out, "t-2=", prev_tag2);

    let context = |offset: isize| -> String {
        let pos = i as isize + offset;
        if pos < 0 {
            BOUNDARY_LEFT.to_string()
        } else if pos as usize >= words.len() {
            BOUNDARY_RIGHT.to_string()
        } else {
            words[pos as usize].to_lowercase()
        }
    };
    push(out, "w-1=", &context(-1));
    push(out, "w-2=", &context(-2));
    push(out, "w+1=", &context(1));
    push(out, "w+2=", &context(2));
}

#[cfg(test)]
mod tests {
    use super::*;

    fn features(words: &[&str], i: usize, t1: &str, t2: &str) -> Vec<String> {
        let mut out = Vec::new();
        extract_features(words, i, t1, t2, &mut out);
        out
    }

    #[test]
    fn snapshot_for_cane_after_determiner() {
        let got = features(&["Il", "cane", "dorme"], 1, "DET", "<S>");
        let expected = vec![
            "w=cane", "wl=cane", "suf1=e", "suf2=ne", "suf3=ane", "suf4=cane", "pre1=c",
            "pre2=ca", "shape=xxxx", "t-1=DET", "t-2=<S>", "w-1=il", "w-2=<S>", "w+1=dorme",
            "w+2=</S>",
        ];
        assert_eq!(got, expected);
        assert!(got.contains(&"w=cane".to_string()));
        assert!(got.contains(&"suf3=ane".to_string()));
        assert!(got.contains(&"t-1=DET".to_string()));
    }

    #[test]
    fn boundary_padding_on_single_word_sentence() {
        let got = features(&["Ciao"], 0, BOUNDARY_LEFT, BOUNDARY_LEFT);
        assert!(got.contains(&"t-1=<S>".to_string()));
        assert!(got.contains(&"w-1=<S>".to_string()));
        assert!(got.contains(&"w+1=</S>".to_string()));
    }

    #[test]
    fn hyphen_and_capitalization_flags() {
        let got = features(&["E-mail"], 0, BOUNDARY_LEFT, BOUNDARY_LEFT);
        assert!(got.contains(&"hasHyphen=1".to_string()));
        assert!(got.contains(&"cap=1".to_string()));
        assert!(got.contains(&"shape=X-xxxx".to_string()));
    }

    #[test]
    fn digits_set_the_digit_flag() {
        let got = features(&["2024"], 0, BOUNDARY_LEFT, BOUNDARY_LEFT);
        assert!(got.contains(&"hasDigit=1".to_string()));
        assert!(got.contains(&"shape=dddd".to_string()));
    }

    #[test]
    fn short_words_emit_only_fitting_affixes() {
        let got = features(&["di"], 0, BOUNDARY_LEFT, BOUNDARY_LEFT);
        assert!(got.contains(&"suf1=i".to_string()));
        assert!(got.contains(&"suf2=di".to_string()));
        assert!(!got.iter().any(|f| f.starts_with("suf3=")));
        assert!(got.contains(&"pre2=di".to_string()));
    }

    #[test]
    fn multibyte_suffixes_count_chars_not_bytes() {
        let got = features(&["però"], 0, BOUNDARY_LEFT, BOUNDARY_LEFT);
        assert!(got.contains(&"suf1=ò".to_string()));
        assert!(got.contains(&"suf2=rò".to_string()));
    }
}
