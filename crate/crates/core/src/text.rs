//! Language-agnostic tokenization and per-message surface counts.
//!
//! No stemming, stopword filtering, lemmatization or transliteration is
//! applied: the corpus mixes several scripts, often inside one message, so
//! every rule here is defined purely over Unicode general categories.

use serde::{Deserialize, Serialize};
use unicode_general_category::{get_general_category, GeneralCategory as Gc};

/// Characters that close a sentence. Includes the Devanagari danda.
const SENTENCE_TERMINATORS: [char; 5] = ['.', '!', '?', '…', '।'];

fn is_letter(c: char) -> bool {
    matches!(
        get_general_category(c),
        Gc::UppercaseLetter
            | Gc::LowercaseLetter
            | Gc::TitlecaseLetter
            | Gc::ModifierLetter
            | Gc::OtherLetter
    )
}

fn is_mark(c: char) -> bool {
    matches!(
        get_general_category(c),
        Gc::NonspacingMark | Gc::SpacingMark | Gc::EnclosingMark
    )
}

fn is_digit(c: char) -> bool {
    get_general_category(c) == Gc::DecimalNumber
}

fn is_punctuation(c: char) -> bool {
    matches!(
        get_general_category(c),
        Gc::ConnectorPunctuation
            | Gc::DashPunctuation
            | Gc::OpenPunctuation
            | Gc::ClosePunctuation
            | Gc::InitialPunctuation
            | Gc::FinalPunctuation
            | Gc::OtherPunctuation
    )
}

fn is_symbol(c: char) -> bool {
    matches!(
        get_general_category(c),
        Gc::MathSymbol | Gc::CurrencySymbol | Gc::ModifierSymbol | Gc::OtherSymbol
    )
}

/// Letters, combining marks and decimal digits make up word tokens.
pub fn is_word_char(c: char) -> bool {
    is_letter(c) || is_mark(c) || is_digit(c)
}

/// A scalar the surface counter treats as "unrecognizable": anything that is
/// not a letter, mark, digit, punctuation, whitespace or ASCII symbol.
pub fn is_emoji_like(c: char) -> bool {
    !(is_word_char(c) || is_punctuation(c) || c.is_whitespace() || (c.is_ascii() && is_symbol(c)))
}

/// Splits `text` into tokens.
///
/// Maximal runs of word characters form one token; every other non-whitespace
/// scalar becomes a single-character token. Whitespace only separates.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        if is_word_char(c) {
            start.get_or_insert(i);
            continue;
        }
        if let Some(s) = start.take() {
            tokens.push(text[s..i].to_string());
        }
        if !c.is_whitespace() {
            tokens.push(c.to_string());
        }
    }
    if let Some(s) = start {
        tokens.push(text[s..].to_string());
    }
    tokens
}

/// True when `token` is a word token (as opposed to a single punctuation,
/// symbol or emoji scalar).
pub fn is_word_token(token: &str) -> bool {
    token.chars().next().is_some_and(is_word_char)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceFeatures {
    pub words: usize,
    pub sentences: usize,
    pub punctuation: usize,
    pub numbers: usize,
    pub emoji: usize,
}

impl SurfaceFeatures {
    pub const WIDTH: usize = 5;

    pub fn as_array(&self) -> [f64; Self::WIDTH] {
        [
            self.words as f64,
            self.sentences as f64,
            self.punctuation as f64,
            self.numbers as f64,
            self.emoji as f64,
        ]
    }
}

/// Counts words, sentences, punctuation marks, digit runs and emoji-like
/// scalars in `text`.
///
/// A sentence is a stretch of text holding at least one character that is
/// neither whitespace nor a terminator, closed by a terminator or by the end
/// of the text. Runs of terminators (`"!!"`, `"?!"`) close a single sentence.
pub fn surface_features(text: &str) -> SurfaceFeatures {
    let mut out = SurfaceFeatures::default();
    let mut in_word = false;
    let mut in_digits = false;
    let mut sentence_open = false;

    for c in text.chars() {
        let word = is_word_char(c);
        if word && !in_word {
            out.words += 1;
        }
        in_word = word;

        let digit = is_digit(c);
        if digit && !in_digits {
            out.numbers += 1;
        }
        in_digits = digit;

        if SENTENCE_TERMINATORS.contains(&c) {
            if sentence_open {
                out.sentences += 1;
                sentence_open = false;
            }
        } else if !c.is_whitespace() {
            sentence_open = true;
        }

        if is_punctuation(c) {
            out.punctuation += 1;
        }
        if is_emoji_like(c) {
            out.emoji += 1;
        }
    }
    if sentence_open {
        out.sentences += 1;
    }
    out
}

/// What a document's "strings" are for vocabulary building.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "unit", rename_all = "snake_case")]
pub enum FeatureUnit {
    /// Tokenizer output.
    #[default]
    Token,
    /// Character n-grams over the text with whitespace runs collapsed to a
    /// single space, for every `n` in `min..=max`.
    CharNgram { min: usize, max: usize },
}

impl FeatureUnit {
    pub const DEFAULT_CHAR_NGRAM: FeatureUnit = FeatureUnit::CharNgram { min: 2, max: 5 };

    pub fn terms(&self, text: &str) -> Vec<String> {
        match *self {
            FeatureUnit::Token => tokenize(text),
            FeatureUnit::CharNgram { min, max } => char_ngrams(text, min, max),
        }
    }
}

impl std::str::FromStr for FeatureUnit {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "token" => Ok(FeatureUnit::Token),
            "char-ngram" | "char_ngram" => Ok(FeatureUnit::DEFAULT_CHAR_NGRAM),
            other => Err(crate::Error::InvalidArgument(format!(
                "feature unit {other:?} (expected token or char-ngram)"
            ))),
        }
    }
}

impl std::fmt::Display for FeatureUnit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FeatureUnit::Token => f.pad("token"),
            FeatureUnit::CharNgram { .. } => f.pad("char-ngram"),
        }
    }
}

fn char_ngrams(text: &str, min: usize, max: usize) -> Vec<String> {
    let chars: Vec<char> = text
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .chars()
        .collect();
    let mut grams = Vec::new();
    for n in min.max(1)..=max {
        if n > chars.len() {
            break;
        }
        grams.extend(chars.windows(n).map(|w| w.iter().collect::<String>()));
    }
    grams
}

/// A message reduced to its feature strings plus its surface counts.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenizedDoc {
    pub id: String,
    /// Feature strings in text order. Tokenizer output for
    /// [`FeatureUnit::Token`], n-grams otherwise.
    pub tokens: Vec<String>,
    pub surface: SurfaceFeatures,
}

impl TokenizedDoc {
    pub fn new(id: impl Into<String>, text: &str) -> Self {
        Self::with_unit(id, text, FeatureUnit::Token)
    }

    pub fn with_unit(id: impl Into<String>, text: &str, unit: FeatureUnit) -> Self {
        TokenizedDoc {
            id: id.into(),
            tokens: unit.terms(text),
            surface: surface_features(text),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s)
    }

    #[test]
    fn tokenize_examples() {
        assert!(toks("").is_empty());
        assert_eq!(toks("Hello, world!!"), ["Hello", ",", "world", "!", "!"]);
        assert_eq!(toks("abc123 #tag"), ["abc123", "#", "tag"]);
    }

    #[test]
    fn devanagari_marks_stay_inside_words() {
        // "हिंदी" carries a vowel sign and an anusvara; both are marks.
        assert_eq!(toks("हिंदी भाषा।"), ["हिंदी", "भाषा", "।"]);
    }

    #[test]
    fn emoji_are_single_tokens() {
        assert_eq!(toks("ok🐶🐶"), ["ok", "🐶", "🐶"]);
    }

    #[test]
    fn surface_examples() {
        assert_eq!(surface_features(""), SurfaceFeatures::default());
        let s = surface_features("I won 2 games. Really!");
        assert_eq!(
            s,
            SurfaceFeatures {
                words: 5,
                sentences: 2,
                punctuation: 2,
                numbers: 1,
                emoji: 0
            }
        );
        let s = surface_features("ok 🐶🐶");
        assert_eq!(s.emoji, 2);
        assert_eq!(s.words, 1);
    }

    #[test]
    fn terminator_runs_close_one_sentence() {
        assert_eq!(surface_features("Hello!!").sentences, 1);
        assert_eq!(surface_features("?!").sentences, 0);
        assert_eq!(surface_features("   ").sentences, 0);
        assert_eq!(surface_features("एक। दो").sentences, 2);
    }

    #[test]
    fn ascii_symbols_are_not_emoji() {
        assert_eq!(surface_features("a + b = $5 ^ ~").emoji, 0);
        assert_eq!(surface_features("₹ ∑").emoji, 2);
    }

    #[test]
    fn char_ngrams_collapse_whitespace() {
        let unit = FeatureUnit::CharNgram { min: 2, max: 3 };
        assert_eq!(unit.terms("ab  c"), ["ab", "b ", " c", "ab ", "b c"]);
        assert!(unit.terms("a").is_empty());
    }

    proptest! {
        #[test]
        fn tokens_reconstruct_non_whitespace(s in "\\PC{0,40}") {
            let joined: String = tokenize(&s).concat();
            let expected: String = s.chars().filter(|c| !c.is_whitespace()).collect();
            prop_assert_eq!(joined, expected);
        }

        #[test]
        fn no_empty_tokens_and_words_are_stable(s in "\\PC{0,40}") {
            for t in tokenize(&s) {
                prop_assert!(!t.is_empty());
                if is_word_token(&t) {
                    prop_assert_eq!(tokenize(&t), vec![t.clone()]);
                }
            }
        }

        #[test]
        fn word_counts_add(a in "\\PC{0,30}", b in "\\PC{0,30}") {
            let joined = format!("{a} {b}");
            prop_assert_eq!(
                surface_features(&joined).words,
                surface_features(&a).words + surface_features(&b).words
            );
        }

        #[test]
        fn word_count_matches_tokenizer(s in "\\PC{0,40}") {
            let n = tokenize(&s).iter().filter(|t| is_word_token(t)).count();
            prop_assert_eq!(surface_features(&s).words, n);
        }
    }
}
