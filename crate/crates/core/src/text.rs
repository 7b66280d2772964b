//! Shared text primitives: language tags, Arabic-aware normalization,
//! tokenization, sentence segmentation, and punctuation-aware joining.
//!
//! Normalization is deliberately shallow. Tatweel and the combining short
//! vowels are presentation marks, so both sides of every lookup strip them;
//! hamza seats and alef variants are left alone because they distinguish
//! real lexicon entries.

use std::fmt;

/// The two languages the pipeline works with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LanguageTag {
    Arabic,
    English,
}

impl LanguageTag {
    /// The translation target paired with this source language.
    pub fn opposite(self) -> LanguageTag {
        match self {
            LanguageTag::Arabic => LanguageTag::English,
            LanguageTag::English => LanguageTag::Arabic,
        }
    }

    /// Two-letter code used in resource file names and CLI flags.
    pub fn code(self) -> &'static str {
        match self {
            LanguageTag::Arabic => "ar",
            LanguageTag::English => "en",
        }
    }

    pub fn from_code(code: &str) -> Option<LanguageTag> {
        match code.trim().to_ascii_lowercase().as_str() {
            "ar" | "ara" | "arabic" => Some(LanguageTag::Arabic),
            "en" | "eng" | "english" => Some(LanguageTag::English),
            _ => None,
        }
    }
}

impl fmt::Display for LanguageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            LanguageTag::Arabic => "Arabic",
            LanguageTag::English => "English",
        };
        f.write_str(name)
    }
}

/// Tatweel (kashida), a purely calligraphic stretching mark.
const TATWEEL: char = '\u{0640}';

/// True for the combining marks normalization removes: the harakat /
/// tanwin block U+064B..=U+065F plus the superscript alef U+0670.
pub fn is_arabic_mark(c: char) -> bool {
    matches!(c, '\u{064B}'..='\u{065F}' | '\u{0670}')
}

/// True for characters of the Arabic letter blocks (used for language
/// identification, not for normalization).
pub fn is_arabic_letter(c: char) -> bool {
    matches!(c,
        '\u{0621}'..='\u{063A}'
        | '\u{0641}'..='\u{064A}'
        | '\u{0671}'..='\u{06D3}'
        | '\u{0750}'..='\u{077F}')
}

/// Remove tatweel and the combining marks, leaving all other characters
/// (including hamza/alef distinctions) untouched.
pub fn strip_arabic_marks(s: &str) -> String {
    s.chars()
        .filter(|&c| c != TATWEEL && !is_arabic_mark(c))
        .collect()
}

/// Canonical lookup form of a token: marks stripped, then lowercased.
/// Lowercasing is a no-op for Arabic, mark stripping a no-op for English,
/// so one function serves both sides.
pub fn normalize(s: &str) -> String {
    strip_arabic_marks(s).to_lowercase()
}

/// Punctuation detached from word ends during tokenization.
const DETACHABLE: [char; 9] = ['.', ',', '!', '?', ';', ':', '\u{060C}', '\u{061B}', '\u{061F}'];

/// Characters that end a sentence.
const SENTENCE_FINAL: [char; 5] = ['.', '!', '?', '\u{061F}', '\u{061B}'];

/// True when every character of the token is punctuation.
pub fn is_punct_token(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| DETACHABLE.contains(&c) || c.is_ascii_punctuation())
}

/// True for part-of-speech labels that tag punctuation leaves.
pub fn is_punct_tag(tag: &str) -> bool {
    matches!(tag, "PUNC" | "EOL" | "." | "," | ":" | ";" | "``" | "''" | "-LRB-" | "-RRB-")
        || tag.chars().all(|c| c.is_ascii_punctuation())
}

/// Split on whitespace and detach trailing punctuation marks as their own
/// tokens, preserving surface order:
/// `"عامرة."` becomes `["عامرة", "."]`.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for raw in text.split_whitespace() {
        let mut tail = Vec::new();
        let mut word = raw;
        while let Some(last) = word.chars().last() {
            if DETACHABLE.contains(&last) && word.chars().count() > 1 {
                tail.push(last.to_string());
                word = &word[..word.len() - last.len_utf8()];
            } else {
                break;
            }
        }
        if !word.is_empty() {
            out.push(word.to_string());
        }
        out.extend(tail.into_iter().rev());
    }
    out
}

/// Split text into sentences on terminal punctuation, keeping the mark with
/// its sentence. Runs of terminals (`"..."`) stay in one sentence. Input
/// without any terminal yields a single sentence.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut current = String::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        current.push(c);
        if SENTENCE_FINAL.contains(&c) {
            while let Some(&next) = chars.peek() {
                if SENTENCE_FINAL.contains(&next) {
                    current.push(next);
                    chars.next();
                } else {
                    break;
                }
            }
            let trimmed = current.trim();
            if !trimmed.is_empty() {
                sentences.push(trimmed.to_string());
            }
            current.clear();
        }
    }
    let trimmed = current.trim();
    if !trimmed.is_empty() {
        sentences.push(trimmed.to_string());
    }
    sentences
}

/// Key under which a sentence is stored and looked up: normalized tokens
/// with punctuation tokens removed, joined by single spaces. Keying this
/// way lets `"وبعد الاسلام..."` hit a record whose tree carries
/// punctuation leaves the raw input lacks.
pub fn sentence_key(text: &str) -> String {
    tokenize(text)
        .iter()
        .filter(|t| !is_punct_token(t))
        .map(|t| normalize(t))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Join output chunks with spaces, attaching punctuation-only chunks
/// directly to the preceding word (`"Islam" + ","` → `"Islam,"`). Empty
/// chunks are skipped.
pub fn join_chunks<'a, I>(chunks: I) -> String
where
    I: IntoIterator<Item = &'a str>,
{
    let mut out = String::new();
    for chunk in chunks {
        if chunk.is_empty() {
            continue;
        }
        if out.is_empty() {
            out.push_str(chunk);
        } else if is_punct_token(chunk) {
            out.push_str(chunk);
        } else {
            out.push(' ');
            out.push_str(chunk);
        }
    }
    out
}
