//! Bilingual lexicon: one store per language, keyed by normalized surface
//! form plus part-of-speech tag.
//!
//! Each entry records how many senses the (surface, pos) pair carries.
//! Entries with exactly one sense also carry their translation inline;
//! words with more senses are resolved later against a context ontology,
//! so their rows leave the translation column empty.
//!
//! File format (`lexicon.<lang>.tsv`), tab-separated, `#` comments:
//!
//! ```text
//! surface<TAB>language<TAB>pos<TAB>sense_count<TAB>single_translation
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::text::{normalize, LanguageTag};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LexiconError {
    #[error("cannot read lexicon file {path}: {reason}")]
    FileUnreadable { path: String, reason: String },
    #[error("{path}:{line}: {message}")]
    Format {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: duplicate entry for ({surface}, {pos})")]
    DuplicateEntry {
        path: String,
        line: usize,
        surface: String,
        pos: String,
    },
    #[error("{path}:{line}: entry ({surface}, {pos}) violates the sense-count invariant: {message}")]
    InvariantViolation {
        path: String,
        line: usize,
        surface: String,
        pos: String,
        message: String,
    },
    #[error("{path}:{line}: expected {expected} entries, found {found}")]
    LanguageMismatch {
        path: String,
        line: usize,
        expected: LanguageTag,
        found: LanguageTag,
    },
    #[error("word not in {language} lexicon: {word}")]
    WordUnknown { language: LanguageTag, word: String },
    #[error("'{word}' ({pos}) carries {senses} senses; it must be resolved through an ontology")]
    NotSingleMeaning {
        word: String,
        pos: String,
        senses: u32,
    },
}

/// One (surface, pos) row of a lexicon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub surface: String,
    pub language: LanguageTag,
    pub pos: String,
    pub sense_count: u32,
    /// Present exactly when `sense_count == 1`.
    pub single_translation: Option<String>,
}

/// All entries of one language, with deterministic iteration order.
#[derive(Debug, Clone)]
pub struct Lexicon {
    language: LanguageTag,
    entries: BTreeMap<(String, String), LexiconEntry>,
}

impl Lexicon {
    pub fn new(language: LanguageTag) -> Lexicon {
        Lexicon {
            language,
            entries: BTreeMap::new(),
        }
    }

    /// Load a lexicon file, enforcing the format and the invariant that a
    /// row carries a translation exactly when its sense count is one.
    pub fn load(path: &Path, language: LanguageTag) -> Result<Lexicon, LexiconError> {
        let display = path.display().to_string();
        let body = fs::read_to_string(path).map_err(|e| LexiconError::FileUnreadable {
            path: display.clone(),
            reason: e.to_string(),
        })?;
        let mut lexicon = Lexicon::new(language);
        for (idx, raw) in body.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim_end_matches(['\r', '\n']);
            if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            if fields.len() != 4 && fields.len() != 5 {
                return Err(LexiconError::Format {
                    path: display,
                    line,
                    message: format!("expected 4 or 5 tab-separated fields, found {}", fields.len()),
                });
            }
            let found = LanguageTag::from_code(fields[1]).ok_or_else(|| LexiconError::Format {
                path: display.clone(),
                line,
                message: format!("unknown language code '{}'", fields[1]),
            })?;
            if found != language {
                return Err(LexiconError::LanguageMismatch {
                    path: display,
                    line,
                    expected: language,
                    found,
                });
            }
            let sense_count: u32 = fields[3].trim().parse().map_err(|_| LexiconError::Format {
                path: display.clone(),
                line,
                message: format!("sense count '{}' is not a positive integer", fields[3]),
            })?;
            let translation = fields.get(4).map(|s| s.trim()).filter(|s| !s.is_empty());
            let entry = LexiconEntry {
                surface: normalize(fields[0].trim()),
                language,
                pos: fields[2].trim().to_string(),
                sense_count,
                single_translation: translation.map(str::to_string),
            };
            if entry.surface.is_empty() || entry.pos.is_empty() {
                return Err(LexiconError::Format {
                    path: display,
                    line,
                    message: "surface form and pos tag must be non-empty".to_string(),
                });
            }
            lexicon.insert(entry).map_err(|e| match e {
                InsertError::Duplicate { surface, pos } => LexiconError::DuplicateEntry {
                    path: display.clone(),
                    line,
                    surface,
                    pos,
                },
                InsertError::Invariant {
                    surface,
                    pos,
                    message,
                } => LexiconError::InvariantViolation {
                    path: display.clone(),
                    line,
                    surface,
                    pos,
                    message,
                },
            })?;
        }
        if lexicon.is_empty() {
            log::warn!("lexicon {display} has no entries");
        }
        Ok(lexicon)
    }

    /// Insert an entry, rejecting duplicates and invariant violations.
    pub fn insert(&mut self, entry: LexiconEntry) -> Result<(), InsertError> {
        if entry.sense_count == 0 {
            return Err(InsertError::Invariant {
                surface: entry.surface,
                pos: entry.pos,
                message: "sense count must be at least 1".to_string(),
            });
        }
        if entry.sense_count == 1 && entry.single_translation.is_none() {
            return Err(InsertError::Invariant {
                surface: entry.surface,
                pos: entry.pos,
                message: "single-sense entries must carry a translation".to_string(),
            });
        }
        if entry.sense_count > 1 && entry.single_translation.is_some() {
            return Err(InsertError::Invariant {
                surface: entry.surface,
                pos: entry.pos,
                message: "multi-sense entries must leave the translation column empty".to_string(),
            });
        }
        let key = (entry.surface.clone(), entry.pos.clone());
        if self.entries.contains_key(&key) {
            return Err(InsertError::Duplicate {
                surface: entry.surface,
                pos: entry.pos,
            });
        }
        self.entries.insert(key, entry);
        Ok(())
    }

    pub fn language(&self) -> LanguageTag {
        self.language
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.values()
    }

    pub fn entry(&self, word: &str, pos: &str) -> Option<&LexiconEntry> {
        self.entries.get(&(normalize(word), pos.to_string()))
    }

    /// True when the word appears under any part of speech.
    pub fn contains_word(&self, word: &str) -> bool {
        let w = normalize(word);
        self.entries.keys().any(|(surface, _)| *surface == w)
    }

    /// Word-level sense count: the maximum over the word's pos entries.
    pub fn sense_count(&self, word: &str) -> Result<u32, LexiconError> {
        let w = normalize(word);
        self.entries
            .iter()
            .filter(|((surface, _), _)| *surface == w)
            .map(|(_, e)| e.sense_count)
            .max()
            .ok_or_else(|| LexiconError::WordUnknown {
                language: self.language,
                word: w,
            })
    }

    /// Sense count of one (word, pos) pair, if present.
    pub fn pos_sense_count(&self, word: &str, pos: &str) -> Option<u32> {
        self.entry(word, pos).map(|e| e.sense_count)
    }

    /// Translation of a single-sense (word, pos) pair.
    pub fn single_meaning_lookup(&self, word: &str, pos: &str) -> Result<&str, LexiconError> {
        let entry = self.entry(word, pos).ok_or_else(|| LexiconError::WordUnknown {
            language: self.language,
            word: normalize(word),
        })?;
        match &entry.single_translation {
            Some(t) => Ok(t),
            None => Err(LexiconError::NotSingleMeaning {
                word: entry.surface.clone(),
                pos: entry.pos.clone(),
                senses: entry.sense_count,
            }),
        }
    }

    /// Tag used when building a fallback parse: the pos of the entry with
    /// the highest sense count (first in key order on ties).
    pub fn fallback_pos(&self, word: &str) -> Option<&str> {
        let w = normalize(word);
        self.entries
            .iter()
            .filter(|((surface, _), _)| *surface == w)
            .max_by(|a, b| {
                a.1.sense_count
                    .cmp(&b.1.sense_count)
                    .then_with(|| b.0 .1.cmp(&a.0 .1))
            })
            .map(|(_, e)| e.pos.as_str())
    }

    /// Serialize back to the TSV format `load` accepts.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for entry in self.entries.values() {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                entry.surface,
                entry.language.code(),
                entry.pos,
                entry.sense_count,
                entry.single_translation.as_deref().unwrap_or("")
            );
        }
        out
    }
}

/// Reasons `Lexicon::insert` can refuse an entry; the loader maps these to
/// file-positioned [`LexiconError`] values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InsertError {
    Duplicate {
        surface: String,
        pos: String,
    },
    Invariant {
        surface: String,
        pos: String,
        message: String,
    },
}
