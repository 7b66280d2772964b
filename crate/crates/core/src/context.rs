//! Language identification and context selection.
//!
//! The language of an input is read off its script: any Arabic-block
//! letter marks the text Arabic, otherwise any ASCII letter marks it
//! English. Context selection scores every registered ontology by how many
//! of the input's content-word types (stop words and punctuation excluded)
//! appear among the ontology's source-side labels, and demands a strict
//! maximum; callers can bypass scoring with an explicit override.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::ontology::OntologyRegistry;
use crate::text::{is_arabic_letter, is_punct_token, normalize, tokenize, LanguageTag};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContextError {
    #[error("input is empty")]
    EmptyInput,
    #[error("input contains no Arabic or Latin letters")]
    NoLetters,
    #[error("no registered context shares vocabulary with the input")]
    ContextUnknown,
    #[error("context is ambiguous between {}", candidates.join(", "))]
    ContextTie { candidates: Vec<String> },
    #[error("no ontology registered for context '{name}'")]
    Unregistered { name: String },
    #[error("cannot read stop-word file {path}: {reason}")]
    StopListUnreadable { path: String, reason: String },
}

/// Canonical name of a context. Matching is case-insensitive but the
/// declared spelling is preserved for display.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ContextId {
    name: String,
    key: String,
}

impl ContextId {
    pub fn new(name: &str) -> ContextId {
        let name = name.trim().to_string();
        let key = name.to_lowercase();
        ContextId { name, key }
    }

    /// The spelling the context was declared with.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Case-folded form used for matching.
    pub fn key(&self) -> &str {
        &self.key
    }
}

impl fmt::Display for ContextId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Words excluded from context scoring for one language.
#[derive(Debug, Clone, Default)]
pub struct StopList {
    words: BTreeSet<String>,
}

impl StopList {
    pub fn empty() -> StopList {
        StopList::default()
    }

    /// Load one word per line; blank lines and `#` comments are skipped.
    pub fn load(path: &Path) -> Result<StopList, ContextError> {
        let body = fs::read_to_string(path).map_err(|e| ContextError::StopListUnreadable {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        let words = body
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(normalize)
            .collect::<BTreeSet<_>>();
        if words.is_empty() {
            log::warn!("stop-word list {} is empty", path.display());
        }
        Ok(StopList { words })
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(&normalize(word))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Decide the language of a text from its script.
pub fn identify_language(text: &str) -> Result<LanguageTag, ContextError> {
    if text.trim().is_empty() {
        return Err(ContextError::EmptyInput);
    }
    if text.chars().any(is_arabic_letter) {
        return Ok(LanguageTag::Arabic);
    }
    if text.chars().any(|c| c.is_ascii_alphabetic()) {
        return Ok(LanguageTag::English);
    }
    Err(ContextError::NoLetters)
}

/// Overlap score of one context against an input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextScore {
    pub context: ContextId,
    pub overlap: usize,
}

/// Distinct normalized content-word types of a text.
fn content_types(text: &str, stops: &StopList) -> BTreeSet<String> {
    tokenize(text)
        .iter()
        .filter(|t| !is_punct_token(t))
        .map(|t| normalize(t))
        .filter(|t| !t.is_empty() && !stops.contains(t))
        .collect()
}

/// Score every registered ontology against the input: the count of input
/// content-word types appearing among the ontology's single-word labels on
/// the source-language side. Sorted best-first, ties broken by name.
pub fn score_contexts(
    text: &str,
    language: LanguageTag,
    registry: &OntologyRegistry,
    stops: &StopList,
) -> Vec<ContextScore> {
    let types = content_types(text, stops);
    let mut scores: Vec<ContextScore> = registry
        .ontologies()
        .map(|ontology| {
            let overlap = ontology
                .label_words(language)
                .filter(|label| types.contains(*label))
                .count();
            ContextScore {
                context: ontology.context().clone(),
                overlap,
            }
        })
        .collect();
    scores.sort_by(|a, b| {
        b.overlap
            .cmp(&a.overlap)
            .then_with(|| a.context.cmp(&b.context))
    });
    scores
}

/// Pick the context whose ontology shares the most vocabulary with the
/// input. A zero-overlap board is [`ContextError::ContextUnknown`]; a
/// shared maximum is [`ContextError::ContextTie`].
pub fn identify_context(
    text: &str,
    language: LanguageTag,
    registry: &OntologyRegistry,
    stops: &StopList,
) -> Result<ContextId, ContextError> {
    let scores = score_contexts(text, language, registry, stops);
    let best = scores.first().ok_or(ContextError::ContextUnknown)?;
    if best.overlap == 0 {
        return Err(ContextError::ContextUnknown);
    }
    let rivals: Vec<String> = scores
        .iter()
        .filter(|s| s.overlap == best.overlap)
        .map(|s| s.context.name().to_string())
        .collect();
    if rivals.len() > 1 {
        return Err(ContextError::ContextTie { candidates: rivals });
    }
    Ok(best.context.clone())
}

/// Resolve an explicit context override against the registry.
pub fn override_context(name: &str, registry: &OntologyRegistry) -> Result<ContextId, ContextError> {
    registry
        .get(name)
        .map(|o| o.context().clone())
        .map_err(|_| ContextError::Unregistered {
            name: name.trim().to_string(),
        })
}
