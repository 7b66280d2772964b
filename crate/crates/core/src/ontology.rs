//! Context-scoped bilingual ontologies.
//!
//! Each ontology belongs to one named context and lists concepts with
//! exactly one English and one Arabic label apiece. Within an ontology a
//! (label, pos) pair is unique per language, which is what makes the
//! resolution of a multi-sense word deterministic once a context is fixed:
//! look the pair up on the source side, return the opposite-side label
//! verbatim. Labels may span several words (`free trade`, `و بعد`); the
//! pipeline fuses matching token runs before splitting.
//!
//! File format (`ontology.<context>.txt`): a `context:<name>` header line,
//! then tab-separated concept rows, `#` comments allowed:
//!
//! ```text
//! context:Cinema
//! concept_id<TAB>pos<TAB>english_label<TAB>arabic_label
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::context::ContextId;
use crate::text::{normalize, LanguageTag};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OntologyError {
    #[error("cannot read ontology file {path}: {reason}")]
    FileUnreadable { path: String, reason: String },
    #[error("{path}:{line}: {message}")]
    Format {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: missing 'context:<name>' header line")]
    MissingHeader { path: String },
    #[error("{path}:{line}: ({label}, {pos}) already labels another {language} concept in this ontology")]
    AmbiguousConcept {
        path: String,
        line: usize,
        label: String,
        pos: String,
        language: LanguageTag,
    },
    #[error("'{word}' ({pos}) is not in the {context} ontology")]
    NotInOntology {
        word: String,
        pos: String,
        context: String,
    },
    #[error("no ontology registered for context '{name}'")]
    ContextUnregistered { name: String },
}

/// One concept: an identifier and its two labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    pub id: String,
    pub pos: String,
    pub english_label: String,
    pub arabic_label: String,
}

impl Concept {
    pub fn label(&self, language: LanguageTag) -> &str {
        match language {
            LanguageTag::Arabic => &self.arabic_label,
            LanguageTag::English => &self.english_label,
        }
    }
}

/// The ontology of a single context.
#[derive(Debug, Clone)]
pub struct ContextOntology {
    context: ContextId,
    concepts: Vec<Concept>,
    // (normalized label, pos) -> concept index, one map per language.
    english_index: BTreeMap<(String, String), usize>,
    arabic_index: BTreeMap<(String, String), usize>,
}

impl ContextOntology {
    pub fn new(context: ContextId) -> ContextOntology {
        ContextOntology {
            context,
            concepts: Vec::new(),
            english_index: BTreeMap::new(),
            arabic_index: BTreeMap::new(),
        }
    }

    pub fn load(path: &Path) -> Result<ContextOntology, OntologyError> {
        let display = path.display().to_string();
        let body = fs::read_to_string(path).map_err(|e| OntologyError::FileUnreadable {
            path: display.clone(),
            reason: e.to_string(),
        })?;
        let mut lines = body.lines().enumerate();
        let context = loop {
            match lines.next() {
                Some((_, raw)) => {
                    let trimmed = raw.trim();
                    if trimmed.is_empty() || trimmed.starts_with('#') {
                        continue;
                    }
                    match trimmed.strip_prefix("context:") {
                        Some(name) if !name.trim().is_empty() => {
                            break ContextId::new(name.trim());
                        }
                        _ => {
                            return Err(OntologyError::MissingHeader { path: display });
                        }
                    }
                }
                None => return Err(OntologyError::MissingHeader { path: display }),
            }
        };
        let mut ontology = ContextOntology::new(context);
        for (idx, raw) in lines {
            let line = idx + 1;
            let trimmed = raw.trim_end_matches(['\r', '\n']);
            if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            if fields.len() != 4 {
                return Err(OntologyError::Format {
                    path: display,
                    line,
                    message: format!("expected 4 tab-separated fields, found {}", fields.len()),
                });
            }
            let concept = Concept {
                id: fields[0].trim().to_string(),
                pos: fields[1].trim().to_string(),
                english_label: fields[2].trim().to_string(),
                arabic_label: fields[3].trim().to_string(),
            };
            if concept.id.is_empty()
                || concept.pos.is_empty()
                || concept.english_label.is_empty()
                || concept.arabic_label.is_empty()
            {
                return Err(OntologyError::Format {
                    path: display,
                    line,
                    message: "all four fields must be non-empty".to_string(),
                });
            }
            ontology.insert(concept).map_err(|(label, pos, language)| {
                OntologyError::AmbiguousConcept {
                    path: display.clone(),
                    line,
                    label,
                    pos,
                    language,
                }
            })?;
        }
        if ontology.concepts.is_empty() {
            log::warn!("ontology {display} declares no concepts");
        }
        Ok(ontology)
    }

    /// Register a concept; fails with the clashing (label, pos, language)
    /// when either side's pair is already taken.
    #[allow(clippy::result_large_err)]
    pub fn insert(&mut self, concept: Concept) -> Result<(), (String, String, LanguageTag)> {
        let en_key = (normalize(&concept.english_label), concept.pos.clone());
        let ar_key = (normalize(&concept.arabic_label), concept.pos.clone());
        if self.english_index.contains_key(&en_key) {
            return Err((concept.english_label, concept.pos, LanguageTag::English));
        }
        if self.arabic_index.contains_key(&ar_key) {
            return Err((concept.arabic_label, concept.pos, LanguageTag::Arabic));
        }
        let idx = self.concepts.len();
        self.english_index.insert(en_key, idx);
        self.arabic_index.insert(ar_key, idx);
        self.concepts.push(concept);
        Ok(())
    }

    pub fn context(&self) -> &ContextId {
        &self.context
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    fn index(&self, language: LanguageTag) -> &BTreeMap<(String, String), usize> {
        match language {
            LanguageTag::Arabic => &self.arabic_index,
            LanguageTag::English => &self.english_index,
        }
    }

    /// The concept labelled (word, pos) on the given language side.
    pub fn concept(&self, word: &str, pos: &str, language: LanguageTag) -> Option<&Concept> {
        self.index(language)
            .get(&(normalize(word), pos.to_string()))
            .map(|&i| &self.concepts[i])
    }

    /// Resolve a source-language (word, pos) pair to the opposite-side
    /// label, returned verbatim as stored.
    pub fn resolve(
        &self,
        word: &str,
        pos: &str,
        source: LanguageTag,
    ) -> Result<&str, OntologyError> {
        self.concept(word, pos, source)
            .map(|c| c.label(source.opposite()))
            .ok_or_else(|| OntologyError::NotInOntology {
                word: normalize(word),
                pos: pos.to_string(),
                context: self.context.name().to_string(),
            })
    }

    /// Source-side labels spanning more than one token, as
    /// (normalized token sequence, pos); the pipeline's fusing pass scans
    /// these longest-first.
    pub fn multiword_labels(&self, source: LanguageTag) -> Vec<(Vec<String>, String)> {
        let mut labels: Vec<(Vec<String>, String)> = self
            .index(source)
            .keys()
            .filter(|(label, _)| label.contains(' '))
            .map(|(label, pos)| {
                (
                    label.split(' ').map(str::to_string).collect(),
                    pos.clone(),
                )
            })
            .collect();
        labels.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.cmp(b)));
        labels
    }

    /// Distinct normalized single-word labels on one side, used for
    /// context scoring.
    pub fn label_words(&self, language: LanguageTag) -> impl Iterator<Item = &str> {
        self.index(language)
            .keys()
            .filter(|(label, _)| !label.contains(' '))
            .map(|(label, _)| label.as_str())
    }
}

/// All loaded ontologies, addressable by case-insensitive context name.
#[derive(Debug, Clone, Default)]
pub struct OntologyRegistry {
    by_key: BTreeMap<String, ContextOntology>,
}

impl OntologyRegistry {
    pub fn new() -> OntologyRegistry {
        OntologyRegistry::default()
    }

    pub fn register(&mut self, ontology: ContextOntology) -> Option<ContextOntology> {
        self.by_key
            .insert(ontology.context().key().to_string(), ontology)
    }

    pub fn get(&self, name: &str) -> Result<&ContextOntology, OntologyError> {
        let wanted = ContextId::new(name);
        self.by_key
            .get(wanted.key())
            .ok_or_else(|| OntologyError::ContextUnregistered {
                name: name.trim().to_string(),
            })
    }

    pub fn contexts(&self) -> impl Iterator<Item = &ContextId> {
        self.by_key.values().map(|o| o.context())
    }

    pub fn ontologies(&self) -> impl Iterator<Item = &ContextOntology> {
        self.by_key.values()
    }

    pub fn len(&self) -> usize {
        self.by_key.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_key.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn concept(id: &str, pos: &str, en: &str, ar: &str) -> Concept {
        Concept {
            id: id.to_string(),
            pos: pos.to_string(),
            english_label: en.to_string(),
            arabic_label: ar.to_string(),
        }
    }

    fn cinema() -> ContextOntology {
        let mut o = ContextOntology::new(ContextId::new("Cinema"));
        o.insert(concept("theater", "NN", "theater", "مسرح")).unwrap();
        o.insert(concept("screen", "NN", "screen", "شاشة")).unwrap();
        o.insert(concept("where", "WRB", "where", "التي فيها")).unwrap();
        o.insert(concept("show", "NN", "show", "عرض")).unwrap();
        o
    }

    #[test]
    fn resolves_both_directions() {
        let o = cinema();
        assert_eq!(o.resolve("theater", "NN", LanguageTag::English).unwrap(), "مسرح");
        assert_eq!(o.resolve("مسرح", "NN", LanguageTag::Arabic).unwrap(), "theater");
        assert_eq!(o.resolve("عرض", "NN", LanguageTag::Arabic).unwrap(), "show");
    }

    #[test]
    fn lookup_normalizes_the_query() {
        let o = cinema();
        assert_eq!(o.resolve("Theater", "NN", LanguageTag::English).unwrap(), "مسرح");
        // A fatha on the stored form must not block the match either.
        assert_eq!(o.resolve("مَسرح", "NN", LanguageTag::Arabic).unwrap(), "theater");
    }

    #[test]
    fn missing_pair_reports_word_pos_and_context() {
        let err = cinema()
            .resolve("point", "NN", LanguageTag::English)
            .unwrap_err();
        match err {
            OntologyError::NotInOntology { word, pos, context } => {
                assert_eq!(word, "point");
                assert_eq!(pos, "NN");
                assert_eq!(context, "Cinema");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn duplicate_label_pos_is_ambiguous() {
        let mut o = cinema();
        let err = o
            .insert(concept("screen2", "NN", "screen", "حاجز"))
            .unwrap_err();
        assert_eq!(err.2, LanguageTag::English);
        // Same label under a different pos is fine.
        o.insert(concept("screen_v", "VB", "screen", "يحجب")).unwrap();
    }

    #[test]
    fn duplicate_arabic_label_is_ambiguous_too() {
        let mut o = cinema();
        let err = o
            .insert(concept("stage", "NN", "stage", "مسرح"))
            .unwrap_err();
        assert_eq!(err.2, LanguageTag::Arabic);
    }

    #[test]
    fn multiword_labels_come_longest_first() {
        let mut o = ContextOntology::new(ContextId::new("T"));
        o.insert(concept("a", "NN", "free trade", "التجارة الحرة")).unwrap();
        o.insert(concept("b", "NN", "free trade area zone", "منطقة")).unwrap();
        o.insert(concept("c", "NN", "single", "مفرد")).unwrap();
        let labels = o.multiword_labels(LanguageTag::English);
        assert_eq!(labels.len(), 2);
        assert_eq!(labels[0].0.len(), 4);
        assert_eq!(labels[1].0, vec!["free", "trade"]);
    }

    #[test]
    fn registry_lookup_is_case_insensitive() {
        let mut reg = OntologyRegistry::new();
        reg.register(cinema());
        assert!(reg.get("cinema").is_ok());
        assert!(reg.get("CINEMA").is_ok());
        let err = reg.get("Opera").unwrap_err();
        assert!(matches!(err, OntologyError::ContextUnregistered { .. }));
    }

    #[test]
    fn loader_requires_the_header() {
        let file = std::env::temp_dir().join(format!("{}-ont-nohdr.txt", std::process::id()));
        std::fs::write(&file, "a\tNN\tone\tواحد\n").unwrap();
        let err = ContextOntology::load(&file).unwrap_err();
        assert!(matches!(err, OntologyError::MissingHeader { .. }));
        std::fs::remove_file(&file).ok();
    }

    #[test]
    fn loader_reads_header_and_rows() {
        let file = std::env::temp_dir().join(format!("{}-ont-ok.txt", std::process::id()));
        std::fs::write(
            &file,
            "# comment\ncontext:Cinema\ntheater\tNN\ttheater\tمسرح\n",
        )
        .unwrap();
        let o = ContextOntology::load(&file).unwrap();
        assert_eq!(o.context().name(), "Cinema");
        assert_eq!(o.concepts().len(), 1);
        std::fs::remove_file(&file).ok();
    }
}
