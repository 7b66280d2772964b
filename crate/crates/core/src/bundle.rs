//! Resource bundle: everything the pipeline needs, loaded from one
//! directory.
//!
//! Layout:
//!
//! ```text
//! manifest.txt            one context name per line
//! lexicon.ar.tsv          Arabic lexicon
//! lexicon.en.tsv          English lexicon
//! ontology.<context>.txt  one file per manifest line
//! parses.ar.txt           recorded Arabic parses
//! parses.en.txt           recorded English parses
//! stopwords.ar.txt        Arabic stop words (context scoring)
//! stopwords.en.txt        English stop words
//! corpus.txt              evaluation corpus (optional)
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::context::{ContextError, StopList};
use crate::corpus::{load_corpus, CorpusError, CorpusRecord};
use crate::lexicon::{Lexicon, LexiconError};
use crate::ontology::{ContextOntology, OntologyError, OntologyRegistry};
use crate::parse::{ParseError, ParseStore};
use crate::text::LanguageTag;

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("bundle directory {path} is not readable: {reason}")]
    DirUnreadable { path: String, reason: String },
    #[error("bundle manifest {path} is not readable: {reason}")]
    ManifestUnreadable { path: String, reason: String },
    #[error("manifest lists no contexts ({path})")]
    ManifestEmpty { path: String },
    #[error("manifest lists context '{name}' twice")]
    ManifestDuplicate { name: String },
    #[error("ontology file {path} declares context '{declared}' but the manifest calls it '{expected}'")]
    ContextNameMismatch {
        path: String,
        declared: String,
        expected: String,
    },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    StopList(#[from] ContextError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// All resources of one bundle directory.
#[derive(Debug, Clone)]
pub struct ResourceBundle {
    root: PathBuf,
    english: Lexicon,
    arabic: Lexicon,
    registry: OntologyRegistry,
    parses_en: ParseStore,
    parses_ar: ParseStore,
    stops_en: StopList,
    stops_ar: StopList,
    corpus: Option<Vec<CorpusRecord>>,
}

impl ResourceBundle {
    /// Load a bundle directory, validating every file on the way in.
    pub fn load(dir: &Path) -> Result<ResourceBundle, BundleError> {
        if !dir.is_dir() {
            return Err(BundleError::DirUnreadable {
                path: dir.display().to_string(),
                reason: "not a directory".to_string(),
            });
        }
        let manifest_path = dir.join("manifest.txt");
        let manifest =
            fs::read_to_string(&manifest_path).map_err(|e| BundleError::ManifestUnreadable {
                path: manifest_path.display().to_string(),
                reason: e.to_string(),
            })?;
        let names: Vec<&str> = manifest
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        if names.is_empty() {
            return Err(BundleError::ManifestEmpty {
                path: manifest_path.display().to_string(),
            });
        }
        let mut registry = OntologyRegistry::new();
        for name in &names {
            let path = dir.join(format!("ontology.{name}.txt"));
            let ontology = ContextOntology::load(&path)?;
            if ontology.context().key() != name.to_lowercase() {
                return Err(BundleError::ContextNameMismatch {
                    path: path.display().to_string(),
                    declared: ontology.context().name().to_string(),
                    expected: name.to_string(),
                });
            }
            if registry.register(ontology).is_some() {
                return Err(BundleError::ManifestDuplicate {
                    name: name.to_string(),
                });
            }
        }
        let corpus_path = dir.join("corpus.txt");
        let corpus = if corpus_path.is_file() {
            Some(load_corpus(&corpus_path)?)
        } else {
            None
        };
        Ok(ResourceBundle {
            root: dir.to_path_buf(),
            english: Lexicon::load(&dir.join("lexicon.en.tsv"), LanguageTag::English)?,
            arabic: Lexicon::load(&dir.join("lexicon.ar.tsv"), LanguageTag::Arabic)?,
            registry,
            parses_en: ParseStore::load(&dir.join("parses.en.txt"), LanguageTag::English)?,
            parses_ar: ParseStore::load(&dir.join("parses.ar.txt"), LanguageTag::Arabic)?,
            stops_en: StopList::load(&dir.join("stopwords.en.txt"))?,
            stops_ar: StopList::load(&dir.join("stopwords.ar.txt"))?,
            corpus,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn lexicon(&self, language: LanguageTag) -> &Lexicon {
        match language {
            LanguageTag::Arabic => &self.arabic,
            LanguageTag::English => &self.english,
        }
    }

    pub fn parses(&self, language: LanguageTag) -> &ParseStore {
        match language {
            LanguageTag::Arabic => &self.parses_ar,
            LanguageTag::English => &self.parses_en,
        }
    }

    pub fn stops(&self, language: LanguageTag) -> &StopList {
        match language {
            LanguageTag::Arabic => &self.stops_ar,
            LanguageTag::English => &self.stops_en,
        }
    }

    pub fn registry(&self) -> &OntologyRegistry {
        &self.registry
    }

    /// Records of the bundled corpus, if the bundle ships one.
    pub fn corpus(&self) -> Option<&[CorpusRecord]> {
        self.corpus.as_deref()
    }

    /// Cross-check the loaded resources and describe them. Returns
    /// human-readable findings; hard errors have already failed `load`.
    pub fn validate(&self) -> ValidationSummary {
        let mut notes = Vec::new();
        let mut warnings = Vec::new();
        notes.push(format!(
            "lexicons: {} English entries, {} Arabic entries",
            self.english.len(),
            self.arabic.len()
        ));
        notes.push(format!(
            "contexts: {}",
            self.registry
                .contexts()
                .map(|c| c.name().to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ));
        notes.push(format!(
            "parse stores: {} English, {} Arabic records",
            self.parses_en.len(),
            self.parses_ar.len()
        ));
        notes.push(format!(
            "stop lists: {} English, {} Arabic words",
            self.stops_en.len(),
            self.stops_ar.len()
        ));
        match &self.corpus {
            Some(records) => notes.push(format!("corpus: {} records", records.len())),
            None => notes.push("corpus: none bundled".to_string()),
        }

        // Ontology labels whose words the lexicons do not know cannot be
        // reached by the splitter; surface them.
        for ontology in self.registry.ontologies() {
            for concept in ontology.concepts() {
                for (language, label) in [
                    (LanguageTag::English, &concept.english_label),
                    (LanguageTag::Arabic, &concept.arabic_label),
                ] {
                    let lexicon = self.lexicon(language);
                    let single_word = !label.trim().contains(' ');
                    if single_word && !lexicon.contains_word(label) {
                        warnings.push(format!(
                            "{} label '{}' ({}) of context {} is not in the {} lexicon",
                            language,
                            label,
                            concept.pos,
                            ontology.context().name(),
                            language,
                        ));
                    }
                }
            }
        }

        // Corpus records must reference registered contexts.
        if let Some(records) = &self.corpus {
            for record in records {
                if self.registry.get(&record.context).is_err() {
                    warnings.push(format!(
                        "corpus record '{}' names unregistered context '{}'",
                        record.id, record.context
                    ));
                }
            }
        }
        ValidationSummary { notes, warnings }
    }
}

/// Outcome of [`ResourceBundle::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationSummary {
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationSummary {
    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for note in &self.notes {
            out.push_str(note);
            out.push('\n');
        }
        for warning in &self.warnings {
            out.push_str("warning: ");
            out.push_str(warning);
            out.push('\n');
        }
        out.push_str(if self.is_clean() { "OK\n" } else { "INVALID\n" });
        out
    }
}
