//! Bracketed constituency trees, the per-language parse store, and the
//! flat fallback parse for unlisted sentences.
//!
//! Trees use the conventional single-line bracketed form,
//! `(ROOT (S (NP (DT the) (NN point)) ...))`. Every leaf is a
//! `(TAG surface)` pair; internal nodes carry a label and at least one
//! child. The store maps a normalized, punctuation-free sentence key to
//! its recorded tree, so raw inputs with or without final punctuation hit
//! the same record.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::lexicon::Lexicon;
use crate::text::{is_punct_token, normalize, sentence_key, tokenize, LanguageTag};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unbalanced brackets at byte {position}")]
    UnbalancedBrackets { position: usize },
    #[error("node '{label}' has no children")]
    EmptyNode { label: String },
    #[error("surface form '{word}' appears without a part-of-speech tag")]
    LeafWithoutTag { word: String },
    #[error("tokenization produced no tokens")]
    TokenizationEmpty,
    #[error("cannot read parse store {path}: {reason}")]
    StoreUnreadable { path: String, reason: String },
    #[error("{path}:{line}: {message}")]
    StoreFormat {
        path: String,
        line: usize,
        message: String,
    },
}

/// One leaf of a tree: the surface form, its normalized lookup form, the
/// part-of-speech tag, and the leaf's position in left-to-right order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub normalized: String,
    pub pos: String,
    pub index: usize,
}

/// A constituency tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseTree {
    Internal { label: String, children: Vec<ParseTree> },
    Leaf { token: Token },
}

impl ParseTree {
    pub fn label(&self) -> &str {
        match self {
            ParseTree::Internal { label, .. } => label,
            ParseTree::Leaf { token } => &token.pos,
        }
    }

    /// Leaves in left-to-right order.
    pub fn tokens(&self) -> Vec<&Token> {
        let mut out = Vec::new();
        self.collect_tokens(&mut out);
        out
    }

    fn collect_tokens<'a>(&'a self, out: &mut Vec<&'a Token>) {
        match self {
            ParseTree::Internal { children, .. } => {
                for child in children {
                    child.collect_tokens(out);
                }
            }
            ParseTree::Leaf { token } => out.push(token),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            ParseTree::Internal { children, .. } => children.iter().map(ParseTree::leaf_count).sum(),
            ParseTree::Leaf { .. } => 1,
        }
    }
}

/// Read a tree from its bracketed form.
pub fn read_bracketed(text: &str) -> Result<ParseTree, ParseError> {
    let mut parser = TreeParser {
        bytes: text.as_bytes(),
        pos: 0,
        next_leaf: 0,
    };
    parser.skip_ws();
    let tree = parser.node()?;
    parser.skip_ws();
    if parser.pos != parser.bytes.len() {
        return Err(ParseError::UnbalancedBrackets { position: parser.pos });
    }
    Ok(tree)
}

/// Canonical single-space bracketed form; `read_bracketed` inverts it.
pub fn write_bracketed(tree: &ParseTree) -> String {
    let mut out = String::new();
    write_node(tree, &mut out);
    out
}

fn write_node(tree: &ParseTree, out: &mut String) {
    match tree {
        ParseTree::Internal { label, children } => {
            let _ = write!(out, "({label}");
            for child in children {
                out.push(' ');
                write_node(child, out);
            }
            out.push(')');
        }
        ParseTree::Leaf { token } => {
            let _ = write!(out, "({} {})", token.pos, token.surface);
        }
    }
}

struct TreeParser<'a> {
    bytes: &'a [u8],
    pos: usize,
    next_leaf: usize,
}

impl<'a> TreeParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.bytes.len()
            && !self.bytes[self.pos].is_ascii_whitespace()
            && self.bytes[self.pos] != b'('
            && self.bytes[self.pos] != b')'
        {
            self.pos += 1;
        }
        // Atom boundaries always fall on ASCII delimiters, so the slice
        // stays valid UTF-8.
        std::str::from_utf8(&self.bytes[start..self.pos]).unwrap_or("")
    }

    fn node(&mut self) -> Result<ParseTree, ParseError> {
        if self.pos >= self.bytes.len() {
            return Err(ParseError::UnbalancedBrackets { position: self.pos });
        }
        if self.bytes[self.pos] != b'(' {
            let word = self.atom();
            return Err(ParseError::LeafWithoutTag {
                word: word.to_string(),
            });
        }
        self.pos += 1;
        self.skip_ws();
        let label = self.atom().to_string();
        if label.is_empty() {
            return Err(ParseError::EmptyNode {
                label: String::new(),
            });
        }
        let mut children = Vec::new();
        let mut words: Vec<String> = Vec::new();
        loop {
            self.skip_ws();
            match self.bytes.get(self.pos) {
                None => return Err(ParseError::UnbalancedBrackets { position: self.pos }),
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                Some(b'(') => {
                    children.push(self.node()?);
                }
                Some(_) => {
                    words.push(self.atom().to_string());
                }
            }
        }
        match (children.is_empty(), words.len()) {
            (true, 0) => Err(ParseError::EmptyNode { label }),
            (true, 1) => {
                let surface = words.pop().unwrap();
                let token = Token {
                    normalized: normalize(&surface),
                    surface,
                    pos: label,
                    index: self.next_leaf,
                };
                self.next_leaf += 1;
                Ok(ParseTree::Leaf { token })
            }
            (true, _) => Err(ParseError::LeafWithoutTag {
                word: words.swap_remove(1),
            }),
            (false, 0) => Ok(ParseTree::Internal { label, children }),
            (false, _) => Err(ParseError::LeafWithoutTag {
                word: words.swap_remove(0),
            }),
        }
    }
}

/// Recorded parses for one language, keyed by [`sentence_key`].
#[derive(Debug, Clone)]
pub struct ParseStore {
    language: LanguageTag,
    trees: BTreeMap<String, String>,
}

impl ParseStore {
    pub fn new(language: LanguageTag) -> ParseStore {
        ParseStore {
            language,
            trees: BTreeMap::new(),
        }
    }

    /// Load a store file: one `sentence<TAB>bracketed tree` record per
    /// line, `#` comments allowed. Every tree is validated on load.
    pub fn load(path: &Path, language: LanguageTag) -> Result<ParseStore, ParseError> {
        let display = path.display().to_string();
        let body = fs::read_to_string(path).map_err(|e| ParseError::StoreUnreadable {
            path: display.clone(),
            reason: e.to_string(),
        })?;
        let mut store = ParseStore::new(language);
        for (idx, raw) in body.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim_end_matches(['\r', '\n']);
            if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
                continue;
            }
            let (sentence, tree_text) =
                trimmed.split_once('\t').ok_or_else(|| ParseError::StoreFormat {
                    path: display.clone(),
                    line,
                    message: "expected 'sentence<TAB>tree'".to_string(),
                })?;
            let key = sentence_key(sentence);
            if key.is_empty() {
                return Err(ParseError::StoreFormat {
                    path: display,
                    line,
                    message: "sentence side of the record is empty".to_string(),
                });
            }
            let tree = read_bracketed(tree_text.trim()).map_err(|e| ParseError::StoreFormat {
                path: display.clone(),
                line,
                message: e.to_string(),
            })?;
            if store
                .trees
                .insert(key, write_bracketed(&tree))
                .is_some()
            {
                return Err(ParseError::StoreFormat {
                    path: display,
                    line,
                    message: format!("duplicate record for '{}'", sentence.trim()),
                });
            }
        }
        if store.trees.is_empty() {
            log::warn!("parse store {display} has no records");
        }
        Ok(store)
    }

    pub fn language(&self) -> LanguageTag {
        self.language
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn get(&self, sentence: &str) -> Option<ParseTree> {
        self.trees
            .get(&sentence_key(sentence))
            .map(|text| read_bracketed(text).expect("stored trees are validated on load"))
    }

    pub fn insert(&mut self, sentence: &str, tree: &ParseTree) {
        self.trees
            .insert(sentence_key(sentence), write_bracketed(tree));
    }
}

/// Parse a sentence: recorded tree when the store has one, otherwise a
/// flat fallback in which each token is tagged from the lexicon (its
/// richest entry), unknown words default to `NN`, and punctuation keeps
/// its lexicon tag or a literal `PUNC`.
pub fn parse(
    sentence: &str,
    language: LanguageTag,
    store: &ParseStore,
    lexicon: &Lexicon,
) -> Result<ParseTree, ParseError> {
    debug_assert_eq!(store.language(), language);
    debug_assert_eq!(lexicon.language(), language);
    if let Some(tree) = store.get(sentence) {
        return Ok(tree);
    }
    let words = tokenize(sentence);
    if words.is_empty() {
        return Err(ParseError::TokenizationEmpty);
    }
    let leaves: Vec<ParseTree> = words
        .into_iter()
        .enumerate()
        .map(|(index, surface)| {
            let pos = lexicon
                .fallback_pos(&surface)
                .map(str::to_string)
                .unwrap_or_else(|| {
                    if is_punct_token(&surface) {
                        "PUNC".to_string()
                    } else {
                        "NN".to_string()
                    }
                });
            ParseTree::Leaf {
                token: Token {
                    normalized: normalize(&surface),
                    surface,
                    pos,
                    index,
                },
            }
        })
        .collect();
    Ok(ParseTree::Internal {
        label: "ROOT".to_string(),
        children: vec![ParseTree::Internal {
            label: "S".to_string(),
            children: leaves,
        }],
    })
}
