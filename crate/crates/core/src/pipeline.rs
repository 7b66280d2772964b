//! The translation pipeline: fuse ontology phrases, split tokens by sense
//! count, translate the single-sense side through the lexicon and the
//! multi-sense side through the context ontology, splice the results back
//! in source order, and hand the item list to the reordering rules.
//!
//! Every stage writes into a [`TranslationTrace`], so a failed run still
//! reports how far it got and what it produced along the way.

use std::fmt;

use thiserror::Error;

use crate::bundle::ResourceBundle;
use crate::context::{
    identify_context, identify_language, override_context, ContextError, ContextId,
};
use crate::lexicon::{Lexicon, LexiconError};
use crate::ontology::{ContextOntology, OntologyError};
use crate::parse::{parse, write_bracketed, ParseError, ParseTree, Token};
use crate::reorder;
use crate::text::{is_punct_token, join_chunks, split_sentences, LanguageTag};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unit '{word}' was routed as single-sense but has no single translation")]
    InternalSplitError { word: String },
    #[error("replacement left source position {index} uncovered")]
    CoverageGap { index: usize },
    #[error("reordering did not reach a fixpoint after {passes} passes")]
    RuleLoopDetected { passes: usize },
}

/// Marker wrapped around words the pipeline could not translate.
pub fn untranslated_marker(surface: &str) -> String {
    format!("⟦{surface}⟧")
}

/// One source-side unit: a tree token, or a run of tokens fused because it
/// matches a multi-word ontology label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceUnit {
    pub surface: String,
    pub normalized: String,
    pub pos: String,
    /// Leaf index of the unit's first token.
    pub index: usize,
    /// Number of tree leaves the unit covers.
    pub span: usize,
    /// True when the unit was fused from several tokens.
    pub compound: bool,
}

/// Units routed by sense count.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MeaningSplit {
    /// Exactly one sense: translated straight from the lexicon.
    pub single: Vec<SourceUnit>,
    /// More than one sense (or a fused phrase): needs the ontology.
    pub multi: Vec<SourceUnit>,
    /// Not in the lexicon at all.
    pub unknown: Vec<SourceUnit>,
}

/// Where a target item's text came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Dictionary,
    Ontology,
    Untranslated,
    Dropped,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Origin::Dictionary => "dictionary",
            Origin::Ontology => "ontology",
            Origin::Untranslated => "untranslated",
            Origin::Dropped => "dropped",
        };
        f.write_str(name)
    }
}

/// One translated unit, still carrying its source coordinates so the
/// reordering rules can reason about both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetItem {
    pub source_index: usize,
    pub source_span: usize,
    pub source_surface: String,
    pub source_pos: String,
    pub text: String,
    pub origin: Origin,
    /// True for items the reordering rules introduce (they have no source
    /// token of their own).
    pub inserted: bool,
}

impl TargetItem {
    fn from_unit(unit: &SourceUnit, text: String, origin: Origin) -> TargetItem {
        TargetItem {
            source_index: unit.index,
            source_span: unit.span,
            source_surface: unit.surface.clone(),
            source_pos: unit.pos.clone(),
            text,
            origin,
            inserted: false,
        }
    }
}

/// One row of the morphological-analysis report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphEntry {
    pub surface: String,
    /// Word-level sense count (maximum over the word's pos entries);
    /// `None` for fused phrases and unknown words.
    pub senses: Option<u32>,
    pub compound: bool,
}

/// Everything one sentence's run through the pipeline produced. Stages
/// fill their fields in order, so a trace of a failed run shows exactly
/// where it stopped.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationTrace {
    pub input: String,
    pub language: Option<LanguageTag>,
    pub context: Option<ContextId>,
    pub parse: Option<ParseTree>,
    pub morphology: Vec<MorphEntry>,
    pub split: Option<MeaningSplit>,
    /// Translated items in source order, before reordering.
    pub resolutions: Vec<TargetItem>,
    pub replaced: Option<String>,
    pub reordered: Option<String>,
    pub reorder_passes: Option<usize>,
    /// Soft errors the pipeline recovered from (untranslated words).
    pub errors: Vec<PipelineError>,
}

impl TranslationTrace {
    fn new(input: &str) -> TranslationTrace {
        TranslationTrace {
            input: input.to_string(),
            language: None,
            context: None,
            parse: None,
            morphology: Vec::new(),
            split: None,
            resolutions: Vec::new(),
            replaced: None,
            reordered: None,
            reorder_passes: None,
            errors: Vec::new(),
        }
    }

    /// Human-readable stage report.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let push_section = |out: &mut String, title: &str, body: &str| {
            out.push_str("== ");
            out.push_str(title);
            out.push_str(" ==\n");
            out.push_str(body);
            if !body.ends_with('\n') {
                out.push('\n');
            }
        };
        push_section(&mut out, "Input", &self.input);
        let lang_line = match (self.language, &self.context) {
            (Some(lang), Some(ctx)) => format!("{lang} input; context: {ctx}"),
            (Some(lang), None) => format!("{lang} input; context: (undecided)"),
            _ => "(undecided)".to_string(),
        };
        push_section(&mut out, "Language Identification", &lang_line);
        if let Some(tree) = &self.parse {
            push_section(&mut out, "Parser", &write_bracketed(tree));
        }
        if !self.morphology.is_empty() {
            let row = self
                .morphology
                .iter()
                .map(|m| match (m.senses, m.compound) {
                    (Some(n), _) => format!("{}: {}", m.surface, n),
                    (None, true) => format!("{}: phrase", m.surface),
                    (None, false) => format!("{}: ?", m.surface),
                })
                .collect::<Vec<_>>()
                .join(", ");
            push_section(&mut out, "Morphological Analyzer", &row);
        }
        if let Some(split) = &self.split {
            let names = |units: &[SourceUnit]| {
                units
                    .iter()
                    .map(|u| u.surface.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            let body = format!(
                "single-sense: {}\nmulti-sense: {}{}",
                names(&split.single),
                names(&split.multi),
                if split.unknown.is_empty() {
                    String::new()
                } else {
                    format!("\nunknown: {}", names(&split.unknown))
                }
            );
            push_section(&mut out, "Semantic Analyser", &body);
        }
        if !self.resolutions.is_empty() {
            let body = self
                .resolutions
                .iter()
                .map(|item| {
                    let text = if item.text.is_empty() { "(dropped)" } else { &item.text };
                    format!("{} → {} [{}]", item.source_surface, text, item.origin)
                })
                .collect::<Vec<_>>()
                .join("\n");
            push_section(&mut out, "Translator", &body);
        }
        if let Some(replaced) = &self.replaced {
            push_section(&mut out, "Replacement", replaced);
        }
        if let Some(reordered) = &self.reordered {
            let body = match self.reorder_passes {
                Some(passes) => format!("({passes} passes) {reordered}"),
                None => reordered.clone(),
            };
            push_section(&mut out, "Reordering", &body);
        }
        for error in &self.errors {
            out.push_str(&format!("!! {error}\n"));
        }
        out
    }

    /// Flat `key=value` dump, one entry per line, for test harnesses.
    pub fn key_values(&self) -> String {
        let mut out = String::new();
        let mut push = |key: String, value: &str| {
            out.push_str(&key);
            out.push('=');
            out.push_str(&value.replace('\n', " "));
            out.push('\n');
        };
        push("input".into(), &self.input);
        if let Some(lang) = self.language {
            push("language".into(), lang.code());
        }
        if let Some(ctx) = &self.context {
            push("context".into(), ctx.name());
        }
        if let Some(tree) = &self.parse {
            push("parse".into(), &write_bracketed(tree));
        }
        for (i, m) in self.morphology.iter().enumerate() {
            push(format!("unit.{i}.surface"), &m.surface);
            match (m.senses, m.compound) {
                (Some(n), _) => push(format!("unit.{i}.senses"), &n.to_string()),
                (None, true) => push(format!("unit.{i}.senses"), "phrase"),
                (None, false) => push(format!("unit.{i}.senses"), "unknown"),
            }
        }
        for (i, item) in self.resolutions.iter().enumerate() {
            push(format!("item.{i}.source"), &item.source_surface);
            push(format!("item.{i}.pos"), &item.source_pos);
            push(format!("item.{i}.text"), &item.text);
            push(format!("item.{i}.origin"), &item.origin.to_string());
        }
        if let Some(replaced) = &self.replaced {
            push("replaced".into(), replaced);
        }
        if let Some(reordered) = &self.reordered {
            push("reordered".into(), reordered);
        }
        if let Some(passes) = self.reorder_passes {
            push("passes".into(), &passes.to_string());
        }
        for (i, error) in self.errors.iter().enumerate() {
            push(format!("error.{i}"), &error.to_string());
        }
        out
    }
}

/// Result of a full run: the target text plus one trace per sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationResult {
    pub output: String,
    pub traces: Vec<TranslationTrace>,
}

/// A failed run: the error plus whatever traces were completed or
/// partially filled before it.
#[derive(Debug, Clone)]
pub struct TranslationFailure {
    pub error: PipelineError,
    pub traces: Vec<TranslationTrace>,
}

impl fmt::Display for TranslationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.error.fmt(f)
    }
}

impl std::error::Error for TranslationFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Caller-side knobs for [`translate`].
#[derive(Debug, Clone, Default)]
pub struct TranslateOptions {
    /// Skip script-based language identification.
    pub language: Option<LanguageTag>,
    /// Skip vocabulary-overlap context identification.
    pub context: Option<String>,
}

/// Fuse runs of up to four tokens that match a multi-word ontology label
/// on the source side (longest match first, scanning left to right), and
/// wrap every remaining token as its own unit.
pub fn fuse_units(
    tokens: &[&Token],
    ontology: &ContextOntology,
    source: LanguageTag,
) -> Vec<SourceUnit> {
    let labels: Vec<(Vec<String>, String)> = ontology
        .multiword_labels(source)
        .into_iter()
        .filter(|(words, _)| words.len() <= 4)
        .collect();
    let mut units = Vec::new();
    let mut i = 0;
    'scan: while i < tokens.len() {
        if !is_punct_token(&tokens[i].surface) {
            for (words, pos) in &labels {
                let n = words.len();
                if i + n <= tokens.len()
                    && tokens[i..i + n]
                        .iter()
                        .zip(words)
                        .all(|(t, w)| t.normalized == *w)
                {
                    units.push(SourceUnit {
                        surface: tokens[i..i + n]
                            .iter()
                            .map(|t| t.surface.as_str())
                            .collect::<Vec<_>>()
                            .join(" "),
                        normalized: words.join(" "),
                        pos: pos.clone(),
                        index: tokens[i].index,
                        span: n,
                        compound: true,
                    });
                    i += n;
                    continue 'scan;
                }
            }
        }
        let t = tokens[i];
        units.push(SourceUnit {
            surface: t.surface.clone(),
            normalized: t.normalized.clone(),
            pos: t.pos.clone(),
            index: t.index,
            span: 1,
            compound: false,
        });
        i += 1;
    }
    units
}

/// Route units by the sense count of their (surface, pos) lexicon entry.
/// Fused phrases go straight to the multi-sense side (their translation
/// lives in the ontology); units without a lexicon entry are unknown.
pub fn split_by_meaning(units: &[SourceUnit], lexicon: &Lexicon) -> MeaningSplit {
    let mut split = MeaningSplit::default();
    for unit in units {
        if unit.compound {
            split.multi.push(unit.clone());
            continue;
        }
        match lexicon.pos_sense_count(&unit.normalized, &unit.pos) {
            Some(1) => split.single.push(unit.clone()),
            Some(_) => split.multi.push(unit.clone()),
            None => split.unknown.push(unit.clone()),
        }
    }
    split
}

/// English indefinite articles have no Arabic counterpart; they are
/// dropped rather than translated.
fn drops_in_target(unit: &SourceUnit, target: LanguageTag) -> bool {
    target == LanguageTag::Arabic
        && unit.pos == "DT"
        && matches!(unit.normalized.as_str(), "a" | "an")
}

/// Translate the single-sense units through the lexicon.
pub fn translate_single(
    units: &[SourceUnit],
    lexicon: &Lexicon,
    target: LanguageTag,
) -> Result<Vec<TargetItem>, PipelineError> {
    let mut items = Vec::new();
    for unit in units {
        if drops_in_target(unit, target) {
            items.push(TargetItem::from_unit(unit, String::new(), Origin::Dropped));
            continue;
        }
        let text = lexicon
            .single_meaning_lookup(&unit.normalized, &unit.pos)
            .map_err(|_| PipelineError::InternalSplitError {
                word: unit.surface.clone(),
            })?;
        items.push(TargetItem::from_unit(unit, text.to_string(), Origin::Dictionary));
    }
    Ok(items)
}

/// Resolve the multi-sense units against the context ontology. Units the
/// ontology does not cover come back as untranslated markers along with
/// the error that caused them.
pub fn disambiguate_multi(
    units: &[SourceUnit],
    ontology: &ContextOntology,
    source: LanguageTag,
) -> (Vec<TargetItem>, Vec<PipelineError>) {
    let mut items = Vec::new();
    let mut errors = Vec::new();
    for unit in units {
        match ontology.resolve(&unit.normalized, &unit.pos, source) {
            Ok(label) => {
                items.push(TargetItem::from_unit(unit, label.to_string(), Origin::Ontology));
            }
            Err(e) => {
                errors.push(PipelineError::Ontology(e));
                items.push(TargetItem::from_unit(
                    unit,
                    untranslated_marker(&unit.surface),
                    Origin::Untranslated,
                ));
            }
        }
    }
    (items, errors)
}

/// Marker items for units the lexicon does not know at all.
pub fn mark_unknown(units: &[SourceUnit], language: LanguageTag) -> (Vec<TargetItem>, Vec<PipelineError>) {
    let mut items = Vec::new();
    let mut errors = Vec::new();
    for unit in units {
        errors.push(PipelineError::Lexicon(LexiconError::WordUnknown {
            language,
            word: unit.normalized.clone(),
        }));
        items.push(TargetItem::from_unit(
            unit,
            untranslated_marker(&unit.surface),
            Origin::Untranslated,
        ));
    }
    (items, errors)
}

/// Splice translated items back in source order, verifying that every
/// source unit produced exactly one item.
pub fn replace(units: &[SourceUnit], items: &[TargetItem]) -> Result<(Vec<TargetItem>, String), PipelineError> {
    let mut ordered = items.to_vec();
    ordered.sort_by_key(|item| item.source_index);
    let mut expected = units.iter().map(|u| (u.index, u.span)).collect::<Vec<_>>();
    expected.sort_unstable();
    let got: Vec<(usize, usize)> = ordered
        .iter()
        .map(|item| (item.source_index, item.source_span))
        .collect();
    if expected != got {
        let index = expected
            .iter()
            .zip(got.iter().chain(std::iter::repeat(&(usize::MAX, 0))))
            .find(|(e, g)| e != g)
            .map(|(e, _)| e.0)
            .unwrap_or(0);
        return Err(PipelineError::CoverageGap { index });
    }
    let text = join_chunks(ordered.iter().map(|item| item.text.as_str()));
    Ok((ordered, text))
}

/// Run the full pipeline over a text. Language and context are decided
/// once for the whole input (or taken from `options`), then each sentence
/// is parsed, translated, and reordered; sentence outputs are joined with
/// single spaces.
pub fn translate(
    text: &str,
    bundle: &ResourceBundle,
    options: &TranslateOptions,
) -> Result<TranslationResult, TranslationFailure> {
    let fail = |error: PipelineError, traces: Vec<TranslationTrace>| TranslationFailure {
        error,
        traces,
    };
    let language = match options.language {
        Some(lang) => lang,
        None => identify_language(text)
            .map_err(|e| fail(e.into(), vec![TranslationTrace::new(text)]))?,
    };
    let context = match &options.context {
        Some(name) => override_context(name, bundle.registry()),
        None => identify_context(text, language, bundle.registry(), bundle.stops(language)),
    }
    .map_err(|e| {
        let mut trace = TranslationTrace::new(text);
        trace.language = Some(language);
        fail(e.into(), vec![trace])
    })?;
    let ontology = bundle
        .registry()
        .get(context.name())
        .expect("context was just resolved against the registry");
    let lexicon = bundle.lexicon(language);
    let store = bundle.parses(language);
    let target = language.opposite();

    let mut traces: Vec<TranslationTrace> = Vec::new();
    let mut outputs: Vec<String> = Vec::new();
    for sentence in split_sentences(text) {
        let mut trace = TranslationTrace::new(&sentence);
        trace.language = Some(language);
        trace.context = Some(context.clone());
        match translate_sentence(&sentence, language, target, lexicon, ontology, store, &mut trace)
        {
            Ok(output) => {
                outputs.push(output);
                traces.push(trace);
            }
            Err(e) => {
                trace.errors.push(e.clone());
                traces.push(trace);
                return Err(fail(e, traces));
            }
        }
    }
    Ok(TranslationResult {
        output: join_chunks(outputs.iter().map(String::as_str)),
        traces,
    })
}

fn translate_sentence(
    sentence: &str,
    language: LanguageTag,
    target: LanguageTag,
    lexicon: &Lexicon,
    ontology: &ContextOntology,
    store: &crate::parse::ParseStore,
    trace: &mut TranslationTrace,
) -> Result<String, PipelineError> {
    let tree = parse(sentence, language, store, lexicon)?;
    trace.parse = Some(tree.clone());

    let tokens = tree.tokens();
    let units = fuse_units(&tokens, ontology, language);
    trace.morphology = units
        .iter()
        .map(|unit| MorphEntry {
            surface: unit.surface.clone(),
            senses: if unit.compound {
                None
            } else {
                lexicon.sense_count(&unit.normalized).ok()
            },
            compound: unit.compound,
        })
        .collect();

    let split = split_by_meaning(&units, lexicon);
    trace.split = Some(split.clone());

    let single_items = translate_single(&split.single, lexicon, target)?;
    let (multi_items, mut soft_errors) = disambiguate_multi(&split.multi, ontology, language);
    let (unknown_items, mut unknown_errors) = mark_unknown(&split.unknown, language);
    trace.errors.append(&mut soft_errors);
    trace.errors.append(&mut unknown_errors);

    let mut items = single_items;
    items.extend(multi_items);
    items.extend(unknown_items);
    let (ordered, replaced) = replace(&units, &items)?;
    trace.resolutions = ordered.clone();
    trace.replaced = Some(replaced);

    let outcome = reorder::reorder(&ordered, &tree, target)?;
    trace.reordered = Some(outcome.output.clone());
    trace.reorder_passes = Some(outcome.passes);
    Ok(outcome.output)
}
