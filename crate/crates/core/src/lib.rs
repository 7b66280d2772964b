//! Bidirectional Arabic/English transfer translation.
//!
//! The pipeline parses a source sentence, splits its tokens by how many
//! senses each carries, translates single-sense tokens through a bilingual
//! lexicon and multi-sense tokens through a context-scoped ontology, splices
//! the translations back in source order, and then repairs the word order
//! with target-side reordering rules. An evaluation toolkit (term-frequency
//! cosine, divergence angle, precision/recall/F-measure, corpus size) and a
//! resource-bundle loader round out the crate.
//!
//! Numeric routines are generic over the scalar type via [`num_traits`];
//! [`Real`] is the concrete alias the rest of the crate (and the CLI) uses.

pub mod bundle;
pub mod context;
pub mod corpus;
pub mod lexicon;
pub mod metrics;
pub mod ontology;
pub mod parse;
pub mod pipeline;
pub mod reorder;
pub mod text;

/// Concrete scalar used by the shipped tools. The metric kernels in
/// [`metrics`] stay generic; everything downstream instantiates them here.
pub type Real = f64;

pub use bundle::ResourceBundle;
pub use context::ContextId;
pub use pipeline::{translate, TranslateOptions, TranslationResult};
pub use text::LanguageTag;
