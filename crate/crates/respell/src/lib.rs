//! Post-editing correction for recognized transcripts.
//!
//! A transcript is split into fixed-width token windows, each window is sent
//! to a spelling-suggestion provider as a query, and windows that come back
//! with a suggestion are replaced by it. The corrected transcript is the
//! in-order concatenation of kept and replaced windows, and every decision is
//! captured in an audit trail.
//!
//! Providers share one contract ([`suggest::SuggestionProvider`]) with three
//! backends:
//!
//! * [`web::WebSuggester`] queries a search endpoint and scrapes the
//!   "Including results for" marker from the response page,
//! * [`ngram::NGramSuggester`] is a local, trainable emulation of the same
//!   mechanism: exact-phrase frequency gate, per-word edit-distance
//!   candidates, backoff-scored rewrite selection,
//! * [`suggest::ReplayProvider`] is deterministic replay of a recorded
//!   cassette, for tests and offline runs.
//!
//! [`eval`] closes the loop with error counts, error rates, improvement
//! ratios, and tabular reports.

pub mod edit;
pub mod eval;
pub mod ngram;
pub mod pipeline;
pub mod suggest;
pub mod transcript;
pub mod web;

pub use pipeline::{post_edit, post_edit_parallel, PipelineConfig, PostEdit};
pub use suggest::{Suggestion, SuggestionProvider};
pub use transcript::{concatenate, tokenize, TokenWindow, Transcript};
