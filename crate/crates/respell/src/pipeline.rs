//! The post-editing pipeline: iterate over token windows, query the provider
//! once per token, substitute suggestions, and emit the corrected transcript
//! plus an audit trail. Sequential and parallel modes produce byte-identical
//! output.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::suggest::{SuggestError, SuggestionProvider};
use crate::transcript::{concatenate, tokenize};

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    /// Words per token window.
    pub window_width: usize,
    /// Worker count for [`post_edit_parallel`].
    pub workers: usize,
    /// In strict mode a provider failure aborts the run; in lenient mode the
    /// token is kept and marked errored.
    pub strict_provider_errors: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            window_width: 6,
            workers: 1,
            strict_provider_errors: true,
        }
    }
}

impl PipelineConfig {
    fn validate(&self) {
        assert!(self.window_width >= 1, "window width must be at least 1");
        assert!(self.workers >= 1, "worker count must be at least 1");
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Kept,
    Replaced,
    /// Lenient mode only: the provider failed, the original token was kept.
    Errored,
}

/// One pipeline decision: what happened to token `token_index`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionRecord {
    pub token_index: usize,
    pub original_text: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub replacement_text: Option<String>,
    pub action: Action,
}

impl CorrectionRecord {
    /// The text this token contributes to the corrected transcript.
    pub fn output_text(&self) -> &str {
        self.replacement_text
            .as_deref()
            .unwrap_or(&self.original_text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostEdit {
    pub corrected_text: String,
    pub records: Vec<CorrectionRecord>,
}

impl PostEdit {
    pub fn token_count(&self) -> usize {
        self.records.len()
    }

    pub fn replaced_count(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.action == Action::Replaced)
            .count()
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    /// Strict mode: the provider failed on `token_index`. `partial` carries
    /// the audit trail for every earlier token.
    #[error("provider failed on token {token_index}: {source}")]
    Provider {
        token_index: usize,
        source: SuggestError,
        partial: Vec<CorrectionRecord>,
    },
    #[error("provider {0:?} declares itself unsafe for parallel use")]
    ProviderNotParallelSafe(String),
}

fn process_token<P: SuggestionProvider + ?Sized>(
    provider: &P,
    token_index: usize,
    original_text: &str,
    strict: bool,
) -> Result<CorrectionRecord, (usize, SuggestError)> {
    match provider.suggest(original_text) {
        Ok(Some(suggestion)) => Ok(CorrectionRecord {
            token_index,
            original_text: original_text.to_owned(),
            replacement_text: Some(suggestion.corrected),
            action: Action::Replaced,
        }),
        Ok(None) => Ok(CorrectionRecord {
            token_index,
            original_text: original_text.to_owned(),
            replacement_text: None,
            action: Action::Kept,
        }),
        Err(e) if strict => Err((token_index, e)),
        Err(_) => Ok(CorrectionRecord {
            token_index,
            original_text: original_text.to_owned(),
            replacement_text: None,
            action: Action::Errored,
        }),
    }
}

fn assemble(records: Vec<CorrectionRecord>) -> PostEdit {
    let corrected_text = concatenate(records.iter().map(CorrectionRecord::output_text));
    PostEdit {
        corrected_text,
        records,
    }
}

/// Runs the single-pass correction: one provider call per token window, in
/// order; a suggested token is replaced by the suggestion, otherwise kept.
/// Replacements are never re-queried.
pub fn post_edit<P: SuggestionProvider + ?Sized>(
    text: &str,
    provider: &P,
    config: &PipelineConfig,
) -> Result<PostEdit, PipelineError> {
    config.validate();
    let windows = tokenize(text, config.window_width);
    let mut records = Vec::with_capacity(windows.len());
    for window in &windows {
        match process_token(
            provider,
            window.index(),
            window.text(),
            config.strict_provider_errors,
        ) {
            Ok(record) => records.push(record),
            Err((token_index, source)) => {
                return Err(PipelineError::Provider {
                    token_index,
                    source,
                    partial: records,
                })
            }
        }
    }
    Ok(assemble(records))
}

/// Contiguous token ranges assigning `n` tokens to `workers` workers: the
/// first `n % workers` workers take one extra token, so every worker handles
/// between `floor(n / workers)` and `ceil(n / workers)` tokens.
fn chunk_ranges(n: usize, workers: usize) -> Vec<std::ops::Range<usize>> {
    let base = n / workers;
    let extra = n % workers;
    let mut ranges = Vec::with_capacity(workers);
    let mut start = 0;
    for worker in 0..workers {
        let len = base + usize::from(worker < extra);
        ranges.push(start..start + len);
        start += len;
    }
    ranges
}

/// Same contract and output as [`post_edit`], with the token windows spread
/// over `config.workers` threads. Results are merged strictly by token index,
/// so the output is byte-identical to the sequential mode; on failure the
/// error with the lowest token index wins.
pub fn post_edit_parallel<P: SuggestionProvider + Sync + ?Sized>(
    text: &str,
    provider: &P,
    config: &PipelineConfig,
) -> Result<PostEdit, PipelineError> {
    config.validate();
    if !provider.parallel_safe() {
        return Err(PipelineError::ProviderNotParallelSafe(
            provider.id().to_owned(),
        ));
    }
    if config.workers == 1 {
        return post_edit(text, provider, config);
    }

    let windows = tokenize(text, config.window_width);
    let strict = config.strict_provider_errors;
    let ranges = chunk_ranges(windows.len(), config.workers);

    type ChunkOutcome = Result<Vec<CorrectionRecord>, (usize, SuggestError, Vec<CorrectionRecord>)>;
    let mut chunk_results: Vec<ChunkOutcome> = Vec::with_capacity(ranges.len());
    std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .iter()
            .map(|range| {
                let chunk = &windows[range.clone()];
                scope.spawn(move || {
                    let mut records = Vec::with_capacity(chunk.len());
                    for window in chunk {
                        match process_token(provider, window.index(), window.text(), strict) {
                            Ok(record) => records.push(record),
                            Err((token_index, source)) => {
                                return Err((token_index, source, records))
                            }
                        }
                    }
                    Ok(records)
                })
            })
            .collect();
        for handle in handles {
            chunk_results.push(handle.join().expect("pipeline worker panicked"));
        }
    });

    // First error wins deterministically: the lowest failing token index.
    let failure = chunk_results
        .iter()
        .filter_map(|outcome| outcome.as_ref().err().map(|(idx, _, _)| *idx))
        .min();
    if let Some(failing_index) = failure {
        let mut partial = Vec::new();
        let mut source = None;
        for outcome in chunk_results {
            let records = match outcome {
                Ok(records) => records,
                Err((token_index, error, records)) => {
                    if token_index == failing_index && source.is_none() {
                        source = Some(error);
                    }
                    records
                }
            };
            partial.extend(
                records
                    .into_iter()
                    .filter(|r| r.token_index < failing_index),
            );
        }
        partial.sort_by_key(|r| r.token_index);
        Err(PipelineError::Provider {
            token_index: failing_index,
            source: source.expect("failing chunk recorded its error"),
            partial,
        })
    } else {
        let mut records = Vec::with_capacity(windows.len());
        for outcome in chunk_results {
            records.extend(outcome.expect("no failures recorded"));
        }
        Ok(assemble(records))
    }
}

/// Writes the audit trail as JSON Lines, one record per line.
pub fn write_audit<W: Write>(records: &[CorrectionRecord], mut w: W) -> std::io::Result<()> {
    for record in records {
        let line = serde_json::to_string(record).expect("record serializes");
        writeln!(w, "{line}")?;
    }
    Ok(())
}
