//! Browser bindings for the respell correction pipeline.
//!
//! Three operations back the playground page in `www/`: train an n-gram
//! index from pasted corpus text, correct a transcript with tunable window
//! width / edit distance / margin, and score a before/after pair against a
//! reference. Everything returns JSON strings so the page stays plain
//! JavaScript.
//!
//! Build with `wasm-pack build --target web` and open `www/index.html`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use respell::eval::{count_errors_aligned, error_rate, improvement, Improvement, RoundingMode};
use respell::ngram::{NGramIndex, NGramSuggester, SuggesterConfig};
use respell::pipeline::{post_edit, PipelineConfig};

#[derive(Serialize)]
struct TrainStats {
    order: usize,
    vocab_size: usize,
    ngram_count: usize,
    total_words: u64,
}

#[derive(Serialize)]
struct CorrectionOutput {
    corrected: String,
    token_count: usize,
    replaced_count: usize,
    records: Vec<respell::pipeline::CorrectionRecord>,
}

#[derive(Serialize)]
struct Evaluation {
    total_words: u64,
    errors_before: u64,
    errors_after: u64,
    rate_before: f64,
    rate_after: f64,
    rate_before_pct: String,
    rate_after_pct: String,
    improvement: Option<f64>,
    all_errors_corrected: bool,
}

fn train_impl(corpus: &str, order: usize) -> Result<(NGramIndex, String), String> {
    let index = NGramIndex::train(corpus, order).map_err(|e| e.to_string())?;
    let stats = TrainStats {
        order: index.order(),
        vocab_size: index.vocab_size(),
        ngram_count: index.ngram_count(),
        total_words: index.total_unigrams(),
    };
    let json = serde_json::to_string(&stats).map_err(|e| e.to_string())?;
    Ok((index, json))
}

fn correct_impl(
    index: &NGramIndex,
    text: &str,
    window: usize,
    max_edit_distance: usize,
    margin: f64,
    min_exact_count: u64,
) -> Result<String, String> {
    let config = SuggesterConfig {
        max_edit_distance,
        score_margin: margin,
        min_exact_count,
        ..SuggesterConfig::default()
    };
    let suggester = NGramSuggester::new(index.clone(), config);
    let result = post_edit(
        text,
        &suggester,
        &PipelineConfig {
            window_width: window,
            ..PipelineConfig::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let output = CorrectionOutput {
        corrected: result.corrected_text.clone(),
        token_count: result.token_count(),
        replaced_count: result.replaced_count(),
        records: result.records,
    };
    serde_json::to_string(&output).map_err(|e| e.to_string())
}

fn evaluate_impl(before: &str, after: &str, reference: &str) -> Result<String, String> {
    let total_words = reference.split_whitespace().count() as u64;
    if total_words == 0 {
        return Err("reference transcript is empty".into());
    }
    let errors_before = count_errors_aligned(before, reference);
    let errors_after = count_errors_aligned(after, reference);
    let rate_before =
        error_rate(errors_before, total_words, RoundingMode::Full).map_err(|e| e.to_string())?;
    let rate_after =
        error_rate(errors_after, total_words, RoundingMode::Full).map_err(|e| e.to_string())?;
    let ratio = improvement(rate_before, rate_after, RoundingMode::Full);
    let evaluation = Evaluation {
        total_words,
        errors_before,
        errors_after,
        rate_before,
        rate_after,
        rate_before_pct: format!("{:.1}%", rate_before * 100.0),
        rate_after_pct: format!("{:.1}%", rate_after * 100.0),
        improvement: ratio.ratio(),
        all_errors_corrected: matches!(ratio, Improvement::AllErrorsCorrected),
    };
    serde_json::to_string(&evaluation).map_err(|e| e.to_string())
}

/// Stateful playground: hold one trained index, correct against it.
#[wasm_bindgen]
pub struct Workbench {
    index: Option<NGramIndex>,
}

#[wasm_bindgen]
impl Workbench {
    #[wasm_bindgen(constructor)]
    #[allow(clippy::new_without_default)]
    pub fn new() -> Workbench {
        Workbench { index: None }
    }

    /// Trains the index from corpus text; returns stats as JSON.
    pub fn train(&mut self, corpus: &str, order: usize) -> Result<String, JsError> {
        let (index, stats) = train_impl(corpus, order).map_err(|e| JsError::new(&e))?;
        self.index = Some(index);
        Ok(stats)
    }

    /// Corrects a transcript with the trained index; returns the corrected
    /// text and the per-token audit records as JSON.
    pub fn correct(
        &self,
        text: &str,
        window: usize,
        max_edit_distance: usize,
        margin: f64,
        min_exact_count: u64,
    ) -> Result<String, JsError> {
        let index = self
            .index
            .as_ref()
            .ok_or_else(|| JsError::new("train an index first"))?;
        correct_impl(
            index,
            text,
            window,
            max_edit_distance,
            margin,
            min_exact_count,
        )
        .map_err(|e| JsError::new(&e))
    }

    /// Alignment-based error rates of a before/after pair against a
    /// reference transcript; returns JSON.
    pub fn evaluate(before: &str, after: &str, reference: &str) -> Result<String, JsError> {
        evaluate_impl(before, after, reference).map_err(|e| JsError::new(&e))
    }
}
