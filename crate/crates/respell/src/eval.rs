//! Error counting, error rates, improvement ratios, and tabular reporting.
//!
//! Counting comes in two flavors: annotation-driven (a JSON file marks the
//! misspelled words by hand) and alignment-driven (a minimal word-level edit
//! alignment against a reference transcript).

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edit::word_edit_distance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundingMode {
    /// Truncate error rates to 3 decimals and ratios to 2, reproducing
    /// conventional reporting that floors instead of rounding.
    Paper,
    /// Full f64 precision.
    Full,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("total_words must be greater than zero")]
    ZeroTotalWords,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("annotation parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("annotation invalid: {0}")]
    BadAnnotation(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedWord {
    pub word_index: usize,
    pub surface: String,
}

/// Hand-marked misspellings of one transcript. `total_words` is part of the
/// annotation rather than recomputed from the transcript, because word-count
/// conventions (hyphens, parenthesized acronyms) vary between sources.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorAnnotation {
    pub transcript_id: String,
    pub total_words: u64,
    pub error_words: Vec<AnnotatedWord>,
}

impl ErrorAnnotation {
    pub fn from_json(text: &str) -> Result<Self, EvalError> {
        let annotation: Self = serde_json::from_str(text)?;
        annotation.validate()?;
        Ok(annotation)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, EvalError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        for pair in self.error_words.windows(2) {
            if pair[1].word_index <= pair[0].word_index {
                return Err(EvalError::BadAnnotation(format!(
                    "word indices must be strictly increasing, got {} then {}",
                    pair[0].word_index, pair[1].word_index
                )));
            }
        }
        Ok(())
    }

    /// Checks every annotated position against the actual transcript words.
    pub fn validate_against(&self, words: &[String]) -> Result<(), EvalError> {
        for entry in &self.error_words {
            match words.get(entry.word_index) {
                None => {
                    return Err(EvalError::BadAnnotation(format!(
                        "word index {} is out of range (transcript has {} words)",
                        entry.word_index,
                        words.len()
                    )))
                }
                Some(word) if *word != entry.surface => {
                    return Err(EvalError::BadAnnotation(format!(
                        "word {} is {:?}, annotation says {:?}",
                        entry.word_index, word, entry.surface
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }
}

/// Number of annotated misspellings.
pub fn count_errors_annotated(annotation: &ErrorAnnotation) -> u64 {
    annotation.error_words.len() as u64
}

/// Substitutions + insertions + deletions of a minimal word-level alignment
/// between hypothesis and reference. Case-sensitive: hyphenation and casing
/// differences count as errors.
pub fn count_errors_aligned(hypothesis: &str, reference: &str) -> u64 {
    let hyp: Vec<&str> = hypothesis.split_whitespace().collect();
    let reference: Vec<&str> = reference.split_whitespace().collect();
    word_edit_distance(&hyp, &reference) as u64
}

fn rate_milli(errors: u64, total_words: u64) -> u64 {
    errors * 1000 / total_words
}

/// errors / total_words. Paper mode truncates to 3 decimal places.
pub fn error_rate(errors: u64, total_words: u64, mode: RoundingMode) -> Result<f64, EvalError> {
    if total_words == 0 {
        return Err(EvalError::ZeroTotalWords);
    }
    Ok(match mode {
        RoundingMode::Full => errors as f64 / total_words as f64,
        RoundingMode::Paper => rate_milli(errors, total_words) as f64 / 1000.0,
    })
}

/// Improvement of the error rate; division is undefined when every error was
/// corrected, so that case is reported as a sentinel instead of a number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Improvement {
    Ratio(f64),
    AllErrorsCorrected,
}

impl Improvement {
    pub fn ratio(&self) -> Option<f64> {
        match self {
            Improvement::Ratio(r) => Some(*r),
            Improvement::AllErrorsCorrected => None,
        }
    }
}

impl fmt::Display for Improvement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Improvement::Ratio(r) => write!(f, "{r}"),
            Improvement::AllErrorsCorrected => write!(f, "all errors corrected"),
        }
    }
}

/// E_before / E_after. Paper mode truncates the ratio to 2 decimal places,
/// computed on the already-truncated rates.
pub fn improvement(e_before: f64, e_after: f64, mode: RoundingMode) -> Improvement {
    match mode {
        RoundingMode::Full => {
            if e_after == 0.0 {
                Improvement::AllErrorsCorrected
            } else {
                Improvement::Ratio(e_before / e_after)
            }
        }
        RoundingMode::Paper => {
            // Paper-mode rates are exact multiples of 0.001, so the integer
            // thousandths are recoverable and the truncation stays exact.
            let before_milli = (e_before * 1000.0).round() as u64;
            let after_milli = (e_after * 1000.0).round() as u64;
            match (before_milli * 100).checked_div(after_milli) {
                None => Improvement::AllErrorsCorrected,
                Some(centi) => Improvement::Ratio(centi as f64 / 100.0),
            }
        }
    }
}

/// Raw inputs for one report row.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub label: String,
    pub total_words: u64,
    pub errors_before: u64,
    pub errors_after: u64,
}

/// Before/after error counts and rates for one transcript, with every cell
/// renderable exactly as the rounding mode dictates.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub label: String,
    pub total_words: u64,
    pub errors_before: u64,
    pub errors_after: u64,
    pub rate_before: f64,
    pub rate_after: f64,
    pub improvement: Improvement,
    pub mode: RoundingMode,
}

impl ErrorReport {
    pub fn from_counts(
        label: impl Into<String>,
        total_words: u64,
        errors_before: u64,
        errors_after: u64,
        mode: RoundingMode,
    ) -> Result<Self, EvalError> {
        let rate_before = error_rate(errors_before, total_words, mode)?;
        let rate_after = error_rate(errors_after, total_words, mode)?;
        Ok(Self {
            label: label.into(),
            total_words,
            errors_before,
            errors_after,
            rate_before,
            rate_after,
            improvement: improvement(rate_before, rate_after, mode),
            mode,
        })
    }

    fn rate_cell(&self, errors: u64) -> String {
        match self.mode {
            RoundingMode::Paper => {
                let milli = rate_milli(errors, self.total_words);
                format!("{}.{}%", milli / 10, milli % 10)
            }
            RoundingMode::Full => {
                format!("{:.4}%", errors as f64 / self.total_words as f64 * 100.0)
            }
        }
    }

    pub fn rate_before_cell(&self) -> String {
        self.rate_cell(self.errors_before)
    }

    pub fn rate_after_cell(&self) -> String {
        self.rate_cell(self.errors_after)
    }

    fn improvement_centi(&self) -> Option<u64> {
        if self.errors_after == 0 {
            return None;
        }
        let before_milli = rate_milli(self.errors_before, self.total_words);
        let after_milli = rate_milli(self.errors_after, self.total_words);
        (after_milli > 0).then(|| before_milli * 100 / after_milli)
    }

    /// Display when the ratio has no paper-mode value: residual errors whose
    /// rate truncates to 0.0% leave the division undefined, which is not the
    /// same thing as a clean sweep.
    fn unrepresentable_cell(&self) -> String {
        if self.errors_after == 0 {
            "all errors corrected".to_owned()
        } else {
            "n/a (rate rounds to 0.0%)".to_owned()
        }
    }

    /// The improvement ratio as a bare number, e.g. "4.58".
    pub fn improvement_ratio_cell(&self) -> String {
        match self.mode {
            RoundingMode::Paper => match self.improvement_centi() {
                Some(centi) => format!("{}.{:02}", centi / 100, centi % 100),
                None => self.unrepresentable_cell(),
            },
            RoundingMode::Full => match self.improvement {
                Improvement::Ratio(r) => format!("{r:.4}"),
                Improvement::AllErrorsCorrected => "all errors corrected".to_owned(),
            },
        }
    }

    /// Ratio plus percentage, e.g. "4.58 (458%)".
    pub fn improvement_cell(&self) -> String {
        match self.mode {
            RoundingMode::Paper => match self.improvement_centi() {
                Some(centi) => format!("{}.{:02} ({}%)", centi / 100, centi % 100, centi),
                None => self.unrepresentable_cell(),
            },
            RoundingMode::Full => match self.improvement {
                Improvement::Ratio(r) => format!("{:.4} ({:.2}%)", r, r * 100.0),
                Improvement::AllErrorsCorrected => "all errors corrected".to_owned(),
            },
        }
    }
}

/// A full report: one [`ErrorReport`] per transcript plus the cross-transcript
/// average improvement.
#[derive(Debug, Clone)]
pub struct ReportTable {
    pub reports: Vec<ErrorReport>,
    pub mode: RoundingMode,
}

/// Builds the report table from raw per-transcript counts.
pub fn build_report(rows: &[ReportRow], mode: RoundingMode) -> Result<ReportTable, EvalError> {
    let reports = rows
        .iter()
        .map(|row| {
            ErrorReport::from_counts(
                row.label.clone(),
                row.total_words,
                row.errors_before,
                row.errors_after,
                mode,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ReportTable { reports, mode })
}

impl ReportTable {
    /// Arithmetic mean of the improvement ratios, at full precision.
    pub fn average_improvement(&self) -> Option<f64> {
        let ratios: Vec<f64> = self
            .reports
            .iter()
            .filter_map(|r| r.improvement.ratio())
            .collect();
        if ratios.is_empty() {
            None
        } else {
            Some(ratios.iter().sum::<f64>() / ratios.len() as f64)
        }
    }

    /// The footer cell: mean improvement as a percentage. Paper mode floors
    /// to a whole percent; mean(458%, 537%) prints as "497%".
    pub fn average_improvement_cell(&self) -> Option<String> {
        match self.mode {
            RoundingMode::Paper => {
                let centis: Vec<u64> = self
                    .reports
                    .iter()
                    .filter_map(|r| r.improvement_centi())
                    .collect();
                if centis.is_empty() {
                    None
                } else {
                    Some(format!(
                        "{}%",
                        centis.iter().sum::<u64>() / centis.len() as u64
                    ))
                }
            }
            RoundingMode::Full => self
                .average_improvement()
                .map(|avg| format!("{:.2}%", avg * 100.0)),
        }
    }

    /// Renders the table as aligned plain text: metric rows, one column per
    /// transcript.
    pub fn render_text(&self) -> String {
        let metric_labels = [
            "total words",
            "errors before post-editing",
            "errors after post-editing",
            "error rate before post-editing",
            "error rate after post-editing",
            "improvement ratio",
        ];
        let mut columns: Vec<Vec<String>> =
            vec![metric_labels.iter().map(|s| s.to_string()).collect()];
        columns[0].insert(0, "metric".to_owned());
        for report in &self.reports {
            columns.push(vec![
                report.label.clone(),
                report.total_words.to_string(),
                report.errors_before.to_string(),
                report.errors_after.to_string(),
                report.rate_before_cell(),
                report.rate_after_cell(),
                report.improvement_cell(),
            ]);
        }
        let widths: Vec<usize> = columns
            .iter()
            .map(|col| col.iter().map(String::len).max().unwrap_or(0))
            .collect();

        let mut out = String::new();
        for row in 0..=metric_labels.len() {
            let mut line = String::new();
            for (col, column) in columns.iter().enumerate() {
                if col > 0 {
                    line.push_str("  ");
                }
                let cell = &column[row];
                line.push_str(cell);
                if col + 1 < columns.len() {
                    line.push_str(&" ".repeat(widths[col].saturating_sub(cell.len())));
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        if let Some(avg) = self.average_improvement_cell() {
            out.push_str(&format!("average improvement: {avg}\n"));
        }
        out
    }

    /// Renders the table as CSV, one data row per transcript and a trailing
    /// average row.
    pub fn render_csv(&self) -> String {
        let mut out = String::from(
            "label,total_words,errors_before,errors_after,error_rate_before,error_rate_after,improvement\n",
        );
        for report in &self.reports {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                report.label,
                report.total_words,
                report.errors_before,
                report.errors_after,
                report.rate_before_cell(),
                report.rate_after_cell(),
                report.improvement_ratio_cell(),
            ));
        }
        if let Some(avg) = self.average_improvement_cell() {
            out.push_str(&format!("average,,,,,,{avg}\n"));
        }
        out
    }
}
