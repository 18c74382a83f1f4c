//! Word-level transcript model, fixed-width tokenization, and concatenation.
//!
//! Words are whitespace-delimited; punctuation stays attached to its word
//! ("OS," and "(WAN)" are single words). Inter-word whitespace is not
//! preserved: output text always uses single spaces.

use std::io;
use std::path::Path;

/// A recognized transcript: the raw text plus its whitespace-split words and
/// an informational language tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    raw_text: String,
    words: Vec<String>,
    language: String,
}

impl Transcript {
    pub fn new(raw_text: impl Into<String>, language: impl Into<String>) -> Self {
        let raw_text = raw_text.into();
        let words = raw_text.split_whitespace().map(str::to_owned).collect();
        Self {
            raw_text,
            words,
            language: language.into(),
        }
    }

    /// Reads a UTF-8 plain-text transcript from disk.
    pub fn from_file(path: impl AsRef<Path>, language: impl Into<String>) -> io::Result<Self> {
        Ok(Self::new(std::fs::read_to_string(path)?, language))
    }

    pub fn raw_text(&self) -> &str {
        &self.raw_text
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    /// The transcript with whitespace runs normalized to single spaces.
    pub fn normalized_text(&self) -> String {
        self.words.join(" ")
    }
}

/// One fixed-width block of consecutive transcript words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenWindow {
    index: usize,
    words: Vec<String>,
    text: String,
}

impl TokenWindow {
    /// 0-based ordinal of this window within its transcript.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// The window's words joined by single spaces.
    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Splits `text` into consecutive windows of `window_width` words each; only
/// the last window may be shorter. Empty input yields no windows.
///
/// Windows are disjoint and cover the whitespace-split words of `text` in
/// order, so `ceil(word_count / window_width)` windows come back.
pub fn tokenize(text: &str, window_width: usize) -> Vec<TokenWindow> {
    assert!(window_width >= 1, "window width must be at least 1");
    text.split_whitespace()
        .collect::<Vec<_>>()
        .chunks(window_width)
        .enumerate()
        .map(|(index, chunk)| TokenWindow {
            index,
            words: chunk.iter().map(|w| (*w).to_owned()).collect(),
            text: chunk.join(" "),
        })
        .collect()
}

/// Joins text pieces in order with single spaces. The inverse of [`tokenize`]
/// at the word level: feeding back the window texts reproduces the word
/// sequence of the original transcript.
pub fn concatenate<I>(pieces: I) -> String
where
    I: IntoIterator,
    I::Item: AsRef<str>,
{
    let mut out = String::new();
    for piece in pieces {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(piece.as_ref());
    }
    out
}
