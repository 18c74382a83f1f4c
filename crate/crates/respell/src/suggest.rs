//! The suggestion-provider contract shared by all backends, plus cassette
//! record/replay storage for deterministic, network-free runs.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edit::word_edit_distance;
use crate::transcript::tokenize;

/// A provider's proposed rewrite for a query token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Suggestion {
    /// The token text as submitted.
    pub query: String,
    /// The proposed replacement.
    pub corrected: String,
    /// Short name of the backend that produced it.
    pub provider_id: String,
}

impl Suggestion {
    /// Builds a suggestion if `corrected` is an actual rewrite: non-empty and
    /// different from `query` under case folding. Case-only echoes of the
    /// query are not corrections and yield `None`.
    pub fn new(
        query: impl Into<String>,
        corrected: impl Into<String>,
        provider_id: impl Into<String>,
    ) -> Option<Self> {
        let query = query.into();
        let corrected = corrected.into();
        if corrected.trim().is_empty() || corrected.to_lowercase() == query.to_lowercase() {
            return None;
        }
        Some(Self {
            query,
            corrected,
            provider_id: provider_id.into(),
        })
    }
}

#[derive(Debug, Error)]
pub enum SuggestError {
    #[error("query is empty")]
    EmptyQuery,
    /// The backend could not be reached at all. Reported distinctly from
    /// "no suggestion": a transport failure must never pass as "the token is
    /// correct".
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("query not recorded in cassette: {0:?}")]
    CassetteMiss(String),
    #[error("n-gram index is empty; train it on a corpus first")]
    EmptyIndex,
}

/// The provider contract. `suggest` returns `Ok(Some(..))` when the backend
/// deems the query misspelled, `Ok(None)` when the query is accepted as-is,
/// and `Err(..)` only for real failures. Replay and local backends must be
/// deterministic.
pub trait SuggestionProvider {
    /// Short backend name ("web", "ngram", "replay").
    fn id(&self) -> &str;

    fn suggest(&self, query: &str) -> Result<Option<Suggestion>, SuggestError>;

    /// Whether one instance may be driven by several workers at once. The
    /// parallel pipeline refuses providers that say `false`.
    fn parallel_safe(&self) -> bool {
        true
    }
}

impl<P: SuggestionProvider + ?Sized> SuggestionProvider for &P {
    fn id(&self) -> &str {
        (**self).id()
    }

    fn suggest(&self, query: &str) -> Result<Option<Suggestion>, SuggestError> {
        (**self).suggest(query)
    }

    fn parallel_safe(&self) -> bool {
        (**self).parallel_safe()
    }
}

impl<P: SuggestionProvider + ?Sized> SuggestionProvider for Box<P> {
    fn id(&self) -> &str {
        (**self).id()
    }

    fn suggest(&self, query: &str) -> Result<Option<Suggestion>, SuggestError> {
        (**self).suggest(query)
    }

    fn parallel_safe(&self) -> bool {
        (**self).parallel_safe()
    }
}

#[derive(Debug, Error)]
pub enum CassetteError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("cassette line {line}: {source}")]
    Parse {
        line: usize,
        source: serde_json::Error,
    },
    #[error("cassette is missing its header line")]
    MissingHeader,
    #[error("duplicate query on line {line}: {query:?}")]
    DuplicateQuery { line: usize, query: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CassetteMeta {
    pub provider_id: String,
    /// Recording time as Unix seconds. Derived cassettes pin this to 0 so the
    /// files are reproducible byte for byte.
    pub created_unix: u64,
    pub version: u32,
}

#[derive(Serialize, Deserialize)]
struct CassetteLine {
    q: String,
    s: Option<String>,
}

/// An exact-match map from query strings to recorded answers.
///
/// Stored as UTF-8 JSON Lines: a header line with the metadata, then one
/// `{"q": .., "s": ..}` record per line in recording order. `s` is `null`
/// when the provider returned no suggestion. Save → load → save is
/// byte-identical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cassette {
    meta: CassetteMeta,
    entries: Vec<(String, Option<String>)>,
    by_query: HashMap<String, usize>,
}

impl Cassette {
    pub fn new(provider_id: impl Into<String>, created_unix: u64) -> Self {
        Self {
            meta: CassetteMeta {
                provider_id: provider_id.into(),
                created_unix,
                version: 1,
            },
            entries: Vec::new(),
            by_query: HashMap::new(),
        }
    }

    pub fn meta(&self) -> &CassetteMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds a recorded answer. A query may appear at most once; repeats are
    /// ignored and reported as `false`.
    pub fn insert(&mut self, query: impl Into<String>, suggestion: Option<String>) -> bool {
        let query = query.into();
        if self.by_query.contains_key(&query) {
            return false;
        }
        self.by_query.insert(query.clone(), self.entries.len());
        self.entries.push((query, suggestion));
        true
    }

    /// Exact-match lookup. `None` means the query was never recorded;
    /// `Some(None)` means it was recorded with no suggestion.
    pub fn lookup(&self, query: &str) -> Option<Option<&str>> {
        self.by_query
            .get(query)
            .map(|&i| self.entries[i].1.as_deref())
    }

    /// Runs every query through `provider` and records the answers.
    /// Duplicate queries are submitted once.
    pub fn record<P, I, S>(provider: &P, queries: I) -> Result<Self, SuggestError>
    where
        P: SuggestionProvider + ?Sized,
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let created = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let mut cassette = Cassette::new(provider.id(), created);
        for query in queries {
            let query = query.as_ref();
            if cassette.lookup(query).is_some() {
                continue;
            }
            let answer = provider.suggest(query)?;
            cassette.insert(query, answer.map(|s| s.corrected));
        }
        Ok(cassette)
    }

    /// Derives a replay cassette from a before/after transcript pair.
    ///
    /// The "before" text is tokenized into `window_width`-word windows, the
    /// "after" text is cut into the same number of contiguous word segments
    /// minimizing the total word-level edit distance between each window and
    /// its segment, and every window becomes one cassette entry: the segment
    /// when it differs from the window, no suggestion otherwise. Replaying
    /// the cassette over the "before" text therefore reproduces the "after"
    /// word sequence exactly, as long as every window maps to at least one
    /// word — a suggestion cannot be empty, so a window whose entire content
    /// was deleted in the "after" text is recorded as kept.
    pub fn derive_from_texts(
        before_text: &str,
        after_text: &str,
        window_width: usize,
        provider_id: impl Into<String>,
    ) -> Self {
        let windows = tokenize(before_text, window_width);
        let after_words: Vec<&str> = after_text.split_whitespace().collect();
        let mut cassette = Cassette::new(provider_id, 0);
        if windows.is_empty() {
            return cassette;
        }

        let segments = align_segments(&windows, &after_words);
        for (window, (start, end)) in windows.iter().zip(segments) {
            let segment = after_words[start..end].join(" ");
            let suggestion =
                (!segment.is_empty() && segment != window.text()).then_some(segment);
            cassette.insert(window.text(), suggestion);
        }
        cassette
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header = serde_json::to_string(&self.meta).expect("metadata serializes");
        writeln!(w, "{header}")?;
        for (q, s) in &self.entries {
            let line = serde_json::to_string(&CassetteLine {
                q: q.clone(),
                s: s.clone(),
            })
            .expect("entry serializes");
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("cassette text is UTF-8")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        let mut file = std::fs::File::create(path)?;
        self.write_to(&mut file)
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self, CassetteError> {
        let mut lines = BufReader::new(r).lines();
        let header = lines.next().ok_or(CassetteError::MissingHeader)??;
        let meta: CassetteMeta = serde_json::from_str(&header)
            .map_err(|source| CassetteError::Parse { line: 1, source })?;
        let mut cassette = Cassette {
            meta,
            entries: Vec::new(),
            by_query: HashMap::new(),
        };
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let entry: CassetteLine =
                serde_json::from_str(&line).map_err(|source| CassetteError::Parse {
                    line: i + 2,
                    source,
                })?;
            if !cassette.insert(entry.q.clone(), entry.s) {
                return Err(CassetteError::DuplicateQuery {
                    line: i + 2,
                    query: entry.q,
                });
            }
        }
        Ok(cassette)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CassetteError> {
        Self::read_from(std::fs::File::open(path)?)
    }
}

/// Cuts `after_words` into one contiguous segment per window, minimizing the
/// summed word-level edit distance; ties resolve to the earliest boundary.
fn align_segments(
    windows: &[crate::transcript::TokenWindow],
    after_words: &[&str],
) -> Vec<(usize, usize)> {
    let n = windows.len();
    let m = after_words.len();
    const INF: usize = usize::MAX / 2;
    // cost[i][j]: best cost of matching the first i windows to the first j words.
    let mut cost = vec![vec![INF; m + 1]; n + 1];
    let mut back = vec![vec![0usize; m + 1]; n + 1];
    cost[0][0] = 0;
    for i in 1..=n {
        let window_words = windows[i - 1].words();
        for j in 0..=m {
            for split in 0..=j {
                if cost[i - 1][split] == INF {
                    continue;
                }
                let c =
                    cost[i - 1][split] + word_edit_distance(window_words, &after_words[split..j]);
                if c < cost[i][j] {
                    cost[i][j] = c;
                    back[i][j] = split;
                }
            }
        }
    }
    let mut bounds = vec![(0usize, 0usize); n];
    let mut j = m;
    for i in (1..=n).rev() {
        let split = back[i][j];
        bounds[i - 1] = (split, j);
        j = split;
    }
    bounds
}

/// Replays a recorded cassette. In strict mode (the default) a query that was
/// never recorded is an error, so divergence from the recording cannot pass
/// silently.
#[derive(Debug, Clone)]
pub struct ReplayProvider {
    cassette: Cassette,
    strict: bool,
}

impl ReplayProvider {
    pub fn new(cassette: Cassette) -> Self {
        Self {
            cassette,
            strict: true,
        }
    }

    pub fn lenient(cassette: Cassette) -> Self {
        Self {
            cassette,
            strict: false,
        }
    }

    pub fn cassette(&self) -> &Cassette {
        &self.cassette
    }
}

impl SuggestionProvider for ReplayProvider {
    fn id(&self) -> &str {
        "replay"
    }

    fn suggest(&self, query: &str) -> Result<Option<Suggestion>, SuggestError> {
        if query.trim().is_empty() {
            return Err(SuggestError::EmptyQuery);
        }
        match self.cassette.lookup(query) {
            Some(Some(corrected)) => Ok(Suggestion::new(query, corrected, "replay")),
            Some(None) => Ok(None),
            None if self.strict => Err(SuggestError::CassetteMiss(query.to_owned())),
            None => Ok(None),
        }
    }
}

/// Wraps another provider and records every answer into a cassette, so a live
/// run can be replayed later.
pub struct RecordingProvider<P> {
    inner: P,
    cassette: Mutex<Cassette>,
}

impl<P: SuggestionProvider> RecordingProvider<P> {
    pub fn new(inner: P) -> Self {
        let created = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let cassette = Mutex::new(Cassette::new(inner.id(), created));
        Self { inner, cassette }
    }

    /// The cassette recorded so far.
    pub fn into_cassette(self) -> Cassette {
        self.cassette.into_inner().expect("cassette lock")
    }
}

impl<P: SuggestionProvider> SuggestionProvider for RecordingProvider<P> {
    fn id(&self) -> &str {
        self.inner.id()
    }

    fn suggest(&self, query: &str) -> Result<Option<Suggestion>, SuggestError> {
        let answer = self.inner.suggest(query)?;
        let mut cassette = self.cassette.lock().expect("cassette lock");
        cassette.insert(query, answer.as_ref().map(|s| s.corrected.clone()));
        Ok(answer)
    }

    fn parallel_safe(&self) -> bool {
        self.inner.parallel_safe()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Upcase;

    impl SuggestionProvider for Upcase {
        fn id(&self) -> &str {
            "upcase"
        }

        fn suggest(&self, query: &str) -> Result<Option<Suggestion>, SuggestError> {
            if query.contains('!') {
                return Err(SuggestError::Transport("bang".into()));
            }
            // Suggest the reversed query for tokens containing 'x'.
            if query.contains('x') {
                let rev: String = query.chars().rev().collect();
                return Ok(Suggestion::new(query, rev, "upcase"));
            }
            Ok(None)
        }
    }

    #[test]
    fn suggestion_requires_a_real_rewrite() {
        assert!(Suggestion::new("jahn cenedy", "John Kennedy", "web").is_some());
        assert!(Suggestion::new("computer", "Computer", "web").is_none());
        assert!(Suggestion::new("word", "  ", "web").is_none());
        assert!(Suggestion::new("word", "word", "web").is_none());
    }

    #[test]
    fn record_then_lookup_round_trips() {
        let provider = Upcase;
        let cassette =
            Cassette::record(&provider, ["plain", "xray", "plain"]).expect("recording succeeds");
        assert_eq!(cassette.len(), 2);
        assert_eq!(cassette.lookup("plain"), Some(None));
        assert_eq!(cassette.lookup("xray"), Some(Some("yarx")));
        assert_eq!(cassette.lookup("never"), None);

        let replay = ReplayProvider::new(cassette);
        assert!(replay.suggest("plain").unwrap().is_none());
        assert_eq!(replay.suggest("xray").unwrap().unwrap().corrected, "yarx");
    }

    #[test]
    fn strict_replay_errors_on_unrecorded_query() {
        let replay = ReplayProvider::new(Cassette::new("upcase", 0));
        match replay.suggest("missing") {
            Err(SuggestError::CassetteMiss(q)) => assert_eq!(q, "missing"),
            other => panic!("expected cassette miss, got {other:?}"),
        }
        let lenient = ReplayProvider::lenient(Cassette::new("upcase", 0));
        assert!(lenient.suggest("missing").unwrap().is_none());
    }

    #[test]
    fn replay_is_deterministic() {
        let mut cassette = Cassette::new("web", 7);
        cassette.insert("a b", Some("a c".into()));
        let replay = ReplayProvider::new(cassette);
        let first = replay.suggest("a b").unwrap();
        let second = replay.suggest("a b").unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn save_load_save_is_byte_identical() {
        let mut cassette = Cassette::new("web", 1234567890);
        cassette.insert(
            "the hord disk sturage",
            Some("the hard-disk storage".into()),
        );
        cassette.insert("already correct words here", None);
        cassette.insert(
            "attribué à ces quatre directions de",
            Some("attribué a".into()),
        );

        let first = cassette.to_text();
        let reloaded = Cassette::read_from(first.as_bytes()).expect("parses");
        assert_eq!(reloaded, cassette);
        assert_eq!(reloaded.to_text(), first);
    }

    #[test]
    fn duplicate_lines_are_rejected_on_load() {
        let text = "{\"provider_id\":\"web\",\"created_unix\":0,\"version\":1}\n{\"q\":\"a\",\"s\":null}\n{\"q\":\"a\",\"s\":\"b\"}\n";
        match Cassette::read_from(text.as_bytes()) {
            Err(CassetteError::DuplicateQuery { line, query }) => {
                assert_eq!(line, 3);
                assert_eq!(query, "a");
            }
            other => panic!("expected duplicate error, got {other:?}"),
        }
    }

    #[test]
    fn derived_cassette_replays_the_after_text() {
        let before = "the quick brwn fox jumps over the lazy dog today in europe";
        let after = "the quick brown fox jumps over the lazy dog today in europe";
        let cassette = Cassette::derive_from_texts(before, after, 6, "replay");
        assert_eq!(cassette.len(), 2);
        assert_eq!(
            cassette.lookup("the quick brwn fox jumps over"),
            Some(Some("the quick brown fox jumps over"))
        );
        assert_eq!(cassette.lookup("the lazy dog today in europe"), Some(None));
    }

    #[test]
    fn derivation_never_records_empty_suggestions() {
        // The after text is so short that some window aligns to nothing;
        // those windows must be recorded as kept, not as empty rewrites.
        let before = "a b c d e f g h i j k l";
        let after = "a b c";
        let cassette = Cassette::derive_from_texts(before, after, 6, "replay");
        assert_eq!(cassette.len(), 2);
        for window in ["a b c d e f", "g h i j k l"] {
            if let Some(Some(suggestion)) = cassette.lookup(window) {
                assert!(!suggestion.trim().is_empty());
            }
        }
    }

    #[test]
    fn recording_provider_captures_answers() {
        let recorder = RecordingProvider::new(Upcase);
        assert!(recorder.suggest("plain").unwrap().is_none());
        assert!(recorder.suggest("xray").unwrap().is_some());
        let cassette = recorder.into_cassette();
        assert_eq!(cassette.len(), 2);
        assert_eq!(cassette.lookup("xray"), Some(Some("yarx")));
    }
}
