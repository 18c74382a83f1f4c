//! Local, trainable suggestion backend emulating a search engine's
//! did-you-mean mechanism: an exact-phrase frequency gate, per-word
//! edit-distance candidate generation, and backoff-scored rewrite selection
//! over the candidate lattice.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::edit::levenshtein_within;
use crate::suggest::{SuggestError, Suggestion, SuggestionProvider};

/// How many lattice paths the exhaustive search is willing to walk; larger
/// lattices fall back to a greedy beam.
const EXHAUSTIVE_PATH_LIMIT: u128 = 1_000_000;
const BEAM_WIDTH: usize = 8;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("training corpus contains no words")]
    EmptyCorpus,
}

#[derive(Debug, Error)]
pub enum IndexError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("index line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("index header declares {field}={declared} but the entries yield {actual}")]
    HeaderMismatch {
        field: &'static str,
        declared: u64,
        actual: u64,
    },
}

/// Occurrence counts of every 1..=order word window of a training corpus.
///
/// Counting is case-folded; the index additionally remembers the dominant
/// surface casing of each vocabulary word so suggestions can be emitted the
/// way the corpus usually spells them ("john kennedy" comes back as
/// "John Kennedy").
#[derive(Debug, Clone)]
pub struct NGramIndex {
    order: usize,
    /// Folded vocabulary; positions are the word ids used in `counts`.
    words: Vec<String>,
    word_ids: HashMap<String, u32>,
    /// Dominant surface casing per word id.
    display: Vec<String>,
    counts: HashMap<Box<[u32]>, u64>,
    total_unigrams: u64,
    /// Word ids sorted by folded spelling, for deterministic vocabulary scans.
    sorted_ids: Vec<u32>,
}

impl NGramIndex {
    /// Counts every contiguous 1..=order word window of the case-folded,
    /// whitespace-split corpus.
    pub fn train(corpus: &str, order: usize) -> Result<Self, TrainError> {
        assert!(order >= 1, "n-gram order must be at least 1");
        let tokens: Vec<&str> = corpus.split_whitespace().collect();
        if tokens.is_empty() {
            return Err(TrainError::EmptyCorpus);
        }

        let mut index = Self {
            order,
            words: Vec::new(),
            word_ids: HashMap::new(),
            display: Vec::new(),
            counts: HashMap::new(),
            total_unigrams: tokens.len() as u64,
            sorted_ids: Vec::new(),
        };

        let mut surface_counts: Vec<HashMap<&str, u64>> = Vec::new();
        let ids: Vec<u32> = tokens
            .iter()
            .map(|token| {
                let folded = token.to_lowercase();
                let id = match index.word_ids.get(&folded) {
                    Some(&id) => id,
                    None => {
                        let id = index.words.len() as u32;
                        index.word_ids.insert(folded.clone(), id);
                        index.words.push(folded);
                        surface_counts.push(HashMap::new());
                        id
                    }
                };
                *surface_counts[id as usize].entry(*token).or_insert(0) += 1;
                id
            })
            .collect();

        for n in 1..=order {
            for window in ids.windows(n) {
                *index.counts.entry(window.into()).or_insert(0) += 1;
            }
        }

        index.display = surface_counts
            .iter()
            .map(|variants| {
                variants
                    .iter()
                    .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
                    .map(|(surface, _)| (*surface).to_owned())
                    .expect("every word has at least one surface form")
            })
            .collect();
        index.rebuild_sorted_ids();
        Ok(index)
    }

    fn rebuild_sorted_ids(&mut self) {
        let mut ids: Vec<u32> = (0..self.words.len() as u32).collect();
        ids.sort_by(|&a, &b| self.words[a as usize].cmp(&self.words[b as usize]));
        self.sorted_ids = ids;
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab_size(&self) -> usize {
        self.words.len()
    }

    pub fn total_unigrams(&self) -> u64 {
        self.total_unigrams
    }

    /// Number of distinct n-grams stored across all orders.
    pub fn ngram_count(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total_unigrams == 0
    }

    /// Folded vocabulary in deterministic (sorted) order.
    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.sorted_ids
            .iter()
            .map(|&id| self.words[id as usize].as_str())
    }

    pub fn contains_word(&self, word: &str) -> bool {
        self.word_ids.contains_key(&word.to_lowercase())
    }

    /// Dominant surface casing of a vocabulary word.
    pub fn display_form(&self, word: &str) -> Option<&str> {
        self.word_ids
            .get(&word.to_lowercase())
            .map(|&id| self.display[id as usize].as_str())
    }

    fn id_of(&self, folded: &str) -> Option<u32> {
        self.word_ids.get(folded).copied()
    }

    fn count_ids(&self, gram: &[Option<u32>]) -> u64 {
        let mut ids = Vec::with_capacity(gram.len());
        for id in gram {
            match id {
                Some(id) => ids.push(*id),
                None => return 0,
            }
        }
        self.counts.get(ids.as_slice()).copied().unwrap_or(0)
    }

    /// Occurrence count of an exact word sequence (case-folded). Sequences
    /// longer than the index order have no stored count and yield 0.
    pub fn count(&self, words: &[&str]) -> u64 {
        if words.is_empty() || words.len() > self.order {
            return 0;
        }
        let ids: Vec<Option<u32>> = words
            .iter()
            .map(|w| self.id_of(&w.to_lowercase()))
            .collect();
        self.count_ids(&ids)
    }

    /// Phrase-frequency estimate used by the exact-match gate: the minimum
    /// count over all windows of `min(len, order)` consecutive words. A
    /// phrase can only have occurred as often as its rarest window.
    pub fn phrase_count(&self, words: &[&str]) -> u64 {
        if words.is_empty() {
            return 0;
        }
        let ids: Vec<Option<u32>> = words
            .iter()
            .map(|w| self.id_of(&w.to_lowercase()))
            .collect();
        self.phrase_count_ids(&ids)
    }

    fn phrase_count_ids(&self, ids: &[Option<u32>]) -> u64 {
        let k = ids.len().min(self.order);
        ids.windows(k)
            .map(|window| self.count_ids(window))
            .min()
            .unwrap_or(0)
    }

    /// Writes the index in its text format: a `NGRAMIDX v1` header followed by
    /// one `<count>\t<words>` line per n-gram, sorted bytewise by the n-gram
    /// text. Words are rendered in their dominant casing, so save → load →
    /// save is byte-identical.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "NGRAMIDX v1 order={} vocab={} total={}",
            self.order,
            self.words.len(),
            self.total_unigrams
        )?;
        let mut lines: Vec<(String, u64)> = self
            .counts
            .iter()
            .map(|(gram, &count)| {
                let text = gram
                    .iter()
                    .map(|&id| self.display[id as usize].as_str())
                    .collect::<Vec<_>>()
                    .join(" ");
                (text, count)
            })
            .collect();
        lines.sort_by(|a, b| a.0.as_bytes().cmp(b.0.as_bytes()));
        for (text, count) in lines {
            writeln!(w, "{count}\t{text}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("index text is UTF-8")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        let mut file = std::fs::File::create(path)?;
        self.write_to(&mut file)
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self, IndexError> {
        let mut lines = BufReader::new(r).lines();
        let header = lines.next().ok_or(IndexError::Malformed {
            line: 1,
            message: "missing header".into(),
        })??;
        let (order, vocab, total) = parse_header(&header)?;

        let mut index = Self {
            order,
            words: Vec::new(),
            word_ids: HashMap::new(),
            display: Vec::new(),
            counts: HashMap::new(),
            total_unigrams: total,
            sorted_ids: Vec::new(),
        };

        for (i, line) in lines.enumerate() {
            let line_no = i + 2;
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let (count, text) = line.split_once('\t').ok_or(IndexError::Malformed {
                line: line_no,
                message: "expected <count>\\t<n-gram>".into(),
            })?;
            let count: u64 = count.parse().map_err(|e| IndexError::Malformed {
                line: line_no,
                message: format!("bad count: {e}"),
            })?;
            let surface_words: Vec<&str> = text.split(' ').collect();
            if surface_words.is_empty() || surface_words.len() > order {
                return Err(IndexError::Malformed {
                    line: line_no,
                    message: format!(
                        "n-gram of length {} exceeds order {order}",
                        surface_words.len()
                    ),
                });
            }
            let ids: Vec<u32> = surface_words
                .iter()
                .map(|surface| {
                    let folded = surface.to_lowercase();
                    match index.word_ids.get(&folded) {
                        Some(&id) => id,
                        None => {
                            let id = index.words.len() as u32;
                            index.word_ids.insert(folded.clone(), id);
                            index.words.push(folded);
                            index.display.push((*surface).to_owned());
                            id
                        }
                    }
                })
                .collect();
            if index.counts.insert(ids.into(), count).is_some() {
                return Err(IndexError::Malformed {
                    line: line_no,
                    message: format!("duplicate n-gram {text:?}"),
                });
            }
        }

        if index.words.len() as u64 != vocab {
            return Err(IndexError::HeaderMismatch {
                field: "vocab",
                declared: vocab,
                actual: index.words.len() as u64,
            });
        }
        let unigram_total: u64 = index
            .counts
            .iter()
            .filter(|(gram, _)| gram.len() == 1)
            .map(|(_, &c)| c)
            .sum();
        if unigram_total != total {
            return Err(IndexError::HeaderMismatch {
                field: "total",
                declared: total,
                actual: unigram_total,
            });
        }
        index.rebuild_sorted_ids();
        Ok(index)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, IndexError> {
        Self::read_from(std::fs::File::open(path)?)
    }

    /// Count map keyed by folded word sequences; used for logical comparison.
    fn canonical_counts(&self) -> HashMap<Vec<&str>, u64> {
        self.counts
            .iter()
            .map(|(gram, &count)| {
                let key: Vec<&str> = gram
                    .iter()
                    .map(|&id| self.words[id as usize].as_str())
                    .collect();
                (key, count)
            })
            .collect()
    }

    fn canonical_display(&self) -> HashMap<&str, &str> {
        self.words
            .iter()
            .zip(&self.display)
            .map(|(w, d)| (w.as_str(), d.as_str()))
            .collect()
    }
}

impl PartialEq for NGramIndex {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
            && self.total_unigrams == other.total_unigrams
            && self.canonical_display() == other.canonical_display()
            && self.canonical_counts() == other.canonical_counts()
    }
}

impl Eq for NGramIndex {}

fn parse_header(header: &str) -> Result<(usize, u64, u64), IndexError> {
    let malformed = |message: &str| IndexError::Malformed {
        line: 1,
        message: message.into(),
    };
    let rest = header
        .strip_prefix("NGRAMIDX v1 ")
        .ok_or_else(|| malformed("expected \"NGRAMIDX v1\" header"))?;
    let mut order = None;
    let mut vocab = None;
    let mut total = None;
    for field in rest.split(' ') {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| malformed("header fields must be key=value"))?;
        let value: u64 = value
            .parse()
            .map_err(|_| malformed("header values must be integers"))?;
        match key {
            "order" => order = Some(value),
            "vocab" => vocab = Some(value),
            "total" => total = Some(value),
            _ => return Err(malformed(&format!("unknown header field {key:?}"))),
        }
    }
    match (order, vocab, total) {
        (Some(order), Some(vocab), Some(total)) if order >= 1 => Ok((order as usize, vocab, total)),
        _ => Err(malformed("header needs order>=1, vocab, and total")),
    }
}

/// Exactly the vocabulary words within Levenshtein distance
/// `max_edit_distance` of `word` (case-folded), in sorted order. The word
/// itself is included whenever it is in the vocabulary.
pub fn candidates(word: &str, index: &NGramIndex, max_edit_distance: usize) -> Vec<String> {
    let folded = word.to_lowercase();
    index
        .vocabulary()
        .filter(|vocab_word| levenshtein_within(&folded, vocab_word, max_edit_distance).is_some())
        .map(str::to_owned)
        .collect()
}

/// Backoff-smoothed score of a phrase: the product over positions of the
/// conditional frequency at the highest n-gram order with a nonzero count,
/// discounted by `backoff_alpha` per order dropped. Unknown words score
/// `1 / (total_unigrams * vocab_size)`.
///
/// Scores rank candidate rewrites; they are not calibrated probabilities.
pub fn score(phrase: &[&str], index: &NGramIndex, backoff_alpha: f64) -> f64 {
    if index.is_empty() {
        return 0.0;
    }
    let ids: Vec<Option<u32>> = phrase
        .iter()
        .map(|w| index.id_of(&w.to_lowercase()))
        .collect();
    let mut product = 1.0;
    for position in 0..ids.len() {
        product *= position_factor(index, &ids, position, backoff_alpha);
    }
    product
}

/// The per-position conditional factor of [`score`]. `ids[..position]` is the
/// already-fixed context.
fn position_factor(index: &NGramIndex, ids: &[Option<u32>], position: usize, alpha: f64) -> f64 {
    let highest = (position + 1).min(index.order);
    for k in (1..=highest).rev() {
        let gram = &ids[position + 1 - k..=position];
        let numerator = index.count_ids(gram);
        if numerator == 0 {
            continue;
        }
        let denominator = if k == 1 {
            index.total_unigrams
        } else {
            index.count_ids(&gram[..k - 1])
        };
        let dropped = (highest - k) as i32;
        return (numerator as f64 / denominator as f64) * alpha.powi(dropped);
    }
    1.0 / (index.total_unigrams as f64 * index.vocab_size() as f64)
}

/// Thresholds steering [`NGramSuggester`]. The defaults are working values,
/// not claims: order, distance bound, discount, and margin are all exposed so
/// every behavior is overridable.
#[derive(Debug, Clone)]
pub struct SuggesterConfig {
    /// Per-word candidate bound for lattice construction.
    pub max_edit_distance: usize,
    /// Discount applied per backed-off order when scoring.
    pub backoff_alpha: f64,
    /// Phrase frequency at or above which a query is accepted verbatim.
    pub min_exact_count: u64,
    /// A rewrite must score at least this multiple of the query's own score.
    pub score_margin: f64,
    /// Compare suggestion and query case-insensitively when deciding whether
    /// a rewrite differs. With `false`, case-only rewrites become visible.
    pub case_fold: bool,
}

impl Default for SuggesterConfig {
    fn default() -> Self {
        Self {
            max_edit_distance: 2,
            backoff_alpha: 0.4,
            min_exact_count: 1,
            score_margin: 1.5,
            case_fold: true,
        }
    }
}

impl SuggesterConfig {
    fn validate(&self) {
        assert!(self.max_edit_distance > 0, "max_edit_distance must be > 0");
        assert!(self.backoff_alpha > 0.0, "backoff_alpha must be > 0");
        assert!(self.min_exact_count > 0, "min_exact_count must be > 0");
        assert!(self.score_margin > 0.0, "score_margin must be > 0");
    }
}

/// One candidate word at a lattice position.
struct CandTok {
    folded: String,
    id: Option<u32>,
}

/// The local suggestion provider: a trained index plus thresholds.
pub struct NGramSuggester {
    index: NGramIndex,
    config: SuggesterConfig,
}

impl NGramSuggester {
    pub fn new(index: NGramIndex, config: SuggesterConfig) -> Self {
        config.validate();
        Self { index, config }
    }

    pub fn with_defaults(index: NGramIndex) -> Self {
        Self::new(index, SuggesterConfig::default())
    }

    pub fn index(&self) -> &NGramIndex {
        &self.index
    }

    pub fn config(&self) -> &SuggesterConfig {
        &self.config
    }

    /// Builds the per-position candidate sets: every vocabulary word within
    /// the edit bound, plus the original word so "keep it" is always a path.
    fn lattice(&self, folded: &[String]) -> Vec<Vec<CandTok>> {
        folded
            .iter()
            .map(|word| {
                let mut set = candidates(word, &self.index, self.config.max_edit_distance);
                if let Err(slot) = set.binary_search(word) {
                    set.insert(slot, word.clone());
                }
                set.into_iter()
                    .map(|folded| {
                        let id = self.index.id_of(&folded);
                        CandTok { folded, id }
                    })
                    .collect()
            })
            .collect()
    }
}

impl SuggestionProvider for NGramSuggester {
    fn id(&self) -> &str {
        "ngram"
    }

    fn suggest(&self, query: &str) -> Result<Option<Suggestion>, SuggestError> {
        let raw: Vec<&str> = query.split_whitespace().collect();
        if raw.is_empty() {
            return Err(SuggestError::EmptyQuery);
        }
        if self.index.is_empty() {
            return Err(SuggestError::EmptyIndex);
        }
        let folded: Vec<String> = raw.iter().map(|w| w.to_lowercase()).collect();
        let folded_refs: Vec<&str> = folded.iter().map(String::as_str).collect();

        // Step 1: a phrase seen often enough is accepted as-is.
        if self.index.phrase_count(&folded_refs) >= self.config.min_exact_count {
            return Ok(None);
        }

        // Step 2: best path through the candidate lattice.
        let lattice = self.lattice(&folded);
        let paths: u128 = lattice
            .iter()
            .map(|set| set.len() as u128)
            .fold(1u128, |acc, len| acc.saturating_mul(len));
        let alpha = self.config.backoff_alpha;
        let best = if paths <= EXHAUSTIVE_PATH_LIMIT {
            exhaustive_best(&self.index, &lattice, alpha)
        } else {
            beam_best(&self.index, &lattice, alpha, BEAM_WIDTH)
        };
        let Some((best_choice, best_score)) = best else {
            return Ok(None);
        };

        // Step 3: emit only a clearly better, genuinely different rewrite.
        let query_ids: Vec<Option<u32>> = folded.iter().map(|w| self.index.id_of(w)).collect();
        let mut query_score = 1.0;
        for position in 0..query_ids.len() {
            query_score *= position_factor(&self.index, &query_ids, position, alpha);
        }
        if best_score < self.config.score_margin * query_score {
            return Ok(None);
        }

        let corrected_words: Vec<&str> = best_choice
            .iter()
            .enumerate()
            .map(|(position, &slot)| {
                let tok = &lattice[position][slot];
                match tok.id {
                    Some(id) => self.index.display[id as usize].as_str(),
                    None => raw[position],
                }
            })
            .collect();
        let corrected = corrected_words.join(" ");

        let differs = if self.config.case_fold {
            (0..folded.len()).any(|p| lattice[p][best_choice[p]].folded != folded[p])
        } else {
            corrected != raw.join(" ")
        };
        if !differs {
            return Ok(None);
        }

        Ok(Some(Suggestion {
            query: query.to_owned(),
            corrected,
            provider_id: "ngram".to_owned(),
        }))
    }
}

/// Walks every lattice path in lexicographic order, keeping the first path
/// with the strictly highest score, so ties resolve to the lexicographically
/// smallest phrase. Factors multiply left to right.
fn exhaustive_best(
    index: &NGramIndex,
    lattice: &[Vec<CandTok>],
    alpha: f64,
) -> Option<(Vec<usize>, f64)> {
    fn walk(
        index: &NGramIndex,
        lattice: &[Vec<CandTok>],
        alpha: f64,
        ids: &mut Vec<Option<u32>>,
        choice: &mut Vec<usize>,
        product: f64,
        best: &mut Option<(Vec<usize>, f64)>,
    ) {
        let position = ids.len();
        if position == lattice.len() {
            if best.as_ref().is_none_or(|(_, s)| product > *s) {
                *best = Some((choice.clone(), product));
            }
            return;
        }
        for (slot, tok) in lattice[position].iter().enumerate() {
            ids.push(tok.id);
            choice.push(slot);
            let factor = position_factor(index, ids, position, alpha);
            walk(index, lattice, alpha, ids, choice, product * factor, best);
            ids.pop();
            choice.pop();
        }
    }

    let mut best = None;
    walk(
        index,
        lattice,
        alpha,
        &mut Vec::with_capacity(lattice.len()),
        &mut Vec::with_capacity(lattice.len()),
        1.0,
        &mut best,
    );
    best
}

/// Position-by-position greedy beam: after each position only the `width`
/// best prefixes survive, ordered by score and then lexicographically.
fn beam_best(
    index: &NGramIndex,
    lattice: &[Vec<CandTok>],
    alpha: f64,
    width: usize,
) -> Option<(Vec<usize>, f64)> {
    struct Entry {
        ids: Vec<Option<u32>>,
        choice: Vec<usize>,
        score: f64,
    }

    let mut beam = vec![Entry {
        ids: Vec::new(),
        choice: Vec::new(),
        score: 1.0,
    }];
    for (position, set) in lattice.iter().enumerate() {
        let mut extensions: Vec<Entry> = Vec::with_capacity(beam.len() * set.len());
        for entry in &beam {
            for (slot, tok) in set.iter().enumerate() {
                let mut ids = entry.ids.clone();
                ids.push(tok.id);
                let factor = position_factor(index, &ids, position, alpha);
                let mut choice = entry.choice.clone();
                choice.push(slot);
                extensions.push(Entry {
                    ids,
                    choice,
                    score: entry.score * factor,
                });
            }
        }
        extensions.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.choice.cmp(&b.choice))
        });
        extensions.truncate(width);
        beam = extensions;
    }
    beam.into_iter().next().map(|e| (e.choice, e.score))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy_index(corpus: &str, order: usize) -> NGramIndex {
        NGramIndex::train(corpus, order).expect("toy corpus trains")
    }

    #[test]
    fn train_counts_bigrams_directly() {
        let index = toy_index("the boy the boy scout", 2);
        assert_eq!(index.count(&["the", "boy"]), 2);
        assert_eq!(index.count(&["boy", "the"]), 1);
        assert_eq!(index.count(&["boy", "scout"]), 1);
        assert_eq!(index.count(&["scout", "the"]), 0);
        assert_eq!(index.vocab_size(), 3);
        assert_eq!(index.total_unigrams(), 5);
    }

    #[test]
    fn counting_is_case_folded() {
        let index = toy_index("The boy and the boy", 2);
        assert_eq!(index.count(&["the", "boy"]), 2);
        assert_eq!(index.count(&["The", "boy"]), 2);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(
            NGramIndex::train("  \n ", 3),
            Err(TrainError::EmptyCorpus)
        ));
    }

    #[test]
    fn candidates_filters_by_edit_distance() {
        let index = toy_index("hard hold word horse", 1);
        assert_eq!(candidates("hord", &index, 1), ["hard", "hold", "word"]);
        assert_eq!(candidates("hard", &index, 0), ["hard"]);
        assert!(candidates("zzzz", &index, 1).is_empty());
    }

    #[test]
    fn seen_text_scores_positive() {
        let index = toy_index("the boy scout", 3);
        assert!(score(&["the", "boy", "scout"], &index, 0.4) > 0.0);
    }

    #[test]
    fn score_prefers_attested_order() {
        let index = toy_index("the boy the boy scout the boy", 2);
        // Hand-computed from the counts: the=3 boy=3 scout=1, total=7;
        // "the boy"=3, "boy the"=1, "boy scout"=1, "scout the"=1.
        let forward = score(&["the", "boy"], &index, 0.4);
        let backward = score(&["boy", "the"], &index, 0.4);
        assert!((forward - (3.0 / 7.0)).abs() < 1e-12);
        assert!((backward - (3.0 / 7.0) * (1.0 / 3.0)).abs() < 1e-12);
        assert!(forward > backward);
    }

    #[test]
    fn unknown_single_word_scores_the_floor() {
        let index = toy_index("one two three", 2);
        let floor = 1.0 / (3.0 * 3.0);
        assert!((score(&["zebra"], &index, 0.4) - floor).abs() < 1e-15);
    }

    #[test]
    fn suggests_rewrite_of_misspelled_phrase() {
        let index = toy_index("the hard disk storage is the hard disk storage is", 3);
        let suggester = NGramSuggester::with_defaults(index);
        let suggestion = suggester.suggest("the hord disk").unwrap().unwrap();
        assert_eq!(suggestion.corrected, "the hard disk");
        assert_eq!(suggestion.provider_id, "ngram");
    }

    #[test]
    fn frequent_exact_phrase_is_accepted_verbatim() {
        let index = toy_index("the hard disk storage is fast", 3);
        let suggester = NGramSuggester::with_defaults(index);
        assert!(suggester.suggest("hard disk storage").unwrap().is_none());
        assert!(suggester.suggest("storage").unwrap().is_none());
    }

    #[test]
    fn all_unknown_words_without_candidates_yield_nothing() {
        let index = toy_index("alpha beta gamma delta", 3);
        let suggester = NGramSuggester::with_defaults(index);
        assert!(suggester.suggest("zzzzzzz qqqqqqq").unwrap().is_none());
    }

    #[test]
    fn empty_query_and_empty_index_are_errors() {
        let index = toy_index("a b", 2);
        let suggester = NGramSuggester::with_defaults(index);
        assert!(matches!(
            suggester.suggest("  "),
            Err(SuggestError::EmptyQuery)
        ));

        let empty = NGramIndex::read_from("NGRAMIDX v1 order=3 vocab=0 total=0\n".as_bytes())
            .expect("empty index parses");
        let suggester = NGramSuggester::with_defaults(empty);
        assert!(matches!(
            suggester.suggest("whatever"),
            Err(SuggestError::EmptyIndex)
        ));
    }

    #[test]
    fn suggestion_restores_dominant_casing() {
        let index = toy_index(
            "John Kennedy spoke today . John Kennedy was heard . people heard John Kennedy",
            3,
        );
        let suggester = NGramSuggester::with_defaults(index);
        let suggestion = suggester.suggest("jahn cenedy").unwrap().unwrap();
        assert_eq!(suggestion.corrected, "John Kennedy");
    }

    #[test]
    fn save_format_is_exact_and_sorted() {
        let index = toy_index("the boy the boy scout", 2);
        assert_eq!(
            index.to_text(),
            "NGRAMIDX v1 order=2 vocab=3 total=5\n\
             2\tboy\n\
             1\tboy scout\n\
             1\tboy the\n\
             1\tscout\n\
             2\tthe\n\
             2\tthe boy\n"
        );
    }

    #[test]
    fn save_load_round_trips_bit_exactly() {
        let index = toy_index(
            "John Kennedy spoke . the hard disk storage is fast . attribué à ces quatre",
            3,
        );
        let text = index.to_text();
        let reloaded = NGramIndex::read_from(text.as_bytes()).expect("round trip parses");
        assert_eq!(reloaded, index);
        assert_eq!(reloaded.to_text(), text);
    }

    #[test]
    fn load_rejects_header_mismatches() {
        let bad = "NGRAMIDX v1 order=2 vocab=9 total=1\n1\thello\n";
        assert!(matches!(
            NGramIndex::read_from(bad.as_bytes()),
            Err(IndexError::HeaderMismatch { field: "vocab", .. })
        ));
    }

    fn arb_corpus() -> impl Strategy<Value = String> {
        proptest::collection::vec("[ab]{1,3}", 1..60).prop_map(|words| words.join(" "))
    }

    proptest! {
        // Brute-force recount with an independent counter: for every stored
        // n-gram, a longer prefix can never be more frequent than its head.
        #[test]
        fn counts_are_monotone_and_match_a_recount(corpus in arb_corpus(), order in 1usize..4) {
            let index = NGramIndex::train(&corpus, order).unwrap();
            let tokens: Vec<String> =
                corpus.split_whitespace().map(|w| w.to_lowercase()).collect();
            for n in 1..=order {
                for window in tokens.windows(n) {
                    let gram: Vec<&str> = window.iter().map(String::as_str).collect();
                    let mut recount = 0u64;
                    for other in tokens.windows(n) {
                        if other.iter().map(String::as_str).eq(gram.iter().copied()) {
                            recount += 1;
                        }
                    }
                    prop_assert_eq!(index.count(&gram), recount);
                    if n >= 2 {
                        prop_assert!(index.count(&gram) <= index.count(&gram[..n - 1]));
                    }
                }
            }
        }

        // Re-suggesting a suggestion either stops, repeats the same text,
        // or (when the rewrite drifts onto words reachable only from the
        // first suggestion) scores at least `score_margin` higher again. Strict
        // geometric ascent rules out cycles, so repeated application always
        // terminates. (A hard one-step fixed point does not hold in general:
        // on corpus "a aa b ba" with distance 1, "bb ab" → "b a" → "a aa",
        // because "a" is one edit from "b" but two from "bb".)
        #[test]
        fn repeated_suggestions_ascend_by_the_margin(corpus in arb_corpus(), query_words in proptest::collection::vec("[ab]{1,3}", 1..4)) {
            let config = SuggesterConfig {
                max_edit_distance: 1,
                ..SuggesterConfig::default()
            };
            let margin = config.score_margin;
            let alpha = config.backoff_alpha;
            let index = NGramIndex::train(&corpus, 2).unwrap();
            let suggester = NGramSuggester::new(index.clone(), config);
            let query = query_words.join(" ");
            if let Ok(Some(first)) = suggester.suggest(&query) {
                match suggester.suggest(&first.corrected) {
                    Ok(None) => {}
                    Ok(Some(second)) if second.corrected == first.corrected => {}
                    Ok(Some(second)) => {
                        let first_words: Vec<&str> = first.corrected.split_whitespace().collect();
                        let second_words: Vec<&str> = second.corrected.split_whitespace().collect();
                        let first_score = score(&first_words, &index, alpha);
                        let second_score = score(&second_words, &index, alpha);
                        prop_assert!(
                            second_score >= margin * first_score,
                            "drifting rewrite must clear the margin again: {} -> {} -> {} ({} < {} * {})",
                            query, first.corrected, second.corrected, second_score, margin, first_score
                        );
                    }
                    Err(e) => return Err(TestCaseError::fail(format!("unexpected error: {e}"))),
                }
            }
        }
    }
}
