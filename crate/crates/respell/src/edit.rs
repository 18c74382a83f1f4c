//! Edit-distance primitives shared by the suggesters and the evaluator.

/// Character-level Levenshtein distance between two strings.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let cost = usize::from(ca != cb);
            cur[j + 1] = (cur[j] + 1).min(prev[j + 1] + 1).min(prev[j] + cost);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Levenshtein distance capped at `max`: returns `Some(d)` when the distance
/// is `d <= max`, `None` otherwise. Bails out as soon as the bound is proven
/// exceeded, which is what makes scanning a whole vocabulary affordable.
pub fn levenshtein_within(a: &str, b: &str, max: usize) -> Option<usize> {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.len().abs_diff(b.len()) > max {
        return None;
    }
    if a.is_empty() {
        return Some(b.len());
    }
    if b.is_empty() {
        return Some(a.len());
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        let mut row_min = cur[0];
        for (j, cb) in b.iter().enumerate() {
            let cost = usize::from(ca != cb);
            cur[j + 1] = (cur[j] + 1).min(prev[j + 1] + 1).min(prev[j] + cost);
            row_min = row_min.min(cur[j + 1]);
        }
        if row_min > max {
            return None;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let d = prev[b.len()];
    (d <= max).then_some(d)
}

/// Word-level edit distance: the minimal number of word substitutions,
/// insertions, and deletions turning `a` into `b`. Comparison is exact
/// (case-sensitive), so hyphenation and casing differences count.
pub fn word_edit_distance<A: AsRef<str>, B: AsRef<str>>(a: &[A], b: &[B]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, wa) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, wb) in b.iter().enumerate() {
            let cost = usize::from(wa.as_ref() != wb.as_ref());
            cur[j + 1] = (cur[j] + 1).min(prev[j + 1] + 1).min(prev[j] + cost);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levenshtein_basics() {
        assert_eq!(levenshtein("", ""), 0);
        assert_eq!(levenshtein("abc", ""), 3);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("hord", "hard"), 1);
        assert_eq!(levenshtein("hord", "horse"), 2);
    }

    #[test]
    fn levenshtein_handles_multibyte() {
        assert_eq!(levenshtein("attribué", "attribue"), 1);
        assert_eq!(levenshtein("gouche", "gauche"), 1);
    }

    #[test]
    fn bounded_agrees_with_unbounded() {
        let words = [
            "hord",
            "hard",
            "hold",
            "word",
            "horse",
            "",
            "h",
            "tulleling",
            "tunneling",
        ];
        for a in words {
            for b in words {
                for max in 0..4 {
                    let full = levenshtein(a, b);
                    let bounded = levenshtein_within(a, b, max);
                    assert_eq!(
                        bounded,
                        (full <= max).then_some(full),
                        "{a:?} {b:?} max={max}"
                    );
                }
            }
        }
    }

    #[test]
    fn word_distance_counts_substitutions_and_gaps() {
        let a = ["a", "b", "c"];
        assert_eq!(word_edit_distance(&a, &["a", "b", "c"]), 0);
        assert_eq!(word_edit_distance(&a, &["a", "x", "c"]), 1);
        assert_eq!(word_edit_distance(&a, &["a", "c"]), 1);
        assert_eq!(word_edit_distance(&a, &["a", "b", "b", "c"]), 1);
        assert_eq!(word_edit_distance::<&str, &str>(&[], &[]), 0);
    }

    #[test]
    fn word_distance_is_case_sensitive() {
        assert_eq!(
            word_edit_distance(&["Micro", "soft"], &["micro", "soft"]),
            1
        );
    }
}
