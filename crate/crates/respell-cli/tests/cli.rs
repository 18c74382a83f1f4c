//! End-to-end tests of the `respell` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn respell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_respell"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn path_str(path: &Path) -> &str {
    path.to_str().expect("utf-8 path")
}

fn words(text: &str) -> Vec<&str> {
    text.split_whitespace().collect()
}

#[test]
fn train_writes_a_deterministic_index() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.txt");
    std::fs::write(&corpus, "the boy the boy scout\n").unwrap();
    let index_a = dir.path().join("a.idx");
    let index_b = dir.path().join("b.idx");

    let out = respell(&[
        "train",
        "--corpus",
        path_str(&corpus),
        "--index",
        path_str(&index_a),
        "--order",
        "2",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    // Vocabulary size verified against an independent recount of the corpus.
    let distinct = ["the", "boy", "scout"].len();
    assert!(stdout(&out).contains(&format!("{distinct} vocabulary words")));

    let header = std::fs::read_to_string(&index_a).unwrap();
    assert!(
        header.starts_with("NGRAMIDX v1 order=2 vocab=3 total=5\n"),
        "{header}"
    );

    let out = respell(&[
        "train",
        "--corpus",
        path_str(&corpus),
        "--index",
        path_str(&index_b),
        "--order",
        "2",
    ]);
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(&index_a).unwrap(),
        std::fs::read(&index_b).unwrap(),
        "training twice must produce bit-identical files"
    );
}

#[test]
fn train_rejects_unreadable_or_empty_corpora() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "  \n ").unwrap();
    let index = dir.path().join("out.idx");

    let out = respell(&[
        "train",
        "--corpus",
        path_str(&empty),
        "--index",
        path_str(&index),
    ]);
    assert!(!out.status.success());
    assert!(
        stderr(&out).contains("no words"),
        "stderr: {}",
        stderr(&out)
    );

    let missing = dir.path().join("missing.txt");
    let out = respell(&[
        "train",
        "--corpus",
        path_str(&missing),
        "--index",
        path_str(&index),
    ]);
    assert!(!out.status.success());
}

#[test]
fn correct_with_replay_reproduces_the_corrected_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("corrected.txt");
    let out = respell(&[
        "correct",
        "--input",
        path_str(&fixtures().join("english/asr.txt")),
        "--output",
        path_str(&output),
        "--provider",
        "replay",
        "--cassette",
        path_str(&fixtures().join("english/replay.cassette.jsonl")),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("27 tokens"));

    let produced = std::fs::read_to_string(&output).unwrap();
    let expected = std::fs::read_to_string(fixtures().join("english/corrected.txt")).unwrap();
    assert_eq!(words(&produced), words(&expected));

    let audit = std::fs::read_to_string(dir.path().join("corrected.txt.audit.jsonl")).unwrap();
    assert_eq!(audit.lines().count(), 27);
}

#[test]
fn correct_requires_the_provider_resources() {
    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("out.txt");
    let out = respell(&[
        "correct",
        "--input",
        path_str(&fixtures().join("english/asr.txt")),
        "--output",
        path_str(&output),
        "--provider",
        "replay",
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("--cassette"));

    let out = respell(&[
        "correct",
        "--input",
        path_str(&fixtures().join("english/asr.txt")),
        "--output",
        path_str(&output),
        "--provider",
        "replay",
        "--cassette",
        path_str(&dir.path().join("nope.jsonl")),
    ]);
    assert!(!out.status.success());
}

#[test]
fn web_provider_requires_explicit_network_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let out = respell(&[
        "correct",
        "--input",
        path_str(&fixtures().join("english/asr.txt")),
        "--output",
        path_str(&dir.path().join("out.txt")),
        "--provider",
        "web",
        "--endpoint",
        "https://example.test/?q={}",
    ]);
    assert!(!out.status.success());
    assert!(
        stderr(&out).contains("--allow-network"),
        "stderr: {}",
        stderr(&out)
    );
}

#[test]
fn worker_count_does_not_change_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let serial = dir.path().join("serial.txt");
    let parallel = dir.path().join("parallel.txt");
    for (output, workers) in [(&serial, "1"), (&parallel, "4")] {
        let out = respell(&[
            "correct",
            "--input",
            path_str(&fixtures().join("french/asr.txt")),
            "--output",
            path_str(output),
            "--provider",
            "replay",
            "--cassette",
            path_str(&fixtures().join("french/replay.cassette.jsonl")),
            "--workers",
            workers,
        ]);
        assert!(out.status.success(), "stderr: {}", stderr(&out));
    }
    assert_eq!(
        std::fs::read(&serial).unwrap(),
        std::fs::read(&parallel).unwrap()
    );
}

#[test]
fn evaluate_manifest_prints_the_reference_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("report.csv");
    let out = respell(&[
        "evaluate",
        "--manifest",
        path_str(&fixtures().join("manifest.json")),
        "--csv",
        path_str(&csv),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    for cell in [
        "14.2%",
        "3.1%",
        "14.5%",
        "2.7%",
        "4.58 (458%)",
        "5.37 (537%)",
        "497%",
    ] {
        assert!(text.contains(cell), "missing {cell:?} in:\n{text}");
    }

    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert!(csv_text.contains("english,161,23,5,14.2%,3.1%,4.58"));
    assert!(csv_text.contains("french,110,16,3,14.5%,2.7%,5.37"));
    assert!(csv_text.contains("average,,,,,,497%"));
}

#[test]
fn evaluate_identical_pair_reports_ratio_one() {
    let out = respell(&[
        "evaluate",
        "--before",
        path_str(&fixtures().join("english/corrected.txt")),
        "--after",
        path_str(&fixtures().join("english/corrected.txt")),
        "--before-annotations",
        path_str(&fixtures().join("english/corrected_annotations.json")),
        "--after-annotations",
        path_str(&fixtures().join("english/corrected_annotations.json")),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(
        stdout(&out).contains("1.00 (100%)"),
        "stdout: {}",
        stdout(&out)
    );
}

#[test]
fn evaluate_alignment_mode_uses_the_reference() {
    let out = respell(&[
        "evaluate",
        "--before",
        path_str(&fixtures().join("english/asr.txt")),
        "--after",
        path_str(&fixtures().join("english/corrected.txt")),
        "--reference",
        path_str(&fixtures().join("english/reference.txt")),
        "--label",
        "english-aligned",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    // Frozen alignment counts for the fixture pair: 21 before, 8 after.
    assert!(text.contains("21"), "{text}");
    assert!(text.contains('8'), "{text}");
}

#[test]
fn evaluate_needs_annotations_or_a_reference() {
    let out = respell(&[
        "evaluate",
        "--before",
        path_str(&fixtures().join("english/asr.txt")),
        "--after",
        path_str(&fixtures().join("english/corrected.txt")),
    ]);
    assert!(!out.status.success());
    assert!(
        stderr(&out).contains("--reference"),
        "stderr: {}",
        stderr(&out)
    );
}

#[test]
fn record_and_replay_round_trip_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.txt");
    std::fs::write(
        &corpus,
        "the hard disk storage is fast\nthe hard disk storage is safe\n",
    )
    .unwrap();
    let index = dir.path().join("tech.idx");
    let out = respell(&[
        "train",
        "--corpus",
        path_str(&corpus),
        "--index",
        path_str(&index),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));

    let queries = dir.path().join("queries.txt");
    std::fs::write(&queries, "the hord disk\nthe hard disk\n\n").unwrap();
    let cassette = dir.path().join("local.cassette.jsonl");
    let out = respell(&[
        "record",
        "--provider",
        "ngram",
        "--index",
        path_str(&index),
        "--queries",
        path_str(&queries),
        "--cassette-out",
        path_str(&cassette),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("recorded 2 entries"));

    let loaded = respell::suggest::Cassette::load(&cassette).unwrap();
    assert_eq!(loaded.lookup("the hord disk"), Some(Some("the hard disk")));
    assert_eq!(loaded.lookup("the hard disk"), Some(None));

    // The recorded cassette drives a replay correction.
    let input = dir.path().join("input.txt");
    std::fs::write(&input, "the hord disk\n").unwrap();
    let output = dir.path().join("output.txt");
    let out = respell(&[
        "correct",
        "--input",
        path_str(&input),
        "--output",
        path_str(&output),
        "--provider",
        "replay",
        "--cassette",
        path_str(&cassette),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert_eq!(std::fs::read_to_string(&output).unwrap(), "the hard disk\n");
}

#[test]
fn correct_with_ngram_provider_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.txt");
    std::fs::write(
        &corpus,
        "the hard disk storage is fast and the hard disk storage is safe\n",
    )
    .unwrap();
    let index = dir.path().join("tech.idx");
    let out = respell(&[
        "train",
        "--corpus",
        path_str(&corpus),
        "--index",
        path_str(&index),
    ]);
    assert!(out.status.success());

    let input = dir.path().join("input.txt");
    std::fs::write(&input, "the hord disk\n").unwrap();
    let output = dir.path().join("output.txt");
    let cassette = dir.path().join("recorded.cassette.jsonl");
    let out = respell(&[
        "correct",
        "--input",
        path_str(&input),
        "--output",
        path_str(&output),
        "--provider",
        "ngram",
        "--index",
        path_str(&index),
        "--record-cassette",
        path_str(&cassette),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert_eq!(std::fs::read_to_string(&output).unwrap(), "the hard disk\n");
    assert!(stdout(&out).contains("1 tokens, 1 replaced"));

    let recorded = respell::suggest::Cassette::load(&cassette).unwrap();
    assert_eq!(
        recorded.lookup("the hord disk"),
        Some(Some("the hard disk"))
    );
}
