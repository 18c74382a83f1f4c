use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use respell::eval::{
    build_report, count_errors_aligned, count_errors_annotated, ErrorAnnotation, ReportRow,
    RoundingMode,
};
use respell::ngram::{NGramIndex, NGramSuggester, SuggesterConfig};
use respell::pipeline::{
    post_edit, post_edit_parallel, write_audit, PipelineConfig, PipelineError,
};
use respell::suggest::{Cassette, RecordingProvider, ReplayProvider, SuggestionProvider};
use respell::transcript::{tokenize, Transcript};
use respell::web::{WebConfig, WebSuggester};

use crate::{
    CorrectArgs, EvaluateArgs, ProviderArgs, ProviderKind, RecordArgs, Rounding, TrainArgs,
};

pub fn train(args: TrainArgs) -> Result<()> {
    let corpus = std::fs::read_to_string(&args.corpus)
        .with_context(|| format!("reading corpus {}", args.corpus.display()))?;
    let index = NGramIndex::train(&corpus, args.order as usize)?;
    index
        .save(&args.index)
        .with_context(|| format!("writing index {}", args.index.display()))?;
    println!(
        "trained order-{} index: {} vocabulary words, {} n-grams, {} corpus tokens -> {}",
        index.order(),
        index.vocab_size(),
        index.ngram_count(),
        index.total_unigrams(),
        args.index.display()
    );
    Ok(())
}

/// The RESPELL_WEB_ENDPOINT environment variable overrides --endpoint.
fn web_endpoint(args: &ProviderArgs) -> Result<String> {
    if let Ok(endpoint) = std::env::var("RESPELL_WEB_ENDPOINT") {
        return Ok(endpoint);
    }
    args.endpoint
        .clone()
        .context("provider \"web\" needs --endpoint (or RESPELL_WEB_ENDPOINT)")
}

fn build_provider(args: &ProviderArgs) -> Result<Box<dyn SuggestionProvider + Sync>> {
    match args.provider {
        ProviderKind::Ngram => {
            let path = args
                .index
                .as_ref()
                .context("provider \"ngram\" needs --index")?;
            let index = NGramIndex::load(path)
                .with_context(|| format!("loading index {}", path.display()))?;
            let config = SuggesterConfig {
                max_edit_distance: args.max_edit_distance as usize,
                backoff_alpha: args.alpha,
                min_exact_count: args.min_exact_count,
                score_margin: args.margin,
                case_fold: !args.no_case_fold,
            };
            Ok(Box::new(NGramSuggester::new(index, config)))
        }
        ProviderKind::Replay => {
            let path = args
                .cassette
                .as_ref()
                .context("provider \"replay\" needs --cassette")?;
            let cassette = Cassette::load(path)
                .with_context(|| format!("loading cassette {}", path.display()))?;
            Ok(Box::new(ReplayProvider::new(cassette)))
        }
        ProviderKind::Web => {
            if !args.allow_network {
                bail!("provider \"web\" performs live requests; pass --allow-network to opt in");
            }
            let mut config = WebConfig::new(web_endpoint(args)?)?;
            config.marker_text = args.marker.clone();
            config.request_delay = std::time::Duration::from_millis(args.delay_ms);
            config.timeout = std::time::Duration::from_millis(args.timeout_ms);
            config.validate()?;
            Ok(Box::new(WebSuggester::new(config)))
        }
    }
}

pub fn correct(args: CorrectArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading input {}", args.input.display()))?;
    let provider = build_provider(&args.provider)?;
    let (plain, recorder) = if args.record_cassette.is_some() {
        (None, Some(RecordingProvider::new(provider)))
    } else {
        (Some(provider), None)
    };

    let config = PipelineConfig {
        window_width: args.window as usize,
        workers: args.workers as usize,
        strict_provider_errors: !args.lenient,
    };
    let audit_path = args
        .audit
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.audit.jsonl", args.output.display())));

    let outcome = match (&plain, &recorder, config.workers) {
        (Some(provider), _, 1) => post_edit(&text, provider, &config),
        (Some(provider), _, _) => post_edit_parallel(&text, provider, &config),
        (_, Some(recorder), 1) => post_edit(&text, recorder, &config),
        (_, Some(recorder), _) => post_edit_parallel(&text, recorder, &config),
        (None, None, _) => unreachable!("provider is either plain or recording"),
    };

    let result = match outcome {
        Ok(result) => result,
        Err(PipelineError::Provider {
            token_index,
            source,
            partial,
        }) => {
            let mut audit = Vec::new();
            write_audit(&partial, &mut audit)?;
            std::fs::write(&audit_path, audit)
                .with_context(|| format!("writing audit {}", audit_path.display()))?;
            bail!(
                "provider failed on token {token_index}: {source} (partial audit written to {})",
                audit_path.display()
            );
        }
        Err(e) => return Err(e.into()),
    };

    std::fs::write(&args.output, format!("{}\n", result.corrected_text))
        .with_context(|| format!("writing output {}", args.output.display()))?;
    let mut audit = Vec::new();
    write_audit(&result.records, &mut audit)?;
    std::fs::write(&audit_path, audit)
        .with_context(|| format!("writing audit {}", audit_path.display()))?;

    if let (Some(recorder), Some(path)) = (recorder, args.record_cassette.as_ref()) {
        recorder
            .into_cassette()
            .save(path)
            .with_context(|| format!("writing cassette {}", path.display()))?;
    }

    let errored = result
        .records
        .iter()
        .filter(|r| r.action == respell::pipeline::Action::Errored)
        .count();
    let mut summary = format!(
        "{} tokens, {} replaced",
        result.token_count(),
        result.replaced_count()
    );
    if errored > 0 {
        summary.push_str(&format!(", {errored} errored"));
    }
    println!("{summary} -> {}", args.output.display());
    Ok(())
}

#[derive(Deserialize)]
struct ManifestRow {
    label: String,
    before: PathBuf,
    after: PathBuf,
    #[serde(default)]
    before_annotations: Option<PathBuf>,
    #[serde(default)]
    after_annotations: Option<PathBuf>,
    #[serde(default)]
    reference: Option<PathBuf>,
}

#[derive(Deserialize)]
struct Manifest {
    rows: Vec<ManifestRow>,
}

fn row_from_paths(
    label: &str,
    before: &Path,
    after: &Path,
    before_annotations: Option<&Path>,
    after_annotations: Option<&Path>,
    reference: Option<&Path>,
) -> Result<ReportRow> {
    let before_text =
        std::fs::read_to_string(before).with_context(|| format!("reading {}", before.display()))?;
    let after_text =
        std::fs::read_to_string(after).with_context(|| format!("reading {}", after.display()))?;

    match (before_annotations, after_annotations, reference) {
        (Some(before_path), Some(after_path), _) => {
            let before_annotation = ErrorAnnotation::load(before_path)
                .with_context(|| format!("loading {}", before_path.display()))?;
            let after_annotation = ErrorAnnotation::load(after_path)
                .with_context(|| format!("loading {}", after_path.display()))?;
            before_annotation.validate_against(Transcript::new(before_text, "").words())?;
            after_annotation.validate_against(Transcript::new(after_text, "").words())?;
            if before_annotation.total_words != after_annotation.total_words {
                bail!(
                    "{label}: annotation totals disagree ({} vs {})",
                    before_annotation.total_words,
                    after_annotation.total_words
                );
            }
            Ok(ReportRow {
                label: label.to_owned(),
                total_words: before_annotation.total_words,
                errors_before: count_errors_annotated(&before_annotation),
                errors_after: count_errors_annotated(&after_annotation),
            })
        }
        (None, None, Some(reference)) => {
            let reference_text = std::fs::read_to_string(reference)
                .with_context(|| format!("reading {}", reference.display()))?;
            Ok(ReportRow {
                label: label.to_owned(),
                total_words: reference_text.split_whitespace().count() as u64,
                errors_before: count_errors_aligned(&before_text, &reference_text),
                errors_after: count_errors_aligned(&after_text, &reference_text),
            })
        }
        _ => bail!("{label}: provide --before-annotations and --after-annotations, or --reference"),
    }
}

pub fn evaluate(args: EvaluateArgs) -> Result<()> {
    let mode = match args.rounding {
        Rounding::Paper => RoundingMode::Paper,
        Rounding::Full => RoundingMode::Full,
    };

    let rows: Vec<ReportRow> = if let Some(manifest_path) = &args.manifest {
        let manifest: Manifest = serde_json::from_str(
            &std::fs::read_to_string(manifest_path)
                .with_context(|| format!("reading manifest {}", manifest_path.display()))?,
        )?;
        let base = manifest_path.parent().unwrap_or(Path::new("."));
        manifest
            .rows
            .iter()
            .map(|row| {
                row_from_paths(
                    &row.label,
                    &base.join(&row.before),
                    &base.join(&row.after),
                    row.before_annotations
                        .as_ref()
                        .map(|p| base.join(p))
                        .as_deref(),
                    row.after_annotations
                        .as_ref()
                        .map(|p| base.join(p))
                        .as_deref(),
                    row.reference.as_ref().map(|p| base.join(p)).as_deref(),
                )
            })
            .collect::<Result<_>>()?
    } else {
        let before = args
            .before
            .as_ref()
            .context("need --before (or --manifest)")?;
        let after = args
            .after
            .as_ref()
            .context("need --after (or --manifest)")?;
        vec![row_from_paths(
            &args.label,
            before,
            after,
            args.before_annotations.as_deref(),
            args.after_annotations.as_deref(),
            args.reference.as_deref(),
        )?]
    };

    let table = build_report(&rows, mode)?;
    print!("{}", table.render_text());
    if let Some(csv_path) = &args.csv {
        std::fs::write(csv_path, table.render_csv())
            .with_context(|| format!("writing csv {}", csv_path.display()))?;
        println!("csv -> {}", csv_path.display());
    }
    Ok(())
}

pub fn record(args: RecordArgs) -> Result<()> {
    let provider = build_provider(&args.provider)?;
    let queries: Vec<String> = if let Some(queries_path) = &args.queries {
        std::fs::read_to_string(queries_path)
            .with_context(|| format!("reading queries {}", queries_path.display()))?
            .lines()
            .map(str::trim)
            .filter(|line| !line.is_empty())
            .map(str::to_owned)
            .collect()
    } else if let Some(input_path) = &args.input {
        let text = std::fs::read_to_string(input_path)
            .with_context(|| format!("reading input {}", input_path.display()))?;
        tokenize(&text, args.window as usize)
            .into_iter()
            .map(|w| w.text().to_owned())
            .collect()
    } else {
        bail!("need --queries or --input");
    };
    if queries.is_empty() {
        bail!("no queries to record");
    }

    let cassette = Cassette::record(&provider, &queries)?;
    cassette
        .save(&args.cassette_out)
        .with_context(|| format!("writing cassette {}", args.cassette_out.display()))?;
    println!(
        "recorded {} entries from provider {:?} -> {}",
        cassette.len(),
        provider.id(),
        args.cassette_out.display()
    );
    Ok(())
}
