//! Command-line surface: scoring, extraction, statistics, and boundary
//! comparison over CoNLL files.
//!
//! Output on standard output is deterministic for identical inputs and
//! configuration; warnings go to standard error. Usage errors exit with
//! status 2, data errors with status 1.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::conll::{read_conll_with, ConllError, Corpus, ReadOptions};
use crate::heads::{head_span, HeadTable, HeadTableError};
use crate::mina::{mention_subtree, min_spans_for_document, TagPolicy};
use crate::project::{MatchingMode, MinSidecar, ProjectError, SidecarError};
use crate::score::{compare_boundaries, score_corpora, MetricScores, ScoreOptions, ScoreReport};
use crate::stats::{containment_stats, length_stats, overlap_distinctness};

/// Errors surfaced to the terminal. Everything except `Usage` is a data
/// error (exit status 1).
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Conll(#[from] ConllError),
    #[error(transparent)]
    Project(#[from] ProjectError),
    #[error(transparent)]
    Sidecar(#[from] SidecarError),
    #[error(transparent)]
    HeadTable(#[from] HeadTableError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "minspan",
    version,
    about = "Coreference scoring with maximum-span, minimum-span, head-word, and MIN-containment matching"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a response file against a key file.
    Score(ScoreArgs),
    /// Extract minimum spans or head words from the key mentions.
    Extract(ExtractArgs),
    /// Report span-length, containment, and distinctness statistics.
    Stats(StatsArgs),
    /// List mention pairs with equal minimum spans but different boundaries.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Tsv,
}

/// Constituent-tag overrides shared by every subcommand.
#[derive(Debug, Args)]
pub struct PolicyArgs {
    /// Comma-separated tags of the noun-phrase family (default NP,NML,QP,NX).
    #[arg(long, value_delimiter = ',', value_name = "TAG")]
    np_tags: Vec<String>,
    /// Comma-separated tags of the verb-phrase family (default VP).
    #[arg(long, value_delimiter = ',', value_name = "TAG")]
    vp_tags: Vec<String>,
    /// Tag whose tokens cannot carry a unit alone; repeat the flag per tag.
    #[arg(long, value_name = "TAG", action = clap::ArgAction::Append)]
    excluded_pos: Vec<String>,
    /// Exclude only determiners and conjunctions, keeping punctuation
    /// eligible as unit content.
    #[arg(long)]
    strict_paper: bool,
}

impl PolicyArgs {
    pub fn policy(&self) -> TagPolicy {
        let mut policy = if self.strict_paper {
            TagPolicy::strict_paper()
        } else {
            TagPolicy::default()
        };
        if !self.np_tags.is_empty() {
            policy.np_tags = self.np_tags.iter().cloned().collect();
        }
        if !self.vp_tags.is_empty() {
            policy.vp_tags = self.vp_tags.iter().cloned().collect();
        }
        if !self.excluded_pos.is_empty() {
            policy.excluded_pos = self.excluded_pos.iter().cloned().collect();
        }
        policy
    }
}

fn parse_mode(s: &str) -> Result<MatchingMode, String> {
    MatchingMode::from_str(s)
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Key (gold) CoNLL file.
    #[arg(long, value_name = "PATH")]
    key: PathBuf,
    /// System (response) CoNLL file.
    #[arg(long, value_name = "PATH")]
    sys: PathBuf,
    /// Matching modes, comma-separated: max, mina, head, mucmin.
    #[arg(long, value_delimiter = ',', default_value = "max,mina,head", value_parser = parse_mode, value_name = "MODE")]
    span: Vec<MatchingMode>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// TSV sidecar with MIN annotations; required for mucmin.
    #[arg(long, value_name = "PATH")]
    min_sidecar: Option<PathBuf>,
    /// Also report scores per document part.
    #[arg(long)]
    per_document: bool,
    /// Head-percolation table for roots outside the noun-phrase family.
    #[arg(long, value_name = "PATH")]
    head_table: Option<PathBuf>,
    /// 1-based index of the coreference column (default: last column).
    #[arg(long, value_name = "N")]
    coref_column: Option<usize>,
    #[command(flatten)]
    policy: PolicyArgs,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Key (gold) CoNLL file.
    #[arg(long, value_name = "PATH")]
    key: PathBuf,
    /// What to extract: mina or head.
    #[arg(long, default_value = "mina", value_parser = parse_mode, value_name = "MODE")]
    span: MatchingMode,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    /// Head-percolation table for roots outside the noun-phrase family.
    #[arg(long, value_name = "PATH")]
    head_table: Option<PathBuf>,
    /// 1-based index of the coreference column (default: last column).
    #[arg(long, value_name = "N")]
    coref_column: Option<usize>,
    #[command(flatten)]
    policy: PolicyArgs,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Key (gold) CoNLL file.
    #[arg(long, value_name = "PATH")]
    key: PathBuf,
    /// TSV sidecar with MIN annotations; enables the containment table.
    #[arg(long, value_name = "PATH")]
    min_sidecar: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Head-percolation table for roots outside the noun-phrase family.
    #[arg(long, value_name = "PATH")]
    head_table: Option<PathBuf>,
    /// 1-based index of the coreference column (default: last column).
    #[arg(long, value_name = "N")]
    coref_column: Option<usize>,
    #[command(flatten)]
    policy: PolicyArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Key (gold) CoNLL file.
    #[arg(long, value_name = "PATH")]
    key: PathBuf,
    /// System (response) CoNLL file.
    #[arg(long, value_name = "PATH")]
    sys: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// 1-based index of the coreference column (default: last column).
    #[arg(long, value_name = "N")]
    coref_column: Option<usize>,
    #[command(flatten)]
    policy: PolicyArgs,
}

/// Executes one parsed invocation, printing the report to standard output.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let output = match cli.command {
        Command::Score(args) => run_score(&args)?,
        Command::Extract(args) => run_extract(&args)?,
        Command::Stats(args) => run_stats(&args)?,
        Command::Compare(args) => run_compare(&args)?,
    };
    print!("{output}");
    Ok(())
}

fn read_corpus(path: &Path, coref_column: Option<usize>) -> Result<Corpus, CliError> {
    let file = fs::File::open(path)
        .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
    let corpus = read_conll_with(std::io::BufReader::new(file), &ReadOptions { coref_column })?;
    for warning in &corpus.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(corpus)
}

fn read_sidecar(path: &Path) -> Result<MinSidecar, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
    Ok(MinSidecar::parse(&text)?)
}

fn read_head_table(path: Option<&PathBuf>) -> Result<Option<HeadTable>, CliError> {
    match path {
        None => Ok(None),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
            Ok(Some(HeadTable::parse(&text)?))
        }
    }
}

fn run_score(args: &ScoreArgs) -> Result<String, CliError> {
    if args.span.is_empty() {
        return Err(CliError::Usage("at least one matching mode is required".into()));
    }
    if args.span.contains(&MatchingMode::MucMin) && args.min_sidecar.is_none() {
        return Err(CliError::Usage(
            "--span mucmin requires --min-sidecar".into(),
        ));
    }
    let key = read_corpus(&args.key, args.coref_column)?;
    let sys = read_corpus(&args.sys, args.coref_column)?;
    let sidecar = args.min_sidecar.as_deref().map(read_sidecar).transpose()?;
    let head_table = read_head_table(args.head_table.as_ref())?;
    let policy = args.policy.policy();
    let reports = score_corpora(
        &key,
        &sys,
        &ScoreOptions {
            modes: &args.span,
            policy: &policy,
            head_table: head_table.as_ref(),
            sidecar: sidecar.as_ref(),
            per_document: args.per_document,
        },
    )?;
    for report in &reports {
        for warning in &report.warnings {
            eprintln!("warning[{}]: {warning}", report.mode);
        }
    }
    Ok(match args.format {
        Format::Json => to_json(&reports)?,
        Format::Text => render_score_text(&reports),
        Format::Tsv => render_score_tsv(&reports),
    })
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(format!("{}\n", serde_json::to_string_pretty(value)?))
}

type MetricPick = fn(&crate::score::MetricBlock) -> MetricScores;

const METRIC_COLUMNS: [(&str, MetricPick); 4] = [
    ("muc", |m| m.muc),
    ("b3", |m| m.b3),
    ("ceafe", |m| m.ceafe),
    ("lea", |m| m.lea),
];

fn render_score_text(reports: &[ScoreReport]) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:<10}", "metric");
    for report in reports {
        let _ = write!(out, "  {:<26}", report.mode);
    }
    out.push('\n');
    let _ = write!(out, "{:<10}", "");
    for _ in reports {
        let _ = write!(out, "  {:>8}{:>9}{:>9}", "R", "P", "F1");
    }
    out.push('\n');
    for (name, pick) in METRIC_COLUMNS {
        let _ = write!(out, "{:<10}", name);
        for report in reports {
            let s = pick(&report.metrics);
            let _ = write!(out, "  {:>8.2}{:>9.2}{:>9.2}", s.recall, s.precision, s.f1);
        }
        out.push('\n');
    }
    let _ = write!(out, "{:<10}", "conll_avg");
    for report in reports {
        let _ = write!(out, "  {:>8}{:>9}{:>9.2}", "", "", report.conll_avg);
    }
    out.push('\n');
    for report in reports {
        let Some(documents) = &report.documents else {
            continue;
        };
        let _ = write!(out, "\nper-document scores ({}):\n", report.mode);
        for doc in documents {
            let _ = writeln!(
                out,
                "  {} part {:03}: muc={:.2} b3={:.2} ceafe={:.2} lea={:.2} conll_avg={:.2}",
                doc.doc_id,
                doc.part,
                doc.metrics.muc.f1,
                doc.metrics.b3.f1,
                doc.metrics.ceafe.f1,
                doc.metrics.lea.f1,
                doc.conll_avg
            );
        }
    }
    out
}

fn render_score_tsv(reports: &[ScoreReport]) -> String {
    let mut out = String::from("mode\tscope\tmetric\trecall\tprecision\tf1\n");
    for report in reports {
        for (name, pick) in METRIC_COLUMNS {
            let s = pick(&report.metrics);
            let _ = writeln!(
                out,
                "{}\tcorpus\t{}\t{:.2}\t{:.2}\t{:.2}",
                report.mode, name, s.recall, s.precision, s.f1
            );
        }
        let _ = writeln!(
            out,
            "{}\tcorpus\tconll_avg\t\t\t{:.2}",
            report.mode, report.conll_avg
        );
        if let Some(documents) = &report.documents {
            for doc in documents {
                for (name, pick) in METRIC_COLUMNS {
                    let s = pick(&doc.metrics);
                    let _ = writeln!(
                        out,
                        "{}\t{}/{:03}\t{}\t{:.2}\t{:.2}\t{:.2}",
                        report.mode, doc.doc_id, doc.part, name, s.recall, s.precision, s.f1
                    );
                }
                let _ = writeln!(
                    out,
                    "{}\t{}/{:03}\tconll_avg\t\t\t{:.2}",
                    report.mode, doc.doc_id, doc.part, doc.conll_avg
                );
            }
        }
    }
    out
}

#[derive(Debug, Serialize)]
struct MinSpanRow {
    doc_id: String,
    part: u32,
    sentence: usize,
    span: String,
    tokens: Vec<usize>,
    fallback: bool,
    units: Vec<String>,
}

#[derive(Debug, Serialize)]
struct HeadRow {
    doc_id: String,
    part: u32,
    sentence: usize,
    span: String,
    head: usize,
    rule: String,
}

fn run_extract(args: &ExtractArgs) -> Result<String, CliError> {
    if let mode @ (MatchingMode::MaxSpan | MatchingMode::MucMin) = args.span {
        return Err(CliError::Usage(format!(
            "extract supports --span mina or head, not {}",
            mode.name()
        )));
    }
    let corpus = read_corpus(&args.key, args.coref_column)?;
    let policy = args.policy.policy();
    let head_table = read_head_table(args.head_table.as_ref())?;
    match args.span {
        MatchingMode::MinaSpan => {
            let mut rows = Vec::new();
            for doc in &corpus.documents {
                let spans = min_spans_for_document(doc, &policy).map_err(ProjectError::from)?;
                let mut seen = std::collections::BTreeSet::new();
                for (mention, result) in &spans {
                    if !seen.insert((mention.sentence_index, mention.span)) {
                        continue;
                    }
                    rows.push(MinSpanRow {
                        doc_id: doc.doc_id.clone(),
                        part: doc.part,
                        sentence: mention.sentence_index,
                        span: mention.span.to_string(),
                        tokens: result.token_indices.iter().copied().collect(),
                        fallback: result.used_fallback,
                        units: result
                            .units
                            .iter()
                            .map(|(label, span)| format!("{label}:{span}"))
                            .collect(),
                    });
                }
            }
            Ok(match args.format {
                Format::Json => to_json(&rows)?,
                _ => {
                    let mut out =
                        String::from("doc_id\tpart\tsentence\tspan\tmin_tokens\tfallback\tunits\n");
                    for row in &rows {
                        let _ = writeln!(
                            out,
                            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                            row.doc_id,
                            row.part,
                            row.sentence,
                            row.span,
                            join(&row.tokens),
                            row.fallback,
                            row.units.join(",")
                        );
                    }
                    out
                }
            })
        }
        MatchingMode::HeadWord => {
            let mut rows = Vec::new();
            for doc in &corpus.documents {
                let mut seen = std::collections::BTreeSet::new();
                for mention in doc.mentions() {
                    if !seen.insert((mention.sentence_index, mention.span)) {
                        continue;
                    }
                    let tree = doc.sentences[mention.sentence_index].tree.as_ref().ok_or(
                        ProjectError::Extraction(crate::mina::MinaError::MissingParse {
                            doc_id: doc.doc_id.clone(),
                            part: doc.part,
                            sentence: mention.sentence_index,
                        }),
                    )?;
                    let subtree =
                        mention_subtree(tree, mention.span).map_err(ProjectError::from)?;
                    let head = head_span(&subtree, &policy, head_table.as_ref())
                        .map_err(ProjectError::from)?;
                    rows.push(HeadRow {
                        doc_id: doc.doc_id.clone(),
                        part: doc.part,
                        sentence: mention.sentence_index,
                        span: mention.span.to_string(),
                        head: head.token_index,
                        rule: head.rule_fired.name().to_string(),
                    });
                }
            }
            Ok(match args.format {
                Format::Json => to_json(&rows)?,
                _ => {
                    let mut out = String::from("doc_id\tpart\tsentence\tspan\thead\trule\n");
                    for row in &rows {
                        let _ = writeln!(
                            out,
                            "{}\t{}\t{}\t{}\t{}\t{}",
                            row.doc_id, row.part, row.sentence, row.span, row.head, row.rule
                        );
                    }
                    out
                }
            })
        }
        MatchingMode::MaxSpan | MatchingMode::MucMin => unreachable!("rejected above"),
    }
}

fn join(values: &[usize]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Debug, Serialize)]
struct StatsReport {
    lengths: crate::stats::LengthStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    containment: Option<crate::stats::ContainmentStats>,
    distinctness: crate::stats::DistinctnessReport,
}

fn run_stats(args: &StatsArgs) -> Result<String, CliError> {
    if args.format == Format::Tsv {
        return Err(CliError::Usage("stats supports --format text or json".into()));
    }
    let corpus = read_corpus(&args.key, args.coref_column)?;
    let policy = args.policy.policy();
    let head_table = read_head_table(args.head_table.as_ref())?;
    let sidecar = args.min_sidecar.as_deref().map(read_sidecar).transpose()?;
    let lengths = length_stats(&corpus, &policy)?;
    let containment = sidecar
        .as_ref()
        .map(|sc| containment_stats(&corpus, sc, &policy, head_table.as_ref()))
        .transpose()?;
    let distinctness = overlap_distinctness(&corpus, &policy, head_table.as_ref())?;
    for warning in &lengths.warnings {
        eprintln!("warning: {warning}");
    }
    if let Some(containment) = &containment {
        for warning in &containment.warnings {
            eprintln!("warning: {warning}");
        }
    }
    let report = StatsReport {
        lengths,
        containment,
        distinctness,
    };
    Ok(match args.format {
        Format::Json => to_json(&report)?,
        _ => render_stats_text(&report),
    })
}

fn render_stats_text(report: &StatsReport) -> String {
    let mut out = String::new();
    let lengths = &report.lengths;
    let _ = writeln!(out, "mentions: {}", lengths.mention_count);
    let _ = writeln!(out, "mean length (max): {:.2}", lengths.mean_max_len);
    let _ = writeln!(out, "mean length (min): {:.2}", lengths.mean_min_len);
    let histogram = |bins: &[u64; 4]| {
        format!(
            "1:{} 2:{} 3:{} 4+:{}",
            bins[0], bins[1], bins[2], bins[3]
        )
    };
    let _ = writeln!(out, "length histogram (max): {}", histogram(&lengths.histogram_max));
    let _ = writeln!(out, "length histogram (min): {}", histogram(&lengths.histogram_min));
    let _ = writeln!(out, "fallback extractions: {}", lengths.fallback_count);
    if let Some(containment) = &report.containment {
        let _ = writeln!(out, "\ncontainment (MIN annotations):");
        let _ = writeln!(
            out,
            "evaluated: {} (excluded: {})",
            containment.evaluated, containment.excluded
        );
        let _ = writeln!(
            out,
            "minimum span contains MIN: {:.2}%",
            containment.mina_contains_min_ratio
        );
        let _ = writeln!(
            out,
            "head word matches MIN: {:.2}%",
            containment.head_contains_min_ratio
        );
        for mismatch in &containment.mismatches {
            let _ = writeln!(
                out,
                "mismatch[{}]: {} part {:03} sentence {} span {} MIN {} extracted {}",
                mismatch.extractor,
                mismatch.doc_id,
                mismatch.part,
                mismatch.sentence,
                mismatch.span,
                mismatch.min_span,
                join(&mismatch.extracted)
            );
        }
    }
    let distinctness = &report.distinctness;
    let _ = writeln!(out, "\noverlap distinctness:");
    let _ = writeln!(
        out,
        "overlapping pairs with identical minimum span: {}",
        distinctness.mina_violations.len()
    );
    let _ = writeln!(
        out,
        "overlapping pairs with identical head: {}",
        distinctness.head_violations.len()
    );
    for (kind, violations) in [
        ("mina", &distinctness.mina_violations),
        ("head", &distinctness.head_violations),
    ] {
        for v in violations {
            let _ = writeln!(
                out,
                "collision[{kind}]: {} part {:03} sentence {} spans {} and {} share {}",
                v.doc_id,
                v.part,
                v.sentence,
                v.span_a,
                v.span_b,
                join(&v.tokens)
            );
        }
    }
    out
}

fn run_compare(args: &CompareArgs) -> Result<String, CliError> {
    let key = read_corpus(&args.key, args.coref_column)?;
    let sys = read_corpus(&args.sys, args.coref_column)?;
    let policy = args.policy.policy();
    let rows = compare_boundaries(&key, &sys, &policy)?;
    Ok(match args.format {
        Format::Json => to_json(&rows)?,
        Format::Tsv => {
            let mut out = String::from(
                "doc_id\tpart\tsentence\tkey_span\tkey_text\tsys_span\tsys_text\n",
            );
            for row in &rows {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    row.doc_id,
                    row.part,
                    row.sentence,
                    row.key_span,
                    row.key_text,
                    row.sys_span,
                    row.sys_text
                );
            }
            out
        }
        Format::Text => {
            if rows.is_empty() {
                "no boundary mismatches\n".to_string()
            } else {
                let mut out = String::new();
                for row in &rows {
                    let _ = writeln!(
                        out,
                        "{} part {:03} sentence {}: key {} \"{}\" | sys {} \"{}\"",
                        row.doc_id,
                        row.part,
                        row.sentence,
                        row.key_span,
                        row.key_text,
                        row.sys_span,
                        row.sys_text
                    );
                }
                out
            }
        }
    })
}
