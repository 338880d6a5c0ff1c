//! Subcommand implementations; each writes to the given streams and
//! returns whether the run succeeded.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use tabviz_core::canonical;
use tabviz_core::dataset::Dataset;
use tabviz_core::fusion::{check_pattern_table, PatternTable};
use tabviz_core::parser::{build_lexicon, parse, KeywordFile, ParseFailure, ParsedCommand};
use tabviz_core::session::{
    classify_trace, read_trace, replay, Catalog, CheckpointResult, Divergence, Engine, ServerMessage,
    Snapshot, Taxonomy, TraceRecord,
};

use crate::config::{load_dataset, load_keywords, load_patterns, Config};
use crate::server::{serve, Server};

#[derive(Debug, Parser)]
#[command(name = "tabviz", version, about = "Multimodal visualization session server and tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Accept client sessions over TCP (newline-delimited JSON).
    Serve(ServeArgs),
    /// Replay a recorded trace and report divergences and checkpoints.
    Replay(ReplayArgs),
    /// Read utterances from stdin and print each parse as JSON.
    Parse(ParseArgs),
    /// Check a pattern table for conflicts and schema problems.
    ValidatePatterns(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override the configured listen address.
    #[arg(long)]
    pub listen: Option<String>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// JSONL trace file.
    #[arg(long)]
    pub trace: PathBuf,
    /// Dataset file (.csv or .json) the trace was recorded against.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Attribute type overrides for the dataset.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub patterns: Option<PathBuf>,
    #[arg(long)]
    pub keywords: Option<PathBuf>,
    /// Fail unless the trace has checkpoints, all pass, and outputs match.
    #[arg(long)]
    pub assert_golden: bool,
    /// Include every snapshot produced along the way.
    #[arg(long)]
    pub steps: bool,
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    /// Keyword file; the shipped one if omitted.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Dataset supplying attribute names and values; the bundled movies table if omitted.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Pattern table JSON; the shipped one if omitted.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

pub fn run_serve(args: &ServeArgs, err: &mut dyn Write) -> Result<()> {
    let mut config = match &args.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(l) = &args.listen {
        config.listen = l.clone();
    }
    let catalog = config.catalog()?;
    if let Some(dir) = &config.trace_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(&config.listen)
            .await
            .with_context(|| format!("binding {}", config.listen))?;
        writeln!(err, "listening on {}", listener.local_addr()?)?;
        let names: Vec<&str> = catalog.names().collect();
        writeln!(err, "datasets: {}", names.join(", "))?;
        let server = Arc::new(Server::new(catalog.clone(), config.session_config(), config.trace_dir.clone()));
        serve(listener, server).await?;
        Ok(())
    })
}

#[derive(Serialize)]
struct ReplayOutput<'a> {
    inputs: usize,
    compared_outputs: bool,
    divergences: &'a [Divergence],
    checkpoints: &'a [CheckpointResult],
    taxonomy: Taxonomy,
    final_snapshot: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<Vec<&'a Snapshot>>,
}

pub fn run_replay(args: &ReplayArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    let file = std::fs::File::open(&args.trace).with_context(|| format!("opening {}", args.trace.display()))?;
    let records = read_trace(std::io::BufReader::new(file)).with_context(|| format!("in {}", args.trace.display()))?;
    // name the engine after the trace so replay looks it up directly
    let name = match records.first() {
        Some(TraceRecord::Meta { meta }) => meta.dataset.clone(),
        _ => "dataset".to_string(),
    };
    let dataset = load_dataset(&args.dataset, args.manifest.as_deref())?;
    let engine = Engine::new(name, dataset, &keywords(args.keywords.as_deref())?, patterns(args.patterns.as_deref())?)?;
    let catalog = Catalog::new(Arc::new(engine));
    let report = replay(&records, &catalog).with_context(|| format!("replaying {}", args.trace.display()))?;

    let output = ReplayOutput {
        inputs: report.inputs,
        compared_outputs: report.compared_outputs,
        divergences: &report.divergences,
        checkpoints: &report.checkpoints,
        taxonomy: classify_trace(&report.outputs),
        final_snapshot: serde_json::from_str(&report.final_snapshot)?,
        steps: args.steps.then(|| {
            report
                .outputs
                .iter()
                .filter_map(|m| match m {
                    ServerMessage::Snapshot(s) => Some(&**s),
                    _ => None,
                })
                .collect()
        }),
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&output)?)?;

    let passed = report.checkpoints.iter().filter(|c| c.passed()).count();
    writeln!(
        err,
        "{} inputs, {} divergences, {}/{} checkpoints passed",
        report.inputs,
        report.divergences.len(),
        passed,
        report.checkpoints.len()
    )?;
    for c in report.checkpoints.iter().filter(|c| !c.passed()) {
        writeln!(err, "checkpoint {:?}: {}", c.label, c.mismatches.join("; "))?;
    }
    if !args.assert_golden {
        return Ok(true);
    }
    let golden = report.compared_outputs && !report.checkpoints.is_empty() && report.is_clean();
    if !golden {
        let why = if report.checkpoints.is_empty() {
            "trace has no checkpoints"
        } else if !report.compared_outputs {
            "trace has no recorded outputs"
        } else {
            "replay differs from the recording"
        };
        writeln!(err, "not golden: {why}")?;
    }
    Ok(golden)
}

#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum ParseLine {
    Ok(ParsedCommand),
    Error(ParseFailure),
}

/// Parser REPL: one JSON line per input line.
pub fn run_parse(args: &ParseArgs, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<()> {
    let dataset = match &args.dataset {
        Some(p) => load_dataset(p, args.manifest.as_deref())?,
        None => Dataset::movies(),
    };
    let lexicon = build_lexicon(&dataset, &keywords(args.lexicon.as_deref())?)?;
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let result = match parse(&line, &lexicon) {
            Ok(c) => ParseLine::Ok(c),
            Err(f) => ParseLine::Error(f),
        };
        writeln!(out, "{}", canonical::to_string(&result))?;
        out.flush()?;
    }
    Ok(())
}

pub fn run_validate(args: &ValidateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    let table = patterns(args.table.as_deref())?;
    let report = check_pattern_table(&table);
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    writeln!(
        err,
        "{} patterns: {} conflicts, {} problems, {} modality gaps",
        table.patterns.len(),
        report.conflicts.len(),
        report.problems.len(),
        report.gaps.len()
    )?;
    Ok(report.is_clean())
}

fn keywords(path: Option<&Path>) -> Result<KeywordFile> {
    path.map_or_else(|| Ok(KeywordFile::shipped()), load_keywords)
}

fn patterns(path: Option<&Path>) -> Result<PatternTable> {
    path.map_or_else(|| Ok(PatternTable::shipped()), load_patterns)
}
