//! JSONL session traces: record, read, replay and classify.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Catalog, ClientMessage, ServerMessage, Session, SessionConfig};
use crate::chart::{ChartType, InvalidReason, SortState};
use crate::feedback::{FeedbackCode, FeedbackKind};

pub const TRACE_FORMAT: &str = "tabviz-trace/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub format: String,
    pub dataset: String,
    pub dataset_hash: String,
    /// Attribute names the trace relies on.
    #[serde(default)]
    pub attributes: Vec<String>,
    #[serde(default)]
    pub config: SessionConfig,
}

/// Expected state summary fields at a point in the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub label: String,
    pub expect: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dir", rename_all = "snake_case")]
pub enum TraceRecord {
    Meta { meta: TraceMeta },
    In { t: u64, msg: ClientMessage },
    Out { t: u64, msg: ServerMessage },
    Checkpoint { t: u64, checkpoint: Checkpoint },
}

/// Compact state used by checkpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSummary {
    pub revision: u64,
    pub chart_type: Option<ChartType>,
    pub x: Option<String>,
    pub y: Vec<String>,
    pub color: Option<String>,
    pub sort: Option<SortState>,
    pub filters: usize,
    pub visible_rows: usize,
    pub selected_rows: usize,
}

impl StateSummary {
    pub fn of(session: &Session) -> Self {
        let state = session.state();
        let view = state.view(&session.engine().dataset, &session.config().view);
        StateSummary {
            revision: state.revision,
            chart_type: state.spec.chart_type,
            x: state.spec.x.clone(),
            y: state.spec.y.clone(),
            color: state.spec.color.clone(),
            sort: state.spec.sort.clone(),
            filters: state.spec.filters.len(),
            visible_rows: view.visible_rows,
            selected_rows: state.selection.len(),
        }
    }

    /// Mismatch descriptions for every expected field that differs.
    pub fn check(&self, expect: &serde_json::Map<String, serde_json::Value>) -> Vec<String> {
        let actual = match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(m)) => m,
            _ => unreachable!("summary serializes to an object"),
        };
        expect
            .iter()
            .filter_map(|(k, want)| match actual.get(k) {
                None => Some(format!("{k}: unknown field")),
                Some(got) if got != want => Some(format!("{k}: expected {want}, got {got}")),
                Some(_) => None,
            })
            .collect()
    }
}

pub trait TraceSink {
    fn record(&mut self, record: &TraceRecord);
}

impl TraceSink for Vec<TraceRecord> {
    fn record(&mut self, record: &TraceRecord) {
        self.push(record.clone());
    }
}

/// Writes one record per line; the first I/O error is kept and later
/// records are dropped.
pub struct JsonlSink<W: Write> {
    writer: W,
    error: Option<io::Error>,
}

impl<W: Write> JsonlSink<W> {
    pub fn new(writer: W) -> Self {
        JsonlSink { writer, error: None }
    }

    pub fn finish(mut self) -> io::Result<W> {
        if let Some(e) = self.error {
            return Err(e);
        }
        self.writer.flush()?;
        Ok(self.writer)
    }
}

impl<W: Write> TraceSink for JsonlSink<W> {
    fn record(&mut self, record: &TraceRecord) {
        if self.error.is_some() {
            return;
        }
        let line = serde_json::to_string(record).expect("trace records serialize");
        // flushed per line so a killed session leaves a valid prefix
        if let Err(e) = writeln!(self.writer, "{line}").and_then(|_| self.writer.flush()) {
            self.error = Some(e);
        }
    }
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

pub fn read_trace(reader: impl BufRead) -> Result<Vec<TraceRecord>, TraceError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|source| TraceError::Parse { line: i + 1, source })?;
        out.push(record);
    }
    Ok(out)
}

pub fn write_trace(records: &[TraceRecord], writer: impl Write) -> io::Result<()> {
    let mut sink = JsonlSink::new(writer);
    for r in records {
        sink.record(r);
    }
    sink.finish().map(|_| ())
}

#[derive(Debug, Error, PartialEq)]
pub enum ReplayError {
    #[error("trace does not start with a meta record")]
    MissingMeta,
    #[error("unsupported trace format {0:?}")]
    Format(String),
    #[error("unknown dataset {0:?}")]
    UnknownDataset(String),
    #[error("dataset has no attribute {0:?}")]
    MissingAttribute(String),
    #[error("dataset hash mismatch: trace has {expected}, loaded data has {actual}")]
    HashMismatch { expected: String, actual: String },
}

/// Output that differs from what the trace recorded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Divergence {
    /// Zero-based index of the input message.
    pub input: usize,
    pub expected: Vec<String>,
    pub actual: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckpointResult {
    pub label: String,
    pub mismatches: Vec<String>,
}

impl CheckpointResult {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplayReport {
    pub inputs: usize,
    /// Recorded outputs were present and compared.
    pub compared_outputs: bool,
    pub divergences: Vec<Divergence>,
    pub checkpoints: Vec<CheckpointResult>,
    /// Every output produced, in order.
    pub outputs: Vec<ServerMessage>,
    pub final_snapshot: String,
}

impl ReplayReport {
    pub fn is_clean(&self) -> bool {
        self.divergences.is_empty() && self.checkpoints.iter().all(CheckpointResult::passed)
    }
}

fn canonical_all(msgs: &[ServerMessage]) -> Vec<String> {
    msgs.iter().map(crate::canonical::to_string).collect()
}

/// Feed the recorded inputs through a fresh session.
pub fn replay(records: &[TraceRecord], catalog: &Catalog) -> Result<ReplayReport, ReplayError> {
    let Some(TraceRecord::Meta { meta }) = records.first() else {
        return Err(ReplayError::MissingMeta);
    };
    if meta.format != TRACE_FORMAT {
        return Err(ReplayError::Format(meta.format.clone()));
    }
    let engine = catalog
        .get(&meta.dataset)
        .ok_or_else(|| ReplayError::UnknownDataset(meta.dataset.clone()))?;
    if let Some(missing) = meta.attributes.iter().find(|a| engine.dataset.attribute(a).is_none()) {
        return Err(ReplayError::MissingAttribute(missing.clone()));
    }
    if engine.dataset.content_hash() != meta.dataset_hash {
        return Err(ReplayError::HashMismatch {
            expected: meta.dataset_hash.clone(),
            actual: engine.dataset.content_hash().to_string(),
        });
    }
    let compared_outputs = records.iter().any(|r| matches!(r, TraceRecord::Out { .. }));
    let mut session = Session::new(0, catalog.clone(), meta.config);
    if session.engine().name != meta.dataset {
        session.handle(&ClientMessage::LoadDataset {
            name: meta.dataset.clone(),
        });
    }

    let mut report = ReplayReport {
        inputs: 0,
        compared_outputs,
        divergences: Vec::new(),
        checkpoints: Vec::new(),
        outputs: Vec::new(),
        final_snapshot: String::new(),
    };
    // outputs of the latest input, checked once its recorded outputs end
    let mut pending: Option<(usize, Vec<ServerMessage>, Vec<ServerMessage>)> = None;
    let flush = |pending: &mut Option<(usize, Vec<ServerMessage>, Vec<ServerMessage>)>, report: &mut ReplayReport| {
        if let Some((input, actual, expected)) = pending.take() {
            if compared_outputs {
                let (a, e) = (canonical_all(&actual), canonical_all(&expected));
                if a != e {
                    report.divergences.push(Divergence {
                        input,
                        expected: e,
                        actual: a,
                    });
                }
            }
            report.outputs.extend(actual);
        }
    };

    for record in &records[1..] {
        match record {
            TraceRecord::Meta { .. } => {}
            TraceRecord::In { msg, .. } => {
                flush(&mut pending, &mut report);
                let actual = session.handle(msg);
                pending = Some((report.inputs, actual, Vec::new()));
                report.inputs += 1;
            }
            TraceRecord::Out { msg, .. } => match &mut pending {
                Some((_, _, expected)) => expected.push(msg.clone()),
                None => report.divergences.push(Divergence {
                    input: 0,
                    expected: vec![crate::canonical::to_string(msg)],
                    actual: Vec::new(),
                }),
            },
            TraceRecord::Checkpoint { checkpoint, .. } => {
                flush(&mut pending, &mut report);
                report.checkpoints.push(CheckpointResult {
                    label: checkpoint.label.clone(),
                    mismatches: session.summary().check(&checkpoint.expect),
                });
            }
        }
    }
    flush(&mut pending, &mut report);
    report.final_snapshot = session.canonical_snapshot();
    Ok(report)
}

/// Outcome counts over the feedback in a list of server messages.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Taxonomy {
    pub by_kind: BTreeMap<FeedbackKind, usize>,
    pub by_code: BTreeMap<FeedbackCode, usize>,
    pub by_reason: BTreeMap<InvalidReason, usize>,
}

impl Taxonomy {
    pub fn total(&self) -> usize {
        self.by_kind.values().sum()
    }
}

pub fn classify_trace<'a>(messages: impl IntoIterator<Item = &'a ServerMessage>) -> Taxonomy {
    let mut t = Taxonomy::default();
    for m in messages {
        if let ServerMessage::Feedback(f) = m {
            *t.by_kind.entry(f.kind).or_default() += 1;
            *t.by_code.entry(f.code).or_default() += 1;
            if let Some(r) = f.reason {
                *t.by_reason.entry(r).or_default() += 1;
            }
        }
    }
    t
}
