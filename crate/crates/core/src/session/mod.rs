//! One user session: gesture recognition, fusion and execution behind the
//! wire protocol, plus trace recording and replay.

mod protocol;
pub mod scenario;
pub mod script;
mod trace;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chart::{ChartSpec, ViewConfig};
use crate::dataset::Dataset;
use crate::executor::{affordances, AppState, Executor};
use crate::fusion::{FusionContext, FusionOutput, PatternTable, Scene};
use crate::gesture::{GestureConfig, GestureEvent, GestureRecognizer, InstrumentZone};
use crate::parser::{build_lexicon, KeywordFile, Lexicon, LexiconError};

pub use protocol::{ClientMessage, FilterChip, ServerMessage, Snapshot, PROTOCOL_VERSION};
pub use trace::{
    classify_trace, read_trace, replay, write_trace, Checkpoint, CheckpointResult, Divergence,
    JsonlSink, ReplayError, ReplayReport, StateSummary, Taxonomy, TraceError, TraceMeta,
    TraceRecord, TraceSink, TRACE_FORMAT,
};

/// A dataset with everything derived from it.
#[derive(Debug)]
pub struct Engine {
    pub name: String,
    pub dataset: Dataset,
    pub lexicon: Lexicon,
    pub patterns: PatternTable,
}

impl Engine {
    pub fn new(
        name: impl Into<String>,
        dataset: Dataset,
        keywords: &KeywordFile,
        patterns: PatternTable,
    ) -> Result<Self, LexiconError> {
        let lexicon = build_lexicon(&dataset, keywords)?;
        Ok(Engine {
            name: name.into(),
            dataset,
            lexicon,
            patterns,
        })
    }

    /// Bundled movies dataset with the shipped keyword and pattern files.
    pub fn movies() -> Self {
        Self::new("movies", Dataset::movies(), &KeywordFile::shipped(), PatternTable::shipped())
            .expect("shipped lexicon builds")
    }
}

/// Datasets a session may switch to by name.
#[derive(Debug, Clone)]
pub struct Catalog {
    engines: BTreeMap<String, Arc<Engine>>,
    default: Arc<Engine>,
}

impl Catalog {
    pub fn new(default: Arc<Engine>) -> Self {
        let mut engines = BTreeMap::new();
        engines.insert(default.name.clone(), default.clone());
        Catalog { engines, default }
    }

    pub fn insert(&mut self, engine: Arc<Engine>) {
        self.engines.insert(engine.name.clone(), engine);
    }

    pub fn get(&self, name: &str) -> Option<&Arc<Engine>> {
        self.engines.get(name)
    }

    pub fn default_engine(&self) -> &Arc<Engine> {
        &self.default
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.engines.keys().map(String::as_str)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionConfig {
    pub gesture: GestureConfig,
    pub view: ViewConfig,
}

pub struct Session {
    id: u64,
    catalog: Catalog,
    engine: Arc<Engine>,
    config: SessionConfig,
    recognizer: GestureRecognizer,
    fusion: FusionContext,
    state: AppState,
    clock: u64,
}

impl Session {
    pub fn new(id: u64, catalog: Catalog, config: SessionConfig) -> Self {
        let engine = catalog.default_engine().clone();
        Session {
            id,
            catalog,
            engine,
            config,
            recognizer: GestureRecognizer::new(config.gesture),
            fusion: FusionContext::new(),
            state: AppState::new(),
            clock: 0,
        }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn engine(&self) -> &Arc<Engine> {
        &self.engine
    }

    pub fn state(&self) -> &AppState {
        &self.state
    }

    pub fn fusion(&self) -> &FusionContext {
        &self.fusion
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    /// Latest timestamp seen.
    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn hello(&self) -> ServerMessage {
        ServerMessage::Hello {
            session: self.id,
            protocol: PROTOCOL_VERSION,
            dataset: self.engine.name.clone(),
        }
    }

    pub fn snapshot(&self) -> Snapshot {
        let ds = &self.engine.dataset;
        Snapshot {
            revision: self.state.revision,
            dataset: self.engine.name.clone(),
            dataset_hash: ds.content_hash().to_string(),
            spec: self.state.spec.clone(),
            view: self.state.view(ds, &self.config.view),
            selection: self.state.selection.iter().copied().collect(),
            viewport: self.state.viewport.clone(),
            filters: self
                .state
                .spec
                .filters
                .iter()
                .enumerate()
                .map(|(index, f)| FilterChip {
                    index,
                    label: f.describe(),
                })
                .collect(),
        }
    }

    /// Canonical JSON of the current snapshot.
    pub fn canonical_snapshot(&self) -> String {
        crate::canonical::to_string(&self.snapshot())
    }

    pub fn summary(&self) -> StateSummary {
        StateSummary::of(self)
    }

    /// Handle one client message; always answers with at least one message.
    pub fn handle(&mut self, msg: &ClientMessage) -> Vec<ServerMessage> {
        let hints_before = self.hint_state();
        let mut out = Vec::new();
        match msg {
            ClientMessage::Pointer { event } => {
                self.clock = self.clock.max(event.t);
                let gestures = self.recognizer.ingest(event);
                self.run_gestures(&gestures, &mut out);
            }
            ClientMessage::Tick { t } => {
                self.clock = self.clock.max(*t);
                let gestures = self.recognizer.advance(*t);
                self.run_gestures(&gestures, &mut out);
            }
            ClientMessage::Transcript { text, alternatives } => {
                let engine = self.engine.clone();
                let outputs = self.fusion.on_transcript(text, alternatives, &Self::scene(&self.state.spec, &engine));
                self.run_outputs(outputs, &mut out);
            }
            ClientMessage::WriteCandidates { texts } => {
                let engine = self.engine.clone();
                let outputs = self.fusion.on_write_candidates(texts, &Self::scene(&self.state.spec, &engine));
                self.run_outputs(outputs, &mut out);
            }
            ClientMessage::LoadDataset { name } => match self.catalog.get(name) {
                Some(engine) => {
                    self.engine = engine.clone();
                    self.recognizer = GestureRecognizer::new(self.config.gesture);
                    self.fusion = FusionContext::new();
                    self.state = AppState::new();
                    out.push(ServerMessage::Snapshot(Box::new(self.snapshot())));
                }
                None => out.push(ServerMessage::Error {
                    message: format!("unknown dataset {name:?}"),
                }),
            },
            ClientMessage::StateRequest => {
                out.push(ServerMessage::Snapshot(Box::new(self.snapshot())));
            }
        }
        if self.hint_state() != hints_before {
            out.push(ServerMessage::Affordances(affordances(
                &self.state,
                &self.engine.dataset,
                self.fusion.holds(),
                self.fusion.is_recording(),
            )));
        }
        if out.is_empty() {
            out.push(ServerMessage::Ack);
        }
        out
    }

    /// Handle one wire line; malformed input gets an `Error` reply and the
    /// session carries on.
    pub fn handle_line(&mut self, line: &str) -> Vec<ServerMessage> {
        match serde_json::from_str::<ClientMessage>(line) {
            Ok(msg) => self.handle(&msg),
            Err(e) => vec![ServerMessage::Error {
                message: format!("bad message: {e}"),
            }],
        }
    }

    fn hint_state(&self) -> (Vec<InstrumentZone>, bool, u64) {
        (
            self.fusion.holds().to_vec(),
            self.fusion.is_recording(),
            self.state.revision,
        )
    }

    fn scene<'a>(spec: &'a ChartSpec, engine: &'a Engine) -> Scene<'a> {
        Scene {
            spec,
            dataset: &engine.dataset,
            lexicon: &engine.lexicon,
            patterns: &engine.patterns,
        }
    }

    fn run_gestures(&mut self, gestures: &[GestureEvent], out: &mut Vec<ServerMessage>) {
        let engine = self.engine.clone();
        for g in gestures {
            let outputs = self.fusion.on_gesture(g, &Self::scene(&self.state.spec, &engine));
            self.run_outputs(outputs, out);
        }
    }

    fn run_outputs(&mut self, outputs: Vec<FusionOutput>, out: &mut Vec<ServerMessage>) {
        for o in outputs {
            match o {
                FusionOutput::Request(req) => {
                    let exec = Executor::new(&self.engine.dataset, &self.config.view);
                    let outcome = exec.apply(&mut self.state, &req);
                    out.push(ServerMessage::Feedback(outcome.feedback));
                    if let Some(d) = outcome.detail {
                        out.push(ServerMessage::Detail(Box::new(d)));
                    }
                    if outcome.changed {
                        out.push(ServerMessage::Snapshot(Box::new(self.snapshot())));
                    }
                }
                FusionOutput::Feedback(f) => out.push(ServerMessage::Feedback(f)),
                FusionOutput::Suggestions(suggestions) => {
                    out.push(ServerMessage::Suggestions { suggestions })
                }
            }
        }
    }

    /// Handle a message and record it and its answers.
    pub fn handle_recorded(&mut self, msg: &ClientMessage, sink: &mut dyn TraceSink) -> Vec<ServerMessage> {
        let t = match msg {
            ClientMessage::Pointer { event } => event.t.max(self.clock),
            ClientMessage::Tick { t } => (*t).max(self.clock),
            _ => self.clock,
        };
        sink.record(&TraceRecord::In { t, msg: msg.clone() });
        let out = self.handle(msg);
        for m in &out {
            sink.record(&TraceRecord::Out { t, msg: m.clone() });
        }
        out
    }

    pub fn trace_meta(&self) -> TraceMeta {
        TraceMeta {
            format: TRACE_FORMAT.to_string(),
            dataset: self.engine.name.clone(),
            dataset_hash: self.engine.dataset.content_hash().to_string(),
            attributes: self.engine.dataset.attributes().iter().map(|a| a.name.clone()).collect(),
            config: self.config,
        }
    }
}
