//! Multimodal fusion: gestures, transcripts and handwriting become operation
//! requests through the pattern table.
//!
//! Pointing at an axis title, the legend title or the modifier button starts
//! push-to-talk. Lifting the finger finalizes recording; the transcript that
//! arrives for it is fused with the zone that was held. Everything the
//! utterance leaves out is taken from that zone or the chart state.

mod patterns;
mod request;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chart::{Axis, BindMode, Channel, ChartSpec, SortDirection, SortKey, SortState};
use crate::dataset::Dataset;
use crate::feedback::{FeedbackCode, FeedbackMessage, PEN_IN_PANEL, UNPROCESSABLE};
use crate::filter::Polarity;
use crate::gesture::{Device, Direction, DragInfo, GestureEvent, InstrumentZone, ZoneClass};
use crate::parser::{fold, parse, Lexicon, Missing, OpClass, ParseFailure, ParsedCommand, Reference};

pub use patterns::{
    check_pattern_table, Conflict, Directness, GestureClass, InstrumentClass, InteractionPattern,
    Modality, ModalityGap, OperationKind, PatternError, PatternKey, PatternReport, PatternTable,
    SlotSource, SlotSpec, SpeechClass, Trigger,
};
pub use request::{FilterRequest, Operation, OperationRequest, Probe, SelectAct, Source};

/// Read-only state fusion consults to fill context slots.
#[derive(Clone, Copy)]
pub struct Scene<'a> {
    pub spec: &'a ChartSpec,
    pub dataset: &'a Dataset,
    pub lexicon: &'a Lexicon,
    pub patterns: &'a PatternTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suggestion {
    pub name: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FusionOutput {
    Request(OperationRequest),
    Feedback(FeedbackMessage),
    Suggestions(Vec<Suggestion>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum PushToTalk {
    Idle,
    Recording { trigger: InstrumentZone },
    /// Trigger released; waiting for the transcript.
    Finalizing { trigger: InstrumentZone },
}

#[derive(Debug, Clone, PartialEq)]
struct Transcript {
    text: String,
    alternatives: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusionContext {
    holds: Vec<InstrumentZone>,
    ptt: PushToTalk,
    early: Option<Transcript>,
}

impl Default for FusionContext {
    fn default() -> Self {
        Self::new()
    }
}

fn is_trigger(class: ZoneClass) -> bool {
    class.is_title() || class == ZoneClass::ModifierButton
}

fn title_channel(zone: &InstrumentZone) -> Option<Channel> {
    match zone {
        InstrumentZone::XAxisTitle { .. } => Some(Channel::X),
        InstrumentZone::YAxisTitle { .. } => Some(Channel::Y),
        InstrumentZone::LegendTitle { .. } => Some(Channel::Color),
        _ => None,
    }
}

fn title_attribute(zone: &InstrumentZone) -> Option<&str> {
    match zone {
        InstrumentZone::XAxisTitle { attribute }
        | InstrumentZone::YAxisTitle { attribute }
        | InstrumentZone::LegendTitle { attribute } => attribute.as_deref(),
        _ => None,
    }
}

/// Mode for bindings made by pointing: Y accumulates, others replace.
fn gesture_mode(channel: Channel) -> BindMode {
    match channel {
        Channel::Y => BindMode::Append,
        _ => BindMode::Replace,
    }
}

fn unsupported() -> FusionOutput {
    FusionOutput::Feedback(FeedbackMessage::error(
        FeedbackCode::UnsupportedInteraction,
        "That interaction is not supported here",
    ))
}

fn unprocessable(code: FeedbackCode) -> FusionOutput {
    FusionOutput::Feedback(FeedbackMessage::error(code, UNPROCESSABLE))
}

#[derive(Clone)]
struct Built<'p> {
    pattern: &'p InteractionPattern,
    source: Source,
    overrides: Vec<(&'static str, Source)>,
}

impl<'p> Built<'p> {
    fn new(pattern: &'p InteractionPattern, device: Option<Device>) -> Self {
        let source = match device.map(Modality::of) {
            Some(Modality::Pen) => Source::Pen,
            _ => Source::Touch,
        };
        Built {
            pattern,
            source,
            overrides: Vec::new(),
        }
    }

    fn with(mut self, slot: &'static str, source: Source) -> Self {
        self.overrides.push((slot, source));
        self
    }

    fn request(self, op: Operation) -> FusionOutput {
        let mut provenance = BTreeMap::new();
        for s in &self.pattern.slots {
            let src = match s.source {
                SlotSource::Gesture => self.source,
                SlotSource::Pen => Source::Pen,
                SlotSource::Speech => Source::Speech,
                SlotSource::Context => Source::Context,
            };
            provenance.insert(s.name.clone(), src);
        }
        for (slot, src) in self.overrides {
            provenance.insert(slot.to_string(), src);
        }
        if !provenance.values().any(|s| *s != Source::Context) {
            provenance.insert("trigger".into(), self.source);
        }
        FusionOutput::Request(OperationRequest {
            pattern: self.pattern.id.clone(),
            op,
            provenance,
        })
    }
}

impl FusionContext {
    pub fn new() -> Self {
        FusionContext {
            holds: Vec::new(),
            ptt: PushToTalk::Idle,
            early: None,
        }
    }

    /// Zones currently held, oldest first.
    pub fn holds(&self) -> &[InstrumentZone] {
        &self.holds
    }

    pub fn push_to_talk(&self) -> &PushToTalk {
        &self.ptt
    }

    pub fn is_recording(&self) -> bool {
        matches!(self.ptt, PushToTalk::Recording { .. })
    }

    /// Most recently held title, if any.
    pub fn held_title(&self) -> Option<&InstrumentZone> {
        self.holds.iter().rev().find(|z| z.class().is_title())
    }

    fn hold_classes(&self) -> Vec<InstrumentClass> {
        self.holds.iter().map(|z| z.class().into()).collect()
    }

    fn lookup<'a>(
        &self,
        scene: &Scene<'a>,
        zone: ZoneClass,
        gesture: GestureClass,
        device: Option<Device>,
        keyword: Option<SpeechClass>,
    ) -> Option<&'a InteractionPattern> {
        scene
            .patterns
            .lookup(zone.into(), gesture, device, keyword, &self.hold_classes())
    }

    pub fn on_gesture(&mut self, gesture: &GestureEvent, scene: &Scene) -> Vec<FusionOutput> {
        match gesture {
            GestureEvent::PointStart { zone, device } => self.point_start(zone, *device, scene),
            GestureEvent::PointEnd { zone, .. } => self.point_end(zone, scene),
            GestureEvent::Tap { zone, device } => self.tap(zone, *device, scene),
            GestureEvent::Swipe { zone, direction } => self.swipe(zone, *direction, scene),
            GestureEvent::DragStart(d) | GestureEvent::DragMove(d) => self.dragging(d, scene),
            GestureEvent::DragEnd(d) => self.drag_end(d, scene),
            GestureEvent::Pinch { scale, center } => {
                let Some(p) = self.lookup(scene, ZoneClass::Canvas, GestureClass::Pinch, Some(Device::Touch), None) else {
                    return vec![unsupported()];
                };
                if p.operation != OperationKind::Zoom {
                    return vec![unsupported()];
                }
                vec![Built::new(p, Some(Device::Touch)).request(Operation::Zoom {
                    scale: *scale,
                    center_x: center.data_x,
                    center_y: center.data_y,
                })]
            }
            GestureEvent::Lasso { polygon } => {
                let Some(p) = self.lookup(scene, ZoneClass::Canvas, GestureClass::Lasso, Some(Device::Pen), None) else {
                    return vec![unsupported()];
                };
                if p.operation != OperationKind::Select {
                    return vec![unsupported()];
                }
                let act = SelectAct::Lasso { polygon: polygon.clone() };
                vec![self.select(p, Device::Pen, act)]
            }
            GestureEvent::EraseStroke { zones } => self.erase(zones, scene),
            GestureEvent::PillDrop { pill, target } => {
                let Some(p) = self.lookup(scene, ZoneClass::AttributePill, GestureClass::PillDrop, Some(Device::Touch), None) else {
                    return vec![unsupported()];
                };
                let Some(channel) = title_channel(target) else {
                    return vec![FusionOutput::Feedback(FeedbackMessage::error(
                        FeedbackCode::DropOutsideTarget,
                        "Drop attributes on an axis or legend title",
                    ))];
                };
                vec![self.bind(p, Device::Touch, channel, vec![pill.clone()], gesture_mode(channel))]
            }
            GestureEvent::WriteCandidates { texts } => self.on_write_candidates(texts, scene),
            GestureEvent::PenInPanel { .. } => vec![FusionOutput::Feedback(FeedbackMessage::error(
                FeedbackCode::PenInPanel,
                PEN_IN_PANEL,
            ))],
        }
    }

    fn bind(
        &self,
        p: &InteractionPattern,
        device: Device,
        channel: Channel,
        attributes: Vec<String>,
        mode: BindMode,
    ) -> FusionOutput {
        if p.operation != OperationKind::BindEncoding {
            return unsupported();
        }
        Built::new(p, Some(device)).request(Operation::BindEncoding {
            channel,
            attributes,
            mode,
        })
    }

    fn select(&self, p: &InteractionPattern, device: Device, act: SelectAct) -> FusionOutput {
        Built::new(p, Some(device)).request(Operation::Select {
            act,
            compound: p.holds_modifier(),
        })
    }

    fn point_start(&mut self, zone: &InstrumentZone, device: Device, scene: &Scene) -> Vec<FusionOutput> {
        let class = zone.class();
        self.holds.push(zone.clone());
        if is_trigger(class) {
            if !matches!(self.ptt, PushToTalk::Recording { .. }) {
                self.ptt = PushToTalk::Recording { trigger: zone.clone() };
                self.early = None;
            }
            return Vec::new();
        }
        match self.lookup(scene, class, GestureClass::Point, Some(device), None) {
            Some(p) if p.operation == OperationKind::Details => match zone {
                InstrumentZone::Mark { id } => vec![Built::new(p, Some(device))
                    .request(Operation::Details { probe: Probe::Mark { id: id.clone() } })],
                _ => vec![unsupported()],
            },
            Some(_) => vec![unsupported()],
            // holds without a pattern only set context
            None => Vec::new(),
        }
    }

    fn point_end(&mut self, zone: &InstrumentZone, scene: &Scene) -> Vec<FusionOutput> {
        if let Some(i) = self.holds.iter().position(|z| z == zone) {
            self.holds.remove(i);
        }
        let PushToTalk::Recording { trigger } = &self.ptt else {
            return Vec::new();
        };
        if trigger != zone {
            return Vec::new();
        }
        let trigger = trigger.clone();
        match self.early.take() {
            Some(t) => {
                self.ptt = PushToTalk::Idle;
                self.fuse_speech(&trigger, &t, scene)
            }
            None => {
                self.ptt = PushToTalk::Finalizing { trigger };
                Vec::new()
            }
        }
    }

    fn tap(&mut self, zone: &InstrumentZone, device: Device, scene: &Scene) -> Vec<FusionOutput> {
        let Some(p) = self.lookup(scene, zone.class(), GestureClass::Tap, Some(device), None) else {
            return vec![unsupported()];
        };
        let out = match (p.operation, zone) {
            (OperationKind::BindEncoding, InstrumentZone::AttributePill { name } | InstrumentZone::InkSuggestion { name }) => {
                let Some(channel) = self.held_title().and_then(title_channel) else {
                    return vec![unsupported()];
                };
                self.bind(p, device, channel, vec![name.clone()], gesture_mode(channel))
            }
            (OperationKind::Select, InstrumentZone::Mark { id }) => {
                self.select(p, device, SelectAct::Mark { id: id.clone() })
            }
            (OperationKind::Select, InstrumentZone::LegendItem { value }) => {
                self.select(p, device, SelectAct::LegendItem { value: value.clone() })
            }
            (OperationKind::ClearSelection, _) => Built::new(p, Some(device)).request(Operation::ClearSelection),
            (OperationKind::ClearFilter, InstrumentZone::FilterChip { index }) => {
                Built::new(p, Some(device)).request(Operation::ClearFilter { index: *index })
            }
            _ => unsupported(),
        };
        vec![out]
    }

    fn swipe(&mut self, zone: &InstrumentZone, direction: Direction, scene: &Scene) -> Vec<FusionOutput> {
        let Some(p) = self.lookup(scene, zone.class(), GestureClass::Swipe, Some(Device::Touch), None) else {
            return vec![unsupported()];
        };
        if p.operation != OperationKind::Sort {
            return vec![unsupported()];
        }
        let direction = match direction {
            Direction::Up | Direction::Right => SortDirection::Ascending,
            Direction::Down | Direction::Left => SortDirection::Descending,
        };
        let axis = match zone {
            InstrumentZone::XAxisScale => (Axis::X, 0),
            InstrumentZone::YAxisScale { axis } => (Axis::Y, *axis),
            _ => return vec![unsupported()],
        };
        match swipe_sort_key(scene.spec, axis) {
            Ok((by, axis)) => vec![Built::new(p, Some(Device::Touch)).request(Operation::Sort {
                sort: SortState { by, direction, axis },
                strict: false,
            })],
            Err(msg) => vec![FusionOutput::Feedback(msg)],
        }
    }

    fn dragging(&mut self, d: &DragInfo, scene: &Scene) -> Vec<FusionOutput> {
        let Some(p) = self.lookup(scene, d.zone.class(), GestureClass::Drag, Some(d.device), None) else {
            return Vec::new();
        };
        match p.operation {
            OperationKind::Details => {
                let Some((axis, axis_index, value)) = scale_value(&d.zone, &d.current) else {
                    return Vec::new();
                };
                vec![Built::new(p, Some(d.device)).request(Operation::Details {
                    probe: Probe::Ruler { axis, axis_index, value },
                })]
            }
            OperationKind::Pan => {
                let delta = |a: Option<f64>, b: Option<f64>| match (a, b) {
                    (Some(a), Some(b)) => a - b,
                    _ => 0.0,
                };
                let dx = delta(d.previous.data_x, d.current.data_x);
                let dy = delta(d.previous.data_y, d.current.data_y);
                if dx == 0.0 && dy == 0.0 {
                    return Vec::new();
                }
                vec![Built::new(p, Some(d.device)).request(Operation::Pan { dx, dy })]
            }
            _ => Vec::new(),
        }
    }

    fn drag_end(&mut self, d: &DragInfo, scene: &Scene) -> Vec<FusionOutput> {
        let Some(p) = self.lookup(scene, d.zone.class(), GestureClass::Drag, Some(d.device), None) else {
            return vec![unsupported()];
        };
        match p.operation {
            OperationKind::Select => {
                let (Some((axis, axis_index, a)), Some((_, _, b))) =
                    (scale_value(&d.zone, &d.origin), scale_value(&d.zone, &d.current))
                else {
                    return vec![unsupported()];
                };
                let act = SelectAct::AxisRange {
                    axis,
                    axis_index,
                    lo: a.min(b),
                    hi: a.max(b),
                };
                vec![self.select(p, d.device, act)]
            }
            OperationKind::Details | OperationKind::Pan => Vec::new(),
            _ => vec![unsupported()],
        }
    }

    fn erase(&mut self, zones: &[InstrumentZone], scene: &Scene) -> Vec<FusionOutput> {
        let mut groups: Vec<(InstrumentClass, Vec<&InstrumentZone>)> = Vec::new();
        for z in zones {
            if z.class() == ZoneClass::Canvas {
                continue;
            }
            let class: InstrumentClass = z.class().into();
            // each title is its own unbinding
            let split = class == InstrumentClass::AxisTitle || class == InstrumentClass::LegendTitle;
            match groups.iter_mut().find(|(c, _)| *c == class && !split) {
                Some((_, g)) => g.push(z),
                None => groups.push((class, vec![z])),
            }
        }
        if groups.is_empty() {
            return vec![FusionOutput::Feedback(FeedbackMessage::void(
                FeedbackCode::NoMarks,
                "Nothing was erased",
            ))];
        }
        let mut out = Vec::new();
        for (_, group) in groups {
            let first = group[0];
            let Some(p) = self.lookup(scene, first.class(), GestureClass::Erase, Some(Device::PenEraser), None) else {
                out.push(unsupported());
                continue;
            };
            let b = Built::new(p, Some(Device::PenEraser));
            let op = match (p.operation, first) {
                (OperationKind::UnbindEncoding, z) if title_channel(z).is_some() => {
                    let channel = title_channel(z).unwrap();
                    Operation::UnbindEncoding {
                        channel,
                        attribute: title_attribute(z).map(String::from),
                    }
                }
                (OperationKind::Filter, InstrumentZone::Mark { .. }) => Operation::Filter {
                    filter: FilterRequest::EraseMarks {
                        ids: group
                            .iter()
                            .filter_map(|z| match z {
                                InstrumentZone::Mark { id } => Some(id.clone()),
                                _ => None,
                            })
                            .collect(),
                    },
                },
                (OperationKind::Filter, InstrumentZone::LegendItem { .. }) => Operation::Filter {
                    filter: FilterRequest::EraseLegend {
                        values: group
                            .iter()
                            .filter_map(|z| match z {
                                InstrumentZone::LegendItem { value } => Some(value.clone()),
                                _ => None,
                            })
                            .collect(),
                    },
                },
                _ => {
                    out.push(unsupported());
                    continue;
                }
            };
            out.push(b.request(op));
        }
        out
    }

    /// A final transcript from the speech recognizer.
    pub fn on_transcript(&mut self, text: &str, alternatives: &[String], scene: &Scene) -> Vec<FusionOutput> {
        let t = Transcript {
            text: text.to_string(),
            alternatives: alternatives.to_vec(),
        };
        match std::mem::replace(&mut self.ptt, PushToTalk::Idle) {
            PushToTalk::Idle => vec![FusionOutput::Feedback(FeedbackMessage::void(
                FeedbackCode::TranscriptWhileIdle,
                "Hold an axis title, the legend title or the modifier button to speak",
            ))],
            PushToTalk::Recording { trigger } => {
                self.early = Some(t);
                self.ptt = PushToTalk::Recording { trigger };
                Vec::new()
            }
            PushToTalk::Finalizing { trigger } => self.fuse_speech(&trigger, &t, scene),
        }
    }

    fn fuse_speech(&self, trigger: &InstrumentZone, t: &Transcript, scene: &Scene) -> Vec<FusionOutput> {
        if fold(&t.text).is_empty() {
            return vec![FusionOutput::Feedback(FeedbackMessage::void(
                FeedbackCode::EmptyTranscript,
                "No speech was detected",
            ))];
        }
        let mut first_failure = None;
        for text in std::iter::once(&t.text).chain(t.alternatives.iter()) {
            match parse(text, scene.lexicon).or_else(|f| repair(f, trigger, scene.spec)) {
                Ok(cmd) => return self.speech_command(trigger, cmd, scene),
                Err(f) => {
                    first_failure.get_or_insert(f);
                }
            }
        }
        let code = match first_failure {
            Some(ParseFailure::Incomplete { .. }) => FeedbackCode::IncompleteCommand,
            Some(ParseFailure::Ambiguous { .. }) => FeedbackCode::AmbiguousCommand,
            _ => FeedbackCode::UnrecognizedCommand,
        };
        vec![unprocessable(code)]
    }

    fn speech_command(&self, trigger: &InstrumentZone, cmd: ParsedCommand, scene: &Scene) -> Vec<FusionOutput> {
        let Some(class) = speech_class(&cmd) else {
            return vec![unprocessable(FeedbackCode::IncompleteCommand)];
        };
        let Some(p) = self.lookup(scene, trigger.class(), GestureClass::Speech, None, Some(class)) else {
            return vec![unsupported()];
        };
        let b = Built::new(p, None);
        let held = title_channel(trigger);
        let attrs = cmd.attribute_names();
        let op = match p.operation {
            OperationKind::BindEncoding => return speech_bind(b, held, &cmd, scene.spec),
            OperationKind::UnbindEncoding => {
                let attribute = attrs.first().cloned().or_else(|| title_attribute(trigger).map(String::from));
                let channel = match attribute.as_deref().and_then(|a| scene.spec.channel_of(a)) {
                    Some(c) => c,
                    None if attribute.is_none() && held.is_some() => held.unwrap(),
                    None => {
                        return vec![FusionOutput::Feedback(FeedbackMessage::void(
                            FeedbackCode::NoChange,
                            format!("{} is not shown in the chart", attribute.unwrap_or_default()),
                        ))]
                    }
                };
                let b = if attribute.is_some() && !attrs.is_empty() { b.with("attribute", Source::Speech) } else { b };
                return vec![b.with("channel", if held.is_some() { Source::Touch } else { Source::Context })
                    .request(Operation::UnbindEncoding { channel, attribute })];
            }
            OperationKind::Sort => {
                let by = if cmd.by_count {
                    SortKey::Count
                } else {
                    match attrs.first() {
                        Some(a) => SortKey::Attribute(a.clone()),
                        None => return vec![unprocessable(FeedbackCode::IncompleteCommand)],
                    }
                };
                let axis = match &by {
                    SortKey::Attribute(a) if scene.spec.x.as_deref() == Some(a) => Axis::X,
                    _ => Axis::Y,
                };
                let direction = cmd.direction.unwrap_or(SortDirection::Ascending);
                Operation::Sort {
                    sort: SortState { by, direction, axis },
                    strict: true,
                }
            }
            OperationKind::Filter => {
                let polarity = cmd.polarity.unwrap_or(Polarity::Remove);
                let filter = match class {
                    SpeechClass::FilterReference => FilterRequest::Selection {
                        reference: cmd.reference.unwrap_or(Reference::These),
                        polarity,
                    },
                    SpeechClass::FilterValues => FilterRequest::Values {
                        attribute: cmd.value_attribute.clone().unwrap_or_default(),
                        values: cmd.values.clone(),
                        polarity,
                        except: cmd.except,
                    },
                    _ => {
                        let (Some(attribute), Some(interval)) = (attrs.first(), cmd.interval()) else {
                            return vec![unprocessable(FeedbackCode::IncompleteCommand)];
                        };
                        FilterRequest::Criteria {
                            attribute: attribute.clone(),
                            interval,
                            polarity,
                        }
                    }
                };
                Operation::Filter { filter }
            }
            OperationKind::ChangeChartType => match cmd.chart_type {
                Some(chart_type) => Operation::ChangeChartType { chart_type },
                None => return vec![unprocessable(FeedbackCode::IncompleteCommand)],
            },
            _ => return vec![unsupported()],
        };
        vec![b.request(op)]
    }

    /// Handwriting candidates while a title is held.
    pub fn on_write_candidates(&mut self, texts: &[String], scene: &Scene) -> Vec<FusionOutput> {
        let Some(title) = self.held_title().cloned() else {
            return vec![FusionOutput::Feedback(FeedbackMessage::void(
                FeedbackCode::NoInkTarget,
                "Hold an axis or legend title while writing",
            ))];
        };
        let Some(p) = self.lookup(scene, title.class(), GestureClass::Write, Some(Device::Pen), None) else {
            return vec![unsupported()];
        };
        let channel = title_channel(&title).expect("held title");
        // a full attribute name binds at once; anything else asks the user
        for t in texts {
            let f = fold(t);
            if let Some(a) = scene.lexicon.attributes.iter().find(|a| a.variants[0] == f) {
                return vec![self.bind(p, Device::Pen, channel, vec![a.name.clone()], gesture_mode(channel))];
            }
        }
        let mut best: Vec<Suggestion> = Vec::new();
        for t in texts {
            for (name, score) in scene.lexicon.match_attribute(t) {
                match best.iter_mut().find(|s| s.name == name) {
                    Some(s) => s.score = s.score.max(score),
                    None => best.push(Suggestion { name, score }),
                }
            }
        }
        let order = |n: &str| scene.dataset.index_of(n).unwrap_or(usize::MAX);
        best.sort_by(|a, b| b.score.total_cmp(&a.score).then(order(&a.name).cmp(&order(&b.name))));
        if best.is_empty() {
            return vec![
                FusionOutput::Suggestions(Vec::new()),
                FusionOutput::Feedback(FeedbackMessage::void(
                    FeedbackCode::NoSuggestions,
                    "No attribute matches that handwriting",
                )),
            ];
        }
        vec![FusionOutput::Suggestions(best)]
    }
}

fn speech_class(cmd: &ParsedCommand) -> Option<SpeechClass> {
    Some(match cmd.op? {
        OpClass::Bind if cmd.attributes.len() > 1 => SpeechClass::BindMulti,
        OpClass::Bind => SpeechClass::Bind,
        OpClass::Unbind => SpeechClass::Unbind,
        OpClass::Sort => SpeechClass::Sort,
        OpClass::Filter if cmd.reference.is_some() => SpeechClass::FilterReference,
        OpClass::Filter if !cmd.values.is_empty() => SpeechClass::FilterValues,
        OpClass::Filter => SpeechClass::FilterCriteria,
        OpClass::ChangeChart => SpeechClass::ChangeChart,
    })
}

/// Attribute a held title stands for, when it names exactly one.
fn title_target(trigger: &InstrumentZone, spec: &ChartSpec) -> Option<String> {
    if let Some(a) = title_attribute(trigger) {
        return Some(a.to_string());
    }
    match spec.bound(title_channel(trigger)?).as_slice() {
        [one] => Some(one.to_string()),
        _ => None,
    }
}

/// Fill what an incomplete command lacks from the held title.
fn repair(failure: ParseFailure, trigger: &InstrumentZone, spec: &ChartSpec) -> Result<ParsedCommand, ParseFailure> {
    let ParseFailure::Incomplete { missing, partial } = &failure else {
        return Err(failure);
    };
    let mut cmd = (**partial).clone();
    let filled = |name: String| crate::parser::AttributeMatch { name, score: 1.0 };
    match (missing, cmd.op) {
        (Missing::Attribute, Some(OpClass::Filter | OpClass::Unbind)) => match title_target(trigger, spec) {
            Some(a) => cmd.attributes.push(filled(a)),
            None if cmd.op == Some(OpClass::Unbind) && title_channel(trigger).is_some() => {}
            None => return Err(failure),
        },
        (Missing::Attribute, Some(OpClass::Sort)) => match trigger {
            InstrumentZone::YAxisTitle { .. } if spec.y.is_empty() && spec.x.is_some() => cmd.by_count = true,
            _ => match title_target(trigger, spec) {
                Some(a) => cmd.attributes.push(filled(a)),
                None => return Err(failure),
            },
        },
        // a bare "remove" on a title takes that title's attribute off
        (Missing::Target, Some(OpClass::Filter)) if title_channel(trigger).is_some() => {
            cmd.op = Some(OpClass::Unbind);
            if let Some(a) = title_attribute(trigger) {
                cmd.attributes.push(filled(a.to_string()));
            }
        }
        _ => return Err(failure),
    }
    Ok(cmd)
}

fn speech_bind(b: Built, held: Option<Channel>, cmd: &ParsedCommand, spec: &ChartSpec) -> Vec<FusionOutput> {
    let attrs = cmd.attribute_names();
    let mode = if cmd.append { BindMode::Append } else { BindMode::Replace };
    if let Some(channel) = cmd.channel {
        return vec![b.with("channel", Source::Speech).request(Operation::BindEncoding {
            channel,
            attributes: attrs,
            mode,
        })];
    }
    if let Some(channel) = held {
        return vec![b.with("channel", Source::Touch).request(Operation::BindEncoding {
            channel,
            attributes: attrs,
            mode,
        })];
    }
    // modifier speech without a channel: fill the chart from empty axes
    let out = |b: Built, channel, attributes, mode| {
        b.with("channel", Source::Context).request(Operation::BindEncoding {
            channel,
            attributes,
            mode,
        })
    };
    if spec.x.is_none() && spec.y.is_empty() {
        let mut v = vec![out(b.clone(), Channel::X, vec![attrs[0].clone()], BindMode::Replace)];
        if attrs.len() > 1 {
            v.push(out(b, Channel::Y, attrs[1..].to_vec(), BindMode::Replace));
        }
        return v;
    }
    if cmd.append || spec.y.is_empty() {
        return vec![out(b, Channel::Y, attrs, mode)];
    }
    vec![unprocessable(FeedbackCode::IncompleteCommand)]
}

/// Sort key a swipe on an axis implies.
fn swipe_sort_key(spec: &ChartSpec, (axis, index): (Axis, usize)) -> Result<(SortKey, Axis), FeedbackMessage> {
    let ambiguous = || {
        FeedbackMessage::void(
            FeedbackCode::AmbiguousSortTarget,
            "Say which attribute to sort by",
        )
    };
    if spec.chart_type == Some(crate::chart::ChartType::ParallelCoordinates) {
        return match spec.axis_attributes().get(index) {
            Some(a) => Ok((SortKey::Attribute(a.to_string()), Axis::Y)),
            None => Err(ambiguous()),
        };
    }
    let horizontal = spec.x.is_none();
    let dimension_axis = if horizontal { Axis::Y } else { Axis::X };
    if axis == dimension_axis {
        let dim = spec.x.clone().or_else(|| spec.y.first().cloned());
        return match dim {
            Some(d) => Ok((SortKey::Attribute(d), axis)),
            None => Err(ambiguous()),
        };
    }
    let measures: &[String] = if horizontal { &[] } else { &spec.y };
    match measures {
        [] => Ok((SortKey::Count, axis)),
        [one] => Ok((SortKey::Attribute(one.clone()), axis)),
        _ => Err(ambiguous()),
    }
}

/// Data value under a pointer on an axis scale.
fn scale_value(zone: &InstrumentZone, pos: &crate::gesture::Position) -> Option<(Axis, usize, f64)> {
    match zone {
        InstrumentZone::XAxisScale => pos.data_x.map(|v| (Axis::X, 0, v)),
        InstrumentZone::YAxisScale { axis } => pos.data_y.map(|v| (Axis::Y, *axis, v)),
        _ => None,
    }
}
