//! Interaction pattern table: which instrument, gesture, device, hold and
//! spoken operation class trigger which operation.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gesture::{Device, ZoneClass};

/// Instrument granularity used by the table. X and Y variants of a zone
/// share one class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstrumentClass {
    AttributePill,
    AxisTitle,
    LegendTitle,
    AxisScale,
    Mark,
    LegendItem,
    Canvas,
    ModifierButton,
    FilterChip,
    InkSuggestion,
    Panel,
}

impl From<ZoneClass> for InstrumentClass {
    fn from(z: ZoneClass) -> Self {
        match z {
            ZoneClass::AttributePill => InstrumentClass::AttributePill,
            ZoneClass::XAxisTitle | ZoneClass::YAxisTitle => InstrumentClass::AxisTitle,
            ZoneClass::LegendTitle => InstrumentClass::LegendTitle,
            ZoneClass::XAxisScale | ZoneClass::YAxisScale => InstrumentClass::AxisScale,
            ZoneClass::Mark => InstrumentClass::Mark,
            ZoneClass::LegendItem => InstrumentClass::LegendItem,
            ZoneClass::Canvas => InstrumentClass::Canvas,
            ZoneClass::ModifierButton => InstrumentClass::ModifierButton,
            ZoneClass::FilterChip => InstrumentClass::FilterChip,
            ZoneClass::InkSuggestion => InstrumentClass::InkSuggestion,
            ZoneClass::Panel => InstrumentClass::Panel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GestureClass {
    Tap,
    Point,
    Swipe,
    Drag,
    Pinch,
    Lasso,
    Erase,
    PillDrop,
    Write,
    Speech,
}

/// Operation class of a spoken command, as the table keys on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeechClass {
    Bind,
    BindMulti,
    Unbind,
    Sort,
    FilterCriteria,
    FilterValues,
    FilterReference,
    ChangeChart,
    SelectRelative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperationKind {
    BindEncoding,
    UnbindEncoding,
    Sort,
    Filter,
    Details,
    ChangeChartType,
    Select,
    Zoom,
    Pan,
    ClearSelection,
    ClearFilter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Touch,
    Pen,
    Speech,
}

impl Modality {
    pub const ALL: [Modality; 3] = [Modality::Touch, Modality::Pen, Modality::Speech];

    pub fn of(device: Device) -> Self {
        if device.is_pen() {
            Modality::Pen
        } else {
            Modality::Touch
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Directness {
    Direct,
    Indirect,
}

/// Where a slot's value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotSource {
    /// The triggering gesture or hold.
    Gesture,
    /// Handwriting.
    Pen,
    Speech,
    /// Current chart state or selection.
    Context,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotSpec {
    pub name: String,
    pub required: bool,
    pub source: SlotSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trigger {
    pub gesture: GestureClass,
    #[serde(default)]
    pub devices: Vec<Device>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub while_holding: Option<Vec<InstrumentClass>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keyword: Option<SpeechClass>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionPattern {
    pub id: String,
    pub name: String,
    pub instruments: Vec<InstrumentClass>,
    pub directness: Directness,
    pub trigger: Trigger,
    pub modalities: BTreeSet<Modality>,
    pub operation: OperationKind,
    pub slots: Vec<SlotSpec>,
    /// Interaction reconstructed from design prose rather than listed verbatim.
    #[serde(default)]
    pub reconstructed: bool,
    #[serde(default = "yes")]
    pub executable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Unit of the one-operation-per-gesture check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PatternKey {
    pub instrument: InstrumentClass,
    pub gesture: GestureClass,
    pub device: Option<Device>,
    pub holding: Option<InstrumentClass>,
    pub keyword: Option<SpeechClass>,
}

impl InteractionPattern {
    /// Every concrete key this pattern answers to.
    pub fn keys(&self) -> Vec<PatternKey> {
        let devices: Vec<Option<Device>> = if self.trigger.devices.is_empty() {
            vec![None]
        } else {
            self.trigger.devices.iter().copied().map(Some).collect()
        };
        let holds: Vec<Option<InstrumentClass>> = match &self.trigger.while_holding {
            None => vec![None],
            Some(h) => h.iter().copied().map(Some).collect(),
        };
        let mut keys = Vec::new();
        for &instrument in &self.instruments {
            for &device in &devices {
                for &holding in &holds {
                    keys.push(PatternKey {
                        instrument,
                        gesture: self.trigger.gesture,
                        device,
                        holding,
                        keyword: self.trigger.keyword,
                    });
                }
            }
        }
        keys
    }

    pub fn slot(&self, name: &str) -> Option<&SlotSpec> {
        self.slots.iter().find(|s| s.name == name)
    }

    /// Compound selection patterns are the ones keyed on a held modifier.
    pub fn holds_modifier(&self) -> bool {
        self.trigger
            .while_holding
            .as_ref()
            .is_some_and(|h| h.contains(&InstrumentClass::ModifierButton))
    }
}

#[derive(Debug, Error)]
pub enum PatternError {
    #[error("pattern table: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PatternTable {
    pub patterns: Vec<InteractionPattern>,
}

const SHIPPED_PATTERNS: &str = include_str!("../../data/patterns.json");

impl PatternTable {
    pub fn from_json(text: &str) -> Result<Self, PatternError> {
        serde_json::from_str(text).map_err(|e| PatternError::Json(e.to_string()))
    }

    pub fn shipped() -> Self {
        Self::from_json(SHIPPED_PATTERNS).expect("shipped pattern table parses")
    }

    pub fn get(&self, id: &str) -> Option<&InteractionPattern> {
        self.patterns.iter().find(|p| p.id == id)
    }

    /// Executable patterns answering to `instrument` and `gesture`. Patterns
    /// whose hold requirement is met come before hold-free ones; table order
    /// breaks ties.
    pub fn lookup(
        &self,
        instrument: InstrumentClass,
        gesture: GestureClass,
        device: Option<Device>,
        keyword: Option<SpeechClass>,
        holding: &[InstrumentClass],
    ) -> Option<&InteractionPattern> {
        let applies = |p: &&InteractionPattern| {
            p.executable
                && p.trigger.gesture == gesture
                && p.trigger.keyword == keyword
                && p.instruments.contains(&instrument)
                && match device {
                    Some(d) => p.trigger.devices.contains(&d),
                    None => p.trigger.devices.is_empty(),
                }
        };
        let held = |p: &&InteractionPattern| {
            p.trigger
                .while_holding
                .as_ref()
                .is_some_and(|h| h.iter().any(|c| holding.contains(c)))
        };
        self.patterns
            .iter()
            .filter(applies)
            .find(held)
            .or_else(|| {
                self.patterns
                    .iter()
                    .filter(applies)
                    .find(|p| p.trigger.while_holding.is_none())
            })
    }
}

/// One key mapped to more than one operation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conflict {
    pub key: PatternKey,
    pub patterns: Vec<String>,
    pub operations: Vec<OperationKind>,
}

/// Operation reachable through some modalities but not others.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModalityGap {
    pub operation: OperationKind,
    pub missing: Vec<Modality>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PatternReport {
    pub conflicts: Vec<Conflict>,
    /// Informational only.
    pub gaps: Vec<ModalityGap>,
    /// Schema problems: duplicate ids, speech keywords on non-speech
    /// gestures, slot sources outside the pattern's modalities.
    pub problems: Vec<String>,
}

impl PatternReport {
    pub fn is_clean(&self) -> bool {
        self.conflicts.is_empty() && self.problems.is_empty()
    }
}

pub fn check_pattern_table(table: &PatternTable) -> PatternReport {
    let mut report = PatternReport::default();

    let mut by_key: BTreeMap<PatternKey, Vec<&InteractionPattern>> = BTreeMap::new();
    for p in &table.patterns {
        for k in p.keys() {
            by_key.entry(k).or_default().push(p);
        }
    }
    for (key, ps) in by_key {
        let ops: BTreeSet<OperationKind> = ps.iter().map(|p| p.operation).collect();
        if ops.len() > 1 {
            report.conflicts.push(Conflict {
                key,
                patterns: ps.iter().map(|p| p.id.clone()).collect(),
                operations: ops.into_iter().collect(),
            });
        }
    }

    let mut reach: BTreeMap<OperationKind, BTreeSet<Modality>> = BTreeMap::new();
    for p in table.patterns.iter().filter(|p| p.executable) {
        reach.entry(p.operation).or_default().extend(p.modalities.iter().copied());
    }
    for (operation, have) in reach {
        let missing: Vec<Modality> = Modality::ALL.into_iter().filter(|m| !have.contains(m)).collect();
        if !missing.is_empty() {
            report.gaps.push(ModalityGap { operation, missing });
        }
    }

    let mut ids = BTreeSet::new();
    for p in &table.patterns {
        if !ids.insert(p.id.as_str()) {
            report.problems.push(format!("{}: duplicate id", p.id));
        }
        let speech = p.trigger.gesture == GestureClass::Speech;
        if speech != p.trigger.keyword.is_some() {
            report.problems.push(format!("{}: keyword must be set exactly for speech triggers", p.id));
        }
        if !speech && p.trigger.devices.is_empty() {
            report.problems.push(format!("{}: no devices", p.id));
        }
        if p.instruments.is_empty() {
            report.problems.push(format!("{}: no instruments", p.id));
        }
        for s in &p.slots {
            let needs = match s.source {
                SlotSource::Pen => Some(Modality::Pen),
                SlotSource::Speech => Some(Modality::Speech),
                _ => None,
            };
            if let Some(m) = needs.filter(|m| !p.modalities.contains(m)) {
                report.problems.push(format!("{}: slot {} needs {:?}", p.id, s.name, m));
            }
        }
    }
    report
}
