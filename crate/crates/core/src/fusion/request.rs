use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chart::{Axis, BindMode, Channel, ChartType, SortState};
use crate::dataset::Value;
use crate::filter::{Interval, Polarity};
use crate::parser::Reference;
use crate::Polygon;

/// Origin of a filled slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Touch,
    Pen,
    Speech,
    Context,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "probe", rename_all = "snake_case")]
pub enum Probe {
    Mark { id: String },
    /// Ruler at `value` on a continuous axis. `axis_index` picks between
    /// parallel coordinate axes.
    Ruler { axis: Axis, axis_index: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "act", rename_all = "snake_case")]
pub enum SelectAct {
    Mark { id: String },
    LegendItem { value: Value },
    AxisRange { axis: Axis, axis_index: usize, lo: f64, hi: f64 },
    Lasso { polygon: Polygon },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "by", rename_all = "snake_case")]
pub enum FilterRequest {
    /// Numeric criteria on one attribute.
    Criteria {
        attribute: String,
        interval: Interval,
        polarity: Polarity,
    },
    /// Categorical values; `except` inverts which values are affected.
    Values {
        attribute: String,
        values: Vec<Value>,
        polarity: Polarity,
        except: bool,
    },
    /// The current selection or everything outside it.
    Selection {
        reference: Reference,
        polarity: Polarity,
    },
    EraseMarks { ids: Vec<String> },
    EraseLegend { values: Vec<Value> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Operation {
    BindEncoding {
        channel: Channel,
        attributes: Vec<String>,
        mode: BindMode,
    },
    UnbindEncoding {
        channel: Channel,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        attribute: Option<String>,
    },
    /// `strict` sorts report an unsortable chart as an error; gestural
    /// sorts report it as a no-op.
    Sort { sort: SortState, strict: bool },
    Filter { filter: FilterRequest },
    Details { probe: Probe },
    ChangeChartType { chart_type: ChartType },
    Select { act: SelectAct, compound: bool },
    /// `scale` > 1 zooms in. Centers default to the window midpoint.
    Zoom {
        scale: f64,
        center_x: Option<f64>,
        center_y: Option<f64>,
    },
    /// Window shift in data units.
    Pan { dx: f64, dy: f64 },
    ClearSelection,
    ClearFilter { index: usize },
}

impl Operation {
    pub fn kind(&self) -> super::OperationKind {
        use super::OperationKind as K;
        match self {
            Operation::BindEncoding { .. } => K::BindEncoding,
            Operation::UnbindEncoding { .. } => K::UnbindEncoding,
            Operation::Sort { .. } => K::Sort,
            Operation::Filter { .. } => K::Filter,
            Operation::Details { .. } => K::Details,
            Operation::ChangeChartType { .. } => K::ChangeChartType,
            Operation::Select { .. } => K::Select,
            Operation::Zoom { .. } => K::Zoom,
            Operation::Pan { .. } => K::Pan,
            Operation::ClearSelection => K::ClearSelection,
            Operation::ClearFilter { .. } => K::ClearFilter,
        }
    }
}

/// A fully specified operation plus where each slot came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperationRequest {
    pub pattern: String,
    #[serde(flatten)]
    pub op: Operation,
    pub provenance: BTreeMap<String, Source>,
}

impl OperationRequest {
    /// Distinct input modalities that contributed.
    pub fn modalities(&self) -> Vec<Source> {
        let mut m: Vec<Source> = self
            .provenance
            .values()
            .copied()
            .filter(|s| *s != Source::Context)
            .collect();
        m.sort();
        m.dedup();
        m
    }
}
