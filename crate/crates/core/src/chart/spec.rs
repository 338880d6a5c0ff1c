use std::fmt;

use serde::{Deserialize, Serialize};

use crate::aggregate::AggregateFn;
use crate::dataset::{AttributeKind, Dataset};
use crate::filter::FilterSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    X,
    Y,
    Color,
}

impl Channel {
    /// Phrase used in feedback messages.
    pub fn phrase(self) -> &'static str {
        match self {
            Channel::X => "the X-axis",
            Channel::Y => "the Y-axis",
            Channel::Color => "color",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChartType {
    Histogram,
    BarChart,
    GroupedBarChart,
    StackedBarChart,
    LineChart,
    Scatterplot,
    ParallelCoordinates,
}

impl ChartType {
    pub const ALL: [ChartType; 7] = [
        ChartType::Histogram,
        ChartType::BarChart,
        ChartType::GroupedBarChart,
        ChartType::StackedBarChart,
        ChartType::LineChart,
        ChartType::Scatterplot,
        ChartType::ParallelCoordinates,
    ];

    pub fn is_sortable(self) -> bool {
        matches!(
            self,
            ChartType::BarChart
                | ChartType::GroupedBarChart
                | ChartType::StackedBarChart
                | ChartType::ParallelCoordinates
        )
    }

    /// One mark per row rather than per group.
    pub fn is_unaggregated(self) -> bool {
        matches!(self, ChartType::Scatterplot | ChartType::ParallelCoordinates)
    }

    pub fn is_bar_like(self) -> bool {
        matches!(
            self,
            ChartType::Histogram
                | ChartType::BarChart
                | ChartType::GroupedBarChart
                | ChartType::StackedBarChart
        )
    }

    pub fn mark_noun(self) -> &'static str {
        match self {
            ChartType::Scatterplot => "points",
            ChartType::ParallelCoordinates => "lines",
            ChartType::LineChart => "points",
            _ => "bars",
        }
    }

    pub fn article_name(self) -> &'static str {
        match self {
            ChartType::Histogram => "a histogram",
            ChartType::BarChart => "a bar chart",
            ChartType::GroupedBarChart => "a grouped bar chart",
            ChartType::StackedBarChart => "a stacked bar chart",
            ChartType::LineChart => "a line chart",
            ChartType::Scatterplot => "a scatterplot",
            ChartType::ParallelCoordinates => "a parallel coordinates plot",
        }
    }
}

impl fmt::Display for ChartType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortDirection {
    Ascending,
    Descending,
}

impl SortDirection {
    pub fn word(self) -> &'static str {
        match self {
            SortDirection::Ascending => "ascending",
            SortDirection::Descending => "descending",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortKey {
    Count,
    Attribute(String),
}

impl fmt::Display for SortKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SortKey::Count => f.write_str("count"),
            SortKey::Attribute(a) => f.write_str(a),
        }
    }
}

/// Category order for bar charts; on parallel coordinates, a descending
/// sort flips the named axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SortState {
    pub by: SortKey,
    pub direction: SortDirection,
    pub axis: Axis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InvalidReason {
    ColorWithoutAxes,
    CategoricalBothAxes,
    DuplicateBinding,
    SortOnUnsortableChart,
    SortAttributeNotEncoded,
    UnsupportedEncoding,
    UnsupportedChartType,
    UnknownAttribute,
}

impl InvalidReason {
    pub fn message(self) -> &'static str {
        match self {
            InvalidReason::ColorWithoutAxes => {
                "Map an attribute to the X or Y axis before coloring"
            }
            InvalidReason::CategoricalBothAxes => {
                "Categorical attributes cannot be shown on both axes"
            }
            InvalidReason::DuplicateBinding => "That attribute is already mapped there",
            InvalidReason::SortOnUnsortableChart => "This chart cannot be sorted",
            InvalidReason::SortAttributeNotEncoded => {
                "Only attributes shown in the chart can be used for sorting"
            }
            InvalidReason::UnsupportedEncoding => {
                "That combination of attributes is not supported"
            }
            InvalidReason::UnsupportedChartType => {
                "The chart cannot be shown as that type"
            }
            InvalidReason::UnknownAttribute => "That attribute is not in the dataset",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Inference {
    Empty,
    Chart(ChartType),
    Invalid(InvalidReason),
}

/// Chart type implied by the kinds bound to each channel.
pub fn infer_chart_type(
    x: Option<AttributeKind>,
    y: &[AttributeKind],
    color: Option<AttributeKind>,
) -> Inference {
    use AttributeKind::*;
    use ChartType::*;
    use Inference::{Chart, Invalid};
    let cat = |k: &AttributeKind| *k == Categorical;
    let color_cat = color.map(|c| c == Categorical);

    let base = match (x, y) {
        (None, []) => {
            return match color {
                Some(_) => Invalid(InvalidReason::ColorWithoutAxes),
                None => Inference::Empty,
            }
        }
        (Some(k), []) | (None, &[k]) => match k {
            Quantitative => Histogram,
            Categorical if color_cat == Some(true) => GroupedBarChart,
            Categorical => BarChart,
            Temporal => LineChart,
        },
        (None, ys) => {
            if ys.iter().any(cat) {
                return Invalid(InvalidReason::UnsupportedEncoding);
            }
            ParallelCoordinates
        }
        (Some(Categorical), ys) => {
            if ys.iter().any(cat) {
                return Invalid(InvalidReason::CategoricalBothAxes);
            }
            match (ys.len(), color_cat) {
                (1, Some(true)) => GroupedBarChart,
                (1, _) => BarChart,
                (_, Some(_)) => return Invalid(InvalidReason::UnsupportedEncoding),
                _ => GroupedBarChart,
            }
        }
        (Some(Temporal), ys) => {
            if ys.iter().any(cat) || (ys.len() > 1 && color.is_some()) {
                return Invalid(InvalidReason::UnsupportedEncoding);
            }
            LineChart
        }
        (Some(Quantitative), ys) => {
            if ys.iter().any(cat) {
                return Invalid(InvalidReason::UnsupportedEncoding);
            }
            if ys.len() == 1 {
                Scatterplot
            } else {
                ParallelCoordinates
            }
        }
    };
    if color_cat == Some(false) && !base.is_unaggregated() {
        return Invalid(InvalidReason::UnsupportedEncoding);
    }
    Chart(base)
}

fn override_allowed(base: ChartType, wanted: ChartType) -> bool {
    base == wanted
        || matches!(
            (base, wanted),
            (ChartType::GroupedBarChart, ChartType::StackedBarChart)
        )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BindMode {
    Replace,
    Append,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Validity {
    Valid,
    Invalid(InvalidReason),
}

/// The complete visualization state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub x: Option<String>,
    pub y: Vec<String>,
    pub color: Option<String>,
    pub aggregate_fn: AggregateFn,
    /// `None` is the empty view.
    pub chart_type: Option<ChartType>,
    pub type_override: Option<ChartType>,
    pub sort: Option<SortState>,
    pub filters: FilterSet,
}

impl Default for ChartSpec {
    fn default() -> Self {
        ChartSpec {
            x: None,
            y: Vec::new(),
            color: None,
            aggregate_fn: AggregateFn::Count,
            chart_type: None,
            type_override: None,
            sort: None,
            filters: FilterSet::new(),
        }
    }
}

impl ChartSpec {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.chart_type.is_none()
    }

    /// Attributes in axis order: x first, then every y.
    pub fn axis_attributes(&self) -> Vec<&str> {
        self.x
            .iter()
            .chain(self.y.iter())
            .map(String::as_str)
            .collect()
    }

    pub fn encodes(&self, attribute: &str) -> bool {
        self.channel_of(attribute).is_some()
    }

    pub fn channel_of(&self, attribute: &str) -> Option<Channel> {
        if self.x.as_deref() == Some(attribute) {
            Some(Channel::X)
        } else if self.y.iter().any(|a| a == attribute) {
            Some(Channel::Y)
        } else if self.color.as_deref() == Some(attribute) {
            Some(Channel::Color)
        } else {
            None
        }
    }

    pub fn bound(&self, channel: Channel) -> Vec<&str> {
        match channel {
            Channel::X => self.x.iter().map(String::as_str).collect(),
            Channel::Y => self.y.iter().map(String::as_str).collect(),
            Channel::Color => self.color.iter().map(String::as_str).collect(),
        }
    }

    /// The raw result of a binding, before re-inference.
    pub fn with_binding(&self, channel: Channel, attributes: &[String], mode: BindMode) -> Self {
        let mut next = self.clone();
        match channel {
            Channel::X => next.x = attributes.last().cloned(),
            Channel::Color => next.color = attributes.last().cloned(),
            Channel::Y => match mode {
                BindMode::Replace => next.y = attributes.to_vec(),
                BindMode::Append => next.y.extend(attributes.iter().cloned()),
            },
        }
        next
    }

    pub fn without_binding(&self, channel: Channel, attribute: Option<&str>) -> Self {
        let mut next = self.clone();
        match channel {
            Channel::X => next.x = None,
            Channel::Color => next.color = None,
            Channel::Y => match attribute {
                Some(a) => next.y.retain(|b| b != a),
                None => next.y.clear(),
            },
        }
        next
    }

    fn kinds(&self, dataset: &Dataset) -> Option<(Option<AttributeKind>, Vec<AttributeKind>, Option<AttributeKind>)> {
        let kind = |a: &String| dataset.kind_of(a);
        let x = match &self.x {
            Some(a) => Some(kind(a)?),
            None => None,
        };
        let y = self.y.iter().map(kind).collect::<Option<Vec<_>>>()?;
        let color = match &self.color {
            Some(a) => Some(kind(a)?),
            None => None,
        };
        Some((x, y, color))
    }

    pub fn inference(&self, dataset: &Dataset) -> Inference {
        match self.kinds(dataset) {
            Some((x, y, c)) => infer_chart_type(x, &y, c),
            None => Inference::Invalid(InvalidReason::UnknownAttribute),
        }
    }

    /// Re-derive chart type and aggregate after an encoding change, dropping
    /// a sort or type override the new chart cannot carry.
    pub fn refreshed(mut self, dataset: &Dataset) -> Self {
        let base = match self.inference(dataset) {
            Inference::Chart(t) => Some(t),
            _ => None,
        };
        if let (Some(b), Some(o)) = (base, self.type_override) {
            if !override_allowed(b, o) {
                self.type_override = None;
            }
        }
        if base.is_none() {
            self.type_override = None;
        }
        self.chart_type = self.type_override.or(base);
        self.aggregate_fn = if self.y.is_empty() {
            AggregateFn::Count
        } else {
            AggregateFn::Mean
        };
        if let Some(sort) = &self.sort {
            let keep = self.chart_type.is_some_and(ChartType::is_sortable)
                && self.sort_key_encoded(&sort.by);
            if !keep {
                self.sort = None;
            }
        }
        self
    }

    fn sort_key_encoded(&self, key: &SortKey) -> bool {
        match key {
            SortKey::Count => self.y.is_empty() || self.chart_type != Some(ChartType::ParallelCoordinates),
            SortKey::Attribute(a) => self.x.as_deref() == Some(a) || self.y.contains(a),
        }
    }

    /// A chart type the view may be switched to, if any.
    pub fn with_override(&self, wanted: ChartType, dataset: &Dataset) -> Result<Self, InvalidReason> {
        match self.inference(dataset) {
            Inference::Chart(base) if override_allowed(base, wanted) => {
                let mut next = self.clone();
                next.type_override = (wanted != base).then_some(wanted);
                Ok(next.refreshed(dataset))
            }
            Inference::Invalid(r) => Err(r),
            _ => Err(InvalidReason::UnsupportedChartType),
        }
    }
}

/// Check a spec against a dataset.
pub fn validate(spec: &ChartSpec, dataset: &Dataset) -> Validity {
    use InvalidReason::*;
    let names = spec
        .x
        .iter()
        .chain(spec.y.iter())
        .chain(spec.color.iter());
    for a in names {
        if dataset.index_of(a).is_none() {
            return Validity::Invalid(UnknownAttribute);
        }
    }
    if spec.filters.check(dataset).is_err() {
        return Validity::Invalid(UnknownAttribute);
    }
    let bound: Vec<&String> = spec.x.iter().chain(spec.y.iter()).chain(spec.color.iter()).collect();
    for (i, a) in bound.iter().enumerate() {
        if bound[..i].contains(a) {
            return Validity::Invalid(DuplicateBinding);
        }
    }
    let base = match spec.inference(dataset) {
        Inference::Invalid(r) => return Validity::Invalid(r),
        Inference::Empty => None,
        Inference::Chart(t) => Some(t),
    };
    let effective = match (base, spec.type_override) {
        (Some(b), Some(o)) if override_allowed(b, o) => Some(o),
        (_, Some(_)) => return Validity::Invalid(UnsupportedChartType),
        (b, None) => b,
    };
    if let Some(sort) = &spec.sort {
        match effective {
            Some(t) if t.is_sortable() => {}
            _ => return Validity::Invalid(SortOnUnsortableChart),
        }
        if !spec.sort_key_encoded(&sort.by) {
            return Validity::Invalid(SortAttributeNotEncoded);
        }
    }
    Validity::Valid
}

/// Single-attribute overview chart: histogram, bar chart or line chart by kind.
pub fn univariate_summary(attribute: &str, dataset: &Dataset) -> ChartSpec {
    ChartSpec {
        x: Some(attribute.to_string()),
        ..ChartSpec::empty()
    }
    .refreshed(dataset)
}
