//! Abstract scene for a chart: marks in data space, axes and legend.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::aggregate::{aggregate_rows, bin_rows, mean, Measure};
use crate::chart::spec::{ChartSpec, ChartType, SortDirection, SortKey};
use crate::dataset::{AttributeKind, Dataset, RowId, Value};
use crate::filter::{visible_rows, RowSet};
use crate::geometry::{self, Window};

pub const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac",
];

pub const DEFAULT_BIN_COUNT: usize = 10;
const TICK_TARGET: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Categories or bins along X.
    Vertical,
    /// Categories or bins along Y (single attribute bound to Y only).
    Horizontal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mark {
    pub id: String,
    pub rows: Vec<RowId>,
    /// Category, bin start or x position.
    pub x: Option<Value>,
    /// Upper bin edge for histograms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_end: Option<f64>,
    /// Measure value or y position.
    pub y: Option<f64>,
    /// Stack base for stacked bars.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_base: Option<f64>,
    /// One value per axis on parallel coordinates.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coords: Vec<Option<f64>>,
    pub color: Option<Value>,
    pub series: Option<String>,
    pub selected: bool,
}

impl Mark {
    fn new(id: String, rows: Vec<RowId>) -> Self {
        Mark {
            id,
            rows,
            x: None,
            x_end: None,
            y: None,
            y_base: None,
            coords: Vec::new(),
            color: None,
            series: None,
            selected: false,
        }
    }

    /// Top of the bar (base + height).
    pub fn top(&self) -> Option<f64> {
        self.y.map(|y| y + self.y_base.unwrap_or(0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Scale {
    Band {
        categories: Vec<Value>,
    },
    Linear {
        domain: Option<Window<f64>>,
        ticks: Vec<f64>,
        reversed: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisView {
    pub attributes: Vec<String>,
    pub title: String,
    pub scale: Scale,
}

impl AxisView {
    pub fn is_categorical(&self) -> bool {
        matches!(self.scale, Scale::Band { .. })
    }

    pub fn domain(&self) -> Option<Window<f64>> {
        match &self.scale {
            Scale::Linear { domain, .. } => *domain,
            Scale::Band { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendEntry {
    pub value: Value,
    pub swatch: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Legend {
    pub title: String,
    /// Entries are series (y attributes) rather than color values.
    pub series: bool,
    pub entries: Vec<LegendEntry>,
}

/// Visible axis ranges after zoom and pan; axes without a window show their
/// full data extent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Viewport {
    pub x: Option<Window<f64>>,
    pub y: Option<Window<f64>>,
}

impl Viewport {
    pub fn is_full(&self) -> bool {
        self.x.is_none() && self.y.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ViewConfig {
    pub bin_count: usize,
}

impl Default for ViewConfig {
    fn default() -> Self {
        ViewConfig {
            bin_count: DEFAULT_BIN_COUNT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewModel {
    pub chart_type: Option<ChartType>,
    pub orientation: Orientation,
    pub marks: Vec<Mark>,
    pub x_axis: Option<AxisView>,
    pub y_axes: Vec<AxisView>,
    pub legend: Option<Legend>,
    pub visible_rows: usize,
}

impl ViewModel {
    pub fn empty() -> Self {
        ViewModel {
            chart_type: None,
            orientation: Orientation::Vertical,
            marks: Vec::new(),
            x_axis: None,
            y_axes: Vec::new(),
            legend: None,
            visible_rows: 0,
        }
    }

    pub fn mark(&self, id: &str) -> Option<&Mark> {
        self.marks.iter().find(|m| m.id == id)
    }

    /// Axis holding categories or bins.
    pub fn dimension_axis(&self) -> Option<&AxisView> {
        match self.orientation {
            Orientation::Vertical => self.x_axis.as_ref(),
            Orientation::Horizontal => self.y_axes.first(),
        }
    }

    /// Axis holding bar heights.
    pub fn measure_axis(&self) -> Option<&AxisView> {
        match self.orientation {
            Orientation::Vertical => self.y_axes.first(),
            Orientation::Horizontal => self.x_axis.as_ref(),
        }
    }
}

fn swatch(i: usize) -> String {
    PALETTE[i % PALETTE.len()].to_string()
}

fn extent(values: impl IntoIterator<Item = f64>) -> Option<Window<f64>> {
    values
        .into_iter()
        .filter(|v| v.is_finite())
        .fold(None, |acc: Option<Window<f64>>, v| match acc {
            None => Some(Window::new(v, v)),
            Some(w) => Some(Window::new(w.lo.min(v), w.hi.max(v))),
        })
}

fn linear(attributes: Vec<String>, title: String, domain: Option<Window<f64>>, window: Option<Window<f64>>, reversed: bool) -> AxisView {
    let domain = window.or(domain);
    let ticks = domain
        .map(|d| geometry::ticks(d.lo, d.hi, TICK_TARGET))
        .unwrap_or_default();
    AxisView {
        attributes,
        title,
        scale: Scale::Linear {
            domain,
            ticks,
            reversed,
        },
    }
}

fn band(attribute: &str, categories: Vec<Value>) -> AxisView {
    AxisView {
        attributes: vec![attribute.to_string()],
        title: attribute.to_string(),
        scale: Scale::Band { categories },
    }
}

/// Build the scene for a valid spec. Invalid or empty specs give an empty
/// scene.
pub fn compute_view(
    spec: &ChartSpec,
    dataset: &Dataset,
    selection: &RowSet,
    viewport: &Viewport,
    config: &ViewConfig,
) -> ViewModel {
    let Some(chart_type) = spec.chart_type else {
        return ViewModel::empty();
    };
    let Ok(rows) = visible_rows(&spec.filters, dataset) else {
        return ViewModel::empty();
    };
    let mut view = match chart_type {
        ChartType::Histogram => histogram(spec, dataset, &rows, viewport, config),
        ChartType::BarChart | ChartType::GroupedBarChart | ChartType::StackedBarChart => {
            bars(spec, dataset, &rows, viewport, chart_type)
        }
        ChartType::LineChart => lines(spec, dataset, &rows, viewport),
        ChartType::Scatterplot => scatter(spec, dataset, &rows, viewport),
        ChartType::ParallelCoordinates => parallel(spec, dataset, &rows),
    };
    view.chart_type = Some(chart_type);
    view.visible_rows = rows.len();
    build_legend(spec, dataset, &rows, &mut view);
    if !selection.is_empty() {
        for m in &mut view.marks {
            m.selected = m.rows.iter().any(|r| selection.contains(r));
        }
    }
    view
}

/// Dimension attribute and orientation for charts over one primary attribute.
fn dimension(spec: &ChartSpec) -> (String, Orientation) {
    match &spec.x {
        Some(x) => (x.clone(), Orientation::Vertical),
        None => (spec.y[0].clone(), Orientation::Horizontal),
    }
}

/// Measure attributes: the y list when x carries the dimension.
fn measures(spec: &ChartSpec) -> &[String] {
    if spec.x.is_some() {
        &spec.y
    } else {
        &[]
    }
}

fn place_axes(view: &mut ViewModel, orientation: Orientation, dim: AxisView, measure: AxisView) {
    view.orientation = orientation;
    match orientation {
        Orientation::Vertical => {
            view.x_axis = Some(dim);
            view.y_axes = vec![measure];
        }
        Orientation::Horizontal => {
            view.x_axis = Some(measure);
            view.y_axes = vec![dim];
        }
    }
}

fn windows(viewport: &Viewport, orientation: Orientation) -> (Option<Window<f64>>, Option<Window<f64>>) {
    match orientation {
        Orientation::Vertical => (viewport.x, viewport.y),
        Orientation::Horizontal => (viewport.y, viewport.x),
    }
}

fn histogram(
    spec: &ChartSpec,
    dataset: &Dataset,
    rows: &RowSet,
    viewport: &Viewport,
    config: &ViewConfig,
) -> ViewModel {
    let (dim, orientation) = dimension(spec);
    let bins = bin_rows(dataset, rows, &dim, config.bin_count);
    let mut view = ViewModel::empty();
    for (i, b) in bins.iter().enumerate() {
        match &spec.color {
            None => {
                let mut m = Mark::new(format!("bin:{i}"), b.members.clone());
                m.x = Some(Value::Number(b.lo));
                m.x_end = Some(b.hi);
                m.y = Some(b.count as f64);
                view.marks.push(m);
            }
            Some(c) => {
                let mut by_color: BTreeMap<Value, Vec<RowId>> = BTreeMap::new();
                for &r in &b.members {
                    if let Some(v) = dataset.value(r, c).filter(|v| !v.is_null()) {
                        by_color.entry(v.clone()).or_default().push(r);
                    }
                }
                let mut base = 0.0;
                for (v, members) in by_color {
                    let mut m = Mark::new(format!("bin:{i}:{}", v.label()), members);
                    m.x = Some(Value::Number(b.lo));
                    m.x_end = Some(b.hi);
                    m.y = Some(m.rows.len() as f64);
                    m.y_base = Some(base);
                    base += m.rows.len() as f64;
                    m.series = Some(v.label());
                    m.color = Some(v);
                    view.marks.push(m);
                }
            }
        }
    }
    let dim_domain = match (bins.first(), bins.last()) {
        (Some(f), Some(l)) => Some(Window::new(f.lo, l.hi)),
        _ => None,
    };
    let max_count = view.marks.iter().filter_map(Mark::top).fold(None, |a: Option<f64>, v| Some(a.map_or(v, |a| a.max(v))));
    let (dim_win, measure_win) = windows(viewport, orientation);
    let dim_axis = linear(vec![dim.clone()], dim, dim_domain, dim_win, false);
    let measure_axis = linear(
        Vec::new(),
        "Count".into(),
        max_count.map(|m| Window::new(0.0, m)),
        measure_win,
        false,
    );
    place_axes(&mut view, orientation, dim_axis, measure_axis);
    view
}

struct Category {
    value: Value,
    rows: RowSet,
}

fn categories(dataset: &Dataset, rows: &RowSet, attribute: &str) -> Vec<Category> {
    let mut map: BTreeMap<Value, RowSet> = BTreeMap::new();
    for &r in rows {
        if let Some(v) = dataset.value(r, attribute).filter(|v| !v.is_null()) {
            map.entry(v.clone()).or_default().insert(r);
        }
    }
    map.into_iter()
        .map(|(value, rows)| Category { value, rows })
        .collect()
}

fn sort_categories(spec: &ChartSpec, dataset: &Dataset, dim: &str, cats: &mut [Category]) {
    let Some(sort) = &spec.sort else { return };
    let key = |c: &Category| -> Option<f64> {
        match &sort.by {
            SortKey::Count => Some(c.rows.len() as f64),
            SortKey::Attribute(a) if a == dim => None,
            SortKey::Attribute(a) => mean(c.rows.iter().map(|&r| dataset.numeric(r, a))),
        }
    };
    let by_label = matches!(&sort.by, SortKey::Attribute(a) if a == dim);
    cats.sort_by(|a, b| {
        let ord = if by_label {
            a.value.cmp(&b.value)
        } else {
            // missing measures sort last in either direction
            match (key(a), key(b)) {
                (Some(x), Some(y)) => x.total_cmp(&y),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => std::cmp::Ordering::Equal,
            }
        };
        let ord = match sort.direction {
            SortDirection::Ascending => ord,
            SortDirection::Descending if by_label => ord.reverse(),
            SortDirection::Descending => match (key(a), key(b)) {
                (Some(_), Some(_)) => ord.reverse(),
                _ => ord,
            },
        };
        ord.then_with(|| a.value.cmp(&b.value))
    });
}

fn bars(
    spec: &ChartSpec,
    dataset: &Dataset,
    rows: &RowSet,
    viewport: &Viewport,
    chart_type: ChartType,
) -> ViewModel {
    let (dim, orientation) = dimension(spec);
    let ys = measures(spec);
    let mut cats = categories(dataset, rows, &dim);
    sort_categories(spec, dataset, &dim, &mut cats);
    let stacked = chart_type == ChartType::StackedBarChart;
    let mut view = ViewModel::empty();
    let color_series = spec.color.is_some() && ys.len() <= 1;

    for cat in &cats {
        let label = cat.value.label();
        let mut base = 0.0;
        let mut push = |view: &mut ViewModel, id: String, members: Vec<RowId>, value: Option<f64>, series: Option<String>, color: Option<Value>| {
            let mut m = Mark::new(id, members);
            m.x = Some(cat.value.clone());
            m.y = value;
            if stacked {
                m.y_base = Some(base);
                base += value.unwrap_or(0.0);
            }
            m.series = series;
            m.color = color;
            view.marks.push(m);
        };
        if ys.len() >= 2 {
            for a in ys {
                let value = mean(cat.rows.iter().map(|&r| dataset.numeric(r, a)));
                push(&mut view, format!("bar:{label}:{a}"), cat.rows.iter().copied().collect(), value, Some(a.clone()), None);
            }
        } else if color_series {
            let c = spec.color.as_deref().unwrap();
            let measure = ys.first().map(Measure::mean).unwrap_or_else(Measure::count);
            let table = aggregate_rows(dataset, &cat.rows, &[c.to_string()], &[measure])
                .unwrap_or_default();
            for g in table.groups {
                let v = g.keys[0].1.clone();
                push(&mut view, format!("bar:{label}:{}", v.label()), g.rows.iter().copied().collect(), g.measures[0].value, Some(v.label()), Some(v));
            }
        } else {
            let value = match ys.first() {
                Some(a) => mean(cat.rows.iter().map(|&r| dataset.numeric(r, a))),
                None => Some(cat.rows.len() as f64),
            };
            push(&mut view, format!("bar:{label}"), cat.rows.iter().copied().collect(), value, None, None);
        }
    }

    let tops = view.marks.iter().filter_map(|m| if stacked { m.top() } else { m.y });
    let measure_domain = extent(tops.chain(std::iter::once(0.0)).collect::<Vec<_>>())
        .filter(|_| !view.marks.is_empty());
    let measure_title = if ys.is_empty() {
        "Count".to_string()
    } else {
        ys.join(", ")
    };
    let (_, measure_win) = windows(viewport, orientation);
    let dim_axis = band(&dim, cats.iter().map(|c| c.value.clone()).collect());
    let measure_axis = linear(ys.to_vec(), measure_title, measure_domain, measure_win, false);
    place_axes(&mut view, orientation, dim_axis, measure_axis);
    view
}

fn lines(spec: &ChartSpec, dataset: &Dataset, rows: &RowSet, viewport: &Viewport) -> ViewModel {
    let (dim, orientation) = dimension(spec);
    let ys = measures(spec);
    let mut view = ViewModel::empty();
    let cats = categories(dataset, rows, &dim);
    let color = spec.color.as_deref().filter(|_| ys.len() <= 1);
    for cat in &cats {
        let label = cat.value.label();
        let mut push = |id: String, members: Vec<RowId>, value: Option<f64>, series: String, color: Option<Value>| {
            let mut m = Mark::new(id, members);
            m.x = Some(cat.value.clone());
            m.y = value;
            m.series = Some(series);
            m.color = color;
            view.marks.push(m);
        };
        if let Some(c) = color {
            let measure = ys.first().map(Measure::mean).unwrap_or_else(Measure::count);
            let table = aggregate_rows(dataset, &cat.rows, &[c.to_string()], &[measure])
                .unwrap_or_default();
            for g in table.groups {
                let v = g.keys[0].1.clone();
                push(format!("pt:{}:{label}", v.label()), g.rows.iter().copied().collect(), g.measures[0].value, v.label(), Some(v));
            }
        } else if ys.is_empty() {
            push(format!("pt:count:{label}"), cat.rows.iter().copied().collect(), Some(cat.rows.len() as f64), "count".into(), None);
        } else {
            for a in ys {
                let value = mean(cat.rows.iter().map(|&r| dataset.numeric(r, a)));
                push(format!("pt:{a}:{label}"), cat.rows.iter().copied().collect(), value, a.clone(), None);
            }
        }
    }
    // series-major order keeps each polyline contiguous
    view.marks.sort_by(|a, b| a.series.cmp(&b.series));
    let dim_domain = extent(cats.iter().filter_map(|c| crate::dataset::numeric_value(&c.value)));
    let measure_domain = extent(view.marks.iter().filter_map(|m| m.y).chain(
        if ys.is_empty() { Some(0.0) } else { None },
    ).collect::<Vec<_>>()).filter(|_| !view.marks.is_empty());
    let (dim_win, measure_win) = windows(viewport, orientation);
    let dim_axis = linear(vec![dim.clone()], dim, dim_domain, dim_win, false);
    let title = if ys.is_empty() { "Count".to_string() } else { ys.join(", ") };
    let measure_axis = linear(ys.to_vec(), title, measure_domain, measure_win, false);
    place_axes(&mut view, orientation, dim_axis, measure_axis);
    view
}

fn scatter(spec: &ChartSpec, dataset: &Dataset, rows: &RowSet, viewport: &Viewport) -> ViewModel {
    let x = spec.x.as_deref().expect("scatterplot has x");
    let y = spec.y[0].as_str();
    let mut view = ViewModel::empty();
    for &r in rows {
        let (Some(vx), Some(vy)) = (dataset.numeric(r, x), dataset.numeric(r, y)) else {
            continue;
        };
        let mut m = Mark::new(format!("row:{r}"), vec![r]);
        m.x = Some(Value::Number(vx));
        m.y = Some(vy);
        m.color = spec
            .color
            .as_deref()
            .and_then(|c| dataset.value(r, c).cloned())
            .filter(|v| !v.is_null());
        view.marks.push(m);
    }
    let xd = extent(view.marks.iter().filter_map(|m| m.x.as_ref().and_then(Value::as_number)).collect::<Vec<_>>());
    let yd = extent(view.marks.iter().filter_map(|m| m.y).collect::<Vec<_>>());
    view.x_axis = Some(linear(vec![x.into()], x.into(), xd, viewport.x, false));
    view.y_axes = vec![linear(vec![y.into()], y.into(), yd, viewport.y, false)];
    view
}

fn parallel(spec: &ChartSpec, dataset: &Dataset, rows: &RowSet) -> ViewModel {
    let axes: Vec<String> = spec.axis_attributes().into_iter().map(String::from).collect();
    let mut view = ViewModel::empty();
    for &r in rows {
        let mut m = Mark::new(format!("row:{r}"), vec![r]);
        m.coords = axes.iter().map(|a| dataset.numeric(r, a)).collect();
        m.color = spec
            .color
            .as_deref()
            .and_then(|c| dataset.value(r, c).cloned())
            .filter(|v| !v.is_null());
        view.marks.push(m);
    }
    view.y_axes = axes
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let d = extent(view.marks.iter().filter_map(|m| m.coords[i]).collect::<Vec<_>>());
            let reversed = spec.sort.as_ref().is_some_and(|s| {
                s.direction == SortDirection::Descending && s.by == SortKey::Attribute(a.clone())
            });
            linear(vec![a.clone()], a.clone(), d, None, reversed)
        })
        .collect();
    view
}

fn build_legend(spec: &ChartSpec, dataset: &Dataset, rows: &RowSet, view: &mut ViewModel) {
    if let Some(c) = &spec.color {
        let kind = dataset.kind_of(c);
        let values: BTreeSet<Value> = rows
            .iter()
            .filter_map(|&r| dataset.value(r, c))
            .filter(|v| !v.is_null())
            .cloned()
            .collect();
        let entries: Vec<LegendEntry> = if kind == Some(AttributeKind::Categorical) {
            values
                .into_iter()
                .enumerate()
                .map(|(i, value)| LegendEntry { value, swatch: swatch(i) })
                .collect()
        } else {
            let nums: Vec<f64> = values.iter().filter_map(crate::dataset::numeric_value).collect();
            match extent(nums) {
                Some(w) => vec![
                    LegendEntry { value: Value::Number(w.lo), swatch: swatch(0) },
                    LegendEntry { value: Value::Number(w.hi), swatch: swatch(1) },
                ],
                None => Vec::new(),
            }
        };
        view.legend = Some(Legend {
            title: c.clone(),
            series: false,
            entries,
        });
        return;
    }
    let ys = measures(spec);
    let multi_series = matches!(
        view.chart_type,
        Some(ChartType::GroupedBarChart | ChartType::StackedBarChart | ChartType::LineChart)
    ) && ys.len() >= 2;
    if multi_series {
        view.legend = Some(Legend {
            title: String::new(),
            series: true,
            entries: ys
                .iter()
                .enumerate()
                .map(|(i, a)| LegendEntry { value: Value::Text(a.clone()), swatch: swatch(i) })
                .collect(),
        });
    }
}
