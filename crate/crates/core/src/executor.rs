//! Applies operation requests to the application state.
//!
//! Every request yields exactly one feedback message. Void and Error
//! outcomes leave the state untouched; the revision counter moves only when
//! the state actually changes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::chart::{
    compute_view, validate, Axis, BindMode, Channel, ChartSpec, ChartType, InvalidReason, Mark,
    Orientation, SortState, Validity, ViewConfig, ViewModel, Viewport,
};
use crate::dataset::{AttributeKind, Dataset, RowId, Value};
use crate::feedback::{FeedbackCode, FeedbackKind, FeedbackMessage, NO_MATCHING_POINTS};
use crate::filter::{visible_rows, Filter, Interval, Polarity, RowSet};
use crate::fusion::{FilterRequest, Operation, OperationRequest, Probe, SelectAct};
use crate::gesture::InstrumentZone;
use crate::parser::Reference;
use crate::{format_list, Window};

/// Records returned with a detail response at most.
pub const DETAIL_RECORD_CAP: usize = 50;
/// Point tolerance of the ruler, as a fraction of the axis span.
pub const RULER_TOLERANCE: f64 = 0.01;
/// Relative tolerance under which a window counts as the full extent.
const FULL_EXTENT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AppState {
    pub spec: ChartSpec,
    pub selection: RowSet,
    pub viewport: Viewport,
    pub revision: u64,
}

impl AppState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn view(&self, dataset: &Dataset, config: &ViewConfig) -> ViewModel {
        compute_view(&self.spec, dataset, &self.selection, &self.viewport, config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkDetail {
    pub id: String,
    pub label: String,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetailPayload {
    pub probe: Probe,
    pub marks: Vec<MarkDetail>,
    /// First records under the probe, capped.
    pub records: Vec<BTreeMap<String, Value>>,
    pub total_records: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub feedback: FeedbackMessage,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<DetailPayload>,
    pub changed: bool,
}

impl Outcome {
    fn message(feedback: FeedbackMessage) -> Self {
        Outcome {
            feedback,
            detail: None,
            changed: false,
        }
    }
}

/// Proposed state change.
enum Step {
    Commit(AppState, FeedbackMessage),
    Details(DetailPayload, FeedbackMessage),
    Reject(FeedbackMessage),
}

use Step::Reject;

fn void(code: FeedbackCode, text: impl Into<String>) -> Step {
    Reject(FeedbackMessage::void(code, text))
}

fn empty_view() -> Step {
    Reject(FeedbackMessage::error(
        FeedbackCode::EmptyView,
        "Add an attribute to the chart first",
    ))
}

fn capitalized(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

pub struct Executor<'a> {
    pub dataset: &'a Dataset,
    pub config: &'a ViewConfig,
}

impl<'a> Executor<'a> {
    pub fn new(dataset: &'a Dataset, config: &'a ViewConfig) -> Self {
        Executor { dataset, config }
    }

    /// Apply one request. The state is replaced only on a changing success.
    pub fn apply(&self, state: &mut AppState, request: &OperationRequest) -> Outcome {
        match self.step(state, &request.op) {
            Step::Commit(mut next, feedback) => {
                debug_assert_eq!(feedback.kind, FeedbackKind::Success);
                next.revision = state.revision + 1;
                *state = next;
                Outcome {
                    feedback,
                    detail: None,
                    changed: true,
                }
            }
            Step::Details(detail, feedback) => Outcome {
                feedback,
                detail: Some(detail),
                changed: false,
            },
            Reject(feedback) => Outcome::message(feedback),
        }
    }

    fn step(&self, state: &AppState, op: &Operation) -> Step {
        match op {
            Operation::BindEncoding {
                channel,
                attributes,
                mode,
            } => self.bind(state, *channel, attributes, *mode),
            Operation::UnbindEncoding { channel, attribute } => {
                self.unbind(state, *channel, attribute.as_deref())
            }
            Operation::Sort { sort, strict } => self.sort(state, sort, *strict),
            Operation::Filter { filter } => self.filter(state, filter),
            Operation::Details { probe } => self.details(state, probe),
            Operation::ChangeChartType { chart_type } => self.change_chart(state, *chart_type),
            Operation::Select { act, compound } => self.select(state, act, *compound),
            Operation::Zoom {
                scale,
                center_x,
                center_y,
            } => self.zoom(state, *scale, *center_x, *center_y),
            Operation::Pan { dx, dy } => self.pan(state, *dx, *dy),
            Operation::ClearSelection => {
                if state.selection.is_empty() {
                    return void(FeedbackCode::NoChange, "Nothing is selected");
                }
                let mut next = state.clone();
                next.selection.clear();
                Step::Commit(next, FeedbackMessage::success(FeedbackCode::SelectionCleared, "Selection cleared"))
            }
            Operation::ClearFilter { index } => {
                let mut next = state.clone();
                match next.spec.filters.remove(*index) {
                    Some(f) => {
                        let text = format!("Removed filter: {}", f.describe());
                        Step::Commit(next, FeedbackMessage::success(FeedbackCode::FilterCleared, text))
                    }
                    None => void(FeedbackCode::NoChange, "That filter no longer exists"),
                }
            }
        }
    }

    fn view(&self, state: &AppState) -> ViewModel {
        state.view(self.dataset, self.config)
    }

    /// Commit a new spec after an encoding change.
    fn respec(&self, state: &AppState, next: ChartSpec, text: String, code: FeedbackCode) -> Step {
        if let Validity::Invalid(r) = validate(&next, self.dataset) {
            return Reject(FeedbackMessage::invalid(r));
        }
        let text = match next.chart_type {
            Some(t) if next.chart_type != state.spec.chart_type => {
                format!("{text}; now showing {}", t.article_name())
            }
            None if state.spec.chart_type.is_some() => format!("{text}; the chart is now empty"),
            _ => text,
        };
        let mut s = state.clone();
        if next.chart_type != state.spec.chart_type {
            s.selection.clear();
        }
        s.spec = next;
        s.viewport = Viewport::default();
        Step::Commit(s, FeedbackMessage::success(code, text))
    }

    fn bind(&self, state: &AppState, channel: Channel, attributes: &[String], mode: BindMode) -> Step {
        if attributes.is_empty() {
            return void(FeedbackCode::NoChange, "No attribute was given");
        }
        let next = state.spec.with_binding(channel, attributes, mode).refreshed(self.dataset);
        if next == state.spec {
            return void(
                FeedbackCode::NoChange,
                format!("{} is already shown on {}", format_list(attributes), channel.phrase()),
            );
        }
        let list = format_list(attributes);
        let text = match (channel, mode) {
            (Channel::Color, _) => format!("Colored by {list}"),
            (Channel::Y, BindMode::Append) if !state.spec.y.is_empty() => {
                format!("Added {list} to the Y-axis")
            }
            _ => format!("Showing {list} on {}", channel.phrase()),
        };
        self.respec(state, next, text, FeedbackCode::Bound)
    }

    fn unbind(&self, state: &AppState, channel: Channel, attribute: Option<&str>) -> Step {
        let next = state.spec.without_binding(channel, attribute).refreshed(self.dataset);
        let removed: Vec<String> = state
            .spec
            .bound(channel)
            .into_iter()
            .filter(|a| attribute.is_none_or(|x| x == *a))
            .map(String::from)
            .collect();
        if removed.is_empty() {
            let what = attribute.unwrap_or("Nothing");
            return void(FeedbackCode::NoChange, format!("{what} is not on {}", channel.phrase()));
        }
        let text = match channel {
            Channel::Color => "Removed the color encoding".to_string(),
            _ => format!("Removed {} from {}", format_list(&removed), channel.phrase()),
        };
        self.respec(state, next, text, FeedbackCode::Unbound)
    }

    fn sort(&self, state: &AppState, sort: &SortState, strict: bool) -> Step {
        let Some(chart) = state.spec.chart_type else {
            return empty_view();
        };
        if !chart.is_sortable() {
            return if strict {
                Reject(FeedbackMessage::invalid(InvalidReason::SortOnUnsortableChart))
            } else {
                void(FeedbackCode::NotSortable, InvalidReason::SortOnUnsortableChart.message())
            };
        }
        let noun = chart.mark_noun();
        if state.spec.sort.as_ref() == Some(sort) {
            return void(
                FeedbackCode::AlreadySorted,
                format!(
                    "{} are already sorted in {} order by {}",
                    capitalized(noun),
                    sort.direction.word(),
                    sort.by
                ),
            );
        }
        let mut next = state.spec.clone();
        next.sort = Some(sort.clone());
        if let Validity::Invalid(r) = validate(&next, self.dataset) {
            return Reject(FeedbackMessage::invalid(r));
        }
        let mut s = state.clone();
        s.spec = next;
        let text = format!("Sorted {noun} by {} in {} order", sort.by, sort.direction.word());
        Step::Commit(s, FeedbackMessage::success(FeedbackCode::Sorted, text))
    }

    fn change_chart(&self, state: &AppState, wanted: ChartType) -> Step {
        if state.spec.is_empty() {
            return empty_view();
        }
        match state.spec.with_override(wanted, self.dataset) {
            Err(r) => Reject(FeedbackMessage::invalid(r)),
            Ok(next) if next == state.spec => {
                void(FeedbackCode::NoChange, format!("Already showing {}", wanted.article_name()))
            }
            Ok(next) => {
                let mut s = state.clone();
                s.spec = next;
                s.selection.clear();
                let text = format!("Showing {}", wanted.article_name());
                Step::Commit(s, FeedbackMessage::success(FeedbackCode::ChartChanged, text))
            }
        }
    }

    fn filter(&self, state: &AppState, request: &FilterRequest) -> Step {
        let Some(chart) = state.spec.chart_type else {
            return empty_view();
        };
        let ds = self.dataset;
        let Ok(visible) = visible_rows(&state.spec.filters, ds) else {
            return Reject(FeedbackMessage::invalid(InvalidReason::UnknownAttribute));
        };
        let mut next = state.spec.clone();
        let mut clear_selection = false;
        let keep_only = matches!(
            request,
            FilterRequest::Criteria { polarity: Polarity::Keep, .. }
                | FilterRequest::Selection { polarity: Polarity::Keep, .. }
        );
        let text = match request {
            FilterRequest::Criteria {
                attribute,
                interval,
                polarity,
            } => {
                match ds.kind_of(attribute) {
                    None => return Reject(FeedbackMessage::invalid(InvalidReason::UnknownAttribute)),
                    Some(k) if !k.is_continuous() => {
                        return Reject(FeedbackMessage::invalid(InvalidReason::UnsupportedEncoding))
                    }
                    _ => {}
                }
                next.filters.push(Filter::Range {
                    attribute: attribute.clone(),
                    interval: *interval,
                    polarity: *polarity,
                });
                let verb = match polarity {
                    Polarity::Remove => "Removed",
                    Polarity::Keep => "Kept",
                };
                format!("{verb} rows with {attribute} {interval}")
            }
            FilterRequest::Values {
                attribute,
                values,
                polarity,
                except,
            } => {
                match ds.kind_of(attribute) {
                    None => return Reject(FeedbackMessage::invalid(InvalidReason::UnknownAttribute)),
                    Some(AttributeKind::Categorical) => {}
                    Some(_) => return Reject(FeedbackMessage::invalid(InvalidReason::UnsupportedEncoding)),
                }
                let present = distinct(ds, &visible, attribute);
                let named: BTreeSet<Value> = values.iter().cloned().collect();
                let remove_named = (*polarity == Polarity::Remove) != *except;
                let excluded: Vec<Value> = present
                    .iter()
                    .filter(|v| named.contains(*v) == remove_named)
                    .cloned()
                    .collect();
                let labels: Vec<String> = values.iter().map(Value::label).collect();
                next.filters.exclude_values(attribute, excluded);
                if remove_named {
                    format!("Removed {}", format_list(&labels))
                } else {
                    format!("Kept only {}", format_list(&labels))
                }
            }
            FilterRequest::Selection { reference, polarity } => {
                let selected: RowSet = state.selection.intersection(&visible).copied().collect();
                if selected.is_empty() {
                    return void(FeedbackCode::EmptySelection, "Select some marks first");
                }
                let ids = match reference {
                    Reference::These => selected,
                    Reference::Others => visible.difference(&selected).copied().collect(),
                };
                next.filters.push(Filter::Ids {
                    ids,
                    polarity: *polarity,
                });
                clear_selection = true;
                let which = match reference {
                    Reference::These => "selected",
                    Reference::Others => "unselected",
                };
                match polarity {
                    Polarity::Remove => format!("Removed the {which} {}", chart.mark_noun()),
                    Polarity::Keep => format!("Kept only the {which} {}", chart.mark_noun()),
                }
            }
            FilterRequest::EraseMarks { ids } => {
                let view = self.view(state);
                let marks: Vec<&Mark> = ids.iter().filter_map(|id| view.mark(id)).collect();
                if marks.is_empty() {
                    return void(FeedbackCode::NoMarks, "No marks were erased");
                }
                erase_marks(&view, &marks, &mut next);
                format!("Removed {} {}", marks.len(), chart.mark_noun())
            }
            FilterRequest::EraseLegend { values } => {
                let view = self.view(state);
                let (Some(color), Some(legend)) = (&state.spec.color, &view.legend) else {
                    return void(FeedbackCode::NoMarks, "There is no legend to erase from");
                };
                if legend.series || ds.kind_of(color) != Some(AttributeKind::Categorical) {
                    return void(FeedbackCode::NoMarks, "Only color categories can be erased");
                }
                let present = distinct(ds, &visible, color);
                let gone: Vec<Value> = values.iter().filter(|v| present.contains(*v)).cloned().collect();
                let labels: Vec<String> = gone.iter().map(Value::label).collect();
                next.filters.exclude_values(color, gone);
                format!("Removed {}", format_list(&labels))
            }
        };

        let after = visible_rows(&next.filters, ds).unwrap_or_default();
        if after.len() == visible.len() {
            return if keep_only {
                void(FeedbackCode::NoChange, "All points already meet that criteria")
            } else {
                void(FeedbackCode::NoMatchingPoints, NO_MATCHING_POINTS)
            };
        }
        if after.is_empty() {
            return void(FeedbackCode::NoMatchingPoints, NO_MATCHING_POINTS);
        }
        let mut s = state.clone();
        s.spec = next.refreshed(ds);
        if clear_selection {
            s.selection.clear();
        } else {
            s.selection.retain(|r| after.contains(r));
        }
        let text = format!("{text} ({} rows shown)", after.len());
        Step::Commit(s, FeedbackMessage::success(FeedbackCode::Filtered, text))
    }

    fn select(&self, state: &AppState, act: &SelectAct, compound: bool) -> Step {
        let view = self.view(state);
        let Some(chart) = view.chart_type else {
            return empty_view();
        };
        let rows: RowSet = match act {
            SelectAct::Mark { id } => match view.mark(id) {
                Some(m) => m.rows.iter().copied().collect(),
                None => return void(FeedbackCode::NoMarks, "That mark is no longer in the view"),
            },
            SelectAct::LegendItem { value } => {
                let hits: RowSet = view
                    .marks
                    .iter()
                    .filter(|m| match (&m.color, &m.series) {
                        (Some(c), _) => c == value,
                        (None, Some(s)) => value.as_text() == Some(s.as_str()),
                        _ => false,
                    })
                    .flat_map(|m| m.rows.iter().copied())
                    .collect();
                if hits.is_empty() {
                    return void(FeedbackCode::NoMarks, "No marks have that value");
                }
                hits
            }
            SelectAct::AxisRange {
                axis,
                axis_index,
                lo,
                hi,
            } => {
                let Some(role) = axis_role(&view, *axis, *axis_index) else {
                    return void(FeedbackCode::NoMarks, "Select a range on a numeric scale");
                };
                let range = Window::new(*lo, *hi);
                view.marks
                    .iter()
                    .filter(|m| {
                        mark_span(m, role).is_some_and(|(a, b)| a <= range.hi && b >= range.lo)
                    })
                    .flat_map(|m| m.rows.iter().copied())
                    .collect()
            }
            SelectAct::Lasso { polygon } => {
                if polygon.is_degenerate() {
                    return void(FeedbackCode::NoMarks, "Draw a closed loop around marks");
                }
                if !matches!(chart, ChartType::Scatterplot | ChartType::LineChart) {
                    return void(FeedbackCode::NoMarks, "Lasso works on scatterplots and line charts");
                }
                view.marks
                    .iter()
                    .filter(|m| match (m.x.as_ref().and_then(Value::as_number), m.y) {
                        (Some(x), Some(y)) => polygon.contains(crate::Point::new(x, y)),
                        _ => false,
                    })
                    .flat_map(|m| m.rows.iter().copied())
                    .collect()
            }
        };
        let next_sel: RowSet = if compound {
            state.selection.union(&rows).copied().collect()
        } else {
            rows
        };
        if next_sel == state.selection {
            return void(FeedbackCode::NoChange, "Selection unchanged");
        }
        let n = view
            .marks
            .iter()
            .filter(|m| m.rows.iter().any(|r| next_sel.contains(r)))
            .count();
        let mut s = state.clone();
        s.selection = next_sel;
        let text = if n == 0 {
            format!("No {} selected", chart.mark_noun())
        } else {
            format!("Selected {n} {}", chart.mark_noun())
        };
        Step::Commit(s, FeedbackMessage::success(FeedbackCode::Selected, text))
    }

    fn details(&self, state: &AppState, probe: &Probe) -> Step {
        let view = self.view(state);
        let Some(chart) = view.chart_type else {
            return empty_view();
        };
        let ds = self.dataset;
        let (marks, text): (Vec<&Mark>, String) = match probe {
            Probe::Mark { id } => {
                let Some(m) = view.mark(id) else {
                    return void(FeedbackCode::NoMarks, "That mark is no longer in the view");
                };
                let n = m.rows.len();
                let noun = if n == 1 { "record" } else { "records" };
                (vec![m], format!("Details for {n} {noun}"))
            }
            Probe::Ruler {
                axis,
                axis_index,
                value,
            } => {
                let Some(role) = axis_role(&view, *axis, *axis_index) else {
                    return void(FeedbackCode::NoMarks, "Drag along a numeric scale to see details");
                };
                let tol = match role {
                    Role::Point(_) | Role::PcpAxis(_) => axis_span(&view, *axis, *axis_index) * RULER_TOLERANCE,
                    _ => 0.0,
                };
                let hits: Vec<&Mark> = view
                    .marks
                    .iter()
                    .filter(|m| {
                        // a ruler crosses a bar anywhere between its base and top
                        let span = match role {
                            Role::Measure => m.top().map(|t| (m.y_base.unwrap_or(0.0), t)),
                            _ => mark_span(m, role),
                        };
                        span.is_some_and(|(a, b)| *value >= a - tol && *value <= b + tol)
                    })
                    .collect();
                let text = format!(
                    "{} {} at {}",
                    hits.len(),
                    chart.mark_noun(),
                    crate::dataset::format_number(*value)
                );
                (hits, text)
            }
        };
        let mut rows: BTreeSet<RowId> = BTreeSet::new();
        for m in &marks {
            rows.extend(m.rows.iter().copied());
        }
        let detail = DetailPayload {
            probe: probe.clone(),
            marks: marks
                .iter()
                .map(|m| MarkDetail {
                    id: m.id.clone(),
                    label: mark_label(m),
                    value: m.y.or_else(|| m.coords.first().copied().flatten()),
                })
                .collect(),
            records: rows.iter().take(DETAIL_RECORD_CAP).map(|&r| ds.record(r)).collect(),
            total_records: rows.len(),
        };
        Step::Details(detail, FeedbackMessage::success(FeedbackCode::Details, text))
    }

    /// Full data extents of the zoomable axes, X then Y.
    fn extents(&self, state: &AppState) -> Option<(Option<Window>, Option<Window>)> {
        let full = compute_view(&state.spec, self.dataset, &state.selection, &Viewport::default(), self.config);
        let chart = full.chart_type?;
        if chart == ChartType::ParallelCoordinates {
            return Some((None, None));
        }
        let usable = |w: Option<Window>| w.filter(|w| w.span() > 0.0);
        Some((
            usable(full.x_axis.as_ref().and_then(|a| a.domain())),
            usable(full.y_axes.first().and_then(|a| a.domain())),
        ))
    }

    fn reframe(
        &self,
        state: &AppState,
        f: impl Fn(Window, Option<f64>, Option<f64>) -> Window,
        args: [(Option<f64>, Option<f64>); 2],
        code: FeedbackCode,
        text: &str,
    ) -> Step {
        let Some((ex, ey)) = self.extents(state) else {
            return empty_view();
        };
        if ex.is_none() && ey.is_none() {
            return void(FeedbackCode::NoChange, "This chart cannot be zoomed or panned");
        }
        let fit = |extent: Option<Window>, current: Option<Window>, (a, b): (Option<f64>, Option<f64>)| {
            let extent = extent?;
            let cur = current.unwrap_or(extent);
            let w = f(cur, a, b).clamped(&extent);
            let eps = extent.span() * FULL_EXTENT_EPS;
            let full = (w.lo - extent.lo).abs() <= eps && (w.hi - extent.hi).abs() <= eps;
            (!full).then_some(w)
        };
        let next = Viewport {
            x: fit(ex, state.viewport.x, args[0]),
            y: fit(ey, state.viewport.y, args[1]),
        };
        if next == state.viewport {
            return void(FeedbackCode::NoChange, "The view did not change");
        }
        let mut s = state.clone();
        s.viewport = next;
        Step::Commit(s, FeedbackMessage::success(code, text))
    }

    fn zoom(&self, state: &AppState, scale: f64, cx: Option<f64>, cy: Option<f64>) -> Step {
        if !scale.is_finite() || scale <= 0.0 || scale == 1.0 {
            return void(FeedbackCode::NoChange, "The view did not change");
        }
        let text = if scale > 1.0 { "Zoomed in" } else { "Zoomed out" };
        self.reframe(
            state,
            |w, c, s| w.zoomed(s.unwrap_or(1.0), c.unwrap_or_else(|| w.midpoint())),
            [(cx, Some(scale)), (cy, Some(scale))],
            FeedbackCode::Zoomed,
            text,
        )
    }

    fn pan(&self, state: &AppState, dx: f64, dy: f64) -> Step {
        if !(dx.is_finite() && dy.is_finite()) || (dx == 0.0 && dy == 0.0) {
            return void(FeedbackCode::NoChange, "The view did not change");
        }
        self.reframe(
            state,
            |w, d, _| w.panned(d.unwrap_or(0.0)),
            [(Some(dx), None), (Some(dy), None)],
            FeedbackCode::Panned,
            "Panned",
        )
    }
}

fn distinct(ds: &Dataset, rows: &RowSet, attribute: &str) -> BTreeSet<Value> {
    rows.iter()
        .filter_map(|&r| ds.value(r, attribute))
        .filter(|v| !v.is_null())
        .cloned()
        .collect()
}

/// How marks relate to one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Role {
    /// Bar heights or bin counts.
    Measure,
    /// Histogram bins or line positions along the dimension.
    Dimension,
    /// Scatterplot coordinate on X or Y.
    Point(Axis),
    PcpAxis(usize),
}

fn axis_role(view: &ViewModel, axis: Axis, index: usize) -> Option<Role> {
    let chart = view.chart_type?;
    let axis_view = match axis {
        Axis::X => view.x_axis.as_ref()?,
        Axis::Y => view.y_axes.get(index)?,
    };
    if axis_view.is_categorical() {
        return None;
    }
    Some(match chart {
        ChartType::ParallelCoordinates => Role::PcpAxis(index),
        ChartType::Scatterplot => Role::Point(axis),
        _ => {
            let dim_axis = match view.orientation {
                Orientation::Vertical => Axis::X,
                Orientation::Horizontal => Axis::Y,
            };
            if axis == dim_axis {
                Role::Dimension
            } else {
                Role::Measure
            }
        }
    })
}

fn axis_span(view: &ViewModel, axis: Axis, index: usize) -> f64 {
    let a = match axis {
        Axis::X => view.x_axis.as_ref(),
        Axis::Y => view.y_axes.get(index),
    };
    a.and_then(|a| a.domain()).map_or(0.0, |d| d.span())
}

/// Value range a mark covers along an axis.
fn mark_span(m: &Mark, role: Role) -> Option<(f64, f64)> {
    match role {
        Role::Measure => {
            let top = m.top()?;
            Some((top, top))
        }
        Role::Dimension => {
            let x = m.x.as_ref().and_then(crate::dataset::numeric_value)?;
            Some((x, m.x_end.unwrap_or(x)))
        }
        Role::Point(Axis::X) => m.x.as_ref().and_then(Value::as_number).map(|v| (v, v)),
        Role::Point(Axis::Y) => m.y.map(|v| (v, v)),
        Role::PcpAxis(i) => m.coords.get(i).copied().flatten().map(|v| (v, v)),
    }
}

fn mark_label(m: &Mark) -> String {
    if let Some(id) = m.id.strip_prefix("row:") {
        return format!("row {id}");
    }
    let x = m.x.as_ref().map(Value::label).unwrap_or_default();
    match &m.series {
        Some(s) => format!("{x} / {s}"),
        None => x,
    }
}

fn erase_marks(view: &ViewModel, marks: &[&Mark], next: &mut ChartSpec) {
    let chart = view.chart_type.expect("non-empty view");
    let dim = view
        .dimension_axis()
        .and_then(|a| a.attributes.first())
        .cloned();
    let mut ids = RowSet::new();
    match (chart, dim) {
        (ChartType::BarChart | ChartType::GroupedBarChart | ChartType::StackedBarChart | ChartType::LineChart, Some(dim)) => {
            let values: Vec<Value> = marks.iter().filter_map(|m| m.x.clone()).collect();
            next.filters.exclude_values(&dim, values);
        }
        (ChartType::Histogram, Some(dim)) => {
            let last = view.marks.iter().filter_map(|m| m.x_end).fold(f64::NEG_INFINITY, f64::max);
            for m in marks {
                match (&m.color, m.x.as_ref().and_then(Value::as_number), m.x_end) {
                    (None, Some(lo), Some(hi)) => next.filters.push(Filter::Range {
                        attribute: dim.clone(),
                        interval: Interval {
                            lo: Some(lo),
                            hi: Some(hi),
                            lo_closed: true,
                            hi_closed: hi >= last,
                        },
                        polarity: Polarity::Remove,
                    }),
                    _ => ids.extend(m.rows.iter().copied()),
                }
            }
        }
        _ => {
            for m in marks {
                ids.extend(m.rows.iter().copied());
            }
        }
    }
    if !ids.is_empty() {
        next.filters.push(Filter::Ids {
            ids,
            polarity: Polarity::Remove,
        });
    }
}

/// Which attribute pills light up while a title is held.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PillHint {
    pub name: String,
    pub highlighted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<InvalidReason>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Affordances {
    pub channel: Option<Channel>,
    pub pills: Vec<PillHint>,
    pub ink_pad: bool,
    pub microphone: bool,
}

/// Affordances for the current holds. A pill is highlighted exactly when
/// binding it to the held channel yields a valid, different spec.
pub fn affordances(state: &AppState, dataset: &Dataset, holds: &[InstrumentZone], recording: bool) -> Affordances {
    let channel = holds.iter().rev().find_map(|z| match z {
        InstrumentZone::XAxisTitle { .. } => Some(Channel::X),
        InstrumentZone::YAxisTitle { .. } => Some(Channel::Y),
        InstrumentZone::LegendTitle { .. } => Some(Channel::Color),
        _ => None,
    });
    let pills = match channel {
        None => Vec::new(),
        Some(c) => {
            let mode = if c == Channel::Y { BindMode::Append } else { BindMode::Replace };
            dataset
                .attributes()
                .iter()
                .map(|a| {
                    let next = state.spec.with_binding(c, std::slice::from_ref(&a.name), mode).refreshed(dataset);
                    let reason = if next == state.spec {
                        Some(InvalidReason::DuplicateBinding)
                    } else {
                        match validate(&next, dataset) {
                            Validity::Valid => None,
                            Validity::Invalid(r) => Some(r),
                        }
                    };
                    PillHint {
                        name: a.name.clone(),
                        highlighted: reason.is_none(),
                        reason,
                    }
                })
                .collect()
        }
    };
    Affordances {
        channel,
        pills,
        ink_pad: channel.is_some(),
        microphone: recording,
    }
}
