use std::sync::Arc;

use tabviz_core::chart::{ChartType, InvalidReason};
use tabviz_core::dataset::Value;
use tabviz_core::executor::{affordances, AppState, Executor};
use tabviz_core::feedback::{FeedbackCode, FeedbackKind, FeedbackMessage};
use tabviz_core::filter::Filter;
use tabviz_core::fusion::{Operation, OperationRequest};
use tabviz_core::gesture::{Device, InstrumentZone};
use tabviz_core::session::script::{At, Script};
use tabviz_core::session::{Catalog, Engine, ServerMessage, Session, SessionConfig};

struct Harness {
    session: Session,
    script: Script,
}

impl Harness {
    fn new() -> Self {
        Harness {
            session: Session::new(1, Catalog::new(Arc::new(Engine::movies())), SessionConfig::default()),
            script: Script::new(Default::default()),
        }
    }

    /// Send everything scripted so far and return the replies.
    fn run(&mut self) -> Vec<ServerMessage> {
        let msgs = self.script.drain();
        msgs.iter().flat_map(|m| self.session.handle(m)).collect()
    }

    fn feedback(&mut self) -> Vec<FeedbackMessage> {
        self.run()
            .into_iter()
            .filter_map(|m| match m {
                ServerMessage::Feedback(f) => Some(f),
                _ => None,
            })
            .collect()
    }

    fn only_feedback(&mut self) -> FeedbackMessage {
        let mut f = self.feedback();
        assert_eq!(f.len(), 1, "{f:?}");
        f.remove(0)
    }

    fn revision(&self) -> u64 {
        self.session.state().revision
    }

    fn chart(&self) -> Option<ChartType> {
        self.session.state().spec.chart_type
    }

    fn visible(&self) -> usize {
        self.session.summary().visible_rows
    }

    fn bind_x(&mut self, name: &str) {
        self.script.drop_pill(name, InstrumentZone::x_title());
        assert_eq!(self.only_feedback().kind, FeedbackKind::Success);
    }

    fn bind_y(&mut self, name: &str) {
        self.script.drop_pill(name, InstrumentZone::y_title());
        assert_eq!(self.only_feedback().kind, FeedbackKind::Success);
    }

    fn scatter(&mut self) {
        self.bind_x("Production Budget");
        self.bind_y("Worldwide Gross");
        assert_eq!(self.chart(), Some(ChartType::Scatterplot));
    }

    fn assert_invalid(&mut self, reason: InvalidReason) {
        let before = self.session.state().clone();
        let f = self.only_feedback();
        assert_eq!((f.kind, f.code, f.reason), (FeedbackKind::Error, FeedbackCode::InvalidOperation, Some(reason)), "{f:?}");
        assert_eq!(self.session.state(), &before);
    }
}

fn pill(name: &str) -> InstrumentZone {
    InstrumentZone::AttributePill { name: name.into() }
}

#[test]
fn color_without_axes_is_rejected() {
    let mut h = Harness::new();
    h.script.speak_holding(InstrumentZone::ModifierButton, "color by creative type");
    h.assert_invalid(InvalidReason::ColorWithoutAxes);
    h.script.tap_holding(InstrumentZone::legend_title(), pill("Creative Type"), Device::Touch);
    h.assert_invalid(InvalidReason::ColorWithoutAxes);
    assert_eq!(h.revision(), 0);
}

#[test]
fn categorical_on_both_axes_is_rejected() {
    let mut h = Harness::new();
    h.bind_x("Major Genre");
    let rev = h.revision();
    h.script.tap_holding(InstrumentZone::y_title(), pill("Creative Type"), Device::Touch);
    h.assert_invalid(InvalidReason::CategoricalBothAxes);
    assert_eq!(h.revision(), rev);
}

#[test]
fn duplicate_binding_is_rejected() {
    let mut h = Harness::new();
    h.bind_y("Worldwide Gross");
    let rev = h.revision();
    h.script.tap_holding(InstrumentZone::y_title(), pill("Worldwide Gross"), Device::Touch);
    h.assert_invalid(InvalidReason::DuplicateBinding);
    // across channels too
    h.bind_x("Major Genre");
    h.script.speak_holding(InstrumentZone::legend_title(), "Major genre");
    h.assert_invalid(InvalidReason::DuplicateBinding);
    assert_eq!(h.revision(), rev + 1);
}

#[test]
fn spoken_sort_on_scatterplot_is_rejected() {
    let mut h = Harness::new();
    h.scatter();
    h.script.speak_holding(InstrumentZone::ModifierButton, "sort by worldwide gross");
    h.assert_invalid(InvalidReason::SortOnUnsortableChart);
}

#[test]
fn swipes_that_cannot_sort_are_void() {
    let mut h = Harness::new();
    h.scatter();
    h.script.swipe(InstrumentZone::YAxisScale { axis: 0 }, 0.0, 80.0);
    assert_eq!(h.only_feedback().code, FeedbackCode::NotSortable);

    let mut h = Harness::new();
    h.bind_x("Major Genre");
    h.script.speak_holding(InstrumentZone::y_title(), "worldwide gross and production budget");
    assert_eq!(h.feedback().len(), 1);
    assert_eq!(h.chart(), Some(ChartType::GroupedBarChart));
    let rev = h.revision();
    h.script.swipe(InstrumentZone::YAxisScale { axis: 0 }, 0.0, 80.0);
    let f = h.only_feedback();
    assert_eq!((f.kind, f.code), (FeedbackKind::Void, FeedbackCode::AmbiguousSortTarget));
    assert_eq!(h.revision(), rev);
}

#[test]
fn repeated_sort_is_void() {
    let mut h = Harness::new();
    h.bind_x("Major Genre");
    h.script.swipe(InstrumentZone::YAxisScale { axis: 0 }, 0.0, 80.0);
    assert_eq!(h.only_feedback().code, FeedbackCode::Sorted);
    h.script.swipe(InstrumentZone::YAxisScale { axis: 0 }, 0.0, 80.0);
    assert_eq!(h.only_feedback().code, FeedbackCode::AlreadySorted);
    h.script.swipe(InstrumentZone::XAxisScale, -80.0, 0.0);
    assert_eq!(h.only_feedback().code, FeedbackCode::Sorted);
    let view = h.session.state().view(&h.session.engine().dataset, &Default::default());
    let labels: Vec<String> = view.marks.iter().map(|m| m.x.as_ref().unwrap().label()).collect();
    let mut sorted = labels.clone();
    sorted.sort();
    sorted.reverse();
    assert_eq!(labels, sorted);
}

#[test]
fn sorting_an_empty_view_is_an_error() {
    let engine = Engine::movies();
    let config = Default::default();
    let exec = Executor::new(&engine.dataset, &config);
    let mut state = AppState::new();
    let req: OperationRequest = serde_json::from_value(serde_json::json!({
        "pattern": "I19",
        "kind": "sort",
        "sort": {"by": "count", "direction": "ascending", "axis": "y"},
        "strict": true,
        "provenance": {}
    }))
    .unwrap();
    let out = exec.apply(&mut state, &req);
    assert_eq!(out.feedback.code, FeedbackCode::EmptyView);
    assert!(!out.changed);
    assert_eq!(state, AppState::new());
}

#[test]
fn incomplete_speech_leaves_state_alone() {
    let mut h = Harness::new();
    h.scatter();
    let before = h.session.state().clone();
    h.script.speak_holding(InstrumentZone::ModifierButton, "Remove under 1200");
    let f = h.only_feedback();
    assert_eq!((f.kind, f.code), (FeedbackKind::Error, FeedbackCode::IncompleteCommand));
    assert_eq!(h.session.state(), &before);
}

#[test]
fn held_title_completes_the_command() {
    let mut h = Harness::new();
    h.scatter();
    h.script.speak_holding(InstrumentZone::YAxisTitle { attribute: Some("Worldwide Gross".into()) }, "remove under 100M");
    assert_eq!(h.only_feedback().code, FeedbackCode::Filtered);
    let ds = &h.session.engine().dataset;
    let expected = ds.row_ids().filter(|&r| ds.numeric(r, "Worldwide Gross").is_some_and(|g| g >= 1e8)).count();
    assert_eq!(h.visible(), expected);
}

#[test]
fn erasing_a_histogram_bin_removes_its_rows() {
    let mut h = Harness::new();
    h.bind_x("Running Time");
    assert_eq!(h.chart(), Some(ChartType::Histogram));
    let view = h.session.state().view(&h.session.engine().dataset, &Default::default());
    let bin = &view.marks[0];
    let n = bin.rows.len();
    h.script.erase(&[InstrumentZone::Mark { id: bin.id.clone() }]);
    assert_eq!(h.only_feedback().code, FeedbackCode::Filtered);
    assert_eq!(h.visible(), 709 - n);
    assert!(matches!(h.session.state().spec.filters.iter().next(), Some(Filter::Range { .. })));
}

#[test]
fn erasing_nothing_reports_void() {
    let mut h = Harness::new();
    h.scatter();
    h.script.erase(&[InstrumentZone::Canvas]);
    assert_eq!(h.only_feedback().code, FeedbackCode::NoMarks);
}

#[test]
fn filter_chip_tap_clears_that_filter() {
    let mut h = Harness::new();
    h.bind_x("Major Genre");
    h.script.erase(&[InstrumentZone::Mark { id: "bar:Drama".into() }]);
    assert_eq!(h.only_feedback().code, FeedbackCode::Filtered);
    assert!(h.visible() < 709);
    h.script.tap(InstrumentZone::FilterChip { index: 0 }, Device::Touch);
    assert_eq!(h.only_feedback().code, FeedbackCode::FilterCleared);
    assert_eq!(h.visible(), 709);
}

#[test]
fn legend_tap_selects_and_canvas_tap_clears() {
    let mut h = Harness::new();
    h.scatter();
    h.script.speak_holding(InstrumentZone::ModifierButton, "color by content rating");
    h.feedback();
    h.script.tap(InstrumentZone::LegendItem { value: Value::Text("PG".into()) }, Device::Touch);
    assert_eq!(h.only_feedback().code, FeedbackCode::Selected);
    let ds = &h.session.engine().dataset;
    let pg = ds.row_ids().filter(|&r| ds.value(r, "Content Rating").unwrap().label() == "PG").count();
    assert_eq!(h.session.state().selection.len(), pg);
    h.script.tap(InstrumentZone::Canvas, Device::Touch);
    assert_eq!(h.only_feedback().code, FeedbackCode::SelectionCleared);
    h.script.tap(InstrumentZone::Canvas, Device::Touch);
    assert_eq!(h.only_feedback().kind, FeedbackKind::Void);
}

#[test]
fn pointing_at_a_mark_shows_details() {
    let mut h = Harness::new();
    h.bind_x("Major Genre");
    let rev = h.revision();
    let c = h.script.hold(InstrumentZone::Mark { id: "bar:Western".into() });
    h.script.release(c, InstrumentZone::Mark { id: "bar:Western".into() });
    let out = h.run();
    let detail = out
        .iter()
        .find_map(|m| match m {
            ServerMessage::Detail(d) => Some(d),
            _ => None,
        })
        .expect("detail");
    let ds = &h.session.engine().dataset;
    let n = ds.row_ids().filter(|&r| ds.value(r, "Major Genre").unwrap().label() == "Western").count();
    assert_eq!(detail.total_records, n);
    assert_eq!(detail.marks.len(), 1);
    assert_eq!(h.revision(), rev);
}

#[test]
fn pinch_and_pan_change_the_viewport() {
    let mut h = Harness::new();
    h.scatter();
    h.script.pinch((5e7, 2e8), 2.0);
    assert_eq!(h.only_feedback().code, FeedbackCode::Zoomed);
    let zoomed = h.session.state().viewport.clone();
    let (x, y) = (zoomed.x.unwrap(), zoomed.y.unwrap());
    assert!(x.contains(5e7) && y.contains(2e8));
    h.script.drag(
        InstrumentZone::Canvas,
        Device::Touch,
        &[At::data(100.0, 100.0, Some(5e7), Some(2e8)), At::data(150.0, 100.0, Some(6e7), Some(2e8))],
    );
    assert_eq!(h.only_feedback().code, FeedbackCode::Panned);
    let panned = h.session.state().viewport.x.unwrap();
    // dragging right moves the window left by the data distance, unless clamped
    assert!((panned.span() - x.span()).abs() < 1e-6 * x.span());
    assert!(panned.lo < x.lo && panned.lo >= x.lo - 1e7 - 1e-6);

    let mut h = Harness::new();
    for a in ["Worldwide Gross", "Production Budget", "Running Time"] {
        h.bind_y(a);
    }
    assert_eq!(h.chart(), Some(ChartType::ParallelCoordinates));
    h.script.pinch((0.0, 10.0), 2.0);
    assert_eq!(h.only_feedback().kind, FeedbackKind::Void);
}

#[test]
fn lasso_on_bars_is_void() {
    let mut h = Harness::new();
    h.bind_x("Major Genre");
    h.script.lasso(&[(0.0, 0.0), (10.0, 0.0), (10.0, 100.0)]);
    assert_eq!(h.only_feedback().kind, FeedbackKind::Void);
}

#[test]
fn pen_rejected_in_panel_and_bad_drops() {
    let mut h = Harness::new();
    h.script.tap(pill("Major Genre"), Device::Pen);
    assert_eq!(h.only_feedback().code, FeedbackCode::PenInPanel);
    h.script.drop_pill("Major Genre", InstrumentZone::Canvas);
    assert_eq!(h.only_feedback().code, FeedbackCode::DropOutsideTarget);
    assert_eq!(h.revision(), 0);
}

#[test]
fn ink_writing_binds_exact_names_and_suggests_otherwise() {
    let mut h = Harness::new();
    let c = h.script.hold(InstrumentZone::x_title());
    h.script.write(&["bugdet"]);
    let out = h.run();
    let sugg = out
        .iter()
        .find_map(|m| match m {
            ServerMessage::Suggestions { suggestions } => Some(suggestions.clone()),
            _ => None,
        })
        .expect("suggestions");
    assert_eq!(sugg[0].name, "Production Budget");
    h.script.write(&["release year"]);
    assert_eq!(h.only_feedback().code, FeedbackCode::Bound);
    h.script.release(c, InstrumentZone::x_title());
    h.run();
    assert_eq!(h.session.state().spec.x.as_deref(), Some("Release Year"));
    h.script.write(&["gross"]);
    assert_eq!(h.only_feedback().code, FeedbackCode::NoInkTarget);
}

#[test]
fn affordances_follow_validity() {
    let engine = Engine::movies();
    let mut h = Harness::new();
    h.bind_x("Major Genre");
    let a = affordances(h.session.state(), &engine.dataset, &[InstrumentZone::y_title()], true);
    let hint = |n: &str| a.pills.iter().find(|p| p.name == n).unwrap();
    assert!(hint("Worldwide Gross").highlighted);
    assert!(!hint("Creative Type").highlighted);
    assert_eq!(hint("Creative Type").reason, Some(InvalidReason::CategoricalBothAxes));
    let a = affordances(h.session.state(), &engine.dataset, &[InstrumentZone::x_title()], true);
    assert_eq!(a.pills.iter().find(|p| p.name == "Major Genre").unwrap().reason, Some(InvalidReason::DuplicateBinding));
}

#[test]
fn speech_chart_change_toggles_stacking() {
    let mut h = Harness::new();
    h.bind_x("Major Genre");
    h.script.speak_holding(InstrumentZone::y_title(), "worldwide gross and production budget");
    h.feedback();
    h.script.speak_holding(InstrumentZone::ModifierButton, "show as stacked bar chart");
    assert_eq!(h.only_feedback().code, FeedbackCode::ChartChanged);
    assert_eq!(h.chart(), Some(ChartType::StackedBarChart));
    let rev = h.revision();
    h.script.speak_holding(InstrumentZone::ModifierButton, "make it a scatterplot");
    let f = h.only_feedback();
    assert_eq!((f.kind, f.reason), (FeedbackKind::Error, Some(InvalidReason::UnsupportedChartType)));
    assert_eq!(h.revision(), rev);
}

#[test]
fn unbind_by_eraser_and_by_speech() {
    let mut h = Harness::new();
    h.scatter();
    h.script.erase(&[InstrumentZone::YAxisTitle { attribute: Some("Worldwide Gross".into()) }]);
    assert_eq!(h.only_feedback().code, FeedbackCode::Unbound);
    assert!(h.session.state().spec.y.is_empty());
    h.script.speak_holding(InstrumentZone::x_title(), "remove");
    assert_eq!(h.only_feedback().code, FeedbackCode::Unbound);
    assert_eq!(h.chart(), None);
}

#[test]
fn request_json_round_trips() {
    let req = OperationRequest {
        pattern: "Z2".into(),
        op: Operation::Pan { dx: 1.5, dy: -2.0 },
        provenance: Default::default(),
    };
    let text = serde_json::to_string(&req).unwrap();
    assert!(text.contains("\"kind\":\"pan\""));
    assert_eq!(serde_json::from_str::<OperationRequest>(&text).unwrap(), req);
}
