//! The worked movie-analysis scenario as scripted input with checkpoints.
//!
//! Expected checkpoint values were computed once by an independent
//! filter/aggregate oracle over the bundled dataset and frozen here.

use serde_json::json;

use crate::dataset::Value;
use crate::gesture::{Device, GestureConfig, InstrumentZone};

use super::script::{At, Script};
use super::{Checkpoint, ClientMessage, Session, TraceRecord, TraceSink};

const GROSS: &str = "Worldwide Gross";
const BUDGET: &str = "Production Budget";

/// Genres whose mean gross is under 100M.
pub const LOW_GROSS_GENRES: [&str; 6] = [
    "Black Comedy",
    "Concert/Performance",
    "Drama",
    "Horror",
    "Thriller/Suspense",
    "Western",
];

pub const KEPT_CREATIVE_TYPES: [&str; 3] = ["Contemporary Fiction", "Kids Fiction", "Science Fiction"];

/// Low-budget, high-return corner of the filtered scatterplot.
pub const LASSO_LOW_BUDGET: [(f64, f64); 4] = [(0.0, 1.9e8), (3.1e7, 1.9e8), (3.1e7, 3.8e8), (0.0, 3.8e8)];
/// The three highest grossing movies.
pub const LASSO_TOP_GROSS: [(f64, f64); 4] = [(7.0e7, 5.5e8), (1.0e8, 5.5e8), (1.0e8, 9.0e8), (7.0e7, 9.0e8)];

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Input(ClientMessage),
    Checkpoint(Checkpoint),
}

fn y_title(attribute: Option<&str>) -> InstrumentZone {
    InstrumentZone::YAxisTitle {
        attribute: attribute.map(String::from),
    }
}

fn x_title(attribute: Option<&str>) -> InstrumentZone {
    InstrumentZone::XAxisTitle {
        attribute: attribute.map(String::from),
    }
}

fn mark(id: String) -> InstrumentZone {
    InstrumentZone::Mark { id }
}

fn legend_item(v: &str) -> InstrumentZone {
    InstrumentZone::LegendItem { value: Value::Text(v.into()) }
}

struct Builder {
    script: Script,
    steps: Vec<Step>,
}

impl Builder {
    fn flush(&mut self) {
        self.steps.extend(self.script.drain().into_iter().map(Step::Input));
    }

    fn checkpoint(&mut self, label: &str, expect: serde_json::Value) {
        self.flush();
        let serde_json::Value::Object(expect) = expect else {
            unreachable!("checkpoint expectations are objects")
        };
        self.steps.push(Step::Checkpoint(Checkpoint {
            label: label.into(),
            expect,
        }));
    }
}

/// The fourteen-stage scenario, from an empty view to parallel coordinates.
pub fn movie_scenario(config: GestureConfig) -> Vec<Step> {
    let mut b = Builder {
        script: Script::new(config),
        steps: Vec::new(),
    };
    let s = &mut b.script;

    // browse a few attributes, then settle on genres
    let held = s.hold(x_title(None));
    for pill in ["Release Year", "Worldwide Gross", "Major Genre"] {
        s.tap(InstrumentZone::AttributePill { name: pill.into() }, Device::Touch);
    }
    s.release(held, x_title(None));
    b.checkpoint(
        "genre bar chart",
        json!({"chart_type": "BarChart", "x": "Major Genre", "y": [], "color": null, "filters": 0, "visible_rows": 709}),
    );

    b.script.swipe(InstrumentZone::YAxisScale { axis: 0 }, 0.0, 80.0);
    b.checkpoint(
        "sorted by count",
        json!({"chart_type": "BarChart", "sort": {"by": "count", "direction": "descending", "axis": "y"}}),
    );

    b.script
        .speak_holding(y_title(None), "Worldwide gross and production budget");
    b.checkpoint(
        "grouped gross and budget",
        json!({"chart_type": "GroupedBarChart", "x": "Major Genre", "y": [GROSS, BUDGET], "visible_rows": 709}),
    );

    b.script
        .speak_holding(y_title(None), "Sort by worldwide gross in descending order");
    b.checkpoint(
        "sorted by gross",
        json!({"chart_type": "GroupedBarChart", "sort": {"by": {"attribute": GROSS}, "direction": "descending", "axis": "y"}}),
    );

    let ruler: Vec<At> = [1.5e8, 1.2e8, 1.0e8]
        .iter()
        .enumerate()
        .map(|(i, &v)| At::data(40.0, 100.0 + 30.0 * i as f64, None, Some(v)))
        .collect();
    b.script.drag(InstrumentZone::YAxisScale { axis: 0 }, Device::Touch, &ruler);
    b.checkpoint(
        "ruler leaves state alone",
        json!({"chart_type": "GroupedBarChart", "filters": 0, "visible_rows": 709}),
    );

    let bars: Vec<InstrumentZone> = LOW_GROSS_GENRES
        .iter()
        .map(|g| mark(format!("bar:{g}:{GROSS}")))
        .collect();
    b.script.erase(&bars);
    b.checkpoint(
        "low grossing genres erased",
        json!({"chart_type": "GroupedBarChart", "filters": 1, "visible_rows": 416}),
    );

    let s = &mut b.script;
    s.erase(&[y_title(Some(BUDGET))]);
    let held = s.hold(x_title(Some("Major Genre")));
    s.write(&["budget"]);
    s.tap(InstrumentZone::InkSuggestion { name: BUDGET.into() }, Device::Touch);
    s.release(held, x_title(Some("Major Genre")));
    b.checkpoint(
        "budget against gross",
        json!({"chart_type": "Scatterplot", "x": BUDGET, "y": [GROSS], "filters": 1, "visible_rows": 416}),
    );

    let range = [At::data(10.0, 500.0, Some(0.0), None), At::data(200.0, 500.0, Some(9.95e7), None)];
    let s = &mut b.script;
    s.drag(InstrumentZone::XAxisScale, Device::Pen, &range);
    s.speak_holding(InstrumentZone::ModifierButton, "exclude others");
    b.checkpoint(
        "budget under 100M",
        json!({"chart_type": "Scatterplot", "filters": 2, "visible_rows": 351, "selected_rows": 0}),
    );

    b.script.speak_holding(y_title(Some(GROSS)), "Remove under 200M");
    b.checkpoint(
        "gross at least 200M",
        json!({"chart_type": "Scatterplot", "filters": 3, "visible_rows": 73}),
    );

    b.script
        .speak_holding(InstrumentZone::ModifierButton, "Color by creative type");
    b.checkpoint(
        "colored by creative type",
        json!({"chart_type": "Scatterplot", "color": "Creative Type", "visible_rows": 73}),
    );

    let others: Vec<InstrumentZone> = [
        "Historical Fiction",
        "Fantasy",
        "Super Hero",
        "Dramatization",
        "Factual",
    ]
    .iter()
    .map(|v| legend_item(v))
    .collect();
    b.script.erase(&others);
    b.checkpoint(
        "three creative types",
        json!({"chart_type": "Scatterplot", "color": "Creative Type", "filters": 4, "visible_rows": 57}),
    );

    let s = &mut b.script;
    s.speak_holding(InstrumentZone::ModifierButton, "Color by content rating");
    s.erase(&[legend_item("R")]);
    b.checkpoint(
        "R-rated removed",
        json!({"chart_type": "Scatterplot", "color": "Content Rating", "filters": 5, "visible_rows": 40}),
    );

    let s = &mut b.script;
    let held = s.hold(InstrumentZone::ModifierButton);
    s.lasso(&LASSO_LOW_BUDGET);
    s.lasso(&LASSO_TOP_GROSS);
    s.say("remove others");
    s.release(held, InstrumentZone::ModifierButton);
    b.checkpoint(
        "shortlist",
        json!({"chart_type": "Scatterplot", "filters": 6, "visible_rows": 7, "selected_rows": 0}),
    );

    let s = &mut b.script;
    s.erase(&[x_title(Some(BUDGET))]);
    s.speak_holding(y_title(Some(GROSS)), "Add budget, running time, rotten tomatoes and imdb rating");
    b.checkpoint(
        "parallel coordinates",
        json!({
            "chart_type": "ParallelCoordinates",
            "x": null,
            "y": [GROSS, BUDGET, "Running Time", "Rotten Tomatoes", "IMDB Rating"],
            "filters": 6,
            "visible_rows": 7
        }),
    );
    b.steps
}

/// Run steps through a session, recording inputs, outputs and checkpoints.
pub fn record(session: &mut Session, steps: &[Step], sink: &mut dyn TraceSink) {
    sink.record(&TraceRecord::Meta {
        meta: session.trace_meta(),
    });
    for step in steps {
        match step {
            Step::Input(msg) => {
                session.handle_recorded(msg, sink);
            }
            Step::Checkpoint(c) => sink.record(&TraceRecord::Checkpoint {
                t: session.clock(),
                checkpoint: c.clone(),
            }),
        }
    }
}
