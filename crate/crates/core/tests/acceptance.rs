//! One PASS/FAIL line per primary acceptance criterion.
#![allow(clippy::type_complexity, clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use common::*;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use tabviz_core::chart::{Channel, InvalidReason, SortDirection};
use tabviz_core::filter::Polarity;
use tabviz_core::fusion::{check_pattern_table, OperationKind, PatternTable};
use tabviz_core::gesture::{
    Device, GestureConfig, GestureEvent, GestureRecognizer, InstrumentZone, Phase, PointerEvent, Position,
};
use tabviz_core::parser::{build_lexicon, parse, Comparator, KeywordFile, Missing, OpClass, ParseFailure, Reference};
use tabviz_core::session::scenario::{record, Step};
use tabviz_core::session::script::Script;
use tabviz_core::session::{
    classify_trace, read_trace, replay, write_trace, Catalog, Checkpoint, ClientMessage, Engine, Session,
    SessionConfig, TraceRecord,
};
use tabviz_core::{Dataset, Value};

const GOLDEN: &str = include_str!("data/golden_scenario.jsonl");

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn catalog() -> Catalog {
    Catalog::new(Arc::new(Engine::movies()))
}

fn round_trip(records: &[TraceRecord]) -> Vec<TraceRecord> {
    let mut bytes = Vec::new();
    write_trace(records, &mut bytes).unwrap();
    read_trace(BufReader::new(bytes.as_slice())).unwrap()
}

fn golden_scenario() -> Outcome {
    let records = read_trace(BufReader::new(GOLDEN.as_bytes())).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let report = replay(&records, &catalog()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure!(elapsed < 5.0, "replay took {elapsed:.2}s");
    ensure!(report.compared_outputs, "trace has no recorded outputs");
    ensure!(report.divergences.is_empty(), "{} divergences", report.divergences.len());
    ensure!(report.checkpoints.len() == 14, "{} checkpoints", report.checkpoints.len());
    for c in &report.checkpoints {
        ensure!(c.passed(), "checkpoint {:?}: {:?}", c.label, c.mismatches);
    }
    let snap: serde_json::Value = serde_json::from_str(&report.final_snapshot).unwrap();
    ensure!(snap["spec"]["chart_type"] == "ParallelCoordinates", "final chart {}", snap["spec"]["chart_type"]);
    ensure!(snap["spec"]["y"].as_array().map(Vec::len) == Some(5), "final y {}", snap["spec"]["y"]);
    ensure!(snap["filters"].as_array().map(Vec::len) == Some(6), "final filters {}", snap["filters"]);
    Ok(())
}

fn parser_corpus() -> Outcome {
    let lex = build_lexicon(&Dataset::movies(), &KeywordFile::shipped()).map_err(|e| e.to_string())?;
    let text = |v: &[&str]| -> Vec<Value> { v.iter().map(|s| Value::Text((*s).into())).collect() };
    type Expect = Box<dyn Fn(&tabviz_core::parser::ParsedCommand) -> bool>;
    let corpus: Vec<(&str, Expect)> = vec![
        (
            "Color by creative type",
            Box::new(|c| {
                c.op == Some(OpClass::Bind) && c.channel == Some(Channel::Color) && c.attribute_names() == ["Creative Type"]
            }),
        ),
        (
            "Sort by worldwide gross in descending order",
            Box::new(|c| {
                c.op == Some(OpClass::Sort)
                    && c.attribute_names() == ["Worldwide Gross"]
                    && c.direction == Some(SortDirection::Descending)
            }),
        ),
        (
            "Remove movies with an imdb rating under 8",
            Box::new(|c| {
                c.op == Some(OpClass::Filter)
                    && c.polarity == Some(Polarity::Remove)
                    && c.attribute_names() == ["IMDB Rating"]
                    && c.comparator == Some(Comparator::LessThan)
                    && c.bounds == [8.0]
            }),
        ),
        (
            "Remove all movies except action, adventure, and comedy",
            Box::new(move |c| {
                c.op == Some(OpClass::Filter)
                    && c.polarity == Some(Polarity::Remove)
                    && c.except
                    && c.value_attribute.as_deref() == Some("Major Genre")
                    && c.values == text(&["Action", "Adventure", "Comedy"])
            }),
        ),
        (
            "exclude others",
            Box::new(|c| {
                c.op == Some(OpClass::Filter) && c.polarity == Some(Polarity::Remove) && c.reference == Some(Reference::Others)
            }),
        ),
        (
            "Add budget, running time, rotten tomatoes and imdb rating",
            Box::new(|c| {
                c.op == Some(OpClass::Bind)
                    && c.append
                    && c.attribute_names() == ["Production Budget", "Running Time", "Rotten Tomatoes", "IMDB Rating"]
            }),
        ),
        (
            "Worldwide gross and production budget",
            Box::new(|c| {
                c.op == Some(OpClass::Bind) && !c.append && c.attribute_names() == ["Worldwide Gross", "Production Budget"]
            }),
        ),
        (
            "remove others",
            Box::new(|c| {
                c.op == Some(OpClass::Filter) && c.polarity == Some(Polarity::Remove) && c.reference == Some(Reference::Others)
            }),
        ),
    ];
    for (utterance, expect) in &corpus {
        match parse(utterance, &lex) {
            Ok(c) => ensure!(expect(&c), "{utterance:?} parsed to {c:?}"),
            Err(f) => return Err(format!("{utterance:?} failed: {f:?}")),
        }
    }
    match parse("Remove under 1200", &lex) {
        Err(ParseFailure::Incomplete {
            missing: Missing::Attribute,
            ..
        }) => Ok(()),
        other => Err(format!("\"Remove under 1200\" gave {other:?}")),
    }
}

fn pattern_consistency() -> Outcome {
    let mut table = PatternTable::shipped();
    let report = check_pattern_table(&table);
    ensure!(report.conflicts.is_empty(), "shipped table: {:?}", report.conflicts);
    ensure!(report.problems.is_empty(), "shipped table: {:?}", report.problems);
    // a pen drag on an axis scale that also sorts
    let mut sort = table.get("S3").ok_or("no axis range-select pattern")?.clone();
    ensure!(sort.operation == OperationKind::Select, "S3 is {:?}", sort.operation);
    sort.id = "X1".into();
    sort.operation = OperationKind::Sort;
    table.patterns.push(sort);
    let report = check_pattern_table(&table);
    ensure!(report.conflicts.len() == 1, "{} conflicts after injection", report.conflicts.len());
    let ops = &report.conflicts[0].operations;
    ensure!(ops.contains(&OperationKind::Sort) && ops.contains(&OperationKind::Select), "{ops:?}");
    Ok(())
}

fn pill(name: &str) -> InstrumentZone {
    InstrumentZone::AttributePill { name: name.into() }
}

fn revision_checkpoint(label: &str, revision: u64) -> Step {
    let mut expect = serde_json::Map::new();
    expect.insert("revision".into(), revision.into());
    Step::Checkpoint(Checkpoint {
        label: label.into(),
        expect,
    })
}

fn invalid_taxonomy() -> Outcome {
    let config = GestureConfig::default();
    let cases: [(InvalidReason, fn(&mut Script), fn(&mut Script)); 4] = [
        (InvalidReason::ColorWithoutAxes, |_| {}, |s| {
            s.speak_holding(InstrumentZone::ModifierButton, "color by creative type");
        }),
        (
            InvalidReason::CategoricalBothAxes,
            |s| {
                s.drop_pill("Major Genre", InstrumentZone::x_title());
            },
            |s| {
                s.tap_holding(InstrumentZone::y_title(), pill("Creative Type"), Device::Touch);
            },
        ),
        (
            InvalidReason::DuplicateBinding,
            |s| {
                s.drop_pill("Worldwide Gross", InstrumentZone::y_title());
            },
            |s| {
                s.tap_holding(InstrumentZone::y_title(), pill("Worldwide Gross"), Device::Touch);
            },
        ),
        (
            InvalidReason::SortOnUnsortableChart,
            |s| {
                s.drop_pill("Production Budget", InstrumentZone::x_title());
                s.drop_pill("Worldwide Gross", InstrumentZone::y_title());
            },
            |s| {
                s.speak_holding(InstrumentZone::ModifierButton, "sort by worldwide gross");
            },
        ),
    ];
    for (reason, setup, offend) in cases {
        let mut script = Script::new(config);
        setup(&mut script);
        let setup_msgs = script.drain();
        offend(&mut script);
        let offend_msgs = script.drain();

        let mut live = Session::new(1, catalog(), SessionConfig::default());
        for m in &setup_msgs {
            live.handle(m);
        }
        let before = live.canonical_snapshot();
        let revision = live.state().revision;
        for m in &offend_msgs {
            live.handle(m);
        }
        ensure!(live.canonical_snapshot() == before, "{reason:?}: state changed");

        let mut steps: Vec<Step> = setup_msgs.into_iter().map(Step::Input).collect();
        steps.push(revision_checkpoint("before", revision));
        steps.extend(offend_msgs.into_iter().map(Step::Input));
        steps.push(revision_checkpoint("after", revision));
        let mut trace = Vec::new();
        record(&mut Session::new(1, catalog(), SessionConfig::default()), &steps, &mut trace);
        let report = replay(&round_trip(&trace), &catalog()).map_err(|e| e.to_string())?;
        ensure!(report.is_clean(), "{reason:?}: replay not clean: {:?}", report.checkpoints);
        let taxonomy = classify_trace(&report.outputs);
        ensure!(
            taxonomy.by_reason.get(&reason) == Some(&1) && taxonomy.by_reason.len() == 1,
            "{reason:?}: classified as {:?}",
            taxonomy.by_reason
        );
    }
    Ok(())
}

fn run_property<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn oracle_equivalence() -> Outcome {
    run_property("visible_rows", table_and_filters(), |(t, f)| check_visible_rows(&t, &f))?;
    run_property("aggregate", (table_and_filters(), any::<bool>()), |((t, f), two)| {
        check_aggregates(&t, &f, two)
    })?;
    run_property("lasso", (table(40), polygon()), |(t, p)| check_lasso(&t, &p))?;
    run_property("bins", (table(60), 1usize..15), |(t, n)| check_bins(&t, n))
}

const GENRES: [&str; 5] = ["Action", "Comedy", "Drama", "Horror", "Western"];
const ATTRS: [&str; 6] = [
    "Major Genre",
    "Creative Type",
    "Worldwide Gross",
    "Production Budget",
    "IMDB Rating",
    "Release Year",
];
const UTTERANCES: [&str; 8] = [
    "Color by creative type",
    "Sort by worldwide gross in descending order",
    "Remove movies with an imdb rating under 8",
    "exclude others",
    "Remove under 1200",
    "Worldwide gross and production budget",
    "Add budget and running time",
    "remove others",
];

#[derive(Debug, Clone)]
enum Action {
    Drop(usize, u8),
    TapMark(u8, usize),
    TapCanvas,
    Swipe(bool, i8),
    Say(usize),
    SayHolding(u8, usize),
    Erase(u8, usize),
    Lasso(Vec<(f64, f64)>),
    Pinch(f64),
    Write(usize),
    StateRequest,
}

fn zone(which: u8) -> InstrumentZone {
    match which % 4 {
        0 => InstrumentZone::x_title(),
        1 => InstrumentZone::y_title(),
        2 => InstrumentZone::legend_title(),
        _ => InstrumentZone::ModifierButton,
    }
}

fn mark(kind: u8, i: usize) -> InstrumentZone {
    match kind % 4 {
        0 => InstrumentZone::Mark {
            id: format!("bar:{}", GENRES[i % GENRES.len()]),
        },
        1 => InstrumentZone::Mark { id: format!("row:{}", i * 37) },
        2 => InstrumentZone::Mark { id: format!("bin:{}", i % 10) },
        _ => InstrumentZone::LegendItem {
            value: Value::Text(["Drama", "Comedy", "Fantasy", "PG-13", "R"][i % 5].into()),
        },
    }
}

fn action() -> impl Strategy<Value = Action> {
    let coord = (0.0f64..4e8, 0.0f64..1e9);
    prop_oneof![
        3 => (0..ATTRS.len(), 0u8..3).prop_map(|(a, z)| Action::Drop(a, z)),
        2 => (any::<u8>(), 0usize..20).prop_map(|(k, i)| Action::TapMark(k, i)),
        1 => Just(Action::TapCanvas),
        1 => (any::<bool>(), prop_oneof![Just(-1i8), Just(1i8)]).prop_map(|(x, d)| Action::Swipe(x, d)),
        2 => (0..UTTERANCES.len()).prop_map(Action::Say),
        2 => (any::<u8>(), 0..UTTERANCES.len()).prop_map(|(z, u)| Action::SayHolding(z, u)),
        2 => (any::<u8>(), 0usize..20).prop_map(|(k, i)| Action::Erase(k, i)),
        1 => prop::collection::vec(coord, 3..6).prop_map(Action::Lasso),
        1 => (0.5f64..2.0).prop_map(Action::Pinch),
        1 => (0..ATTRS.len()).prop_map(Action::Write),
        1 => Just(Action::StateRequest),
    ]
}

fn script(actions: &[Action]) -> Vec<ClientMessage> {
    let mut s = Script::new(GestureConfig::default());
    for a in actions {
        match a {
            Action::Drop(attr, z) => {
                s.drop_pill(ATTRS[*attr], zone(*z));
            }
            Action::TapMark(k, i) => {
                s.tap(mark(*k, *i), Device::Touch);
            }
            Action::TapCanvas => {
                s.tap(InstrumentZone::Canvas, Device::Touch);
            }
            Action::Swipe(on_x, d) => {
                let d = f64::from(*d) * 80.0;
                if *on_x {
                    s.swipe(InstrumentZone::XAxisScale, d, 0.0);
                } else {
                    s.swipe(InstrumentZone::YAxisScale { axis: 0 }, 0.0, d);
                }
            }
            Action::Say(u) => {
                s.say(UTTERANCES[*u]);
            }
            Action::SayHolding(z, u) => {
                s.speak_holding(zone(*z), UTTERANCES[*u]);
            }
            Action::Erase(k, i) => {
                s.erase(&[mark(*k, *i), mark(*k, i + 1)]);
            }
            Action::Lasso(v) => {
                s.lasso(v);
            }
            Action::Pinch(scale) => {
                s.pinch((1e8, 3e8), *scale);
            }
            Action::Write(attr) => {
                s.write(&[&ATTRS[*attr].to_lowercase()]);
            }
            Action::StateRequest => {
                s.push(ClientMessage::StateRequest);
            }
        }
    }
    s.into_messages()
}

fn determinism() -> Outcome {
    let engine = catalog();
    let mut runner = TestRunner::new(Config {
        cases: 100,
        failure_persistence: None,
        ..Config::default()
    });
    let changed = std::cell::Cell::new(0);
    runner
        .run(&prop::collection::vec(action(), 1..25), |actions| {
            let steps: Vec<Step> = script(&actions).into_iter().map(Step::Input).collect();
            let mut live = Session::new(1, engine.clone(), SessionConfig::default());
            let mut trace = Vec::new();
            record(&mut live, &steps, &mut trace);
            let report = replay(&round_trip(&trace), &engine).unwrap();
            prop_assert!(report.divergences.is_empty(), "{:?}", report.divergences.first());
            prop_assert_eq!(report.final_snapshot, live.canonical_snapshot());
            changed.set(changed.get() + usize::from(live.state().revision > 0));
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    // guards against a generator that never reaches the executor
    ensure!(changed.get() >= 50, "only {} of 100 sessions changed state", changed.get());
    Ok(())
}

fn stroke(device: Device, zone: &InstrumentZone, samples: &[(u64, f64, f64)]) -> Vec<&'static str> {
    let mut g = GestureRecognizer::new(GestureConfig::default());
    let last = samples.len() - 1;
    let mut out = Vec::new();
    for (i, &(t, x, y)) in samples.iter().enumerate() {
        let phase = match i {
            0 => Phase::Down,
            i if i == last => Phase::Up,
            _ => Phase::Move,
        };
        out.extend(g.ingest(&PointerEvent {
            contact: 1,
            device,
            phase,
            pos: Position::with_data(x, y, Some(x), Some(y)),
            zone: zone.clone(),
            t,
        }));
    }
    out.iter().map(GestureEvent::name).collect()
}

fn family(name: &str) -> &str {
    name.strip_suffix("_start")
        .or_else(|| name.strip_suffix("_move"))
        .or_else(|| name.strip_suffix("_end"))
        .unwrap_or(name)
}

fn gesture_thresholds() -> Outcome {
    let mark = InstrumentZone::Mark { id: "bar:Action".into() };
    let title = InstrumentZone::x_title();
    let y_scale = InstrumentZone::YAxisScale { axis: 0 };
    let x_scale = InstrumentZone::XAxisScale;
    let t = Device::Touch;
    let cases: Vec<(&str, &InstrumentZone, Vec<(u64, f64, f64)>, Vec<&str>)> = vec![
        ("tap at 300 ms", &mark, vec![(0, 0.0, 0.0), (300, 0.0, 0.0)], vec!["tap"]),
        ("no tap at 301 ms", &mark, vec![(0, 0.0, 0.0), (301, 0.0, 0.0)], vec![]),
        ("tap within 10 px", &InstrumentZone::Canvas, vec![(0, 0.0, 0.0), (100, 10.0, 0.0)], vec!["tap"]),
        ("drag past 11 px", &InstrumentZone::Canvas, vec![(0, 0.0, 0.0), (100, 11.0, 0.0)], vec!["drag_start", "drag_end"]),
        ("no hold at 499 ms", &title, vec![(0, 0.0, 0.0), (499, 0.0, 0.0)], vec![]),
        ("hold at 500 ms", &title, vec![(0, 0.0, 0.0), (500, 0.0, 0.0)], vec!["point_start", "point_end"]),
        (
            "hold within 10 px",
            &title,
            vec![(0, 0.0, 0.0), (100, 0.0, 10.0), (600, 0.0, 10.0)],
            vec!["point_start", "point_end"],
        ),
        (
            "drag past 11 px while holding",
            &title,
            vec![(0, 0.0, 0.0), (100, 0.0, 11.0), (600, 0.0, 11.0)],
            vec!["drag_start", "drag_end"],
        ),
        ("swipe at 48 px", &y_scale, vec![(0, 0.0, 0.0), (100, 0.0, 20.0), (200, 0.0, 48.0)], vec!["swipe"]),
        (
            "drag at 47 px",
            &y_scale,
            vec![(0, 0.0, 0.0), (100, 0.0, 20.0), (200, 0.0, 47.0)],
            vec!["drag_start", "drag_end"],
        ),
        ("swipe in 250 ms", &x_scale, vec![(0, 0.0, 0.0), (100, 20.0, 0.0), (250, 48.0, 0.0)], vec!["swipe"]),
        (
            "drag in 251 ms",
            &x_scale,
            vec![(0, 0.0, 0.0), (100, 20.0, 0.0), (251, 48.0, 0.0)],
            vec!["drag_start", "drag_move", "drag_end"],
        ),
    ];
    for (label, zone, samples, want) in &cases {
        let got = stroke(t, zone, samples);
        ensure!(&got == want, "{label}: got {got:?}, want {want:?}");
    }

    let zones = [
        InstrumentZone::AttributePill { name: "Running Time".into() },
        InstrumentZone::x_title(),
        InstrumentZone::YAxisScale { axis: 0 },
        InstrumentZone::XAxisScale,
        InstrumentZone::LegendItem { value: Value::Text("PG".into()) },
        InstrumentZone::Mark { id: "row:3".into() },
        InstrumentZone::Canvas,
        InstrumentZone::Panel,
    ];
    let device = prop_oneof![Just(Device::Touch), Just(Device::Pen), Just(Device::PenEraser)];
    let steps = prop::collection::vec((0u64..200, -30i32..30, -30i32..30), 1..8);
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&(device, 0..zones.len(), steps), |(device, z, steps)| {
            let mut samples = vec![(0u64, 0.0, 0.0)];
            for (dt, dx, dy) in steps {
                let &(t, x, y) = samples.last().unwrap();
                samples.push((t + dt, x + f64::from(dx), y + f64::from(dy)));
            }
            let names = stroke(device, &zones[z], &samples);
            let mut families: Vec<&str> = names.iter().map(|n| family(n)).collect();
            families.dedup();
            prop_assert!(families.len() <= 1, "{:?}", names);
            Ok(())
        })
        .map_err(|e| format!("exclusivity: {e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("golden scenario trace", golden_scenario),
        ("parser golden corpus", parser_corpus),
        ("pattern table consistency", pattern_consistency),
        ("invalid-operation taxonomy", invalid_taxonomy),
        ("oracle equivalence", oracle_equivalence),
        ("record/replay determinism", determinism),
        ("gesture thresholds", gesture_thresholds),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS {name} ({secs:.2}s)"),
            Err(e) => {
                failed += 1;
                println!("FAIL {name}: {e}");
            }
        }
    }
    println!("{} of {} primary criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
