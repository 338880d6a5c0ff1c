//! Random datasets and brute-force oracles shared by the property suites.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use tabviz_core::aggregate::{aggregate_rows, bin, bin_rows, AggregateFn, Measure};
use tabviz_core::chart::{BindMode, Channel};
use tabviz_core::dataset::{Dataset, Value};
use tabviz_core::executor::{AppState, Executor};
use tabviz_core::filter::{visible_rows, Filter, FilterSet, Interval, Polarity, RowSet};
use tabviz_core::fusion::{Operation, OperationRequest, SelectAct};
use tabviz_core::{Point, Polygon};

pub const CATS: [&str; 4] = ["a", "b", "c", "d"];

/// Raw columns: `cat` and `grp` categorical, `num` and `val` quantitative.
#[derive(Debug, Clone)]
pub struct Table {
    pub cat: Vec<Option<&'static str>>,
    pub grp: Vec<Option<&'static str>>,
    pub num: Vec<Option<f64>>,
    pub val: Vec<Option<f64>>,
}

impl Table {
    pub fn len(&self) -> usize {
        self.cat.len()
    }

    pub fn dataset(&self) -> Dataset {
        let text = |c: &[Option<&str>]| c.iter().map(|v| v.map_or(Value::Null, |s| Value::Text(s.into()))).collect();
        let nums = |c: &[Option<f64>]| c.iter().map(|v| v.map_or(Value::Null, Value::Number)).collect();
        Dataset::from_raw_columns(vec![
            ("cat".into(), text(&self.cat)),
            ("grp".into(), text(&self.grp)),
            ("num".into(), nums(&self.num)),
            ("val".into(), nums(&self.val)),
        ])
        .expect("valid table")
    }

    pub fn number(&self, col: &str, row: usize) -> Option<f64> {
        match col {
            "num" => self.num[row],
            "val" => self.val[row],
            _ => None,
        }
    }

    pub fn text(&self, col: &str, row: usize) -> Option<&'static str> {
        match col {
            "cat" => self.cat[row],
            "grp" => self.grp[row],
            _ => None,
        }
    }
}

fn cat_cell() -> impl Strategy<Value = Option<&'static str>> {
    prop_oneof![1 => Just(None), 6 => prop::sample::select(CATS.to_vec()).prop_map(Some)]
}

/// Half-steps in [-20, 20): never mistaken for years.
fn num_cell() -> impl Strategy<Value = Option<f64>> {
    prop_oneof![1 => Just(None), 6 => (-40i32..40).prop_map(|i| Some(i as f64 * 0.5))]
}

pub fn table(max_rows: usize) -> impl Strategy<Value = Table> {
    (1..=max_rows).prop_flat_map(|n| {
        (
            prop::collection::vec(cat_cell(), n),
            prop::collection::vec(cat_cell(), n),
            prop::collection::vec(num_cell(), n),
            prop::collection::vec(num_cell(), n),
        )
            .prop_map(|(mut cat, mut grp, mut num, mut val)| {
                // keep every column typed
                cat[0].get_or_insert("a");
                grp[0].get_or_insert("a");
                num[0].get_or_insert(0.0);
                val[0].get_or_insert(0.0);
                Table { cat, grp, num, val }
            })
    })
}

fn polarity() -> impl Strategy<Value = Polarity> {
    prop_oneof![Just(Polarity::Keep), Just(Polarity::Remove)]
}

fn interval() -> impl Strategy<Value = Interval> {
    let bound = prop::option::of((-44i32..44).prop_map(|i| i as f64 * 0.5));
    (bound.clone(), bound, any::<bool>(), any::<bool>()).prop_map(|(lo, hi, lo_closed, hi_closed)| Interval {
        lo,
        hi,
        lo_closed,
        hi_closed,
    })
}

pub fn filter(rows: usize) -> impl Strategy<Value = Filter> {
    let cols = prop::sample::select(vec!["cat", "grp"]);
    let nums = prop::sample::select(vec!["num", "val"]);
    prop_oneof![
        (cols, prop::collection::btree_set(prop::sample::select(CATS.to_vec()), 0..4)).prop_map(|(c, ex)| {
            Filter::Category {
                attribute: c.into(),
                excluded: ex.into_iter().map(|s| Value::Text(s.into())).collect(),
            }
        }),
        (nums, interval(), polarity()).prop_map(|(c, interval, polarity)| Filter::Range {
            attribute: c.into(),
            interval,
            polarity,
        }),
        (prop::collection::btree_set(0..rows.max(1), 0..rows.max(1)), polarity())
            .prop_map(|(ids, polarity)| Filter::Ids { ids, polarity }),
    ]
}

pub fn table_and_filters() -> impl Strategy<Value = (Table, Vec<Filter>)> {
    table(40).prop_flat_map(|t| {
        let n = t.len();
        (Just(t), prop::collection::vec(filter(n), 0..5))
    })
}

fn in_interval(i: &Interval, v: f64) -> bool {
    let lo = i.lo.is_none_or(|lo| if i.lo_closed { v >= lo } else { v > lo });
    let hi = i.hi.is_none_or(|hi| if i.hi_closed { v <= hi } else { v < hi });
    lo && hi
}

/// Linear scan straight from the raw table.
pub fn oracle_visible(t: &Table, filters: &[Filter]) -> RowSet {
    (0..t.len())
        .filter(|&r| {
            filters.iter().all(|f| match f {
                Filter::Category { attribute, excluded } => match t.text(attribute, r) {
                    None => true,
                    Some(s) => !excluded.iter().any(|e| *e == Value::Text(s.into())),
                },
                Filter::Range {
                    attribute,
                    interval,
                    polarity,
                } => match (t.number(attribute, r), polarity) {
                    (None, Polarity::Keep) => false,
                    (None, Polarity::Remove) => true,
                    (Some(v), Polarity::Keep) => in_interval(interval, v),
                    (Some(v), Polarity::Remove) => !in_interval(interval, v),
                },
                Filter::Ids { ids, polarity } => ids.contains(&r) == (*polarity == Polarity::Keep),
            })
        })
        .collect()
}

pub fn filter_set(filters: &[Filter]) -> FilterSet {
    FilterSet::from_filters(filters.to_vec())
}

/// Naive group-by: (keys, count, mean of `val`) sorted by key.
pub fn oracle_group_by(t: &Table, rows: &RowSet, keys: &[&str]) -> Vec<(Vec<&'static str>, usize, Option<f64>)> {
    let mut out: Vec<(Vec<&'static str>, usize, f64, usize)> = Vec::new();
    for &r in rows {
        let key: Option<Vec<&'static str>> = keys.iter().map(|k| t.text(k, r)).collect();
        let Some(key) = key else { continue };
        let i = match out.iter().position(|g| g.0 == key) {
            Some(i) => i,
            None => {
                out.push((key, 0, 0.0, 0));
                out.len() - 1
            }
        };
        out[i].1 += 1;
        if let Some(v) = t.val[r] {
            out[i].2 += v;
            out[i].3 += 1;
        }
    }
    let mut groups: Vec<_> = out
        .into_iter()
        .map(|(k, n, sum, m)| (k, n, (m > 0).then(|| sum / m as f64)))
        .collect();
    groups.sort_by(|a, b| a.0.cmp(&b.0));
    groups
}

pub fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

/// Even-odd containment, written independently of the engine.
pub fn oracle_inside(poly: &[(f64, f64)], x: f64, y: f64) -> bool {
    let mut crossings = 0;
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (x1, y1) = poly[i];
        let (x2, y2) = poly[(i + 1) % n];
        let straddles = (y1 <= y && y < y2) || (y2 <= y && y < y1);
        if straddles {
            let t = (y - y1) / (y2 - y1);
            if x < x1 + t * (x2 - x1) {
                crossings += 1;
            }
        }
    }
    crossings % 2 == 1
}

pub fn polygon() -> impl Strategy<Value = Vec<(f64, f64)>> {
    let coord = (-44i32..44).prop_map(|i| i as f64 * 0.5 + 0.25);
    prop::collection::vec((coord.clone(), coord), 0..8)
}

fn request(op: Operation) -> OperationRequest {
    OperationRequest {
        pattern: "test".into(),
        op,
        provenance: Default::default(),
    }
}

/// Scatterplot of num × val, then lasso; returns the engine's selection.
pub fn engine_lasso(ds: &Dataset, poly: &[(f64, f64)]) -> RowSet {
    let config = Default::default();
    let exec = Executor::new(ds, &config);
    let mut state = AppState::new();
    for (channel, a) in [(Channel::X, "num"), (Channel::Y, "val")] {
        exec.apply(
            &mut state,
            &request(Operation::BindEncoding {
                channel,
                attributes: vec![a.into()],
                mode: BindMode::Replace,
            }),
        );
    }
    let polygon = Polygon::new(poly.iter().map(|&(x, y)| Point::new(x, y)).collect());
    exec.apply(
        &mut state,
        &request(Operation::Select {
            act: SelectAct::Lasso { polygon },
            compound: false,
        }),
    );
    state.selection
}

pub fn oracle_lasso(t: &Table, poly: &[(f64, f64)]) -> RowSet {
    (0..t.len())
        .filter(|&r| match (t.num[r], t.val[r]) {
            (Some(x), Some(y)) => oracle_inside(poly, x, y),
            _ => false,
        })
        .collect()
}

/// Counts per bin by scanning every value against every bin.
pub fn oracle_histogram(values: &[Option<f64>], edges: &[(f64, f64)]) -> Vec<usize> {
    let last = edges.len().saturating_sub(1);
    edges
        .iter()
        .enumerate()
        .map(|(i, &(lo, hi))| {
            values
                .iter()
                .flatten()
                .filter(|&&v| v >= lo && (v < hi || (i == last && v <= hi)))
                .count()
        })
        .collect()
}

pub fn check_visible_rows(t: &Table, filters: &[Filter]) -> Result<(), TestCaseError> {
    let got = visible_rows(&filter_set(filters), &t.dataset()).unwrap();
    prop_assert_eq!(got, oracle_visible(t, filters));
    Ok(())
}

pub fn check_aggregates(t: &Table, filters: &[Filter], two_keys: bool) -> Result<(), TestCaseError> {
    let ds = t.dataset();
    let rows = visible_rows(&filter_set(filters), &ds).unwrap();
    let keys: &[&str] = if two_keys { &["cat", "grp"] } else { &["cat"] };
    let group_by: Vec<String> = keys.iter().map(|k| k.to_string()).collect();
    let table = aggregate_rows(&ds, &rows, &group_by, &[Measure::count(), Measure::mean("val")]).unwrap();
    let expected = oracle_group_by(t, &rows, keys);
    prop_assert_eq!(table.groups.len(), expected.len());
    for (g, (key, n, mean)) in table.groups.iter().zip(&expected) {
        let labels: Vec<String> = g.keys.iter().map(|(_, v)| v.label()).collect();
        prop_assert_eq!(&labels, key);
        prop_assert_eq!(g.measures[0].func, AggregateFn::Count);
        prop_assert_eq!(g.measures[0].value, Some(*n as f64));
        match (g.measures[1].value, mean) {
            (Some(a), Some(b)) => prop_assert!(close(a, *b), "{} vs {}", a, b),
            (a, b) => prop_assert_eq!(a, *b),
        }
    }
    Ok(())
}

pub fn check_lasso(t: &Table, poly: &[(f64, f64)]) -> Result<(), TestCaseError> {
    prop_assert_eq!(engine_lasso(&t.dataset(), poly), oracle_lasso(t, poly));
    Ok(())
}

pub fn check_bins(t: &Table, target: usize) -> Result<(), TestCaseError> {
    let bins = bin(&t.num, target);
    let edges: Vec<(f64, f64)> = bins.iter().map(|b| (b.lo, b.hi)).collect();
    let counts: Vec<usize> = bins.iter().map(|b| b.count).collect();
    prop_assert_eq!(&counts, &oracle_histogram(&t.num, &edges));
    let present: Vec<f64> = t.num.iter().flatten().copied().collect();
    prop_assert_eq!(counts.iter().sum::<usize>(), present.len());
    let (min, max) = present.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    prop_assert!(edges[0].0 <= min && edges.last().unwrap().1 >= max);
    for w in edges.windows(2) {
        prop_assert_eq!(w[0].1, w[1].0);
    }
    // row-level binning agrees with value-level binning
    let ds = t.dataset();
    let all = ds.row_ids().collect();
    let rows = bin_rows(&ds, &all, "num", target);
    prop_assert_eq!(rows.iter().map(|b| b.count).collect::<Vec<_>>(), counts);
    Ok(())
}
