//! Group-by aggregation and histogram binning over filtered rows.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{AttributeKind, Dataset, RowId, Value};
use crate::filter::{visible_rows, FilterError, FilterSet, RowSet};
use crate::geometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregateFn {
    Count,
    Mean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    /// `None` only for a plain row count.
    pub attribute: Option<String>,
    pub func: AggregateFn,
}

impl Measure {
    pub fn count() -> Self {
        Measure {
            attribute: None,
            func: AggregateFn::Count,
        }
    }

    pub fn mean(attribute: impl Into<String>) -> Self {
        Measure {
            attribute: Some(attribute.into()),
            func: AggregateFn::Mean,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureValue {
    pub attribute: Option<String>,
    pub func: AggregateFn,
    /// `None` when every member value is null.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Group {
    pub keys: Vec<(String, Value)>,
    pub measures: Vec<MeasureValue>,
    pub rows: RowSet,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AggregateTable {
    pub groups: Vec<Group>,
}

impl AggregateTable {
    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AggregateError {
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),
    #[error("cannot take the mean of categorical attribute {0:?}")]
    MeanOfCategorical(String),
    #[error("mean needs an attribute")]
    MeanWithoutAttribute,
}

/// Mean over present values; nulls are skipped.
pub fn mean(values: impl IntoIterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, n) = values
        .into_iter()
        .flatten()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Group rows passing `filters` by the distinct combination of `group_by`
/// values and evaluate `measures` per group. Rows with a null key join no
/// group. Groups come out in ascending key order.
pub fn aggregate(
    dataset: &Dataset,
    filters: &FilterSet,
    group_by: &[String],
    measures: &[Measure],
) -> Result<AggregateTable, AggregateError> {
    let rows = visible_rows(filters, dataset)?;
    aggregate_rows(dataset, &rows, group_by, measures)
}

pub fn aggregate_rows(
    dataset: &Dataset,
    rows: &RowSet,
    group_by: &[String],
    measures: &[Measure],
) -> Result<AggregateTable, AggregateError> {
    for a in group_by {
        dataset
            .index_of(a)
            .ok_or_else(|| AggregateError::UnknownAttribute(a.clone()))?;
    }
    for m in measures {
        match (&m.attribute, m.func) {
            (None, AggregateFn::Mean) => return Err(AggregateError::MeanWithoutAttribute),
            (Some(a), func) => match dataset.kind_of(a) {
                None => return Err(AggregateError::UnknownAttribute(a.clone())),
                Some(AttributeKind::Categorical) if func == AggregateFn::Mean => {
                    return Err(AggregateError::MeanOfCategorical(a.clone()))
                }
                _ => {}
            },
            (None, AggregateFn::Count) => {}
        }
    }

    let mut buckets: BTreeMap<Vec<Value>, RowSet> = BTreeMap::new();
    'rows: for &row in rows {
        let mut key = Vec::with_capacity(group_by.len());
        for a in group_by {
            match dataset.value(row, a) {
                Some(v) if !v.is_null() => key.push(v.clone()),
                _ => continue 'rows,
            }
        }
        buckets.entry(key).or_default().insert(row);
    }

    let groups = buckets
        .into_iter()
        .map(|(key, members)| Group {
            keys: group_by.iter().cloned().zip(key).collect(),
            measures: measures
                .iter()
                .map(|m| evaluate(dataset, &members, m))
                .collect(),
            rows: members,
        })
        .collect();
    Ok(AggregateTable { groups })
}

pub fn evaluate(dataset: &Dataset, rows: &RowSet, m: &Measure) -> MeasureValue {
    let value = match (m.func, &m.attribute) {
        (AggregateFn::Count, None) => Some(rows.len() as f64),
        (AggregateFn::Count, Some(a)) => Some(
            rows.iter()
                .filter(|&&r| dataset.value(r, a).is_some_and(|v| !v.is_null()))
                .count() as f64,
        ),
        (AggregateFn::Mean, Some(a)) => mean(rows.iter().map(|&r| dataset.numeric(r, a))),
        (AggregateFn::Mean, None) => None,
    };
    MeasureValue {
        attribute: m.attribute.clone(),
        func: m.func,
        value,
    }
}

/// Histogram bin over dataset rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub members: Vec<RowId>,
}

/// Nice equal-width bins over `values`; bin members are indices into `values`.
pub fn bin(values: &[Option<f64>], target_bin_count: usize) -> Vec<geometry::Bin<f64>> {
    geometry::bin(values, target_bin_count)
}

/// Bin one attribute over a set of rows; members are row ids.
pub fn bin_rows(
    dataset: &Dataset,
    rows: &RowSet,
    attribute: &str,
    target_bin_count: usize,
) -> Vec<RowBin> {
    let ids: Vec<RowId> = rows.iter().copied().collect();
    let values: Vec<Option<f64>> = ids.iter().map(|&r| dataset.numeric(r, attribute)).collect();
    geometry::bin(&values, target_bin_count)
        .into_iter()
        .map(|b| RowBin {
            lo: b.lo,
            hi: b.hi,
            count: b.count,
            members: b.members.into_iter().map(|i| ids[i]).collect(),
        })
        .collect()
}
