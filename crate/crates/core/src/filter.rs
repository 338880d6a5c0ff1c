//! Active filters and row visibility.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{format_number, Dataset, RowId, Value};

pub type RowSet = BTreeSet<RowId>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Keep,
    Remove,
}

impl Polarity {
    pub fn flipped(self) -> Self {
        match self {
            Polarity::Keep => Polarity::Remove,
            Polarity::Remove => Polarity::Keep,
        }
    }
}

/// Numeric interval; a missing bound is unbounded on that side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    #[serde(default = "yes")]
    pub lo_closed: bool,
    #[serde(default = "yes")]
    pub hi_closed: bool,
}

fn yes() -> bool {
    true
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        Interval {
            lo: Some(lo),
            hi: Some(hi),
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn below(bound: f64) -> Self {
        Interval {
            lo: None,
            hi: Some(bound),
            lo_closed: true,
            hi_closed: false,
        }
    }

    pub fn at_most(bound: f64) -> Self {
        Interval {
            hi_closed: true,
            ..Self::below(bound)
        }
    }

    pub fn above(bound: f64) -> Self {
        Interval {
            lo: Some(bound),
            hi: None,
            lo_closed: false,
            hi_closed: true,
        }
    }

    pub fn at_least(bound: f64) -> Self {
        Interval {
            lo_closed: true,
            ..Self::above(bound)
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        let lo_ok = match self.lo {
            None => true,
            Some(lo) if self.lo_closed => v >= lo,
            Some(lo) => v > lo,
        };
        let hi_ok = match self.hi {
            None => true,
            Some(hi) if self.hi_closed => v <= hi,
            Some(hi) => v < hi,
        };
        lo_ok && hi_ok
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.lo, self.hi) {
            (None, None) => write!(f, "any value"),
            (None, Some(hi)) => write!(
                f,
                "{} {}",
                if self.hi_closed { "at most" } else { "under" },
                format_number(hi)
            ),
            (Some(lo), None) => write!(
                f,
                "{} {}",
                if self.lo_closed { "at least" } else { "over" },
                format_number(lo)
            ),
            (Some(lo), Some(hi)) => {
                write!(f, "between {} and {}", format_number(lo), format_number(hi))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Filter {
    /// Hides rows whose value is in `excluded`. Null values are never excluded.
    Category {
        attribute: String,
        excluded: BTreeSet<Value>,
    },
    /// Keeps or removes rows whose value lies in `interval`. Rows without a
    /// value are removed by `keep` and kept by `remove`.
    Range {
        attribute: String,
        interval: Interval,
        polarity: Polarity,
    },
    Ids { ids: RowSet, polarity: Polarity },
}

impl Filter {
    pub fn attribute(&self) -> Option<&str> {
        match self {
            Filter::Category { attribute, .. } | Filter::Range { attribute, .. } => Some(attribute),
            Filter::Ids { .. } => None,
        }
    }

    pub fn passes(&self, dataset: &Dataset, row: RowId) -> bool {
        match self {
            Filter::Category {
                attribute,
                excluded,
            } => match dataset.value(row, attribute) {
                Some(v) if !v.is_null() => !excluded.contains(v),
                _ => true,
            },
            Filter::Range {
                attribute,
                interval,
                polarity,
            } => {
                let inside = dataset
                    .numeric(row, attribute)
                    .map(|v| interval.contains(v));
                match (polarity, inside) {
                    (Polarity::Keep, Some(inside)) => inside,
                    (Polarity::Remove, Some(inside)) => !inside,
                    (Polarity::Keep, None) => false,
                    (Polarity::Remove, None) => true,
                }
            }
            Filter::Ids { ids, polarity } => match polarity {
                Polarity::Keep => ids.contains(&row),
                Polarity::Remove => !ids.contains(&row),
            },
        }
    }

    /// Text for the active-filter chip.
    pub fn describe(&self) -> String {
        match self {
            Filter::Category {
                attribute,
                excluded,
            } => {
                let values: Vec<String> = excluded.iter().map(Value::label).collect();
                format!("{attribute} not in {{{}}}", values.join(", "))
            }
            Filter::Range {
                attribute,
                interval,
                polarity,
            } => {
                let verb = match polarity {
                    Polarity::Keep => "only",
                    Polarity::Remove => "without",
                };
                format!("{verb} {attribute} {interval}")
            }
            Filter::Ids { ids, polarity } => match polarity {
                Polarity::Keep => format!("only {} selected rows", ids.len()),
                Polarity::Remove => format!("without {} rows", ids.len()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilterError {
    #[error("filter references unknown attribute {0:?}")]
    UnknownAttribute(String),
}

/// Ordered conjunction of filters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FilterSet {
    filters: Vec<Filter>,
}

impl FilterSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_filters(filters: Vec<Filter>) -> Self {
        FilterSet { filters }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Filter> {
        self.filters.iter()
    }

    pub fn len(&self) -> usize {
        self.filters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filters.is_empty()
    }

    pub fn push(&mut self, filter: Filter) {
        self.filters.push(filter);
    }

    pub fn remove(&mut self, index: usize) -> Option<Filter> {
        (index < self.filters.len()).then(|| self.filters.remove(index))
    }

    pub fn pop(&mut self) -> Option<Filter> {
        self.filters.pop()
    }

    /// Add `values` to the category filter on `attribute`, creating it when
    /// needed, so one chip exists per attribute.
    pub fn exclude_values(&mut self, attribute: &str, values: impl IntoIterator<Item = Value>) {
        for f in &mut self.filters {
            if let Filter::Category {
                attribute: a,
                excluded,
            } = f
            {
                if a == attribute {
                    excluded.extend(values);
                    return;
                }
            }
        }
        self.filters.push(Filter::Category {
            attribute: attribute.to_string(),
            excluded: values.into_iter().collect(),
        });
    }

    pub fn check(&self, dataset: &Dataset) -> Result<(), FilterError> {
        for f in &self.filters {
            if let Some(a) = f.attribute() {
                if dataset.index_of(a).is_none() {
                    return Err(FilterError::UnknownAttribute(a.to_string()));
                }
            }
        }
        Ok(())
    }

    pub fn passes(&self, dataset: &Dataset, row: RowId) -> bool {
        self.filters.iter().all(|f| f.passes(dataset, row))
    }
}

impl<'a> IntoIterator for &'a FilterSet {
    type Item = &'a Filter;
    type IntoIter = std::slice::Iter<'a, Filter>;

    fn into_iter(self) -> Self::IntoIter {
        self.filters.iter()
    }
}

/// Rows passing every filter.
pub fn visible_rows(filters: &FilterSet, dataset: &Dataset) -> Result<RowSet, FilterError> {
    filters.check(dataset)?;
    Ok(dataset
        .row_ids()
        .filter(|&r| filters.passes(dataset, r))
        .collect())
}
