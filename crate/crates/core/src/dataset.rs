//! Tabular datasets: loading, attribute typing and row access.
//!
//! A [`Dataset`] is immutable once loaded. Every row has one value slot per
//! attribute, and row ids are the dense range `0..n`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub type RowId = usize;

/// Data type of an attribute, shown as the pill icon in the attribute panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeKind {
    Quantitative,
    Categorical,
    Temporal,
}

impl AttributeKind {
    /// Quantitative and temporal attributes both live on continuous scales.
    pub fn is_continuous(self) -> bool {
        !matches!(self, AttributeKind::Categorical)
    }
}

impl fmt::Display for AttributeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttributeKind::Quantitative => "quantitative",
            AttributeKind::Categorical => "categorical",
            AttributeKind::Temporal => "temporal",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

/// A single cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Null,
    Number(f64),
    Text(String),
}

impl Value {
    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Label used for categories, legend entries and mark ids.
    pub fn label(&self) -> String {
        match self {
            Value::Null => String::from("null"),
            Value::Number(n) => format_number(*n),
            Value::Text(s) => s.clone(),
        }
    }

    /// Total order: nulls first, then numbers, then text.
    pub fn total_cmp(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Null, Value::Null) => Ordering::Equal,
            (Value::Null, _) => Ordering::Less,
            (_, Value::Null) => Ordering::Greater,
            (Value::Number(a), Value::Number(b)) => a.total_cmp(b),
            (Value::Number(_), Value::Text(_)) => Ordering::Less,
            (Value::Text(_), Value::Number(_)) => Ordering::Greater,
            (Value::Text(a), Value::Text(b)) => a.cmp(b),
        }
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Integers print without a fractional part.
pub fn format_number(n: f64) -> String {
    if n.fract() == 0.0 && n.abs() < 1e15 {
        format!("{}", n as i64)
    } else {
        format!("{n}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceFormat {
    Csv,
    Json,
}

impl SourceFormat {
    /// Guess the format from a file name extension.
    pub fn from_path(path: &str) -> Option<Self> {
        let lower = path.to_ascii_lowercase();
        if lower.ends_with(".csv") {
            Some(SourceFormat::Csv)
        } else if lower.ends_with(".json") {
            Some(SourceFormat::Json)
        } else {
            None
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("malformed {format:?} at row {row}, column {column}: {message}")]
    Malformed {
        format: SourceFormat,
        row: usize,
        column: usize,
        message: String,
    },
    #[error("the table has no rows")]
    Empty,
    #[error("the table has no columns")]
    NoColumns,
    #[error("attribute name at column {0} is empty")]
    EmptyName(usize),
    #[error("duplicate attribute name {0:?}")]
    DuplicateAttribute(String),
    #[error("source is not valid UTF-8")]
    Encoding,
    #[error("manifest: {0}")]
    Manifest(String),
}

/// Optional per-attribute kind overrides, loaded from a JSON manifest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub attributes: BTreeMap<String, AttributeKind>,
}

impl DatasetManifest {
    pub fn from_json(text: &str) -> Result<Self, LoadError> {
        serde_json::from_str(text).map_err(|e| LoadError::Manifest(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    attributes: Vec<Attribute>,
    // column-major storage, one Vec per attribute
    columns: Vec<Vec<Value>>,
    rows: usize,
    content_hash: String,
    warnings: Vec<String>,
}

/// The bundled 709-row movies table.
pub const MOVIES_CSV: &[u8] = include_bytes!("../data/movies.csv");

impl Dataset {
    pub fn movies() -> Self {
        Self::load(MOVIES_CSV, SourceFormat::Csv).expect("bundled movies table loads")
    }

    /// Parse a dataset from raw bytes. Parsing is deterministic: the same bytes
    /// always give the same dataset.
    pub fn load(bytes: &[u8], format: SourceFormat) -> Result<Self, LoadError> {
        Self::load_with_manifest(bytes, format, None)
    }

    pub fn load_with_manifest(
        bytes: &[u8],
        format: SourceFormat,
        manifest: Option<&DatasetManifest>,
    ) -> Result<Self, LoadError> {
        let (names, columns) = match format {
            SourceFormat::Csv => parse_csv(bytes)?,
            SourceFormat::Json => parse_json(bytes)?,
        };
        let hash = hex::encode(Sha256::digest(bytes));
        Self::from_columns(names, columns, manifest, hash)
    }

    /// Build directly from columns of raw values (used by tests and fixtures).
    pub fn from_raw_columns(
        columns: Vec<(String, Vec<Value>)>,
    ) -> Result<Self, LoadError> {
        let mut hasher = Sha256::new();
        for (name, values) in &columns {
            hasher.update(name.as_bytes());
            for v in values {
                hasher.update(serde_json::to_vec(v).unwrap_or_default());
            }
        }
        let hash = hex::encode(hasher.finalize());
        let (names, cols) = columns.into_iter().unzip();
        Self::from_columns(names, cols, None, hash)
    }

    fn from_columns(
        names: Vec<String>,
        columns: Vec<Vec<Value>>,
        manifest: Option<&DatasetManifest>,
        content_hash: String,
    ) -> Result<Self, LoadError> {
        if names.is_empty() {
            return Err(LoadError::NoColumns);
        }
        let rows = columns.first().map(Vec::len).unwrap_or(0);
        if rows == 0 {
            return Err(LoadError::Empty);
        }
        let mut seen = HashSet::new();
        for (i, name) in names.iter().enumerate() {
            if name.trim().is_empty() {
                return Err(LoadError::EmptyName(i));
            }
            if !seen.insert(name.to_lowercase()) {
                return Err(LoadError::DuplicateAttribute(name.clone()));
            }
        }
        if let Some(m) = manifest {
            for key in m.attributes.keys() {
                if !names.iter().any(|n| n == key) {
                    return Err(LoadError::Manifest(format!(
                        "override for unknown attribute {key:?}"
                    )));
                }
            }
        }

        let mut attributes = Vec::with_capacity(names.len());
        let mut typed = Vec::with_capacity(names.len());
        let mut warnings = Vec::new();
        for (name, raw) in names.into_iter().zip(columns) {
            let inferred = infer_attribute_kind(&raw);
            if inferred.all_null {
                warnings.push(format!("attribute {name:?} has no values; typed categorical"));
            }
            let kind = manifest
                .and_then(|m| m.attributes.get(&name).copied())
                .unwrap_or(inferred.kind);
            typed.push(coerce_column(raw, kind));
            attributes.push(Attribute { name, kind });
        }
        Ok(Dataset {
            attributes,
            columns: typed,
            rows,
            content_hash,
            warnings,
        })
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn len(&self) -> usize {
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn row_ids(&self) -> impl Iterator<Item = RowId> {
        0..self.rows
    }

    /// SHA-256 of the source bytes, hex encoded.
    pub fn content_hash(&self) -> &str {
        &self.content_hash
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn attribute(&self, name: &str) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn kind_of(&self, name: &str) -> Option<AttributeKind> {
        self.attribute(name).map(|a| a.kind)
    }

    pub fn column(&self, name: &str) -> Option<&[Value]> {
        self.index_of(name).map(|i| self.columns[i].as_slice())
    }

    pub fn value(&self, row: RowId, name: &str) -> Option<&Value> {
        self.column(name).and_then(|c| c.get(row))
    }

    /// Position of a value on a continuous scale. Years and numbers map to
    /// themselves; ISO dates map to days since 1970-01-01.
    pub fn numeric(&self, row: RowId, name: &str) -> Option<f64> {
        self.value(row, name).and_then(numeric_value)
    }

    /// Record view of a row, keyed by attribute name.
    pub fn record(&self, row: RowId) -> BTreeMap<String, Value> {
        self.attributes
            .iter()
            .zip(&self.columns)
            .map(|(a, c)| (a.name.clone(), c[row].clone()))
            .collect()
    }

    /// Distinct non-null values in dataset order of first appearance, sorted.
    pub fn distinct_values(&self, name: &str) -> Vec<Value> {
        let mut values: Vec<Value> = self
            .column(name)
            .map(|c| c.iter().filter(|v| !v.is_null()).cloned().collect())
            .unwrap_or_default();
        values.sort();
        values.dedup();
        values
    }
}

pub fn numeric_value(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => Some(*n),
        Value::Text(s) => parse_iso_date(s),
        Value::Null => None,
    }
}

fn parse_iso_date(s: &str) -> Option<f64> {
    let date = chrono::NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").ok()?;
    let epoch = chrono::NaiveDate::from_ymd_opt(1970, 1, 1)?;
    Some((date - epoch).num_days() as f64)
}

fn is_year(v: f64) -> bool {
    v.fract() == 0.0 && (1800.0..=2200.0).contains(&v)
}

/// Result of attribute typing; `all_null` flags the warning case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InferredKind {
    pub kind: AttributeKind,
    pub all_null: bool,
}

/// Type a column: temporal if every non-null value is a year or an ISO date,
/// else quantitative if every value is numeric, else categorical.
pub fn infer_attribute_kind(values: &[Value]) -> InferredKind {
    let present: Vec<&Value> = values.iter().filter(|v| !v.is_null()).collect();
    if present.is_empty() {
        return InferredKind {
            kind: AttributeKind::Categorical,
            all_null: true,
        };
    }
    let numbers: Option<Vec<f64>> = present.iter().map(|v| parse_number(v)).collect();
    let kind = match numbers {
        Some(nums) if nums.iter().all(|n| is_year(*n)) && looks_like_years(&present) => {
            AttributeKind::Temporal
        }
        Some(_) => AttributeKind::Quantitative,
        None if present
            .iter()
            .all(|v| v.as_text().and_then(parse_iso_date).is_some()) =>
        {
            AttributeKind::Temporal
        }
        None => AttributeKind::Categorical,
    };
    InferredKind {
        kind,
        all_null: false,
    }
}

// a year is written as a bare 4-digit integer: "1998", not "1998.0"
fn looks_like_years(values: &[&Value]) -> bool {
    values.iter().all(|v| match v {
        Value::Number(_) => true,
        Value::Text(s) => {
            let t = s.trim();
            t.len() == 4 && t.bytes().all(|b| b.is_ascii_digit())
        }
        Value::Null => true,
    })
}

fn parse_number(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => Some(*n),
        Value::Text(s) => s.trim().parse::<f64>().ok().filter(|n| n.is_finite()),
        Value::Null => None,
    }
}

fn coerce_column(raw: Vec<Value>, kind: AttributeKind) -> Vec<Value> {
    raw.into_iter()
        .map(|v| match (kind, v) {
            (_, Value::Null) => Value::Null,
            (AttributeKind::Categorical, Value::Number(n)) => Value::Text(format_number(n)),
            (AttributeKind::Categorical, t @ Value::Text(_)) => t,
            (_, Value::Number(n)) => Value::Number(n),
            (_, Value::Text(s)) => match s.trim().parse::<f64>() {
                Ok(n) if n.is_finite() => Value::Number(n),
                // ISO dates stay textual; `numeric_value` projects them
                _ if parse_iso_date(&s).is_some() => Value::Text(s.trim().to_string()),
                _ => Value::Null,
            },
        })
        .collect()
}

fn cell_from_text(s: &str) -> Value {
    let t = s.trim();
    if t.is_empty() {
        Value::Null
    } else {
        Value::Text(t.to_string())
    }
}

type Columns = (Vec<String>, Vec<Vec<Value>>);

fn parse_csv(bytes: &[u8]) -> Result<Columns, LoadError> {
    if bytes.is_empty() {
        return Err(LoadError::Empty);
    }
    let text = std::str::from_utf8(bytes).map_err(|_| LoadError::Encoding)?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(text.as_bytes());
    let malformed = |e: csv::Error| {
        let (row, column) = match e.position() {
            Some(p) => (p.line() as usize, 0),
            None => (0, 0),
        };
        let column = match e.kind() {
            csv::ErrorKind::UnequalLengths { len, .. } => *len as usize,
            _ => column,
        };
        LoadError::Malformed {
            format: SourceFormat::Csv,
            row,
            column,
            message: e.to_string(),
        }
    };
    let names: Vec<String> = reader
        .headers()
        .map_err(malformed)?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if names.is_empty() || (names.len() == 1 && names[0].is_empty()) {
        return Err(LoadError::NoColumns);
    }
    let mut columns = vec![Vec::new(); names.len()];
    for record in reader.records() {
        let record = record.map_err(malformed)?;
        for (col, field) in columns.iter_mut().zip(record.iter()) {
            col.push(cell_from_text(field));
        }
    }
    Ok((names, columns))
}

fn parse_json(bytes: &[u8]) -> Result<Columns, LoadError> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(LoadError::Empty);
    }
    let parsed: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| LoadError::Malformed {
            format: SourceFormat::Json,
            row: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
    let items = parsed.as_array().ok_or_else(|| LoadError::Malformed {
        format: SourceFormat::Json,
        row: 0,
        column: 0,
        message: "expected an array of objects".into(),
    })?;
    let mut names: Vec<String> = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let obj = item.as_object().ok_or_else(|| LoadError::Malformed {
            format: SourceFormat::Json,
            row: i,
            column: 0,
            message: "record is not an object".into(),
        })?;
        for key in obj.keys() {
            if !names.contains(key) {
                names.push(key.clone());
            }
        }
    }
    let mut columns = vec![Vec::with_capacity(items.len()); names.len()];
    for (i, item) in items.iter().enumerate() {
        let obj = item.as_object().expect("checked above");
        for (c, name) in names.iter().enumerate() {
            let v = match obj.get(name) {
                None | Some(serde_json::Value::Null) => Value::Null,
                Some(serde_json::Value::Number(n)) => Value::Number(n.as_f64().unwrap_or(0.0)),
                Some(serde_json::Value::String(s)) => cell_from_text(s),
                Some(serde_json::Value::Bool(b)) => Value::Text(b.to_string()),
                Some(_) => {
                    return Err(LoadError::Malformed {
                        format: SourceFormat::Json,
                        row: i,
                        column: c,
                        message: format!("nested value for {name:?}"),
                    })
                }
            };
            columns[c].push(v);
        }
    }
    Ok((names, columns))
}
