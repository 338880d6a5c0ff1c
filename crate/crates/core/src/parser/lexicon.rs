use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chart::ChartType;
use crate::dataset::{AttributeKind, Dataset, Value};

/// Operation keyword classes recognised in transcripts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeywordClass {
    Bind,
    Add,
    ColorBy,
    Unbind,
    Sort,
    Ascending,
    Descending,
    Count,
    FilterRemove,
    FilterKeep,
    Except,
    These,
    Others,
    LessThan,
    GreaterThan,
    AtLeast,
    AtMost,
    Between,
    ChartChange,
    Histogram,
    BarChart,
    GroupedBarChart,
    StackedBarChart,
    LineChart,
    Scatterplot,
    ParallelCoordinates,
    ChannelX,
    ChannelY,
    ChannelColor,
}

impl KeywordClass {
    pub fn chart_type(self) -> Option<ChartType> {
        Some(match self {
            KeywordClass::Histogram => ChartType::Histogram,
            KeywordClass::BarChart => ChartType::BarChart,
            KeywordClass::GroupedBarChart => ChartType::GroupedBarChart,
            KeywordClass::StackedBarChart => ChartType::StackedBarChart,
            KeywordClass::LineChart => ChartType::LineChart,
            KeywordClass::Scatterplot => ChartType::Scatterplot,
            KeywordClass::ParallelCoordinates => ChartType::ParallelCoordinates,
            _ => return None,
        })
    }
}

/// Keyword file contents: token phrases per class.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KeywordFile {
    pub classes: BTreeMap<KeywordClass, Vec<String>>,
}

const SHIPPED_KEYWORDS: &str = include_str!("../../data/keywords.json");

impl KeywordFile {
    pub fn from_json(text: &str) -> Result<Self, LexiconError> {
        serde_json::from_str(text).map_err(|e| LexiconError::KeywordFile(e.to_string()))
    }

    /// The keyword inventory shipped with the engine.
    pub fn shipped() -> Self {
        Self::from_json(SHIPPED_KEYWORDS).expect("shipped keyword file parses")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("attributes {0:?} and {1:?} fold to the same name")]
    AttributeCollision(String, String),
    #[error("keyword {phrase:?} is listed under both {first:?} and {second:?}")]
    KeywordOverlap {
        phrase: String,
        first: KeywordClass,
        second: KeywordClass,
    },
    #[error("bad keyword file: {0}")]
    KeywordFile(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeEntry {
    pub name: String,
    pub kind: AttributeKind,
    /// Folded full name first, then single-word variants.
    pub variants: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueEntry {
    pub folded: String,
    /// Every (attribute, value) pair spelled this way.
    pub owners: Vec<(String, Value)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Entry {
    Attribute(usize),
    Value(usize),
    Keyword(KeywordClass),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    pub attributes: Vec<AttributeEntry>,
    pub values: Vec<ValueEntry>,
    pub keywords: BTreeMap<KeywordClass, Vec<String>>,
    pub(crate) phrases: BTreeMap<String, Vec<Entry>>,
    pub(crate) longest: usize,
}

/// Case-fold and strip punctuation. Thousands separators and decimal points
/// inside numbers survive; comparison symbols become their own tokens.
pub fn fold(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let digit = |i: Option<usize>| i.and_then(|i| chars.get(i)).is_some_and(|c| c.is_ascii_digit());
    for (i, &c) in chars.iter().enumerate() {
        let prev = i.checked_sub(1);
        let next = Some(i + 1);
        match c {
            c if c.is_alphanumeric() => out.extend(c.to_lowercase()),
            '.' if digit(prev) && digit(next) => out.push('.'),
            ',' if digit(prev) && digit(next) => {}
            '\'' | '\u{2019}' => {}
            '<' | '>' => {
                out.push(' ');
                out.push(c);
                if chars.get(i + 1) != Some(&'=') {
                    out.push(' ');
                }
            }
            '=' if prev.is_some_and(|p| matches!(chars[p], '<' | '>')) => out.push_str("= "),
            _ => out.push(' '),
        }
    }
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn tokens(text: &str) -> usize {
    text.split(' ').count()
}

pub fn build_lexicon(dataset: &Dataset, keywords: &KeywordFile) -> Result<Lexicon, LexiconError> {
    let mut attributes: Vec<AttributeEntry> = Vec::new();
    let mut full: BTreeMap<String, String> = BTreeMap::new();
    for a in dataset.attributes() {
        let folded = fold(&a.name);
        if let Some(prev) = full.insert(folded.clone(), a.name.clone()) {
            return Err(LexiconError::AttributeCollision(prev, a.name.clone()));
        }
        attributes.push(AttributeEntry {
            name: a.name.clone(),
            kind: a.kind,
            variants: vec![folded],
        });
    }

    // single words of multi-word names, kept only when they point to one attribute
    let mut word_owners: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, a) in attributes.iter().enumerate() {
        let words: Vec<&str> = a.variants[0].split(' ').collect();
        if words.len() < 2 {
            continue;
        }
        for w in words {
            let owners = word_owners.entry(w.to_string()).or_default();
            if !owners.contains(&i) {
                owners.push(i);
            }
        }
    }
    for (word, owners) in word_owners {
        if owners.len() == 1 && !full.contains_key(&word) {
            attributes[owners[0]].variants.push(word);
        }
    }

    let mut values: Vec<ValueEntry> = Vec::new();
    let mut value_index: BTreeMap<String, usize> = BTreeMap::new();
    for a in dataset.attributes() {
        if a.kind != AttributeKind::Categorical {
            continue;
        }
        for v in dataset.distinct_values(&a.name) {
            let Some(text) = v.as_text() else { continue };
            let folded = fold(text);
            if folded.is_empty() {
                continue;
            }
            let idx = *value_index.entry(folded.clone()).or_insert_with(|| {
                values.push(ValueEntry {
                    folded: folded.clone(),
                    owners: Vec::new(),
                });
                values.len() - 1
            });
            values[idx].owners.push((a.name.clone(), v.clone()));
        }
    }

    let mut folded_keywords: BTreeMap<KeywordClass, Vec<String>> = BTreeMap::new();
    let mut keyword_owner: BTreeMap<String, KeywordClass> = BTreeMap::new();
    for (&class, list) in &keywords.classes {
        for phrase in list {
            let f = fold(phrase);
            if f.is_empty() {
                continue;
            }
            if let Some(&first) = keyword_owner.get(&f) {
                if first != class {
                    return Err(LexiconError::KeywordOverlap {
                        phrase: f,
                        first,
                        second: class,
                    });
                }
                continue;
            }
            keyword_owner.insert(f.clone(), class);
            folded_keywords.entry(class).or_default().push(f);
        }
    }

    let mut phrases: BTreeMap<String, Vec<Entry>> = BTreeMap::new();
    for (i, a) in attributes.iter().enumerate() {
        for v in &a.variants {
            phrases.entry(v.clone()).or_default().push(Entry::Attribute(i));
        }
    }
    for (i, v) in values.iter().enumerate() {
        phrases.entry(v.folded.clone()).or_default().push(Entry::Value(i));
    }
    for (phrase, &class) in &keyword_owner {
        phrases.entry(phrase.clone()).or_default().push(Entry::Keyword(class));
    }
    for entries in phrases.values_mut() {
        entries.sort();
    }
    let longest = phrases.keys().map(|p| tokens(p)).max().unwrap_or(1);

    Ok(Lexicon {
        attributes,
        values,
        keywords: folded_keywords,
        phrases,
        longest,
    })
}

impl Lexicon {
    pub fn attribute(&self, name: &str) -> Option<&AttributeEntry> {
        self.attributes.iter().find(|a| a.name == name)
    }

    /// Ranked attribute candidates for free text such as handwriting.
    /// Exact variant matches score 1.0; anything else scores by normalized
    /// edit distance against the name and its variants. Scores under 0.6
    /// are dropped; ties keep dataset order.
    pub fn match_attribute(&self, text: &str) -> Vec<(String, f64)> {
        let folded = fold(text);
        if folded.is_empty() {
            return Vec::new();
        }
        let mut scored: Vec<(usize, f64)> = self
            .attributes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let score = if a.variants.contains(&folded) {
                    1.0
                } else {
                    a.variants
                        .iter()
                        .map(|v| strsim::normalized_levenshtein(&folded, v))
                        .fold(0.0, f64::max)
                };
                (i, score)
            })
            .filter(|(_, s)| *s >= MATCH_THRESHOLD)
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        scored
            .into_iter()
            .map(|(i, s)| (self.attributes[i].name.clone(), s))
            .collect()
    }
}

pub const MATCH_THRESHOLD: f64 = 0.6;

/// Free-function form of [`Lexicon::match_attribute`].
pub fn match_attribute(text: &str, lexicon: &Lexicon) -> Vec<(String, f64)> {
    lexicon.match_attribute(text)
}
