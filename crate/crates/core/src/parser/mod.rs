//! Restricted keyword parser for spoken and typed commands.
//!
//! The lexicon is built from the loaded dataset (attribute names, their
//! single-word variants, categorical values) plus a keyword file. Parsing
//! folds the transcript, tokenizes it by greedy longest match against the
//! lexicon and assembles a partial command. Fusion fills whatever the
//! utterance leaves out from the invoking instrument.

mod lexicon;

use serde::{Deserialize, Serialize};

use crate::chart::{Channel, ChartType, SortDirection};
use crate::dataset::Value;
use crate::filter::{Interval, Polarity};

pub use lexicon::{
    build_lexicon, fold, match_attribute, AttributeEntry, KeywordClass, KeywordFile, Lexicon,
    LexiconError, ValueEntry, MATCH_THRESHOLD,
};
use lexicon::Entry;

/// Similarity needed for a leftover word to count as a misheard attribute.
const FUZZY_TOKEN_THRESHOLD: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpClass {
    Bind,
    Unbind,
    Sort,
    Filter,
    ChangeChart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    #[serde(rename = "<")]
    LessThan,
    #[serde(rename = ">")]
    GreaterThan,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<=")]
    AtMost,
    Between,
}

impl Comparator {
    fn arity(self) -> usize {
        match self {
            Comparator::Between => 2,
            _ => 1,
        }
    }

    /// Interval for the comparator and its bounds.
    pub fn interval(self, bounds: &[f64]) -> Option<Interval> {
        Some(match self {
            Comparator::LessThan => Interval::below(*bounds.first()?),
            Comparator::GreaterThan => Interval::above(*bounds.first()?),
            Comparator::AtLeast => Interval::at_least(*bounds.first()?),
            Comparator::AtMost => Interval::at_most(*bounds.first()?),
            Comparator::Between => Interval::closed(*bounds.first()?, *bounds.get(1)?),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    These,
    Others,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeMatch {
    pub name: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedCommand {
    pub op: Option<OpClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<Channel>,
    /// "add": extend the channel instead of replacing it.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub append: bool,
    pub attributes: Vec<AttributeMatch>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<Value>,
    /// Owner of `values`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_attribute: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparator: Option<Comparator>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bounds: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarity: Option<Polarity>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub except: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Reference>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<SortDirection>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub by_count: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart_type: Option<ChartType>,
    pub residual: Vec<String>,
}

impl ParsedCommand {
    fn blank() -> Self {
        ParsedCommand {
            op: None,
            channel: None,
            append: false,
            attributes: Vec::new(),
            values: Vec::new(),
            value_attribute: None,
            comparator: None,
            bounds: Vec::new(),
            polarity: None,
            except: false,
            reference: None,
            direction: None,
            by_count: false,
            chart_type: None,
            residual: Vec::new(),
        }
    }

    pub fn attribute_names(&self) -> Vec<String> {
        self.attributes.iter().map(|a| a.name.clone()).collect()
    }

    /// Interval described by the comparator and bounds.
    pub fn interval(&self) -> Option<Interval> {
        self.comparator?.interval(&self.bounds)
    }
}

/// A slot the utterance left empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Missing {
    Attribute,
    Bound,
    ChartType,
    Target,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum ParseFailure {
    Empty,
    Unrecognized {
        residual: Vec<String>,
    },
    Incomplete {
        missing: Missing,
        partial: Box<ParsedCommand>,
    },
    /// Values that belong to more than one attribute.
    Ambiguous {
        values: Vec<String>,
        attributes: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Lexeme {
    Attribute(usize, f64),
    Value(usize),
    Keyword(KeywordClass),
    Number(f64),
    Word(String),
}

fn magnitude(word: &str) -> Option<f64> {
    match word {
        "m" | "million" | "millions" => Some(1e6),
        "k" | "thousand" | "thousands" => Some(1e3),
        _ => None,
    }
}

/// A bare number, or one with a glued magnitude suffix such as `100m`.
fn number(token: &str) -> Option<f64> {
    if let Ok(v) = token.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    let split = token.find(|c: char| !c.is_ascii_digit() && c != '.')?;
    let (digits, suffix) = token.split_at(split);
    let v: f64 = digits.parse().ok()?;
    Some(v * magnitude(suffix)?)
}

fn lex(tokens: &[&str], lexicon: &Lexicon) -> Vec<Lexeme> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let mut matched = None;
        for len in (1..=lexicon.longest.min(tokens.len() - i)).rev() {
            let key = tokens[i..i + len].join(" ");
            if let Some(entries) = lexicon.phrases.get(&key) {
                matched = Some((len, entries[0]));
                break;
            }
        }
        if let Some((len, entry)) = matched {
            out.push(match entry {
                Entry::Attribute(a) => Lexeme::Attribute(a, 1.0),
                Entry::Value(v) => Lexeme::Value(v),
                Entry::Keyword(k) => Lexeme::Keyword(k),
            });
            i += len;
            continue;
        }
        if let Some(mut v) = number(tokens[i]) {
            if let Some(m) = tokens.get(i + 1).and_then(|w| magnitude(w)) {
                v *= m;
                i += 1;
            }
            out.push(Lexeme::Number(v));
            i += 1;
            continue;
        }
        out.push(Lexeme::Word(tokens[i].to_string()));
        i += 1;
    }
    // misheard attribute words: a leftover that is close to exactly one variant
    for lx in &mut out {
        let Lexeme::Word(w) = lx else { continue };
        if w.chars().count() < 4 {
            continue;
        }
        let best = lexicon
            .attributes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let s = a
                    .variants
                    .iter()
                    .map(|v| strsim::normalized_levenshtein(w, v))
                    .fold(0.0, f64::max);
                (i, s)
            })
            .filter(|(_, s)| *s >= FUZZY_TOKEN_THRESHOLD)
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
        if let Some((i, s)) = best {
            *lx = Lexeme::Attribute(i, s);
        }
    }
    out
}

/// Parse one transcript against the lexicon.
pub fn parse(transcript: &str, lexicon: &Lexicon) -> Result<ParsedCommand, ParseFailure> {
    let folded = fold(transcript);
    if folded.is_empty() {
        return Err(ParseFailure::Empty);
    }
    let tokens: Vec<&str> = folded.split(' ').collect();
    let lexemes = lex(&tokens, lexicon);

    let mut cmd = ParsedCommand::blank();
    let mut classes: Vec<KeywordClass> = Vec::new();
    let mut value_ids: Vec<usize> = Vec::new();
    let mut numbers_after_comparator = false;
    for lx in &lexemes {
        match lx {
            Lexeme::Attribute(i, score) => {
                let name = &lexicon.attributes[*i].name;
                if !cmd.attributes.iter().any(|a| &a.name == name) {
                    cmd.attributes.push(AttributeMatch {
                        name: name.clone(),
                        score: *score,
                    });
                }
            }
            Lexeme::Value(v) => {
                if !value_ids.contains(v) {
                    value_ids.push(*v);
                }
            }
            Lexeme::Keyword(k) => {
                classes.push(*k);
                let comparator = match k {
                    KeywordClass::LessThan => Some(Comparator::LessThan),
                    KeywordClass::GreaterThan => Some(Comparator::GreaterThan),
                    KeywordClass::AtLeast => Some(Comparator::AtLeast),
                    KeywordClass::AtMost => Some(Comparator::AtMost),
                    KeywordClass::Between => Some(Comparator::Between),
                    _ => None,
                };
                if let Some(c) = comparator {
                    if cmd.comparator.is_none() {
                        cmd.comparator = Some(c);
                        numbers_after_comparator = true;
                    }
                }
            }
            Lexeme::Number(n) => {
                let room = cmd.comparator.map_or(0, Comparator::arity);
                if numbers_after_comparator && cmd.bounds.len() < room {
                    cmd.bounds.push(*n);
                } else {
                    cmd.residual.push(crate::dataset::format_number(*n));
                }
            }
            Lexeme::Word(w) => cmd.residual.push(w.clone()),
        }
    }
    let has = |k: KeywordClass| classes.contains(&k);

    cmd.direction = if has(KeywordClass::Descending) {
        Some(SortDirection::Descending)
    } else if has(KeywordClass::Ascending) {
        Some(SortDirection::Ascending)
    } else {
        None
    };
    cmd.by_count = has(KeywordClass::Count);
    cmd.reference = if has(KeywordClass::Others) {
        Some(Reference::Others)
    } else if has(KeywordClass::These) {
        Some(Reference::These)
    } else {
        None
    };
    cmd.except = has(KeywordClass::Except);
    cmd.chart_type = classes.iter().find_map(|k| k.chart_type());
    cmd.channel = if has(KeywordClass::ColorBy) || has(KeywordClass::ChannelColor) {
        Some(Channel::Color)
    } else if has(KeywordClass::ChannelX) {
        Some(Channel::X)
    } else if has(KeywordClass::ChannelY) {
        Some(Channel::Y)
    } else {
        None
    };
    cmd.append = has(KeywordClass::Add);
    cmd.polarity = if has(KeywordClass::FilterRemove) {
        Some(Polarity::Remove)
    } else if has(KeywordClass::FilterKeep) {
        Some(Polarity::Keep)
    } else {
        None
    };

    if !value_ids.is_empty() {
        resolve_values(&mut cmd, &value_ids, lexicon)?;
    }

    let filtering = cmd.polarity.is_some() || cmd.except || cmd.comparator.is_some();
    cmd.op = if cmd.chart_type.is_some() || has(KeywordClass::ChartChange) {
        Some(OpClass::ChangeChart)
    } else if has(KeywordClass::Sort) {
        Some(OpClass::Sort)
    } else if filtering {
        let bare_remove = cmd.polarity == Some(Polarity::Remove)
            && cmd.comparator.is_none()
            && cmd.values.is_empty()
            && cmd.reference.is_none()
            && !cmd.except
            && !cmd.attributes.is_empty();
        if bare_remove {
            Some(OpClass::Unbind)
        } else {
            if cmd.polarity.is_none() {
                cmd.polarity = Some(Polarity::Keep);
            }
            Some(OpClass::Filter)
        }
    } else if has(KeywordClass::Unbind) {
        Some(OpClass::Unbind)
    } else if has(KeywordClass::ColorBy)
        || has(KeywordClass::Bind)
        || cmd.append
        || !cmd.attributes.is_empty()
    {
        Some(OpClass::Bind)
    } else {
        None
    };

    let incomplete = |missing, cmd: ParsedCommand| {
        Err(ParseFailure::Incomplete {
            missing,
            partial: Box::new(cmd),
        })
    };
    match cmd.op {
        None if cmd.reference.is_some() => Ok(cmd),
        None => Err(ParseFailure::Unrecognized {
            residual: cmd.residual,
        }),
        Some(OpClass::ChangeChart) if cmd.chart_type.is_none() => {
            incomplete(Missing::ChartType, cmd)
        }
        Some(OpClass::Sort) if cmd.attributes.is_empty() && !cmd.by_count => {
            incomplete(Missing::Attribute, cmd)
        }
        Some(OpClass::Bind | OpClass::Unbind) if cmd.attributes.is_empty() => {
            incomplete(Missing::Attribute, cmd)
        }
        Some(OpClass::Filter) => {
            if let Some(c) = cmd.comparator {
                if cmd.bounds.len() < c.arity() {
                    return incomplete(Missing::Bound, cmd);
                }
                if cmd.attributes.is_empty() {
                    return incomplete(Missing::Attribute, cmd);
                }
                Ok(cmd)
            } else if cmd.values.is_empty() && cmd.reference.is_none() {
                incomplete(Missing::Target, cmd)
            } else {
                Ok(cmd)
            }
        }
        _ => Ok(cmd),
    }
}

/// Attach matched values to one owning attribute, preferring an attribute
/// the utterance names; several candidate owners are an ambiguity.
fn resolve_values(cmd: &mut ParsedCommand, ids: &[usize], lexicon: &Lexicon) -> Result<(), ParseFailure> {
    let entries: Vec<&ValueEntry> = ids.iter().map(|&i| &lexicon.values[i]).collect();
    let mut common: Vec<String> = entries[0].owners.iter().map(|(a, _)| a.clone()).collect();
    for e in &entries[1..] {
        common.retain(|a| e.owners.iter().any(|(b, _)| b == a));
    }
    let named: Vec<String> = common
        .iter()
        .filter(|a| cmd.attributes.iter().any(|m| &m.name == *a))
        .cloned()
        .collect();
    let owner = match (common.len(), named.len()) {
        (1, _) => common[0].clone(),
        (_, 1) => named[0].clone(),
        _ => {
            let mut attributes: Vec<String> = entries
                .iter()
                .flat_map(|e| e.owners.iter().map(|(a, _)| a.clone()))
                .collect();
            attributes.sort();
            attributes.dedup();
            return Err(ParseFailure::Ambiguous {
                values: entries.iter().map(|e| e.folded.clone()).collect(),
                attributes,
            });
        }
    };
    cmd.values = entries
        .iter()
        .filter_map(|e| e.owners.iter().find(|(a, _)| *a == owner).map(|(_, v)| v.clone()))
        .collect();
    // the owner is the filter target, not a binding
    cmd.attributes.retain(|a| a.name != owner);
    cmd.value_attribute = Some(owner);
    Ok(())
}
