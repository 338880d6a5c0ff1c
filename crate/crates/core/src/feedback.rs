//! Textual feedback shown after every interaction.

use serde::{Deserialize, Serialize};

use crate::chart::InvalidReason;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeedbackKind {
    Success,
    Void,
    Error,
}

/// Machine-readable outcome; traces are classified by these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackCode {
    Bound,
    Unbound,
    Sorted,
    Filtered,
    FilterCleared,
    ChartChanged,
    Selected,
    SelectionCleared,
    Zoomed,
    Panned,
    Details,

    NoChange,
    AlreadySorted,
    NotSortable,
    AmbiguousSortTarget,
    NoMatchingPoints,
    EmptySelection,
    NoMarks,
    NoSuggestions,
    NoInkTarget,
    EmptyTranscript,
    TranscriptWhileIdle,

    InvalidOperation,
    EmptyView,
    IncompleteCommand,
    UnrecognizedCommand,
    AmbiguousCommand,
    UnsupportedInteraction,
    PenInPanel,
    DropOutsideTarget,
}

pub const UNPROCESSABLE: &str = "Unable to process that command. Please try a different one";
pub const PEN_IN_PANEL: &str = "The pen cannot be used in the panel area. Please use touch.";
pub const NO_MATCHING_POINTS: &str = "No points meet that filtering criteria";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackMessage {
    pub kind: FeedbackKind,
    pub code: FeedbackCode,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<InvalidReason>,
}

impl FeedbackMessage {
    pub fn success(code: FeedbackCode, text: impl Into<String>) -> Self {
        Self::new(FeedbackKind::Success, code, text)
    }

    pub fn void(code: FeedbackCode, text: impl Into<String>) -> Self {
        Self::new(FeedbackKind::Void, code, text)
    }

    pub fn error(code: FeedbackCode, text: impl Into<String>) -> Self {
        Self::new(FeedbackKind::Error, code, text)
    }

    pub fn invalid(reason: InvalidReason) -> Self {
        FeedbackMessage {
            reason: Some(reason),
            ..Self::error(FeedbackCode::InvalidOperation, reason.message())
        }
    }

    fn new(kind: FeedbackKind, code: FeedbackCode, text: impl Into<String>) -> Self {
        FeedbackMessage {
            kind,
            code,
            text: text.into(),
            reason: None,
        }
    }
}
