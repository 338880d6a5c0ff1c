use serde::{Deserialize, Serialize};

use crate::chart::{ChartSpec, ViewModel, Viewport};
use crate::dataset::RowId;
use crate::executor::{Affordances, DetailPayload};
use crate::feedback::FeedbackMessage;
use crate::fusion::Suggestion;
use crate::gesture::PointerEvent;

/// Messages from the tablet UI, one JSON object per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMessage {
    Pointer {
        event: PointerEvent,
    },
    /// Final speech recognizer result.
    Transcript {
        text: String,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        alternatives: Vec<String>,
    },
    /// Handwriting recognizer candidates, best first.
    WriteCandidates {
        texts: Vec<String>,
    },
    LoadDataset {
        name: String,
    },
    StateRequest,
    /// Clock update with no pointer activity; lets holds fire.
    Tick {
        t: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterChip {
    pub index: usize,
    pub label: String,
}

/// Complete UI-facing state after a revision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub revision: u64,
    pub dataset: String,
    pub dataset_hash: String,
    pub spec: ChartSpec,
    pub view: ViewModel,
    pub selection: Vec<RowId>,
    pub viewport: Viewport,
    pub filters: Vec<FilterChip>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Hello {
        session: u64,
        protocol: u32,
        dataset: String,
    },
    Snapshot(Box<Snapshot>),
    Feedback(FeedbackMessage),
    Affordances(Affordances),
    Detail(Box<DetailPayload>),
    Suggestions {
        suggestions: Vec<Suggestion>,
    },
    /// Malformed or unserviceable client message.
    Error {
        message: String,
    },
    /// The message was consumed without visible effect.
    Ack,
}

pub const PROTOCOL_VERSION: u32 = 1;
