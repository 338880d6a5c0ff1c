//! Pointer streams to discrete gestures.
//!
//! The UI hit-tests every pointer sample into an [`InstrumentZone`] and
//! forwards it here. Each contact is classified exactly once: tap, hold,
//! swipe, drag, lasso, erase stroke, pill drop, pinch, or nothing at all.
//! Time only moves forward through [`GestureRecognizer::ingest`] and
//! [`GestureRecognizer::advance`], so replaying the same events gives the
//! same gestures.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::Value;
use crate::geometry::{Point2, Polygon};

pub type ContactId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Device {
    Touch,
    Pen,
    PenEraser,
}

impl Device {
    pub fn is_pen(self) -> bool {
        matches!(self, Device::Pen | Device::PenEraser)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Down,
    Move,
    Up,
}

/// Interface element under a pointer, as resolved by the UI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "zone", rename_all = "snake_case")]
pub enum InstrumentZone {
    AttributePill {
        name: String,
    },
    /// Title zones carry the attribute label under the pointer, if any.
    XAxisTitle {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        attribute: Option<String>,
    },
    YAxisTitle {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        attribute: Option<String>,
    },
    XAxisScale,
    YAxisScale {
        #[serde(default)]
        axis: usize,
    },
    LegendTitle {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        attribute: Option<String>,
    },
    LegendItem {
        value: Value,
    },
    Mark {
        id: String,
    },
    Canvas,
    ModifierButton,
    Panel,
    FilterChip {
        index: usize,
    },
    InkSuggestion {
        name: String,
    },
}

/// Zone without its payload; the unit the pattern table keys on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZoneClass {
    AttributePill,
    XAxisTitle,
    YAxisTitle,
    XAxisScale,
    YAxisScale,
    LegendTitle,
    LegendItem,
    Mark,
    Canvas,
    ModifierButton,
    Panel,
    FilterChip,
    InkSuggestion,
}

impl InstrumentZone {
    pub fn class(&self) -> ZoneClass {
        match self {
            InstrumentZone::AttributePill { .. } => ZoneClass::AttributePill,
            InstrumentZone::XAxisTitle { .. } => ZoneClass::XAxisTitle,
            InstrumentZone::YAxisTitle { .. } => ZoneClass::YAxisTitle,
            InstrumentZone::XAxisScale => ZoneClass::XAxisScale,
            InstrumentZone::YAxisScale { .. } => ZoneClass::YAxisScale,
            InstrumentZone::LegendTitle { .. } => ZoneClass::LegendTitle,
            InstrumentZone::LegendItem { .. } => ZoneClass::LegendItem,
            InstrumentZone::Mark { .. } => ZoneClass::Mark,
            InstrumentZone::Canvas => ZoneClass::Canvas,
            InstrumentZone::ModifierButton => ZoneClass::ModifierButton,
            InstrumentZone::Panel => ZoneClass::Panel,
            InstrumentZone::FilterChip { .. } => ZoneClass::FilterChip,
            InstrumentZone::InkSuggestion { .. } => ZoneClass::InkSuggestion,
        }
    }

    pub fn x_title() -> Self {
        InstrumentZone::XAxisTitle { attribute: None }
    }

    pub fn y_title() -> Self {
        InstrumentZone::YAxisTitle { attribute: None }
    }

    pub fn legend_title() -> Self {
        InstrumentZone::LegendTitle { attribute: None }
    }
}

impl ZoneClass {
    /// Zones a finger can hold to set context.
    pub fn holdable(self) -> bool {
        matches!(
            self,
            ZoneClass::XAxisTitle
                | ZoneClass::YAxisTitle
                | ZoneClass::LegendTitle
                | ZoneClass::ModifierButton
                | ZoneClass::Mark
                | ZoneClass::LegendItem
        )
    }

    pub fn is_axis_scale(self) -> bool {
        matches!(self, ZoneClass::XAxisScale | ZoneClass::YAxisScale)
    }

    pub fn is_title(self) -> bool {
        matches!(
            self,
            ZoneClass::XAxisTitle | ZoneClass::YAxisTitle | ZoneClass::LegendTitle
        )
    }

    /// Chart area: marks and the empty canvas behave alike for drags.
    pub fn is_canvas(self) -> bool {
        matches!(self, ZoneClass::Canvas | ZoneClass::Mark)
    }

    /// Side panel elements; pens are rejected here.
    pub fn is_panel(self) -> bool {
        matches!(self, ZoneClass::Panel | ZoneClass::AttributePill)
    }
}

/// Pointer location in view pixels, plus the data-space coordinate when the
/// pointer is over a scale or the canvas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub px: f64,
    pub py: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_y: Option<f64>,
}

impl Position {
    pub fn screen(px: f64, py: f64) -> Self {
        Position {
            px,
            py,
            data_x: None,
            data_y: None,
        }
    }

    pub fn with_data(px: f64, py: f64, data_x: Option<f64>, data_y: Option<f64>) -> Self {
        Position {
            px,
            py,
            data_x,
            data_y,
        }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.px - other.px).hypot(self.py - other.py)
    }

    pub fn data_point(&self) -> Option<Point2<f64>> {
        Some(Point2::new(self.data_x?, self.data_y?))
    }

    fn midpoint(&self, other: &Position) -> Position {
        let avg = |a: Option<f64>, b: Option<f64>| Some((a? + b?) / 2.0);
        Position {
            px: (self.px + other.px) / 2.0,
            py: (self.py + other.py) / 2.0,
            data_x: avg(self.data_x, other.data_x),
            data_y: avg(self.data_y, other.data_y),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointerEvent {
    pub contact: ContactId,
    pub device: Device,
    pub phase: Phase,
    pub pos: Position,
    #[serde(flatten)]
    pub zone: InstrumentZone,
    /// Milliseconds, non-decreasing within a session.
    pub t: u64,
}

/// Swipe direction in screen space; screen y grows downward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

/// A drag in progress: where it began, the previous sample and the current one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DragInfo {
    #[serde(flatten)]
    pub zone: InstrumentZone,
    pub device: Device,
    pub origin: Position,
    pub previous: Position,
    pub current: Position,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gesture", rename_all = "snake_case")]
pub enum GestureEvent {
    Tap {
        #[serde(flatten)]
        zone: InstrumentZone,
        device: Device,
    },
    PointStart {
        #[serde(flatten)]
        zone: InstrumentZone,
        device: Device,
    },
    PointEnd {
        #[serde(flatten)]
        zone: InstrumentZone,
        device: Device,
    },
    Swipe {
        #[serde(flatten)]
        zone: InstrumentZone,
        direction: Direction,
    },
    DragStart(DragInfo),
    DragMove(DragInfo),
    DragEnd(DragInfo),
    /// `scale` is relative to the previous pinch sample.
    Pinch { scale: f64, center: Position },
    /// Data-space polygon; always drawn with the pen.
    Lasso { polygon: Polygon<f64> },
    /// Distinct zones crossed, in first-touch order.
    EraseStroke { zones: Vec<InstrumentZone> },
    PillDrop { pill: String, target: InstrumentZone },
    WriteCandidates { texts: Vec<String> },
    /// A pen touched the side panel.
    PenInPanel {
        #[serde(flatten)]
        zone: InstrumentZone,
    },
}

impl GestureEvent {
    pub fn name(&self) -> &'static str {
        match self {
            GestureEvent::Tap { .. } => "tap",
            GestureEvent::PointStart { .. } => "point_start",
            GestureEvent::PointEnd { .. } => "point_end",
            GestureEvent::Swipe { .. } => "swipe",
            GestureEvent::DragStart(_) => "drag_start",
            GestureEvent::DragMove(_) => "drag_move",
            GestureEvent::DragEnd(_) => "drag_end",
            GestureEvent::Pinch { .. } => "pinch",
            GestureEvent::Lasso { .. } => "lasso",
            GestureEvent::EraseStroke { .. } => "erase_stroke",
            GestureEvent::PillDrop { .. } => "pill_drop",
            GestureEvent::WriteCandidates { .. } => "write_candidates",
            GestureEvent::PenInPanel { .. } => "pen_in_panel",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GestureConfig {
    pub tap_max_ms: u64,
    pub tap_slop_px: f64,
    pub hold_min_ms: u64,
    pub hold_slop_px: f64,
    pub swipe_min_px: f64,
    pub swipe_max_ms: u64,
}

impl Default for GestureConfig {
    fn default() -> Self {
        GestureConfig {
            tap_max_ms: 300,
            tap_slop_px: 10.0,
            hold_min_ms: 500,
            hold_slop_px: 10.0,
            swipe_min_px: 48.0,
            swipe_max_ms: 250,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum State {
    /// Still within slop, nothing emitted yet.
    Pending,
    Held,
    /// Touch moved on an axis scale inside the swipe window.
    SwipeCandidate,
    Dragging,
    Lassoing,
    Erasing(Vec<InstrumentZone>),
    PillDrag,
    Pinching(ContactId),
    /// Survivor of a pinch; drags from where it is once it moves.
    PinchRemnant { started: bool },
    /// Consumed without a gesture (pen in panel, extra fingers).
    Swallowed,
}

#[derive(Debug, Clone)]
struct Contact {
    device: Device,
    zone: InstrumentZone,
    origin: Position,
    down_t: u64,
    last: Position,
    max_disp: f64,
    path: Vec<Position>,
    state: State,
}

impl Contact {
    fn drag(&self, previous: Position) -> DragInfo {
        let zone = if self.zone.class().is_canvas() {
            InstrumentZone::Canvas
        } else {
            self.zone.clone()
        };
        DragInfo {
            zone,
            device: self.device,
            origin: self.origin,
            previous,
            current: self.last,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct GestureRecognizer {
    config: GestureConfig,
    contacts: BTreeMap<ContactId, Contact>,
    now: u64,
}

impl GestureRecognizer {
    pub fn new(config: GestureConfig) -> Self {
        GestureRecognizer {
            config,
            contacts: BTreeMap::new(),
            now: 0,
        }
    }

    pub fn config(&self) -> &GestureConfig {
        &self.config
    }

    pub fn active_contacts(&self) -> usize {
        self.contacts.len()
    }

    /// Move the clock forward, firing holds and promoting stale swipe
    /// candidates to drags.
    pub fn advance(&mut self, now: u64) -> Vec<GestureEvent> {
        self.now = self.now.max(now);
        let now = self.now;
        let cfg = self.config;
        let mut out = Vec::new();
        for c in self.contacts.values_mut() {
            let elapsed = now.saturating_sub(c.down_t);
            match c.state {
                State::Pending
                    if c.device == Device::Touch
                        && c.zone.class().holdable()
                        && elapsed >= cfg.hold_min_ms
                        && c.max_disp <= cfg.hold_slop_px =>
                {
                    c.state = State::Held;
                    out.push(GestureEvent::PointStart {
                        zone: c.zone.clone(),
                        device: c.device,
                    });
                }
                State::SwipeCandidate if elapsed > cfg.swipe_max_ms => {
                    c.state = State::Dragging;
                    out.push(GestureEvent::DragStart(c.drag(c.origin)));
                }
                _ => {}
            }
        }
        out
    }

    pub fn ingest(&mut self, event: &PointerEvent) -> Vec<GestureEvent> {
        let mut out = self.advance(event.t);
        match event.phase {
            Phase::Down => self.down(event, &mut out),
            Phase::Move => self.movement(event, &mut out),
            Phase::Up => {
                self.movement(event, &mut out);
                self.up(event, &mut out);
            }
        }
        out
    }

    /// Forget a contact without emitting anything for it.
    pub fn reset(&mut self, contact: ContactId) {
        if let Some(c) = self.contacts.remove(&contact) {
            self.release_partner(&c);
        }
    }

    fn release_partner(&mut self, c: &Contact) {
        if let State::Pinching(partner) = c.state {
            if let Some(p) = self.contacts.get_mut(&partner) {
                p.state = State::PinchRemnant { started: false };
                p.origin = p.last;
            }
        }
    }

    fn down(&mut self, e: &PointerEvent, out: &mut Vec<GestureEvent>) {
        self.reset(e.contact);
        let class = e.zone.class();
        let mut state = State::Pending;
        if e.device.is_pen() && class.is_panel() {
            out.push(GestureEvent::PenInPanel {
                zone: e.zone.clone(),
            });
            state = State::Swallowed;
        } else if e.device == Device::PenEraser {
            state = State::Erasing(vec![e.zone.clone()]);
        } else if e.device == Device::Touch && class.is_canvas() {
            let partner = self.contacts.iter_mut().find(|(_, c)| {
                c.device == Device::Touch
                    && c.zone.class().is_canvas()
                    && matches!(c.state, State::Pending | State::Dragging)
            });
            if let Some((&pid, p)) = partner {
                if p.state == State::Dragging {
                    out.push(GestureEvent::DragEnd(p.drag(p.last)));
                }
                p.state = State::Pinching(e.contact);
                state = State::Pinching(pid);
            } else if self.contacts.values().any(|c| {
                c.device == Device::Touch && matches!(c.state, State::Pinching(_))
            }) {
                state = State::Swallowed;
            }
        }
        self.contacts.insert(
            e.contact,
            Contact {
                device: e.device,
                zone: e.zone.clone(),
                origin: e.pos,
                down_t: e.t,
                last: e.pos,
                max_disp: 0.0,
                path: vec![e.pos],
                state,
            },
        );
    }

    fn movement(&mut self, e: &PointerEvent, out: &mut Vec<GestureEvent>) {
        let cfg = self.config;
        let partner_pos = match self.contacts.get(&e.contact).map(|c| &c.state) {
            Some(State::Pinching(p)) => self.contacts.get(p).map(|p| p.last),
            _ => None,
        };
        let Some(c) = self.contacts.get_mut(&e.contact) else {
            return;
        };
        let previous = c.last;
        if previous == e.pos {
            return;
        }
        c.last = e.pos;
        c.max_disp = c.max_disp.max(c.origin.distance(&e.pos));
        c.path.push(e.pos);
        let class = c.zone.class();
        match &mut c.state {
            State::Swallowed | State::Held | State::Lassoing | State::PillDrag | State::SwipeCandidate => {}
            State::Erasing(zones) => {
                if !zones.contains(&e.zone) {
                    zones.push(e.zone.clone());
                }
            }
            State::Pinching(_) => {
                if let Some(p) = partner_pos {
                    let before = previous.distance(&p);
                    let after = e.pos.distance(&p);
                    if before > 0.0 && after != before {
                        out.push(GestureEvent::Pinch {
                            scale: after / before,
                            center: e.pos.midpoint(&p),
                        });
                    }
                }
            }
            State::PinchRemnant { started } => {
                if *started {
                    out.push(GestureEvent::DragMove(c.drag(previous)));
                } else {
                    c.state = State::PinchRemnant { started: true };
                    out.push(GestureEvent::DragStart(c.drag(previous)));
                }
            }
            State::Pending => {
                if c.max_disp > cfg.tap_slop_px {
                    c.state = if c.device == Device::Pen && class.is_canvas() {
                        State::Lassoing
                    } else if c.device == Device::Touch && class.is_axis_scale() {
                        if e.t.saturating_sub(c.down_t) <= cfg.swipe_max_ms {
                            State::SwipeCandidate
                        } else {
                            out.push(GestureEvent::DragStart(c.drag(c.origin)));
                            State::Dragging
                        }
                    } else if class == ZoneClass::AttributePill {
                        State::PillDrag
                    } else {
                        out.push(GestureEvent::DragStart(c.drag(c.origin)));
                        State::Dragging
                    };
                }
            }
            State::Dragging => out.push(GestureEvent::DragMove(c.drag(previous))),
        }
    }

    fn up(&mut self, e: &PointerEvent, out: &mut Vec<GestureEvent>) {
        let cfg = self.config;
        let Some(c) = self.contacts.remove(&e.contact) else {
            return;
        };
        let elapsed = e.t.saturating_sub(c.down_t);
        match &c.state {
            State::Pending => {
                if elapsed <= cfg.tap_max_ms && c.max_disp <= cfg.tap_slop_px {
                    out.push(GestureEvent::Tap {
                        zone: c.zone.clone(),
                        device: c.device,
                    });
                }
            }
            State::Held => out.push(GestureEvent::PointEnd {
                zone: c.zone.clone(),
                device: c.device,
            }),
            State::SwipeCandidate => {
                let dx = c.last.px - c.origin.px;
                let dy = c.last.py - c.origin.py;
                if elapsed <= cfg.swipe_max_ms && dx.hypot(dy) >= cfg.swipe_min_px {
                    let direction = if dx.abs() > dy.abs() {
                        if dx > 0.0 {
                            Direction::Right
                        } else {
                            Direction::Left
                        }
                    } else if dy > 0.0 {
                        Direction::Down
                    } else {
                        Direction::Up
                    };
                    out.push(GestureEvent::Swipe {
                        zone: c.zone.clone(),
                        direction,
                    });
                } else {
                    out.push(GestureEvent::DragStart(c.drag(c.origin)));
                    out.push(GestureEvent::DragEnd(c.drag(c.last)));
                }
            }
            State::Dragging | State::PinchRemnant { started: true } => {
                out.push(GestureEvent::DragEnd(c.drag(c.last)));
            }
            State::Lassoing => {
                let vertices = c.path.iter().filter_map(Position::data_point).collect();
                out.push(GestureEvent::Lasso {
                    polygon: Polygon::new(vertices),
                });
            }
            State::Erasing(zones) => out.push(GestureEvent::EraseStroke {
                zones: zones.clone(),
            }),
            State::PillDrag => {
                if let InstrumentZone::AttributePill { name } = &c.zone {
                    out.push(GestureEvent::PillDrop {
                        pill: name.clone(),
                        target: e.zone.clone(),
                    });
                }
            }
            State::Pinching(_) => self.release_partner(&c),
            State::PinchRemnant { started: false } | State::Swallowed => {}
        }
    }
}
