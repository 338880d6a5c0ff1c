//! Builder for synthetic client input: turns high-level interactions into
//! timed pointer streams, as the tablet UI would send them.

use crate::gesture::{ContactId, Device, GestureConfig, InstrumentZone, Phase, PointerEvent, Position};

use super::ClientMessage;

/// Screen and optional data coordinates of one pointer sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct At {
    pub px: f64,
    pub py: f64,
    pub data_x: Option<f64>,
    pub data_y: Option<f64>,
}

impl At {
    pub fn screen(px: f64, py: f64) -> Self {
        At {
            px,
            py,
            data_x: None,
            data_y: None,
        }
    }

    pub fn data(px: f64, py: f64, data_x: Option<f64>, data_y: Option<f64>) -> Self {
        At { px, py, data_x, data_y }
    }

    fn pos(self) -> Position {
        Position::with_data(self.px, self.py, self.data_x, self.data_y)
    }
}

#[derive(Debug, Clone)]
pub struct Script {
    config: GestureConfig,
    t: u64,
    next_contact: ContactId,
    messages: Vec<ClientMessage>,
}

impl Script {
    pub fn new(config: GestureConfig) -> Self {
        Script {
            config,
            t: 1000,
            next_contact: 1,
            messages: Vec::new(),
        }
    }

    pub fn now(&self) -> u64 {
        self.t
    }

    pub fn messages(&self) -> &[ClientMessage] {
        &self.messages
    }

    /// Take the messages built so far.
    pub fn drain(&mut self) -> Vec<ClientMessage> {
        std::mem::take(&mut self.messages)
    }

    pub fn into_messages(self) -> Vec<ClientMessage> {
        self.messages
    }

    pub fn wait(&mut self, ms: u64) -> &mut Self {
        self.t += ms;
        self
    }

    pub fn push(&mut self, msg: ClientMessage) -> &mut Self {
        self.messages.push(msg);
        self
    }

    fn contact(&mut self) -> ContactId {
        let c = self.next_contact;
        self.next_contact += 1;
        c
    }

    fn pointer(&mut self, contact: ContactId, device: Device, phase: Phase, at: At, zone: &InstrumentZone) {
        self.messages.push(ClientMessage::Pointer {
            event: PointerEvent {
                contact,
                device,
                phase,
                pos: at.pos(),
                zone: zone.clone(),
                t: self.t,
            },
        });
    }

    pub fn tap(&mut self, zone: InstrumentZone, device: Device) -> &mut Self {
        let c = self.contact();
        let at = At::screen(10.0, 10.0);
        self.pointer(c, device, Phase::Down, at, &zone);
        self.t += 60;
        self.pointer(c, device, Phase::Up, at, &zone);
        self.t += 100;
        self
    }

    /// Press and keep holding a zone until [`Script::release`].
    pub fn hold(&mut self, zone: InstrumentZone) -> ContactId {
        let c = self.contact();
        self.pointer(c, Device::Touch, Phase::Down, At::screen(5.0, 5.0), &zone);
        self.t += self.config.hold_min_ms + 20;
        self.messages.push(ClientMessage::Tick { t: self.t });
        self.t += 20;
        c
    }

    pub fn release(&mut self, contact: ContactId, zone: InstrumentZone) -> &mut Self {
        self.pointer(contact, Device::Touch, Phase::Up, At::screen(5.0, 5.0), &zone);
        self.t += 100;
        self
    }

    pub fn say(&mut self, text: &str) -> &mut Self {
        self.messages.push(ClientMessage::Transcript {
            text: text.into(),
            alternatives: Vec::new(),
        });
        self.t += 50;
        self
    }

    pub fn say_with_alternatives(&mut self, text: &str, alternatives: &[&str]) -> &mut Self {
        self.messages.push(ClientMessage::Transcript {
            text: text.into(),
            alternatives: alternatives.iter().map(|s| s.to_string()).collect(),
        });
        self.t += 50;
        self
    }

    /// Hold a zone, speak, let go.
    pub fn speak_holding(&mut self, zone: InstrumentZone, text: &str) -> &mut Self {
        let c = self.hold(zone.clone());
        self.say(text);
        self.release(c, zone)
    }

    /// Hold a zone while tapping another.
    pub fn tap_holding(&mut self, held: InstrumentZone, zone: InstrumentZone, device: Device) -> &mut Self {
        let c = self.hold(held.clone());
        self.tap(zone, device);
        self.release(c, held)
    }

    pub fn write(&mut self, texts: &[&str]) -> &mut Self {
        self.messages.push(ClientMessage::WriteCandidates {
            texts: texts.iter().map(|s| s.to_string()).collect(),
        });
        self.t += 50;
        self
    }

    /// Drag a side-panel pill and drop it on `target`.
    pub fn drop_pill(&mut self, name: &str, target: InstrumentZone) -> &mut Self {
        let c = self.contact();
        let pill = InstrumentZone::AttributePill { name: name.into() };
        self.pointer(c, Device::Touch, Phase::Down, At::screen(0.0, 0.0), &pill);
        self.t += 40;
        self.pointer(c, Device::Touch, Phase::Move, At::screen(40.0, 0.0), &pill);
        self.t += 200;
        self.pointer(c, Device::Touch, Phase::Up, At::screen(300.0, 200.0), &target);
        self.t += 100;
        self
    }

    /// Quick finger flick across an axis scale.
    pub fn swipe(&mut self, zone: InstrumentZone, dx: f64, dy: f64) -> &mut Self {
        let c = self.contact();
        let start = At::screen(100.0, 100.0);
        self.pointer(c, Device::Touch, Phase::Down, start, &zone);
        self.t += 40;
        self.pointer(c, Device::Touch, Phase::Move, At::screen(100.0 + dx / 2.0, 100.0 + dy / 2.0), &zone);
        self.t += 40;
        self.pointer(c, Device::Touch, Phase::Up, At::screen(100.0 + dx, 100.0 + dy), &zone);
        self.t += 100;
        self
    }

    /// Slow drag through `path`; the first sample is the press point.
    pub fn drag(&mut self, zone: InstrumentZone, device: Device, path: &[At]) -> &mut Self {
        let Some((first, rest)) = path.split_first() else {
            return self;
        };
        let c = self.contact();
        self.pointer(c, device, Phase::Down, *first, &zone);
        self.t += self.config.swipe_max_ms + 50;
        for at in rest {
            self.pointer(c, device, Phase::Move, *at, &zone);
            self.t += 30;
        }
        let last = *path.last().expect("non-empty path");
        self.pointer(c, device, Phase::Up, last, &zone);
        self.t += 100;
        self
    }

    /// Pen lasso through data-space vertices.
    pub fn lasso(&mut self, vertices: &[(f64, f64)]) -> &mut Self {
        let path: Vec<At> = vertices
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| At::data(20.0 * i as f64, 20.0 * (i % 2) as f64, Some(x), Some(y)))
            .collect();
        let Some((first, rest)) = path.split_first() else {
            return self;
        };
        let c = self.contact();
        let zone = InstrumentZone::Canvas;
        self.pointer(c, Device::Pen, Phase::Down, *first, &zone);
        for at in rest {
            self.t += 20;
            self.pointer(c, Device::Pen, Phase::Move, *at, &zone);
        }
        self.t += 20;
        self.pointer(c, Device::Pen, Phase::Up, *path.last().expect("non-empty"), &zone);
        self.t += 100;
        self
    }

    /// Eraser stroke crossing each zone in order.
    pub fn erase(&mut self, zones: &[InstrumentZone]) -> &mut Self {
        let Some((first, rest)) = zones.split_first() else {
            return self;
        };
        let c = self.contact();
        self.pointer(c, Device::PenEraser, Phase::Down, At::screen(0.0, 0.0), first);
        let mut x = 0.0;
        for z in rest {
            x += 15.0;
            self.t += 20;
            self.pointer(c, Device::PenEraser, Phase::Move, At::screen(x, 0.0), z);
        }
        self.t += 20;
        let last = zones.last().expect("non-empty");
        self.pointer(c, Device::PenEraser, Phase::Up, At::screen(x, 0.0), last);
        self.t += 100;
        self
    }

    /// Two-finger pinch about a data-space center; `scale` is the final
    /// finger distance over the initial one.
    pub fn pinch(&mut self, center: (f64, f64), scale: f64) -> &mut Self {
        let (a, b) = (self.contact(), self.contact());
        let zone = InstrumentZone::Canvas;
        let at = |px: f64| At::data(px, 100.0, Some(center.0), Some(center.1));
        self.pointer(a, Device::Touch, Phase::Down, at(100.0), &zone);
        self.pointer(b, Device::Touch, Phase::Down, at(200.0), &zone);
        self.t += 30;
        self.pointer(b, Device::Touch, Phase::Move, at(100.0 + 100.0 * scale), &zone);
        self.t += 30;
        self.pointer(b, Device::Touch, Phase::Up, at(100.0 + 100.0 * scale), &zone);
        self.pointer(a, Device::Touch, Phase::Up, at(100.0), &zone);
        self.t += 100;
        self
    }
}
