//! Multimodal interaction engine for tablet data visualization.
//!
//! Pen, touch and speech input is turned into visualization operations:
//! pointer streams become gestures ([`gesture`]), transcripts become partial
//! commands ([`parser`]), both are fused into operation requests
//! ([`fusion`]) and applied to the chart state ([`executor`]). The
//! [`session`] module wires the pipeline together and records replayable
//! traces.

pub mod aggregate;
pub mod canonical;
pub mod chart;
pub mod dataset;
pub mod executor;
pub mod feedback;
pub mod filter;
pub mod fusion;
pub mod geometry;
pub mod gesture;
pub mod parser;
pub mod session;

pub use dataset::{Attribute, AttributeKind, Dataset, RowId, SourceFormat, Value};

/// Data-space point.
pub type Point = geometry::Point2<f64>;
/// Closed data-space polygon.
pub type Polygon = geometry::Polygon<f64>;
/// Visible range on a continuous axis.
pub type Window = geometry::Window<f64>;
/// Histogram bin over `f64` values.
pub type Bin = geometry::Bin<f64>;

/// "a", "a and b", "a, b and c".
pub fn format_list<S: AsRef<str>>(items: &[S]) -> String {
    match items {
        [] => String::new(),
        [one] => one.as_ref().to_string(),
        [init @ .., last] => {
            let head: Vec<&str> = init.iter().map(AsRef::as_ref).collect();
            format!("{} and {}", head.join(", "), last.as_ref())
        }
    }
}
