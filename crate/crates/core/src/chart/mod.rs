//! Visualization state: encodings, chart-type inference, validation and the
//! abstract view.

pub mod spec;
pub mod view;

pub use spec::{
    infer_chart_type, univariate_summary, validate, Axis, BindMode, Channel, ChartSpec,
    ChartType, Inference, InvalidReason, SortDirection, SortKey, SortState, Validity,
};
pub use view::{
    compute_view, AxisView, Legend, LegendEntry, Mark, Orientation, Scale, ViewConfig,
    ViewModel, Viewport,
};
