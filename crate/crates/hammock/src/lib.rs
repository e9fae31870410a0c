//! Hammock plots: parallel-axis visualization of mixed categorical and
//! numerical data.
//!
//! Each plotted variable becomes a vertical axis carrying count-proportional
//! univariate bars; adjacent axes are joined by count-proportional connectors,
//! one per cell of the two variables' contingency table. Rows matching
//! highlight predicates are drawn in accent colors on top of the default ink.
//!
//! The pipeline is `dataset` (CSV ingestion) -> `layout` (axis scales and
//! bars) -> `connectors` (bivariate polygons) -> `render` (scene + SVG).
//! `order` provides the greedy correlation-based axis ordering and `cli`
//! the command-line front end.

pub mod cli;
pub mod connectors;
pub mod dataset;
pub mod layout;
pub mod order;
pub mod render;

pub use connectors::{build_connectors, Connector, Stratum};
pub use dataset::{
    apply_label_map, default_missing_tokens, load_csv, select_rows, write_csv, CellValue, Column,
    ColumnKind, DataError, Dataset, Predicate,
};
pub use layout::{compute_layout, AxisLayout, Layout, LayoutError, PlotSpec, Shape, ValueBand};
pub use order::{greedy_order, pairwise_corr, CorrMatrix, OrderMode};
pub use render::{build_scene, emit_svg, resolve_colors, Color, Scene};
