//! Choropleth maps and the correlation heatmap, as GeoJSON and SVG text.
//!
//! Every renderer here is a pure function of its inputs: no clocks, no
//! hash-map iteration, fixed float formatting.

mod choropleth;
mod classes;
mod heatmap;
mod palette;
mod svg;

pub use choropleth::{render_choropleth, Choropleth, MapOptions, RenderedMap};
pub use classes::{class_of, quantile, quantile_classes, DEFAULT_CLASSES};
pub use heatmap::render_corr_heatmap;
pub use palette::{DivergingPalette, Palette, Rgb};

/// Canvas edge length of every SVG, in pixels.
pub const CANVAS: f64 = 1000.0;
