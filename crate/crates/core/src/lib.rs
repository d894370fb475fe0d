pub mod error;
pub mod geo;
pub mod metrics;
pub mod pipeline;
pub mod poi;
pub mod render;
pub mod stats;
pub mod tabular;

pub use error::{Error, Result};
