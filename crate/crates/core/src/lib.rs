//! Test path generation from finite-state-machine models under start/end
//! vertex constraints and a path length range.

pub mod bench;
pub mod coverage;
pub mod defects;
pub mod error;
pub mod fsmt;
pub mod limits;
pub mod metrics;
pub mod model;
pub mod modelgen;
pub mod nsr;
pub mod path;
pub mod strategy;

pub use error::{Error, Result};
pub use limits::Limits;
pub use model::{EdgeIx, SutModel, VertexIx};
pub use path::{CoverageSpec, Level, Status, TestPath, TestPathSet};
pub use strategy::{RunOptions, Strategy, StrategyRegistry};
