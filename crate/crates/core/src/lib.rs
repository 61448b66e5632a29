//! Planted minimum bisection: samplers, exact oracle, metric LP relaxation,
//! dual certificates, regularization and distance statistics.

pub mod certificates;
pub mod constructions;
pub mod distance;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod lp;
pub mod metric;
pub mod oracle;
pub mod regularity;
pub mod rng;
pub mod sampling;
pub mod thresholds;

pub use error::{Error, Result};
pub use graph::{bisection_cost, Bisection, Graph, PlantedInstance};
