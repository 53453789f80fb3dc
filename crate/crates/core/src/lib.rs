pub mod aggregation;
pub mod cli;
pub mod config;
pub mod engine;
pub mod error;
pub mod estimator;
pub mod fixed;
pub mod gen;
pub mod heuristic;
pub mod mst;
pub mod oracle;
pub mod pareto;
pub mod solve;
pub mod stcut;
pub mod store;
pub mod td;
pub mod tsp;

pub use error::{Error, Result};
