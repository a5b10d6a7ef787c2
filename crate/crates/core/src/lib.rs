pub mod baselines;
pub mod error;
pub mod featurization;
pub mod harness;
pub mod ids;
pub mod ingestion;
pub mod miner;
pub mod render;
pub mod report;
pub mod synth;
mod tsv;

pub use error::{Error, Result};
pub use ids::{ActionId, UserId};
