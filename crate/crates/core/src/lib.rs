//! Tracks news-story URIs across search engine result pages over time and
//! measures how hard they are to find again.

pub mod canonical;
pub mod churn;
pub mod error;
pub mod model;
pub mod refind;
pub mod serp;
pub mod store;
pub mod synth;

pub use canonical::{canonicalize, dedup_snapshot};
pub use error::{Error, Result};
pub use model::*;
