//! Hierarchical configuration model: random graphs built from a mixture of
//! community shapes joined by a configuration model, with analytic giant
//! component and bond-percolation predictions and Monte-Carlo checks.

pub mod catalog;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod mixture;
pub mod montecarlo;
pub mod numeric;
pub mod percolation;
pub mod shape;
pub mod spectrum;
pub mod synthesis;
pub mod triangles;
pub mod union_find;

pub use error::{HcmError, Result};
pub use mixture::{CommunityMixture, JointPmf, Moments, ValidationReport};
pub use shape::{CommunityShape, Layout, StubRuns};
