//! Modularity matrices with a rank-one null model, and spectral community detection.
//!
//! A modularity matrix here has the form `M = A + Diag(w) − σ v vᵀ`
//! with `A` a nonnegative symmetric adjacency, `σ > 0` and `v ≥ 0`. The
//! usual members of that family are built in factored form, including
//! Newman–Girvan and the resolution-parameter models.
//!
//! On top of them sit spectral bipartition and its recursive form. The
//! [`oracles`] module checks the spectral facts those algorithms rely on.

pub mod error;
pub mod generators;
pub mod graph;
pub mod io;
mod lanczos;
pub mod modmat;
pub mod oracles;
pub mod partition;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{Graph, NodeSet, SymmetricSparse};
pub use lanczos::SymmetricOperator;
pub use modmat::{Model, ModelSpec, ModelTag, ModularityMatrix, ModularityReport};
pub use nalgebra;
pub use spectral::{LeadingPair, PerronData, SolverOptions, Spectrum};
pub use oracles::Verdict;
pub use partition::{Bipartition, Dendrogram, SsgbParams};
