//! Principal graph encoder embedding.
//!
//! [`embed`] builds the one-hot encoder embedding of a labeled graph in a
//! single pass over the edges, [`score_report`] scores every community and
//! thresholds the scores, and [`fit_transform`] chains both and returns the
//! embedding restricted to the principal communities.
//!
//! ```
//! use pgee::{fit_transform, Graph, LabelVector, PrincipalConfig};
//!
//! let (g, _) = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)], false)?;
//! let y = LabelVector::from_labels(vec![1, 1, 2, 2, 0])?;
//! let fit = fit_transform(&g, &y, &PrincipalConfig::default())?;
//! assert_eq!(fit.full.dim(), 2);
//! assert_eq!(fit.principal.n(), 5);
//! # Ok::<(), pgee::Error>(())
//! ```

pub mod encoder;
pub mod error;
pub mod eval;
pub mod graph;
pub mod io;
pub mod labels;
pub mod models;
pub mod principal;
pub mod seed;

pub use encoder::{embed, embed_dense_oracle, normalize_rows, Embedding};
pub use error::{Error, Result};
pub use graph::{permute_vertices, BuildStats, Graph};
pub use labels::LabelVector;
pub use models::{simulation_preset, ModelKind, ModelSpec, Sample};
pub use principal::{
    community_scores, fit_transform, principal_embedding, score_report, CommunityScoreReport,
    PrincipalConfig, PrincipalFit, SmallClassPolicy, ThresholdRule, VarianceEstimator,
};

/// Version of this crate, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
