//! Influential nodes (NetShield) and community structure (Louvain).

mod communities;
mod eigen;
mod louvain;
mod netshield;

pub use communities::{decompose_communities, CommunityProfile, LeanOrientation};
pub use eigen::{leading_eigenpair, EigenOptions, EigenPair};
pub use louvain::{louvain, louvain_with_resolution, modularity, CommunityPartition};
pub use netshield::{netshield, netshield_from_eigenpair, netshield_with, ShieldRanking};

#[derive(Debug, thiserror::Error)]
pub enum StructureError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error(
        "power iteration did not converge after {iterations} iterations (residual {residual:.3e})"
    )]
    NotConverged {
        iterations: usize,
        residual: f64,
        estimate: Box<EigenPair>,
    },
    #[error("cannot select {k} nodes from a graph with {n}")]
    KTooLarge { k: usize, n: usize },
}
