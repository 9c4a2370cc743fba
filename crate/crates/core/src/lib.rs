//! Information access in undirected networks under Independent Cascade.
//!
//! The crate estimates pairwise access probabilities with coupled live-edge
//! sampling, derives per-node advantage measures (broadcast, influence,
//! control), and greedily augments a graph with new edges to raise its
//! welfare, the minimum pairwise access.

mod coin;
mod dsu;
pub mod augment;
pub mod ensemble;
pub mod error;
pub mod estimate;
pub mod eval;
pub mod export;
pub mod graph;
pub mod measures;
pub mod oracle;

pub use ensemble::{build_ensemble, estimate_access, stability_check, SampleEnsemble, Stability};
pub use error::{Error, Result};
pub use estimate::{AccessEstimate, AccessMatrix, ExactAccess, TransmissionProbability};
pub use graph::{graph_diameter_pair, largest_connected_component, load_edge_list, EdgeKey, Graph, NodeId};
pub use oracle::exact_access_oracle;
pub use augment::{augment, run_augmentation, AccessModel, ExactModel, HeuristicKind, InterventionTrace};
pub use eval::{compare_runs, distribution_summary, gap_report, signature_distances, MetricsBundle};
pub use measures::{access_centrality, access_centrality_exact, advantage, welfare, AdvantageVector, Control, Welfare};
