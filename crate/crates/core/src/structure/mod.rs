//! Constraint-matrix graphs, treedepth, block structures and embeddings.

pub mod blocks;
pub mod embed;
pub mod graph;
pub mod norm;
pub mod treedepth;

pub use blocks::{
    assemble_multistage, assemble_nfold, assemble_treefold, detect_nfold, detect_two_stage, BlockKind,
    BlockStructure, ShapeTree,
};
pub use embed::{embed_dual_td, embed_primal_td, projection_matches, EmbedMode, EmbeddingResult, Lifter};
pub use graph::{dual_graph, incidence_graph, primal_graph, Graph};
pub use norm::nfold_norm_bound;
pub use treedepth::{treedepth_decomposition, EliminationForest};
