//! Forest matrices of weighted digraphs.
//!
//! The central object is the normalized matrix of maximum out forests `Ĵ`:
//! entry `(i, j)` is the share of maximum spanning diverging forests (by
//! weight) in which `i` belongs to the tree rooted at `j`. It equals
//! `lim_{τ→∞} (I + τL)⁻¹` for the Kirchhoff matrix `L`, the Cesàro limit of
//! every Markov chain related to the digraph, and its rows solve the score
//! system `Lᵀx = 0`.
//!
//! Vertices are 0-based throughout the API; [`WeightedDigraph::from_one_based`]
//! and the error messages use the 1-based labels common in the literature.
//! Numeric routines are generic over [`Scalar`], implemented for `f64` and
//! exact [`num_rational::BigRational`].
//!
//! ```
//! use forestmat::{jbar, WeightedDigraph};
//!
//! let g = WeightedDigraph::from_one_based(2, &[(1, 2, 1.0), (2, 1, 1.0)]).unwrap();
//! let j = jbar::<f64>(&g).unwrap();
//! assert_eq!(j.entries[(0, 1)], 0.5);
//! ```

pub mod analysis;
pub mod block;
pub mod digraph;
pub mod error;
pub mod fixtures;
pub mod forest;
pub mod markov;
pub mod matrix;
pub mod polynomial;
pub mod ranking;
pub mod scalar;
pub mod structure;

pub use analysis::{
    is_block_form, mutual_reachability_matrix, pattern_by_threshold, reachability_matrix,
    reachability_matrix_at, structure_report, Membership, StructureReport,
};
pub use block::{decompose_check, max_out_forests_block, max_out_forests_block_capped};
pub use digraph::{Arc, Weight, WeightedDigraph};
pub use error::{ForestMatError, Result};
pub use forest::{
    enumerate_forests, forest_weight_table, is_diverging_forest, Forest, ForestEnumerator,
    ForestFamily, DEFAULT_MAX_FORESTS,
};
pub use markov::{
    cesaro_limit, cesaro_partial, chain_period, digraph_from_chain, q1_chain, related_chain,
    LimitBundle, MarkovChain,
};
pub use matrix::Matrix;
pub use polynomial::{
    forest_minor_weight, forest_polynomial, jbar, jbar_via_limit, q_tau, ForestPolynomial,
    JBarMatrix,
};
pub use ranking::{
    aggregate_score, daniels_basis, proximity_audit, rank, Condition, DanielsBasis, Expectation,
    ProximityAudit, RankingResult, Verdict, Witness,
};
pub use scalar::Scalar;
pub use structure::{decompose, StructureDecomposition};
