//! Continuous-time quantum walks on complex unit gain graphs.
//!
//! Directed graphs are encoded as Hermitian adjacency matrices whose arcs carry
//! unit complex weights `e^{i alpha}`. The crate builds these Hamiltonians and
//! their two-body qubit lift, evolves walks with `e^{iHt}`, removes phases on
//! forests by a diagonal gauge, and certifies zero transfer between antipodal
//! vertices of even cycles whose gain product is `-1`.

pub mod error;
pub mod evolution;
pub mod gain_graph;
pub mod gauge;
pub mod hamiltonian;
pub mod spectral;

pub use error::{EvolutionError, GaugeError, GraphError, HamiltonianError, SpectralError};
pub use evolution::{
    distribution_at, eigendecompose, propagator, time_series, transfer_probability,
    SpectralDecomposition, TimeSeries, DEFAULT_CLUSTER_TOL,
};
pub use gain_graph::{
    complete_family, cycle_family, cycle_phase_sum, directed_cycle, parse_graph, path_family,
    random_tree, underlying_undirected, Arc, GainGraph, PhaseMode, VertexId,
};
pub use gauge::{is_forest, tree_gauge, verify_gauge_invariance, DiagonalUnitary};
pub use hamiltonian::{
    adjacency_matrix, is_normal, lift_full, split_constant_alpha, HermitianMatrix,
    LiftedHamiltonian, SplitPair,
};
pub use spectral::{
    charpoly, charpoly_trace_recursion, cycle_charpoly_closed_form, cycle_det_laplace,
    path_charpoly, tridiag_det_sequence, zero_transfer_certificate, IntPolynomial, Polynomial,
    Verdict, ZeroTransferCertificate,
};

pub use num_complex::Complex64;
