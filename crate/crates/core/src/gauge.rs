//! Diagonal gauge transformations for oriented forests.
//!
//! On a forest every phase assignment is removable: there is a diagonal
//! unitary `D` with `D^† H_alpha D = H_0`. Vertex-localized walks therefore
//! see exactly the same transfer probabilities with or without orientation.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{GaugeError, GraphError};
use crate::evolution::{eigendecompose, propagator, DEFAULT_CLUSTER_TOL};
use crate::gain_graph::{components, underlying_undirected, GainGraph};
use crate::hamiltonian::{adjacency_matrix, HermitianMatrix};

/// Diagonal matrix with unit-modulus entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalUnitary {
    phases: Vec<Complex64>,
}

impl DiagonalUnitary {
    pub fn identity(n: usize) -> Self {
        Self {
            phases: vec![Complex64::new(1.0, 0.0); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[Complex64] {
        &self.phases
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.phases))
    }

    /// `D^† M D`, entry `(r, c)` is `conj(d_r) m_rc d_c`.
    pub fn conjugate(&self, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| {
            self.phases[r].conj() * m[(r, c)] * self.phases[c]
        })
    }

    /// `D M D^†`.
    pub fn apply(&self, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| {
            self.phases[r] * m[(r, c)] * self.phases[c].conj()
        })
    }

    /// Largest `| |d_a| - 1 |`.
    pub fn max_modulus_error(&self) -> f64 {
        self.phases
            .iter()
            .map(|z| (z.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

pub fn is_forest(g: &GainGraph) -> bool {
    // a graph is acyclic iff |E| = |V| - #components
    g.arcs().len() + components(g).len() == g.n_vertices()
}

/// Gauge that removes every phase of a forest, each component rooted at its
/// lowest-index vertex.
pub fn tree_gauge(g: &GainGraph) -> Result<DiagonalUnitary, GraphError> {
    tree_gauge_with_roots(g, &[])
}

/// Like [`tree_gauge`], but components containing one of `roots` are rooted
/// there (first listed root wins).
pub fn tree_gauge_with_roots(
    g: &GainGraph,
    roots: &[usize],
) -> Result<DiagonalUnitary, GraphError> {
    if !is_forest(g) {
        return Err(GraphError::NotAForest);
    }
    let n = g.n_vertices();
    let adj = g.neighbours();
    let mut phases: Vec<Option<Complex64>> = vec![None; n];

    let candidates = roots.iter().copied().filter(|&r| r < n).chain(0..n);
    for root in candidates {
        if phases[root].is_some() {
            continue;
        }
        phases[root] = Some(Complex64::new(1.0, 0.0));
        let mut queue = VecDeque::from([root]);
        while let Some(parent) = queue.pop_front() {
            let d_parent = phases[parent].unwrap();
            for &child in &adj[parent] {
                if phases[child].is_some() {
                    continue;
                }
                // conj(d_p) h_pc d_c = 1 with h_pc = e^{i phase(p -> c)}
                let theta = g.phase_along(parent, child).expect("tree edge");
                phases[child] = Some(d_parent * Complex64::from_polar(1.0, -theta));
                queue.push_back(child);
            }
        }
    }

    Ok(DiagonalUnitary {
        phases: phases.into_iter().map(Option::unwrap).collect(),
    })
}

/// Largest `| |<b|e^{itH_alpha}|a>| - |<b|e^{itH_0}|a>| |` over all vertex
/// pairs and the given times.
pub fn verify_gauge_invariance(g: &GainGraph, t_samples: &[f64]) -> Result<f64, GaugeError> {
    if !is_forest(g) {
        return Err(GraphError::NotAForest.into());
    }
    Ok(amplitude_modulus_deviation(g, t_samples)?)
}

/// The comparison behind [`verify_gauge_invariance`], without the forest
/// guard; on graphs with cycles it measures how far orientation matters.
pub fn amplitude_modulus_deviation(
    g: &GainGraph,
    t_samples: &[f64],
) -> Result<f64, crate::error::EvolutionError> {
    let directed = eigendecompose(&adjacency_matrix(g), DEFAULT_CLUSTER_TOL)?;
    let undirected = eigendecompose(
        &adjacency_matrix(&underlying_undirected(g)),
        DEFAULT_CLUSTER_TOL,
    )?;
    let mut worst = 0.0f64;
    for &t in t_samples {
        let ua = propagator(&directed, t);
        let u0 = propagator(&undirected, t);
        for (x, y) in ua.iter().zip(u0.iter()) {
            worst = worst.max((x.norm() - y.norm()).abs());
        }
    }
    Ok(worst)
}

/// Largest entrywise `|D^† H_alpha D - H_0|`.
pub fn gauge_residual(g: &GainGraph, d: &DiagonalUnitary) -> f64 {
    let h = adjacency_matrix(g);
    let h0: HermitianMatrix = adjacency_matrix(&underlying_undirected(g));
    crate::hamiltonian::max_abs_diff(&d.conjugate(h.matrix()), h0.matrix())
}
