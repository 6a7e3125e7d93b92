//! Spectral decomposition and continuous-time walk evolution.
//!
//! Time is dimensionless and the propagator is `U(t) = e^{+iHt}`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::EvolutionError;
use crate::hamiltonian::HermitianMatrix;

/// Eigenvalues closer than this (relative to `max(1, spectral radius)`) are
/// merged into one spectral idempotent.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

const PROBABILITY_SLACK: f64 = 1e-10;

/// `H = sum_r theta_r E_r` with distinct ascending `theta_r` and orthogonal
/// projectors `E_r`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    dim: usize,
    eigenvalues: Vec<f64>,
    idempotents: Vec<DMatrix<Complex64>>,
    multiplicities: Vec<usize>,
    raw_eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Distinct eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn idempotents(&self) -> &[DMatrix<Complex64>] {
        &self.idempotents
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// All `dim` eigenvalues before clustering, ascending.
    pub fn raw_eigenvalues(&self) -> &[f64] {
        &self.raw_eigenvalues
    }

    /// Orthonormal eigenvectors as columns, in the order of [`Self::raw_eigenvalues`].
    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn spectral_radius(&self) -> f64 {
        self.raw_eigenvalues
            .iter()
            .fold(0.0f64, |acc, x| acc.max(x.abs()))
    }

    /// `sum_r theta_r E_r`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        self.eigenvalues
            .iter()
            .zip(&self.idempotents)
            .fold(DMatrix::zeros(self.dim, self.dim), |acc, (&theta, e)| {
                acc + e * Complex64::new(theta, 0.0)
            })
    }

    fn check_vertex(&self, v: usize) -> Result<(), EvolutionError> {
        if v >= self.dim {
            return Err(EvolutionError::VertexOutOfRange {
                vertex: v,
                dim: self.dim,
            });
        }
        Ok(())
    }

    fn phases(&self, t: f64) -> impl Iterator<Item = (Complex64, &DMatrix<Complex64>)> {
        self.eigenvalues
            .iter()
            .map(move |&theta| Complex64::from_polar(1.0, theta * t))
            .zip(&self.idempotents)
    }

    /// Column `a` of `U(t)`: the amplitudes of a walk started at `a`.
    pub fn amplitudes_from(&self, a: usize, t: f64) -> Result<DVector<Complex64>, EvolutionError> {
        self.check_vertex(a)?;
        let mut out = DVector::zeros(self.dim);
        for (phase, e) in self.phases(t) {
            out.axpy(phase, &e.column(a), Complex64::new(1.0, 0.0));
        }
        Ok(out)
    }
}

/// Diagonalizes `h` and groups eigenvalues within
/// `cluster_tol * max(1, spectral radius)` into shared eigenspaces.
pub fn eigendecompose(
    h: &HermitianMatrix,
    cluster_tol: f64,
) -> Result<SpectralDecomposition, EvolutionError> {
    if cluster_tol < 0.0 || cluster_tol.is_nan() {
        return Err(EvolutionError::NegativeTolerance(cluster_tol));
    }
    let n = h.dim();
    let eig = h
        .matrix()
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or(EvolutionError::NoConvergence)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);

    let radius = values.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let scale = radius.max(1.0);
    check_accuracy(h.matrix(), &values, &vectors, scale)?;

    let merge = cluster_tol * scale;
    let mut clusters: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        match clusters.last_mut() {
            Some((_, end)) if values[i] - values[*end - 1] <= merge => *end = i + 1,
            _ => clusters.push((i, i + 1)),
        }
    }

    let mut eigenvalues = Vec::with_capacity(clusters.len());
    let mut idempotents = Vec::with_capacity(clusters.len());
    let mut multiplicities = Vec::with_capacity(clusters.len());
    for (start, end) in clusters {
        let block = vectors.columns(start, end - start);
        idempotents.push(block * block.adjoint());
        eigenvalues.push(values[start..end].iter().sum::<f64>() / (end - start) as f64);
        multiplicities.push(end - start);
    }

    Ok(SpectralDecomposition {
        dim: n,
        eigenvalues,
        idempotents,
        multiplicities,
        raw_eigenvalues: values,
        eigenvectors: vectors,
    })
}

fn check_accuracy(
    h: &DMatrix<Complex64>,
    values: &[f64],
    vectors: &DMatrix<Complex64>,
    scale: f64,
) -> Result<(), EvolutionError> {
    let n = h.nrows();
    let lambda = DMatrix::from_diagonal(&DVector::from_iterator(
        n,
        values.iter().map(|&x| Complex64::new(x, 0.0)),
    ));
    let residual = (h * vectors - vectors * lambda).camax() / scale;
    let ortho = (vectors.adjoint() * vectors - DMatrix::identity(n, n)).camax();
    let worst = residual.max(ortho);
    if !worst.is_finite() || worst > 1e-10 {
        return Err(EvolutionError::InaccurateDecomposition(worst));
    }
    Ok(())
}

/// `U(t) = sum_r e^{i theta_r t} E_r`.
pub fn propagator(spec: &SpectralDecomposition, t: f64) -> DMatrix<Complex64> {
    spec.phases(t)
        .fold(DMatrix::zeros(spec.dim, spec.dim), |acc, (phase, e)| {
            acc + e * phase
        })
}

/// `|<b| U(t) |a>|^2`.
pub fn transfer_probability(
    spec: &SpectralDecomposition,
    a: usize,
    b: usize,
    t: f64,
) -> Result<f64, EvolutionError> {
    spec.check_vertex(b)?;
    let amp = spec.amplitudes_from(a, t)?[b];
    clamp_probability(amp.norm_sqr())
}

fn clamp_probability(p: f64) -> Result<f64, EvolutionError> {
    if p > 1.0 + PROBABILITY_SLACK {
        return Err(EvolutionError::ProbabilityOutOfRange(p));
    }
    Ok(p.min(1.0))
}

/// Probability of finding the walk started at `a` on each vertex at time `t`.
pub fn distribution_at(
    spec: &SpectralDecomposition,
    a: usize,
    t: f64,
) -> Result<Vec<f64>, EvolutionError> {
    spec.amplitudes_from(a, t)?
        .iter()
        .map(|z| clamp_probability(z.norm_sqr()))
        .collect()
}

/// Site distributions sampled on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub source: usize,
    pub t_grid: Vec<f64>,
    /// `probabilities[i][v]` is the probability at vertex `v` at `t_grid[i]`.
    pub probabilities: Vec<Vec<f64>>,
}

impl TimeSeries {
    /// Largest `|sum_v p - 1|` over all rows.
    pub fn max_row_sum_error(&self) -> f64 {
        self.probabilities
            .iter()
            .map(|row| (row.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Column of one target vertex.
    pub fn target(&self, b: usize) -> Vec<f64> {
        self.probabilities.iter().map(|row| row[b]).collect()
    }
}

/// `steps` equally spaced samples from `0` to `t_max` inclusive.
///
/// Rows are computed in parallel but each row depends only on its own time,
/// so the result does not depend on the thread count.
pub fn time_series(
    spec: &SpectralDecomposition,
    a: usize,
    t_max: f64,
    steps: usize,
) -> Result<TimeSeries, EvolutionError> {
    if steps < 2 || t_max.is_nan() || t_max <= 0.0 || !t_max.is_finite() {
        return Err(EvolutionError::DegenerateGrid { steps, t_max });
    }
    spec.check_vertex(a)?;
    let t_grid: Vec<f64> = (0..steps)
        .map(|i| t_max * i as f64 / (steps - 1) as f64)
        .collect();
    let probabilities = t_grid
        .par_iter()
        .map(|&t| distribution_at(spec, a, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TimeSeries {
        source: a,
        t_grid,
        probabilities,
    })
}
