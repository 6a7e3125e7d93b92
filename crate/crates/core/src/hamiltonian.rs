//! Walk Hamiltonians.
//!
//! [`adjacency_matrix`] turns a gain graph into its Hermitian adjacency matrix.
//! [`lift_full`] builds the two-body qubit Hamiltonian on `2^n` basis states
//! whose one-excitation block is a prescribed Hermitian matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::HamiltonianError;
use crate::gain_graph::{phase_distance, GainGraph};

/// Largest qubit count accepted by [`lift_full`].
pub const MAX_LIFT_QUBITS: usize = 12;

/// Dense Hermitian matrix. The lower triangle is always the conjugate of
/// the upper one and the diagonal is real.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    data: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Accepts `m` if its asymmetry is within `tol`, then makes it exactly
    /// Hermitian from the upper triangle.
    pub fn from_matrix(m: DMatrix<Complex64>, tol: f64) -> Result<Self, HamiltonianError> {
        if !m.is_square() {
            return Err(HamiltonianError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let asym = max_asymmetry(&m);
        if asym > tol {
            return Err(HamiltonianError::NotHermitian(asym));
        }
        let mut data = m;
        let n = data.nrows();
        for r in 0..n {
            data[(r, r)] = Complex64::new(data[(r, r)].re, 0.0);
            for c in r + 1..n {
                data[(c, r)] = data[(r, c)].conj();
            }
        }
        Ok(Self { data })
    }

    /// Real symmetric input.
    pub fn from_real(m: &DMatrix<f64>) -> Result<Self, HamiltonianError> {
        Self::from_matrix(m.map(|x| Complex64::new(x, 0.0)), 0.0)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            data: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.data
    }

    /// Largest `|m_ab - conj(m_ba)|`.
    pub fn max_asymmetry(&self) -> f64 {
        max_asymmetry(&self.data)
    }

    /// Entrywise conjugate, i.e. the Hamiltonian with every phase negated.
    pub fn conjugate(&self) -> Self {
        Self {
            data: self.data.map(|z| z.conj()),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.data, &other.data)
    }
}

pub(crate) fn max_asymmetry(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in r..n {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Hermitian adjacency matrix: `e^{i alpha}` at `(from, to)`, the conjugate
/// at `(to, from)`, potentials on the diagonal.
pub fn adjacency_matrix(g: &GainGraph) -> HermitianMatrix {
    let n = g.n_vertices();
    let mut data = DMatrix::<Complex64>::zeros(n, n);
    for (v, &p) in g.potentials().iter().enumerate() {
        data[(v, v)] = Complex64::new(p, 0.0);
    }
    for arc in g.arcs() {
        let w = Complex64::from_polar(1.0, arc.alpha);
        data[(arc.from, arc.to)] = w;
        data[(arc.to, arc.from)] = w.conj();
    }
    HermitianMatrix { data }
}

/// 0/1 arc matrix `B` with `B[from][to] = 1` for every stored arc.
pub fn arc_matrix(g: &GainGraph) -> DMatrix<f64> {
    let n = g.n_vertices();
    let mut b = DMatrix::zeros(n, n);
    for arc in g.arcs() {
        b[(arc.from, arc.to)] = 1.0;
    }
    b
}

/// Constant-phase Hamiltonian split as `cos(alpha) [B + B^T] + sin(alpha) [i (B - B^T)]`.
#[derive(Debug, Clone)]
pub struct SplitPair {
    pub symmetric_part: DMatrix<f64>,
    pub skew_part: HermitianMatrix,
    pub alpha: f64,
}

impl SplitPair {
    pub fn reconstruct(&self) -> HermitianMatrix {
        let (s, c) = self.alpha.sin_cos();
        let m = self.symmetric_part.map(|x| Complex64::new(c * x, 0.0))
            + self.skew_part.matrix() * Complex64::new(s, 0.0);
        HermitianMatrix::from_matrix(m, 1e-12).expect("sum of Hermitian parts is Hermitian")
    }
}

const PHASE_TOL: f64 = 1e-12;

pub fn split_constant_alpha(g: &GainGraph, alpha: f64) -> Result<SplitPair, HamiltonianError> {
    if g.has_potentials() {
        return Err(HamiltonianError::NonzeroPotentials);
    }
    for arc in g.arcs() {
        if phase_distance(arc.alpha, alpha) > PHASE_TOL {
            return Err(HamiltonianError::NonConstantPhase {
                from: arc.from,
                to: arc.to,
                found: arc.alpha,
                expected: alpha,
            });
        }
    }
    let b = arc_matrix(g);
    let bt = b.transpose();
    let symmetric_part = &b + &bt;
    let skew = (&b - &bt).map(|x| Complex64::new(0.0, x));
    Ok(SplitPair {
        symmetric_part,
        skew_part: HermitianMatrix::from_matrix(skew, 0.0)?,
        alpha,
    })
}

/// Whether the arc matrix commutes with its transpose, `max |B B^T - B^T B| <= tol`.
pub fn is_normal(g: &GainGraph, tol: f64) -> bool {
    let b = arc_matrix(g);
    let bt = b.transpose();
    let comm = &b * &bt - &bt * &b;
    comm.amax() <= tol
}

/// Two-body qubit Hamiltonian on `2^n` basis states, stored column by column.
///
/// Basis states are bit masks: bit `a` set means qubit `a` is in `|1>`.
#[derive(Debug, Clone)]
pub struct LiftedHamiltonian {
    n_qubits: usize,
    // columns[s] = sorted (row, value) pairs of H|s>
    columns: Vec<Vec<(usize, Complex64)>>,
}

/// `1/2 (X_a X_b + Y_a Y_b) |S>`: exchanges the excitation between `a` and `b`.
fn xy_exchange(a: usize, b: usize, s: usize) -> Option<(usize, Complex64)> {
    let in_a = s >> a & 1 == 1;
    let in_b = s >> b & 1 == 1;
    (in_a != in_b).then(|| (s ^ (1 << a) ^ (1 << b), Complex64::new(1.0, 0.0)))
}

/// `1/2 (X_a Y_b - X_b Y_a) |S>`: the exchange with phase `+i` when the
/// excitation leaves `a` and `-i` when it leaves `b`.
fn chiral_exchange(a: usize, b: usize, s: usize) -> Option<(usize, Complex64)> {
    let in_a = s >> a & 1 == 1;
    let in_b = s >> b & 1 == 1;
    let target = s ^ (1 << a) ^ (1 << b);
    match (in_a, in_b) {
        (true, false) => Some((target, Complex64::new(0.0, 1.0))),
        (false, true) => Some((target, Complex64::new(0.0, -1.0))),
        _ => None,
    }
}

/// `1/2 (I - Z_a) |S>`: projector onto qubit `a` excited.
fn number(a: usize, s: usize) -> f64 {
    (s >> a & 1) as f64
}

/// Lift a Hermitian matrix on `n <= 12` vertices to the `2^n` qubit Hamiltonian.
///
/// Every unordered pair `a < b` contributes `Re(m_ab)` times the XY exchange
/// and `Im(m_ba)` times the chiral exchange, so an excitation hopping from
/// `a` to `b` picks up exactly `m_ba`. Each diagonal `m_aa` weights the
/// number operator of qubit `a`.
pub fn lift_full(m: &HermitianMatrix) -> Result<LiftedHamiltonian, HamiltonianError> {
    let n = m.dim();
    if n > MAX_LIFT_QUBITS {
        return Err(HamiltonianError::TooManyQubits {
            n,
            max: MAX_LIFT_QUBITS,
        });
    }
    let pairs: Vec<(usize, usize, f64, f64)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .map(|(a, b)| (a, b, m.get(a, b).re, m.get(b, a).im))
        .filter(|&(_, _, re, im)| re != 0.0 || im != 0.0)
        .collect();

    let dim = 1usize << n;
    let mut columns = Vec::with_capacity(dim);
    for s in 0..dim {
        let mut col: Vec<(usize, Complex64)> = Vec::new();
        let diag: f64 = (0..n).map(|a| m.get(a, a).re * number(a, s)).sum();
        if diag != 0.0 {
            col.push((s, Complex64::new(diag, 0.0)));
        }
        for &(a, b, re, im) in &pairs {
            let mut amp = Complex64::new(0.0, 0.0);
            let mut target = None;
            if let Some((t, v)) = xy_exchange(a, b, s) {
                amp += v * re;
                target = Some(t);
            }
            if let Some((t, v)) = chiral_exchange(a, b, s) {
                amp += v * im;
                target = Some(t);
            }
            if let Some(t) = target {
                col.push((t, amp));
            }
        }
        col.sort_by_key(|&(r, _)| r);
        columns.push(col);
    }
    Ok(LiftedHamiltonian {
        n_qubits: n,
        columns,
    })
}

/// Masks with exactly `k` bits set among the low `n`, ascending.
pub fn sector_masks(n: usize, k: usize) -> Vec<usize> {
    (0..1usize << n).filter(|s| s.count_ones() as usize == k).collect()
}

impl LiftedHamiltonian {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    /// `<row| H |col>`.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.columns[col]
            .binary_search_by_key(&row, |&(r, _)| r)
            .map(|i| self.columns[col][i].1)
            .unwrap_or_default()
    }

    /// Iterates `(row, col, value)` over stored entries.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r, c, v)))
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// Count of stored nonzero entries connecting different excitation numbers.
    pub fn cross_sector_nonzeros(&self) -> usize {
        self.entries()
            .filter(|&(r, c, v)| r.count_ones() != c.count_ones() && v.norm() != 0.0)
            .count()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for (r, c, v) in self.entries() {
            out[(r, c)] = v;
        }
        out
    }

    /// Restriction to the `k`-excitation sector, basis in increasing mask
    /// order. Dimension is `C(n, k)`.
    pub fn excitation_block(&self, k: usize) -> Result<HermitianMatrix, HamiltonianError> {
        let n = self.n_qubits;
        if k > n {
            return Err(HamiltonianError::ExcitationOutOfRange { k, n });
        }
        let masks = sector_masks(n, k);
        let mut index = vec![usize::MAX; self.dim()];
        for (i, &s) in masks.iter().enumerate() {
            index[s] = i;
        }
        let mut block = DMatrix::zeros(masks.len(), masks.len());
        for (j, &s) in masks.iter().enumerate() {
            for &(r, v) in &self.columns[s] {
                let i = index[r];
                if i != usize::MAX {
                    block[(i, j)] = v;
                }
            }
        }
        HermitianMatrix::from_matrix(block, 1e-12)
    }
}

/// Binomial coefficient, exact for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}
