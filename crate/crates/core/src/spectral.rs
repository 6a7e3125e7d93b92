//! Characteristic polynomials, Chebyshev polynomials and zero-transfer
//! certificates.
//!
//! Floating-point results use [`Polynomial`]; the exact integer identities
//! (tridiagonal determinants, Chebyshev coefficients, the even-cycle closed
//! form) use [`IntPolynomial`] with checked `i128` arithmetic.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{EvolutionError, SpectralError};
use crate::evolution::{eigendecompose, SpectralDecomposition};
use crate::gain_graph::GainGraph;
use crate::hamiltonian::{adjacency_matrix, HermitianMatrix};

/// Largest matrix accepted by [`charpoly`].
pub const MAX_CHARPOLY_DIM: usize = 64;

/// Default bound on idempotent and Krylov entries for a zero-transfer verdict.
pub const DEFAULT_ZERO_THRESHOLD: f64 = 1e-10;

const IMAGINARY_RESIDUE_TOL: f64 = 1e-8;

/// Real polynomial, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `prod (x - r)`, expanded in double-double arithmetic so that the
    /// only error left is the final rounding of each coefficient.
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut coeffs = vec![DoubleDouble::from(1.0)];
        for &r in roots {
            let mut next = vec![DoubleDouble::from(0.0); coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] = next[i + 1].add(c);
                next[i] = next[i].add(c.mul_f64(-r));
            }
            coeffs = next;
        }
        Self::new(coeffs.into_iter().map(DoubleDouble::to_f64).collect())
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1.0
    }

    /// Coefficient of `x^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..len).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    /// Largest coefficientwise `|a_k - b_k|`.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let len = self.coeffs.len().max(other.coeffs.len());
        (0..len)
            .map(|k| (self.coeff(k) - other.coeff(k)).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, c| acc.max(c.abs()))
    }
}

impl From<&IntPolynomial> for Polynomial {
    fn from(p: &IntPolynomial) -> Self {
        Self::new(p.coeffs.iter().map(|&c| c as f64).collect())
    }
}

/// Unevaluated sum `hi + lo` carrying about 106 bits of mantissa.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }
}

impl DoubleDouble {
    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn add(self, other: Self) -> Self {
        let (s, e) = Self::two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = Self::two_sum(s, e);
        Self { hi, lo }
    }

    fn mul_f64(self, b: f64) -> Self {
        let p = self.hi * b;
        let err = self.hi.mul_add(b, -p);
        let (hi, lo) = Self::two_sum(p, err + self.lo * b);
        Self { hi, lo }
    }

    /// `self + a * b` with the product formed exactly.
    fn add_prod(self, a: f64, b: f64) -> Self {
        let p = a * b;
        let err = a.mul_add(b, -p);
        self.add(Self { hi: p, lo: err })
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Integer polynomial with overflow-checked arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<i128>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<i128>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn constant(c: i128) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::new(vec![0, 1])
    }

    pub fn coefficients(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> i128 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> i128 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SpectralError> {
        self.zip_with(other, i128::checked_add)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, SpectralError> {
        self.zip_with(other, i128::checked_sub)
    }

    fn zip_with(
        &self,
        other: &Self,
        op: fn(i128, i128) -> Option<i128>,
    ) -> Result<Self, SpectralError> {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|k| op(self.coeff(k), other.coeff(k)).ok_or(SpectralError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(Self::new(coeffs))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, SpectralError> {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Ok(Self::new(Vec::new()));
        }
        let mut out = vec![0i128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                let term = a.checked_mul(b).ok_or(SpectralError::Overflow)?;
                out[i + j] = out[i + j].checked_add(term).ok_or(SpectralError::Overflow)?;
            }
        }
        Ok(Self::new(out))
    }

    pub fn checked_scale(&self, k: i128) -> Result<Self, SpectralError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| c.checked_mul(k).ok_or(SpectralError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(Self::new(coeffs))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            if !first {
                write!(f, " {sign} ")?;
            } else {
                write!(f, "{sign}")?;
            }
            let mag = c.unsigned_abs();
            match (k, mag) {
                (0, _) => write!(f, "{mag}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{mag}x")?,
                (_, 1) => write!(f, "x^{k}")?,
                _ => write!(f, "{mag}x^{k}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// `det(xI - H)` expanded from the eigenvalues of `H`.
pub fn charpoly(h: &HermitianMatrix) -> Result<Polynomial, SpectralError> {
    let n = h.dim();
    if n > MAX_CHARPOLY_DIM {
        return Err(SpectralError::TooLarge(n));
    }
    let spec = eigendecompose(h, 0.0)?;
    let refined: Vec<f64> = spec
        .raw_eigenvalues()
        .iter()
        .enumerate()
        .map(|(j, &theta)| refine_eigenvalue(h, spec.eigenvectors().column(j), theta))
        .collect();
    Ok(Polynomial::from_roots(&refined))
}

/// One Rayleigh-quotient correction `theta + v^†(Hv - theta v) / v^†v`, with
/// the residual accumulated in double-double.
fn refine_eigenvalue(
    h: &HermitianMatrix,
    v: nalgebra::DVectorView<'_, Complex64>,
    theta: f64,
) -> f64 {
    let n = h.dim();
    let mut num = DoubleDouble::from(0.0);
    let mut den = DoubleDouble::from(0.0);
    for i in 0..n {
        let mut re = DoubleDouble::from(0.0).add_prod(-theta, v[i].re);
        let mut im = DoubleDouble::from(0.0).add_prod(-theta, v[i].im);
        for j in 0..n {
            let a = h.get(i, j);
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            re = re.add_prod(a.re, v[j].re).add_prod(-a.im, v[j].im);
            im = im.add_prod(a.re, v[j].im).add_prod(a.im, v[j].re);
        }
        // Re(conj(v_i) r_i) = v.re r.re + v.im r.im
        num = num.add(re.mul_f64(v[i].re)).add(im.mul_f64(v[i].im));
        den = den.add_prod(v[i].re, v[i].re).add_prod(v[i].im, v[i].im);
    }
    theta + num.to_f64() / den.to_f64()
}

/// `det(xI - H)` by the Faddeev-LeVerrier trace recursion, carried out in
/// complex arithmetic. Fails when a coefficient keeps an imaginary part
/// above `1e-8` relative to the largest coefficient, which would mean the
/// input was not Hermitian.
pub fn charpoly_trace_recursion(h: &HermitianMatrix) -> Result<Polynomial, SpectralError> {
    let n = h.dim();
    if n > MAX_CHARPOLY_DIM {
        return Err(SpectralError::TooLarge(n));
    }
    let a = h.matrix();
    let id = DMatrix::<Complex64>::identity(n, n);
    // c[k] is the coefficient of x^k
    let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
    c[n] = Complex64::new(1.0, 0.0);
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for k in 1..=n {
        m = a * &m + &id * c[n - k + 1];
        let am = a * &m;
        c[n - k] = -am.trace() / Complex64::new(k as f64, 0.0);
    }
    let scale = c.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for (index, z) in c.iter().enumerate() {
        if z.im.abs() > IMAGINARY_RESIDUE_TOL * scale {
            return Err(SpectralError::ImaginaryResidue {
                index,
                residue: z.im.abs(),
            });
        }
    }
    Ok(Polynomial::new(c.iter().map(|z| z.re).collect()))
}

/// Leading principal minors `f_0..f_n` of a tridiagonal matrix with diagonal
/// `diag`, superdiagonal `upper` and subdiagonal `lower`, via
/// `f_k = a_k f_{k-1} - c_{k-1} b_{k-1} f_{k-2}`. Exact.
pub fn tridiag_det_sequence(
    diag: &[i128],
    upper: &[i128],
    lower: &[i128],
) -> Result<Vec<i128>, SpectralError> {
    check_tridiag_lengths(diag.len(), upper.len(), lower.len())?;
    let mut f = Vec::with_capacity(diag.len() + 1);
    f.push(1i128);
    let mut prev = 0i128;
    for k in 0..diag.len() {
        let cur = *f.last().unwrap();
        let coupling = if k == 0 {
            0
        } else {
            let bc = lower[k - 1]
                .checked_mul(upper[k - 1])
                .ok_or(SpectralError::Overflow)?;
            bc.checked_mul(prev).ok_or(SpectralError::Overflow)?
        };
        let next = diag[k]
            .checked_mul(cur)
            .and_then(|v| v.checked_sub(coupling))
            .ok_or(SpectralError::Overflow)?;
        prev = cur;
        f.push(next);
    }
    Ok(f)
}

/// Floating-point variant of [`tridiag_det_sequence`]. The off-diagonals
/// enter only through the products `lower[k] * upper[k]`.
pub fn tridiag_det_sequence_f64(
    diag: &[f64],
    off_products: &[f64],
) -> Result<Vec<f64>, SpectralError> {
    check_tridiag_lengths(diag.len(), off_products.len(), off_products.len())?;
    let mut f = Vec::with_capacity(diag.len() + 1);
    f.push(1.0);
    let mut prev = 0.0;
    for k in 0..diag.len() {
        let cur = *f.last().unwrap();
        let coupling = if k == 0 { 0.0 } else { off_products[k - 1] * prev };
        prev = cur;
        f.push(diag[k] * cur - coupling);
    }
    Ok(f)
}

fn check_tridiag_lengths(diag: usize, upper: usize, lower: usize) -> Result<(), SpectralError> {
    let expected = diag.saturating_sub(1);
    if upper != expected || lower != expected {
        return Err(SpectralError::LengthMismatch { diag, upper, lower });
    }
    Ok(())
}

/// First-kind Chebyshev polynomial by the three-term recurrence.
pub fn chebyshev_t(n: usize, x: f64) -> f64 {
    three_term(n, 1.0, x, x)
}

/// Second-kind Chebyshev polynomial by the three-term recurrence.
pub fn chebyshev_u(n: usize, x: f64) -> f64 {
    three_term(n, 1.0, 2.0 * x, x)
}

fn three_term(n: usize, p0: f64, p1: f64, x: f64) -> f64 {
    if n == 0 {
        return p0;
    }
    let (mut a, mut b) = (p0, p1);
    for _ in 1..n {
        (a, b) = (b, 2.0 * x * b - a);
    }
    b
}

/// Integer recurrence `p_{k+1} = s x p_k - p_{k-1}`.
fn three_term_coeffs(
    n: usize,
    p0: IntPolynomial,
    p1: IntPolynomial,
    s: i128,
) -> Result<IntPolynomial, SpectralError> {
    if n == 0 {
        return Ok(p0);
    }
    let sx = IntPolynomial::new(vec![0, s]);
    let (mut a, mut b) = (p0, p1);
    for _ in 1..n {
        let next = sx.checked_mul(&b)?.checked_sub(&a)?;
        a = b;
        b = next;
    }
    Ok(b)
}

/// Coefficients of `T_n(x)`.
pub fn chebyshev_t_coeffs(n: usize) -> Result<IntPolynomial, SpectralError> {
    three_term_coeffs(n, IntPolynomial::constant(1), IntPolynomial::x(), 2)
}

/// Coefficients of `U_n(x)`.
pub fn chebyshev_u_coeffs(n: usize) -> Result<IntPolynomial, SpectralError> {
    three_term_coeffs(n, IntPolynomial::constant(1), IntPolynomial::new(vec![0, 2]), 2)
}

/// Coefficients of `2 T_n(x/2)`, which are integers:
/// `L_0 = 2`, `L_1 = x`, `L_{k+1} = x L_k - L_{k-1}`.
pub fn scaled_chebyshev_t(n: usize) -> Result<IntPolynomial, SpectralError> {
    three_term_coeffs(n, IntPolynomial::constant(2), IntPolynomial::x(), 1)
}

/// Coefficients of `U_n(x/2)`: `S_0 = 1`, `S_1 = x`, `S_{k+1} = x S_k - S_{k-1}`.
pub fn scaled_chebyshev_u(n: usize) -> Result<IntPolynomial, SpectralError> {
    three_term_coeffs(n, IntPolynomial::constant(1), IntPolynomial::x(), 1)
}

/// `(2 T_m(x/2))^2`, the characteristic polynomial of a `2m`-cycle whose
/// gain product is `-1`.
pub fn cycle_charpoly_closed_form(m: usize) -> Result<IntPolynomial, SpectralError> {
    if m < 2 {
        return Err(SpectralError::HalfLengthTooSmall(m));
    }
    let l = scaled_chebyshev_t(m)?;
    l.checked_mul(&l)
}

/// Characteristic polynomial of the undirected path on `n` vertices, `U_n(x/2)`.
pub fn path_charpoly(n: usize) -> Polynomial {
    let exact = scaled_chebyshev_u(n).expect("path polynomial coefficients fit in i128");
    Polynomial::from(&exact)
}

/// Determinant of a cycle's Hermitian adjacency matrix by expanding along
/// the first vertex of the cycle.
///
/// With `H` permuted into cycle order `v_1..v_n`:
///
/// ```text
/// det H = h_11 det(H\{1}) - |h_12|^2 det(H\{1,2}) - |h_1n|^2 det(H\{1,n})
///       + (-1)^{n+1} 2 Re(prod_j h_{j,j+1})
/// ```
///
/// Every deleted submatrix is a path, so its determinant comes from the
/// tridiagonal recurrence.
pub fn cycle_det_laplace(g: &GainGraph) -> Result<f64, SpectralError> {
    let order = g.cycle_order()?;
    let n = order.len();
    let h = adjacency_matrix(g);
    let entry = |i: usize, j: usize| h.get(order[i], order[j]);
    let diag: Vec<f64> = (0..n).map(|i| entry(i, i).re).collect();
    let couplings: Vec<f64> = (0..n - 1).map(|i| entry(i, i + 1).norm_sqr()).collect();

    let path_det = |from: usize, to: usize| -> Result<f64, SpectralError> {
        // inclusive-exclusive range of cycle positions
        let seq = tridiag_det_sequence_f64(
            &diag[from..to],
            &couplings[from..to.saturating_sub(1).max(from)],
        )?;
        Ok(*seq.last().unwrap())
    };

    let gain_product = (0..n).fold(Complex64::new(1.0, 0.0), |acc, j| acc * entry(j, (j + 1) % n));
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };

    Ok(diag[0] * path_det(1, n)?
        - entry(0, 1).norm_sqr() * path_det(2, n)?
        - entry(0, n - 1).norm_sqr() * path_det(1, n - 1)?
        + sign * 2.0 * gain_product.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    CertifiedZero,
    NotZero,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::CertifiedZero => "certified_zero",
            Verdict::NotZero => "not_zero",
        }
    }
}

/// Evidence that `<b| e^{itH} |a>` vanishes for every `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTransferCertificate {
    pub source: usize,
    pub target: usize,
    /// `max_r |<b| E_r |a>|`.
    pub max_idempotent_entry: f64,
    /// `max_{0 <= k < n} |<b| (H/rho)^k |a>|` with `rho` the spectral radius.
    pub krylov_max: f64,
    pub threshold: f64,
    pub verdict: Verdict,
}

/// Certifies zero transfer from `a` to `b` when both every spectral
/// idempotent entry `<b|E_r|a>` and every Krylov entry `<b|H^k|a>`,
/// `k < n`, are within `threshold`.
pub fn zero_transfer_certificate(
    spec: &SpectralDecomposition,
    h: &HermitianMatrix,
    a: usize,
    b: usize,
    threshold: f64,
) -> Result<ZeroTransferCertificate, SpectralError> {
    let n = h.dim();
    if spec.dim() != n {
        return Err(SpectralError::DimensionMismatch {
            spec: spec.dim(),
            matrix: n,
        });
    }
    for v in [a, b] {
        if v >= n {
            return Err(EvolutionError::VertexOutOfRange { vertex: v, dim: n }.into());
        }
    }
    let max_idempotent_entry = spec
        .idempotents()
        .iter()
        .map(|e| e[(b, a)].norm())
        .fold(0.0, f64::max);

    let rho = spec.spectral_radius();
    let scaled = if rho > 0.0 {
        h.matrix() / Complex64::new(rho, 0.0)
    } else {
        h.matrix().clone()
    };
    let mut v = nalgebra::DVector::<Complex64>::zeros(n);
    v[a] = Complex64::new(1.0, 0.0);
    let mut krylov_max = 0.0f64;
    for _ in 0..n {
        krylov_max = krylov_max.max(v[b].norm());
        v = &scaled * v;
    }

    let verdict = if max_idempotent_entry <= threshold && krylov_max <= threshold {
        Verdict::CertifiedZero
    } else {
        Verdict::NotZero
    };
    Ok(ZeroTransferCertificate {
        source: a,
        target: b,
        max_idempotent_entry,
        krylov_max,
        threshold,
        verdict,
    })
}
