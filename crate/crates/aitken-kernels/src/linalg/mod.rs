//! Dense real symmetric small-matrix arithmetic and the Hadamard/Schur
//! calculus used by every kernel construction and check in this crate.
//!
//! Matrices here are small (a few hundred rows at most), so the module is
//! self-contained: a cyclic Jacobi eigensolver, an unblocked Cholesky, and
//! entrywise products. No external numerics.

mod jacobi;

use serde::Serialize;

use crate::rng::substream;
use rand::Rng;

/// Asymmetry above this (relative to the largest entry) is rejected instead
/// of silently averaged away.
pub const ASYMMETRY_REJECT: f64 = 1e-8;

/// Errors from the dense matrix layer.
#[derive(Debug, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix has non-finite entries")]
    InvalidMatrix,
    /// A failed Cholesky pivot. This is a signal (the matrix is not positive
    /// definite), not a crash.
    #[error("not positive definite: pivot {pivot:.6e} at index {index}")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("shape mismatch: {left}x{left} vs {right}x{right}")]
    Shape { left: usize, right: usize },
    #[error("Hadamard exponential overflow: entry {entry:.3e} at ({row},{col})")]
    Range { row: usize, col: usize, entry: f64 },
    #[error("asymmetry {asymmetry:.3e} exceeds {tol:.3e}")]
    Asymmetric { asymmetry: f64, tol: f64 },
    #[error("Jacobi sweep limit reached ({sweeps} sweeps)")]
    NoConvergence { sweeps: usize },
}

/// A real symmetric matrix, stored dense row-major.
///
/// Construction symmetrizes the input as `(M + Mᵀ)/2` and records the largest
/// asymmetry seen; inputs more asymmetric than [`ASYMMETRY_REJECT`] relative
/// to the matrix scale are rejected. Kernel evaluations in floating point are
/// not exactly symmetric, which is why averaging (rather than trusting one
/// triangle) is the constructor contract.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    entries: Vec<f64>,
    asymmetry: f64,
}

impl SymMatrix {
    /// Builds from a row-major `dim x dim` slice, symmetrizing by averaging.
    pub fn new(dim: usize, entries: &[f64]) -> Result<Self, LinalgError> {
        assert!(dim >= 1, "dim must be >= 1");
        assert_eq!(entries.len(), dim * dim, "entry count must be dim*dim");
        if !entries.iter().all(|v| v.is_finite()) {
            return Err(LinalgError::InvalidMatrix);
        }
        let scale = entries.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let mut sym = vec![0.0; dim * dim];
        let mut asym: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let a = entries[i * dim + j];
                let b = entries[j * dim + i];
                asym = asym.max((a - b).abs());
                sym[i * dim + j] = 0.5 * (a + b);
            }
        }
        let tol = ASYMMETRY_REJECT * scale.max(1.0);
        if asym > tol {
            return Err(LinalgError::Asymmetric {
                asymmetry: asym,
                tol,
            });
        }
        Ok(Self {
            dim,
            entries: sym,
            asymmetry: asym,
        })
    }

    /// Builds from an entry function; `f(i, j)` and `f(j, i)` are averaged.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self, LinalgError> {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                entries[i * dim + j] = f(i, j);
            }
        }
        Self::new(dim, &entries)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
            asymmetry: 0.0,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn scaled_identity(dim: usize, a: f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = a;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let dim = values.len();
        let mut m = Self::zeros(dim);
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * dim + i] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    /// Sets `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.dim + j] = v;
        self.entries[j * self.dim + i] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.entries
    }

    /// Asymmetry recorded at construction (exactly 0 for built matrices).
    pub fn recorded_asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::Shape {
                left: self.dim,
                right: other.dim,
            });
        }
        let entries: Vec<f64> = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            dim: self.dim,
            entries,
            asymmetry: 0.0,
        })
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|v| a * v).collect(),
            asymmetry: 0.0,
        }
    }

    /// Quadratic form `uᵀ M u`.
    pub fn quad_form(&self, u: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.dim);
        let mut total = 0.0;
        for i in 0..self.dim {
            let mut row = 0.0;
            for j in 0..self.dim {
                row += self.get(i, j) * u[j];
            }
            total += u[i] * row;
        }
        total
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }
}

/// A general dense matrix; used for Gram blocks (which are not symmetric for
/// off-diagonal index pairs) and triangular factors.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Spectral classification of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Pd,
    Psd,
    Indefinite,
}

/// Tolerances for the PD/PSD split.
///
/// `tol_psd` is relative to `max(1, spectral radius)` — double-precision Gram
/// assembly noise scales with the matrix. `tol_pd` is absolute.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub tol_psd: f64,
    pub tol_pd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_psd: 1e-8,
            tol_pd: 1e-10,
        }
    }
}

/// Eigenvalues of a symmetric matrix with the classification attached.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    /// Sorted ascending.
    pub eigenvalues: Vec<f64>,
    pub min_eig: f64,
    pub max_abs_eig: f64,
    pub classification: Classification,
    /// The PSD threshold actually applied: `-tol_psd * max(1, max_abs_eig)`.
    pub psd_floor: f64,
    pub tol_pd: f64,
}

impl SpectralReport {
    pub fn is_psd_or_better(&self) -> bool {
        matches!(self.classification, Classification::Pd | Classification::Psd)
    }
}

/// Eigenvalues of `m` by cyclic Jacobi rotations.
///
/// Classification: PD iff `min_eig > tol_pd`; PSD iff
/// `min_eig >= -tol_psd * max(1, max_abs_eig)`; otherwise INDEFINITE.
pub fn eig_sym(m: &SymMatrix, tols: Tolerances) -> Result<SpectralReport, LinalgError> {
    assert!(tols.tol_psd > 0.0 && tols.tol_pd > 0.0, "tolerances must be > 0");
    if !m.data().iter().all(|v| v.is_finite()) {
        return Err(LinalgError::InvalidMatrix);
    }
    let (mut eigenvalues, _) = jacobi::jacobi_eigen(m.data().to_vec(), m.dim(), false)?;
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let min_eig = eigenvalues[0];
    let max_abs_eig = eigenvalues.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let psd_floor = -tols.tol_psd * max_abs_eig.max(1.0);
    let classification = if min_eig > tols.tol_pd {
        Classification::Pd
    } else if min_eig >= psd_floor {
        Classification::Psd
    } else {
        Classification::Indefinite
    };
    Ok(SpectralReport {
        eigenvalues,
        min_eig,
        max_abs_eig,
        classification,
        psd_floor,
        tol_pd: tols.tol_pd,
    })
}

/// Eigenvalues and orthonormal eigenvectors, sorted ascending.
///
/// Column `k` of the returned matrix is the eigenvector for `values[k]`.
pub fn eig_sym_vectors(m: &SymMatrix) -> Result<(Vec<f64>, Mat), LinalgError> {
    if !m.data().iter().all(|v| v.is_finite()) {
        return Err(LinalgError::InvalidMatrix);
    }
    let n = m.dim();
    let (values, vectors) = jacobi::jacobi_eigen(m.data().to_vec(), n, true)?;
    let vectors = vectors.expect("vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let sorted_values: Vec<f64> = order.iter().map(|&k| values[k]).collect();
    let sorted_vectors = Mat::from_fn(n, n, |i, j| vectors[i * n + order[j]]);
    Ok((sorted_values, sorted_vectors))
}

/// Lower-triangular Cholesky factor `L` with `L Lᵀ = M`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    dim: usize,
    lower: Vec<f64>,
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self) -> Mat {
        let n = self.dim;
        Mat::from_fn(n, n, |i, j| if j <= i { self.lower[i * n + j] } else { 0.0 })
    }

    /// Determinant of the factored matrix: product of squared pivots.
    pub fn det(&self) -> f64 {
        let n = self.dim;
        (0..n).map(|i| self.lower[i * n + i]).product::<f64>().powi(2)
    }

    /// Solves `M x = b` by forward then backward substitution.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim;
        debug_assert_eq!(b.len(), n);
        let l = &self.lower;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b[i];
            for j in 0..i {
                s -= l[i * n + j] * y[j];
            }
            y[i] = s / l[i * n + i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in (i + 1)..n {
                s -= l[j * n + i] * x[j];
            }
            x[i] = s / l[i * n + i];
        }
        x
    }

    pub fn inverse(&self) -> SymMatrix {
        let n = self.dim;
        let mut inv = Mat::zeros(n, n);
        for k in 0..n {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            let col = self.solve(&e);
            for i in 0..n {
                inv.set(i, k, col[i]);
            }
        }
        SymMatrix::from_fn(n, |i, j| 0.5 * (inv.get(i, j) + inv.get(j, i)))
            .expect("inverse of a PD matrix is finite and symmetric")
    }
}

/// Cholesky factorization; fails with [`LinalgError::NotPositiveDefinite`]
/// when a pivot is not strictly positive. The failure is the fast PD test.
pub fn cholesky_pd(m: &SymMatrix) -> Result<CholeskyFactor, LinalgError> {
    let n = m.dim();
    if !m.data().iter().all(|v| v.is_finite()) {
        return Err(LinalgError::InvalidMatrix);
    }
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(LinalgError::NotPositiveDefinite { index: i, pivot: s });
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(CholeskyFactor { dim: n, lower: l })
}

/// Determinant and inverse of a PD matrix, both from its Cholesky factor.
pub fn det_and_inverse(m: &SymMatrix) -> Result<(f64, SymMatrix), LinalgError> {
    let chol = cholesky_pd(m)?;
    Ok((chol.det(), chol.inverse()))
}

/// Entrywise (Schur) product.
pub fn schur_product(a: &SymMatrix, b: &SymMatrix) -> Result<SymMatrix, LinalgError> {
    if a.dim() != b.dim() {
        return Err(LinalgError::Shape {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let entries: Vec<f64> = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| x * y)
        .collect();
    SymMatrix::new(a.dim(), &entries)
}

/// Hadamard exponential of `-A`: the matrix with entries `exp(-A[i][j])`.
///
/// When `A` is of negative type the result is positive semi-definite, and it
/// is positive definite exactly when `A[i][i] + A[j][j] < 2 A[i][j]` for all
/// `i != j`.
pub fn hadamard_exp_neg(a: &SymMatrix) -> Result<SymMatrix, LinalgError> {
    let n = a.dim();
    for i in 0..n {
        for j in 0..n {
            let v = a.get(i, j);
            if !v.is_finite() {
                return Err(LinalgError::InvalidMatrix);
            }
            if v < -700.0 {
                return Err(LinalgError::Range {
                    row: i,
                    col: j,
                    entry: v,
                });
            }
        }
    }
    SymMatrix::from_fn(n, |i, j| (-a.get(i, j)).exp())
}

/// Witness of a failed negative-type check: a zero-sum coefficient vector on
/// which the quadratic form is positive.
#[derive(Debug, Clone, Serialize)]
pub struct NegativeTypeWitness {
    pub coefficients: Vec<f64>,
    pub value: f64,
}

/// Result of sampling the quadratic form of a symmetric matrix over the
/// zero-sum hyperplane.
#[derive(Debug, Clone, Serialize)]
pub struct NegativeTypeReport {
    pub pass: bool,
    /// Largest form value seen (a true negative-type matrix keeps this <= 0
    /// up to roundoff slack).
    pub worst_value: f64,
    pub witness: Option<NegativeTypeWitness>,
    pub trials: usize,
    pub seed: u64,
}

/// Tests whether `cᵀ M c <= 0` for coefficient vectors with `Σc = 0`.
///
/// Evaluates the form on a deterministic basis of the zero-sum hyperplane
/// (`e_i - e_{i+1}`, normalized) and on `trials` random unit vectors
/// projected onto the hyperplane. Roundoff slack is `1e-9 * max(1, |M|_max)`.
pub fn negative_type_check(
    m: &SymMatrix,
    trials: usize,
    rng_seed: u64,
) -> Result<NegativeTypeReport, LinalgError> {
    assert!(trials >= 1, "trials must be >= 1");
    if !m.data().iter().all(|v| v.is_finite()) {
        return Err(LinalgError::InvalidMatrix);
    }
    let n = m.dim();
    let slack = 1e-9 * m.max_abs().max(1.0);
    let mut worst_value = f64::NEG_INFINITY;
    let mut witness = None;

    let consider = |c: &[f64], worst: &mut f64, witness: &mut Option<NegativeTypeWitness>| {
        let v = m.quad_form(c);
        if v > *worst {
            *worst = v;
            if v > slack {
                *witness = Some(NegativeTypeWitness {
                    coefficients: c.to_vec(),
                    value: v,
                });
            }
        }
    };

    // Deterministic hyperplane basis.
    for i in 0..n.saturating_sub(1) {
        let mut c = vec![0.0; n];
        c[i] = std::f64::consts::FRAC_1_SQRT_2;
        c[i + 1] = -std::f64::consts::FRAC_1_SQRT_2;
        consider(&c, &mut worst_value, &mut witness);
    }
    // Random directions projected onto Σc = 0 and normalized.
    let mut rng = substream(rng_seed, 0x6e74_7970); // "ntyp"
    let mut done = 0;
    while done < trials {
        let mut c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mean = c.iter().sum::<f64>() / n as f64;
        for v in c.iter_mut() {
            *v -= mean;
        }
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        for v in c.iter_mut() {
            *v /= norm;
        }
        consider(&c, &mut worst_value, &mut witness);
        done += 1;
    }
    if n == 1 {
        // The hyperplane is trivial; the form is vacuously nonpositive.
        worst_value = 0.0;
    }
    Ok(NegativeTypeReport {
        pass: worst_value <= slack,
        worst_value,
        witness,
        trials,
        seed: rng_seed,
    })
}

/// The `Np x Np` block matrix assembled from a matrix-valued kernel over a
/// point set, in the fixed point-major layout: flat index `= mu * p + m` for
/// point `mu` and component `m`.
#[derive(Debug, Clone)]
pub struct BlockGram {
    p: usize,
    n_points: usize,
    /// `p*p` blocks, block `(m, n)` at index `m*p + n`, each `N x N`.
    blocks: Vec<Mat>,
    flattened: SymMatrix,
}

impl BlockGram {
    /// Assembles blocks into the flattened matrix, enforcing the
    /// Hermitian-kernel pairing `blocks[m][n][mu][nu] == blocks[n][m][nu][mu]`
    /// (averaged; rejected above the [`SymMatrix`] asymmetry budget).
    pub fn from_blocks(p: usize, n_points: usize, blocks: Vec<Mat>) -> Result<Self, LinalgError> {
        assert_eq!(blocks.len(), p * p, "need p*p blocks");
        for b in &blocks {
            assert_eq!(b.rows(), n_points);
            assert_eq!(b.cols(), n_points);
        }
        let dim = n_points * p;
        let mut flat = vec![0.0; dim * dim];
        for m in 0..p {
            for n in 0..p {
                let block = &blocks[m * p + n];
                for mu in 0..n_points {
                    for nu in 0..n_points {
                        flat[(mu * p + m) * dim + (nu * p + n)] = block.get(mu, nu);
                    }
                }
            }
        }
        let flattened = SymMatrix::new(dim, &flat)?;
        // Write the symmetrized values back so blocks and flattened agree
        // exactly.
        let mut blocks = blocks;
        for m in 0..p {
            for n in 0..p {
                let block = &mut blocks[m * p + n];
                for mu in 0..n_points {
                    for nu in 0..n_points {
                        block.set(mu, nu, flattened.get(mu * p + m, nu * p + n));
                    }
                }
            }
        }
        Ok(Self {
            p,
            n_points,
            blocks,
            flattened,
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn block(&self, m: usize, n: usize) -> &Mat {
        &self.blocks[m * self.p + n]
    }

    pub fn flattened(&self) -> &SymMatrix {
        &self.flattened
    }

    /// Point-major flat index of (point `mu`, component `m`).
    pub fn flat_index(&self, mu: usize, m: usize) -> usize {
        mu * self.p + m
    }
}

/// Sums a slice by recursive pairwise halving; the fixed association order
/// makes mixture sums bit-reproducible.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}
