//! Dense complex linear algebra over explicit row-major matrices.
//!
//! Two conventions are fixed here and relied on by every other module:
//!
//! - Kronecker products index with the left factor most significant: the
//!   basis vector `e_i ⊗ e_j` of `C^a ⊗ C^b` sits at index `i·b + j`.
//! - Every numerical verdict is measured in the max-absolute-entry norm and
//!   reported as a [`Check`] carrying the achieved deviation.
//!
//! Zero-dimensional matrices (`n×0`, `0×n`) are first-class values; they show
//! up as images of zero projections and as empty cells of algebra grids.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type LinalgResult<T> = Result<T, LinalgError>;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("entry list has length {got}, expected {rows}x{cols} = {expected}")]
    EntryCount {
        rows: usize,
        cols: usize,
        got: usize,
        expected: usize,
    },
    #[error("matrix contains a non-finite entry at position {index}")]
    NonFinite { index: usize },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("not a dagger idempotent: max deviation {deviation:.3e}")]
    NotIdempotent { deviation: f64 },
    #[error("projection trace {trace:.6} is not within tolerance of an integer")]
    NonIntegralTrace { trace: f64 },
    #[error("projection has {found} eigenvalues above 1/2 but trace rounds to {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error("matrix is not an isometry: max deviation {deviation:.3e}")]
    NotIsometry { deviation: f64 },
}

/// Verdict of a single numerical check: pass/fail plus the achieved deviation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Check {
    pub pass: bool,
    pub deviation: f64,
}

impl Check {
    /// Passes iff `deviation ≤ tol`.
    pub fn from_deviation(deviation: f64, tol: f64) -> Self {
        Check {
            pass: deviation <= tol,
            deviation,
        }
    }

    /// Conjunction of two checks; keeps the worse deviation.
    pub fn and(self, other: Check) -> Check {
        Check {
            pass: self.pass && other.pass,
            deviation: self.deviation.max(other.deviation),
        }
    }
}

/// Dense complex matrix, entries stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixData", into = "MatrixData")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

/// Wire format: `{"rows": n, "cols": m, "entries": [[re, im], ...]}` row-major.
#[derive(Serialize, Deserialize)]
struct MatrixData {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixData> for ComplexMatrix {
    type Error = LinalgError;

    fn try_from(data: MatrixData) -> LinalgResult<Self> {
        let entries = data
            .entries
            .iter()
            .map(|&[re, im]| C64::new(re, im))
            .collect();
        let m = ComplexMatrix::new(data.rows, data.cols, entries)?;
        if let Some(index) = m.entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite { index });
        }
        Ok(m)
    }
}

impl From<ComplexMatrix> for MatrixData {
    fn from(m: ComplexMatrix) -> Self {
        MatrixData {
            rows: m.rows,
            cols: m.cols,
            entries: m.entries.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> LinalgResult<Self> {
        if entries.len() != rows * cols {
            return Err(LinalgError::EntryCount {
                rows,
                cols,
                got: entries.len(),
                expected: rows * cols,
            });
        }
        Ok(ComplexMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            entries: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, entries }
    }

    /// Standard basis column vector `e_i` of `C^n`.
    pub fn basis_column(n: usize, i: usize) -> Self {
        assert!(i < n, "basis index {i} out of range for C^{n}");
        Self::from_fn(n, 1, |r, _| {
            if r == i {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        assert_eq!(self.rows, self.cols, "trace of a non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Kronecker product; the left factor is the most significant index.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut entries = vec![C64::new(0.0, 0.0); rows * cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.entries[i * self.cols + j];
                for k in 0..other.rows {
                    let row = i * other.rows + k;
                    for l in 0..other.cols {
                        let col = j * other.cols + l;
                        entries[row * cols + col] = a * other.entries[k * other.cols + l];
                    }
                }
            }
        }
        ComplexMatrix { rows, cols, entries }
    }

    /// Largest absolute value of any entry; 0 for empty matrices.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Reshape a `r×c` matrix into an `rc×1` column, row-major.
    pub fn vec_row_major(&self) -> Self {
        ComplexMatrix {
            rows: self.rows * self.cols,
            cols: 1,
            entries: self.entries.clone(),
        }
    }

    /// Inverse of [`vec_row_major`](Self::vec_row_major).
    pub fn unvec_row_major(&self, rows: usize, cols: usize) -> LinalgResult<Self> {
        if self.cols != 1 || self.rows != rows * cols {
            return Err(LinalgError::EntryCount {
                rows,
                cols,
                got: self.entries.len(),
                expected: rows * cols,
            });
        }
        Ok(ComplexMatrix {
            rows,
            cols,
            entries: self.entries.clone(),
        })
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "product of {}x{} with {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut entries = vec![C64::new(0.0, 0.0); self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entries[i * self.cols + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    entries[i * rhs.cols + j] += a * rhs.entries[k * rhs.cols + j];
                }
            }
        }
        ComplexMatrix {
            rows: self.rows,
            cols: rhs.cols,
            entries,
        }
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sum of mismatched shapes");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "difference of mismatched shapes");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Max-absolute-entry distance between two same-shaped matrices.
pub fn deviation(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).max_norm()
}

/// The swap `C^a ⊗ C^b → C^b ⊗ C^a`, `e_i ⊗ e_j ↦ e_j ⊗ e_i`.
pub fn swap(a: usize, b: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(a * b, a * b);
    for i in 0..a {
        for j in 0..b {
            m.entries[(j * a + i) * a * b + (i * b + j)] = C64::new(1.0, 0.0);
        }
    }
    m
}

/// Permutation of tensor factors: output slot `s` carries input factor `perm[s]`.
///
/// `dims` are the input factor dimensions; `perm` must be a permutation of
/// `0..dims.len()`.
pub fn tensor_permutation(dims: &[usize], perm: &[usize]) -> ComplexMatrix {
    assert_eq!(dims.len(), perm.len());
    let total: usize = dims.iter().product();
    let mut m = ComplexMatrix::zeros(total, total);
    let out_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    for col in 0..total {
        // Decompose the input index, left factor most significant.
        let mut idx = vec![0usize; dims.len()];
        let mut rest = col;
        for (k, &d) in dims.iter().enumerate().rev() {
            idx[k] = rest % d.max(1);
            rest /= d.max(1);
        }
        let mut row = 0usize;
        for (s, &p) in perm.iter().enumerate() {
            row = row * out_dims[s] + idx[p];
        }
        m.entries[row * total + col] = C64::new(1.0, 0.0);
    }
    m
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized as `(a + a†)/2` before decomposing, so callers
/// must certify Hermiticity separately if they care about it. Returns
/// eigenvalues in descending order with matching orthonormal eigenvector
/// columns.
pub fn hermitian_eigen(a: &ComplexMatrix) -> LinalgResult<(Vec<f64>, ComplexMatrix)> {
    if a.rows != a.cols {
        return Err(LinalgError::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    if n == 0 {
        return Ok((Vec::new(), ComplexMatrix::zeros(0, 0)));
    }
    let herm = (a + &a.dagger()).scale(C64::new(0.5, 0.0));
    let dm = DMatrix::from_fn(n, n, |i, j| herm.get(i, j));
    let eig = dm.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// True iff `a` is Hermitian within `tol` and its eigenvalues are all `≥ −tol`.
pub fn is_psd(a: &ComplexMatrix, tol: f64) -> LinalgResult<bool> {
    if a.rows != a.cols {
        return Err(LinalgError::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    if deviation(a, &a.dagger()) > tol {
        return Ok(false);
    }
    let (values, _) = hermitian_eigen(a)?;
    Ok(values.iter().all(|&v| v >= -tol))
}

/// Isometry: a matrix `i` with `i†·i = id`, the image half of a split projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct Isometry {
    matrix: ComplexMatrix,
}

impl Isometry {
    pub fn new(matrix: ComplexMatrix, tol: f64) -> LinalgResult<Self> {
        let gram = &matrix.dagger() * &matrix;
        let dev = deviation(&gram, &ComplexMatrix::identity(matrix.cols()));
        if matrix.rows() < matrix.cols() || dev > tol {
            return Err(LinalgError::NotIsometry { deviation: dev });
        }
        Ok(Isometry { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Number of columns: the dimension of the split image.
    pub fn rank(&self) -> usize {
        self.matrix.cols()
    }
}

impl TryFrom<ComplexMatrix> for Isometry {
    type Error = LinalgError;

    fn try_from(matrix: ComplexMatrix) -> LinalgResult<Self> {
        Isometry::new(matrix, crate::DEFAULT_TOL)
    }
}

impl From<Isometry> for ComplexMatrix {
    fn from(i: Isometry) -> ComplexMatrix {
        i.matrix
    }
}

/// Scale each column so its first entry of modulus `> tol` is real positive.
pub(crate) fn canonicalize_columns(m: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let mut out = m.clone();
    for j in 0..m.cols() {
        let pivot = (0..m.rows()).map(|i| m.get(i, j)).find(|z| z.norm() > tol);
        if let Some(z) = pivot {
            let phase = z.conj() / z.norm();
            for i in 0..m.rows() {
                out.entries[i * m.cols() + j] *= phase;
            }
        }
    }
    out
}

/// Split a dagger idempotent `p = p² = p†` as `p = i·i†` with `i†·i = id`.
///
/// The rank is `round(trace p)`; columns of `i` are the eigenvectors of `p`
/// with eigenvalue above 1/2, ordered by descending eigenvalue and
/// phase-canonicalized so downstream runs are deterministic.
pub fn split_projection(p: &ComplexMatrix, tol: f64) -> LinalgResult<Isometry> {
    if p.rows() != p.cols() {
        return Err(LinalgError::NotSquare {
            rows: p.rows(),
            cols: p.cols(),
        });
    }
    let idem_dev = deviation(&(p * p), p).max(deviation(&p.dagger(), p));
    if idem_dev > tol {
        return Err(LinalgError::NotIdempotent { deviation: idem_dev });
    }
    let trace = p.trace();
    let rank = trace.re.round();
    if (trace.re - rank).abs() > tol.max(1e-6) || trace.im.abs() > tol.max(1e-6) || rank < 0.0 {
        return Err(LinalgError::NonIntegralTrace { trace: trace.re });
    }
    let rank = rank as usize;
    let (values, vectors) = hermitian_eigen(p)?;
    let found = values.iter().filter(|&&v| v > 0.5).count();
    if found != rank {
        return Err(LinalgError::RankMismatch {
            expected: rank,
            found,
        });
    }
    // Eigenvalues are sorted descending, so the range basis is the first `rank` columns.
    let image = ComplexMatrix::from_fn(p.rows(), rank, |i, j| vectors.get(i, j));
    Isometry::new(canonicalize_columns(&image, tol), tol.max(1e-7) * 10.0)
}
