//! Finite-dimensional C*-algebras and completely positive maps.
//!
//! An algebra is a list of matrix-block sizes `[k₁,…,k_m]`; its elements are
//! coordinate vectors of length `d = Σ k_i²` in the concatenated matrix-units
//! basis, block by block and row-major within a block. That basis is
//! orthonormal for the Hilbert-Schmidt pairing, so the coordinate dagger of a
//! map matrix is its Hilbert-Schmidt adjoint.
//!
//! Complete positivity is decided blockwise: a linear map is CP iff the Choi
//! matrix of every (domain block, codomain block) component is positive
//! semidefinite, and a Kraus witness is assembled from Choi square roots.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{deviation, hermitian_eigen, Check, ComplexMatrix};
use num_complex::Complex64 as C64;

pub type CpResult<T> = Result<T, CpError>;

#[derive(Debug, Error)]
pub enum CpError {
    #[error("algebra blocks must all have size at least 1")]
    EmptyBlock,
    #[error("map must be {expected_rows}x{expected_cols} on element coordinates, got {rows}x{cols}")]
    MapShape {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("algebras do not match: {context}")]
    AlgebraMismatch { context: String },
    #[error("map is not completely positive: Choi block ({dom_block},{cod_block}) has minimum eigenvalue {min_eigenvalue:.6e}")]
    NotCompletelyPositive {
        dom_block: usize,
        cod_block: usize,
        min_eigenvalue: f64,
    },
    #[error("operation requires commutative algebras, got blocks of size {max_block}")]
    NotCommutative { max_block: usize },
}

/// A finite-dimensional C*-algebra `⊕ M_{k_i}`, recorded by its block sizes.
///
/// The empty block list is the zero algebra; it appears as a degenerate cell
/// in algebra grids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AlgebraData", into = "AlgebraData")]
pub struct CStarAlgebra {
    blocks: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct AlgebraData {
    blocks: Vec<usize>,
}

impl TryFrom<AlgebraData> for CStarAlgebra {
    type Error = CpError;

    fn try_from(data: AlgebraData) -> CpResult<Self> {
        CStarAlgebra::new(data.blocks)
    }
}

impl From<CStarAlgebra> for AlgebraData {
    fn from(a: CStarAlgebra) -> Self {
        AlgebraData { blocks: a.blocks }
    }
}

impl CStarAlgebra {
    pub fn new(blocks: Vec<usize>) -> CpResult<Self> {
        if blocks.contains(&0) {
            return Err(CpError::EmptyBlock);
        }
        Ok(CStarAlgebra { blocks })
    }

    /// The scalars `C`.
    pub fn scalar() -> Self {
        CStarAlgebra { blocks: vec![1] }
    }

    /// The commutative algebra `C^n`.
    pub fn classical(n: usize) -> Self {
        CStarAlgebra { blocks: vec![1; n] }
    }

    /// A single matrix block `M_k`.
    pub fn matrix(k: usize) -> Self {
        assert!(k >= 1, "matrix block must have size at least 1");
        CStarAlgebra { blocks: vec![k] }
    }

    /// The zero algebra (no blocks, dimension 0).
    pub fn zero() -> Self {
        CStarAlgebra { blocks: Vec::new() }
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    /// Element-space dimension `Σ k_i²`.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|&k| k * k).sum()
    }

    /// Dimension `Σ k_i` of the underlying Hilbert space `⊕ C^{k_i}`.
    pub fn hilbert_dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Coordinate offset of block `i`.
    pub fn block_offset(&self, i: usize) -> usize {
        self.blocks[..i].iter().map(|&k| k * k).sum()
    }

    pub fn is_commutative(&self) -> bool {
        self.blocks.iter().all(|&k| k == 1)
    }

    /// Tensor product: blocks are all pairwise products `k_i·l_j`, row-major.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut blocks = Vec::with_capacity(self.blocks.len() * other.blocks.len());
        for &k in &self.blocks {
            for &l in &other.blocks {
                blocks.push(k * l);
            }
        }
        CStarAlgebra { blocks }
    }

    /// Direct sum: concatenated blocks.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut blocks = self.blocks.clone();
        blocks.extend_from_slice(&other.blocks);
        CStarAlgebra { blocks }
    }
}

/// The trace functional as a row vector on element coordinates.
pub fn trace_row(a: &CStarAlgebra) -> ComplexMatrix {
    let d = a.dim();
    let mut entries = vec![C64::new(0.0, 0.0); d];
    let mut offset = 0;
    for &k in a.blocks() {
        for x in 0..k {
            entries[offset + x * k + x] = C64::new(1.0, 0.0);
        }
        offset += k * k;
    }
    ComplexMatrix::new(1, d, entries).expect("shape is consistent by construction")
}

/// Coordinates of the unit element `⊕ id_{k_i}`.
pub fn unit_element(a: &CStarAlgebra) -> ComplexMatrix {
    trace_row(a).dagger()
}

/// Assemble element coordinates into the block-diagonal operator on `⊕ C^{k_i}`.
pub fn element_as_operator(a: &CStarAlgebra, coords: &ComplexMatrix) -> CpResult<ComplexMatrix> {
    if coords.rows() != a.dim() || coords.cols() != 1 {
        return Err(CpError::MapShape {
            expected_rows: a.dim(),
            expected_cols: 1,
            rows: coords.rows(),
            cols: coords.cols(),
        });
    }
    let h = a.hilbert_dim();
    let mut entries = vec![C64::new(0.0, 0.0); h * h];
    let mut coord_offset = 0;
    let mut row_offset = 0;
    for &k in a.blocks() {
        for x in 0..k {
            for y in 0..k {
                entries[(row_offset + x) * h + (row_offset + y)] =
                    coords.get(coord_offset + x * k + y, 0);
            }
        }
        coord_offset += k * k;
        row_offset += k;
    }
    Ok(ComplexMatrix::new(h, h, entries).expect("shape is consistent by construction"))
}

/// True iff the coordinates describe a positive element of the algebra.
pub fn is_positive_element(a: &CStarAlgebra, coords: &ComplexMatrix, tol: f64) -> CpResult<bool> {
    let op = element_as_operator(a, coords)?;
    Ok(crate::linalg::is_psd(&op, tol).expect("operator is square by construction"))
}

/// Read an operator on `⊕ C^{k_i}` back into element coordinates; the
/// operator must be supported on the diagonal blocks within `tol`.
pub fn operator_as_element(
    a: &CStarAlgebra,
    op: &ComplexMatrix,
    tol: f64,
) -> CpResult<ComplexMatrix> {
    let h = a.hilbert_dim();
    if op.rows() != h || op.cols() != h {
        return Err(CpError::MapShape {
            expected_rows: h,
            expected_cols: h,
            rows: op.rows(),
            cols: op.cols(),
        });
    }
    let mut coords = vec![C64::new(0.0, 0.0); a.dim()];
    let mut coord_offset = 0;
    let mut row_offset = 0;
    for &k in a.blocks() {
        for x in 0..k {
            for y in 0..k {
                coords[coord_offset + x * k + y] = op.get(row_offset + x, row_offset + y);
            }
        }
        coord_offset += k * k;
        row_offset += k;
    }
    let element = ComplexMatrix::new(a.dim(), 1, coords).expect("shape is consistent by construction");
    let rebuilt = element_as_operator(a, &element)?;
    let leakage = deviation(op, &rebuilt);
    if leakage > tol {
        return Err(CpError::AlgebraMismatch {
            context: format!(
                "operator has weight {leakage:.3e} outside the diagonal blocks of {:?}",
                a.blocks()
            ),
        });
    }
    Ok(element)
}

/// A linear map between C*-algebras on element coordinates.
///
/// Construction validates shapes only; complete positivity is certified
/// separately by [`is_completely_positive`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CpMapData", into = "CpMapData")]
pub struct CPMap {
    dom: CStarAlgebra,
    cod: CStarAlgebra,
    map: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
struct CpMapData {
    dom: CStarAlgebra,
    cod: CStarAlgebra,
    map: ComplexMatrix,
}

impl TryFrom<CpMapData> for CPMap {
    type Error = CpError;

    fn try_from(data: CpMapData) -> CpResult<Self> {
        CPMap::new(data.dom, data.cod, data.map)
    }
}

impl From<CPMap> for CpMapData {
    fn from(f: CPMap) -> Self {
        CpMapData {
            dom: f.dom,
            cod: f.cod,
            map: f.map,
        }
    }
}

impl CPMap {
    pub fn new(dom: CStarAlgebra, cod: CStarAlgebra, map: ComplexMatrix) -> CpResult<Self> {
        if map.rows() != cod.dim() || map.cols() != dom.dim() {
            return Err(CpError::MapShape {
                expected_rows: cod.dim(),
                expected_cols: dom.dim(),
                rows: map.rows(),
                cols: map.cols(),
            });
        }
        Ok(CPMap { dom, cod, map })
    }

    pub fn identity(a: &CStarAlgebra) -> Self {
        CPMap {
            dom: a.clone(),
            cod: a.clone(),
            map: ComplexMatrix::identity(a.dim()),
        }
    }

    pub fn zero(dom: &CStarAlgebra, cod: &CStarAlgebra) -> Self {
        CPMap {
            dom: dom.clone(),
            cod: cod.clone(),
            map: ComplexMatrix::zeros(cod.dim(), dom.dim()),
        }
    }

    pub fn dom(&self) -> &CStarAlgebra {
        &self.dom
    }

    pub fn cod(&self) -> &CStarAlgebra {
        &self.cod
    }

    pub fn map(&self) -> &ComplexMatrix {
        &self.map
    }
}

/// Choi matrix of one (domain block, codomain block) component.
#[derive(Debug, Clone)]
pub struct ChoiBlock {
    pub dom_block: usize,
    pub cod_block: usize,
    pub choi: ComplexMatrix,
}

/// For each block pair `(i,j)`, the Choi matrix `Σ_ab e_ab ⊗ f_ji(e_ab)` of
/// the component `M_{k_i} → M_{l_j}`.
pub fn choi_blocks(f: &CPMap) -> Vec<ChoiBlock> {
    let mut out = Vec::new();
    for (i, &k) in f.dom().blocks().iter().enumerate() {
        let dom_off = f.dom().block_offset(i);
        for (j, &l) in f.cod().blocks().iter().enumerate() {
            let cod_off = f.cod().block_offset(j);
            let choi = ComplexMatrix::from_fn(k * l, k * l, |row, col| {
                let (a, c) = (row / l, row % l);
                let (b, d) = (col / l, col % l);
                f.map().get(cod_off + c * l + d, dom_off + a * k + b)
            });
            out.push(ChoiBlock {
                dom_block: i,
                cod_block: j,
                choi,
            });
        }
    }
    out
}

/// Outcome of the complete-positivity test.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CpReport {
    pub pass: bool,
    /// Smallest Choi eigenvalue over all block pairs (0 when there are none).
    pub min_eigenvalue: f64,
    /// Worst Hermiticity deviation of any Choi block.
    pub hermiticity: f64,
    /// Block pair achieving the minimum eigenvalue.
    pub worst_block: Option<(usize, usize)>,
}

/// Decide complete positivity: every Choi block must be PSD within `tol`.
pub fn is_completely_positive(f: &CPMap, tol: f64) -> CpReport {
    let mut min_eigenvalue = f64::INFINITY;
    let mut hermiticity = 0.0f64;
    let mut worst_block = None;
    for block in choi_blocks(f) {
        hermiticity = hermiticity.max(deviation(&block.choi, &block.choi.dagger()));
        let (values, _) = hermitian_eigen(&block.choi).expect("Choi blocks are square");
        let low = values.last().copied().unwrap_or(0.0);
        if low < min_eigenvalue {
            min_eigenvalue = low;
            worst_block = Some((block.dom_block, block.cod_block));
        }
    }
    if !min_eigenvalue.is_finite() {
        min_eigenvalue = 0.0;
    }
    CpReport {
        pass: min_eigenvalue >= -tol && hermiticity <= tol,
        min_eigenvalue,
        hermiticity,
        worst_block,
    }
}

/// Kraus operators for one block pair, extracted from a Choi square root.
#[derive(Debug, Clone)]
pub struct KrausBlock {
    pub dom_block: usize,
    pub cod_block: usize,
    /// Operators `K_μ: C^{k_i} → C^{l_j}` with `x ↦ Σ_μ K_μ x K_μ†`.
    pub operators: Vec<ComplexMatrix>,
    /// Number of Choi eigenvalues below the tolerance, truncated from the rank.
    pub dropped: usize,
}

/// Kraus-style witness of complete positivity; see [`cp_witness`].
#[derive(Debug, Clone)]
pub struct CpWitness {
    pub blocks: Vec<KrausBlock>,
    dom: CStarAlgebra,
    cod: CStarAlgebra,
}

impl CpWitness {
    /// Rebuild the CP map the witness factors; the round-trip residual against
    /// the original map certifies the witness.
    pub fn reconstruct(&self) -> CPMap {
        let mut map = ComplexMatrix::zeros(self.cod.dim(), self.dom.dim());
        for block in &self.blocks {
            let k = self.dom.blocks()[block.dom_block];
            let l = self.cod.blocks()[block.cod_block];
            let dom_off = self.dom.block_offset(block.dom_block);
            let cod_off = self.cod.block_offset(block.cod_block);
            let mut component = ComplexMatrix::zeros(l * l, k * k);
            for op in &block.operators {
                component = &component + &op.kron(&op.conj());
            }
            let embedded = ComplexMatrix::from_fn(self.cod.dim(), self.dom.dim(), |r, c| {
                if r >= cod_off && r < cod_off + l * l && c >= dom_off && c < dom_off + k * k {
                    component.get(r - cod_off, c - dom_off)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            map = &map + &embedded;
        }
        CPMap {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            map,
        }
    }
}

/// Extract a Kraus witness from the Choi square roots of a certified CP map.
///
/// Eigenvalues at or below `tol` are dropped (rank truncation, recorded per
/// block); each operator is phase-canonicalized.
pub fn cp_witness(f: &CPMap, tol: f64) -> CpResult<CpWitness> {
    let report = is_completely_positive(f, tol);
    if !report.pass {
        let (dom_block, cod_block) = report.worst_block.unwrap_or((0, 0));
        return Err(CpError::NotCompletelyPositive {
            dom_block,
            cod_block,
            min_eigenvalue: report.min_eigenvalue,
        });
    }
    let mut blocks = Vec::new();
    for block in choi_blocks(f) {
        let k = f.dom().blocks()[block.dom_block];
        let l = f.cod().blocks()[block.cod_block];
        let (values, vectors) = hermitian_eigen(&block.choi).expect("Choi blocks are square");
        let vectors = crate::linalg::canonicalize_columns(&vectors, tol);
        let mut operators = Vec::new();
        let mut dropped = 0;
        for (mu, &lambda) in values.iter().enumerate() {
            if lambda <= tol {
                if lambda > 0.0 {
                    dropped += 1;
                }
                continue;
            }
            let weight = lambda.sqrt();
            let op = ComplexMatrix::from_fn(l, k, |c, a| {
                vectors.get(a * l + c, mu) * C64::new(weight, 0.0)
            });
            operators.push(op);
        }
        blocks.push(KrausBlock {
            dom_block: block.dom_block,
            cod_block: block.cod_block,
            operators,
            dropped,
        });
    }
    Ok(CpWitness {
        blocks,
        dom: f.dom().clone(),
        cod: f.cod().clone(),
    })
}

/// Composition `g ∘ f`.
pub fn compose_cp(g: &CPMap, f: &CPMap) -> CpResult<CPMap> {
    if g.dom() != f.cod() {
        return Err(CpError::AlgebraMismatch {
            context: format!(
                "compose needs inner algebras to agree, got {:?} and {:?}",
                g.dom().blocks(),
                f.cod().blocks()
            ),
        });
    }
    Ok(CPMap {
        dom: f.dom().clone(),
        cod: g.cod().clone(),
        map: g.map() * f.map(),
    })
}

/// Hilbert-Schmidt adjoint: coordinate dagger with dom and cod swapped.
pub fn dagger_cp(f: &CPMap) -> CPMap {
    CPMap {
        dom: f.cod().clone(),
        cod: f.dom().clone(),
        map: f.map().dagger(),
    }
}

/// The permutation from Kronecker-paired coordinates of `a` and `b` to the
/// element coordinates of `a.tensor(&b)`.
///
/// Block `(i,j)` of the tensor algebra carries the matrix units
/// `e_{ab} ⊗ e_{cd} ↦ e_{(a,c),(b,d)}` of `M_{k_i·l_j}`. The permutation is
/// the identity whenever the left factor is commutative.
pub fn tensor_reindex(a: &CStarAlgebra, b: &CStarAlgebra) -> ComplexMatrix {
    let (da, db) = (a.dim(), b.dim());
    let tensor = a.tensor(b);
    let total = tensor.dim();
    debug_assert_eq!(total, da * db);
    let mut entries = vec![C64::new(0.0, 0.0); total * total];
    let mut pair_offset = 0;
    for (i, &k) in a.blocks().iter().enumerate() {
        let oa = a.block_offset(i);
        for (j, &l) in b.blocks().iter().enumerate() {
            let ob = b.block_offset(j);
            let kl = k * l;
            for x in 0..k {
                for y in 0..k {
                    for z in 0..l {
                        for w in 0..l {
                            let source = (oa + x * k + y) * db + (ob + z * l + w);
                            let target = pair_offset + (x * l + z) * kl + (y * l + w);
                            entries[target * total + source] = C64::new(1.0, 0.0);
                        }
                    }
                }
            }
            pair_offset += kl * kl;
        }
    }
    ComplexMatrix::new(total, total, entries).expect("shape is consistent by construction")
}

/// Tensor product of CP maps, with blocks paired as the tensor of algebras.
pub fn tensor_cp(f: &CPMap, g: &CPMap) -> CPMap {
    let dom = f.dom().tensor(g.dom());
    let cod = f.cod().tensor(g.cod());
    let reindex_dom = tensor_reindex(f.dom(), g.dom());
    let reindex_cod = tensor_reindex(f.cod(), g.cod());
    let map = &(&reindex_cod * &f.map().kron(g.map())) * &reindex_dom.dagger();
    CPMap { dom, cod, map }
}

/// Direct sum of CP maps: concatenated blocks, block-diagonal matrix.
pub fn direct_sum_cp(f: &CPMap, g: &CPMap) -> CPMap {
    let dom = f.dom().direct_sum(g.dom());
    let cod = f.cod().direct_sum(g.cod());
    let (fr, fc) = (f.map().rows(), f.map().cols());
    let map = ComplexMatrix::from_fn(cod.dim(), dom.dim(), |r, c| {
        if r < fr && c < fc {
            f.map().get(r, c)
        } else if r >= fr && c >= fc {
            g.map().get(r - fr, c - fc)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    CPMap { dom, cod, map }
}

/// For maps between commutative algebras: positivity is just entrywise
/// nonnegativity of the matrix, which this check measures directly.
pub fn entrywise_positive(f: &CPMap, tol: f64) -> CpResult<Check> {
    if !f.dom().is_commutative() || !f.cod().is_commutative() {
        let max_block = f
            .dom()
            .blocks()
            .iter()
            .chain(f.cod().blocks())
            .copied()
            .max()
            .unwrap_or(0);
        return Err(CpError::NotCommutative { max_block });
    }
    let mut worst = 0.0f64;
    for z in f.map().entries() {
        worst = worst.max((-z.re).max(0.0)).max(z.im.abs());
    }
    Ok(Check::from_deviation(worst, tol))
}
