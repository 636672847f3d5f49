//! Dagger bimodules over Frobenius algebras and their 2-category.
//!
//! A bimodule over algebras `C` (left) and `D` (right) is a carrier space `M`
//! with a single action map `C ⊗ M ⊗ D → M` subject to three conditions:
//! compatibility with both multiplications, with both units, and a dagger
//! condition expressing the action's adjoint through the algebras' self-dual
//! structure. Bimodules compose by splitting a canonical dagger idempotent on
//! `M ⊗ N`; the composite carrier is the split image, so all comparisons
//! between composites are unitary maps rather than matrix equalities.
//!
//! Bimodules whose boundary algebras are classical structures are the same
//! thing as grids of C*-algebras; [`to_matrix_of_algebras`] and
//! [`from_matrix_of_algebras`] translate between the two pictures, and the
//! grid side carries its own composition of 1- and 2-morphisms.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cpstar::{compose_cp, direct_sum_cp, tensor_cp, CPMap, CStarAlgebra, CpError};
use crate::frobenius::{classical_structure, tensor_frobenius, FrobeniusAlgebra};
use crate::linalg::{
    deviation, split_projection, swap, tensor_permutation, Check, ComplexMatrix, Isometry,
    LinalgError,
};
use num_complex::Complex64 as C64;

pub type Bimod2Result<T> = Result<T, Bimod2Error>;

#[derive(Debug, Error)]
pub enum Bimod2Error {
    #[error("action must be {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    ActionShape {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("homomorphism map must be {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    HomShape {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("homomorphism endpoints live over different boundary algebras")]
    EndpointMismatch,
    #[error("middle algebras do not match: right algebra has dimension {left}, left algebra of the second factor has dimension {right}")]
    MiddleAlgebraMismatch { left: usize, right: usize },
    #[error("composite idempotent is not self-adjoint (deviation {deviation:.3e})")]
    NotDaggerIdempotent { deviation: f64 },
    #[error("algebra is not commutative (deviation {deviation:.3e})")]
    NotCommutative { deviation: f64 },
    #[error("{side} algebra is not a classical structure (deviation {deviation:.3e})")]
    NotClassical { side: &'static str, deviation: f64 },
    #[error("grid shape mismatch: {context}")]
    GridShape { context: String },
    #[error("isometry does not match the composite it is supposed to split")]
    IsometryMismatch,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Cp(#[from] CpError),
}

fn kron3(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b).kron(c)
}

/// A dagger bimodule: carrier space acted on by a left and a right Frobenius
/// algebra through one combined map `C ⊗ M ⊗ D → M` (left factor most
/// significant).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BimoduleData", into = "BimoduleData")]
pub struct DaggerBimodule {
    left: FrobeniusAlgebra,
    right: FrobeniusAlgebra,
    carrier_dim: usize,
    action: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
struct BimoduleData {
    left: FrobeniusAlgebra,
    right: FrobeniusAlgebra,
    carrier_dim: usize,
    action: ComplexMatrix,
}

impl TryFrom<BimoduleData> for DaggerBimodule {
    type Error = Bimod2Error;

    fn try_from(data: BimoduleData) -> Bimod2Result<Self> {
        DaggerBimodule::new(data.left, data.right, data.carrier_dim, data.action)
    }
}

impl From<DaggerBimodule> for BimoduleData {
    fn from(b: DaggerBimodule) -> Self {
        BimoduleData {
            left: b.left,
            right: b.right,
            carrier_dim: b.carrier_dim,
            action: b.action,
        }
    }
}

impl DaggerBimodule {
    pub fn new(
        left: FrobeniusAlgebra,
        right: FrobeniusAlgebra,
        carrier_dim: usize,
        action: ComplexMatrix,
    ) -> Bimod2Result<Self> {
        let expected_cols = left.dim() * carrier_dim * right.dim();
        if action.rows() != carrier_dim || action.cols() != expected_cols {
            return Err(Bimod2Error::ActionShape {
                expected_rows: carrier_dim,
                expected_cols,
                rows: action.rows(),
                cols: action.cols(),
            });
        }
        Ok(DaggerBimodule {
            left,
            right,
            carrier_dim,
            action,
        })
    }

    pub fn left(&self) -> &FrobeniusAlgebra {
        &self.left
    }

    pub fn right(&self) -> &FrobeniusAlgebra {
        &self.right
    }

    pub fn carrier_dim(&self) -> usize {
        self.carrier_dim
    }

    pub fn action(&self) -> &ComplexMatrix {
        &self.action
    }

    /// One-sided left action `C ⊗ M → M` (right input plugged with the unit).
    pub fn left_action(&self) -> ComplexMatrix {
        let ic = ComplexMatrix::identity(self.left.dim());
        let im = ComplexMatrix::identity(self.carrier_dim);
        &self.action * &kron3(&ic, &im, self.right.unit())
    }

    /// One-sided right action `M ⊗ D → M` (left input plugged with the unit).
    pub fn right_action(&self) -> ComplexMatrix {
        let im = ComplexMatrix::identity(self.carrier_dim);
        let id = ComplexMatrix::identity(self.right.dim());
        &self.action * &kron3(self.left.unit(), &im, &id)
    }
}

/// Verdicts for the three bimodule conditions.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BimoduleReport {
    /// Acting twice equals acting once by the multiplied algebra elements.
    pub associative: Check,
    /// Acting by both units is the identity on the carrier.
    pub unital: Check,
    /// The action's adjoint factors through the algebras' cap states.
    pub dagger: Check,
}

impl BimoduleReport {
    pub fn pass(&self) -> bool {
        self.associative.pass && self.unital.pass && self.dagger.pass
    }
}

/// Evaluate the three bimodule conditions as matrix identities.
pub fn check_bimodule(b: &DaggerBimodule, tol: f64) -> BimoduleReport {
    let (c, m, d) = (b.left().dim(), b.carrier_dim(), b.right().dim());
    let ic = ComplexMatrix::identity(c);
    let im = ComplexMatrix::identity(m);
    let id = ComplexMatrix::identity(d);

    let nested = b.action() * &kron3(&ic, b.action(), &id);
    let multiplied = b.action() * &kron3(b.left().mult(), &im, b.right().mult());
    let associative = Check::from_deviation(deviation(&nested, &multiplied), tol);

    let both_units = b.action() * &kron3(b.left().unit(), &im, b.right().unit());
    let unital = Check::from_deviation(deviation(&both_units, &im), tol);

    let via_caps = &kron3(&ic, b.action(), &id) * &kron3(&b.left().cap(), &im, &b.right().cap());
    let dagger = Check::from_deviation(deviation(&b.action().dagger(), &via_caps), tol);

    BimoduleReport {
        associative,
        unital,
        dagger,
    }
}

/// The algebra acting on itself from both sides by multiplication.
pub fn identity_bimodule(a: &FrobeniusAlgebra) -> DaggerBimodule {
    let n = a.dim();
    let action = a.mult() * &a.mult().kron(&ComplexMatrix::identity(n));
    DaggerBimodule::new(a.clone(), a.clone(), n, action).expect("shape is consistent by construction")
}

/// A map of carriers intertwining two parallel bimodule actions.
#[derive(Debug, Clone, PartialEq)]
pub struct BimoduleHom {
    source: DaggerBimodule,
    target: DaggerBimodule,
    map: ComplexMatrix,
}

impl BimoduleHom {
    pub fn new(
        source: DaggerBimodule,
        target: DaggerBimodule,
        map: ComplexMatrix,
    ) -> Bimod2Result<Self> {
        if source.left() != target.left() || source.right() != target.right() {
            return Err(Bimod2Error::EndpointMismatch);
        }
        if map.rows() != target.carrier_dim() || map.cols() != source.carrier_dim() {
            return Err(Bimod2Error::HomShape {
                expected_rows: target.carrier_dim(),
                expected_cols: source.carrier_dim(),
                rows: map.rows(),
                cols: map.cols(),
            });
        }
        Ok(BimoduleHom {
            source,
            target,
            map,
        })
    }

    pub fn identity(b: &DaggerBimodule) -> Self {
        BimoduleHom {
            source: b.clone(),
            target: b.clone(),
            map: ComplexMatrix::identity(b.carrier_dim()),
        }
    }

    pub fn source(&self) -> &DaggerBimodule {
        &self.source
    }

    pub fn target(&self) -> &DaggerBimodule {
        &self.target
    }

    pub fn map(&self) -> &ComplexMatrix {
        &self.map
    }
}

/// Residual of the intertwining equation `f ∘ act = act' ∘ (id ⊗ f ⊗ id)`.
pub fn check_hom(h: &BimoduleHom, tol: f64) -> Check {
    let ic = ComplexMatrix::identity(h.source().left().dim());
    let id = ComplexMatrix::identity(h.source().right().dim());
    let lhs = h.map() * h.source().action();
    let rhs = h.target().action() * &kron3(&ic, h.map(), &id);
    Check::from_deviation(deviation(&lhs, &rhs), tol)
}

/// The canonical endomorphism of `M ⊗ N` whose image is the composite
/// carrier: right action and left action of the shared middle algebra, joined
/// through its cap state. Dagger idempotent whenever both bimodules are
/// certified.
pub fn composite_idempotent(
    mb: &DaggerBimodule,
    nb: &DaggerBimodule,
) -> Bimod2Result<ComplexMatrix> {
    if mb.right() != nb.left() {
        return Err(Bimod2Error::MiddleAlgebraMismatch {
            left: mb.right().dim(),
            right: nb.left().dim(),
        });
    }
    let (m, n) = (mb.carrier_dim(), nb.carrier_dim());
    let joined = mb.right_action().kron(&nb.left_action());
    let cap = mb.right().cap();
    let insert = kron3(&ComplexMatrix::identity(m), &cap, &ComplexMatrix::identity(n));
    Ok(&joined * &insert)
}

/// Composite action on a chosen splitting `i` of the composite idempotent.
fn composed_action(
    mb: &DaggerBimodule,
    nb: &DaggerBimodule,
    iso: &Isometry,
) -> Bimod2Result<DaggerBimodule> {
    let (c, d, e) = (mb.left().dim(), mb.right().dim(), nb.right().dim());
    let (m, n) = (mb.carrier_dim(), nb.carrier_dim());
    if iso.matrix().rows() != m * n {
        return Err(Bimod2Error::IsometryMismatch);
    }
    let r = iso.rank();
    let cap = mb.right().cap();
    // Parallel actions with the middle wires joined by the cap, assembled
    // from carrier-sized slices of each action (one pair per cap entry).
    let mut joined = ComplexMatrix::zeros(m * n, c * m * n * e);
    for s in 0..d {
        for t in 0..d {
            let weight = cap.get(s * d + t, 0);
            if weight == C64::new(0.0, 0.0) {
                continue;
            }
            let m_slice = ComplexMatrix::from_fn(m, c * m, |x, col| {
                mb.action().get(x, col * d + s)
            });
            let n_slice = ComplexMatrix::from_fn(n, n * e, |y, col| {
                let (v, b) = (col / e, col % e);
                nb.action().get(y, (t * n + v) * e + b)
            });
            joined = &joined + &m_slice.kron(&n_slice).scale(weight);
        }
    }
    let embed = kron3(
        &ComplexMatrix::identity(c),
        iso.matrix(),
        &ComplexMatrix::identity(e),
    );
    let action = &(&iso.matrix().dagger() * &joined) * &embed;
    DaggerBimodule::new(mb.left().clone(), nb.right().clone(), r, action)
}

/// Compose two bimodules over a shared middle algebra by splitting the
/// composite idempotent; returns the composite and the splitting isometry.
pub fn compose_bimodules(
    mb: &DaggerBimodule,
    nb: &DaggerBimodule,
    tol: f64,
) -> Bimod2Result<(DaggerBimodule, Isometry)> {
    let p = composite_idempotent(mb, nb)?;
    let hermiticity = deviation(&p, &p.dagger());
    if hermiticity > tol {
        return Err(Bimod2Error::NotDaggerIdempotent {
            deviation: hermiticity,
        });
    }
    let iso = split_projection(&p, tol)?;
    let composed = composed_action(mb, nb, &iso)?;
    Ok((composed, iso))
}

/// Residual of the coequalizer property: the split corner equalizes acting on
/// the right of `M` against acting on the left of `N`.
pub fn check_coequalizer(
    mb: &DaggerBimodule,
    nb: &DaggerBimodule,
    iso: &Isometry,
    tol: f64,
) -> Bimod2Result<Check> {
    if mb.right() != nb.left() {
        return Err(Bimod2Error::MiddleAlgebraMismatch {
            left: mb.right().dim(),
            right: nb.left().dim(),
        });
    }
    if iso.matrix().rows() != mb.carrier_dim() * nb.carrier_dim() {
        return Err(Bimod2Error::IsometryMismatch);
    }
    let corner = iso.matrix().dagger();
    let lhs = &corner * &mb.right_action().kron(&ComplexMatrix::identity(nb.carrier_dim()));
    let rhs = &corner * &ComplexMatrix::identity(mb.carrier_dim()).kron(&nb.left_action());
    Ok(Check::from_deviation(deviation(&lhs, &rhs), tol))
}

/// Horizontal composite of homs through the split isometries of the source
/// and target composites.
pub fn horizontal_compose_homs(
    f: &BimoduleHom,
    g: &BimoduleHom,
    i: &Isometry,
    i_prime: &Isometry,
) -> Bimod2Result<BimoduleHom> {
    if f.source().right() != g.source().left() {
        return Err(Bimod2Error::MiddleAlgebraMismatch {
            left: f.source().right().dim(),
            right: g.source().left().dim(),
        });
    }
    if i.matrix().rows() != f.source().carrier_dim() * g.source().carrier_dim()
        || i_prime.matrix().rows() != f.target().carrier_dim() * g.target().carrier_dim()
    {
        return Err(Bimod2Error::IsometryMismatch);
    }
    let source = composed_action(f.source(), g.source(), i)?;
    let target = composed_action(f.target(), g.target(), i_prime)?;
    let map = &(&i_prime.matrix().dagger() * &f.map().kron(g.map())) * i.matrix();
    BimoduleHom::new(source, target, map)
}

/// The two boundary bimodules of an algebra: `L` over `(A, I)` and `R` over
/// `(I, A)`, both carried by `A` with multiplication as the action.
pub fn boundary_bimodules(a: &FrobeniusAlgebra) -> (DaggerBimodule, DaggerBimodule) {
    let trivial = classical_structure(1);
    let d = a.dim();
    let l = DaggerBimodule::new(a.clone(), trivial.clone(), d, a.mult().clone())
        .expect("shape is consistent by construction");
    let r = DaggerBimodule::new(trivial, a.clone(), d, a.mult().clone())
        .expect("shape is consistent by construction");
    (l, r)
}

/// Verdicts for the topological-boundary identities of a commutative algebra.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TopologicalBoundaryReport {
    /// Zig-zag straightening, equivalent to the four (co)unit laws.
    pub zigzag: Check,
    /// Bubble elimination `mult ∘ comult = id` (specialness).
    pub bubble: Check,
    /// Crossing elimination `mult ∘ swap ∘ comult = id`.
    pub crossing: Check,
}

impl TopologicalBoundaryReport {
    pub fn pass(&self) -> bool {
        self.zigzag.pass && self.bubble.pass && self.crossing.pass
    }
}

/// Check that the boundary of a commutative algebra is topological.
pub fn check_topological_boundary(
    a: &FrobeniusAlgebra,
    tol: f64,
) -> Bimod2Result<TopologicalBoundaryReport> {
    let n = a.dim();
    let commutativity = deviation(&(a.mult() * &swap(n, n)), a.mult());
    if commutativity > tol {
        return Err(Bimod2Error::NotCommutative {
            deviation: commutativity,
        });
    }
    let id = ComplexMatrix::identity(n);
    let zigzag = [
        a.mult() * &a.unit().kron(&id),
        a.mult() * &id.kron(a.unit()),
        &a.counit().kron(&id) * &a.comult(),
        &id.kron(&a.counit()) * &a.comult(),
    ]
    .iter()
    .map(|m| deviation(m, &id))
    .fold(0.0f64, f64::max);
    let bubble = deviation(&(a.mult() * &a.comult()), &id);
    let crossing = deviation(&(&(a.mult() * &swap(n, n)) * &a.comult()), &id);
    Ok(TopologicalBoundaryReport {
        zigzag: Check::from_deviation(zigzag, tol),
        bubble: Check::from_deviation(bubble, tol),
        crossing: Check::from_deviation(crossing, tol),
    })
}

/// A rectangular grid of C*-algebras: a 1-morphism of the concrete model.
///
/// Serialized as nested arrays of algebras, rows outermost.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<CStarAlgebra>>", into = "Vec<Vec<CStarAlgebra>>")]
pub struct AlgebraMatrix {
    rows: usize,
    cols: usize,
    cells: Vec<CStarAlgebra>,
}

impl TryFrom<Vec<Vec<CStarAlgebra>>> for AlgebraMatrix {
    type Error = Bimod2Error;

    fn try_from(grid: Vec<Vec<CStarAlgebra>>) -> Bimod2Result<Self> {
        let rows = grid.len();
        let cols = grid.first().map_or(0, Vec::len);
        if grid.iter().any(|row| row.len() != cols) {
            return Err(Bimod2Error::GridShape {
                context: "rows have unequal lengths".into(),
            });
        }
        Ok(AlgebraMatrix {
            rows,
            cols,
            cells: grid.into_iter().flatten().collect(),
        })
    }
}

impl From<AlgebraMatrix> for Vec<Vec<CStarAlgebra>> {
    fn from(g: AlgebraMatrix) -> Self {
        g.cells
            .chunks(g.cols.max(1))
            .map(|row| row.to_vec())
            .collect()
    }
}

impl AlgebraMatrix {
    pub fn new(rows: usize, cols: usize, cells: Vec<CStarAlgebra>) -> Bimod2Result<Self> {
        if cells.len() != rows * cols {
            return Err(Bimod2Error::GridShape {
                context: format!(
                    "expected {} cells for a {rows}x{cols} grid, got {}",
                    rows * cols,
                    cells.len()
                ),
            });
        }
        Ok(AlgebraMatrix { rows, cols, cells })
    }

    /// Diagonal grid of scalars, the identity 1-morphism on `n`.
    pub fn identity(n: usize) -> Self {
        let cells = (0..n * n)
            .map(|idx| {
                if idx / n == idx % n {
                    CStarAlgebra::scalar()
                } else {
                    CStarAlgebra::zero()
                }
            })
            .collect();
        AlgebraMatrix {
            rows: n,
            cols: n,
            cells,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cell(&self, i: usize, j: usize) -> &CStarAlgebra {
        &self.cells[i * self.cols + j]
    }

    /// Sum of all cell element dimensions.
    pub fn total_dim(&self) -> usize {
        self.cells.iter().map(CStarAlgebra::dim).sum()
    }

    /// Cell element dimensions, row-major.
    pub fn cell_dims(&self) -> Vec<usize> {
        self.cells.iter().map(CStarAlgebra::dim).collect()
    }
}

/// Horizontal composition of grids: cell `(i,k)` is `⊕_j M_ij ⊗ N_jk`.
pub fn compose_matrix_model(a: &AlgebraMatrix, b: &AlgebraMatrix) -> Bimod2Result<AlgebraMatrix> {
    if a.cols() != b.rows() {
        return Err(Bimod2Error::GridShape {
            context: format!(
                "inner dimensions differ: {}x{} times {}x{}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            ),
        });
    }
    let mut cells = Vec::with_capacity(a.rows() * b.cols());
    for i in 0..a.rows() {
        for k in 0..b.cols() {
            let mut cell = CStarAlgebra::zero();
            for j in 0..a.cols() {
                cell = cell.direct_sum(&a.cell(i, j).tensor(b.cell(j, k)));
            }
            cells.push(cell);
        }
    }
    AlgebraMatrix::new(a.rows(), b.cols(), cells)
}

/// A grid of CP maps between two parallel grids of algebras: a 2-morphism of
/// the concrete model.
#[derive(Debug, Clone, PartialEq)]
pub struct CPMatrix {
    source: AlgebraMatrix,
    target: AlgebraMatrix,
    cells: Vec<CPMap>,
}

impl CPMatrix {
    pub fn new(
        source: AlgebraMatrix,
        target: AlgebraMatrix,
        cells: Vec<CPMap>,
    ) -> Bimod2Result<Self> {
        if source.rows() != target.rows() || source.cols() != target.cols() {
            return Err(Bimod2Error::GridShape {
                context: "source and target grids have different shapes".into(),
            });
        }
        if cells.len() != source.rows() * source.cols() {
            return Err(Bimod2Error::GridShape {
                context: format!(
                    "expected {} maps, got {}",
                    source.rows() * source.cols(),
                    cells.len()
                ),
            });
        }
        for (idx, f) in cells.iter().enumerate() {
            let (i, j) = (idx / source.cols(), idx % source.cols());
            if f.dom() != source.cell(i, j) || f.cod() != target.cell(i, j) {
                return Err(Bimod2Error::GridShape {
                    context: format!("map at cell ({i},{j}) has mismatched algebras"),
                });
            }
        }
        Ok(CPMatrix {
            source,
            target,
            cells,
        })
    }

    pub fn identity(grid: &AlgebraMatrix) -> Self {
        let cells = grid.cells.iter().map(CPMap::identity).collect();
        CPMatrix {
            source: grid.clone(),
            target: grid.clone(),
            cells,
        }
    }

    pub fn source(&self) -> &AlgebraMatrix {
        &self.source
    }

    pub fn target(&self) -> &AlgebraMatrix {
        &self.target
    }

    pub fn cell(&self, i: usize, j: usize) -> &CPMap {
        &self.cells[i * self.source.cols() + j]
    }

    /// Worst complete-positivity verdict over all cells.
    pub fn check(&self, tol: f64) -> Check {
        let mut worst = 0.0f64;
        for f in &self.cells {
            let report = crate::cpstar::is_completely_positive(f, tol);
            worst = worst
                .max(report.hermiticity)
                .max((-report.min_eigenvalue).max(0.0));
        }
        Check::from_deviation(worst, tol)
    }
}

/// Horizontal composition of 2-morphisms: cell `(i,k)` is `⊕_j f_ij ⊗ g_jk`.
pub fn compose_matrix_homs(f: &CPMatrix, g: &CPMatrix) -> Bimod2Result<CPMatrix> {
    let source = compose_matrix_model(f.source(), g.source())?;
    let target = compose_matrix_model(f.target(), g.target())?;
    let mut cells = Vec::with_capacity(source.rows() * source.cols());
    for i in 0..f.source().rows() {
        for k in 0..g.source().cols() {
            let mut cell = CPMap::zero(&CStarAlgebra::zero(), &CStarAlgebra::zero());
            for j in 0..f.source().cols() {
                cell = direct_sum_cp(&cell, &tensor_cp(f.cell(i, j), g.cell(j, k)));
            }
            cells.push(cell);
        }
    }
    CPMatrix::new(source, target, cells)
}

/// Vertical composition: `g` after `f`, cellwise.
pub fn vertical_compose(f: &CPMatrix, g: &CPMatrix) -> Bimod2Result<CPMatrix> {
    if f.target() != g.source() {
        return Err(Bimod2Error::GridShape {
            context: "vertical composition needs the first target to equal the second source"
                .into(),
        });
    }
    let mut cells = Vec::with_capacity(f.cells.len());
    for (gf, ff) in g.cells.iter().zip(&f.cells) {
        cells.push(compose_cp(gf, ff)?);
    }
    CPMatrix::new(f.source().clone(), g.target().clone(), cells)
}

/// Translate a bimodule over classical structures into its grid of algebras.
///
/// Cell `(i,j)` is the image of the projection obtained by acting with the
/// `i`-th and `j`-th basis states; only its dimension is recoverable from the
/// action, so cells are reported as classical algebras of that dimension.
pub fn to_matrix_of_algebras(b: &DaggerBimodule, tol: f64) -> Bimod2Result<AlgebraMatrix> {
    let m = b.left().dim();
    let n = b.right().dim();
    for (side, algebra, dim) in [("left", b.left(), m), ("right", b.right(), n)] {
        let standard = classical_structure(dim);
        let dev = deviation(algebra.mult(), standard.mult())
            .max(deviation(algebra.unit(), standard.unit()));
        if dev > tol {
            return Err(Bimod2Error::NotClassical {
                side,
                deviation: dev,
            });
        }
    }
    let carrier = ComplexMatrix::identity(b.carrier_dim());
    let mut cells = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            let pick = kron3(
                &ComplexMatrix::basis_column(m, i),
                &carrier,
                &ComplexMatrix::basis_column(n, j),
            );
            let projection = b.action() * &pick;
            let iso = split_projection(&projection, tol)?;
            cells.push(CStarAlgebra::classical(iso.rank()));
        }
    }
    AlgebraMatrix::new(m, n, cells)
}

/// Build the bimodule carried by `⊕_ij M_ij` over classical structures, with
/// the action projecting each summand onto its grid position.
pub fn from_matrix_of_algebras(g: &AlgebraMatrix) -> Bimod2Result<DaggerBimodule> {
    let (m, n) = (g.rows(), g.cols());
    if m == 0 || n == 0 {
        return Err(Bimod2Error::GridShape {
            context: "grid must have at least one row and one column".into(),
        });
    }
    let total = g.total_dim();
    let mut entries = vec![C64::new(0.0, 0.0); total * (m * total * n)];
    let mut start = 0;
    for i in 0..m {
        for j in 0..n {
            let dim = g.cell(i, j).dim();
            for t in start..start + dim {
                entries[t * (m * total * n) + (i * total + t) * n + j] = C64::new(1.0, 0.0);
            }
            start += dim;
        }
    }
    let action = ComplexMatrix::new(total, m * total * n, entries)
        .expect("shape is consistent by construction");
    DaggerBimodule::new(classical_structure(m), classical_structure(n), total, action)
}

/// Kronecker tensor of bimodules: boundary algebras tensor, carriers tensor,
/// and the action is the paired action after regrouping the six wires.
pub fn tensor_bimodules(a: &DaggerBimodule, b: &DaggerBimodule) -> DaggerBimodule {
    let left = tensor_frobenius(a.left(), b.left());
    let right = tensor_frobenius(a.right(), b.right());
    let dims = [
        a.left().dim(),
        b.left().dim(),
        a.carrier_dim(),
        b.carrier_dim(),
        a.right().dim(),
        b.right().dim(),
    ];
    let regroup = tensor_permutation(&dims, &[0, 2, 4, 1, 3, 5]);
    let action = &a.action().kron(b.action()) * &regroup;
    DaggerBimodule::new(left, right, a.carrier_dim() * b.carrier_dim(), action)
        .expect("shape is consistent by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::{check_frobenius, matrix_algebra};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-9;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_bimodule_on_scalars_has_unit_action() {
        let b = identity_bimodule(&classical_structure(1));
        assert_eq!(b.action(), &ComplexMatrix::identity(1));
    }

    #[test]
    fn identity_bimodules_pass_all_three_conditions() {
        for a in [classical_structure(2), matrix_algebra(2)] {
            let report = check_bimodule(&identity_bimodule(&a), TOL);
            assert!(report.pass(), "{report:?}");
        }
    }

    #[test]
    fn trivial_bimodule_with_unitor_action_passes() {
        let unit = classical_structure(1);
        let b = DaggerBimodule::new(unit.clone(), unit, 3, ComplexMatrix::identity(3)).unwrap();
        assert!(check_bimodule(&b, TOL).pass());
    }

    #[test]
    fn scaling_the_action_breaks_the_unit_condition() {
        let b = identity_bimodule(&classical_structure(2));
        let scaled = DaggerBimodule::new(
            b.left().clone(),
            b.right().clone(),
            b.carrier_dim(),
            b.action().scale(c(2.0, 0.0)),
        )
        .unwrap();
        let report = check_bimodule(&scaled, TOL);
        assert!(!report.unital.pass);
    }

    #[test]
    fn action_shape_is_validated() {
        let a = classical_structure(2);
        let result = DaggerBimodule::new(a.clone(), a, 2, ComplexMatrix::identity(2));
        assert!(matches!(result, Err(Bimod2Error::ActionShape { .. })));
    }

    #[test]
    fn identity_and_zero_homs_pass_random_map_fails() {
        let b = identity_bimodule(&classical_structure(2));
        assert!(check_hom(&BimoduleHom::identity(&b), TOL).pass);
        let zero = BimoduleHom::new(b.clone(), b.clone(), ComplexMatrix::zeros(2, 2)).unwrap();
        assert!(check_hom(&zero, TOL).pass);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let random = ComplexMatrix::from_fn(2, 2, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let h = BimoduleHom::new(b.clone(), b, random).unwrap();
        let verdict = check_hom(&h, TOL);
        assert!(!verdict.pass && verdict.deviation > 0.0);
    }

    #[test]
    fn composite_idempotent_of_scalar_identities_is_one() {
        let b = identity_bimodule(&classical_structure(1));
        let p = composite_idempotent(&b, &b).unwrap();
        assert_eq!(p, ComplexMatrix::identity(1));
    }

    #[test]
    fn composite_idempotent_of_classical_identities_has_rank_n() {
        for n in 1..=3 {
            let b = identity_bimodule(&classical_structure(n));
            let p = composite_idempotent(&b, &b).unwrap();
            assert!(deviation(&(&p * &p), &p) <= TOL);
            assert!(deviation(&p, &p.dagger()) <= TOL);
            assert!((p.trace().re - n as f64).abs() <= TOL);
        }
    }

    #[test]
    fn boundary_composite_idempotent_is_comult_after_mult() {
        let a = classical_structure(2);
        let (l, r) = boundary_bimodules(&a);
        let p = composite_idempotent(&r, &l).unwrap();
        let expected = &a.comult() * a.mult();
        assert!(deviation(&p, &expected) <= TOL);
        assert!((p.trace().re - 2.0).abs() <= TOL);
    }

    #[test]
    fn composite_idempotent_matches_the_unsliced_construction() {
        // The cap-slice assembly must agree with the literal parallel-action
        // formula: units tensored onto the outer wires, the cap joining the
        // two middle wires.
        let a = matrix_algebra(2);
        let mb = identity_bimodule(&a);
        let p = composite_idempotent(&mb, &mb).unwrap();
        let im = ComplexMatrix::identity(mb.carrier_dim());
        let insertion = mb
            .left()
            .unit()
            .kron(&im)
            .kron(&a.cap())
            .kron(&im)
            .kron(mb.right().unit());
        let literal = &mb.action().kron(mb.action()) * &insertion;
        assert!(deviation(&p, &literal) <= 1e-12);
    }

    #[test]
    fn compose_with_identity_preserves_carrier_and_passes_checks() {
        let a = classical_structure(2);
        let id = identity_bimodule(&a);
        let (l, _) = boundary_bimodules(&a);
        let (composed, iso) = compose_bimodules(&id, &l, TOL).unwrap();
        assert_eq!(composed.carrier_dim(), l.carrier_dim());
        assert!(check_bimodule(&composed, 1e-8).pass());
        assert!(check_coequalizer(&id, &l, &iso, 1e-8).unwrap().pass);
    }

    #[test]
    fn unit_law_comparison_map_is_unitary() {
        let a = classical_structure(2);
        let id = identity_bimodule(&a);
        let (l, _) = boundary_bimodules(&a);
        let (composed, iso) = compose_bimodules(&id, &l, TOL).unwrap();
        // Comparison: collapse the embedded composite with the left action.
        let u = &l.left_action() * iso.matrix();
        let r = composed.carrier_dim();
        assert!(deviation(&(&u.dagger() * &u), &ComplexMatrix::identity(r)) <= 1e-8);
        assert!(
            deviation(&(&u * &u.dagger()), &ComplexMatrix::identity(l.carrier_dim())) <= 1e-8
        );
    }

    #[test]
    fn boundary_composites_have_the_expected_carriers() {
        for a in [classical_structure(3), matrix_algebra(2)] {
            let (l, r) = boundary_bimodules(&a);
            let (over_a, _) = compose_bimodules(&r, &l, TOL).unwrap();
            assert_eq!(over_a.carrier_dim(), a.dim());
            assert!(check_bimodule(&over_a, 1e-8).pass());
            let (over_unit, _) = compose_bimodules(&l, &r, TOL).unwrap();
            assert_eq!(over_unit.carrier_dim(), a.dim() * a.dim());
        }
    }

    #[test]
    fn boundary_bimodules_pass_checks() {
        for a in [classical_structure(3), matrix_algebra(2)] {
            let (l, r) = boundary_bimodules(&a);
            assert!(check_bimodule(&l, TOL).pass());
            assert!(check_bimodule(&r, TOL).pass());
        }
        let (l, _) = boundary_bimodules(&classical_structure(1));
        assert_eq!(l.action(), &ComplexMatrix::identity(1));
    }

    #[test]
    fn middle_algebra_mismatch_is_reported() {
        let b2 = identity_bimodule(&classical_structure(2));
        let b3 = identity_bimodule(&classical_structure(3));
        assert!(matches!(
            composite_idempotent(&b2, &b3),
            Err(Bimod2Error::MiddleAlgebraMismatch { .. })
        ));
    }

    #[test]
    fn horizontal_composite_of_identity_homs_is_identity() {
        let a = classical_structure(2);
        let id = identity_bimodule(&a);
        let (l, _) = boundary_bimodules(&a);
        let (_, iso) = compose_bimodules(&id, &l, TOL).unwrap();
        let h = horizontal_compose_homs(
            &BimoduleHom::identity(&id),
            &BimoduleHom::identity(&l),
            &iso,
            &iso,
        )
        .unwrap();
        assert!(deviation(h.map(), &ComplexMatrix::identity(2)) <= 1e-9);
        assert!(check_hom(&h, 1e-8).pass);
    }

    #[test]
    fn topological_boundary_passes_for_classical_structures() {
        for n in 1..=4 {
            let report = check_topological_boundary(&classical_structure(n), TOL).unwrap();
            assert!(report.pass(), "n = {n}: {report:?}");
        }
    }

    #[test]
    fn topological_boundary_rejects_noncommutative_input() {
        assert!(matches!(
            check_topological_boundary(&matrix_algebra(2), TOL),
            Err(Bimod2Error::NotCommutative { .. })
        ));
    }

    #[test]
    fn broken_specialness_fails_the_bubble_check_only() {
        // Rescaling mult and unit in opposite directions keeps the unit laws
        // but scales mult∘comult by 4.
        let a = classical_structure(2);
        let rescaled = FrobeniusAlgebra::new(
            2,
            a.mult().scale(c(2.0, 0.0)),
            a.unit().scale(c(0.5, 0.0)),
        )
        .unwrap();
        let report = check_topological_boundary(&rescaled, TOL).unwrap();
        assert!(report.zigzag.pass);
        assert!(!report.bubble.pass);
    }

    #[test]
    fn matrix_model_composition_of_row_and_column_grids() {
        let row = AlgebraMatrix::new(
            1,
            2,
            vec![CStarAlgebra::scalar(), CStarAlgebra::matrix(2)],
        )
        .unwrap();
        let col = AlgebraMatrix::new(
            2,
            1,
            vec![CStarAlgebra::matrix(2), CStarAlgebra::scalar()],
        )
        .unwrap();
        let composed = compose_matrix_model(&row, &col).unwrap();
        assert_eq!(composed.cell(0, 0).blocks(), &[2, 2]);
        assert_eq!(composed.total_dim(), 8);
    }

    #[test]
    fn composing_with_the_identity_grid_preserves_cell_dimensions() {
        let g = AlgebraMatrix::new(
            2,
            2,
            vec![
                CStarAlgebra::scalar(),
                CStarAlgebra::matrix(2),
                CStarAlgebra::zero(),
                CStarAlgebra::classical(2),
            ],
        )
        .unwrap();
        let left = compose_matrix_model(&AlgebraMatrix::identity(2), &g).unwrap();
        let right = compose_matrix_model(&g, &AlgebraMatrix::identity(2)).unwrap();
        assert_eq!(left.cell_dims(), g.cell_dims());
        assert_eq!(right.cell_dims(), g.cell_dims());
    }

    #[test]
    fn grid_bimodules_pass_checks() {
        let row = AlgebraMatrix::new(
            1,
            2,
            vec![CStarAlgebra::scalar(), CStarAlgebra::matrix(2)],
        )
        .unwrap();
        let col = AlgebraMatrix::new(
            2,
            1,
            vec![CStarAlgebra::matrix(2), CStarAlgebra::scalar()],
        )
        .unwrap();
        for g in [row, col] {
            let b = from_matrix_of_algebras(&g).unwrap();
            assert!(check_bimodule(&b, TOL).pass());
        }
    }

    #[test]
    fn matrix_of_algebras_roundtrip_recovers_cell_dimensions() {
        let g = AlgebraMatrix::new(
            2,
            2,
            vec![
                CStarAlgebra::zero(),
                CStarAlgebra::scalar(),
                CStarAlgebra::classical(2),
                CStarAlgebra::matrix(2),
            ],
        )
        .unwrap();
        let b = from_matrix_of_algebras(&g).unwrap();
        let back = to_matrix_of_algebras(&b, TOL).unwrap();
        assert_eq!(back.cell_dims(), g.cell_dims());
    }

    #[test]
    fn identity_bimodule_of_classical_structure_is_the_identity_grid() {
        let b = identity_bimodule(&classical_structure(2));
        let grid = to_matrix_of_algebras(&b, TOL).unwrap();
        assert_eq!(grid.cell_dims(), vec![1, 0, 0, 1]);
    }

    #[test]
    fn abstract_and_concrete_composites_have_equal_dimension() {
        let row = AlgebraMatrix::new(
            1,
            2,
            vec![CStarAlgebra::scalar(), CStarAlgebra::matrix(2)],
        )
        .unwrap();
        let col = AlgebraMatrix::new(
            2,
            1,
            vec![CStarAlgebra::matrix(2), CStarAlgebra::scalar()],
        )
        .unwrap();
        let (composed, _) = compose_bimodules(
            &from_matrix_of_algebras(&row).unwrap(),
            &from_matrix_of_algebras(&col).unwrap(),
            TOL,
        )
        .unwrap();
        let concrete = compose_matrix_model(&row, &col).unwrap();
        assert_eq!(composed.carrier_dim(), concrete.total_dim());
    }

    #[test]
    fn tensor_of_bimodules_passes_checks() {
        let a = identity_bimodule(&classical_structure(2));
        let (l, _) = boundary_bimodules(&matrix_algebra(2));
        let t = tensor_bimodules(&a, &l);
        assert_eq!(t.carrier_dim(), 2 * 4);
        assert!(check_frobenius(t.left(), TOL).structural_ok());
        assert!(check_bimodule(&t, TOL).pass());
    }

    #[test]
    fn bimodule_json_roundtrip_and_shape_rejection() {
        let b = identity_bimodule(&classical_structure(2));
        let text = serde_json::to_string(&b).unwrap();
        let back: DaggerBimodule = serde_json::from_str(&text).unwrap();
        assert_eq!(b, back);
        let grid = AlgebraMatrix::identity(2);
        let grid_text = serde_json::to_string(&grid).unwrap();
        assert_eq!(serde_json::from_str::<AlgebraMatrix>(&grid_text).unwrap(), grid);
    }

    #[test]
    fn vertical_and_horizontal_composition_of_grid_homs() {
        let g = AlgebraMatrix::new(
            1,
            1,
            vec![CStarAlgebra::matrix(2)],
        )
        .unwrap();
        let f = CPMatrix::identity(&g);
        let vertical = vertical_compose(&f, &f).unwrap();
        assert_eq!(vertical.cell(0, 0).map(), f.cell(0, 0).map());
        let horizontal = compose_matrix_homs(&f, &f).unwrap();
        assert_eq!(horizontal.source().cell(0, 0).blocks(), &[4]);
        assert!(horizontal.check(TOL).pass);
    }
}
