//! Special dagger Frobenius algebras on explicit finite-dimensional carriers.
//!
//! An algebra is a carrier dimension `n`, a multiplication `n×n²`, and a unit
//! `n×1`. The comultiplication and counit are always the daggers of those two;
//! [`check_frobenius`] evaluates the associativity, unit, Frobenius,
//! specialness, and commutativity laws as literal matrix equalities.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{deviation, swap, Check, ComplexMatrix};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type FrobeniusResult<T> = Result<T, FrobeniusError>;

#[derive(Debug, Error)]
pub enum FrobeniusError {
    #[error("carrier dimension must be at least 1")]
    EmptyCarrier,
    #[error("multiplication must be {dim}x{expected}, got {rows}x{cols}")]
    MultShape {
        dim: usize,
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("unit must be {dim}x1, got {rows}x{cols}")]
    UnitShape { dim: usize, rows: usize, cols: usize },
    #[error("operation requires a commutative algebra (commutativity deviation {deviation:.3e})")]
    NotCommutative { deviation: f64 },
}

/// A dagger Frobenius algebra candidate: carrier `C^dim` with multiplication
/// and unit. Construction validates shapes only; run [`check_frobenius`]
/// before trusting deserialized values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FrobeniusData", into = "FrobeniusData")]
pub struct FrobeniusAlgebra {
    dim: usize,
    mult: ComplexMatrix,
    unit: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
struct FrobeniusData {
    dim: usize,
    mult: ComplexMatrix,
    unit: ComplexMatrix,
}

impl TryFrom<FrobeniusData> for FrobeniusAlgebra {
    type Error = FrobeniusError;

    fn try_from(data: FrobeniusData) -> FrobeniusResult<Self> {
        FrobeniusAlgebra::new(data.dim, data.mult, data.unit)
    }
}

impl From<FrobeniusAlgebra> for FrobeniusData {
    fn from(f: FrobeniusAlgebra) -> Self {
        FrobeniusData {
            dim: f.dim,
            mult: f.mult,
            unit: f.unit,
        }
    }
}

impl FrobeniusAlgebra {
    pub fn new(dim: usize, mult: ComplexMatrix, unit: ComplexMatrix) -> FrobeniusResult<Self> {
        if dim == 0 {
            return Err(FrobeniusError::EmptyCarrier);
        }
        if mult.rows() != dim || mult.cols() != dim * dim {
            return Err(FrobeniusError::MultShape {
                dim,
                expected: dim * dim,
                rows: mult.rows(),
                cols: mult.cols(),
            });
        }
        if unit.rows() != dim || unit.cols() != 1 {
            return Err(FrobeniusError::UnitShape {
                dim,
                rows: unit.rows(),
                cols: unit.cols(),
            });
        }
        Ok(FrobeniusAlgebra { dim, mult, unit })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mult(&self) -> &ComplexMatrix {
        &self.mult
    }

    pub fn unit(&self) -> &ComplexMatrix {
        &self.unit
    }

    pub fn comult(&self) -> ComplexMatrix {
        self.mult.dagger()
    }

    pub fn counit(&self) -> ComplexMatrix {
        self.unit.dagger()
    }

    /// The cap `I → A⊗A` obtained by copying the unit: `comult ∘ unit`.
    pub fn cap(&self) -> ComplexMatrix {
        &self.comult() * &self.unit
    }
}

/// Verdicts for the five algebra laws, each with its residual.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FrobeniusReport {
    pub associative: Check,
    pub unital: Check,
    pub frobenius: Check,
    pub special: Check,
    pub commutative: Check,
}

impl FrobeniusReport {
    /// The four structural laws, excluding commutativity.
    pub fn structural_ok(&self) -> bool {
        self.associative.pass && self.unital.pass && self.frobenius.pass && self.special.pass
    }
}

/// Evaluate all five laws of `f` as matrix equalities at tolerance `tol`.
pub fn check_frobenius(f: &FrobeniusAlgebra, tol: f64) -> FrobeniusReport {
    let n = f.dim();
    let id = ComplexMatrix::identity(n);
    let mult = f.mult();
    let comult = f.comult();

    let assoc_l = mult * &mult.kron(&id);
    let assoc_r = mult * &id.kron(mult);
    let associative = Check::from_deviation(deviation(&assoc_l, &assoc_r), tol);

    let unit_l = mult * &f.unit().kron(&id);
    let unit_r = mult * &id.kron(f.unit());
    let unital = Check::from_deviation(deviation(&unit_l, &id).max(deviation(&unit_r, &id)), tol);

    let middle = &comult * mult;
    let frob_l = &id.kron(mult) * &comult.kron(&id);
    let frob_r = &mult.kron(&id) * &id.kron(&comult);
    let frobenius = Check::from_deviation(
        deviation(&frob_l, &middle).max(deviation(&frob_r, &middle)),
        tol,
    );

    let special = Check::from_deviation(deviation(&(mult * &comult), &id), tol);

    let commutative = Check::from_deviation(deviation(&(mult * &swap(n, n)), mult), tol);

    FrobeniusReport {
        associative,
        unital,
        frobenius,
        special,
        commutative,
    }
}

/// The classical structure on `C^n`: `mult(e_i ⊗ e_j) = δ_ij e_i`, unit `Σ e_i`.
pub fn classical_structure(n: usize) -> FrobeniusAlgebra {
    assert!(n >= 1, "classical structure needs a nonempty carrier");
    let mut entries = vec![C64::new(0.0, 0.0); n * n * n];
    for i in 0..n {
        entries[i * n * n + (i * n + i)] = C64::new(1.0, 0.0);
    }
    let mult = ComplexMatrix::new(n, n * n, entries).expect("shape is consistent by construction");
    let unit = ComplexMatrix::from_fn(n, 1, |_, _| C64::new(1.0, 0.0));
    FrobeniusAlgebra::new(n, mult, unit).expect("shapes are consistent by construction")
}

/// The matrix algebra `M_k` on the carrier `C^{k²}` of matrix units `e_ab`.
///
/// `mult(e_ab ⊗ e_cd) = δ_bc e_ad / √k` and `unit = √k Σ e_aa`; the `1/√k`
/// and `√k` factors are the unique scaling that makes the algebra special and
/// unital at the same time.
pub fn matrix_algebra(k: usize) -> FrobeniusAlgebra {
    assert!(k >= 1, "matrix algebra needs a nonempty carrier");
    let n = k * k;
    let scale = 1.0 / (k as f64).sqrt();
    let mut entries = vec![C64::new(0.0, 0.0); n * n * n];
    for a in 0..k {
        for b in 0..k {
            for d in 0..k {
                let row = a * k + d;
                let col = (a * k + b) * n + (b * k + d);
                entries[row * n * n + col] = C64::new(scale, 0.0);
            }
        }
    }
    let mult = ComplexMatrix::new(n, n * n, entries).expect("shape is consistent by construction");
    let unit = ComplexMatrix::from_fn(n, 1, |i, _| {
        if i % (k + 1) == 0 {
            C64::new((k as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    FrobeniusAlgebra::new(n, mult, unit).expect("shapes are consistent by construction")
}

/// Tensor product of two Frobenius algebras, on the Kronecker carrier.
pub fn tensor_frobenius(a: &FrobeniusAlgebra, b: &FrobeniusAlgebra) -> FrobeniusAlgebra {
    let (na, nb) = (a.dim(), b.dim());
    let ida = ComplexMatrix::identity(na);
    let idb = ComplexMatrix::identity(nb);
    // A⊗B⊗A⊗B → A⊗A⊗B⊗B by swapping the middle factors, then multiply pairwise.
    let rearrange = ida.kron(&swap(nb, na)).kron(&idb);
    let mult = &a.mult().kron(b.mult()) * &rearrange;
    let unit = a.unit().kron(b.unit());
    FrobeniusAlgebra::new(na * nb, mult, unit).expect("shapes are consistent by construction")
}

/// All nonzero states `x` with `comult(x) = x ⊗ x`, for a commutative algebra.
///
/// The states are found by simultaneously diagonalizing the commuting family
/// of left-multiplication operators with a random-coefficient Hermitian
/// combination, then rescaling each eigenvector to satisfy the copying
/// equation. For `classical_structure(n)` this returns exactly the `n`
/// standard basis vectors.
pub fn copyable_states(f: &FrobeniusAlgebra, tol: f64) -> FrobeniusResult<Vec<ComplexMatrix>> {
    let report = check_frobenius(f, tol);
    if !report.commutative.pass {
        return Err(FrobeniusError::NotCommutative {
            deviation: report.commutative.deviation,
        });
    }
    let n = f.dim();
    let id = ComplexMatrix::identity(n);
    let comult = f.comult();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    // Left multiplication by e_v, as an n×n operator.
    let left_mult: Vec<ComplexMatrix> = (0..n)
        .map(|v| f.mult() * &ComplexMatrix::basis_column(n, v).kron(&id))
        .collect();

    for _attempt in 0..8 {
        let mut probe = ComplexMatrix::zeros(n, n);
        for op in &left_mult {
            let xi = C64::new(rng.gen_range(-1.0..1.0), 0.0);
            probe = &probe + &(&op.scale(xi) + &op.dagger().scale(xi));
        }
        let (values, vectors) = crate::linalg::hermitian_eigen(&probe)
            .expect("probe is square by construction");
        // Clustered eigenvalues leave the eigenbasis ambiguous; retry with
        // fresh coefficients.
        let clustered = values.windows(2).any(|w| (w[0] - w[1]).abs() < 1e-6);
        if clustered && n > 1 {
            continue;
        }
        let mut states = Vec::new();
        for j in 0..n {
            let w = ComplexMatrix::from_fn(n, 1, |i, _| vectors.get(i, j));
            // If w spans a copyable direction then comult(w) = β w⊗w; read β
            // off by pairing with the unit vector w⊗w. The scaling by β leaves
            // no residual phase freedom: copyable states are rigid.
            let ww = w.kron(&w);
            let beta = (&ww.dagger() * &(&comult * &w)).get(0, 0);
            let x = w.scale(beta);
            if x.max_norm() <= tol {
                continue;
            }
            let residual = deviation(&(&comult * &x), &x.kron(&x));
            if residual <= tol.max(1e-10) * 10.0 {
                states.push(x);
            }
        }
        if !states.is_empty() || n == 0 {
            // Deterministic order: by first significant coordinate.
            states.sort_by_key(|x| {
                (0..n)
                    .find(|&i| x.get(i, 0).norm() > tol)
                    .unwrap_or(n)
            });
            return Ok(states);
        }
    }
    Ok(Vec::new())
}
