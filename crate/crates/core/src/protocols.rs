//! Measurements, POVMs, the teleportation equation, and its security check.
//!
//! A measurement is a CP map from a system algebra to a classical outcome
//! algebra that preserves the counit (the trace); on a single matrix block
//! this is the same data as a POVM. Teleportation data bundles a resource
//! state on two copies of the travelling system, a measurement of the message
//! with the first copy, and one invertible correction per outcome. The
//! teleportation equation compares measure-then-correct against handing the
//! message over with a uniform classical record; the security equation drops
//! the corrections and traces out the second copy instead.
//!
//! Scalar convention: resource states have trace 1 and the classical record
//! is the uniform distribution, so both sides of each equation are
//! trace-preserving channels and the checks are strict equalities.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cpstar::{
    is_completely_positive, operator_as_element, tensor_cp, tensor_reindex, trace_row, CPMap,
    CStarAlgebra, CpError,
};
use crate::groupoid::{validate_groupoid, FiniteGroupoid};
use crate::linalg::{deviation, hermitian_eigen, is_psd, Check, ComplexMatrix, LinalgError};
use num_complex::Complex64 as C64;

pub type ProtocolResult<T> = Result<T, ProtocolError>;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("measurement systems must be a single matrix block or commutative, got blocks {blocks:?}")]
    SystemNotSupported { blocks: Vec<usize> },
    #[error("expected {expected} {what}, got {found}")]
    CountMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("POVM extraction needs a single matrix block, got blocks {blocks:?}")]
    NotMatrixBlock { blocks: Vec<usize> },
    #[error("POVM element {index} is not positive semidefinite")]
    ElementNotPsd { index: usize },
    #[error("resource must be a {expected}x{expected} operator on the two resource halves, got {rows}x{cols}")]
    ResourceShape {
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("one-time pads are built over groups, got a groupoid with {objects} objects")]
    NotAGroup { objects: usize },
    #[error("data fails certification: {context}")]
    NotCertified { context: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Cp(#[from] CpError),
}

/// A measurement: a map from a system to classical outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasurementData", into = "MeasurementData")]
pub struct Measurement {
    system: CStarAlgebra,
    outcomes: usize,
    map: CPMap,
}

#[derive(Serialize, Deserialize)]
struct MeasurementData {
    system: CStarAlgebra,
    outcomes: usize,
    map: CPMap,
}

impl TryFrom<MeasurementData> for Measurement {
    type Error = ProtocolError;

    fn try_from(data: MeasurementData) -> ProtocolResult<Self> {
        Measurement::new(data.system, data.outcomes, data.map)
    }
}

impl From<Measurement> for MeasurementData {
    fn from(m: Measurement) -> Self {
        MeasurementData {
            system: m.system,
            outcomes: m.outcomes,
            map: m.map,
        }
    }
}

impl Measurement {
    pub fn new(system: CStarAlgebra, outcomes: usize, map: CPMap) -> ProtocolResult<Self> {
        if system.blocks().len() > 1 && !system.is_commutative() {
            return Err(ProtocolError::SystemNotSupported {
                blocks: system.blocks().to_vec(),
            });
        }
        if map.dom() != &system {
            return Err(CpError::AlgebraMismatch {
                context: "measurement map domain differs from the system".into(),
            }
            .into());
        }
        if map.cod() != &CStarAlgebra::classical(outcomes) {
            return Err(CpError::AlgebraMismatch {
                context: format!("measurement map codomain must be C^{outcomes}"),
            }
            .into());
        }
        Ok(Measurement {
            system,
            outcomes,
            map,
        })
    }

    pub fn system(&self) -> &CStarAlgebra {
        &self.system
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn map(&self) -> &CPMap {
        &self.map
    }
}

/// Residual of counit preservation: summing the outcome weights must equal
/// taking the trace.
pub fn is_measurement(m: &Measurement, tol: f64) -> Check {
    let ones = ComplexMatrix::from_fn(1, m.outcomes(), |_, _| C64::new(1.0, 0.0));
    let collapsed = &ones * m.map().map();
    Check::from_deviation(deviation(&collapsed, &trace_row(m.system())), tol)
}

/// A positive operator-valued measure on a single Hilbert space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Povm {
    pub elements: Vec<ComplexMatrix>,
}

/// Each element PSD and the family summing to the identity.
pub fn check_povm(p: &Povm, tol: f64) -> Check {
    let Some(first) = p.elements.first() else {
        return Check::from_deviation(f64::INFINITY, tol);
    };
    let d = first.rows();
    let mut worst = 0.0f64;
    let mut sum = ComplexMatrix::zeros(d, d);
    for e in &p.elements {
        worst = worst.max(deviation(e, &e.dagger()));
        let (values, _) = hermitian_eigen(e).expect("POVM elements are square");
        if let Some(&low) = values.last() {
            worst = worst.max((-low).max(0.0));
        }
        sum = &sum + e;
    }
    worst = worst.max(deviation(&sum, &ComplexMatrix::identity(d)));
    Check::from_deviation(worst, tol)
}

/// Extract the POVM of a measurement on a single matrix block: element `i`
/// is the operator computing outcome weight `i` under the trace pairing.
pub fn povm_from_measurement(m: &Measurement) -> ProtocolResult<Povm> {
    let [d] = m.system().blocks() else {
        return Err(ProtocolError::NotMatrixBlock {
            blocks: m.system().blocks().to_vec(),
        });
    };
    let d = *d;
    let mut elements = Vec::with_capacity(m.outcomes());
    for i in 0..m.outcomes() {
        let p = ComplexMatrix::from_fn(d, d, |b, a| m.map().map().get(i, a * d + b));
        if !is_psd(&p, crate::DEFAULT_TOL)? {
            return Err(ProtocolError::ElementNotPsd { index: i });
        }
        elements.push(p);
    }
    Ok(Povm { elements })
}

/// Package a POVM as a measurement on the full matrix block.
pub fn measurement_from_povm(p: &Povm) -> ProtocolResult<Measurement> {
    let Some(first) = p.elements.first() else {
        return Err(ProtocolError::CountMismatch {
            what: "POVM elements",
            expected: 1,
            found: 0,
        });
    };
    let d = first.rows();
    let n = p.elements.len();
    let map = ComplexMatrix::from_fn(n, d * d, |i, col| {
        let (a, b) = (col / d, col % d);
        p.elements[i].get(b, a)
    });
    let system = CStarAlgebra::matrix(d);
    let map = CPMap::new(system.clone(), CStarAlgebra::classical(n), map)?;
    Measurement::new(system, n, map)
}

/// One solution candidate for the teleportation equation: a resource state on
/// two copies of the system, a joint measurement of message and first copy,
/// and one correction per outcome acting on the second copy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TeleportationDataRepr", into = "TeleportationDataRepr")]
pub struct TeleportationData {
    n: usize,
    system: CStarAlgebra,
    resource: ComplexMatrix,
    measurement: Measurement,
    corrections: Vec<CPMap>,
}

#[derive(Serialize, Deserialize)]
struct TeleportationDataRepr {
    n: usize,
    system: CStarAlgebra,
    resource: ComplexMatrix,
    measurement: Measurement,
    corrections: Vec<CPMap>,
}

impl TryFrom<TeleportationDataRepr> for TeleportationData {
    type Error = ProtocolError;

    fn try_from(data: TeleportationDataRepr) -> ProtocolResult<Self> {
        TeleportationData::new(
            data.n,
            data.system,
            data.resource,
            data.measurement,
            data.corrections,
        )
    }
}

impl From<TeleportationData> for TeleportationDataRepr {
    fn from(t: TeleportationData) -> Self {
        TeleportationDataRepr {
            n: t.n,
            system: t.system,
            resource: t.resource,
            measurement: t.measurement,
            corrections: t.corrections,
        }
    }
}

impl TeleportationData {
    pub fn new(
        n: usize,
        system: CStarAlgebra,
        resource: ComplexMatrix,
        measurement: Measurement,
        corrections: Vec<CPMap>,
    ) -> ProtocolResult<Self> {
        let h = system.hilbert_dim();
        if resource.rows() != h * h || resource.cols() != h * h {
            return Err(ProtocolError::ResourceShape {
                expected: h * h,
                rows: resource.rows(),
                cols: resource.cols(),
            });
        }
        if measurement.outcomes() != n {
            return Err(ProtocolError::CountMismatch {
                what: "measurement outcomes",
                expected: n,
                found: measurement.outcomes(),
            });
        }
        if measurement.system() != &system.tensor(&system) {
            return Err(CpError::AlgebraMismatch {
                context: "measurement must act on message ⊗ first resource half".into(),
            }
            .into());
        }
        if corrections.len() != n {
            return Err(ProtocolError::CountMismatch {
                what: "corrections",
                expected: n,
                found: corrections.len(),
            });
        }
        for nu in &corrections {
            if nu.dom() != &system || nu.cod() != &system {
                return Err(CpError::AlgebraMismatch {
                    context: "corrections must be endomaps of the system".into(),
                }
                .into());
            }
        }
        Ok(TeleportationData {
            n,
            system,
            resource,
            measurement,
            corrections,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn system(&self) -> &CStarAlgebra {
        &self.system
    }

    pub fn resource(&self) -> &ComplexMatrix {
        &self.resource
    }

    pub fn measurement(&self) -> &Measurement {
        &self.measurement
    }

    pub fn corrections(&self) -> &[CPMap] {
        &self.corrections
    }

    /// Same data with one field replaced; used to probe broken variants.
    pub fn with_resource(&self, resource: ComplexMatrix) -> ProtocolResult<Self> {
        TeleportationData::new(
            self.n,
            self.system.clone(),
            resource,
            self.measurement.clone(),
            self.corrections.clone(),
        )
    }

    /// Same data with one correction replaced; used to probe broken variants.
    pub fn with_correction(&self, index: usize, nu: CPMap) -> ProtocolResult<Self> {
        let mut corrections = self.corrections.clone();
        corrections[index] = nu;
        TeleportationData::new(
            self.n,
            self.system.clone(),
            self.resource.clone(),
            self.measurement.clone(),
            corrections,
        )
    }
}

/// A channel producing a classical record next to its output system.
#[derive(Debug, Clone)]
pub struct ChannelWithRecord {
    pub input: CStarAlgebra,
    pub map: CPMap,
}

/// Certification shared by every protocol check: measurement counit-preserving
/// and CP, resource PSD and carried by the two system copies, corrections CP
/// and invertible.
fn certify(t: &TeleportationData, tol: f64) -> ProtocolResult<()> {
    let verdict = is_measurement(t.measurement(), tol);
    if !verdict.pass {
        return Err(ProtocolError::NotCertified {
            context: format!(
                "measurement is not counit-preserving (deviation {:.3e})",
                verdict.deviation
            ),
        });
    }
    let report = is_completely_positive(t.measurement().map(), tol);
    if !report.pass {
        return Err(ProtocolError::NotCertified {
            context: format!(
                "measurement map is not CP (minimum Choi eigenvalue {:.3e})",
                report.min_eigenvalue
            ),
        });
    }
    if !is_psd(t.resource(), tol)? {
        return Err(ProtocolError::NotCertified {
            context: "resource state is not positive semidefinite".into(),
        });
    }
    let pair = t.system().tensor(t.system());
    operator_as_element(&pair, t.resource(), tol.max(1e-12)).map_err(|e| {
        ProtocolError::NotCertified {
            context: format!("resource is not an element of the two resource halves: {e}"),
        }
    })?;
    for (i, nu) in t.corrections().iter().enumerate() {
        let report = is_completely_positive(nu, tol);
        if !report.pass {
            return Err(ProtocolError::NotCertified {
                context: format!("correction {i} is not CP"),
            });
        }
        let gram = &nu.map().dagger() * nu.map();
        let (values, _) = hermitian_eigen(&gram)?;
        let smallest = values.last().copied().unwrap_or(0.0);
        if smallest <= tol {
            return Err(ProtocolError::NotCertified {
                context: format!("correction {i} is not invertible"),
            });
        }
    }
    Ok(())
}

/// Shared prefix of both equations: adjoin the resource state, then measure
/// message with the first half. Returns the matrix of the map
/// `system → Cⁿ ⊗ system`.
fn measure_with_resource(t: &TeleportationData) -> ProtocolResult<ComplexMatrix> {
    let a = t.system();
    let da = a.dim();
    let pair = a.tensor(a);
    let resource_coords = operator_as_element(&pair, t.resource(), crate::DEFAULT_TOL)?;
    let adjoin = &tensor_reindex(a, &pair) * &ComplexMatrix::identity(da).kron(&resource_coords);
    let measure_first = tensor_cp(t.measurement().map(), &CPMap::identity(a));
    Ok(measure_first.map() * &adjoin)
}

/// Left side of the teleportation equation: adjoin the resource, measure,
/// record the outcome, and correct the second half.
pub fn lhs_teleportation(t: &TeleportationData) -> ProtocolResult<ChannelWithRecord> {
    let a = t.system();
    let da = a.dim();
    let n = t.n();
    let measured = measure_with_resource(t)?;
    let correct = ComplexMatrix::from_fn(n * da, n * da, |r, c| {
        if r / da == c / da {
            t.corrections()[r / da].map().get(r % da, c % da)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let map = CPMap::new(
        a.clone(),
        CStarAlgebra::classical(n).tensor(a),
        &correct * &measured,
    )?;
    Ok(ChannelWithRecord {
        input: a.clone(),
        map,
    })
}

/// Right side of the teleportation equation: a uniform classical record next
/// to the untouched message.
pub fn rhs_teleportation(t: &TeleportationData) -> ProtocolResult<ChannelWithRecord> {
    let a = t.system();
    let n = t.n();
    let uniform = ComplexMatrix::from_fn(n, 1, |_, _| C64::new(1.0 / n as f64, 0.0));
    let map = CPMap::new(
        a.clone(),
        CStarAlgebra::classical(n).tensor(a),
        uniform.kron(&ComplexMatrix::identity(a.dim())),
    )?;
    Ok(ChannelWithRecord {
        input: a.clone(),
        map,
    })
}

/// Max-entry residual between the two sides of the teleportation equation.
pub fn check_teleportation(t: &TeleportationData, tol: f64) -> ProtocolResult<Check> {
    certify(t, tol)?;
    let lhs = lhs_teleportation(t)?;
    let rhs = rhs_teleportation(t)?;
    Ok(Check::from_deviation(
        deviation(lhs.map.map(), rhs.map.map()),
        tol,
    ))
}

/// Security residual: measuring and then destroying the second half must
/// equal destroying the message and emitting a uniform record.
pub fn check_security(t: &TeleportationData, tol: f64) -> ProtocolResult<Check> {
    certify(t, tol)?;
    let a = t.system();
    let da = a.dim();
    let n = t.n();
    let measured = measure_with_resource(t)?;
    let tr = trace_row(a);
    let destroy_half = ComplexMatrix::from_fn(n, n * da, |i, col| {
        if col / da == i {
            tr.get(0, col % da)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let lhs = &destroy_half * &measured;
    let uniform = ComplexMatrix::from_fn(n, 1, |_, _| C64::new(1.0 / n as f64, 0.0));
    let rhs = &uniform * &tr;
    Ok(Check::from_deviation(deviation(&lhs, &rhs), tol))
}

fn pauli_matrices() -> [ComplexMatrix; 4] {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        ComplexMatrix::identity(2),
        ComplexMatrix::new(2, 2, vec![z, o, o, z]).expect("shape is consistent"),
        ComplexMatrix::new(2, 2, vec![z, -i, i, z]).expect("shape is consistent"),
        ComplexMatrix::new(2, 2, vec![o, z, z, -o]).expect("shape is consistent"),
    ]
}

/// Conjugation by a square matrix as a map on element coordinates.
pub fn conjugation_map(u: &ComplexMatrix, system: &CStarAlgebra) -> ProtocolResult<CPMap> {
    let map = u.kron(&u.conj());
    Ok(CPMap::new(system.clone(), system.clone(), map)?)
}

/// Qubit teleportation: Bell resource, Bell measurement, Pauli corrections.
pub fn standard_qubit_teleportation() -> TeleportationData {
    let system = CStarAlgebra::matrix(2);
    let paulis = pauli_matrices();
    let half = C64::new(0.5, 0.0);
    let resource = ComplexMatrix::from_fn(4, 4, |r, c| {
        if (r == 0 || r == 3) && (c == 0 || c == 3) {
            half
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let bell_plus = ComplexMatrix::new(
        4,
        1,
        vec![
            C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ],
    )
    .expect("shape is consistent");
    let elements = paulis
        .iter()
        .map(|sigma| {
            let phi = &sigma.kron(&ComplexMatrix::identity(2)) * &bell_plus;
            &phi * &phi.dagger()
        })
        .collect();
    let measurement = measurement_from_povm(&Povm { elements })
        .expect("Bell projectors form a POVM");
    let corrections = paulis
        .iter()
        .map(|sigma| conjugation_map(sigma, &system).expect("shapes are consistent"))
        .collect();
    TeleportationData::new(4, system, resource, measurement, corrections)
        .expect("construction is consistent")
}

/// One-time pad over a finite group: perfectly correlated key resource, joint
/// read-off of ciphertext `m∘g`, and decryption `y ↦ c∘y⁻¹` per ciphertext.
pub fn one_time_pad(group: &FiniteGroupoid) -> ProtocolResult<TeleportationData> {
    if group.objects() != 1 {
        return Err(ProtocolError::NotAGroup {
            objects: group.objects(),
        });
    }
    let report = validate_groupoid(group);
    if let Some(violation) = report.violations.into_iter().next() {
        return Err(ProtocolError::NotCertified { context: violation });
    }
    let n = group.morphisms().len();
    let system = CStarAlgebra::classical(n);
    let weight = C64::new(1.0 / n as f64, 0.0);
    let resource = ComplexMatrix::from_fn(n * n, n * n, |r, c| {
        if r == c && r / n == r % n {
            weight
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mut cipher_entries = vec![C64::new(0.0, 0.0); n * n * n];
    for m in 0..n {
        for g in 0..n {
            let c = group.compose(m, g).expect("groups compose totally");
            cipher_entries[c * (n * n) + m * n + g] = C64::new(1.0, 0.0);
        }
    }
    let cipher = ComplexMatrix::new(n, n * n, cipher_entries).expect("shape is consistent");
    let measurement = Measurement::new(
        system.tensor(&system),
        n,
        CPMap::new(
            system.tensor(&system),
            CStarAlgebra::classical(n),
            cipher,
        )?,
    )?;
    let mut corrections = Vec::with_capacity(n);
    for c in 0..n {
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        for y in 0..n {
            let decoded = group
                .compose(c, group.inv()[y])
                .expect("groups compose totally");
            entries[decoded * n + y] = C64::new(1.0, 0.0);
        }
        corrections.push(CPMap::new(
            system.clone(),
            system.clone(),
            ComplexMatrix::new(n, n, entries).expect("shape is consistent"),
        )?);
    }
    TeleportationData::new(n, system, resource, measurement, corrections)
}
