//! Finite groupoids and their correspondence with 0/1-entry Frobenius algebras.
//!
//! A groupoid is stored as a morphism list with a partial composition table:
//! `comp(g, h) = g∘h` is defined exactly when `src(g) = tgt(h)`. Convolution
//! turns a groupoid into a Frobenius algebra whose multiplication matrix has
//! only 0/1 entries; conversely any algebra with 0/1 entries determines a
//! relational structure that either is a groupoid or is rejected with the
//! first failing axiom. The non-discrete algebras fail specialness by exactly
//! the factorization count, which callers are expected to report rather than
//! rescale away.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frobenius::{FrobeniusAlgebra, FrobeniusError};
use crate::linalg::ComplexMatrix;
use num_complex::Complex64 as C64;

pub type GroupoidResult<T> = Result<T, GroupoidError>;

#[derive(Debug, Error)]
pub enum GroupoidError {
    #[error("{what} index {index} out of range (bound {bound})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },
    #[error("composition table assigns two results to the pair ({g},{h})")]
    DuplicateComposition { g: usize, h: usize },
    #[error("{matrix} entry ({row},{col}) is {value:.6} away from both 0 and 1")]
    EntryNotBoolean {
        row: usize,
        col: usize,
        matrix: &'static str,
        value: f64,
    },
    #[error("relational structure is not a groupoid: {context}")]
    NotGroupoid { context: String },
    #[error("groupoid is invalid: {violation}")]
    InvalidGroupoid { violation: String },
    #[error("operation requires a one-object groupoid, got {objects} objects")]
    NotAGroup { objects: usize },
    #[error(transparent)]
    Frobenius(#[from] FrobeniusError),
}

/// A morphism, recorded by its endpoint objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Morphism {
    pub src: usize,
    pub tgt: usize,
}

/// A finite groupoid: objects, morphisms, partial composition, identities,
/// and inverses, all by index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupoidData", into = "GroupoidData")]
pub struct FiniteGroupoid {
    objects: usize,
    morphisms: Vec<Morphism>,
    comp: Vec<[usize; 3]>,
    ids: Vec<usize>,
    inv: Vec<usize>,
    #[serde(skip)]
    table: BTreeMap<(usize, usize), usize>,
}

#[derive(Serialize, Deserialize)]
struct GroupoidData {
    objects: usize,
    morphisms: Vec<Morphism>,
    comp: Vec<[usize; 3]>,
    ids: Vec<usize>,
    inv: Vec<usize>,
}

impl TryFrom<GroupoidData> for FiniteGroupoid {
    type Error = GroupoidError;

    fn try_from(data: GroupoidData) -> GroupoidResult<Self> {
        FiniteGroupoid::new(data.objects, data.morphisms, data.comp, data.ids, data.inv)
    }
}

impl From<FiniteGroupoid> for GroupoidData {
    fn from(g: FiniteGroupoid) -> Self {
        GroupoidData {
            objects: g.objects,
            morphisms: g.morphisms,
            comp: g.comp,
            ids: g.ids,
            inv: g.inv,
        }
    }
}

impl FiniteGroupoid {
    /// Build a groupoid candidate, validating index bounds and the functional
    /// shape of the tables. Axioms are checked separately by
    /// [`validate_groupoid`].
    pub fn new(
        objects: usize,
        morphisms: Vec<Morphism>,
        comp: Vec<[usize; 3]>,
        ids: Vec<usize>,
        inv: Vec<usize>,
    ) -> GroupoidResult<Self> {
        let n = morphisms.len();
        for m in &morphisms {
            for (what, index) in [("source object", m.src), ("target object", m.tgt)] {
                if index >= objects {
                    return Err(GroupoidError::IndexOutOfRange {
                        what,
                        index,
                        bound: objects,
                    });
                }
            }
        }
        for entry in ids.iter().chain(&inv).chain(comp.iter().flatten()) {
            if *entry >= n {
                return Err(GroupoidError::IndexOutOfRange {
                    what: "morphism",
                    index: *entry,
                    bound: n,
                });
            }
        }
        let mut table = BTreeMap::new();
        for &[g, h, k] in &comp {
            if table.insert((g, h), k).is_some() {
                return Err(GroupoidError::DuplicateComposition { g, h });
            }
        }
        Ok(FiniteGroupoid {
            objects,
            morphisms,
            comp,
            ids,
            inv,
            table,
        })
    }

    /// The discrete groupoid: `n` objects with only their identities.
    pub fn discrete(n: usize) -> Self {
        let morphisms = (0..n).map(|x| Morphism { src: x, tgt: x }).collect();
        let comp = (0..n).map(|x| [x, x, x]).collect();
        FiniteGroupoid::new(n, morphisms, comp, (0..n).collect(), (0..n).collect())
            .expect("tables are consistent by construction")
    }

    /// The cyclic group `Z_n` as a one-object groupoid.
    pub fn cyclic_group(n: usize) -> Self {
        assert!(n >= 1, "a group has at least its identity");
        let morphisms = (0..n).map(|_| Morphism { src: 0, tgt: 0 }).collect();
        let mut comp = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                comp.push([a, b, (a + b) % n]);
            }
        }
        let inv = (0..n).map(|a| (n - a) % n).collect();
        FiniteGroupoid::new(1, morphisms, comp, vec![0], inv)
            .expect("tables are consistent by construction")
    }

    /// Disjoint union, shifting the second summand's indices.
    pub fn disjoint_union(a: &FiniteGroupoid, b: &FiniteGroupoid) -> Self {
        let (so, sm) = (a.objects, a.morphisms.len());
        let mut morphisms = a.morphisms.clone();
        morphisms.extend(b.morphisms.iter().map(|m| Morphism {
            src: m.src + so,
            tgt: m.tgt + so,
        }));
        let mut comp = a.comp.clone();
        comp.extend(b.comp.iter().map(|&[g, h, k]| [g + sm, h + sm, k + sm]));
        let mut ids = a.ids.clone();
        ids.extend(b.ids.iter().map(|&i| i + sm));
        let mut inv = a.inv.clone();
        inv.extend(b.inv.iter().map(|&i| i + sm));
        FiniteGroupoid::new(a.objects + b.objects, morphisms, comp, ids, inv)
            .expect("tables are consistent by construction")
    }

    pub fn objects(&self) -> usize {
        self.objects
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn inv(&self) -> &[usize] {
        &self.inv
    }

    /// `g∘h` when defined.
    pub fn compose(&self, g: usize, h: usize) -> Option<usize> {
        self.table.get(&(g, h)).copied()
    }
}

/// Violations found by [`validate_groupoid`], in human-readable form.
#[derive(Debug, Clone, Serialize)]
pub struct GroupoidReport {
    pub violations: Vec<String>,
}

impl GroupoidReport {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check every groupoid axiom by exhaustive enumeration.
pub fn validate_groupoid(g: &FiniteGroupoid) -> GroupoidReport {
    let mut violations = Vec::new();
    let n = g.morphisms.len();

    if g.ids.len() != g.objects {
        violations.push(format!(
            "expected {} identity morphisms, got {}",
            g.objects,
            g.ids.len()
        ));
    }
    for (x, &e) in g.ids.iter().enumerate() {
        let m = g.morphisms[e];
        if m.src != x || m.tgt != x {
            violations.push(format!(
                "identity {e} of object {x} has endpoints {}→{}",
                m.src, m.tgt
            ));
        }
    }
    if g.inv.len() != n {
        violations.push(format!("expected {n} inverses, got {}", g.inv.len()));
    }

    for a in 0..n {
        for b in 0..n {
            let composable = g.morphisms[a].src == g.morphisms[b].tgt;
            match (composable, g.compose(a, b)) {
                (true, None) => {
                    violations.push(format!("composable pair ({a},{b}) has no composite"))
                }
                (false, Some(_)) => {
                    violations.push(format!("non-composable pair ({a},{b}) has a composite"))
                }
                (true, Some(k)) => {
                    if g.morphisms[k].src != g.morphisms[b].src
                        || g.morphisms[k].tgt != g.morphisms[a].tgt
                    {
                        violations.push(format!("composite {k} of ({a},{b}) has wrong endpoints"));
                    }
                }
                (false, None) => {}
            }
        }
    }

    for a in 0..n {
        if g.ids.len() != g.objects || g.inv.len() != n {
            break;
        }
        let (src, tgt) = (g.morphisms[a].src, g.morphisms[a].tgt);
        if g.compose(a, g.ids[src]) != Some(a) || g.compose(g.ids[tgt], a) != Some(a) {
            violations.push(format!("identity laws fail for morphism {a}"));
        }
        let i = g.inv[a];
        if g.morphisms[i].src != tgt || g.morphisms[i].tgt != src {
            violations.push(format!("inverse {i} of morphism {a} has wrong endpoints"));
        } else if g.compose(a, i) != Some(g.ids[tgt]) || g.compose(i, a) != Some(g.ids[src]) {
            violations.push(format!("inverse laws fail for morphism {a}"));
        }
    }

    for a in 0..n {
        for b in 0..n {
            let Some(ab) = g.compose(a, b) else { continue };
            for c in 0..n {
                let Some(bc) = g.compose(b, c) else { continue };
                if g.compose(ab, c) != g.compose(a, bc) {
                    violations.push(format!("associativity fails on ({a},{b},{c})"));
                }
            }
        }
    }

    GroupoidReport { violations }
}

/// Convolution algebra of a valid groupoid: basis the morphisms, product
/// `e_g · e_h = e_{g∘h}` when defined and 0 otherwise, unit the sum of
/// identities. Every matrix entry is 0 or 1.
pub fn groupoid_to_algebra(g: &FiniteGroupoid) -> GroupoidResult<FrobeniusAlgebra> {
    let report = validate_groupoid(g);
    if let Some(violation) = report.violations.into_iter().next() {
        return Err(GroupoidError::InvalidGroupoid { violation });
    }
    let n = g.morphisms.len();
    let mut mult = vec![C64::new(0.0, 0.0); n * n * n];
    for &[a, b, k] in &g.comp {
        mult[k * (n * n) + a * n + b] = C64::new(1.0, 0.0);
    }
    let mut unit = vec![C64::new(0.0, 0.0); n];
    for &e in &g.ids {
        unit[e] = C64::new(1.0, 0.0);
    }
    Ok(FrobeniusAlgebra::new(
        n,
        ComplexMatrix::new(n, n * n, mult).expect("shape is consistent by construction"),
        ComplexMatrix::new(n, 1, unit).expect("shape is consistent by construction"),
    )?)
}

fn as_boolean(
    z: C64,
    row: usize,
    col: usize,
    matrix: &'static str,
    tol: f64,
) -> GroupoidResult<bool> {
    let to_zero = z.norm();
    let to_one = (z - C64::new(1.0, 0.0)).norm();
    if to_zero <= tol {
        Ok(false)
    } else if to_one <= tol {
        Ok(true)
    } else {
        Err(GroupoidError::EntryNotBoolean {
            row,
            col,
            matrix,
            value: to_zero.min(to_one),
        })
    }
}

/// Read a groupoid off an algebra whose mult and unit have only 0/1 entries:
/// morphisms are basis indices, composition is the support of mult,
/// identities the support of unit, sources/targets and inverses recovered
/// from the identity and inverse laws.
pub fn algebra_to_groupoid(f: &FrobeniusAlgebra, tol: f64) -> GroupoidResult<FiniteGroupoid> {
    let n = f.dim();
    let mut comp = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let mut result = None;
            for k in 0..n {
                if as_boolean(f.mult().get(k, a * n + b), k, a * n + b, "mult", tol)?
                    && result.replace(k).is_some()
                {
                    return Err(GroupoidError::NotGroupoid {
                        context: format!("product of ({a},{b}) is not a single basis vector"),
                    });
                }
            }
            if let Some(k) = result {
                comp.push([a, b, k]);
            }
        }
    }
    let mut ids = Vec::new();
    for e in 0..n {
        if as_boolean(f.unit().get(e, 0), e, 0, "unit", tol)? {
            ids.push(e);
        }
    }

    let table: BTreeMap<(usize, usize), usize> =
        comp.iter().map(|&[a, b, k]| ((a, b), k)).collect();
    let object_of = |context: &str, candidates: Vec<usize>| -> GroupoidResult<usize> {
        match candidates.as_slice() {
            [unique] => Ok(*unique),
            _ => Err(GroupoidError::NotGroupoid {
                context: format!("{context}: expected one identity, found {}", candidates.len()),
            }),
        }
    };
    let mut morphisms = Vec::with_capacity(n);
    for a in 0..n {
        let src_ids: Vec<usize> = (0..ids.len())
            .filter(|&x| table.get(&(a, ids[x])) == Some(&a))
            .collect();
        let tgt_ids: Vec<usize> = (0..ids.len())
            .filter(|&x| table.get(&(ids[x], a)) == Some(&a))
            .collect();
        morphisms.push(Morphism {
            src: object_of(&format!("source of morphism {a}"), src_ids)?,
            tgt: object_of(&format!("target of morphism {a}"), tgt_ids)?,
        });
    }
    let mut inv = Vec::with_capacity(n);
    for a in 0..n {
        let id_src = ids[morphisms[a].src];
        let id_tgt = ids[morphisms[a].tgt];
        let candidates: Vec<usize> = (0..n)
            .filter(|&b| table.get(&(a, b)) == Some(&id_tgt) && table.get(&(b, a)) == Some(&id_src))
            .collect();
        match candidates.as_slice() {
            [unique] => inv.push(*unique),
            _ => {
                return Err(GroupoidError::NotGroupoid {
                    context: format!(
                        "morphism {a}: expected one inverse, found {}",
                        candidates.len()
                    ),
                })
            }
        }
    }

    let g = FiniteGroupoid::new(ids.len(), morphisms, comp, ids, inv).map_err(|e| {
        GroupoidError::NotGroupoid {
            context: e.to_string(),
        }
    })?;
    let report = validate_groupoid(&g);
    if let Some(violation) = report.violations.into_iter().next() {
        return Err(GroupoidError::NotGroupoid { context: violation });
    }
    Ok(g)
}

/// Exhaustive isomorphism test: search for a morphism bijection respecting
/// endpoints, composition, identities, and inverses. Intended for small
/// instances (at most 8 morphisms).
pub fn are_isomorphic(a: &FiniteGroupoid, b: &FiniteGroupoid) -> bool {
    let n = a.morphisms.len();
    if n != b.morphisms.len() || a.objects != b.objects || a.ids.len() != b.ids.len() {
        return false;
    }
    let mut pi = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn compatible(a: &FiniteGroupoid, b: &FiniteGroupoid, pi: &[usize]) -> bool {
        let assigned = |m: usize| pi[m] != usize::MAX;
        for (g, &pg) in pi.iter().enumerate() {
            if pg == usize::MAX {
                continue;
            }
            if a.ids.contains(&g) != b.ids.contains(&pg) {
                return false;
            }
            if assigned(a.inv[g]) && pi[a.inv[g]] != b.inv[pg] {
                return false;
            }
            for (h, &ph) in pi.iter().enumerate() {
                if ph == usize::MAX {
                    continue;
                }
                match (a.compose(g, h), b.compose(pg, ph)) {
                    (Some(k), Some(pk)) => {
                        if assigned(k) && pi[k] != pk {
                            return false;
                        }
                    }
                    (None, None) => {}
                    _ => return false,
                }
            }
        }
        true
    }
    fn search(
        a: &FiniteGroupoid,
        b: &FiniteGroupoid,
        pi: &mut Vec<usize>,
        used: &mut Vec<bool>,
        g: usize,
    ) -> bool {
        if g == pi.len() {
            return true;
        }
        for candidate in 0..pi.len() {
            if used[candidate] {
                continue;
            }
            pi[g] = candidate;
            used[candidate] = true;
            if compatible(a, b, pi) && search(a, b, pi, used, g + 1) {
                return true;
            }
            pi[g] = usize::MAX;
            used[candidate] = false;
        }
        false
    }
    search(a, b, &mut pi, &mut used, 0)
}
