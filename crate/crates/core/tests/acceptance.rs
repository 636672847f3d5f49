//! Acceptance suite: one test per criterion, each ending in a single
//! `criterion N (...): pass` line (visible under `--nocapture`). A failed
//! assertion inside a test marks that criterion as failed.

use catqi::bimod2cat::{
    boundary_bimodules, check_bimodule, check_coequalizer, compose_bimodules, compose_matrix_homs,
    compose_matrix_model, composite_idempotent, from_matrix_of_algebras, identity_bimodule,
    to_matrix_of_algebras, vertical_compose, AlgebraMatrix, CPMatrix, DaggerBimodule,
};
use catqi::cpstar::{
    cp_witness, entrywise_positive, is_completely_positive, trace_row, CPMap, CStarAlgebra,
};
use catqi::frobenius::{check_frobenius, classical_structure, matrix_algebra, FrobeniusAlgebra};
use catqi::groupoid::{
    algebra_to_groupoid, are_isomorphic, groupoid_to_algebra, validate_groupoid, FiniteGroupoid,
    Morphism,
};
use catqi::linalg::{deviation, hermitian_eigen, ComplexMatrix};
use catqi::protocols::{
    check_povm, check_security, check_teleportation, conjugation_map, is_measurement,
    lhs_teleportation, measurement_from_povm, one_time_pad, povm_from_measurement,
    standard_qubit_teleportation, Povm, TeleportationData,
};
use num_complex::Complex64 as C64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// Eigenvectors of a random Hermitian matrix: Haar-like unitary, good enough
/// for transporting test data.
fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    let g = random_matrix(rng, d, d);
    let herm = &g + &g.dagger();
    let (_, vectors) = hermitian_eigen(&herm).expect("square by construction");
    vectors
}

fn random_density(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    let g = random_matrix(rng, d, d);
    let gram = &g * &g.dagger();
    let trace: C64 = (0..d).map(|i| gram.get(i, i)).sum();
    gram.scale(c(1.0, 0.0) / trace)
}

fn random_algebra(rng: &mut ChaCha8Rng) -> CStarAlgebra {
    let count = rng.gen_range(1..=3);
    let blocks = (0..count).map(|_| rng.gen_range(1..=2)).collect();
    CStarAlgebra::new(blocks).expect("blocks are positive")
}

/// A CP map assembled from random Kraus families per block pair; completely
/// positive by construction.
fn random_cp_map(rng: &mut ChaCha8Rng, dom: &CStarAlgebra, cod: &CStarAlgebra) -> CPMap {
    let dcols = dom.dim();
    let mut entries = vec![c(0.0, 0.0); cod.dim() * dcols];
    for (i, &k) in dom.blocks().iter().enumerate() {
        for (j, &l) in cod.blocks().iter().enumerate() {
            for _ in 0..rng.gen_range(0..=2) {
                let op = random_matrix(rng, l, k);
                for x in 0..l {
                    for y in 0..l {
                        for a in 0..k {
                            for b in 0..k {
                                let row = cod.block_offset(j) + x * l + y;
                                let col = dom.block_offset(i) + a * k + b;
                                entries[row * dcols + col] += op.get(x, a) * op.get(y, b).conj();
                            }
                        }
                    }
                }
            }
        }
    }
    let map = ComplexMatrix::new(cod.dim(), dcols, entries).expect("shape is consistent");
    CPMap::new(dom.clone(), cod.clone(), map).expect("shape is consistent")
}

fn random_cell(rng: &mut ChaCha8Rng) -> CStarAlgebra {
    match rng.gen_range(0..4) {
        0 => CStarAlgebra::zero(),
        1 => CStarAlgebra::classical(1),
        2 => CStarAlgebra::classical(2),
        _ => CStarAlgebra::matrix(2),
    }
}

/// A random grid with at least one nonzero cell.
fn random_grid(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> AlgebraMatrix {
    let mut cells: Vec<CStarAlgebra> = (0..rows * cols).map(|_| random_cell(rng)).collect();
    if cells.iter().all(|a| a.dim() == 0) {
        cells[0] = CStarAlgebra::classical(1);
    }
    AlgebraMatrix::new(rows, cols, cells).expect("shape is consistent")
}

fn random_cp_matrix(rng: &mut ChaCha8Rng, source: &AlgebraMatrix, target: &AlgebraMatrix) -> CPMatrix {
    let mut cells = Vec::with_capacity(source.rows() * source.cols());
    for i in 0..source.rows() {
        for j in 0..source.cols() {
            cells.push(random_cp_map(rng, source.cell(i, j), target.cell(i, j)));
        }
    }
    CPMatrix::new(source.clone(), target.clone(), cells).expect("shapes agree")
}

/// Change of carrier basis by a unitary; preserves all three bimodule laws.
fn transport(b: &DaggerBimodule, u: &ComplexMatrix) -> DaggerBimodule {
    let inner = ComplexMatrix::identity(b.left().dim())
        .kron(&u.dagger())
        .kron(&ComplexMatrix::identity(b.right().dim()));
    let action = &(u * b.action()) * &inner;
    DaggerBimodule::new(b.left().clone(), b.right().clone(), b.carrier_dim(), action)
        .expect("transport preserves shape")
}

fn random_frobenius(rng: &mut ChaCha8Rng) -> FrobeniusAlgebra {
    match rng.gen_range(0..4) {
        0 => classical_structure(1),
        1 => classical_structure(2),
        2 => classical_structure(3),
        _ => matrix_algebra(2),
    }
}

/// A composable pair of certified bimodules: grid bimodules over classical
/// boundaries, or identity/boundary bimodules over a shared middle algebra,
/// each transported by a random unitary.
fn random_bimodule_pair(rng: &mut ChaCha8Rng) -> (DaggerBimodule, DaggerBimodule) {
    let (mb, nb) = match rng.gen_range(0..3) {
        0 => {
            let (m, n, p) = (
                rng.gen_range(1..=2),
                rng.gen_range(1..=2),
                rng.gen_range(1..=2),
            );
            let a = random_grid(rng, m, n);
            let b = random_grid(rng, n, p);
            (
                from_matrix_of_algebras(&a).expect("grid is nonzero"),
                from_matrix_of_algebras(&b).expect("grid is nonzero"),
            )
        }
        1 => {
            let alg = random_frobenius(rng);
            let (l, r) = boundary_bimodules(&alg);
            let id = identity_bimodule(&alg);
            match rng.gen_range(0..4) {
                0 => (r.clone(), l.clone()),
                1 => (r, id),
                2 => (id, l),
                _ => (l, r),
            }
        }
        _ => {
            let alg = random_frobenius(rng);
            (identity_bimodule(&alg), identity_bimodule(&alg))
        }
    };
    let u = random_unitary(rng, mb.carrier_dim());
    let v = random_unitary(rng, nb.carrier_dim());
    (transport(&mb, &u), transport(&nb, &v))
}

fn assert_unitary(u: &ComplexMatrix, tol: f64) {
    assert_eq!(u.rows(), u.cols());
    let gram = &u.dagger() * u;
    assert!(deviation(&gram, &ComplexMatrix::identity(u.cols())) <= tol);
    let cogram = u * &u.dagger();
    assert!(deviation(&cogram, &ComplexMatrix::identity(u.rows())) <= tol);
}

fn pauli_matrices() -> [ComplexMatrix; 4] {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        ComplexMatrix::identity(2),
        ComplexMatrix::new(2, 2, vec![z, o, o, z]).expect("shape is consistent"),
        ComplexMatrix::new(2, 2, vec![z, -i, i, z]).expect("shape is consistent"),
        ComplexMatrix::new(2, 2, vec![o, z, z, -o]).expect("shape is consistent"),
    ]
}

fn random_povm(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Povm {
    let pieces: Vec<ComplexMatrix> = (0..n)
        .map(|_| {
            let g = random_matrix(rng, d, d);
            &g * &g.dagger()
        })
        .collect();
    let mut sum = ComplexMatrix::zeros(d, d);
    for p in &pieces {
        sum = &sum + p;
    }
    let (values, vectors) = hermitian_eigen(&sum).expect("square by construction");
    let inv_sqrt = ComplexMatrix::from_fn(d, d, |r, s| {
        let mut z = c(0.0, 0.0);
        for (k, &v) in values.iter().enumerate() {
            z += vectors.get(r, k) * vectors.get(s, k).conj() * c(1.0 / v.sqrt(), 0.0);
        }
        z
    });
    Povm {
        elements: pieces.iter().map(|p| &(&inv_sqrt * p) * &inv_sqrt).collect(),
    }
}

/// A group isomorphic to Z_n with morphism indices shuffled, exercising
/// instances whose identity is not index 0.
fn relabeled_cyclic_group(rng: &mut ChaCha8Rng, n: usize) -> FiniteGroupoid {
    let mut relabel: Vec<usize> = (0..n).collect();
    relabel.shuffle(rng);
    let morphisms = vec![Morphism { src: 0, tgt: 0 }; n];
    let mut comp = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            comp.push([relabel[a], relabel[b], relabel[(a + b) % n]]);
        }
    }
    let ids = vec![relabel[0]];
    let mut inv = vec![0; n];
    for a in 0..n {
        inv[relabel[a]] = relabel[(n - a) % n];
    }
    let g = FiniteGroupoid::new(1, morphisms, comp, ids, inv).expect("tables are consistent");
    assert!(validate_groupoid(&g).valid());
    g
}

#[test]
fn criterion_1_frobenius_suite() {
    for n in 1..=6 {
        let report = check_frobenius(&classical_structure(n), TOL);
        assert!(report.associative.deviation <= TOL);
        assert!(report.unital.deviation <= TOL);
        assert!(report.frobenius.deviation <= TOL);
        assert!(report.special.deviation <= TOL);
        assert!(report.commutative.pass, "classical structures commute");
    }
    for k in 1..=4 {
        let report = check_frobenius(&matrix_algebra(k), TOL);
        assert!(report.associative.deviation <= TOL);
        assert!(report.unital.deviation <= TOL);
        assert!(report.frobenius.deviation <= TOL);
        assert!(report.special.deviation <= TOL);
        assert_eq!(report.commutative.pass, k == 1, "only scalars commute");
    }
    println!("criterion 1 (Frobenius suite): pass");
}

#[test]
fn criterion_2_cp_suite() {
    // Transpose on one qubit: positive but not completely positive.
    let m2 = CStarAlgebra::matrix(2);
    let transpose = ComplexMatrix::from_fn(4, 4, |r, s| {
        if r == (s % 2) * 2 + s / 2 {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let transpose = CPMap::new(m2.clone(), m2, transpose).expect("shape is consistent");
    let report = is_completely_positive(&transpose, TOL);
    assert!(!report.pass);
    assert!((report.min_eigenvalue - (-1.0)).abs() <= TOL);

    // The two classical marginals on C⁴ are accepted, and the four extreme
    // states of their equalizer satisfy f·x = g·x exactly.
    let c4 = CStarAlgebra::classical(4);
    let c1 = CStarAlgebra::classical(1);
    let row = |entries: [f64; 4]| {
        ComplexMatrix::new(1, 4, entries.iter().map(|&x| c(x, 0.0)).collect())
            .expect("shape is consistent")
    };
    let f = CPMap::new(c4.clone(), c1.clone(), row([1.0, 1.0, 0.0, 0.0])).expect("shape");
    let g = CPMap::new(c4, c1, row([0.0, 0.0, 1.0, 1.0])).expect("shape");
    assert!(is_completely_positive(&f, TOL).pass);
    assert!(is_completely_positive(&g, TOL).pass);
    assert!(entrywise_positive(&f, TOL).expect("commutative").pass);
    let states = [
        [1.0, 0.0, 1.0, 0.0],
        [1.0, 0.0, 0.0, 1.0],
        [0.0, 1.0, 0.0, 1.0],
        [0.0, 1.0, 1.0, 0.0],
    ];
    for s in states {
        let x = ComplexMatrix::new(4, 1, s.iter().map(|&v| c(v, 0.0)).collect()).expect("shape");
        let fx = f.map() * &x;
        let gx = g.map() * &x;
        assert_eq!(fx.get(0, 0), gx.get(0, 0), "equalizer condition is exact");
    }

    // Kraus witness round-trip on random CP maps.
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..100 {
        let dom = random_algebra(&mut rng);
        let cod = random_algebra(&mut rng);
        let map = random_cp_map(&mut rng, &dom, &cod);
        assert!(is_completely_positive(&map, 1e-8).pass);
        let witness = cp_witness(&map, 1e-10).expect("map is CP by construction");
        assert!(deviation(witness.reconstruct().map(), map.map()) <= 1e-8);
    }
    println!("criterion 2 (CP suite): pass");
}

#[test]
fn criterion_3_bimodule_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..50 {
        let (mb, nb) = random_bimodule_pair(&mut rng);
        assert!(check_bimodule(&mb, 1e-8).pass());
        assert!(check_bimodule(&nb, 1e-8).pass());

        let p = composite_idempotent(&mb, &nb).expect("middle algebras match");
        assert!(deviation(&p, &p.dagger()) <= TOL, "idempotent is self-adjoint");
        assert!(deviation(&(&p * &p), &p) <= TOL, "idempotent squares to itself");

        let (composed, iso) = compose_bimodules(&mb, &nb, 1e-8).expect("idempotent splits");
        assert!(check_bimodule(&composed, 1e-7).pass());
        assert!(check_coequalizer(&mb, &nb, &iso, 1e-8)
            .expect("endpoints match")
            .pass);

        // Unit laws: composing with an identity bimodule on either side gives
        // a unitary comparison with the original carrier.
        let (_, li) = compose_bimodules(&identity_bimodule(mb.left()), &mb, 1e-8)
            .expect("idempotent splits");
        assert_unitary(&(&mb.left_action() * li.matrix()), 1e-7);
        let (_, ri) = compose_bimodules(&mb, &identity_bimodule(mb.right()), 1e-8)
            .expect("idempotent splits");
        assert_unitary(&(&mb.right_action() * ri.matrix()), 1e-7);
    }

    // Boundary composites over the classical structures: R then L has
    // carrier dimension n.
    for n in 1..=4 {
        let (l, r) = boundary_bimodules(&classical_structure(n));
        let (composed, _) = compose_bimodules(&r, &l, TOL).expect("idempotent splits");
        assert_eq!(composed.carrier_dim(), n);
    }
    println!("criterion 3 (bimodule suite): pass");
}

#[test]
fn criterion_4_matrix_model_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..25 {
        let (m, n, p) = (
            rng.gen_range(1..=2),
            rng.gen_range(1..=2),
            rng.gen_range(1..=2),
        );
        let a = random_grid(&mut rng, m, n);
        let b = random_grid(&mut rng, n, p);

        // Concrete composite dimensions match the convolution formula.
        let concrete = compose_matrix_model(&a, &b).expect("inner shapes agree");
        for i in 0..m {
            for k in 0..p {
                let expected: usize = (0..n)
                    .map(|j| a.cell(i, j).dim() * b.cell(j, k).dim())
                    .sum();
                assert_eq!(concrete.cell(i, k).dim(), expected);
            }
        }

        // The abstract composite carries the same dimensions, cell by cell.
        let mb = from_matrix_of_algebras(&a).expect("grid is nonzero");
        let nb = from_matrix_of_algebras(&b).expect("grid is nonzero");
        let (composed, _) = compose_bimodules(&mb, &nb, 1e-8).expect("idempotent splits");
        assert_eq!(composed.carrier_dim(), concrete.total_dim());
        let recovered = to_matrix_of_algebras(&composed, 1e-7).expect("boundaries are classical");
        assert_eq!(recovered.cell_dims(), concrete.cell_dims());

        // Interchange: composing horizontally then vertically agrees with
        // vertically then horizontally.
        let a2 = random_grid(&mut rng, m, n);
        let a3 = random_grid(&mut rng, m, n);
        let b2 = random_grid(&mut rng, n, p);
        let b3 = random_grid(&mut rng, n, p);
        let f1 = random_cp_matrix(&mut rng, &a, &a2);
        let f2 = random_cp_matrix(&mut rng, &a2, &a3);
        let g1 = random_cp_matrix(&mut rng, &b, &b2);
        let g2 = random_cp_matrix(&mut rng, &b2, &b3);
        let stacked = compose_matrix_homs(
            &vertical_compose(&f1, &f2).expect("targets chain"),
            &vertical_compose(&g1, &g2).expect("targets chain"),
        )
        .expect("inner shapes agree");
        let sided = vertical_compose(
            &compose_matrix_homs(&f1, &g1).expect("inner shapes agree"),
            &compose_matrix_homs(&f2, &g2).expect("inner shapes agree"),
        )
        .expect("targets chain");
        for i in 0..m {
            for k in 0..p {
                assert!(deviation(stacked.cell(i, k).map(), sided.cell(i, k).map()) <= TOL);
            }
        }
    }
    println!("criterion 4 (matrix-model suite): pass");
}

#[test]
fn criterion_5_groupoid_suite() {
    let z2 = FiniteGroupoid::cyclic_group(2);
    let families: Vec<(FiniteGroupoid, f64, &str)> = vec![
        (FiniteGroupoid::discrete(1), 0.0, "discrete(1)"),
        (FiniteGroupoid::discrete(2), 0.0, "discrete(2)"),
        (FiniteGroupoid::discrete(3), 0.0, "discrete(3)"),
        (z2.clone(), 1.0, "Z2"),
        (FiniteGroupoid::cyclic_group(3), 2.0, "Z3"),
        (FiniteGroupoid::disjoint_union(&z2, &z2), 1.0, "Z2+Z2"),
    ];
    let mut defects = Vec::new();
    for (g, special_defect, name) in &families {
        assert!(g.morphisms().len() <= 6);
        let alg = groupoid_to_algebra(g).expect("groupoid is valid");

        // Entries exactly 0 or 1.
        for m in [alg.mult(), alg.unit()] {
            for r in 0..m.rows() {
                for s in 0..m.cols() {
                    let z = m.get(r, s);
                    assert!(z.im == 0.0 && (z.re == 0.0 || z.re == 1.0));
                }
            }
        }

        // Round-trip up to groupoid isomorphism.
        let back = algebra_to_groupoid(&alg, TOL).expect("algebra is a groupoid algebra");
        assert!(are_isomorphic(g, &back));

        // Multiplication and unit are entrywise positive as CP map data.
        let n = alg.dim();
        let mult = CPMap::new(
            CStarAlgebra::classical(n * n),
            CStarAlgebra::classical(n),
            alg.mult().clone(),
        )
        .expect("shape is consistent");
        let unit = CPMap::new(
            CStarAlgebra::classical(1),
            CStarAlgebra::classical(n),
            alg.unit().clone(),
        )
        .expect("shape is consistent");
        assert!(entrywise_positive(&mult, TOL).expect("commutative").pass);
        assert!(entrywise_positive(&unit, TOL).expect("commutative").pass);

        // Specialness holds exactly for discrete groupoids and fails by the
        // factorization count otherwise; the residual is reported.
        let report = check_frobenius(&alg, TOL);
        assert!(report.associative.pass && report.unital.pass && report.frobenius.pass);
        assert!(report.commutative.pass);
        assert!((report.special.deviation - special_defect).abs() <= TOL);
        defects.push(format!("{name}={}", report.special.deviation));
    }
    println!(
        "criterion 5 (groupoid suite): pass (specialness residuals: {})",
        defects.join(", ")
    );
}

#[test]
fn criterion_6_measurement_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let d = rng.gen_range(1..=4);
        let povm = random_povm(&mut rng, n, d);

        // Sum-to-identity implies counit preservation, and the round-trip
        // reproduces the elements.
        assert!(check_povm(&povm, 1e-8).pass);
        let m = measurement_from_povm(&povm).expect("elements are PSD");
        assert!(is_measurement(&m, 1e-8).pass);
        assert!(is_completely_positive(m.map(), 1e-8).pass);
        let back = povm_from_measurement(&m).expect("measurement is certified");
        for (original, recovered) in povm.elements.iter().zip(&back.elements) {
            assert!(deviation(original, recovered) <= TOL);
        }
        let again = measurement_from_povm(&back).expect("elements are PSD");
        assert!(deviation(again.map().map(), m.map().map()) <= TOL);

        // Breaking the sum breaks counit preservation by the same residual.
        let mut broken = povm.clone();
        broken.elements[0] = broken.elements[0].scale(c(1.25, 0.0));
        let broken_verdict = check_povm(&broken, 1e-8);
        assert!(!broken_verdict.pass);
        let bm = measurement_from_povm(&broken).expect("elements are still PSD");
        let counit_verdict = is_measurement(&bm, 1e-8);
        assert!(!counit_verdict.pass);
        assert!((broken_verdict.deviation - counit_verdict.deviation).abs() <= 1e-12);
    }
    println!("criterion 6 (measurement suite): pass");
}

/// Partial trace over the first two qubits of an operator on three qubits.
fn trace_out_first_two(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |x, y| (0..4).map(|u| a.get(u * 2 + x, u * 2 + y)).sum())
}

fn coords_of_qubit_operator(rho: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(4, 1, |idx, _| rho.get(idx / 2, idx % 2))
}

#[test]
fn criterion_7_teleportation_suite() {
    // Qubit teleportation against a density-matrix simulation: adjoin the
    // resource, project onto a Bell outcome, trace out the measured qubits,
    // correct, and compare branch by branch.
    let t = standard_qubit_teleportation();
    assert!(check_teleportation(&t, TOL).expect("data is certified").pass);
    let lhs = lhs_teleportation(&t).expect("data is certified");
    let povm = povm_from_measurement(t.measurement()).expect("Bell projectors are PSD");
    let paulis = pauli_matrices();
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for _ in 0..5 {
        let rho = random_density(&mut rng, 2);
        let joint = rho.kron(t.resource());
        let out = lhs.map.map() * &coords_of_qubit_operator(&rho);
        for (i, (projector, sigma)) in povm.elements.iter().zip(&paulis).enumerate() {
            let selected = &projector.kron(&ComplexMatrix::identity(2)) * &joint;
            let steered = trace_out_first_two(&selected);
            let corrected = &(sigma * &steered) * &sigma.dagger();
            assert!(deviation(&corrected, &rho.scale(c(0.25, 0.0))) <= TOL);
            let branch = ComplexMatrix::from_fn(4, 1, |r, _| out.get(i * 4 + r, 0));
            assert!(deviation(&branch, &coords_of_qubit_operator(&corrected)) <= TOL);
        }
    }

    // One-time pads against exhaustive key enumeration.
    for n in [2usize, 3] {
        let t = one_time_pad(&FiniteGroupoid::cyclic_group(n)).expect("cyclic groups are groups");
        assert!(check_teleportation(&t, TOL).expect("data is certified").pass);
        let lhs = lhs_teleportation(&t).expect("data is certified");
        for m in 0..n {
            let mut expected = vec![0.0; n * n];
            for g in 0..n {
                let ciphertext = (m + g) % n;
                let decoded = (ciphertext + n - g) % n;
                assert_eq!(decoded, m);
                expected[ciphertext * n + decoded] += 1.0 / n as f64;
            }
            for (idx, &weight) in expected.iter().enumerate() {
                assert!((lhs.map.map().get(idx, m) - c(weight, 0.0)).norm() <= 1e-12);
            }
        }
    }

    // Replacing one Pauli correction with the identity breaks the equation.
    let broken = t
        .with_correction(3, CPMap::identity(t.system()))
        .expect("shape is unchanged");
    let verdict = check_teleportation(&broken, TOL).expect("data is still certified");
    assert!(!verdict.pass);
    assert!(verdict.deviation >= 0.1);
    println!("criterion 7 (teleportation suite): pass");
}

#[test]
fn criterion_8_security_suite() {
    // Both solution families satisfy the security equation.
    let qubit = standard_qubit_teleportation();
    assert!(check_security(&qubit, TOL).expect("data is certified").pass);
    for n in [2usize, 3] {
        let t = one_time_pad(&FiniteGroupoid::cyclic_group(n)).expect("cyclic groups are groups");
        assert!(check_security(&t, TOL).expect("data is certified").pass);
    }

    // A constant key leaks the message into the record.
    let t = one_time_pad(&FiniteGroupoid::cyclic_group(2)).expect("cyclic groups are groups");
    let constant = ComplexMatrix::from_fn(4, 4, |r, s| {
        if r == 0 && s == 0 {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let leaky = t.with_resource(constant).expect("shape is unchanged");
    let verdict = check_security(&leaky, TOL).expect("data is still certified");
    assert!(!verdict.pass);
    assert!(verdict.deviation >= 0.1);

    // Security follows from teleportation: random certified solutions with
    // trace-preserving corrections never violate it.
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let mut counterexamples = 0;
    for trial in 0..50 {
        let t = if trial % 2 == 0 {
            let n = rng.gen_range(2..=5);
            one_time_pad(&relabeled_cyclic_group(&mut rng, n)).expect("relabeling keeps a group")
        } else {
            let u = random_unitary(&mut rng, 2);
            let rotate = ComplexMatrix::identity(2).kron(&u);
            let resource = &(&rotate * qubit.resource()) * &rotate.dagger();
            let undo = conjugation_map(&u.dagger(), qubit.system()).expect("shape is consistent");
            let corrections = qubit
                .corrections()
                .iter()
                .map(|nu| catqi::cpstar::compose_cp(nu, &undo).expect("endpoints match"))
                .collect();
            TeleportationData::new(
                4,
                qubit.system().clone(),
                resource,
                qubit.measurement().clone(),
                corrections,
            )
            .expect("shapes are consistent")
        };
        assert!(check_teleportation(&t, 1e-8).expect("data is certified").pass);
        let tr = trace_row(t.system());
        for nu in t.corrections() {
            assert!(deviation(&(&tr * nu.map()), &tr) <= 1e-8, "corrections preserve trace");
        }
        if !check_security(&t, 1e-8).expect("data is certified").pass {
            counterexamples += 1;
        }
    }
    assert_eq!(counterexamples, 0);
    println!("criterion 8 (security suite): pass (0 counterexamples in 50 trials)");
}
