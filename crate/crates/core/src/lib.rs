//! Finite-dimensional quantum/classical structures over explicit complex matrices.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`]: dense complex matrices, Kronecker products, adjoints,
//!   positive-semidefiniteness, and dagger-splitting of projections;
//! - [`frobenius`]: special dagger Frobenius algebras and their law checks;
//! - [`cpstar`]: finite-dimensional C*-algebras as block lists and completely
//!   positive maps certified through Choi matrices;
//! - [`bimod2cat`]: dagger bimodules over Frobenius algebras, composition by
//!   idempotent splitting, boundary bimodules, and the matrix-of-algebras model;
//! - [`groupoid`]: finite groupoids and their correspondence with 0/1-entry
//!   Frobenius algebras on classical structures;
//! - [`protocols`]: measurements as trace-preserving maps into classical
//!   structures, the teleportation equation, and its security corollary.
//!
//! All numerical verdicts are reported as a [`Check`](linalg::Check): a boolean
//! together with the achieved max-absolute-entry deviation, never a bare bool.

pub mod bimod2cat;
pub mod cpstar;
pub mod frobenius;
pub mod groupoid;
pub mod linalg;
pub mod protocols;

pub use bimod2cat::{AlgebraMatrix, BimoduleHom, CPMatrix, DaggerBimodule};
pub use cpstar::{CPMap, CStarAlgebra};
pub use frobenius::FrobeniusAlgebra;
pub use groupoid::FiniteGroupoid;
pub use linalg::{Check, ComplexMatrix, Isometry};
pub use protocols::{Measurement, Povm, TeleportationData};

/// Default tolerance on max-absolute-entry norms, shared by every check.
pub const DEFAULT_TOL: f64 = 1e-9;
