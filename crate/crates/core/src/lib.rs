//! Schottky groups acting on complex projective space.
//!
//! The crate builds Nori-type Schottky groups on odd-dimensional P^n,
//! certifies or falsifies the Schottky axioms for arbitrary quadric-region
//! data, computes limit sets of cyclic groups from the eigenvalue-modulus
//! decomposition, and exhibits the obstruction that rules out Schottky groups
//! on even-dimensional P^{2n}.
//!
//! Layout:
//! - [`projective`]: points, subspaces, span/intersect, Fubini-Study distance.
//! - [`psl`]: projective transformations, modulus decomposition, limit sets.
//! - [`asymptotics`]: binomial-normalized iteration and the k-index.
//! - [`schottky`]: quadric regions, the Nori builder, axiom verification, word dynamics.
//! - [`obstruction`]: bridge sets, subspace exclusion, and the contradiction harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod codec;
pub mod config;
pub mod error;
pub mod linalg;
pub mod obstruction;
pub mod projective;
pub mod psl;
pub mod sampling;
pub mod schottky;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
pub use obstruction::{
    build_bridge, contradiction_harness, pivot_index, subspace_exclusion_check, BridgeSet, ObstructionReport, Verdict,
};
pub use projective::{canonicalize, intersect, span, ProjPoint, ProjSubspace};
pub use psl::{LevelSet, ModulusDecomposition, ModulusPart, ProjMap};
pub use schottky::{
    nori_build, verify_schottky, ReducedWord, SchottkyData, Status, SubspaceConfig, VerificationReport,
};
