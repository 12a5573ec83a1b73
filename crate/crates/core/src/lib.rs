//! Signed count of fixed-point conjugacy classes of a twisted braid action on
//! the trace-free SU(2) sphere, for two-component braid closures, together
//! with the combinatorial and exact-geometry oracles it is verified against.
//!
//! The pipeline: parse a braid word ([`braid`]), act on tuples of
//! pure-imaginary unit quaternions ([`quat`], [`action`]), enumerate and sign
//! the fixed-point classes ([`solver`]), and cross-check against the linking
//! number ([`braid::linking_number`]), the Burau linearization
//! ([`fox_burau`]), and for two strands the exact pillowcase intersections
//! ([`pillowcase`]). The [`verify`] module drives a seeded corpus through all
//! of it.

pub mod action;
pub mod braid;
pub mod fox_burau;
pub mod linalg;
pub mod pillowcase;
pub mod quat;
pub mod solver;
pub mod verify;

pub use action::{act, act_signed, differential, product_holonomy, ActionJacobian, RepTuple};
pub use braid::{BraidError, BraidWord, FreeWord, Permutation, SignVector};
pub use fox_burau::{burau, burau_mod2, d_block_certificate, BurauMatrix, Gf2Matrix};
pub use pillowcase::{
    graph_line, signed_intersections, to_pillowcase, PillowLine, PillowcasePoint,
};
pub use quat::{Quaternion, SpherePoint};
pub use solver::{compute_h, FixedPointClass, HResult, Sign, SolverConfig};
pub use verify::{run_verification, CorpusSpec, VerificationReport};
