//! Exact algebra for rigid automorphic data.
//!
//! The crate works entirely over `Q` (arbitrary precision rationals). It covers
//! root data of the classical groups, the grading attached to a Levi subgroup,
//! stabilizers and toric orbits inside the unipotent radical, the Hitchin base
//! of the associated moduli problem, and the dual side: opers, their canonical
//! forms and the hypergeometric equations they correspond to.

pub mod error;
pub mod grading;
pub mod hitchin;
pub mod laurent;
pub mod matrix;
pub mod matrixrep;
pub mod opers;
pub mod ring;
pub mod rootsys;
pub mod stabilizer;
pub mod toricity;
pub mod verify;

pub use error::{Error, Result};
pub use laurent::LaurentPoly;
pub use matrix::{Mat, QMat};
pub use ring::{q, qf, MPoly, Ring, Q};
pub use opers::{OperCanonical, PrincipalData};
pub use rootsys::{Family, GroupType, RootSystem};
