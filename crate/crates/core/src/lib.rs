//! Framings, operator-valued measures and dilations of positive-definite
//! maps on finite *-semigroups, with numerical certificates for every
//! identity the constructions promise.
//!
//! Vectors live in `C^d` as [`numlin::CVector`]; operators are dense
//! [`numlin::CMatrix`] values. Every rank or equality decision goes through
//! a [`Tolerance`].

pub mod cli;
pub mod demos;
pub mod dilation;
pub mod error;
pub mod framing;
pub mod naimark;
pub mod numlin;
pub mod ovm;
pub mod problem;
pub mod report;
pub mod sampling;
pub mod semigroup;
pub mod subspace;

pub use dilation::{build_dilation, verify_dilation, Dilation, OperatorMap};
pub use error::{Error, Result};
pub use framing::{Framing, GeneratorPair};
pub use naimark::{naimark_dilate, verify_pvm, Povm, PvmDilation};
pub use numlin::{CMatrix, CVector, Tolerance};
pub use semigroup::FiniteStarSemigroup;
pub use subspace::Subspace;
