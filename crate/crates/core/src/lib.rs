//! Numerics for regularizing collisions in weakly singular central force
//! problems by smoothing the potential.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches the
//! filesystem, the command line or threads lives in the `smoothreg` crate.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod apsidal;
pub mod error;
pub mod extrapolate;
pub mod flow;
pub mod ode;
pub mod potentials;
pub mod quadrature;
pub mod radial;
pub mod roots;
pub mod simulator;
pub mod table;
pub mod variational;

mod math;

pub use error::{Error, Result};
pub use math::decade;
pub use potentials::{PotentialSpec, SmoothedPotential};
pub use simulator::PhaseState;
pub use table::{ConvergenceTable, Verdict};
