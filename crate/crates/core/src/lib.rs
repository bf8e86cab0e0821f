//! Monotone explicit finite-difference schemes for Hamilton-Jacobi equations
//! posed on a junction, with flux-limited junction conditions.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conditions;
pub mod error;
pub mod hamiltonian;
pub mod harness;
pub mod junction;
pub mod numerics;
pub mod scheme;
pub mod vertex;

pub use error::{Error, Result};
pub use hamiltonian::{EnvelopePair, Hamiltonian, HamiltonianFn, Side};
pub use junction::{geodesic_distance, sample_initial, Grid, GridField, Junction, JunctionPoint};
