//! Mean-field dynamics of a two-level atom embedded in a ferromagnetic
//! lattice.
//!
//! The lattice is linearised into independent spins in a molecular field
//! ([`mean_field`]); the atom then only talks to the `eta` spins of its own
//! unit cell. On top of that reduction the crate provides pure-dephasing
//! factors ([`dephasing`]), a collective-spin sector engine for isotropic
//! coupling ([`transitions`]), two-atom entanglement ([`entanglement`]) and a
//! brute-force product-space evolution used as ground truth ([`oracle`]).

pub mod dephasing;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod mean_field;
pub mod model;
pub mod oracle;
pub mod spin;
pub mod transitions;

pub use error::{Error, Result};
