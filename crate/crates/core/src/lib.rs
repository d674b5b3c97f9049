//! Fermionic Fock-space simulator for the operator-ordering dependence of
//! entanglement between an inertial and a uniformly accelerated observer.
//!
//! * [`fock`]: sign-correct fermionic algebra over bit-packed occupation keys.
//! * [`rindler`]: Unruh vacua, excitations and joint states in the Rindler basis.
//! * [`entanglement`]: partial trace, partial transpose, negativity, entropy.
//! * [`survey`]: classification of operator orderings by negativity curve.
//! * [`output`]: CSV and JSON writers used by the command-line tool.

pub mod entanglement;
pub mod error;
pub mod fock;
pub mod output;
pub mod presets;
pub mod rindler;
pub mod survey;

pub use error::{FockError, Result};
