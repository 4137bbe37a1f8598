//! Simulation and decoding of flag-qubit memory experiments for the surface,
//! tailored-surface and XZZX codes on square-lattice and heavy-hexagon
//! connectivity.

pub mod circuit;
pub mod decoder;
pub mod dem;
pub mod error;
pub mod harness;
pub mod layout;
pub mod matching;
pub mod noise;
pub mod pauli;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
pub use layout::{build_layout, CodeLayout, Family, StabGroup, Structure};
pub use pauli::{Pauli, PauliString};
