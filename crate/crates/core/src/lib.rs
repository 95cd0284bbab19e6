pub mod error;
pub mod expm;
pub mod fock;
pub mod classical;
pub mod dpa;
pub mod polarization;
pub mod squeezing;
