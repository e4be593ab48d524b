//! Ground energy of the magnetic Laplacian on infinite wedges.
//!
//! The wedge `W_alpha = S_alpha x R` carries a constant unit field `B`. A
//! Fourier transform along the edge reduces the operator to a family of 2D
//! operators on the sector `S_alpha`, indexed by the Fourier parameter `tau`;
//! the ground energy is the infimum of the resulting band function.
//!
//! * [`geometry`]: field parametrization, face angles and classification;
//! * [`spec1d`]: de Gennes and weighted half-line model operators;
//! * [`fem2d`]: meshes, Galerkin assembly and the sparse eigensolver;
//! * [`band`]: band functions, ground energy, `sigma(theta)` and `E*`;
//! * [`bounds`]: quasimode upper bounds for small openings;
//! * [`report`] and [`cli`]: file formats and the command-line front end.

pub mod band;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod fem2d;
pub mod format;
pub mod geometry;
pub mod minimize;
pub mod report;
pub mod spec1d;

pub use error::{Error, Result};
