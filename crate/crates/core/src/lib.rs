//! Finite, certified experiments on composition operators of the Dirichlet
//! space.
//!
//! Two constructions are implemented end to end:
//!
//! * a cusp domain `Ω_θ` touching the unit circle at `1`, together with a
//!   family of disjoint disks inside it. Gram matrices of normalized disk
//!   indicators under the Bergman kernel give certified lower bounds on the
//!   approximation numbers of the associated composition operator
//!   ([`gram`], [`spectra`]), and Carleson window masses show compactness
//!   ([`carleson`]);
//! * a rectilinear domain `F` in the right half-plane made of boxes, towers
//!   and thin pipes, whose exponential image gives a symbol with slowly
//!   growing power norms ([`powers`]) but unbounded window masses
//!   ([`carleson`]).
//!
//! Everything works with the normalized area measure `dA = dx dy / π`.

pub mod carleson;
pub mod error;
pub mod galerkin;
pub mod geometry;
pub mod gram;
pub mod powers;
pub mod quad;
pub mod report;
pub mod seqs;
pub mod spectra;

pub use error::{Error, Result};
pub use num_complex::Complex64;
