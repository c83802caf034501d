//! Planar regions of both constructions: the cusp domain `Ω_θ` with its
//! disk family, and the rectilinear box/tower/pipe domain `F`.
//!
//! Points near `1` are handled in local coordinates `(t, y) = (1 - Re z, Im z)`:
//! disk centers `1 - 2δ^j` are not representable for `j ≳ 7` at `δ = 1/200`.

mod cusp;
mod rectilinear;

pub use cusp::{CuspProfile, DiskFamily, ProfileShape, MAX_DELTA};
pub use rectilinear::{eps4, RectTag, RectilinearDomain, TaggedRect};

/// `δ^j`, always computed the same way so that anchors, disks and kernels
/// agree bit for bit.
pub fn delta_pow(delta: f64, j: usize) -> f64 {
    delta.powi(j as i32)
}
