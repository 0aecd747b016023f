//! Special functions and small numerical kernels.

mod bessel;
mod elliptic;
mod quad;
mod search;

pub use bessel::{bessel_i0, bessel_i0_scaled, bessel_i1, bessel_i1_scaled, SERIES_SWITCHOVER};
pub use elliptic::{ellip_k_e, ellip_k_minus_e, EllipticPair};
pub use quad::{adaptive_simpson, pairwise_sum};
pub use search::{bisect, golden_section_max};
