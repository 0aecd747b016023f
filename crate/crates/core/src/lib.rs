//! Magneto-quasistatic (MQS) human body communication link modeling.
//!
//! The crate covers the full chain from tissue dielectrics to channel gain:
//!
//! * [`tissue`]: Cole-Cole dispersion of body tissues and derived propagation
//!   quantities (wavelength, skin depth), including a linearly interpolated
//!   permittivity mode and a wavelength-based regime classifier.
//! * [`coil`]: self inductance of thin circular loops, mutual inductance by
//!   Maxwell's elliptic-integral formula and by Neumann quadrature, and a rod
//!   core permeability trend model.
//! * [`link`]: coupled-inductor currents, voltage gain and S21 under
//!   resistive, capacitive and open terminations.
//! * [`eddy`]: magnetic diffusion into a conducting tissue cylinder.
//! * [`sweep`]: scenario files, frequency/distance/offset sweeps and CSV/SVG
//!   emission.
//!
//! All quantities are SI.

pub mod coil;
pub mod eddy;
mod error;
pub mod grid;
pub mod link;
pub mod special;
pub mod sweep;
pub mod tissue;

pub use error::{Error, Result};

/// Vacuum permeability (H/m), CODATA 2018.
pub const MU_0: f64 = 1.256_637_062_12e-6;
/// Vacuum permittivity (F/m), CODATA 2018.
pub const EPS_0: f64 = 8.854_187_812_8e-12;
/// Speed of light in vacuum (m/s).
pub const C_0: f64 = 299_792_458.0;

/// Lower edge of the band the tissue data is meant for (Hz).
pub const BAND_MIN_HZ: f64 = 1e3;
/// Upper edge of the band the tissue data is meant for (Hz).
pub const BAND_MAX_HZ: f64 = 10e9;
