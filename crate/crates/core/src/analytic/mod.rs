//! Closed-form laws of the distance and link SNR.

mod curve;
mod distance;
mod fading;
mod snr;

pub use crate::quad::QuadratureControl;
pub use crate::special::{erfc_scaled, lower_incomplete_gamma_regularized, log_bessel_i0_scaled};
pub use curve::{CurveKind, DistributionCurve, Grid, SeriesControl, SeriesValue, Spacing};
pub use distance::*;
pub use fading::*;
pub use snr::*;
