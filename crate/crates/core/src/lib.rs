//! Numerics for the one-dimensional self-similar (fractional) Laplacian.

pub mod diffusion;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod operator;
pub mod params;
pub mod quad;
pub mod series;
pub mod special;
pub mod statics;

pub use error::{Error, Result};
pub use grid::{ComplexField, Grid1D, RealField, SpectralField};
pub use params::{dispersion, dispersion_quadrature, make_params, MediumParams, QuadratureConfig};
pub use special::factorial_ext;

/// Library version, recorded in result provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
