//! Lift-coefficient surrogates for airfoils.
//!
//! Airfoil coordinates are resampled onto 50 leading-edge-clustered stations
//! ([`geometry`]), turned into network inputs ([`dataio`]) either as a flat
//! vector, a `(2 x 50)` surface array, or a `49 x 49` Mach-colored
//! "artificial image" ([`raster`]), and regressed onto the sectional lift
//! coefficient with small networks trained by AdaDelta ([`net`], [`train`]).
//!
//! Runnable walkthroughs live in `examples/`; the `aerofoil` binary wraps
//! the same pipeline for batch use.

pub mod cli;
pub mod corpus;
pub mod dataio;
pub mod error;
pub mod geometry;
pub mod net;
pub mod raster;
pub mod train;
pub mod util;

pub use error::{Error, Result};
