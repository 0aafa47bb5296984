//! Simulation, reconstruction and evaluation of color-polarization filter array
//! (CPFA) captures.
//!
//! The crate covers the whole loop: procedural polarized scenes
//! ([`dataset`]), the sensor sampling model ([`mosaic`]), Stokes / DoP / AoP
//! math ([`polarimetry`]), a two-stage recurrent joint demosaicing and
//! super-resolution pipeline ([`pipeline`]) and the metric suite used to score
//! reconstructions ([`metrics`]).

pub mod dataset;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod mosaic;
pub mod pipeline;
pub mod polarimetry;
pub mod raster;

pub use error::{Error, Result};
pub use mosaic::{CpfaPattern, CpfaRaw};
pub use pipeline::{run_pidsr, run_sequential_baseline, PidsrOutput, StageConfig};
pub use polarimetry::{PolarParams, StokesStack};
pub use raster::{Angle, Channel, ColorImage, Plane, PolarStack};
