//! Articulated cloud-system model for 2D human body tracking.
//!
//! The crate builds fuzzy per-part "clouds" from one labeled frame, links them
//! into a stickman-shaped relational model, and tracks the body through later
//! frames by multiscale parameter search. Every candidate pose is delineated
//! with a seeded image foresting transform restricted to the clouds'
//! uncertainty bands and scored by a colour-histogram recognition functional.
//! Skeletons extracted from the tracked model feed arm-asymmetry analytics.
//!
//! The crate is `no_std` with `alloc`: it performs no IO. File formats and the
//! command line live in the `csmpose` companion crate.
//!
//! Module map:
//!
//! * [`imgcore`] rasters, Lab conversion, gradients, signed EDT, PCA,
//!   thinning, label mode filter
//! * [`ift`] IFT with seed competition
//! * [`superpix`] graph-based superpixels
//! * [`csm`] clouds, relational model, kinematics, projection, seeds, pose
//! * [`flow`] dense optical flow, label propagation, warm-start estimation
//! * [`search`] histograms, recognition score, MSPS, delineation, tracker
//! * [`asymmetry`] arm angles, asymmetry scores, static/dynamic symmetry
//! * [`puppet`] deterministic synthetic puppet sequences
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod asymmetry;
pub mod csm;
mod error;
pub mod flow;
pub mod ift;
pub mod imgcore;
pub mod math;
pub mod puppet;
pub mod search;
pub mod superpix;

pub use error::{Error, Result};
pub use imgcore::{Label, Lab, Raster, Rgb};
pub use math::Vec2;
