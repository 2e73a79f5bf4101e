//! File formats and command line for `csmpose-core`.
//!
//! Four commands make up the workflow: `synth` renders a puppet sequence,
//! `init` builds a model from a frame and its label mask, `track` follows
//! the model through numbered frames into a run directory, and `analyze`
//! turns the run's skeletons into arm-asymmetry records, SS/DS and plots.

pub mod analyze;
pub mod cli;
pub mod config;
pub mod error;
pub mod exec;
pub mod frames;
pub mod image_io;
pub mod init;
pub mod model_file;
pub mod plot;
pub mod run_dir;
pub mod synth;
pub mod track;

pub use config::RunConfig;
pub use error::{CliError, CliResult};
