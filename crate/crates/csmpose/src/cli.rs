//! Command-line parsing and dispatch.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::analyze::{run_analyze, AnalyzeArgs};
use crate::error::{CliError, CliResult};
use crate::init::{run_init, InitArgs};
use crate::synth::{run_synth, SynthArgs};
use crate::track::{run_track, TrackArgs};

#[derive(Debug, Parser)]
#[command(name = "csmpose", version, about = "Body tracking with articulated cloud-system models and arm-asymmetry analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a model from one frame and its label mask.
    Init {
        #[arg(long)]
        frame: PathBuf,
        /// 8-bit paletted or greyscale PNG, or PGM; pixel value = part label.
        #[arg(long)]
        mask: PathBuf,
        /// JSON run configuration; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Track a numbered frame sequence.
    Track {
        #[arg(long)]
        model: PathBuf,
        /// printf-style path such as `frames/frame_%05d.png`.
        #[arg(long)]
        frames: String,
        /// `A..B` (end exclusive) or `A..=B`.
        #[arg(long)]
        range: String,
        #[arg(long)]
        out: PathBuf,
        /// Override the tracking, asymmetry and fps settings stored in the model.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the optical flow of every frame to `flow/`.
        #[arg(long)]
        dump_flow: bool,
        /// Record per-frame wall-clock time in the manifest.
        #[arg(long)]
        timing: bool,
    },
    /// Asymmetry scores, SS/DS summary and plots of a run.
    Analyze {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the asymmetry thresholds and fps echoed in the run.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Render a synthetic puppet sequence with ground truth.
    Synth {
        /// Puppet JSON file or preset (`still`, `tracking`, `asymmetric`).
        #[arg(long)]
        spec: String,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Runs one command and returns the text for stdout. Warnings go to stderr.
pub fn execute(command: Command) -> CliResult<String> {
    match command {
        Command::Init { frame, mask, config, out } => {
            let r = run_init(&InitArgs { frame, mask, config, out: out.clone() })?;
            Ok(format!("{}model with {} nodes and {} edges written to {}\n", r.table, r.nodes, r.edges, out.display()))
        }
        Command::Track { model, frames, range, out, config, dump_flow, timing } => {
            let r = run_track(&TrackArgs { model, frames, range, out: out.clone(), config, dump_flow, timing })?;
            let total: f64 = r.seconds.iter().sum();
            eprintln!("tracked {} frames in {total:.1} s", r.frames);
            if r.divergences > 0 {
                eprintln!("warning: {} of {} frames diverged", r.divergences, r.frames);
            }
            Ok(format!("{} frames, {} divergences, run written to {}\n", r.frames, r.divergences, out.display()))
        }
        Command::Analyze { run, out, config } => {
            let r = run_analyze(&AnalyzeArgs { run, out: out.clone(), config })?;
            let s = &r.summary;
            if s.evaluable_frames < s.frames {
                eprintln!("warning: {} frames lack an arm and were not evaluated", s.frames - s.evaluable_frames);
            }
            Ok(format!("SS {:.2}%  DS {:.2}%  ({} windows of {} frames)\n", s.ss, s.ds, s.windows, s.window_size))
        }
        Command::Synth { spec, out } => {
            let r = run_synth(&SynthArgs { spec, out: out.clone() })?;
            Ok(format!("{} frames written to {}\n", r.frames, out.display()))
        }
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { CliError::Usage(String::new()).exit_code() } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
