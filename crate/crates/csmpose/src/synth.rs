//! `synth`: renders a synthetic puppet sequence with its ground truth.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use csmpose_core::puppet::PuppetSpec;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::frames::frame_stem;
use crate::image_io::{write_labels, write_rgb};
use crate::run_dir::{read_json, write_json, SkeletonDoc};

/// Frame pattern of rendered sequences, relative to the output directory.
pub const FRAME_PATTERN: &str = "frames/frame_%05d.png";

#[derive(Debug, Clone)]
pub struct SynthArgs {
    /// Path to a puppet JSON document, or one of `still`, `tracking`, `asymmetric`.
    pub spec: String,
    pub out: PathBuf,
}

#[derive(Debug, Clone)]
pub struct SynthReport {
    pub frames: usize,
}

pub fn resolve_spec(spec: &str) -> CliResult<PuppetSpec> {
    let path = Path::new(spec);
    if path.exists() {
        return read_json(path);
    }
    match spec {
        "still" => Ok(PuppetSpec::still()),
        "tracking" => Ok(PuppetSpec::tracking()),
        "asymmetric" => Ok(PuppetSpec::asymmetric()),
        _ => Err(CliError::Usage(format!("`{spec}` is neither a puppet file nor one of still, tracking, asymmetric"))),
    }
}

/// Writes `spec.json`, `config.json` (defaults with the puppet's fps),
/// `frames/`, ground-truth `masks/` and `skeletons/`, and the planted joint
/// angles in `angles.csv`.
pub fn run_synth(args: &SynthArgs) -> CliResult<SynthReport> {
    let spec = resolve_spec(&args.spec)?;
    spec.validate()?;
    write_json(&args.out.join("spec.json"), &spec)?;
    write_json(&args.out.join("config.json"), &RunConfig { fps: spec.fps, ..RunConfig::default() })?;
    let mut angles = String::from("frame,torso,neck,left_shoulder,right_shoulder,left_elbow,right_elbow\n");
    for k in 0..spec.frames {
        let f = spec.render(k)?;
        let stem = frame_stem(k);
        write_rgb(&args.out.join(format!("frames/{stem}.png")), &f.image)?;
        write_labels(&args.out.join(format!("masks/{stem}.png")), &f.labels)?;
        write_json(
            &args.out.join(format!("skeletons/{stem}.json")),
            &SkeletonDoc { frame: k, diverged: false, skeleton: f.skeleton },
        )?;
        let a = f.angles;
        let _ = writeln!(
            angles,
            "{k},{},{},{},{},{},{}",
            a.torso, a.neck, a.left_shoulder, a.right_shoulder, a.left_elbow, a.right_elbow
        );
    }
    let p = args.out.join("angles.csv");
    std::fs::write(&p, angles).map_err(|e| CliError::at(&p, e))?;
    Ok(SynthReport { frames: spec.frames })
}
