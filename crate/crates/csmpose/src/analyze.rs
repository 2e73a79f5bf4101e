//! `analyze`: arm asymmetry of a finished run, from its skeletons only.

use std::fmt::Write as _;
use std::path::PathBuf;

use csmpose_core::asymmetry::{frame_asymmetry, static_dynamic_symmetry, AsymmetryConfig, AsymmetryRecord};
use csmpose_core::Error;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::plot::{Chart, Series};
use crate::run_dir::{read_json, read_manifest, write_json, SkeletonDoc};

pub const RECORDS: &str = "asymmetry.csv";
pub const SUMMARY: &str = "summary.json";
pub const SCORE_PLOT: &str = "as_star.svg";
pub const FOREARM_PLOT: &str = "forearm_angles.svg";

#[derive(Debug, Clone)]
pub struct AnalyzeArgs {
    pub run: PathBuf,
    pub out: PathBuf,
    /// Replaces the asymmetry thresholds and fps echoed in the run manifest.
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub tau_deg: f64,
    pub sigma_deg: f64,
    pub as_star: f64,
    pub ad_f_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    #[serde(rename = "SS")]
    pub ss: f64,
    #[serde(rename = "DS")]
    pub ds: f64,
    pub window_size: usize,
    pub windows: usize,
    pub frames: usize,
    pub evaluable_frames: usize,
    pub asymmetric_frames: usize,
    pub fps: f64,
    pub thresholds: Thresholds,
    /// How frames without both arms are treated.
    pub non_evaluable_policy: String,
}

#[derive(Debug, Clone)]
pub struct AnalyzeReport {
    pub summary: Summary,
    /// `None` for non-evaluable frames.
    pub records: Vec<(usize, Option<AsymmetryRecord>)>,
}

fn thresholds(c: &AsymmetryConfig) -> Thresholds {
    Thresholds {
        tau_deg: c.tau_deg,
        sigma_deg: c.sigma_deg,
        as_star: c.score_threshold,
        ad_f_deg: c.forearm_threshold_deg,
    }
}

pub fn run_analyze(args: &AnalyzeArgs) -> CliResult<AnalyzeReport> {
    let manifest = read_manifest(&args.run)?;
    let cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => manifest.config.clone(),
    };
    let mut records = Vec::new();
    for entry in &manifest.frames {
        let doc: SkeletonDoc = read_json(&args.run.join(&entry.skeleton))?;
        let rec = match frame_asymmetry(entry.frame, &doc.skeleton, &cfg.asymmetry) {
            Ok(r) => Some(r),
            Err(Error::MissingArm(_)) => None,
            Err(e) => return Err(e.into()),
        };
        records.push((entry.frame, rec));
    }
    let flags: Vec<Option<bool>> = records.iter().map(|(_, r)| r.map(|r| r.asymmetric)).collect();
    let sym = static_dynamic_symmetry(&flags, cfg.fps)
        .map_err(|e| CliError::data(format!("{}: {e}", args.run.display())))?;
    let summary = Summary {
        ss: sym.ss,
        ds: sym.ds,
        window_size: sym.window,
        windows: sym.windows,
        frames: records.len(),
        evaluable_frames: sym.evaluable_frames,
        asymmetric_frames: flags.iter().filter(|f| **f == Some(true)).count(),
        fps: cfg.fps,
        thresholds: thresholds(&cfg.asymmetry),
        non_evaluable_policy: "excluded from the SS and DS denominators".into(),
    };

    let mut csv = String::from("frame,u_l,u_r,e_l,e_r,f_l,f_r,AS_u,AS_f,AS_star,AD_f,asymmetric,evaluable\n");
    for (frame, rec) in &records {
        match rec {
            Some(r) => {
                let a = r.angles;
                let _ = writeln!(
                    csv,
                    "{frame},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},true",
                    a.u_l, a.u_r, a.e_l, a.e_r, a.f_l, a.f_r, r.as_u, r.as_f, r.as_star, r.ad_f, r.asymmetric
                );
            }
            None => {
                let _ = writeln!(csv, "{frame},,,,,,,,,,,false,false");
            }
        }
    }
    std::fs::create_dir_all(&args.out).map_err(|e| CliError::at(&args.out, e))?;
    let write = |name: &str, text: &str| {
        let p = args.out.join(name);
        std::fs::write(&p, text).map_err(|e| CliError::at(&p, e))
    };
    write(RECORDS, &csv)?;
    write_json(&args.out.join(SUMMARY), &summary)?;

    let series = |f: fn(&AsymmetryRecord) -> f64| -> Vec<(f64, Option<f64>)> {
        records.iter().map(|(k, r)| (*k as f64, r.as_ref().map(f))).collect()
    };
    let scores = Chart {
        title: "Arm asymmetry scores",
        x_label: "frame",
        y_label: "score",
        y_range: (0.0, 2.0),
        series: vec![
            Series { name: "AS*", color: "#d62728", points: series(|r| r.as_star) },
            Series { name: "AS_u", color: "#1f77b4", points: series(|r| r.as_u) },
            Series { name: "AS_f", color: "#2ca02c", points: series(|r| r.as_f) },
        ],
        thresholds: vec![(cfg.asymmetry.score_threshold, "AS* threshold")],
    };
    let forearms = Chart {
        title: "Forearm global angles",
        x_label: "frame",
        y_label: "degrees",
        y_range: (-90.0, 180.0),
        series: vec![
            Series { name: "f_l", color: "#1f77b4", points: series(|r| r.angles.f_l) },
            Series { name: "f_r", color: "#ff7f0e", points: series(|r| r.angles.f_r) },
            Series { name: "AD_f", color: "#d62728", points: series(|r| r.ad_f) },
        ],
        thresholds: vec![(cfg.asymmetry.forearm_threshold_deg, "AD_f threshold")],
    };
    write(SCORE_PLOT, &scores.to_svg())?;
    write(FOREARM_PLOT, &forearms.to_svg())?;
    Ok(AnalyzeReport { summary, records })
}
