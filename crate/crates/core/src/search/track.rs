use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::delineate::{delineate, Delineation};
use super::histogram::{build_histogram_with, recognition_score, valid_bins, Histogram};
use super::msps::{msps_maximize_with, validate_schedule, Executor, SearchSpec, DEFAULT_BUDGET, DEFAULT_SCHEDULE};
use crate::csm::{extract_pose, pose_model, project_cloud, PoseParams, PosedModel, Projection, RelationalModel, Skeleton2D};
use crate::flow::{dense_flow, estimate_params, propagate_labels, EstimateConfig, FlowConfig, FlowField, ParamEstimate};
use crate::imgcore::{gradient_magnitude, to_lab, Label, Lab, Raster, Rgb, BACKGROUND};
use crate::superpix::{segment_superpixels, RegionMap};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerConfig {
    /// Exponent of the additive path cost.
    pub eta: f64,
    /// Histogram bins per RGB channel.
    pub bins: usize,
    pub superpixel_k: f64,
    pub superpixel_min_size: usize,
    /// Step multipliers of each half-width, coarse to fine.
    pub schedule: Vec<f64>,
    /// Objective evaluations per group.
    pub budget: usize,
    /// A best torso score below this flags the frame as diverged.
    pub divergence_threshold: f64,
    pub flow: FlowConfig,
    pub estimate: EstimateConfig,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            eta: 1.5,
            bins: 16,
            superpixel_k: 300.0,
            superpixel_min_size: 20,
            schedule: DEFAULT_SCHEDULE.to_vec(),
            budget: DEFAULT_BUDGET,
            divergence_threshold: 0.2,
            flow: FlowConfig::default(),
            estimate: EstimateConfig::default(),
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return bad("eta must be positive");
        }
        if !valid_bins(self.bins) {
            return bad("bins must be a power of two <= 256");
        }
        if !(self.superpixel_k > 0.0 && self.superpixel_k.is_finite()) || self.superpixel_min_size == 0 {
            return bad("superpixel k and min_size must be positive");
        }
        validate_schedule(&self.schedule)?;
        if self.budget == 0 {
            return bad("budget must be positive");
        }
        if !(0.0..=1.0).contains(&self.divergence_threshold) {
            return bad("divergence threshold must lie in [0, 1]");
        }
        let f = &self.flow;
        if !(f.alpha > 0.0 && f.intensity_scale > 0.0) || f.iterations == 0 || f.min_level_size < 2 {
            return bad("flow alpha, intensity scale, iterations and min level size must be positive");
        }
        let e = &self.estimate;
        let knobs = [e.limb_angle_deg, e.neck_angle_deg, e.torso_angle_deg, e.scale, e.beta, e.translation_beta, e.translation_floor];
        if knobs.iter().any(|k| !(k.is_finite() && *k >= 0.0)) {
            return bad("estimation bounds must be finite and non-negative");
        }
        if e.scale >= 1.0 {
            return bad("scale bound must stay below 1");
        }
        Ok(())
    }
}

/// One searched coordinate of a [`PoseParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Slot {
    TranslationX,
    TranslationY,
    Theta(usize),
    ScaleY(usize),
    ScaleX(usize),
    OffsetX(usize),
    OffsetY(usize),
}

impl Slot {
    pub fn read(self, p: &PoseParams) -> f64 {
        match self {
            Slot::TranslationX => p.translation.x,
            Slot::TranslationY => p.translation.y,
            Slot::Theta(i) => p.nodes[i].theta,
            Slot::ScaleY(i) => p.nodes[i].s_y,
            Slot::ScaleX(i) => p.nodes[i].s_x,
            Slot::OffsetX(i) => p.nodes[i].joint_offset.x,
            Slot::OffsetY(i) => p.nodes[i].joint_offset.y,
        }
    }

    pub fn write(self, p: &mut PoseParams, v: f64) {
        match self {
            Slot::TranslationX => p.translation.x = v,
            Slot::TranslationY => p.translation.y = v,
            Slot::Theta(i) => p.nodes[i].theta = v,
            Slot::ScaleY(i) => p.nodes[i].s_y = v,
            Slot::ScaleX(i) => p.nodes[i].s_x = v,
            Slot::OffsetX(i) => p.nodes[i].joint_offset.x = v,
            Slot::OffsetY(i) => p.nodes[i].joint_offset.y = v,
        }
    }

    pub fn half_width(self, est: &ParamEstimate) -> f64 {
        match self {
            Slot::TranslationX | Slot::TranslationY => est.translation_bound,
            Slot::Theta(i) => est.bounds[i].theta,
            Slot::ScaleY(i) => est.bounds[i].s_y,
            Slot::ScaleX(i) => est.bounds[i].s_x,
            Slot::OffsetX(i) | Slot::OffsetY(i) => est.bounds[i].offset,
        }
    }
}

/// Search layout of a group. The root group is `{tx, ty, θ, s_y, s_x}`; any
/// other group lists `{θ, s_y, s_x}` per member, followed by the first
/// member's joint offset when it hangs from the root.
pub fn group_slots(model: &RelationalModel, group: &[usize]) -> Vec<Slot> {
    let mut out = Vec::new();
    for &i in group {
        if model.node(i).parent.is_none() {
            out.extend([Slot::TranslationX, Slot::TranslationY]);
        }
        out.extend([Slot::Theta(i), Slot::ScaleY(i), Slot::ScaleX(i)]);
    }
    if let Some(&first) = group.first() {
        if model.node(first).parent == Some(0) {
            out.extend([Slot::OffsetX(first), Slot::OffsetY(first)]);
        }
    }
    out
}

/// Per-node histograms of the reference frame under its mask.
pub fn reference_histograms(
    model: &RelationalModel,
    frame: &Raster<Rgb>,
    mask: &Raster<Label>,
    bins: usize,
) -> Result<Vec<Histogram>> {
    frame.check_same_size(mask)?;
    if !valid_bins(bins) {
        return Err(Error::InvalidParameter(format!("invalid bin count {bins}")));
    }
    Ok(model
        .nodes()
        .iter()
        .map(|n| {
            let px: Vec<usize> = (0..mask.len()).filter(|&i| mask.values()[i] == n.label).collect();
            build_histogram_with(&px, frame, bins)
        })
        .collect())
}

/// Search result of one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupOutcome {
    pub nodes: Vec<usize>,
    /// Mean recognition score of the members at the winning parameters.
    pub score: f64,
    pub evaluations: usize,
    pub budget_exhausted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameResult {
    pub params: PoseParams,
    pub posed: PosedModel,
    pub labels: Raster<Label>,
    pub skeleton: Skeleton2D,
    /// Recognition score per node.
    pub scores: Vec<f64>,
    /// Groups in search order; empty after the torso when diverged.
    pub groups: Vec<GroupOutcome>,
    /// Parts missing from the propagated labels.
    pub lost: Vec<bool>,
    /// The torso score fell below the threshold and the previous pose was kept.
    pub diverged: bool,
    /// Flow from the previous frame; `None` for the reference frame.
    pub flow: Option<FlowField>,
}

/// What the tracker carries from one frame to the next.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackState {
    pub params: PoseParams,
    pub labels: Raster<Label>,
    pub lab: Raster<Lab>,
}

struct FrameCtx<'a> {
    model: &'a RelationalModel,
    refs: &'a [Histogram],
    rgb: &'a Raster<Rgb>,
    regions: RegionMap,
    gradient: Raster<f64>,
    eta: f64,
}

struct GroupEval {
    scores: Vec<f64>,
    cut: Option<(Vec<Projection>, Delineation)>,
}

impl GroupEval {
    fn mean(&self) -> f64 {
        self.scores.iter().sum::<f64>() / self.scores.len() as f64
    }
}

impl FrameCtx<'_> {
    fn evaluate(&self, params: &PoseParams, group: &[usize]) -> GroupEval {
        let zero = || GroupEval { scores: vec![0.0; group.len()], cut: None };
        let Ok(posed) = pose_model(self.model, params) else { return zero() };
        let (w, h) = (self.rgb.width(), self.rgb.height());
        let mut projections = Vec::with_capacity(group.len());
        for &i in group {
            match project_cloud(&self.model.node(i).cloud, &posed.nodes[i], w, h) {
                Ok(p) => projections.push(p),
                Err(_) => return zero(),
            }
        }
        let Ok(d) = delineate(&projections, &self.regions, &self.gradient, self.eta) else { return zero() };
        let scores = group.iter().zip(&d.members).map(|(&i, m)| recognition_score(m, self.rgb, &self.refs[i])).collect();
        GroupEval { scores, cut: Some((projections, d)) }
    }
}

/// Tracks the body from the state at `t` into `next`.
///
/// Flow from `t` to `next` propagates the labels and yields warm-start
/// parameters and bounds. The torso, then every other group in order, is
/// searched by MSPS on its mean recognition score while the rest of the body
/// is carried along. The final label map merges the groups' delineations at
/// the winning pose: interiors first, earlier groups first.
pub fn track_frame<E: Executor + ?Sized>(
    model: &RelationalModel,
    refs: &[Histogram],
    cfg: &TrackerConfig,
    exec: &E,
    state: &TrackState,
    next: &Raster<Rgb>,
) -> Result<(FrameResult, TrackState)> {
    if refs.len() != model.len() {
        return Err(Error::InvalidParameter(format!("{} reference histograms for {} nodes", refs.len(), model.len())));
    }
    state.labels.check_same_size(next)?;
    state.lab.check_same_size(next)?;
    let lab = to_lab(next);
    let flow = dense_flow(&state.lab, &lab, &cfg.flow)?;
    let propagated = propagate_labels(&state.labels, &flow)?;
    let est = estimate_params(model, &state.params, &state.labels, &propagated, &flow, &cfg.estimate)?;
    let ctx = FrameCtx {
        model,
        refs,
        rgb: next,
        regions: segment_superpixels(&lab, cfg.superpixel_k, cfg.superpixel_min_size),
        gradient: gradient_magnitude(&lab),
        eta: cfg.eta,
    };

    let mut params = est.params.clone();
    let mut outcomes = Vec::new();
    for group in model.groups() {
        let slots = group_slots(model, &group);
        let spec = SearchSpec::new(
            slots.iter().map(|s| s.read(&params)).collect(),
            slots.iter().map(|s| s.half_width(&est)).collect(),
            cfg.schedule.clone(),
        )?;
        let base = &params;
        let objective = |x: &[f64]| {
            let mut p = base.clone();
            for (s, &v) in slots.iter().zip(x) {
                s.write(&mut p, v);
            }
            ctx.evaluate(&p, &group).mean()
        };
        let r = msps_maximize_with(exec, objective, &spec, cfg.budget)?;
        for (s, &v) in slots.iter().zip(&r.params) {
            s.write(&mut params, v);
        }
        let root = group.contains(&0);
        outcomes.push(GroupOutcome { nodes: group, score: r.score, evaluations: r.evaluations, budget_exhausted: r.budget_exhausted });
        if root && r.score < cfg.divergence_threshold {
            let posed = pose_model(model, &state.params)?;
            let mut scores = vec![0.0; model.len()];
            scores[0] = r.score;
            let result = FrameResult {
                params: state.params.clone(),
                skeleton: extract_pose(model, &posed),
                posed,
                labels: state.labels.clone(),
                scores,
                groups: outcomes,
                lost: est.lost,
                diverged: true,
                flow: Some(flow),
            };
            let carried = TrackState { params: state.params.clone(), labels: state.labels.clone(), lab };
            return Ok((result, carried));
        }
    }

    let posed = pose_model(model, &params)?;
    let mut labels = Raster::filled(next.width(), next.height(), BACKGROUND);
    let mut scores = vec![0.0; model.len()];
    let cuts: Vec<(Vec<usize>, GroupEval)> = outcomes.iter().map(|o| (o.nodes.clone(), ctx.evaluate(&params, &o.nodes))).collect();
    for (group, ev) in &cuts {
        for (&i, &s) in group.iter().zip(&ev.scores) {
            scores[i] = s;
        }
    }
    let mut taken = vec![false; labels.len()];
    for pass in 0..2 {
        for (_, ev) in &cuts {
            let Some((projections, d)) = &ev.cut else { continue };
            let sets = if pass == 0 { &d.interiors } else { &d.members };
            for (p, set) in projections.iter().zip(sets) {
                for &i in set {
                    if !taken[i] {
                        taken[i] = true;
                        labels.values_mut()[i] = p.label();
                    }
                }
            }
        }
    }
    let result = FrameResult {
        params: params.clone(),
        skeleton: extract_pose(model, &posed),
        posed,
        labels: labels.clone(),
        scores,
        groups: outcomes,
        lost: est.lost,
        diverged: false,
        flow: Some(flow),
    };
    Ok((result, TrackState { params, labels, lab }))
}

/// Sequential tracker over a frame sequence starting at the model's
/// reference frame.
#[derive(Debug, Clone)]
pub struct Tracker {
    model: RelationalModel,
    refs: Vec<Histogram>,
    config: TrackerConfig,
    state: TrackState,
}

impl Tracker {
    /// `frame` and `mask` are the reference frame the model was built from.
    /// Mask labels outside the schema are treated as background.
    pub fn new(model: RelationalModel, frame: &Raster<Rgb>, mask: &Raster<Label>, config: TrackerConfig) -> Result<Self> {
        config.validate()?;
        let mask = mask.map(|&l| if model.by_label(l).is_some() { l } else { BACKGROUND });
        let refs = reference_histograms(&model, frame, &mask, config.bins)?;
        Self::with_references(model, refs, frame, mask, config)
    }

    /// Like [`Tracker::new`] with histograms stored alongside the model.
    pub fn with_references(
        model: RelationalModel,
        refs: Vec<Histogram>,
        frame: &Raster<Rgb>,
        mask: Raster<Label>,
        config: TrackerConfig,
    ) -> Result<Self> {
        config.validate()?;
        frame.check_same_size(&mask)?;
        if refs.len() != model.len() {
            return Err(Error::InvalidParameter(format!("{} reference histograms for {} nodes", refs.len(), model.len())));
        }
        let state = TrackState { params: PoseParams::identity(&model), labels: mask, lab: to_lab(frame) };
        Ok(Tracker { model, refs, config, state })
    }

    pub fn model(&self) -> &RelationalModel {
        &self.model
    }

    pub fn references(&self) -> &[Histogram] {
        &self.refs
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    pub fn state(&self) -> &TrackState {
        &self.state
    }

    /// Result for the reference frame: the model's own pose and mask.
    pub fn initial_result(&self, frame: &Raster<Rgb>) -> Result<FrameResult> {
        let posed = pose_model(&self.model, &self.state.params)?;
        let labels = self.state.labels.clone();
        let scores = self
            .model
            .nodes()
            .iter()
            .zip(&self.refs)
            .map(|(n, r)| {
                let px: Vec<usize> = (0..labels.len()).filter(|&i| labels.values()[i] == n.label).collect();
                recognition_score(&px, frame, r)
            })
            .collect();
        Ok(FrameResult {
            params: self.state.params.clone(),
            skeleton: extract_pose(&self.model, &posed),
            posed,
            labels,
            scores,
            groups: Vec::new(),
            lost: vec![false; self.model.len()],
            diverged: false,
            flow: None,
        })
    }

    pub fn step<E: Executor + ?Sized>(&mut self, exec: &E, next: &Raster<Rgb>) -> Result<FrameResult> {
        let (result, state) = track_frame(&self.model, &self.refs, &self.config, exec, &self.state, next)?;
        self.state = state;
        Ok(result)
    }
}
