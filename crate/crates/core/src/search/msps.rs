use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default step schedule as fractions of each half-width.
pub const DEFAULT_SCHEDULE: [f64; 5] = [1.0, 0.5, 0.25, 0.125, 0.0625];

/// Default evaluation budget per search group.
pub const DEFAULT_BUDGET: usize = 2000;

/// Box-bounded search space `center ± half_width` with a coarse-to-fine
/// step schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub center: Vec<f64>,
    pub half_width: Vec<f64>,
    pub schedule: Vec<f64>,
}

impl SearchSpec {
    pub fn new(center: Vec<f64>, half_width: Vec<f64>, schedule: Vec<f64>) -> Result<Self> {
        let s = SearchSpec { center, half_width, schedule };
        s.validate()?;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn lower(&self, i: usize) -> f64 {
        self.center[i] - self.half_width[i]
    }

    pub fn upper(&self, i: usize) -> f64 {
        self.center[i] + self.half_width[i]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().enumerate().all(|(i, &v)| v >= self.lower(i) && v <= self.upper(i))
    }

    pub fn validate(&self) -> Result<()> {
        if self.center.len() != self.half_width.len() {
            return Err(Error::InvalidParameter(format!(
                "{} centers for {} half-widths",
                self.center.len(),
                self.half_width.len()
            )));
        }
        if self.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("search center must be finite".into()));
        }
        if self.half_width.iter().any(|h| !(h.is_finite() && *h >= 0.0)) {
            return Err(Error::InvalidParameter("half-widths must be finite and non-negative".into()));
        }
        validate_schedule(&self.schedule)
    }
}

/// A schedule is non-empty, strictly decreasing, positive and starts at most
/// at 1 so the coarsest step never exceeds the half-width.
pub fn validate_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::InvalidParameter("empty step schedule".into()));
    }
    if !(schedule[0] <= 1.0) || schedule.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::InvalidParameter("schedule steps must lie in (0, 1]".into()));
    }
    if schedule.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter("schedule must be strictly decreasing".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MspsResult {
    pub params: Vec<f64>,
    pub score: f64,
    pub evaluations: usize,
    /// The budget ran out before the finest scale converged.
    pub budget_exhausted: bool,
}

/// Evaluates a batch of independent objective calls. Implementations may run
/// them concurrently but must return results in input order.
pub trait Executor {
    fn map(&self, n: usize, f: &(dyn Fn(usize) -> f64 + Sync)) -> Vec<f64>;
}

/// Runs every evaluation on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map(&self, n: usize, f: &(dyn Fn(usize) -> f64 + Sync)) -> Vec<f64> {
        (0..n).map(f).collect()
    }
}

/// Multiscale parameter search on the calling thread.
pub fn msps_maximize<F>(objective: F, spec: &SearchSpec, budget: usize) -> Result<MspsResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    msps_maximize_with(&Sequential, objective, spec, budget)
}

/// Multiscale parameter search.
///
/// The center is evaluated first. For each schedule entry `s`, the search
/// hill-climbs: it evaluates the two axis neighbours `x ± s · half_width`
/// (clamped to the box) of the incumbent along every free axis and moves to
/// the best strictly improving one, the first in axis order on ties, until
/// none improves. The incumbent carries over to the next scale. When the
/// budget cannot cover a neighbourhood, it is evaluated partially and the
/// best point so far is returned with `budget_exhausted` set.
pub fn msps_maximize_with<E, F>(exec: &E, objective: F, spec: &SearchSpec, budget: usize) -> Result<MspsResult>
where
    E: Executor + ?Sized,
    F: Fn(&[f64]) -> f64 + Sync,
{
    spec.validate()?;
    if budget == 0 {
        return Err(Error::InvalidParameter("evaluation budget must be positive".into()));
    }
    let mut x = spec.center.clone();
    let mut score = objective(&x);
    let mut evals = 1;
    for &s in &spec.schedule {
        loop {
            let mut cands: Vec<Vec<f64>> = Vec::new();
            for i in 0..spec.dim() {
                let h = spec.half_width[i];
                if h == 0.0 {
                    continue;
                }
                for sign in [-1.0, 1.0] {
                    let v = (x[i] + sign * h * s).clamp(spec.lower(i), spec.upper(i));
                    if v != x[i] {
                        let mut c = x.clone();
                        c[i] = v;
                        cands.push(c);
                    }
                }
            }
            let remaining = budget - evals;
            let exhausted = cands.len() > remaining;
            cands.truncate(remaining);
            let scores = exec.map(cands.len(), &|k| objective(&cands[k]));
            evals += cands.len();
            let mut best: Option<usize> = None;
            for (k, &v) in scores.iter().enumerate() {
                if v > best.map_or(score, |b| scores[b]) {
                    best = Some(k);
                }
            }
            if let Some(b) = best {
                score = scores[b];
                x = cands.swap_remove(b);
            }
            if exhausted {
                return Ok(MspsResult { params: x, score, evaluations: evals, budget_exhausted: true });
            }
            if best.is_none() {
                break;
            }
        }
    }
    Ok(MspsResult { params: x, score, evaluations: evals, budget_exhausted: false })
}
