//! Colour-histogram recognition, multiscale parameter search, candidate
//! delineation and the per-frame tracker.

mod delineate;
mod histogram;
mod msps;
mod track;

pub use delineate::{delineate, Delineation};
pub use histogram::{
    build_histogram, build_histogram_with, chi_square, recognition_score, valid_bins, Histogram, BINS_PER_CHANNEL,
};
pub use msps::{
    msps_maximize, msps_maximize_with, validate_schedule, Executor, MspsResult, SearchSpec, Sequential, DEFAULT_BUDGET,
    DEFAULT_SCHEDULE,
};
pub use track::{
    group_slots, reference_histograms, track_frame, FrameResult, GroupOutcome, Slot, TrackState, Tracker, TrackerConfig,
};
