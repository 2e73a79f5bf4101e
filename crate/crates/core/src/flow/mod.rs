//! Dense optical flow, label propagation and warm-start estimation of the
//! next frame's search parameters.

mod estimate;
mod horn_schunck;
mod propagate;

pub use estimate::{estimate_params, EstimateConfig, NodeBounds, ParamEstimate};
pub use horn_schunck::{dense_flow, FlowConfig, FlowField};
pub use propagate::propagate_labels;
