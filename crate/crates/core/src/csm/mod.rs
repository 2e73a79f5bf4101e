//! Cloud system model: fuzzy part clouds arranged in a tree-shaped
//! relational model (the stickman), with forward kinematics, projection of
//! posed clouds onto a frame, seed generation and pose extraction.

mod cloud;
mod kinematics;
mod model;
mod pose;
mod projection;
mod schema;
mod seeds;

pub use cloud::{build_cloud, Cloud, CloudParams};
pub use kinematics::{pose_model, recover_params, NodeParams, PoseParams, PosedModel, PosedNode};
pub use model::{build_model, EdgeAttr, ModelNode, NodeAttr, RelationalModel};
pub use pose::{extract_pose, Joint, Segment, Skeleton2D};
pub use projection::{project_cloud, Projection, SNAP_EPS};
pub use schema::{PartDef, PartSchema};
pub use seeds::{make_seeds, uncertainty_domain};
