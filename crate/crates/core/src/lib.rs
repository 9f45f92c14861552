//! Rigidity, redundant rigidity and global-rigidity necessary conditions
//! for bar-joint frameworks constrained to the unit sphere, the unit
//! cylinder, the unit cone or an axis-aligned ellipsoid.

pub mod cli;
pub mod error;
pub mod exact;
pub mod flextrace;
pub mod framework;
pub mod graph;
pub mod hendrickson;
pub mod linalg;
pub mod surface;

pub use error::{Result, RigidityError};
pub use framework::{Framework, RigidityReport};
pub use graph::Graph;
pub use surface::{Surface, SurfaceKind};
