pub mod caps;
pub mod classifier;
pub mod digraph;
pub mod duality;
pub mod linalg;
pub mod netcode;
pub mod sideinfo;
pub mod solver;
pub mod transform;
