pub mod brauer;
pub mod cli;
pub mod bundles;
pub mod descent;
pub mod geometry;
pub mod helix;
pub mod linalg;
pub mod scene;
