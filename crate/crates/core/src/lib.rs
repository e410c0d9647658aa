//! Exact computations with Higgs bundles and flat connections in
//! characteristic `p`: Frobenius liftings, the inverse Cartier transform,
//! the Cartier transform and supporting identities.

pub mod atlas;
pub mod error;
pub mod gallery;
pub mod identities;
pub mod report;
pub mod ring;
pub mod scene;
pub mod sheaves;
pub mod suite;
pub mod transforms;

pub use atlas::{Atlas, Chart, FrobLift, Overlap};
pub use error::{Error, Result};
pub use report::{Report, Status};
pub use scene::{emit_scene, parse_scene, Scene, Sheaf};
pub use sheaves::{FlatSheaf, HiggsSheaf, PCurvature};
