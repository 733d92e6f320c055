//! Numerical toolkit for torus homeomorphisms homotopic to the identity.
//!
//! Maps are given by their lifts to the plane. On top of that the crate
//! estimates rotation sets, classifies bitmap regions of the torus by their
//! covering-space homology, computes winding and linking numbers, and
//! searches for periodic orbits.

pub mod error;
pub mod homology;
pub mod hull;
pub mod io;
pub mod maps;
pub mod periodic;
pub mod region;
pub mod rotation;
pub mod sampling;
pub mod torus;
pub mod transition;
pub mod winding;

pub use error::{Error, Result};
pub use hull::{convex_hull, diffusion_rate, hausdorff_distance, ConvexPolygon};
pub use maps::{make_map, parse_map, LiftedMap, MapSpec};
pub use region::GridRegion;
pub use torus::{project, IntVec, LinearPart, TorusPoint, Vec2};
