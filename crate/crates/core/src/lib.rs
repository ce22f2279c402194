//! Shortest paths in simple polygons under a bounded mutable workspace.
//!
//! The polygon lives in read-only memory; the walk keeps O(S) mutable words
//! by decomposing the boundary into curves of S edges, locating corridors of
//! the induced medial-axis decomposition with a constant-space violator-space
//! solver, and carrying a budgeted funnel from corridor to corridor.

pub mod corridor;
pub mod error;
pub mod geodesic;
pub mod geom;
pub mod oracle;
pub mod prg;
pub mod vsolve;
pub mod workspace;

pub use error::{Error, Result};
pub use geom::{orient, point_in_polygon, Containment, Point, PolygonHandle, Ray, Segment};
pub use workspace::Workspace;
