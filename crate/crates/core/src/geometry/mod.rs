//! Level-set geometry, cut-element clipping and quadrature on cut pieces.

mod clip;
mod levelset;
pub mod quadrature;

pub use clip::{
    boundary_quadrature, classify_element, clip_element, cut_volume_quadrature, edge_meets_domain, CutGeometry, Location,
    ROOT_TOL, SNAP,
};
pub use levelset::{Axis, LevelSet, Point};
pub use quadrature::{
    polygon_area, segment_quadrature, triangle_area, triangle_quadrature, QuadratureRule, MAX_SEGMENT_ORDER,
    MAX_TRIANGLE_ORDER,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    /// The reconstructed boundary piece is too short to carry a segment; the
    /// element should be treated as `snap_to` instead.
    #[error("degenerate cut in element {element} (snap to {snap_to:?})")]
    DegenerateCut { element: usize, snap_to: Location },
    #[error("quadrature order {order} is not tabulated (maximum {max})")]
    UnsupportedOrder { order: usize, max: usize },
}
