//! Unfitted (cut) mixed finite elements for the Darcy problem.
//!
//! The velocity lives in the lowest-order Raviart–Thomas space and the
//! pressure in piecewise constants on the active part of a structured
//! background triangulation. The normal-flux boundary condition on the
//! unfitted boundary is imposed with a stabilized Lagrange multiplier in
//! discontinuous piecewise linears, and ghost-penalty terms are chosen so
//! that the discrete divergence equation is not polluted.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: level sets, clipping of cut triangles, quadrature.
//! * [`mesh`]: background triangulation and the active mesh with its face sets.
//! * [`fespace`]: degrees of freedom, bases, interpolation and projection.
//! * [`macroelement`]: macroelement partitions for localized stabilization.
//! * [`assembly`]: bilinear forms, stabilizations and the saddle-point system.
//! * [`linalg`]: sparse storage, LU solves and the 1-norm condition estimate.
//! * [`harness`]: manufactured problems, error norms and convergence studies.
//! * [`io`]: mesh, partition and MatrixMarket dumps.

pub mod assembly;
pub mod fespace;
pub mod geometry;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod macroelement;
pub mod mesh;

pub use geometry::{LevelSet, Point};
