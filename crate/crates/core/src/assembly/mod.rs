//! Bilinear forms, ghost penalties and the saddle-point system.

mod forms;
mod system;

use std::sync::Arc;

use thiserror::Error;

use crate::geometry::{GeometryError, Point};
use crate::linalg::LinalgError;
use crate::macroelement::{MacroError, DEFAULT_DELTA};
use crate::mesh::Side;

pub use forms::Assembler;
pub use system::{SaddleSolution, SaddleSystem, COMPATIBILITY_TOL};

pub type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(Point) -> Point + Send + Sync>;
/// Boundary datum evaluated at a point with the outward unit normal there.
pub type FluxFn = Arc<dyn Fn(Point, Point) -> f64 + Send + Sync>;

/// How the normal-flux condition on the unfitted boundary is imposed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    Lagrange,
    /// Nitsche-type penalty with parameter `lambda` (scaled by `1/h`).
    Penalty { lambda: f64 },
}

impl Method {
    pub const DEFAULT_PENALTY: f64 = 100.0;

    pub fn name(&self) -> &'static str {
        match self {
            Method::Lagrange => "lagrange",
            Method::Penalty { .. } => "penalty",
        }
    }
}

/// Stabilization of the multiplier block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MultiplierStab {
    /// Face jumps of values and gradients plus normal derivatives on the boundary pieces.
    Sc,
    /// Face jumps of values and gradients plus normal derivatives over the cut elements.
    ScHat,
    /// Face jumps of values plus normal derivatives over the cut elements.
    ScTilde,
}

impl MultiplierStab {
    pub fn name(&self) -> &'static str {
        match self {
            MultiplierStab::Sc => "sc",
            MultiplierStab::ScHat => "sc-hat",
            MultiplierStab::ScTilde => "sc-tilde",
        }
    }
}

/// Faces carrying the velocity and divergence ghost penalties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FaceSelection {
    /// All faces of cut elements that meet the domain.
    AllSigma,
    /// Only those faces interior to a macroelement.
    MacroOnly,
}

/// Realisation of the velocity and divergence ghost penalties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StabilizationForm {
    /// Difference of the two element polynomials over the face patch.
    PatchExtension,
    /// Jumps of values and normal derivatives on the face.
    FaceJumps,
}

/// Normal field used in the bulk term of the multiplier stabilization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormalSource {
    LevelSetGradient,
    SegmentNormal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilizationConfig {
    pub tau: f64,
    pub tau_b: f64,
    pub tau_c: f64,
    pub multiplier_stab: MultiplierStab,
    pub faces: FaceSelection,
    pub form: StabilizationForm,
    pub normal_source: NormalSource,
    /// Volume-fraction threshold for macroelements.
    pub delta: f64,
}

impl Default for StabilizationConfig {
    fn default() -> Self {
        StabilizationConfig {
            tau: 1.0,
            tau_b: 1.0,
            tau_c: 1.0,
            multiplier_stab: MultiplierStab::Sc,
            faces: FaceSelection::AllSigma,
            form: StabilizationForm::PatchExtension,
            normal_source: NormalSource::LevelSetGradient,
            delta: DEFAULT_DELTA,
        }
    }
}

/// Polynomial orders of the quadrature rules used in assembly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureOrders {
    pub volume: usize,
    pub boundary: usize,
}

impl Default for QuadratureOrders {
    fn default() -> Self {
        QuadratureOrders { volume: 4, boundary: 5 }
    }
}

/// Coefficients and boundary data of one Darcy problem.
#[derive(Clone)]
pub struct ProblemData {
    /// Constant inverse permeability.
    pub eta: f64,
    pub f: VectorFn,
    pub g: ScalarFn,
    /// Normal flux `u_B` on the unfitted boundary and the strongly imposed faces.
    pub boundary_flux: FluxFn,
    /// Box sides with a prescribed pressure.
    pub neumann_sides: Vec<Side>,
    pub neumann_pressure: Option<ScalarFn>,
    /// Prescribed pressure mean; adds the mean-value row when set.
    pub mean_pressure: Option<f64>,
}

impl std::fmt::Debug for ProblemData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemData")
            .field("eta", &self.eta)
            .field("neumann_sides", &self.neumann_sides)
            .field("mean_pressure", &self.mean_pressure)
            .finish_non_exhaustive()
    }
}

impl ProblemData {
    /// Flux prescribed on the whole boundary.
    pub fn is_pure_flux(&self) -> bool {
        self.neumann_sides.is_empty()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssemblyError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Macro(#[from] MacroError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("singular configuration: {0}")]
    SingularConfig(String),
    #[error("pressure is only determined up to a constant: prescribe its mean")]
    IncompatibleData,
    #[error("layout has {found} mean rows but the problem needs {expected}")]
    LayoutMismatch { expected: usize, found: usize },
}
