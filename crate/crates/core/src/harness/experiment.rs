//! Convergence studies over a sequence of mesh levels.

use std::io::Write;
use std::time::Instant;

use thiserror::Error;

use crate::assembly::{
    Assembler, AssemblyError, Method, ProblemData, QuadratureOrders, SaddleSolution, SaddleSystem,
    StabilizationConfig,
};
use crate::fespace::{DofLayout, MultiplierDegree};
use crate::geometry::GeometryError;
use crate::linalg::{condest_with, LinalgError};
use crate::mesh::{ActiveMesh, MeshError};

use super::errors::{compute_eoc, compute_errors, ErrorReport};
use super::problems::Example;

pub const DEFAULT_LEVELS: [usize; 4] = [10, 20, 40, 80];

pub const CSV_HEADER: &str =
    "example,method,stab,mult_deg,nx,h,N,err_u_L2,err_p_L2,err_div_L2,err_div_max,condest,eoc_u,eoc_p,eoc_div,runtime_s";

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub example: Example,
    /// Cells per unit length in x, strictly increasing.
    pub levels: Vec<usize>,
    pub method: Method,
    pub multiplier_degree: MultiplierDegree,
    pub stabilization: StabilizationConfig,
    pub orders: QuadratureOrders,
    pub condest: bool,
    /// Record wall-clock time; when off the runtime column is zero.
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(example: Example) -> Self {
        ExperimentConfig {
            example,
            levels: DEFAULT_LEVELS.to_vec(),
            method: Method::Lagrange,
            multiplier_degree: MultiplierDegree::Linear,
            stabilization: StabilizationConfig::default(),
            orders: QuadratureOrders::default(),
            condest: true,
            timing: true,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StageError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("mesh levels must be positive and strictly increasing")]
    InvalidLevels,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("level nx = {nx}: {source}")]
pub struct HarnessError {
    pub nx: usize,
    pub source: StageError,
}

impl HarnessError {
    /// Failure while building or cutting the mesh (as opposed to the solve).
    pub fn is_geometry(&self) -> bool {
        matches!(
            &self.source,
            StageError::Mesh(_)
                | StageError::Geometry(_)
                | StageError::Assembly(AssemblyError::Geometry(_))
                | StageError::Assembly(AssemblyError::Macro(_))
        )
    }
}

/// Everything produced on one mesh level.
#[derive(Debug)]
pub struct LevelRun {
    pub nx: usize,
    pub mesh: ActiveMesh,
    pub layout: DofLayout,
    pub data: ProblemData,
    pub system: SaddleSystem,
    pub solution: SaddleSolution,
    pub errors: ErrorReport,
    pub condest: Option<f64>,
    pub runtime_s: f64,
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelResult {
    pub nx: usize,
    pub h: f64,
    pub n_dofs: usize,
    pub errors: ErrorReport,
    pub condest: Option<f64>,
    /// Orders for velocity, pressure and divergence against the previous level.
    pub eoc: Option<[f64; 3]>,
    pub runtime_s: f64,
    pub residual: f64,
}

/// Builds, assembles and solves one level.
pub fn solve_level(cfg: &ExperimentConfig, nx: usize) -> Result<LevelRun, HarnessError> {
    let wrap = |source: StageError| HarnessError { nx, source };
    let start = Instant::now();
    let mesh = cfg.example.build_mesh(nx).map_err(|e| wrap(e.into()))?;
    let data = cfg.example.problem_data(&mesh, cfg.orders.volume).map_err(|e| wrap(e.into()))?;
    let mean = data.mean_pressure.is_some();
    let layout = match cfg.method {
        Method::Lagrange => DofLayout::new(&mesh, cfg.multiplier_degree, mean),
        Method::Penalty { .. } => DofLayout::without_multiplier(&mesh, mean),
    };
    let asm = Assembler::new(&mesh, &layout, cfg.stabilization).map_err(|e| wrap(e.into()))?.with_orders(cfg.orders);
    let mut system = asm.assemble_system(&data, cfg.method).map_err(|e| wrap(e.into()))?;
    let strong = asm.strong_bc_values(&data).map_err(|e| wrap(e.into()))?;
    system.apply_strong_bc(&strong);
    let fact = system.factorize().map_err(|e| wrap(e.into()))?;
    let solution = system.solve_with(&fact).map_err(|e| wrap(e.into()))?;
    let runtime_s = start.elapsed().as_secs_f64();
    let condest = if cfg.condest { Some(condest_with(&fact).map_err(|e| wrap(e.into()))?) } else { None };
    let errors = compute_errors(&mesh, &solution.velocity, &solution.pressure, &cfg.example.exact(), cfg.orders.volume)
        .map_err(|e| wrap(e.into()))?;
    log::info!(
        "{} nx={nx}: N={} err_u={:.3e} err_p={:.3e} err_div={:.3e}",
        cfg.example.label(),
        layout.total(),
        errors.err_u_l2,
        errors.err_p_l2,
        errors.err_div_l2
    );
    drop(asm);
    Ok(LevelRun {
        nx,
        mesh,
        layout,
        data,
        system,
        solution,
        errors,
        condest,
        runtime_s: if cfg.timing { runtime_s } else { 0.0 },
    })
}

pub fn check_levels(levels: &[usize]) -> Result<(), HarnessError> {
    if levels.is_empty() || levels[0] == 0 || levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HarnessError { nx: levels.first().copied().unwrap_or(0), source: StageError::InvalidLevels });
    }
    Ok(())
}

impl LevelResult {
    /// Summary of `run`; orders are taken against `previous` when given.
    pub fn from_run(run: &LevelRun, previous: Option<&LevelResult>) -> Self {
        let h = run.mesh.h();
        let eoc = previous.map(|prev| {
            let pair = |a: f64, b: f64| compute_eoc(&[a, b], &[prev.h, h])[0];
            [
                pair(prev.errors.err_u_l2, run.errors.err_u_l2),
                pair(prev.errors.err_p_l2, run.errors.err_p_l2),
                pair(prev.errors.err_div_l2, run.errors.err_div_l2),
            ]
        });
        LevelResult {
            nx: run.nx,
            h,
            n_dofs: run.layout.total(),
            errors: run.errors,
            condest: run.condest,
            eoc,
            runtime_s: run.runtime_s,
            residual: run.solution.residual,
        }
    }
}

/// Runs every level of `cfg`, handing each solved level to `inspect`.
pub fn run_experiment_with(
    cfg: &ExperimentConfig,
    mut inspect: impl FnMut(&LevelRun),
) -> Result<Vec<LevelResult>, HarnessError> {
    check_levels(&cfg.levels)?;
    let mut rows: Vec<LevelResult> = Vec::with_capacity(cfg.levels.len());
    for &nx in &cfg.levels {
        let run = solve_level(cfg, nx)?;
        inspect(&run);
        rows.push(LevelResult::from_run(&run, rows.last()));
    }
    Ok(rows)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<LevelResult>, HarnessError> {
    run_experiment_with(cfg, |_| ())
}

fn sci(v: f64) -> String {
    format!("{v:.9e}")
}

/// Writes the header and one row per level.
pub fn write_csv<W: Write>(mut out: W, cfg: &ExperimentConfig, rows: &[LevelResult]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        let eoc = |k: usize| r.eoc.map_or(String::new(), |e| sci(e[k]));
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            cfg.example.label(),
            cfg.method.name(),
            cfg.stabilization.multiplier_stab.name(),
            cfg.multiplier_degree.as_int(),
            r.nx,
            sci(r.h),
            r.n_dofs,
            sci(r.errors.err_u_l2),
            sci(r.errors.err_p_l2),
            sci(r.errors.err_div_l2),
            sci(r.errors.err_div_max),
            r.condest.map_or(String::new(), sci),
            eoc(0),
            eoc(1),
            eoc(2),
            sci(r.runtime_s),
        )?;
    }
    Ok(())
}
