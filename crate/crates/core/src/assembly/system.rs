use crate::fespace::{Block, DofLayout, FeFunction};
use crate::linalg::{factorize, Factorization, SparseMatrix, Triplets};

use super::{Assembler, AssemblyError, Method, ProblemData};

/// Relative compatibility defect above which a warning is logged.
pub const COMPATIBILITY_TOL: f64 = 1e-8;

/// Global matrix and right-hand side in the `[u | p | χ | mean]` numbering.
#[derive(Clone, Debug)]
pub struct SaddleSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    pub layout: DofLayout,
    pub method: Method,
    /// `∫_Ω g - ∫_∂Ω u_B` when the flux is prescribed on the whole boundary.
    pub compatibility_defect: Option<f64>,
    /// Velocity unknowns eliminated by strong boundary conditions.
    pub strong_dofs: Vec<usize>,
}

/// Discrete solution split by block.
#[derive(Clone, Debug)]
pub struct SaddleSolution {
    pub velocity: FeFunction,
    pub pressure: FeFunction,
    pub multiplier: FeFunction,
    /// Multiplier of the mean-value row.
    pub mean: Option<f64>,
    /// Relative residual of the linear solve.
    pub residual: f64,
}

impl<'a> Assembler<'a> {
    /// Assembles the full system; strong conditions are not applied yet.
    pub fn assemble_system(&self, data: &ProblemData, method: Method) -> Result<SaddleSystem, AssemblyError> {
        let l = self.layout;
        let expected = usize::from(data.mean_pressure.is_some());
        if l.n_mean != expected {
            return Err(AssemblyError::LayoutMismatch { expected, found: l.n_mean });
        }
        let pure_flux = data.is_pure_flux();
        if pure_flux && data.mean_pressure.is_none() {
            return Err(match method {
                Method::Penalty { .. } => AssemblyError::SingularConfig(
                    "flux prescribed on the whole boundary without a pressure mean".into(),
                ),
                Method::Lagrange => AssemblyError::IncompatibleData,
            });
        }
        if let Method::Penalty { lambda } = method {
            if !(lambda > 0.0) {
                return Err(AssemblyError::SingularConfig(format!("penalty parameter {lambda} must be positive")));
            }
        }

        let (uo, po, mo, meano) =
            (l.offset(Block::Velocity), l.offset(Block::Pressure), l.offset(Block::Multiplier), l.offset(Block::Mean));
        let n = l.total();
        let mut t = Triplets::new(n, n);
        let m = self.assemble_mass(data.eta)?;
        let b = self.assemble_divergence()?;
        t.append_shifted(&m, uo, uo);
        t.append_shifted(&b, po, uo);
        t.append_transposed(&b, uo, po);
        match method {
            Method::Lagrange => {
                if l.n_multiplier > 0 {
                    let c = self.assemble_coupling()?;
                    let s = self.assemble_multiplier_stab()?;
                    t.append_shifted(&c, mo, uo);
                    t.append_transposed(&c, uo, mo);
                    for (i, j, v) in s.iter() {
                        t.push(mo + i, mo + j, -v);
                    }
                }
            }
            Method::Penalty { lambda } => {
                let (mp, bp) = self.assemble_penalty(lambda)?;
                t.append_shifted(&mp, uo, uo);
                t.append_shifted(&bp, uo, po);
            }
        }
        if l.n_mean == 1 {
            for (a, m) in self.element_measures()?.into_iter().enumerate() {
                t.push_sym(meano, po + a, m);
            }
        }
        let rhs = self.assemble_rhs(data, method)?;

        let compatibility_defect = if pure_flux {
            let d = self.compatibility_defect(data)?;
            let scale = 1.0 + rhs[po..po + l.n_pressure].iter().map(|v| v.abs()).sum::<f64>();
            if d.abs() > COMPATIBILITY_TOL * scale {
                log::warn!("boundary data incompatible with the source: defect {d:.3e}");
            }
            Some(d)
        } else {
            None
        };

        Ok(SaddleSystem {
            matrix: t.to_matrix(),
            rhs,
            layout: l.clone(),
            method,
            compatibility_defect,
            strong_dofs: Vec::new(),
        })
    }
}

impl SaddleSystem {
    /// Imposes `u_d = value` by symmetric elimination.
    pub fn apply_strong_bc(&mut self, values: &[(usize, f64)]) {
        if values.is_empty() {
            return;
        }
        let n = self.matrix.nrows;
        let mut fixed = vec![false; n];
        let mut x = vec![0.0; n];
        for &(d, v) in values {
            fixed[d] = true;
            x[d] = v;
        }
        let ax = self.matrix.mul_vec(&x);
        for i in 0..n {
            self.rhs[i] = if fixed[i] { x[i] } else { self.rhs[i] - ax[i] };
        }
        self.matrix.eliminate(&fixed);
        self.strong_dofs = (0..n).filter(|&i| fixed[i]).collect();
    }

    pub fn factorize(&self) -> Result<Factorization, AssemblyError> {
        Ok(factorize(&self.matrix)?)
    }

    pub fn solve(&self) -> Result<SaddleSolution, AssemblyError> {
        let f = self.factorize()?;
        self.solve_with(&f)
    }

    pub fn solve_with(&self, f: &Factorization) -> Result<SaddleSolution, AssemblyError> {
        let (x, residual) = f.solve_with_residual(&self.rhs)?;
        Ok(self.split(&x, residual))
    }

    pub fn split(&self, x: &[f64], residual: f64) -> SaddleSolution {
        let l = &self.layout;
        SaddleSolution {
            velocity: l.extract(Block::Velocity, x),
            pressure: l.extract(Block::Pressure, x),
            multiplier: l.extract(Block::Multiplier, x),
            mean: (l.n_mean == 1).then(|| x[l.offset(Block::Mean)]),
            residual,
        }
    }
}
