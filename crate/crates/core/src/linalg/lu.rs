use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use nalgebra::{Matrix2, Vector2};

use super::{LinalgError, SparseMatrix, Triplets};

/// Relative residual above which a solve is reported.
pub const RESIDUAL_WARN: f64 = 1e-9;
/// A probe solve with a larger relative residual marks the matrix singular.
const SINGULAR_RESIDUAL: f64 = 1e-4;
const REFINEMENT_STEPS: usize = 3;

/// Sparse LU factorization with partial pivoting.
///
/// A single dense row/column pair (such as a mean-value constraint) would
/// make the fill-reducing ordering useless. In that case the LU is computed
/// for a copy that keeps one off-diagonal entry of the pair, and solves
/// with the full matrix use the rank-two Woodbury correction.
pub struct Factorization {
    matrix: SparseMatrix,
    lu: Lu<usize, f64>,
    border: Option<Border>,
}

/// `A = A' + U Vᵀ` with `U = [e_k, s]`, `V = [r, e_k]`.
struct Border {
    k: usize,
    r: Vec<f64>,
    s: Vec<f64>,
    /// `A'⁻¹ U` and `(I + Vᵀ A'⁻¹ U)⁻¹`.
    z: [Vec<f64>; 2],
    cap: Matrix2<f64>,
    /// `A'⁻ᵀ V` and `(I + Uᵀ A'⁻ᵀ V)⁻¹`.
    w: [Vec<f64>; 2],
    cap_t: Matrix2<f64>,
}

impl std::fmt::Debug for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Factorization")
            .field("n", &self.matrix.nrows)
            .field("nnz", &self.matrix.nnz())
            .field("dense_index", &self.border.as_ref().map(|b| b.k))
            .finish()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sparse_lu(a: &SparseMatrix) -> Result<Lu<usize, f64>, LinalgError> {
    let n = a.nrows;
    let triplets: Vec<Triplet<usize, usize, f64>> = a.iter().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| LinalgError::Backend(format!("{e:?}")))?;
    mat.sp_lu().map_err(|e| match e {
        faer::sparse::linalg::LuError::SymbolicSingular { index } => LinalgError::SingularMatrix { pivot: index },
        other => LinalgError::Backend(format!("{other:?}")),
    })
}

fn lu_solve(lu: &Lu<usize, f64>, b: &[f64], transpose: bool) -> Vec<f64> {
    let mut rhs = Mat::<f64>::from_fn(b.len(), 1, |i, _| b[i]);
    if transpose {
        lu.solve_transpose_in_place(rhs.as_mut());
    } else {
        lu.solve_in_place(rhs.as_mut());
    }
    (0..b.len()).map(|i| rhs[(i, 0)]).collect()
}

/// Index whose row or column has more than `max(64, n/16)` off-diagonal entries.
fn dense_index(a: &SparseMatrix) -> Option<(usize, bool, bool)> {
    let n = a.nrows;
    let limit = 64.max(n / 16);
    let mut row = vec![0usize; n];
    let mut col = vec![0usize; n];
    for (i, j, _) in a.iter() {
        if i != j {
            row[i] += 1;
            col[j] += 1;
        }
    }
    let dense: Vec<usize> = (0..n).filter(|&k| row[k] > limit || col[k] > limit).collect();
    match dense.as_slice() {
        [k] => Some((*k, row[*k] > limit, col[*k] > limit)),
        _ => None,
    }
}

fn bordered(a: &SparseMatrix, k: usize, dense_row: bool, dense_col: bool) -> Result<(Lu<usize, f64>, Border), LinalgError> {
    let n = a.nrows;
    let largest = |entries: &mut dyn Iterator<Item = (usize, f64)>| {
        entries.filter(|&(i, _)| i != k).max_by(|x, y| x.1.abs().total_cmp(&y.1.abs())).map(|(i, _)| i)
    };
    let keep_r = if dense_row { largest(&mut a.iter().filter(|e| e.0 == k).map(|e| (e.1, e.2))) } else { None };
    let keep_c = if dense_col { largest(&mut a.column(k)) } else { None };
    let mut r = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = Triplets::new(n, n);
    for (i, j, v) in a.iter() {
        if dense_row && i == k && j != k && Some(j) != keep_r {
            r[j] += v;
        } else if dense_col && j == k && i != k && Some(i) != keep_c {
            s[i] += v;
        } else {
            t.push(i, j, v);
        }
    }
    let lu = sparse_lu(&t.to_matrix())?;
    let mut ek = vec![0.0; n];
    ek[k] = 1.0;
    let z = [lu_solve(&lu, &ek, false), lu_solve(&lu, &s, false)];
    let w = [lu_solve(&lu, &r, true), lu_solve(&lu, &ek, true)];
    let cap = Matrix2::new(1.0 + dot(&r, &z[0]), dot(&r, &z[1]), z[0][k], 1.0 + z[1][k]);
    let cap_t = Matrix2::new(1.0 + w[0][k], w[1][k], dot(&s, &w[0]), 1.0 + dot(&s, &w[1]));
    let singular = LinalgError::SingularMatrix { pivot: k };
    let cap = cap.try_inverse().ok_or(singular.clone())?;
    let cap_t = cap_t.try_inverse().ok_or(singular)?;
    Ok((lu, Border { k, r, s, z, cap, w, cap_t }))
}

pub fn factorize(a: &SparseMatrix) -> Result<Factorization, LinalgError> {
    if a.nrows != a.ncols {
        return Err(LinalgError::DimensionMismatch { expected: a.nrows, found: a.ncols });
    }
    let n = a.nrows;
    let split = dense_index(a).and_then(|(k, dr, dc)| bordered(a, k, dr, dc).ok());
    let fact = match split {
        Some((lu, border)) => Factorization { matrix: a.clone(), lu, border: Some(border) },
        None => Factorization { matrix: a.clone(), lu: sparse_lu(a)?, border: None },
    };

    // Probe solve: a zero pivot shows up as non-finite values or a useless solution.
    // The probe vector is generic so that it is not in the range of a singular matrix.
    let b: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i + 1) as f64).sin()).collect();
    let x = fact.raw_solve(&b, false);
    if let Some(pivot) = x.iter().position(|v| !v.is_finite()) {
        return Err(LinalgError::SingularMatrix { pivot });
    }
    let r = residual(a, &x, &b, false);
    let bnorm = inf_norm(&b).max(f64::MIN_POSITIVE);
    if inf_norm(&r) > SINGULAR_RESIDUAL * bnorm {
        let pivot = (0..n).max_by(|&i, &j| r[i].abs().total_cmp(&r[j].abs())).unwrap_or(0);
        return Err(LinalgError::SingularMatrix { pivot });
    }
    Ok(fact)
}

fn inf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn residual(a: &SparseMatrix, x: &[f64], b: &[f64], transpose: bool) -> Vec<f64> {
    let ax = if transpose { a.transpose_mul_vec(x) } else { a.mul_vec(x) };
    b.iter().zip(ax).map(|(bi, ai)| bi - ai).collect()
}

impl Factorization {
    pub fn n(&self) -> usize {
        self.matrix.nrows
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    fn raw_solve(&self, b: &[f64], transpose: bool) -> Vec<f64> {
        let mut y = lu_solve(&self.lu, b, transpose);
        if let Some(bd) = &self.border {
            let (basis, t, cap) = if transpose {
                (&bd.w, Vector2::new(y[bd.k], dot(&bd.s, &y)), &bd.cap_t)
            } else {
                (&bd.z, Vector2::new(dot(&bd.r, &y), y[bd.k]), &bd.cap)
            };
            let c = cap * t;
            for (i, yi) in y.iter_mut().enumerate() {
                *yi -= basis[0][i] * c[0] + basis[1][i] * c[1];
            }
        }
        y
    }

    fn refined(&self, b: &[f64], transpose: bool) -> (Vec<f64>, f64) {
        let mut x = self.raw_solve(b, transpose);
        let bnorm = inf_norm(b);
        if bnorm == 0.0 {
            return (x, 0.0);
        }
        let mut r = residual(&self.matrix, &x, b, transpose);
        let mut rel = inf_norm(&r) / bnorm;
        for _ in 0..REFINEMENT_STEPS {
            if rel <= f64::EPSILON {
                break;
            }
            let dx = self.raw_solve(&r, transpose);
            let candidate: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + d).collect();
            let r_new = residual(&self.matrix, &candidate, b, transpose);
            let rel_new = inf_norm(&r_new) / bnorm;
            if !(rel_new < rel) {
                break;
            }
            x = candidate;
            r = r_new;
            rel = rel_new;
        }
        (x, rel)
    }

    /// Solves `A x = b` with iterative refinement; returns `x` and the
    /// relative residual `‖b - Ax‖∞ / ‖b‖∞`.
    pub fn solve_with_residual(&self, b: &[f64]) -> Result<(Vec<f64>, f64), LinalgError> {
        self.check(b)?;
        let (x, rel) = self.refined(b, false);
        if rel > RESIDUAL_WARN {
            log::warn!("linear solve relative residual {rel:.3e}");
        }
        Ok((x, rel))
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        self.solve_with_residual(b).map(|(x, _)| x)
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        self.check(b)?;
        Ok(self.refined(b, true).0)
    }

    fn check(&self, b: &[f64]) -> Result<(), LinalgError> {
        if b.len() != self.n() {
            return Err(LinalgError::DimensionMismatch { expected: self.n(), found: b.len() });
        }
        Ok(())
    }
}
