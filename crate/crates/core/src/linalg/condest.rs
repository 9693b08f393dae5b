use super::{factorize, Factorization, LinalgError, SparseMatrix};

/// Iteration cap of the Hager–Higham estimator.
pub const CONDEST_MAX_ITER: usize = 5;

/// Estimate of `κ₁(A) = ‖A‖₁ ‖A⁻¹‖₁` (a lower bound up to rounding).
pub fn condest_1norm(a: &SparseMatrix) -> Result<f64, LinalgError> {
    let f = factorize(a)?;
    condest_with(&f)
}

/// Same as [`condest_1norm`] reusing an existing factorization.
pub fn condest_with(f: &Factorization) -> Result<f64, LinalgError> {
    Ok(f.matrix().norm1() * inverse_norm1(f)?)
}

fn norm1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

fn inverse_norm1(f: &Factorization) -> Result<f64, LinalgError> {
    let n = f.n();
    if n == 0 {
        return Ok(0.0);
    }
    let mut x = vec![1.0 / n as f64; n];
    let mut est = 0.0;
    let mut last_j = usize::MAX;
    for iter in 0..CONDEST_MAX_ITER {
        let y = f.solve(&x)?;
        let new_est = norm1(&y);
        if iter > 0 && new_est <= est {
            break;
        }
        est = new_est;
        let xi: Vec<f64> = y.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect();
        let z = f.solve_transpose(&xi)?;
        let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
        let (j, zmax) = z
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bj, bm), (i, v)| if v.abs() > bm { (i, v.abs()) } else { (bj, bm) });
        if zmax <= ztx || j == last_j {
            break;
        }
        last_j = j;
        x = vec![0.0; n];
        x[j] = 1.0;
    }
    let alt: Vec<f64> = (0..n)
        .map(|i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            s * (1.0 + if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 })
        })
        .collect();
    let y = f.solve(&alt)?;
    Ok(est.max(2.0 * norm1(&y) / (3.0 * n as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Triplets;

    fn dense_kappa(a: &SparseMatrix) -> f64 {
        let d = a.to_dense();
        let inv = d.clone().try_inverse().unwrap();
        let n1 = |m: &nalgebra::DMatrix<f64>| {
            (0..m.ncols()).map(|j| m.column(j).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
        };
        n1(&d) * n1(&inv)
    }

    #[test]
    fn diagonal_is_exact() {
        let mut t = Triplets::new(4, 4);
        for (i, v) in [1.0, 10.0, 0.01, 3.0].iter().enumerate() {
            t.push(i, i, *v);
        }
        let k = condest_1norm(&t.to_matrix()).unwrap();
        assert!((k - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn laplacian_is_within_factor_three() {
        let n = 30;
        let mut t = Triplets::new(n, n);
        for i in 0..n {
            t.push(i, i, 2.0);
            if i + 1 < n {
                t.push(i, i + 1, -1.0);
                t.push(i + 1, i, -1.0);
            }
        }
        let a = t.to_matrix();
        let est = condest_1norm(&a).unwrap();
        let exact = dense_kappa(&a);
        assert!(est <= exact * (1.0 + 1e-10) && est >= exact / 3.0, "{est} vs {exact}");
    }
}
