//! Error norms, convergence orders and conservation checks.

use crate::assembly::ProblemData;
use crate::fespace::{FeFunction, Rt0Element};
use crate::geometry::{boundary_quadrature, GeometryError};
use crate::macroelement::MacroPartition;
use crate::mesh::ActiveMesh;

use super::problems::ExactSolution;

/// Minimum rule order for error integrals.
pub const ERROR_ORDER: usize = 5;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ErrorReport {
    pub err_u_l2: f64,
    /// Pressure error after removing the mean difference.
    pub err_p_l2: f64,
    pub err_div_l2: f64,
    /// Largest `|div u_h - g|` over the volume quadrature points.
    pub err_div_max: f64,
}

pub fn compute_errors(
    mesh: &ActiveMesh,
    velocity: &FeFunction,
    pressure: &FeFunction,
    exact: &ExactSolution,
    order: usize,
) -> Result<ErrorReport, GeometryError> {
    let order = order.max(ERROR_ORDER);
    let mut eu = 0.0;
    let mut ediv = 0.0;
    let mut div_max: f64 = 0.0;
    let mut area = 0.0;
    let mut p_shift = 0.0;
    let rules = (0..mesh.n_elements()).map(|a| mesh.domain_quadrature(a, order)).collect::<Result<Vec<_>, _>>()?;
    for (a, rule) in rules.iter().enumerate() {
        let el = Rt0Element::new(mesh, a);
        let d = el.divergence(&velocity.coeffs);
        let ph = pressure.coeffs[a];
        for (x, w) in rule.iter() {
            eu += w * (el.eval(&velocity.coeffs, x) - (exact.u)(x)).norm_squared();
            let r = d - (exact.g)(x);
            ediv += w * r * r;
            div_max = div_max.max(r.abs());
            p_shift += w * (ph - (exact.p)(x));
            area += w;
        }
    }
    let shift = p_shift / area;
    let mut ep = 0.0;
    for (a, rule) in rules.iter().enumerate() {
        let ph = pressure.coeffs[a] - shift;
        ep += rule.integrate(|x| (ph - (exact.p)(x)).powi(2));
    }
    Ok(ErrorReport { err_u_l2: eu.sqrt(), err_p_l2: ep.sqrt(), err_div_l2: ediv.sqrt(), err_div_max: div_max })
}

/// `log(e_i / e_{i+1}) / log(h_i / h_{i+1})` for consecutive levels.
pub fn compute_eoc(errors: &[f64], hs: &[f64]) -> Vec<f64> {
    errors
        .windows(2)
        .zip(hs.windows(2))
        .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect()
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// `∫_Σ u_h·n - ∫_Σ u_B` over the unfitted boundary.
pub fn boundary_flux_defect(
    mesh: &ActiveMesh,
    velocity: &FeFunction,
    data: &ProblemData,
    order: usize,
) -> Result<f64, GeometryError> {
    let mut defect = 0.0;
    for (c, cg) in mesh.cuts.iter().enumerate() {
        let Some(seg) = cg.boundary_segment else { continue };
        let el = Rt0Element::new(mesh, mesh.cut_element(c));
        let n = cg.segment_normal;
        let rule = boundary_quadrature(&seg, order)?;
        defect += rule.integrate(|x| el.eval(&velocity.coeffs, x).dot(&n) - (data.boundary_flux)(x, n));
    }
    Ok(defect)
}

/// Per macroelement, `∫_{M∩Ω} (div u_h - g) - μ |M∩Ω|` where `μ` is the
/// multiplier of the mean-value row (zero without one).
pub fn macro_mass_defects(
    mesh: &ActiveMesh,
    partition: &MacroPartition,
    velocity: &FeFunction,
    g: impl Fn(crate::geometry::Point) -> f64,
    mean_multiplier: f64,
    order: usize,
) -> Result<Vec<f64>, GeometryError> {
    let mut defect = vec![0.0; mesh.n_elements()];
    for a in 0..mesh.n_elements() {
        let d = Rt0Element::new(mesh, a).divergence(&velocity.coeffs);
        let rule = mesh.domain_quadrature(a, order)?;
        defect[partition.assignment[a]] += rule.integrate(|x| d - g(x)) - mean_multiplier * rule.measure();
    }
    Ok(partition.roots.iter().map(|&r| defect[r]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eoc_examples() {
        assert!((compute_eoc(&[0.2, 0.1], &[0.1, 0.05])[0] - 1.0).abs() < 1e-14);
        assert!((compute_eoc(&[0.04, 0.01], &[0.1, 0.05])[0] - 2.0).abs() < 1e-14);
        assert_eq!(compute_eoc(&[0.3, 0.3], &[0.1, 0.05])[0], 0.0);
        assert!(compute_eoc(&[1.0], &[0.1]).is_empty());
    }

    #[test]
    fn slope_of_power_law() {
        let h = [0.1, 0.05, 0.025, 0.0125];
        let k: Vec<f64> = h.iter().map(|h: &f64| 3.0 * h.powi(-2)).collect();
        assert!((loglog_slope(&h, &k) + 2.0).abs() < 1e-12);
    }
}
