//! Manufactured solutions and the domains they are posed on.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::assembly::{ProblemData, ScalarFn, VectorFn};
use crate::geometry::{Axis, GeometryError, LevelSet, Point};
use crate::mesh::{build_background_mesh, extract_active_mesh, ActiveMesh, MeshError, Rect, Side};

/// Relative height of the cut top row in the unfitted rectangle.
pub const TOP_ROW_FRACTION: f64 = 0.3;
pub const EX1_RADIUS: f64 = 0.45;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Example {
    /// Trigonometric solution on a disk.
    Ex1,
    /// Zero velocity with a cubic pressure of amplitude `c` on the same disk.
    Ex1_2 { c: f64 },
    /// Polynomial solution on `[0,1]x[0,0.5]`, top boundary unfitted.
    Ex2Unfitted,
    /// The same problem on a fitted mesh.
    Ex2Fitted,
    /// Trigonometric solution on the unfitted rectangle with a pressure
    /// condition on the bottom side.
    MixedBc,
    /// Constant divergence `g0` on the disk with exactly compatible data.
    ConstantDivergence { g0: f64 },
    /// Linear divergence on the disk with exactly compatible data.
    LinearDivergence,
}

/// Exact fields of a manufactured solution (`η = 1`).
#[derive(Clone)]
pub struct ExactSolution {
    pub u: VectorFn,
    pub p: ScalarFn,
    pub g: ScalarFn,
    pub f: VectorFn,
}

impl std::fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("ExactSolution { .. }")
    }
}

fn ex1() -> ExactSolution {
    let tp = 2.0 * PI;
    ExactSolution {
        u: Arc::new(move |x: Point| {
            Point::new(tp * (tp * x.x).cos() * (tp * x.y).cos(), -tp * (tp * x.x).sin() * (tp * x.y).sin())
        }),
        p: Arc::new(move |x: Point| -(tp * x.x).sin() * (tp * x.y).cos()),
        g: Arc::new(move |x: Point| -2.0 * tp * tp * (tp * x.x).sin() * (tp * x.y).cos()),
        f: Arc::new(|_| Point::zeros()),
    }
}

fn ex1_2(c: f64) -> ExactSolution {
    ExactSolution {
        u: Arc::new(|_| Point::zeros()),
        p: Arc::new(move |x: Point| c * (x.y.powi(3) - x.y * x.y / 2.0 + x.y - 7.0 / 12.0)),
        g: Arc::new(|_| 0.0),
        f: Arc::new(move |x: Point| Point::new(0.0, c * (3.0 * x.y * x.y - x.y + 1.0))),
    }
}

fn ex2_u(x: Point) -> Point {
    Point::new(x.x * (x.x - 1.0), x.y * (x.y - 0.5))
}

fn ex2_p(x: Point) -> f64 {
    -(x.x.powi(3) / 3.0 - x.x * x.x / 2.0 + x.y.powi(3) / 3.0 - x.y * x.y / 4.0)
}

fn ex2_g(x: Point) -> f64 {
    2.0 * x.x + 2.0 * x.y - 1.5
}

fn ex2() -> ExactSolution {
    ExactSolution {
        u: Arc::new(ex2_u),
        p: Arc::new(ex2_p),
        g: Arc::new(ex2_g),
        f: Arc::new(|_| Point::zeros()),
    }
}

/// Divergence-free cubic added to the polynomial problems.
fn swirl(x: Point) -> Point {
    Point::new(2.0 * x.x * x.x * x.y, -2.0 * x.x * x.y * x.y)
}

fn constant_divergence(g0: f64) -> ExactSolution {
    let u = move |x: Point| Point::new(x.x - 0.5, x.y - 0.5) * (0.5 * g0) + swirl(x);
    ExactSolution {
        u: Arc::new(u),
        p: Arc::new(|x: Point| x.x * x.x - x.y),
        g: Arc::new(move |_| g0),
        f: Arc::new(move |x: Point| u(x) + Point::new(2.0 * x.x, -1.0)),
    }
}

fn linear_divergence() -> ExactSolution {
    ExactSolution {
        u: Arc::new(|x| ex2_u(x) + swirl(x)),
        p: Arc::new(ex2_p),
        g: Arc::new(ex2_g),
        f: Arc::new(swirl),
    }
}

/// Background box, level set and boundary-condition sides of one level.
#[derive(Clone, Debug)]
pub struct DomainSpec {
    pub nx: usize,
    pub ny: usize,
    pub bbox: Rect,
    pub geometry: LevelSet,
    /// Sides with strongly imposed normal flux.
    pub strong_sides: Vec<Side>,
    /// Sides with a prescribed pressure.
    pub neumann_sides: Vec<Side>,
}

impl Example {
    /// Name used on the command line and in CSV output.
    pub fn label(&self) -> &'static str {
        match self {
            Example::Ex1 => "1",
            Example::Ex1_2 { .. } => "1.2",
            Example::Ex2Unfitted => "2",
            Example::Ex2Fitted => "2-fitted",
            Example::MixedBc => "mixed",
            Example::ConstantDivergence { .. } => "div",
            Example::LinearDivergence => "lindiv",
        }
    }

    pub fn exact(&self) -> ExactSolution {
        match *self {
            Example::Ex1 | Example::MixedBc => ex1(),
            Example::Ex1_2 { c } => ex1_2(c),
            Example::Ex2Unfitted | Example::Ex2Fitted => ex2(),
            Example::ConstantDivergence { g0 } => constant_divergence(g0),
            Example::LinearDivergence => linear_divergence(),
        }
    }

    pub fn domain(&self, nx: usize) -> DomainSpec {
        let disk = || LevelSet::circle(Point::new(0.5, 0.5), EX1_RADIUS);
        match self {
            Example::Ex1 | Example::Ex1_2 { .. } | Example::ConstantDivergence { .. } | Example::LinearDivergence => {
                DomainSpec {
                    nx,
                    ny: nx,
                    bbox: Rect::unit(),
                    geometry: disk(),
                    strong_sides: vec![],
                    neumann_sides: vec![],
                }
            }
            Example::Ex2Unfitted | Example::MixedBc => {
                let ny = nx / 2 + 1;
                let dy = 0.5 / (ny as f64 - 1.0 + TOP_ROW_FRACTION);
                let (strong_sides, neumann_sides) = match self {
                    Example::MixedBc => (vec![Side::Left, Side::Right], vec![Side::Bottom]),
                    _ => (vec![Side::Left, Side::Right, Side::Bottom], vec![]),
                };
                DomainSpec {
                    nx,
                    ny,
                    bbox: Rect::new(0.0, 0.0, 1.0, ny as f64 * dy),
                    geometry: LevelSet::half_plane(Axis::Y, 0.5),
                    strong_sides,
                    neumann_sides,
                }
            }
            Example::Ex2Fitted => DomainSpec {
                nx,
                ny: (nx / 2).max(1),
                bbox: Rect::new(0.0, 0.0, 1.0, 0.5),
                geometry: LevelSet::everywhere(),
                strong_sides: Side::ALL.to_vec(),
                neumann_sides: vec![],
            },
        }
    }

    pub fn build_mesh(&self, nx: usize) -> Result<ActiveMesh, MeshError> {
        let d = self.domain(nx);
        extract_active_mesh(build_background_mesh(d.nx, d.ny, d.bbox)?, &d.geometry, &d.strong_sides)
    }

    /// Data of the discrete problem on `mesh`. When the flux is prescribed on
    /// the whole boundary, the pressure integral over the reconstructed
    /// domain is fixed to that of the exact pressure.
    pub fn problem_data(&self, mesh: &ActiveMesh, volume_order: usize) -> Result<ProblemData, GeometryError> {
        let exact = self.exact();
        let d = self.domain(mesh.background.nx);
        let mean_pressure = if d.neumann_sides.is_empty() {
            let mut total = 0.0;
            for a in 0..mesh.n_elements() {
                total += mesh.domain_quadrature(a, volume_order)?.integrate(|x| (exact.p)(x));
            }
            Some(total)
        } else {
            None
        };
        let u = exact.u.clone();
        Ok(ProblemData {
            eta: 1.0,
            f: exact.f.clone(),
            g: exact.g.clone(),
            boundary_flux: Arc::new(move |x, n| u(x).dot(&n)),
            neumann_pressure: (!d.neumann_sides.is_empty()).then(|| exact.p.clone()),
            neumann_sides: d.neumann_sides,
            mean_pressure,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grad(f: &ScalarFn, x: Point) -> Point {
        let e = 1e-6;
        Point::new(
            (f(x + Point::new(e, 0.0)) - f(x - Point::new(e, 0.0))) / (2.0 * e),
            (f(x + Point::new(0.0, e)) - f(x - Point::new(0.0, e))) / (2.0 * e),
        )
    }

    fn div(u: &VectorFn, x: Point) -> f64 {
        let e = 1e-6;
        (u(x + Point::new(e, 0.0)).x - u(x - Point::new(e, 0.0)).x) / (2.0 * e)
            + (u(x + Point::new(0.0, e)).y - u(x - Point::new(0.0, e)).y) / (2.0 * e)
    }

    #[test]
    fn manufactured_fields_are_consistent() {
        let examples = [
            Example::Ex1,
            Example::Ex1_2 { c: 100.0 },
            Example::Ex2Unfitted,
            Example::ConstantDivergence { g0: 1.5 },
            Example::LinearDivergence,
        ];
        for ex in examples {
            let s = ex.exact();
            for &(x, y) in &[(0.3, 0.2), (0.71, 0.44), (0.5, 0.05)] {
                let p = Point::new(x, y);
                let f = (s.u)(p) + grad(&s.p, p);
                let scale = 1.0 + (s.f)(p).norm();
                assert!(((s.f)(p) - f).norm() < 1e-6 * scale, "{ex:?} f at {p:?}");
                assert!(((s.g)(p) - div(&s.u, p)).abs() < 1e-5 * (1.0 + (s.g)(p).abs()), "{ex:?} g at {p:?}");
            }
        }
    }

    #[test]
    fn unfitted_rectangle_cuts_top_row() {
        let d = Example::Ex2Unfitted.domain(10);
        assert_eq!(d.ny, 6);
        let dy = d.bbox.max.y / d.ny as f64;
        assert!(((0.5 - 5.0 * dy) / dy - TOP_ROW_FRACTION).abs() < 1e-12);
        let mesh = Example::Ex2Unfitted.build_mesh(10).unwrap();
        assert_eq!(mesh.n_cut(), 20);
        assert!((mesh.domain_area() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fitted_rectangle_has_no_cuts() {
        let mesh = Example::Ex2Fitted.build_mesh(10).unwrap();
        assert_eq!(mesh.n_cut(), 0);
        assert_eq!(mesh.fitted_boundary_faces.len(), 30);
    }
}
