use std::fmt;
use std::sync::Arc;

use nalgebra::Vector2;

pub type Point = Vector2<f64>;

/// Coordinate direction used by [`LevelSet::HalfPlane`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

type ScalarField = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
type VectorField = Arc<dyn Fn(Point) -> Point + Send + Sync>;

/// Implicit description of the physical domain `{phi < 0}`.
///
/// The boundary is the zero set of `phi` and the outward normal is
/// `grad phi / |grad phi|` there.
#[derive(Clone)]
pub enum LevelSet {
    /// `phi(x) = |x - center| - radius`.
    Circle { center: Point, radius: f64 },
    /// `phi(x) = x[axis] - offset`, i.e. the half plane below `offset`.
    HalfPlane { axis: Axis, offset: f64 },
    /// Ring between two radii. Not used by the shipped experiments.
    Annulus { center: Point, inner: f64, outer: f64 },
    Analytic { value: ScalarField, gradient: VectorField },
}

impl LevelSet {
    pub fn circle(center: Point, radius: f64) -> Self {
        LevelSet::Circle { center, radius }
    }

    pub fn half_plane(axis: Axis, offset: f64) -> Self {
        LevelSet::HalfPlane { axis, offset }
    }

    pub fn analytic(
        value: impl Fn(Point) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(Point) -> Point + Send + Sync + 'static,
    ) -> Self {
        LevelSet::Analytic { value: Arc::new(value), gradient: Arc::new(gradient) }
    }

    /// A level set that is negative everywhere.
    pub fn everywhere() -> Self {
        LevelSet::analytic(|_| -1.0, |_| Point::zeros())
    }

    pub fn value(&self, x: Point) -> f64 {
        match self {
            LevelSet::Circle { center, radius } => (x - center).norm() - radius,
            LevelSet::HalfPlane { axis, offset } => match axis {
                Axis::X => x.x - offset,
                Axis::Y => x.y - offset,
            },
            LevelSet::Annulus { center, inner, outer } => {
                let r = (x - center).norm();
                (inner - r).max(r - outer)
            }
            LevelSet::Analytic { value, .. } => value(x),
        }
    }

    pub fn gradient(&self, x: Point) -> Point {
        match self {
            LevelSet::Circle { center, .. } => {
                let d = x - center;
                let r = d.norm();
                if r == 0.0 {
                    Point::zeros()
                } else {
                    d / r
                }
            }
            LevelSet::HalfPlane { axis, .. } => match axis {
                Axis::X => Point::new(1.0, 0.0),
                Axis::Y => Point::new(0.0, 1.0),
            },
            LevelSet::Annulus { center, inner, outer } => {
                let d = x - center;
                let r = d.norm();
                if r == 0.0 {
                    return Point::zeros();
                }
                if inner - r > r - outer {
                    -d / r
                } else {
                    d / r
                }
            }
            LevelSet::Analytic { gradient, .. } => gradient(x),
        }
    }

    /// Unit normal `grad phi / |grad phi|`; zero where the gradient vanishes.
    pub fn normal(&self, x: Point) -> Point {
        let g = self.gradient(x);
        let n = g.norm();
        if n > 0.0 {
            g / n
        } else {
            g
        }
    }

    /// True when `phi` is affine, so edge roots can be found in closed form.
    pub fn is_affine(&self) -> bool {
        matches!(self, LevelSet::HalfPlane { .. })
    }
}

impl fmt::Debug for LevelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelSet::Circle { center, radius } => f
                .debug_struct("Circle")
                .field("center", &(center.x, center.y))
                .field("radius", radius)
                .finish(),
            LevelSet::HalfPlane { axis, offset } => {
                f.debug_struct("HalfPlane").field("axis", axis).field("offset", offset).finish()
            }
            LevelSet::Annulus { center, inner, outer } => f
                .debug_struct("Annulus")
                .field("center", &(center.x, center.y))
                .field("inner", inner)
                .field("outer", outer)
                .finish(),
            LevelSet::Analytic { .. } => f.write_str("Analytic"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_is_signed_distance() {
        let c = LevelSet::circle(Point::new(0.5, 0.5), 0.45);
        assert_eq!(c.value(Point::new(0.5, 0.5)), -0.45);
        assert!((c.value(Point::new(1.0, 0.5)) - 0.05).abs() < 1e-15);
        let n = c.normal(Point::new(0.5, 0.95));
        assert!((n - Point::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn half_plane_sign() {
        let h = LevelSet::half_plane(Axis::Y, 0.5);
        assert!(h.value(Point::new(0.3, 0.2)) < 0.0);
        assert!(h.value(Point::new(0.3, 0.7)) > 0.0);
        assert!(h.is_affine());
    }

    #[test]
    fn annulus_gradient_points_out_of_ring() {
        let a = LevelSet::Annulus { center: Point::zeros(), inner: 0.15, outer: 0.45 };
        assert!(a.value(Point::new(0.3, 0.0)) < 0.0);
        assert!(a.gradient(Point::new(0.1, 0.0)).x < 0.0);
        assert!(a.gradient(Point::new(0.4, 0.0)).x > 0.0);
    }
}
