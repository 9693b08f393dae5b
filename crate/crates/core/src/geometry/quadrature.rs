use super::{GeometryError, Point};

/// Highest polynomial degree integrated exactly by the tabulated triangle rules.
pub const MAX_TRIANGLE_ORDER: usize = 5;
/// Highest polynomial degree integrated exactly by the tabulated segment rules.
pub const MAX_SEGMENT_ORDER: usize = 9;

/// Points and weights; weights carry area or arclength.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn extend(&mut self, other: QuadratureRule) {
        self.points.extend(other.points);
        self.weights.extend(other.weights);
    }
}

// Barycentric (l1, l2) coordinates and weights normalised to sum to one.
fn reference_triangle_rule(order: usize) -> Result<Vec<(f64, f64, f64)>, GeometryError> {
    let rule = match order {
        0 | 1 => vec![(1.0 / 3.0, 1.0 / 3.0, 1.0)],
        2 => vec![
            (1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0),
            (2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0),
            (1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0),
        ],
        3 | 4 => {
            let (a, wa) = (0.445_948_490_915_964_886_32, 0.223_381_589_678_011_465_70);
            let (b, wb) = (0.091_576_213_509_770_743_46, 0.109_951_743_655_321_867_64);
            vec![
                (a, a, wa),
                (1.0 - 2.0 * a, a, wa),
                (a, 1.0 - 2.0 * a, wa),
                (b, b, wb),
                (1.0 - 2.0 * b, b, wb),
                (b, 1.0 - 2.0 * b, wb),
            ]
        }
        5 => {
            let s = 15f64.sqrt();
            let (a, wa) = ((6.0 - s) / 21.0, (155.0 - s) / 1200.0);
            let (b, wb) = ((6.0 + s) / 21.0, (155.0 + s) / 1200.0);
            vec![
                (1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0),
                (a, a, wa),
                (1.0 - 2.0 * a, a, wa),
                (a, 1.0 - 2.0 * a, wa),
                (b, b, wb),
                (1.0 - 2.0 * b, b, wb),
                (b, 1.0 - 2.0 * b, wb),
            ]
        }
        _ => return Err(GeometryError::UnsupportedOrder { order, max: MAX_TRIANGLE_ORDER }),
    };
    Ok(rule)
}

/// Symmetric rule exact for polynomials of total degree `order` on the triangle.
pub fn triangle_quadrature(tri: &[Point; 3], order: usize) -> Result<QuadratureRule, GeometryError> {
    let reference = reference_triangle_rule(order)?;
    let area = triangle_area(tri).abs();
    let mut rule = QuadratureRule {
        points: Vec::with_capacity(reference.len()),
        weights: Vec::with_capacity(reference.len()),
    };
    for (l1, l2, w) in reference {
        let l0 = 1.0 - l1 - l2;
        rule.points.push(tri[0] * l0 + tri[1] * l1 + tri[2] * l2);
        rule.weights.push(w * area);
    }
    Ok(rule)
}

/// Fan-triangulates a convex polygon from its vertex centroid and maps the
/// triangle rule of `order` onto every sub-triangle.
pub fn polygon_quadrature(polygon: &[Point], order: usize) -> Result<QuadratureRule, GeometryError> {
    if polygon.len() == 3 {
        return triangle_quadrature(&[polygon[0], polygon[1], polygon[2]], order);
    }
    let center = polygon.iter().fold(Point::zeros(), |acc, p| acc + p) / polygon.len() as f64;
    let mut rule = QuadratureRule::default();
    for i in 0..polygon.len() {
        let sub = [center, polygon[i], polygon[(i + 1) % polygon.len()]];
        if triangle_area(&sub).abs() == 0.0 {
            continue;
        }
        rule.extend(triangle_quadrature(&sub, order)?);
    }
    Ok(rule)
}

fn gauss_legendre(npts: usize) -> Vec<(f64, f64)> {
    match npts {
        1 => vec![(0.0, 2.0)],
        2 => {
            let x = 1.0 / 3f64.sqrt();
            vec![(-x, 1.0), (x, 1.0)]
        }
        3 => {
            let x = (3.0f64 / 5.0).sqrt();
            vec![(-x, 5.0 / 9.0), (0.0, 8.0 / 9.0), (x, 5.0 / 9.0)]
        }
        4 => {
            let r = 2.0 / 7.0 * (6.0f64 / 5.0).sqrt();
            let (xi, xo) = ((3.0 / 7.0 - r).sqrt(), (3.0 / 7.0 + r).sqrt());
            let s = 30f64.sqrt();
            let (wi, wo) = ((18.0 + s) / 36.0, (18.0 - s) / 36.0);
            vec![(-xo, wo), (-xi, wi), (xi, wi), (xo, wo)]
        }
        _ => {
            let r = 2.0 * (10.0f64 / 7.0).sqrt();
            let (xi, xo) = ((5.0 - r).sqrt() / 3.0, (5.0 + r).sqrt() / 3.0);
            let s = 70f64.sqrt();
            let (wi, wo) = ((322.0 + 13.0 * s) / 900.0, (322.0 - 13.0 * s) / 900.0);
            vec![(-xo, wo), (-xi, wi), (0.0, 128.0 / 225.0), (xi, wi), (xo, wo)]
        }
    }
}

/// Gauss-Legendre rule on the segment `a`-`b`, exact for degree `order`.
pub fn segment_quadrature(a: Point, b: Point, order: usize) -> Result<QuadratureRule, GeometryError> {
    if order > MAX_SEGMENT_ORDER {
        return Err(GeometryError::UnsupportedOrder { order, max: MAX_SEGMENT_ORDER });
    }
    let npts = order / 2 + 1;
    let half = 0.5 * (b - a).norm();
    let mid = 0.5 * (a + b);
    let dir = 0.5 * (b - a);
    let (points, weights) = gauss_legendre(npts)
        .into_iter()
        .map(|(s, w)| (mid + dir * s, w * half))
        .unzip();
    Ok(QuadratureRule { points, weights })
}

/// Signed area, positive for counterclockwise ordering.
pub fn triangle_area(tri: &[Point; 3]) -> f64 {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    0.5 * (e1.x * e2.y - e1.y * e2.x)
}

/// Shoelace formula, positive for counterclockwise polygons.
pub fn polygon_area(polygon: &[Point]) -> f64 {
    let n = polygon.len();
    0.5 * (0..n)
        .map(|i| {
            let (p, q) = (polygon[i], polygon[(i + 1) % n]);
            p.x * q.y - q.x * p.y
        })
        .sum::<f64>()
}
