use super::quadrature::{polygon_area, polygon_quadrature, segment_quadrature, triangle_area, QuadratureRule};
use super::{GeometryError, LevelSet, Point};

/// Relative snap tolerance; vertex values with `|phi| < SNAP * h` count as inside.
pub const SNAP: f64 = 1e-12;
/// Absolute bracket width at which edge bisection stops.
pub const ROOT_TOL: f64 = 1e-14;

const DIP_SAMPLES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Location {
    Inside,
    Cut,
    Outside,
}

/// Clipped part `T ∩ Ω` of one element and its piece of the reconstructed boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct CutGeometry {
    pub element_id: usize,
    /// Counterclockwise vertices of the convex polygon `T ∩ Ω`.
    pub polygon: Vec<Point>,
    /// Boundary piece ordered so that the polygon is traversed counterclockwise.
    pub boundary_segment: Option<[Point; 2]>,
    /// Unit normal of the boundary segment pointing out of the domain.
    pub segment_normal: Point,
    pub volume_fraction: f64,
}

impl CutGeometry {
    /// Geometry of an element lying entirely inside the domain.
    pub fn uncut(element_id: usize, tri: &[Point; 3]) -> Self {
        CutGeometry {
            element_id,
            polygon: counterclockwise(tri).to_vec(),
            boundary_segment: None,
            segment_normal: Point::zeros(),
            volume_fraction: 1.0,
        }
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.polygon)
    }

    pub fn segment_length(&self) -> f64 {
        self.boundary_segment.map_or(0.0, |[a, b]| (b - a).norm())
    }
}

pub(crate) fn diameter(tri: &[Point; 3]) -> f64 {
    (0..3).map(|i| (tri[(i + 1) % 3] - tri[i]).norm()).fold(0.0, f64::max)
}

fn counterclockwise(tri: &[Point; 3]) -> [Point; 3] {
    if triangle_area(tri) < 0.0 {
        [tri[0], tri[2], tri[1]]
    } else {
        *tri
    }
}

// Vertex values below `eps` count as inside; crossings are roots of `phi`
// itself, so a snapped vertex acts as its own crossing point.
struct Snapped<'a> {
    geom: &'a LevelSet,
    eps: f64,
}

impl Snapped<'_> {
    fn new<'a>(geom: &'a LevelSet, tri: &[Point; 3]) -> Snapped<'a> {
        Snapped { geom, eps: SNAP * diameter(tri) }
    }

    fn inside(&self, x: Point) -> bool {
        self.geom.value(x) < self.eps
    }

    /// Zero crossing on the edge `p`-`q`, which must have a sign change.
    /// The endpoints are put into lexicographic order first so that both
    /// elements sharing the edge obtain bitwise identical points.
    fn crossing(&self, p: Point, q: Point) -> Point {
        let (a, b) = if (p.x, p.y) <= (q.x, q.y) { (p, q) } else { (q, p) };
        let (fa, fb) = (self.geom.value(a), self.geom.value(b));
        // The inside endpoint may be a snapped vertex with 0 <= phi < eps.
        if fa >= 0.0 && fa < self.eps {
            return a;
        }
        if fb >= 0.0 && fb < self.eps {
            return b;
        }
        if self.geom.is_affine() {
            let t = (fa / (fa - fb)).clamp(0.0, 1.0);
            return a + (b - a) * t;
        }
        let len = (b - a).norm();
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let a_negative = fa < 0.0;
        while (hi - lo) * len > ROOT_TOL && hi - lo > f64::EPSILON {
            let mid = 0.5 * (lo + hi);
            if (self.geom.value(a + (b - a) * mid) < 0.0) == a_negative {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        a + (b - a) * (0.5 * (lo + hi))
    }

    /// Whether the zero set enters an edge whose endpoints share a sign.
    fn edge_dips(&self, p: Point, q: Point, inside: bool) -> bool {
        match self.geom {
            LevelSet::HalfPlane { .. } => false,
            LevelSet::Circle { center, radius } => {
                if inside {
                    // |x - c| is convex, so an edge with both ends inside stays inside.
                    return false;
                }
                let d = q - p;
                let t = ((center - p).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
                (p + d * t - center).norm() - radius < self.eps
            }
            _ => (1..DIP_SAMPLES).any(|i| {
                let x = p + (q - p) * (i as f64 / DIP_SAMPLES as f64);
                self.inside(x) != inside
            }),
        }
    }
}

/// Classifies a triangle against the level set, snapping near-zero vertex
/// values to the inside.
pub fn classify_element(tri: &[Point; 3], geom: &LevelSet) -> Location {
    let snapped = Snapped::new(geom, tri);
    let inside = tri.map(|v| snapped.inside(v));
    if inside.iter().all(|&s| s) != inside.iter().any(|&s| s) {
        return Location::Cut;
    }
    let all_inside = inside[0];
    let dips = (0..3).any(|i| snapped.edge_dips(tri[i], tri[(i + 1) % 3], all_inside));
    match (dips, all_inside) {
        (true, _) => Location::Cut,
        (false, true) => Location::Inside,
        (false, false) => Location::Outside,
    }
}

/// Whether the edge `a`-`b` has a part of positive length inside the
/// domain: an endpoint is inside (after snapping) or the zero set dips
/// into the edge. `h` sets the snap tolerance.
pub fn edge_meets_domain(a: Point, b: Point, h: f64, geom: &LevelSet) -> bool {
    let snapped = Snapped { geom, eps: SNAP * h };
    snapped.inside(a) || snapped.inside(b) || snapped.edge_dips(a, b, false)
}

/// Clips a cut triangle with the piecewise linear reconstruction of the
/// zero set: the edge crossings are located on the two edges whose vertex
/// values change sign and joined by one straight segment.
pub fn clip_element(element_id: usize, tri: &[Point; 3], geom: &LevelSet) -> Result<CutGeometry, GeometryError> {
    let tri = counterclockwise(tri);
    let snapped = Snapped::new(geom, &tri);
    let h = diameter(&tri);
    let inside = tri.map(|v| snapped.inside(v));
    let n_inside = inside.iter().filter(|&&s| s).count();
    if n_inside == 0 || n_inside == 3 {
        // Only an edge dip crosses this element; there is no sign change to
        // reconstruct a segment from.
        let snap_to = if n_inside == 3 { Location::Inside } else { Location::Outside };
        return Err(GeometryError::DegenerateCut { element: element_id, snap_to });
    }

    let mut polygon = Vec::with_capacity(4);
    let mut exit = None;
    let mut entry = None;
    for i in 0..3 {
        let (p, q) = (tri[i], tri[(i + 1) % 3]);
        if inside[i] {
            polygon.push(p);
        }
        if inside[i] != inside[(i + 1) % 3] {
            let x = snapped.crossing(p, q);
            polygon.push(x);
            if inside[i] {
                exit = Some(x);
            } else {
                entry = Some(x);
            }
        }
    }
    let (exit, entry) = (exit.expect("sign change"), entry.expect("sign change"));

    let area = polygon_area(&polygon);
    let full = triangle_area(&tri);
    let snap_to = if area >= 0.5 * full { Location::Inside } else { Location::Outside };
    let length = (entry - exit).norm();
    if length < SNAP * h || area <= 0.0 || area >= full {
        return Err(GeometryError::DegenerateCut { element: element_id, snap_to });
    }

    let t = entry - exit;
    let mut normal = Point::new(t.y, -t.x) / length;
    let mid = 0.5 * (exit + entry);
    if normal.dot(&geom.gradient(mid)) < 0.0 {
        normal = -normal;
    }
    Ok(CutGeometry {
        element_id,
        polygon,
        boundary_segment: Some([exit, entry]),
        segment_normal: normal,
        volume_fraction: area / full,
    })
}

/// Quadrature over the clipped polygon of `cg`.
pub fn cut_volume_quadrature(cg: &CutGeometry, order: usize) -> Result<QuadratureRule, GeometryError> {
    polygon_quadrature(&cg.polygon, order)
}

/// Gauss-Legendre quadrature on a boundary segment; weights carry arclength.
pub fn boundary_quadrature(segment: &[Point; 2], order: usize) -> Result<QuadratureRule, GeometryError> {
    segment_quadrature(segment[0], segment[1], order)
}
