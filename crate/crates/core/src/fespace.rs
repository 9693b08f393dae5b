//! Degrees of freedom and bases for the lowest-order triple: Raviart–Thomas
//! velocities, piecewise constant pressures and discontinuous piecewise
//! linear multipliers on the cut elements.

use nalgebra::Matrix2;

use crate::geometry::{segment_quadrature, GeometryError, Point};
use crate::mesh::ActiveMesh;

/// Gauss order used for face-flux degrees of freedom.
pub const FACE_FLUX_ORDER: usize = 5;
/// Triangle rule order used by the full-element pressure projection.
pub const PROJECTION_ORDER: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Block {
    Velocity,
    Pressure,
    Multiplier,
    Mean,
}

/// Polynomial degree of the multiplier space on each cut element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MultiplierDegree {
    Constant,
    Linear,
}

impl MultiplierDegree {
    pub fn dofs_per_element(self) -> usize {
        match self {
            MultiplierDegree::Constant => 1,
            MultiplierDegree::Linear => 3,
        }
    }

    pub fn as_int(self) -> usize {
        match self {
            MultiplierDegree::Constant => 0,
            MultiplierDegree::Linear => 1,
        }
    }
}

/// Global numbering `[velocity | pressure | multiplier | mean]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofLayout {
    pub n_velocity: usize,
    pub n_pressure: usize,
    pub n_multiplier: usize,
    pub n_mean: usize,
    pub multiplier_degree: MultiplierDegree,
}

impl DofLayout {
    /// Layout for the Lagrange-multiplier method.
    pub fn new(mesh: &ActiveMesh, multiplier_degree: MultiplierDegree, mean_constraint: bool) -> Self {
        DofLayout {
            n_velocity: mesh.n_faces(),
            n_pressure: mesh.n_elements(),
            n_multiplier: multiplier_degree.dofs_per_element() * mesh.n_cut(),
            n_mean: usize::from(mean_constraint),
            multiplier_degree,
        }
    }

    /// Layout without multiplier unknowns (penalty method, fitted meshes).
    pub fn without_multiplier(mesh: &ActiveMesh, mean_constraint: bool) -> Self {
        DofLayout { n_multiplier: 0, ..DofLayout::new(mesh, MultiplierDegree::Linear, mean_constraint) }
    }

    pub fn total(&self) -> usize {
        self.n_velocity + self.n_pressure + self.n_multiplier + self.n_mean
    }

    pub fn offset(&self, block: Block) -> usize {
        match block {
            Block::Velocity => 0,
            Block::Pressure => self.n_velocity,
            Block::Multiplier => self.n_velocity + self.n_pressure,
            Block::Mean => self.n_velocity + self.n_pressure + self.n_multiplier,
        }
    }

    pub fn len(&self, block: Block) -> usize {
        match block {
            Block::Velocity => self.n_velocity,
            Block::Pressure => self.n_pressure,
            Block::Multiplier => self.n_multiplier,
            Block::Mean => self.n_mean,
        }
    }

    /// Multiplier unknowns of cut `c`, block-local.
    pub fn multiplier_dofs(&self, c: usize) -> std::ops::Range<usize> {
        let k = self.multiplier_degree.dofs_per_element();
        k * c..k * (c + 1)
    }

    /// Splits a global vector into its block.
    pub fn extract(&self, block: Block, x: &[f64]) -> FeFunction {
        let o = self.offset(block);
        FeFunction { block, coeffs: x[o..o + self.len(block)].to_vec() }
    }
}

/// Coefficients of one block of the discrete solution.
#[derive(Clone, Debug, PartialEq)]
pub struct FeFunction {
    pub block: Block,
    pub coeffs: Vec<f64>,
}

impl FeFunction {
    pub fn zeros(block: Block, n: usize) -> Self {
        FeFunction { block, coeffs: vec![0.0; n] }
    }
}

/// Lowest-order Raviart–Thomas basis on one triangle.
///
/// `psi_k(x) = s_k (x - P_k) / (2|T|)` where `P_k` is the vertex opposite
/// face `k` and `s_k` the orientation of the global face normal. The
/// flux of `psi_k` through face `j` along the global normal is `δ_kj`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rt0Element {
    pub vertices: [Point; 3],
    pub area: f64,
    pub signs: [f64; 3],
    /// Block-local velocity unknowns of the three faces.
    pub dofs: [usize; 3],
}

impl Rt0Element {
    pub fn new(mesh: &ActiveMesh, a: usize) -> Self {
        let t = mesh.elements[a];
        let bg = &mesh.background;
        let faces = bg.element_faces[t];
        Rt0Element {
            vertices: bg.triangle(t),
            area: bg.area(t),
            signs: bg.face_signs[t],
            dofs: faces.map(|f| mesh.face_dof(f).expect("face of an active element")),
        }
    }

    /// Basis values at `x`; `x` may lie outside the element (canonical extension).
    pub fn values(&self, x: Point) -> [Point; 3] {
        let scale = 0.5 / self.area;
        [0, 1, 2].map(|k| (x - self.vertices[k]) * (self.signs[k] * scale))
    }

    pub fn divergences(&self) -> [f64; 3] {
        self.signs.map(|s| s / self.area)
    }

    /// Coefficient `b_k` in `psi_k(x) = a_k + b_k x`.
    pub fn slopes(&self) -> [f64; 3] {
        self.signs.map(|s| 0.5 * s / self.area)
    }

    pub fn eval(&self, coeffs: &[f64], x: Point) -> Point {
        let v = self.values(x);
        (0..3).fold(Point::zeros(), |acc, k| acc + v[k] * coeffs[self.dofs[k]])
    }

    pub fn divergence(&self, coeffs: &[f64]) -> f64 {
        let d = self.divergences();
        (0..3).map(|k| d[k] * coeffs[self.dofs[k]]).sum()
    }
}

/// `rt0_basis`: values and divergences of the three basis functions of
/// active element `a` at `x`.
pub fn rt0_basis(mesh: &ActiveMesh, a: usize, x: Point) -> ([Point; 3], [f64; 3]) {
    let el = Rt0Element::new(mesh, a);
    (el.values(x), el.divergences())
}

/// Barycentric (vertex-value) linear basis on a physical triangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct P1Element {
    pub vertices: [Point; 3],
    pub gradients: [Point; 3],
}

impl P1Element {
    pub fn new(vertices: [Point; 3]) -> Self {
        let e1 = vertices[1] - vertices[0];
        let e2 = vertices[2] - vertices[0];
        let jac = Matrix2::new(e1.x, e2.x, e1.y, e2.y);
        let inv_t = jac.try_inverse().expect("non-degenerate triangle").transpose();
        let g1 = inv_t * Point::new(1.0, 0.0);
        let g2 = inv_t * Point::new(0.0, 1.0);
        P1Element { vertices, gradients: [-g1 - g2, g1, g2] }
    }

    pub fn values(&self, x: Point) -> [f64; 3] {
        let d = x - self.vertices[0];
        let l1 = self.gradients[1].dot(&d);
        let l2 = self.gradients[2].dot(&d);
        [1.0 - l1 - l2, l1, l2]
    }
}

/// Multiplier basis of one cut element for the chosen degree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MultiplierElement {
    Constant,
    Linear(P1Element),
}

impl MultiplierElement {
    pub fn new(mesh: &ActiveMesh, c: usize, degree: MultiplierDegree) -> Self {
        match degree {
            MultiplierDegree::Constant => MultiplierElement::Constant,
            MultiplierDegree::Linear => {
                MultiplierElement::Linear(P1Element::new(mesh.triangle(mesh.cut_element(c))))
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            MultiplierElement::Constant => 1,
            MultiplierElement::Linear(_) => 3,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self, x: Point) -> Vec<f64> {
        match self {
            MultiplierElement::Constant => vec![1.0],
            MultiplierElement::Linear(p1) => p1.values(x).to_vec(),
        }
    }

    pub fn gradients(&self) -> Vec<Point> {
        match self {
            MultiplierElement::Constant => vec![Point::zeros()],
            MultiplierElement::Linear(p1) => p1.gradients.to_vec(),
        }
    }
}

/// Face-flux interpolant `π_h v`: one unknown `∫_F v·n_F ds` per active face.
pub fn interpolate_velocity(mesh: &ActiveMesh, v: impl Fn(Point) -> Point) -> Result<FeFunction, GeometryError> {
    let bg = &mesh.background;
    let mut coeffs = Vec::with_capacity(mesh.n_faces());
    for &f in &mesh.faces {
        let [a, b] = bg.face_points(f);
        let n = bg.faces[f].normal;
        let rule = segment_quadrature(a, b, FACE_FLUX_ORDER)?;
        coeffs.push(rule.integrate(|x| v(x).dot(&n)));
    }
    Ok(FeFunction { block: Block::Velocity, coeffs })
}

/// `Π_h g`: element means over the full active elements.
pub fn project_pressure(mesh: &ActiveMesh, g: impl Fn(Point) -> f64) -> Result<FeFunction, GeometryError> {
    let coeffs = (0..mesh.n_elements())
        .map(|a| {
            let rule = mesh.element_quadrature(a, PROJECTION_ORDER)?;
            Ok(rule.integrate(&g) / rule.measure())
        })
        .collect::<Result<Vec<_>, GeometryError>>()?;
    Ok(FeFunction { block: Block::Pressure, coeffs })
}

/// Values of `fe` restricted to active element `a` (or, for multipliers, to
/// the active element of cut `a`) at `points`. Vector fields come back as
/// pairs; scalar fields leave the second component zero.
pub fn evaluate(mesh: &ActiveMesh, layout: &DofLayout, fe: &FeFunction, a: usize, points: &[Point]) -> Vec<Point> {
    match fe.block {
        Block::Velocity => {
            let el = Rt0Element::new(mesh, a);
            points.iter().map(|&x| el.eval(&fe.coeffs, x)).collect()
        }
        Block::Pressure => points.iter().map(|_| Point::new(fe.coeffs[a], 0.0)).collect(),
        Block::Multiplier => {
            let el = MultiplierElement::new(mesh, a, layout.multiplier_degree);
            let dofs = layout.multiplier_dofs(a);
            points
                .iter()
                .map(|&x| {
                    let v: f64 = el.values(x).iter().zip(&fe.coeffs[dofs.clone()]).map(|(b, c)| b * c).sum();
                    Point::new(v, 0.0)
                })
                .collect()
        }
        Block::Mean => points.iter().map(|_| Point::new(fe.coeffs[0], 0.0)).collect(),
    }
}

/// Elementwise divergence of a velocity function.
pub fn divergence(mesh: &ActiveMesh, fe: &FeFunction) -> Vec<f64> {
    (0..mesh.n_elements()).map(|a| Rt0Element::new(mesh, a).divergence(&fe.coeffs)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{LevelSet, triangle_quadrature};
    use crate::mesh::{build_background_mesh, extract_active_mesh, Rect};

    fn full_mesh(n: usize) -> ActiveMesh {
        extract_active_mesh(build_background_mesh(n, n, Rect::unit()).unwrap(), &LevelSet::everywhere(), &[]).unwrap()
    }

    #[test]
    fn basis_is_dual_to_face_fluxes() {
        let mesh = full_mesh(3);
        let bg = &mesh.background;
        for a in 0..mesh.n_elements() {
            let el = Rt0Element::new(&mesh, a);
            let t = mesh.elements[a];
            for (j, &f) in bg.element_faces[t].iter().enumerate() {
                let [p, q] = bg.face_points(f);
                let rule = segment_quadrature(p, q, 3).unwrap();
                for k in 0..3 {
                    let flux = rule.integrate(|x| el.values(x)[k].dot(&bg.faces[f].normal));
                    let expected = if j == k { 1.0 } else { 0.0 };
                    assert!((flux - expected).abs() < 1e-13, "element {a} face {j} basis {k}: {flux}");
                }
            }
        }
    }

    #[test]
    fn rt0_reproduces_affine_radial_field() {
        let mesh = full_mesh(2);
        let x0 = Point::new(0.3, -0.2);
        let v = |x: Point| x - x0;
        let fe = interpolate_velocity(&mesh, v).unwrap();
        for a in 0..mesh.n_elements() {
            let el = Rt0Element::new(&mesh, a);
            let tri = mesh.triangle(a);
            for (l0, l1) in [(0.2, 0.3), (0.6, 0.1), (0.25, 0.5)] {
                let x = tri[0] * l0 + tri[1] * l1 + tri[2] * (1.0 - l0 - l1);
                assert!((el.eval(&fe.coeffs, x) - v(x)).norm() < 1e-12);
            }
            assert!((el.divergence(&fe.coeffs) - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constants_are_reproduced_and_rotations_are_solenoidal() {
        let mesh = full_mesh(4);
        let fe = interpolate_velocity(&mesh, |_| Point::new(1.0, 0.0)).unwrap();
        for a in 0..mesh.n_elements() {
            let el = Rt0Element::new(&mesh, a);
            let c = mesh.triangle(a).iter().fold(Point::zeros(), |s, p| s + p) / 3.0;
            assert!((el.eval(&fe.coeffs, c) - Point::new(1.0, 0.0)).norm() < 1e-13);
        }
        let rot = interpolate_velocity(&mesh, |x| Point::new(x.y, -x.x)).unwrap();
        assert!(divergence(&mesh, &rot).iter().all(|d| d.abs() < 1e-12));
    }

    #[test]
    fn projection_of_linear_is_centroid_value() {
        let mesh = full_mesh(1);
        let fe = project_pressure(&mesh, |x| x.x).unwrap();
        for a in 0..mesh.n_elements() {
            let c = mesh.triangle(a).iter().fold(Point::zeros(), |s, p| s + p) / 3.0;
            assert!((fe.coeffs[a] - c.x).abs() < 1e-15);
        }
        let constant = project_pressure(&mesh, |_| 2.5).unwrap();
        assert!(constant.coeffs.iter().all(|&c| (c - 2.5).abs() < 1e-15));
    }

    #[test]
    fn commuting_identity_for_quadratic_field() {
        let mesh = full_mesh(5);
        let fe = interpolate_velocity(&mesh, |x| Point::new(x.x * x.x, 0.0)).unwrap();
        let proj = project_pressure(&mesh, |x| 2.0 * x.x).unwrap();
        for (d, p) in divergence(&mesh, &fe).iter().zip(&proj.coeffs) {
            assert!((d - p).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_flux_evaluated_at_face_midpoint() {
        let mesh = full_mesh(1);
        let bg = &mesh.background;
        let el = Rt0Element::new(&mesh, 0);
        let f = bg.element_faces[mesh.elements[0]][0];
        let [p, q] = bg.face_points(f);
        let mut coeffs = vec![0.0; mesh.n_faces()];
        coeffs[mesh.face_dof(f).unwrap()] = 1.0;
        let v = el.eval(&coeffs, 0.5 * (p + q));
        assert!((v.dot(&bg.faces[f].normal) - 1.0 / bg.faces[f].length).abs() < 1e-14);
        assert_eq!(el.eval(&vec![0.0; mesh.n_faces()], p), Point::zeros());
    }

    #[test]
    fn p1_basis_is_barycentric() {
        let tri = [Point::new(0.1, 0.2), Point::new(1.3, 0.4), Point::new(0.5, 1.7)];
        let el = P1Element::new(tri);
        let c = (tri[0] + tri[1] + tri[2]) / 3.0;
        for v in el.values(c) {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        for (i, &p) in tri.iter().enumerate() {
            let vals = el.values(p);
            for (j, v) in vals.iter().enumerate() {
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        let g = el.gradients.iter().fold(Point::zeros(), |s, p| s + p);
        assert!(g.norm() < 1e-14);
        let rule = triangle_quadrature(&tri, 2).unwrap();
        assert!((rule.integrate(|x| el.values(x)[0]) - rule.measure() / 3.0).abs() < 1e-14);
    }
}
