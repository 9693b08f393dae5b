//! Structured background triangulation and the active mesh cut out of it.

use std::collections::HashMap;

use thiserror::Error;

use crate::geometry::{
    classify_element, clip_element, edge_meets_domain, triangle_quadrature, cut_volume_quadrature, CutGeometry,
    GeometryError, LevelSet, Location, Point, QuadratureRule,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("grid resolution must be at least 1x1, got {nx}x{ny}")]
    InvalidResolution { nx: usize, ny: usize },
    #[error("no background element intersects the domain")]
    EmptyActiveMesh,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Axis-aligned rectangle `[min.x, max.x] x [min.y, max.y]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { min: Point::new(x0, y0), max: Point::new(x1, y1) }
    }

    pub fn unit() -> Self {
        Rect::new(0.0, 0.0, 1.0, 1.0)
    }
}

/// Side of the background box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];
}

#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    pub vertices: [usize; 2],
    pub owner: usize,
    pub neighbor: Option<usize>,
    /// Unit normal pointing from `owner` to `neighbor`, outward on the box boundary.
    pub normal: Point,
    pub length: f64,
    /// Box side carrying this face, for faces on the background boundary.
    pub side: Option<Side>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BackgroundMesh {
    pub vertices: Vec<Point>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub faces: Vec<Face>,
    /// `element_faces[t][k]` is the face opposite local vertex `k`.
    pub element_faces: Vec<[usize; 3]>,
    /// +1 where the global face normal is outward for the element, -1 otherwise.
    pub face_signs: Vec<[f64; 3]>,
    pub h_max: f64,
    pub bbox: Rect,
    pub nx: usize,
    pub ny: usize,
}

/// Splits each cell of an `nx` by `ny` grid of `bbox` along its
/// lower-left to upper-right diagonal.
pub fn build_background_mesh(nx: usize, ny: usize, bbox: Rect) -> Result<BackgroundMesh, MeshError> {
    if nx == 0 || ny == 0 {
        return Err(MeshError::InvalidResolution { nx, ny });
    }
    let dx = (bbox.max.x - bbox.min.x) / nx as f64;
    let dy = (bbox.max.y - bbox.min.y) / ny as f64;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            // Pin the last row/column to the box so boundary tests are exact.
            let x = if i == nx { bbox.max.x } else { bbox.min.x + i as f64 * dx };
            let y = if j == ny { bbox.max.y } else { bbox.min.y + j as f64 * dy };
            vertices.push(Point::new(x, y));
        }
    }
    let vid = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (ll, lr, ur, ul) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
            triangles.push([ll, lr, ur]);
            triangles.push([ll, ur, ul]);
        }
    }

    let mut faces: Vec<Face> = Vec::new();
    let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
    let mut element_faces = Vec::with_capacity(triangles.len());
    let mut face_signs = Vec::with_capacity(triangles.len());
    for (t, tri) in triangles.iter().enumerate() {
        let mut local = [0usize; 3];
        let mut signs = [0.0; 3];
        for k in 0..3 {
            let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
            let key = (a.min(b), a.max(b));
            if let Some(&f) = lookup.get(&key) {
                faces[f].neighbor = Some(t);
                local[k] = f;
                signs[k] = -1.0;
            } else {
                let e = vertices[b] - vertices[a];
                let length = e.norm();
                // Outward for a counterclockwise triangle.
                let normal = Point::new(e.y, -e.x) / length;
                lookup.insert(key, faces.len());
                local[k] = faces.len();
                signs[k] = 1.0;
                faces.push(Face { vertices: [a, b], owner: t, neighbor: None, normal, length, side: None });
            }
        }
        element_faces.push(local);
        face_signs.push(signs);
    }
    for face in faces.iter_mut().filter(|f| f.neighbor.is_none()) {
        let [a, b] = face.vertices.map(|v| vertices[v]);
        face.side = if a.x == bbox.min.x && b.x == bbox.min.x {
            Some(Side::Left)
        } else if a.x == bbox.max.x && b.x == bbox.max.x {
            Some(Side::Right)
        } else if a.y == bbox.min.y && b.y == bbox.min.y {
            Some(Side::Bottom)
        } else {
            Some(Side::Top)
        };
    }

    Ok(BackgroundMesh {
        vertices,
        triangles,
        faces,
        element_faces,
        face_signs,
        h_max: (dx * dx + dy * dy).sqrt(),
        bbox,
        nx,
        ny,
    })
}

impl BackgroundMesh {
    pub fn triangle(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    pub fn face_points(&self, f: usize) -> [Point; 2] {
        self.faces[f].vertices.map(|v| self.vertices[v])
    }

    pub fn area(&self, t: usize) -> f64 {
        crate::geometry::triangle_area(&self.triangle(t))
    }

    /// Local index of face `f` in element `t`.
    pub fn local_face(&self, t: usize, f: usize) -> Option<usize> {
        self.element_faces[t].iter().position(|&g| g == f)
    }
}

/// The elements of a background mesh that meet the domain, together with
/// their cut geometry and the face sets used by the stabilization terms.
#[derive(Clone, Debug)]
pub struct ActiveMesh {
    pub background: BackgroundMesh,
    pub geometry: LevelSet,
    /// Snapped classification of every background element.
    pub classification: Vec<Location>,
    /// Active background elements in ascending order.
    pub elements: Vec<usize>,
    element_index: Vec<Option<usize>>,
    /// Cut geometry of the active elements in `T_Σ`, ascending.
    pub cuts: Vec<CutGeometry>,
    cut_index: Vec<Option<usize>>,
    /// Faces of active elements (background ids, ascending); one velocity unknown each.
    pub faces: Vec<usize>,
    face_index: Vec<Option<usize>>,
    /// Faces of cut elements with a part of positive length inside the domain.
    pub sigma_faces: Vec<usize>,
    /// Faces shared by two cut elements.
    pub sigma_interior_faces: Vec<usize>,
    /// Background-box faces carrying a fitted part of the boundary.
    pub fitted_boundary_faces: Vec<usize>,
}

/// Builds the active mesh. Faces of `fitted` box sides that meet the
/// domain are collected as fitted boundary faces.
pub fn extract_active_mesh(
    background: BackgroundMesh,
    geometry: &LevelSet,
    fitted: &[Side],
) -> Result<ActiveMesh, MeshError> {
    let n = background.triangles.len();
    let mut classification = Vec::with_capacity(n);
    let mut cut_geometry: Vec<Option<CutGeometry>> = vec![None; n];
    for t in 0..n {
        let tri = background.triangle(t);
        let mut loc = classify_element(&tri, geometry);
        if loc == Location::Cut {
            match clip_element(t, &tri, geometry) {
                Ok(cg) => cut_geometry[t] = Some(cg),
                Err(GeometryError::DegenerateCut { snap_to, .. }) => loc = snap_to,
                Err(e) => return Err(e.into()),
            }
        }
        classification.push(loc);
    }

    let elements: Vec<usize> = (0..n).filter(|&t| classification[t] != Location::Outside).collect();
    if elements.is_empty() {
        return Err(MeshError::EmptyActiveMesh);
    }
    let mut element_index = vec![None; n];
    for (a, &t) in elements.iter().enumerate() {
        element_index[t] = Some(a);
    }
    let mut cuts = Vec::new();
    let mut cut_index = vec![None; elements.len()];
    for (a, &t) in elements.iter().enumerate() {
        if let Some(cg) = cut_geometry[t].take() {
            cut_index[a] = Some(cuts.len());
            cuts.push(cg);
        }
    }

    let nf = background.faces.len();
    let mut face_index = vec![None; nf];
    let mut faces = Vec::new();
    for f in 0..nf {
        let face = &background.faces[f];
        let active = element_index[face.owner].is_some() || face.neighbor.is_some_and(|t| element_index[t].is_some());
        if active {
            face_index[f] = Some(faces.len());
            faces.push(f);
        }
    }

    let is_cut = |t: usize| classification[t] == Location::Cut;
    let h = background.h_max;
    let meets = |f: usize| {
        let [a, b] = background.face_points(f);
        edge_meets_domain(a, b, h, geometry)
    };
    let mut sigma_faces = Vec::new();
    let mut sigma_interior_faces = Vec::new();
    let mut fitted_boundary_faces = Vec::new();
    for &f in &faces {
        let face = &background.faces[f];
        let owner_cut = is_cut(face.owner);
        let neighbor_cut = face.neighbor.is_some_and(is_cut);
        if (owner_cut || neighbor_cut) && meets(f) {
            sigma_faces.push(f);
        }
        if owner_cut && neighbor_cut {
            sigma_interior_faces.push(f);
        }
        if face.side.is_some_and(|s| fitted.contains(&s)) && meets(f) {
            fitted_boundary_faces.push(f);
        }
    }

    Ok(ActiveMesh {
        background,
        geometry: geometry.clone(),
        classification,
        elements,
        element_index,
        cuts,
        cut_index,
        faces,
        face_index,
        sigma_faces,
        sigma_interior_faces,
        fitted_boundary_faces,
    })
}

impl ActiveMesh {
    pub fn h(&self) -> f64 {
        self.background.h_max
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn n_cut(&self) -> usize {
        self.cuts.len()
    }

    /// Active index of a background element.
    pub fn active_index(&self, t: usize) -> Option<usize> {
        self.element_index[t]
    }

    /// Velocity unknown of a background face.
    pub fn face_dof(&self, f: usize) -> Option<usize> {
        self.face_index[f]
    }

    /// Cut index of an active element.
    pub fn cut_of(&self, a: usize) -> Option<usize> {
        self.cut_index[a]
    }

    pub fn cut(&self, a: usize) -> Option<&CutGeometry> {
        self.cut_index[a].map(|c| &self.cuts[c])
    }

    /// Active element of a cut.
    pub fn cut_element(&self, c: usize) -> usize {
        self.element_index[self.cuts[c].element_id].expect("cut element is active")
    }

    pub fn triangle(&self, a: usize) -> [Point; 3] {
        self.background.triangle(self.elements[a])
    }

    /// Active elements on both sides of a face, when both are active.
    pub fn face_elements(&self, f: usize) -> Option<(usize, usize)> {
        let face = &self.background.faces[f];
        let owner = self.element_index[face.owner]?;
        let neighbor = self.element_index[face.neighbor?]?;
        Some((owner, neighbor))
    }

    /// Faces used by the velocity and divergence ghost penalties: faces of
    /// cut elements meeting the domain with both neighbours active.
    pub fn stabilization_faces(&self) -> Vec<usize> {
        self.sigma_faces.iter().copied().filter(|&f| self.face_elements(f).is_some()).collect()
    }

    /// Quadrature over `T ∩ Ω` for active element `a`.
    pub fn domain_quadrature(&self, a: usize, order: usize) -> Result<QuadratureRule, GeometryError> {
        match self.cut(a) {
            Some(cg) => cut_volume_quadrature(cg, order),
            None => triangle_quadrature(&self.triangle(a), order),
        }
    }

    /// Quadrature over the whole element `a`.
    pub fn element_quadrature(&self, a: usize, order: usize) -> Result<QuadratureRule, GeometryError> {
        triangle_quadrature(&self.triangle(a), order)
    }

    /// `|T ∩ Ω| / |T|` for active element `a`.
    pub fn volume_fraction(&self, a: usize) -> f64 {
        self.cut(a).map_or(1.0, |cg| cg.volume_fraction)
    }

    /// Active faces on a side of the background box that meet the domain.
    pub fn box_faces(&self, side: Side) -> Vec<usize> {
        let h = self.h();
        self.faces
            .iter()
            .copied()
            .filter(|&f| self.background.faces[f].side == Some(side))
            .filter(|&f| {
                let [a, b] = self.background.face_points(f);
                edge_meets_domain(a, b, h, &self.geometry)
            })
            .collect()
    }

    /// Area of the reconstructed domain.
    pub fn domain_area(&self) -> f64 {
        (0..self.n_elements())
            .map(|a| self.cut(a).map_or_else(|| self.background.area(self.elements[a]), |cg| cg.area()))
            .sum()
    }

    /// Length of the reconstructed boundary.
    pub fn boundary_length(&self) -> f64 {
        self.cuts.iter().map(CutGeometry::segment_length).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Axis;

    #[test]
    fn one_cell_has_two_triangles_and_five_faces() {
        let m = build_background_mesh(1, 1, Rect::unit()).unwrap();
        assert_eq!(m.triangles.len(), 2);
        assert_eq!(m.faces.len(), 5);
    }

    #[test]
    fn two_by_two_satisfies_euler() {
        let m = build_background_mesh(2, 2, Rect::unit()).unwrap();
        assert_eq!(m.triangles.len(), 8);
        assert_eq!(m.faces.len(), 16);
        assert_eq!(m.vertices.len() as i64 - m.faces.len() as i64 + m.triangles.len() as i64, 1);
    }

    #[test]
    fn h_max_is_cell_diagonal() {
        let m = build_background_mesh(10, 10, Rect::unit()).unwrap();
        assert!((m.h_max - 2f64.sqrt() / 10.0).abs() < 1e-15);
    }

    #[test]
    fn zero_resolution_is_rejected() {
        assert!(matches!(build_background_mesh(0, 3, Rect::unit()), Err(MeshError::InvalidResolution { .. })));
    }

    #[test]
    fn face_normals_point_from_owner_to_neighbor() {
        let m = build_background_mesh(3, 2, Rect::unit()).unwrap();
        let centroid = |t: usize| m.triangle(t).iter().fold(Point::zeros(), |a, p| a + p) / 3.0;
        for (f, face) in m.faces.iter().enumerate() {
            let [a, _] = m.face_points(f);
            assert!((centroid(face.owner) - a).dot(&face.normal) < 0.0);
            if let Some(nb) = face.neighbor {
                assert!((centroid(nb) - a).dot(&face.normal) > 0.0);
            } else {
                assert!(face.side.is_some());
            }
        }
        for t in 0..m.triangles.len() {
            assert!(m.area(t) > 0.0);
        }
    }

    #[test]
    fn interior_faces_have_opposite_signs() {
        let m = build_background_mesh(4, 3, Rect::unit()).unwrap();
        let mut seen = vec![Vec::new(); m.faces.len()];
        for t in 0..m.triangles.len() {
            for k in 0..3 {
                seen[m.element_faces[t][k]].push(m.face_signs[t][k]);
            }
        }
        for (f, signs) in seen.iter().enumerate() {
            if m.faces[f].neighbor.is_some() {
                assert_eq!(signs.len(), 2);
                assert_eq!(signs[0] + signs[1], 0.0);
            } else {
                assert_eq!(signs, &vec![1.0]);
            }
        }
    }

    #[test]
    fn everywhere_inside_has_no_cuts() {
        let m = build_background_mesh(4, 4, Rect::unit()).unwrap();
        let am = extract_active_mesh(m, &LevelSet::everywhere(), &[]).unwrap();
        assert_eq!(am.n_elements(), 32);
        assert_eq!(am.n_cut(), 0);
        assert!(am.sigma_faces.is_empty());
    }

    #[test]
    fn nothing_inside_is_an_error() {
        let m = build_background_mesh(4, 4, Rect::unit()).unwrap();
        let geom = LevelSet::circle(Point::new(5.0, 5.0), 0.1);
        assert!(matches!(extract_active_mesh(m, &geom, &[]), Err(MeshError::EmptyActiveMesh)));
    }

    #[test]
    fn unfitted_top_row_is_cut_with_upward_normals() {
        let (nx, ny, theta) = (10, 6, 0.3);
        let dy = 0.5 / (ny as f64 - 1.0 + theta);
        let m = build_background_mesh(nx, ny, Rect::new(0.0, 0.0, 1.0, ny as f64 * dy)).unwrap();
        let am = extract_active_mesh(m, &LevelSet::half_plane(Axis::Y, 0.5), &[Side::Left, Side::Right, Side::Bottom])
            .unwrap();
        assert_eq!(am.n_cut(), 2 * nx);
        for cg in &am.cuts {
            assert!(cg.element_id >= 2 * nx * (ny - 1));
            assert!((cg.segment_normal - Point::new(0.0, 1.0)).norm() < 1e-15);
        }
        assert_eq!(am.n_elements(), 2 * nx * ny);
        assert!((am.domain_area() - 0.5).abs() < 1e-14);
        // Bottom (nx) plus both sides (ny each), the top-row sides included.
        assert_eq!(am.fitted_boundary_faces.len(), nx + 2 * ny);
    }
}
