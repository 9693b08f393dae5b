//! Macroelement partitions: every small cut element is attached to a large
//! element through a chain of faces, and the ghost penalties can be
//! restricted to faces inside a macroelement.

use thiserror::Error;

use crate::fespace::{evaluate, DofLayout, FeFunction};
use crate::geometry::Point;
use crate::mesh::ActiveMesh;

/// Default volume-fraction threshold for large elements.
pub const DEFAULT_DELTA: f64 = 0.3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MacroError {
    #[error("small element {element} cannot reach a large element through stabilization faces")]
    OrphanSmallElement { element: usize },
    #[error("volume-fraction threshold {0} is outside (0, 1]")]
    InvalidThreshold(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MacroPartition {
    pub delta: f64,
    /// Large active elements; each roots one macroelement.
    pub roots: Vec<usize>,
    /// Root of every active element.
    pub assignment: Vec<usize>,
    /// Face-path distance from each active element to its root.
    pub distance: Vec<usize>,
    /// Stabilization faces whose two elements share a root (background ids).
    pub macro_faces: Vec<usize>,
}

impl MacroPartition {
    pub fn is_large(&self, a: usize) -> bool {
        self.assignment[a] == a
    }

    /// Active elements of the macroelement rooted at `root`.
    pub fn members(&self, root: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&a| self.assignment[a] == root).collect()
    }
}

/// Elements with `|T ∩ Ω| ≥ δ |T|`; uncut active elements are always large.
pub fn classify_large(mesh: &ActiveMesh, delta: f64) -> Vec<bool> {
    (0..mesh.n_elements()).map(|a| mesh.volume_fraction(a) >= delta).collect()
}

/// Attaches small elements round by round: in each round a small element
/// joins a neighbour that was assigned before the round started, preferring
/// the shortest path to a root, then the largest volume fraction, then the
/// lowest index.
pub fn build_macro_partition(mesh: &ActiveMesh, delta: f64) -> Result<MacroPartition, MacroError> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(MacroError::InvalidThreshold(delta));
    }
    let n = mesh.n_elements();
    let large = classify_large(mesh, delta);
    let stab_faces = mesh.stabilization_faces();
    let mut neighbours = vec![Vec::new(); n];
    for &f in &stab_faces {
        if let Some((a, b)) = mesh.face_elements(f) {
            neighbours[a].push(b);
            neighbours[b].push(a);
        }
    }

    let mut assignment: Vec<Option<usize>> = (0..n).map(|a| large[a].then_some(a)).collect();
    let mut distance = vec![0; n];
    let mut pending: Vec<usize> = (0..n).filter(|&a| !large[a]).collect();
    while !pending.is_empty() {
        let mut updates = Vec::new();
        let mut still = Vec::new();
        for &a in &pending {
            let best = neighbours[a]
                .iter()
                .copied()
                .filter(|&b| assignment[b].is_some())
                .min_by(|&b, &c| {
                    distance[b]
                        .cmp(&distance[c])
                        .then(mesh.volume_fraction(c).total_cmp(&mesh.volume_fraction(b)))
                        .then(b.cmp(&c))
                });
            match best {
                Some(b) => updates.push((a, b)),
                None => still.push(a),
            }
        }
        if updates.is_empty() {
            return Err(MacroError::OrphanSmallElement { element: mesh.elements[still[0]] });
        }
        for (a, b) in updates {
            assignment[a] = assignment[b];
            distance[a] = distance[b] + 1;
        }
        pending = still;
    }
    let assignment: Vec<usize> = assignment.into_iter().map(|r| r.expect("all assigned")).collect();
    let roots = (0..n).filter(|&a| large[a]).collect();
    let macro_faces = stab_faces
        .into_iter()
        .filter(|&f| mesh.face_elements(f).is_some_and(|(a, b)| assignment[a] == assignment[b]))
        .collect();
    Ok(MacroPartition { delta, roots, assignment, distance, macro_faces })
}

/// Evaluates the polynomial of `fe` on active element `from` at arbitrary points.
pub fn extend_polynomial(
    mesh: &ActiveMesh,
    layout: &DofLayout,
    fe: &FeFunction,
    from: usize,
    points: &[Point],
) -> Vec<Point> {
    evaluate(mesh, layout, fe, from, points)
}
