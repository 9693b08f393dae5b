use crate::fespace::{DofLayout, MultiplierDegree, MultiplierElement, Rt0Element};
use crate::geometry::{boundary_quadrature, segment_quadrature, Point};
use crate::linalg::{SparseMatrix, Triplets};
use crate::macroelement::{build_macro_partition, MacroPartition};
use crate::mesh::ActiveMesh;

use super::{
    AssemblyError, FaceSelection, Method, MultiplierStab, NormalSource, ProblemData, QuadratureOrders,
    StabilizationConfig, StabilizationForm,
};

/// Rule order for products of two affine functions.
const PRODUCT_ORDER: usize = 2;

/// Merges repeated unknowns of a local element pair: returns the distinct
/// unknowns and, for every local slot, its position in that list.
fn merge_dofs(dofs: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut unique: Vec<usize> = Vec::with_capacity(dofs.len());
    let slot = dofs
        .iter()
        .map(|d| match unique.iter().position(|u| u == d) {
            Some(k) => k,
            None => {
                unique.push(*d);
                unique.len() - 1
            }
        })
        .collect();
    (unique, slot)
}

fn gram<T>(rows: &[Vec<T>], weights: &[f64], dot: impl Fn(&T, &T) -> f64) -> Vec<Vec<f64>> {
    let n = rows.first().map_or(0, Vec::len);
    let mut k = vec![vec![0.0; n]; n];
    for (row, w) in rows.iter().zip(weights) {
        for i in 0..n {
            for j in i..n {
                k[i][j] += w * dot(&row[i], &row[j]);
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            k[i][j] = k[j][i];
        }
    }
    k
}

fn scale(k: &mut [Vec<f64>], s: f64) {
    k.iter_mut().flatten().for_each(|v| *v *= s);
}

/// Assembles the blocks of the discrete problem on one active mesh.
#[derive(Debug)]
pub struct Assembler<'a> {
    pub mesh: &'a ActiveMesh,
    pub layout: &'a DofLayout,
    pub config: StabilizationConfig,
    pub orders: QuadratureOrders,
    pub partition: Option<MacroPartition>,
    elements: Vec<Rt0Element>,
}

impl<'a> Assembler<'a> {
    pub fn new(mesh: &'a ActiveMesh, layout: &'a DofLayout, config: StabilizationConfig) -> Result<Self, AssemblyError> {
        let partition = match config.faces {
            FaceSelection::MacroOnly => Some(build_macro_partition(mesh, config.delta)?),
            FaceSelection::AllSigma => None,
        };
        let elements = (0..mesh.n_elements()).map(|a| Rt0Element::new(mesh, a)).collect();
        Ok(Assembler { mesh, layout, config, orders: QuadratureOrders::default(), partition, elements })
    }

    pub fn with_orders(mut self, orders: QuadratureOrders) -> Self {
        self.orders = orders;
        self
    }

    pub fn element(&self, a: usize) -> &Rt0Element {
        &self.elements[a]
    }

    fn h(&self) -> f64 {
        self.mesh.h()
    }

    /// Faces of the velocity and divergence ghost penalties.
    pub fn penalty_faces(&self) -> Vec<usize> {
        match &self.partition {
            Some(p) => p.macro_faces.clone(),
            None => self.mesh.stabilization_faces(),
        }
    }

    fn multiplier_element(&self, c: usize) -> MultiplierElement {
        MultiplierElement::new(self.mesh, c, self.layout.multiplier_degree)
    }

    /// `η (u, v)_Ω + s(u, v)`.
    pub fn assemble_mass(&self, eta: f64) -> Result<SparseMatrix, AssemblyError> {
        let n = self.layout.n_velocity;
        let mut t = Triplets::new(n, n);
        for (a, el) in self.elements.iter().enumerate() {
            let rule = self.mesh.domain_quadrature(a, self.orders.volume.max(PRODUCT_ORDER))?;
            let rows: Vec<Vec<Point>> = rule.points.iter().map(|&x| el.values(x).to_vec()).collect();
            let mut k = gram(&rows, &rule.weights, |p, q| p.dot(q));
            scale(&mut k, eta);
            t.push_sym_block(&el.dofs, &k);
        }
        for f in self.penalty_faces() {
            let (dofs, k) = self.velocity_penalty(f)?;
            t.push_sym_block(&dofs, &k);
        }
        Ok(t.to_matrix())
    }

    /// Local velocity ghost penalty on face `f`.
    fn velocity_penalty(&self, f: usize) -> Result<(Vec<usize>, Vec<Vec<f64>>), AssemblyError> {
        let (a1, a2) = self.mesh.face_elements(f).expect("stabilization face has two active elements");
        let (e1, e2) = (&self.elements[a1], &self.elements[a2]);
        let local: Vec<usize> = e1.dofs.iter().chain(&e2.dofs).copied().collect();
        let (dofs, slot) = merge_dofs(&local);
        let jump = |x: Point| {
            let mut j = vec![Point::zeros(); dofs.len()];
            for (k, v) in e1.values(x).into_iter().enumerate() {
                j[slot[k]] += v;
            }
            for (k, v) in e2.values(x).into_iter().enumerate() {
                j[slot[3 + k]] -= v;
            }
            j
        };
        let tau = self.config.tau;
        let h = self.h();
        let k = match self.config.form {
            StabilizationForm::PatchExtension => {
                let mut rows = Vec::new();
                let mut weights = Vec::new();
                for a in [a1, a2] {
                    let rule = self.mesh.element_quadrature(a, PRODUCT_ORDER)?;
                    for (x, w) in rule.iter() {
                        rows.push(jump(x));
                        weights.push(tau * w);
                    }
                }
                gram(&rows, &weights, |p, q| p.dot(q))
            }
            StabilizationForm::FaceJumps => {
                let [p, q] = self.mesh.background.face_points(f);
                let len = self.mesh.background.faces[f].length;
                let rule = segment_quadrature(p, q, PRODUCT_ORDER)?;
                let rows: Vec<Vec<Point>> = rule.points.iter().map(|&x| jump(x)).collect();
                let weights: Vec<f64> = rule.weights.iter().map(|w| tau * h * w).collect();
                let mut k = gram(&rows, &weights, |p, q| p.dot(q));
                let mut beta = vec![0.0; dofs.len()];
                for (kk, b) in e1.slopes().into_iter().enumerate() {
                    beta[slot[kk]] += b;
                }
                for (kk, b) in e2.slopes().into_iter().enumerate() {
                    beta[slot[3 + kk]] -= b;
                }
                let c = tau * h.powi(3) * len;
                for i in 0..dofs.len() {
                    for j in 0..dofs.len() {
                        k[i][j] += c * beta[i] * beta[j];
                    }
                }
                k
            }
        };
        Ok((dofs, k))
    }

    /// `B(u, q) = -(div u, q)_Ω - s_b(u, q)`, rows are pressures.
    pub fn assemble_divergence(&self) -> Result<SparseMatrix, AssemblyError> {
        let mut t = Triplets::new(self.layout.n_pressure, self.layout.n_velocity);
        for (a, el) in self.elements.iter().enumerate() {
            let measure = self.mesh.domain_quadrature(a, 0)?.measure();
            for (k, d) in el.divergences().into_iter().enumerate() {
                t.push(a, el.dofs[k], -measure * d);
            }
        }
        let h = self.h();
        for f in self.penalty_faces() {
            let (a1, a2) = self.mesh.face_elements(f).expect("stabilization face has two active elements");
            let (e1, e2) = (&self.elements[a1], &self.elements[a2]);
            let local: Vec<usize> = e1.dofs.iter().chain(&e2.dofs).copied().collect();
            let (dofs, slot) = merge_dofs(&local);
            let mut dj = vec![0.0; dofs.len()];
            for (k, d) in e1.divergences().into_iter().enumerate() {
                dj[slot[k]] += d;
            }
            for (k, d) in e2.divergences().into_iter().enumerate() {
                dj[slot[3 + k]] -= d;
            }
            let c = self.config.tau_b
                * match self.config.form {
                    StabilizationForm::FaceJumps => h * self.mesh.background.faces[f].length,
                    StabilizationForm::PatchExtension => {
                        self.mesh.background.area(self.mesh.elements[a1]) + self.mesh.background.area(self.mesh.elements[a2])
                    }
                };
            for (q, sign) in [(a1, 1.0), (a2, -1.0)] {
                for (i, &u) in dofs.iter().enumerate() {
                    t.push(q, u, -c * sign * dj[i]);
                }
            }
        }
        Ok(t.to_matrix())
    }

    /// `(u·n, χ)_Σ`, rows are multiplier unknowns.
    pub fn assemble_coupling(&self) -> Result<SparseMatrix, AssemblyError> {
        let mut t = Triplets::new(self.layout.n_multiplier, self.layout.n_velocity);
        for (c, cg) in self.mesh.cuts.iter().enumerate() {
            let Some(seg) = cg.boundary_segment else { continue };
            let a = self.mesh.cut_element(c);
            let el = &self.elements[a];
            let chi = self.multiplier_element(c);
            let rows = self.layout.multiplier_dofs(c);
            let rule = boundary_quadrature(&seg, self.orders.boundary)?;
            let n = cg.segment_normal;
            let mut local = vec![[0.0; 3]; chi.len()];
            for (x, w) in rule.iter() {
                let psi = el.values(x);
                for (i, l) in chi.values(x).into_iter().enumerate() {
                    for k in 0..3 {
                        local[i][k] += w * l * psi[k].dot(&n);
                    }
                }
            }
            for (i, row) in rows.enumerate() {
                for k in 0..3 {
                    t.push(row, el.dofs[k], local[i][k]);
                }
            }
        }
        Ok(t.to_matrix())
    }

    /// Multiplier stabilization `S_c`.
    pub fn assemble_multiplier_stab(&self) -> Result<SparseMatrix, AssemblyError> {
        let n = self.layout.n_multiplier;
        let mut t = Triplets::new(n, n);
        let h = self.h();
        let tau_c = self.config.tau_c;
        let linear = self.layout.multiplier_degree == MultiplierDegree::Linear;
        let variant = self.config.multiplier_stab;
        let gradient_jumps = linear && variant != MultiplierStab::ScTilde;

        for &f in &self.mesh.sigma_interior_faces {
            let Some((a1, a2)) = self.mesh.face_elements(f) else { continue };
            let (c1, c2) = (self.mesh.cut_of(a1).expect("cut"), self.mesh.cut_of(a2).expect("cut"));
            let (m1, m2) = (self.multiplier_element(c1), self.multiplier_element(c2));
            let dofs: Vec<usize> = self.layout.multiplier_dofs(c1).chain(self.layout.multiplier_dofs(c2)).collect();
            let [p, q] = self.mesh.background.face_points(f);
            let rule = segment_quadrature(p, q, PRODUCT_ORDER)?;
            let rows: Vec<Vec<f64>> = rule
                .points
                .iter()
                .map(|&x| m1.values(x).into_iter().chain(m2.values(x).into_iter().map(|v| -v)).collect())
                .collect();
            let weights: Vec<f64> = rule.weights.iter().map(|w| tau_c / h * w).collect();
            let mut k = gram(&rows, &weights, |a, b| a * b);
            if gradient_jumps {
                let g: Vec<Point> = m1.gradients().into_iter().chain(m2.gradients().into_iter().map(|v| -v)).collect();
                let c = tau_c * h * self.mesh.background.faces[f].length;
                for i in 0..dofs.len() {
                    for j in 0..dofs.len() {
                        k[i][j] += c * g[i].dot(&g[j]);
                    }
                }
            }
            t.push_sym_block(&dofs, &k);
        }

        if linear {
            for (c, cg) in self.mesh.cuts.iter().enumerate() {
                let chi = self.multiplier_element(c);
                let grads = chi.gradients();
                let dofs: Vec<usize> = self.layout.multiplier_dofs(c).collect();
                let k = match variant {
                    MultiplierStab::Sc => {
                        let dn: Vec<f64> = grads.iter().map(|g| g.dot(&cg.segment_normal)).collect();
                        let c = tau_c * h * cg.segment_length();
                        dn.iter().map(|a| dn.iter().map(|b| c * a * b).collect()).collect()
                    }
                    MultiplierStab::ScHat | MultiplierStab::ScTilde => {
                        let a = self.mesh.cut_element(c);
                        let rule = self.mesh.element_quadrature(a, self.orders.volume)?;
                        let rows: Vec<Vec<f64>> = rule
                            .points
                            .iter()
                            .map(|&x| {
                                let n = match self.config.normal_source {
                                    NormalSource::LevelSetGradient => self.mesh.geometry.normal(x),
                                    NormalSource::SegmentNormal => cg.segment_normal,
                                };
                                grads.iter().map(|g| g.dot(&n)).collect()
                            })
                            .collect();
                        let weights: Vec<f64> = rule.weights.iter().map(|w| tau_c * h * w).collect();
                        gram(&rows, &weights, |a, b| a * b)
                    }
                };
                t.push_sym_block(&dofs, &k);
            }
        }
        Ok(t.to_matrix())
    }

    /// Penalty contributions: `λ/h (u·n, v·n)_Σ` and the velocity-pressure
    /// boundary term `(p, v·n)_Σ` (rows velocity, columns pressure).
    pub fn assemble_penalty(&self, lambda: f64) -> Result<(SparseMatrix, SparseMatrix), AssemblyError> {
        let nu = self.layout.n_velocity;
        let mut m = Triplets::new(nu, nu);
        let mut p = Triplets::new(nu, self.layout.n_pressure);
        let c = lambda / self.h();
        for (ci, cg) in self.mesh.cuts.iter().enumerate() {
            let Some(seg) = cg.boundary_segment else { continue };
            let a = self.mesh.cut_element(ci);
            let el = &self.elements[a];
            let rule = boundary_quadrature(&seg, self.orders.boundary)?;
            let rows: Vec<Vec<f64>> =
                rule.points.iter().map(|&x| el.values(x).iter().map(|v| v.dot(&cg.segment_normal)).collect()).collect();
            let weights: Vec<f64> = rule.weights.iter().map(|w| c * w).collect();
            m.push_sym_block(&el.dofs, &gram(&rows, &weights, |a, b| a * b));
            for k in 0..3 {
                let v: f64 = rows.iter().zip(&rule.weights).map(|(r, w)| w * r[k]).sum();
                p.push(el.dofs[k], a, v);
            }
        }
        Ok((m.to_matrix(), p.to_matrix()))
    }

    /// Right-hand side `[F | G | U | p̄]` of the global system.
    pub fn assemble_rhs(&self, data: &ProblemData, method: Method) -> Result<Vec<f64>, AssemblyError> {
        let l = self.layout;
        let mut rhs = vec![0.0; l.total()];
        let po = l.offset(crate::fespace::Block::Pressure);
        for (a, el) in self.elements.iter().enumerate() {
            let rule = self.mesh.domain_quadrature(a, self.orders.volume)?;
            for (x, w) in rule.iter() {
                let f = (data.f)(x);
                for (k, psi) in el.values(x).into_iter().enumerate() {
                    rhs[el.dofs[k]] += w * f.dot(&psi);
                }
                rhs[po + a] -= w * (data.g)(x);
            }
        }
        if let Some(pn) = &data.neumann_pressure {
            for &side in &data.neumann_sides {
                for f in self.mesh.box_faces(side) {
                    let face = &self.mesh.background.faces[f];
                    let [p, q] = self.mesh.background.face_points(f);
                    let rule = segment_quadrature(p, q, self.orders.boundary)?;
                    let dof = self.mesh.face_dof(f).expect("active face");
                    // The face basis function has unit flux, so its normal trace is 1/|F|.
                    rhs[dof] -= rule.integrate(|x| pn(x)) / face.length;
                }
            }
        }
        let mo = l.offset(crate::fespace::Block::Multiplier);
        for (c, cg) in self.mesh.cuts.iter().enumerate() {
            let Some(seg) = cg.boundary_segment else { continue };
            let n = cg.segment_normal;
            let rule = boundary_quadrature(&seg, self.orders.boundary)?;
            match method {
                Method::Lagrange => {
                    if l.n_multiplier == 0 {
                        continue;
                    }
                    let chi = self.multiplier_element(c);
                    for (x, w) in rule.iter() {
                        let ub = (data.boundary_flux)(x, n);
                        for (i, v) in l.multiplier_dofs(c).zip(chi.values(x)) {
                            rhs[mo + i] += w * ub * v;
                        }
                    }
                }
                Method::Penalty { lambda } => {
                    let el = &self.elements[self.mesh.cut_element(c)];
                    let s = lambda / self.h();
                    for (x, w) in rule.iter() {
                        let ub = (data.boundary_flux)(x, n);
                        for (k, psi) in el.values(x).into_iter().enumerate() {
                            rhs[el.dofs[k]] += s * w * ub * psi.dot(&n);
                        }
                    }
                }
            }
        }
        if let Some(pbar) = data.mean_pressure {
            if l.n_mean == 1 {
                rhs[l.offset(crate::fespace::Block::Mean)] = pbar;
            }
        }
        Ok(rhs)
    }

    /// `|T ∩ Ω|` for every active element.
    pub fn element_measures(&self) -> Result<Vec<f64>, AssemblyError> {
        (0..self.mesh.n_elements())
            .map(|a| Ok(self.mesh.domain_quadrature(a, 0)?.measure()))
            .collect()
    }

    /// Strongly imposed velocity unknowns (global index, flux value).
    pub fn strong_bc_values(&self, data: &ProblemData) -> Result<Vec<(usize, f64)>, AssemblyError> {
        let bg = &self.mesh.background;
        self.mesh
            .fitted_boundary_faces
            .iter()
            .filter(|&&f| !bg.faces[f].side.is_some_and(|s| data.neumann_sides.contains(&s)))
            .map(|&f| {
                let [p, q] = bg.face_points(f);
                let n = bg.faces[f].normal;
                let rule = segment_quadrature(p, q, self.orders.boundary)?;
                let dof = self.mesh.face_dof(f).expect("active face");
                Ok((dof, rule.integrate(|x| (data.boundary_flux)(x, n))))
            })
            .collect()
    }

    /// `∫_Ω g - ∫_∂Ω u_B` over the reconstructed domain and the strong faces.
    pub fn compatibility_defect(&self, data: &ProblemData) -> Result<f64, AssemblyError> {
        let mut defect = 0.0;
        for a in 0..self.mesh.n_elements() {
            defect += self.mesh.domain_quadrature(a, self.orders.volume)?.integrate(|x| (data.g)(x));
        }
        for cg in &self.mesh.cuts {
            if let Some(seg) = cg.boundary_segment {
                let n = cg.segment_normal;
                defect -= boundary_quadrature(&seg, self.orders.boundary)?.integrate(|x| (data.boundary_flux)(x, n));
            }
        }
        for (_, v) in self.strong_bc_values(data)? {
            defect -= v;
        }
        Ok(defect)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_keeps_first_occurrence_order() {
        let (u, s) = merge_dofs(&[4, 2, 9, 7, 2, 5]);
        assert_eq!(u, vec![4, 2, 9, 7, 5]);
        assert_eq!(s, vec![0, 1, 2, 3, 1, 4]);
    }

    #[test]
    fn gram_is_symmetric() {
        let rows = vec![vec![1.0, 2.0], vec![0.5, -1.0]];
        let k = gram(&rows, &[1.0, 2.0], |a, b| a * b);
        assert_eq!(k[0][1], k[1][0]);
        assert_eq!(k[0][0], 1.5);
        assert_eq!(k[1][1], 6.0);
    }
}
