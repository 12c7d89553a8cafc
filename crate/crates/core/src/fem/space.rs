//! Lagrange spaces on a [`Mesh2D`] and their local shape functions.

use std::sync::Arc;

use crate::fem::mesh::Mesh2D;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    /// Continuous piecewise linears.
    P1Continuous,
    /// Continuous piecewise quadratics, two components.
    P2Vector,
    /// Discontinuous piecewise linears.
    P1Discontinuous,
}

/// Affine geometry of one triangle.
#[derive(Debug, Clone, Copy)]
pub struct Element {
    pub corners: [[f64; 2]; 3],
    pub area: f64,
    /// Constant gradients of the barycentric coordinates.
    pub grad_lambda: [[f64; 2]; 3],
}

impl Element {
    pub fn new(mesh: &Mesh2D, t: usize) -> Self {
        let corners = mesh.corners(t);
        let area = mesh.area(t);
        let d = 2.0 * area;
        let mut grad_lambda = [[0.0; 2]; 3];
        for (i, g) in grad_lambda.iter_mut().enumerate() {
            let (p, q) = (corners[(i + 1) % 3], corners[(i + 2) % 3]);
            *g = [(p[1] - q[1]) / d, (q[0] - p[0]) / d];
        }
        Self {
            corners,
            area,
            grad_lambda,
        }
    }

    pub fn point(&self, bary: [f64; 3]) -> [f64; 2] {
        let c = &self.corners;
        [
            bary[0] * c[0][0] + bary[1] * c[1][0] + bary[2] * c[2][0],
            bary[0] * c[0][1] + bary[1] * c[1][1] + bary[2] * c[2][1],
        ]
    }

    /// Values of the six quadratic shape functions: vertices first, then the edge midpoints
    /// opposite local vertices 0, 1, 2.
    pub fn p2_values(bary: [f64; 3]) -> [f64; 6] {
        let l = bary;
        [
            l[0] * (2.0 * l[0] - 1.0),
            l[1] * (2.0 * l[1] - 1.0),
            l[2] * (2.0 * l[2] - 1.0),
            4.0 * l[1] * l[2],
            4.0 * l[2] * l[0],
            4.0 * l[0] * l[1],
        ]
    }

    pub fn p2_gradients(&self, bary: [f64; 3]) -> [[f64; 2]; 6] {
        let l = bary;
        let g = &self.grad_lambda;
        let vertex = |i: usize| {
            let s = 4.0 * l[i] - 1.0;
            [s * g[i][0], s * g[i][1]]
        };
        let edge = |a: usize, b: usize| {
            [
                4.0 * (l[a] * g[b][0] + l[b] * g[a][0]),
                4.0 * (l[a] * g[b][1] + l[b] * g[a][1]),
            ]
        };
        [vertex(0), vertex(1), vertex(2), edge(1, 2), edge(2, 0), edge(0, 1)]
    }

    pub fn p1_values(bary: [f64; 3]) -> [f64; 3] {
        bary
    }

    pub fn p1_gradients(&self) -> [[f64; 2]; 3] {
        self.grad_lambda
    }
}

/// A finite element space: global numbering plus boundary information.
#[derive(Debug, Clone)]
pub struct FeSpace {
    kind: SpaceKind,
    mesh: Arc<Mesh2D>,
    dof_count: usize,
    dof_map: Vec<Vec<usize>>,
    boundary_dofs: Vec<usize>,
    dof_coords: Vec<[f64; 2]>,
}

impl FeSpace {
    pub fn new(mesh: Arc<Mesh2D>, kind: SpaceKind) -> Self {
        let nv = mesh.num_vertices();
        let ne = mesh.num_edges();
        let nt = mesh.num_triangles();
        let on_boundary = mesh.boundary_vertices();
        let (dof_count, dof_map, boundary_dofs, dof_coords) = match kind {
            SpaceKind::P1Continuous => {
                let map = mesh.triangles().iter().map(|t| t.to_vec()).collect();
                let bnd = (0..nv).filter(|&v| on_boundary[v]).collect();
                (nv, map, bnd, mesh.vertices().to_vec())
            }
            SpaceKind::P1Discontinuous => {
                let map = (0..nt).map(|t| vec![3 * t, 3 * t + 1, 3 * t + 2]).collect();
                let coords = (0..nt).flat_map(|t| mesh.corners(t)).collect();
                (3 * nt, map, Vec::new(), coords)
            }
            SpaceKind::P2Vector => {
                let n2 = nv + ne;
                let map = mesh
                    .triangles()
                    .iter()
                    .zip(mesh.triangle_edges())
                    .map(|(t, te)| {
                        let scalar: Vec<usize> = t.iter().copied().chain(te.iter().map(|e| nv + e)).collect();
                        scalar.iter().copied().chain(scalar.iter().map(|s| n2 + s)).collect()
                    })
                    .collect();
                let mut coords = mesh.vertices().to_vec();
                for &[a, b] in mesh.edges() {
                    let (p, q) = (mesh.vertices()[a], mesh.vertices()[b]);
                    coords.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
                }
                let mut scalar_bnd: Vec<usize> = (0..nv).filter(|&v| on_boundary[v]).collect();
                scalar_bnd.extend((0..ne).filter(|&e| mesh.edge_on_boundary(e)).map(|e| nv + e));
                let bnd = scalar_bnd
                    .iter()
                    .copied()
                    .chain(scalar_bnd.iter().map(|s| n2 + s))
                    .collect();
                let all_coords = coords.iter().chain(coords.iter()).copied().collect();
                (2 * n2, map, bnd, all_coords)
            }
        };
        Self {
            kind,
            mesh,
            dof_count,
            dof_map,
            boundary_dofs,
            dof_coords,
        }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn mesh(&self) -> &Mesh2D {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<Mesh2D> {
        &self.mesh
    }

    pub fn dof_count(&self) -> usize {
        self.dof_count
    }

    /// Global dofs of triangle `t`. For the vector space the first six entries are the
    /// x-component and the last six the y-component.
    pub fn dofs(&self, t: usize) -> &[usize] {
        &self.dof_map[t]
    }

    /// Sorted dofs located on the boundary (empty for discontinuous spaces).
    pub fn boundary_dofs(&self) -> &[usize] {
        &self.boundary_dofs
    }

    /// Nodal position of each dof.
    pub fn dof_coords(&self) -> &[[f64; 2]] {
        &self.dof_coords
    }

    /// Number of scalar nodes per component of the vector space.
    pub fn scalar_nodes(&self) -> usize {
        match self.kind {
            SpaceKind::P2Vector => self.dof_count / 2,
            _ => self.dof_count,
        }
    }

    /// Nodal interpolant of a vector field (P2 vector space only).
    pub fn interpolate_vector(&self, f: impl Fn([f64; 2]) -> [f64; 2]) -> Vec<f64> {
        assert_eq!(self.kind, SpaceKind::P2Vector);
        let n2 = self.scalar_nodes();
        let mut out = vec![0.0; self.dof_count];
        for s in 0..n2 {
            let v = f(self.dof_coords[s]);
            out[s] = v[0];
            out[n2 + s] = v[1];
        }
        out
    }

    /// Nodal interpolant of a scalar function (scalar spaces only).
    pub fn interpolate_scalar(&self, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        assert_ne!(self.kind, SpaceKind::P2Vector);
        self.dof_coords.iter().map(|&x| f(x)).collect()
    }

    /// Value of a vector coefficient field at barycentric point `bary` of triangle `t`.
    pub fn eval_vector(&self, coeffs: &[f64], t: usize, bary: [f64; 3]) -> [f64; 2] {
        let dofs = self.dofs(t);
        let phi = Element::p2_values(bary);
        let mut v = [0.0; 2];
        for (a, &p) in phi.iter().enumerate() {
            v[0] += p * coeffs[dofs[a]];
            v[1] += p * coeffs[dofs[6 + a]];
        }
        v
    }

    /// Gradient rows `[∇v₁, ∇v₂]` of a vector coefficient field.
    pub fn grad_vector(&self, coeffs: &[f64], t: usize, el: &Element, bary: [f64; 3]) -> [[f64; 2]; 2] {
        let dofs = self.dofs(t);
        let g = el.p2_gradients(bary);
        let mut out = [[0.0; 2]; 2];
        for (a, ga) in g.iter().enumerate() {
            for c in 0..2 {
                let u = coeffs[dofs[6 * c + a]];
                out[c][0] += u * ga[0];
                out[c][1] += u * ga[1];
            }
        }
        out
    }

    /// Value of a scalar P1 (continuous or discontinuous) coefficient field.
    pub fn eval_scalar(&self, coeffs: &[f64], t: usize, bary: [f64; 3]) -> f64 {
        let dofs = self.dofs(t);
        (0..3).map(|i| bary[i] * coeffs[dofs[i]]).sum()
    }
}
