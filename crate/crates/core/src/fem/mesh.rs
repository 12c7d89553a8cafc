//! Conforming triangulations of the unit square.
//!
//! Text format used by [`Mesh2D::to_text`] and [`Mesh2D::from_text`]:
//!
//! ```text
//! <vertex count>
//! <x> <y>            (one line per vertex)
//! <triangle count>
//! <i> <j> <k>        (one line per triangle, 0-based, counterclockwise)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Smallest admissible triangle area.
pub const MIN_AREA: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh2D {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    /// Local edge `k` of a triangle joins its local vertices `k+1` and `k+2` (mod 3).
    triangle_edges: Vec<[usize; 3]>,
    edge_on_boundary: Vec<bool>,
}

/// Two times the signed area of `(a, b, c)`.
fn doubled_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])
}

impl Mesh2D {
    /// Builds and validates a mesh from raw vertices and counterclockwise triangles.
    pub fn new(vertices: Vec<[f64; 2]>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::Mesh("mesh has no triangles".into()));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::Mesh(format!("triangle {t} references a missing vertex")));
            }
        }
        let mut lookup: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut incidence: Vec<usize> = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for tri in &triangles {
            let mut te = [0; 3];
            for (k, slot) in te.iter_mut().enumerate() {
                let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
                let key = [a.min(b), a.max(b)];
                let id = *lookup.entry(key).or_insert_with(|| {
                    edges.push(key);
                    incidence.push(0);
                    edges.len() - 1
                });
                incidence[id] += 1;
                *slot = id;
            }
            triangle_edges.push(te);
        }
        let edge_on_boundary = incidence.iter().map(|&c| c == 1).collect();
        let mesh = Self {
            vertices,
            triangles,
            edges,
            triangle_edges,
            edge_on_boundary,
        };
        mesh.validate(&incidence)?;
        Ok(mesh)
    }

    fn validate(&self, incidence: &[usize]) -> Result<()> {
        for (i, v) in self.vertices.iter().enumerate() {
            let inside = v.iter().all(|c| c.is_finite() && (-1e-12..=1.0 + 1e-12).contains(c));
            if !inside {
                return Err(Error::Mesh(format!("vertex {i} lies outside the unit square")));
            }
        }
        for t in 0..self.triangles.len() {
            let area = self.area(t);
            if area < MIN_AREA {
                return Err(Error::Mesh(format!(
                    "triangle {t} has signed area {area:e} (must be positive and counterclockwise)"
                )));
            }
        }
        if let Some(e) = incidence.iter().position(|&c| c > 2) {
            return Err(Error::Mesh(format!(
                "edge {:?} is shared by more than two triangles",
                self.edges[e]
            )));
        }
        for (e, &[a, b]) in self.edges.iter().enumerate() {
            if self.edge_on_boundary[e] {
                let (p, q) = (self.vertices[a], self.vertices[b]);
                let on_side = (0..2).any(|c| {
                    (p[c].abs() < 1e-12 && q[c].abs() < 1e-12)
                        || ((p[c] - 1.0).abs() < 1e-12 && (q[c] - 1.0).abs() < 1e-12)
                });
                if !on_side {
                    return Err(Error::Mesh(format!(
                        "edge {a}-{b} is unmatched but not on the boundary"
                    )));
                }
            }
        }
        let total = self.total_area();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Mesh(format!("triangles cover area {total}, expected 1")));
        }
        Ok(())
    }

    /// Uniform `n×n` grid of squares, each split along the diagonal from `(i,j)` to `(i+1,j+1)`.
    pub fn structured(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Mesh("structured mesh needs n >= 1".into()));
        }
        let h = 1.0 / n as f64;
        let id = |i: usize, j: usize| j * (n + 1) + i;
        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                vertices.push([i as f64 * h, j as f64 * h]);
            }
        }
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        Self::new(vertices, triangles)
    }

    /// Splits every triangle into three through its barycenter.
    pub fn barycentric_refine(&self) -> Self {
        let mut vertices = self.vertices.clone();
        let mut triangles = Vec::with_capacity(3 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
            let g = vertices.len();
            vertices.push([(pa[0] + pb[0] + pc[0]) / 3.0, (pa[1] + pb[1] + pc[1]) / 3.0]);
            triangles.extend([[a, b, g], [b, c, g], [c, a, g]]);
        }
        Self::new(vertices, triangles).expect("barycentric refinement of a valid mesh is valid")
    }

    /// Splits every triangle into four through its edge midpoints.
    pub fn uniform_refine(&self) -> Self {
        let nv = self.vertices.len();
        let mut vertices = self.vertices.clone();
        for &[a, b] in &self.edges {
            let (p, q) = (self.vertices[a], self.vertices[b]);
            vertices.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
        }
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for (tri, te) in self.triangles.iter().zip(&self.triangle_edges) {
            let [a, b, c] = *tri;
            // Midpoint opposite local vertex k.
            let [ma, mb, mc] = te.map(|e| nv + e);
            triangles.extend([[a, mc, mb], [mc, b, ma], [mb, ma, c], [ma, mb, mc]]);
        }
        Self::new(vertices, triangles).expect("uniform refinement of a valid mesh is valid")
    }

    /// Applies `levels` uniform refinements.
    pub fn refined(&self, levels: usize) -> Self {
        (0..levels).fold(self.clone(), |m, _| m.uniform_refine())
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Edges as sorted vertex pairs.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangle_edges(&self) -> &[[usize; 3]] {
        &self.triangle_edges
    }

    pub fn edge_on_boundary(&self, e: usize) -> bool {
        self.edge_on_boundary[e]
    }

    pub fn boundary_edges(&self) -> Vec<[usize; 2]> {
        self.edges
            .iter()
            .zip(&self.edge_on_boundary)
            .filter_map(|(e, &b)| b.then_some(*e))
            .collect()
    }

    /// Marks vertices lying on a boundary edge.
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut on = vec![false; self.vertices.len()];
        for [a, b] in self.boundary_edges() {
            on[a] = true;
            on[b] = true;
        }
        on
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn corners(&self, t: usize) -> [[f64; 2]; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        0.5 * doubled_area(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.area(t)).sum()
    }

    /// Longest edge length.
    pub fn mesh_size(&self) -> f64 {
        self.edges
            .iter()
            .map(|&[a, b]| {
                let (p, q) = (self.vertices[a], self.vertices[b]);
                (p[0] - q[0]).hypot(p[1] - q[1])
            })
            .fold(0.0, f64::max)
    }

    /// True when the triangles group into triples around interior vertices of degree three
    /// sitting at the barycenter of the triple, i.e. the mesh is an Alfeld split.
    pub fn is_barycentric_refinement(&self) -> bool {
        let nt = self.triangles.len();
        if nt % 3 != 0 {
            return false;
        }
        let boundary = self.boundary_vertices();
        let mut star: Vec<Vec<usize>> = vec![Vec::new(); self.vertices.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                star[v].push(t);
            }
        }
        let mut covered = vec![false; nt];
        for (v, ts) in star.iter().enumerate() {
            if boundary[v] || ts.len() != 3 {
                continue;
            }
            let mut outer: Vec<usize> = ts.iter().flat_map(|&t| self.triangles[t]).filter(|&w| w != v).collect();
            outer.sort_unstable();
            outer.dedup();
            if outer.len() != 3 {
                continue;
            }
            let c = outer.iter().fold([0.0, 0.0], |acc, &w| {
                [acc[0] + self.vertices[w][0] / 3.0, acc[1] + self.vertices[w][1] / 3.0]
            });
            let p = self.vertices[v];
            if (c[0] - p[0]).abs() < 1e-12 && (c[1] - p[1]).abs() < 1e-12 {
                for &t in ts {
                    if covered[t] {
                        return false;
                    }
                    covered[t] = true;
                }
            }
        }
        covered.iter().all(|&c| c)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{}", self.vertices.len()).unwrap();
        for v in &self.vertices {
            writeln!(s, "{:.17e} {:.17e}", v[0], v[1]).unwrap();
        }
        writeln!(s, "{}", self.triangles.len()).unwrap();
        for t in &self.triangles {
            writeln!(s, "{} {} {}", t[0], t[1], t[2]).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::Mesh(format!("unexpected end of input, expected {what}")))
        };
        let count = |line: &str, what: &str| {
            line.parse::<usize>()
                .map_err(|_| Error::Mesh(format!("invalid {what}: {line:?}")))
        };
        let nv = count(next("vertex count")?, "vertex count")?;
        let mut vertices = Vec::with_capacity(nv);
        for i in 0..nv {
            let line = next("vertex coordinates")?;
            let xy: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Mesh(format!("invalid coordinates for vertex {i}: {line:?}")))?;
            if xy.len() != 2 {
                return Err(Error::Mesh(format!("vertex {i} needs two coordinates")));
            }
            vertices.push([xy[0], xy[1]]);
        }
        let nt = count(next("triangle count")?, "triangle count")?;
        let mut triangles = Vec::with_capacity(nt);
        for t in 0..nt {
            let line = next("triangle indices")?;
            let ids: Vec<usize> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Mesh(format!("invalid indices for triangle {t}: {line:?}")))?;
            if ids.len() != 3 {
                return Err(Error::Mesh(format!("triangle {t} needs three vertex indices")));
            }
            triangles.push([ids[0], ids[1], ids[2]]);
        }
        Self::new(vertices, triangles)
    }
}
