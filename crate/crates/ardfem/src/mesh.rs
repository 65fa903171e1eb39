//! Structured triangulations of axis-aligned rectangles.
//!
//! An `nx x ny` grid of cells is split into `2 nx ny` triangles, every cell
//! cut along its lower-left to upper-right diagonal. Vertices are numbered
//! lexicographically by grid index (x fastest), triangles cell by cell in the
//! same order, and edges lexicographically by their sorted vertex pair, so a
//! mesh with the same parameters is bitwise reproducible.

use std::collections::BTreeMap;

/// Undirected mesh edge between two vertices, `v[0] < v[1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub v: [usize; 2],
    /// True when the edge lies on the boundary of the rectangle
    /// (shared by exactly one triangle).
    pub boundary: bool,
}

/// Conforming triangulation of `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
    pub vertices: Vec<[f64; 2]>,
    /// Vertex triples, counter-clockwise.
    pub triangles: Vec<[usize; 3]>,
    /// All edges, sorted lexicographically by vertex pair.
    pub edges: Vec<Edge>,
    /// Largest triangle diameter, `hypot(dx, dy)` on a uniform grid.
    pub h: f64,
}

impl Mesh {
    /// Builds a structured triangulation with `nx x ny` cells.
    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize) -> Mesh {
        assert!(nx >= 1 && ny >= 1, "mesh needs at least one cell per axis");
        assert!(x1 > x0 && y1 > y0, "mesh bounds must be nondegenerate");
        let dx = (x1 - x0) / nx as f64;
        let dy = (y1 - y0) / ny as f64;

        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push([x0 + i as f64 * dx, y0 + j as f64 * dy]);
            }
        }

        let vid = |i: usize, j: usize| j * (nx + 1) + i;
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let v00 = vid(i, j);
                let v10 = vid(i + 1, j);
                let v01 = vid(i, j + 1);
                let v11 = vid(i + 1, j + 1);
                // Diagonal from the lower-left to the upper-right corner.
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            }
        }

        let mut counts: BTreeMap<[usize; 2], u8> = BTreeMap::new();
        for tri in &triangles {
            for k in 0..3 {
                let a = tri[k];
                let b = tri[(k + 1) % 3];
                let key = if a < b { [a, b] } else { [b, a] };
                *counts.entry(key).or_insert(0) += 1;
            }
        }
        let edges = counts
            .into_iter()
            .map(|(v, n)| {
                debug_assert!(n == 1 || n == 2, "edge shared by {n} triangles");
                Edge {
                    v,
                    boundary: n == 1,
                }
            })
            .collect();

        let mesh = Mesh {
            x0,
            x1,
            y0,
            y1,
            nx,
            ny,
            vertices,
            triangles,
            edges,
            h: dx.hypot(dy),
        };
        debug_assert!((0..mesh.triangles.len()).all(|t| mesh.signed_area(t) > 0.0));
        mesh
    }

    /// Unit square `(0,1)^2` with `n x n` cells.
    pub fn unit_square(n: usize) -> Mesh {
        Mesh::rectangle(0.0, 1.0, 0.0, 1.0, n, n)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_vertices(&self, t: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Signed area of triangle `t`; positive for counter-clockwise vertices.
    pub fn signed_area(&self, t: usize) -> f64 {
        let [p0, p1, p2] = self.triangle_vertices(t);
        0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]))
    }

    /// Total mesh area.
    pub fn area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.signed_area(t)).sum()
    }

    /// Physical coordinates of a barycentric point in triangle `t`.
    pub fn point(&self, t: usize, bary: [f64; 3]) -> [f64; 2] {
        let [p0, p1, p2] = self.triangle_vertices(t);
        [
            bary[0] * p0[0] + bary[1] * p1[0] + bary[2] * p2[0],
            bary[0] * p0[1] + bary[1] * p1[1] + bary[2] * p2[1],
        ]
    }

    /// Gradients of the three barycentric coordinates on triangle `t`.
    ///
    /// These are constant per triangle: `grad lambda_i` is the 90-degree
    /// rotation of the opposite edge divided by twice the signed area.
    pub fn lambda_grads(&self, t: usize) -> [[f64; 2]; 3] {
        let p = self.triangle_vertices(t);
        let inv_2a = 1.0 / (2.0 * self.signed_area(t));
        let mut grads = [[0.0; 2]; 3];
        for i in 0..3 {
            let a = p[(i + 1) % 3];
            let b = p[(i + 2) % 3];
            let e = [b[0] - a[0], b[1] - a[1]];
            grads[i] = [-e[1] * inv_2a, e[0] * inv_2a];
        }
        grads
    }
}
