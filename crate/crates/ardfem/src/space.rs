//! Lagrange finite element spaces (P1, P2) and coefficient fields.
//!
//! Degrees of freedom are numbered vertices first (in mesh vertex order),
//! then, for P2, edge midpoints in mesh edge order; both orders are
//! deterministic, so DOF numbering is reproducible. On an `n x n` unit-square
//! mesh P1 has `(n+1)^2` DOFs and P2 has `(2n+1)^2`.

use std::collections::BTreeMap;

use crate::coeffs::ScalarField;
use crate::mesh::Mesh;

/// Basis values and spatial gradients at one point of one element.
///
/// Only the first `n` entries are meaningful (3 for P1, 6 for P2).
#[derive(Debug, Clone, Copy)]
pub struct BasisValues {
    pub n: usize,
    pub values: [f64; 6],
    pub grads: [[f64; 2]; 6],
}

/// Scalar Lagrange space of degree 1 or 2 on a triangulation it owns.
#[derive(Debug, Clone)]
pub struct FESpace {
    pub mesh: Mesh,
    pub degree: usize,
    /// Coordinates of every DOF node (vertices, then P2 edge midpoints).
    pub dof_coords: Vec<[f64; 2]>,
    /// DOFs on the boundary of the rectangle, ascending.
    pub boundary_dofs: Vec<usize>,
    pub is_boundary: Vec<bool>,
    /// Flat per-cell DOF lists, `dofs_per_cell` entries per triangle.
    cell_dofs: Vec<usize>,
}

impl FESpace {
    pub fn new(mesh: Mesh, degree: usize) -> FESpace {
        assert!(degree == 1 || degree == 2, "only P1 and P2 are supported");

        let nv = mesh.n_vertices();
        let mut dof_coords = mesh.vertices.clone();
        let mut edge_index = BTreeMap::new();
        if degree == 2 {
            for (e, edge) in mesh.edges.iter().enumerate() {
                let [a, b] = edge.v;
                let pa = mesh.vertices[a];
                let pb = mesh.vertices[b];
                dof_coords.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
                edge_index.insert(edge.v, nv + e);
            }
        }

        let per_cell = if degree == 1 { 3 } else { 6 };
        let mut cell_dofs = Vec::with_capacity(per_cell * mesh.n_triangles());
        for tri in &mesh.triangles {
            cell_dofs.extend_from_slice(tri);
            if degree == 2 {
                for k in 0..3 {
                    let (a, b) = (tri[k], tri[(k + 1) % 3]);
                    let key = if a < b { [a, b] } else { [b, a] };
                    cell_dofs.push(edge_index[&key]);
                }
            }
        }

        let tol = 1e-12 * (mesh.x1 - mesh.x0).max(mesh.y1 - mesh.y0).max(1.0);
        let is_boundary: Vec<bool> = dof_coords
            .iter()
            .map(|&[x, y]| {
                (x - mesh.x0).abs() <= tol
                    || (x - mesh.x1).abs() <= tol
                    || (y - mesh.y0).abs() <= tol
                    || (y - mesh.y1).abs() <= tol
            })
            .collect();
        let boundary_dofs = (0..dof_coords.len()).filter(|&d| is_boundary[d]).collect();

        FESpace {
            mesh,
            degree,
            dof_coords,
            boundary_dofs,
            is_boundary,
            cell_dofs,
        }
    }

    pub fn n_dofs(&self) -> usize {
        self.dof_coords.len()
    }

    pub fn dofs_per_cell(&self) -> usize {
        if self.degree == 1 {
            3
        } else {
            6
        }
    }

    /// Global DOF numbers of element `t`, local order: vertices `v0 v1 v2`,
    /// then (P2) midpoints of edges `v0v1`, `v1v2`, `v2v0`.
    pub fn cell_dofs(&self, t: usize) -> &[usize] {
        let n = self.dofs_per_cell();
        &self.cell_dofs[t * n..(t + 1) * n]
    }

    /// Basis functions and gradients of element `t` at a barycentric point.
    pub fn evaluate_basis(&self, t: usize, bary: [f64; 3]) -> BasisValues {
        let l = bary;
        let gl = self.mesh.lambda_grads(t);
        let mut out = BasisValues {
            n: self.dofs_per_cell(),
            values: [0.0; 6],
            grads: [[0.0; 2]; 6],
        };
        if self.degree == 1 {
            for i in 0..3 {
                out.values[i] = l[i];
                out.grads[i] = gl[i];
            }
        } else {
            for i in 0..3 {
                out.values[i] = l[i] * (2.0 * l[i] - 1.0);
                let c = 4.0 * l[i] - 1.0;
                out.grads[i] = [c * gl[i][0], c * gl[i][1]];
            }
            for k in 0..3 {
                let (i, j) = (k, (k + 1) % 3);
                out.values[3 + k] = 4.0 * l[i] * l[j];
                out.grads[3 + k] = [
                    4.0 * (l[i] * gl[j][0] + l[j] * gl[i][0]),
                    4.0 * (l[i] * gl[j][1] + l[j] * gl[i][1]),
                ];
            }
        }
        out
    }

    /// Value of a coefficient field at a barycentric point of element `t`.
    pub fn eval(&self, field: &Field, t: usize, bary: [f64; 3]) -> f64 {
        assert_eq!(field.values.len(), self.n_dofs(), "field/space mismatch");
        let basis = self.evaluate_basis(t, bary);
        let dofs = self.cell_dofs(t);
        (0..basis.n)
            .map(|a| field.values[dofs[a]] * basis.values[a])
            .sum()
    }

    /// Spatial gradient of a coefficient field inside element `t`.
    pub fn eval_grad(&self, field: &Field, t: usize, bary: [f64; 3]) -> [f64; 2] {
        assert_eq!(field.values.len(), self.n_dofs(), "field/space mismatch");
        let basis = self.evaluate_basis(t, bary);
        let dofs = self.cell_dofs(t);
        let mut g = [0.0; 2];
        for a in 0..basis.n {
            g[0] += field.values[dofs[a]] * basis.grads[a][0];
            g[1] += field.values[dofs[a]] * basis.grads[a][1];
        }
        g
    }

    /// Nodal interpolant of `f` at time `t`.
    pub fn interpolate(&self, f: &ScalarField, t: f64) -> Field {
        Field {
            values: self
                .dof_coords
                .iter()
                .map(|&[x, y]| f.eval(t, x, y))
                .collect(),
        }
    }

    pub fn zero_field(&self) -> Field {
        Field {
            values: vec![0.0; self.n_dofs()],
        }
    }
}

/// Coefficient vector of one scalar FE function.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub values: Vec<f64>,
}

impl Field {
    pub fn constant(n_dofs: usize, c: f64) -> Field {
        Field {
            values: vec![c; n_dofs],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `sum_k c_k f_k` over fields of one space.
    pub fn lin_comb(terms: &[(f64, &Field)]) -> Field {
        assert!(!terms.is_empty());
        let n = terms[0].1.len();
        let mut out = vec![0.0; n];
        for &(c, f) in terms {
            assert_eq!(f.len(), n, "field length mismatch");
            for (o, v) in out.iter_mut().zip(&f.values) {
                *o += c * v;
            }
        }
        Field { values: out }
    }
}

impl std::ops::Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        assert_eq!(self.len(), rhs.len(), "field length mismatch");
        Field {
            values: self
                .values
                .iter()
                .zip(&rhs.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        assert_eq!(self.len(), rhs.len(), "field length mismatch");
        Field {
            values: self
                .values
                .iter()
                .zip(&rhs.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl std::ops::Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, s: f64) -> Field {
        Field {
            values: self.values.iter().map(|a| a * s).collect(),
        }
    }
}
