//! Assembly of the finite element operators.
//!
//! With test function `phi_a` (row) and trial function `phi_b` (column):
//!
//! ```text
//! mass           M[a][b] = int phi_a phi_b
//! stiffness      S[a][b] = int grad phi_a . grad phi_b
//! advection      A[a][b] = int phi_b (grad K . grad phi_a)
//! weighted mass  W[a][b] = int w phi_a phi_b
//! load           b[a]    = int f phi_a
//! ```
//!
//! Every element block is inserted into the pattern (including exact zeros),
//! so all matrices assembled on one space share one sparsity pattern and can
//! be combined entry-wise. [`ElementAssembler`] builds that pattern once and
//! refills values per call, which is what the time steppers use; the free
//! functions are one-shot conveniences over it.

use crate::coeffs::ScalarField;
use crate::quadrature::QuadratureRule;
use crate::space::{FESpace, Field};
use crate::sparse::SparseMatrix;

/// Weight of a weighted mass matrix `W[a][b] = int w phi_a phi_b`.
pub enum MassWeight<'a> {
    /// `w(t, x, y)` given in closed form.
    Coefficient(&'a ScalarField),
    /// `w` is a finite element function on the same space.
    Field(&'a Field),
    /// `w = numer / denom * sum_k c_k u_k`, the lagged competition weight:
    /// `numer = r_i`, `denom = K` and the `u_k` are previous-level densities.
    ScaledFieldSum {
        numer: &'a ScalarField,
        denom: &'a ScalarField,
        terms: &'a [(f64, &'a Field)],
    },
}

impl MassWeight<'_> {
    fn eval(&self, space: &FESpace, tri: usize, basis_values: &[f64], t: f64, x: f64, y: f64) -> f64 {
        let eval_field = |f: &Field| -> f64 {
            let dofs = space.cell_dofs(tri);
            basis_values
                .iter()
                .zip(dofs)
                .map(|(phi, &d)| phi * f.values[d])
                .sum()
        };
        match self {
            MassWeight::Coefficient(w) => w.eval(t, x, y),
            MassWeight::Field(f) => eval_field(f),
            MassWeight::ScaledFieldSum {
                numer,
                denom,
                terms,
            } => {
                let k = denom.eval(t, x, y);
                assert!(
                    k > 0.0,
                    "weighted mass divisor must stay positive (got {k} at ({x}, {y}))"
                );
                let s: f64 = terms.iter().map(|&(c, f)| c * eval_field(f)).sum();
                numer.eval(t, x, y) / k * s
            }
        }
    }
}

/// Reusable assembler: fixed space, quadrature rule and sparsity pattern.
pub struct ElementAssembler<'s> {
    space: &'s FESpace,
    rule: QuadratureRule,
    /// Zero-valued template fixing the shared pattern.
    template: SparseMatrix,
    /// For each triangle and local pair `(a, b)`, the position of the global
    /// entry inside the CSR value array.
    scatter: Vec<u32>,
    areas: Vec<f64>,
    /// Basis values at the rule points (barycentric only, element independent).
    point_basis: Vec<[f64; 6]>,
}

impl<'s> ElementAssembler<'s> {
    pub fn new(space: &'s FESpace, rule: QuadratureRule) -> ElementAssembler<'s> {
        let npc = space.dofs_per_cell();
        let ntri = space.mesh.n_triangles();
        let mut triplets = Vec::with_capacity(ntri * npc * npc);
        for t in 0..ntri {
            let dofs = space.cell_dofs(t);
            for &a in dofs {
                for &b in dofs {
                    triplets.push((a, b, 0.0));
                }
            }
        }
        let template = SparseMatrix::from_triplets(space.n_dofs(), space.n_dofs(), &triplets);

        let mut scatter = Vec::with_capacity(ntri * npc * npc);
        for t in 0..ntri {
            let dofs = space.cell_dofs(t);
            for &a in dofs {
                let (cols, _) = template.row(a);
                let row_start = template.row_ptr[a];
                for &b in dofs {
                    let k = cols.binary_search(&b).expect("entry in pattern");
                    scatter.push((row_start + k) as u32);
                }
            }
        }

        let areas = (0..ntri).map(|t| space.mesh.signed_area(t)).collect();
        let point_basis = rule
            .points
            .iter()
            .map(|&bary| {
                // Barycentric basis values are element independent; use
                // element 0 and keep only the values.
                space.evaluate_basis(0, bary).values
            })
            .collect();

        ElementAssembler {
            space,
            rule,
            template,
            scatter,
            areas,
            point_basis,
        }
    }

    pub fn space(&self) -> &FESpace {
        self.space
    }

    /// Fresh matrix with the shared pattern and zero values.
    fn zeros(&self) -> SparseMatrix {
        self.template.clone()
    }

    fn for_each_element(
        &self,
        mut per_point: impl FnMut(usize, usize, f64, [f64; 2], &[f64], &[[f64; 2]; 6]),
    ) {
        let npc = self.space.dofs_per_cell();
        for t in 0..self.space.mesh.n_triangles() {
            let area = self.areas[t];
            for (q, (&bary, &w)) in self.rule.points.iter().zip(&self.rule.weights).enumerate() {
                let basis = self.space.evaluate_basis(t, bary);
                let xy = self.space.mesh.point(t, bary);
                debug_assert_eq!(basis.n, npc);
                per_point(t, q, w * area, xy, &self.point_basis[q][..npc], &basis.grads);
            }
        }
    }

    pub fn mass(&self) -> SparseMatrix {
        let mut m = self.zeros();
        let npc = self.space.dofs_per_cell();
        self.for_each_element(|t, _, scale, _, values, _| {
            let base = t * npc * npc;
            for a in 0..npc {
                for b in 0..npc {
                    m.values[self.scatter[base + a * npc + b] as usize] +=
                        scale * values[a] * values[b];
                }
            }
        });
        m
    }

    pub fn stiffness(&self) -> SparseMatrix {
        let mut s = self.zeros();
        let npc = self.space.dofs_per_cell();
        self.for_each_element(|t, _, scale, _, _, grads| {
            let base = t * npc * npc;
            for a in 0..npc {
                for b in 0..npc {
                    let dot = grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1];
                    s.values[self.scatter[base + a * npc + b] as usize] += scale * dot;
                }
            }
        });
        s
    }

    /// `A[a][b] = int phi_b (grad K . grad phi_a)` at time `t`.
    pub fn advection(&self, k: &ScalarField, time: f64) -> SparseMatrix {
        let mut m = self.zeros();
        let npc = self.space.dofs_per_cell();
        self.for_each_element(|t, _, scale, xy, values, grads| {
            let gk = k.grad(time, xy[0], xy[1]);
            let base = t * npc * npc;
            for a in 0..npc {
                let conv = scale * (gk[0] * grads[a][0] + gk[1] * grads[a][1]);
                for b in 0..npc {
                    m.values[self.scatter[base + a * npc + b] as usize] += conv * values[b];
                }
            }
        });
        m
    }

    pub fn weighted_mass(&self, w: &MassWeight, time: f64) -> SparseMatrix {
        let mut m = self.zeros();
        let npc = self.space.dofs_per_cell();
        self.for_each_element(|t, _, scale, xy, values, _| {
            let wv = w.eval(self.space, t, values, time, xy[0], xy[1]);
            let base = t * npc * npc;
            for a in 0..npc {
                for b in 0..npc {
                    m.values[self.scatter[base + a * npc + b] as usize] +=
                        scale * wv * values[a] * values[b];
                }
            }
        });
        m
    }

    /// `b[a] = int f phi_a` at time `t`.
    pub fn load(&self, f: &ScalarField, time: f64) -> Vec<f64> {
        let mut b = vec![0.0; self.space.n_dofs()];
        let npc = self.space.dofs_per_cell();
        self.for_each_element(|t, _, scale, xy, values, _| {
            let fv = scale * f.eval(time, xy[0], xy[1]);
            let dofs = self.space.cell_dofs(t);
            for a in 0..npc {
                b[dofs[a]] += fv * values[a];
            }
        });
        b
    }
}

pub fn assemble_mass(space: &FESpace) -> SparseMatrix {
    ElementAssembler::new(space, QuadratureRule::default_assembly()).mass()
}

pub fn assemble_stiffness(space: &FESpace) -> SparseMatrix {
    ElementAssembler::new(space, QuadratureRule::default_assembly()).stiffness()
}

pub fn assemble_advection(space: &FESpace, k: &ScalarField, t: f64) -> SparseMatrix {
    ElementAssembler::new(space, QuadratureRule::default_assembly()).advection(k, t)
}

pub fn assemble_weighted_mass(space: &FESpace, w: &MassWeight, t: f64) -> SparseMatrix {
    ElementAssembler::new(space, QuadratureRule::default_assembly()).weighted_mass(w, t)
}

pub fn assemble_load(space: &FESpace, f: &ScalarField, t: f64) -> Vec<f64> {
    ElementAssembler::new(space, QuadratureRule::default_assembly()).load(f, t)
}

/// Imposes `u = g` on the boundary by row replacement.
///
/// Boundary rows become identity rows with `rhs = g` at the DOF coordinates;
/// couplings of interior rows to boundary DOFs move to the right-hand side.
/// The sparsity pattern is preserved (eliminated entries become stored
/// zeros), so cached symbolic factorizations stay valid.
pub fn apply_dirichlet(
    mat: &mut SparseMatrix,
    rhs: &mut [f64],
    space: &FESpace,
    g: &ScalarField,
    t: f64,
) {
    assert_eq!(mat.nrows(), space.n_dofs());
    assert_eq!(rhs.len(), space.n_dofs());
    let gvals: Vec<f64> = space
        .boundary_dofs
        .iter()
        .map(|&d| {
            let [x, y] = space.dof_coords[d];
            g.eval(t, x, y)
        })
        .collect();
    let mut bval = vec![0.0; space.n_dofs()];
    for (&d, &v) in space.boundary_dofs.iter().zip(&gvals) {
        bval[d] = v;
    }

    for row in 0..mat.nrows() {
        let lo = mat.row_ptr[row];
        let hi = mat.row_ptr[row + 1];
        if space.is_boundary[row] {
            for k in lo..hi {
                mat.values[k] = if mat.col_idx[k] == row { 1.0 } else { 0.0 };
            }
            rhs[row] = bval[row];
        } else {
            for k in lo..hi {
                let col = mat.col_idx[k];
                if space.is_boundary[col] {
                    rhs[row] -= mat.values[k] * bval[col];
                    mat.values[k] = 0.0;
                }
            }
        }
    }
}
