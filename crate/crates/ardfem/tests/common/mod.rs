//! Invariant checks shared by the property and acceptance suites.
//!
//! Each check returns `Err` describing the first violation so the acceptance
//! gate can report it verbatim; the property tests simply unwrap.

use std::f64::consts::PI;

use ardfem::analysis::l2_norm;
use ardfem::assemble::{
    assemble_advection, assemble_mass, assemble_stiffness, assemble_weighted_mass, MassWeight,
};
use ardfem::quadrature::QuadratureRule;
use ardfem::space::BasisValues;
use ardfem::stepping::{run, StepObserver};
use ardfem::{Boundary, FESpace, Field, Mesh, Problem, ScalarField, Scheme, SpeciesParams};

/// Exact `int x^a y^b` over the reference triangle: `a! b! / (a + b + 2)!`.
fn monomial_integral(a: u32, b: u32) -> f64 {
    let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
    fact(a) * fact(b) / fact(a + b + 2)
}

/// Dense left-looking Cholesky; reports the first nonpositive pivot.
fn cholesky(mut a: Vec<Vec<f64>>) -> Result<(), (usize, f64)> {
    let n = a.len();
    for j in 0..n {
        for k in 0..j {
            let ljk = a[j][k];
            for i in j..n {
                let lik = a[i][k];
                a[i][j] -= lik * ljk;
            }
        }
        let pivot = a[j][j];
        if pivot <= 0.0 {
            return Err((j, pivot));
        }
        let s = pivot.sqrt();
        for i in j..n {
            a[i][j] /= s;
        }
    }
    Ok(())
}

/// Mass matrices are symmetric positive definite on every space we build.
pub fn check_mass_spd() -> Result<(), String> {
    let spaces = [
        FESpace::new(Mesh::unit_square(2), 1),
        FESpace::new(Mesh::unit_square(4), 2),
        FESpace::new(Mesh::rectangle(0.0, 2.0, -1.0, 1.0, 5, 3), 1),
        FESpace::new(Mesh::rectangle(0.0, 2.0, -1.0, 1.0, 3, 4), 2),
    ];
    for space in &spaces {
        let label = format!("P{}, {}x{} cells", space.degree, space.mesh.nx, space.mesh.ny);
        let m = assemble_mass(space);
        if !m.is_symmetric(1e-14 * m.max_abs()) {
            return Err(format!("mass matrix is not symmetric ({label})"));
        }
        if let Err((j, p)) = cholesky(m.to_dense()) {
            return Err(format!(
                "mass matrix is not positive definite: pivot {p:.3e} at column {j} ({label})"
            ));
        }
    }
    Ok(())
}

/// The stiffness matrix annihilates constants: `|S 1|_inf <= 1e-12 max|S|`.
pub fn check_stiffness_nullspace() -> Result<(), String> {
    for (n, degree) in [(3, 1), (4, 2), (8, 1), (8, 2)] {
        let space = FESpace::new(Mesh::unit_square(n), degree);
        let s = assemble_stiffness(&space);
        let ones = vec![1.0; space.n_dofs()];
        let linf = s
            .matvec(&ones)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let bound = 1e-12 * s.max_abs();
        if linf > bound {
            return Err(format!(
                "|S 1|_inf = {linf:.3e} exceeds {bound:.3e} (P{degree}, n = {n})"
            ));
        }
    }
    Ok(())
}

/// Every stored rule integrates all monomials of its stated degree to 1e-13.
pub fn check_quadrature_exactness() -> Result<(), String> {
    for degree in 1..=QuadratureRule::MAX_DEGREE {
        let rule = QuadratureRule::for_degree(degree);
        for a in 0..=rule.degree {
            for b in 0..=(rule.degree - a) {
                // Reference triangle (0,0), (1,0), (0,1): x and y are the
                // second and third barycentric coordinates, and the
                // area-normalized weights pick up the factor 1/2.
                let got: f64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(p, w)| 0.5 * w * p[1].powi(a as i32) * p[2].powi(b as i32))
                    .sum();
                let want = monomial_integral(a as u32, b as u32);
                if (got - want).abs() > 1e-13 {
                    return Err(format!(
                        "degree-{} rule: int x^{a} y^{b} = {got:.16e}, want {want:.16e}",
                        rule.degree
                    ));
                }
            }
        }
    }
    Ok(())
}

struct ContractionCheck<'s> {
    space: &'s FESpace,
    prev: f64,
    violation: Option<String>,
}

impl StepObserver for ContractionCheck<'_> {
    fn initial(&mut self, _t: f64, fields: &[Field]) {
        self.prev = l2_norm(self.space, &fields[0]);
    }
    fn step(&mut self, n: usize, _t: f64, fields: &[Field]) {
        let now = l2_norm(self.space, &fields[0]);
        if now > self.prev * (1.0 + 1e-12) && self.violation.is_none() {
            self.violation = Some(format!(
                "step {n}: |u| grew from {:.12e} to {:.12e}",
                self.prev, now
            ));
        }
        self.prev = now;
    }
}

/// With no advection, reaction, or forcing, every backward Euler step is an
/// L2 contraction.
pub fn check_diffusion_contractivity() -> Result<(), String> {
    let space = FESpace::new(Mesh::unit_square(8), 2);
    let initial = space.interpolate(
        &ScalarField::new(|_, x, y| 0.3 + (2.0 * PI * x).sin() * (PI * y).cos()),
        0.0,
    );
    let problem = Problem {
        species: vec![SpeciesParams {
            d: 0.4,
            beta: 0.0,
            gamma: 0.0,
            r: ScalarField::constant(0.0),
        }],
        k: ScalarField::constant(1.0),
        forcing: vec![ScalarField::constant(0.0)],
        boundary: Boundary::NoFlux,
        initial: vec![initial],
        second_level: None,
        dt: 0.02,
        t_end: 0.8,
        space,
    };
    let mut check = ContractionCheck {
        space: &problem.space,
        prev: 0.0,
        violation: None,
    };
    let mut observers: [&mut dyn StepObserver; 1] = [&mut check];
    run(&problem, Scheme::Dbe, &mut observers).map_err(|e| e.to_string())?;
    match check.violation {
        Some(v) => Err(v),
        None => Ok(()),
    }
}

struct TotalMass {
    /// `M' 1`, so the total is one dot product per level.
    weights: Vec<f64>,
    initial: f64,
    worst_drift: f64,
}

impl TotalMass {
    fn total(&self, f: &Field) -> f64 {
        self.weights.iter().zip(&f.values).map(|(w, v)| w * v).sum()
    }
}

impl StepObserver for TotalMass {
    fn initial(&mut self, _t: f64, fields: &[Field]) {
        self.initial = self.total(&fields[0]);
    }
    fn step(&mut self, _n: usize, _t: f64, fields: &[Field]) {
        let drift = ((self.total(&fields[0]) - self.initial) / self.initial).abs();
        self.worst_drift = self.worst_drift.max(drift);
    }
}

/// Diffusion plus advection under the no-flux condition conserves the total
/// population of each species to 1e-10 relative over 100 steps.
pub fn check_mass_conservation() -> Result<(), String> {
    for scheme in [Scheme::Dbe, Scheme::Dbdf2] {
        let space = FESpace::new(Mesh::unit_square(8), 2);
        let weights = assemble_mass(&space).matvec(&vec![1.0; space.n_dofs()]);
        let initial = space.interpolate(
            &ScalarField::new(|_, x, y| 1.6 + 0.5 * (PI * x).cos() * (PI * y).sin()),
            0.0,
        );
        let problem = Problem {
            species: vec![SpeciesParams {
                d: 0.3,
                beta: 0.7,
                gamma: 0.0,
                r: ScalarField::constant(0.0),
            }],
            k: ardfem::presets::nonstationary_gaussian(),
            forcing: vec![ScalarField::constant(0.0)],
            boundary: Boundary::NoFlux,
            initial: vec![initial],
            second_level: None,
            dt: 0.01,
            t_end: 1.0,
            space,
        };
        let mut mass = TotalMass {
            weights,
            initial: 0.0,
            worst_drift: 0.0,
        };
        let mut observers: [&mut dyn StepObserver; 1] = [&mut mass];
        let summary = run(&problem, scheme, &mut observers).map_err(|e| e.to_string())?;
        if summary.steps != 100 {
            return Err(format!("expected 100 steps, ran {}", summary.steps));
        }
        if mass.worst_drift > 1e-10 {
            return Err(format!(
                "{}: total mass drifted by {:.3e} relative over 100 steps",
                scheme.name(),
                mass.worst_drift
            ));
        }
    }
    Ok(())
}

/// Species coefficient sets different enough that a permutation mix-up
/// cannot cancel out.
fn permutation_species() -> Vec<(SpeciesParams, ScalarField, ScalarField)> {
    vec![
        (
            SpeciesParams {
                d: 0.2,
                beta: 0.4,
                gamma: 0.01,
                r: ScalarField::new(|_, x, y| 1.5 + x * y),
            },
            ScalarField::new(|t, x, _| 0.2 * (t + x)),
            ScalarField::new(|_, x, _| 1.0 + x),
        ),
        (
            SpeciesParams {
                d: 0.05,
                beta: 0.9,
                gamma: -0.02,
                r: ScalarField::new(|_, x, y| 1.2 + (x - y) * 0.5),
            },
            ScalarField::new(|t, _, y| 0.1 * (1.0 + t * y)),
            ScalarField::new(|_, _, y| 1.0 + y * (1.0 - y)),
        ),
        (
            SpeciesParams {
                d: 0.6,
                beta: 0.1,
                gamma: 0.3,
                r: ScalarField::constant(0.8),
            },
            ScalarField::constant(0.05),
            ScalarField::new(|_, x, y| 2.0 - x * y),
        ),
    ]
}

fn permuted_problem(order: &[usize]) -> Problem {
    let space = FESpace::new(Mesh::unit_square(6), 2);
    let all = permutation_species();
    let mut species = Vec::new();
    let mut forcing = Vec::new();
    let mut initial = Vec::new();
    for &i in order {
        let (sp, f, u0) = &all[i];
        species.push(sp.clone());
        forcing.push(f.clone());
        initial.push(space.interpolate(u0, 0.0));
    }
    Problem {
        species,
        forcing,
        initial,
        k: ardfem::presets::nonstationary_gaussian(),
        boundary: Boundary::NoFlux,
        second_level: None,
        dt: 0.05,
        t_end: 0.5,
        space,
    }
}

/// Within a step each species' solve sees the others only through the lagged
/// sum, so relabeling the species permutes the solution to rounding (the sum
/// itself is accumulated in species order, hence the 1e-12 slack rather than
/// bitwise equality).
pub fn check_decoupling_determinism() -> Result<(), String> {
    let order = [2usize, 0, 1];
    let mut no_observers: [&mut dyn StepObserver; 0] = [];
    for scheme in [Scheme::Dbe, Scheme::Dbdf2] {
        let base = run(&permuted_problem(&[0, 1, 2]), scheme, &mut no_observers)
            .map_err(|e| e.to_string())?;
        let permuted = run(&permuted_problem(&order), scheme, &mut no_observers)
            .map_err(|e| e.to_string())?;
        for (slot, &i) in order.iter().enumerate() {
            let a = &base.final_fields[i].values;
            let b = &permuted.final_fields[slot].values;
            let scale = a.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for (dof, (va, vb)) in a.iter().zip(b).enumerate() {
                if (va - vb).abs() > 1e-12 * scale {
                    return Err(format!(
                        "{}: species {i} dof {dof}: {va:.16e} vs {vb:.16e} after relabeling",
                        scheme.name()
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Radon's 7-point degree-5 rule from closed-form radicals, tabulated here
/// independently of the quadrature module.
fn radon7() -> (Vec<[f64; 3]>, Vec<f64>) {
    let s15 = 15.0f64.sqrt();
    let a = (6.0 - s15) / 21.0;
    let b = (6.0 + s15) / 21.0;
    let wa = (155.0 - s15) / 1200.0;
    let wb = (155.0 + s15) / 1200.0;
    let mut points = vec![[1.0 / 3.0; 3]];
    let mut weights = vec![9.0 / 40.0];
    for (c, w) in [(a, wa), (b, wb)] {
        for rot in 0..3 {
            let mut p = [c; 3];
            p[rot] = 1.0 - 2.0 * c;
            points.push(p);
            weights.push(w);
        }
    }
    (points, weights)
}

/// Dense assembly with the independent rule; `entry` is the integrand of one
/// local matrix entry given the basis table and physical point.
fn dense_assembly(
    space: &FESpace,
    entry: &dyn Fn([f64; 2], &BasisValues, usize, usize) -> f64,
) -> Vec<Vec<f64>> {
    let (points, weights) = radon7();
    let n = space.n_dofs();
    let mut out = vec![vec![0.0; n]; n];
    for t in 0..space.mesh.n_triangles() {
        let dofs = space.cell_dofs(t);
        let area = space.mesh.signed_area(t);
        for (bary, w) in points.iter().zip(&weights) {
            let basis = space.evaluate_basis(t, *bary);
            let xy = space.mesh.point(t, *bary);
            for (la, &a) in dofs.iter().enumerate() {
                for (lb, &b) in dofs.iter().enumerate() {
                    out[a][b] += w * area * entry(xy, &basis, la, lb);
                }
            }
        }
    }
    out
}

/// The production assembler agrees entrywise (to 1e-12) with a brute-force
/// dense assembly over an independently tabulated quadrature rule, for all
/// four operator kinds on a 2x2 mesh. Polynomial data of degree <= 2 keeps
/// both rules exact, so the only admissible difference is rounding.
pub fn check_assembly_oracle() -> Result<(), String> {
    // The oracle rule itself must reproduce the closed-form monomial
    // integrals, otherwise the comparison below proves nothing.
    let (points, weights) = radon7();
    for a in 0..=5usize {
        for b in 0..=(5 - a) {
            let got: f64 = points
                .iter()
                .zip(&weights)
                .map(|(p, w)| 0.5 * w * p[1].powi(a as i32) * p[2].powi(b as i32))
                .sum();
            let want = monomial_integral(a as u32, b as u32);
            if (got - want).abs() > 1e-15 {
                return Err(format!("oracle rule failed on x^{a} y^{b}"));
            }
        }
    }

    let k = ScalarField::with_grad(|_, x, _| x * x, |_, x, _| [2.0 * x, 0.0]);
    let w = ScalarField::new(|_, x, y| 1.0 + x + y);
    for degree in [1usize, 2] {
        let space = FESpace::new(Mesh::unit_square(2), degree);
        let cases: [(&str, SparseDense, EntryFn); 4] = [
            (
                "mass",
                assemble_mass(&space).to_dense(),
                Box::new(|_, b: &BasisValues, la, lb| b.values[la] * b.values[lb]),
            ),
            (
                "stiffness",
                assemble_stiffness(&space).to_dense(),
                Box::new(|_, b: &BasisValues, la, lb| {
                    b.grads[la][0] * b.grads[lb][0] + b.grads[la][1] * b.grads[lb][1]
                }),
            ),
            (
                "advection",
                assemble_advection(&space, &k, 0.0).to_dense(),
                Box::new(|xy: [f64; 2], b: &BasisValues, la, lb| {
                    b.values[lb] * 2.0 * xy[0] * b.grads[la][0]
                }),
            ),
            (
                "weighted mass",
                assemble_weighted_mass(&space, &MassWeight::Coefficient(&w), 0.0).to_dense(),
                Box::new(|xy: [f64; 2], b: &BasisValues, la, lb| {
                    (1.0 + xy[0] + xy[1]) * b.values[la] * b.values[lb]
                }),
            ),
        ];
        for (name, got, entry) in &cases {
            let want = dense_assembly(&space, entry.as_ref());
            for i in 0..space.n_dofs() {
                for j in 0..space.n_dofs() {
                    if (got[i][j] - want[i][j]).abs() > 1e-12 {
                        return Err(format!(
                            "{name} (P{degree}) entry ({i},{j}): {:.16e} vs oracle {:.16e}",
                            got[i][j], want[i][j]
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

type SparseDense = Vec<Vec<f64>>;
type EntryFn = Box<dyn Fn([f64; 2], &BasisValues, usize, usize) -> f64>;
