//! Norms, error accumulation and convergence studies.
//!
//! Errors against an exact solution are integrated by quadrature of the
//! exact expression (not of its interpolant). The space-time norm used by
//! the studies is
//!
//! ```text
//! |e|_{2,1} = sqrt( sum_{n=1..M} dt * |e^n|_{H1}^2 ),
//! |e|_{H1}^2 = |e|_{L2}^2 + |grad e|_{L2}^2
//! ```
//!
//! accumulated over the computed time levels (the initial level carries no
//! scheme error; it is the interpolated exact solution).

use crate::assemble::{assemble_mass, assemble_stiffness};
use crate::coeffs::ScalarField;
use crate::error::{Error, Result};
use crate::mms::ManufacturedCase;
use crate::quadrature::QuadratureRule;
use crate::space::{FESpace, Field};
use crate::stepping::{run, Scheme, StepObserver};

/// `sqrt(x' M x)`, the L2 norm of a finite element function.
pub fn l2_norm(space: &FESpace, f: &Field) -> f64 {
    let m = assemble_mass(space);
    let mf = m.matvec(&f.values);
    mf.iter()
        .zip(&f.values)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        .max(0.0)
        .sqrt()
}

/// `sqrt(x' S x)`, the H1 seminorm of a finite element function.
pub fn h1_seminorm(space: &FESpace, f: &Field) -> f64 {
    let s = assemble_stiffness(space);
    let sf = s.matvec(&f.values);
    sf.iter()
        .zip(&f.values)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        .max(0.0)
        .sqrt()
}

/// L2 and H1-seminorm errors of every species against its exact solution,
/// by quadrature at time `t`.
pub fn errors_at(
    space: &FESpace,
    fields: &[Field],
    exact: &[ScalarField],
    t: f64,
) -> Vec<(f64, f64)> {
    assert_eq!(fields.len(), exact.len());
    let rule = QuadratureRule::for_degree(QuadratureRule::MAX_DEGREE);
    let n = fields.len();
    let mut l2 = vec![0.0; n];
    let mut h1 = vec![0.0; n];
    for tri in 0..space.mesh.n_triangles() {
        let area = space.mesh.signed_area(tri);
        let dofs = space.cell_dofs(tri);
        for (bary, w) in rule.points.iter().zip(&rule.weights) {
            let basis = space.evaluate_basis(tri, *bary);
            let [x, y] = space.mesh.point(tri, *bary);
            let scale = w * area;
            for i in 0..n {
                let mut uh = 0.0;
                let mut gh = [0.0, 0.0];
                for a in 0..basis.n {
                    let c = fields[i].values[dofs[a]];
                    uh += c * basis.values[a];
                    gh[0] += c * basis.grads[a][0];
                    gh[1] += c * basis.grads[a][1];
                }
                let e = uh - exact[i].eval(t, x, y);
                let ge = exact[i].grad(t, x, y);
                let dx = gh[0] - ge[0];
                let dy = gh[1] - ge[1];
                l2[i] += scale * e * e;
                h1[i] += scale * (dx * dx + dy * dy);
            }
        }
    }
    (0..n).map(|i| (l2[i].sqrt(), h1[i].sqrt())).collect()
}

pub fn l2_error(space: &FESpace, f: &Field, exact: &ScalarField, t: f64) -> f64 {
    errors_at(space, std::slice::from_ref(f), std::slice::from_ref(exact), t)[0].0
}

pub fn h1_semi_error(space: &FESpace, f: &Field, exact: &ScalarField, t: f64) -> f64 {
    errors_at(space, std::slice::from_ref(f), std::slice::from_ref(exact), t)[0].1
}

/// Discrete `l2(0,T; X)` norm from per-step norms `e^1 .. e^M`.
pub fn space_time_error(dt: f64, step_errors: &[f64]) -> f64 {
    (dt * step_errors.iter().map(|e| e * e).sum::<f64>()).sqrt()
}

/// Observer accumulating the space-time H1 error per species along a run.
pub struct ErrorAccumulator<'a> {
    space: &'a FESpace,
    exact: Vec<ScalarField>,
    dt: f64,
    sums: Vec<f64>,
}

impl<'a> ErrorAccumulator<'a> {
    pub fn new(space: &'a FESpace, exact: Vec<ScalarField>, dt: f64) -> ErrorAccumulator<'a> {
        let n = exact.len();
        ErrorAccumulator {
            space,
            exact,
            dt,
            sums: vec![0.0; n],
        }
    }

    /// `|e_i|_{2,1}` for every species.
    pub fn norms(&self) -> Vec<f64> {
        self.sums.iter().map(|s| s.sqrt()).collect()
    }
}

impl StepObserver for ErrorAccumulator<'_> {
    fn step(&mut self, _n: usize, t: f64, fields: &[Field]) {
        for (i, (l2, h1)) in errors_at(self.space, fields, &self.exact, t)
            .into_iter()
            .enumerate()
        {
            self.sums[i] += self.dt * (l2 * l2 + h1 * h1);
        }
    }
}

/// Domain average `(1' M u) / |Omega|` of a finite element function.
pub fn mean_density(space: &FESpace, f: &Field) -> f64 {
    let m = assemble_mass(space);
    let total: f64 = m.matvec(&f.values).iter().sum();
    total / space.mesh.area()
}

/// Observer recording mean densities at every time level (including t = 0).
pub struct DensitySeries {
    pub times: Vec<f64>,
    /// One row per recorded level, one entry per species.
    pub means: Vec<Vec<f64>>,
    /// `M' 1`, cached so each record costs one dot product per species.
    weights: Vec<f64>,
    area: f64,
}

impl DensitySeries {
    pub fn new(space: &FESpace) -> DensitySeries {
        let m = assemble_mass(space);
        let ones = vec![1.0; space.n_dofs()];
        DensitySeries {
            times: Vec::new(),
            means: Vec::new(),
            weights: m.matvec(&ones),
            area: space.mesh.area(),
        }
    }

    fn record(&mut self, t: f64, fields: &[Field]) {
        self.times.push(t);
        self.means.push(
            fields
                .iter()
                .map(|f| {
                    self.weights
                        .iter()
                        .zip(&f.values)
                        .map(|(w, v)| w * v)
                        .sum::<f64>()
                        / self.area
                })
                .collect(),
        );
    }
}

impl StepObserver for DensitySeries {
    fn initial(&mut self, t: f64, fields: &[Field]) {
        self.record(t, fields);
    }
    fn step(&mut self, _n: usize, t: f64, fields: &[Field]) {
        self.record(t, fields);
    }
}

/// Which discretization parameter a study refines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyKind {
    /// Halve the mesh size at fixed small `T` and `dt`.
    Spatial,
    /// Halve the time step on a fixed fine mesh.
    Temporal,
}

impl StudyKind {
    pub fn name(&self) -> &'static str {
        match self {
            StudyKind::Spatial => "spatial",
            StudyKind::Temporal => "temporal",
        }
    }
}

/// Mesh resolution for the time-refinement study of each scheme.
pub const TEMPORAL_MESH_DBE: usize = 64;
pub const TEMPORAL_MESH_DBDF2: usize = 128;

/// Per-level errors of a refinement study, with observed rates.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub scheme: Scheme,
    pub study: StudyKind,
    /// `h` (cell size) or `dt` per level.
    pub level_params: Vec<f64>,
    /// `errors[level][species]`, the space-time H1 error.
    pub errors: Vec<Vec<f64>>,
}

impl ConvergenceReport {
    pub fn n_species(&self) -> usize {
        self.errors.first().map_or(0, |e| e.len())
    }

    pub fn param_label(&self) -> &'static str {
        match self.study {
            StudyKind::Spatial => "h",
            StudyKind::Temporal => "dt",
        }
    }

    /// `log2(e_{l-1} / e_l)` per species; `None` on the first level.
    pub fn rates(&self) -> Vec<Vec<Option<f64>>> {
        (0..self.errors.len())
            .map(|l| {
                (0..self.n_species())
                    .map(|i| {
                        (l > 0).then(|| (self.errors[l - 1][i] / self.errors[l][i]).log2())
                    })
                    .collect()
            })
            .collect()
    }

    /// CSV with one row per level:
    /// `level_param, err_1, rate_1, ..., err_N, rate_N`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level_param");
        for i in 1..=self.n_species() {
            out.push_str(&format!(",err_{i},rate_{i}"));
        }
        out.push('\n');
        let rates = self.rates();
        for l in 0..self.errors.len() {
            out.push_str(&format!("{}", self.level_params[l]));
            for i in 0..self.n_species() {
                match rates[l][i] {
                    Some(r) => out.push_str(&format!(",{},{}", self.errors[l][i], r)),
                    None => out.push_str(&format!(",{},", self.errors[l][i])),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Human-readable aligned table.
    pub fn to_table(&self) -> String {
        let n = self.n_species();
        let mut out = format!("{:>10}", self.param_label());
        for i in 1..=n {
            out.push_str(&format!("{:>13}{:>7}", format!("err_{i}"), "rate"));
        }
        out.push('\n');
        let rates = self.rates();
        for l in 0..self.errors.len() {
            out.push_str(&format!("{:>10.6}", self.level_params[l]));
            for i in 0..n {
                out.push_str(&format!("{:>13.4e}", self.errors[l][i]));
                match rates[l][i] {
                    Some(r) => out.push_str(&format!("{:>7.2}", r)),
                    None => out.push_str(&format!("{:>7}", "-")),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Runs the manufactured-solution refinement study.
///
/// Spatial: `T = 1e-4`, meshes `n = 4, 8, ..., 4 * 2^(levels-1)` with P2
/// elements, `dt = T/8` (DBE) or `T/16` (DBDF2). The horizon is small so
/// the time-stepping error stays far below the spatial error on every
/// level.
/// Temporal: `T = 1`, fixed fine mesh ([`TEMPORAL_MESH_DBE`] or
/// [`TEMPORAL_MESH_DBDF2`]), `dt = T/4, T/8, ..., T/(4 * 2^(levels-1))`.
///
/// BDF2 runs take the start-up level from the exact solution, so the
/// observed temporal order is that of BDF2 itself.
pub fn convergence_study(
    scheme: Scheme,
    study: StudyKind,
    levels: usize,
) -> Result<ConvergenceReport> {
    if !(1..=10).contains(&levels) {
        return Err(Error::config(format!(
            "levels must be between 1 and 10 (got {levels})"
        )));
    }
    let mut level_params = Vec::with_capacity(levels);
    let mut errors = Vec::with_capacity(levels);
    for level in 0..levels {
        let (case, n, dt, t_end) = match study {
            StudyKind::Spatial => {
                let t_end = 1e-4;
                let n = 4usize << level;
                let dt = match scheme {
                    Scheme::Dbe => t_end / 8.0,
                    Scheme::Dbdf2 => t_end / 16.0,
                };
                (ManufacturedCase::spatial(), n, dt, t_end)
            }
            StudyKind::Temporal => {
                let t_end = 1.0;
                let n = match scheme {
                    Scheme::Dbe => TEMPORAL_MESH_DBE,
                    Scheme::Dbdf2 => TEMPORAL_MESH_DBDF2,
                };
                let dt = t_end / (4 << level) as f64;
                (ManufacturedCase::temporal(), n, dt, t_end)
            }
        };
        let problem = case.problem(n, 2, dt, t_end, scheme == Scheme::Dbdf2);
        let exact: Vec<ScalarField> =
            (0..ManufacturedCase::N).map(ManufacturedCase::exact).collect();
        let mut acc = ErrorAccumulator::new(&problem.space, exact, dt);
        let mut observers: [&mut dyn StepObserver; 1] = [&mut acc];
        run(&problem, scheme, &mut observers)?;
        level_params.push(match study {
            StudyKind::Spatial => 1.0 / n as f64,
            StudyKind::Temporal => dt,
        });
        errors.push(acc.norms());
    }
    Ok(ConvergenceReport {
        scheme,
        study,
        level_params,
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;

    #[test]
    fn norms_of_simple_fields() {
        let space = FESpace::new(Mesh::unit_square(3), 1);
        let c = Field::constant(space.n_dofs(), 2.5);
        assert!((l2_norm(&space, &c) - 2.5).abs() < 1e-13);
        assert!(h1_seminorm(&space, &c) < 1e-13);

        let x = space.interpolate(&ScalarField::new(|_, x, _| x), 0.0);
        // |x|_{L2}^2 = 1/3, |grad x|^2 = 1.
        assert!((l2_norm(&space, &x) - (1.0f64 / 3.0).sqrt()).abs() < 1e-13);
        assert!((h1_seminorm(&space, &x) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn quadrature_errors_vanish_for_represented_functions() {
        let space = FESpace::new(Mesh::unit_square(3), 2);
        let exact = ScalarField::with_grad(
            |_, x, y| x * x + y,
            |_, x, _| [2.0 * x, 1.0],
        );
        let f = space.interpolate(&exact, 0.0);
        assert!(l2_error(&space, &f, &exact, 0.0) < 1e-14);
        assert!(h1_semi_error(&space, &f, &exact, 0.0) < 1e-13);
    }

    #[test]
    fn interpolation_error_decays_at_the_expected_rates() {
        let exact = ScalarField::with_grad(
            |_, x, y| (2.0 * x).sin() * (1.5 * y).cos(),
            |_, x, y| {
                [
                    2.0 * (2.0 * x).cos() * (1.5 * y).cos(),
                    -1.5 * (2.0 * x).sin() * (1.5 * y).sin(),
                ]
            },
        );
        // P2 interpolation: L2 error ~ h^3.
        let mut prev = f64::NAN;
        for n in [4, 8, 16] {
            let space = FESpace::new(Mesh::unit_square(n), 2);
            let f = space.interpolate(&exact, 0.0);
            let e = l2_error(&space, &f, &exact, 0.0);
            if !prev.is_nan() {
                let rate = (prev / e).log2();
                assert!((rate - 3.0).abs() < 0.2, "rate {rate}");
            }
            prev = e;
        }
    }

    #[test]
    fn space_time_error_of_constant_step_errors() {
        // M steps of size dt with constant error c: norm = c sqrt(T).
        let dt = 0.25f64;
        let errs = [3.0; 8];
        let want = 3.0 * (8.0 * dt).sqrt();
        assert!((space_time_error(dt, &errs) - want).abs() < 1e-13);
    }

    #[test]
    fn mean_density_examples() {
        let space = FESpace::new(Mesh::unit_square(4), 2);
        let c = Field::constant(space.n_dofs(), 1.7);
        assert!((mean_density(&space, &c) - 1.7).abs() < 1e-13);
        let x = space.interpolate(&ScalarField::new(|_, x, _| x), 0.0);
        assert!((mean_density(&space, &x) - 0.5).abs() < 1e-13);
    }

    #[test]
    fn report_formats_are_stable() {
        let report = ConvergenceReport {
            scheme: Scheme::Dbe,
            study: StudyKind::Spatial,
            level_params: vec![0.25, 0.125],
            errors: vec![vec![1e-2, 2e-2], vec![2.5e-3, 5e-3]],
        };
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "level_param,err_1,rate_1,err_2,rate_2");
        assert_eq!(lines.next().unwrap(), "0.25,0.01,,0.02,");
        assert_eq!(lines.next().unwrap(), "0.125,0.0025,2,0.005,2");
        let table = report.to_table();
        assert!(table.contains("err_1"));
        assert!(table.lines().count() == 3);
    }
}
