//! Manufactured three-species verification case on the unit square.
//!
//! Exact densities, carrying capacity and growth rate:
//!
//! ```text
//! u1 = (1.1 + sin t)(2.0 + sin y)      u2 = (2.0 + cos t)(1.1 + cos x)
//! u3 = (1.1 + sin t)(1.1 + cos y)
//! K  = (2.1 + cos x cos y)(1.1 + cos t)
//! r  = (1.5 + sin x sin y)(1.2 + sin t)
//! ```
//!
//! All factors stay bounded away from zero, so densities and capacity remain
//! positive. The forcing `f_i` that makes `u_i` solve the model is derived by
//! hand ([`ManufacturedCase::forcing_value`]) and certified against
//! [`ManufacturedCase::forcing_oracle`], which evaluates the same expression
//! with second-order central differences for every derivative, including a
//! nested stencil for the un-expanded `div(u grad K)` term.

use crate::coeffs::ScalarField;
use crate::space::FESpace;
use crate::stepping::{Boundary, Problem, SpeciesParams};
use crate::mesh::Mesh;

/// Default step for the finite-difference forcing oracle.
pub const ORACLE_STEP: f64 = 1e-4;

/// The three-species manufactured case with selectable model parameters.
#[derive(Debug, Clone)]
pub struct ManufacturedCase {
    pub d: [f64; 3],
    pub beta: [f64; 3],
    pub gamma: [f64; 3],
}

impl ManufacturedCase {
    pub const N: usize = 3;

    /// Parameters used by the mesh-refinement studies.
    pub fn spatial() -> ManufacturedCase {
        ManufacturedCase {
            d: [1.0; 3],
            beta: [1.0; 3],
            gamma: [0.001, 0.0006, 0.0],
        }
    }

    /// Parameters used by the time-refinement studies (`gamma_3 = 0.01`).
    pub fn temporal() -> ManufacturedCase {
        ManufacturedCase {
            d: [1.0; 3],
            beta: [1.0; 3],
            gamma: [0.001, 0.0006, 0.01],
        }
    }

    pub fn exact_value(i: usize, t: f64, x: f64, y: f64) -> f64 {
        match i {
            0 => (1.1 + t.sin()) * (2.0 + y.sin()),
            1 => (2.0 + t.cos()) * (1.1 + x.cos()),
            2 => (1.1 + t.sin()) * (1.1 + y.cos()),
            _ => panic!("species index {i} out of range"),
        }
    }

    pub fn exact_grad(i: usize, t: f64, x: f64, y: f64) -> [f64; 2] {
        match i {
            0 => [0.0, (1.1 + t.sin()) * y.cos()],
            1 => [-(2.0 + t.cos()) * x.sin(), 0.0],
            2 => [0.0, -(1.1 + t.sin()) * y.sin()],
            _ => panic!("species index {i} out of range"),
        }
    }

    fn exact_dt(i: usize, t: f64, x: f64, y: f64) -> f64 {
        match i {
            0 => t.cos() * (2.0 + y.sin()),
            1 => -t.sin() * (1.1 + x.cos()),
            2 => t.cos() * (1.1 + y.cos()),
            _ => panic!("species index {i} out of range"),
        }
    }

    fn exact_lap(i: usize, t: f64, x: f64, y: f64) -> f64 {
        match i {
            0 => -(1.1 + t.sin()) * y.sin(),
            1 => -(2.0 + t.cos()) * x.cos(),
            2 => -(1.1 + t.sin()) * y.cos(),
            _ => panic!("species index {i} out of range"),
        }
    }

    pub fn k_value(t: f64, x: f64, y: f64) -> f64 {
        (2.1 + x.cos() * y.cos()) * (1.1 + t.cos())
    }

    pub fn k_grad(t: f64, x: f64, y: f64) -> [f64; 2] {
        let tau = 1.1 + t.cos();
        [-tau * x.sin() * y.cos(), -tau * x.cos() * y.sin()]
    }

    fn k_lap(t: f64, x: f64, y: f64) -> f64 {
        -2.0 * (1.1 + t.cos()) * x.cos() * y.cos()
    }

    pub fn r_value(t: f64, x: f64, y: f64) -> f64 {
        (1.5 + x.sin() * y.sin()) * (1.2 + t.sin())
    }

    /// Exact solution of species `i` as a coefficient function (with
    /// analytic gradient, used by the H1 error norms).
    pub fn exact(i: usize) -> ScalarField {
        ScalarField::with_grad(
            move |t, x, y| Self::exact_value(i, t, x, y),
            move |t, x, y| Self::exact_grad(i, t, x, y),
        )
    }

    /// Dirichlet data: the trace of the exact solution.
    pub fn exact_boundary(i: usize) -> ScalarField {
        Self::exact(i)
    }

    pub fn carrying_capacity() -> ScalarField {
        ScalarField::with_grad(Self::k_value, Self::k_grad)
    }

    pub fn growth_rate() -> ScalarField {
        ScalarField::new(Self::r_value)
    }

    /// Hand-derived forcing that makes `u_i` an exact solution:
    ///
    /// ```text
    /// f_i = du_i/dt - d_i lap u_i + beta_i (grad u_i . grad K + u_i lap K)
    ///       - r u_i (1 - gamma_i - (u1 + u2 + u3) / K)
    /// ```
    pub fn forcing_value(&self, i: usize, t: f64, x: f64, y: f64) -> f64 {
        let u = Self::exact_value(i, t, x, y);
        let du = Self::exact_grad(i, t, x, y);
        let gk = Self::k_grad(t, x, y);
        let usum: f64 = (0..3).map(|j| Self::exact_value(j, t, x, y)).sum();
        let k = Self::k_value(t, x, y);
        let reaction =
            Self::r_value(t, x, y) * u * (1.0 - self.gamma[i] - usum / k);

        Self::exact_dt(i, t, x, y) - self.d[i] * Self::exact_lap(i, t, x, y)
            + self.beta[i] * (du[0] * gk[0] + du[1] * gk[1] + u * Self::k_lap(t, x, y))
            - reaction
    }

    /// Same forcing with every derivative replaced by second-order central
    /// differences of step `step`; `div(u grad K)` is differenced without
    /// expanding the product (nested stencil).
    pub fn forcing_oracle(&self, i: usize, t: f64, x: f64, y: f64, step: f64) -> f64 {
        let s = step;
        let u = |t: f64, x: f64, y: f64| Self::exact_value(i, t, x, y);
        let k = Self::k_value;

        let du_dt = (u(t + s, x, y) - u(t - s, x, y)) / (2.0 * s);
        let u0 = u(t, x, y);
        let lap = (u(t, x + s, y) - 2.0 * u0 + u(t, x - s, y)) / (s * s)
            + (u(t, x, y + s) - 2.0 * u0 + u(t, x, y - s)) / (s * s);

        let flux_x = |x: f64, y: f64| u(t, x, y) * (k(t, x + s, y) - k(t, x - s, y)) / (2.0 * s);
        let flux_y = |x: f64, y: f64| u(t, x, y) * (k(t, x, y + s) - k(t, x, y - s)) / (2.0 * s);
        let div = (flux_x(x + s, y) - flux_x(x - s, y)) / (2.0 * s)
            + (flux_y(x, y + s) - flux_y(x, y - s)) / (2.0 * s);

        let usum: f64 = (0..3).map(|j| Self::exact_value(j, t, x, y)).sum();
        let reaction =
            Self::r_value(t, x, y) * u0 * (1.0 - self.gamma[i] - usum / k(t, x, y));

        du_dt - self.d[i] * lap + self.beta[i] * div - reaction
    }

    pub fn forcing(&self, i: usize) -> ScalarField {
        let case = self.clone();
        ScalarField::new(move |t, x, y| case.forcing_value(i, t, x, y))
    }

    pub fn species(&self) -> Vec<SpeciesParams> {
        let r = Self::growth_rate();
        (0..3)
            .map(|i| SpeciesParams {
                d: self.d[i],
                beta: self.beta[i],
                gamma: self.gamma[i],
                r: r.clone(),
            })
            .collect()
    }

    /// Assembles the Dirichlet problem on an `n x n` unit-square mesh.
    ///
    /// With `exact_second_level` the BDF2 start-up level is the interpolated
    /// exact solution at `t = dt` instead of a DBE step, isolating the
    /// second-order temporal rate.
    pub fn problem(
        &self,
        n: usize,
        degree: usize,
        dt: f64,
        t_end: f64,
        exact_second_level: bool,
    ) -> Problem {
        let space = FESpace::new(Mesh::unit_square(n), degree);
        let initial = (0..3).map(|i| space.interpolate(&Self::exact(i), 0.0)).collect();
        let second_level = exact_second_level
            .then(|| (0..3).map(|i| space.interpolate(&Self::exact(i), dt)).collect());
        Problem {
            species: self.species(),
            k: Self::carrying_capacity(),
            forcing: (0..3).map(|i| self.forcing(i)).collect(),
            boundary: Boundary::Dirichlet((0..3).map(Self::exact_boundary).collect()),
            initial,
            second_level,
            dt,
            t_end,
            space,
        }
    }
}
