//! Time-dependent scalar coefficients on the domain.
//!
//! A [`ScalarField`] wraps a function `(t, x, y) -> f64` used for carrying
//! capacities, growth rates, forcing terms and boundary data. A field may
//! carry an analytic spatial gradient; when it does not, [`ScalarField::grad`]
//! falls back to second-order central differences with step `1e-6`.

use std::sync::Arc;

type EvalFn = dyn Fn(f64, f64, f64) -> f64 + Send + Sync;
type GradFn = dyn Fn(f64, f64, f64) -> [f64; 2] + Send + Sync;

/// Step for the finite-difference gradient fallback.
const GRAD_STEP: f64 = 1e-6;

#[derive(Clone)]
pub struct ScalarField {
    eval: Arc<EvalFn>,
    grad: Option<Arc<GradFn>>,
}

impl ScalarField {
    pub fn new(f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> ScalarField {
        ScalarField {
            eval: Arc::new(f),
            grad: None,
        }
    }

    pub fn with_grad(
        f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        g: impl Fn(f64, f64, f64) -> [f64; 2] + Send + Sync + 'static,
    ) -> ScalarField {
        ScalarField {
            eval: Arc::new(f),
            grad: Some(Arc::new(g)),
        }
    }

    pub fn constant(c: f64) -> ScalarField {
        ScalarField::with_grad(move |_, _, _| c, |_, _, _| [0.0, 0.0])
    }

    pub fn eval(&self, t: f64, x: f64, y: f64) -> f64 {
        (self.eval)(t, x, y)
    }

    /// Spatial gradient at `(t, x, y)`: analytic when supplied, otherwise
    /// central differences.
    pub fn grad(&self, t: f64, x: f64, y: f64) -> [f64; 2] {
        if let Some(g) = &self.grad {
            return g(t, x, y);
        }
        let h = GRAD_STEP;
        [
            (self.eval(t, x + h, y) - self.eval(t, x - h, y)) / (2.0 * h),
            (self.eval(t, x, y + h) - self.eval(t, x, y - h)) / (2.0 * h),
        ]
    }

    pub fn has_analytic_grad(&self) -> bool {
        self.grad.is_some()
    }

    /// True when both fields wrap the same underlying closure (clones of one
    /// field). Used to share assembled operators between species.
    pub fn same_fn(&self, other: &ScalarField) -> bool {
        Arc::ptr_eq(&self.eval, &other.eval)
    }
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField")
            .field("analytic_grad", &self.grad.is_some())
            .finish()
    }
}
