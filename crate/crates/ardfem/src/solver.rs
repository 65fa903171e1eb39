//! Sparse direct linear solves with a cached symbolic factorization.
//!
//! Every system a time stepper produces shares one sparsity pattern (the
//! element connectivity of the space), so the fill-reducing symbolic analysis
//! runs once per run and only the numeric LU factorization repeats per step
//! and species. Solves are verified a posteriori: a relative residual above
//! [`RESIDUAL_TOL`] or a non-finite solution is reported as an error string
//! for the caller to wrap with species and time context.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};

use crate::sparse::SparseMatrix;

/// Largest admissible relative residual `|Ax - b|_inf / |b|_inf`.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Symbolic LU cache, valid for one sparsity pattern at a time.
#[derive(Default)]
pub struct FactorContext {
    cached: Option<CachedSymbolic>,
}

struct CachedSymbolic {
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    lu: SymbolicLu<usize>,
}

impl FactorContext {
    pub fn new() -> FactorContext {
        FactorContext { cached: None }
    }

    /// Numeric LU factorization of `a`, reusing the symbolic analysis when
    /// the pattern matches the cached one.
    pub fn factor<'m>(&mut self, a: &'m SparseMatrix) -> Result<Factorization<'m>, String> {
        assert_eq!(a.nrows(), a.ncols(), "LU needs a square matrix");
        let n = a.nrows();
        let (col_ptr, row_idx, values) = a.to_csc();

        let reuse = matches!(&self.cached,
            Some(c) if c.col_ptr == col_ptr && c.row_idx == row_idx);
        if !reuse {
            let symbolic =
                SymbolicSparseColMatRef::new_checked(n, n, &col_ptr, None, &row_idx);
            let lu = SymbolicLu::try_new(symbolic)
                .map_err(|e| format!("symbolic factorization failed: {e:?}"))?;
            self.cached = Some(CachedSymbolic {
                col_ptr: col_ptr.clone(),
                row_idx: row_idx.clone(),
                lu,
            });
        }
        let cached = self.cached.as_ref().unwrap();

        let symbolic =
            SymbolicSparseColMatRef::new_checked(n, n, &cached.col_ptr, None, &cached.row_idx);
        let mat = SparseColMatRef::new(symbolic, &values);
        // The numeric kernel panics on an exactly zero pivot instead of
        // returning an error; turn that into a reportable failure too.
        let lu = match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
            Lu::try_new_with_symbolic(cached.lu.clone(), mat)
        })) {
            Ok(Ok(lu)) => lu,
            Ok(Err(e)) => return Err(format!("numeric factorization failed: {e:?}")),
            Err(_) => {
                return Err("numeric factorization failed: zero pivot (singular matrix)".to_string())
            }
        };
        Ok(Factorization { lu, a })
    }
}

/// One numeric factorization, tied to the matrix it factored so solves can
/// be residual-checked.
pub struct Factorization<'m> {
    lu: Lu<usize, f64>,
    a: &'m SparseMatrix,
}

impl Factorization<'_> {
    /// Solves `A x = b` and verifies the result.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, String> {
        let n = self.a.nrows();
        assert_eq!(b.len(), n);
        let mut x = b.to_vec();
        self.lu
            .solve_in_place(faer::MatMut::from_column_major_slice_mut(&mut x, n, 1));

        if !x.iter().all(|v| v.is_finite()) {
            return Err("solution is not finite".to_string());
        }
        let ax = self.a.matvec(&x);
        let resid = ax
            .iter()
            .zip(b)
            .fold(0.0f64, |m, (ai, bi)| m.max((ai - bi).abs()));
        let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let rel = resid / scale.max(f64::MIN_POSITIVE);
        if !(rel <= RESIDUAL_TOL) {
            return Err(format!(
                "relative residual {rel:.3e} exceeds {RESIDUAL_TOL:.0e}"
            ));
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_small_unsymmetric_system() {
        let a = SparseMatrix::from_triplets(
            3,
            3,
            &[
                (0, 0, 4.0),
                (0, 1, 1.0),
                (1, 0, -2.0),
                (1, 1, 5.0),
                (1, 2, 1.0),
                (2, 2, 3.0),
            ],
        );
        let x_true = [1.0, -2.0, 0.5];
        let b = a.matvec(&x_true);
        let mut ctx = FactorContext::new();
        let x = ctx.factor(&a).unwrap().solve(&b).unwrap();
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).abs() < 1e-12);
        }
    }

    #[test]
    fn symbolic_cache_survives_value_changes() {
        let pattern = [(0usize, 0usize), (0, 1), (1, 0), (1, 1)];
        let mut ctx = FactorContext::new();
        for scale in [1.0, 3.0, -2.5] {
            let triplets: Vec<_> = pattern
                .iter()
                .enumerate()
                .map(|(k, &(r, c))| (r, c, scale * (k as f64 + 1.0) + if r == c { 10.0 } else { 0.0 }))
                .collect();
            let a = SparseMatrix::from_triplets(2, 2, &triplets);
            let x_true = [2.0, -1.0];
            let b = a.matvec(&x_true);
            let x = ctx.factor(&a).unwrap().solve(&b).unwrap();
            assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_systems_are_rejected() {
        // Second row is zero: factorization or the residual check must fail.
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 0.0), (1, 1, 0.0)]);
        let mut ctx = FactorContext::new();
        let outcome = ctx.factor(&a).and_then(|f| f.solve(&[1.0, 1.0]));
        assert!(outcome.is_err());
    }
}
