//! Quadrature rules on the reference triangle.
//!
//! Points are stored as barycentric coordinates and weights are normalized to
//! sum to one, so an integral over a physical triangle `T` is approximated by
//!
//! ```text
//! int_T f dx ~= area(T) * sum_q w_q f(x_q)
//! ```
//!
//! Degrees 1 and 2 use the classic symmetric rules. Degrees 3 through
//! [`QuadratureRule::MAX_DEGREE`] use a collapsed tensor Gauss-Legendre rule
//! (Duffy transform of the unit square), whose nodes and weights derive from
//! closed-form radicals; all weights are strictly positive and all points lie
//! strictly inside the triangle.

/// A fixed quadrature rule on the reference triangle.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    /// Largest total polynomial degree integrated exactly.
    pub degree: usize,
    /// Barycentric coordinates of the quadrature points, each summing to 1.
    pub points: Vec<[f64; 3]>,
    /// Positive weights summing to 1.
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Largest exactness degree this module provides.
    pub const MAX_DEGREE: usize = 8;

    /// Smallest stored rule exact for polynomials up to total `degree`.
    ///
    /// Panics if `degree` is 0 or exceeds [`Self::MAX_DEGREE`].
    pub fn for_degree(degree: usize) -> QuadratureRule {
        assert!(
            (1..=Self::MAX_DEGREE).contains(&degree),
            "unsupported quadrature degree {degree} (supported: 1..={})",
            Self::MAX_DEGREE
        );
        match degree {
            1 => QuadratureRule {
                degree: 1,
                points: vec![[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]],
                weights: vec![1.0],
            },
            2 => QuadratureRule {
                degree: 2,
                points: vec![
                    [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
                    [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
                    [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
                ],
                weights: vec![1.0 / 3.0; 3],
            },
            d => Self::collapsed(d),
        }
    }

    /// Rule used by the assembly routines unless a caller overrides it.
    pub fn default_assembly() -> QuadratureRule {
        Self::for_degree(6)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Collapsed n x n Gauss-Legendre rule, exact through degree `2n - 2`.
    ///
    /// The unit square `(s, t)` maps onto the triangle via
    /// `x = s, y = t (1 - s)` with Jacobian `1 - s`; the Jacobian raises the
    /// `s`-degree of the integrand by one, which costs the rule one order
    /// relative to plain 1-D Gauss exactness.
    fn collapsed(degree: usize) -> QuadratureRule {
        let n = (degree + 2).div_ceil(2); // smallest n with 2n - 2 >= degree
        let (nodes, gl_weights) = gauss_legendre_01(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (&s, &ws) in nodes.iter().zip(&gl_weights) {
            for (&t, &wt) in nodes.iter().zip(&gl_weights) {
                let x = s;
                let y = t * (1.0 - s);
                points.push([1.0 - x - y, x, y]);
                // Factor 2 renormalizes from the reference area 1/2 to
                // weights that sum to one.
                weights.push(2.0 * ws * wt * (1.0 - s));
            }
        }
        QuadratureRule {
            degree: 2 * n - 2,
            points,
            weights,
        }
    }
}

/// Gauss-Legendre nodes and weights on [0, 1] for n = 3, 4, 5.
///
/// Values come from the closed-form radicals for the Legendre roots, so they
/// are exact to machine precision.
fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w): (Vec<f64>, Vec<f64>) = match n {
        3 => {
            let a = (3.0f64 / 5.0).sqrt();
            (vec![-a, 0.0, a], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
        }
        4 => {
            let c = 2.0 / 7.0 * (6.0f64 / 5.0).sqrt();
            let a = (3.0 / 7.0 - c).sqrt();
            let b = (3.0 / 7.0 + c).sqrt();
            let wa = (18.0 + 30.0f64.sqrt()) / 36.0;
            let wb = (18.0 - 30.0f64.sqrt()) / 36.0;
            (vec![-b, -a, a, b], vec![wb, wa, wa, wb])
        }
        5 => {
            let c = 2.0 * (10.0f64 / 7.0).sqrt();
            let a = (5.0 - c).sqrt() / 3.0;
            let b = (5.0 + c).sqrt() / 3.0;
            let wa = (322.0 + 13.0 * 70.0f64.sqrt()) / 900.0;
            let wb = (322.0 - 13.0 * 70.0f64.sqrt()) / 900.0;
            (
                vec![-b, -a, 0.0, a, b],
                vec![wb, wa, 128.0 / 225.0, wa, wb],
            )
        }
        _ => unreachable!("collapsed rules are only built for n = 3, 4, 5"),
    };
    // Map [-1, 1] onto [0, 1]; weights then sum to one.
    let nodes = x.iter().map(|v| 0.5 * (v + 1.0)).collect();
    let weights = w.iter().map(|v| 0.5 * v).collect();
    (nodes, weights)
}
