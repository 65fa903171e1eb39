//! Finite element solver for N-species competition dynamics of the form
//!
//! ```text
//! du_i/dt = d_i lap(u_i) - beta_i div(u_i grad K)
//!           + r_i u_i (1 - gamma_i - (1/K) sum_j u_j) + f_i      on (0,T] x Omega
//! ```
//!
//! where `K(t,x)` is a shared carrying capacity, `d_i` diffusion, `beta_i`
//! advection toward resources, `r_i` intrinsic growth and `gamma_i` a
//! harvesting (`gamma > 0`) or stocking (`gamma < 0`) fraction of growth.
//!
//! Space is discretized with P1/P2 Lagrange elements on structured
//! triangulations of a rectangle; time with one of two decoupled linearized
//! schemes (backward Euler and BDF2) in which the inter-species coupling is
//! lagged, so each species solves an independent linear system per step.
//!
//! The crate ships a manufactured-solution verification harness
//! ([`mms`], [`analysis::convergence_study`]) and ecological scenario presets
//! with CSV output ([`presets`], [`output`]).

pub mod analysis;
pub mod assemble;
pub mod coeffs;
pub mod config;
pub mod error;
pub mod expr;
pub mod mesh;
pub mod mms;
pub mod output;
pub mod presets;
pub mod quadrature;
pub mod solver;
pub mod space;
pub mod sparse;
pub mod stepping;

pub use coeffs::ScalarField;
pub use error::{Error, Result};
pub use mesh::Mesh;
pub use space::{FESpace, Field};
pub use sparse::SparseMatrix;
pub use stepping::{Boundary, Problem, Scheme, SpeciesParams};
