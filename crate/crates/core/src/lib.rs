//! Continued fractions on the cone of positive-definite symmetric matrices.
//!
//! The crate is organized bottom-up:
//!
//! * [`jordan`]: the Jordan algebra of symmetric matrices, the cone and its
//!   order.
//! * [`division`]: the Cholesky division algorithm (`π`, `π*` and inverses)
//!   and the quadratic-representation quotient.
//! * [`contfrac`]: general and ordinary continued fractions, the unit
//!   fraction `[x_1, …, x_k]`, its difference sequence `w_k` and the
//!   operator-product closed forms.
//! * [`randmat`]: Wishart and beta-II sampling, multivariate gamma/beta.
//! * [`harness`]: randomized identity verification and the Monte Carlo
//!   convergence experiment.
//!
//! Batch workloads run through [`exec::Execution`]; with the `parallel`
//! feature (default) the parallel variant uses rayon, otherwise everything
//! runs sequentially.

pub mod contfrac;
mod dense;
pub mod division;
pub mod error;
pub mod exec;
pub mod harness;
pub mod io;
pub mod jordan;
pub mod randmat;

pub use error::{ConeError, Result};
pub use jordan::{ConeElement, Spectrum, SymMatrix};

/// Numerical tolerances shared across modules.
pub mod tol {
    /// Jacobi stopping threshold, relative to `1 + max |entry|`.
    pub const EIG_TOL: f64 = 1e-12;
    pub const MAX_SWEEPS: usize = 64;
    /// Open-cone membership margin, relative to `1 + ‖x‖`.
    pub const CONE_TOL: f64 = 1e-10;
    /// Closed-cone assertions in the monotonicity checks.
    pub const ASSERT_TOL: f64 = 1e-8;
    /// Constructor rejection threshold for asymmetric input.
    pub const SYMMETRY_TOL: f64 = 1e-9;
    /// Depth cap for the operator-product closed forms.
    pub const MAX_CLOSED_FORM_DEPTH: usize = 64;
}
