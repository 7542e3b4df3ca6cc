//! Sum rules for Jacobi matrices on the interval [-2, 2].
//!
//! The crate computes both sides of the weighted Killip–Simon sum rule for
//! finite-rank perturbations of the free Jacobi matrix `J0 = S + S*`:
//!
//! - the *spectral* side `Λ_A(J)`, built from the absolutely continuous density
//!   of the spectral measure on (-2, 2) and the eigenvalues outside [-2, 2];
//! - the *coefficient* side `H_A(J)`, a finite sum of local functions of the
//!   recurrence coefficients `p_k`, `q_k`.
//!
//! Around that core sit the perturbation determinant and its trace expansion,
//! normalized orthonormal-polynomial asymptotics, and the whole-line Chebyshev
//! functional calculus used for the `A = U_l^2` family.
//!
//! Conventions follow the second-kind Chebyshev basis on [-2, 2]:
//! `U_l(ζ + 1/ζ) = (ζ^{-l} - ζ^l) / (ζ^{-1} - ζ)` (degree `l - 1`, `U_1 = 1`) and
//! `T_l = ζ^{-l} + ζ^l` (`T_0 = 2`). Weight polynomials `A` are passed as
//! [`ChebUExpansion`]s in that basis.
//!
//! ```
//! use sumrule_core::{cheb::ChebUExpansion, jacobi::JacobiOperator, sumrules};
//!
//! let j = JacobiOperator::half_line([], [(0, 1.5)]).unwrap();
//! let a = ChebUExpansion::one();
//! let report = sumrules::verify_sum_rule(&j, &a, 2000).unwrap();
//! assert!(report.pass);
//! assert!((report.h_value - 1.125).abs() < 1e-12);
//! ```

#![forbid(unsafe_code)]

pub mod asymptotics;
pub mod cheb;
pub mod ensemble;
pub mod jacobi;
pub mod lns;
pub mod orthopoly;
pub mod quadrature;
pub mod sumrules;

pub use cheb::{ChebUExpansion, LaurentSeries, PowerPoly};
pub use jacobi::{JacobiOperator, Side};
pub use orthopoly::SpectralData;
pub use sumrules::SumRuleReport;

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("the zero polynomial is not a valid weight")]
    ZeroWeight,

    #[error("weight polynomial is negative on [-2, 2] (min {min:.3e} at x = {at})")]
    NegativeWeight { min: f64, at: f64 },

    #[error("point {0} lies on the cut [-2, 2]")]
    OnCut(f64),

    #[error("point {re}+{im}i is too close to the support of the measure")]
    NearSupport { re: f64, im: f64 },

    #[error("|z| = {abs} is inside the series convergence bound {bound}")]
    InsideConvergenceRadius { abs: f64, bound: f64 },

    #[error("z = {0} is an eigenvalue (pole of the resolvent)")]
    AtPole(f64),

    #[error("log of a series with vanishing leading coefficient")]
    SeriesLogSingular,

    #[error("series truncation: {0}")]
    Truncation(String),

    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("shift identity needs n ≥ l - 1, got n = {n}, l - 1 = {lm1}")]
    LemmaHypothesis { n: i64, lm1: i64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("operation requires a half-line operator")]
    NotHalfLine,

    #[error("operation requires a whole-line operator")]
    NotWholeLine,

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = core::result::Result<T, Error>;
