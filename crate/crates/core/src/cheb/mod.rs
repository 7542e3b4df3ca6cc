//! Chebyshev algebra on [-2, 2] and truncated Laurent series at infinity.

mod basis;
mod laurent;

pub use basis::{eval_t, eval_u, phi_from_a, t_power_coeffs, textbook_u, u_power_coeffs, ChebUExpansion, PowerPoly};
pub use laurent::LaurentSeries;
