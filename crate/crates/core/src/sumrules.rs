//! The two sides of the weighted sum rule.
//!
//! `Λ_A` is assembled from spectral data: `Σ F(x_k)` over eigenvalues off the
//! cut plus `(1/π) ∫ log|u(x)| A(x) √(4 - x²) dx`, the form the log-integral
//! takes at finite rank. `H_A` is assembled from the coefficients, either as a
//! series of local terms `h_A ∘ τ^k` or through traces.

use serde::{Deserialize, Serialize};

use crate::cheb::{phi_from_a, ChebUExpansion};
use crate::jacobi::{JacobiOperator, Side};
use crate::orthopoly::SpectralData;
use crate::quadrature::CutQuadrature;
use crate::{Error, Result};

/// Default number of Gauss nodes for the log-integral.
pub const DEFAULT_NODES: usize = 2000;

const NONNEG_SAMPLES: usize = 10_000;

/// Rejects `A` if it dips below zero on a `10⁴`-point grid of `[-2, 2]`.
pub fn check_nonnegative(a: &ChebUExpansion) -> Result<()> {
    if a.is_zero() {
        return Err(Error::ZeroWeight);
    }
    let scale: f64 = a.coeffs().iter().map(|c| c.abs()).sum();
    let (min, at) = a.min_on_interval(NONNEG_SAMPLES);
    if min < -1e-12 * scale {
        return Err(Error::NegativeWeight { min, at });
    }
    Ok(())
}

/// `F(x) = ∫_2^x A(y) √(y² - 4) dy` for `x > 2`, `∫_x^{-2} ...` for `x < -2`.
///
/// With `y = 2 cosh s`, `A(y)√(y²-4) dy = 2 Σ c_l (cosh((l+1)s) - cosh((l-1)s)) ds`,
/// which integrates in closed form.
pub fn f_of(a: &ChebUExpansion, x: f64) -> Result<f64> {
    if x.abs() <= 2.0 || !x.is_finite() {
        return Err(Error::OnCut(x));
    }
    if x < 0.0 {
        return f_of(&a.reflect(), -x);
    }
    let s = (x / 2.0).acosh();
    let sinh_over = |k: usize| if k == 0 { s } else { (k as f64 * s).sinh() / k as f64 };
    Ok(a.terms().map(|(l, c)| 2.0 * c * (sinh_over(l + 1) - sinh_over(l - 1))).sum())
}

/// The density of `λ`: `(1/π) A √(4-x²) log|u|` inside the cut and
/// `A √(x²-4) · #{eigenvalues beyond x}` outside.
pub struct LambdaDensity<'a> {
    sd: &'a SpectralData,
    a: &'a ChebUExpansion,
}

impl LambdaDensity<'_> {
    pub fn eval(&self, x: f64) -> f64 {
        let av = self.a.eval_real(x);
        if x.abs() < 2.0 {
            let w = ((2.0 - x) * (2.0 + x)).sqrt();
            // log(√(4-x²) / (2π σ')) = 2 log|u|
            av * w * self.sd.log_abs_u(x) / std::f64::consts::PI
        } else {
            let count = if x > 2.0 {
                self.sd.eigs_plus.iter().filter(|&&y| y >= x).count()
            } else {
                self.sd.eigs_minus.iter().filter(|&&y| y <= x).count()
            };
            av * (x * x - 4.0).sqrt() * count as f64
        }
    }
}

pub fn lambda_density<'a>(sd: &'a SpectralData, a: &'a ChebUExpansion) -> LambdaDensity<'a> {
    LambdaDensity { sd, a }
}

/// `Λ_A` split into its eigenvalue and log-integral parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaParts {
    pub eigen_term: f64,
    pub log_integral_term: f64,
    pub value: f64,
}

pub fn lambda_a(sd: &SpectralData, a: &ChebUExpansion, nodes: usize) -> Result<LambdaParts> {
    check_nonnegative(a)?;
    let eigen_term = sd.eigs_plus.iter().chain(&sd.eigs_minus).map(|&x| f_of(a, x)).sum::<Result<f64>>()?;
    let rule = CutQuadrature::new(nodes);
    let log_integral_term =
        rule.integrate_sqrt_weight(|theta| {
            let x = 2.0 * theta.cos();
            num_complex::Complex64::new(sd.u_on_cut(theta).norm().ln() * a.eval_real(x), 0.0)
        })
        .re / std::f64::consts::PI;
    if !log_integral_term.is_finite() {
        return Err(Error::Numerical("log-integral is not finite".into()));
    }
    Ok(LambdaParts { eigen_term, log_integral_term, value: eigen_term + log_integral_term })
}

fn require_half(j: &JacobiOperator) -> Result<()> {
    match j.side() {
        Side::HalfLine => Ok(()),
        Side::WholeLine => Err(Error::NotHalfLine),
    }
}

/// `-a log p_{i+1} + ⟨{Φ(J) - Φ(J_0)} e_i, e_i⟩`.
fn local_term(j: &JacobiOperator, phi: &crate::PowerPoly, a: f64, i: i64) -> f64 {
    -a * j.p(i + 1).ln() + j.diag_entry_of_poly(phi, i)
}

/// `h_A ∘ τ^k = -a log p_{m+k+2} + ⟨{Φ(J) - Φ(J_0)} e_{m+k+1}, e_{m+k+1}⟩`.
pub fn h_a_at(j: &JacobiOperator, a_poly: &ChebUExpansion, k: usize) -> Result<f64> {
    require_half(j)?;
    let (phi, a) = phi_from_a(a_poly)?;
    let m = a_poly.degree().expect("nonzero weight");
    Ok(local_term(j, &phi, a, (m + k + 1) as i64))
}

/// Terms of the `H_A` series: the `m + 1` head terms, then `h_A ∘ τ^k` for
/// `k = 0..` until the operator is free beyond the local window.
pub fn h_a_terms(j: &JacobiOperator, a_poly: &ChebUExpansion) -> Result<Vec<f64>> {
    require_half(j)?;
    let (phi, a) = phi_from_a(a_poly)?;
    let m = a_poly.degree().expect("nonzero weight");
    // the diagonal entry at e_i only sees coefficients within deg Φ = m + 2 of i
    let last = j.rank_index() + m + 2;
    Ok((0..=last as i64).map(|i| local_term(j, &phi, a, i)).collect())
}

/// `H_A` by its series; `cap` keeps only the head and the first `cap` tail terms.
pub fn h_a(j: &JacobiOperator, a_poly: &ChebUExpansion, cap: Option<usize>) -> Result<f64> {
    let terms = h_a_terms(j, a_poly)?;
    let m = a_poly.degree().expect("nonzero weight");
    let keep = cap.map_or(terms.len(), |c| (m + 1 + c).min(terms.len()));
    Ok(terms[..keep].iter().sum())
}

/// `-a t_0 + tr{Φ(J) - Φ(J_0)}`, the trace form of `H_A` (either side).
pub fn h_via_trace(j: &JacobiOperator, a_poly: &ChebUExpansion) -> Result<f64> {
    let (phi, a) = phi_from_a(a_poly)?;
    let d = phi.degree().unwrap_or(0);
    let t = j.traces(d);
    let tr: f64 = phi.coeffs().iter().zip(&t).skip(1).map(|(c, tk)| c * tk).sum();
    Ok(-a * t[0] + tr)
}

/// `Σ (p_k² - 1 - log p_k²) + ½ Σ q_k²`, without any additive constant.
pub fn killip_simon_h(j: &JacobiOperator) -> f64 {
    let p: f64 = j.nonfree_p().map(|(_, v)| v * v - 1.0 - (v * v).ln()).sum();
    let q: f64 = j.nonfree_q().map(|(_, v)| v * v).sum();
    p + 0.5 * q
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumRuleReport {
    pub lambda_value: f64,
    pub h_value: f64,
    pub h_trace_value: f64,
    pub eigen_term: f64,
    pub log_integral_term: f64,
    pub residual: f64,
    pub quadrature_nodes: usize,
    #[serde(rename = "A")]
    pub a: ChebUExpansion,
    pub pass: bool,
}

impl SumRuleReport {
    pub fn tolerance(&self) -> f64 {
        1e-6 * (1.0 + self.lambda_value.abs())
    }
}

/// Evaluates both sides and compares them.
pub fn verify_sum_rule(j: &JacobiOperator, a: &ChebUExpansion, nodes: usize) -> Result<SumRuleReport> {
    require_half(j)?;
    let sd = SpectralData::new(j)?;
    let lam = lambda_a(&sd, a, nodes)?;
    let h_value = h_a(j, a, None)?;
    let h_trace_value = h_via_trace(j, a)?;
    let residual = (h_value - lam.value).abs();
    Ok(SumRuleReport {
        lambda_value: lam.value,
        h_value,
        h_trace_value,
        eigen_term: lam.eigen_term,
        log_integral_term: lam.log_integral_term,
        residual,
        quadrature_nodes: nodes,
        a: a.clone(),
        pass: residual <= 1e-6 * (1.0 + lam.value.abs()),
    })
}
