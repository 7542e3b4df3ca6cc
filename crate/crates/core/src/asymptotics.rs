//! Normalization polynomials and the strong asymptotics of `P_n`.
//!
//! `B̃_n` is the polynomial part of `A √(z²-4) log(ζ^{n+1} √(z²-4) P_n)` at
//! infinity, `B_n` the same for `log Δ_n`. The normalized polynomials
//! `ζ^{n+1} √(z²-4) P_n exp(-B̃_n / (A√(z²-4)))` converge to
//! `D(z) = exp(∫ dλ(x)/(x - z) / (A(z)√(z²-4)))`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cheb::{ChebUExpansion, LaurentSeries, PowerPoly};
use crate::jacobi::{truncation_trace_banded, FiniteTruncation, JacobiOperator};
use crate::orthopoly::{zeta, SpectralData};
use crate::quadrature::{CutQuadrature, Panels};
use crate::{Error, Result};

type C = Complex64;

/// `s_0 = -log(p_1⋯p_n)`, `s_k = -tr(J̃(n)^k - J̃_0(n)^k)/k` for `k ≤ K`.
///
/// The expansion drops `log(1 - ζ^{2n+2}) = O(z^{-2n-2})`, so `K ≤ 2n + 1` is required.
pub fn log_pn_series(j: &JacobiOperator, n: usize, k_max: usize) -> Result<LaurentSeries> {
    if n == 0 || k_max > 2 * n + 1 {
        return Err(Error::Truncation(format!("K = {k_max} needs 2n + 1 ≥ K with n = {n} ≥ 1")));
    }
    let t = j.finite_truncation(n)?;
    let t0 = FiniteTruncation::free(n);
    let mut coeffs = vec![-(1..=n as i64).map(|i| j.p(i).ln()).sum::<f64>()];
    for k in 1..=k_max {
        coeffs.push(-truncation_trace_banded(&t, &t0, k)? / k as f64);
    }
    Ok(LaurentSeries::new(0, coeffs))
}

/// `log Δ_n = -t_0 - Σ t_k / (k z^k)` truncated after `z^{-K}`.
pub fn log_delta_series(j: &JacobiOperator, k_max: usize) -> LaurentSeries {
    let t = j.traces(k_max);
    let coeffs = t.iter().enumerate().map(|(k, tk)| if k == 0 { -tk } else { -tk / k as f64 }).collect();
    LaurentSeries::new(0, coeffs)
}

/// `A(z) √(z²-4) s(z)` for a series `s` with top power 0.
fn weighted(a: &ChebUExpansion, s: &LaurentSeries) -> LaurentSeries {
    let len = s.len();
    let ap = LaurentSeries::from_poly(&a.to_power(), len);
    let sq = LaurentSeries::sqrt_z2m4(len);
    &(&ap * &sq) * s
}

/// A normalization polynomial with the negative-power tail left after removing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationPoly {
    pub n: usize,
    pub poly: PowerPoly,
    /// `A √(z²-4) log(...) - poly`, known on its retained powers `z^{-1}, z^{-2}, ...`.
    pub remainder: LaurentSeries,
}

impl NormalizationPoly {
    fn split(n: usize, product: LaurentSeries) -> Self {
        let poly = product.polynomial_part();
        let bottom = product.bottom();
        let coeffs: Vec<f64> = (bottom..=-1).rev().map(|k| product.coeff(k).unwrap_or(0.0)).collect();
        let remainder =
            if coeffs.is_empty() { LaurentSeries::new(-1, vec![0.0]) } else { LaurentSeries::new(-1, coeffs) };
        Self { n, poly, remainder }
    }

    /// Coefficient of `z^{-1}` in the remainder.
    pub fn inverse_z_coefficient(&self) -> f64 {
        self.remainder.coeff(-1).unwrap_or(0.0)
    }
}

/// `B̃_n`: polynomial part of `A √(z²-4) log(ζ^{n+1} √(z²-4) P_n)`, degree ≤ m + 1.
pub fn compute_b_tilde(j: &JacobiOperator, n: usize, a: &ChebUExpansion) -> Result<NormalizationPoly> {
    let m = a.degree().ok_or(Error::ZeroWeight)?;
    let k_max = (m + 3).min(2 * n + 1);
    if k_max < m + 1 {
        return Err(Error::Truncation(format!("n = {n} too small for a weight of degree {m}")));
    }
    let s = log_pn_series(j, n, k_max)?;
    Ok(NormalizationPoly::split(n, weighted(a, &s)))
}

/// `B_n`: polynomial part of `A √(z²-4) log Δ_n`; the remainder carries
/// `-∫dλ_n` as its `z^{-1}` coefficient.
pub fn compute_b(j: &JacobiOperator, a: &ChebUExpansion) -> Result<NormalizationPoly> {
    let m = a.degree().ok_or(Error::ZeroWeight)?;
    let s = log_delta_series(j, m + 4);
    Ok(NormalizationPoly::split(j.rank_index(), weighted(a, &s)))
}

/// `|L - B̃ / (A√(z²-4))|` coefficients on `z^0 .. z^{-(m+1)}`, which must vanish.
pub fn matching_defect(j: &JacobiOperator, n: usize, a: &ChebUExpansion, b: &PowerPoly) -> Result<f64> {
    let m = a.degree().ok_or(Error::ZeroWeight)?;
    let len = m + 2;
    let s = log_pn_series(j, n, m + 1)?;
    let den = &LaurentSeries::from_poly(&a.to_power(), len + 2) * &LaurentSeries::sqrt_z2m4(len + 2);
    let q = &LaurentSeries::from_poly(b, len + 2 + m) * &den.recip()?;
    let diff = &s + &q.scale(-1.0);
    Ok((-(m as i64 + 1)..=0).map(|k| diff.coeff(k).unwrap_or(f64::NAN).abs()).fold(0.0, f64::max))
}

/// Distance from `z` to `[-2, 2]`.
pub fn dist_to_cut(z: C) -> f64 {
    if z.re.abs() <= 2.0 {
        z.im.abs()
    } else {
        (z.re.abs() - 2.0).hypot(z.im)
    }
}

/// `√(z²-4)` on the branch asymptotic to `z`.
pub fn sqrt_z2m4(z: C) -> C {
    (z - 2.0).sqrt() * (z + 2.0).sqrt()
}

/// The limit function `D(z)` of a finite-rank operator, with quadrature state
/// reused across evaluation points.
pub struct LimitFunction<'a> {
    sd: &'a SpectralData,
    a: &'a ChebUExpansion,
    a_pow: PowerPoly,
    da_pow: PowerPoly,
    cut: CutQuadrature,
    panels: Panels,
}

impl<'a> LimitFunction<'a> {
    pub fn new(sd: &'a SpectralData, a: &'a ChebUExpansion, nodes: usize) -> Self {
        let a_pow = a.to_power();
        let da_pow = a_pow.derivative();
        Self { sd, a, a_pow, da_pow, cut: CutQuadrature::new(nodes), panels: Panels::default() }
    }

    /// `∫_0^{s_k} [A(x)S(x) - A(z)S(z)] / (x - z) · 2 sinh s ds` with
    /// `x = ±2cosh s`, `S(x) = ±2 sinh s`.
    fn difference_integral(&self, z: C, az_sz: C, sign: f64, s_max: f64) -> C {
        self.panels.integrate_complex(0.0, s_max, |s| {
            let x = sign * 2.0 * s.cosh();
            let sx = sign * 2.0 * s.sinh();
            let dx = x - z;
            let q = if dx.norm() < 1e-8 {
                // derivative of A(x)S(x)
                C::new(self.da_pow.eval_real(x) * sx + self.a_pow.eval_real(x) * x / sx, 0.0)
            } else {
                (self.a_pow.eval_real(x) * sx - az_sz) / dx
            };
            q * (2.0 * s.sinh())
        })
    }

    pub fn eval(&self, z: C) -> Result<C> {
        if dist_to_cut(z) < 1e-6 {
            return Err(Error::NearSupport { re: z.re, im: z.im });
        }
        let az_sz = self.a.eval(z) * sqrt_z2m4(z);
        if az_sz.norm() < 1e-12 {
            return Err(Error::Numerical(format!("A(z)√(z²-4) vanishes at {z}")));
        }
        let inside = self.cut.integrate_sqrt_weight(|theta| {
            let x = 2.0 * theta.cos();
            self.a.eval_real(x) * self.sd.u_on_cut(theta).norm().ln() / (x - z)
        }) / std::f64::consts::PI;
        let mut exponent = inside;
        let mut factor = C::new(1.0, 0.0);
        for &xk in &self.sd.eigs_plus {
            exponent += self.difference_integral(z, az_sz, 1.0, (xk / 2.0).acosh());
            factor *= (xk - z) / (2.0 - z);
        }
        for &xk in &self.sd.eigs_minus {
            exponent -= self.difference_integral(z, az_sz, -1.0, (-xk / 2.0).acosh());
            factor *= (xk - z) / (-2.0 - z);
        }
        Ok((exponent / az_sz).exp() * factor)
    }
}

/// `D(z)` for a single point.
pub fn d_of(sd: &SpectralData, a: &ChebUExpansion, z: C, nodes: usize) -> Result<C> {
    LimitFunction::new(sd, a, nodes).eval(z)
}

/// `ζ^{n+1} √(z²-4) P_n(z)`, bounded in `n`.
///
/// With `R_k = ζ^k P_k`, the value is `(1 - ζ²) R_n`. Up to the rank index `r`
/// the scaled recurrence is run directly; beyond it the recurrence is free and
/// `R_k = α + β ζ^{2k}`, which gives `(1 - ζ²) R_n = Δ - (R_r - R_{r-1}) ζ^{2(n-r+1)}`
/// without accumulating rounding over the free steps.
pub fn scaled_pn(j: &JacobiOperator, n: usize, z: C) -> Result<C> {
    let t = zeta(z)?;
    let t2 = t * t;
    let r = j.rank_index().max(1);
    let steps = n.min(r);
    let mut prev = C::new(0.0, 0.0);
    let mut cur = C::new(1.0, 0.0);
    for k in 0..steps {
        let ki = k as i64;
        let next = ((1.0 + t2 - t * j.q(ki)) * cur - prev * t2 * j.p(ki)) / j.p(ki + 1);
        prev = cur;
        cur = next;
    }
    if n < r {
        return Ok((1.0 - t2) * cur);
    }
    let delta = cur - t2 * prev;
    Ok(delta - (cur - prev) * t2.powi((n - r + 1) as i32))
}

/// Plain scaled recurrence for `ζ^{n+1} √(z²-4) P_n(z)`, all `n` steps.
pub fn scaled_pn_recurrence(j: &JacobiOperator, n: usize, z: C) -> Result<C> {
    let t = zeta(z)?;
    let t2 = t * t;
    let mut prev = C::new(0.0, 0.0);
    let mut cur = C::new(1.0, 0.0);
    for k in 0..n {
        let ki = k as i64;
        let next = ((1.0 + t2 - t * j.q(ki)) * cur - prev * t2 * j.p(ki)) / j.p(ki + 1);
        prev = cur;
        cur = next;
    }
    Ok((1.0 - t2) * cur)
}

/// `ζ^{n+1} √(z²-4) P_n(z) exp(-B̃_n(z) / (A(z)√(z²-4)))`.
pub fn normalized_pn(j: &JacobiOperator, n: usize, a: &ChebUExpansion, z: C) -> Result<C> {
    let b = compute_b_tilde(j, n, a)?;
    normalized_with(j, n, a, &b.poly, z)
}

fn normalized_with(j: &JacobiOperator, n: usize, a: &ChebUExpansion, b: &PowerPoly, z: C) -> Result<C> {
    let den = a.eval(z) * sqrt_z2m4(z);
    if den.norm() < 1e-12 {
        return Err(Error::Numerical(format!("A(z)√(z²-4) vanishes at {z}")));
    }
    Ok(scaled_pn(j, n, z)? * (-b.eval(z) / den).exp())
}

/// `|P_{n-1}(z) / (p_n P_n(z)) - ζ(z)|`.
pub fn ratio_error(j: &JacobiOperator, n: usize, z: C) -> Result<f64> {
    let t = zeta(z)?;
    let (p, _) = crate::orthopoly::eval_pq(j, n, z);
    Ok((p[n - 1] / (p[n] * j.p(n as i64)) - t).norm())
}

/// Lattice points `x + iy` with spacing `step` in `[-r, r]²`, kept when
/// `dist(z, [-2, 2]) ≥ min_dist` and `|z| ≤ r`.
pub fn lattice_grid(r: f64, step: f64, min_dist: f64) -> Vec<C> {
    let m = (r / step).floor() as i64;
    let mut out = Vec::new();
    for i in -m..=m {
        for k in -m..=m {
            let z = C::new(i as f64 * step, k as f64 * step);
            if z.norm() <= r + 1e-12 && dist_to_cut(z) >= min_dist - 1e-12 {
                out.push(z);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub sup_error: f64,
    pub errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub grid: Vec<(f64, f64)>,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// True when each sup-error is at most `(1 + jitter)` times its predecessor.
    pub fn is_monotone(&self, jitter: f64) -> bool {
        self.rows.windows(2).all(|w| w[1].sup_error <= (1.0 + jitter) * w[0].sup_error)
    }

    /// Largest ratio `sup_error[i+1] / sup_error[i]`.
    pub fn worst_ratio(&self) -> f64 {
        self.rows.windows(2).map(|w| w[1].sup_error / w[0].sup_error).fold(0.0, f64::max)
    }
}

/// Limit values `D(z)` on a grid.
pub fn limit_values(sd: &SpectralData, a: &ChebUExpansion, grid: &[C], nodes: usize) -> Result<Vec<C>> {
    let d = LimitFunction::new(sd, a, nodes);
    grid.iter().map(|&z| d.eval(z)).collect()
}

/// One row of the experiment: errors `|normalized P_n - D|` at every grid point.
pub fn experiment_row(
    j: &JacobiOperator,
    a: &ChebUExpansion,
    n: usize,
    grid: &[C],
    limits: &[C],
) -> Result<ConvergenceRow> {
    let b = compute_b_tilde(j, n, a)?;
    let errors = grid
        .iter()
        .zip(limits)
        .map(|(&z, &d)| Ok((normalized_with(j, n, a, &b.poly, z)? - d).norm()))
        .collect::<Result<Vec<f64>>>()?;
    let sup_error = errors.iter().copied().fold(0.0, f64::max);
    Ok(ConvergenceRow { n, sup_error, errors })
}

pub fn convergence_experiment(
    j: &JacobiOperator,
    a: &ChebUExpansion,
    ns: &[usize],
    grid: &[C],
    nodes: usize,
) -> Result<ConvergenceTable> {
    let sd = SpectralData::new(j)?;
    let limits = limit_values(&sd, a, grid, nodes)?;
    let rows = ns.iter().map(|&n| experiment_row(j, a, n, grid, &limits)).collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable { grid: grid.iter().map(|z| (z.re, z.im)).collect(), rows })
}
