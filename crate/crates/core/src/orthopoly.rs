//! Orthonormal polynomials, the resolvent of `J(n)` and its spectral data.
//!
//! For a half-line operator of rank index `n`, everything is expressed through
//! `u(z) = p_n P_n(z) - ζ(z) P_{n-1}(z)` (with `p_n = 1`) and the perturbation
//! determinant `Δ(z) = u(z) ζ^n`. In the variable `ζ`, `Δ` is a polynomial,
//! which is how eigenvalues are located.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::jacobi::{JacobiOperator, Side};
use crate::quadrature::CutQuadrature;
use crate::{Error, Result};

type C = Complex64;

/// `ζ(z)`, the root of `ζ + 1/ζ = z` in the unit disc, for `z ∉ [-2, 2]`.
pub fn zeta(z: C) -> Result<C> {
    if z.im == 0.0 && z.re.abs() <= 2.0 {
        return Err(Error::OnCut(z.re));
    }
    // √(z-2)·√(z+2) with principal roots behaves like z at infinity and
    // jumps only across [-2, 2].
    let s = (z - 2.0).sqrt() * (z + 2.0).sqrt();
    Ok(2.0 / (z + s))
}

/// Boundary value `ζ(x + i0) = e^{-iθ}`, `x = 2cos θ`, `θ ∈ [0, π]`.
pub fn zeta_boundary(x: f64) -> Result<C> {
    if x.abs() > 2.0 {
        return Err(Error::Numerical(format!("{x} is off the cut")));
    }
    let sin = ((2.0 - x) * (2.0 + x)).sqrt() / 2.0;
    Ok(C::new(x / 2.0, -sin))
}

/// Rank index used for `u`: at least 1, so that `J_0` gives `u = z - ζ = 1/ζ`.
pub fn rank_of(j: &JacobiOperator) -> usize {
    j.rank_index().max(1)
}

fn require_half(j: &JacobiOperator) -> Result<()> {
    match j.side() {
        Side::HalfLine => Ok(()),
        Side::WholeLine => Err(Error::NotHalfLine),
    }
}

/// `P_0..P_n` and `Q_0..Q_n` at `z`.
pub fn eval_pq(j: &JacobiOperator, n: usize, z: C) -> (Vec<C>, Vec<C>) {
    let mut p = vec![C::new(1.0, 0.0)];
    let mut q = vec![C::new(0.0, 0.0)];
    for k in 0..n {
        let ki = k as i64;
        let next = ((z - j.q(ki)) * p[k] - if k > 0 { p[k - 1] * j.p(ki) } else { C::new(0.0, 0.0) }) / j.p(ki + 1);
        p.push(next);
        let qn =
            if k == 0 { C::new(1.0 / j.p(1), 0.0) } else { ((z - j.q(ki)) * q[k] - q[k - 1] * j.p(ki)) / j.p(ki + 1) };
        q.push(qn);
    }
    (p, q)
}

/// `u`, the numerator `N = p_n Q_n - ζ Q_{n-1}` and `du/dz` at one point.
#[derive(Debug, Clone, Copy)]
pub struct UData {
    pub zeta: C,
    pub u: C,
    pub numerator: C,
    pub du: C,
}

/// Evaluates `u`, `N` and `u'` with an explicitly supplied `ζ` (so boundary
/// values can be used on the cut).
pub fn u_data(j: &JacobiOperator, z: C, zeta: C) -> UData {
    let n = rank_of(j);
    let (p, q) = eval_pq(j, n, z);
    // derivative recurrence: p_{k+1} P'_{k+1} = P_k + (z - q_k) P'_k - p_k P'_{k-1}
    let mut dp = vec![C::new(0.0, 0.0); n + 1];
    for k in 0..n {
        let ki = k as i64;
        let prev = if k > 0 { dp[k - 1] * j.p(ki) } else { C::new(0.0, 0.0) };
        dp[k + 1] = (p[k] + (z - j.q(ki)) * dp[k] - prev) / j.p(ki + 1);
    }
    let dzeta = zeta * zeta / (zeta * zeta - 1.0);
    UData {
        zeta,
        u: p[n] - zeta * p[n - 1],
        numerator: q[n] - zeta * q[n - 1],
        du: dp[n] - dzeta * p[n - 1] - zeta * dp[n - 1],
    }
}

/// `u(z) = p_n P_n(z) - ζ(z) P_{n-1}(z)` for `z` off the cut.
pub fn u_of(j: &JacobiOperator, z: C) -> Result<C> {
    Ok(u_data(j, z, zeta(z)?).u)
}

/// `r(n)(z) = ⟨(J(n) - z)^{-1} e_0, e_0⟩ = -N/u`.
pub fn resolvent_rn(j: &JacobiOperator, z: C) -> Result<C> {
    require_half(j)?;
    let d = u_data(j, z, zeta(z)?);
    if d.u.norm() <= 1e-13 * (1.0 + d.numerator.norm()) {
        return Err(Error::AtPole(z.re));
    }
    Ok(-d.numerator / d.u)
}

/// Absolutely continuous density `σ'(x) = sin θ / (π |u(x + i0)|²)` on `(-2, 2)`;
/// zero outside the open interval.
pub fn ac_density(j: &JacobiOperator, x: f64) -> f64 {
    if x.abs() >= 2.0 {
        return 0.0;
    }
    let zb = zeta_boundary(x).expect("inside the cut");
    let u = u_data(j, C::new(x, 0.0), zb).u;
    -zb.im / (PI * u.norm_sqr())
}

/// `Δ` as a function of `t = ζ`, via `R_k = ζ^k P_k`:
/// `p_{k+1} R_{k+1} = (1 + t² - t q_k) R_k - p_k t² R_{k-1}`, `Δ = R_n - t² R_{n-1}`.
pub fn delta_of_zeta(j: &JacobiOperator, t: C) -> C {
    let n = rank_of(j);
    let t2 = t * t;
    let mut prev = C::new(0.0, 0.0);
    let mut cur = C::new(1.0, 0.0);
    for k in 0..n {
        let ki = k as i64;
        let next = ((1.0 + t2 - t * j.q(ki)) * cur - prev * t2 * j.p(ki)) / j.p(ki + 1);
        prev = cur;
        cur = next;
    }
    cur - t2 * prev
}

fn delta_real(j: &JacobiOperator, t: f64) -> f64 {
    delta_of_zeta(j, C::new(t, 0.0)).re
}

/// `Δ_n(z) = (p_n P_n(z) - ζ P_{n-1}(z)) ζ^n`.
pub fn delta_direct(j: &JacobiOperator, z: C) -> Result<C> {
    require_half(j)?;
    Ok(delta_of_zeta(j, zeta(z)?))
}

/// Truncated trace expansion of `log Δ_n` at infinity.
#[derive(Debug, Clone, Copy)]
pub struct DeltaSeries {
    pub log_value: C,
    pub value: C,
    /// Size estimate of the first omitted term, `W (R/|z|)^{K+1} / (1 - R/|z|)`
    /// with `W` the number of rows carrying nonzero trace contributions.
    pub error_bound: f64,
}

/// `exp(-t_0 - Σ_{k=1}^K t_k / (k z^k))`.
pub fn delta_via_traces(j: &JacobiOperator, z: C, k_max: usize) -> Result<DeltaSeries> {
    require_half(j)?;
    let r = j.gershgorin_radius();
    if z.norm() <= r {
        return Err(Error::InsideConvergenceRadius { abs: z.norm(), bound: r });
    }
    let t = j.traces(k_max);
    let w = 1.0 / z;
    let mut wk = C::new(1.0, 0.0);
    let mut log_value = C::new(-t[0], 0.0);
    for (k, tk) in t.iter().enumerate().skip(1) {
        wk *= w;
        log_value -= wk * (*tk / k as f64);
    }
    let ratio = r / z.norm();
    let rows = j.trace_window(k_max).count().max(1) as f64;
    Ok(DeltaSeries {
        log_value,
        value: log_value.exp(),
        error_bound: 2.0 * rows * ratio.powi(k_max as i32 + 1) / (1.0 - ratio),
    })
}

/// Sign changes of `Δ(t)` on `[a, b]` with `m` cells, ignoring exact zeros at `b`.
fn bracket_roots(j: &JacobiOperator, a: f64, b: f64, m: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let h = (b - a) / m as f64;
    let mut x0 = a;
    let mut f0 = delta_real(j, x0);
    for i in 1..=m {
        let x1 = if i == m { b } else { a + h * i as f64 };
        let f1 = delta_real(j, x1);
        if f0 == 0.0 {
            if i == 1 {
                out.push((x0, x0));
            }
        } else if f1 != 0.0 && f0.signum() != f1.signum() {
            out.push((x0, x1));
        } else if f1 == 0.0 && i < m {
            out.push((x1, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    out
}

fn bisect(j: &JacobiOperator, mut lo: f64, mut hi: f64) -> f64 {
    if lo == hi {
        return lo;
    }
    let mut flo = delta_real(j, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = delta_real(j, mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Roots of `Δ` in `ζ ∈ [a, b] ⊂ (0, 1]` (or its mirror), refining the scan
/// grid until the count is stable across two refinements.
fn roots_in(j: &JacobiOperator, a: f64, b: f64) -> Vec<f64> {
    let mut m = ((b - a) / 0.01).ceil().max(1.0) as usize;
    let mut counts = Vec::new();
    let mut brackets = bracket_roots(j, a, b, m);
    counts.push(brackets.len());
    loop {
        m *= 2;
        let next = bracket_roots(j, a, b, m);
        counts.push(next.len());
        brackets = next;
        let l = counts.len();
        if l >= 3 && counts[l - 1] == counts[l - 2] && counts[l - 2] == counts[l - 3] {
            break;
        }
        if m > 1 << 22 {
            break;
        }
    }
    brackets.into_iter().map(|(lo, hi)| bisect(j, lo, hi)).collect()
}

/// Eigenvalues of a finite-rank half-line `J` in `(2, ∞)` and `(-∞, -2)`, each
/// sorted increasingly.
pub fn eigenvalues_outside(j: &JacobiOperator) -> Result<(Vec<f64>, Vec<f64>)> {
    require_half(j)?;
    if j.is_free() {
        return Ok((Vec::new(), Vec::new()));
    }
    let r = j.gershgorin_radius() + 0.5;
    let t_min = zeta(C::new(r, 0.0))?.re;
    let to_x = |t: f64| t + 1.0 / t;
    let mut plus: Vec<f64> = roots_in(j, t_min, 1.0).into_iter().filter(|&t| t < 1.0).map(to_x).collect();
    let mut minus: Vec<f64> = roots_in(j, -1.0, -t_min).into_iter().filter(|&t| t > -1.0).map(to_x).collect();
    plus.sort_by(f64::total_cmp);
    minus.sort_by(f64::total_cmp);
    Ok((plus, minus))
}

/// Masses `w_k = N(x_k) / u'(x_k)` of the eigenvalues.
pub fn point_mass_weights(j: &JacobiOperator, eigs: &[f64]) -> Result<Vec<f64>> {
    eigs.iter()
        .map(|&x| {
            let z = C::new(x, 0.0);
            let d = u_data(j, z, zeta(z)?);
            if d.du.norm() < 1e-8 {
                return Err(Error::Numerical(format!("u'(x) vanishes at eigenvalue {x}: not a simple zero")));
            }
            let w = (d.numerator / d.du).re;
            if w.is_nan() || w <= 0.0 {
                return Err(Error::Numerical(format!("non-positive weight {w} at eigenvalue {x}")));
            }
            Ok(w)
        })
        .collect()
}

/// Spectral data of a finite-rank half-line Jacobi operator.
#[derive(Debug, Clone)]
pub struct SpectralData {
    source: JacobiOperator,
    pub n: usize,
    pub eigs_plus: Vec<f64>,
    pub eigs_minus: Vec<f64>,
    pub weights_plus: Vec<f64>,
    pub weights_minus: Vec<f64>,
}

impl SpectralData {
    pub fn new(j: &JacobiOperator) -> Result<Self> {
        require_half(j)?;
        let (eigs_plus, eigs_minus) = eigenvalues_outside(j)?;
        let weights_plus = point_mass_weights(j, &eigs_plus)?;
        let weights_minus = point_mass_weights(j, &eigs_minus)?;
        Ok(Self { source: j.clone(), n: rank_of(j), eigs_plus, eigs_minus, weights_plus, weights_minus })
    }

    pub fn source(&self) -> &JacobiOperator {
        &self.source
    }

    pub fn ac_density(&self, x: f64) -> f64 {
        ac_density(&self.source, x)
    }

    /// `u(x + i0)` at `x = 2cos θ`, `θ ∈ [0, π]`.
    pub fn u_on_cut(&self, theta: f64) -> C {
        let zb = C::new(theta.cos(), -theta.sin());
        u_data(&self.source, C::new(2.0 * theta.cos(), 0.0), zb).u
    }

    /// `log |u(x + i0)|` on the cut.
    pub fn log_abs_u(&self, x: f64) -> f64 {
        let zb = zeta_boundary(x.clamp(-2.0, 2.0)).expect("clamped to the cut");
        u_data(&self.source, C::new(x, 0.0), zb).u.norm().ln()
    }

    /// All eigenvalues with their weights, increasing in `x`.
    pub fn point_masses(&self) -> Vec<(f64, f64)> {
        self.eigs_minus
            .iter()
            .zip(&self.weights_minus)
            .chain(self.eigs_plus.iter().zip(&self.weights_plus))
            .map(|(&x, &w)| (x, w))
            .collect()
    }

    /// `∫ f dσ` with the a.c. part integrated by `rule`.
    ///
    /// The density is `√(4 - x²) / (2π |u|²)`, so the rule's weight factors out exactly.
    pub fn integrate(&self, rule: &CutQuadrature, f: impl Fn(f64) -> C) -> C {
        let ac = rule.integrate_sqrt_weight(|theta| {
            let u = self.u_on_cut(theta);
            f(2.0 * theta.cos()) / (2.0 * PI * u.norm_sqr())
        });
        let pp: C = self.point_masses().iter().map(|&(x, w)| f(x) * w).sum();
        ac + pp
    }

    pub fn total_mass(&self, rule: &CutQuadrature) -> f64 {
        self.integrate(rule, |_| C::new(1.0, 0.0)).re
    }

    /// `∫ x^k dσ`.
    pub fn moment(&self, k: i32, rule: &CutQuadrature) -> f64 {
        self.integrate(rule, |x| C::new(x.powi(k), 0.0)).re
    }

    /// `∫ dσ(x) / (x - z)`.
    pub fn stieltjes(&self, z: C, rule: &CutQuadrature) -> C {
        self.integrate(rule, |x| 1.0 / (x - z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheb::eval_u;

    fn c(x: f64) -> C {
        C::new(x, 0.0)
    }

    fn rank1(v: f64) -> JacobiOperator {
        JacobiOperator::half_line([], [(0, v)]).unwrap()
    }

    #[test]
    fn zeta_values() {
        assert!((zeta(c(2.5)).unwrap() - c(0.5)).norm() < 1e-15);
        assert!((zeta(c(-2.5)).unwrap() - c(-0.5)).norm() < 1e-15);
        assert!((zeta(C::new(-2.5, -0.0)).unwrap() - c(-0.5)).norm() < 1e-15);
        // Newton on ζ² - zζ + 1 = 0 from ζ = 1/z
        let mut t = 0.1;
        for _ in 0..50 {
            t -= (t * t - 10.0 * t + 1.0) / (2.0 * t - 10.0);
        }
        assert!((zeta(c(10.0)).unwrap().re - t).abs() < 1e-15);
        assert!(matches!(zeta(c(1.0)), Err(Error::OnCut(_))));
        for &z in &[C::new(0.3, 1e-9), C::new(-1.9, -0.4), C::new(5.0, 3.0), C::new(0.0, -7.0)] {
            let t = zeta(z).unwrap();
            assert!(t.norm() < 1.0);
            assert!((t + 1.0 / t - z).norm() < 1e-13 * (1.0 + z.norm()));
        }
    }

    #[test]
    fn boundary_branch() {
        let t = zeta_boundary(0.0).unwrap();
        assert!((t - C::new(0.0, -1.0)).norm() < 1e-15);
        // limit from the upper half plane
        let up = zeta(C::new(1.3, 1e-10)).unwrap();
        assert!((up - zeta_boundary(1.3).unwrap()).norm() < 1e-8);
    }

    #[test]
    fn free_polynomials_are_chebyshev() {
        let j = JacobiOperator::free(Side::HalfLine);
        let z = C::new(0.7, 0.3);
        let (p, q) = eval_pq(&j, 8, z);
        for n in 0..=8 {
            assert!((p[n] - eval_u(n + 1, z)).norm() < 1e-12);
            assert!((q[n] - eval_u(n, z)).norm() < 1e-12);
        }
    }

    #[test]
    fn first_polynomial_and_leading_coefficient() {
        let j = rank1(0.8);
        let (p, _) = eval_pq(&j, 1, c(3.0));
        assert!((p[1].re - 2.2).abs() < 1e-15);

        let j = JacobiOperator::from_coefficients(&[0.1, -0.2, 0.3], &[1.2, 0.7]).unwrap();
        let big = 1e6;
        let (p, _) = eval_pq(&j, 3, c(big));
        let lead = p[3].re / big.powi(3);
        assert!((lead - 1.0 / (1.2 * 0.7)).abs() < 1e-5);
    }

    #[test]
    fn free_chain() {
        let j = JacobiOperator::free(Side::HalfLine);
        for &z in &[c(2.5), C::new(0.2, 1.0), c(-7.0)] {
            assert!((delta_direct(&j, z).unwrap() - 1.0).norm() < 1e-14);
            assert!((resolvent_rn(&j, z).unwrap() + zeta(z).unwrap()).norm() < 1e-14);
        }
        assert!((resolvent_rn(&j, c(2.5)).unwrap() - c(-0.5)).norm() < 1e-15);
        for &x in &[-1.5f64, 0.0, 0.4, 1.99] {
            let want = (4.0 - x * x).sqrt() / (2.0 * PI);
            assert!((ac_density(&j, x) - want).abs() < 1e-15);
        }
        let (p, m) = eigenvalues_outside(&j).unwrap();
        assert!(p.is_empty() && m.is_empty());
        assert!((delta_via_traces(&j, c(9.0), 5).unwrap().value - 1.0).norm() < 1e-15);
    }

    #[test]
    fn rank_one_spectrum() {
        let j = rank1(1.5);
        let (p, m) = eigenvalues_outside(&j).unwrap();
        assert!(m.is_empty());
        assert_eq!(p.len(), 1);
        assert!((p[0] - 13.0 / 6.0).abs() < 1e-12);
        let w = point_mass_weights(&j, &p).unwrap();
        assert!((w[0] - (1.0 - 1.0 / 2.25)).abs() < 1e-12);
        assert!(eigenvalues_outside(&rank1(0.5)).unwrap().0.is_empty());
        let (_, m) = eigenvalues_outside(&rank1(-1.5)).unwrap();
        assert!((m[0] + 13.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_density_and_delta() {
        let v = 0.6;
        let j = rank1(v);
        assert!((ac_density(&j, 0.0) - 1.0 / (PI * (1.0 + v * v))).abs() < 1e-15);
        let z = c(10.0);
        let t = zeta(z).unwrap();
        let want = (z - v - t) * t;
        assert!((delta_direct(&j, z).unwrap() - want).norm() < 1e-15);
        let s = delta_via_traces(&j, z, 12).unwrap();
        assert!((s.value - want).norm() < 1e-10);
    }

    #[test]
    fn boundary_modulus() {
        let j = JacobiOperator::from_coefficients(&[0.3, -0.4, 0.2], &[1.3, 0.8]).unwrap();
        for i in 0..10 {
            let x = -1.9 + 0.4 * i as f64;
            let zb = zeta_boundary(x).unwrap();
            let d = delta_of_zeta(&j, zb);
            let lhs = d.norm_sqr();
            let rhs = (4.0 - x * x).sqrt() / (2.0 * PI) / ac_density(&j, x);
            assert!((lhs - rhs).abs() < 1e-12 * rhs, "x={x}");
        }
    }

    #[test]
    fn density_even_without_diagonal() {
        let j = JacobiOperator::half_line([(1, 1.4), (2, 0.6), (3, 1.1)], []).unwrap();
        for &x in &[0.3, 1.1, 1.7] {
            assert!((ac_density(&j, x) - ac_density(&j, -x)).abs() < 1e-14);
        }
    }

    #[test]
    fn resolvent_at_infinity() {
        let j = JacobiOperator::from_coefficients(&[0.3, -0.4], &[1.3]).unwrap();
        let z = c(1e5);
        let r = resolvent_rn(&j, z).unwrap();
        assert!((r * z + 1.0).norm() < 1e-4);
    }

    #[test]
    fn pole_is_signaled() {
        let j = rank1(1.5);
        assert!(matches!(resolvent_rn(&j, c(13.0 / 6.0)), Err(Error::AtPole(_))));
    }
}
