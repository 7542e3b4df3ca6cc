use std::fmt;
use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Evaluates `U_l(z)` by the three-term recurrence `U_{l+1} = z U_l - U_{l-1}`,
/// `U_0 = 0`, `U_1 = 1`.
pub fn eval_u(l: usize, z: Complex64) -> Complex64 {
    let (mut prev, mut cur) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    if l == 0 {
        return prev;
    }
    for _ in 1..l {
        let next = z * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Evaluates `T_l(z)` with `T_0 = 2`, `T_1 = z`.
pub fn eval_t(l: usize, z: Complex64) -> Complex64 {
    let (mut prev, mut cur) = (Complex64::new(2.0, 0.0), z);
    if l == 0 {
        return prev;
    }
    for _ in 1..l {
        let next = z * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Textbook second-kind Chebyshev polynomial `U_k(x)` on [-1, 1].
///
/// Relation to the basis used everywhere else in this crate: `U^tb_k(x) = U_{k+1}(2x)`.
pub fn textbook_u(k: usize, x: f64) -> f64 {
    eval_u(k + 1, Complex64::new(2.0 * x, 0.0)).re
}

/// Monomial coefficients of `U_l`, lowest degree first.
pub fn u_power_coeffs(l: usize) -> Vec<f64> {
    chebyshev_power_coeffs(l, vec![0.0], vec![1.0])
}

/// Monomial coefficients of `T_l`, lowest degree first.
pub fn t_power_coeffs(l: usize) -> Vec<f64> {
    chebyshev_power_coeffs(l, vec![2.0], vec![0.0, 1.0])
}

fn chebyshev_power_coeffs(l: usize, p0: Vec<f64>, p1: Vec<f64>) -> Vec<f64> {
    if l == 0 {
        return p0;
    }
    let (mut prev, mut cur) = (p0, p1);
    for _ in 1..l {
        let mut next = vec![0.0; cur.len() + 1];
        for (k, c) in cur.iter().enumerate() {
            next[k + 1] += c;
        }
        for (k, c) in prev.iter().enumerate() {
            next[k] -= c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// A real polynomial in the monomial basis, `Σ a_k z^k`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PowerPoly {
    coeffs: Vec<f64>,
}

impl PowerPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// Coefficients `a_0..a_d`; empty for the zero polynomial.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect())
    }

    /// Antiderivative vanishing at the origin.
    pub fn antiderivative(&self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k + 1] = c / (k + 1) as f64;
        }
        Self::new(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }
}

impl Add for &PowerPoly {
    type Output = PowerPoly;

    fn add(self, rhs: &PowerPoly) -> PowerPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PowerPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Mul for &PowerPoly {
    type Output = PowerPoly;

    fn mul(self, rhs: &PowerPoly) -> PowerPoly {
        if self.is_zero() || rhs.is_zero() {
            return PowerPoly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PowerPoly::new(out)
    }
}

/// A real polynomial expanded as `Σ_{l≥1} c_l U_l`.
///
/// Stored densely: `coeffs[l - 1] = c_l`, with trailing zeros trimmed so that a
/// polynomial of degree `m` stores exactly `m + 1` coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ChebUExpansion {
    coeffs: Vec<f64>,
}

impl ChebUExpansion {
    /// Builds `Σ coeffs[i] U_{i+1}`.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_terms(terms: &[(usize, f64)]) -> Self {
        let len = terms.iter().map(|&(l, _)| l).max().unwrap_or(0);
        let mut coeffs = vec![0.0; len];
        for &(l, c) in terms {
            assert!(l >= 1, "U-index starts at 1");
            coeffs[l - 1] += c;
        }
        Self::new(coeffs)
    }

    /// The constant weight `A = 1 = U_1`.
    pub fn one() -> Self {
        Self::basis(1)
    }

    pub fn basis(l: usize) -> Self {
        Self::from_terms(&[(l, 1.0)])
    }

    /// `U_l^2`.
    pub fn u_squared(l: usize) -> Self {
        let u = Self::basis(l);
        u.u_product(&u)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `c_l`, zero when `l` is out of range.
    pub fn coeff(&self, l: usize) -> f64 {
        if l == 0 {
            return 0.0;
        }
        self.coeffs.get(l - 1).copied().unwrap_or(0.0)
    }

    /// Polynomial degree `m` (highest `l` minus one); `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| **c != 0.0).map(|(i, &c)| (i + 1, c))
    }

    /// Clenshaw-free evaluation: runs the `U` recurrence once and accumulates.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let (mut prev, mut cur) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        for &c in &self.coeffs {
            acc += cur * c;
            let next = z * cur - prev;
            prev = cur;
            cur = next;
        }
        acc
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        let (mut prev, mut cur) = (0.0, 1.0);
        for &c in &self.coeffs {
            acc += cur * c;
            let next = x * cur - prev;
            prev = cur;
            cur = next;
        }
        acc
    }

    pub fn to_power(&self) -> PowerPoly {
        let mut out = vec![0.0; self.coeffs.len()];
        for (l, c) in self.terms() {
            for (k, u) in u_power_coeffs(l).into_iter().enumerate() {
                out[k] += c * u;
            }
        }
        PowerPoly::new(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Expansion of `A(-z)`; uses `U_l(-z) = (-1)^{l-1} U_l(z)`.
    pub fn reflect(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().map(|(i, &c)| if i % 2 == 0 { c } else { -c }).collect())
    }

    /// Pointwise product, linearized with
    /// `U_m U_n = Σ_{k = |m-n|+1, step 2}^{m+n-1} U_k`.
    pub fn u_product(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::default();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (m, a) in self.terms() {
            for (n, b) in other.terms() {
                let lo = m.abs_diff(n) + 1;
                let hi = m + n - 1;
                for k in (lo..=hi).step_by(2) {
                    out[k - 1] += a * b;
                }
            }
        }
        Self::new(out)
    }

    pub fn square(&self) -> Self {
        self.u_product(self)
    }

    /// Smallest value on a uniform grid of `samples + 1` points over [-2, 2].
    pub fn min_on_interval(&self, samples: usize) -> (f64, f64) {
        (0..=samples)
            .map(|i| {
                let x = -2.0 + 4.0 * i as f64 / samples as f64;
                (self.eval_real(x), x)
            })
            .fold((f64::INFINITY, 0.0), |best, cur| if cur.0 < best.0 { cur } else { best })
    }
}

impl Add for &ChebUExpansion {
    type Output = ChebUExpansion;

    fn add(self, rhs: &ChebUExpansion) -> ChebUExpansion {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ChebUExpansion::new((1..=n).map(|l| self.coeff(l) + rhs.coeff(l)).collect())
    }
}

impl fmt::Display for ChebUExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms().map(|(l, c)| format!("{c}*U{l}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The polynomial `Φ` and constant `a` attached to a weight `A`.
///
/// `Φ' = Σ c_l T_l` (the map `zA(z) - (1/π)∫ (A(x)-A(z))/(x-z) √(4-x²) dx`
/// sends `U_l` to `T_l`), normalized by `Φ(0) = 0`, and
/// `a = (1/π)∫ A √(4-x²) dx = 2 c_1`.
pub fn phi_from_a(a_poly: &ChebUExpansion) -> Result<(PowerPoly, f64)> {
    if a_poly.is_zero() {
        return Err(Error::ZeroWeight);
    }
    let mut dphi = vec![0.0; a_poly.coeffs.len() + 1];
    for (l, c) in a_poly.terms() {
        for (k, t) in t_power_coeffs(l).into_iter().enumerate() {
            dphi[k] += c * t;
        }
    }
    let phi = PowerPoly::new(dphi).antiderivative();
    Ok((phi, 2.0 * a_poly.coeff(1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn zeta_of(z: Complex64) -> Complex64 {
        // Independent of the orthopoly module: quadratic formula, pick |ζ| < 1.
        let disc = (z * z - 4.0).sqrt();
        let r1 = (z - disc) / 2.0;
        let r2 = (z + disc) / 2.0;
        if r1.norm() < r2.norm() {
            r1
        } else {
            r2
        }
    }

    #[test]
    fn u_and_t_small_values() {
        assert_eq!(eval_u(1, c(7.3)), c(1.0));
        assert_eq!(eval_u(3, c(2.0)), c(3.0));
        assert_eq!(eval_t(0, c(0.4)), c(2.0));
        assert_eq!(eval_t(2, c(3.0)), c(7.0));
        let t4 = eval_t(4, c(2.5)).re;
        assert!((t4 - (16.0 + 1.0 / 16.0)).abs() < 1e-12);
    }

    #[test]
    fn u5_matches_zeta_formula() {
        let z = c(0.5);
        let zeta = zeta_of(z + Complex64::new(0.0, 1e-300));
        let want = (zeta.powi(-5) - zeta.powi(5)) / (zeta.inv() - zeta);
        assert!((eval_u(5, z) - want).norm() < 1e-12);
    }

    #[test]
    fn recurrence_matches_zeta_representation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let z = loop {
                let z = Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-3.0..3.0));
                if z.im.abs() > 0.05 || z.re.abs() > 2.05 {
                    break z;
                }
            };
            let zeta = zeta_of(z);
            for l in 1..=12 {
                let zu = (zeta.powi(-(l as i32)) - zeta.powi(l as i32)) / (zeta.inv() - zeta);
                let zt = zeta.powi(-(l as i32)) + zeta.powi(l as i32);
                assert!((eval_u(l, z) - zu).norm() <= 1e-10 * zu.norm().max(1.0));
                assert!((eval_t(l, z) - zt).norm() <= 1e-10 * zt.norm().max(1.0));
            }
        }
    }

    #[test]
    fn t_is_difference_of_u() {
        for l in 1..10 {
            let t = PowerPoly::new(t_power_coeffs(l));
            let diff = &PowerPoly::new(u_power_coeffs(l + 1)) + &PowerPoly::new(u_power_coeffs(l - 1)).scale(-1.0);
            assert_eq!(t, diff, "l = {l}");
        }
    }

    #[test]
    fn products_by_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cases = [
            (ChebUExpansion::basis(1), ChebUExpansion::basis(4), ChebUExpansion::basis(4)),
            (ChebUExpansion::basis(2), ChebUExpansion::basis(2), ChebUExpansion::from_terms(&[(1, 1.0), (3, 1.0)])),
            (ChebUExpansion::basis(2), ChebUExpansion::basis(3), ChebUExpansion::from_terms(&[(2, 1.0), (4, 1.0)])),
        ];
        for (f, g, want) in cases {
            let got = f.u_product(&g);
            assert_eq!(got, want);
            for _ in 0..20 {
                let x = rng.gen_range(-3.0..3.0);
                let lhs = f.eval_real(x) * g.eval_real(x);
                assert!((got.eval_real(x) - lhs).abs() < 1e-12 * lhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn phi_for_constant_weight() {
        let (phi, a) = phi_from_a(&ChebUExpansion::one()).unwrap();
        assert_eq!(a, 2.0);
        assert_eq!(phi.coeffs(), &[0.0, 0.0, 0.5]);
    }

    #[test]
    fn phi_for_mixed_products() {
        for (m, n) in [(2usize, 1usize), (3, 1), (4, 2), (1, 3)] {
            let a_poly = ChebUExpansion::basis(m).u_product(&ChebUExpansion::basis(n));
            let (phi, a) = phi_from_a(&a_poly).unwrap();
            assert_eq!(a, 0.0);
            let (s, d) = (m + n, m.abs_diff(n));
            for x in [-1.7, -0.3, 0.0, 0.9, 2.6] {
                let z = c(x);
                let want = eval_t(s, z).re / s as f64 - eval_t(d, z).re / d as f64;
                let want0 = eval_t(s, c(0.0)).re / s as f64 - eval_t(d, c(0.0)).re / d as f64;
                assert!((phi.eval_real(x) - (want - want0)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn phi_for_squares() {
        for n in 1..=5 {
            let a_poly = ChebUExpansion::u_squared(n);
            assert_eq!(a_poly.coeff(1), 1.0);
            let (phi, a) = phi_from_a(&a_poly).unwrap();
            assert_eq!(a, 2.0);
            let shift = eval_t(2 * n, c(0.0)).re / (2 * n) as f64;
            for x in [-2.2, -1.0, 0.4, 1.9] {
                let want = eval_t(2 * n, c(x)).re / (2 * n) as f64 - shift;
                assert!((phi.eval_real(x) - want).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn phi_derivative_matches_t_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a_poly = ChebUExpansion::new(vec![1.0, 0.5, -0.25, 0.125]);
        let (phi, _) = phi_from_a(&a_poly).unwrap();
        for _ in 0..20 {
            let x: f64 = rng.gen_range(-2.5..2.5);
            let h = 1e-5;
            let fd = (phi.eval_real(x + h) - phi.eval_real(x - h)) / (2.0 * h);
            let want: f64 = a_poly.terms().map(|(l, c)| c * eval_t(l, Complex64::new(x, 0.0)).re).sum();
            assert!((fd - want).abs() <= 1e-8 * want.abs().max(1.0), "{fd} vs {want}");
        }
    }

    #[test]
    fn zero_weight_rejected() {
        assert_eq!(phi_from_a(&ChebUExpansion::default()), Err(Error::ZeroWeight));
    }

    #[test]
    fn power_conversion_round_trip() {
        let a_poly = ChebUExpansion::new(vec![0.3, -1.0, 2.0, 0.0, 0.7]);
        let p = a_poly.to_power();
        for i in 0..=40 {
            let x = -2.0 + 0.1 * i as f64;
            let (u, w) = (a_poly.eval_real(x), p.eval_real(x));
            assert!((u - w).abs() <= 1e-12 * u.abs().max(1.0));
        }
    }

    #[test]
    fn reflection() {
        let a_poly = ChebUExpansion::new(vec![0.3, -1.0, 2.0, 0.5]);
        let r = a_poly.reflect();
        for x in [-2.5, -0.4, 1.3] {
            assert!((r.eval_real(x) - a_poly.eval_real(-x)).abs() < 1e-12);
        }
    }

    #[test]
    fn textbook_helper() {
        // U^tb_2(x) = 4x² - 1
        assert!((textbook_u(2, 0.3) - (4.0 * 0.09 - 1.0)).abs() < 1e-14);
    }
}
