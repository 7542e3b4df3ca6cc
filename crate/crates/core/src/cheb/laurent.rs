use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use super::PowerPoly;
use crate::{Error, Result};

/// A truncated Laurent expansion at `z = ∞`.
///
/// `coeffs[i]` is the coefficient of `z^{top - i}`; the series is known exactly
/// on the `len()` retained powers `z^{top} ..= z^{top - len + 1}` and nothing is
/// claimed below that.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentSeries {
    top: i64,
    coeffs: Vec<f64>,
}

impl LaurentSeries {
    pub fn new(top: i64, coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a Laurent series retains at least one coefficient");
        Self { top, coeffs }
    }

    /// Embeds a polynomial, retaining `len` coefficients from its degree down.
    pub fn from_poly(p: &PowerPoly, len: usize) -> Self {
        let top = p.degree().unwrap_or(0) as i64;
        let coeffs = (0..len)
            .map(|i| {
                let k = top - i as i64;
                if k >= 0 {
                    p.coeff(k as usize)
                } else {
                    0.0
                }
            })
            .collect();
        Self::new(top, coeffs)
    }

    pub fn top(&self) -> i64 {
        self.top
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lowest retained power.
    pub fn bottom(&self) -> i64 {
        self.top - self.coeffs.len() as i64 + 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `z^power`; `None` below the retained range.
    pub fn coeff(&self, power: i64) -> Option<f64> {
        if power > self.top {
            Some(0.0)
        } else if power < self.bottom() {
            None
        } else {
            Some(self.coeffs[(self.top - power) as usize])
        }
    }

    /// Re-expresses the series with a different top power (padding with zeros above)
    /// and at most `len` coefficients, never extending below the retained range.
    fn window(&self, top: i64, bottom: i64) -> Vec<f64> {
        (bottom..=top).rev().map(|k| self.coeff(k).unwrap_or(0.0)).collect()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.top, self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Polynomial part: the coefficients of `z^k`, `k ≥ 0`.
    pub fn polynomial_part(&self) -> PowerPoly {
        if self.top < 0 {
            return PowerPoly::zero();
        }
        PowerPoly::new((0..=self.top).map(|k| self.coeff(k).unwrap_or(0.0)).collect())
    }

    /// Coefficients of `w^0, w^1, ...` where `w = 1/z`, assuming `top == 0`.
    fn as_w_series(&self) -> &[f64] {
        &self.coeffs
    }

    /// Formal logarithm of a series whose leading power is `z^0` with a positive
    /// coefficient.
    pub fn log(&self) -> Result<Self> {
        if self.top != 0 || self.coeffs[0] <= 0.0 {
            return Err(Error::SeriesLogSingular);
        }
        let a = self.as_w_series();
        let k_max = a.len();
        let mut b = vec![0.0; k_max];
        b[0] = a[0].ln();
        for k in 1..k_max {
            let mut s = a[k];
            for j in 1..k {
                s -= (j as f64 / k as f64) * b[j] * a[k - j];
            }
            b[k] = s / a[0];
        }
        Ok(Self::new(0, b))
    }

    /// Formal exponential of a series with no positive powers.
    pub fn exp(&self) -> Result<Self> {
        if self.top > 0 {
            return Err(Error::Truncation("exp of a series with positive powers".into()));
        }
        let b = self.window(0, self.bottom());
        let k_max = b.len();
        let mut e = vec![0.0; k_max];
        e[0] = b[0].exp();
        for k in 1..k_max {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * b[j] * e[k - j];
            }
            e[k] = s / k as f64;
        }
        Ok(Self::new(0, e))
    }

    /// Multiplicative inverse of a series with nonzero leading coefficient.
    pub fn recip(&self) -> Result<Self> {
        let c = &self.coeffs;
        if c[0] == 0.0 {
            return Err(Error::Truncation("reciprocal of a series with zero leading term".into()));
        }
        let mut b = vec![0.0; c.len()];
        b[0] = 1.0 / c[0];
        for k in 1..c.len() {
            let s: f64 = (1..=k).map(|j| c[j] * b[k - j]).sum();
            b[k] = -s / c[0];
        }
        Ok(Self::new(-self.top, b))
    }

    /// `√(z² - 4) = z (1 - 4/z²)^{1/2}`, the branch asymptotic to `z`.
    pub fn sqrt_z2m4(len: usize) -> Self {
        let mut coeffs = vec![0.0; len];
        let mut binom = 1.0; // C(1/2, j) (-4)^j
        for j in 0.. {
            let i = 2 * j;
            if i >= len {
                break;
            }
            coeffs[i] = binom;
            let jf = j as f64;
            binom *= (0.5 - jf) / (jf + 1.0) * -4.0;
        }
        Self::new(1, coeffs)
    }

    /// `ζ(z)`, the root of `ζ + 1/ζ = z` inside the unit disc, from `ζ = w(1 + ζ²)`.
    pub fn zeta(len: usize) -> Self {
        // Coefficients in w, starting at w^1.
        let mut c = vec![0.0; len + 1];
        c[1] = 1.0;
        for k in 2..=len {
            // [w^k] w ζ² = [w^{k-1}] ζ²
            let mut s = 0.0;
            for i in 1..k - 1 {
                s += c[i] * c[k - 1 - i];
            }
            c[k] = s;
        }
        Self::new(-1, c[1..].to_vec())
    }
}

impl Add for &LaurentSeries {
    type Output = LaurentSeries;

    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        let top = self.top.max(rhs.top);
        let bottom = self.bottom().max(rhs.bottom());
        let coeffs = (bottom..=top).rev().map(|k| self.coeff(k).unwrap_or(0.0) + rhs.coeff(k).unwrap_or(0.0)).collect();
        LaurentSeries::new(top, coeffs)
    }
}

impl Mul for &LaurentSeries {
    type Output = LaurentSeries;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &LaurentSeries) -> LaurentSeries {
        let len = self.len().min(rhs.len());
        let coeffs = (0..len).map(|i| (0..=i).map(|j| self.coeffs[j] * rhs.coeffs[i - j]).sum()).collect();
        LaurentSeries::new(self.top + rhs.top, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eval(s: &LaurentSeries, z: f64) -> f64 {
        s.coeffs.iter().enumerate().map(|(i, c)| c * z.powi((s.top - i as i64) as i32)).sum()
    }

    #[test]
    fn zeta_first_terms() {
        let z = LaurentSeries::zeta(8);
        assert_eq!(z.top(), -1);
        assert_eq!(&z.coeffs()[..7], &[1.0, 0.0, 1.0, 0.0, 2.0, 0.0, 5.0]);
        let zz = LaurentSeries::zeta(30);
        let x = 10.0;
        let want = (x - (x * x - 4.0f64).sqrt()) / 2.0;
        assert!((eval(&zz, x) - want).abs() < 1e-15);
    }

    #[test]
    fn sqrt_squares_back() {
        let s = LaurentSeries::sqrt_z2m4(12);
        assert_eq!(&s.coeffs()[..4], &[1.0, 0.0, -2.0, 0.0]);
        assert_eq!(s.coeffs()[4], -2.0);
        let sq = &s * &s;
        assert_eq!(sq.top(), 2);
        let want = [1.0, 0.0, -4.0];
        for (i, c) in sq.coeffs().iter().enumerate() {
            let w = want.get(i).copied().unwrap_or(0.0);
            assert!((c - w).abs() < 1e-12, "i={i}: {c}");
        }
    }

    #[test]
    fn mercator() {
        let c = 0.7;
        let s = LaurentSeries::new(0, vec![1.0, c, 0.0, 0.0, 0.0]).log().unwrap();
        assert!((s.coeffs()[1] - c).abs() < 1e-15);
        assert!((s.coeffs()[2] + c * c / 2.0).abs() < 1e-15);
        assert!((s.coeffs()[3] - c * c * c / 3.0).abs() < 1e-15);
    }

    #[test]
    fn log_rejects_singular() {
        assert!(LaurentSeries::new(0, vec![0.0, 1.0]).log().is_err());
        assert!(LaurentSeries::new(1, vec![1.0, 1.0]).log().is_err());
    }

    #[test]
    fn polynomial_part_and_add() {
        let a = LaurentSeries::new(2, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(a.polynomial_part().coeffs(), &[3.0, 2.0, 1.0]);
        let b = LaurentSeries::new(0, vec![1.0, 1.0]);
        let s = &a + &b;
        assert_eq!(s.top(), 2);
        assert_eq!(s.bottom(), -1);
        assert_eq!(s.coeffs(), &[1.0, 2.0, 4.0, 5.0]);
    }

    #[test]
    fn recip_times_self() {
        let s = LaurentSeries::new(2, vec![2.0, -1.0, 0.5, 3.0, 0.0, 1.0]);
        let p = &s * &s.recip().unwrap();
        assert_eq!(p.top(), 0);
        assert!((p.coeffs()[0] - 1.0).abs() < 1e-15);
        for c in &p.coeffs()[1..] {
            assert!(c.abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn exp_inverts_log(c0 in 0.5f64..2.0, rest in proptest::collection::vec(-0.5f64..0.5, 1..12)) {
            let mut coeffs = vec![c0];
            coeffs.extend(rest);
            let s = LaurentSeries::new(0, coeffs);
            let back = s.log().unwrap().exp().unwrap();
            for (a, b) in s.coeffs().iter().zip(back.coeffs()) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }
    }
}
