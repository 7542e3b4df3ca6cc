//! Jacobi operators with eventually-free coefficient tails.
//!
//! A half-line operator acts on `l²(Z_+)` by
//! `J e_n = p_n e_{n-1} + q_n e_n + p_{n+1} e_{n+1}` (and `J e_0 = q_0 e_0 + p_1 e_1`);
//! a whole-line operator uses the same formula for every `n ∈ Z`. Only entries
//! that differ from the free values `p = 1`, `q = 0` are stored.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cheb::PowerPoly;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "half")]
    HalfLine,
    #[serde(rename = "whole")]
    WholeLine,
}

/// A finitely supported vector on `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct FinVec {
    offset: i64,
    data: Vec<f64>,
}

impl FinVec {
    pub fn zero() -> Self {
        Self { offset: 0, data: Vec::new() }
    }

    pub fn unit(i: i64) -> Self {
        Self { offset: i, data: vec![1.0] }
    }

    pub fn from_entries(offset: i64, data: Vec<f64>) -> Self {
        Self { offset, data }
    }

    pub fn get(&self, i: i64) -> f64 {
        let k = i - self.offset;
        if k < 0 {
            return 0.0;
        }
        self.data.get(k as usize).copied().unwrap_or(0.0)
    }

    /// Index range of the stored entries (possibly containing zeros).
    pub fn support(&self) -> Option<RangeInclusive<i64>> {
        if self.data.is_empty() {
            None
        } else {
            Some(self.offset..=self.offset + self.data.len() as i64 - 1)
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.data.iter().enumerate().map(move |(k, &v)| (self.offset + k as i64, v))
    }

    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        let (lo, hi) = match (self.support(), other.support()) {
            (None, None) => return Self::zero(),
            (Some(a), None) => (*a.start(), *a.end()),
            (None, Some(b)) => (*b.start(), *b.end()),
            (Some(a), Some(b)) => ((*a.start()).min(*b.start()), (*a.end()).max(*b.end())),
        };
        Self { offset: lo, data: (lo..=hi).map(|i| self.get(i) + s * other.get(i)).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { offset: self.offset, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.axpy(-1.0, other).data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// A Jacobi operator equal to the free matrix outside a finite window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorSpec", into = "OperatorSpec")]
pub struct JacobiOperator {
    side: Side,
    p: BTreeMap<i64, f64>,
    q: BTreeMap<i64, f64>,
}

impl JacobiOperator {
    pub fn new(
        side: Side,
        p: impl IntoIterator<Item = (i64, f64)>,
        q: impl IntoIterator<Item = (i64, f64)>,
    ) -> Result<Self> {
        let mut pm = BTreeMap::new();
        for (k, v) in p {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidOperator(format!("p_{k} = {v} must be positive")));
            }
            if side == Side::HalfLine && k < 1 {
                return Err(Error::InvalidOperator(format!("half-line p index {k} < 1")));
            }
            if v != 1.0 {
                pm.insert(k, v);
            }
        }
        let mut qm = BTreeMap::new();
        for (k, v) in q {
            if !v.is_finite() {
                return Err(Error::InvalidOperator(format!("q_{k} = {v} is not finite")));
            }
            if side == Side::HalfLine && k < 0 {
                return Err(Error::InvalidOperator(format!("half-line q index {k} < 0")));
            }
            if v != 0.0 {
                qm.insert(k, v);
            }
        }
        Ok(Self { side, p: pm, q: qm })
    }

    pub fn half_line(p: impl IntoIterator<Item = (i64, f64)>, q: impl IntoIterator<Item = (i64, f64)>) -> Result<Self> {
        Self::new(Side::HalfLine, p, q)
    }

    pub fn whole_line(
        p: impl IntoIterator<Item = (i64, f64)>,
        q: impl IntoIterator<Item = (i64, f64)>,
    ) -> Result<Self> {
        Self::new(Side::WholeLine, p, q)
    }

    /// Half-line operator from `q_0..q_{n-1}` and `p_1..p_{m}` (`p[i] = p_{i+1}`).
    pub fn from_coefficients(q: &[f64], p: &[f64]) -> Result<Self> {
        Self::half_line(
            p.iter().enumerate().map(|(i, &v)| (i as i64 + 1, v)),
            q.iter().enumerate().map(|(i, &v)| (i as i64, v)),
        )
    }

    pub fn free(side: Side) -> Self {
        Self { side, p: BTreeMap::new(), q: BTreeMap::new() }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn is_free(&self) -> bool {
        self.p.is_empty() && self.q.is_empty()
    }

    pub fn free_counterpart(&self) -> Self {
        Self::free(self.side)
    }

    /// `p_k`; on the half line `p_k = 0` for `k ≤ 0` (no coupling below `e_0`).
    pub fn p(&self, k: i64) -> f64 {
        if self.side == Side::HalfLine && k <= 0 {
            return 0.0;
        }
        self.p.get(&k).copied().unwrap_or(1.0)
    }

    pub fn q(&self, k: i64) -> f64 {
        if self.side == Side::HalfLine && k < 0 {
            return 0.0;
        }
        self.q.get(&k).copied().unwrap_or(0.0)
    }

    pub fn nonfree_p(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.p.iter().map(|(&k, &v)| (k, v))
    }

    pub fn nonfree_q(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.q.iter().map(|(&k, &v)| (k, v))
    }

    /// Smallest `n` with `p_k = 1` and `q_k = 0` for all `k ≥ n`, so that the
    /// operator coincides with its own `J(n)`.
    pub fn rank_index(&self) -> usize {
        let hp = self.p.keys().next_back().map_or(0, |&k| k + 1);
        let hq = self.q.keys().next_back().map_or(0, |&k| k + 1);
        hp.max(hq).max(0) as usize
    }

    /// Rows touched by the perturbation: `[lo, hi]`, or `None` for the free operator.
    pub fn window(&self) -> Option<(i64, i64)> {
        let lo = self.p.keys().map(|k| k - 1).chain(self.q.keys().copied()).min()?;
        let hi = self.p.keys().chain(self.q.keys()).copied().max()?;
        Some((lo, hi))
    }

    /// `J(n)`: keep `p_k`, `q_k` for `k < n`, free beyond.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n as i64;
        Self {
            side: self.side,
            p: self.p.iter().filter(|(&k, _)| k < n).map(|(&k, &v)| (k, v)).collect(),
            q: self.q.iter().filter(|(&k, _)| k < n).map(|(&k, &v)| (k, v)).collect(),
        }
    }

    /// `J^{(k)} = (S*)^k J S^k` on the half line: indices shift down by `k`.
    pub fn shift(&self, k: usize) -> Result<Self> {
        if self.side != Side::HalfLine {
            return Err(Error::NotHalfLine);
        }
        let k = k as i64;
        Ok(Self {
            side: Side::HalfLine,
            p: self.p.iter().filter(|(&i, _)| i - k >= 1).map(|(&i, &v)| (i - k, v)).collect(),
            q: self.q.iter().filter(|(&i, _)| i - k >= 0).map(|(&i, &v)| (i - k, v)).collect(),
        })
    }

    /// Whole-line translation: the result has coefficients `p_{i+k}`, `q_{i+k}` at index `i`.
    pub fn translate(&self, k: i64) -> Result<Self> {
        if self.side != Side::WholeLine {
            return Err(Error::NotWholeLine);
        }
        Ok(Self {
            side: Side::WholeLine,
            p: self.p.iter().map(|(&i, &v)| (i - k, v)).collect(),
            q: self.q.iter().map(|(&i, &v)| (i - k, v)).collect(),
        })
    }

    /// `⟨J e_j, e_i⟩`.
    pub fn entry(&self, i: i64, j: i64) -> f64 {
        if self.side == Side::HalfLine && (i < 0 || j < 0) {
            return 0.0;
        }
        match i - j {
            0 => self.q(i),
            1 => self.p(i),
            -1 => self.p(j),
            _ => 0.0,
        }
    }

    /// Exact banded product `J v`.
    pub fn apply(&self, v: &FinVec) -> FinVec {
        let Some(range) = v.support() else {
            return FinVec::zero();
        };
        let mut lo = range.start() - 1;
        if self.side == Side::HalfLine {
            lo = lo.max(0);
        }
        let hi = range.end() + 1;
        let data =
            (lo..=hi).map(|i| self.p(i) * v.get(i - 1) + self.q(i) * v.get(i) + self.p(i + 1) * v.get(i + 1)).collect();
        FinVec { offset: lo, data }
    }

    /// `J^l v`.
    pub fn apply_power(&self, v: &FinVec, l: usize) -> FinVec {
        (0..l).fold(v.clone(), |acc, _| self.apply(&acc))
    }

    /// Upper bound on the spectral radius: `max_i |q_i| + p_i + p_{i+1}` (at least 2).
    pub fn gershgorin_radius(&self) -> f64 {
        let Some((lo, hi)) = self.window() else {
            return 2.0;
        };
        (lo - 1..=hi + 1).map(|i| self.q(i).abs() + self.p(i) + self.p(i + 1)).fold(2.0, f64::max)
    }

    /// Rows whose diagonal entry of `J^k - J0^k` can be nonzero.
    #[allow(clippy::reversed_empty_ranges)]
    pub fn trace_window(&self, k: usize) -> RangeInclusive<i64> {
        let Some((lo, hi)) = self.window() else {
            return 1..=0;
        };
        let k = k as i64;
        let lo = match self.side {
            Side::HalfLine => 0,
            Side::WholeLine => lo - k,
        };
        lo..=hi + k
    }

    /// `(J^j)_{ii} - (J0^j)_{ii}` for `j = 0..=max_power`.
    pub fn power_diagonal_differences(&self, i: i64, max_power: usize) -> Vec<f64> {
        let free = self.free_counterpart();
        let mut v = FinVec::unit(i);
        let mut v0 = FinVec::unit(i);
        let mut out = vec![0.0];
        for _ in 1..=max_power {
            v = self.apply(&v);
            v0 = free.apply(&v0);
            out.push(v.get(i) - v0.get(i));
        }
        out
    }

    /// `⟨{Φ(J) - Φ(J0)} e_k, e_k⟩`.
    pub fn diag_entry_of_poly(&self, phi: &PowerPoly, k: i64) -> f64 {
        let Some(d) = phi.degree() else {
            return 0.0;
        };
        self.power_diagonal_differences(k, d).iter().zip(phi.coeffs()).map(|(diff, c)| diff * c).sum()
    }

    /// `Σ log p_j` over the non-free off-diagonal entries.
    pub fn log_p_sum(&self) -> f64 {
        self.p.values().map(|v| v.ln()).sum()
    }

    /// `t_0 = Σ log p_j` and `t_k = tr(J^k - J0^k)` for `k ≥ 1`.
    pub fn trace_tk(&self, k: usize) -> f64 {
        self.traces(k)[k]
    }

    /// `[t_0, t_1, ..., t_{k_max}]`, each trace a finite windowed diagonal sum.
    pub fn traces(&self, k_max: usize) -> Vec<f64> {
        let mut out = vec![0.0; k_max + 1];
        out[0] = self.log_p_sum();
        for i in self.trace_window(k_max) {
            let d = self.power_diagonal_differences(i, k_max);
            for k in 1..=k_max {
                out[k] += d[k];
            }
        }
        out
    }

    /// `tr{Φ(J) - Φ(J0)}` as a windowed sum of diagonal entries.
    pub fn trace_of_poly(&self, phi: &PowerPoly) -> f64 {
        let Some(d) = phi.degree() else {
            return 0.0;
        };
        self.trace_window(d).map(|i| self.diag_entry_of_poly(phi, i)).sum()
    }

    /// Leading `n × n` block `J̃(n)` of a half-line operator.
    pub fn finite_truncation(&self, n: usize) -> Result<FiniteTruncation> {
        if self.side != Side::HalfLine {
            return Err(Error::NotHalfLine);
        }
        Ok(FiniteTruncation {
            diag: (0..n as i64).map(|i| self.q(i)).collect(),
            off: (1..n as i64).map(|i| self.p(i)).collect(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("operator serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))
    }
}

/// Checks `(J^{(k)})^l e_n = (J^l)^{(k)} e_n` entrywise to `1e-12`.
///
/// The identity is only claimed for `k ≥ 1`, `n ≥ l - 1`; outside that range the
/// call reports the violated hypothesis instead of a verdict.
pub fn shift_lemma_check(j: &JacobiOperator, k: usize, l: usize, n: usize) -> Result<bool> {
    if (n as i64) < l as i64 - 1 || k == 0 {
        return Err(Error::LemmaHypothesis { n: n as i64, lm1: l as i64 - 1 });
    }
    let shifted = j.shift(k)?;
    let lhs = shifted.apply_power(&FinVec::unit(n as i64), l);
    // (S*)^k J^l S^k e_n: apply J^l to e_{n+k}, then drop the first k rows.
    let full = j.apply_power(&FinVec::unit((n + k) as i64), l);
    let k = k as i64;
    let rhs = FinVec::from_entries(0, {
        let hi = full.support().map_or(-1, |r| *r.end());
        (k..=hi.max(k)).map(|i| full.get(i)).collect()
    });
    Ok(lhs.max_abs_diff(&rhs) <= 1e-12)
}

/// A finite symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteTruncation {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl FiniteTruncation {
    /// `J̃_0(n)`.
    pub fn free(n: usize) -> Self {
        Self { diag: vec![0.0; n], off: vec![1.0; n.saturating_sub(1)] }
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.size();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for (i, &v) in self.off.iter().enumerate() {
            m[(i, i + 1)] = v;
            m[(i + 1, i)] = v;
        }
        m
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.size();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * v[i];
                if i > 0 {
                    acc += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    acc += self.off[i] * v[i + 1];
                }
                acc
            })
            .collect()
    }

    /// `tr(A^k)` by dense powering.
    pub fn power_trace(&self, k: usize) -> f64 {
        let a = self.to_dense();
        let mut m = DMatrix::identity(self.size(), self.size());
        for _ in 0..k {
            m = &m * &a;
        }
        m.trace()
    }
}

/// `tr(J̃^k - J̃_0^k)` as a sum of row-wise diagonal differences.
///
/// Rows whose `k`-neighbourhood does not see a differing entry contribute an
/// exact zero, so unlike [`truncation_trace`] this does not subtract two traces
/// of size `O(n)`.
pub fn truncation_trace_banded(t: &FiniteTruncation, t0: &FiniteTruncation, k: usize) -> Result<f64> {
    if t.size() != t0.size() {
        return Err(Error::SizeMismatch(t.size(), t0.size()));
    }
    let n = t.size();
    let mut total = 0.0;
    for i in 0..n {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        let mut v0 = v.clone();
        for _ in 0..k {
            v = t.apply(&v);
            v0 = t0.apply(&v0);
        }
        total += v[i] - v0[i];
    }
    Ok(total)
}

/// `tr(J̃^k - J̃_0^k)` for a pair of equally sized truncations.
pub fn truncation_trace(t: &FiniteTruncation, t0: &FiniteTruncation, k: usize) -> Result<f64> {
    if t.size() != t0.size() {
        return Err(Error::SizeMismatch(t.size(), t0.size()));
    }
    Ok(t.power_trace(k) - t0.power_trace(k))
}

/// Wire format: `{"side": "half"|"whole", "p": {"3": 1.2}, "q": {"0": -0.5}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct OperatorSpec {
    side: Side,
    #[serde(default)]
    p: BTreeMap<String, f64>,
    #[serde(default)]
    q: BTreeMap<String, f64>,
}

fn parse_indexed(map: BTreeMap<String, f64>) -> Result<Vec<(i64, f64)>> {
    map.into_iter()
        .map(|(k, v)| {
            k.trim().parse::<i64>().map(|i| (i, v)).map_err(|_| Error::Json(format!("index {k:?} is not an integer")))
        })
        .collect()
}

impl TryFrom<OperatorSpec> for JacobiOperator {
    type Error = Error;

    fn try_from(spec: OperatorSpec) -> Result<Self> {
        Self::new(spec.side, parse_indexed(spec.p)?, parse_indexed(spec.q)?)
    }
}

impl From<JacobiOperator> for OperatorSpec {
    fn from(j: JacobiOperator) -> Self {
        Self {
            side: j.side,
            p: j.p.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            q: j.q.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_window(j: &JacobiOperator, lo: i64, hi: i64) -> DMatrix<f64> {
        let n = (hi - lo + 1) as usize;
        DMatrix::from_fn(n, n, |r, c| j.entry(lo + r as i64, lo + c as i64))
    }

    #[test]
    fn apply_free_and_boundary() {
        let whole = JacobiOperator::free(Side::WholeLine);
        let v = whole.apply(&FinVec::unit(5));
        assert_eq!(v.get(4), 1.0);
        assert_eq!(v.get(5), 0.0);
        assert_eq!(v.get(6), 1.0);

        let half = JacobiOperator::free(Side::HalfLine);
        let v = half.apply(&FinVec::unit(0));
        assert_eq!(v.support(), Some(0..=1));
        assert_eq!(v.get(0), 0.0);
        assert_eq!(v.get(1), 1.0);
        assert_eq!(v.get(-1), 0.0);

        let c = 0.8;
        let j = JacobiOperator::half_line([], [(0, c)]).unwrap();
        let v = j.apply(&FinVec::unit(0));
        assert_eq!((v.get(0), v.get(1)), (c, 1.0));
    }

    #[test]
    fn shift_examples() {
        let free = JacobiOperator::free(Side::HalfLine);
        assert_eq!(free.shift(3).unwrap(), free);
        let j = JacobiOperator::half_line([], [(0, 0.4)]).unwrap();
        assert!(j.shift(1).unwrap().is_free());
        let j = JacobiOperator::half_line([], [(3, 0.4)]).unwrap();
        assert_eq!(j.shift(2).unwrap(), JacobiOperator::half_line([], [(1, 0.4)]).unwrap());
        let j = JacobiOperator::half_line([(1, 1.3), (2, 0.7)], []).unwrap();
        assert_eq!(j.shift(1).unwrap(), JacobiOperator::half_line([(1, 0.7)], []).unwrap());
    }

    #[test]
    fn diag_entries() {
        let free = JacobiOperator::free(Side::HalfLine);
        let phi = PowerPoly::new(vec![0.0, 1.0, 0.5, 0.25]);
        for k in 0..5 {
            assert_eq!(free.diag_entry_of_poly(&phi, k), 0.0);
        }
        // half-line ⟨J0² e_0, e_0⟩ = 1, whole-line 2: both agree with a dense window
        let v = free.apply_power(&FinVec::unit(0), 2);
        assert_eq!(v.get(0), 1.0);
        let d = dense_window(&free, 0, 2);
        assert_eq!((&d * &d)[(0, 0)], 1.0);
        let wv = JacobiOperator::free(Side::WholeLine).apply_power(&FinVec::unit(0), 2);
        assert_eq!(wv.get(0), 2.0);

        let c = 0.9;
        let j = JacobiOperator::half_line([], [(0, c)]).unwrap();
        let half_sq = PowerPoly::new(vec![0.0, 0.0, 0.5]);
        assert!((j.diag_entry_of_poly(&half_sq, 0) - c * c / 2.0).abs() < 1e-15);
    }

    #[test]
    fn traces_small() {
        let c = 0.37;
        let j = JacobiOperator::half_line([], [(0, c)]).unwrap();
        assert!((j.trace_tk(1) - c).abs() < 1e-15);
        assert!((j.trace_tk(2) - c * c).abs() < 1e-15);
        let free = JacobiOperator::free(Side::HalfLine);
        for k in 0..6 {
            assert_eq!(free.trace_tk(k), 0.0);
        }
        let j = JacobiOperator::half_line([(2, 1.5)], []).unwrap();
        assert!((j.trace_tk(0) - 1.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn symmetric_entries() {
        let j = JacobiOperator::whole_line([(-1, 0.6), (2, 1.4)], [(0, 0.3), (1, -0.2)]).unwrap();
        for a in -4..5 {
            for b in -4..5 {
                assert_eq!(j.entry(a, b), j.entry(b, a));
            }
        }
    }

    #[test]
    fn lemma_hypothesis_reported() {
        let j = JacobiOperator::free(Side::HalfLine);
        assert!(matches!(shift_lemma_check(&j, 1, 4, 1), Err(Error::LemmaHypothesis { .. })));
        assert_eq!(shift_lemma_check(&j, 2, 3, 2), Ok(true));
    }

    #[test]
    fn lemma_fails_outside_hypothesis_range() {
        // n < l - 1: the compressed powers really differ, which is why the check refuses it.
        let j = JacobiOperator::half_line([(1, 1.3), (2, 0.8)], [(0, 0.2), (1, -0.4), (2, 0.3)]).unwrap();
        let shifted = j.shift(1).unwrap();
        let lhs = shifted.apply_power(&FinVec::unit(0), 3);
        let full = j.apply_power(&FinVec::unit(1), 3);
        let diff = (0..6).map(|i| (lhs.get(i) - full.get(i + 1)).abs()).fold(0.0, f64::max);
        assert!(diff > 1e-6);
    }

    #[test]
    fn truncation_traces() {
        let t0 = FiniteTruncation::free(4);
        assert_eq!(truncation_trace(&t0, &t0, 1).unwrap(), 0.0);
        let c = 0.6;
        let j = JacobiOperator::half_line([], [(0, c)]).unwrap();
        let t = j.finite_truncation(3).unwrap();
        assert!((truncation_trace(&t, &FiniteTruncation::free(3), 1).unwrap() - c).abs() < 1e-15);
        assert!((truncation_trace(&t, &FiniteTruncation::free(3), 2).unwrap() - c * c).abs() < 1e-14);
        let j = JacobiOperator::from_coefficients(&[0.3, -0.1, 0.2], &[1.2, 0.8]).unwrap();
        let t = j.finite_truncation(9).unwrap();
        for k in 0..7 {
            let dense = truncation_trace(&t, &FiniteTruncation::free(9), k).unwrap();
            let banded = truncation_trace_banded(&t, &FiniteTruncation::free(9), k).unwrap();
            assert!((dense - banded).abs() < 1e-12);
        }
        assert_eq!(truncation_trace(&t, &FiniteTruncation::free(2), 1), Err(Error::SizeMismatch(9, 2)));
    }

    #[test]
    fn rejects_bad_coefficients() {
        assert!(JacobiOperator::half_line([(1, -0.5)], []).is_err());
        assert!(JacobiOperator::half_line([(0, 1.2)], []).is_err());
        assert!(JacobiOperator::half_line([], [(-1, 0.2)]).is_err());
        assert!(JacobiOperator::whole_line([(-3, 1.2)], [(-1, f64::NAN)]).is_err());
    }

    #[test]
    fn json_schema() {
        let j = JacobiOperator::from_json(r#"{"side": "half", "p": {"3": 1.2}, "q": {"0": -0.5}}"#).unwrap();
        assert_eq!(j.p(3), 1.2);
        assert_eq!(j.q(0), -0.5);
        assert_eq!(j.rank_index(), 4);
        let back = JacobiOperator::from_json(&j.to_json()).unwrap();
        assert_eq!(back, j);
        let w = JacobiOperator::from_json(r#"{"side": "whole", "q": {"-2": 0.1}}"#).unwrap();
        assert_eq!(w.side(), Side::WholeLine);
        assert!(JacobiOperator::from_json(r#"{"side": "half", "p": {"x": 1.2}}"#).is_err());
        assert!(JacobiOperator::from_json(r#"{"side": "half", "p": {"1": -1.0}}"#).is_err());
    }
}
