//! Whole-line Chebyshev calculus: band structure of `T_l(J)`, the trace
//! coefficients `a_k`, Hankel-minus-Toeplitz positivity, the Hilbert–Schmidt
//! form of `H_{U_l²}`, and the second-order expansion of `H_A` at `J_0`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::cheb::ChebUExpansion;
use crate::jacobi::{FinVec, JacobiOperator, Side};
use crate::{Error, Result};

fn require_whole(j: &JacobiOperator) -> Result<()> {
    match j.side() {
        Side::WholeLine => Ok(()),
        Side::HalfLine => Err(Error::NotWholeLine),
    }
}

/// Diagonal `k` of `T_l(J_0) = S^l + S^{-l}` (`T_0 = 2`).
pub fn free_band_value(l: usize, k: i64) -> f64 {
    match (l, k.unsigned_abs() as usize) {
        (0, 0) => 2.0,
        (l, a) if a == l && l > 0 => 1.0,
        _ => 0.0,
    }
}

/// `T_l(J) = Σ_{|k| ≤ l} Λ_k(l) S^k` with `Λ_k[i] = ⟨T_l(J) e_{i-k}, e_i⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandDecomposition {
    pub l: usize,
    rows: (i64, i64),
    diagonals: Vec<Vec<f64>>,
}

impl BandDecomposition {
    /// Rows on which the diagonals are stored; the operator is free elsewhere.
    pub fn rows(&self) -> (i64, i64) {
        self.rows
    }

    pub fn get(&self, k: i64, i: i64) -> f64 {
        let l = self.l as i64;
        if k.abs() > l {
            return 0.0;
        }
        if i < self.rows.0 || i > self.rows.1 {
            return free_band_value(self.l, k);
        }
        self.diagonals[(k + l) as usize][(i - self.rows.0) as usize]
    }

    pub fn diagonal(&self, k: i64) -> &[f64] {
        &self.diagonals[(k + self.l as i64) as usize]
    }
}

/// Rows that can differ from the free operator in `T_l(J)`.
fn band_rows(j: &JacobiOperator, l: usize) -> (i64, i64) {
    let (lo, hi) = j.window().unwrap_or((0, 0));
    (lo - l as i64 - 1, hi + l as i64 + 1)
}

/// `T_l(J) e_c` by `T_{k+1} = J T_k - T_{k-1}`, `T_0 = 2`, `T_1 = J`.
pub fn t_apply(j: &JacobiOperator, l: usize, v: &FinVec) -> FinVec {
    if l == 0 {
        return v.scale(2.0);
    }
    let mut prev = v.scale(2.0);
    let mut cur = j.apply(v);
    for _ in 1..l {
        let next = j.apply(&cur).axpy(-1.0, &prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// Band decomposition of `T_l(J)` for a finite-rank whole-line `J`.
pub fn t_of_j(j: &JacobiOperator, l: usize) -> Result<BandDecomposition> {
    require_whole(j)?;
    let rows = band_rows(j, l);
    let li = l as i64;
    let mut columns = BTreeMap::new();
    for c in rows.0 - li..=rows.1 + li {
        columns.insert(c, t_apply(j, l, &FinVec::unit(c)));
    }
    let diagonals = (-li..=li).map(|k| (rows.0..=rows.1).map(|i| columns[&(i - k)].get(i)).collect()).collect();
    Ok(BandDecomposition { l, rows, diagonals })
}

/// `Π_{j=0}^{count-1} p_{i-j}`.
fn p_run(j: &JacobiOperator, i: i64, count: usize) -> f64 {
    (0..count as i64).map(|s| j.p(i - s)).product()
}

/// Top three diagonals `[Λ_l(l), Λ_{l-1}(l), Λ_{l-2}(l)]` from their closed forms,
/// on the rows of [`t_of_j`]:
///
/// - `Λ_l[i] = p_i p_{i-1} ⋯ p_{i-l+1}`
/// - `Λ_{l-1}[i] = p_i ⋯ p_{i-l+2} (q_i + q_{i-1} + ⋯ + q_{i-l+1})`
/// - `Λ_{l-2}[i] = p_i ⋯ p_{i-l+3} [Σ_{j=-1}^{l-2} (p_{i-j}² - 1) + Σ_{0≤a≤b≤l-2} q_{i-a} q_{i-b}]`
pub fn band_closed_forms(j: &JacobiOperator, l: usize) -> Result<[Vec<f64>; 3]> {
    require_whole(j)?;
    if l < 2 {
        return Err(Error::InvalidOperator(format!("closed forms need l ≥ 2, got {l}")));
    }
    let rows = band_rows(j, l);
    let li = l as i64;
    let top = (rows.0..=rows.1).map(|i| p_run(j, i, l)).collect();
    let next = (rows.0..=rows.1).map(|i| p_run(j, i, l - 1) * (0..li).map(|s| j.q(i - s)).sum::<f64>()).collect();
    let third = (rows.0..=rows.1)
        .map(|i| {
            let pp: f64 = (-1..=li - 2).map(|s| j.p(i - s).powi(2) - 1.0).sum();
            let mut qq = 0.0;
            for a in 0..=li - 2 {
                for b in a..=li - 2 {
                    qq += j.q(i - a) * j.q(i - b);
                }
            }
            p_run(j, i, l - 2) * (pp + qq)
        })
        .collect();
    Ok([top, next, third])
}

/// Largest entrywise gap between the closed forms and the recurrence diagonals.
pub fn band_defect(j: &JacobiOperator, l: usize) -> Result<f64> {
    let band = t_of_j(j, l)?;
    let closed = band_closed_forms(j, l)?;
    let li = l as i64;
    let mut worst: f64 = 0.0;
    for (d, cf) in closed.iter().enumerate() {
        let k = li - d as i64;
        for (a, b) in band.diagonal(k).iter().zip(cf) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

/// `a_k = tr{T_k(J) - T_k(J_0)} / k` for `k ≥ 1`, `a_0 = Σ log p_i²`.
pub fn a_k_of(j: &JacobiOperator, k: usize) -> Result<f64> {
    require_whole(j)?;
    if k == 0 {
        return Ok(2.0 * j.log_p_sum());
    }
    let band = t_of_j(j, k)?;
    let tr: f64 = band.diagonal(0).iter().map(|v| v - free_band_value(k, 0)).sum();
    Ok(tr / k as f64)
}

/// `{a_{k+l} - a_{|k-l|}}_{k,l=1..K}` and its smallest eigenvalue.
pub fn hankel_toeplitz_psd(j: &JacobiOperator, k_max: usize) -> Result<(DMatrix<f64>, f64)> {
    let a: Vec<f64> = (0..=2 * k_max).map(|k| a_k_of(j, k)).collect::<Result<_>>()?;
    let m = DMatrix::from_fn(k_max, k_max, |r, c| {
        let (k, l) = (r + 1, c + 1);
        a[k + l] - a[k.abs_diff(l)]
    });
    if k_max == 0 {
        return Ok((m, 0.0));
    }
    let min = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((m, min))
}

/// `H_{U_m U_n}(J)`: `a_{m+n} - a_{|m-n|}`, with `a_0 = Σ log p_i²` when `m = n`.
pub fn h_chebyshev(j: &JacobiOperator, m: usize, n: usize) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidOperator("U-indices start at 1".into()));
    }
    Ok(a_k_of(j, m + n)? - a_k_of(j, m.abs_diff(n))?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsIdentity {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// Compares `H_{U_l²}(J)` with
/// `(1/l) {Σ_i |q̃_i|²/2 + Σ_i ((t_l)_i² - 1 - log (t_l)_i²)}`, where `q̃_i` is the
/// middle `2l - 1` block of row `i` of `T_l(J)` and `(t_l)_i = p_{i+1} ⋯ p_{i+l}`.
pub fn hs_identity_check(j: &JacobiOperator, l: usize) -> Result<HsIdentity> {
    if l == 0 {
        return Err(Error::InvalidOperator("l ≥ 1 required".into()));
    }
    let lhs = h_chebyshev(j, l, l)?;
    let band = t_of_j(j, l)?;
    let li = l as i64;
    let (r0, r1) = band.rows();
    let mut q_part = 0.0;
    let mut t_part = 0.0;
    for i in r0..=r1 {
        q_part += (1 - li..li).map(|k| band.get(k, i).powi(2)).sum::<f64>();
        let t2 = (1..=li).map(|s| j.p(i + s)).product::<f64>().powi(2);
        t_part += t2 - 1.0 - t2.ln();
    }
    let rhs = (q_part / 2.0 + t_part) / l as f64;
    Ok(HsIdentity { lhs, rhs, residual: (lhs - rhs).abs() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2Report {
    pub u_window: f64,
    pub q_window: f64,
    pub u_squared: f64,
    pub q_squared: f64,
}

/// Squared `ℓ²` norms of `{Σ_{k=1}^n u_{j+k}}`, `{Σ_{k=1}^n q_{j+k}}`, `{u_j²}`, `{q_j²}`
/// with `u_j = p_j² - 1`.
pub fn l2_condition_report(j: &JacobiOperator, n: usize) -> Result<L2Report> {
    require_whole(j)?;
    let Some((lo, hi)) = j.window() else {
        return Ok(L2Report { u_window: 0.0, q_window: 0.0, u_squared: 0.0, q_squared: 0.0 });
    };
    let u = |i: i64| j.p(i).powi(2) - 1.0;
    let ni = n as i64;
    let mut rep = L2Report { u_window: 0.0, q_window: 0.0, u_squared: 0.0, q_squared: 0.0 };
    for s in lo - ni - 1..=hi + 1 {
        rep.u_window += (1..=ni).map(|k| u(s + k)).sum::<f64>().powi(2);
        rep.q_window += (1..=ni).map(|k| j.q(s + k)).sum::<f64>().powi(2);
    }
    for i in lo..=hi {
        rep.u_squared += u(i).powi(4);
        rep.q_squared += j.q(i).powi(4);
    }
    Ok(rep)
}

/// A finitely supported direction `dJ` in coefficient space.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PerturbationDirection {
    pub dp: BTreeMap<i64, f64>,
    pub dq: BTreeMap<i64, f64>,
}

impl PerturbationDirection {
    pub fn new(dp: impl IntoIterator<Item = (i64, f64)>, dq: impl IntoIterator<Item = (i64, f64)>) -> Self {
        Self { dp: dp.into_iter().collect(), dq: dq.into_iter().collect() }
    }

    pub fn dp(&self, i: i64) -> f64 {
        self.dp.get(&i).copied().unwrap_or(0.0)
    }

    pub fn dq(&self, i: i64) -> f64 {
        self.dq.get(&i).copied().unwrap_or(0.0)
    }

    /// `{…, 2dp_0, dq_0, 2dp_1, dq_1, …}`: position `2k` holds `dq_k`,
    /// position `2k - 1` holds `2dp_k`.
    pub fn dj_vector(&self) -> FinVec {
        let mut entries = BTreeMap::new();
        for (&k, &v) in &self.dq {
            entries.insert(2 * k, v);
        }
        for (&k, &v) in &self.dp {
            entries.insert(2 * k - 1, 2.0 * v);
        }
        match (entries.keys().next(), entries.keys().next_back()) {
            (Some(&lo), Some(&hi)) => {
                FinVec::from_entries(lo, (lo..=hi).map(|i| entries.get(&i).copied().unwrap_or(0.0)).collect())
            }
            _ => FinVec::zero(),
        }
    }

    /// `J_0 + ε dJ` as a whole-line operator.
    pub fn perturb_free(&self, eps: f64) -> Result<JacobiOperator> {
        JacobiOperator::whole_line(
            self.dp.iter().map(|(&k, &v)| (k, 1.0 + eps * v)),
            self.dq.iter().map(|(&k, &v)| (k, eps * v)),
        )
    }
}

/// `d T_l(J)|_{J_0} e_0`: position `-l + 2r` carries `c_r Σ_{i=-l+r+1}^{r} dp_i`
/// (`c_r = 1` at the ends `r = 0, l`, else 2) and position `-l + 2r + 1` carries
/// `Σ_{i=-l+r+1}^{r} dq_i`.
pub fn dt_linearization(dj: &PerturbationDirection, l: usize) -> FinVec {
    if l == 0 {
        return FinVec::zero();
    }
    let li = l as i64;
    let data = (-li..=li)
        .map(|pos| {
            let shifted = pos + li;
            let r = shifted / 2;
            let range = -li + r + 1..=r;
            if shifted % 2 == 0 {
                let c = if r == 0 || r == li { 1.0 } else { 2.0 };
                c * range.map(|i| dj.dp(i)).sum::<f64>()
            } else {
                range.map(|i| dj.dq(i)).sum::<f64>()
            }
        })
        .collect();
    FinVec::from_entries(-li, data)
}

/// `Σ_i v_i v_{i+m}`.
fn autocorrelation(v: &FinVec, m: i64) -> f64 {
    v.entries().map(|(i, x)| x * v.get(i + m)).sum()
}

/// `½ ⟨dj, A(S + S^{-1}) dj⟩` on the interleaved lattice with unit shift `S`.
///
/// `U_l(S + S^{-1}) = Σ_{j=0}^{l-1} S^{l-1-2j}`, so the form is a combination of
/// autocorrelations of `dj`.
pub fn quadratic_form(a: &ChebUExpansion, dj: &PerturbationDirection) -> f64 {
    let v = dj.dj_vector();
    let mut acc = 0.0;
    for (l, c) in a.terms() {
        let li = l as i64;
        acc += c * (0..li).map(|j| autocorrelation(&v, li - 1 - 2 * j)).sum::<f64>();
    }
    0.5 * acc
}

/// `(Σ_i (dq_{i+1} + ⋯ + dq_{i+l})², Σ_i (2dp_{i+1} + ⋯ + 2dp_{i+l})²)`; their sum
/// is `2 · quadratic_form(U_l², dJ)`.
pub fn r2_condition_report(dj: &PerturbationDirection, l: usize) -> (f64, f64) {
    let keys = dj.dp.keys().chain(dj.dq.keys()).copied();
    let (Some(lo), Some(hi)) = (keys.clone().min(), keys.max()) else {
        return (0.0, 0.0);
    };
    let li = l as i64;
    let mut q = 0.0;
    let mut p = 0.0;
    for s in lo - li..=hi {
        q += (1..=li).map(|k| dj.dq(s + k)).sum::<f64>().powi(2);
        p += (1..=li).map(|k| 2.0 * dj.dp(s + k)).sum::<f64>().powi(2);
    }
    (q, p)
}
