//! Seeded random operators and weights for property suites and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cheb::ChebUExpansion;
use crate::jacobi::JacobiOperator;
use crate::lns::PerturbationDirection;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Half-line operator with `q_0..q_{rank-1}` and `p_1..p_{rank-1}` perturbed by
/// at most `amp` (so the rank index is `rank`, barring exact free draws).
pub fn random_half_line(rng: &mut impl Rng, rank: usize, amp: f64) -> JacobiOperator {
    let q: Vec<f64> = (0..rank).map(|_| rng.gen_range(-amp..=amp)).collect();
    let p: Vec<f64> = (1..rank).map(|_| 1.0 + rng.gen_range(-amp..=amp)).collect();
    JacobiOperator::from_coefficients(&q, &p).expect("amp < 1 keeps p positive")
}

/// Whole-line operator perturbed on indices `lo..=hi`.
pub fn random_whole_line(rng: &mut impl Rng, lo: i64, hi: i64, amp: f64) -> JacobiOperator {
    let p: Vec<(i64, f64)> = (lo..=hi).map(|i| (i, 1.0 + rng.gen_range(-amp..=amp))).collect();
    let q: Vec<(i64, f64)> = (lo..=hi).map(|i| (i, rng.gen_range(-amp..=amp))).collect();
    JacobiOperator::whole_line(p, q).expect("amp < 1 keeps p positive")
}

/// A nonnegative weight `B² + c` with `deg B ≤ max_degree / 2` and `c ≥ 0`.
pub fn random_weight(rng: &mut impl Rng, max_degree: usize) -> ChebUExpansion {
    let half = max_degree / 2;
    let b: Vec<f64> = (0..=half).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let c = rng.gen_range(0.0..=1.0);
    let sq = ChebUExpansion::new(b).square();
    &sq + &ChebUExpansion::one().scale(c)
}

/// `count` half-line operators with ranks cycling through `1..=max_rank`.
pub fn half_line_ensemble(seed: u64, count: usize, max_rank: usize, amp: f64) -> Vec<JacobiOperator> {
    let mut r = rng(seed);
    (0..count).map(|i| random_half_line(&mut r, 1 + i % max_rank.max(1), amp)).collect()
}

/// `count` whole-line operators on windows `[lo, lo + 1 + i mod 5]`, `lo ∈ {0, -1, -2}`.
pub fn whole_line_ensemble(seed: u64, count: usize, amp: f64) -> Vec<JacobiOperator> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let lo = -((i % 3) as i64);
            random_whole_line(&mut r, lo, lo + 1 + (i % 5) as i64, amp)
        })
        .collect()
}

/// Direction with `dp_i, dq_i` uniform in `[-1, 1]` for `lo ≤ i ≤ hi`.
pub fn random_direction(rng: &mut impl Rng, lo: i64, hi: i64) -> PerturbationDirection {
    let dp: Vec<(i64, f64)> = (lo..=hi).map(|i| (i, rng.gen_range(-1.0..=1.0))).collect();
    let dq: Vec<(i64, f64)> = (lo..=hi).map(|i| (i, rng.gen_range(-1.0..=1.0))).collect();
    PerturbationDirection::new(dp, dq)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_range() {
        let a = random_half_line(&mut rng(7), 5, 0.4);
        let b = random_half_line(&mut rng(7), 5, 0.4);
        assert_eq!(a, b);
        assert!(a.rank_index() <= 5);
        for k in 1..5 {
            assert!((a.p(k) - 1.0).abs() <= 0.4);
        }
        let w = random_weight(&mut rng(3), 4);
        assert!(w.degree().unwrap() <= 4);
        assert!(w.min_on_interval(2000).0 >= -1e-12);
    }
}
