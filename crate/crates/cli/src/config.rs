//! Flag/file configuration and the small spec languages for operators,
//! weights, `n` ranges and grids.

use std::path::Path;

use clap::Args;
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use sumrule_core::asymptotics::{dist_to_cut, lattice_grid};
use sumrule_core::cheb::{ChebUExpansion, PowerPoly};
use sumrule_core::ensemble::half_line_ensemble;
use sumrule_core::jacobi::{JacobiOperator, Side};
use sumrule_core::sumrules::check_nonnegative;

/// Exit-code carrying failure.
#[derive(Debug)]
pub enum Failure {
    /// Usage or configuration problem, exit 2.
    Config(String),
    /// A computation failed or a check did not pass, exit 1.
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

pub fn config_err(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

pub fn num_err(e: impl std::fmt::Display) -> Failure {
    Failure::Numerical(e.to_string())
}

/// Fields a command reads from either flags or the `--config` file.
pub trait Merge {
    /// Keeps every value set on `self`, filling the gaps from `file`.
    fn merge(self, file: Self) -> Self;

    /// Keys accepted in the config file (compared case-insensitively).
    fn keys() -> Vec<&'static str>;
}

macro_rules! impl_merge {
    ($t:ty { $($f:ident),* $(,)? } $(flatten { $($g:ident: $gt:ty),* })?) => {
        impl Merge for $t {
            fn merge(self, file: Self) -> Self {
                Self {
                    $($f: self.$f.or(file.$f),)*
                    $($($g: self.$g.merge(file.$g),)*)?
                }
            }

            fn keys() -> Vec<&'static str> {
                #[allow(unused_mut)]
                let mut keys = vec![$(stringify!($f)),*];
                $($(keys.extend(<$gt as Merge>::keys());)*)?
                keys
            }
        }
    };
}
pub(crate) use impl_merge;

/// Reads `path` as JSON into `T`; an absent path gives `T::default()`.
/// Unknown keys are rejected.
pub fn load_file<T: DeserializeOwned + Default + Merge>(path: Option<&Path>) -> Result<T, Failure> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let at = |e: &dyn std::fmt::Display| config_err(format!("{}: {e}", path.display()));
    let text = std::fs::read_to_string(path).map_err(|e| at(&e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| at(&e))?;
    let Some(map) = value.as_object() else {
        return Err(at(&"expected a JSON object"));
    };
    let known = T::keys();
    if let Some(k) = map.keys().find(|k| !known.contains(&k.to_lowercase().as_str())) {
        return Err(at(&format!("unknown key {k:?}")));
    }
    serde_json::from_value(value).map_err(|e| at(&e))
}

/// Which operators a command runs on.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OperatorArgs {
    /// Operator as inline JSON or a path to a JSON file
    #[arg(long)]
    pub operator: Option<String>,
    /// Named operator: free, rank3
    #[arg(long)]
    pub preset: Option<String>,
    /// Rank-one half-line operator with this q_0
    #[arg(long)]
    pub q0: Option<f64>,
    /// Number of seeded random operators
    #[arg(long)]
    pub random: Option<usize>,
    /// Largest rank in the random ensemble
    #[arg(long)]
    pub rank: Option<usize>,
    /// Bound on |p - 1| and |q| in the random ensemble
    #[arg(long)]
    pub amp: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl_merge!(OperatorArgs { operator, preset, q0, random, rank, amp, seed });

pub fn parse_operator(spec: &str) -> Result<JacobiOperator, Failure> {
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec).map_err(|e| config_err(format!("{spec}: {e}")))?
    };
    JacobiOperator::from_json(&text).map_err(config_err)
}

pub fn preset(name: &str) -> Result<JacobiOperator, Failure> {
    match name {
        "free" => Ok(JacobiOperator::free(Side::HalfLine)),
        "rank3" => JacobiOperator::from_coefficients(&[1.2, 0.3, -0.2], &[1.1, 0.9]).map_err(config_err),
        "free-whole" => Ok(JacobiOperator::free(Side::WholeLine)),
        other => Err(config_err(format!("unknown preset {other:?} (free, rank3, free-whole)"))),
    }
}

impl OperatorArgs {
    /// Resolves exactly one operator source; `fallback` names the default preset.
    pub fn resolve(&self, fallback: &str) -> Result<Vec<JacobiOperator>, Failure> {
        let chosen = [self.operator.is_some(), self.preset.is_some(), self.q0.is_some(), self.random.is_some()]
            .iter()
            .filter(|&&b| b)
            .count();
        if chosen > 1 {
            return Err(config_err("give only one of --operator, --preset, --q0, --random"));
        }
        if let Some(spec) = &self.operator {
            return Ok(vec![parse_operator(spec)?]);
        }
        if let Some(q0) = self.q0 {
            return Ok(vec![JacobiOperator::half_line([], [(0, q0)]).map_err(config_err)?]);
        }
        if let Some(count) = self.random {
            let rank = self.rank.unwrap_or(6);
            let amp = self.amp.unwrap_or(0.4);
            if rank == 0 || !(0.0..1.0).contains(&amp) {
                return Err(config_err("--rank must be ≥ 1 and --amp in [0, 1)"));
            }
            return Ok(half_line_ensemble(self.seed.unwrap_or(0), count, rank, amp));
        }
        Ok(vec![preset(self.preset.as_deref().unwrap_or(fallback))?])
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, Failure> {
    s.split(',').map(|t| t.trim().parse::<T>().map_err(|_| config_err(format!("bad number {t:?} in {s:?}")))).collect()
}

/// Weight specs: `one`, `U<l>sq`, `UmUn:m,n`, `sq:c1,c2,..` for `(Σ c_l U_l)²`,
/// or plain U-basis coefficients `c1,c2,..`.
pub fn parse_weight(spec: &str) -> Result<ChebUExpansion, Failure> {
    let s = spec.trim();
    let a = if s == "one" {
        ChebUExpansion::one()
    } else if let Some(rest) = s.strip_prefix("UmUn:") {
        match parse_list::<usize>(rest)?.as_slice() {
            &[m, n] if m >= 1 && n >= 1 => ChebUExpansion::basis(m).u_product(&ChebUExpansion::basis(n)),
            _ => return Err(config_err(format!("{spec:?}: expected UmUn:m,n with m, n ≥ 1"))),
        }
    } else if let Some(rest) = s.strip_prefix("sq:") {
        ChebUExpansion::new(parse_list(rest)?).square()
    } else if let Some(l) = s.strip_prefix('U').and_then(|r| r.strip_suffix("sq")) {
        let l: usize = l.parse().map_err(|_| config_err(format!("bad weight {spec:?}")))?;
        if l == 0 {
            return Err(config_err("U-indices start at 1"));
        }
        ChebUExpansion::u_squared(l)
    } else {
        ChebUExpansion::new(parse_list(s)?)
    };
    if a.is_zero() {
        return Err(config_err(format!("{spec:?} is the zero weight")));
    }
    check_nonnegative(&a).map_err(|e| config_err(format!("{spec:?}: {e}")))?;
    Ok(a)
}

/// `start:end:step` (inclusive) or a comma list.
pub fn parse_ns(spec: &str) -> Result<Vec<usize>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let ns = match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step): (usize, usize, usize) = (
                a.trim().parse().map_err(config_err)?,
                b.trim().parse().map_err(config_err)?,
                step.trim().parse().map_err(config_err)?,
            );
            if step == 0 {
                return Err(config_err("range step must be positive"));
            }
            (a..=b).step_by(step).collect()
        }
        [_] => parse_list(spec)?,
        _ => return Err(config_err(format!("bad n range {spec:?}"))),
    };
    if ns.is_empty() || ns.contains(&0) {
        return Err(config_err(format!("n range {spec:?} must be nonempty with n ≥ 1")));
    }
    Ok(ns)
}

/// Probe points keep this distance from `[-2, 2]` and from real zeros of `A`,
/// where the normalization is singular.
pub const EXCLUSION_RADIUS: f64 = 0.1;

fn bisect_root(p: &PowerPoly, mut lo: f64, mut hi: f64) -> f64 {
    let flo = p.eval_real(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (p.eval_real(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Real zeros of `A` in `[-bound, bound]`: sign changes of `A`, plus critical
/// points where `A` vanishes to rounding (even multiplicity).
pub fn real_zeros(a: &ChebUExpansion, bound: f64) -> Vec<f64> {
    let p = a.to_power();
    let dp = p.derivative();
    let scale =
        p.coeffs().iter().map(|c| c.abs()).fold(0.0, f64::max) * (1.0 + bound).powi(p.degree().unwrap_or(0) as i32);
    let steps = (2.0 * bound / 1e-3).ceil() as usize;
    let xs: Vec<f64> = (0..=steps).map(|k| -bound + 2.0 * bound * k as f64 / steps as f64).collect();
    let mut out = Vec::new();
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        if p.eval_real(x0) == 0.0 {
            out.push(x0);
        } else if (p.eval_real(x0) > 0.0) != (p.eval_real(x1) > 0.0) && p.eval_real(x1) != 0.0 {
            out.push(bisect_root(&p, x0, x1));
        } else if (dp.eval_real(x0) > 0.0) != (dp.eval_real(x1) > 0.0) {
            let c = bisect_root(&dp, x0, x1);
            if p.eval_real(c).abs() <= 1e-12 * scale {
                out.push(c);
            }
        }
    }
    out
}

/// Explicit `re,im;re,im;..` points, or the lattice of spacing `step` in
/// `|z| ≤ radius` at distance `≥ min_dist` from the cut, without the points near
/// real zeros of `a`.
pub fn build_grid(
    points: Option<&str>,
    radius: f64,
    step: f64,
    min_dist: f64,
    a: &ChebUExpansion,
) -> Result<Vec<Complex64>, Failure> {
    let near_zero = |z: Complex64, zeros: &[f64]| zeros.iter().any(|&x| (z - x).norm() < EXCLUSION_RADIUS);
    let grid: Vec<Complex64> = match points {
        Some(spec) => {
            let grid = spec
                .split(';')
                .filter(|t| !t.trim().is_empty())
                .map(|t| match parse_list::<f64>(t)?.as_slice() {
                    &[re, im] => Ok(Complex64::new(re, im)),
                    _ => Err(config_err(format!("grid point {t:?} is not re,im"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let bound = grid.iter().map(|z| z.norm()).fold(0.0, f64::max) + 1.0;
            let zeros = real_zeros(a, bound);
            if let Some(z) = grid.iter().find(|&&z| near_zero(z, &zeros)) {
                return Err(config_err(format!("grid point {z} lies within {EXCLUSION_RADIUS} of a zero of A")));
            }
            grid
        }
        None => {
            if !(step > 0.0 && radius > 0.0) {
                return Err(config_err("grid radius and step must be positive"));
            }
            if min_dist.is_nan() || min_dist < EXCLUSION_RADIUS {
                return Err(config_err(format!("--min-dist must be at least {EXCLUSION_RADIUS}")));
            }
            let zeros = real_zeros(a, radius + 1.0);
            lattice_grid(radius, step, min_dist).into_iter().filter(|&z| !near_zero(z, &zeros)).collect()
        }
    };
    if grid.is_empty() {
        return Err(config_err("empty grid"));
    }
    if let Some(z) = grid.iter().find(|&&z| dist_to_cut(z).is_nan() || dist_to_cut(z) < EXCLUSION_RADIUS) {
        return Err(config_err(format!("grid point {z} is within {EXCLUSION_RADIUS} of the cut [-2, 2]")));
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights() {
        assert_eq!(parse_weight("one").unwrap(), ChebUExpansion::one());
        assert_eq!(parse_weight("U2sq").unwrap(), ChebUExpansion::u_squared(2));
        assert_eq!(parse_weight("UmUn:3,3").unwrap(), ChebUExpansion::u_squared(3));
        assert_eq!(parse_weight("sq:1,1").unwrap(), ChebUExpansion::new(vec![1.0, 1.0]).square());
        assert_eq!(parse_weight("1,0,0.5").unwrap(), ChebUExpansion::new(vec![1.0, 0.0, 0.5]));
        // U_1 U_2 = x changes sign
        assert!(matches!(parse_weight("UmUn:1,2"), Err(Failure::Config(_))));
        assert!(parse_weight("U0sq").is_err());
        assert!(parse_weight("0").is_err());
        assert!(parse_weight("banana").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_ns("50:80:10").unwrap(), vec![50, 60, 70, 80]);
        assert_eq!(parse_ns("3, 5,9").unwrap(), vec![3, 5, 9]);
        assert!(parse_ns("1:5:0").is_err());
        assert!(parse_ns("0,1").is_err());
        assert!(parse_ns("a:b").is_err());
    }

    #[test]
    fn grids() {
        let one = ChebUExpansion::one();
        assert_eq!(build_grid(Some("3,0; 0,2"), 0.0, 0.0, 0.0, &one).unwrap().len(), 2);
        assert!(build_grid(Some("1,0"), 0.0, 0.0, 0.0, &one).is_err());
        assert!(build_grid(Some("2.05,0"), 0.0, 0.0, 0.0, &one).is_err());
        assert!(build_grid(None, 6.0, 0.5, 0.0, &one).is_err());
        assert!(build_grid(None, 6.0, 0.5, 1.0, &one).unwrap().iter().all(|&z| dist_to_cut(z) >= 1.0));
    }

    #[test]
    fn zeros_of_weight_are_excluded() {
        // (x - 3)² = 10 U_1 - 6 U_2 + U_3
        let a = parse_weight("10,-6,1").unwrap();
        let zeros = real_zeros(&a, 7.0);
        assert_eq!(zeros.len(), 1);
        assert!((zeros[0] - 3.0).abs() < 1e-5);
        // x - 2.5 as U_2 - 2.5 U_1 crosses zero once
        let simple = real_zeros(&ChebUExpansion::new(vec![-2.5, 1.0]), 7.0);
        assert!(simple.len() == 1 && (simple[0] - 2.5).abs() < 1e-12);
        assert!(real_zeros(&ChebUExpansion::u_squared(2), 7.0).iter().all(|x| x.abs() < 1e-5));
        assert!(build_grid(Some("3.05,0"), 0.0, 0.0, 0.0, &a).is_err());
        let lattice = build_grid(None, 6.0, 0.5, 1.0, &a).unwrap();
        assert!(!lattice.contains(&Complex64::new(3.0, 0.0)));
        assert!(lattice.contains(&Complex64::new(3.5, 0.0)));
    }

    #[test]
    fn merge_prefers_flags() {
        let flags = OperatorArgs { q0: Some(1.5), ..Default::default() };
        let file = OperatorArgs { q0: Some(3.0), seed: Some(9), ..Default::default() };
        let m = flags.merge(file);
        assert_eq!((m.q0, m.seed), (Some(1.5), Some(9)));
    }

    #[test]
    fn file_keys_checked() {
        let dir = std::env::temp_dir().join(format!("sumrule-lab-cfg-{}", std::process::id()));
        std::fs::write(&dir, r#"{"q0": 2.0, "sed": 1}"#).unwrap();
        let got = load_file::<OperatorArgs>(Some(&dir));
        std::fs::write(&dir, r#"{"q0": 2.0, "seed": 1}"#).unwrap();
        let ok = load_file::<OperatorArgs>(Some(&dir)).unwrap();
        std::fs::remove_file(&dir).unwrap();
        assert!(matches!(got, Err(Failure::Config(m)) if m.contains("sed")));
        assert_eq!((ok.q0, ok.seed), (Some(2.0), Some(1)));
    }

    #[test]
    fn operator_sources() {
        let both = OperatorArgs { q0: Some(1.5), preset: Some("free".into()), ..Default::default() };
        assert!(both.resolve("free").is_err());
        let r = OperatorArgs { random: Some(4), seed: Some(1), ..Default::default() };
        assert_eq!(r.resolve("free").unwrap(), r.resolve("free").unwrap());
        let inline =
            OperatorArgs { operator: Some(r#"{"side":"half","p":{},"q":{"0":1.5}}"#.into()), ..Default::default() };
        assert_eq!(inline.resolve("free").unwrap()[0].q(0), 1.5);
        assert!(OperatorArgs { preset: Some("nope".into()), ..Default::default() }.resolve("free").is_err());
    }
}
