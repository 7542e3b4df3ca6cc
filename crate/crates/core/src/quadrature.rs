//! Quadrature rules used by the spectral side.
//!
//! Node/weight tables come from `gauss-quad`; this module only rescales them to
//! the intervals and weights that appear here.

use std::num::NonZeroUsize;

use gauss_quad::chebyshev::GaussChebyshevSecondKind;
use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

/// Gauss rule for `∫_{-2}^{2} g(x) √(4 - x²) dx`.
///
/// Nodes are `x_j = 2 cos(jπ/(N+1))`; exact for polynomial `g` of degree `< 2N`.
#[derive(Debug, Clone)]
pub struct SqrtWeightRule {
    nodes: Vec<(f64, f64)>,
}

impl SqrtWeightRule {
    pub fn new(n: usize) -> Self {
        let rule = GaussChebyshevSecondKind::new(NonZeroUsize::new(n.max(1)).unwrap());
        // ∫_{-2}^{2} g(x)√(4-x²)dx = 4 ∫_{-1}^{1} g(2t)√(1-t²)dt
        let nodes = rule.iter().map(|(t, w)| (2.0 * t, 4.0 * w)).collect();
        Self { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().map(|&(x, w)| w * g(x)).sum()
    }

    pub fn integrate_complex(&self, g: impl Fn(f64) -> Complex64) -> Complex64 {
        self.nodes.iter().map(|&(x, w)| g(x) * w).sum()
    }
}

/// Composite Gauss–Legendre rule on a finite interval.
#[derive(Debug, Clone)]
pub struct Panels {
    rule: Vec<(f64, f64)>,
    max_width: f64,
}

impl Panels {
    /// `order` nodes per panel, panels no wider than `max_width`.
    pub fn new(order: usize, max_width: f64) -> Self {
        let rule = GaussLegendre::new(NonZeroUsize::new(order.max(1)).unwrap()).iter().map(|(x, w)| (*x, *w)).collect();
        Self { rule, max_width }
    }

    pub fn integrate_complex(&self, a: f64, b: f64, g: impl Fn(f64) -> Complex64) -> Complex64 {
        if a == b {
            return Complex64::new(0.0, 0.0);
        }
        let panels = ((b - a).abs() / self.max_width).ceil().max(1.0) as usize;
        let h = (b - a) / panels as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let lo = a + h * p as f64;
            let mid = lo + 0.5 * h;
            for &(t, w) in &self.rule {
                acc += g(mid + 0.5 * h * t) * (0.5 * h * w);
            }
        }
        acc
    }

    pub fn integrate(&self, a: f64, b: f64, g: impl Fn(f64) -> f64) -> f64 {
        self.integrate_complex(a, b, |x| Complex64::new(g(x), 0.0)).re
    }
}

/// Adaptive rule for `∫_{-2}^{2} g(x) √(4 - x²) dx`, run in `x = 2cos θ`.
///
/// The integrand `4 g(2cos θ) sin²θ` is analytic in `θ` for the densities met
/// here, but resonances of `u` close to the cut produce narrow peaks that a
/// fixed rule misses. The base partition has about `nodes` Gauss–Legendre
/// points; each panel is bisected until halving changes it by less than `tol`.
#[derive(Debug, Clone)]
pub struct CutQuadrature {
    rule: Vec<(f64, f64)>,
    panels: usize,
    tol: f64,
    max_depth: u32,
}

const CUT_ORDER: usize = 16;

impl CutQuadrature {
    pub fn new(nodes: usize) -> Self {
        let rule = GaussLegendre::new(NonZeroUsize::new(CUT_ORDER).unwrap()).iter().map(|(x, w)| (*x, *w)).collect();
        Self { rule, panels: (nodes / CUT_ORDER).max(1), tol: 1e-15, max_depth: 40 }
    }

    pub fn base_nodes(&self) -> usize {
        self.panels * CUT_ORDER
    }

    fn panel(&self, a: f64, b: f64, f: &impl Fn(f64) -> Complex64) -> Complex64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        self.rule.iter().map(|&(t, w)| f(mid + half * t) * (half * w)).sum()
    }

    fn adapt(&self, a: f64, b: f64, whole: Complex64, depth: u32, f: &impl Fn(f64) -> Complex64) -> Complex64 {
        let mid = 0.5 * (a + b);
        let left = self.panel(a, mid, f);
        let right = self.panel(mid, b, f);
        let refined = left + right;
        if depth >= self.max_depth || (refined - whole).norm() <= self.tol * (1.0 + refined.norm()) {
            return refined;
        }
        self.adapt(a, mid, left, depth + 1, f) + self.adapt(mid, b, right, depth + 1, f)
    }

    /// `∫_0^π f(θ) dθ`.
    pub fn integrate_theta(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        let h = std::f64::consts::PI / self.panels as f64;
        (0..self.panels)
            .map(|i| {
                let (a, b) = (h * i as f64, h * (i + 1) as f64);
                let whole = self.panel(a, b, &f);
                self.adapt(a, b, whole, 0, &f)
            })
            .sum()
    }

    /// `∫_{-2}^{2} g(x) √(4 - x²) dx` where `g` receives `θ` (with `x = 2cos θ`).
    pub fn integrate_sqrt_weight(&self, g: impl Fn(f64) -> Complex64) -> Complex64 {
        self.integrate_theta(|t| {
            let s = t.sin();
            g(t) * (4.0 * s * s)
        })
    }
}

impl Default for Panels {
    fn default() -> Self {
        Self::new(24, 0.25)
    }
}
