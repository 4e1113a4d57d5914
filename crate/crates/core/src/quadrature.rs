//! Gaussian velocity averages `<f> = Int f(u) exp(-(u - c)^2 / 2 s^2) du / sqrt(2 pi s^2)`.
//!
//! Gauss-Hermite is tried first with `n` and `2n` nodes. If the two disagree
//! the integrand has structure finer than the node spacing and the average
//! is redone with adaptive 16-point Gauss-Legendre panels over `c +- k s`.

use std::collections::{BinaryHeap, HashMap};
use std::cmp::Ordering;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub hermite_nodes: usize,
    /// Absolute tolerance of both the node-doubling test and the panel refinement.
    pub tolerance: f64,
    /// Half-width of the panel domain in standard deviations.
    pub span_sigmas: f64,
    pub initial_panels: usize,
    pub max_panels: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            hermite_nodes: 128,
            tolerance: 1e-10,
            span_sigmas: 8.0,
            initial_panels: 64,
            max_panels: 40_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadratureMethod {
    GaussHermite { nodes: usize },
    AdaptivePanels { panels: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: C64,
    pub error_estimate: f64,
    pub method: QuadratureMethod,
}

/// Nodes and weights for `Int e^{-t^2} f(t) dt`.
#[derive(Debug)]
pub struct HermiteRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug)]
pub struct LegendreRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Cached Gauss-Hermite rule with `n` nodes.
pub fn hermite_rule(n: usize) -> Arc<HermiteRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<HermiteRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
    map.entry(n).or_insert_with(|| Arc::new(build_hermite(n))).clone()
}

fn build_hermite(n: usize) -> HermiteRule {
    assert!(n >= 1, "Gauss-Hermite needs at least one node");
    // Golub-Welsch seeds, polished by Newton on the orthonormal recurrence
    let jacobi = DMatrix::<f64>::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut seeds: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    seeds.sort_by(f64::total_cmp);

    let pim4 = PI.powf(-0.25);
    let nf = n as f64;
    let orthonormal = |z: f64| {
        let (mut p1, mut p2) = (pim4, 0.0);
        for j in 0..n {
            let p3 = p2;
            p2 = p1;
            let jf = j as f64;
            p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
        }
        (p1, (2.0 * nf).sqrt() * p2)
    };

    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for seed in seeds {
        let mut z = seed;
        for _ in 0..8 {
            let (p, dp) = orthonormal(z);
            let step = p / dp;
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, dp) = orthonormal(z);
        nodes.push(z);
        weights.push(2.0 / (dp * dp));
    }
    // enforce exact symmetry
    for i in 0..n / 2 {
        let x = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[n - 1 - i]);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    HermiteRule { nodes, weights }
}

/// Cached 16-point Gauss-Legendre rule.
pub fn legendre16() -> &'static LegendreRule {
    static RULE: OnceLock<LegendreRule> = OnceLock::new();
    RULE.get_or_init(|| build_legendre(16))
}

fn build_legendre(n: usize) -> LegendreRule {
    let nf = n as f64;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 1.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let step = p1 / pp;
            z -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    LegendreRule { nodes: x, weights: w }
}

fn hermite_average<F: Fn(f64) -> C64>(f: &F, center: f64, sigma: f64, n: usize) -> C64 {
    let rule = hermite_rule(n);
    let scale = std::f64::consts::SQRT_2 * sigma;
    let sum: C64 = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &w)| f(center + scale * t) * w)
        .sum();
    sum / PI.sqrt()
}

struct Panel {
    lo: f64,
    hi: f64,
    value: C64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn legendre_panel<F: Fn(f64) -> C64>(g: &F, lo: f64, hi: f64) -> C64 {
    let rule = legendre16();
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let sum: C64 = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| g(mid + half * x) * w)
        .sum();
    sum * half
}

fn split_panel<F: Fn(f64) -> C64>(g: &F, lo: f64, hi: f64, coarse: C64) -> (Panel, Panel) {
    let mid = 0.5 * (lo + hi);
    let left = legendre_panel(g, lo, mid);
    let right = legendre_panel(g, mid, hi);
    let error = (coarse - left - right).norm();
    (
        Panel { lo, hi: mid, value: left, error: 0.5 * error },
        Panel { lo: mid, hi, value: right, error: 0.5 * error },
    )
}

fn adaptive_average<F: Fn(f64) -> C64>(
    f: &F,
    center: f64,
    sigma: f64,
    settings: &QuadratureSettings,
) -> Result<QuadratureResult> {
    let norm = 1.0 / (2.0 * PI).sqrt() / sigma;
    let g = |u: f64| {
        let t = (u - center) / sigma;
        f(u) * (norm * (-0.5 * t * t).exp())
    };
    let lo = center - settings.span_sigmas * sigma;
    let width = 2.0 * settings.span_sigmas * sigma / settings.initial_panels as f64;

    let mut heap = BinaryHeap::new();
    for k in 0..settings.initial_panels {
        let a = lo + width * k as f64;
        let b = a + width;
        let coarse = legendre_panel(&g, a, b);
        let (l, r) = split_panel(&g, a, b, coarse);
        heap.push(l);
        heap.push(r);
    }

    loop {
        let total_error: f64 = heap.iter().map(|p| p.error).sum();
        if total_error <= settings.tolerance {
            let value = heap.iter().map(|p| p.value).sum();
            return Ok(QuadratureResult {
                value,
                error_estimate: total_error,
                method: QuadratureMethod::AdaptivePanels { panels: heap.len() },
            });
        }
        if heap.len() >= settings.max_panels {
            return Err(Error::NonConvergence {
                what: "adaptive Doppler quadrature",
                iterations: heap.len(),
                last_change: total_error,
            });
        }
        // refine the worst few panels before re-summing
        for _ in 0..16 {
            let Some(worst) = heap.pop() else { break };
            let (l, r) = split_panel(&g, worst.lo, worst.hi, worst.value);
            heap.push(l);
            heap.push(r);
        }
    }
}

/// Gaussian average of `f` over a normal distribution with mean `center` and
/// standard deviation `sigma > 0`.
pub fn gaussian_average<F: Fn(f64) -> C64>(
    f: F,
    center: f64,
    sigma: f64,
    settings: &QuadratureSettings,
) -> Result<QuadratureResult> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::DegenerateWidth(sigma));
    }
    let n = settings.hermite_nodes.max(2);
    let coarse = hermite_average(&f, center, sigma, n);
    let fine = hermite_average(&f, center, sigma, 2 * n);
    let change = (fine - coarse).norm();
    if change < settings.tolerance {
        return Ok(QuadratureResult {
            value: fine,
            error_estimate: change,
            method: QuadratureMethod::GaussHermite { nodes: 2 * n },
        });
    }
    adaptive_average(&f, center, sigma, settings)
}
