//! Gaussian averages over quasi-static spectral diffusion.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

pub const GH_MIN_NODES: usize = 32;
pub const GH_MAX_NODES: usize = 32768;
pub const GH_TOLERANCE: f64 = 1e-6;

/// Gauss–Hermite rule for the weight e^{-x²}.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL.
/// `e[i]` couples rows i and i+1; `e[n-1]` is ignored.
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    if n < 2 {
        return;
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            assert!(iterations < 100, "QL iteration failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Orthonormal Hermite recurrence at `x`.
/// Returns `(p_n / (√(2n) p_{n-1}), ln(Σ_{k<n} p_k²))`.
fn hermite_newton_and_christoffel(n: usize, x: f64) -> (f64, f64) {
    const BIG: f64 = 1e100;
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    let mut sum = cur * cur;
    let mut log_scale = 0.0;
    for k in 0..n - 1 {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        sum += cur * cur;
        if cur.abs() > BIG {
            prev /= BIG;
            cur /= BIG;
            sum /= BIG * BIG;
            log_scale += BIG.ln();
        }
    }
    // cur = p_{n-1}, prev = p_{n-2}
    let nf = n as f64;
    let pn = (2.0 / nf).sqrt() * x * cur - ((nf - 1.0) / nf).sqrt() * prev;
    let dpn = (2.0 * nf).sqrt() * cur;
    (pn / dpn, sum.ln() + 2.0 * log_scale)
}

/// Rules up to this size come from the Jacobi matrix; larger ones from
/// asymptotic guesses polished by Newton.
const QL_MAX_NODES: usize = 256;

/// Nodes whose weight falls below this fraction of the central weight are
/// dropped from large rules.
const WEIGHT_CUTOFF: f64 = 1e-40;

/// Positive zero of `φ(x) − target` with `φ` the WKB phase of H_n.
fn wkb_zero(n: usize, target: f64) -> f64 {
    let m = 2.0 * n as f64 + 1.0;
    let root = m.sqrt();
    let phase = |x: f64| 0.5 * x * (m - x * x).sqrt() + 0.5 * m * (x / root).asin();
    let mut x = target / root;
    for _ in 0..20 {
        let step = (phase(x) - target) / (m - x * x).sqrt();
        x = (x - step).clamp(0.0, root * (1.0 - 1e-12));
        if step.abs() < 1e-14 * x.max(1.0) {
            break;
        }
    }
    x
}

fn polish(n: usize, x0: f64) -> (f64, f64) {
    let mut x = x0;
    for _ in 0..12 {
        let (step, _) = hermite_newton_and_christoffel(n, x);
        if !step.is_finite() {
            break;
        }
        x -= step;
        if step.abs() < 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    let (_, log_sum) = hermite_newton_and_christoffel(n, x);
    (x, (-log_sum).exp())
}

impl GaussHermite {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        if n > QL_MAX_NODES {
            return Self::asymptotic(n);
        }
        let mut d = vec![0.0; n];
        let mut e: Vec<f64> = (0..n).map(|k| ((k + 1) as f64 / 2.0).sqrt()).collect();
        tridiagonal_eigenvalues(&mut d, &mut e);
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for &x0 in &d {
            let mut x = x0;
            for _ in 0..3 {
                let (step, _) = hermite_newton_and_christoffel(n, x);
                if !step.is_finite() {
                    break;
                }
                x -= step;
            }
            let (_, log_sum) = hermite_newton_and_christoffel(n, x);
            nodes.push(x);
            weights.push((-log_sum).exp());
        }
        // Enforce exact mirror symmetry.
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let x = 0.5 * (nodes[j] - nodes[i]);
            let w = 0.5 * (weights[i] + weights[j]);
            nodes[i] = -x;
            nodes[j] = x;
            weights[i] = w;
            weights[j] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussHermite { nodes, weights }
    }

    /// Large rule restricted to nodes with non-negligible weight.
    fn asymptotic(n: usize) -> Self {
        let mut positive = Vec::new();
        let mut centre = None;
        let (first, offset) = if n % 2 == 1 {
            let (x, w) = polish(n, 0.0);
            centre = Some((x, w));
            (1usize, 0.0)
        } else {
            (0usize, 0.5)
        };
        let mut w_ref = centre.map(|c| c.1);
        for k in first.. {
            let target = (k as f64 + offset) * std::f64::consts::PI;
            let (x, w) = polish(n, wkb_zero(n, target));
            let w0 = *w_ref.get_or_insert(w);
            if w < WEIGHT_CUTOFF * w0 || positive.len() + first >= n / 2 + n % 2 {
                break;
            }
            positive.push((x, w));
        }
        let mut nodes = Vec::with_capacity(2 * positive.len() + 1);
        let mut weights = Vec::with_capacity(2 * positive.len() + 1);
        for &(x, w) in positive.iter().rev() {
            nodes.push(-x);
            weights.push(w);
        }
        if let Some((_, w)) = centre {
            nodes.push(0.0);
            weights.push(w);
        }
        for &(x, w) in &positive {
            nodes.push(x);
            weights.push(w);
        }
        GaussHermite { nodes, weights }
    }

    /// Cached rule with `n` nodes.
    pub fn cached(n: usize) -> Arc<GaussHermite> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(rule) = cache.lock().expect("cache").get(&n) {
            return rule.clone();
        }
        let rule = Arc::new(GaussHermite::new(n));
        cache.lock().expect("cache").insert(n, rule.clone());
        rule
    }

    /// E[f(δ)] for δ ~ N(0, σ²).
    pub fn normal_expectation(&self, sigma: f64, f: impl Fn(f64) -> f64) -> f64 {
        let scale = std::f64::consts::SQRT_2 * sigma;
        let norm = std::f64::consts::PI.sqrt().recip();
        self.nodes
            .iter()
            .zip(&self.weights)
            .filter(|(_, w)| **w > 0.0)
            .map(|(x, w)| w * f(scale * x))
            .sum::<f64>()
            * norm
    }
}

/// Gaussian average by Gauss–Hermite quadrature, doubling the node count
/// from 32 until two successive rules agree to 1e-6.
pub fn gaussian_average(sigma: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
    if sigma == 0.0 {
        return Ok(f(0.0));
    }
    let mut n = GH_MIN_NODES;
    let mut prev = GaussHermite::cached(n).normal_expectation(sigma, &f);
    let mut change = f64::INFINITY;
    while n < GH_MAX_NODES {
        n *= 2;
        let next = GaussHermite::cached(n).normal_expectation(sigma, &f);
        change = (next - prev).abs();
        prev = next;
        if change <= GH_TOLERANCE {
            return Ok(prev);
        }
    }
    Err(Error::QuadratureNotConverged { nodes: n, change })
}

/// Uniform Gaussian-weighted grid over ±6σ for averaging steady states.
///
/// Spacing is half of `feature_width` so that Lorentzian features of that
/// half width are resolved; trapezoid sums on such grids converge
/// geometrically for analytic integrands.
#[derive(Debug, Clone)]
pub struct DiffusionGrid {
    pub offsets: Vec<f64>,
    pub weights: Vec<f64>,
}

pub const DIFFUSION_SPAN_SIGMAS: f64 = 6.0;

impl DiffusionGrid {
    pub fn new(sigma: f64, feature_width: f64) -> Self {
        if sigma <= 0.0 {
            return DiffusionGrid {
                offsets: vec![0.0],
                weights: vec![1.0],
            };
        }
        let span = DIFFUSION_SPAN_SIGMAS * sigma;
        let half = ((span / (0.5 * feature_width)).ceil() as usize).max(8);
        let h = span / half as f64;
        let offsets: Vec<f64> = (0..=2 * half).map(|i| (i as f64 - half as f64) * h).collect();
        let raw: Vec<f64> = offsets
            .iter()
            .map(|d| (-0.5 * (d / sigma).powi(2)).exp())
            .collect();
        let total: f64 = raw.iter().sum();
        DiffusionGrid {
            offsets,
            weights: raw.into_iter().map(|w| w / total).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}
