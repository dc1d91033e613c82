//! Nelder–Mead on the unit box.

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_evaluations: usize,
    /// Relative spread of vertex values, or absolute spread of vertex
    /// coordinates, below which a run stops.
    pub tolerance: f64,
    pub initial_step: f64,
    pub restart_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_evaluations: 5000,
            tolerance: 1e-8,
            initial_step: 0.1,
            restart_step: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOutcome {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

struct Counter<'a, F> {
    f: &'a mut F,
    evaluations: usize,
}

impl<F: FnMut(&[f64]) -> Result<f64>> Counter<'_, F> {
    fn eval(&mut self, u: &[f64]) -> Result<f64> {
        self.evaluations += 1;
        let v = (self.f)(u)?;
        Ok(if v.is_nan() { f64::INFINITY } else { v })
    }
}

fn clamp_unit(u: &mut [f64]) {
    for x in u {
        *x = x.clamp(0.0, 1.0);
    }
}

fn along(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
    let mut p: Vec<f64> = from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect();
    clamp_unit(&mut p);
    p
}

/// One simplex run. Returns `(best, value, iterations, converged)`.
fn run<F: FnMut(&[f64]) -> Result<f64>>(
    c: &mut Counter<'_, F>,
    start: &[f64],
    f_start: f64,
    step: f64,
    opts: &SimplexOptions,
) -> Result<(Vec<f64>, f64, usize, bool)> {
    let n = start.len();
    let mut verts = vec![start.to_vec()];
    let mut vals = vec![f_start];
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] = if v[i] + step <= 1.0 { v[i] + step } else { v[i] - step };
        vals.push(c.eval(&v)?);
        verts.push(v);
    }
    let mut iterations = 0;
    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
        verts = order.iter().map(|&i| verts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let f_spread = vals[n] - vals[0];
        let x_spread = verts[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&verts[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if x_spread <= opts.tolerance || f_spread <= opts.tolerance * vals[0].abs() {
            return Ok((verts.swap_remove(0), vals[0], iterations, true));
        }
        if c.evaluations >= opts.max_evaluations {
            return Ok((verts.swap_remove(0), vals[0], iterations, false));
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for v in &verts[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let worst = verts[n].clone();
        let reflected = along(&centroid, &worst, -1.0);
        let f_r = c.eval(&reflected)?;
        if f_r < vals[0] {
            let expanded = along(&centroid, &worst, -2.0);
            let f_e = c.eval(&expanded)?;
            if f_e < f_r {
                verts[n] = expanded;
                vals[n] = f_e;
            } else {
                verts[n] = reflected;
                vals[n] = f_r;
            }
            continue;
        }
        if f_r < vals[n - 1] {
            verts[n] = reflected;
            vals[n] = f_r;
            continue;
        }
        let (contracted, f_c) = if f_r < vals[n] {
            let p = along(&centroid, &worst, -0.5);
            let f = c.eval(&p)?;
            (p, f)
        } else {
            let p = along(&centroid, &worst, 0.5);
            let f = c.eval(&p)?;
            (p, f)
        };
        if f_c < vals[n].min(f_r) {
            verts[n] = contracted;
            vals[n] = f_c;
            continue;
        }
        let best = verts[0].clone();
        for i in 1..=n {
            verts[i] = along(&best, &verts[i], 0.5);
            vals[i] = c.eval(&verts[i])?;
        }
    }
}

/// Minimizes `f` over `[0, 1]^n` from `start`, then restarts once from a
/// fresh simplex around the best point.
pub fn minimize_unit_box<F: FnMut(&[f64]) -> Result<f64>>(
    f: &mut F,
    start: &[f64],
    opts: &SimplexOptions,
) -> Result<SimplexOutcome> {
    let mut c = Counter { f, evaluations: 0 };
    let mut u0 = start.to_vec();
    clamp_unit(&mut u0);
    let f0 = c.eval(&u0)?;
    if u0.is_empty() {
        return Ok(SimplexOutcome {
            point: u0,
            value: f0,
            evaluations: c.evaluations,
            iterations: 0,
            converged: true,
        });
    }
    let (p1, v1, it1, _) = run(&mut c, &u0, f0, opts.initial_step, opts)?;
    let (p2, v2, it2, ok2) = run(&mut c, &p1, v1, opts.restart_step, opts)?;
    let (point, value) = if v2 <= v1 { (p2, v2) } else { (p1, v1) };
    Ok(SimplexOutcome {
        point,
        value,
        evaluations: c.evaluations,
        iterations: it1 + it2,
        converged: ok2 && c.evaluations <= opts.max_evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_minimum() {
        let mut f = |u: &[f64]| Ok((u[0] - 0.3).powi(2) + 10.0 * (u[1] - 0.7).powi(2));
        let out = minimize_unit_box(&mut f, &[0.9, 0.1], &SimplexOptions::default()).unwrap();
        assert!(out.converged);
        assert!((out.point[0] - 0.3).abs() < 1e-6 && (out.point[1] - 0.7).abs() < 1e-6);
    }

    #[test]
    fn respects_box_for_exterior_minimum() {
        let mut f = |u: &[f64]| Ok((u[0] + 1.0).powi(2) + (u[1] - 2.0).powi(2));
        let out = minimize_unit_box(&mut f, &[0.5, 0.5], &SimplexOptions::default()).unwrap();
        assert!(out.point.iter().all(|x| (0.0..=1.0).contains(x)));
        assert!(out.point[0] < 1e-6 && out.point[1] > 1.0 - 1e-6);
    }

    #[test]
    fn rosenbrock_in_unit_coordinates() {
        let mut f = |u: &[f64]| {
            let (x, y) = (4.0 * u[0] - 2.0, 4.0 * u[1] - 2.0);
            Ok((1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2))
        };
        let out = minimize_unit_box(&mut f, &[0.2, 0.8], &SimplexOptions::default()).unwrap();
        assert!((out.point[0] - 0.75).abs() < 1e-4 && (out.point[1] - 0.75).abs() < 1e-4, "{:?}", out);
    }

    #[test]
    fn evaluation_budget_is_honoured() {
        let opts = SimplexOptions {
            max_evaluations: 30,
            ..Default::default()
        };
        let mut f = |u: &[f64]| Ok(u.iter().map(|x| (x - 0.123).powi(2)).sum::<f64>());
        let out = minimize_unit_box(&mut f, &[0.9; 4], &opts).unwrap();
        assert!(!out.converged);
        assert!(out.evaluations <= 30 + 8);
    }
}
