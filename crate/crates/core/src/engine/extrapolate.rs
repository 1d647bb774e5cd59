use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const Q_MIN: f64 = 0.05;
pub const Q_MAX: f64 = 12.0;

/// Fit of `m(r) = m∞ + c r^{-q}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub mass_inf: f64,
    pub coefficient: f64,
    pub exponent: f64,
    pub max_residual: f64,
    /// Max residual plus the shift of `m∞` when the innermost radius is dropped.
    pub error: f64,
    pub converged: bool,
}

fn fit_fixed(q: f64, r: &[f64], m: &[f64]) -> (f64, f64, f64) {
    let k = r.len() as f64;
    let x: Vec<f64> = r.iter().map(|ri| ri.powf(-q)).collect();
    let xm = x.iter().sum::<f64>() / k;
    let mm = m.iter().sum::<f64>() / k;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (xi, mi) in x.iter().zip(m) {
        sxx += (xi - xm) * (xi - xm);
        sxy += (xi - xm) * (mi - mm);
    }
    let c = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let minf = mm - c * xm;
    let ssr = x.iter().zip(m).map(|(xi, mi)| (mi - minf - c * xi).powi(2)).sum();
    (minf, c, ssr)
}

fn golden(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-14 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

/// Gauss–Newton refinement of `(m∞, c, q)`; returns the input when no step improves.
fn refine(r: &[f64], m: &[f64], mut p: (f64, f64, f64)) -> (f64, f64, f64) {
    let ssr =
        |p: (f64, f64, f64)| -> f64 { r.iter().zip(m).map(|(ri, mi)| (mi - p.0 - p.1 * ri.powf(-p.2)).powi(2)).sum() };
    let mut best = ssr(p);
    for _ in 0..50 {
        let mut jtj = nalgebra::Matrix3::<f64>::zeros();
        let mut jtr = nalgebra::Vector3::<f64>::zeros();
        for (ri, mi) in r.iter().zip(m) {
            let x = ri.powf(-p.2);
            let res = mi - p.0 - p.1 * x;
            let j = nalgebra::Vector3::new(1.0, x, -p.1 * x * ri.ln());
            jtj += j * j.transpose();
            jtr += j * res;
        }
        let Some(step) = jtj.lu().solve(&jtr) else { break };
        let cand = (p.0 + step[0], p.1 + step[1], (p.2 + step[2]).clamp(Q_MIN, Q_MAX));
        let s = ssr(cand);
        if !(s < best) {
            break;
        }
        let done = (best - s) <= 1e-30 + 1e-15 * best;
        p = cand;
        best = s;
        if done {
            break;
        }
    }
    p
}

/// Least-squares fit of `m∞ + c r^{-q}` with `q` searched in `[0.05, 12]`
/// starting from `q_init`.
pub fn extrapolate_mass(radii: &[f64], masses: &[f64], q_init: f64) -> Result<Extrapolation> {
    if radii.len() != masses.len() {
        return Err(Error::Extrapolation("radii and masses differ in length".into()));
    }
    if radii.len() < 3 {
        return Err(Error::Extrapolation("at least three radii are required".into()));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) || radii[0] <= 0.0 {
        return Err(Error::Extrapolation("radii must be positive and increasing".into()));
    }
    if masses.iter().chain(radii).any(|v| !v.is_finite()) {
        return Err(Error::Extrapolation("non-finite sample".into()));
    }
    let q0 = if q_init.is_finite() { q_init.clamp(Q_MIN, Q_MAX) } else { 2.0 };
    if masses.iter().all(|&v| v == masses[0]) {
        return Ok(Extrapolation {
            mass_inf: masses[0],
            coefficient: 0.0,
            exponent: q0,
            max_residual: 0.0,
            error: 0.0,
            converged: true,
        });
    }

    let grid = 480;
    let mut best_q = q0;
    let mut best = fit_fixed(q0, radii, masses).2;
    let lq = |i: usize| (Q_MIN.ln() + (Q_MAX.ln() - Q_MIN.ln()) * i as f64 / grid as f64).exp();
    let mut best_i = None;
    for i in 0..=grid {
        let s = fit_fixed(lq(i), radii, masses).2;
        if s < best {
            best = s;
            best_q = lq(i);
            best_i = Some(i);
        }
    }
    if let Some(i) = best_i {
        let lo = lq(i.saturating_sub(1));
        let hi = lq((i + 1).min(grid));
        best_q = golden(lo, hi, |q| fit_fixed(q, radii, masses).2);
    }
    let (minf, c, _) = fit_fixed(best_q, radii, masses);
    let (minf, c, q) = refine(radii, masses, (minf, c, best_q));

    let residuals: Vec<f64> = radii.iter().zip(masses).map(|(ri, mi)| mi - minf - c * ri.powf(-q)).collect();
    let max_residual = residuals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let drop = fit_fixed(q, &radii[1..], &masses[1..]).0;
    let error = max_residual + (minf - drop).abs();

    let scale = masses.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let floor = 10.0 * max_residual + 1e-12 * scale;
    let dist: Vec<f64> = masses.iter().map(|v| (v - minf).abs()).collect();
    let monotone = dist.windows(2).all(|w| w[1] <= w[0] || w[1] <= floor);
    let interior = q > Q_MIN * 1.0001 && q < Q_MAX * 0.9999;
    Ok(Extrapolation {
        mass_inf: minf,
        coefficient: c,
        exponent: q,
        max_residual,
        error,
        converged: monotone && interior,
    })
}
