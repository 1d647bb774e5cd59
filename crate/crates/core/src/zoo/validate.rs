use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::norms::{norm2, norm3, norm4};
use crate::geometry::{
    boundary_geometry, covariant_jet, curvature_from_jet, frame, Chart, ChartPoint, Differentiation, MetricField,
};

/// Sampled `|e|_b + |∇e|_b + |∇²e|_b` along a geometric radius schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayCheck {
    pub radii: Vec<f64>,
    /// Maximum over sample directions at each radius.
    pub norms: Vec<f64>,
    /// Log-log slope between the two outermost radii, negated.
    pub fitted_rate: f64,
    pub claimed_rate: Option<f64>,
    pub passed: bool,
}

/// Unit directions on the closed upper hemisphere, kept `margin` away from the pole.
pub fn sample_hemisphere(n: usize, count: usize, margin: f64) -> Vec<DVector<f64>> {
    // Deterministic low-discrepancy points in the cube mapped to the sphere.
    let mut out = Vec::with_capacity(count);
    let primes = [2.0f64, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0];
    let mut i = 1usize;
    while out.len() < count {
        let mut v: Vec<f64> = (0..n)
            .map(|d| {
                let mut f = 1.0;
                let mut r = 0.0;
                let mut k = i;
                let base = primes[d % primes.len()] as usize;
                while k > 0 {
                    f /= base as f64;
                    r += f * (k % base) as f64;
                    k /= base;
                }
                2.0 * r - 1.0
            })
            .collect();
        i += 1;
        v[n - 1] = v[n - 1].abs();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 0.2 || norm > 1.0 {
            continue;
        }
        let w: Vec<f64> = v.iter().map(|x| x / norm).collect();
        if w[n - 1] > (1.0 - margin * margin / 2.0) {
            continue;
        }
        out.push(DVector::from_vec(w));
    }
    out
}

/// Checks the decay claim of `m` on radii `r0·2^j`, `j < levels`.
pub fn validate_decay<M: MetricField<f64> + ?Sized>(m: &M, levels: usize, directions: usize) -> Result<DecayCheck> {
    if m.chart() != Chart::Polar {
        return Err(Error::ChartMismatch { expected: "POLAR".into(), got: m.chart().to_string() });
    }
    if levels < 2 {
        return Err(Error::Decay("need at least two radii".into()));
    }
    let decay = m.decay();
    let n = m.dim();
    let dirs = sample_hemisphere(n, directions.max(1), 1e-3);
    let radii: Vec<f64> = (0..levels).map(|j| decay.r0 * 2f64.powi(j as i32)).collect();
    let mut norms = Vec::with_capacity(levels);
    for &r in &radii {
        let mut worst = 0.0f64;
        for w in &dirs {
            let y = w * r;
            let jet = covariant_jet(m, &y, true, Differentiation::Auto)?;
            let f = frame(Chart::Polar, &y)?;
            let v = norm2(&f, &jet.e) + norm3(&f, &jet.ne) + norm4(&f, jet.second()?);
            worst = worst.max(v);
        }
        norms.push(worst);
    }
    let k = levels - 1;
    let floor = 1e-12;
    let fitted_rate = if norms[k] <= floor || norms[k - 1] <= floor {
        f64::INFINITY
    } else {
        -(norms[k] / norms[k - 1]).ln() / (radii[k] / radii[k - 1]).ln()
    };
    let passed = match decay.tau {
        None => norms.iter().skip(1).all(|v| *v <= 1e-10),
        Some(t) => fitted_rate >= t - 0.2 && t > n as f64 / 2.0,
    };
    Ok(DecayCheck { radii, norms, fitted_rate, claimed_rate: decay.tau, passed })
}

/// Minimum of `R_g + n(n−1)` over interior samples and of `H_g` over boundary samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyCheck {
    pub min_scalar_excess: f64,
    pub min_mean_curvature: f64,
}

impl EnergyCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.min_scalar_excess >= -tol && self.min_mean_curvature >= -tol
    }
}

pub fn dominant_energy<M: MetricField<f64> + ?Sized>(m: &M, radii: &[f64], directions: usize) -> Result<EnergyCheck> {
    let n = m.dim();
    let dirs = sample_hemisphere(n, directions.max(1), 1e-3);
    let mut min_s = f64::INFINITY;
    let mut min_h = f64::INFINITY;
    for &r in radii {
        for w in &dirs {
            let y = w * r;
            let jet = covariant_jet(m, &y, true, Differentiation::Auto)?;
            min_s = min_s.min(curvature_from_jet(&jet)?.scalar_excess);
            let mut wb = w.clone();
            wb[n - 1] = 0.0;
            let norm = wb.norm();
            if norm > 1e-6 {
                let p = ChartPoint::polar_cartesian(wb * (r / norm))?;
                min_h = min_h.min(boundary_geometry(m, &p)?.mean_curvature);
            }
        }
    }
    Ok(EnergyCheck { min_scalar_excess: min_s, min_mean_curvature: min_h })
}
