use crate::error::{Error, Result};

/// Cubic spline through uniformly spaced samples.
#[derive(Clone, Debug)]
pub struct CubicSpline {
    start: f64,
    step: f64,
    values: Vec<f64>,
    /// Second derivatives at the knots.
    moments: Vec<f64>,
    periodic: bool,
}

fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup.first().copied().unwrap_or(0.0) / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i - 1] * c[i - 1];
        if i < n - 1 {
            c[i] = sup[i] / m;
        }
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

impl CubicSpline {
    /// Spline with vanishing second derivative at both ends; `values[i]` sits at `start + i·step`.
    pub fn natural(start: f64, step: f64, values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 2 || !(step > 0.0) {
            return Err(Error::ConformalData("natural spline needs at least two knots and a positive step".into()));
        }
        let mut moments = vec![0.0; n];
        if n > 2 {
            let k = n - 2;
            let rhs: Vec<f64> =
                (1..n - 1).map(|i| 6.0 * (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (step * step)).collect();
            let inner = solve_tridiagonal(&vec![1.0; k - 1], &vec![4.0; k], &vec![1.0; k - 1], &rhs);
            moments[1..n - 1].copy_from_slice(&inner);
        }
        Ok(Self { start, step, values, moments, periodic: false })
    }

    /// Periodic spline; `values` cover one period without repeating the first knot.
    pub fn periodic(start: f64, period: f64, values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 3 || !(period > 0.0) {
            return Err(Error::ConformalData("periodic spline needs at least three knots".into()));
        }
        let h = period / n as f64;
        let rhs: Vec<f64> =
            (0..n).map(|i| 6.0 * (values[(i + 1) % n] - 2.0 * values[i] + values[(i + n - 1) % n]) / (h * h)).collect();
        // Cyclic system 4M_i + M_{i−1} + M_{i+1} = rhs_i via Sherman–Morrison.
        let gamma = -4.0;
        let mut diag = vec![4.0; n];
        diag[0] -= gamma;
        diag[n - 1] -= 1.0 / gamma;
        let off = vec![1.0; n - 1];
        let x = solve_tridiagonal(&off, &diag, &off, &rhs);
        let mut u = vec![0.0; n];
        u[0] = gamma;
        u[n - 1] = 1.0;
        let z = solve_tridiagonal(&off, &diag, &off, &u);
        let fact = (x[0] + x[n - 1] / gamma) / (1.0 + z[0] + z[n - 1] / gamma);
        let moments: Vec<f64> = x.iter().zip(&z).map(|(a, b)| a - fact * b).collect();
        Ok(Self { start, step: h, values, moments, periodic: true })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.values.len();
        let h = self.step;
        let mut s = (t - self.start) / h;
        let (i, j) = if self.periodic {
            s = s.rem_euclid(n as f64);
            let i = (s.floor() as usize).min(n - 1);
            (i, (i + 1) % n)
        } else {
            let i = (s.floor().max(0.0) as usize).min(n - 2);
            (i, i + 1)
        };
        let a = (i as f64 + 1.0) - s;
        let b = s - i as f64;
        let (yi, yj, mi, mj) = (self.values[i], self.values[j], self.moments[i], self.moments[j]);
        a * yi + b * yj + ((a * a * a - a) * mi + (b * b * b - b) * mj) * h * h / 6.0
    }
}
