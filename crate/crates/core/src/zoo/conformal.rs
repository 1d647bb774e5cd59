use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{Chart, Decay, MetricField};
use crate::scalar::Real;

/// A symmetric 2-tensor on the unit hemisphere, given by ambient `n × n`
/// components at a unit direction. Only the part tangent to the sphere is used.
pub trait SphereTensor<T: Real>: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, omega: &DVector<T>) -> Result<DMatrix<T>>;
}

/// `c · h_0`.
#[derive(Clone, Copy, Debug)]
pub struct RoundMultiple {
    pub dim: usize,
    pub c: f64,
}

impl<T: Real> SphereTensor<T> for RoundMultiple {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, _omega: &DVector<T>) -> Result<DMatrix<T>> {
        Ok(DMatrix::identity(self.dim, self.dim) * T::lit(self.c))
    }
}

/// Constant ambient matrix, projected onto each tangent space.
#[derive(Clone, Debug)]
pub struct ConstantTensor<T: Real>(pub DMatrix<T>);

impl<T: Real> SphereTensor<T> for ConstantTensor<T> {
    fn dim(&self) -> usize {
        self.0.nrows()
    }
    fn value(&self, _omega: &DVector<T>) -> Result<DMatrix<T>> {
        Ok(self.0.clone())
    }
}

pub struct FnSphereTensor<T: Real> {
    dim: usize,
    f: Box<dyn Fn(&DVector<T>) -> DMatrix<T> + Send + Sync>,
}

impl<T: Real> FnSphereTensor<T> {
    pub fn new(dim: usize, f: impl Fn(&DVector<T>) -> DMatrix<T> + Send + Sync + 'static) -> Self {
        Self { dim, f: Box::new(f) }
    }
}

impl<T: Real> SphereTensor<T> for FnSphereTensor<T> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, omega: &DVector<T>) -> Result<DMatrix<T>> {
        Ok((self.f)(omega))
    }
}

/// Remainder `k = t^p K(ω)` with the claim `|K|_{h_0} ≤ bound`.
#[derive(Clone)]
pub struct Remainder<T: Real> {
    pub power: f64,
    pub tensor: Arc<dyn SphereTensor<T>>,
    pub bound: f64,
}

/// Data of `g = sinh^{−2}t (dt² + h_0 + (tⁿ/n!) h + k)` on a collar `0 < t < t_max`.
#[derive(Clone)]
pub struct ConformallyCompactData<T: Real> {
    pub dim: usize,
    pub t_max: f64,
    pub h: Option<Arc<dyn SphereTensor<T>>>,
    pub remainder: Option<Remainder<T>>,
}

impl<T: Real> ConformallyCompactData<T> {
    pub fn zero(dim: usize, t_max: f64) -> Self {
        Self { dim, t_max, h: None, remainder: None }
    }
}

/// Collar coordinate of the polar radius: `sinh t = 1/r`.
pub fn collar_coordinate<T: Real>(r: T) -> T {
    (T::one() / r).asinh()
}

/// Inverse of [`collar_coordinate`].
pub fn collar_radius<T: Real>(t: T) -> T {
    T::one() / t.sinh()
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

fn projector<T: Real>(omega: &DVector<T>) -> DMatrix<T> {
    let n = omega.len();
    DMatrix::identity(n, n) - omega * omega.transpose()
}

fn sample_directions<T: Real>(n: usize) -> Vec<DVector<T>> {
    // Deterministic spread over the closed hemisphere.
    let mut out = Vec::new();
    let k = 7;
    for i in 0..=k {
        for j in 0..2 * k {
            let psi = std::f64::consts::FRAC_PI_2 * i as f64 / k as f64;
            let phi = std::f64::consts::PI * j as f64 / k as f64;
            let mut w = vec![0.0; n];
            w[n - 1] = psi.cos();
            let s = psi.sin();
            w[0] = s * phi.cos();
            w[1] = s * phi.sin();
            if n > 3 {
                // tilt into the remaining axes so every component is exercised
                let a = (phi * 0.5).sin() * 0.5;
                for (m, wm) in w.iter_mut().enumerate().take(n - 1).skip(2) {
                    *wm = a / (m as f64);
                }
            }
            let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            out.push(DVector::from_iterator(n, w.iter().map(|v| T::lit(v / norm))));
        }
    }
    out
}

/// The conformally compact metric re-charted to the polar chart.
#[derive(Clone)]
pub struct ConformallyCompact<T: Real> {
    data: ConformallyCompactData<T>,
    r0: f64,
    label: String,
}

pub fn conformally_compact<T: Real>(data: ConformallyCompactData<T>) -> Result<ConformallyCompact<T>> {
    let n = data.dim;
    if n < 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    if !(data.t_max > 0.0) {
        return Err(Error::ConformalData(format!("collar extent must be positive, got {}", data.t_max)));
    }
    let dirs = sample_directions::<T>(n);
    let symmetric = |t: &dyn SphereTensor<T>, name: &str| -> Result<()> {
        if t.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: t.dim() });
        }
        for w in &dirs {
            let m = t.value(w)?;
            let asym = (&m - m.transpose()).amax().to_f64_lossy();
            if !(asym <= 1e-12 * (1.0 + m.amax().to_f64_lossy())) {
                return Err(Error::ConformalData(format!("{} is not symmetric (defect {:e})", name, asym)));
            }
        }
        Ok(())
    };
    if let Some(h) = &data.h {
        symmetric(h.as_ref(), "h")?;
    }
    if let Some(k) = &data.remainder {
        symmetric(k.tensor.as_ref(), "k")?;
        if !(k.power > n as f64 + 1.0) {
            return Err(Error::ConformalData(format!("remainder power {} does not exceed n + 1 = {}", k.power, n + 1)));
        }
        for w in &dirs {
            let p = projector(w);
            let size = (&p * k.tensor.value(w)? * &p).norm().to_f64_lossy();
            if !(size <= k.bound) {
                return Err(Error::ConformalData(format!("remainder exceeds its bound: {} > {}", size, k.bound)));
            }
        }
    }
    let r0 = collar_radius(data.t_max);
    let label = format!(
        "conformally_compact(n={}, h={}, k={})",
        n,
        if data.h.is_some() { "set" } else { "0" },
        data.remainder.as_ref().map(|k| format!("t^{}", k.power)).unwrap_or_else(|| "0".into())
    );
    Ok(ConformallyCompact { data, r0, label })
}

impl<T: Real> ConformallyCompact<T> {
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

impl<T: Real> MetricField<T> for ConformallyCompact<T> {
    fn dim(&self) -> usize {
        self.data.dim
    }
    fn chart(&self) -> Chart {
        Chart::Polar
    }
    fn label(&self) -> String {
        self.label.clone()
    }
    fn decay(&self) -> Decay<T> {
        if self.data.h.is_none() && self.data.remainder.is_none() {
            Decay::exact(T::lit(self.r0))
        } else {
            Decay::rate(T::from_usize_lossy(self.data.dim), T::lit(self.r0))
        }
    }
    /// With `sinh t = 1/r` the model part is exactly `b`, and a sphere tensor
    /// `H` contributes `r² H(dω, dω) = P H P` in Cartesian components.
    fn perturbation(&self, y: &DVector<T>) -> Result<DMatrix<T>> {
        let n = self.data.dim;
        let r = y.norm();
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::OutsideDomain(format!("{:?}", y.as_slice())));
        }
        let omega = y / r;
        let p = projector(&omega);
        let t = collar_coordinate(r);
        let mut e = DMatrix::zeros(n, n);
        if let Some(h) = &self.data.h {
            let c = t.powi(n as i32) / T::lit(factorial(n));
            e += &p * h.value(&omega)? * &p * c;
        }
        if let Some(k) = &self.data.remainder {
            e += &p * k.tensor.value(&omega)? * &p * t.powf(T::lit(k.power));
        }
        Ok((&e + e.transpose()) * T::lit(0.5))
    }
}
