use nalgebra::{DMatrix, DVector};

use super::radial::{radial_tensor, Jet2};
use crate::error::{Error, Result};
use crate::geometry::{Chart, Decay, Derivs, MetricField};
use crate::scalar::Real;

pub const HORIZON_MARGIN: f64 = 0.1;
pub const DEFAULT_R0: f64 = 10.0;

/// `g = dr²/(1 + r² − 2m r^{2−n}) + r² h_0` restricted to the half-space.
#[derive(Clone, Copy, Debug)]
pub struct AdsSchwarzschild {
    dim: usize,
    mass: f64,
    horizon: f64,
    r0: f64,
}

/// Largest root of `1 + r² − 2m r^{2−n}`, or 0 when `m = 0`.
pub fn horizon_radius(dim: usize, mass: f64) -> f64 {
    if mass <= 0.0 {
        return 0.0;
    }
    let f = |r: f64| 1.0 + r * r - 2.0 * mass * r.powi(2 - dim as i32);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while f(hi) <= 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= 0.0 || f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

pub fn ads_schwarzschild_half(dim: usize, mass: f64) -> Result<AdsSchwarzschild> {
    if dim < 3 {
        return Err(Error::UnsupportedDimension(dim));
    }
    if !(mass >= 0.0) || !mass.is_finite() {
        return Err(Error::Invalid(format!("mass parameter must be a finite non-negative number, got {}", mass)));
    }
    Ok(AdsSchwarzschild { dim, mass, horizon: horizon_radius(dim, mass), r0: DEFAULT_R0 })
}

impl AdsSchwarzschild {
    pub fn with_r0(mut self, r0: f64) -> Self {
        self.r0 = r0;
        self
    }

    pub fn mass_parameter(&self) -> f64 {
        self.mass
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `ψ(r)` in `e = ψ y yᵀ`.
    fn psi<T: Real>(&self, r: T) -> Result<Jet2<T>> {
        if self.mass > 0.0 && r.to_f64_lossy() < self.horizon + HORIZON_MARGIN {
            return Err(Error::InsideHorizon { r: r.to_f64_lossy(), limit: self.horizon + HORIZON_MARGIN });
        }
        let n = self.dim as i32;
        let x = Jet2::var(r);
        let one = Jet2::constant(T::one());
        let m2 = T::lit(2.0 * self.mass);
        let a = one + x * x;
        let f = a - x.powi(2 - n).scale(m2);
        Ok(x.powi(-n).scale(m2) / (f * a))
    }
}

impl<T: Real> MetricField<T> for AdsSchwarzschild {
    fn dim(&self) -> usize {
        self.dim
    }
    fn chart(&self) -> Chart {
        Chart::Polar
    }
    fn label(&self) -> String {
        format!("ads_schwarzschild(m={})", self.mass)
    }
    fn decay(&self) -> Decay<T> {
        if self.mass == 0.0 {
            Decay::exact(T::lit(self.r0))
        } else {
            Decay::rate(T::from_usize_lossy(self.dim), T::lit(self.r0))
        }
    }
    fn perturbation(&self, y: &DVector<T>) -> Result<DMatrix<T>> {
        if self.mass == 0.0 {
            return Ok(DMatrix::zeros(self.dim, self.dim));
        }
        let psi = self.psi(y.norm())?;
        Ok(y * y.transpose() * psi.v)
    }
    fn analytic_derivatives(&self, y: &DVector<T>, second: bool) -> Option<Result<Derivs<T>>> {
        let n = self.dim;
        if self.mass == 0.0 {
            let z = DMatrix::zeros(n, n);
            return Some(Ok(Derivs { d1: vec![z.clone(); n], d2: second.then(|| vec![vec![z; n]; n]) }));
        }
        Some(self.psi(y.norm()).map(|psi| radial_tensor(Jet2::constant(T::zero()), psi, y, second).1))
    }
}
