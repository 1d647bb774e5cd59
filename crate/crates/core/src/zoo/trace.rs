use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::radial::{radial_tensor, Jet2};
use crate::error::{Error, Result};
use crate::geometry::chart::polar_metric;
use crate::geometry::{Chart, Decay, Derivs, MetricField};
use crate::scalar::Real;

/// Radial profile `f(r)` of a trace perturbation `g = (1 + f) b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialProfile {
    /// `c r^{−p}`.
    InversePower { c: f64, p: f64 },
    /// `c (1 + r²)^{−p/2}`.
    Smoothed { c: f64, p: f64 },
    /// Smooth bump of height `c` supported in `(inner, outer)`.
    Bump { c: f64, inner: f64, outer: f64 },
}

impl RadialProfile {
    pub fn eval<T: Real>(&self, r: T) -> Jet2<T> {
        let x = Jet2::var(r);
        match *self {
            RadialProfile::InversePower { c, p } => x.powf(T::lit(-p)).scale(T::lit(c)),
            RadialProfile::Smoothed { c, p } => {
                (Jet2::constant(T::one()) + x * x).powf(T::lit(-p / 2.0)).scale(T::lit(c))
            }
            RadialProfile::Bump { c, inner, outer } => {
                let rf = r.to_f64_lossy();
                if rf <= inner || rf >= outer {
                    return Jet2::constant(T::zero());
                }
                let s =
                    (x.scale(T::lit(2.0)) - Jet2::constant(T::lit(inner + outer))).scale(T::lit(1.0 / (outer - inner)));
                let one = Jet2::constant(T::one());
                let q = one / (one - s * s);
                (one - q).exp().scale(T::lit(c))
            }
        }
    }

    /// Decay rate of the profile, `None` for compact support.
    pub fn rate(&self) -> Option<f64> {
        match *self {
            RadialProfile::InversePower { c, p } | RadialProfile::Smoothed { c, p } => (c != 0.0).then_some(p),
            RadialProfile::Bump { .. } => None,
        }
    }
}

/// `g = b + f(r) b`.
#[derive(Clone, Copy, Debug)]
pub struct TracePerturbation {
    dim: usize,
    profile: RadialProfile,
    r0: f64,
}

pub fn trace_perturbation(dim: usize, profile: RadialProfile, r0: f64) -> Result<TracePerturbation> {
    if dim < 3 {
        return Err(Error::UnsupportedDimension(dim));
    }
    if let Some(p) = profile.rate() {
        if !(p > dim as f64 / 2.0) {
            return Err(Error::Decay(format!("profile rate {} does not exceed n/2 = {}", p, dim as f64 / 2.0)));
        }
    }
    if let RadialProfile::Bump { inner, outer, .. } = profile {
        if !(inner > 0.0 && outer > inner) {
            return Err(Error::Invalid(format!("bump support ({}, {}) is empty", inner, outer)));
        }
    }
    if !(r0 > 0.0) {
        return Err(Error::Invalid(format!("r0 must be positive, got {}", r0)));
    }
    Ok(TracePerturbation { dim, profile, r0 })
}

impl TracePerturbation {
    pub fn profile(&self) -> RadialProfile {
        self.profile
    }
}

impl<T: Real> MetricField<T> for TracePerturbation {
    fn dim(&self) -> usize {
        self.dim
    }
    fn chart(&self) -> Chart {
        Chart::Polar
    }
    fn label(&self) -> String {
        format!("trace({:?})", self.profile)
    }
    fn decay(&self) -> Decay<T> {
        match self.profile.rate() {
            Some(p) => Decay::rate(T::lit(p), T::lit(self.r0)),
            None => Decay::exact(T::lit(self.r0)),
        }
    }
    fn perturbation(&self, y: &DVector<T>) -> Result<DMatrix<T>> {
        let r = y.norm();
        if !(r > T::zero()) {
            return Err(Error::OutsideDomain("trace perturbation at r = 0".into()));
        }
        Ok(polar_metric(y) * self.profile.eval(r).v)
    }
    fn analytic_derivatives(&self, y: &DVector<T>, second: bool) -> Option<Result<Derivs<T>>> {
        let r = y.norm();
        if !(r > T::zero()) {
            return Some(Err(Error::OutsideDomain("trace perturbation at r = 0".into())));
        }
        Some(Ok(radial_tensor(self.profile.eval(r), Jet2::constant(T::zero()), y, second).1))
    }
}
