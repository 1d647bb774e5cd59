use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::chart::{Chart, ChartPoint};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Decay claim of a metric: `|e|_b + |∇e|_b + |∇²e|_b ≤ C r^{-τ}` for `r ≥ r0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decay<T: Real> {
    /// `None` means the perturbation vanishes identically.
    pub tau: Option<T>,
    pub r0: T,
}

impl<T: Real> Decay<T> {
    pub fn exact(r0: T) -> Self {
        Self { tau: None, r0 }
    }

    pub fn rate(tau: T, r0: T) -> Self {
        Self { tau: Some(tau), r0 }
    }
}

/// Partial derivatives of the perturbation in chart coordinates.
///
/// `d1[k] = ∂_k e`, `d2[l][k] = ∂_l ∂_k e`.
#[derive(Clone, Debug)]
pub struct Derivs<T: Real> {
    pub d1: Vec<DMatrix<T>>,
    pub d2: Option<Vec<Vec<DMatrix<T>>>>,
}

/// A Riemannian metric `g = b + e` on the half-space, described by its
/// perturbation `e` from the background of its chart.
///
/// Working with `e` directly keeps the decaying part free of cancellation
/// against the background. Evaluators take raw coordinates and must accept
/// points slightly across the boundary face so that difference stencils can
/// straddle it.
pub trait MetricField<T: Real>: Send + Sync {
    fn dim(&self) -> usize;
    fn chart(&self) -> Chart;
    fn label(&self) -> String;
    fn decay(&self) -> Decay<T>;

    /// `e = g − b` at raw chart coordinates.
    fn perturbation(&self, x: &DVector<T>) -> Result<DMatrix<T>>;

    /// Analytic derivatives of `e`, when available.
    fn analytic_derivatives(&self, _x: &DVector<T>, _second: bool) -> Option<Result<Derivs<T>>> {
        None
    }

    /// Full metric components `b + e` at a chart point.
    fn components(&self, p: &ChartPoint<T>) -> Result<DMatrix<T>> {
        p.require_chart(self.chart())?;
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: p.dim() });
        }
        let bg = self.chart().background(&p.coords)?;
        Ok(bg.metric + self.perturbation(&p.coords)?)
    }
}

impl<T: Real, M: MetricField<T> + ?Sized> MetricField<T> for Arc<M> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn chart(&self) -> Chart {
        (**self).chart()
    }
    fn label(&self) -> String {
        (**self).label()
    }
    fn decay(&self) -> Decay<T> {
        (**self).decay()
    }
    fn perturbation(&self, x: &DVector<T>) -> Result<DMatrix<T>> {
        (**self).perturbation(x)
    }
    fn analytic_derivatives(&self, x: &DVector<T>, second: bool) -> Option<Result<Derivs<T>>> {
        (**self).analytic_derivatives(x, second)
    }
}

impl<T: Real, M: MetricField<T> + ?Sized> MetricField<T> for &M {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn chart(&self) -> Chart {
        (**self).chart()
    }
    fn label(&self) -> String {
        (**self).label()
    }
    fn decay(&self) -> Decay<T> {
        (**self).decay()
    }
    fn perturbation(&self, x: &DVector<T>) -> Result<DMatrix<T>> {
        (**self).perturbation(x)
    }
    fn analytic_derivatives(&self, x: &DVector<T>, second: bool) -> Option<Result<Derivs<T>>> {
        (**self).analytic_derivatives(x, second)
    }
}

type PerturbationFn<T> = dyn Fn(&DVector<T>) -> DMatrix<T> + Send + Sync;

/// Metric given by a closure for the perturbation.
pub struct FnMetric<T: Real> {
    dim: usize,
    chart: Chart,
    label: String,
    decay: Decay<T>,
    f: Box<PerturbationFn<T>>,
}

impl<T: Real> FnMetric<T> {
    pub fn perturbation_fn(
        dim: usize,
        chart: Chart,
        label: impl Into<String>,
        decay: Decay<T>,
        f: impl Fn(&DVector<T>) -> DMatrix<T> + Send + Sync + 'static,
    ) -> Self {
        Self { dim, chart, label: label.into(), decay, f: Box::new(f) }
    }

    /// Metric given by its full components; the background is subtracted.
    pub fn components_fn(
        dim: usize,
        chart: Chart,
        label: impl Into<String>,
        decay: Decay<T>,
        g: impl Fn(&DVector<T>) -> DMatrix<T> + Send + Sync + 'static,
    ) -> Self {
        let f = move |x: &DVector<T>| {
            let b = chart.background(x).map(|bg| bg.metric).unwrap_or_else(|_| DMatrix::zeros(dim, dim));
            g(x) - b
        };
        Self::perturbation_fn(dim, chart, label, decay, f)
    }
}

impl<T: Real> MetricField<T> for FnMetric<T> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn chart(&self) -> Chart {
        self.chart
    }
    fn label(&self) -> String {
        self.label.clone()
    }
    fn decay(&self) -> Decay<T> {
        self.decay
    }
    fn perturbation(&self, x: &DVector<T>) -> Result<DMatrix<T>> {
        if !self.chart.contains(x) {
            return Err(Error::OutsideDomain(format!("{:?}", x.as_slice())));
        }
        Ok((self.f)(x))
    }
}

/// The perturbation scaled by a constant, `b + ε e`.
pub struct Scaled<M> {
    pub inner: M,
    pub eps: f64,
}

impl<T: Real, M: MetricField<T>> MetricField<T> for Scaled<M> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn chart(&self) -> Chart {
        self.inner.chart()
    }
    fn label(&self) -> String {
        format!("{}*{}", self.eps, self.inner.label())
    }
    fn decay(&self) -> Decay<T> {
        self.inner.decay()
    }
    fn perturbation(&self, x: &DVector<T>) -> Result<DMatrix<T>> {
        Ok(self.inner.perturbation(x)? * T::lit(self.eps))
    }
    fn analytic_derivatives(&self, x: &DVector<T>, second: bool) -> Option<Result<Derivs<T>>> {
        let s = T::lit(self.eps);
        self.inner.analytic_derivatives(x, second).map(|r| {
            r.map(|d| Derivs {
                d1: d.d1.into_iter().map(|m| m * s).collect(),
                d2: d.d2.map(|v| v.into_iter().map(|row| row.into_iter().map(|m| m * s).collect()).collect()),
            })
        })
    }
}
