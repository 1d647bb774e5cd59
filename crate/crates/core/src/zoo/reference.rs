use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{Chart, Decay, Derivs, MetricField};
use crate::scalar::Real;

/// The model metric itself, `e ≡ 0`.
#[derive(Clone, Copy, Debug)]
pub struct ReferenceMetric {
    dim: usize,
    chart: Chart,
}

pub fn reference(dim: usize, chart: Chart) -> Result<ReferenceMetric> {
    if dim < 3 {
        return Err(Error::UnsupportedDimension(dim));
    }
    if chart == Chart::Euclidean {
        return Err(Error::ChartMismatch { expected: "POLAR or BALL".into(), got: chart.to_string() });
    }
    Ok(ReferenceMetric { dim, chart })
}

impl<T: Real> MetricField<T> for ReferenceMetric {
    fn dim(&self) -> usize {
        self.dim
    }
    fn chart(&self) -> Chart {
        self.chart
    }
    fn label(&self) -> String {
        "reference".into()
    }
    fn decay(&self) -> Decay<T> {
        Decay::exact(T::one())
    }
    fn perturbation(&self, x: &DVector<T>) -> Result<DMatrix<T>> {
        if !self.chart.contains(x) {
            return Err(Error::OutsideDomain(format!("{:?}", x.as_slice())));
        }
        Ok(DMatrix::zeros(self.dim, self.dim))
    }
    fn analytic_derivatives(&self, _x: &DVector<T>, second: bool) -> Option<Result<Derivs<T>>> {
        let n = self.dim;
        let z = DMatrix::zeros(n, n);
        Some(Ok(Derivs { d1: vec![z.clone(); n], d2: second.then(|| vec![vec![z; n]; n]) }))
    }
}
