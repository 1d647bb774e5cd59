use nalgebra::DMatrix;

use super::chart::ChartPoint;
use super::connection::check_point;
use super::frame::{frame, to_frame};
use super::metric::MetricField;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// The gauge map `𝒢 = (I + ℋ)^{-1/2}` in a b-orthonormal frame, where `ℋ`
/// holds the frame components of `e`.
#[derive(Clone, Debug)]
pub struct GaugeMap<T: Real> {
    /// Frame vectors as columns.
    pub frame_vectors: DMatrix<T>,
    /// `ℋ`.
    pub h: DMatrix<T>,
    /// `𝒢` in the frame.
    pub frame: DMatrix<T>,
    /// `I − 𝒢` in the frame, computed without cancellation.
    pub defect: DMatrix<T>,
    /// `𝒢` acting on coordinate components.
    pub coordinates: DMatrix<T>,
}

pub fn gauge_map<T: Real, M: MetricField<T> + ?Sized>(m: &M, p: &ChartPoint<T>) -> Result<GaugeMap<T>> {
    check_point(m, p)?;
    let f = frame(p.chart, &p.coords)?;
    let e = m.perturbation(&p.coords)?;
    let h = to_frame(&f, &e);
    let h = (&h + h.transpose()) * lit::<T>(0.5);
    let eig = h.clone().symmetric_eigen();
    let n = h.nrows();
    let mut g_diag = DMatrix::zeros(n, n);
    let mut d_diag = DMatrix::zeros(n, n);
    for i in 0..n {
        let mu = eig.eigenvalues[i];
        if !(T::one() + mu > T::zero()) {
            return Err(Error::NotPositiveDefinite(format!("frame eigenvalue {}", T::one() + mu)));
        }
        let s = (T::one() + mu).sqrt();
        g_diag[(i, i)] = T::one() / s;
        d_diag[(i, i)] = mu / (s * (s + T::one()));
    }
    let q = &eig.eigenvectors;
    let gf = q * g_diag * q.transpose();
    let defect = q * d_diag * q.transpose();
    let finv = f.clone().try_inverse().ok_or_else(|| Error::Singular("frame".into()))?;
    let coordinates = &f * &gf * finv;
    Ok(GaugeMap { frame_vectors: f, h, frame: gf, defect, coordinates })
}

impl<T: Real> GaugeMap<T> {
    /// Largest entry of `ℋ − 2(I + ℋ)(I − 𝒢)`, the departure of
    /// `e(X, Y)` from `⟨2(I − 𝒢)X, Y⟩_g` on frame vectors.
    pub fn linearization_residual(&self) -> T {
        let n = self.h.nrows();
        let r = &self.h - (DMatrix::identity(n, n) + &self.h) * &self.defect * lit::<T>(2.0);
        r.amax()
    }
}
