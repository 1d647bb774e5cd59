use nalgebra::{DMatrix, DVector};

use super::chart::{Chart, ChartPoint};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// b-orthonormal frame at raw coordinates, one vector per column.
///
/// The first `n − 1` vectors come from Gram–Schmidt on the coordinate
/// vectors tangent to the face; the last is the unit b-gradient of the
/// normal coordinate, so on the boundary it equals `−η`.
pub fn frame<T: Real>(chart: Chart, x: &DVector<T>) -> Result<DMatrix<T>> {
    let n = x.len();
    let bg = chart.background(x)?;
    let b = &bg.metric;
    let mut f = DMatrix::zeros(n, n);
    for i in 0..n - 1 {
        let mut v = DVector::zeros(n);
        v[i] = T::one();
        for j in 0..i {
            let fj = f.column(j).into_owned();
            let c = (v.transpose() * b * &fj)[(0, 0)];
            v -= fj * c;
        }
        let norm = (v.transpose() * b * &v)[(0, 0)].sqrt();
        if !(norm > T::zero()) {
            return Err(Error::Singular("degenerate frame".into()));
        }
        f.set_column(i, &(v / norm));
    }
    let grad = bg.inverse.column(n - 1).into_owned();
    let norm = bg.inverse[(n - 1, n - 1)].sqrt();
    f.set_column(n - 1, &(grad / norm));
    Ok(f)
}

pub fn frame_at<T: Real>(p: &ChartPoint<T>) -> Result<DMatrix<T>> {
    frame(p.chart, &p.coords)
}

/// Outward unit b-normal of the boundary face at raw coordinates.
pub fn outward_normal<T: Real>(chart: Chart, x: &DVector<T>) -> Result<DVector<T>> {
    let n = x.len();
    let bg = chart.background(x)?;
    let norm = bg.inverse[(n - 1, n - 1)].sqrt();
    Ok(-bg.inverse.column(n - 1).into_owned() / norm)
}

/// Frame components `F^T A F` of a covariant 2-tensor.
pub fn to_frame<T: Real>(f: &DMatrix<T>, a: &DMatrix<T>) -> DMatrix<T> {
    f.transpose() * a * f
}
