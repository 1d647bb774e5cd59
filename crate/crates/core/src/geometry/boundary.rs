use nalgebra::{DMatrix, DVector};

use super::chart::ChartPoint;
use super::connection::{check_point, christoffel_from_jet, spd_inverse};
use super::jet::{covariant_jet, CovariantJet, Differentiation};
use super::metric::MetricField;
use crate::error::Result;
use crate::scalar::Real;

/// Extrinsic geometry of the boundary face `{x_n = 0}` for the metric `g`.
///
/// `Π(X, Y) = g(∇_X η, Y)` with `η` the outward unit normal, so `H > 0`
/// means the area of the face grows when it is pushed outward.
#[derive(Clone, Debug)]
pub struct BoundaryGeometry<T: Real> {
    pub normal: DVector<T>,
    pub second_fundamental: DMatrix<T>,
    pub mean_curvature: T,
    /// Induced metric on the face in the first `n − 1` coordinates.
    pub induced: DMatrix<T>,
}

pub fn boundary_geometry<T: Real, M: MetricField<T> + ?Sized>(m: &M, p: &ChartPoint<T>) -> Result<BoundaryGeometry<T>> {
    check_point(m, p)?;
    p.require_boundary()?;
    let jet = covariant_jet(m, &p.coords, false, Differentiation::Auto)?;
    boundary_geometry_from_jet(&jet)
}

pub fn boundary_geometry_from_jet<T: Real>(jet: &CovariantJet<T>) -> Result<BoundaryGeometry<T>> {
    let n = jet.dim();
    let g = jet.metric();
    let gi = spd_inverse(&g)?;
    let gamma = christoffel_from_jet(jet)?;
    let s = gi[(n - 1, n - 1)].sqrt();
    let normal = -gi.column(n - 1).into_owned() / s;
    let second_fundamental = DMatrix::from_fn(n - 1, n - 1, |a, b| gamma[n - 1][(a, b)] / s);
    let induced = g.view((0, 0), (n - 1, n - 1)).into_owned();
    let ii = spd_inverse(&induced)?;
    let mean_curvature = (&ii * &second_fundamental).trace();
    Ok(BoundaryGeometry { normal, second_fundamental, mean_curvature, induced })
}
