use nalgebra::{DMatrix, DVector};

use super::potential::StaticPotential;
use crate::error::{Error, Result};
use crate::geometry::{Chart, ChartPoint, VectorField};
use crate::scalar::{lit, Real};

/// Ball coordinates of a polar point: `x' = y / (1 + √(1 + |y|²))`.
pub fn polar_to_ball<T: Real>(y: &DVector<T>) -> DVector<T> {
    y / (T::one() + (T::one() + y.norm_squared()).sqrt())
}

/// Polar coordinates of a ball point: `y = 2x' / (1 − |x'|²)`.
pub fn ball_to_polar<T: Real>(x: &DVector<T>) -> Result<DVector<T>> {
    let d = T::one() - x.norm_squared();
    if !(d > T::zero()) {
        return Err(Error::OutsideDomain(format!("|x'| = {} is not below 1", x.norm())));
    }
    Ok(x * (lit::<T>(2.0) / d))
}

/// `∂y/∂x'` of the ball-to-polar map.
pub fn ball_to_polar_jacobian<T: Real>(x: &DVector<T>) -> Result<DMatrix<T>> {
    let n = x.len();
    let d = T::one() - x.norm_squared();
    if !(d > T::zero()) {
        return Err(Error::OutsideDomain(format!("|x'| = {} is not below 1", x.norm())));
    }
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    Ok(DMatrix::identity(n, n) * (two / d) + x * x.transpose() * (four / (d * d)))
}

/// Stereographic identification between the two models, in either direction.
pub fn model_transform<T: Real>(p: &ChartPoint<T>) -> Result<ChartPoint<T>> {
    match p.chart {
        Chart::Polar => {
            let mut x = polar_to_ball(&p.coords);
            let n = x.len();
            if p.coords[n - 1] == T::zero() {
                x[n - 1] = T::zero();
            }
            ChartPoint::ball(x)
        }
        Chart::Ball => {
            let y = ball_to_polar(&p.coords)?;
            ChartPoint::polar_cartesian(y)
        }
        Chart::Euclidean => Err(Error::Invalid("no model transform for the Euclidean chart".into())),
    }
}

/// Pulls covariant components at the polar image of `x'` back to the ball chart.
pub fn pullback_to_ball<T: Real>(x: &DVector<T>, polar_components: &DMatrix<T>) -> Result<DMatrix<T>> {
    let j = ball_to_polar_jacobian(x)?;
    Ok(j.transpose() * polar_components * j)
}

/// `X_a = ∇_b V_(a)`, a conformal field tangent to the boundary face.
pub fn conformal_field<T: Real>(a: usize, p: &ChartPoint<T>) -> Result<DVector<T>> {
    let v = StaticPotential::basis(p.dim(), a)?;
    v.gradient_field(p.chart, &p.coords)
}

/// The gradient of a static potential as a vector field.
#[derive(Clone, Debug)]
pub struct GradientField<T: Real> {
    pub potential: StaticPotential<T>,
    pub chart: Chart,
}

impl<T: Real> VectorField<T> for GradientField<T> {
    fn dim(&self) -> usize {
        self.potential.dim()
    }
    fn value(&self, x: &DVector<T>) -> Result<DVector<T>> {
        self.potential.gradient_field(self.chart, x)
    }
}
