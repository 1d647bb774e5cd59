use nalgebra::{DMatrix, DVector};

use super::potential::StaticPotential;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Element of the Lorentz group acting on hyperboloid coordinates
/// `(x_0, …, x_n)` and fixing `x_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsometryElement<T: Real> {
    pub matrix: DMatrix<T>,
}

impl<T: Real> IsometryElement<T> {
    pub fn identity(n: usize) -> Self {
        Self { matrix: DMatrix::identity(n + 1, n + 1) }
    }

    /// Dimension `n` of the hyperbolic space acted on.
    pub fn dim(&self) -> usize {
        self.matrix.nrows() - 1
    }

    /// Boost with rapidity `s` in the `(x_0, x_i)` plane, `1 ≤ i ≤ n − 1`.
    pub fn boost(n: usize, i: usize, s: T) -> Result<Self> {
        if i == 0 || i >= n {
            return Err(Error::IndexOutOfRange { index: i, dim: n });
        }
        let mut m = DMatrix::identity(n + 1, n + 1);
        m[(0, 0)] = s.cosh();
        m[(i, i)] = s.cosh();
        m[(0, i)] = s.sinh();
        m[(i, 0)] = s.sinh();
        Ok(Self { matrix: m })
    }

    /// Rotation by `θ` in the `(x_i, x_j)` plane, `1 ≤ i, j ≤ n − 1`.
    pub fn rotation(n: usize, i: usize, j: usize, theta: T) -> Result<Self> {
        if i == 0 || j == 0 || i >= n || j >= n || i == j {
            return Err(Error::IndexOutOfRange { index: i.max(j), dim: n });
        }
        let mut m = DMatrix::identity(n + 1, n + 1);
        let (c, s) = (theta.cos(), theta.sin());
        m[(i, i)] = c;
        m[(j, j)] = c;
        m[(i, j)] = -s;
        m[(j, i)] = s;
        Ok(Self { matrix: m })
    }

    pub fn from_matrix(matrix: DMatrix<T>) -> Result<Self> {
        let iso = Self { matrix };
        iso.validate()?;
        Ok(iso)
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { matrix: &self.matrix * &other.matrix }
    }

    pub fn inverse(&self) -> Self {
        let eta = minkowski::<T>(self.dim());
        Self { matrix: &eta * self.matrix.transpose() * &eta }
    }

    pub fn validate(&self) -> Result<()> {
        let n1 = self.matrix.nrows();
        if n1 != self.matrix.ncols() || n1 < 3 {
            return Err(Error::InvalidIsometry("matrix must be square of size n + 1 ≥ 3".into()));
        }
        let eta = minkowski::<T>(n1 - 1);
        let defect = self.matrix.transpose() * &eta * &self.matrix - &eta;
        let scale = T::one().max(self.matrix.amax() * self.matrix.amax());
        if defect.amax() > lit::<T>(1e-12) * scale {
            return Err(Error::InvalidIsometry(format!("Minkowski defect {}", defect.amax())));
        }
        for k in 0..n1 {
            let expect = if k == n1 - 1 { T::one() } else { T::zero() };
            if (self.matrix[(n1 - 1, k)] - expect).abs() > lit(1e-12)
                || (self.matrix[(k, n1 - 1)] - expect).abs() > lit(1e-12)
            {
                return Err(Error::InvalidIsometry("x_n is not fixed".into()));
            }
        }
        if self.matrix[(0, 0)] < T::one() - lit(1e-12) {
            return Err(Error::InvalidIsometry("time orientation reversed".into()));
        }
        Ok(())
    }

    /// Image of a polar-chart point `y`.
    pub fn apply_polar(&self, y: &DVector<T>) -> DVector<T> {
        let n = y.len();
        let mut x = DVector::zeros(n + 1);
        x[0] = (T::one() + y.norm_squared()).sqrt();
        x.rows_mut(1, n).copy_from(y);
        let xp = &self.matrix * x;
        xp.rows(1, n).into_owned()
    }

    /// Jacobian `∂y'/∂y` of the point map in the polar chart.
    pub fn jacobian_polar(&self, y: &DVector<T>) -> DMatrix<T> {
        let n = y.len();
        let x0 = (T::one() + y.norm_squared()).sqrt();
        DMatrix::from_fn(n, n, |i, k| self.matrix[(i + 1, 0)] * y[k] / x0 + self.matrix[(i + 1, k + 1)])
    }

    /// Top-left `n × n` block acting on the potential coefficients.
    pub fn potential_block(&self) -> DMatrix<T> {
        let n = self.dim();
        self.matrix.view((0, 0), (n, n)).into_owned()
    }
}

pub fn minkowski<T: Real>(n: usize) -> DMatrix<T> {
    let mut eta = -DMatrix::identity(n + 1, n + 1);
    eta[(0, 0)] = T::one();
    eta
}

/// Coefficients of `V ∘ ℐ`. This is a right action:
/// `(ℐ₁ℐ₂)·V = ℐ₂·(ℐ₁·V)`.
pub fn isometry_action<T: Real>(iso: &IsometryElement<T>, v: &StaticPotential<T>) -> Result<StaticPotential<T>> {
    iso.validate()?;
    if iso.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: iso.dim(), got: v.dim() });
    }
    Ok(StaticPotential::new(iso.potential_block().transpose() * &v.coeffs))
}
