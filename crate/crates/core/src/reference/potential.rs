use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{Chart, ChartPoint};
use crate::scalar::{lit, Real};

/// A static potential `V = Σ_a z_a V_(a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StaticPotential<T: Real> {
    pub coeffs: DVector<T>,
}

/// Value, coordinate gradient and coordinate Hessian of a scalar function.
#[derive(Clone, Debug)]
pub struct ScalarJet<T: Real> {
    pub value: T,
    pub gradient: DVector<T>,
    pub hessian: DMatrix<T>,
}

impl<T: Real> ScalarJet<T> {
    fn zero(n: usize) -> Self {
        Self { value: T::zero(), gradient: DVector::zeros(n), hessian: DMatrix::zeros(n, n) }
    }

    fn add_scaled(&mut self, c: T, other: &Self) {
        self.value += c * other.value;
        self.gradient += &other.gradient * c;
        self.hessian += &other.hessian * c;
    }
}

/// Jet of the basis potential `V_(a)` at raw coordinates.
pub fn basis_jet<T: Real>(a: usize, chart: Chart, x: &DVector<T>) -> Result<ScalarJet<T>> {
    let n = x.len();
    if a >= n {
        return Err(Error::IndexOutOfRange { index: a, dim: n });
    }
    match chart {
        Chart::Polar => {
            if a == 0 {
                let v = (T::one() + x.norm_squared()).sqrt();
                let v3 = v * v * v;
                Ok(ScalarJet {
                    value: v,
                    gradient: x / v,
                    hessian: DMatrix::identity(n, n) / v - x * x.transpose() / v3,
                })
            } else {
                let mut g = DVector::zeros(n);
                g[a - 1] = T::one();
                Ok(ScalarJet { value: x[a - 1], gradient: g, hessian: DMatrix::zeros(n, n) })
            }
        }
        Chart::Ball => {
            let s = x.norm_squared();
            if s >= T::one() {
                return Err(Error::OutsideDomain(format!("|x'|² = {}", s)));
            }
            let d = T::one() - s;
            let d2 = d * d;
            let d3 = d2 * d;
            let (two, four, sixteen) = (lit::<T>(2.0), lit::<T>(4.0), lit::<T>(16.0));
            if a == 0 {
                Ok(ScalarJet {
                    value: (T::one() + s) / d,
                    gradient: x * (four / d2),
                    hessian: DMatrix::identity(n, n) * (four / d2) + x * x.transpose() * (sixteen / d3),
                })
            } else {
                let i = a - 1;
                let mut g = x * (four * x[i] / d2);
                g[i] += two / d;
                let delta = |p: usize, q: usize| if p == q { T::one() } else { T::zero() };
                let h = DMatrix::from_fn(n, n, |k, l| {
                    four * (delta(i, k) * x[l] + delta(i, l) * x[k] + x[i] * delta(k, l)) / d2
                        + sixteen * x[i] * x[k] * x[l] / d3
                });
                Ok(ScalarJet { value: two * x[i] / d, gradient: g, hessian: h })
            }
        }
        Chart::Euclidean => Err(Error::Invalid("static potentials need a hyperbolic chart".into())),
    }
}

/// `V_(a)(p)`.
pub fn static_basis_eval<T: Real>(a: usize, p: &ChartPoint<T>) -> Result<T> {
    basis_jet(a, p.chart, &p.coords).map(|j| j.value)
}

impl<T: Real> StaticPotential<T> {
    pub fn new(coeffs: DVector<T>) -> Self {
        Self { coeffs }
    }

    pub fn basis(n: usize, a: usize) -> Result<Self> {
        if a >= n {
            return Err(Error::IndexOutOfRange { index: a, dim: n });
        }
        let mut c = DVector::zeros(n);
        c[a] = T::one();
        Ok(Self { coeffs: c })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn jet(&self, chart: Chart, x: &DVector<T>) -> Result<ScalarJet<T>> {
        let n = x.len();
        if n != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: n });
        }
        let mut acc = ScalarJet::zero(n);
        for a in 0..n {
            let c = self.coeffs[a];
            if c != T::zero() {
                acc.add_scaled(c, &basis_jet(a, chart, x)?);
            }
        }
        Ok(acc)
    }

    pub fn value(&self, p: &ChartPoint<T>) -> Result<T> {
        self.jet(p.chart, &p.coords).map(|j| j.value)
    }

    /// `∇²_b V` in coordinates, `∂_k∂_l V − Γ^m_kl ∂_m V`.
    pub fn covariant_hessian(&self, p: &ChartPoint<T>) -> Result<DMatrix<T>> {
        let j = self.jet(p.chart, &p.coords)?;
        let bg = p.chart.background(&p.coords)?;
        Ok(covariant_hessian(&j, &bg.gamma))
    }

    /// `∂V/∂η` with `η` the outward unit b-normal of the face.
    pub fn normal_derivative(&self, p: &ChartPoint<T>) -> Result<T> {
        let j = self.jet(p.chart, &p.coords)?;
        let eta = crate::geometry::outward_normal(p.chart, &p.coords)?;
        Ok(j.gradient.dot(&eta))
    }

    /// `∇_b V` in coordinate components.
    pub fn gradient_field(&self, chart: Chart, x: &DVector<T>) -> Result<DVector<T>> {
        let j = self.jet(chart, x)?;
        let bg = chart.background(x)?;
        Ok(bg.inverse * j.gradient)
    }
}

pub(crate) fn covariant_hessian<T: Real>(j: &ScalarJet<T>, gamma: &[DMatrix<T>]) -> DMatrix<T> {
    let mut h = j.hessian.clone();
    for (m, g) in gamma.iter().enumerate() {
        h -= g * j.gradient[m];
    }
    h
}
