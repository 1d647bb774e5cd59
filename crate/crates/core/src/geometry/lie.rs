use nalgebra::{DMatrix, DVector};

use super::chart::{Background, Chart, ChartPoint};
use super::jet::{fd_derivatives, step};
use super::metric::{Decay, Derivs, MetricField};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// A vector field in chart coordinates.
///
/// `jacobian(x)[(i, k)] = ∂_k X^i`, `hessian(x)[i][(k, l)] = ∂_k ∂_l X^i`.
/// The defaults difference the values directly.
pub trait VectorField<T: Real>: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &DVector<T>) -> Result<DVector<T>>;

    fn jacobian(&self, x: &DVector<T>) -> Result<DMatrix<T>> {
        let n = x.len();
        let two = lit::<T>(2.0);
        let mut j = DMatrix::zeros(n, n);
        for k in 0..n {
            let h = step(x, k, 1e-5)?;
            let mut p = x.clone();
            p[k] += h;
            let mut m = x.clone();
            m[k] -= h;
            j.set_column(k, &((self.value(&p)? - self.value(&m)?) / (two * h)));
        }
        Ok(j)
    }

    fn hessian(&self, x: &DVector<T>) -> Result<Vec<DMatrix<T>>> {
        let n = x.len();
        let d = fd_derivatives(
            &|y: &DVector<T>| self.value(y).map(|v| DMatrix::from_column_slice(n, 1, v.as_slice())),
            x,
            true,
        )?;
        let d2 = d.d2.expect("second derivatives requested");
        Ok((0..n).map(|i| DMatrix::from_fn(n, n, |k, l| d2[k][l][(i, 0)])).collect())
    }
}

/// `X^i = a_i + B_ij y_j + C_ijk y_j y_k`, with `C` symmetric in its last pair.
#[derive(Clone, Debug)]
pub struct PolynomialField<T: Real> {
    pub constant: DVector<T>,
    pub linear: DMatrix<T>,
    pub quadratic: Vec<DMatrix<T>>,
}

impl<T: Real> PolynomialField<T> {
    pub fn new(constant: DVector<T>, linear: DMatrix<T>, quadratic: Vec<DMatrix<T>>) -> Self {
        let half = lit::<T>(0.5);
        let quadratic = quadratic.into_iter().map(|c| (&c + c.transpose()) * half).collect();
        Self { constant, linear, quadratic }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(DVector::zeros(n), DMatrix::zeros(n, n), vec![DMatrix::zeros(n, n); n])
    }

    /// Infinitesimal rotation in the `(i, j)` plane of the coordinates.
    pub fn rotation(n: usize, i: usize, j: usize) -> Self {
        let mut l = DMatrix::zeros(n, n);
        l[(i, j)] = -T::one();
        l[(j, i)] = T::one();
        Self::new(DVector::zeros(n), l, vec![DMatrix::zeros(n, n); n])
    }
}

impl<T: Real> VectorField<T> for PolynomialField<T> {
    fn dim(&self) -> usize {
        self.constant.len()
    }

    fn value(&self, x: &DVector<T>) -> Result<DVector<T>> {
        let lin = &self.linear * x;
        Ok(DVector::from_fn(x.len(), |i, _| {
            self.constant[i] + lin[i] + (x.transpose() * &self.quadratic[i] * x)[(0, 0)]
        }))
    }

    fn jacobian(&self, x: &DVector<T>) -> Result<DMatrix<T>> {
        let two = lit::<T>(2.0);
        let mut j = self.linear.clone();
        for i in 0..x.len() {
            let row = (&self.quadratic[i] * x) * two;
            for k in 0..x.len() {
                j[(i, k)] += row[k];
            }
        }
        Ok(j)
    }

    fn hessian(&self, _x: &DVector<T>) -> Result<Vec<DMatrix<T>>> {
        Ok(self.quadratic.iter().map(|c| c * lit::<T>(2.0)).collect())
    }
}

/// Covariant derivatives of a vector field with respect to the background.
///
/// `first[(k, j)] = ∇_j X^k`, `second[m][(k, j)] = ∇_m ∇_j X^k`, and the
/// lowered forms `X_{i;j}`, `∇_m X_{i;j}`.
#[derive(Clone, Debug)]
pub struct VectorJet<T: Real> {
    pub value: DVector<T>,
    pub lowered: DVector<T>,
    pub first: DMatrix<T>,
    pub second: Option<Vec<DMatrix<T>>>,
    pub first_lowered: DMatrix<T>,
    pub second_lowered: Option<Vec<DMatrix<T>>>,
}

pub fn vector_jet<T: Real, X: VectorField<T> + ?Sized>(
    field: &X,
    bg: &Background<T>,
    x: &DVector<T>,
    second: bool,
) -> Result<VectorJet<T>> {
    let n = x.len();
    if field.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: field.dim() });
    }
    let v = field.value(x)?;
    let jac = field.jacobian(x)?;
    let g = &bg.gamma;
    let first = DMatrix::from_fn(n, n, |k, j| {
        let mut s = jac[(k, j)];
        for l in 0..n {
            s += g[k][(j, l)] * v[l];
        }
        s
    });
    let second_up = if second {
        let hess = field.hessian(x)?;
        let dg = &bg.dgamma;
        Some(
            (0..n)
                .map(|m| {
                    DMatrix::from_fn(n, n, |k, j| {
                        let mut s = hess[k][(m, j)];
                        for l in 0..n {
                            s += dg[m][k][(j, l)] * v[l] + g[k][(j, l)] * jac[(l, m)];
                        }
                        for p in 0..n {
                            s += -g[p][(m, j)] * first[(k, p)] + g[k][(m, p)] * first[(p, j)];
                        }
                        s
                    })
                })
                .collect::<Vec<_>>(),
        )
    } else {
        None
    };
    let b = &bg.metric;
    Ok(VectorJet {
        lowered: b * &v,
        first_lowered: b * &first,
        second_lowered: second_up.as_ref().map(|s| s.iter().map(|m| b * m).collect()),
        value: v,
        first,
        second: second_up,
    })
}

/// `(ℒ_X b)_ij = X_{i;j} + X_{j;i}` at raw coordinates.
pub fn lie_derivative_raw<T: Real, X: VectorField<T> + ?Sized>(
    field: &X,
    chart: Chart,
    x: &DVector<T>,
) -> Result<DMatrix<T>> {
    let bg = chart.background(x)?;
    let j = vector_jet(field, &bg, x, false)?;
    Ok(&j.first_lowered + j.first_lowered.transpose())
}

pub fn lie_derivative_b<T: Real, X: VectorField<T> + ?Sized>(field: &X, p: &ChartPoint<T>) -> Result<DMatrix<T>> {
    lie_derivative_raw(field, p.chart, &p.coords)
}

/// The perturbation `e = s·ℒ_X b`, with analytic first derivatives.
pub struct LieDerivativeField<X> {
    pub field: X,
    pub chart: Chart,
    pub scale: f64,
}

impl<T: Real, X: VectorField<T>> MetricField<T> for LieDerivativeField<X> {
    fn dim(&self) -> usize {
        self.field.dim()
    }
    fn chart(&self) -> Chart {
        self.chart
    }
    fn label(&self) -> String {
        "lie-derivative".into()
    }
    fn decay(&self) -> Decay<T> {
        Decay::rate(T::zero(), T::zero())
    }
    fn perturbation(&self, x: &DVector<T>) -> Result<DMatrix<T>> {
        Ok(lie_derivative_raw(&self.field, self.chart, x)? * T::lit(self.scale))
    }
    fn analytic_derivatives(&self, x: &DVector<T>, second: bool) -> Option<Result<Derivs<T>>> {
        if second {
            return None;
        }
        Some((|| {
            let n = x.len();
            let bg = self.chart.background(x)?;
            let j = vector_jet(&self.field, &bg, x, true)?;
            let nl = j.second_lowered.as_ref().expect("requested");
            // ∂_m e_ij = ∇_m e_ij + Γ^p_mi e_pj + Γ^p_mj e_ip
            let e = &j.first_lowered + j.first_lowered.transpose();
            let s = T::lit(self.scale);
            let d1 = (0..n)
                .map(|m| {
                    let ne = &nl[m] + nl[m].transpose();
                    DMatrix::from_fn(n, n, |i, jj| {
                        let mut v = ne[(i, jj)];
                        for p in 0..n {
                            v += bg.gamma[p][(m, i)] * e[(p, jj)] + bg.gamma[p][(m, jj)] * e[(i, p)];
                        }
                        v * s
                    })
                })
                .collect();
            Ok(Derivs { d1, d2: None })
        })())
    }
}
