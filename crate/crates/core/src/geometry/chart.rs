use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Coordinate model in which a point or a metric is expressed.
///
/// `Polar` points are stored in the Cartesian form `y = r·ω` of the polar
/// coordinates, which is smooth across the pole and the axis. `Euclidean`
/// carries the flat background and exists for test metrics written in
/// arbitrary coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Chart {
    Polar,
    Ball,
    Euclidean,
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Chart::Polar => "POLAR",
            Chart::Ball => "BALL",
            Chart::Euclidean => "EUCLIDEAN",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint<T: Real> {
    pub chart: Chart,
    pub coords: DVector<T>,
}

fn boundary_tol<T: Real>(scale: T) -> T {
    lit::<T>(1e-12) * (T::one() + scale)
}

impl<T: Real> ChartPoint<T> {
    /// Polar point from radius and unit direction.
    pub fn polar(r: T, omega: &[T]) -> Result<Self> {
        if !(r > T::zero()) {
            return Err(Error::OutsideDomain(format!("polar radius {} must be positive", r)));
        }
        let w = DVector::from_column_slice(omega);
        let norm = w.norm();
        if (norm - T::one()).abs() > lit(1e-12) {
            return Err(Error::OutsideDomain(format!("|omega| = {} is not 1", norm)));
        }
        if omega.len() < 2 || omega[omega.len() - 1] < T::zero() {
            return Err(Error::OutsideDomain("omega_n must be non-negative".into()));
        }
        Ok(Self { chart: Chart::Polar, coords: w * r })
    }

    /// Polar point from its Cartesian form `y = r·ω`; `y = 0` is the basepoint.
    pub fn polar_cartesian(y: DVector<T>) -> Result<Self> {
        let n = y.len();
        if n < 2 || y[n - 1] < T::zero() {
            return Err(Error::OutsideDomain("y_n must be non-negative".into()));
        }
        Ok(Self { chart: Chart::Polar, coords: y })
    }

    pub fn basepoint(n: usize) -> Self {
        Self { chart: Chart::Polar, coords: DVector::zeros(n) }
    }

    pub fn ball(x: DVector<T>) -> Result<Self> {
        let n = x.len();
        if n < 2 || x[n - 1] < T::zero() {
            return Err(Error::OutsideDomain("x'_n must be non-negative".into()));
        }
        if x.norm() >= T::one() {
            return Err(Error::OutsideDomain(format!("|x'| = {} is not below 1", x.norm())));
        }
        Ok(Self { chart: Chart::Ball, coords: x })
    }

    pub fn euclidean(x: DVector<T>) -> Self {
        Self { chart: Chart::Euclidean, coords: x }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Polar radius; Euclidean norm of the stored coordinates for the other charts.
    pub fn r(&self) -> T {
        self.coords.norm()
    }

    /// Unit direction `ω`; `None` at the basepoint.
    pub fn omega(&self) -> Option<DVector<T>> {
        let r = self.r();
        if r > T::zero() {
            Some(&self.coords / r)
        } else {
            None
        }
    }

    pub fn is_boundary(&self) -> bool {
        let n = self.dim();
        self.coords[n - 1].abs() <= boundary_tol(self.r())
    }

    pub fn require_boundary(&self) -> Result<()> {
        if self.is_boundary() {
            Ok(())
        } else {
            Err(Error::NotOnBoundary(self.coords[self.dim() - 1].to_f64_lossy()))
        }
    }

    pub fn require_chart(&self, chart: Chart) -> Result<()> {
        if self.chart == chart {
            Ok(())
        } else {
            Err(Error::ChartMismatch { expected: chart.to_string(), got: self.chart.to_string() })
        }
    }
}

/// Analytic data of the background metric at a point.
///
/// `gamma[k][(i, j)] = Γ^k_ij`, `dgamma[m][k][(i, j)] = ∂_m Γ^k_ij`.
#[derive(Clone, Debug)]
pub struct Background<T: Real> {
    pub metric: DMatrix<T>,
    pub inverse: DMatrix<T>,
    pub gamma: Vec<DMatrix<T>>,
    pub dgamma: Vec<Vec<DMatrix<T>>>,
    /// Constant sectional curvature of the background.
    pub sectional: T,
}

impl<T: Real> Background<T> {
    pub fn dim(&self) -> usize {
        self.metric.nrows()
    }

    /// `Ric_b` from the constant sectional curvature.
    pub fn ricci(&self) -> DMatrix<T> {
        let n = self.dim();
        &self.metric * (self.sectional * T::from_usize_lossy(n - 1))
    }

    pub fn scalar(&self) -> T {
        let n = T::from_usize_lossy(self.dim());
        self.sectional * n * (n - T::one())
    }

    /// `R^l_kij` of the background, stored as `[l][k][(i, j)]`.
    pub fn riemann(&self) -> Vec<Vec<DMatrix<T>>> {
        let n = self.dim();
        let s = self.sectional;
        (0..n)
            .map(|l| {
                (0..n)
                    .map(|k| {
                        DMatrix::from_fn(n, n, |i, j| {
                            let mut v = T::zero();
                            if l == i {
                                v += self.metric[(j, k)];
                            }
                            if l == j {
                                v -= self.metric[(i, k)];
                            }
                            s * v
                        })
                    })
                    .collect()
            })
            .collect()
    }
}

/// `b_ij = δ_ij − y_i y_j / (1 + |y|²)`.
pub fn polar_metric<T: Real>(y: &DVector<T>) -> DMatrix<T> {
    let n = y.len();
    let a = T::one() + y.norm_squared();
    DMatrix::from_fn(n, n, |i, j| {
        let d = if i == j { T::one() } else { T::zero() };
        d - y[i] * y[j] / a
    })
}

/// `∂_k b_ij` for the polar chart, indexed `[k][(i, j)]`.
pub fn polar_metric_d1<T: Real>(y: &DVector<T>) -> Vec<DMatrix<T>> {
    let n = y.len();
    let a = T::one() + y.norm_squared();
    let two = lit::<T>(2.0);
    (0..n)
        .map(|k| {
            DMatrix::from_fn(n, n, |i, j| {
                let mut v = T::zero();
                if k == i {
                    v -= y[j] / a;
                }
                if k == j {
                    v -= y[i] / a;
                }
                v + two * y[k] * y[i] * y[j] / (a * a)
            })
        })
        .collect()
}

/// `∂_l ∂_k b_ij` for the polar chart, indexed `[l][k][(i, j)]`.
pub fn polar_metric_d2<T: Real>(y: &DVector<T>) -> Vec<Vec<DMatrix<T>>> {
    let n = y.len();
    let a = T::one() + y.norm_squared();
    let a2 = a * a;
    let a3 = a2 * a;
    let two = lit::<T>(2.0);
    let eight = lit::<T>(8.0);
    let d = |p: usize, q: usize| if p == q { T::one() } else { T::zero() };
    (0..n)
        .map(|l| {
            (0..n)
                .map(|k| {
                    DMatrix::from_fn(n, n, |i, j| {
                        -(d(k, i) * d(l, j) + d(l, i) * d(k, j)) / a
                            + two * y[l] * (d(k, i) * y[j] + y[i] * d(k, j)) / a2
                            + two * (d(k, l) * y[i] * y[j] + y[k] * d(l, i) * y[j] + y[k] * y[i] * d(l, j)) / a2
                            - eight * y[k] * y[l] * y[i] * y[j] / a3
                    })
                })
                .collect()
        })
        .collect()
}

impl Chart {
    /// Background metric, Christoffel symbols and their derivatives at raw coordinates.
    pub fn background<T: Real>(self, x: &DVector<T>) -> Result<Background<T>> {
        let n = x.len();
        match self {
            Chart::Polar => {
                let b = polar_metric(x);
                let inverse = DMatrix::identity(n, n) + x * x.transpose();
                let gamma: Vec<DMatrix<T>> = (0..n).map(|k| &b * (-x[k])).collect();
                let db = polar_metric_d1(x);
                let dgamma = (0..n)
                    .map(|m| {
                        (0..n)
                            .map(|k| {
                                let mut g = &db[m] * (-x[k]);
                                if k == m {
                                    g -= &b;
                                }
                                g
                            })
                            .collect()
                    })
                    .collect();
                Ok(Background { metric: b, inverse, gamma, dgamma, sectional: -T::one() })
            }
            Chart::Ball => {
                let s = x.norm_squared();
                if s >= T::one() {
                    return Err(Error::OutsideDomain(format!("|x'|² = {} in ball chart", s)));
                }
                let two = lit::<T>(2.0);
                let w = (T::one() - s) / two;
                let metric = DMatrix::identity(n, n) / (w * w);
                let inverse = DMatrix::identity(n, n) * (w * w);
                // φ = −ln w, φ_i = x_i / w, φ_ij = δ_ij / w + x_i x_j / w²
                let phi: Vec<T> = (0..n).map(|i| x[i] / w).collect();
                let phi2 = DMatrix::from_fn(n, n, |i, j| {
                    let d = if i == j { T::one() / w } else { T::zero() };
                    d + x[i] * x[j] / (w * w)
                });
                let conf = |k: usize, i: usize, j: usize, f: &dyn Fn(usize) -> T| {
                    let mut v = T::zero();
                    if k == i {
                        v += f(j);
                    }
                    if k == j {
                        v += f(i);
                    }
                    if i == j {
                        v -= f(k);
                    }
                    v
                };
                let gamma = (0..n).map(|k| DMatrix::from_fn(n, n, |i, j| conf(k, i, j, &|p| phi[p]))).collect();
                let dgamma = (0..n)
                    .map(|m| (0..n).map(|k| DMatrix::from_fn(n, n, |i, j| conf(k, i, j, &|p| phi2[(m, p)]))).collect())
                    .collect();
                Ok(Background { metric, inverse, gamma, dgamma, sectional: -T::one() })
            }
            Chart::Euclidean => Ok(Background {
                metric: DMatrix::identity(n, n),
                inverse: DMatrix::identity(n, n),
                gamma: vec![DMatrix::zeros(n, n); n],
                dgamma: vec![vec![DMatrix::zeros(n, n); n]; n],
                sectional: T::zero(),
            }),
        }
    }

    /// Whether raw coordinates lie in the open chart domain (ignoring the half-space sign).
    pub fn contains<T: Real>(self, x: &DVector<T>) -> bool {
        match self {
            Chart::Ball => x.norm_squared() < T::one(),
            _ => x.iter().all(|v| v.is_finite()),
        }
    }
}
