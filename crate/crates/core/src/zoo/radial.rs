use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::geometry::chart::{polar_metric, polar_metric_d1, polar_metric_d2};
use crate::geometry::Derivs;
use crate::scalar::Real;

/// Value with first and second derivative in one variable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2<T> {
    pub v: T,
    pub d: T,
    pub dd: T,
}

impl<T: Real> Jet2<T> {
    pub fn var(x: T) -> Self {
        Self { v: x, d: T::one(), dd: T::zero() }
    }

    pub fn constant(c: T) -> Self {
        Self { v: c, d: T::zero(), dd: T::zero() }
    }

    /// `g ∘ self` from the value and two derivatives of `g` at `self.v`.
    fn chain(self, g: T, g1: T, g2: T) -> Self {
        Self { v: g, d: g1 * self.d, dd: g2 * self.d * self.d + g1 * self.dd }
    }

    pub fn powf(self, p: T) -> Self {
        let x = self.v;
        self.chain(x.powf(p), p * x.powf(p - T::one()), p * (p - T::one()) * x.powf(p - T::lit(2.0)))
    }

    pub fn powi(self, k: i32) -> Self {
        self.powf(T::from_i32(k).expect("small integer"))
    }

    pub fn sqrt(self) -> Self {
        self.powf(T::lit(0.5))
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn asinh(self) -> Self {
        let x = self.v;
        let s = (T::one() + x * x).sqrt();
        self.chain(x.asinh(), T::one() / s, -x / (s * s * s))
    }

    pub fn scale(self, c: T) -> Self {
        Self { v: self.v * c, d: self.d * c, dd: self.dd * c }
    }
}

impl<T: Real> Add for Jet2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { v: self.v + o.v, d: self.d + o.d, dd: self.dd + o.dd }
    }
}

impl<T: Real> Sub for Jet2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { v: self.v - o.v, d: self.d - o.d, dd: self.dd - o.dd }
    }
}

impl<T: Real> Neg for Jet2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { v: -self.v, d: -self.d, dd: -self.dd }
    }
}

impl<T: Real> Mul for Jet2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let two = T::lit(2.0);
        Self { v: self.v * o.v, d: self.d * o.v + self.v * o.d, dd: self.dd * o.v + two * self.d * o.d + self.v * o.dd }
    }
}

impl<T: Real> Div for Jet2<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = o.chain(T::one() / o.v, -T::one() / (o.v * o.v), T::lit(2.0) / (o.v * o.v * o.v));
        self * inv
    }
}

/// Second derivatives of a radial function: `∂_l ∂_k F(|y|)`.
fn radial_hessian<T: Real>(f: Jet2<T>, y: &DVector<T>) -> DMatrix<T> {
    let n = y.len();
    let r = y.norm();
    DMatrix::from_fn(n, n, |l, k| {
        let (pl, pk) = (y[l] / r, y[k] / r);
        let d = if l == k { T::one() } else { T::zero() };
        f.dd * pl * pk + f.d * (d - pl * pk) / r
    })
}

/// `e = α(r) b + ψ(r) y yᵀ` in the polar chart with its partial derivatives.
pub fn radial_tensor<T: Real>(alpha: Jet2<T>, psi: Jet2<T>, y: &DVector<T>, second: bool) -> (DMatrix<T>, Derivs<T>) {
    let n = y.len();
    let r = y.norm();
    let b = polar_metric(y);
    let db = polar_metric_d1(y);
    let yy = y * y.transpose();
    let e = &b * alpha.v + &yy * psi.v;
    // ∂_k (y yᵀ)
    let dyy = |k: usize| {
        DMatrix::from_fn(n, n, |i, j| {
            let mut v = T::zero();
            if i == k {
                v += y[j];
            }
            if j == k {
                v += y[i];
            }
            v
        })
    };
    let d1: Vec<DMatrix<T>> = (0..n)
        .map(|k| {
            let rho = y[k] / r;
            &b * (alpha.d * rho) + &db[k] * alpha.v + &yy * (psi.d * rho) + dyy(k) * psi.v
        })
        .collect();
    let d2 = second.then(|| {
        let db2 = polar_metric_d2(y);
        let ha = radial_hessian(alpha, y);
        let hp = radial_hessian(psi, y);
        (0..n)
            .map(|l| {
                (0..n)
                    .map(|k| {
                        let (rl, rk) = (y[l] / r, y[k] / r);
                        let mut m = &b * ha[(l, k)]
                            + &db[l] * (alpha.d * rk)
                            + &db[k] * (alpha.d * rl)
                            + &db2[l][k] * alpha.v
                            + &yy * hp[(l, k)]
                            + dyy(l) * (psi.d * rk)
                            + dyy(k) * (psi.d * rl);
                        // ∂_l ∂_k (y_i y_j) = δ_ki δ_lj + δ_li δ_kj
                        m[(k, l)] += psi.v;
                        m[(l, k)] += psi.v;
                        m
                    })
                    .collect()
            })
            .collect()
    });
    (e, Derivs { d1, d2 })
}
