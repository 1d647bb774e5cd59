use nalgebra::{DMatrix, DVector};

use super::chart::Background;
use super::metric::{Derivs, MetricField};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// How derivatives of a metric perturbation are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Differentiation {
    /// Analytic derivatives when the metric supplies them, differences otherwise.
    #[default]
    Auto,
    FiniteDifference,
}

pub(crate) fn step<T: Real>(x: &DVector<T>, k: usize, base: f64) -> Result<T> {
    let h = lit::<T>(base) * (T::one() + x[k].abs());
    if !(h > T::zero()) || x[k] + h == x[k] {
        return Err(Error::StepUnderflow(k));
    }
    Ok(h)
}

fn shifted<T: Real>(x: &DVector<T>, moves: &[(usize, T)]) -> DVector<T> {
    let mut y = x.clone();
    for &(k, d) in moves {
        y[k] += d;
    }
    y
}

const FIRST_STEP: f64 = 1e-5;
const SECOND_STEP: f64 = 1e-4;
const C4: [(f64, f64); 4] = [(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)];

/// Central differences of a matrix-valued function of the coordinates.
pub fn fd_derivatives<T: Real>(
    f: &dyn Fn(&DVector<T>) -> Result<DMatrix<T>>,
    x: &DVector<T>,
    second: bool,
) -> Result<Derivs<T>> {
    let n = x.len();
    let two = lit::<T>(2.0);
    let mut d1 = Vec::with_capacity(n);
    for k in 0..n {
        let h = step(x, k, FIRST_STEP)?;
        let p = f(&shifted(x, &[(k, h)]))?;
        let m = f(&shifted(x, &[(k, -h)]))?;
        d1.push((p - m) / (two * h));
    }
    if !second {
        return Ok(Derivs { d1, d2: None });
    }
    let f0 = f(x)?;
    let mut d2 = vec![vec![DMatrix::zeros(f0.nrows(), f0.ncols()); n]; n];
    for k in 0..n {
        let h = step(x, k, SECOND_STEP)?;
        let fp1 = f(&shifted(x, &[(k, h)]))?;
        let fm1 = f(&shifted(x, &[(k, -h)]))?;
        let fp2 = f(&shifted(x, &[(k, two * h)]))?;
        let fm2 = f(&shifted(x, &[(k, -two * h)]))?;
        let num = (fp1 + &fm1) * lit::<T>(16.0) - (fp2 + fm2) - &f0 * lit::<T>(30.0);
        d2[k][k] = num / (lit::<T>(12.0) * h * h);
    }
    for k in 0..n {
        for l in (k + 1)..n {
            let hk = step(x, k, SECOND_STEP)?;
            let hl = step(x, l, SECOND_STEP)?;
            let mut acc = DMatrix::zeros(f0.nrows(), f0.ncols());
            for &(a, ca) in &C4 {
                for &(b, cb) in &C4 {
                    let v = f(&shifted(x, &[(k, lit::<T>(a) * hk), (l, lit::<T>(b) * hl)]))?;
                    acc += v * lit::<T>(ca * cb);
                }
            }
            let d = acc / (hk * hl);
            d2[k][l] = d.clone();
            d2[l][k] = d;
        }
    }
    Ok(Derivs { d1, d2: Some(d2) })
}

/// Partial derivatives of the perturbation of `m` at raw coordinates `x`.
pub fn perturbation_derivatives<T: Real, M: MetricField<T> + ?Sized>(
    m: &M,
    x: &DVector<T>,
    second: bool,
    mode: Differentiation,
) -> Result<Derivs<T>> {
    if mode == Differentiation::Auto {
        if let Some(d) = m.analytic_derivatives(x, second) {
            let d = d?;
            if !second || d.d2.is_some() {
                return Ok(d);
            }
        }
    }
    fd_derivatives(&|y: &DVector<T>| m.perturbation(y), x, second)
}

/// The perturbation with its background covariant derivatives at a point.
///
/// `ne[k][(i, j)] = ∇_k e_ij` and `nne[m][k][(i, j)] = ∇_m ∇_k e_ij`, all with
/// respect to the background connection.
#[derive(Clone, Debug)]
pub struct CovariantJet<T: Real> {
    pub x: DVector<T>,
    pub bg: Background<T>,
    pub e: DMatrix<T>,
    pub ne: Vec<DMatrix<T>>,
    pub nne: Option<Vec<Vec<DMatrix<T>>>>,
}

impl<T: Real> CovariantJet<T> {
    pub fn from_partials(x: DVector<T>, bg: Background<T>, e: DMatrix<T>, d: Derivs<T>) -> Self {
        let n = e.nrows();
        let g = &bg.gamma;
        // ∇_k e_ij = ∂_k e_ij − Γ^p_ki e_pj − Γ^p_kj e_ip
        let ne: Vec<DMatrix<T>> = (0..n)
            .map(|k| {
                DMatrix::from_fn(n, n, |i, j| {
                    let mut v = d.d1[k][(i, j)];
                    for p in 0..n {
                        v -= g[p][(k, i)] * e[(p, j)] + g[p][(k, j)] * e[(i, p)];
                    }
                    v
                })
            })
            .collect();
        let nne = d.d2.as_ref().map(|d2| {
            let dg = &bg.dgamma;
            (0..n)
                .map(|m| {
                    (0..n)
                        .map(|k| {
                            DMatrix::from_fn(n, n, |i, j| {
                                // ∂_m (∇_k e_ij)
                                let mut v = d2[m][k][(i, j)];
                                for p in 0..n {
                                    v -= dg[m][p][(k, i)] * e[(p, j)]
                                        + g[p][(k, i)] * d.d1[m][(p, j)]
                                        + dg[m][p][(k, j)] * e[(i, p)]
                                        + g[p][(k, j)] * d.d1[m][(i, p)];
                                }
                                for p in 0..n {
                                    v -= g[p][(m, k)] * ne[p][(i, j)]
                                        + g[p][(m, i)] * ne[k][(p, j)]
                                        + g[p][(m, j)] * ne[k][(i, p)];
                                }
                                v
                            })
                        })
                        .collect()
                })
                .collect()
        });
        Self { x, bg, e, ne, nne }
    }

    pub fn dim(&self) -> usize {
        self.e.nrows()
    }

    pub fn metric(&self) -> DMatrix<T> {
        &self.bg.metric + &self.e
    }

    pub fn second(&self) -> Result<&Vec<Vec<DMatrix<T>>>> {
        self.nne.as_ref().ok_or_else(|| Error::Invalid("second derivatives were not computed".into()))
    }
}

pub fn covariant_jet<T: Real, M: MetricField<T> + ?Sized>(
    m: &M,
    x: &DVector<T>,
    second: bool,
    mode: Differentiation,
) -> Result<CovariantJet<T>> {
    if x.len() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), got: x.len() });
    }
    let bg = m.chart().background(x)?;
    let e = m.perturbation(x)?;
    let d = perturbation_derivatives(m, x, second, mode)?;
    Ok(CovariantJet::from_partials(x.clone(), bg, e, d))
}
