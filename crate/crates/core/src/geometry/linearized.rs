use nalgebra::DVector;

use super::chart::ChartPoint;
use super::connection::check_point;
use super::jet::{covariant_jet, step, CovariantJet, Differentiation};
use super::metric::MetricField;
use crate::error::Result;
use crate::scalar::{lit, Real};

/// `Ṙ_b e = div_b div_b e − Δ_b tr_b e − ⟨Ric_b, e⟩_b`.
pub fn linearized_scalar<T: Real, M: MetricField<T> + ?Sized>(e: &M, p: &ChartPoint<T>) -> Result<T> {
    check_point(e, p)?;
    let jet = covariant_jet(e, &p.coords, true, Differentiation::Auto)?;
    linearized_scalar_from_jet(&jet)
}

pub fn linearized_scalar_from_jet<T: Real>(jet: &CovariantJet<T>) -> Result<T> {
    let n = jet.dim();
    let nne = jet.second()?;
    let bi = &jet.bg.inverse;
    let mut divdiv = T::zero();
    let mut lap_tr = T::zero();
    for a in 0..n {
        for c in 0..n {
            let m = &nne[a][c];
            let mut s1 = T::zero();
            for i in 0..n {
                for j in 0..n {
                    s1 += bi[(i, a)] * bi[(j, c)] * m[(i, j)];
                }
            }
            divdiv += s1;
            lap_tr += bi[(a, c)] * (bi * m).trace();
        }
    }
    let nn = T::from_usize_lossy(n);
    let ric_term = (nn - T::one()) * jet.bg.sectional * (bi * &jet.e).trace();
    Ok(divdiv - lap_tr - ric_term)
}

/// `2Ḣ_b e = [d tr_b e − div_b e](η) − div_β X_e` at a boundary point, where
/// `X_e` is the tangential vector β-dual to `e(η, ·)` on the face. The
/// `⟨Π_b, e⟩` term is absent because the face is totally geodesic for every
/// supported background. Returns `Ḣ_b e`.
pub fn linearized_mean_curvature<T: Real, M: MetricField<T> + ?Sized>(e: &M, p: &ChartPoint<T>) -> Result<T> {
    check_point(e, p)?;
    p.require_boundary()?;
    let n = p.dim();
    let chart = e.chart();
    let jet = covariant_jet(e, &p.coords, false, Differentiation::Auto)?;
    let bi = &jet.bg.inverse;
    let eta = -bi.column(n - 1).into_owned() / bi[(n - 1, n - 1)].sqrt();

    let mut dtr = T::zero();
    let mut div = T::zero();
    for k in 0..n {
        dtr += eta[k] * (bi * &jet.ne[k]).trace();
        for i in 0..n {
            for j in 0..n {
                div += bi[(i, j)] * jet.ne[i][(j, k)] * eta[k];
            }
        }
    }

    let tangential = |y: &DVector<T>| -> Result<DVector<T>> {
        let bg = chart.background(y)?;
        let ev = e.perturbation(y)?;
        let bi = &bg.inverse;
        let eta = -bi.column(n - 1).into_owned() / bi[(n - 1, n - 1)].sqrt();
        let beta = bg.metric.view((0, 0), (n - 1, n - 1)).into_owned();
        let beta_inv = super::connection::spd_inverse(&beta)?;
        let w = DVector::from_fn(n - 1, |b, _| (0..n).fold(T::zero(), |acc, k| acc + eta[k] * ev[(k, b)]));
        Ok(beta_inv * w)
    };
    let x0 = &p.coords;
    let xe = tangential(x0)?;
    let two = lit::<T>(2.0);
    let mut div_x = T::zero();
    for a in 0..n - 1 {
        let h = step(x0, a, 1e-5)?;
        let mut xp = x0.clone();
        xp[a] += h;
        let mut xm = x0.clone();
        xm[a] -= h;
        div_x += (tangential(&xp)?[a] - tangential(&xm)?[a]) / (two * h);
        for c in 0..n - 1 {
            div_x += jet.bg.gamma[a][(a, c)] * xe[c];
        }
    }
    Ok((dtr - div - div_x) / two)
}
