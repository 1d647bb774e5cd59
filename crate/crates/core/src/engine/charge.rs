use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::connection::{check_point, curvature_from_jet};
use crate::geometry::{
    covariant_jet, vector_jet, ChartPoint, CovariantJet, Differentiation, MetricField, Scaled, VectorField,
};
use crate::reference::potential::covariant_hessian;
use crate::reference::{ScalarJet, StaticPotential};
use crate::scalar::{lit, Real};

/// `𝕌_k = V(div e − d tr e)_k − e(∇V, ∂_k) + tr e ∂_k V`, all with respect to `b`.
pub fn charge_form_from_jet<T: Real>(jet: &CovariantJet<T>, v: &ScalarJet<T>) -> DVector<T> {
    let n = jet.dim();
    let bi = &jet.bg.inverse;
    let grad_up = bi * &v.gradient;
    let tr = (bi * &jet.e).trace();
    DVector::from_fn(n, |k, _| {
        let mut div = T::zero();
        for i in 0..n {
            for j in 0..n {
                div += bi[(i, j)] * jet.ne[i][(j, k)];
            }
        }
        let dtr = (bi * &jet.ne[k]).trace();
        let mut contr = T::zero();
        for i in 0..n {
            contr += grad_up[i] * jet.e[(i, k)];
        }
        v.value * (div - dtr) - contr + tr * v.gradient[k]
    })
}

/// `div_b 𝕌(V, e)`; needs second derivatives in the jet.
pub fn charge_divergence_from_jet<T: Real>(jet: &CovariantJet<T>, v: &ScalarJet<T>) -> Result<T> {
    let n = jet.dim();
    let nne = jet.second()?;
    let bi = &jet.bg.inverse;
    let hc = covariant_hessian(v, &jet.bg.gamma);
    let grad_up = bi * &v.gradient;
    let tr = (bi * &jet.e).trace();
    let mut total = T::zero();
    for m in 0..n {
        for k in 0..n {
            let w = bi[(m, k)];
            if w == T::zero() {
                continue;
            }
            let mut div = T::zero();
            let mut ddiv = T::zero();
            for i in 0..n {
                for j in 0..n {
                    div += bi[(i, j)] * jet.ne[i][(j, k)];
                    ddiv += bi[(i, j)] * nne[m][i][(j, k)];
                }
            }
            let dtr = (bi * &jet.ne[k]).trace();
            let ddtr = (bi * &nne[m][k]).trace();
            let mut s = v.gradient[m] * (div - dtr) + v.value * (ddiv - ddtr);
            for i in 0..n {
                let hup: T = (0..n).fold(T::zero(), |acc, p| acc + bi[(i, p)] * hc[(p, m)]);
                s -= hup * jet.e[(i, k)] + grad_up[i] * jet.ne[m][(i, k)];
            }
            s += (bi * &jet.ne[m]).trace() * v.gradient[k] + tr * hc[(k, m)];
            total += w * s;
        }
    }
    Ok(total)
}

fn check_asymptotic<T: Real, M: MetricField<T> + ?Sized>(m: &M, p: &ChartPoint<T>) -> Result<()> {
    let r0 = m.decay().r0;
    if p.r() < r0 {
        return Err(Error::BelowAsymptoticRegion { radius: p.r().to_f64_lossy(), r0: r0.to_f64_lossy() });
    }
    Ok(())
}

/// Coordinate components of the charge form `𝕌(V, e)` at `p`.
pub fn charge_form<T: Real, M: MetricField<T> + ?Sized>(
    v: &StaticPotential<T>,
    m: &M,
    p: &ChartPoint<T>,
) -> Result<DVector<T>> {
    check_point(m, p)?;
    check_asymptotic(m, p)?;
    let jet = covariant_jet(m, &p.coords, false, Differentiation::Auto)?;
    let vj = v.jet(p.chart, &p.coords)?;
    Ok(charge_form_from_jet(&jet, &vj))
}

/// Both sides of `𝕌(V, ℒ_X b) = div_b 𝕍(V, X, b)` as covectors.
pub fn exactness_sides<T: Real, X: VectorField<T> + ?Sized>(
    v: &StaticPotential<T>,
    x: &X,
    p: &ChartPoint<T>,
) -> Result<(DVector<T>, DVector<T>)> {
    let n = p.dim();
    let bg = p.chart.background(&p.coords)?;
    let xj = vector_jet(x, &bg, &p.coords, true)?;
    let fl = &xj.first_lowered;
    let sl = xj.second_lowered.as_ref().expect("requested");
    let e = fl + fl.transpose();
    let ne: Vec<DMatrix<T>> = sl.iter().map(|s| s + s.transpose()).collect();
    let vj = v.jet(p.chart, &p.coords)?;
    let hc = covariant_hessian(&vj, &bg.gamma);
    let bi = bg.inverse.clone();
    let jet = CovariantJet { x: p.coords.clone(), bg, e, ne, nne: None };
    let u = charge_form_from_jet(&jet, &vj);

    let xl = &xj.lowered;
    let dv = &vj.gradient;
    let two = lit::<T>(2.0);
    // ∇_m 𝕍_ik
    let nv = |m: usize, i: usize, k: usize| -> T {
        dv[m] * (fl[(i, k)] - fl[(k, i)])
            + vj.value * (sl[m][(i, k)] - sl[m][(k, i)])
            + two * (fl[(k, m)] * dv[i] + xl[k] * hc[(i, m)] - fl[(i, m)] * dv[k] - xl[i] * hc[(k, m)])
    };
    let div = DVector::from_fn(n, |i, _| {
        let mut s = T::zero();
        for j in 0..n {
            for m in 0..n {
                s += bi[(j, m)] * nv(m, i, j);
            }
        }
        s
    });
    Ok((u, div))
}

/// `|𝕌(V, ℒ_X b) − div_b 𝕍(V, X, b)|_b` at `p`.
pub fn exactness_residual<T: Real, X: VectorField<T> + ?Sized>(
    v: &StaticPotential<T>,
    x: &X,
    p: &ChartPoint<T>,
) -> Result<T> {
    let (u, d) = exactness_sides(v, x, p)?;
    let bg = p.chart.background(&p.coords)?;
    let diff = u - d;
    Ok((diff.transpose() * &bg.inverse * &diff)[(0, 0)].max(T::zero()).sqrt())
}

/// `|V (R_{b+εe} + n(n−1)) − div_b 𝕌(V, εe)|` at `p`.
pub fn expansion_residual<T: Real, M: MetricField<T> + ?Sized>(
    m: &M,
    v: &StaticPotential<T>,
    p: &ChartPoint<T>,
    eps: f64,
) -> Result<T> {
    check_point(m, p)?;
    if eps == 0.0 {
        return Ok(T::zero());
    }
    let scaled = Scaled { inner: m, eps };
    let jet = covariant_jet(&scaled, &p.coords, true, Differentiation::Auto)?;
    let curv = curvature_from_jet(&jet)?;
    let vj = v.jet(p.chart, &p.coords)?;
    let div = charge_divergence_from_jet(&jet, &vj)?;
    Ok((vj.value * curv.scalar_excess - div).abs())
}

/// The pair `(V·Ṙ_b e, div_b 𝕌(V, e))` at `p`.
pub fn linearization_pair<T: Real, M: MetricField<T> + ?Sized>(
    m: &M,
    v: &StaticPotential<T>,
    p: &ChartPoint<T>,
) -> Result<(T, T)> {
    check_point(m, p)?;
    let jet = covariant_jet(m, &p.coords, true, Differentiation::Auto)?;
    let vj = v.jet(p.chart, &p.coords)?;
    let lin = crate::geometry::linearized_scalar_from_jet(&jet)?;
    Ok((vj.value * lin, charge_divergence_from_jet(&jet, &vj)?))
}
