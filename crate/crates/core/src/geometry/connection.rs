use nalgebra::DMatrix;

use super::chart::ChartPoint;
use super::jet::{covariant_jet, CovariantJet, Differentiation};
use super::metric::MetricField;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

pub(crate) fn spd_inverse<T: Real>(g: &DMatrix<T>) -> Result<DMatrix<T>> {
    if !g.iter().all(|v| v.is_finite()) {
        return Err(Error::Singular("non-finite metric components".into()));
    }
    let sym = (g + g.transpose()) * lit::<T>(0.5);
    match sym.cholesky() {
        Some(c) => Ok(c.inverse()),
        None => {
            if g.clone().try_inverse().is_none() {
                Err(Error::Singular(format!("{}", g)))
            } else {
                Err(Error::NotPositiveDefinite(format!("{}", g)))
            }
        }
    }
}

pub(crate) fn check_point<T: Real, M: MetricField<T> + ?Sized>(m: &M, p: &ChartPoint<T>) -> Result<()> {
    p.require_chart(m.chart())?;
    if p.dim() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), got: p.dim() });
    }
    Ok(())
}

/// Difference tensor between the connections of `g` and `b`.
#[derive(Clone, Debug)]
pub struct ConnectionData<T: Real> {
    pub inverse: DMatrix<T>,
    /// `T_lij = ½(∇_i e_lj + ∇_j e_li − ∇_l e_ij)`, stored `[l][(i, j)]`.
    pub lowered: Vec<DMatrix<T>>,
    /// `C^k_ij = g^{kl} T_lij`, stored `[k][(i, j)]`.
    pub difference: Vec<DMatrix<T>>,
}

pub fn connection_data<T: Real>(jet: &CovariantJet<T>) -> Result<ConnectionData<T>> {
    let n = jet.dim();
    let inverse = spd_inverse(&jet.metric())?;
    let half = lit::<T>(0.5);
    let ne = &jet.ne;
    let lowered: Vec<DMatrix<T>> =
        (0..n).map(|l| DMatrix::from_fn(n, n, |i, j| half * (ne[i][(l, j)] + ne[j][(l, i)] - ne[l][(i, j)]))).collect();
    let difference = (0..n)
        .map(|k| {
            let mut c = DMatrix::zeros(n, n);
            for l in 0..n {
                c += &lowered[l] * inverse[(k, l)];
            }
            c
        })
        .collect();
    Ok(ConnectionData { inverse, lowered, difference })
}

/// `Γ^k_ij` of `g` at `p`, stored `[k][(i, j)]`.
pub fn christoffel<T: Real, M: MetricField<T> + ?Sized>(m: &M, p: &ChartPoint<T>) -> Result<Vec<DMatrix<T>>> {
    check_point(m, p)?;
    let jet = covariant_jet(m, &p.coords, false, Differentiation::Auto)?;
    christoffel_from_jet(&jet)
}

pub fn christoffel_from_jet<T: Real>(jet: &CovariantJet<T>) -> Result<Vec<DMatrix<T>>> {
    let c = connection_data(jet)?;
    Ok(c.difference.iter().zip(&jet.bg.gamma).map(|(c, g)| c + g).collect())
}

#[derive(Clone, Debug)]
pub struct Curvature<T: Real> {
    /// `R^l_kij`, stored `[l][k][(i, j)]`, with
    /// `R(∂_i, ∂_j)∂_k = R^l_kij ∂_l`.
    pub riemann: Vec<Vec<DMatrix<T>>>,
    pub ricci: DMatrix<T>,
    pub scalar: T,
    /// `Ric_g − Ric_b`.
    pub ricci_excess: DMatrix<T>,
    /// `R_g − R_b`.
    pub scalar_excess: T,
    /// `Ĝ_g = Ric_g − ½R_g g − ½(n−1)(n−2) g`.
    pub einstein_modified: DMatrix<T>,
    pub metric: DMatrix<T>,
    pub inverse: DMatrix<T>,
}

pub fn curvature<T: Real, M: MetricField<T> + ?Sized>(m: &M, p: &ChartPoint<T>) -> Result<Curvature<T>> {
    check_point(m, p)?;
    let jet = covariant_jet(m, &p.coords, true, Differentiation::Auto)?;
    curvature_from_jet(&jet)
}

/// Curvature of `g = b + e` assembled as background curvature plus the
/// contribution of the difference tensor, which keeps the excess quantities
/// accurate when `e` is small.
pub fn curvature_from_jet<T: Real>(jet: &CovariantJet<T>) -> Result<Curvature<T>> {
    let n = jet.dim();
    let nne = jet.second()?;
    let con = connection_data(jet)?;
    let gi = &con.inverse;
    let c = &con.difference;
    let half = lit::<T>(0.5);

    // ∇_a C^l_jk, stored [a][l][(j, k)]
    let dc: Vec<Vec<DMatrix<T>>> = (0..n)
        .map(|a| {
            let dgi = -(gi * &jet.ne[a] * gi);
            let nt: Vec<DMatrix<T>> = (0..n)
                .map(|p| {
                    DMatrix::from_fn(n, n, |j, k| half * (nne[a][j][(p, k)] + nne[a][k][(p, j)] - nne[a][p][(j, k)]))
                })
                .collect();
            (0..n)
                .map(|l| {
                    let mut acc = DMatrix::zeros(n, n);
                    for p in 0..n {
                        acc += &con.lowered[p] * dgi[(l, p)] + &nt[p] * gi[(l, p)];
                    }
                    acc
                })
                .collect()
        })
        .collect();

    let bg_riem = jet.bg.riemann();
    let mut riemann = bg_riem;
    let mut ricci_excess = DMatrix::zeros(n, n);
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = dc[i][l][(j, k)] - dc[j][l][(i, k)];
                    for m in 0..n {
                        v += c[l][(i, m)] * c[m][(j, k)] - c[l][(j, m)] * c[m][(i, k)];
                    }
                    riemann[l][k][(i, j)] += v;
                    if l == i {
                        ricci_excess[(k, j)] += v;
                    }
                }
            }
        }
    }
    let ricci_excess = (&ricci_excess + ricci_excess.transpose()) * half;
    let nn = T::from_usize_lossy(n);
    let kappa = jet.bg.sectional;
    let tr_e = (gi * &jet.e).trace();
    let scalar_excess = (gi * &ricci_excess).trace() - (nn - T::one()) * kappa * tr_e;
    let g = jet.metric();
    let ricci = jet.bg.ricci() + &ricci_excess;
    let scalar = jet.bg.scalar() + scalar_excess;
    let n1 = nn - T::one();
    let n2 = nn - lit::<T>(2.0);
    let bcoef = n1 * kappa - nn * n1 * kappa * half - n1 * n2 * half;
    let ecoef = -(nn * n1 * kappa * half + n1 * n2 * half);
    let einstein_modified = &jet.bg.metric * bcoef + &ricci_excess - &g * (scalar_excess * half) + &jet.e * ecoef;
    Ok(Curvature {
        riemann,
        ricci,
        scalar,
        ricci_excess,
        scalar_excess,
        einstein_modified,
        metric: g,
        inverse: con.inverse.clone(),
    })
}
