use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::mass::MassEngine;
use super::quadrature::QuadratureRule;
use super::sum::pairwise_columns;
use crate::error::{Error, Result};
use crate::geometry::connection::spd_inverse;
use crate::geometry::{
    boundary_geometry_from_jet, covariant_jet, curvature_from_jet, frame, Chart, Differentiation, MetricField,
};
use crate::reference::StaticPotential;
use crate::scalar::Real;

/// Per-radius Ricci-form integrals, without the dimensional constant.
#[derive(Clone, Debug)]
pub struct RicciSample<T: Real> {
    pub radius: T,
    pub hemisphere: Vec<T>,
    pub equator: Vec<T>,
    /// Largest frame norm of `Ĝ_g` over the hemisphere nodes.
    pub max_einstein: T,
}

impl<T: Real> RicciSample<T> {
    pub fn total(&self) -> Vec<T> {
        self.hemisphere.iter().zip(&self.equator).map(|(h, e)| *h + *e).collect()
    }
}

/// Orthonormal basis of the Euclidean complement of `w` inside `ℝ^k`, as columns.
fn complement_basis<T: Real>(w: &DVector<T>) -> DMatrix<T> {
    let k = w.len();
    let u = w.normalize();
    let mut cols: Vec<DVector<T>> = Vec::with_capacity(k - 1);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| u[a].abs().partial_cmp(&u[b].abs()).unwrap_or(std::cmp::Ordering::Equal));
    for &i in &order {
        if cols.len() == k - 1 {
            break;
        }
        let mut v = DVector::zeros(k);
        v[i] = T::one();
        v -= &u * u[i];
        for c in &cols {
            let d = c.dot(&v);
            v -= c * d;
        }
        let nv = v.norm();
        if nv > T::lit(1e-8) {
            cols.push(v / nv);
        }
    }
    DMatrix::from_columns(&cols)
}

fn area_ratio<T: Real>(g: &DMatrix<T>, tangent: &DMatrix<T>) -> T {
    if tangent.ncols() == 0 {
        return T::one();
    }
    (tangent.transpose() * g * tangent).determinant().sqrt()
}

/// Conformal field paired with the Einstein and Newton tensors: `X_a = −∇_b V_(a)`.
fn conformal_fields<T: Real>(n: usize, y: &DVector<T>) -> Result<Vec<DVector<T>>> {
    (0..n).map(|a| Ok(-StaticPotential::<T>::basis(n, a)?.gradient_field(Chart::Polar, y)?)).collect()
}

impl MassEngine {
    /// `∫ Ĝ_g(X_a, μ_g) dS_g` over the hemisphere and `∫ J_g(X_a, ϑ_g) dS_g`
    /// over the equator, for every basis index `a`.
    pub fn ricci_sample<T: Real, M: MetricField<T> + ?Sized>(
        &self,
        m: &M,
        rule: &QuadratureRule<T>,
    ) -> Result<RicciSample<T>> {
        let n = m.dim();
        if m.chart() != Chart::Polar {
            return Err(Error::ChartMismatch { expected: "POLAR".into(), got: m.chart().to_string() });
        }
        if rule.dim != n {
            return Err(Error::DimensionMismatch { expected: n, got: rule.dim });
        }
        let r = rule.radius;
        let hemi: Vec<Result<Vec<T>>> = self.map(rule.hemisphere.len(), |idx| {
            let node = &rule.hemisphere[idx];
            let y = &node.omega * r;
            let jet = covariant_jet(m, &y, true, Differentiation::Auto)?;
            let curv = curvature_from_jet(&jet)?;
            let gi = &curv.inverse;
            let mu = gi * &node.omega;
            let mu = &mu / node.omega.dot(&mu).sqrt();
            let ratio = area_ratio(&curv.metric, &complement_basis(&node.omega));
            let ghat = &curv.einstein_modified;
            let mut out: Vec<T> = conformal_fields(n, &y)?
                .iter()
                .map(|x| (x.transpose() * ghat * &mu)[(0, 0)] * ratio * node.weight)
                .collect();
            let f = frame(Chart::Polar, &y)?;
            out.push((f.transpose() * ghat * f).norm());
            Ok(out)
        });
        let hemi: Vec<Vec<T>> = hemi.into_iter().collect::<Result<_>>()?;
        let max_einstein = hemi.iter().fold(T::zero(), |a, v| a.max(v[n]));

        let eq: Vec<Result<Vec<T>>> = self.map(rule.equator.len(), |idx| {
            let node = &rule.equator[idx];
            let y = &node.omega * r;
            let jet = covariant_jet(m, &y, false, Differentiation::Auto)?;
            let bgeo = boundary_geometry_from_jet(&jet)?;
            let gamma = &bgeo.induced;
            let w = node.omega.rows(0, n - 1).into_owned();
            let gi = spd_inverse(gamma)?;
            let theta = &gi * &w;
            let theta = &theta / w.dot(&theta).sqrt();
            let ratio = area_ratio(gamma, &complement_basis(&w));
            let j = &bgeo.second_fundamental - gamma * bgeo.mean_curvature;
            conformal_fields(n, &y)?
                .iter()
                .map(|x| {
                    let xt = x.rows(0, n - 1).into_owned();
                    Ok((xt.transpose() * &j * &theta)[(0, 0)] * ratio * node.weight)
                })
                .collect()
        });
        let eq: Vec<Vec<T>> = eq.into_iter().collect::<Result<_>>()?;
        Ok(RicciSample {
            radius: r,
            hemisphere: pairwise_columns(&hemi, n),
            equator: pairwise_columns(&eq, n),
            max_einstein,
        })
    }

    pub fn ricci_mass_at_radius<T: Real, M: MetricField<T> + ?Sized>(
        &self,
        m: &M,
        a: usize,
        rule: &QuadratureRule<T>,
    ) -> Result<T> {
        if a >= m.dim() {
            return Err(Error::IndexOutOfRange { index: a, dim: m.dim() });
        }
        Ok(self.ricci_sample(m, rule)?.total()[a])
    }
}

pub fn ricci_mass_at_radius<T: Real, M: MetricField<T> + ?Sized>(
    m: &M,
    a: usize,
    rule: &QuadratureRule<T>,
) -> Result<T> {
    MassEngine::global().ricci_mass_at_radius(m, a, rule)
}

/// Paired charge-form and Ricci-form masses of one metric over several radii.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CalibrationInput {
    pub label: String,
    pub radii: Vec<f64>,
    pub charge: Vec<f64>,
    pub ricci: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub d_n: f64,
    /// `max |ratio − d_n| / |d_n|` over metrics and radii.
    pub max_deviation: f64,
    pub ratios: Vec<Vec<f64>>,
    pub consistent: bool,
    pub positive: bool,
}

impl Calibration {
    pub fn passed(&self) -> bool {
        self.consistent && self.positive
    }
}

pub const CALIBRATION_TOLERANCE: f64 = 0.02;

/// Least-squares ratio of charge-form to Ricci-form mass across metrics and radii.
pub fn calibrate_dn(inputs: &[CalibrationInput]) -> Result<Calibration> {
    let usable: Vec<&CalibrationInput> = inputs
        .iter()
        .filter(|c| c.charge.iter().any(|v| v.abs() > 1e-12) && c.charge.len() == c.ricci.len() && !c.charge.is_empty())
        .collect();
    if usable.len() < 2 {
        return Err(Error::Calibration(format!("need at least two metrics with nonzero mass, got {}", usable.len())));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for c in &usable {
        for (q, p) in c.charge.iter().zip(&c.ricci) {
            num += q * p;
            den += p * p;
        }
    }
    if den == 0.0 {
        return Err(Error::Calibration("Ricci-form masses vanish".into()));
    }
    let d = num / den;
    let ratios: Vec<Vec<f64>> =
        usable.iter().map(|c| c.charge.iter().zip(&c.ricci).map(|(q, p)| q / p).collect()).collect();
    let max_deviation = ratios.iter().flatten().fold(0.0f64, |a, r| a.max(((r - d) / d).abs()));
    Ok(Calibration {
        d_n: d,
        max_deviation,
        ratios,
        consistent: max_deviation <= CALIBRATION_TOLERANCE,
        positive: d > 0.0,
    })
}
