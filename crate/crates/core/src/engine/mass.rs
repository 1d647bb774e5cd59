use std::sync::Arc;

use nalgebra::DVector;
use rayon::prelude::*;
use rayon::ThreadPool;

use super::charge::charge_form_from_jet;
use super::extrapolate::{extrapolate_mass, Extrapolation};
use super::quadrature::QuadratureRule;
use super::sum::pairwise_columns;
use crate::error::{Error, Result};
use crate::geometry::{covariant_jet, frame, outward_normal, Chart, Differentiation, MetricField};
use crate::reference::{CausalClass, LorentzVector, StaticPotential};
use crate::scalar::Real;

/// Per-radius hemisphere flux and equator term for several potentials.
#[derive(Clone, Debug)]
pub struct RadiusSample<T: Real> {
    pub radius: T,
    pub flux: Vec<T>,
    pub equator: Vec<T>,
}

impl<T: Real> RadiusSample<T> {
    pub fn mass(&self) -> Vec<T> {
        self.flux.iter().zip(&self.equator).map(|(f, e)| *f - *e).collect()
    }
}

/// The mass vector with its per-component fits and causal class.
#[derive(Clone, Debug)]
pub struct MassVector {
    pub vector: LorentzVector<f64>,
    pub fits: Vec<Extrapolation>,
    pub class: CausalClass,
    pub samples: Vec<RadiusSample<f64>>,
}

impl MassVector {
    pub fn error_scale(&self) -> f64 {
        self.fits.iter().fold(0.0f64, |a, f| a.max(f.error))
    }

    pub fn converged(&self) -> bool {
        self.fits.iter().all(|f| f.converged)
    }
}

/// Evaluates quadrature nodes on a worker pool and reduces them in node order.
#[derive(Clone, Default)]
pub struct MassEngine {
    pool: Option<Arc<ThreadPool>>,
}

pub fn default_radii(r0: f64, count: usize) -> Vec<f64> {
    (0..count).map(|j| r0 * 2f64.powi(j as i32)).collect()
}

impl MassEngine {
    /// Engine on the global pool.
    pub fn global() -> Self {
        Self { pool: None }
    }

    pub fn with_workers(workers: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::Invalid(format!("worker pool: {}", e)))?;
        Ok(Self { pool: Some(Arc::new(pool)) })
    }

    pub(crate) fn map<R: Send>(&self, len: usize, f: impl Fn(usize) -> R + Sync + Send) -> Vec<R> {
        let run = || (0..len).into_par_iter().map(&f).collect::<Vec<R>>();
        match &self.pool {
            Some(p) => p.install(run),
            None => run(),
        }
    }

    /// Hemisphere fluxes and equator terms of `𝕌(V, e)` for each potential.
    pub fn radius_sample<T: Real, M: MetricField<T> + ?Sized>(
        &self,
        m: &M,
        potentials: &[StaticPotential<T>],
        rule: &QuadratureRule<T>,
    ) -> Result<RadiusSample<T>> {
        let n = m.dim();
        if m.chart() != Chart::Polar {
            return Err(Error::ChartMismatch { expected: "POLAR".into(), got: m.chart().to_string() });
        }
        if rule.dim != n {
            return Err(Error::DimensionMismatch { expected: n, got: rule.dim });
        }
        if let Some(v) = potentials.iter().find(|v| v.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: v.dim() });
        }
        let r0 = m.decay().r0;
        if rule.radius < r0 {
            return Err(Error::BelowAsymptoticRegion { radius: rule.radius.to_f64_lossy(), r0: r0.to_f64_lossy() });
        }
        let r = rule.radius;
        let lapse = (T::one() + r * r).sqrt();
        let k = potentials.len();

        let hemi: Vec<Result<Vec<T>>> = self.map(rule.hemisphere.len(), |idx| {
            let node = &rule.hemisphere[idx];
            let y = &node.omega * r;
            let jet = covariant_jet(m, &y, false, Differentiation::Auto)?;
            let f = frame(Chart::Polar, &y)?;
            let mu = &node.omega * lapse;
            let mu_frame = f.transpose() * (&jet.bg.metric * mu);
            potentials
                .iter()
                .map(|v| {
                    let vj = v.jet(Chart::Polar, &y)?;
                    let u = charge_form_from_jet(&jet, &vj);
                    let u_frame = f.transpose() * u;
                    Ok(u_frame.dot(&mu_frame) * node.weight)
                })
                .collect()
        });
        let hemi: Vec<Vec<T>> = hemi.into_iter().collect::<Result<_>>()?;

        let eq: Vec<Result<Vec<T>>> = self.map(rule.equator.len(), |idx| {
            let node = &rule.equator[idx];
            let y = &node.omega * r;
            let e = m.perturbation(&y)?;
            let f = frame(Chart::Polar, &y)?;
            let b = Chart::Polar.background(&y)?.metric;
            let eta = outward_normal(Chart::Polar, &y)?;
            let theta: DVector<T> = &node.omega * lapse;
            let ef = f.transpose() * &e * &f;
            let eta_f = f.transpose() * (&b * eta);
            let theta_f = f.transpose() * (&b * theta);
            let e_eta_theta = (eta_f.transpose() * ef * theta_f)[(0, 0)];
            potentials.iter().map(|v| Ok(v.jet(Chart::Polar, &y)?.value * e_eta_theta * node.weight)).collect()
        });
        let eq: Vec<Vec<T>> = eq.into_iter().collect::<Result<_>>()?;

        Ok(RadiusSample { radius: r, flux: pairwise_columns(&hemi, k), equator: pairwise_columns(&eq, k) })
    }

    /// Hemisphere flux minus equator term for a single potential.
    pub fn mass_at_radius<T: Real, M: MetricField<T> + ?Sized>(
        &self,
        m: &M,
        v: &StaticPotential<T>,
        rule: &QuadratureRule<T>,
    ) -> Result<T> {
        let s = self.radius_sample(m, std::slice::from_ref(v), rule)?;
        Ok(s.flux[0] - s.equator[0])
    }

    /// Masses of all basis potentials over the radii, extrapolated and classified.
    pub fn mass_vector<M: MetricField<f64> + ?Sized>(
        &self,
        m: &M,
        resolution: usize,
        radii: &[f64],
    ) -> Result<MassVector> {
        let n = m.dim();
        let basis: Vec<StaticPotential<f64>> = (0..n).map(|a| StaticPotential::basis(n, a)).collect::<Result<_>>()?;
        let mut samples = Vec::with_capacity(radii.len());
        for &r in radii {
            let rule = QuadratureRule::new(n, r, resolution)?;
            samples.push(self.radius_sample(m, &basis, &rule)?);
        }
        let q_init = match m.decay().tau {
            Some(t) => 2.0 * t - n as f64,
            None => 2.0,
        };
        let fits: Vec<Extrapolation> = (0..n)
            .map(|a| {
                let masses: Vec<f64> = samples.iter().map(|s| s.flux[a] - s.equator[a]).collect();
                extrapolate_mass(radii, &masses, q_init)
            })
            .collect::<Result<_>>()?;
        let vector = LorentzVector::new(DVector::from_iterator(n, fits.iter().map(|f| f.mass_inf)));
        let scale = fits.iter().fold(0.0f64, |a, f| a.max(f.error));
        let class = vector.classify(scale);
        Ok(MassVector { vector, fits, class, samples })
    }
}

/// `mass_at_radius` on the global pool.
pub fn mass_at_radius<T: Real, M: MetricField<T> + ?Sized>(
    m: &M,
    v: &StaticPotential<T>,
    rule: &QuadratureRule<T>,
) -> Result<T> {
    MassEngine::global().mass_at_radius(m, v, rule)
}

/// `mass_vector` on the global pool.
pub fn mass_vector<M: MetricField<f64> + ?Sized>(m: &M, resolution: usize, radii: &[f64]) -> Result<MassVector> {
    MassEngine::global().mass_vector(m, resolution, radii)
}
