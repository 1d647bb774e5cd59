use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct QuadNode<T: Real> {
    /// Unit direction.
    pub omega: DVector<T>,
    /// Weight including the b-induced area element at the rule's radius.
    pub weight: T,
}

/// Product rule on the hemisphere `S^{n−1}_{r,+}` and the equator `S^{n−2}_r`.
///
/// Gauss–Legendre in the polar angle `ψ ∈ [0, π/2]` measured from `e_n` and
/// in the remaining colatitudes, trapezoid with `2N` points in the azimuth.
#[derive(Clone, Debug)]
pub struct QuadratureRule<T: Real> {
    pub dim: usize,
    pub radius: T,
    pub resolution: usize,
    pub hemisphere: Vec<QuadNode<T>>,
    pub equator: Vec<QuadNode<T>>,
}

fn gamma_half(m: usize) -> f64 {
    // Γ(m/2)
    let (mut g, mut x) = if m % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = m as f64 / 2.0;
    while x < target - 1e-12 {
        g *= x;
        x += 1.0;
    }
    g
}

/// `|S^k| = 2π^{(k+1)/2} / Γ((k+1)/2)`.
pub fn sphere_area(k: usize) -> f64 {
    2.0 * PI.powf((k as f64 + 1.0) / 2.0) / gamma_half(k + 1)
}

fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n).expect("resolution is positive"));
    let half = (b - a) / 2.0;
    let mid = (a + b) / 2.0;
    let mut v: Vec<(f64, f64)> = rule.as_node_weight_pairs().iter().map(|&(x, w)| (mid + half * x, half * w)).collect();
    v.sort_by(|p, q| p.0.total_cmp(&q.0));
    v
}

/// Product rule on the unit sphere `S^k ⊂ ℝ^{k+1}`.
fn sphere_rule(k: usize, res: usize) -> Vec<(Vec<f64>, f64)> {
    match k {
        0 => vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
        1 => {
            let m = 2 * res;
            (0..m)
                .map(|j| {
                    let phi = 2.0 * PI * j as f64 / m as f64;
                    (vec![phi.cos(), phi.sin()], 2.0 * PI / m as f64)
                })
                .collect()
        }
        _ => {
            let inner = sphere_rule(k - 1, res);
            let mut out = Vec::with_capacity(res * inner.len());
            for (theta, w) in gauss_legendre(res, 0.0, PI) {
                let (s, c) = theta.sin_cos();
                let wt = w * s.powi(k as i32 - 1);
                for (p, wi) in &inner {
                    let mut v: Vec<f64> = p.iter().map(|x| x * s).collect();
                    v.push(c);
                    out.push((v, wt * wi));
                }
            }
            out
        }
    }
}

impl<T: Real> QuadratureRule<T> {
    pub fn new(dim: usize, radius: T, resolution: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Quadrature(format!("dimension {} too small", dim)));
        }
        if resolution < 1 {
            return Err(Error::Quadrature("resolution must be positive".into()));
        }
        if !(radius > T::zero()) {
            return Err(Error::Quadrature("radius must be positive".into()));
        }
        let r = radius.to_f64_lossy();
        let eq = sphere_rule(dim - 2, resolution);
        let mut hemisphere = Vec::with_capacity(resolution * eq.len());
        let area_h = r.powi(dim as i32 - 1);
        for (psi, w) in gauss_legendre(resolution, 0.0, PI / 2.0) {
            let (s, c) = psi.sin_cos();
            let wt = w * s.powi(dim as i32 - 2);
            for (p, wi) in &eq {
                let mut v: Vec<f64> = p.iter().map(|x| x * s).collect();
                v.push(c);
                hemisphere.push(QuadNode {
                    omega: DVector::from_iterator(dim, v.into_iter().map(T::lit)),
                    weight: T::lit(wt * wi * area_h),
                });
            }
        }
        let area_e = r.powi(dim as i32 - 2);
        let equator = eq
            .into_iter()
            .map(|(p, w)| {
                let mut v = p;
                v.push(0.0);
                QuadNode { omega: DVector::from_iterator(dim, v.into_iter().map(T::lit)), weight: T::lit(w * area_e) }
            })
            .collect();
        Ok(Self { dim, radius, resolution, hemisphere, equator })
    }

    /// Checks both weight sums against the closed-form areas.
    pub fn validate(&self) -> Result<()> {
        let r = self.radius.to_f64_lossy();
        let n = self.dim;
        let h: f64 = self.hemisphere.iter().map(|q| q.weight.to_f64_lossy()).sum();
        let e: f64 = self.equator.iter().map(|q| q.weight.to_f64_lossy()).sum();
        let h_exact = r.powi(n as i32 - 1) * sphere_area(n - 1) / 2.0;
        let e_exact = r.powi(n as i32 - 2) * sphere_area(n - 2);
        let tol = if std::mem::size_of::<T>() >= 8 { 1e-8 } else { 1e-5 };
        if ((h - h_exact) / h_exact).abs() > tol {
            return Err(Error::Quadrature(format!("hemisphere weights {} vs area {}", h, h_exact)));
        }
        if ((e - e_exact) / e_exact).abs() > tol {
            return Err(Error::Quadrature(format!("equator weights {} vs area {}", e, e_exact)));
        }
        Ok(())
    }

    pub fn hemisphere_point(&self, node: &QuadNode<T>) -> DVector<T> {
        &node.omega * self.radius
    }
}
