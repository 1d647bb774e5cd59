use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use super::clifford::{boundary_chirality, inner, Chirality, CliffordRep};
use super::killing::{KillingSign, KillingSpec};
use crate::error::{Error, Result};
use crate::reference::{LorentzVector, StaticPotential};
use crate::scalar::Real;

/// Relative size of the normal component tolerated by [`v_phi`].
pub const CHIRALITY_TOL: f64 = 1e-12;
/// Relative tolerance on `⟨⟨V, V⟩⟩` accepted as null.
pub const NULL_TOL: f64 = 1e-9;

/// Coefficients `(z_0, …, z_n)` with `⟨Φ, Φ⟩ = Σ_a z_a V̂_(a)`, where the last
/// entry multiplies `2x_n/(1 − |x'|²)`:
/// `z_0 = 2|u|²`, `z_i = ±2 i⟨c(∂_i)u, u⟩`.
pub fn v_phi_coefficients<T: Real>(rep: &CliffordRep<T>, spec: &KillingSpec<T>) -> Result<DVector<T>> {
    let n = rep.dim();
    let u = spec.constant();
    if u.len() != rep.bundle_rank() {
        return Err(Error::DimensionMismatch { expected: rep.bundle_rank(), got: u.len() });
    }
    let two = T::lit(2.0);
    let s = T::lit(spec.sign.sign());
    let mut z = DVector::zeros(n + 1);
    z[0] = two * u.norm_squared();
    for i in 0..n {
        let mut e = vec![T::zero(); n];
        e[i] = T::one();
        let ci = rep.action(&e)?;
        let v = &ci * u * Complex::new(T::zero(), T::one());
        z[i + 1] = two * s * inner(&v, u).re;
    }
    Ok(z)
}

/// `V_Φ = ⟨Φ, Φ⟩` as a static potential. The normal coefficient must vanish,
/// which holds exactly when the constant spinor satisfies a chirality condition.
pub fn v_phi<T: Real>(rep: &CliffordRep<T>, spec: &KillingSpec<T>) -> Result<StaticPotential<T>> {
    if spec.is_trivial() {
        return Err(Error::Spin("trivial Killing spec".into()));
    }
    let z = v_phi_coefficients(rep, spec)?;
    let n = rep.dim();
    let normal = z[n].abs().to_f64_lossy();
    if normal > CHIRALITY_TOL * z[0].to_f64_lossy() {
        return Err(Error::Spin(format!(
            "spec violates the chirality condition: normal coefficient {:e} relative to {:e}",
            normal,
            z[0].to_f64_lossy()
        )));
    }
    Ok(StaticPotential::new(z.rows(0, n).into_owned()))
}

/// A spec with `v_phi(spec) = V` for `V` on the future null cone.
///
/// The constant spinor is the normalized column of largest norm of the
/// projector onto `{𝒬U = ±U, M U = U}`, `M = ±Σ_i d_i i c(∂_i)` with
/// `d = (z_1, …, z_{n−1})/z_0`.
pub fn null_cone_inverse<T: Real>(
    rep: &CliffordRep<T>,
    v: &StaticPotential<T>,
    chirality: Chirality,
    sign: KillingSign,
) -> Result<KillingSpec<T>> {
    let n = rep.dim();
    if v.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v.dim() });
    }
    let z: Vec<f64> = v.coeffs.iter().map(|c| c.to_f64_lossy()).collect();
    let size = z.iter().map(|c| c * c).sum::<f64>().sqrt();
    let rb = rep.bundle_rank();
    if size == 0.0 {
        return KillingSpec::new(rep, DVector::zeros(rb), sign);
    }
    let q = LorentzVector::new(v.coeffs.clone()).norm_squared().to_f64_lossy();
    if q.abs() > NULL_TOL * size * size {
        return Err(Error::NotNull(format!("⟨⟨V,V⟩⟩ = {:e}", q)));
    }
    if z[0] < 0.0 {
        return Err(Error::NotNull("V is past directed".into()));
    }
    let s = sign.sign();
    let mut m = DMatrix::<Complex<T>>::zeros(rb, rb);
    for (i, zi) in z.iter().enumerate().skip(1) {
        let mut e = vec![T::zero(); n];
        e[i - 1] = T::one();
        m += rep.action(&e)? * Complex::new(T::zero(), T::lit(s * zi / z[0]));
    }
    let eye = DMatrix::<Complex<T>>::identity(rb, rb);
    let half = Complex::new(T::lit(0.5), T::zero());
    let bc = boundary_chirality(rep);
    let proj = bc.projector(chirality) * (&eye + &m) * half;
    let best =
        (0..rb)
            .map(|j| (j, proj.column(j).norm().to_f64_lossy()))
            .fold((0, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
    if best.1 < 1e-6 {
        return Err(Error::Spin("no spinor realizes this potential".into()));
    }
    let col = proj.column(best.0).into_owned();
    let scale = (z[0] / 2.0).sqrt() / best.1;
    KillingSpec::new(rep, col * Complex::new(T::lit(scale), T::zero()), sign)
}
