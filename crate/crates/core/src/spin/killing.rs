use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use super::clifford::{boundary_chirality, Chirality, CliffordRep, Spinor};
use crate::error::{Error, Result};
use crate::geometry::{Chart, ChartPoint};
use crate::scalar::Real;

/// Killing number `±i/2`: `∇_X φ = ±(i/2) c(X) φ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KillingSign {
    Plus,
    Minus,
}

impl KillingSign {
    pub fn sign(self) -> f64 {
        match self {
            KillingSign::Plus => 1.0,
            KillingSign::Minus => -1.0,
        }
    }
}

/// Constant spinor `u` and Killing number. For odd `n` the constant is the
/// pair `(u, v)` on `S ⊕ S` and the section is `(φ_{u,±}, φ_{v,∓})`.
#[derive(Clone, Debug, PartialEq)]
pub struct KillingSpec<T: Real> {
    constant: Spinor<T>,
    pub sign: KillingSign,
}

/// Distance from `|x'| = 1` below which residuals are not evaluated.
pub const BOUNDARY_MARGIN: f64 = 1e-3;

impl<T: Real> KillingSpec<T> {
    /// `constant` lives on the bundle `Q` acts on (length [`CliffordRep::bundle_rank`]).
    pub fn new(rep: &CliffordRep<T>, constant: Spinor<T>, sign: KillingSign) -> Result<Self> {
        if constant.len() != rep.bundle_rank() {
            return Err(Error::DimensionMismatch { expected: rep.bundle_rank(), got: constant.len() });
        }
        if constant.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Spin("non-finite spinor component".into()));
        }
        Ok(Self { constant, sign })
    }

    /// Odd `n`: the pair `(u, v)` of Eq. `Φ_{u,v}`.
    pub fn paired(rep: &CliffordRep<T>, u: Spinor<T>, v: Spinor<T>, sign: KillingSign) -> Result<Self> {
        if !rep.is_doubled() {
            return Err(Error::Spin(format!("paired specs need odd n, got n = {}", rep.dim())));
        }
        if u.len() != rep.rank() || v.len() != rep.rank() {
            return Err(Error::DimensionMismatch { expected: rep.rank(), got: u.len().max(v.len()) });
        }
        let mut c = DVector::zeros(2 * rep.rank());
        c.rows_mut(0, rep.rank()).copy_from(&u);
        c.rows_mut(rep.rank(), rep.rank()).copy_from(&v);
        Self::new(rep, c, sign)
    }

    /// Odd `n`: `(u, ±c(ν)u)`, which satisfies the chirality condition `±`.
    pub fn chiral_pair(rep: &CliffordRep<T>, u: Spinor<T>, chirality: Chirality, sign: KillingSign) -> Result<Self> {
        let g = rep.gamma(rep.dim() - 1)?;
        let v = g * &u * Complex::new(T::lit(chirality.sign()), T::zero());
        Self::paired(rep, u, v, sign)
    }

    pub fn constant(&self) -> &Spinor<T> {
        &self.constant
    }

    pub fn is_trivial(&self) -> bool {
        self.constant.iter().all(|z| z.re == T::zero() && z.im == T::zero())
    }

    /// Eigenvalue of `𝒬` the constant spinor carries, if any, within `tol`.
    pub fn chirality(&self, rep: &CliffordRep<T>, tol: f64) -> Option<Chirality> {
        let bc = boundary_chirality(rep);
        let size = self.constant.norm().to_f64_lossy().max(f64::MIN_POSITIVE);
        [Chirality::Plus, Chirality::Minus].into_iter().find(|&c| {
            let defect =
                (&bc.operator * &self.constant - &self.constant * Complex::new(T::lit(c.sign()), T::zero())).norm();
            defect.to_f64_lossy() <= tol * size
        })
    }
}

fn weight<T: Real>(x: &DVector<T>) -> T {
    (T::one() - x.norm_squared()) / T::lit(2.0)
}

fn imag<T: Real>(s: f64) -> Complex<T> {
    Complex::new(T::zero(), T::lit(s))
}

/// `ω^{−1/2}(1 ± i c(x))u` without domain checks.
fn eval_raw<T: Real>(rep: &CliffordRep<T>, spec: &KillingSpec<T>, x: &DVector<T>) -> Spinor<T> {
    let cx = rep.action(x.as_slice()).expect("dimension checked");
    let u = &spec.constant;
    let w = weight(x);
    (u + cx * u * imag::<T>(spec.sign.sign())) * Complex::new(T::one() / w.sqrt(), T::zero())
}

fn check_point<T: Real>(rep: &CliffordRep<T>, spec: &KillingSpec<T>, p: &ChartPoint<T>) -> Result<()> {
    p.require_chart(Chart::Ball)?;
    if p.dim() != rep.dim() {
        return Err(Error::DimensionMismatch { expected: rep.dim(), got: p.dim() });
    }
    if spec.constant.len() != rep.bundle_rank() {
        return Err(Error::DimensionMismatch { expected: rep.bundle_rank(), got: spec.constant.len() });
    }
    if !(p.coords.norm() < T::one()) {
        return Err(Error::OutsideDomain(format!("|x'| = {} is not below 1", p.coords.norm())));
    }
    Ok(())
}

/// `φ_{u,±}(x') = ω(x')^{−1/2}(1 ± i c(x'))u` in the `b̂`-orthonormal frame.
pub fn killing_spinor_eval<T: Real>(
    rep: &CliffordRep<T>,
    spec: &KillingSpec<T>,
    p: &ChartPoint<T>,
) -> Result<Spinor<T>> {
    check_point(rep, spec, p)?;
    Ok(eval_raw(rep, spec, &p.coords))
}

/// 4th-order central difference of a scalar function at 0.
fn central(h: f64, f: impl Fn(f64) -> f64) -> f64 {
    (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h)
}

/// Spinor connection `¼ Σ ω_kl(f_d) γ_kγ_l` for the frame `f_k = ω e_k` of `b̂`,
/// with `ω_kl(X) = b̂(∇_X f_k, f_l)`.
pub fn spin_connection<T: Real>(rep: &CliffordRep<T>, x: &DVector<T>, direction: usize) -> Result<DMatrix<Complex<T>>> {
    let n = rep.dim();
    if direction >= n {
        return Err(Error::IndexOutOfRange { index: direction, dim: n });
    }
    let bg = Chart::Ball.background(x)?;
    let w = weight(x);
    let xf: Vec<f64> = x.iter().map(|v| v.to_f64_lossy()).collect();
    let h = 1e-3 * w.to_f64_lossy();
    // ∂_d of the frame coefficient, numerically
    let dw = T::lit(central(h, |t| {
        let s: f64 = xf.iter().enumerate().map(|(i, v)| if i == direction { (v + t) * (v + t) } else { v * v }).sum();
        (1.0 - s) / 2.0
    }));
    let quarter = Complex::new(T::lit(0.25), T::zero());
    let mut a = DMatrix::zeros(rep.rank(), rep.rank());
    for k in 0..n {
        for l in 0..n {
            let mut om = w * bg.gamma[l][(direction, k)];
            if k == l {
                om += dw;
            }
            if om != T::zero() {
                a += &rep.gammas()[k] * &rep.gammas()[l] * Complex::new(om, T::zero()) * quarter;
            }
        }
    }
    Ok(rep.lift(&a, false))
}

/// `|∇̂_X φ ∓ (i/2) c(X) φ|` for `X = f_direction`, with `∂_X` taken by
/// 4th-order differences of step `10⁻³ ω`. The section `φ_{u,±}` is parallel
/// for `∇_X ∓ (i/2)c(X)` when `c(X)² = −|X|²`.
pub fn killing_residual<T: Real>(
    rep: &CliffordRep<T>,
    spec: &KillingSpec<T>,
    p: &ChartPoint<T>,
    direction: usize,
) -> Result<T> {
    check_point(rep, spec, p)?;
    let x = &p.coords;
    if x.norm().to_f64_lossy() > 1.0 - BOUNDARY_MARGIN {
        return Err(Error::StepUnderflow(direction));
    }
    let n = rep.dim();
    if direction >= n {
        return Err(Error::IndexOutOfRange { index: direction, dim: n });
    }
    if spec.is_trivial() {
        return Ok(T::zero());
    }
    let w = weight(x);
    let h = 1e-3 * w.to_f64_lossy();
    let shifted = |t: f64| -> Spinor<T> {
        let mut y = x.clone();
        y[direction] += T::lit(t);
        eval_raw(rep, spec, &y)
    };
    let dphi = (shifted(h) - shifted(-h)) * Complex::new(T::lit(8.0 / (12.0 * h)), T::zero())
        - (shifted(2.0 * h) - shifted(-2.0 * h)) * Complex::new(T::lit(1.0 / (12.0 * h)), T::zero());
    let phi = eval_raw(rep, spec, x);
    let mut e = vec![T::zero(); n];
    e[direction] = T::one();
    let cx = rep.action(&e)?;
    let conn = spin_connection(rep, x, direction)?;
    let half_i = imag::<T>(-0.5 * spec.sign.sign());
    let r = dphi * Complex::new(w, T::zero()) + &conn * &phi + cx * &phi * half_i;
    Ok(r.norm())
}
