use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::chart::{polar_metric, polar_metric_d1};
use crate::geometry::{Chart, Decay, MetricField};
use crate::reference::IsometryElement;
use crate::scalar::Real;

/// Vector field `ζ(y) = a (1 + |y|²)^{−q} A y` in the polar chart.
///
/// The last row of `A` must be `(0, …, 0, α)`, which makes `ζ` tangent to the
/// boundary face and keeps the flow inside the half-space.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffeoSpec {
    pub amplitude: f64,
    pub matrix: DMatrix<f64>,
    pub power: f64,
}

impl DiffeoSpec {
    pub fn new(amplitude: f64, matrix: DMatrix<f64>, power: f64) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n || n < 3 {
            return Err(Error::Invalid(format!(
                "diffeomorphism matrix must be square of size ≥ 3, got {}x{}",
                n,
                matrix.ncols()
            )));
        }
        if (0..n - 1).any(|j| matrix[(n - 1, j)] != 0.0) {
            return Err(Error::Invalid(
                "field is not tangent to the boundary face: last row must be (0, …, 0, α)".into(),
            ));
        }
        if !(power > 0.5) {
            return Err(Error::Decay(format!("field does not decay: power {} ≤ 1/2", power)));
        }
        if !amplitude.is_finite() || matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite diffeomorphism data".into()));
        }
        Ok(Self { amplitude, matrix, power })
    }

    /// A fixed non-symmetric matrix with decay `q = (n+1)/2`.
    pub fn standard(n: usize, amplitude: f64) -> Self {
        let mut a = DMatrix::from_fn(n, n, |i, j| {
            let k = (i * n + j) as f64;
            ((1.3 * k + 0.7).sin() + 0.25 * (i as f64 - j as f64)) / n as f64
        });
        for j in 0..n - 1 {
            a[(n - 1, j)] = 0.0;
        }
        a[(n - 1, n - 1)] = 0.4;
        Self { amplitude, matrix: a, power: (n as f64 + 1.0) / 2.0 }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Decay rate of `|ζ|_b` and of the induced perturbation.
    pub fn rate(&self) -> f64 {
        2.0 * self.power - 1.0
    }

    pub fn zeta<T: Real>(&self, y: &DVector<T>) -> DVector<T> {
        let a = self.matrix.map(T::lit);
        let f = T::lit(self.amplitude) * (T::one() + y.norm_squared()).powf(T::lit(-self.power));
        a * y * f
    }

    /// `J[(i, k)] = ∂_k ζ_i`.
    pub fn zeta_jacobian<T: Real>(&self, y: &DVector<T>) -> DMatrix<T> {
        let a = self.matrix.map(T::lit);
        let q = T::lit(self.power);
        let s = T::one() + y.norm_squared();
        let f = T::lit(self.amplitude) * s.powf(-q);
        let df = T::lit(self.amplitude) * (-q) * s.powf(-q - T::one()) * T::lit(2.0);
        let ay = &a * y;
        &a * f + ay * y.transpose() * df
    }
}

/// `(C(s), S(s), C'(s), S'(s))` with `C = cosh√s − 1`, `S = sinh√s/√s`.
fn flow_coefficients<T: Real>(s: T) -> (T, T, T, T) {
    if s < T::lit(1e-3) {
        let s2 = s * s;
        let c = s / T::lit(2.0) + s2 / T::lit(24.0) + s2 * s / T::lit(720.0);
        let sh = T::one() + s / T::lit(6.0) + s2 / T::lit(120.0) + s2 * s / T::lit(5040.0);
        let dsh = T::lit(1.0 / 6.0) + s / T::lit(60.0) + s2 / T::lit(1680.0);
        (c, sh, sh / T::lit(2.0), dsh)
    } else {
        let q = s.sqrt();
        let sh = q.sinh() / q;
        (q.cosh() - T::one(), sh, sh / T::lit(2.0), (q.cosh() - sh) / (T::lit(2.0) * s))
    }
}

/// Displacement `w = exp_y(ζ(y)) − y` and its Jacobian, from the closed-form
/// geodesics of the hyperboloid: `exp_y(ζ) = cosh√s · y + (sinh√s/√s) ζ`
/// in the spatial coordinates, `s = b(ζ, ζ)`.
pub fn exp_displacement<T: Real>(spec: &DiffeoSpec, y: &DVector<T>) -> (DVector<T>, DMatrix<T>) {
    let n = y.len();
    let b = polar_metric(y);
    let db = polar_metric_d1(y);
    let z = spec.zeta(y);
    let jz = spec.zeta_jacobian(y);
    let bz = &b * &z;
    let s = z.dot(&bz);
    let (c, sh, dc, dsh) = flow_coefficients(s);
    let w = y * c + &z * sh;
    let mut dw = DMatrix::zeros(n, n);
    for k in 0..n {
        let dz = jz.column(k);
        let ds = T::lit(2.0) * bz.dot(&dz) + z.dot(&(&db[k] * &z));
        let mut col = y * (dc * ds) + &z * (dsh * ds) + dz * sh;
        col[k] += c;
        dw.set_column(k, &col);
    }
    (w, dw)
}

/// Geodesic of `b` from `y` with initial velocity `v`, integrated to time 1 by
/// classical Runge–Kutta with `steps` equal steps.
pub fn geodesic_flow_rk4<T: Real>(y: &DVector<T>, v: &DVector<T>, steps: usize) -> DVector<T> {
    let h = T::one() / T::from_usize_lossy(steps.max(1));
    // ÿ = y · b(ẏ, ẏ) since Γ^k_ij = −y_k b_ij
    let acc = |p: &DVector<T>, q: &DVector<T>| -> DVector<T> {
        let bq = polar_metric(p) * q;
        p * q.dot(&bq)
    };
    let (mut p, mut q) = (y.clone(), v.clone());
    let half = T::lit(0.5);
    let six = T::lit(6.0);
    let two = T::lit(2.0);
    for _ in 0..steps.max(1) {
        let k1p = q.clone();
        let k1q = acc(&p, &q);
        let k2p = &q + &k1q * (h * half);
        let k2q = acc(&(&p + &k1p * (h * half)), &k2p);
        let k3p = &q + &k2q * (h * half);
        let k3q = acc(&(&p + &k2p * (h * half)), &k3p);
        let k4p = &q + &k3q * h;
        let k4q = acc(&(&p + &k3p * h), &k4p);
        p += (k1p + &k2p * two + &k3p * two + k4p) * (h / six);
        q += (k1q + k2q * two + k3q * two + k4q) * (h / six);
    }
    p
}

/// `F^* g` for `F = exp ∘ ζ`, expressed relative to `b`.
#[derive(Clone)]
pub struct Pushforward<M> {
    inner: M,
    spec: DiffeoSpec,
}

/// Chart and dimension compatibility are checked on evaluation.
pub fn pushforward<M>(inner: M, spec: DiffeoSpec) -> Pushforward<M> {
    Pushforward { inner, spec }
}

impl<M> Pushforward<M> {
    pub fn spec(&self) -> &DiffeoSpec {
        &self.spec
    }

    pub fn inner(&self) -> &M {
        &self.inner
    }

    /// Image `F(y)` of a point.
    pub fn map_point<T: Real>(&self, y: &DVector<T>) -> DVector<T> {
        y + exp_displacement(&self.spec, y).0
    }
}

impl<T: Real, M: MetricField<T>> MetricField<T> for Pushforward<M> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn chart(&self) -> Chart {
        Chart::Polar
    }
    fn label(&self) -> String {
        format!("pushforward({}, amplitude={})", self.inner.label(), self.spec.amplitude)
    }
    fn decay(&self) -> Decay<T> {
        let inner = self.inner.decay();
        let rate = T::lit(self.spec.rate());
        let tau = match inner.tau {
            Some(t) => Some(t.min(rate)),
            None if self.spec.amplitude == 0.0 => None,
            None => Some(rate),
        };
        Decay { tau, r0: inner.r0 }
    }
    fn perturbation(&self, y: &DVector<T>) -> Result<DMatrix<T>> {
        if self.inner.chart() != Chart::Polar {
            return Err(Error::ChartMismatch { expected: "POLAR".into(), got: self.inner.chart().to_string() });
        }
        if self.spec.dim() != self.inner.dim() || y.len() != self.inner.dim() {
            return Err(Error::DimensionMismatch { expected: self.inner.dim(), got: self.spec.dim() });
        }
        let (w, dw) = exp_displacement(&self.spec, y);
        let f = y + &w;
        let n = y.len();
        if f.iter().any(|v| !v.is_finite()) || (y[n - 1] >= T::zero() && f[n - 1] < T::zero()) {
            return Err(Error::FlowLeftDomain(format!("{:?}", y.as_slice())));
        }
        let a = T::one() + y.norm_squared();
        let ap = T::one() + f.norm_squared();
        let yw = y.dot(&w);
        // b(y + w) − b(y) without cancellation
        let db = -((y * w.transpose() + &w * y.transpose() + &w * w.transpose()) / ap
            - y * y.transpose() * ((T::lit(2.0) * yw + w.norm_squared()) / (a * ap)));
        let bp = polar_metric(&f);
        let dft = DMatrix::identity(n, n) + &dw;
        let e_in = self.inner.perturbation(&f)?;
        let e = db + dw.transpose() * &bp + &bp * &dw + dw.transpose() * &bp * &dw + dft.transpose() * e_in * &dft;
        Ok((&e + e.transpose()) * T::lit(0.5))
    }
}

/// `ℐ^* g` for an isometry `ℐ` of the model, relative to `b`.
#[derive(Clone)]
pub struct IsometricPullback<M, T: Real> {
    inner: M,
    iso: IsometryElement<T>,
}

pub fn isometric_pullback<T: Real, M: MetricField<T>>(
    inner: M,
    iso: IsometryElement<T>,
) -> Result<IsometricPullback<M, T>> {
    iso.validate()?;
    if inner.chart() != Chart::Polar {
        return Err(Error::ChartMismatch { expected: "POLAR".into(), got: inner.chart().to_string() });
    }
    if iso.dim() != inner.dim() {
        return Err(Error::DimensionMismatch { expected: inner.dim(), got: iso.dim() });
    }
    Ok(IsometricPullback { inner, iso })
}

impl<M, T: Real> IsometricPullback<M, T> {
    pub fn isometry(&self) -> &IsometryElement<T> {
        &self.iso
    }
}

impl<T: Real, M: MetricField<T>> MetricField<T> for IsometricPullback<M, T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn chart(&self) -> Chart {
        Chart::Polar
    }
    fn label(&self) -> String {
        format!("isometric_pullback({})", self.inner.label())
    }
    fn decay(&self) -> Decay<T> {
        self.inner.decay()
    }
    fn perturbation(&self, y: &DVector<T>) -> Result<DMatrix<T>> {
        let j = self.iso.jacobian_polar(y);
        let e = self.inner.perturbation(&self.iso.apply_polar(y))?;
        let e = j.transpose() * e * j;
        Ok((&e + e.transpose()) * T::lit(0.5))
    }
}
