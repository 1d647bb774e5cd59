use std::fmt;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CausalClass {
    TimelikeFuture,
    TimelikePast,
    NullFuture,
    NullPast,
    Spacelike,
    Zero,
}

impl fmt::Display for CausalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CausalClass::TimelikeFuture => "TIMELIKE_FUTURE",
            CausalClass::TimelikePast => "TIMELIKE_PAST",
            CausalClass::NullFuture => "NULL_FUTURE",
            CausalClass::NullPast => "NULL_PAST",
            CausalClass::Spacelike => "SPACELIKE",
            CausalClass::Zero => "ZERO",
        };
        f.write_str(s)
    }
}

/// Coefficients of an element of the static potential space, with the
/// Lorentzian product that makes `{V_(a)}` orthonormal and `V_(0)` future.
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzVector<T: Real> {
    pub z: DVector<T>,
}

impl<T: Real> LorentzVector<T> {
    pub fn new(z: DVector<T>) -> Self {
        Self { z }
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn norm_squared(&self) -> T {
        lorentz_form(&self.z, &self.z)
    }

    /// Classification with noise scale `scale` (an error estimate on the
    /// components). A vector is ZERO when its Euclidean size is below
    /// `max(1e−9, scale)`; NULL when `|⟨⟨z,z⟩⟩|` is below
    /// `max(1e−6 |z|², 2 |z| scale)`.
    pub fn classify(&self, scale: T) -> CausalClass {
        let size = self.z.norm();
        let floor = lit::<T>(1e-9).max(scale);
        if size <= floor {
            return CausalClass::Zero;
        }
        let q = self.norm_squared();
        let band = (lit::<T>(1e-6) * size * size).max(lit::<T>(2.0) * size * scale);
        let future = self.z[0] > T::zero();
        if q.abs() <= band {
            if future {
                CausalClass::NullFuture
            } else {
                CausalClass::NullPast
            }
        } else if q > T::zero() {
            if future {
                CausalClass::TimelikeFuture
            } else {
                CausalClass::TimelikePast
            }
        } else {
            CausalClass::Spacelike
        }
    }
}

fn lorentz_form<T: Real>(z: &DVector<T>, w: &DVector<T>) -> T {
    let mut s = z[0] * w[0];
    for i in 1..z.len() {
        s -= z[i] * w[i];
    }
    s
}

/// `⟨⟨z, w⟩⟩ = z_0 w_0 − Σ_{i≥1} z_i w_i`.
pub fn lorentz_product<T: Real>(z: &LorentzVector<T>, w: &LorentzVector<T>) -> Result<T> {
    if z.dim() != w.dim() {
        return Err(Error::DimensionMismatch { expected: z.dim(), got: w.dim() });
    }
    if z.dim() == 0 {
        return Err(Error::Invalid("empty Lorentz vector".into()));
    }
    Ok(lorentz_form(&z.z, &w.z))
}
