use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar the whole library is generic over.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + 'static {
    /// Converts an `f64` literal, panicking only for types that cannot hold it.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_usize_lossy(k: usize) -> Self {
        Self::from_usize(k).expect("integer not representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::lit(x)
}
