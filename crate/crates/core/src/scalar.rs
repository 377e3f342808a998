//! Scalar abstraction: all numeric kernels are generic over a floating-point
//! scalar type. `f64` is the instantiation used by the CLI and the type
//! aliases at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating point: f32 or f64.
pub trait Real:
    num_traits::Float + num_traits::FromPrimitive + Sum<Self> + Debug + Display + Send + Sync + 'static
{
    /// Conversion from an `f64` constant. Panics only if the target type
    /// cannot represent ordinary finite constants, which cannot happen for
    /// f32/f64.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 constant")
    }

    /// Lossy view as f64, for diagnostics and reports.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
