use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating point scalar accepted by the geometric kernels: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossless for the literals used in this crate.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("representable literal")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("representable integer")
    }

    /// Machine epsilon used to scale rank and definiteness thresholds.
    fn tiny() -> Self {
        Self::epsilon()
    }
}

impl Real for f32 {}
impl Real for f64 {}
