use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive};
use rand::distr::{Open01, OpenClosed01, StandardUniform};
use rand::Rng;

use crate::Error;

/// Floating-point element type of weight vectors.
///
/// Implemented for `f32` and `f64`; all arithmetic inside a call stays in
/// the chosen precision.
pub trait Real: Float + FromPrimitive + Default + Debug + Display + Send + Sync + 'static {
    const PRECISION: Precision;

    fn lit(x: f64) -> Self;

    fn as_f64(self) -> f64;

    fn from_count(n: usize) -> Self {
        Self::lit(n as f64)
    }

    /// Draw from `[0, 1)`.
    fn uniform<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draw from `(0, 1]`.
    fn uniform_open_closed<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draw from `(0, 1)`.
    fn uniform_open<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

macro_rules! impl_real {
    ($t:ty, $p:expr) => {
        impl Real for $t {
            const PRECISION: Precision = $p;

            #[inline]
            fn lit(x: f64) -> Self {
                x as $t
            }

            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }

            #[inline]
            fn uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.sample(StandardUniform)
            }

            #[inline]
            fn uniform_open_closed<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.sample(OpenClosed01)
            }

            #[inline]
            fn uniform_open<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.sample(Open01)
            }
        }
    };
}

impl_real!(f32, Precision::F32);
impl_real!(f64, Precision::F64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Precision {
    F32,
    F64,
}

impl Precision {
    pub fn as_str(self) -> &'static str {
        match self {
            Precision::F32 => "f32",
            Precision::F64 => "f64",
        }
    }
}

impl Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "f32" | "single" => Ok(Precision::F32),
            "f64" | "double" => Ok(Precision::F64),
            other => Err(Error::Parse(format!("unknown precision `{other}`"))),
        }
    }
}
