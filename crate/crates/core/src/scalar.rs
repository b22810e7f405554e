use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the model math is generic over: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
    /// Lossy conversion from `f64`; constants in this crate are written as `f64` literals.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `exp(-2 pi i k / q)` with `k` reduced mod `q` first, so large exponents keep full accuracy.
pub(crate) fn root_of_unity<T: Scalar>(k: usize, q: usize) -> Complex<T> {
    let k = k % q;
    // Exact values on the quarter turns keep symmetric tables exactly real.
    if (4 * k) % q == 0 {
        return match 4 * k / q {
            0 => Complex::new(T::one(), T::zero()),
            1 => Complex::new(T::zero(), -T::one()),
            2 => Complex::new(-T::one(), T::zero()),
            _ => Complex::new(T::zero(), T::one()),
        };
    }
    let angle = -T::TAU() * T::from_usize_lossy(k) / T::from_usize_lossy(q);
    Complex::new(angle.cos(), angle.sin())
}

/// `cos(2 pi k / q)`, exact on quarter turns.
pub(crate) fn cos_turn<T: Scalar>(k: usize, q: usize) -> T {
    root_of_unity::<T>(k, q).re
}
