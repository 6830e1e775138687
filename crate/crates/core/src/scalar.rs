//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::Neg;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Matrix entry: a real scalar or a complex number over one.
pub trait Element: Copy + NumAssign + Neg<Output = Self> + Debug + Send + Sync + 'static {
    type Real: Scalar;

    fn conj(self) -> Self;
    fn modulus(self) -> Self::Real;
    fn modulus_sqr(self) -> Self::Real;
    fn from_real(r: Self::Real) -> Self;
    fn is_finite_entry(self) -> bool;
}

/// Real floating-point scalar (`f32` or `f64`).
pub trait Scalar:
    Element<Real = Self>
    + Float
    + FloatConst
    + FromPrimitive
    + Display
    + FromStr
    + Sum
    + Default
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// `n` as a scalar.
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// A relative tolerance no tighter than a small multiple of machine epsilon.
    ///
    /// Tolerances are stated for `f64`; for `f32` they saturate at `16·eps`.
    #[inline]
    fn tol(x: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(16.0);
        Self::lit(x).max(floor)
    }
}

macro_rules! real_element {
    ($t:ty) => {
        impl Element for $t {
            type Real = $t;
            #[inline]
            fn conj(self) -> Self {
                self
            }
            #[inline]
            fn modulus(self) -> Self {
                self.abs()
            }
            #[inline]
            fn modulus_sqr(self) -> Self {
                self * self
            }
            #[inline]
            fn from_real(r: Self) -> Self {
                r
            }
            #[inline]
            fn is_finite_entry(self) -> bool {
                <$t>::is_finite(self)
            }
        }
        impl Scalar for $t {}
    };
}

real_element!(f32);
real_element!(f64);

impl<T: Scalar> Element for Complex<T> {
    type Real = T;
    #[inline]
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    #[inline]
    fn modulus(self) -> T {
        self.norm()
    }
    #[inline]
    fn modulus_sqr(self) -> T {
        self.norm_sqr()
    }
    #[inline]
    fn from_real(r: T) -> Self {
        Complex::new(r, T::zero())
    }
    #[inline]
    fn is_finite_entry(self) -> bool {
        Float::is_finite(self.re) && Float::is_finite(self.im)
    }
}
