//! Scalar traits shared by the dense linear algebra layer.

use std::fmt::Debug;
use std::ops::Neg;

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, Num};

/// A real or complex floating-point field element.
pub trait Scalar:
    Copy + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    type Real: RealScalar;

    fn conj(self) -> Self;
    fn modulus(self) -> Self::Real;
    fn norm_sqr(self) -> Self::Real;
    fn re(self) -> Self::Real;
    fn im(self) -> Self::Real;
    fn from_real(r: Self::Real) -> Self;
    fn finite(self) -> bool;
}

/// Real floating-point scalar (f32 or f64).
pub trait RealScalar: Scalar<Real = Self> + Float + FromPrimitive {
    /// Converts an f64 literal.
    fn lit(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("representable constant")
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Scalar for $t {
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
            fn norm_sqr(self) -> Self {
                self * self
            }
            #[inline]
            fn re(self) -> Self {
                self
            }
            #[inline]
            fn im(self) -> Self {
                0.0
            }
            #[inline]
            fn from_real(r: Self) -> Self {
                r
            }
            #[inline]
            fn finite(self) -> bool {
                <$t>::is_finite(self)
            }
        }
        impl RealScalar for $t {}
    };
}

impl_real!(f32);
impl_real!(f64);

impl<R: RealScalar> Scalar for Complex<R> {
    type Real = R;
    #[inline]
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    #[inline]
    fn modulus(self) -> R {
        self.norm()
    }
    #[inline]
    fn norm_sqr(self) -> R {
        Complex::norm_sqr(&self)
    }
    #[inline]
    fn re(self) -> R {
        self.re
    }
    #[inline]
    fn im(self) -> R {
        self.im
    }
    #[inline]
    fn from_real(r: R) -> Self {
        Complex::new(r, R::zero())
    }
    #[inline]
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}
