//! Scalar abstraction for the Gaussian engine.
//!
//! Everything in [`crate::gaussian`] is generic over [`Real`], implemented for
//! `f64` and for the double-double type [`Dd`]. Protocol-level evaluations run
//! in `Dd`: trusted-noise ancillas coupled at `T -> 1` carry variances of order
//! `1/(1-T)`, and rounding their entries to `f64` alone perturbs symplectic
//! eigenvalues near 1 by ~1e-7, which is visible in entropies at the 1e-6 bit
//! level.

use std::cmp::Ordering;
use std::fmt;
use std::num::FpCategory;
use std::ops::{
    Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign,
};

use num_traits::{Float, FloatConst, Num, NumCast, One, ToPrimitive, Zero};
use twofloat::TwoFloat;

pub trait Real:
    Float
    + FloatConst
    + nalgebra::Scalar
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + fmt::Debug
    + Send
    + Sync
    + 'static
{
    fn lit(x: f64) -> Self;
    fn as_f64(self) -> f64;
    /// Relative rounding error a long chain of arithmetic can be trusted to.
    fn unit_roundoff() -> Self;
    fn to_dd(self) -> Dd;
    fn from_dd(x: Dd) -> Self;
}

impl Real for f64 {
    #[inline]
    fn lit(x: f64) -> Self {
        x
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
    #[inline]
    fn unit_roundoff() -> Self {
        f64::EPSILON
    }
    #[inline]
    fn to_dd(self) -> Dd {
        Dd::new(self)
    }
    #[inline]
    fn from_dd(x: Dd) -> Self {
        x.as_f64()
    }
}

impl Real for Dd {
    #[inline]
    fn lit(x: f64) -> Self {
        Dd::new(x)
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self.0.hi() + self.0.lo()
    }
    #[inline]
    fn unit_roundoff() -> Self {
        Dd::new(1e-30)
    }
    #[inline]
    fn to_dd(self) -> Dd {
        self
    }
    #[inline]
    fn from_dd(x: Dd) -> Self {
        x
    }
}

/// Double-double scalar (~106-bit mantissa).
///
/// A thin wrapper over [`TwoFloat`] that keeps its addition, multiplication
/// and square root but replaces division: the wrapped type forms the
/// reciprocal residual `1 - b * (1/b)` without a fused multiply-add, which
/// cancels to zero and leaves quotients accurate to `f64` only. Here the
/// quotient is refined by two residual corrections computed in double-double.
#[derive(Clone, Copy, Default)]
pub struct Dd(TwoFloat);

impl Dd {
    pub const fn new(x: f64) -> Self {
        Dd(TwoFloat::from_f64(x))
    }

    pub fn hi(self) -> f64 {
        self.0.hi()
    }

    pub fn lo(self) -> f64 {
        self.0.lo()
    }

    fn quotient(a: TwoFloat, b: TwoFloat) -> TwoFloat {
        let bh = b.hi();
        if bh == 0.0 || !bh.is_finite() || !a.hi().is_finite() {
            return TwoFloat::from_f64(a.hi() / bh);
        }
        let q1 = a.hi() / bh;
        let r = a - b * q1;
        let q2 = r.hi() / bh;
        let r = r - b * q2;
        let q3 = r.hi() / bh;
        TwoFloat::new_add(q1, q2) + q3
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.0.hi(), self.0.lo())
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.as_f64(), f)
    }
}

impl PartialEq for Dd {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! binary_op {
    ($tr:ident, $f:ident, $atr:ident, $af:ident, $op:tt) => {
        impl $tr for Dd {
            type Output = Dd;
            #[inline]
            fn $f(self, rhs: Dd) -> Dd {
                Dd(self.0 $op rhs.0)
            }
        }
        impl $atr for Dd {
            #[inline]
            fn $af(&mut self, rhs: Dd) {
                *self = *self $op rhs;
            }
        }
    };
}

binary_op!(Add, add, AddAssign, add_assign, +);
binary_op!(Sub, sub, SubAssign, sub_assign, -);
binary_op!(Mul, mul, MulAssign, mul_assign, *);

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, rhs: Dd) -> Dd {
        Dd(Dd::quotient(self.0, rhs.0))
    }
}

impl DivAssign for Dd {
    #[inline]
    fn div_assign(&mut self, rhs: Dd) {
        *self = *self / rhs;
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, rhs: Dd) -> Dd {
        self - (self / rhs).trunc() * rhs
    }
}

impl RemAssign for Dd {
    fn rem_assign(&mut self, rhs: Dd) {
        *self = *self % rhs;
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd(-self.0)
    }
}

impl Zero for Dd {
    fn zero() -> Self {
        Dd::new(0.0)
    }
    fn is_zero(&self) -> bool {
        self.0.hi() == 0.0 && self.0.lo() == 0.0
    }
}

impl One for Dd {
    fn one() -> Self {
        Dd::new(1.0)
    }
}

impl Num for Dd {
    type FromStrRadixErr = <TwoFloat as Num>::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        TwoFloat::from_str_radix(s, radix).map(Dd)
    }
}

impl ToPrimitive for Dd {
    fn to_i64(&self) -> Option<i64> {
        self.0.to_i64()
    }
    fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.as_f64())
    }
}

impl NumCast for Dd {
    fn from<T: ToPrimitive>(n: T) -> Option<Self> {
        <TwoFloat as NumCast>::from(n).map(Dd)
    }
}

macro_rules! delegate_unary {
    ($($f:ident),*) => {
        $(
            #[inline]
            fn $f(self) -> Self {
                Dd(Float::$f(self.0))
            }
        )*
    };
}

macro_rules! delegate_const {
    ($($f:ident),*) => {
        $(
            #[inline]
            fn $f() -> Self {
                Dd(<TwoFloat as Float>::$f())
            }
        )*
    };
}

macro_rules! delegate_pred {
    ($($f:ident),*) => {
        $(
            #[inline]
            fn $f(self) -> bool {
                Float::$f(self.0)
            }
        )*
    };
}

impl Float for Dd {
    delegate_const!(
        nan,
        infinity,
        neg_infinity,
        neg_zero,
        min_value,
        min_positive_value,
        max_value
    );
    delegate_pred!(
        is_nan,
        is_infinite,
        is_finite,
        is_normal,
        is_sign_positive,
        is_sign_negative
    );
    delegate_unary!(
        floor, ceil, round, trunc, fract, abs, signum, sqrt, exp, exp2, ln, log2, log10, cbrt, sin,
        cos, tan, asin, acos, atan, exp_m1, ln_1p, sinh, cosh, tanh, asinh, acosh, atanh
    );

    fn epsilon() -> Self {
        Self::unit_roundoff()
    }
    fn classify(self) -> FpCategory {
        Float::classify(self.0)
    }
    fn mul_add(self, a: Self, b: Self) -> Self {
        self * a + b
    }
    fn recip(self) -> Self {
        Self::one() / self
    }
    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { self.recip() } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }
    fn powf(self, n: Self) -> Self {
        Dd(Float::powf(self.0, n.0))
    }
    fn log(self, base: Self) -> Self {
        self.ln() / base.ln()
    }
    fn max(self, other: Self) -> Self {
        if self >= other || other.is_nan() {
            self
        } else {
            other
        }
    }
    fn min(self, other: Self) -> Self {
        if self <= other || other.is_nan() {
            self
        } else {
            other
        }
    }
    fn abs_sub(self, other: Self) -> Self {
        if self > other {
            self - other
        } else {
            Self::zero()
        }
    }
    fn hypot(self, other: Self) -> Self {
        (self * self + other * other).sqrt()
    }
    fn atan2(self, other: Self) -> Self {
        Dd(Float::atan2(self.0, other.0))
    }
    fn sin_cos(self) -> (Self, Self) {
        (self.sin(), self.cos())
    }
    fn integer_decode(self) -> (u64, i16, i8) {
        Float::integer_decode(self.0)
    }
}

impl FloatConst for Dd {
    fn E() -> Self {
        Dd(TwoFloat::E())
    }
    fn FRAC_1_PI() -> Self {
        Dd(TwoFloat::FRAC_1_PI())
    }
    fn FRAC_1_SQRT_2() -> Self {
        Dd(TwoFloat::FRAC_1_SQRT_2())
    }
    fn FRAC_2_PI() -> Self {
        Dd(TwoFloat::FRAC_2_PI())
    }
    fn FRAC_2_SQRT_PI() -> Self {
        Dd(TwoFloat::FRAC_2_SQRT_PI())
    }
    fn FRAC_PI_2() -> Self {
        Dd(TwoFloat::FRAC_PI_2())
    }
    fn FRAC_PI_3() -> Self {
        Dd(TwoFloat::FRAC_PI_3())
    }
    fn FRAC_PI_4() -> Self {
        Dd(TwoFloat::FRAC_PI_4())
    }
    fn FRAC_PI_6() -> Self {
        Dd(TwoFloat::FRAC_PI_6())
    }
    fn FRAC_PI_8() -> Self {
        Dd(TwoFloat::FRAC_PI_8())
    }
    fn LN_10() -> Self {
        Dd(TwoFloat::LN_10())
    }
    fn LN_2() -> Self {
        Dd(TwoFloat::LN_2())
    }
    fn LOG10_E() -> Self {
        Dd(TwoFloat::LOG10_E())
    }
    fn LOG2_E() -> Self {
        Dd(TwoFloat::LOG2_E())
    }
    fn PI() -> Self {
        Dd(TwoFloat::PI())
    }
    fn SQRT_2() -> Self {
        Dd(TwoFloat::SQRT_2())
    }
}
