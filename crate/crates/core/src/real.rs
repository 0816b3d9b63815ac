//! Scalar abstraction shared by the double and high-precision paths.
//!
//! All recursions are written once against [`Real`]. `f64` is the double
//! path; [`Hp`] wraps an `astro_float::BigFloat` whose operations run at the
//! larger of the two operand precisions, so a value created at `p` bits
//! keeps every result derived from it at `p` bits.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, RoundingMode, Sign};

const RM: RoundingMode = RoundingMode::ToEven;

pub trait Real:
    Clone
    + fmt::Debug
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Converts `x` exactly (f64 fits in any supported precision).
    fn from_f64(x: f64, bits: usize) -> Self;

    fn to_f64(&self) -> f64;

    fn powi(&self, n: u32) -> Self;

    fn is_zero(&self) -> bool;

    fn abs(&self) -> Self {
        if *self < self.zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Working precision in bits (53 for f64).
    fn bits(&self) -> usize;

    /// A constant at the same precision as `self`.
    fn lift(&self, x: f64) -> Self {
        Self::from_f64(x, self.bits())
    }

    fn zero(&self) -> Self {
        self.lift(0.0)
    }

    fn one(&self) -> Self {
        self.lift(1.0)
    }

    /// Base-2 logarithm of |self| as f64, usable beyond the f64 exponent range.
    fn log2_abs(&self) -> f64;
}

impl Real for f64 {
    fn from_f64(x: f64, _bits: usize) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn powi(&self, n: u32) -> Self {
        f64::powi(*self, n as i32)
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn bits(&self) -> usize {
        53
    }

    fn log2_abs(&self) -> f64 {
        f64::abs(*self).log2()
    }
}

/// Arbitrary-precision binary float.
///
/// The precision is tracked alongside the value because astro-float reports
/// zero precision for an exact zero.
#[derive(Clone)]
pub struct Hp(BigFloat, usize);

impl Hp {
    pub fn new(x: f64, bits: usize) -> Self {
        Hp(BigFloat::from_f64(x, bits), bits)
    }

    pub fn inner(&self) -> &BigFloat {
        &self.0
    }

    fn prec(&self) -> usize {
        self.1
    }

    fn joint(&self, other: &Hp) -> usize {
        self.prec().max(other.prec())
    }

    /// Mantissa as a fraction in [0.5, 1) and binary exponent.
    fn split(&self) -> Option<(f64, i64, bool)> {
        let (words, _, sign, exp, _) = self.0.as_raw_parts()?;
        let hi = *words.last()?;
        if hi == 0 {
            return None;
        }
        let lo = if words.len() >= 2 {
            words[words.len() - 2]
        } else {
            0
        };
        // hi has its top bit set; fold in the next word for correct rounding.
        let frac = (hi as f64 + lo as f64 / 18446744073709551616.0) / 18446744073709551616.0;
        Some((frac, exp as i64, sign == Sign::Neg))
    }
}

impl fmt::Debug for Hp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Hp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl PartialEq for Hp {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Hp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! hp_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Hp {
            type Output = Hp;
            fn $method(self, rhs: Hp) -> Hp {
                let p = self.joint(&rhs);
                Hp(self.0.$method(&rhs.0, p, RM), p)
            }
        }

        impl<'a> $tr<&'a Hp> for &'a Hp {
            type Output = Hp;
            fn $method(self, rhs: &'a Hp) -> Hp {
                let p = self.joint(rhs);
                Hp(self.0.$method(&rhs.0, p, RM), p)
            }
        }
    };
}

hp_binop!(Add, add);
hp_binop!(Sub, sub);
hp_binop!(Mul, mul);
hp_binop!(Div, div);

impl Neg for Hp {
    type Output = Hp;
    fn neg(self) -> Hp {
        Hp(self.0.neg(), self.1)
    }
}

impl Real for Hp {
    fn from_f64(x: f64, bits: usize) -> Self {
        Hp::new(x, bits)
    }

    fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.0.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        let Some((frac, exp, neg)) = self.split() else {
            return 0.0;
        };
        let mag = if exp > 1100 {
            f64::INFINITY
        } else if exp < -1100 {
            0.0
        } else {
            // two steps keep the intermediate power of two representable
            let half = (exp / 2) as i32;
            frac * 2f64.powi(half) * 2f64.powi(exp as i32 - half)
        };
        if neg {
            -mag
        } else {
            mag
        }
    }

    fn powi(&self, n: u32) -> Self {
        // astro-float returns NaN for 0^0
        match n {
            0 => self.one(),
            _ if self.0.is_zero() => self.clone(),
            _ => Hp(self.0.powi(n as usize, self.1, RM), self.1),
        }
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn bits(&self) -> usize {
        self.prec()
    }

    fn log2_abs(&self) -> f64 {
        match self.split() {
            Some((frac, exp, _)) => frac.log2() + exp as f64,
            None => f64::NEG_INFINITY,
        }
    }
}

/// A result in whichever representation produced it.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Double(f64),
    High(Hp),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Double(x) => *x,
            Value::High(x) => x.to_f64(),
        }
    }

    pub fn bits(&self) -> usize {
        match self {
            Value::Double(_) => 53,
            Value::High(x) => x.bits(),
        }
    }
}

impl Value {
    /// |self − other| / |other|, evaluated at the wider of the two precisions.
    pub fn relative_difference(&self, other: &Value) -> f64 {
        let bits = self.bits().max(other.bits());
        let lift = |v: &Value| match v {
            Value::Double(x) => Hp::new(*x, bits),
            Value::High(x) => x.clone(),
        };
        let (a, b) = (lift(self), lift(other));
        if b.is_zero() {
            return if a.is_zero() { 0.0 } else { f64::INFINITY };
        }
        let diff = a - b.clone();
        if diff.is_zero() {
            return 0.0;
        }
        (diff.log2_abs() - b.log2_abs()).exp2()
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

/// Wraps a scalar into a [`Value`].
pub trait IntoValue {
    fn into_value(self) -> Value;
}

impl IntoValue for f64 {
    fn into_value(self) -> Value {
        Value::Double(self)
    }
}

impl IntoValue for Hp {
    fn into_value(self) -> Value {
        Value::High(self)
    }
}
