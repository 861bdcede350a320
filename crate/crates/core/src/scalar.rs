//! Scalar types the series engine and coefficient pipeline are generic over.
//!
//! Three families implement [`Scalar`]: hardware `f64`, exact
//! [`BigRational`], and the arbitrary-precision [`BigReal`]. Transcendental
//! operations live in [`RealScalar`], which the exact rationals do not
//! implement.
//!
//! `BigReal` values are created at the calling thread's working precision
//! (see [`with_digits`]). Arithmetic between two values keeps the larger of
//! the two precisions.

use std::cell::Cell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Mutex;

use dashu_base::{Approximation, SquareRoot};
use dashu_float::round::mode::HalfEven;
use dashu_float::{DBig, FBig};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Default working precision in significant decimal digits.
pub const DEFAULT_DIGITS: u32 = 50;

const GUARD_BITS: usize = 16;

/// Ring/field operations every series coefficient type must provide.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(n: i64) -> Self;

    fn to_f64(&self) -> f64;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

/// Scalars that approximate the reals and support transcendental functions.
pub trait RealScalar: Scalar {
    fn from_f64(x: f64) -> Self;

    /// Parses a decimal literal such as `-7.28e-2`.
    fn parse_decimal(s: &str) -> Option<Self>;

    fn exp(&self) -> Self;

    fn ln(&self) -> Self;

    fn sqrt(&self) -> Self;

    fn pi() -> Self;

    /// Relative spacing of representable values at the current precision.
    fn epsilon() -> Self;

    /// Number of significant decimal digits the type carries right now.
    fn digits() -> u32;
}

impl Scalar for f64 {
    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

impl RealScalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }

    fn exp(&self) -> Self {
        f64::exp(*self)
    }

    fn ln(&self) -> Self {
        f64::ln(*self)
    }

    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }

    fn pi() -> Self {
        std::f64::consts::PI
    }

    fn epsilon() -> Self {
        f64::EPSILON
    }

    fn digits() -> u32 {
        15
    }
}

impl Scalar for BigRational {
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

thread_local! {
    static WORKING_DIGITS: Cell<u32> = const { Cell::new(DEFAULT_DIGITS) };
}

/// Binary precision used for a given number of significant decimal digits.
pub fn bits_for_digits(digits: u32) -> usize {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as usize + GUARD_BITS
}

/// Working precision of the current thread, in decimal digits.
pub fn working_digits() -> u32 {
    WORKING_DIGITS.with(Cell::get)
}

pub fn set_working_digits(digits: u32) {
    WORKING_DIGITS.with(|d| d.set(digits.max(1)));
}

/// Runs `f` with the thread's working precision set to `digits`, restoring
/// the previous setting afterwards.
pub fn with_digits<R>(digits: u32, f: impl FnOnce() -> R) -> R {
    struct Restore(u32);
    impl Drop for Restore {
        fn drop(&mut self) {
            set_working_digits(self.0);
        }
    }
    let _restore = Restore(working_digits());
    set_working_digits(digits);
    f()
}

fn working_bits() -> usize {
    bits_for_digits(working_digits())
}

type Inner = FBig<HalfEven, 2>;

fn value<T, E>(a: Approximation<T, E>) -> T {
    match a {
        Approximation::Exact(v) | Approximation::Inexact(v, _) => v,
    }
}

/// Arbitrary-precision binary floating point real.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct BigReal(Inner);

impl BigReal {
    fn at_working(x: Inner) -> Self {
        BigReal(value(x.with_precision(working_bits())))
    }

    pub fn precision_bits(&self) -> usize {
        self.0.precision()
    }

    /// Rounds to a new binary precision.
    pub fn with_precision_bits(&self, bits: usize) -> Self {
        BigReal(value(self.0.clone().with_precision(bits)))
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        Self::parse_decimal(&n.to_string()).expect("integer literal")
    }

    pub fn from_rational(q: &BigRational) -> Self {
        Self::from_bigint(q.numer()) / Self::from_bigint(q.denom())
    }

    /// Scientific notation with `sig` significant digits, e.g. `-7.28e-2`.
    pub fn to_scientific(&self, sig: usize) -> String {
        if self.is_zero() {
            return format!("{:.*}e0", sig.saturating_sub(1), 0.0);
        }
        let dec: DBig = value(self.0.to_decimal());
        let rounded = value(dec.with_precision(sig));
        let repr = rounded.repr();
        let mut digits = repr.significand().to_string();
        let negative = digits.starts_with('-');
        if negative {
            digits.remove(0);
        }
        let exp10 = repr.exponent() + digits.len() as isize - 1;
        digits.truncate(sig);
        while digits.len() < sig {
            digits.push('0');
        }
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        out.push_str(&digits[..1]);
        if sig > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        out.push_str(&format!("e{exp10}"));
        out
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_scientific(working_digits() as usize))
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = f.precision().unwrap_or(working_digits() as usize).max(1);
        write!(f, "{}", self.to_scientific(sig))
    }
}

impl FromStr for BigReal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_decimal(s).ok_or_else(|| format!("not a decimal literal: {s:?}"))
    }
}

impl Zero for BigReal {
    fn zero() -> Self {
        Self::at_working(Inner::ZERO)
    }

    fn is_zero(&self) -> bool {
        self.0.repr().is_zero()
    }
}

impl One for BigReal {
    fn one() -> Self {
        Self::at_working(Inner::ONE)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                BigReal($tr::$method(self.0, rhs.0))
            }
        }

        impl<'a> $tr<&'a BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &'a BigReal) -> BigReal {
                BigReal($tr::$method(self.0, &rhs.0))
            }
        }

        impl<'a> $tr<&'a BigReal> for &'a BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &'a BigReal) -> BigReal {
                BigReal($tr::$method(&self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0)
    }
}

impl Scalar for BigReal {
    fn from_i64(n: i64) -> Self {
        Self::at_working(Inner::from(n))
    }

    fn to_f64(&self) -> f64 {
        value(self.0.to_f64())
    }

    fn abs(&self) -> Self {
        if self.0.sign() == dashu_base::Sign::Negative {
            BigReal(-self.0.clone())
        } else {
            self.clone()
        }
    }
}

static PI_CACHE: Mutex<Option<HashMap<usize, Inner>>> = Mutex::new(None);

// Machin: pi = 16 atan(1/5) - 4 atan(1/239)
fn machin_pi() -> BigReal {
    fn atan_inv(m: i64) -> BigReal {
        let eps = BigReal::epsilon();
        let m2 = BigReal::from_i64(m * m);
        let mut power = BigReal::one() / BigReal::from_i64(m);
        let mut sum = power.clone();
        let mut k = 1i64;
        loop {
            power = power / m2.clone();
            let term = power.clone() / BigReal::from_i64(2 * k + 1);
            if term.abs() < eps {
                break;
            }
            if k % 2 == 1 {
                sum = sum - term;
            } else {
                sum = sum + term;
            }
            k += 1;
        }
        sum
    }
    BigReal::from_i64(16) * atan_inv(5) - BigReal::from_i64(4) * atan_inv(239)
}

impl RealScalar for BigReal {
    fn from_f64(x: f64) -> Self {
        Self::at_working(Inner::try_from(x).unwrap_or(Inner::ZERO))
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        let dec = DBig::from_str(s.trim()).ok()?;
        let bin = value(dec.with_base_and_precision::<2>(working_bits()));
        Some(BigReal(bin.with_rounding::<HalfEven>()))
    }

    fn exp(&self) -> Self {
        BigReal(self.0.exp())
    }

    fn ln(&self) -> Self {
        BigReal(self.0.ln())
    }

    fn sqrt(&self) -> Self {
        BigReal(self.0.sqrt())
    }

    fn pi() -> Self {
        let bits = working_bits();
        let mut guard = PI_CACHE.lock().expect("pi cache poisoned");
        let cache = guard.get_or_insert_with(HashMap::new);
        if let Some(v) = cache.get(&bits) {
            return BigReal(v.clone());
        }
        let pi = with_digits(working_digits() + 10, machin_pi).with_precision_bits(bits);
        cache.insert(bits, pi.0.clone());
        pi
    }

    fn epsilon() -> Self {
        let bits = working_bits() as isize;
        BigReal(value(
            Inner::from_parts(1.into(), -bits).with_precision(working_bits()),
        ))
    }

    fn digits() -> u32 {
        working_digits()
    }
}
