//! Numeric back ends: IEEE doubles and exact big rationals.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Field element used by every matrix routine in the crate.
///
/// `f64` is the default fast path; [`BigRational`] gives exact results for
/// rational weights.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether arithmetic is exact (no tolerances needed).
    const EXACT: bool;

    fn from_rational(r: &BigRational) -> Self;

    fn from_usize(k: usize) -> Self;

    fn to_f64(&self) -> f64;

    /// Exact value, `None` for non-finite doubles.
    fn to_rational(&self) -> Option<BigRational>;

    fn magnitude(&self) -> Self;

    /// Zero test: exact equality for exact types, `|x| <= tol` otherwise.
    fn near_zero(&self, tol: f64) -> bool;

    /// Pivot preference for elimination; `None` marks an unusable (zero) pivot.
    fn pivot_key(&self) -> Option<f64>;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(r: &BigRational) -> Self {
        rational_to_f64(r)
    }

    fn from_usize(k: usize) -> Self {
        k as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Option<BigRational> {
        f64_to_rational(*self)
    }

    fn magnitude(&self) -> Self {
        self.abs()
    }

    fn near_zero(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn pivot_key(&self) -> Option<f64> {
        if *self == 0.0 {
            None
        } else {
            Some(self.abs())
        }
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn from_usize(k: usize) -> Self {
        BigRational::from_integer(BigInt::from(k))
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn magnitude(&self) -> Self {
        self.abs()
    }

    fn near_zero(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn pivot_key(&self) -> Option<f64> {
        // First nonzero pivot wins; any nonzero pivot is exact.
        if self.is_zero() {
            None
        } else {
            Some(1.0)
        }
    }
}

/// Nearest-double conversion that survives numerators and denominators
/// beyond the `f64` range.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(x) = ToPrimitive::to_f64(r) {
        if x.is_finite() {
            return x;
        }
    }
    let numer = r.numer();
    let denom = r.denom();
    let shift = numer.bits() as i64 - denom.bits() as i64;
    // Bring the quotient into [2^-64, 2^64] before converting.
    let scaled = if shift > 64 {
        BigRational::new(numer.clone(), denom.clone() << (shift - 64) as usize)
    } else if shift < -64 {
        BigRational::new(numer.clone() << (-shift - 64) as usize, denom.clone())
    } else {
        r.clone()
    };
    let base = ToPrimitive::to_f64(&scaled).unwrap_or(f64::NAN);
    let exp = if shift > 64 {
        shift - 64
    } else if shift < -64 {
        shift + 64
    } else {
        0
    };
    base * 2f64.powi(exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

/// Exact rational value of a finite double.
pub fn f64_to_rational(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}
