//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the simulator and the diagnosis engine are generic over.
///
/// Implemented for `f32` and `f64`. Absolute optical frequencies (~193 THz
/// expressed in GHz) only keep sub-GHz resolution in `f64`, so the shipped
/// tooling uses the `f64` aliases at the crate root.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Converts a count into the scalar type.
    #[inline]
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `10·log10(x)`.
#[inline]
pub fn db<T: Scalar>(x: T) -> T {
    T::lit(10.0) * x.log10()
}

/// Inverse of [`db`].
#[inline]
pub fn undb<T: Scalar>(x: T) -> T {
    T::lit(10.0).powf(x / T::lit(10.0))
}

/// Median of a slice, sorting a private copy. NaN-free input is assumed;
/// `-inf` is allowed and sorts first.
pub fn median<T: Scalar>(values: &[T]) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("median of NaN"));
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        let (a, b) = (v[n / 2 - 1], v[n / 2]);
        if a.is_infinite() || b.is_infinite() {
            a.min(b)
        } else {
            (a + b) / T::lit(2.0)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_roundtrip() {
        for x in [1e-6_f64, 0.5, 1.0, 42.0, 3e9] {
            assert!((undb(db(x)) - x).abs() <= 1e-12 * x);
        }
        assert!((db(2.0_f32) - 3.0103).abs() < 1e-4);
    }

    #[test]
    fn median_odd_even_and_outage() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[f64::NEG_INFINITY, 1.0, 2.0]), Some(1.0));
        assert_eq!(median(&[f64::NEG_INFINITY, 1.0]), Some(f64::NEG_INFINITY));
        assert_eq!(median::<f64>(&[]), None);
    }
}
