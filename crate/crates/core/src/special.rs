//! Complementary error function and its inverse, generic over [`Scalar`].

use crate::num::Scalar;

const MAX_TERMS: usize = 500;

fn frac_1_sqrt_pi<T: Scalar>() -> T {
    T::FRAC_2_SQRT_PI() / T::lit(2.0)
}

/// Complementary error function `erfc(x) = 1 − erf(x)`.
///
/// Uses the all-positive power series of `erf` below `x = 2` and a modified
/// Lentz evaluation of the Laplace continued fraction above it.
pub fn erfc<T: Scalar>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    let two = T::lit(2.0);
    if x < T::zero() {
        return two - erfc(-x);
    }
    if x < two {
        T::one() - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

/// Error function.
pub fn erf<T: Scalar>(x: T) -> T {
    if x.abs() < T::lit(2.0) {
        if x < T::zero() {
            -erf_series(-x)
        } else {
            erf_series(x)
        }
    } else {
        T::one() - erfc(x)
    }
}

// erf(x) = 2/√π · e^{-x²} · Σ 2ⁿ x^{2n+1} / (2n+1)!!
fn erf_series<T: Scalar>(x: T) -> T {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..MAX_TERMS {
        term = term * T::lit(2.0) * x2 / T::count(2 * n + 1);
        sum = sum + term;
        if term <= sum * T::epsilon() {
            break;
        }
    }
    T::lit(2.0) * frac_1_sqrt_pi::<T>() * (-x2).exp() * sum
}

// erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
fn erfc_continued_fraction<T: Scalar>(x: T) -> T {
    let tiny = T::min_positive_value().sqrt();
    let mut f = x;
    let mut c = x;
    let mut d = T::zero();
    for k in 1..MAX_TERMS {
        let a = T::count(k) / T::lit(2.0);
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let delta = c * d;
        f = f * delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    (-x * x).exp() * frac_1_sqrt_pi::<T>() / f
}

/// Inverse complementary error function on `(0, 2)`.
///
/// Safeguarded Newton iteration on `ln erfc`, falling back to bisection
/// whenever a step leaves the current bracket. Returns `±inf` at the
/// endpoints and NaN outside the domain.
pub fn erfc_inv<T: Scalar>(y: T) -> T {
    let two = T::lit(2.0);
    if y.is_nan() || y < T::zero() || y > two {
        return T::nan();
    }
    if y == T::zero() {
        return T::infinity();
    }
    if y == two {
        return T::neg_infinity();
    }
    if y > T::one() {
        return -erfc_inv(two - y);
    }
    if y == T::one() {
        return T::zero();
    }
    // erfc is decreasing; bracket the root in [lo, hi]
    let mut lo = T::zero();
    let mut hi = T::lit(1.0);
    while erfc(hi) > y {
        lo = hi;
        hi = hi * two;
        if hi > T::lit(1e3) {
            return T::infinity();
        }
    }
    let target = y.ln();
    let mut x = (lo + hi) / two;
    for _ in 0..200 {
        let e = erfc(x);
        if e > y {
            lo = x;
        } else {
            hi = x;
        }
        let g = e.ln() - target;
        let dg = -two * frac_1_sqrt_pi::<T>() * (-x * x).exp() / e;
        let mut next = x - g / dg;
        if !next.is_finite() || next <= lo || next >= hi {
            next = (lo + hi) / two;
        }
        if (next - x).abs() <= T::epsilon() * T::lit(4.0) * next.abs().max(T::one()) {
            return next;
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    // reference values from Abramowitz & Stegun table 7.1 and mpmath
    #[test]
    fn erfc_known_values() {
        let cases = [
            (0.0, 1.0),
            (0.5, 0.479_500_122_186_953_5),
            (1.0, 0.157_299_207_050_285_13),
            (1.999, 0.004_698_443_348_629_488),
            (2.0, 0.004_677_734_981_047_266),
            (3.0, 2.209_049_699_858_544e-5),
            (5.0, 1.537_459_794_428_034_8e-12),
            (-1.0, 1.842_700_792_949_715),
        ];
        for (x, want) in cases {
            let got: f64 = erfc(x);
            assert!(
                ((got - want) / want).abs() < 1e-13,
                "erfc({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn erfc_single_precision() {
        let got: f32 = erfc(1.0_f32);
        assert!((got - 0.157_299_2).abs() < 1e-6);
    }

    #[test]
    fn erfc_inv_endpoints() {
        assert_eq!(erfc_inv(1.0_f64), 0.0);
        assert!(erfc_inv(0.0_f64).is_infinite());
        assert!(erfc_inv(2.0_f64).is_infinite() && erfc_inv(2.0_f64) < 0.0);
        assert!(erfc_inv(-0.1_f64).is_nan());
    }

    #[test]
    fn erfc_inv_inverts() {
        for &y in &[1e-300, 1e-30, 1e-9, 0.004, 0.046, 0.3, 0.99, 1.2, 1.999] {
            let x: f64 = erfc_inv(y);
            assert!(((erfc(x) - y) / y).abs() < 1e-12, "y={y}");
        }
    }
}
