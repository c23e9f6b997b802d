//! Scalar backends.
//!
//! Every algebraic routine in the crate is generic over [`Scalar`], which is
//! implemented for exact arbitrary-precision rationals ([`BigRational`]) and for
//! `f64`. Complex values are [`num::Complex`] pairs over the same backend.

use std::fmt;
use std::ops::Neg;

use num::{BigInt, BigRational, Complex, Num, One, ToPrimitive, Zero};

/// Complex number over a scalar backend.
pub type Cx<T> = Complex<T>;

/// Double precision complex number.
pub type C64 = Complex<f64>;

/// Exact rational scalar.
pub type Rational = BigRational;

/// Field operations shared by the exact and floating-point backends.
pub trait Scalar:
    Clone + fmt::Debug + fmt::Display + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// True when arithmetic never rounds.
    const EXACT: bool;
    /// Backend name as used in problem files.
    const NAME: &'static str;

    fn from_int(n: i64) -> Self;

    /// `n / d`; `d` must be non-zero.
    fn from_ratio(n: i64, d: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// `2π`, when the backend can represent it.
    fn two_pi() -> Option<Self>;

    /// `(cos 2πkx, sin 2πkx)`, when the backend can represent it.
    fn harmonic_at(k: u32, x: &Self) -> Option<(Self, Self)>;

    /// Parses `"p/q"`, `"p"` or a decimal literal.
    fn parse_literal(s: &str) -> Option<Self>;
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    const NAME: &'static str = "rational";

    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn two_pi() -> Option<Self> {
        None
    }

    fn harmonic_at(_k: u32, x: &Self) -> Option<(Self, Self)> {
        // Only integer nodes have rational cosines for every harmonic.
        x.is_integer().then(|| (Self::one(), Self::zero()))
    }

    fn parse_literal(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Ok(r) = s.parse::<BigRational>() {
            return Some(r);
        }
        // Terminating decimals are exact rationals too.
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = body.split_once('.')?;
        if frac_part.is_empty() && int_part.is_empty() {
            return None;
        }
        let digits = format!("{int_part}{frac_part}");
        if !digits.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let numer: BigInt = digits.parse().ok()?;
        let denom = num::pow(BigInt::from(10), frac_part.len());
        Some(BigRational::new(numer * BigInt::from(sign), denom))
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const NAME: &'static str = "float";

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn two_pi() -> Option<Self> {
        Some(std::f64::consts::TAU)
    }

    fn harmonic_at(k: u32, x: &Self) -> Option<(Self, Self)> {
        if *x == 0.0 || *x == 1.0 {
            return Some((1.0, 0.0));
        }
        let (s, c) = (std::f64::consts::TAU * k as f64 * x).sin_cos();
        Some((c, s))
    }

    fn parse_literal(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let r = BigRational::new(n.trim().parse().ok()?, d.trim().parse().ok()?);
            return Some(Scalar::to_f64(&r));
        }
        s.parse().ok()
    }
}

pub fn real<T: Scalar>(re: T) -> Cx<T> {
    Complex::new(re, T::zero())
}

pub fn cx_int<T: Scalar>(n: i64) -> Cx<T> {
    real(T::from_int(n))
}

pub fn cx_ratio<T: Scalar>(n: i64, d: i64) -> Cx<T> {
    real(T::from_ratio(n, d))
}

pub fn magnitude<T: Scalar>(z: &Cx<T>) -> f64 {
    z.re.to_f64().hypot(z.im.to_f64())
}

pub fn to_c64<T: Scalar>(z: &Cx<T>) -> C64 {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

/// `(-1)^n` as a complex scalar.
pub fn sign_power<T: Scalar>(n: usize) -> Cx<T> {
    if n.is_multiple_of(2) {
        Cx::one()
    } else {
        -Cx::<T>::one()
    }
}

/// Zero test used by every classification decision.
///
/// Exact backends compare with zero. The float backend accepts
/// `|z| <= tol * (1 + scale)`, where `scale` bounds the magnitude of the
/// terms that were summed to produce `z`.
pub fn negligible<T: Scalar>(z: &Cx<T>, scale: f64, tol: f64) -> bool {
    if T::EXACT {
        z.is_zero()
    } else {
        magnitude(z) <= tol * (1.0 + scale)
    }
}

/// Canonical text of a scalar: `"p/q"` (or `"p"`) for rationals, shortest
/// round-trip decimal for floats.
pub fn render<T: Scalar>(v: &T) -> String {
    format!("{v}")
}

/// Renders a complex value as `a`, `a+bi` or `a-bi`.
pub fn render_cx<T: Scalar>(z: &Cx<T>) -> String {
    if z.im.is_zero() {
        return render(&z.re);
    }
    let im = render(&z.im);
    if let Some(stripped) = im.strip_prefix('-') {
        format!("{}-{}i", render(&z.re), stripped)
    } else {
        format!("{}+{}i", render(&z.re), im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_literals() {
        assert_eq!(Rational::parse_literal("3/4"), Some(Rational::from_ratio(3, 4)));
        assert_eq!(Rational::parse_literal("-2"), Some(Rational::from_int(-2)));
        assert_eq!(Rational::parse_literal("0.125"), Some(Rational::from_ratio(1, 8)));
        assert_eq!(Rational::parse_literal("-1.5"), Some(Rational::from_ratio(-3, 2)));
        assert_eq!(Rational::parse_literal("abc"), None);
        assert_eq!(Rational::parse_literal("1e-3"), None);
    }

    #[test]
    fn float_literals() {
        assert_eq!(f64::parse_literal("1/4"), Some(0.25));
        assert_eq!(f64::parse_literal("1e-3"), Some(1e-3));
    }

    #[test]
    fn negligible_is_exact_for_rationals() {
        let tiny = cx_ratio::<Rational>(1, 1_000_000_000_000);
        assert!(!negligible(&tiny, 0.0, 1e-3));
        assert!(negligible(&Cx::<Rational>::zero(), 0.0, 0.0));
        assert!(negligible(&Complex::new(1e-12, 0.0), 0.0, 1e-10));
        assert!(negligible(&Complex::new(1e-6, 0.0), 1e6, 1e-10));
        assert!(!negligible(&Complex::new(1e-6, 0.0), 1.0, 1e-10));
    }

    #[test]
    fn complex_rendering() {
        let z = Complex::new(Rational::from_ratio(1, 2), Rational::from_int(-3));
        assert_eq!(render_cx(&z), "1/2-3i");
        assert_eq!(render_cx(&cx_int::<Rational>(4)), "4");
    }
}
