//! Exact algebra of smooth functions on `[0, 1]`.
//!
//! A [`SmoothFunction`] is a finite sum
//!
//! ```text
//! P_0(x) + Σ_{k≥1} [ C_k(x) cos(2πkx) + S_k(x) sin(2πkx) ]
//! ```
//!
//! with complex polynomial amplitudes. Plain polynomials are the `k = 0` part
//! alone. The class is closed under differentiation, integration from the
//! origin and pointwise products, which is all the coefficient recursions need.
//! Harmonics with `k ≥ 1` require a backend that can represent `2π`, so exact
//! rational functions are always polynomials.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Zero};
use thiserror::Error;

use crate::scalar::{magnitude, real, Cx, Scalar};

/// Ceiling on polynomial degree and harmonic index for intermediate results.
pub const MAX_DEGREE: usize = 4096;
pub const MAX_HARMONIC: u32 = 4096;

/// Default cap applied to user supplied potentials.
pub const DEFAULT_INPUT_CAP: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctionError {
    #[error("point {0} lies outside [0, 1]")]
    OutsideDomain(String),
    #[error("representation overflow: {0}")]
    RepresentationOverflow(String),
    #[error("trigonometric terms need a backend that can represent 2π (got {0})")]
    TrigUnsupported(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionKind {
    Polynomial,
    TrigPolynomial,
}

/// Dense complex polynomial, coefficients in ascending order, no trailing zeros.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<T: Scalar> {
    coeffs: Vec<Cx<T>>,
}

impl<T: Scalar> Poly<T> {
    pub fn new(mut coeffs: Vec<Cx<T>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Cx<T>) -> Self {
        Poly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.clone() * real(T::from_int(k as i64))).collect(),
        )
    }

    /// Primitive with zero constant term.
    pub fn antiderivative(&self) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(Cx::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            out.push(c.clone() * real(T::from_ratio(1, k as i64 + 1)));
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &Cx<T>) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let a = self.coeffs.get(k).cloned().unwrap_or_else(Cx::zero);
            let b = other.coeffs.get(k).cloned().unwrap_or_else(Cx::zero);
            out.push(a + b);
        }
        Poly::new(out)
    }

    pub fn neg(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Cx::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }

    /// Horner evaluation together with `Σ |c_k| |x|^k`.
    pub fn eval_with_bound(&self, x: &Cx<T>) -> (Cx<T>, f64) {
        let ax = magnitude(x);
        let mut acc = Cx::zero();
        let mut bound = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
            bound = bound * ax + magnitude(c);
        }
        (acc, bound)
    }

    pub fn eval(&self, x: &Cx<T>) -> Cx<T> {
        self.eval_with_bound(x).0
    }

    fn map_backend<U: Scalar>(&self, f: &impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(|c| Cx::new(f(&c.re), f(&c.im))).collect())
    }
}

#[derive(Clone, PartialEq, Debug)]
struct Harmonic<T: Scalar> {
    cos: Poly<T>,
    sin: Poly<T>,
}

impl<T: Scalar> Harmonic<T> {
    fn is_zero(&self) -> bool {
        self.cos.is_zero() && self.sin.is_zero()
    }
}

/// Element of the polynomial / trigonometric-polynomial function class.
///
/// Values are immutable; every operation returns a fresh function.
#[derive(Clone, PartialEq, Debug)]
pub struct SmoothFunction<T: Scalar> {
    harmonics: BTreeMap<u32, Harmonic<T>>,
}

impl<T: Scalar> Default for SmoothFunction<T> {
    fn default() -> Self {
        Self::zero()
    }
}

fn omega<T: Scalar>(k: u32) -> Cx<T> {
    let two_pi = T::two_pi().expect("harmonic terms only exist on backends with 2π");
    real(two_pi * T::from_int(k as i64))
}

/// Indefinite integral of `c(x) cos ωx + s(x) sin ωx`, returned as the
/// `(cos, sin)` amplitude pair.
fn integrate_harmonic<T: Scalar>(c: &Poly<T>, s: &Poly<T>, w: &Cx<T>) -> (Poly<T>, Poly<T>) {
    let inv = Cx::<T>::one() / w.clone();
    let (mut c, mut s) = (c.clone(), s.clone());
    let mut out_cos = Poly::zero();
    let mut out_sin = Poly::zero();
    while !(c.is_zero() && s.is_zero()) {
        out_cos = out_cos.sub(&s.scale(&inv));
        out_sin = out_sin.add(&c.scale(&inv));
        let next_c = s.derivative().scale(&inv);
        let next_s = c.derivative().scale(&inv).neg();
        c = next_c;
        s = next_s;
    }
    (out_cos, out_sin)
}

impl<T: Scalar> SmoothFunction<T> {
    pub fn zero() -> Self {
        SmoothFunction { harmonics: BTreeMap::new() }
    }

    pub fn constant(c: Cx<T>) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_poly(p: Poly<T>) -> Self {
        let mut f = Self::zero();
        f.put(0, p, Poly::zero());
        f
    }

    /// Polynomial with ascending monomial coefficients.
    pub fn polynomial(coeffs: Vec<Cx<T>>) -> Self {
        Self::from_poly(Poly::new(coeffs))
    }

    /// Polynomial with real coefficients given as `num/den` pairs.
    pub fn from_ratios(coeffs: &[(i64, i64)]) -> Self {
        Self::polynomial(coeffs.iter().map(|&(n, d)| real(T::from_ratio(n, d))).collect())
    }

    /// The identity function `x`.
    pub fn x() -> Self {
        Self::polynomial(vec![Cx::zero(), Cx::one()])
    }

    /// `c0 + Σ a_k cos(2πkx) + Σ b_k sin(2πkx)`.
    pub fn trig(constant: Cx<T>, cos: &[(u32, Cx<T>)], sin: &[(u32, Cx<T>)]) -> Result<Self, FunctionError> {
        let mut f = Self::constant(constant);
        let needs_pi = cos.iter().chain(sin).any(|(k, c)| *k > 0 && !c.is_zero());
        if needs_pi && T::two_pi().is_none() {
            return Err(FunctionError::TrigUnsupported(T::NAME));
        }
        for (k, c) in cos {
            let term = Self::single(*k, Poly::constant(c.clone()), Poly::zero());
            f = &f + &term;
        }
        for (k, c) in sin {
            let term = Self::single(*k, Poly::zero(), Poly::constant(c.clone()));
            f = &f + &term;
        }
        Ok(f)
    }

    fn single(k: u32, cos: Poly<T>, sin: Poly<T>) -> Self {
        let mut f = Self::zero();
        f.put(k, cos, sin);
        f
    }

    fn put(&mut self, k: u32, cos: Poly<T>, sin: Poly<T>) {
        let sin = if k == 0 { Poly::zero() } else { sin };
        let h = Harmonic { cos, sin };
        if h.is_zero() {
            self.harmonics.remove(&k);
        } else {
            self.harmonics.insert(k, h);
        }
    }

    /// Adds `poly · cos(2πkx)` (or `sin`) for a signed harmonic index.
    fn accumulate(&mut self, k: i64, is_sin: bool, poly: Poly<T>) {
        if poly.is_zero() {
            return;
        }
        let (idx, poly) = match (k < 0, is_sin) {
            (true, true) => (k.unsigned_abs() as u32, poly.neg()),
            _ => (k.unsigned_abs() as u32, poly),
        };
        if idx == 0 && is_sin {
            return;
        }
        let (cos, sin) = match self.harmonics.get(&idx) {
            Some(h) => (h.cos.clone(), h.sin.clone()),
            None => (Poly::zero(), Poly::zero()),
        };
        if is_sin {
            self.put(idx, cos, sin.add(&poly));
        } else {
            self.put(idx, cos.add(&poly), sin);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.harmonics.is_empty()
    }

    pub fn kind(&self) -> FunctionKind {
        if self.max_harmonic() == 0 {
            FunctionKind::Polynomial
        } else {
            FunctionKind::TrigPolynomial
        }
    }

    /// Polynomial part (`k = 0` amplitude).
    pub fn polynomial_part(&self) -> Poly<T> {
        self.harmonics.get(&0).map(|h| h.cos.clone()).unwrap_or_else(Poly::zero)
    }

    /// `(k, cos amplitude, sin amplitude)` for every stored harmonic, `k`
    /// ascending. `k = 0` carries the polynomial part.
    pub fn harmonics(&self) -> impl Iterator<Item = (u32, &Poly<T>, &Poly<T>)> {
        self.harmonics.iter().map(|(k, h)| (*k, &h.cos, &h.sin))
    }

    /// Assembles a function from `(k, cos, sin)` amplitude triples.
    pub fn from_harmonics(parts: impl IntoIterator<Item = (u32, Poly<T>, Poly<T>)>) -> Result<Self, FunctionError> {
        let mut f = Self::zero();
        for (k, c, s) in parts {
            if k > 0 && (!c.is_zero() || !s.is_zero()) && T::two_pi().is_none() {
                return Err(FunctionError::TrigUnsupported(T::NAME));
            }
            f.accumulate(k as i64, false, c);
            f.accumulate(k as i64, true, s);
        }
        Ok(f)
    }

    pub fn max_harmonic(&self) -> u32 {
        self.harmonics.keys().next_back().copied().unwrap_or(0)
    }

    /// Largest polynomial degree among all amplitudes.
    pub fn degree(&self) -> usize {
        self.harmonics.values().map(|h| h.cos.degree().max(h.sin.degree())).max().unwrap_or(0)
    }

    pub fn derivative(&self) -> Self {
        let mut out = Self::zero();
        for (&k, h) in &self.harmonics {
            if k == 0 {
                out.accumulate(0, false, h.cos.derivative());
                continue;
            }
            let w = omega::<T>(k);
            // (C cos + S sin)' = (C' + ωS) cos + (S' − ωC) sin
            out.accumulate(k as i64, false, h.cos.derivative().add(&h.sin.scale(&w)));
            out.accumulate(k as i64, true, h.sin.derivative().sub(&h.cos.scale(&w)));
        }
        out
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |f, _| f.derivative())
    }

    /// The primitive `F(x) = ∫₀ˣ f`, so `F(0) = 0`.
    pub fn antiderivative0(&self) -> Self {
        let mut out = Self::zero();
        for (&k, h) in &self.harmonics {
            if k == 0 {
                out.accumulate(0, false, h.cos.antiderivative());
                continue;
            }
            let (c, s) = integrate_harmonic(&h.cos, &h.sin, &omega::<T>(k));
            // value at the origin is C(0)
            let at_zero = c.coeffs().first().cloned().unwrap_or_else(Cx::zero);
            out.accumulate(k as i64, false, c);
            out.accumulate(k as i64, true, s);
            out.accumulate(0, false, Poly::constant(-at_zero));
        }
        out
    }

    /// Pointwise product, using product-to-sum rewriting for harmonics.
    pub fn product(&self, other: &Self) -> Result<Self, FunctionError> {
        let degree = self.degree() + other.degree();
        let harmonic = self.max_harmonic() + other.max_harmonic();
        if degree > MAX_DEGREE || harmonic > MAX_HARMONIC {
            return Err(FunctionError::RepresentationOverflow(format!(
                "product needs degree {degree} / harmonic {harmonic}"
            )));
        }
        let half = real(T::from_ratio(1, 2));
        let mut out = Self::zero();
        for (&k, a) in &self.harmonics {
            for (&l, b) in &other.harmonics {
                let (k, l) = (k as i64, l as i64);
                if k == 0 && l == 0 {
                    out.accumulate(0, false, a.cos.mul(&b.cos));
                    continue;
                }
                // cos·cos = ½[cos(k−l) + cos(k+l)]
                let cc = a.cos.mul(&b.cos).scale(&half);
                out.accumulate(k - l, false, cc.clone());
                out.accumulate(k + l, false, cc);
                // sin·sin = ½[cos(k−l) − cos(k+l)]
                let ss = a.sin.mul(&b.sin).scale(&half);
                out.accumulate(k - l, false, ss.clone());
                out.accumulate(k + l, false, ss.neg());
                // sin_k·cos_l = ½[sin(k+l) + sin(k−l)]
                let sc = a.sin.mul(&b.cos).scale(&half);
                out.accumulate(k + l, true, sc.clone());
                out.accumulate(k - l, true, sc);
                // cos_k·sin_l = ½[sin(k+l) − sin(k−l)]
                let cs = a.cos.mul(&b.sin).scale(&half);
                out.accumulate(k + l, true, cs.clone());
                out.accumulate(k - l, true, cs.neg());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Cx<T>) -> Self {
        let mut out = Self::zero();
        for (&k, h) in &self.harmonics {
            out.put(k, h.cos.scale(c), h.sin.scale(c));
        }
        out
    }

    /// Value at `x ∈ [0, 1]` together with an a-priori magnitude bound of the
    /// summed terms (used for relative zero tests on the float backend).
    pub fn eval_with_bound(&self, x: &T) -> Result<(Cx<T>, f64), FunctionError> {
        let xf = x.to_f64();
        if !(0.0..=1.0).contains(&xf) {
            return Err(FunctionError::OutsideDomain(format!("{x}")));
        }
        let xc = real(x.clone());
        let mut acc = Cx::zero();
        let mut bound = 0.0;
        for (&k, h) in &self.harmonics {
            let (cv, cb) = h.cos.eval_with_bound(&xc);
            if k == 0 {
                acc = acc + cv;
                bound += cb;
                continue;
            }
            let (sv, sb) = h.sin.eval_with_bound(&xc);
            let (c, s) = T::harmonic_at(k, x).expect("harmonic terms only exist on backends with 2π");
            acc = acc + cv * real(c) + sv * real(s);
            bound += cb + sb;
        }
        Ok((acc, bound))
    }

    pub fn eval(&self, x: &T) -> Result<Cx<T>, FunctionError> {
        self.eval_with_bound(x).map(|(v, _)| v)
    }

    /// `∫₀¹ f`.
    pub fn integral01(&self) -> Cx<T> {
        self.antiderivative0().eval(&T::one()).expect("1 lies in the domain")
    }

    pub fn map_backend<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SmoothFunction<U> {
        let mut out = SmoothFunction::zero();
        for (&k, h) in &self.harmonics {
            out.put(k, h.cos.map_backend(&f), h.sin.map_backend(&f));
        }
        out
    }

    pub fn to_f64(&self) -> SmoothFunction<f64> {
        self.map_backend(|v| v.to_f64())
    }
}

impl SmoothFunction<f64> {
    /// Fast complex-free evaluation for hot numeric loops; `x` is not range
    /// checked.
    pub fn eval_unchecked(&self, x: f64) -> num::Complex<f64> {
        let xc = num::Complex::new(x, 0.0);
        let mut acc = num::Complex::new(0.0, 0.0);
        for (&k, h) in &self.harmonics {
            let cv = h.cos.eval(&xc);
            if k == 0 {
                acc += cv;
                continue;
            }
            let (s, c) = (std::f64::consts::TAU * k as f64 * x).sin_cos();
            acc += cv * c + h.sin.eval(&xc) * s;
        }
        acc
    }

    /// `max |f|` sampled on a uniform grid of `n + 1` points.
    pub fn max_abs_sampled(&self, n: usize) -> f64 {
        (0..=n).map(|j| self.eval_unchecked(j as f64 / n as f64).norm()).fold(0.0, f64::max)
    }
}

impl<'a, T: Scalar> Add<&'a SmoothFunction<T>> for &'a SmoothFunction<T> {
    type Output = SmoothFunction<T>;

    fn add(self, rhs: &'a SmoothFunction<T>) -> SmoothFunction<T> {
        let mut out = self.clone();
        for (&k, h) in &rhs.harmonics {
            out.accumulate(k as i64, false, h.cos.clone());
            out.accumulate(k as i64, true, h.sin.clone());
        }
        out
    }
}

impl<'a, T: Scalar> Sub<&'a SmoothFunction<T>> for &'a SmoothFunction<T> {
    type Output = SmoothFunction<T>;

    fn sub(self, rhs: &'a SmoothFunction<T>) -> SmoothFunction<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Neg for &SmoothFunction<T> {
    type Output = SmoothFunction<T>;

    fn neg(self) -> SmoothFunction<T> {
        self.scale(&-Cx::<T>::one())
    }
}

impl<T: Scalar> Mul<&Cx<T>> for &SmoothFunction<T> {
    type Output = SmoothFunction<T>;

    fn mul(self, rhs: &Cx<T>) -> SmoothFunction<T> {
        self.scale(rhs)
    }
}

impl<T: Scalar> fmt::Display for SmoothFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&k, h) in &self.harmonics {
            for (poly, basis) in [(&h.cos, "cos"), (&h.sin, "sin")] {
                for (n, c) in poly.coeffs().iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    if !first {
                        write!(f, " + ")?;
                    }
                    first = false;
                    write!(f, "({})", crate::scalar::render_cx(c))?;
                    match n {
                        0 => {}
                        1 => write!(f, "·x")?,
                        _ => write!(f, "·x^{n}")?,
                    }
                    if k > 0 {
                        write!(f, "·{basis}(2π·{k}x)")?;
                    }
                }
            }
        }
        Ok(())
    }
}
