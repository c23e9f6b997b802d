//! Independent oracles shared by the integration tests.
//!
//! None of these reuse the recursions under test: the residual is obtained by
//! substituting the truncated series into the differential equation, and the
//! determinant coefficients by multiplying out `det[U_r(y_j)]` as Laurent
//! polynomials in λ.

#![allow(dead_code)]

use num::Zero;
use proptest::prelude::*;
use specreg_core::asymptotics::{branch_sign, GTable};
use specreg_core::scalar::{cx_int, Cx, Rational, Scalar};
use specreg_core::{BoundaryData, SmoothFunction};

pub type Q = SmoothFunction<Rational>;
pub type Bc = BoundaryData<Rational>;

/// Coefficients `r_s` of `λ^{1−s}` in `e^{−σλx}(y'' + q y − λ² y)` for
/// `y = e^{σλx} Σ_{s≤m} λ^{−s} g_{i0}^{(s)}`, `s = 0..=m`:
/// `r_s = 2σ g_s' + g_{s−1}'' + q g_{s−1}`.
pub fn residual_coefficients(g: &GTable<Rational>, q: &Q, i: usize) -> Vec<Q> {
    let sigma = cx_int::<Rational>(branch_sign(i));
    let two_sigma = sigma.clone() + sigma;
    (0..=g.order())
        .map(|s| {
            let mut r = &g.get(i, 0, s).derivative() * &two_sigma;
            if s > 0 {
                let prev = g.get(i, 0, s - 1);
                r = &r + &prev.nth_derivative(2);
                r = &r + &q.product(prev).unwrap();
            }
            r
        })
        .collect()
}

/// `g_{i1}^{(s)} − σ g_{i0}^{(s)} − (g_{i0}^{(s−1)})'`, which vanishes when the
/// ν = 1 column is the λ-normalized derivative of the ν = 0 column.
pub fn derivative_mismatch(g: &GTable<Rational>, i: usize) -> Vec<Q> {
    let sigma = cx_int::<Rational>(branch_sign(i));
    (0..=g.order())
        .map(|s| {
            let mut d = g.get(i, 1, s) - &(g.get(i, 0, s) * &sigma);
            if s > 0 {
                d = &d - &g.get(i, 0, s - 1).derivative();
            }
            d
        })
        .collect()
}

/// Laurent polynomial in λ: entry `k` is the coefficient of `λ^{1−k}`.
type Laurent = Vec<Cx<Rational>>;

fn laurent_mul(a: &Laurent, b: &Laurent) -> Laurent {
    // λ^{1−k}·λ^{1−l} = λ^{1−(k+l−1)}; index k + l − 1 (k + l = 0 would be λ², absent here)
    let mut out = vec![Cx::zero(); a.len() + b.len()];
    for (k, x) in a.iter().enumerate() {
        for (l, y) in b.iter().enumerate() {
            if x.is_zero() || y.is_zero() {
                continue;
            }
            assert!(k + l >= 1, "λ² terms cannot occur with two boundary forms of order ≤ 1");
            out[k + l - 1] = out[k + l - 1].clone() + x.clone() * y.clone();
        }
    }
    out
}

fn laurent_sub(a: &Laurent, b: &Laurent) -> Laurent {
    let n = a.len().max(b.len());
    (0..n).map(|k| a.get(k).cloned().unwrap_or_else(Cx::zero) - b.get(k).cloned().unwrap_or_else(Cx::zero)).collect()
}

/// The x = `end` part of `U_r(y_j)` without its exponential factor.
fn form_part(bc: &Bc, g: &GTable<Rational>, r: usize, j: usize, end: usize) -> Laurent {
    let [a1, a0, b1, b0] = bc.form(r);
    let (d, v) = if end == 0 { (a1, a0) } else { (b1, b0) };
    let x = Rational::from_int(end as i64);
    let m = g.order();
    let mut out = vec![Cx::zero(); m + 2];
    for s in 0..=m {
        let g1 = g.get(j, 1, s).eval(&x).unwrap();
        let g0 = g.get(j, 0, s).eval(&x).unwrap();
        out[s] = out[s].clone() + d.clone() * g1;
        out[s + 1] = out[s + 1].clone() + v.clone() * g0;
    }
    out
}

/// `δ_k^{(1−i)}`, `k = −1, 0, 1` (rows), `i = 0..=m`, from the Laurent expansion
/// of `det[U_r(y_j)]`.
pub fn laurent_delta(bc: &Bc, g: &GTable<Rational>) -> [Vec<Cx<Rational>>; 3] {
    let a = |r, j| form_part(bc, g, r, j, 0);
    let b = |r, j| form_part(bc, g, r, j, 1);
    let minus = laurent_sub(&laurent_mul(&b(1, 1), &a(2, 2)), &laurent_mul(&a(1, 2), &b(2, 1)));
    let zero = laurent_sub(
        &laurent_sub(
            &{
                let x = laurent_mul(&a(1, 1), &a(2, 2));
                let y = laurent_mul(&b(1, 1), &b(2, 2));
                laurent_sub(&x, &y.iter().map(|c| -c.clone()).collect())
            },
            &laurent_mul(&a(1, 2), &a(2, 1)),
        ),
        &laurent_mul(&b(1, 2), &b(2, 1)),
    );
    let plus = laurent_sub(&laurent_mul(&a(1, 1), &b(2, 2)), &laurent_mul(&b(1, 2), &a(2, 1)));
    let m = g.order();
    let cut = |v: Laurent| v.into_iter().chain(std::iter::repeat(Cx::zero())).take(m + 1).collect();
    [cut(minus), cut(zero), cut(plus)]
}

/// `q^{(k)}(0) − (−1)^k q^{(k)}(1)`.
pub fn endpoint_asymmetry(q: &Q, k: usize) -> Cx<Rational> {
    let d = q.nth_derivative(k);
    let v0 = d.eval(&Rational::from_int(0)).unwrap();
    let v1 = d.eval(&Rational::from_int(1)).unwrap();
    if k.is_multiple_of(2) {
        v0 - v1
    } else {
        v0 + v1
    }
}

pub fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rational::from_ratio(n, d))
}

pub fn complex() -> impl Strategy<Value = Cx<Rational>> {
    (rational(), rational(), 0..3u8).prop_map(|(re, im, real_only)| {
        if real_only > 0 {
            Cx::new(re, Rational::from_int(0))
        } else {
            Cx::new(re, im)
        }
    })
}

pub fn nonzero_complex() -> impl Strategy<Value = Cx<Rational>> {
    complex().prop_filter("non-zero", |c| !c.is_zero())
}

pub fn polynomial(max_degree: usize) -> impl Strategy<Value = Q> {
    prop::collection::vec(complex(), 1..=max_degree + 1).prop_map(SmoothFunction::polynomial)
}

pub fn real_polynomial(max_degree: usize) -> impl Strategy<Value = Q> {
    prop::collection::vec(rational(), 1..=max_degree + 1)
        .prop_map(|c| SmoothFunction::polynomial(c.into_iter().map(|r| Cx::new(r, Rational::from_int(0))).collect()))
}

/// Reduced boundary data with `|a11| + |b11| > 0` and `|a20| + |b20| > 0`.
pub fn boundary() -> impl Strategy<Value = Bc> {
    prop::array::uniform6(complex())
        .prop_map(|[a11, a10, b11, b10, a20, b20]| BoundaryData::reduced(a11, a10, b11, b10, a20, b20))
        .prop_filter("normal form", |bc| bc.check_normal_form().is_ok())
}

/// Reduced data with `a11·b20 + b11·a20 = 0`, `a10·b20 − b10·a20 = 0`, `a20·b11 ≠ 0`.
pub fn second_order_boundary() -> impl Strategy<Value = Bc> {
    (nonzero_complex(), nonzero_complex(), nonzero_complex(), complex()).prop_map(|(a11, b11, a20, a10)| {
        let b20 = -(b11.clone() * a20.clone()) / a11.clone();
        let b10 = a10.clone() * b20.clone() / a20.clone();
        BoundaryData::reduced(a11, a10, b11, b10, a20, b20)
    })
}
