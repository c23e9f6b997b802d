//! Characteristic determinant of the two-point problem.
//!
//! With the fundamental system normalized by a [`GTable`], the determinant
//! `Δ(λ) = det[U_r(y_j)]` splits as `δ_{−1}(λ) e^{−λ} + δ_0(λ) + δ_1(λ) e^{λ}`,
//! where each `δ_k(λ) = Σ_{i=0}^{m} λ^{1−i} δ_k^{(1−i)} + O(λ^{−m})`. The
//! constants `δ_k^{(1−i)}` are exact sums of products of endpoint values of the
//! `g` functions; this module computes them and provides closed forms for the
//! low orders as independent checks.

use std::fmt;

use num::Zero;
use thiserror::Error;

use crate::asymptotics::{GTable, Normalization};
use crate::funspace::{FunctionError, SmoothFunction};
use crate::scalar::{cx_int, cx_ratio, magnitude, negligible, real, render_cx, sign_power, to_c64, Cx, Scalar, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeterminantError {
    #[error("boundary forms are not in reduced form: U₂ must not contain y'(0) or y'(1)")]
    NotReduced,
    #[error("normal-form gate violated: {0}")]
    NormalForm(&'static str),
    #[error("precondition failed: {0}")]
    Precondition(Condition),
    #[error("order {requested} exceeds the coefficient table order {available}")]
    OrderTooHigh { requested: usize, available: usize },
    #[error(transparent)]
    Function(#[from] FunctionError),
}

/// Named side conditions of the reduced closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `α₁₁β₂₀ + β₁₁α₂₀ = 0`
    LeadingSumVanishes,
    /// `α₁₀β₂₀ − β₁₀α₂₀ = 0`
    CrossTermVanishes,
    /// `α₂₀β₁₁ ≠ 0`
    CauchyProductNonzero,
    /// the reduced sum is only defined for `i ≥ 2`
    OrderAtLeastTwo,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::LeadingSumVanishes => "a11·b20 + b11·a20 = 0",
            Condition::CrossTermVanishes => "a10·b20 − b10·a20 = 0",
            Condition::CauchyProductNonzero => "a20·b11 ≠ 0",
            Condition::OrderAtLeastTwo => "i ≥ 2",
        };
        f.write_str(s)
    }
}

/// Coefficients of the boundary forms
///
/// ```text
/// U₁(y) = a11 y'(0) + a10 y(0) + b11 y'(1) + b10 y(1)
/// U₂(y) = a21 y'(0) + a20 y(0) + b21 y'(1) + b20 y(1)
/// ```
///
/// The reduced form used by the determinant expansion has `a21 = b21 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData<T: Scalar> {
    pub a11: Cx<T>,
    pub a10: Cx<T>,
    pub b11: Cx<T>,
    pub b10: Cx<T>,
    pub a21: Cx<T>,
    pub a20: Cx<T>,
    pub b21: Cx<T>,
    pub b20: Cx<T>,
}

impl<T: Scalar> BoundaryData<T> {
    /// Reduced form: `U₂` has no derivative terms.
    pub fn reduced(a11: Cx<T>, a10: Cx<T>, b11: Cx<T>, b10: Cx<T>, a20: Cx<T>, b20: Cx<T>) -> Self {
        BoundaryData { a11, a10, b11, b10, a21: Cx::zero(), a20, b21: Cx::zero(), b20 }
    }

    /// Reduced form from integer coefficients `(a11, a10, b11, b10, a20, b20)`.
    pub fn from_ints(a11: i64, a10: i64, b11: i64, b10: i64, a20: i64, b20: i64) -> Self {
        Self::reduced(cx_int(a11), cx_int(a10), cx_int(b11), cx_int(b10), cx_int(a20), cx_int(b20))
    }

    /// `(α_r1, α_r0, β_r1, β_r0)` of form `r ∈ {1, 2}`.
    pub fn form(&self, r: usize) -> [&Cx<T>; 4] {
        match r {
            1 => [&self.a11, &self.a10, &self.b11, &self.b10],
            2 => [&self.a21, &self.a20, &self.b21, &self.b20],
            _ => panic!("boundary form index must be 1 or 2"),
        }
    }

    pub fn is_reduced(&self) -> bool {
        self.a21.is_zero() && self.b21.is_zero()
    }

    /// `α₁₁β₂₀ + β₁₁α₂₀`
    pub fn leading_sum(&self) -> Cx<T> {
        self.a11.clone() * self.b20.clone() + self.b11.clone() * self.a20.clone()
    }

    /// `α₁₀β₂₀ − β₁₀α₂₀`
    pub fn cross_term(&self) -> Cx<T> {
        self.a10.clone() * self.b20.clone() - self.b10.clone() * self.a20.clone()
    }

    /// `α₂₀β₁₁`
    pub fn cauchy_product(&self) -> Cx<T> {
        self.a20.clone() * self.b11.clone()
    }

    pub fn leading_sum_scale(&self) -> f64 {
        magnitude(&self.a11) * magnitude(&self.b20) + magnitude(&self.b11) * magnitude(&self.a20)
    }

    pub fn cross_term_scale(&self) -> f64 {
        magnitude(&self.a10) * magnitude(&self.b20) + magnitude(&self.b10) * magnitude(&self.a20)
    }

    /// Reduced form with `|a11| + |b11| > 0` and `|a20| + |b20| > 0`.
    pub fn check_normal_form(&self) -> Result<(), DeterminantError> {
        if !self.is_reduced() {
            return Err(DeterminantError::NotReduced);
        }
        if self.a11.is_zero() && self.b11.is_zero() {
            return Err(DeterminantError::NormalForm("|a11| + |b11| = 0"));
        }
        if self.a20.is_zero() && self.b20.is_zero() {
            return Err(DeterminantError::NormalForm("|a20| + |b20| = 0"));
        }
        Ok(())
    }

    /// Multiplies `U₁` by `c`.
    pub fn scale_first(&self, c: &Cx<T>) -> Self {
        let mut out = self.clone();
        for v in [&mut out.a11, &mut out.a10, &mut out.b11, &mut out.b10] {
            *v = v.clone() * c.clone();
        }
        out
    }

    /// Multiplies `U₂` by `c`.
    pub fn scale_second(&self, c: &Cx<T>) -> Self {
        let mut out = self.clone();
        for v in [&mut out.a21, &mut out.a20, &mut out.b21, &mut out.b20] {
            *v = v.clone() * c.clone();
        }
        out
    }

    pub fn map_backend<U: Scalar>(&self, f: impl Fn(&T) -> U) -> BoundaryData<U> {
        let m = |z: &Cx<T>| Cx::new(f(&z.re), f(&z.im));
        BoundaryData {
            a11: m(&self.a11),
            a10: m(&self.a10),
            b11: m(&self.b11),
            b10: m(&self.b10),
            a21: m(&self.a21),
            a20: m(&self.a20),
            b21: m(&self.b21),
            b20: m(&self.b20),
        }
    }

    pub fn to_f64(&self) -> BoundaryData<f64> {
        self.map_backend(|v| v.to_f64())
    }
}

impl<T: Scalar> fmt::Display for BoundaryData<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "U1 = ({})y'(0) + ({})y(0) + ({})y'(1) + ({})y(1); U2 = ({})y'(0) + ({})y(0) + ({})y'(1) + ({})y(1)",
            render_cx(&self.a11),
            render_cx(&self.a10),
            render_cx(&self.b11),
            render_cx(&self.b10),
            render_cx(&self.a21),
            render_cx(&self.a20),
            render_cx(&self.b21),
            render_cx(&self.b20)
        )
    }
}

/// One coefficient `δ_k^{(1−i)}` and the magnitude of the largest product
/// summed into it.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaEntry<T: Scalar> {
    pub value: Cx<T>,
    pub scale: f64,
}

impl<T: Scalar> DeltaEntry<T> {
    pub fn is_negligible(&self, tol: f64) -> bool {
        negligible(&self.value, self.scale, tol)
    }
}

/// `δ_k^{(1−i)}` for `k ∈ {−1, 0, 1}` and `i = 0..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaTable<T: Scalar> {
    order: usize,
    // [k + 1][i]
    entries: [Vec<DeltaEntry<T>>; 3],
}

impl<T: Scalar> DeltaTable<T> {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entry(&self, k: i32, i: usize) -> &DeltaEntry<T> {
        assert!((-1..=1).contains(&k), "exponential index must be −1, 0 or 1");
        &self.entries[(k + 1) as usize][i]
    }

    /// `δ_k^{(1−i)}`.
    pub fn get(&self, k: i32, i: usize) -> &Cx<T> {
        &self.entry(k, i).value
    }

    pub fn row(&self, k: i32) -> &[DeltaEntry<T>] {
        &self.entries[(k + 1) as usize]
    }

    pub fn from_rows(rows: [Vec<DeltaEntry<T>>; 3]) -> Option<Self> {
        let n = rows[0].len();
        (n > 0 && rows.iter().all(|r| r.len() == n)).then(|| DeltaTable { order: n - 1, entries: rows })
    }
}

#[derive(Clone)]
struct Endpoint<T: Scalar> {
    value: Cx<T>,
    bound: f64,
}

/// Endpoint values `g_{iν}^{(s)}(x)` for `x ∈ {0, 1}`.
struct EndpointValues<T: Scalar> {
    // [i − 1][ν][s][end]
    values: Vec<Vec<Vec<[Endpoint<T>; 2]>>>,
}

impl<T: Scalar> EndpointValues<T> {
    fn new(g: &GTable<T>) -> Result<Self, FunctionError> {
        let mut values = Vec::with_capacity(2);
        for i in 1..=2 {
            let mut per_nu = Vec::with_capacity(2);
            for nu in 0..=1 {
                let mut col = Vec::with_capacity(g.order() + 1);
                for f in g.column(i, nu) {
                    let (v0, b0) = f.eval_with_bound(&T::zero())?;
                    let (v1, b1) = f.eval_with_bound(&T::one())?;
                    col.push([Endpoint { value: v0, bound: b0 }, Endpoint { value: v1, bound: b1 }]);
                }
                per_nu.push(col);
            }
            values.push(per_nu);
        }
        Ok(EndpointValues { values })
    }

    fn at(&self, i: usize, nu: usize, s: usize, end: usize) -> &Endpoint<T> {
        &self.values[i - 1][nu][s][end]
    }
}

struct Accumulator<T: Scalar> {
    value: Cx<T>,
    scale: f64,
}

impl<T: Scalar> Accumulator<T> {
    fn new() -> Self {
        Accumulator { value: Cx::zero(), scale: 0.0 }
    }

    fn add(&mut self, coef: &Cx<T>, a: &Endpoint<T>, b: &Endpoint<T>) {
        if coef.is_zero() {
            return;
        }
        self.value = self.value.clone() + coef.clone() * a.value.clone() * b.value.clone();
        self.scale = self.scale.max(magnitude(coef) * a.bound * b.bound);
    }

    fn finish(self) -> DeltaEntry<T> {
        DeltaEntry { value: self.value, scale: self.scale }
    }
}

/// Computes every `δ_k^{(1−i)}`, `i ≤ g.order()`, from endpoint values of `g`.
pub fn delta_table<T: Scalar>(bc: &BoundaryData<T>, g: &GTable<T>) -> Result<DeltaTable<T>, DeterminantError> {
    bc.check_normal_form()?;
    let ev = EndpointValues::new(g)?;
    let at = |i, nu, s, end| ev.at(i, nu, s, end);
    let BoundaryData { a11, a10, b11, b10, a20, b20, .. } = bc;
    let p_ab = a20.clone() * b11.clone(); // α₂₀β₁₁
    let p_ba = b20.clone() * a11.clone(); // β₂₀α₁₁
    let p_aa = a20.clone() * a11.clone();
    let p_bb = b20.clone() * b11.clone();
    let cross = bc.cross_term(); // α₁₀β₂₀ − β₁₀α₂₀
    let neg_cross = -cross.clone();
    let (neg_ab, neg_aa, neg_bb) = (-p_ab.clone(), -p_aa.clone(), -p_bb.clone());
    let neg_ba = -p_ba.clone();
    let _ = (a10, b10);

    let mut rows: [Vec<DeltaEntry<T>>; 3] = Default::default();
    for i in 0..=g.order() {
        let mut minus = Accumulator::new();
        let mut zero = Accumulator::new();
        let mut plus = Accumulator::new();
        for j in 0..=i {
            let r = i - j;
            minus.add(&p_ab, at(2, 0, j, 0), at(1, 1, r, 1));
            minus.add(&neg_ba, at(2, 1, j, 0), at(1, 0, r, 1));

            zero.add(&p_aa, at(2, 0, j, 0), at(1, 1, r, 0));
            zero.add(&neg_aa, at(1, 0, j, 0), at(2, 1, r, 0));
            zero.add(&p_bb, at(2, 0, j, 1), at(1, 1, r, 1));
            zero.add(&neg_bb, at(1, 0, j, 1), at(2, 1, r, 1));

            plus.add(&p_ba, at(1, 1, j, 0), at(2, 0, r, 1));
            plus.add(&neg_ab, at(1, 0, j, 0), at(2, 1, r, 1));
        }
        for j in 0..i {
            let r = i - j - 1;
            minus.add(&neg_cross, at(2, 0, j, 0), at(1, 0, r, 1));
            plus.add(&cross, at(1, 0, j, 0), at(2, 0, r, 1));
        }
        rows[0].push(minus.finish());
        rows[1].push(zero.finish());
        rows[2].push(plus.finish());
    }
    Ok(DeltaTable { order: g.order(), entries: rows })
}

/// Checks the side conditions shared by the reduced closed forms.
pub fn check_reduced_conditions<T: Scalar>(bc: &BoundaryData<T>, tol: f64) -> Result<(), Condition> {
    if !negligible(&bc.leading_sum(), bc.leading_sum_scale(), tol) {
        return Err(Condition::LeadingSumVanishes);
    }
    if !negligible(&bc.cross_term(), bc.cross_term_scale(), tol) {
        return Err(Condition::CrossTermVanishes);
    }
    let p = bc.cauchy_product();
    if negligible(&p, magnitude(&p), tol) || p.is_zero() {
        return Err(Condition::CauchyProductNonzero);
    }
    Ok(())
}

/// Low-order coefficients evaluated directly from `q` and the boundary data.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedForms<T: Scalar> {
    /// `δ_{−1}^{(1)} = −(α₂₀β₁₁ + β₂₀α₁₁)`
    pub leading: Cx<T>,
    /// `δ_{−1}^{(0)} = −½(α₂₀β₁₁ + β₂₀α₁₁)∫₀¹q − (α₁₀β₂₀ − β₁₀α₂₀)`
    pub first: Cx<T>,
    /// `δ_{−1}^{(−1)}, δ_{−1}^{(−2)}, δ_{−1}^{(−3)}` when the reduced
    /// conditions hold, otherwise the first failing condition.
    pub reduced: Result<[Cx<T>; 3], Condition>,
}

fn endpoint_pair<T: Scalar>(f: &SmoothFunction<T>) -> Result<(Cx<T>, Cx<T>), FunctionError> {
    Ok((f.eval(&T::zero())?, f.eval(&T::one())?))
}

/// Closed forms of `δ_{−1}^{(1)}`, `δ_{−1}^{(0)}` and, under the reduced
/// conditions, of `δ_{−1}^{(−1)}, δ_{−1}^{(−2)}, δ_{−1}^{(−3)}`.
///
/// With `D = q(1) − q(0)`, `S = q'(1) + q'(0)`, `D₂ = q''(1) − q''(0)`,
/// `Q = ∫₀¹ q` and `p = α₂₀β₁₁`:
///
/// ```text
/// δ^{(−1)} = ½ p D
/// δ^{(−2)} = ¼ p (S + D Q)
/// δ^{(−3)} = ⅛ p (D₂ + S Q + 2 D ∫₀¹ q g_{10}^{(1)} + 2 D ρ)
/// ```
///
/// where `ρ = q(1)` for [`Normalization::ZeroAtOrigin`] and `ρ = q(1) + q(0)`
/// for [`Normalization::PlainDerivative`]. Only the last coefficient depends on
/// the normalization, and only when `D ≠ 0`.
pub fn delta_closed_forms<T: Scalar>(
    bc: &BoundaryData<T>,
    q: &SmoothFunction<T>,
    normalization: Normalization,
    tol: f64,
) -> Result<ClosedForms<T>, DeterminantError> {
    let total = q.integral01();
    let leading = -bc.leading_sum();
    let first = leading.clone() * cx_ratio(1, 2) * total.clone() - bc.cross_term();
    let reduced = match check_reduced_conditions(bc, tol) {
        Err(c) => Err(c),
        Ok(()) => {
            let p = bc.cauchy_product();
            let (q0, q1) = endpoint_pair(q)?;
            let (dq0, dq1) = endpoint_pair(&q.derivative())?;
            let (ddq0, ddq1) = endpoint_pair(&q.nth_derivative(2))?;
            let d = q1.clone() - q0.clone();
            let s = dq1 + dq0;
            let d2 = ddq1 - ddq0;
            // ∫₀¹ q·(½∫₀ˣq) = Q²/4
            let q_g1 = total.clone() * total.clone() * cx_ratio(1, 4);
            let rho = match normalization {
                Normalization::ZeroAtOrigin => q1.clone(),
                Normalization::PlainDerivative => q1.clone() + q0.clone(),
            };
            let two = cx_int::<T>(2);
            let r1 = p.clone() * cx_ratio(1, 2) * d.clone();
            let r2 = p.clone() * cx_ratio(1, 4) * (s.clone() + d.clone() * total.clone());
            let r3 = p * cx_ratio(1, 8) * (d2 + s * total + two.clone() * d.clone() * q_g1 + two * d * rho);
            Ok([r1, r2, r3])
        }
    };
    Ok(ClosedForms { leading, first, reduced })
}

/// `δ_{−1}^{(1−i)} = α₂₀β₁₁ Σ_{j=0}^{i} (−1)^j [g_{10}^{(j)}(0) g_{11}^{(i−j)}(1) − g_{11}^{(j)}(0) g_{10}^{(i−j)}(1)]`,
/// valid under the reduced conditions for `i ≥ 2`.
pub fn reduced_delta<T: Scalar>(
    bc: &BoundaryData<T>,
    g: &GTable<T>,
    i: usize,
    tol: f64,
) -> Result<Cx<T>, DeterminantError> {
    if i < 2 {
        return Err(DeterminantError::Precondition(Condition::OrderAtLeastTwo));
    }
    if i > g.order() {
        return Err(DeterminantError::OrderTooHigh { requested: i, available: g.order() });
    }
    check_reduced_conditions(bc, tol).map_err(DeterminantError::Precondition)?;
    let mut acc = Cx::<T>::zero();
    for j in 0..=i {
        let (g10_0, _) = endpoint_pair(g.get(1, 0, j))?;
        let (g11_0, _) = endpoint_pair(g.get(1, 1, j))?;
        let (_, g11_1) = endpoint_pair(g.get(1, 1, i - j))?;
        let (_, g10_1) = endpoint_pair(g.get(1, 0, i - j))?;
        acc = acc + sign_power::<T>(j) * (g10_0 * g11_1 - g11_0 * g10_1);
    }
    Ok(bc.cauchy_product() * acc)
}

/// `2^{1−i} α₂₀β₁₁ [q^{(i−2)}(1) + (−1)^{i+1} q^{(i−2)}(0)]`, the value of
/// `δ_{−1}^{(1−i)}` once the endpoint symmetry of `q` holds below order `i − 2`.
pub fn collapsed_delta<T: Scalar>(
    bc: &BoundaryData<T>,
    q: &SmoothFunction<T>,
    i: usize,
) -> Result<Cx<T>, DeterminantError> {
    if i < 2 {
        return Err(DeterminantError::Precondition(Condition::OrderAtLeastTwo));
    }
    let (v0, v1) = endpoint_pair(&q.nth_derivative(i - 2))?;
    let factor = real(T::one() / num::pow(T::from_int(2), i - 1));
    Ok(factor * bc.cauchy_product() * (v1 + sign_power::<T>(i + 1) * v0))
}

/// Coefficients of `e^{−λ}`, `1`, `e^{λ}` in a determinant value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTriple {
    pub minus: C64,
    pub zero: C64,
    pub plus: C64,
}

impl ExpTriple {
    /// `minus·e^{−λ} + zero + plus·e^{λ}`; overflows for `|Re λ| ≳ 700`.
    pub fn value(&self, lambda: C64) -> C64 {
        self.minus * (-lambda).exp() + self.zero + self.plus * lambda.exp()
    }

    /// The value multiplied by `e^{−|Re λ|}`, finite for any λ.
    pub fn scaled_value(&self, lambda: C64) -> C64 {
        let shift = lambda.re.abs();
        self.minus * (-lambda - shift).exp() + self.zero * (-shift).exp() + self.plus * (lambda - shift).exp()
    }
}

/// The truncated expansion `δ_k(λ) = Σ_{i≤m} λ^{1−i} δ_k^{(1−i)}` for each `k`.
pub fn asymptotic_delta_parts<T: Scalar>(dt: &DeltaTable<T>, lambda: C64) -> ExpTriple {
    let inv = lambda.inv();
    let sum = |k: i32| {
        let mut acc = C64::new(0.0, 0.0);
        for e in dt.row(k).iter().rev() {
            acc = acc * inv + to_c64(&e.value);
        }
        acc * lambda
    };
    ExpTriple { minus: sum(-1), zero: sum(0), plus: sum(1) }
}

/// `Δ(λ) ≈ δ_{−1}(λ)e^{−λ} + δ_0(λ) + δ_1(λ)e^{λ}` with the `O(λ^{−m})`
/// remainder dropped.
pub fn asymptotic_delta<T: Scalar>(dt: &DeltaTable<T>, lambda: C64) -> C64 {
    asymptotic_delta_parts(dt, lambda).value(lambda)
}
