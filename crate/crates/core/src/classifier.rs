//! Regularity classification of two-point boundary problems.
//!
//! A problem in reduced form is Birkhoff regular, almost regular of some
//! order `m ≥ 1`, or not normal. The class is decided two independent ways:
//! from conditions on the boundary coefficients and on the endpoint jets of `q`
//! ([`classify_by_theorem`]), and from the first non-vanishing coefficient
//! `δ_{−1}^{(1−i)}` of the characteristic determinant ([`classify_by_delta`]).

use std::fmt;

use num::Zero;
use thiserror::Error;

use crate::asymptotics::{build_g_table, AsymptoticsError};
use crate::determinant::{delta_table, BoundaryData, DeltaTable, DeterminantError};
use crate::funspace::{FunctionError, SmoothFunction};
use crate::scalar::{magnitude, negligible, render_cx, sign_power, Cx, Scalar};

/// Default maximum order probed.
pub const DEFAULT_ORDER_CAP: usize = 10;

/// Largest accepted order cap.
pub const MAX_ORDER_CAP: usize = 40;

/// Default float-backend zero tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifierError {
    #[error("order cap {0} exceeds the supported maximum {MAX_ORDER_CAP}")]
    OrderCap(usize),
    #[error("tolerance must be positive and finite, got {0}")]
    Tolerance(f64),
    #[error("degenerate boundary conditions: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Discrepancy(#[from] Discrepancy),
    #[error(transparent)]
    Determinant(#[from] DeterminantError),
    #[error(transparent)]
    Asymptotics(#[from] AsymptoticsError),
    #[error(transparent)]
    Function(#[from] FunctionError),
}

/// λ-independent data of a spectral problem `y'' + q y = λ² y`, `U₁(y) = U₂(y) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec<T: Scalar> {
    pub bc: BoundaryData<T>,
    pub q: SmoothFunction<T>,
    pub m_cap: usize,
    pub tolerance: f64,
}

impl<T: Scalar> ProblemSpec<T> {
    pub fn new(bc: BoundaryData<T>, q: SmoothFunction<T>) -> Self {
        ProblemSpec { bc, q, m_cap: DEFAULT_ORDER_CAP, tolerance: DEFAULT_TOLERANCE }
    }

    pub fn with_cap(mut self, m_cap: usize) -> Self {
        self.m_cap = m_cap;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn validate(&self) -> Result<(), ClassifierError> {
        if self.m_cap > MAX_ORDER_CAP {
            return Err(ClassifierError::OrderCap(self.m_cap));
        }
        if !T::EXACT && !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(ClassifierError::Tolerance(self.tolerance));
        }
        Ok(())
    }

    /// The effective zero tolerance: zero on the exact backend.
    pub fn zero_tolerance(&self) -> f64 {
        if T::EXACT {
            0.0
        } else {
            self.tolerance
        }
    }

    pub fn to_f64(&self) -> ProblemSpec<f64> {
        ProblemSpec { bc: self.bc.to_f64(), q: self.q.to_f64(), m_cap: self.m_cap, tolerance: self.tolerance }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegularityClass {
    BirkhoffRegular,
    AlmostRegular(usize),
    NotNormal,
    UndeterminedBeyondCap,
}

impl RegularityClass {
    pub fn name(&self) -> &'static str {
        match self {
            RegularityClass::BirkhoffRegular => "BirkhoffRegular",
            RegularityClass::AlmostRegular(_) => "AlmostRegular",
            RegularityClass::NotNormal => "NotNormal",
            RegularityClass::UndeterminedBeyondCap => "UndeterminedBeyondCap",
        }
    }

    pub fn order(&self) -> Option<usize> {
        match self {
            RegularityClass::BirkhoffRegular => Some(0),
            RegularityClass::AlmostRegular(m) => Some(*m),
            _ => None,
        }
    }

    fn almost_regular(order: usize) -> Self {
        if order == 0 {
            RegularityClass::BirkhoffRegular
        } else {
            RegularityClass::AlmostRegular(order)
        }
    }
}

impl fmt::Display for RegularityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegularityClass::AlmostRegular(m) => write!(f, "AlmostRegular({m})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    Precheck,
    Theorem,
    Delta,
    BothAgree,
}

impl Route {
    pub fn name(&self) -> &'static str {
        match self {
            Route::Precheck => "precheck",
            Route::Theorem => "theorem",
            Route::Delta => "delta",
            Route::BothAgree => "both-agree",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One checked condition: what was tested, the value it was decided on and
/// whether the condition holds.
#[derive(Debug, Clone, PartialEq)]
pub struct Evidence {
    pub route: Route,
    pub label: String,
    pub value: String,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityVerdict {
    pub class: RegularityClass,
    pub evidence: Vec<Evidence>,
    pub route: Route,
}

/// Disagreement between the two classification routes.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("routes disagree: theorem gives {theorem}, delta gives {delta}; first divergence at step {step}: {detail}")]
pub struct Discrepancy {
    pub theorem: RegularityClass,
    pub delta: RegularityClass,
    pub step: usize,
    pub detail: String,
}

/// Outcome of the Birkhoff precheck on general two-form boundary data.
#[derive(Debug, Clone, PartialEq)]
pub enum Precheck<T: Scalar> {
    Regular(Vec<Evidence>),
    ReducedForm(BoundaryData<T>),
    Degenerate(String),
}

fn record<T: Scalar>(route: Route, label: impl Into<String>, value: &Cx<T>, satisfied: bool) -> Evidence {
    Evidence { route, label: label.into(), value: render_cx(value), satisfied }
}

fn det2<T: Scalar>(a: &Cx<T>, b: &Cx<T>, c: &Cx<T>, d: &Cx<T>) -> Cx<T> {
    a.clone() * d.clone() - b.clone() * c.clone()
}

/// True when the 2×4 coefficient matrix of the two forms has rank 2.
fn has_full_rank<T: Scalar>(bc: &BoundaryData<T>, tol: f64) -> bool {
    let r1 = bc.form(1);
    let r2 = bc.form(2);
    (0..4).any(|j| {
        (j + 1..4).any(|k| {
            let minor = det2(r1[j], r1[k], r2[j], r2[k]);
            let scale = magnitude(r1[j]) * magnitude(r2[k]) + magnitude(r1[k]) * magnitude(r2[j]);
            !negligible(&minor, scale, tol)
        })
    })
}

/// Decides Birkhoff regularity directly where possible and otherwise brings the
/// forms to the reduced shape `U₂ = a20 y(0) + b20 y(1)`.
pub fn birkhoff_precheck<T: Scalar>(bc: &BoundaryData<T>, tol: f64) -> Precheck<T> {
    let route = Route::Precheck;
    if !has_full_rank(bc, tol) {
        return Precheck::Degenerate("boundary coefficient matrix has rank below 2".into());
    }
    let lead = det2(&bc.a11, &bc.b11, &bc.a21, &bc.b21);
    let lead_scale = magnitude(&bc.a11) * magnitude(&bc.b21) + magnitude(&bc.b11) * magnitude(&bc.a21);
    if !negligible(&lead, lead_scale, tol) {
        return Precheck::Regular(vec![record(route, "a11·b21 − b11·a21 ≠ 0", &lead, true)]);
    }
    let second_has_derivative = !(negligible(&bc.a21, 0.0, tol) && negligible(&bc.b21, 0.0, tol));
    let first_has_derivative = !(negligible(&bc.a11, 0.0, tol) && negligible(&bc.b11, 0.0, tol));
    let mut reduced = bc.clone();
    if second_has_derivative {
        if first_has_derivative {
            // The derivative rows are proportional: eliminate them from U₂.
            let c = if magnitude(&bc.a11) >= magnitude(&bc.b11) {
                bc.a21.clone() / bc.a11.clone()
            } else {
                bc.b21.clone() / bc.b11.clone()
            };
            let f1 = bc.form(1);
            let f2 = bc.form(2);
            let sub = |x: &Cx<T>, y: &Cx<T>| x.clone() - c.clone() * y.clone();
            reduced.a20 = sub(f2[1], f1[1]);
            reduced.b20 = sub(f2[3], f1[3]);
        } else {
            reduced = BoundaryData {
                a11: bc.a21.clone(),
                a10: bc.a20.clone(),
                b11: bc.b21.clone(),
                b10: bc.b20.clone(),
                a20: bc.a10.clone(),
                b20: bc.b10.clone(),
                ..bc.clone()
            };
        }
        reduced.a21 = Cx::zero();
        reduced.b21 = Cx::zero();
    }
    let sum = reduced.leading_sum();
    if !negligible(&sum, reduced.leading_sum_scale(), tol) {
        return Precheck::Regular(vec![
            record(route, "a11·b21 − b11·a21 ≠ 0", &lead, false),
            record(route, "a11·b20 + b11·a20 ≠ 0", &sum, true),
        ]);
    }
    let no_derivatives = negligible(&reduced.a11, 0.0, tol) && negligible(&reduced.b11, 0.0, tol);
    let cross = reduced.cross_term();
    if no_derivatives {
        if !negligible(&cross, reduced.cross_term_scale(), tol) {
            return Precheck::Regular(vec![
                record(route, "a11·b21 − b11·a21 ≠ 0", &lead, false),
                record(route, "a11 = b11 = 0", &reduced.a11, true),
                record(route, "a10·b20 − b10·a20 ≠ 0", &cross, true),
            ]);
        }
        return Precheck::Degenerate("|a11| + |b11| = 0 and the forms are dependent".into());
    }
    if negligible(&reduced.a20, 0.0, tol) && negligible(&reduced.b20, 0.0, tol) {
        return Precheck::Degenerate("|a20| + |b20| = 0".into());
    }
    Precheck::ReducedForm(reduced)
}

fn check_reduced<T: Scalar>(p: &ProblemSpec<T>) -> Result<(), ClassifierError> {
    p.validate()?;
    p.bc.check_normal_form()?;
    Ok(())
}

/// Order via conditions on the boundary coefficients and on
/// `q^{(k)}(0) − (−1)^k q^{(k)}(1)`, `k = 0, 1, …`; the first `k` where the
/// endpoint symmetry fails gives order `k + 2`.
pub fn classify_by_theorem<T: Scalar>(p: &ProblemSpec<T>) -> Result<RegularityVerdict, ClassifierError> {
    check_reduced(p)?;
    let route = Route::Theorem;
    let tol = p.zero_tolerance();
    let bc = &p.bc;
    let mut evidence = Vec::new();
    let verdict = |class, evidence| Ok(RegularityVerdict { class, evidence, route });

    let c1 = bc.leading_sum();
    let c1_zero = negligible(&c1, bc.leading_sum_scale(), tol);
    evidence.push(record(route, "a11·b20 + b11·a20 = 0", &c1, c1_zero));
    if !c1_zero {
        return verdict(RegularityClass::BirkhoffRegular, evidence);
    }
    if p.m_cap < 1 {
        return verdict(RegularityClass::UndeterminedBeyondCap, evidence);
    }
    let c2 = bc.cross_term();
    let c2_zero = negligible(&c2, bc.cross_term_scale(), tol);
    evidence.push(record(route, "a10·b20 − b10·a20 = 0", &c2, c2_zero));
    if !c2_zero {
        return verdict(RegularityClass::AlmostRegular(1), evidence);
    }
    let cauchy = bc.cauchy_product();
    let normal = !negligible(&cauchy, 0.0, tol) && !cauchy.is_zero();
    evidence.push(record(route, "a20·b11 ≠ 0", &cauchy, normal));
    if !normal {
        return verdict(RegularityClass::NotNormal, evidence);
    }
    if p.m_cap < 2 {
        return verdict(RegularityClass::UndeterminedBeyondCap, evidence);
    }
    let mut jet = p.q.clone();
    for k in 0..=p.m_cap - 2 {
        let (v0, s0) = jet.eval_with_bound(&T::zero())?;
        let (v1, s1) = jet.eval_with_bound(&T::one())?;
        let diff = v0 - sign_power::<T>(k) * v1;
        let holds = negligible(&diff, s0 + s1, tol);
        evidence.push(record(route, format!("q^({k})(0) = (−1)^{k}·q^({k})(1)"), &diff, holds));
        if !holds {
            return verdict(RegularityClass::almost_regular(k + 2), evidence);
        }
        jet = jet.derivative();
    }
    verdict(RegularityClass::UndeterminedBeyondCap, evidence)
}

fn delta_record<T: Scalar>(dt: &DeltaTable<T>, i: usize, tol: f64) -> (Evidence, bool) {
    let e = dt.entry(-1, i);
    let zero = e.is_negligible(tol);
    let exponent = 1 - i as i64;
    (record(Route::Delta, format!("δ_{{−1}}^({exponent}) = 0"), &e.value, zero), zero)
}

/// Order via the first non-vanishing coefficient `δ_{−1}^{(1−i)}`: order `i`
/// when `δ_{−1}^{(1)} = … = δ_{−1}^{(2−i)} = 0` and `δ_{−1}^{(1−i)} ≠ 0`.
pub fn classify_by_delta<T: Scalar>(p: &ProblemSpec<T>) -> Result<RegularityVerdict, ClassifierError> {
    check_reduced(p)?;
    let route = Route::Delta;
    let tol = p.zero_tolerance();
    let mut evidence = Vec::new();
    let verdict = |class, evidence| Ok(RegularityVerdict { class, evidence, route });

    // Low orders first so regular problems never build a deep table.
    let shallow = delta_table(&p.bc, &build_g_table(&p.q, p.m_cap.min(1))?)?;
    let (e, zero) = delta_record(&shallow, 0, tol);
    evidence.push(e);
    if !zero {
        return verdict(RegularityClass::BirkhoffRegular, evidence);
    }
    if p.m_cap < 1 {
        return verdict(RegularityClass::UndeterminedBeyondCap, evidence);
    }
    let (e, zero) = delta_record(&shallow, 1, tol);
    evidence.push(e);
    if !zero {
        return verdict(RegularityClass::AlmostRegular(1), evidence);
    }
    let cauchy = p.bc.cauchy_product();
    let normal = !negligible(&cauchy, 0.0, tol) && !cauchy.is_zero();
    evidence.push(record(route, "a20·b11 ≠ 0", &cauchy, normal));
    if !normal {
        return verdict(RegularityClass::NotNormal, evidence);
    }
    if p.m_cap < 2 {
        return verdict(RegularityClass::UndeterminedBeyondCap, evidence);
    }
    let deep = delta_table(&p.bc, &build_g_table(&p.q, p.m_cap)?)?;
    for i in 2..=p.m_cap {
        let (e, zero) = delta_record(&deep, i, tol);
        evidence.push(e);
        if !zero {
            return verdict(RegularityClass::AlmostRegular(i), evidence);
        }
    }
    verdict(RegularityClass::UndeterminedBeyondCap, evidence)
}

/// Runs both routes concurrently and returns the common verdict.
pub fn cross_validate<T: Scalar>(p: &ProblemSpec<T>) -> Result<RegularityVerdict, ClassifierError> {
    let (theorem, delta) = rayon::join(|| classify_by_theorem(p), || classify_by_delta(p));
    let (theorem, delta) = (theorem?, delta?);
    let steps_agree = theorem.evidence.len() == delta.evidence.len()
        && theorem.evidence.iter().zip(&delta.evidence).all(|(a, b)| a.satisfied == b.satisfied);
    if theorem.class != delta.class || !steps_agree {
        let step = theorem
            .evidence
            .iter()
            .zip(&delta.evidence)
            .position(|(a, b)| a.satisfied != b.satisfied)
            .unwrap_or_else(|| theorem.evidence.len().min(delta.evidence.len()));
        let describe = |v: &RegularityVerdict| {
            v.evidence
                .get(step)
                .map(|e| format!("{} [{}] holds={}", e.label, e.value, e.satisfied))
                .unwrap_or_else(|| "no further condition".into())
        };
        return Err(Discrepancy {
            theorem: theorem.class,
            delta: delta.class,
            step,
            detail: format!("theorem: {}; delta: {}", describe(&theorem), describe(&delta)),
        }
        .into());
    }
    let mut evidence = theorem.evidence;
    evidence.extend(delta.evidence);
    Ok(RegularityVerdict { class: theorem.class, evidence, route: Route::BothAgree })
}

/// Route selection for [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RouteChoice {
    Theorem,
    Delta,
    #[default]
    Both,
}

/// Classifies general two-form boundary data: the precheck settles regular and
/// degenerate cases, the chosen route handles the reduced form.
pub fn classify<T: Scalar>(p: &ProblemSpec<T>, choice: RouteChoice) -> Result<RegularityVerdict, ClassifierError> {
    p.validate()?;
    match birkhoff_precheck(&p.bc, p.zero_tolerance()) {
        Precheck::Regular(evidence) => {
            Ok(RegularityVerdict { class: RegularityClass::BirkhoffRegular, evidence, route: Route::Precheck })
        }
        Precheck::Degenerate(reason) => Err(ClassifierError::Degenerate(reason)),
        Precheck::ReducedForm(bc) => {
            let reduced = ProblemSpec { bc, ..p.clone() };
            match choice {
                RouteChoice::Theorem => classify_by_theorem(&reduced),
                RouteChoice::Delta => classify_by_delta(&reduced),
                RouteChoice::Both => cross_validate(&reduced),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cx_int, Rational};

    type F = SmoothFunction<Rational>;
    type B = BoundaryData<Rational>;

    fn spec(bc: B, q: F) -> ProblemSpec<Rational> {
        ProblemSpec::new(bc, q)
    }

    fn both(p: &ProblemSpec<Rational>) -> RegularityClass {
        cross_validate(p).unwrap().class
    }

    #[test]
    fn precheck_examples() {
        let general = B { a21: cx_int(0), b21: cx_int(1), ..B::from_ints(1, 0, 0, 0, 0, 0) };
        assert!(matches!(birkhoff_precheck(&general, 0.0), Precheck::Regular(_)));
        let reduced = B::from_ints(1, 0, 1, 0, 1, -1);
        assert_eq!(birkhoff_precheck(&reduced, 0.0), Precheck::ReducedForm(reduced.clone()));
        let degenerate = B::from_ints(0, 1, 0, 1, 0, 0);
        assert!(matches!(birkhoff_precheck(&degenerate, 0.0), Precheck::Degenerate(_)));
        let dirichlet = B::from_ints(0, 1, 0, 0, 0, 1);
        assert!(matches!(birkhoff_precheck(&dirichlet, 0.0), Precheck::Regular(_)));
    }

    #[test]
    fn precheck_eliminates_proportional_derivatives() {
        // U₂ = U₁ + y(1) once the common derivative part is removed
        let general = B { a21: cx_int(2), b21: cx_int(2), ..B::from_ints(1, 0, 1, 0, 1, 1) };
        match birkhoff_precheck(&general, 0.0) {
            Precheck::ReducedForm(bc) => {
                assert!(bc.is_reduced());
                assert_eq!(bc.a20, cx_int(1));
                assert_eq!(bc.b20, cx_int(1));
            }
            Precheck::Regular(_) => {}
            other => panic!("unexpected {other:?}"),
        }
        let swapped =
            B { a11: cx_int(0), b11: cx_int(0), a21: cx_int(1), b21: cx_int(1), ..B::from_ints(0, 1, 0, -1, 0, 0) };
        match birkhoff_precheck(&swapped, 0.0) {
            Precheck::ReducedForm(bc) => assert_eq!((bc.a11.clone(), bc.a20.clone()), (cx_int(1), cx_int(1))),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn regular_example() {
        let p = spec(B::from_ints(1, 0, 0, 0, 0, 1), F::x());
        assert_eq!(classify_by_theorem(&p).unwrap().class, RegularityClass::BirkhoffRegular);
        assert_eq!(both(&p), RegularityClass::BirkhoffRegular);
    }

    #[test]
    fn first_order_example() {
        let p = spec(B::from_ints(1, 1, 1, 0, 1, -1), F::x());
        assert_eq!(both(&p), RegularityClass::AlmostRegular(1));
    }

    #[test]
    fn second_order_example() {
        let p = spec(B::from_ints(1, 0, 1, 0, 1, -1), F::x());
        assert_eq!(both(&p), RegularityClass::AlmostRegular(2));
        let v = classify_by_delta(&p).unwrap();
        assert_eq!(v.evidence.last().unwrap().value, "1/2");
    }

    #[test]
    fn symmetric_potential_is_undetermined() {
        let p = spec(B::from_ints(1, 0, 1, 0, 1, -1), F::from_ratios(&[(0, 1), (1, 1), (-1, 1)])).with_cap(6);
        assert_eq!(both(&p), RegularityClass::UndeterminedBeyondCap);
    }

    #[test]
    fn not_normal_example() {
        let p = spec(B::from_ints(0, 0, 1, 0, 0, 1), F::x());
        assert_eq!(both(&p), RegularityClass::NotNormal);
    }

    #[test]
    fn third_order_from_derivative_mismatch() {
        // q(0) = q(1) but q'(0) ≠ −q'(1)
        let q = F::from_ratios(&[(0, 1), (1, 1), (-3, 1), (2, 1)]);
        let p = spec(B::from_ints(1, 0, 1, 0, 1, -1), q);
        assert_eq!(both(&p), RegularityClass::AlmostRegular(3));
    }

    #[test]
    fn caps_are_respected() {
        let bc = B::from_ints(1, 0, 1, 0, 1, -1);
        for cap in 0..2 {
            let p = spec(bc.clone(), F::x()).with_cap(cap);
            assert_eq!(both(&p), RegularityClass::UndeterminedBeyondCap);
        }
        assert_eq!(both(&spec(bc, F::x()).with_cap(2)), RegularityClass::AlmostRegular(2));
        let err = classify(&spec(B::from_ints(1, 0, 0, 0, 0, 1), F::x()).with_cap(99), RouteChoice::Both);
        assert_eq!(err, Err(ClassifierError::OrderCap(99)));
    }

    #[test]
    fn classify_dispatches_through_precheck() {
        let p = spec(B::from_ints(1, 0, 0, 0, 0, 1), F::x());
        assert_eq!(classify(&p, RouteChoice::Both).unwrap().route, Route::Precheck);
        let p = spec(B::from_ints(1, 0, 1, 0, 1, -1), F::x());
        let v = classify(&p, RouteChoice::Theorem).unwrap();
        assert_eq!((v.class, v.route), (RegularityClass::AlmostRegular(2), Route::Theorem));
        let p = spec(B::from_ints(0, 1, 0, 1, 0, 0), F::x());
        assert!(matches!(classify(&p, RouteChoice::Both), Err(ClassifierError::Degenerate(_))));
    }

    #[test]
    fn float_backend_agrees() {
        let q = F::from_ratios(&[(0, 1), (1, 1), (-3, 1), (2, 1)]);
        let p = spec(B::from_ints(1, 0, 1, 0, 1, -1), q).to_f64();
        assert_eq!(cross_validate(&p).unwrap().class, RegularityClass::AlmostRegular(3));
        let bad = p.clone().with_tolerance(0.0);
        assert_eq!(classify(&bad, RouteChoice::Both), Err(ClassifierError::Tolerance(0.0)));
    }
}
