//! Seeded random problem generators.
//!
//! Every generator draws small rationals so exact computations stay cheap.
//! The constructions target specific classes: symmetric potentials defeat
//! every finite order, and an antisymmetric perturbation
//! `ε(x − ½)(x(1 − x))^k` breaks the endpoint symmetry first at derivative
//! order `k`, which gives almost regularity of order `k + 2`.

use num::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::classifier::{ProblemSpec, RegularityClass};
use crate::determinant::BoundaryData;
use crate::funspace::{Poly, SmoothFunction};
use crate::scalar::{real, Cx, Rational, Scalar};

pub type Rng64 = StdRng;

pub fn seeded(seed: u64) -> Rng64 {
    StdRng::seed_from_u64(seed)
}

/// A rational `n/d` with `|n| ≤ bound`, `1 ≤ d ≤ 4`.
pub fn small_rational(rng: &mut impl Rng, bound: i64) -> Rational {
    Rational::from_ratio(rng.gen_range(-bound..=bound), rng.gen_range(1..=4))
}

pub fn nonzero_rational(rng: &mut impl Rng, bound: i64) -> Rational {
    loop {
        let r = small_rational(rng, bound);
        if r != Rational::from_int(0) {
            return r;
        }
    }
}

fn cx(r: Rational) -> Cx<Rational> {
    real(r)
}

/// A polynomial of degree at most `max_degree` with small rational coefficients.
pub fn random_polynomial(rng: &mut impl Rng, max_degree: usize) -> SmoothFunction<Rational> {
    let degree = rng.gen_range(0..=max_degree);
    let coeffs = (0..=degree).map(|_| cx(small_rational(rng, 5))).collect();
    SmoothFunction::polynomial(coeffs)
}

fn x_one_minus_x() -> Poly<Rational> {
    Poly::new(vec![Cx::zero(), cx(Rational::from_int(1)), cx(Rational::from_int(-1))])
}

/// `p(x(1 − x))` for a random `p` of degree at most `max_degree`, so `q(1 − x) = q(x)`.
pub fn symmetric_potential(rng: &mut impl Rng, max_degree: usize) -> SmoothFunction<Rational> {
    let t = x_one_minus_x();
    let degree = rng.gen_range(0..=max_degree);
    let mut acc = Poly::zero();
    for _ in 0..=degree {
        acc = acc.mul(&t).add(&Poly::constant(cx(small_rational(rng, 5))));
    }
    SmoothFunction::from_poly(acc)
}

/// `(x − ½)(x(1 − x))^k`: antisymmetric about `½` with a zero of order `k` at 0.
pub fn antisymmetric_bump(k: usize) -> SmoothFunction<Rational> {
    let mut p = Poly::new(vec![cx(Rational::from_ratio(-1, 2)), cx(Rational::from_int(1))]);
    let t = x_one_minus_x();
    for _ in 0..k {
        p = p.mul(&t);
    }
    SmoothFunction::from_poly(p)
}

/// Symmetric core plus `ε(x − ½)(x(1 − x))^k`, `ε ≠ 0`: the endpoint symmetry
/// first fails at derivative order `k`.
pub fn perturbed_potential(rng: &mut impl Rng, k: usize, max_degree: usize) -> SmoothFunction<Rational> {
    let eps = cx(nonzero_rational(rng, 3));
    &symmetric_potential(rng, max_degree) + &(&antisymmetric_bump(k) * &eps)
}

/// Reduced boundary data with `|a11| + |b11| > 0` and `|a20| + |b20| > 0`.
pub fn random_boundary(rng: &mut impl Rng) -> BoundaryData<Rational> {
    loop {
        let v: Vec<_> = (0..6).map(|_| cx(small_rational(rng, 4))).collect();
        let bc =
            BoundaryData::reduced(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone(), v[4].clone(), v[5].clone());
        if bc.check_normal_form().is_ok() {
            return bc;
        }
    }
}

/// Reduced data with `a11·b20 + b11·a20 = 0`, `a10·b20 − b10·a20 = 0` and
/// `a20·b11 ≠ 0`.
pub fn second_order_boundary(rng: &mut impl Rng) -> BoundaryData<Rational> {
    let a11 = nonzero_rational(rng, 4);
    let b11 = nonzero_rational(rng, 4);
    let a20 = nonzero_rational(rng, 4);
    let b20 = -(b11.clone() * a20.clone()) / a11.clone();
    let a10 = small_rational(rng, 4);
    let b10 = a10.clone() * b20.clone() / a20.clone();
    BoundaryData::reduced(cx(a11), cx(a10), cx(b11), cx(b10), cx(a20), cx(b20))
}

/// Reduced data with `a11·b20 + b11·a20 = 0` and `a10·b20 − b10·a20 ≠ 0`.
pub fn first_order_boundary(rng: &mut impl Rng) -> BoundaryData<Rational> {
    let mut bc = second_order_boundary(rng);
    bc.b10 = bc.b10.clone() + cx(nonzero_rational(rng, 3));
    bc
}

/// Reduced data whose problem degenerates to a Cauchy problem.
pub fn not_normal_boundary(rng: &mut impl Rng) -> BoundaryData<Rational> {
    if rng.gen_bool(0.5) {
        let b11 = nonzero_rational(rng, 4);
        let b10 = small_rational(rng, 4);
        let b20 = nonzero_rational(rng, 4);
        BoundaryData::reduced(Cx::zero(), Cx::zero(), cx(b11), cx(b10), Cx::zero(), cx(b20))
    } else {
        let a11 = nonzero_rational(rng, 4);
        let a10 = small_rational(rng, 4);
        let a20 = nonzero_rational(rng, 4);
        BoundaryData::reduced(cx(a11), cx(a10), Cx::zero(), Cx::zero(), cx(a20), Cx::zero())
    }
}

/// A problem together with the class it was constructed to have under `m_cap`.
#[derive(Debug, Clone)]
pub struct GeneratedProblem {
    pub spec: ProblemSpec<Rational>,
    pub expected: RegularityClass,
}

/// A problem of each class in rotation: regular, order 1, order `k + 2`,
/// not normal, and symmetric. `m_cap` must be at least 2.
pub fn random_problem(rng: &mut impl Rng, m_cap: usize, max_degree: usize) -> GeneratedProblem {
    let pick = rng.gen_range(0..5);
    let (bc, q, expected) = match pick {
        0 => loop {
            let bc = random_boundary(rng);
            if !bc.leading_sum().is_zero() {
                break (bc, random_polynomial(rng, max_degree), RegularityClass::BirkhoffRegular);
            }
        },
        1 => (first_order_boundary(rng), random_polynomial(rng, max_degree), RegularityClass::AlmostRegular(1)),
        2 => {
            let k = rng.gen_range(0..=m_cap.saturating_sub(2).min(4));
            (
                second_order_boundary(rng),
                perturbed_potential(rng, k, max_degree / 2),
                RegularityClass::AlmostRegular(k + 2),
            )
        }
        3 => (not_normal_boundary(rng), random_polynomial(rng, max_degree), RegularityClass::NotNormal),
        _ => (
            second_order_boundary(rng),
            symmetric_potential(rng, max_degree / 2),
            RegularityClass::UndeterminedBeyondCap,
        ),
    };
    GeneratedProblem { spec: ProblemSpec::new(bc, q).with_cap(m_cap), expected }
}
