//! Fixed problems shared by the benchmarks.

use specreg_core::gen::{perturbed_potential, second_order_boundary, seeded};
use specreg_core::{BoundaryData, ProblemSpec, Rational, SmoothFunction};

/// `x(1 − x)`.
pub fn bump() -> SmoothFunction<Rational> {
    SmoothFunction::from_ratios(&[(0, 1), (1, 1), (-1, 1)])
}

/// A Birkhoff-regular problem with potential `x(1 − x)`.
pub fn regular_problem() -> ProblemSpec<Rational> {
    ProblemSpec::new(BoundaryData::from_ints(1, 2, -1, 3, 1, 2), bump())
}

/// Dirichlet conditions with potential `x(1 − x)`.
pub fn dirichlet_problem() -> ProblemSpec<Rational> {
    ProblemSpec::new(BoundaryData::from_ints(0, 1, 0, 0, 0, 1), bump())
}

/// An almost-regular problem of order `k + 2` with a degree-`degree` potential.
pub fn almost_regular_problem(k: usize, degree: usize) -> ProblemSpec<Rational> {
    let mut rng = seeded(0xbe7c + k as u64);
    let bc = second_order_boundary(&mut rng);
    let q = perturbed_potential(&mut rng, k, degree);
    ProblemSpec::new(bc, q).with_cap(k + 4)
}
