//! Asymptotics and regularity classification for the two-point spectral problem
//!
//! ```text
//! y'' + q(x) y = λ² y,   0 < x < 1,
//! U₁(y) = U₂(y) = 0,
//! ```
//!
//! with boundary forms `U_r(y) = α_r1 y'(0) + α_r0 y(0) + β_r1 y'(1) + β_r0 y(1)`.
//!
//! * [`funspace`]: exact and floating polynomial / trigonometric-polynomial functions.
//! * [`asymptotics`]: coefficient functions of the large-λ expansion of a fundamental system.
//! * [`determinant`]: coefficients of the characteristic determinant and closed-form checks.
//! * [`classifier`]: Birkhoff-regular / almost-regular / not-normal decisions by two routes.
//! * [`numerics`]: ODE integration, remainder measurement, numeric determinants and eigenvalues.
//! * [`io`]: problem files and canonical JSON reports.
//! * [`gen`]: seeded random problems of each class.

pub mod asymptotics;
pub mod classifier;
pub mod determinant;
pub mod funspace;
pub mod gen;
pub mod io;
pub mod numerics;
pub mod scalar;

pub use asymptotics::{
    alpha_coefficients, build_g_table, build_g_table_with, check_closed_form, eval_asymptotic_solution,
    g10_closed_form, q_family, AlphaTable, AsymptoticsError, ClosedFormCheck, ClosedFormMismatch, ClosedFormOutcome,
    DifferingTerm, GTable, Normalization, QFamily,
};
pub use classifier::{
    birkhoff_precheck, classify, classify_by_delta, classify_by_theorem, cross_validate, ClassifierError, Discrepancy,
    Evidence, Precheck, ProblemSpec, RegularityClass, RegularityVerdict, Route, RouteChoice,
};
pub use determinant::{
    asymptotic_delta, asymptotic_delta_parts, collapsed_delta, delta_closed_forms, delta_table, reduced_delta,
    BoundaryData, ClosedForms, Condition, DeltaEntry, DeltaTable, DeterminantError, ExpTriple,
};
pub use funspace::{FunctionError, FunctionKind, Poly, SmoothFunction};
pub use io::{AnyExpansion, AnyProblem, Backend, Expansion, InputError};
pub use numerics::{
    find_eigenvalues, numeric_delta, remainder_probe, solve_ivp, standard_delta, HalfPlane, NumericsError, OdeOptions,
    ProbeOptions, SpectralParameter, Spectrum, SpectrumWindow, ValidationReport,
};
pub use scalar::{Cx, Rational, Scalar, C64};
