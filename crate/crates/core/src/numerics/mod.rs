//! Floating-point validation: integration of `y'' + q y = λ² y` for complex λ,
//! measurement of the remainder of the truncated expansion, numeric
//! characteristic determinants and eigenvalue search.
//!
//! Large-λ work is done in the weighted frame `u = e^{−σλx} y`, `σ = (−1)^i`,
//! where `u'' + 2σλu' + qu = 0`. Each branch is integrated away from the
//! endpoint where it dominates, so the parasitic solution decays.

pub mod ode;

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::asymptotics::{branch_sign, AsymptoticsError, GTable};
use crate::classifier::ProblemSpec;
use crate::determinant::{asymptotic_delta_parts, delta_table, DeterminantError, ExpTriple};
use crate::funspace::SmoothFunction;
use crate::scalar::C64;

pub use ode::{integrate, integrate_through, OdeOptions, SolverError, State};

/// Default number of uniform x samples for the remainder maximum.
pub const DEFAULT_GRID_POINTS: usize = 101;

/// Samples whose remainder stays below this level are treated as solver noise.
pub const NOISE_FLOOR: f64 = 1e-11;

/// Minimum number of λ samples for a slope fit.
pub const MIN_FIT_POINTS: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("|λ| = {modulus} does not exceed the radius R = {radius}")]
    BelowRadius { modulus: f64, radius: f64 },
    #[error("at least {MIN_FIT_POINTS} λ samples are required, got {0}")]
    TooFewSamples(usize),
    #[error("invalid spectrum window: {0}")]
    InvalidWindow(String),
    #[error("no Newton iteration converged ({0} seeds)")]
    NoConvergence(usize),
    #[error("λ must be non-zero")]
    ZeroLambda,
    #[error(transparent)]
    Determinant(#[from] DeterminantError),
    #[error(transparent)]
    Asymptotics(#[from] AsymptoticsError),
}

/// `R = 10 (1 + max_{[0,1]} |q|)`.
pub fn default_radius(q: &SmoothFunction<f64>) -> f64 {
    10.0 * (1.0 + q.max_abs_sampled(1001))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HalfPlane {
    Right,
    Left,
}

impl HalfPlane {
    pub fn of(lambda: C64) -> Self {
        if lambda.re >= 0.0 {
            HalfPlane::Right
        } else {
            HalfPlane::Left
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            HalfPlane::Right => "C+",
            HalfPlane::Left => "C-",
        }
    }
}

/// A spectral parameter admitted for asymptotic comparisons: `|λ| > R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParameter {
    pub lambda: C64,
    pub half_plane: HalfPlane,
    pub radius: f64,
}

impl SpectralParameter {
    pub fn new(lambda: C64, radius: f64) -> Result<Self, NumericsError> {
        if lambda.norm() <= radius {
            return Err(NumericsError::BelowRadius { modulus: lambda.norm(), radius });
        }
        Ok(SpectralParameter { lambda, half_plane: HalfPlane::of(lambda), radius })
    }
}

/// Solves `y'' + q y = λ² y` from `x0` with `(y, y')(x0) = state` and returns
/// `(y, y')` at `x1`.
pub fn solve_ivp_between(
    q: &SmoothFunction<f64>,
    lambda: C64,
    x0: f64,
    state: State,
    x1: f64,
    opts: &OdeOptions,
) -> Result<State, SolverError> {
    let l2 = lambda * lambda;
    integrate(|x, y| [y[1], y[0] * (l2 - q.eval_unchecked(x))], x0, state, x1, opts)
}

/// Solves from `x = 0` with `y(0) = y0`, `y'(0) = dy0` and returns `(y, y')(x_end)`.
pub fn solve_ivp(
    q: &SmoothFunction<f64>,
    lambda: C64,
    y0: C64,
    dy0: C64,
    x_end: f64,
    opts: &OdeOptions,
) -> Result<(C64, C64), SolverError> {
    let s = solve_ivp_between(q, lambda, 0.0, [y0, dy0], x_end, opts)?;
    Ok((s[0], s[1]))
}

/// The endpoint a branch is integrated from: where `|e^{σλx}|` is largest.
pub fn dominant_endpoint(i: usize, lambda: C64) -> f64 {
    if (lambda * branch_sign(i) as f64).re >= 0.0 {
        0.0
    } else {
        1.0
    }
}

/// Normalized values `(λ^{−ν} e^{−σλx} y_i^{(ν)}(x))_{ν=0,1}` of the solution whose
/// initial data at the dominant endpoint equals the truncated series, at each
/// `x` of the ascending grid `xs` (which must contain that endpoint).
pub fn weighted_branch(
    q: &SmoothFunction<f64>,
    g: &GTable<f64>,
    i: usize,
    lambda: C64,
    xs: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<State>, NumericsError> {
    if lambda.norm() == 0.0 {
        return Err(NumericsError::ZeroLambda);
    }
    let sigma = branch_sign(i) as f64;
    let x0 = dominant_endpoint(i, lambda);
    let g0 = g.series(i, 0, x0, lambda);
    let g1 = g.series(i, 1, x0, lambda);
    let start = [g0, lambda * (g1 - g0 * sigma)];
    let two_sl = lambda * (2.0 * sigma);
    let rhs = |x: f64, u: &State| [u[1], -(two_sl * u[1]) - q.eval_unchecked(x) * u[0]];
    let mut stops: Vec<f64> = xs.to_vec();
    if x0 == 1.0 {
        stops.reverse();
    }
    let mut states = integrate_through(rhs, x0, start, &stops, opts)?;
    if x0 == 1.0 {
        states.reverse();
    }
    Ok(states.into_iter().map(|u| [u[0], u[0] * sigma + u[1] / lambda]).collect())
}

/// One remainder measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderSample {
    pub lambda: C64,
    pub i: usize,
    pub nu: usize,
    pub max_eta: f64,
    /// `|λ|^{−m−1}`, the decay predicted by the remainder estimate.
    pub bound_pred: f64,
}

/// Least-squares slope of `log max|η|` against `log |λ|` for one branch,
/// derivative order and half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub i: usize,
    pub nu: usize,
    pub half_plane: HalfPlane,
    pub points: usize,
    pub slope: Option<f64>,
    pub below_noise: bool,
}

/// `|Δ_num − Δ_asym| / |Δ_num|` at one λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterminantRow {
    pub lambda: C64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub order: usize,
    pub radius: f64,
    pub samples: Vec<RemainderSample>,
    pub fits: Vec<SlopeFit>,
    pub determinant: Vec<DeterminantRow>,
}

impl ValidationReport {
    pub fn fit(&self, i: usize, nu: usize, half_plane: HalfPlane) -> Option<&SlopeFit> {
        self.fits.iter().find(|f| f.i == i && f.nu == nu && f.half_plane == half_plane)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("re_lambda,im_lambda,i,nu,max_eta,bound_pred\n");
        for s in &self.samples {
            let _ =
                writeln!(out, "{},{},{},{},{:e},{:e}", s.lambda.re, s.lambda.im, s.i, s.nu, s.max_eta, s.bound_pred);
        }
        out
    }
}

/// Ordinary least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    pub grid_points: usize,
    /// Overrides [`default_radius`].
    pub radius: Option<f64>,
    pub ode: OdeOptions,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { grid_points: DEFAULT_GRID_POINTS, radius: None, ode: OdeOptions::default() }
    }
}

fn uniform_grid(n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|k| k as f64 / (n - 1) as f64).collect()
}

fn probe_one(
    q: &SmoothFunction<f64>,
    g: &GTable<f64>,
    lambda: C64,
    xs: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<RemainderSample>, NumericsError> {
    let bound_pred = lambda.norm().powi(-(g.order() as i32) - 1);
    let mut out = Vec::with_capacity(4);
    for i in 1..=2 {
        let states = weighted_branch(q, g, i, lambda, xs, opts)?;
        for nu in 0..=1 {
            let max_eta =
                xs.iter().zip(&states).map(|(&x, s)| (s[nu] - g.series(i, nu, x, lambda)).norm()).fold(0.0, f64::max);
            out.push(RemainderSample { lambda, i, nu, max_eta, bound_pred });
        }
    }
    Ok(out)
}

/// Measures `max_x |η_iν(x, λ)|` for every λ, fits decay slopes per branch,
/// derivative order and half-plane, and compares numeric with asymptotic
/// determinants when the boundary forms are in reduced normal form.
pub fn remainder_probe(
    p: &ProblemSpec<f64>,
    g: &GTable<f64>,
    lambdas: &[C64],
    opts: &ProbeOptions,
) -> Result<ValidationReport, NumericsError> {
    let radius = opts.radius.unwrap_or_else(|| default_radius(&p.q));
    for &l in lambdas {
        SpectralParameter::new(l, radius)?;
    }
    let xs = uniform_grid(opts.grid_points);
    let per_lambda: Vec<Vec<RemainderSample>> =
        lambdas.par_iter().map(|&l| probe_one(&p.q, g, l, &xs, &opts.ode)).collect::<Result<_, _>>()?;
    let samples: Vec<RemainderSample> = per_lambda.into_iter().flatten().collect();

    let mut fits = Vec::new();
    for half_plane in [HalfPlane::Right, HalfPlane::Left] {
        for i in 1..=2 {
            for nu in 0..=1 {
                let pts: Vec<(f64, f64)> = samples
                    .iter()
                    .filter(|s| s.i == i && s.nu == nu && HalfPlane::of(s.lambda) == half_plane)
                    .map(|s| (s.lambda.norm(), s.max_eta))
                    .collect();
                if pts.is_empty() {
                    continue;
                }
                let below_noise = pts.iter().all(|p| p.1 < NOISE_FLOOR);
                let slope = if below_noise || pts.len() < MIN_FIT_POINTS { None } else { log_log_slope(&pts) };
                fits.push(SlopeFit { i, nu, half_plane, points: pts.len(), slope, below_noise });
            }
        }
    }

    let determinant = if p.bc.check_normal_form().is_ok() {
        let dt = delta_table(&p.bc, g)?;
        lambdas
            .par_iter()
            .map(|&l| {
                let num = numeric_delta(p, g, l, &opts.ode)?;
                let asym = asymptotic_delta_parts(&dt, l);
                let (n, a) = (num.scaled_value(l), asym.scaled_value(l));
                Ok(DeterminantRow { lambda: l, relative_error: (n - a).norm() / n.norm() })
            })
            .collect::<Result<_, NumericsError>>()?
    } else {
        Vec::new()
    };
    Ok(ValidationReport { order: g.order(), radius, samples, fits, determinant })
}

/// `det[U_r(y_j)]` for the fundamental system normalized like the truncated
/// series, split into its `e^{−λ}`, `1` and `e^{λ}` components.
pub fn numeric_delta(
    p: &ProblemSpec<f64>,
    g: &GTable<f64>,
    lambda: C64,
    opts: &OdeOptions,
) -> Result<ExpTriple, NumericsError> {
    let ends = [0.0, 1.0];
    let n1 = weighted_branch(&p.q, g, 1, lambda, &ends, opts)?;
    let n2 = weighted_branch(&p.q, g, 2, lambda, &ends, opts)?;
    let cx = |z: &num::Complex<f64>| *z;
    // A_rj collects the x = 0 terms, B_rj the x = 1 terms without e^{σ_j λ}.
    let parts = |r: usize, n: &[State]| {
        let [a1, a0, b1, b0] = p.bc.form(r).map(cx);
        let a = lambda * a1 * n[0][1] + a0 * n[0][0];
        let b = lambda * b1 * n[1][1] + b0 * n[1][0];
        (a, b)
    };
    let (a11, b11) = parts(1, &n1);
    let (a21, b21) = parts(2, &n1);
    let (a12, b12) = parts(1, &n2);
    let (a22, b22) = parts(2, &n2);
    Ok(ExpTriple {
        minus: b11 * a22 - a12 * b21,
        zero: a11 * a22 + b11 * b22 - a12 * a21 - b12 * b21,
        plus: a11 * b22 - b12 * a21,
    })
}

/// `det[U_r(y_j)]` for `y₁(0) = 1, y₁'(0) = 0, y₂(0) = 0, y₂'(0) = 1`; its zero
/// set does not depend on any normalization.
pub fn standard_delta(p: &ProblemSpec<f64>, lambda: C64, opts: &OdeOptions) -> Result<C64, NumericsError> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let y1 = solve_ivp_between(&p.q, lambda, 0.0, [one, zero], 1.0, opts)?;
    let y2 = solve_ivp_between(&p.q, lambda, 0.0, [zero, one], 1.0, opts)?;
    let u = |r: usize, at0: State, at1: State| {
        let [a1, a0, b1, b0] = p.bc.form(r).map(|z| *z);
        a1 * at0[1] + a0 * at0[0] + b1 * at1[1] + b0 * at1[0]
    };
    let (s1, s2) = ([one, zero], [zero, one]);
    Ok(u(1, s1, y1) * u(2, s2, y2) - u(1, s2, y2) * u(2, s1, y1))
}

/// Rectangle of the λ plane searched for eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumWindow {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub resolution: usize,
    pub max_iterations: usize,
}

impl SpectrumWindow {
    pub fn new(re: (f64, f64), im: (f64, f64), resolution: usize) -> Result<Self, NumericsError> {
        let w =
            SpectrumWindow { re_min: re.0, re_max: re.1, im_min: im.0, im_max: im.1, resolution, max_iterations: 60 };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<(), NumericsError> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|v| v.is_finite());
        if !finite || self.re_min > self.re_max || self.im_min > self.im_max {
            return Err(NumericsError::InvalidWindow("bounds must be finite and ordered".into()));
        }
        if self.resolution < 8 {
            return Err(NumericsError::InvalidWindow(format!("resolution {} is below 8", self.resolution)));
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.re_min == self.re_max || self.im_min == self.im_max
    }

    pub fn contains(&self, z: C64, slack: f64) -> bool {
        z.re >= self.re_min - slack
            && z.re <= self.re_max + slack
            && z.im >= self.im_min - slack
            && z.im <= self.im_max + slack
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub roots: Vec<C64>,
    pub seeds: usize,
    pub failures: usize,
}

/// Newton iteration with a central-difference derivative.
pub fn newton<F>(f: F, start: C64, max_iterations: usize) -> Option<C64>
where
    F: Fn(C64) -> Option<C64>,
{
    let mut z = start;
    for _ in 0..max_iterations {
        let fz = f(z)?;
        if fz.norm() == 0.0 {
            return Some(z);
        }
        let h = 1e-6 * (1.0 + z.norm());
        let d = (f(z + h)? - f(z - h)?) / (2.0 * h);
        if d.norm() == 0.0 || !d.is_finite() {
            return None;
        }
        let step = fz / d;
        z -= step;
        if !z.is_finite() {
            return None;
        }
        if step.norm() <= 1e-13 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    None
}

/// Interior local minima of `|f|` on a `(n+1) × (n+1)` grid padded by one cell.
fn grid_seeds(w: &SpectrumWindow, f: &(dyn Fn(C64) -> Option<C64> + Sync)) -> Vec<C64> {
    let n = w.resolution;
    let dx = (w.re_max - w.re_min) / n as f64;
    let dy = (w.im_max - w.im_min) / n as f64;
    let m = n + 3;
    let point = |a: usize, b: usize| C64::new(w.re_min + (a as f64 - 1.0) * dx, w.im_min + (b as f64 - 1.0) * dy);
    let values: Vec<f64> = (0..m * m)
        .into_par_iter()
        .map(|idx| f(point(idx % m, idx / m)).map(|v| v.norm()).unwrap_or(f64::INFINITY))
        .collect();
    let at = |a: usize, b: usize| values[b * m + a];
    let mut seeds = Vec::new();
    for b in 1..m - 1 {
        for a in 1..m - 1 {
            let v = at(a, b);
            if !v.is_finite() {
                continue;
            }
            let is_min = (-1i64..=1).all(|da| {
                (-1i64..=1)
                    .all(|db| (da == 0 && db == 0) || v <= at((a as i64 + da) as usize, (b as i64 + db) as usize))
            });
            if is_min {
                seeds.push(point(a, b));
            }
        }
    }
    seeds
}

/// Zeros of the standard-basis determinant inside the window.
pub fn find_eigenvalues(
    p: &ProblemSpec<f64>,
    w: &SpectrumWindow,
    opts: &OdeOptions,
) -> Result<Spectrum, NumericsError> {
    w.validate()?;
    if w.is_empty() {
        return Ok(Spectrum { roots: Vec::new(), seeds: 0, failures: 0 });
    }
    let f = |z: C64| standard_delta(p, z, opts).ok();
    let seeds = grid_seeds(w, &f);
    let results: Vec<Option<C64>> = seeds.par_iter().map(|&s| newton(f, s, w.max_iterations)).collect();
    let failures = results.iter().filter(|r| r.is_none()).count();
    if !seeds.is_empty() && failures == seeds.len() {
        return Err(NumericsError::NoConvergence(seeds.len()));
    }
    let mut roots: Vec<C64> = Vec::new();
    for z in results.into_iter().flatten() {
        if w.contains(z, 1e-9) && roots.iter().all(|r| (r - z).norm() > 1e-8) {
            roots.push(z);
        }
    }
    roots.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
    Ok(Spectrum { roots, seeds: seeds.len(), failures })
}
