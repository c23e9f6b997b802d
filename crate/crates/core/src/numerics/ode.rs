//! Adaptive Dormand–Prince 5(4) integrator for two-component complex systems.

use thiserror::Error;

use crate::scalar::C64;

pub type State = [C64; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-12, atol: 1e-14, max_steps: 2_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SolverError {
    #[error("step size underflow at x = {x} (h = {h:e}); try a smaller |λ| or the weighted frame")]
    StepUnderflow { x: f64, h: f64 },
    #[error("step limit reached at x = {x}")]
    StepLimit { x: f64 },
    #[error("non-finite solution at x = {x}")]
    NonFinite { x: f64 },
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

fn axpy(y: &State, h: f64, k: &[State], w: &[f64]) -> State {
    let mut out = *y;
    for (kj, &wj) in k.iter().zip(w) {
        if wj != 0.0 {
            out[0] += kj[0] * (h * wj);
            out[1] += kj[1] * (h * wj);
        }
    }
    out
}

fn norm(y: &State) -> f64 {
    (y[0].norm_sqr() + y[1].norm_sqr()).sqrt()
}

/// Integrates `y' = f(x, y)` from `x0` and returns the state at each of
/// `stops`, which must be ordered in the direction of integration.
pub fn integrate_through<F>(
    f: F,
    x0: f64,
    y0: State,
    stops: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<State>, SolverError>
where
    F: Fn(f64, &State) -> State,
{
    let mut out = Vec::with_capacity(stops.len());
    let mut x = x0;
    let mut y = y0;
    let mut k0 = f(x, &y);
    let mut h_prev: Option<f64> = None;
    let mut steps = 0usize;
    for &target in stops {
        let span = target - x;
        if span == 0.0 {
            out.push(y);
            continue;
        }
        let dir = span.signum();
        let mut h = match h_prev {
            Some(h) => h.abs().min(span.abs()),
            None => {
                let (d0, d1) = (norm(&y), norm(&k0));
                let guess = if d0 > 1e-5 && d1 > 1e-5 { 0.01 * d0 / d1 } else { 1e-6 };
                guess.min(span.abs())
            }
        } * dir;
        loop {
            let remaining = target - x;
            if remaining * dir <= 0.0 {
                break;
            }
            let last = h.abs() >= remaining.abs();
            if last {
                h = remaining;
            }
            if h.abs() < 1e-14 * x.abs().max(1.0) {
                return Err(SolverError::StepUnderflow { x, h });
            }
            steps += 1;
            if steps > opts.max_steps {
                return Err(SolverError::StepLimit { x });
            }
            let mut k = [k0; 7];
            for s in 1..7 {
                let ys = axpy(&y, h, &k[..s], &A[s][..s]);
                k[s] = f(x + C[s] * h, &ys);
            }
            let y_new = axpy(&y, h, &k[..6], &A[6][..6]);
            let err_vec = axpy(&[C64::new(0.0, 0.0); 2], h, &k, &E);
            let mut acc = 0.0;
            for c in 0..2 {
                let sc = opts.atol + opts.rtol * y[c].norm().max(y_new[c].norm());
                acc += (err_vec[c].norm() / sc).powi(2);
            }
            let err = (acc / 2.0).sqrt();
            if !err.is_finite() || !y_new[0].is_finite() || !y_new[1].is_finite() {
                if h.abs() < 1e-14 * x.abs().max(1.0) {
                    return Err(SolverError::NonFinite { x });
                }
                h *= 0.1;
                continue;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                x = if last { target } else { x + h };
                y = y_new;
                k0 = k[6];
                h *= factor;
                if !last {
                    h_prev = Some(h);
                }
            } else {
                h *= factor.min(1.0);
            }
        }
        out.push(y);
    }
    Ok(out)
}

/// Integrates `y' = f(x, y)` from `x0` to `x1`.
pub fn integrate<F>(f: F, x0: f64, y0: State, x1: f64, opts: &OdeOptions) -> Result<State, SolverError>
where
    F: Fn(f64, &State) -> State,
{
    Ok(integrate_through(f, x0, y0, &[x1], opts)?[0])
}
