use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use specreg_core::gen::{random_problem, seeded};
use specreg_core::io::{parse_problem, problem_to_json, spectrum_to_json, to_canonical_string, verdict_to_json};
use specreg_core::numerics::{DEFAULT_GRID_POINTS, MIN_FIT_POINTS};
use specreg_core::{
    build_g_table, classify, find_eigenvalues, remainder_probe, AnyExpansion, AnyProblem, Backend, ClassifierError,
    Expansion, HalfPlane, InputError, Normalization, NumericsError, OdeOptions, ProbeOptions, RouteChoice,
    SpectrumWindow, C64,
};

#[derive(Parser)]
#[command(name = "specreg", version, about = "Regularity classification and asymptotics for y'' + q y = λ² y")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the boundary conditions of a problem file.
    Classify {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = RouteArg::Both)]
        route: RouteArg,
        /// Include the per-condition evidence records.
        #[arg(long)]
        evidence: bool,
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
    },
    /// Dump the expansion coefficients g and the δ table.
    Expand {
        input: PathBuf,
        /// Expansion order; defaults to the file's order cap.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, value_enum, default_value_t = NormalizationArg::ZeroAtOrigin)]
        normalization: NormalizationArg,
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Measure remainder decay against numerical solutions.
    Validate {
        input: PathBuf,
        #[arg(long, default_value_t = 20.0)]
        lambda_min: f64,
        #[arg(long, default_value_t = 160.0)]
        lambda_max: f64,
        /// Number of geometrically spaced |λ| samples per direction.
        #[arg(long, default_value_t = 4)]
        points: usize,
        /// Truncation order m of the series.
        #[arg(long, default_value_t = 1)]
        order: usize,
        /// Direction of the sample rays, in degrees; the opposite ray is sampled too.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        angle: f64,
        /// Overrides the default radius R = 10 (1 + max |q|).
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid_points: usize,
        /// Sample table as CSV.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Locate eigenvalues in a rectangle of the λ plane.
    Spectrum {
        input: PathBuf,
        /// Real range `a..b`.
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        re: (f64, f64),
        /// Imaginary range `c..d`.
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        im: (f64, f64),
        /// Seed grid resolution per axis.
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print a seeded random problem file; its intended class goes to stderr.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        order_cap: usize,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Theorem,
    Delta,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Rational,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizationArg {
    ZeroAtOrigin,
    PlainDerivative,
}

impl From<RouteArg> for RouteChoice {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Theorem => RouteChoice::Theorem,
            RouteArg::Delta => RouteChoice::Delta,
            RouteArg::Both => RouteChoice::Both,
        }
    }
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Rational => Backend::Rational,
            BackendArg::Float => Backend::Float,
        }
    }
}

impl From<NormalizationArg> for Normalization {
    fn from(n: NormalizationArg) -> Self {
        match n {
            NormalizationArg::ZeroAtOrigin => Normalization::ZeroAtOrigin,
            NormalizationArg::PlainDerivative => Normalization::PlainDerivative,
        }
    }
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected `a..b`, got `{s}`"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("`{a}`: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("`{b}`: {e}"))?;
    Ok((a, b))
}

/// A failure and the exit status it maps to.
enum Failure {
    /// Malformed, invalid or degenerate input: exit 2.
    Input(String),
    /// Solver or internal failure: exit 1.
    Internal(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<ClassifierError> for Failure {
    fn from(e: ClassifierError) -> Self {
        match e {
            ClassifierError::Degenerate(_) | ClassifierError::OrderCap(_) | ClassifierError::Tolerance(_) => {
                Failure::Input(e.to_string())
            }
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<NumericsError> for Failure {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::BelowRadius { .. }
            | NumericsError::TooFewSamples(_)
            | NumericsError::InvalidWindow(_)
            | NumericsError::ZeroLambda => Failure::Input(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

fn load(path: &Path, backend: Option<BackendArg>) -> Result<AnyProblem, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse_problem(&text, backend.map(Backend::from)).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Internal(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_classify(input: &Path, route: RouteArg, evidence: bool, backend: Option<BackendArg>) -> Result<(), Failure> {
    let verdict = match load(input, backend)? {
        AnyProblem::Rational(p) => classify(&p, route.into())?,
        AnyProblem::Float(p) => classify(&p, route.into())?,
    };
    emit(&to_canonical_string(&verdict_to_json(&verdict, evidence)), None)
}

fn run_expand(
    input: &Path,
    order: Option<usize>,
    normalization: Normalization,
    backend: Option<BackendArg>,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let problem = load(input, backend)?;
    let cap = problem.m_cap();
    let order = order.unwrap_or(cap);
    if order > cap {
        return Err(Failure::Input(format!("order {order} exceeds the order cap {cap}")));
    }
    let expansion = match &problem {
        AnyProblem::Rational(p) => AnyExpansion::Rational(Expansion::compute(p, order, normalization)?),
        AnyProblem::Float(p) => AnyExpansion::Float(Expansion::compute(p, order, normalization)?),
    };
    emit(&to_canonical_string(&expansion.to_json()), output)
}

struct ValidateArgs {
    lambda_min: f64,
    lambda_max: f64,
    points: usize,
    order: usize,
    angle: f64,
    radius: Option<f64>,
    grid_points: usize,
}

fn run_validate(input: &Path, a: &ValidateArgs, output: Option<&Path>) -> Result<(), Failure> {
    if a.points < MIN_FIT_POINTS {
        return Err(Failure::Input(format!("--points must be at least {MIN_FIT_POINTS}, got {}", a.points)));
    }
    if !(a.lambda_min > 0.0 && a.lambda_max > a.lambda_min && a.lambda_max.is_finite()) {
        return Err(Failure::Input("need 0 < --lambda-min < --lambda-max".into()));
    }
    if a.grid_points < 2 {
        return Err(Failure::Input("--grid-points must be at least 2".into()));
    }
    let problem = load(input, None)?;
    let p = problem.to_f64();
    let g = match &problem {
        AnyProblem::Rational(r) => build_g_table(&r.q, a.order).map_err(|e| Failure::Input(e.to_string()))?.to_f64(),
        AnyProblem::Float(f) => build_g_table(&f.q, a.order).map_err(|e| Failure::Input(e.to_string()))?,
    };
    let dir = C64::from_polar(1.0, a.angle.to_radians());
    let ratio = (a.lambda_max / a.lambda_min).powf(1.0 / (a.points - 1) as f64);
    let radii: Vec<f64> = (0..a.points).map(|k| a.lambda_min * ratio.powi(k as i32)).collect();
    let lambdas: Vec<C64> = [dir, -dir].iter().flat_map(|d| radii.iter().map(move |&r| d * r)).collect();
    let opts = ProbeOptions { grid_points: a.grid_points, radius: a.radius, ode: OdeOptions::default() };
    let report = remainder_probe(&p, &g, &lambdas, &opts)?;

    println!(
        "order m = {}, radius R = {}, predicted slope {}",
        report.order,
        report.radius,
        -(report.order as f64) - 1.0
    );
    for half in [HalfPlane::Right, HalfPlane::Left] {
        for i in 1..=2 {
            for nu in 0..=1 {
                let Some(fit) = report.fit(i, nu, half) else { continue };
                match (fit.below_noise, fit.slope) {
                    (true, _) | (false, None) => println!("i={i} nu={nu} {}: below solver noise", half.name()),
                    (false, Some(s)) => println!("i={i} nu={nu} {}: slope {s:.4}", half.name()),
                }
            }
        }
    }
    for row in &report.determinant {
        // adding +0.0 turns −0.0 into 0.0
        let l = row.lambda + C64::new(0.0, 0.0);
        println!("lambda {}{:+}i: |Δ_num − Δ_asym|/|Δ_num| = {:e}", l.re, l.im, row.relative_error);
    }
    if let Some(path) = output {
        emit(&report.to_csv(), Some(path))?;
    }
    Ok(())
}

fn run_spectrum(
    input: &Path,
    re: (f64, f64),
    im: (f64, f64),
    grid: usize,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let window = SpectrumWindow::new(re, im, grid)?;
    let p = load(input, None)?.to_f64();
    let spectrum = find_eigenvalues(&p, &window, &OdeOptions::default())?;
    emit(&to_canonical_string(&spectrum_to_json(&spectrum.roots)), output)
}

fn run_gen(seed: u64, order_cap: usize, degree: usize, output: Option<&Path>) -> Result<(), Failure> {
    if order_cap < 2 {
        return Err(Failure::Input("--order-cap must be at least 2".into()));
    }
    let generated = random_problem(&mut seeded(seed), order_cap, degree);
    eprintln!("intended class: {}", generated.expected);
    emit(&to_canonical_string(&problem_to_json(&generated.spec)), output)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("SPECREG_THREADS") else { return Ok(()) };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Input(format!("SPECREG_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Internal(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Classify { input, route, evidence, backend } => run_classify(&input, route, evidence, backend),
        Command::Expand { input, order, normalization, backend, output } => {
            run_expand(&input, order, normalization.into(), backend, output.as_deref())
        }
        Command::Validate { input, lambda_min, lambda_max, points, order, angle, radius, grid_points, output } => {
            let args = ValidateArgs { lambda_min, lambda_max, points, order, angle, radius, grid_points };
            run_validate(&input, &args, output.as_deref())
        }
        Command::Spectrum { input, re, im, grid, output } => run_spectrum(&input, re, im, grid, output.as_deref()),
        Command::Gen { seed, order_cap, degree, output } => run_gen(seed, order_cap, degree, output.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
