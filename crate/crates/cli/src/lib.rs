//! `flc`: command-line frontend for the local fractal calculus toolkit.
//!
//! Each subcommand exposes one module of the core library; reports are
//! emitted as CSV (default) or JSON on standard output (or `--out <path>`),
//! diagnostics go to standard error. Exit codes: 0 success, 1 computation
//! error, 2 usage error.

pub mod emit;

use std::fmt::Display;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use emit::{Field, Format};
use flc_core::expr::{diff_ast, eval_ast, parse, to_series, Bindings, ExprAst};
use flc_core::fracops::{
    cantor_staircase, lf_derivative_fd, lf_derivative_iterated, lf_integral, lf_partial_fd, Axis,
    DerivativeEstimate, PartitionScheme, StepSchedule,
};
use flc_core::numeric::linspace;
use flc_core::series::{mvt_locate, taylor2d, taylor_from_derivatives, taylor_remainder, Taylor2dForm};
use flc_core::solvers::{
    pde_solve_with, relax_exact, relax_residual, relax_series, relax_step, DiffusionModel,
    HeatModel, ModelKind, ModelSpec, PdeOptions, RelaxationProblem, WaveModel,
};
use flc_core::special::{fractal_pow, gamma, ml_semigroup_defect, FractalOrder};
use flc_core::analysis::{hoelder_fit, lf_continuity_check, lf_continuity_check_2d};

/// Core operations a subcommand can reach; the dispatch table below is the
/// coverage contract and is checked by test against the full list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Gamma,
    Ml,
    FractalPow,
    MlSemigroupDefect,
    LfDerivativeFd,
    LfDerivativeIterated,
    LfIntegral,
    LfPartialFd,
    CantorStaircase,
    SeriesEval,
    SeriesDerivative,
    SeriesAntiderivative,
    TaylorFromDerivatives,
    TaylorRemainder,
    MvtLocate,
    Taylor2d,
    HoelderFit,
    LfContinuityCheck,
    LfContinuityCheck2d,
    RelaxExact,
    RelaxSeries,
    RelaxResidual,
    RelaxStep,
    PdeSolve,
    Parse,
    DiffAst,
    EvalAst,
    ToSeries,
}

pub const ALL_OPS: [Op; 28] = [
    Op::Gamma,
    Op::Ml,
    Op::FractalPow,
    Op::MlSemigroupDefect,
    Op::LfDerivativeFd,
    Op::LfDerivativeIterated,
    Op::LfIntegral,
    Op::LfPartialFd,
    Op::CantorStaircase,
    Op::SeriesEval,
    Op::SeriesDerivative,
    Op::SeriesAntiderivative,
    Op::TaylorFromDerivatives,
    Op::TaylorRemainder,
    Op::MvtLocate,
    Op::Taylor2d,
    Op::HoelderFit,
    Op::LfContinuityCheck,
    Op::LfContinuityCheck2d,
    Op::RelaxExact,
    Op::RelaxSeries,
    Op::RelaxResidual,
    Op::RelaxStep,
    Op::PdeSolve,
    Op::Parse,
    Op::DiffAst,
    Op::EvalAst,
    Op::ToSeries,
];

/// Which core operations each subcommand can invoke.
pub const DISPATCH: &[(&str, &[Op])] = &[
    ("eval", &[Op::Parse, Op::EvalAst, Op::Ml, Op::FractalPow, Op::Gamma]),
    ("diff", &[Op::Parse, Op::DiffAst]),
    ("integrate", &[Op::Parse, Op::LfIntegral]),
    (
        "derivative",
        &[Op::Parse, Op::LfDerivativeFd, Op::LfDerivativeIterated, Op::LfPartialFd, Op::CantorStaircase],
    ),
    (
        "taylor",
        &[
            Op::Parse,
            Op::ToSeries,
            Op::SeriesEval,
            Op::SeriesDerivative,
            Op::SeriesAntiderivative,
            Op::TaylorFromDerivatives,
            Op::TaylorRemainder,
            Op::MvtLocate,
            Op::Taylor2d,
        ],
    ),
    (
        "hoelder",
        &[Op::Parse, Op::HoelderFit, Op::LfContinuityCheck, Op::LfContinuityCheck2d, Op::CantorStaircase],
    ),
    ("relax", &[Op::RelaxExact, Op::RelaxSeries, Op::RelaxResidual, Op::RelaxStep]),
    ("pde", &[Op::PdeSolve]),
    ("defect", &[Op::MlSemigroupDefect]),
];

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Op { op: &'static str, message: String },
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Op { op, message } => write!(f, "{op}: {message}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Op { .. } => 1,
        }
    }
}

fn op_err<E: Display>(op: &'static str) -> impl Fn(E) -> CliError {
    move |e| CliError::Op { op, message: e.to_string() }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parsed invocation: one subcommand plus its flags.
#[derive(Parser, Debug)]
#[command(name = "flc", version, about = "Local fractal calculus toolkit", max_term_width = 100)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
struct OrderOpt {
    /// Fractal order α in (0, 1]
    #[arg(long, conflicts_with = "alpha_cantor")]
    alpha: Option<f64>,
    /// Shorthand for α = ln2/ln3, the middle-thirds Cantor dimension
    #[arg(long)]
    alpha_cantor: bool,
}

impl OrderOpt {
    fn order(&self) -> Result<FractalOrder<f64>, CliError> {
        if self.alpha_cantor {
            return Ok(FractalOrder::cantor());
        }
        match self.alpha {
            Some(a) => {
                FractalOrder::new(a).map_err(|e| usage(format!("invalid --alpha: {e}")))
            }
            None => Err(usage("one of --alpha <real> or --alpha-cantor is required")),
        }
    }
}

#[derive(Args, Debug, Clone)]
struct OutputOpt {
    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the report to this path instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct ScheduleOpt {
    /// Largest finite-difference step
    #[arg(long, default_value_t = 0.1)]
    h0: f64,
    /// Geometric shrink factor between steps
    #[arg(long, default_value_t = 0.5)]
    step_ratio: f64,
    /// Number of shrinking steps
    #[arg(long, default_value_t = 20)]
    step_count: usize,
}

impl ScheduleOpt {
    fn schedule(&self) -> StepSchedule<f64> {
        StepSchedule { h0: self.h0, ratio: self.step_ratio, count: self.step_count }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate an expression (or Γ(x) via --gamma) at given bindings
    Eval(EvalArgs),
    /// Differentiate an expression by the rule table and print it
    Diff(DiffArgs),
    /// Fractal integral over a uniform or Cantor partition
    Integrate(IntegrateArgs),
    /// Finite-difference fractal derivatives (pointwise, iterated, partial)
    Derivative(DerivativeArgs),
    /// Fractal Taylor series: expand, differentiate, evaluate, remainders
    Taylor(TaylorArgs),
    /// Hölder exponent estimation and α-continuity checks
    Hoelder(HoelderArgs),
    /// The fractal relaxation equation y^(α) + c^α·y = 0
    Relax(RelaxArgs),
    /// Explicit schemes for fractal heat, wave, and diffusion models
    Pde(PdeArgs),
    /// Mittag-Leffler semigroup defect |E_α((x+y)^α) − E_α(x^α)E_α(y^α)|
    Defect(DefectArgs),
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    order: OrderOpt,
    /// Expression over x, t, E(k*v^a), v^(k*a), G(k,j)
    #[arg(long)]
    expr: Option<String>,
    /// Evaluate the gamma function at this argument instead
    #[arg(long, conflicts_with = "expr", allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Binding for the variable x
    #[arg(long, allow_negative_numbers = true)]
    x: Option<f64>,
    /// Binding for the variable t
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    #[command(flatten)]
    output: OutputOpt,
}

#[derive(Args, Debug)]
pub struct DiffArgs {
    /// Expression to differentiate
    #[arg(long)]
    expr: String,
    #[command(flatten)]
    output: OutputOpt,
}

#[derive(Args, Debug)]
pub struct IntegrateArgs {
    #[command(flatten)]
    order: OrderOpt,
    /// Integrand expression in x
    #[arg(long)]
    expr: Option<String>,
    /// Constant integrand
    #[arg(long, conflicts_with = "expr", allow_negative_numbers = true)]
    r#const: Option<f64>,
    /// Lower integration bound
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    a: f64,
    /// Upper integration bound
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    b: f64,
    /// Uniform partition with N cells
    #[arg(long)]
    uniform: Option<usize>,
    /// Cantor partition at this stage
    #[arg(long)]
    cantor: Option<u32>,
    /// Alias for --cantor (pairs with --alpha-cantor)
    #[arg(long, conflicts_with = "cantor")]
    stage: Option<u32>,
    /// Cantor construction ratio in (0, 1/2]
    #[arg(long, default_value_t = 1.0 / 3.0)]
    ratio: f64,
    #[command(flatten)]
    output: OutputOpt,
}

#[derive(Args, Debug)]
pub struct DerivativeArgs {
    #[command(flatten)]
    order: OrderOpt,
    /// Function as an expression in one variable
    #[arg(long)]
    expr: Option<String>,
    /// Use the Cantor staircase at this stage as the function
    #[arg(long, conflicts_with = "expr")]
    staircase: Option<u32>,
    /// Built-in two-variable function: product | exp-sum | pow-sum
    #[arg(long, conflicts_with_all = ["expr", "staircase"])]
    fn2: Option<String>,
    /// Base point x₀ for one-variable derivatives
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    x0: f64,
    /// Apply the derivative this many times (1 or 2)
    #[arg(long, default_value_t = 1)]
    times: usize,
    /// Base point "x,y" for partial derivatives
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    /// Differentiation axes for --fn2, e.g. "x", "y", "x,y", "x,x"
    #[arg(long)]
    axes: Option<String>,
    #[command(flatten)]
    sched: ScheduleOpt,
    #[command(flatten)]
    output: OutputOpt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaylorOp {
    /// Lower an expression to its fractal series about 0
    Series,
    /// Term-wise series derivative
    Diff,
    /// Term-wise series antiderivative
    Anti,
    /// Evaluate the lowered series at --x
    Eval,
    /// Remainder f(x) − S_n(x) at --x
    Remainder,
    /// Build a series from a ladder of α-derivatives at --x0
    FromDerivs,
    /// Two-variable expansion from a built-in derivative ladder
    TwoVar,
    /// Locate a mean-value witness ξ in (x0, x)
    Mvt,
}

#[derive(Args, Debug)]
pub struct TaylorArgs {
    #[command(flatten)]
    order: OrderOpt,
    /// Which series operation to run
    #[arg(long, value_enum)]
    op: TaylorOp,
    /// Source expression (series, diff, anti, eval, remainder, mvt)
    #[arg(long)]
    expr: Option<String>,
    /// Truncation degree n (coefficients 0..=n)
    #[arg(long, default_value_t = 8)]
    degree: usize,
    /// Expansion center (from-derivs) or witness-interval start (mvt)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    x0: f64,
    /// Evaluation point
    #[arg(long, allow_negative_numbers = true)]
    x: Option<f64>,
    /// Comma-separated derivative ladder d0,d1,… (from-derivs)
    #[arg(long, allow_hyphen_values = true)]
    derivs: Option<String>,
    /// Built-in two-variable ladder: ones | exp-sum | product
    #[arg(long)]
    fn2: Option<String>,
    /// Two-variable expansion center "x,y"
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
    #[command(flatten)]
    output: OutputOpt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HoelderOp {
    /// Estimate the Hölder exponent and constant on [a, b]
    Fit,
    /// Check |f(x)−f(x₀)| ≤ C·|x−x₀|^α around --x0
    Check,
    /// Two-variable continuity check around --point
    Check2d,
}

#[derive(Args, Debug)]
pub struct HoelderArgs {
    #[command(flatten)]
    order: OrderOpt,
    #[arg(long, value_enum)]
    op: HoelderOp,
    /// Function as an expression in one variable
    #[arg(long)]
    expr: Option<String>,
    /// Use the Cantor staircase at this stage as the function
    #[arg(long, conflicts_with = "expr")]
    staircase: Option<u32>,
    /// Built-in two-variable function for check2d: product | exp-sum | pow-sum
    #[arg(long, conflicts_with_all = ["expr", "staircase"])]
    fn2: Option<String>,
    /// Fit interval start
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    a: f64,
    /// Fit interval end
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    b: f64,
    /// Sample budget for the fit
    #[arg(long, default_value_t = 4096)]
    samples: usize,
    /// Center for the continuity check
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    x0: f64,
    /// Center "x,y" for check2d
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    /// Hölder constant C the check tests against
    #[arg(long)]
    bound: Option<f64>,
    /// Comma-separated scales δ for the check fan
    #[arg(long, default_value = "0.1,0.01,0.001,0.0001")]
    deltas: String,
    #[command(flatten)]
    output: OutputOpt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RelaxMethod {
    /// Closed form y₀·E_α(−(c·t)^α)
    Exact,
    /// Explicit Euler steps of the fractal stencil
    Euler,
    /// Taylor-series solution about --t0
    Series,
    /// Term-wise ODE residual of the series solution
    Residual,
}

#[derive(Args, Debug)]
pub struct RelaxArgs {
    #[command(flatten)]
    order: OrderOpt,
    #[arg(long, value_enum, default_value_t = RelaxMethod::Exact)]
    method: RelaxMethod,
    /// Rate constant c > 0
    #[arg(long)]
    c: f64,
    /// Initial value y(0)
    #[arg(long, allow_negative_numbers = true)]
    y0: f64,
    /// End of the time window
    #[arg(long, default_value_t = 1.0)]
    t_max: f64,
    /// Number of output intervals (exact) — samples t = linspace(0, t-max, steps+1)
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Euler step size
    #[arg(long)]
    dt: Option<f64>,
    /// Series expansion center
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t0: f64,
    /// Series truncation degree
    #[arg(long, default_value_t = 12)]
    degree: usize,
    #[command(flatten)]
    output: OutputOpt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PdeModel {
    /// Rod conduction with zero α-flux and Robin ends
    Heat,
    /// First-order-in-time wave motion driven by an initial rate
    Wave,
    /// Free diffusion of an initial profile
    Diffusion,
}

#[derive(Args, Debug)]
pub struct PdeArgs {
    #[command(flatten)]
    order: OrderOpt,
    #[arg(long, value_enum)]
    model: PdeModel,
    /// Number of space nodes
    #[arg(long, default_value_t = 101)]
    nx: usize,
    /// Number of time nodes (including t = 0)
    #[arg(long, default_value_t = 11)]
    nt: usize,
    /// End of the time window
    #[arg(long, default_value_t = 0.1)]
    t_max: f64,
    /// Left edge of the space domain (wave, diffusion)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    x_min: f64,
    /// Right edge of the space domain (wave, diffusion)
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    x_max: f64,
    /// Rod length L (heat; the grid spans [0, L])
    #[arg(long, default_value_t = 1.0)]
    length: f64,
    /// Fractal diffusivity κ multiplying the heat time derivative
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Conductivity k in the Robin row (heat)
    #[arg(long, default_value_t = 1.0)]
    conductivity: f64,
    /// Transfer coefficient h at x = L (heat); 0 insulates
    #[arg(long, default_value_t = 1.0)]
    transfer: f64,
    /// Ambient temperature y_∞ (heat)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    ambient: f64,
    /// Uniform initial temperature y_i (heat)
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    initial_temp: f64,
    /// Diffusivity a^{2α} (diffusion)
    #[arg(long, default_value_t = 1.0)]
    a2alpha: f64,
    /// Gaussian profile width; defaults to a twentieth of the span
    #[arg(long)]
    sigma: Option<f64>,
    /// Gaussian profile center; defaults to the domain midpoint
    #[arg(long, allow_negative_numbers = true)]
    center: Option<f64>,
    /// Gaussian profile amplitude
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    amplitude: f64,
    /// Waive the r ≤ 1/2 stability precondition
    #[arg(long)]
    allow_unstable: bool,
    #[command(flatten)]
    output: OutputOpt,
}

#[derive(Args, Debug)]
pub struct DefectArgs {
    #[command(flatten)]
    order: OrderOpt,
    #[arg(long, allow_negative_numbers = true)]
    x: f64,
    #[arg(long, allow_negative_numbers = true)]
    y: f64,
    #[command(flatten)]
    output: OutputOpt,
}

/// Finished report: the bytes to write and where to put them.
pub struct Emitted {
    pub text: String,
    pub out: Option<PathBuf>,
}

pub fn execute(cfg: RunConfig) -> Result<Emitted, CliError> {
    match cfg.command {
        Command::Eval(args) => eval_cmd(args),
        Command::Diff(args) => diff_cmd(args),
        Command::Integrate(args) => integrate_cmd(args),
        Command::Derivative(args) => derivative_cmd(args),
        Command::Taylor(args) => taylor_cmd(args),
        Command::Hoelder(args) => hoelder_cmd(args),
        Command::Relax(args) => relax_cmd(args),
        Command::Pde(args) => pde_cmd(args),
        Command::Defect(args) => defect_cmd(args),
    }
}

fn parse_expr(text: &str) -> Result<ExprAst<f64>, CliError> {
    parse(text).map_err(op_err("parse"))
}

fn parse_list(flag: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("{flag}: '{part}' is not a number")))
        })
        .collect()
}

fn parse_pair(flag: &str, text: &str) -> Result<(f64, f64), CliError> {
    let parts = parse_list(flag, text)?;
    match parts.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(usage(format!("{flag} expects exactly two comma-separated numbers"))),
    }
}

fn fn2_by_name(name: &str, alpha: f64) -> Result<Box<dyn Fn(f64, f64) -> f64>, CliError> {
    match name {
        "product" => Ok(Box::new(|x, y| x * y)),
        "exp-sum" => Ok(Box::new(|x: f64, y: f64| (x + y).exp())),
        "pow-sum" => Ok(Box::new(move |x, y| {
            match (fractal_pow(x, alpha), fractal_pow(y, alpha)) {
                (Ok(a), Ok(b)) => a + b,
                _ => f64::NAN,
            }
        })),
        _ => Err(usage(format!("unknown --fn2 '{name}'; expected product | exp-sum | pow-sum"))),
    }
}

/// Built-in ladders of mixed α-derivatives at the center, indexed (i, j).
fn oracle_by_name(
    name: &str,
    center: (f64, f64),
) -> Result<Box<dyn Fn(usize, usize) -> f64>, CliError> {
    let (cx, cy) = center;
    match name {
        "ones" => Ok(Box::new(|_, _| 1.0)),
        "exp-sum" => Ok(Box::new(move |_, _| (cx + cy).exp())),
        "product" => Ok(Box::new(move |i, j| match (i, j) {
            (0, 0) => cx * cy,
            (1, 0) => cy,
            (0, 1) => cx,
            (1, 1) => 1.0,
            _ => 0.0,
        })),
        _ => Err(usage(format!("unknown --fn2 '{name}'; expected ones | exp-sum | product"))),
    }
}

fn derivative_report(format: Format, sched: StepSchedule<f64>, est: &DerivativeEstimate<f64>) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from("step,h,value\n");
            let mut h = sched.h0;
            for (k, &v) in est.per_step_values.iter().enumerate() {
                out.push_str(&format!("{k},{},{}\n", emit::fmt_real(h), emit::fmt_real(v)));
                h *= sched.ratio;
            }
            out
        }
        Format::Json => {
            let steps: Vec<String> = est.per_step_values.iter().map(|&v| emit::fmt_real(v)).collect();
            format!(
                "{{\"value\":{},\"converged\":{},\"per_step_values\":[{}]}}\n",
                emit::fmt_real(est.value),
                if est.converged { "true" } else { "false" },
                steps.join(",")
            )
        }
    }
}

fn eval_cmd(args: EvalArgs) -> Result<Emitted, CliError> {
    let order = args.order.order()?;
    let text = if let Some(g) = args.gamma {
        let value = gamma(g).map_err(op_err("gamma"))?;
        emit::scalar(args.output.format, "value", value)
    } else {
        let source = args
            .expr
            .as_deref()
            .ok_or_else(|| usage("eval requires --expr <string> or --gamma <real>"))?;
        let ast = parse_expr(source)?;
        let bindings = Bindings { x: args.x, t: args.t };
        let value = eval_ast(&ast, &bindings, order).map_err(op_err("eval_ast"))?;
        emit::scalar(args.output.format, "value", value)
    };
    Ok(Emitted { text, out: args.output.out })
}

fn diff_cmd(args: DiffArgs) -> Result<Emitted, CliError> {
    let ast = parse_expr(&args.expr)?;
    let d = diff_ast(&ast).map_err(op_err("diff_ast"))?;
    let text = match args.output.format {
        Format::Csv => format!("{d}\n"),
        Format::Json => format!("{{\"expr\":\"{d}\"}}\n"),
    };
    Ok(Emitted { text, out: args.output.out })
}

fn integrate_cmd(args: IntegrateArgs) -> Result<Emitted, CliError> {
    let order = args.order.order()?;
    let stage = args.cantor.or(args.stage);
    let part = match (args.uniform, stage) {
        (Some(cells), None) => PartitionScheme::uniform(cells),
        (None, Some(stage)) => PartitionScheme::cantor(stage, args.ratio),
        _ => return Err(usage("integrate requires exactly one of --uniform <N> or --cantor/--stage <stage>")),
    };
    let ast = match (&args.expr, args.r#const) {
        (Some(text), None) => Some(parse_expr(text)?),
        (None, Some(_)) => None,
        _ => return Err(usage("integrate requires exactly one of --expr or --const")),
    };
    let constant = args.r#const.unwrap_or(0.0);
    let f = move |x: f64| match &ast {
        Some(ast) => eval_ast(ast, &Bindings::x(x), order).unwrap_or(f64::NAN),
        None => constant,
    };
    let est = lf_integral(f, args.a, args.b, order, part).map_err(op_err("lf_integral"))?;
    let text = emit::record(
        args.output.format,
        &[("value", Field::Real(est.value)), ("divergence_warning", Field::Bool(est.divergence_warning))],
    );
    Ok(Emitted { text, out: args.output.out })
}

fn derivative_cmd(args: DerivativeArgs) -> Result<Emitted, CliError> {
    let order = args.order.order()?;
    let sched = args.sched.schedule();
    let est = if let Some(name) = &args.fn2 {
        let point_text = args
            .point
            .as_deref()
            .ok_or_else(|| usage("--fn2 requires --point <x,y>"))?;
        let point = parse_pair("--point", point_text)?;
        let axes_text = args
            .axes
            .as_deref()
            .ok_or_else(|| usage("--fn2 requires --axes <list>, e.g. x | y | x,y | x,x"))?;
        let axes: Vec<Axis> = axes_text
            .split(',')
            .map(|part| match part.trim() {
                "x" => Ok(Axis::X),
                "y" => Ok(Axis::Y),
                other => Err(usage(format!("--axes: '{other}' is not x or y"))),
            })
            .collect::<Result<_, _>>()?;
        let f = fn2_by_name(name, order.alpha())?;
        lf_partial_fd(&*f, point, order, &axes, sched).map_err(op_err("lf_partial_fd"))?
    } else if let Some(stage) = args.staircase {
        let f = move |x: f64| cantor_staircase(x, stage).unwrap_or(f64::NAN);
        match args.times {
            1 => lf_derivative_fd(f, args.x0, order, sched).map_err(op_err("lf_derivative_fd"))?,
            times => lf_derivative_iterated(f, args.x0, order, times, sched)
                .map_err(op_err("lf_derivative_iterated"))?,
        }
    } else {
        let source = args
            .expr
            .as_deref()
            .ok_or_else(|| usage("derivative requires one of --expr, --staircase, --fn2"))?;
        let ast = parse_expr(source)?;
        let f = move |x: f64| eval_ast(&ast, &Bindings::x(x), order).unwrap_or(f64::NAN);
        match args.times {
            1 => lf_derivative_fd(f, args.x0, order, sched).map_err(op_err("lf_derivative_fd"))?,
            times => lf_derivative_iterated(f, args.x0, order, times, sched)
                .map_err(op_err("lf_derivative_iterated"))?,
        }
    };
    let text = derivative_report(args.output.format, sched, &est);
    Ok(Emitted { text, out: args.output.out })
}

fn taylor_cmd(args: TaylorArgs) -> Result<Emitted, CliError> {
    let order = args.order.order()?;
    let format = args.output.format;
    let expr_ast = |flag: &str| -> Result<ExprAst<f64>, CliError> {
        let source = args
            .expr
            .as_deref()
            .ok_or_else(|| usage(format!("taylor --op {flag} requires --expr")))?;
        parse_expr(source)
    };
    let need_x = || args.x.ok_or_else(|| usage("this taylor op requires --x <real>"));
    let text = match args.op {
        TaylorOp::Series => {
            let s = to_series(&expr_ast("series")?, order, args.degree).map_err(op_err("to_series"))?;
            emit::series(format, &s)
        }
        TaylorOp::Diff => {
            let s = to_series(&expr_ast("diff")?, order, args.degree).map_err(op_err("to_series"))?;
            emit::series(format, &s.derivative())
        }
        TaylorOp::Anti => {
            let s = to_series(&expr_ast("anti")?, order, args.degree).map_err(op_err("to_series"))?;
            emit::series(format, &s.antiderivative())
        }
        TaylorOp::Eval => {
            let s = to_series(&expr_ast("eval")?, order, args.degree).map_err(op_err("to_series"))?;
            let value = s.eval(need_x()?).map_err(op_err("series_eval"))?;
            emit::scalar(format, "value", value)
        }
        TaylorOp::Remainder => {
            let ast = expr_ast("remainder")?;
            let s = to_series(&ast, order, args.degree).map_err(op_err("to_series"))?;
            let f = |x: f64| eval_ast(&ast, &Bindings::x(x), order).unwrap_or(f64::NAN);
            let value = taylor_remainder(f, &s, need_x()?).map_err(op_err("taylor_remainder"))?;
            emit::scalar(format, "remainder", value)
        }
        TaylorOp::FromDerivs => {
            let list = args
                .derivs
                .as_deref()
                .ok_or_else(|| usage("taylor --op from-derivs requires --derivs <d0,d1,…>"))?;
            let derivs = parse_list("--derivs", list)?;
            let s = taylor_from_derivatives(&derivs, order, args.x0)
                .map_err(op_err("taylor_from_derivatives"))?;
            emit::series(format, &s)
        }
        TaylorOp::TwoVar => {
            let name = args
                .fn2
                .as_deref()
                .ok_or_else(|| usage("taylor --op two-var requires --fn2 <name>"))?;
            let center = match args.center.as_deref() {
                Some(text) => parse_pair("--center", text)?,
                None => (0.0, 0.0),
            };
            let oracle = oracle_by_name(name, center)?;
            let s = taylor2d(&*oracle, center, order, args.degree, Taylor2dForm::Normalized)
                .map_err(op_err("taylor2d"))?;
            emit::series2d(format, &s)
        }
        TaylorOp::Mvt => {
            let ast = expr_ast("mvt")?;
            let d = diff_ast(&ast).map_err(op_err("diff_ast"))?;
            let f = |x: f64| eval_ast(&ast, &Bindings::x(x), order).unwrap_or(f64::NAN);
            let falpha = |x: f64| eval_ast(&d, &Bindings::x(x), order).unwrap_or(f64::NAN);
            let witness =
                mvt_locate(f, falpha, args.x0, need_x()?, order).map_err(op_err("mvt_locate"))?;
            emit::record(
                format,
                &[("xi", Field::Real(witness.xi)), ("residual", Field::Real(witness.residual))],
            )
        }
    };
    Ok(Emitted { text, out: args.output.out })
}

fn hoelder_cmd(args: HoelderArgs) -> Result<Emitted, CliError> {
    let format = args.output.format;
    let one_var = |order: FractalOrder<f64>| -> Result<Box<dyn Fn(f64) -> f64>, CliError> {
        if let Some(stage) = args.staircase {
            Ok(Box::new(move |x| cantor_staircase(x, stage).unwrap_or(f64::NAN)))
        } else {
            let source = args
                .expr
                .as_deref()
                .ok_or_else(|| usage("hoelder requires one of --expr or --staircase"))?;
            let ast = parse_expr(source)?;
            Ok(Box::new(move |x| eval_ast(&ast, &Bindings::x(x), order).unwrap_or(f64::NAN)))
        }
    };
    let text = match args.op {
        HoelderOp::Fit => {
            // the fit estimates the exponent itself; α enters only through
            // expression evaluation, defaulting to classical
            let order = if args.order.alpha.is_some() || args.order.alpha_cantor {
                args.order.order()?
            } else {
                FractalOrder::classical()
            };
            let f = one_var(order)?;
            let est = hoelder_fit(&*f, args.a, args.b, args.samples).map_err(op_err("hoelder_fit"))?;
            emit::record(
                format,
                &[
                    ("exponent_hat", Field::Real(est.exponent_hat)),
                    ("constant_hat", Field::Real(est.constant_hat)),
                    ("fit_residual", Field::Real(est.fit_residual)),
                    ("pairs_used", Field::Int(est.pairs_used as u64)),
                ],
            )
        }
        HoelderOp::Check => {
            let order = args.order.order()?;
            let bound = args.bound.ok_or_else(|| usage("hoelder --op check requires --bound <C>"))?;
            let deltas = parse_list("--deltas", &args.deltas)?;
            let f = one_var(order)?;
            let report = lf_continuity_check(&*f, args.x0, order, &deltas, bound)
                .map_err(op_err("lf_continuity_check"))?;
            emit::record(
                format,
                &[
                    ("is_continuous", Field::Bool(report.is_continuous)),
                    ("worst_x", Field::Real(report.worst_pair.1)),
                    ("worst_ratio", Field::Real(report.worst_ratio)),
                ],
            )
        }
        HoelderOp::Check2d => {
            let order = args.order.order()?;
            let bound =
                args.bound.ok_or_else(|| usage("hoelder --op check2d requires --bound <C>"))?;
            let name = args
                .fn2
                .as_deref()
                .ok_or_else(|| usage("hoelder --op check2d requires --fn2 <name>"))?;
            let center = match args.point.as_deref() {
                Some(text) => parse_pair("--point", text)?,
                None => (0.5, 0.5),
            };
            let deltas = parse_list("--deltas", &args.deltas)?;
            let f = fn2_by_name(name, order.alpha())?;
            let report = lf_continuity_check_2d(&*f, center, order, &deltas, bound)
                .map_err(op_err("lf_continuity_check_2d"))?;
            emit::record(
                format,
                &[
                    ("is_continuous", Field::Bool(report.is_continuous)),
                    ("worst_x", Field::Real(report.worst_pair.0)),
                    ("worst_y", Field::Real(report.worst_pair.1)),
                    ("worst_ratio", Field::Real(report.worst_ratio)),
                ],
            )
        }
    };
    Ok(Emitted { text, out: args.output.out })
}

fn relax_cmd(args: RelaxArgs) -> Result<Emitted, CliError> {
    let order = args.order.order()?;
    let format = args.output.format;
    let prob = RelaxationProblem::new(order, args.c, args.y0)
        .map_err(|e| usage(format!("invalid relaxation problem: {e}")))?;
    if !(args.t_max.is_finite() && args.t_max > 0.0) {
        return Err(usage("--t-max must be positive"));
    }
    let text = match args.method {
        RelaxMethod::Exact => {
            if args.steps == 0 {
                return Err(usage("--steps must be at least 1"));
            }
            let grid = linspace(0.0, args.t_max, args.steps + 1);
            let values = relax_exact(&prob, &grid).map_err(op_err("relax_exact"))?;
            emit::table2(format, ("t", "y"), grid.into_iter().zip(values), &[])
        }
        RelaxMethod::Euler => {
            let dt = args.dt.ok_or_else(|| usage("relax --method euler requires --dt"))?;
            let step = relax_step(&prob, dt, args.t_max).map_err(op_err("relax_step"))?;
            let rows = step
                .values
                .iter()
                .enumerate()
                .map(move |(n, &y)| (n as f64 * dt, y))
                .collect::<Vec<_>>();
            emit::table2(format, ("t", "y"), rows.into_iter(), &[("stable", step.stable)])
        }
        RelaxMethod::Series => {
            let s = relax_series(&prob, args.t0, args.degree).map_err(op_err("relax_series"))?;
            emit::series(format, &s)
        }
        RelaxMethod::Residual => {
            let s = relax_series(&prob, args.t0, args.degree).map_err(op_err("relax_series"))?;
            let res = relax_residual(&s, args.c, order);
            emit::indexed(format, "residual", &res)
        }
    };
    Ok(Emitted { text, out: args.output.out })
}

fn pde_cmd(args: PdeArgs) -> Result<Emitted, CliError> {
    let order = args.order.order()?;
    if args.nt == 0 {
        return Err(usage("--nt must be at least 1"));
    }
    if !(args.t_max.is_finite() && args.t_max >= 0.0) {
        return Err(usage("--t-max must be nonnegative"));
    }
    let (lo, hi) = match args.model {
        PdeModel::Heat => (0.0, args.length),
        _ => (args.x_min, args.x_max),
    };
    if !lo.is_finite() || !hi.is_finite() || hi <= lo {
        return Err(usage("space domain must have positive width"));
    }
    let x_nodes = linspace(lo, hi, args.nx);
    let t_nodes = linspace(0.0, args.t_max, args.nt);
    let sigma = args.sigma.unwrap_or((hi - lo) / 20.0);
    let center = args.center.unwrap_or((lo + hi) / 2.0);
    let amplitude = args.amplitude;
    let profile = move |x: f64| {
        let z = (x - center) / sigma;
        amplitude * (-0.5 * z * z).exp()
    };
    let opts = PdeOptions { allow_unstable: args.allow_unstable };
    let kind = match args.model {
        PdeModel::Heat => ModelKind::Heat(HeatModel {
            kappa: args.kappa,
            conductivity: args.conductivity,
            transfer: args.transfer,
            ambient: args.ambient,
            initial: args.initial_temp,
            length: args.length,
        }),
        PdeModel::Wave => ModelKind::Wave(WaveModel { initial_rate: &profile, initial: None }),
        PdeModel::Diffusion => {
            ModelKind::Diffusion(DiffusionModel { a2alpha: args.a2alpha, initial: &profile })
        }
    };
    let model = ModelSpec { order, kind };
    let g = pde_solve_with(&model, &x_nodes, &t_nodes, opts).map_err(op_err("pde_solve"))?;
    let text = emit::grid(args.output.format, order.alpha(), &g);
    Ok(Emitted { text, out: args.output.out })
}

fn defect_cmd(args: DefectArgs) -> Result<Emitted, CliError> {
    let order = args.order.order()?;
    let value = ml_semigroup_defect(order, args.x, args.y).map_err(op_err("ml_semigroup_defect"))?;
    let text = emit::scalar(args.output.format, "defect", value);
    Ok(Emitted { text, out: args.output.out })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_core_operation_is_reachable_from_a_subcommand() {
        for op in ALL_OPS {
            let covered = DISPATCH.iter().any(|(_, ops)| ops.contains(&op));
            assert!(covered, "operation {op:?} is not reachable from any subcommand");
        }
    }

    #[test]
    fn dispatch_table_names_match_the_subcommands() {
        use clap::CommandFactory;
        let cmd = RunConfig::command();
        let declared: Vec<&str> = cmd.get_subcommands().map(|c| c.get_name()).collect();
        for (name, _) in DISPATCH {
            assert!(declared.contains(name), "dispatch row {name} has no subcommand");
        }
        assert_eq!(declared.len(), DISPATCH.len());
    }
}
