//! Local fractal calculus on fractal supports of dimension α ∈ (0, 1].
//!
//! The toolkit is organised around one scalar abstraction, [`Real`]
//! (implemented by `f32` and `f64`), and seven concerns:
//!
//! - [`numeric`]: compensated and pairwise summation, line fitting, a small
//!   deterministic generator, grid helpers.
//! - [`special`]: the gamma function, validated fractal orders α, the
//!   one-parameter Mittag-Leffler function E_α, fractal powers, and the
//!   semigroup defect E_α(x+y) − E_α(x)·E_α(y) that separates α < 1 from the
//!   classical exponential.
//! - [`fracops`]: pointwise fractal derivatives via shrinking finite
//!   differences, fractal integrals over uniform and Cantor partitions, mixed
//!   partials, and the Cantor staircase.
//! - [`series`]: finite fractal Taylor series Σ aₖ·(x−x₀)^{kα} with exact
//!   term-by-term derivative and antiderivative, remainders, a mean-value
//!   witness locator, and two-variable expansions.
//! - [`analysis`]: Hölder exponent estimation from dyadic oscillations and
//!   α-continuity checks in one and two variables.
//! - [`solvers`]: the fractal relaxation equation (exact, series, and Euler
//!   forms) and explicit finite-difference schemes for fractal heat, wave,
//!   and diffusion problems.
//! - [`expr`]: a tiny expression language over the basis {x^{kα}, E_α(kx^α)}
//!   with a parser, printer, rule-table differentiator, evaluator, and
//!   series lowering.
//!
//! The `*64` and `*32` aliases fix the scalar for the common entry points.

pub mod analysis;
pub mod expr;
pub mod fracops;
pub mod numeric;
pub mod series;
pub mod solvers;
pub mod special;

pub use numeric::{cst, Real};

pub type FractalOrder64 = special::FractalOrder<f64>;
pub type FractalOrder32 = special::FractalOrder<f32>;
pub type FractalSeries64 = series::FractalSeries<f64>;
pub type FractalSeries32 = series::FractalSeries<f32>;
pub type FractalSeries2D64 = series::FractalSeries2D<f64>;
pub type FractalSeries2D32 = series::FractalSeries2D<f32>;
pub type ExprAst64 = expr::ExprAst<f64>;
pub type ExprAst32 = expr::ExprAst<f32>;
pub type GridFunction64 = solvers::GridFunction<f64>;
pub type GridFunction32 = solvers::GridFunction<f32>;
