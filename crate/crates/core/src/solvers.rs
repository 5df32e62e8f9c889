//! The relaxation equation y^{(α)} + c^α·y = 0 solved three ways — exactly as
//! y₀·E_α(−c^α t^α), as its Taylor expansion, and by an explicit stepper —
//! plus explicit space-time schemes for the heat, wave, and diffusion models
//! on fractal space.

use thiserror::Error;

use crate::numeric::{cst, to_f64, Real};
use crate::series::{FractalSeries, SeriesError};
use crate::special::{fractal_pow, ml, FractalOrder, SeriesControl, SpecialError};

/// Relative slack when comparing grid gaps and the stability ratio.
const GRID_RTOL: f64 = 1e-9;

/// Explicit-scheme stability bound, the exact α = 1 CFL value.
const STABILITY_RATIO: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("configuration error: {reason}, got {value}")]
    Config { reason: &'static str, value: f64 },
    #[error("stability violation: {reason} (ratio {ratio})")]
    Stability { reason: &'static str, ratio: f64 },
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// The relaxation problem y^{(α)}(t) + c^α·y(t) = 0, y(0) = y₀, c > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationProblem<T> {
    order: FractalOrder<T>,
    c: T,
    y0: T,
}

impl<T: Real> RelaxationProblem<T> {
    pub fn new(order: FractalOrder<T>, c: T, y0: T) -> Result<Self, SolverError> {
        if !(c.is_finite() && c > T::zero()) {
            return Err(SolverError::Config { reason: "relaxation rate c must be positive", value: to_f64(c) });
        }
        if !y0.is_finite() {
            return Err(SolverError::Config { reason: "initial value must be finite", value: to_f64(y0) });
        }
        Ok(Self { order, c, y0 })
    }

    pub fn order(&self) -> FractalOrder<T> {
        self.order
    }

    pub fn c(&self) -> T {
        self.c
    }

    pub fn y0(&self) -> T {
        self.y0
    }
}

fn validate_time_grid<T: Real>(t_grid: &[T]) -> Result<(), SolverError> {
    if t_grid.is_empty() {
        return Err(SolverError::Config { reason: "time grid must be nonempty", value: 0.0 });
    }
    let mut prev = -T::infinity();
    for &t in t_grid {
        if !(t.is_finite() && t >= T::zero()) {
            return Err(SolverError::Config { reason: "time nodes must be finite and >= 0", value: to_f64(t) });
        }
        if t <= prev {
            return Err(SolverError::Config { reason: "time nodes must be strictly ascending", value: to_f64(t) });
        }
        prev = t;
    }
    Ok(())
}

/// Closed-form solution y(t) = y₀·E_α(−(c·t)^α) on the given grid;
/// y(0) = y₀ exactly.
pub fn relax_exact<T: Real>(prob: &RelaxationProblem<T>, t_grid: &[T]) -> Result<Vec<T>, SolverError> {
    validate_time_grid(t_grid)?;
    let ctl = SeriesControl::default();
    let alpha = prob.order.alpha();
    t_grid
        .iter()
        .map(|&t| {
            let w = -fractal_pow(prob.c * t, alpha)?;
            Ok(prob.y0 * ml(prob.order, w, ctl)?.value)
        })
        .collect()
}

/// Taylor expansion of the solution about t₀ ≥ 0: coefficients
/// a_k = y₀·(−1)^k·c^{kα}·E_α(−(c·t₀)^α)/Γ(1+kα) in the basis (t−t₀)^{kα}.
pub fn relax_series<T: Real>(
    prob: &RelaxationProblem<T>,
    t0: T,
    degree: usize,
) -> Result<FractalSeries<T>, SolverError> {
    if !(t0.is_finite() && t0 >= T::zero()) {
        return Err(SolverError::Config { reason: "expansion center t0 must be >= 0", value: to_f64(t0) });
    }
    let alpha = prob.order.alpha();
    let m = ml(prob.order, -fractal_pow(prob.c * t0, alpha)?, SeriesControl::default())?.value;
    let c_alpha = fractal_pow(prob.c, alpha)?;
    let mut signed_rate = T::one(); // (−c^α)^k
    let mut coeffs = Vec::with_capacity(degree + 1);
    for k in 0..=degree {
        coeffs.push(prob.y0 * signed_rate * m / prob.order.gamma_1p(k));
        signed_rate *= -c_alpha;
    }
    Ok(FractalSeries::new(prob.order, t0, coeffs)?)
}

/// Term-wise residual of the ODE applied to a series: the coefficients of
/// series_derivative(S) + c^α·S, index by index. The trailing coefficient of
/// S has no derivative counterpart and is excluded. A series solves the
/// equation in the rule algebra exactly when every entry vanishes.
///
/// `c` must be positive, as in [`RelaxationProblem`].
pub fn relax_residual<T: Real>(s: &FractalSeries<T>, c: T, order: FractalOrder<T>) -> Vec<T> {
    let c_alpha = c.powf(order.alpha());
    let ds = s.derivative();
    ds.coeffs()
        .iter()
        .zip(s.coeffs())
        .map(|(&d, &a)| d + c_alpha * a)
        .collect()
}

/// Samples of the explicit stepper together with its contraction status.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxStep<T> {
    /// y_n at t = n·dt for every n with n·dt ≤ T, starting at y₀.
    pub values: Vec<T>,
    /// True iff |1 − c^α·dt^α/Γ(1+α)| < 1, the per-step contraction bound.
    pub stable: bool,
}

/// Explicit stepper y_{n+1} = y_n − (c^α·dt^α/Γ(1+α))·y_n from the increment
/// relation Δy ≈ y^{(α)}·(Δt)^α/Γ(1+α); at α = 1 this is forward Euler.
pub fn relax_step<T: Real>(prob: &RelaxationProblem<T>, dt: T, t_max: T) -> Result<RelaxStep<T>, SolverError> {
    if !(dt.is_finite() && dt > T::zero()) {
        return Err(SolverError::Config { reason: "step size dt must be positive", value: to_f64(dt) });
    }
    if !(t_max.is_finite() && t_max >= dt) {
        return Err(SolverError::Config { reason: "horizon requires dt <= T", value: to_f64(t_max) });
    }
    let alpha = prob.order.alpha();
    let rho = fractal_pow(prob.c, alpha)? * dt.powf(alpha) / prob.order.gamma_1p(1);
    if rho >= cst(2.0) {
        return Err(SolverError::Stability {
            reason: "explicit relaxation step diverges in magnitude",
            ratio: to_f64(rho),
        });
    }
    let factor = T::one() - rho;
    let steps = to_f64(t_max / dt * (T::one() + cst(1e-12))).floor() as usize;
    let mut values = Vec::with_capacity(steps + 1);
    let mut y = prob.y0;
    values.push(y);
    for _ in 0..steps {
        y *= factor;
        values.push(y);
    }
    Ok(RelaxStep { values, stable: factor.abs() < T::one() })
}

/// Heat conduction on a rod of length L (model: ∂^{2α}y/∂x^{2α} = κ·∂^α y/∂t^α)
/// with zero α-flux at x = 0, the Robin balance k·∂^α y/∂x^α + h(y − y_∞) = 0
/// at x = L, and uniform initial temperature y_i.
#[derive(Debug, Clone, Copy)]
pub struct HeatModel<T> {
    /// Fractal thermal diffusivity κ > 0 multiplying the time derivative.
    pub kappa: T,
    /// Conductivity k > 0 in the Robin row.
    pub conductivity: T,
    /// Transfer coefficient h ≥ 0; h = 0 insulates the x = L end.
    pub transfer: T,
    /// Ambient temperature y_∞.
    pub ambient: T,
    /// Uniform initial temperature y_i.
    pub initial: T,
    /// Rod length L > 0; the space grid must span [0, L].
    pub length: T,
}

/// Wave motion ∂^α y/∂t^α = ∂^{2α}y/∂x^{2α}, first order in time as the model
/// is stated, driven by the prescribed initial rate ∂^α y/∂t^α|_{t=0} = φ(x).
/// The model gives no condition on y(0, x) itself; callers may supply one,
/// defaulting to 0. Far-field boundaries clamp to 0.
pub struct WaveModel<'a, T> {
    pub initial_rate: &'a dyn Fn(T) -> T,
    pub initial: Option<&'a dyn Fn(T) -> T>,
}

/// Diffusion ∂^α y/∂t^α = a^{2α}·∂^{2α}y/∂x^{2α} with initial profile ϕ(x)
/// and far-field boundaries clamped to 0.
pub struct DiffusionModel<'a, T> {
    pub a2alpha: T,
    pub initial: &'a dyn Fn(T) -> T,
}

pub enum ModelKind<'a, T> {
    Heat(HeatModel<T>),
    Wave(WaveModel<'a, T>),
    Diffusion(DiffusionModel<'a, T>),
}

pub struct ModelSpec<'a, T> {
    pub order: FractalOrder<T>,
    pub kind: ModelKind<'a, T>,
}

/// Space-time samples of a PDE run: `values[n][j]` is u(t_nodes[n], x_nodes[j]).
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    pub x_nodes: Vec<T>,
    pub t_nodes: Vec<T>,
    pub values: Vec<Vec<T>>,
}

/// Solver switches; `allow_unstable` waives the r ≤ 1/2 precondition for
/// stability sweeps (runs still fail if values become non-finite).
#[derive(Debug, Clone, Copy, Default)]
pub struct PdeOptions {
    pub allow_unstable: bool,
}

fn uniform_gap<T: Real>(nodes: &[T], what: &'static str) -> Result<T, SolverError> {
    let gap = nodes[1] - nodes[0];
    if !(gap.is_finite() && gap > T::zero()) {
        return Err(SolverError::Config { reason: what, value: to_f64(gap) });
    }
    for w in nodes.windows(2) {
        let g = w[1] - w[0];
        if (g - gap).abs() > cst::<T>(GRID_RTOL) * gap {
            return Err(SolverError::Config { reason: what, value: to_f64(g) });
        }
    }
    Ok(gap)
}

/// Explicit scheme for the three models with the local fractional stencils —
/// time: Γ(1+α)·(u^{n+1}−u^n)/(Δt)^α; space: Γ(1+α)²·(u_{j+1}−2u_j+u_{j−1})/(Δx)^{2α}
/// — under the stability precondition r = D·Γ(1+α)·(Δt)^α/(Δx)^{2α} ≤ 1/2,
/// where D is the effective diffusivity (1/κ, 1, a^{2α} per model).
pub fn pde_solve<T: Real>(
    model: &ModelSpec<'_, T>,
    x_nodes: &[T],
    t_nodes: &[T],
) -> Result<GridFunction<T>, SolverError> {
    pde_solve_with(model, x_nodes, t_nodes, PdeOptions::default())
}

/// [`pde_solve`] with explicit options.
pub fn pde_solve_with<T: Real>(
    model: &ModelSpec<'_, T>,
    x_nodes: &[T],
    t_nodes: &[T],
    opts: PdeOptions,
) -> Result<GridFunction<T>, SolverError> {
    if x_nodes.len() < 3 {
        return Err(SolverError::Config { reason: "space grid needs at least 3 nodes", value: x_nodes.len() as f64 });
    }
    if t_nodes.is_empty() {
        return Err(SolverError::Config { reason: "time grid must be nonempty", value: 0.0 });
    }
    if t_nodes[0].abs() > cst(1e-12) {
        return Err(SolverError::Config { reason: "time grid must start at 0", value: to_f64(t_nodes[0]) });
    }
    let dx = uniform_gap(x_nodes, "space grid must be uniform and ascending")?;
    let alpha = model.order.alpha();
    let g1a = model.order.gamma_1p(1);

    let diffusivity = match &model.kind {
        ModelKind::Heat(h) => {
            if !(h.kappa.is_finite() && h.kappa > T::zero()) {
                return Err(SolverError::Config { reason: "heat model requires kappa > 0", value: to_f64(h.kappa) });
            }
            if !(h.conductivity.is_finite() && h.conductivity > T::zero()) {
                return Err(SolverError::Config { reason: "heat model requires conductivity > 0", value: to_f64(h.conductivity) });
            }
            if !(h.transfer.is_finite() && h.transfer >= T::zero()) {
                return Err(SolverError::Config { reason: "heat model requires transfer >= 0", value: to_f64(h.transfer) });
            }
            if !(h.ambient.is_finite() && h.initial.is_finite()) {
                return Err(SolverError::Config { reason: "heat model temperatures must be finite", value: to_f64(h.ambient) });
            }
            if !(h.length.is_finite() && h.length > T::zero()) {
                return Err(SolverError::Config { reason: "heat model requires length > 0", value: to_f64(h.length) });
            }
            let tol = cst::<T>(GRID_RTOL) * h.length;
            if x_nodes[0].abs() > tol || (x_nodes[x_nodes.len() - 1] - h.length).abs() > tol {
                return Err(SolverError::Config { reason: "heat grid must span [0, L]", value: to_f64(x_nodes[0]) });
            }
            T::one() / h.kappa
        }
        ModelKind::Wave(_) => T::one(),
        ModelKind::Diffusion(d) => {
            if !(d.a2alpha.is_finite() && d.a2alpha > T::zero()) {
                return Err(SolverError::Config { reason: "diffusion model requires a2alpha > 0", value: to_f64(d.a2alpha) });
            }
            d.a2alpha
        }
    };

    let nx = x_nodes.len();
    let initial: Vec<T> = match &model.kind {
        ModelKind::Heat(h) => vec![h.initial; nx],
        ModelKind::Wave(w) => match w.initial {
            Some(f) => x_nodes.iter().map(|&x| f(x)).collect(),
            None => vec![T::zero(); nx],
        },
        ModelKind::Diffusion(d) => x_nodes.iter().map(|&x| (d.initial)(x)).collect(),
    };
    for &v in &initial {
        if !v.is_finite() {
            return Err(SolverError::Config { reason: "initial profile must be finite", value: to_f64(v) });
        }
    }

    let mut values = Vec::with_capacity(t_nodes.len());
    values.push(initial);
    if t_nodes.len() == 1 {
        return Ok(GridFunction { x_nodes: x_nodes.to_vec(), t_nodes: t_nodes.to_vec(), values });
    }

    let dt = uniform_gap(t_nodes, "time grid must be uniform and ascending")?;
    let r = diffusivity * g1a * dt.powf(alpha) / dx.powf(alpha + alpha);
    if r > cst::<T>(STABILITY_RATIO) + cst(GRID_RTOL) && !opts.allow_unstable {
        return Err(SolverError::Stability {
            reason: "explicit scheme requires D*Gamma(1+alpha)*dt^alpha/dx^(2*alpha) <= 1/2",
            ratio: to_f64(r),
        });
    }

    let rate_kick: Option<Vec<T>> = match &model.kind {
        ModelKind::Wave(w) => {
            // ∂^α y/∂t^α|_{t=0} = φ(x) versions the time stencil on the first
            // step: u¹ = u⁰ + (Δt)^α/Γ(1+α)·φ(x).
            let scale = dt.powf(alpha) / g1a;
            Some(x_nodes.iter().map(|&x| scale * (w.initial_rate)(x)).collect())
        }
        _ => None,
    };

    for n in 1..t_nodes.len() {
        let prev = &values[n - 1];
        let mut next = vec![T::zero(); nx];
        if let Some(kick) = rate_kick.as_ref().filter(|_| n == 1) {
            for j in 1..nx - 1 {
                next[j] = prev[j] + kick[j];
            }
        } else {
            for j in 1..nx - 1 {
                next[j] = prev[j] + r * (prev[j + 1] - (prev[j] + prev[j]) + prev[j - 1]);
            }
        }
        match &model.kind {
            ModelKind::Heat(h) => {
                next[0] = next[1];
                let k_beta = h.conductivity * g1a / dx.powf(alpha);
                next[nx - 1] = (k_beta * next[nx - 2] + h.transfer * h.ambient) / (k_beta + h.transfer);
            }
            _ => {
                next[0] = T::zero();
                next[nx - 1] = T::zero();
            }
        }
        for &v in &next {
            if !v.is_finite() {
                return Err(SolverError::Stability { reason: "solution became non-finite", ratio: to_f64(r) });
            }
        }
        values.push(next);
    }
    Ok(GridFunction { x_nodes: x_nodes.to_vec(), t_nodes: t_nodes.to_vec(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::linspace;
    use approx::assert_relative_eq;

    fn order(alpha: f64) -> FractalOrder<f64> {
        FractalOrder::new(alpha).unwrap()
    }

    fn prob(alpha: f64, c: f64, y0: f64) -> RelaxationProblem<f64> {
        RelaxationProblem::new(order(alpha), c, y0).unwrap()
    }

    #[test]
    fn exact_solution_matches_classical_decay_at_order_one() {
        let y = relax_exact(&prob(1.0, 1.0, 2.0), &[1.0]).unwrap();
        assert_relative_eq!(y[0], 0.7357588823428846, max_relative = 1e-14);
        // 1e-12 agreement with y0·e^{−ct} across [0, 10]
        let grid = linspace(0.0, 10.0, 101);
        let ys = relax_exact(&prob(1.0, 1.0, 2.0), &grid).unwrap();
        for (&t, &y) in grid.iter().zip(&ys) {
            assert!((y - 2.0 * (-t).exp()).abs() <= 1e-12, "t={t} err={}", y - 2.0 * (-t).exp());
        }
    }

    #[test]
    fn exact_solution_at_half_order_matches_the_erfc_oracle() {
        // E_{1/2}(−1) = e·erfc(1)
        let y = relax_exact(&prob(0.5, 1.0, 1.0), &[1.0]).unwrap();
        assert_relative_eq!(y[0], 0.42758357615580705, max_relative = 1e-10);
    }

    #[test]
    fn exact_solution_returns_y0_exactly_at_time_zero() {
        for alpha in [0.3, 0.5, 1.0] {
            let y = relax_exact(&prob(alpha, 2.5, 3.75), &[0.0]).unwrap();
            assert_eq!(y[0], 3.75);
        }
    }

    #[test]
    fn exact_solution_is_positive_and_strictly_decreasing() {
        let grid = linspace(0.0, 3.0, 1001);
        for alpha in [0.3, 0.5, 0.9, 1.0] {
            let ys = relax_exact(&prob(alpha, 1.0, 1.0), &grid).unwrap();
            for w in ys.windows(2) {
                assert!(w[1] > 0.0 && w[1] < w[0], "alpha {alpha}");
            }
        }
    }

    #[test]
    fn exact_solution_validates_the_grid_and_problem() {
        let p = prob(0.5, 1.0, 1.0);
        assert!(relax_exact(&p, &[]).is_err());
        assert!(relax_exact(&p, &[1.0, 0.5]).is_err());
        assert!(relax_exact(&p, &[-1.0]).is_err());
        assert!(RelaxationProblem::new(order(0.5), 0.0, 1.0).is_err());
        assert!(RelaxationProblem::new(order(0.5), -1.0, 1.0).is_err());
    }

    #[test]
    fn series_at_zero_center_reproduces_the_exponential_taylor_coefficients() {
        let s = relax_series(&prob(1.0, 2.0, 3.0), 0.0, 8).unwrap();
        let mut expected = 3.0;
        for (k, &a) in s.coeffs().iter().enumerate() {
            if k > 0 {
                expected *= -2.0 / k as f64;
            }
            assert_relative_eq!(a, expected, max_relative = 1e-13);
        }
    }

    #[test]
    fn series_at_positive_center_tracks_the_exact_solution_classically() {
        let s = relax_series(&prob(1.0, 1.0, 1.0), 1.0, 20).unwrap();
        let v = s.eval(1.1).unwrap();
        assert!((v - (-1.1f64).exp()).abs() < 1e-8);
        // the constant term is the exact solution at the center
        assert_relative_eq!(s.coeffs()[0], 0.36787944117144233, max_relative = 1e-13);
    }

    #[test]
    fn residual_of_the_relaxation_series_vanishes_term_wise() {
        for alpha in [0.3, 0.5, 0.6309297535714574, 0.9, 1.0] {
            let p = prob(alpha, 1.5, 2.0);
            let s = relax_series(&p, 0.0, 12).unwrap();
            let res = relax_residual(&s, p.c(), p.order());
            let c_alpha = 1.5f64.powf(alpha);
            for (k, &r) in res.iter().enumerate() {
                let scale = (c_alpha * s.coeffs()[k]).abs();
                assert!(r.abs() <= 1e-12 * scale, "alpha {alpha} k {k}: {r} vs {scale}");
            }
        }
    }

    #[test]
    fn residual_of_non_solutions_is_the_documented_vector() {
        let constant = FractalSeries::new(order(0.5), 0.0, vec![2.0]).unwrap();
        let res = relax_residual(&constant, 1.0, order(0.5));
        assert_eq!(res.len(), 1);
        assert_relative_eq!(res[0], 2.0, max_relative = 1e-14);
        let zero = FractalSeries::new(order(0.5), 0.0, vec![0.0]).unwrap();
        assert_eq!(relax_residual(&zero, 1.0, order(0.5)), vec![0.0]);
    }

    #[test]
    fn stepper_is_first_order_at_the_classical_limit() {
        let p = prob(1.0, 1.0, 1.0);
        let max_err = |dt: f64| {
            let run = relax_step(&p, dt, 1.0).unwrap();
            run.values
                .iter()
                .enumerate()
                .map(|(n, &y)| (y - (-(n as f64) * dt).exp()).abs())
                .fold(0.0, f64::max)
        };
        let e1 = max_err(0.01);
        let e2 = max_err(0.005);
        let ratio = e2 / e1;
        assert!((0.4..=0.6).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn stepper_contracts_monotonically_when_the_factor_is_positive() {
        let run = relax_step(&prob(0.5, 1.0, 1.0), 0.25, 2.0).unwrap();
        assert!(run.stable);
        assert_eq!(run.values.len(), 9);
        for w in run.values.windows(2) {
            assert!(w[1] > 0.0 && w[1] < w[0]);
        }
    }

    #[test]
    fn stepper_flags_divergence_and_zero_data() {
        // α = 0.5, c = 1: ρ = dt^{1/2}/Γ(3/2) ≥ 2 once dt ≥ (2Γ(3/2))² ≈ 3.14
        let err = relax_step(&prob(0.5, 1.0, 1.0), 3.2, 6.4).unwrap_err();
        assert!(matches!(err, SolverError::Stability { .. }));
        let run = relax_step(&prob(0.5, 1.0, 0.0), 0.1, 1.0).unwrap();
        assert!(run.values.iter().all(|&y| y == 0.0));
        assert!(relax_step(&prob(1.0, 1.0, 1.0), 2.0, 1.0).is_err());
    }

    fn gaussian(x: f64) -> f64 {
        (-200.0 * (x - 0.5) * (x - 0.5)).exp()
    }

    #[test]
    fn diffusion_conserves_mass_and_positivity_at_order_one() {
        let model = ModelSpec {
            order: order(1.0),
            kind: ModelKind::Diffusion(DiffusionModel { a2alpha: 1.0, initial: &gaussian }),
        };
        let x = linspace(0.0, 1.0, 101);
        let t = linspace(0.0, 0.002, 41);
        let g = pde_solve(&model, &x, &t).unwrap();
        let mass = |row: &[f64]| row.iter().sum::<f64>() * 0.01;
        let m0 = mass(&g.values[0]);
        let mn = mass(g.values.last().unwrap());
        assert!((m0 - mn).abs() < 1e-6, "mass drift {}", m0 - mn);
        assert!(g.values.iter().flatten().all(|&v| v >= 0.0));
    }

    #[test]
    fn single_time_node_returns_the_initial_profile_unchanged() {
        let model = ModelSpec {
            order: order(0.7),
            kind: ModelKind::Diffusion(DiffusionModel { a2alpha: 1.0, initial: &gaussian }),
        };
        let x = linspace(0.0, 1.0, 11);
        let g = pde_solve(&model, &x, &[0.0]).unwrap();
        assert_eq!(g.values.len(), 1);
        for (&xj, &v) in x.iter().zip(&g.values[0]) {
            assert_eq!(v, gaussian(xj));
        }
    }

    #[test]
    fn insulated_heat_rod_stays_at_the_uniform_temperature() {
        let model = ModelSpec {
            order: order(1.0),
            kind: ModelKind::Heat(HeatModel {
                kappa: 1.0,
                conductivity: 1.0,
                transfer: 0.0,
                ambient: 0.0,
                initial: 3.0,
                length: 1.0,
            }),
        };
        let x = linspace(0.0, 1.0, 21);
        let t = linspace(0.0, 0.05, 41);
        let g = pde_solve(&model, &x, &t).unwrap();
        for row in &g.values {
            for &v in row {
                assert!((v - 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn heat_rod_relaxes_toward_the_ambient_temperature() {
        let model = ModelSpec {
            order: order(1.0),
            kind: ModelKind::Heat(HeatModel {
                kappa: 1.0,
                conductivity: 1.0,
                transfer: 5.0,
                ambient: 0.0,
                initial: 1.0,
                length: 1.0,
            }),
        };
        let x = linspace(0.0, 1.0, 21);
        let t = linspace(0.0, 0.5, 401);
        let g = pde_solve(&model, &x, &t).unwrap();
        let sup = |row: &[f64]| row.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let first = sup(&g.values[0]);
        let last = sup(g.values.last().unwrap());
        assert!(last < 0.5 * first, "no decay: {last} vs {first}");
        assert!(g.values.iter().flatten().all(|&v| v.is_finite()));
    }

    #[test]
    fn wave_first_step_applies_the_prescribed_rate() {
        let phi = |x: f64| (std::f64::consts::PI * x).sin();
        let model = ModelSpec {
            order: order(1.0),
            kind: ModelKind::Wave(WaveModel { initial_rate: &phi, initial: None }),
        };
        let x = linspace(0.0, 1.0, 21);
        let t = linspace(0.0, 0.001, 2);
        let g = pde_solve(&model, &x, &t).unwrap();
        for (j, &xj) in x.iter().enumerate() {
            if j == 0 || j == 20 {
                assert_eq!(g.values[1][j], 0.0);
            } else {
                assert_relative_eq!(g.values[1][j], 0.001 * phi(xj), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn stability_precondition_is_enforced_and_overridable() {
        let model = ModelSpec {
            order: order(1.0),
            kind: ModelKind::Diffusion(DiffusionModel { a2alpha: 1.0, initial: &gaussian }),
        };
        let x = linspace(0.0, 1.0, 101);
        // r = dt/dx² = 2
        let t = linspace(0.0, 0.2, 1001);
        let err = pde_solve(&model, &x, &t).unwrap_err();
        assert!(matches!(err, SolverError::Stability { .. }));
        // the override runs, then the iterate explodes to non-finite values
        let forced = pde_solve_with(&model, &x, &t, PdeOptions { allow_unstable: true });
        assert!(matches!(forced, Err(SolverError::Stability { .. })));
    }

    #[test]
    fn grid_validation_catches_inconsistent_inputs() {
        let model = ModelSpec {
            order: order(1.0),
            kind: ModelKind::Diffusion(DiffusionModel { a2alpha: 1.0, initial: &gaussian }),
        };
        let x = linspace(0.0, 1.0, 11);
        assert!(matches!(
            pde_solve(&model, &[0.0, 0.1], &[0.0]),
            Err(SolverError::Config { .. })
        ));
        assert!(matches!(
            pde_solve(&model, &[0.0, 0.1, 0.15], &[0.0]),
            Err(SolverError::Config { .. })
        ));
        assert!(matches!(pde_solve(&model, &x, &[]), Err(SolverError::Config { .. })));
        assert!(matches!(pde_solve(&model, &x, &[0.5, 1.0]), Err(SolverError::Config { .. })));
        let heat = ModelSpec {
            order: order(1.0),
            kind: ModelKind::Heat(HeatModel {
                kappa: 1.0,
                conductivity: 1.0,
                transfer: 0.0,
                ambient: 0.0,
                initial: 1.0,
                length: 2.0,
            }),
        };
        // grid does not span [0, L]
        assert!(matches!(pde_solve(&heat, &x, &[0.0]), Err(SolverError::Config { .. })));
    }
}
