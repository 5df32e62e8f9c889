//! Fractal power series Σ_k a_k·(x−x₀)^{kα}: evaluation, the term-by-term
//! derivative and antiderivative induced by the rule
//! d^α(x−x₀)^{kα}/dx^α = (Γ(1+kα)/Γ(1+(k−1)α))·(x−x₀)^{(k−1)α},
//! Taylor construction from derivative ladders, remainder measurement, a
//! mean-value witness locator, and the two-variable Taylor analogue.

use thiserror::Error;

use crate::numeric::{cst, to_f64, KahanSum, Real};
use crate::special::{gamma_ratio, FractalOrder, SpecialError};

/// Coefficients smaller than this in magnitude at the tail are dropped during
/// canonicalization; the threshold sits well below any meaningful f64 scale.
const TRAILING_EPS: f64 = 1e-300;

/// Interior sample count for the mean-value witness scan.
const MVT_SAMPLES: usize = 512;

/// Bisection iteration cap for the witness refinement.
const MVT_MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("domain error: {reason}, got {value}")]
    Domain { reason: &'static str, value: f64 },
    #[error("evaluation produced a non-finite value at {at}")]
    Evaluation { at: f64 },
    #[error("no mean-value witness found in ({a}, {b})")]
    NoWitness { a: f64, b: f64 },
    #[error("coefficient oracle returned a non-finite value at index ({i}, {j})")]
    Oracle { i: usize, j: usize },
    #[error(transparent)]
    Special(#[from] SpecialError),
}

/// A truncated fractal power series Σ_{k=0}^{n} a_k·(x−x₀)^{kα}.
///
/// Stored in canonical form: trailing coefficients below 1e-300 in magnitude
/// are stripped, and the zero series keeps exactly one zero coefficient so
/// the degree is always well defined.
#[derive(Debug, Clone, PartialEq)]
pub struct FractalSeries<T> {
    order: FractalOrder<T>,
    x0: T,
    coeffs: Vec<T>,
}

impl<T: Real> FractalSeries<T> {
    pub fn new(order: FractalOrder<T>, x0: T, coeffs: Vec<T>) -> Result<Self, SeriesError> {
        if !x0.is_finite() {
            return Err(SeriesError::Domain { reason: "series center must be finite", value: to_f64(x0) });
        }
        for &c in &coeffs {
            if !c.is_finite() {
                return Err(SeriesError::Domain { reason: "series coefficients must be finite", value: to_f64(c) });
            }
        }
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.abs() < cst(TRAILING_EPS)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        Ok(Self { order, x0, coeffs })
    }

    pub fn order(&self) -> FractalOrder<T> {
        self.order
    }

    pub fn x0(&self) -> T {
        self.x0
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Highest retained index n; the zero series has degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Evaluates the series at x ≥ x₀ with compensated summation in ascending
    /// term order.
    pub fn eval(&self, x: T) -> Result<T, SeriesError> {
        if !(x.is_finite() && x >= self.x0) {
            return Err(SeriesError::Domain { reason: "series evaluation requires x >= x0", value: to_f64(x) });
        }
        let d = x - self.x0;
        let alpha = self.order.alpha();
        let mut sum = KahanSum::new();
        for (k, &a) in self.coeffs.iter().enumerate() {
            sum.add(a * d.powf(cst::<T>(k as f64) * alpha));
        }
        let value = sum.value();
        if value.is_finite() {
            Ok(value)
        } else {
            Err(SeriesError::Evaluation { at: to_f64(x) })
        }
    }

    /// Term-by-term local fractional derivative: index k maps to k−1 with
    /// weight Γ(1+kα)/Γ(1+(k−1)α); the constant term is annihilated.
    pub fn derivative(&self) -> Self {
        let alpha = self.order.alpha();
        let coeffs: Vec<T> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &a)| {
                let k = cst::<T>(k as f64);
                a * gamma_ratio(T::one() + k * alpha, T::one() + (k - T::one()) * alpha)
            })
            .collect();
        Self::new(self.order, self.x0, coeffs).expect("derivative of a canonical series is canonical")
    }

    /// Term-by-term local fractional antiderivative vanishing at x₀: index k
    /// maps to k+1 with weight Γ(1+kα)/Γ(1+(k+1)α).
    pub fn antiderivative(&self) -> Self {
        let alpha = self.order.alpha();
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(T::zero());
        for (k, &a) in self.coeffs.iter().enumerate() {
            let k = cst::<T>(k as f64);
            coeffs.push(a * gamma_ratio(T::one() + k * alpha, T::one() + (k + T::one()) * alpha));
        }
        Self::new(self.order, self.x0, coeffs).expect("antiderivative of a canonical series is canonical")
    }
}

/// Builds the Taylor expansion Σ_k (f^{(kα)}(x₀)/Γ(1+kα))·(x−x₀)^{kα} from
/// the ladder of iterated derivative values at the center.
pub fn taylor_from_derivatives<T: Real>(
    derivs: &[T],
    order: FractalOrder<T>,
    x0: T,
) -> Result<FractalSeries<T>, SeriesError> {
    if derivs.is_empty() {
        return Err(SeriesError::Domain { reason: "derivative ladder must be nonempty", value: 0.0 });
    }
    let coeffs: Vec<T> = derivs.iter().enumerate().map(|(k, &d)| d / order.gamma_1p(k)).collect();
    FractalSeries::new(order, x0, coeffs)
}

/// Remainder f(x) − S(x) of a truncated expansion against the function it
/// approximates.
pub fn taylor_remainder<T: Real, F: Fn(T) -> T>(
    f: F,
    series: &FractalSeries<T>,
    x: T,
) -> Result<T, SeriesError> {
    let approx = series.eval(x)?;
    let exact = f(x);
    if !exact.is_finite() {
        return Err(SeriesError::Evaluation { at: to_f64(x) });
    }
    Ok(exact - approx)
}

/// A mean-value witness ξ ∈ (x₀, x) together with the residual
/// |f^{(α)}(ξ) − Γ(1+α)·(f(x) − f(x₀))/(x − x₀)^α| it achieves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MvtWitness<T> {
    pub xi: T,
    pub residual: T,
}

/// Locates a point where the α-derivative attains the fractal mean slope:
/// scans 512 interior samples for a small residual, otherwise bisects the
/// first sign change of the residual function.
pub fn mvt_locate<T: Real, F: Fn(T) -> T, G: Fn(T) -> T>(
    f: F,
    falpha: G,
    x0: T,
    x: T,
    order: FractalOrder<T>,
) -> Result<MvtWitness<T>, SeriesError> {
    if !(x0.is_finite() && x.is_finite() && x0 < x) {
        return Err(SeriesError::Domain { reason: "witness search requires x0 < x", value: to_f64(x) });
    }
    let delta_f = f(x) - f(x0);
    if !delta_f.is_finite() {
        return Err(SeriesError::Evaluation { at: to_f64(x) });
    }
    let mean_slope = order.gamma_1p(1) * delta_f / (x - x0).powf(order.alpha());
    let tol = cst::<T>(1e-9) * T::one().max(delta_f.abs());
    let g = |xi: T| falpha(xi) - mean_slope;

    let width = x - x0;
    let nodes = cst::<T>(MVT_SAMPLES as f64 + 1.0);
    let sample = |i: usize| x0 + width * cst::<T>(i as f64) / nodes;
    let mut prev_xi = sample(1);
    let mut prev_g = g(prev_xi);
    if !prev_g.is_finite() {
        return Err(SeriesError::Evaluation { at: to_f64(prev_xi) });
    }
    if prev_g.abs() <= tol {
        return Ok(MvtWitness { xi: prev_xi, residual: prev_g.abs() });
    }
    for i in 2..=MVT_SAMPLES {
        let xi = sample(i);
        let gi = g(xi);
        if !gi.is_finite() {
            return Err(SeriesError::Evaluation { at: to_f64(xi) });
        }
        if gi.abs() <= tol {
            return Ok(MvtWitness { xi, residual: gi.abs() });
        }
        if (prev_g < T::zero()) != (gi < T::zero()) {
            // refine the bracket [prev_xi, xi]
            let (mut lo, mut hi, mut glo) = (prev_xi, xi, prev_g);
            for _ in 0..MVT_MAX_BISECTIONS {
                let mid = (lo + hi) / cst(2.0);
                let gm = g(mid);
                if !gm.is_finite() {
                    return Err(SeriesError::Evaluation { at: to_f64(mid) });
                }
                if gm.abs() <= tol || mid <= lo || mid >= hi {
                    return Ok(MvtWitness { xi: mid, residual: gm.abs() });
                }
                if (glo < T::zero()) != (gm < T::zero()) {
                    hi = mid;
                } else {
                    lo = mid;
                    glo = gm;
                }
            }
            let mid = (lo + hi) / cst(2.0);
            return Ok(MvtWitness { xi: mid, residual: g(mid).abs() });
        }
        prev_xi = xi;
        prev_g = gi;
    }
    Err(SeriesError::NoWitness { a: to_f64(x0), b: to_f64(x) })
}

/// Whether two-variable Taylor coefficients are divided by the factor pair
/// Γ(1+iα)·Γ(1+jα) (the expansion-ready form) or stored as raw oracle values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Taylor2dForm {
    Normalized,
    Raw,
}

/// A truncated two-variable fractal series Σ_{i+j≤n} c_{i,j}·(x−x₀)^{iα}(y−y₀)^{jα},
/// stored as the triangle of rows i + j = const.
#[derive(Debug, Clone, PartialEq)]
pub struct FractalSeries2D<T> {
    order: FractalOrder<T>,
    center: (T, T),
    coeffs: Vec<Vec<T>>,
}

impl<T: Real> FractalSeries2D<T> {
    pub fn order(&self) -> FractalOrder<T> {
        self.order
    }

    pub fn center(&self) -> (T, T) {
        self.center
    }

    /// Row n holds the coefficients c_{0,n}, c_{1,n−1}, …, c_{n,0}.
    pub fn coeffs(&self) -> &[Vec<T>] {
        &self.coeffs
    }

    pub fn eval(&self, x: T, y: T) -> Result<T, SeriesError> {
        let (x0, y0) = self.center;
        if !(x.is_finite() && x >= x0) {
            return Err(SeriesError::Domain { reason: "evaluation requires x >= center x", value: to_f64(x) });
        }
        if !(y.is_finite() && y >= y0) {
            return Err(SeriesError::Domain { reason: "evaluation requires y >= center y", value: to_f64(y) });
        }
        let alpha = self.order.alpha();
        let (dx, dy) = (x - x0, y - y0);
        let mut sum = KahanSum::new();
        for (n, row) in self.coeffs.iter().enumerate() {
            for (i, &c) in row.iter().enumerate() {
                let j = n - i;
                sum.add(
                    c * dx.powf(cst::<T>(i as f64) * alpha) * dy.powf(cst::<T>(j as f64) * alpha),
                );
            }
        }
        let value = sum.value();
        if value.is_finite() {
            Ok(value)
        } else {
            Err(SeriesError::Evaluation { at: to_f64(x) })
        }
    }
}

/// Builds the two-variable Taylor triangle of total degree ≤ n from a mixed
/// derivative oracle: entry (i,j) supplies the iterated value D_x^{iα}D_y^{jα}f
/// at the center, normalized by Γ(1+iα)·Γ(1+jα) unless `Raw` is requested.
pub fn taylor2d<T: Real, O: Fn(usize, usize) -> T>(
    oracle: O,
    center: (T, T),
    order: FractalOrder<T>,
    n: usize,
    form: Taylor2dForm,
) -> Result<FractalSeries2D<T>, SeriesError> {
    if !(center.0.is_finite() && center.1.is_finite()) {
        return Err(SeriesError::Domain { reason: "expansion center must be finite", value: to_f64(center.0) });
    }
    let mut coeffs = Vec::with_capacity(n + 1);
    for total in 0..=n {
        let mut row = Vec::with_capacity(total + 1);
        for i in 0..=total {
            let j = total - i;
            let raw = oracle(i, j);
            if !raw.is_finite() {
                return Err(SeriesError::Oracle { i, j });
            }
            let c = match form {
                Taylor2dForm::Normalized => raw / (order.gamma_1p(i) * order.gamma_1p(j)),
                Taylor2dForm::Raw => raw,
            };
            row.push(c);
        }
        coeffs.push(row);
    }
    Ok(FractalSeries2D { order, center, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{ml, SeriesControl};
    use approx::assert_relative_eq;

    fn order(alpha: f64) -> FractalOrder<f64> {
        FractalOrder::new(alpha).unwrap()
    }

    #[test]
    fn canonicalization_strips_trailing_negligible_coefficients() {
        let s = FractalSeries::new(order(0.5), 0.0, vec![1.0, 2.0, 1e-305, 0.0]).unwrap();
        assert_eq!(s.coeffs(), &[1.0, 2.0]);
        assert_eq!(s.degree(), 1);
        let zero = FractalSeries::new(order(0.5), 0.0, vec![0.0, 0.0, 0.0]).unwrap();
        assert_eq!(zero.coeffs(), &[0.0]);
        assert_eq!(zero.degree(), 0);
        let empty = FractalSeries::new(order(0.5), 0.0, vec![]).unwrap();
        assert_eq!(empty.coeffs(), &[0.0]);
    }

    #[test]
    fn eval_reproduces_the_mittag_leffler_series_it_encodes() {
        // coefficients 1/Γ(1+kα) make the series E_α((x−x0)^α); at degree 40
        // the dropped tail is below 2e-19, far under the 1e-13 gate
        let alpha = order(0.5);
        let coeffs: Vec<f64> = (0..=40).map(|k| 1.0 / alpha.gamma_1p(k)).collect();
        let s = FractalSeries::new(alpha, 0.0, coeffs).unwrap();
        assert_relative_eq!(s.eval(1.0).unwrap(), 5.008980080762283, max_relative = 1e-13);
        let ml_ref = ml(alpha, 2f64.sqrt(), SeriesControl::default()).unwrap().value;
        assert_relative_eq!(s.eval(2.0).unwrap(), ml_ref, max_relative = 1e-12);
    }

    #[test]
    fn eval_outside_the_domain_is_rejected() {
        let s = FractalSeries::new(order(0.5), 1.0, vec![1.0, 1.0]).unwrap();
        assert!(matches!(s.eval(0.5), Err(SeriesError::Domain { .. })));
        assert!(s.eval(1.0).is_ok());
    }

    #[test]
    fn derivative_applies_the_gamma_ladder_rule() {
        // d^α/dx^α of x^{2α} is (Γ(1+2α)/Γ(1+α))·x^α
        let alpha = order(0.5);
        let s = FractalSeries::new(alpha, 0.0, vec![0.0, 0.0, 1.0]).unwrap();
        let d = s.derivative();
        assert_eq!(d.degree(), 1);
        assert_relative_eq!(d.coeffs()[0], 0.0);
        let expected = alpha.gamma_1p(2) / alpha.gamma_1p(1);
        assert_relative_eq!(d.coeffs()[1], expected, max_relative = 1e-14);
    }

    #[test]
    fn derivative_annihilates_constants() {
        let s = FractalSeries::new(order(0.7), 0.0, vec![3.5]).unwrap();
        let d = s.derivative();
        assert_eq!(d.coeffs(), &[0.0]);
    }

    #[test]
    fn derivative_of_antiderivative_is_the_identity() {
        let alpha = order(0.630929753571457);
        let s = FractalSeries::new(alpha, 0.25, vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        let round_trip = s.antiderivative().derivative();
        assert_eq!(round_trip.degree(), s.degree());
        for (a, b) in round_trip.coeffs().iter().zip(s.coeffs()) {
            assert_relative_eq!(a, b, max_relative = 1e-13);
        }
    }

    #[test]
    fn antiderivative_vanishes_at_the_center() {
        let s = FractalSeries::new(order(0.5), 0.0, vec![2.0, 1.0]).unwrap();
        let a = s.antiderivative();
        assert_eq!(a.coeffs()[0], 0.0);
        assert_eq!(a.eval(0.0).unwrap(), 0.0);
        // ∫₀ᵡ 2 d^α t = 2x^α/Γ(1+α) at leading order
        assert_relative_eq!(a.coeffs()[1], 2.0 / s.order().gamma_1p(1), max_relative = 1e-14);
    }

    #[test]
    fn taylor_from_derivatives_normalizes_by_the_gamma_ladder() {
        let alpha = order(0.5);
        let derivs: Vec<f64> = (0..6).map(|k| alpha.gamma_1p(k)).collect();
        let s = taylor_from_derivatives(&derivs, alpha, 0.0).unwrap();
        for &c in s.coeffs() {
            assert_relative_eq!(c, 1.0, max_relative = 1e-14);
        }
        assert!(taylor_from_derivatives::<f64>(&[], alpha, 0.0).is_err());
    }

    #[test]
    fn taylor_remainder_matches_the_classical_exponential_tail() {
        // e^{0.1} − (1 + 0.1 + 0.1²/2 + 0.1³/6) = 4.2514089809581450e-6
        let alpha = order(1.0);
        let derivs = [1.0f64; 4];
        let s = taylor_from_derivatives(&derivs, alpha, 0.0).unwrap();
        let r = taylor_remainder(f64::exp, &s, 0.1).unwrap();
        assert_relative_eq!(r, 4.251408980958145e-6, max_relative = 1e-9);
    }

    #[test]
    fn mvt_witness_found_for_the_classical_parabola() {
        // for f = x² on [0,2] the mean slope 2 is attained at ξ = 1
        let w = mvt_locate(|x: f64| x * x, |x: f64| 2.0 * x, 0.0, 2.0, order(1.0)).unwrap();
        assert_relative_eq!(w.xi, 1.0, max_relative = 1e-6);
        assert!(w.residual <= 1e-9 * 4.0);
    }

    #[test]
    fn mvt_witness_for_a_fractal_power() {
        // f = x^{2α}: Γ(1+α)Δf/Δx^α = Γ(1+α)·x^α at x = 1, while
        // f^{(α)}(ξ) = (Γ(1+2α)/Γ(1+α))·ξ^α; the witness solves for ξ
        let alpha = order(0.5);
        let g2 = alpha.gamma_1p(2) / alpha.gamma_1p(1);
        let w = mvt_locate(
            |x: f64| x,
            move |x: f64| g2 * x.powf(0.5),
            0.0,
            1.0,
            alpha,
        )
        .unwrap();
        let expected = (alpha.gamma_1p(1) / g2).powi(2);
        assert_relative_eq!(w.xi, expected, max_relative = 1e-5);
    }

    #[test]
    fn mvt_reports_when_no_witness_exists() {
        let err = mvt_locate(|x: f64| x * x, |_| 0.0, 0.0, 2.0, order(1.0)).unwrap_err();
        assert!(matches!(err, SeriesError::NoWitness { .. }));
    }

    #[test]
    fn taylor2d_normalized_all_ones_oracle_approximates_exp_of_sum() {
        // at α = 1 the all-ones oracle is e^{x+y}; total degree 8 leaves a
        // tail below 2e-12 at (0.1, 0.1)
        let s = taylor2d(|_, _| 1.0, (0.0, 0.0), order(1.0), 8, Taylor2dForm::Normalized).unwrap();
        let v = s.eval(0.1, 0.1).unwrap();
        assert_relative_eq!(v, 0.2f64.exp(), epsilon = 1e-11);
    }

    #[test]
    fn taylor2d_raw_form_stores_oracle_values_unchanged() {
        let s = taylor2d(|i, j| (i * 10 + j) as f64, (0.0, 0.0), order(0.5), 2, Taylor2dForm::Raw).unwrap();
        assert_eq!(s.coeffs()[0], vec![0.0]);
        assert_eq!(s.coeffs()[1], vec![1.0, 10.0]);
        assert_eq!(s.coeffs()[2], vec![2.0, 11.0, 20.0]);
    }

    #[test]
    fn taylor2d_rejects_non_finite_oracle_values() {
        let err = taylor2d(
            |i, j| if i == 1 && j == 1 { f64::NAN } else { 1.0 },
            (0.0, 0.0),
            order(0.5),
            3,
            Taylor2dForm::Normalized,
        )
        .unwrap_err();
        assert_eq!(err, SeriesError::Oracle { i: 1, j: 1 });
    }

    #[test]
    fn taylor2d_eval_respects_the_quadrant_domain() {
        let s = taylor2d(|_, _| 1.0, (0.5, 0.5), order(0.5), 2, Taylor2dForm::Normalized).unwrap();
        assert!(s.eval(0.4, 0.6).is_err());
        assert!(s.eval(0.6, 0.4).is_err());
        assert!(s.eval(0.5, 0.5).is_ok());
    }
}
