//! Hölder-exponent estimation and pointwise α-continuity checks: the dyadic
//! log-log fit of max|f(x+s)−f(x)| against the separation s, and the witness
//! search for the bound |f(x)−f(x₀)| ≤ C·|x−x₀|^α near one point.

use thiserror::Error;

use crate::numeric::{cst, linear_fit, to_f64, Real, SplitMix64};
use crate::special::FractalOrder;

/// Dyadic separations (b−a)·2^{−j} for j = 1..=14 span a bit under four
/// decades, comfortably past the three the fit needs.
const FIT_LEVELS: u32 = 14;

/// Minimum count of usable (x, x+s) difference pairs before the fit is
/// considered meaningful.
const MIN_USABLE_PAIRS: usize = 8;

/// Fixed stream for the randomized portion of the sample set.
const FIT_SEED: u64 = 0x5EED_F1C7;

/// Samples per side of the center for the one-variable continuity check.
const CHECK_SIDE_SAMPLES: usize = 32;

/// Samples per axis half-width for the two-variable continuity check.
const CHECK_GRID_HALF: i64 = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("domain error: {reason}, got {value}")]
    Domain { reason: &'static str, value: f64 },
    #[error("function evaluation produced a non-finite value at {at}")]
    Evaluation { at: f64 },
    #[error("degenerate data: only {pairs_used} usable difference pairs across {separations} separations")]
    DegenerateData { pairs_used: usize, separations: usize },
}

/// Result of the log-log Hölder fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoelderEstimate<T> {
    /// Fitted slope of ln max|Δf| against ln s: the exponent estimate.
    pub exponent_hat: T,
    /// Smallest constant consistent with every sampled pair at the fitted
    /// exponent: max |Δf|/s^{exponent_hat}.
    pub constant_hat: T,
    /// Root-mean-square residual of the line fit in log-log space.
    pub fit_residual: T,
    /// Count of finite, nonzero difference pairs that informed the fit.
    pub pairs_used: usize,
}

/// Estimates the Hölder exponent of f on [a,b] by sampling difference pairs
/// at dyadic separations and fitting ln max|Δf| against ln s.
///
/// Per separation the sample set mixes a deterministic grid (three quarters
/// of the budget) with fixed-seed random draws, so repeated runs are
/// bit-identical. Requires at least 16 samples per separation.
pub fn hoelder_fit<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    nsamples: usize,
) -> Result<HoelderEstimate<T>, AnalysisError> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(AnalysisError::Domain { reason: "fit interval requires a < b", value: to_f64(b - a) });
    }
    if nsamples < 16 {
        return Err(AnalysisError::Domain { reason: "fit requires nsamples >= 16", value: nsamples as f64 });
    }
    let span = b - a;
    let ndet = (3 * nsamples / 4).max(2);
    let nrand = nsamples - ndet;
    let mut rng = SplitMix64::new(FIT_SEED);

    let mut log_s = Vec::with_capacity(FIT_LEVELS as usize);
    let mut log_m = Vec::with_capacity(FIT_LEVELS as usize);
    let mut max_by_level: Vec<(T, T)> = Vec::with_capacity(FIT_LEVELS as usize);
    let mut pairs_used = 0usize;
    for j in 1..=FIT_LEVELS {
        let s = span * cst::<T>(0.5f64.powi(j as i32));
        let reach = span - s;
        let mut level_max = T::zero();
        let mut probe = |x: T| -> Result<(), AnalysisError> {
            let d = (f(x + s) - f(x)).abs();
            if !d.is_finite() {
                return Err(AnalysisError::Evaluation { at: to_f64(x) });
            }
            if d > T::zero() {
                pairs_used += 1;
                if d > level_max {
                    level_max = d;
                }
            }
            Ok(())
        };
        for i in 0..ndet {
            let x = a + reach * cst::<T>(i as f64) / cst::<T>((ndet - 1) as f64);
            probe(x)?;
        }
        for _ in 0..nrand {
            let x = a + reach * rng.next_unit::<T>();
            probe(x)?;
        }
        if level_max > T::zero() {
            log_s.push(s.ln());
            log_m.push(level_max.ln());
            max_by_level.push((s, level_max));
        }
    }

    if pairs_used < MIN_USABLE_PAIRS || log_s.len() < 2 {
        return Err(AnalysisError::DegenerateData { pairs_used, separations: log_s.len() });
    }
    let fit = linear_fit(&log_s, &log_m);
    let exponent_hat = fit.slope;
    let mut constant_hat = T::zero();
    for &(s, m) in &max_by_level {
        let c = m / s.powf(exponent_hat);
        if c > constant_hat {
            constant_hat = c;
        }
    }
    Ok(HoelderEstimate { exponent_hat, constant_hat, fit_residual: fit.rms_residual, pairs_used })
}

/// Outcome of a pointwise α-continuity check: whether every sampled pair
/// satisfied |Δf| ≤ C·|Δx|^α, and the pair that came closest to violating it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityReport<T> {
    pub is_continuous: bool,
    /// The argument pair achieving the worst ratio; for the one-variable
    /// check this is (x₀, x), for the two-variable check the offending (x, y).
    pub worst_pair: (T, T),
    /// max |Δf| / |Δx|^α over all sampled pairs.
    pub worst_ratio: T,
}

fn validate_check_inputs<T: Real>(deltas: &[T], c: T) -> Result<(), AnalysisError> {
    if !(c.is_finite() && c > T::zero()) {
        return Err(AnalysisError::Domain { reason: "continuity bound C must be positive", value: to_f64(c) });
    }
    if deltas.is_empty() {
        return Err(AnalysisError::Domain { reason: "delta list must be nonempty", value: 0.0 });
    }
    let mut prev = T::infinity();
    for &d in deltas {
        if !(d.is_finite() && d > T::zero()) {
            return Err(AnalysisError::Domain { reason: "deltas must be positive", value: to_f64(d) });
        }
        if d >= prev {
            return Err(AnalysisError::Domain { reason: "deltas must be strictly descending", value: to_f64(d) });
        }
        prev = d;
    }
    Ok(())
}

/// Checks |f(x) − f(x₀)| ≤ C·|x − x₀|^α on a two-sided sample fan around x₀,
/// scanning 32 points per side at every scale in `deltas` (descending).
pub fn lf_continuity_check<T: Real, F: Fn(T) -> T>(
    f: F,
    x0: T,
    order: FractalOrder<T>,
    deltas: &[T],
    c: T,
) -> Result<ContinuityReport<T>, AnalysisError> {
    validate_check_inputs(deltas, c)?;
    let f0 = f(x0);
    if !f0.is_finite() {
        return Err(AnalysisError::Evaluation { at: to_f64(x0) });
    }
    let alpha = order.alpha();
    let mut worst_ratio = T::zero();
    let mut worst_x = x0;
    for &delta in deltas {
        for i in 1..=CHECK_SIDE_SAMPLES {
            let off = delta * cst::<T>(i as f64) / cst::<T>(CHECK_SIDE_SAMPLES as f64);
            for x in [x0 - off, x0 + off] {
                let fx = f(x);
                if !fx.is_finite() {
                    return Err(AnalysisError::Evaluation { at: to_f64(x) });
                }
                let ratio = (fx - f0).abs() / off.powf(alpha);
                if ratio > worst_ratio {
                    worst_ratio = ratio;
                    worst_x = x;
                }
            }
        }
    }
    Ok(ContinuityReport { is_continuous: worst_ratio <= c, worst_pair: (x0, worst_x), worst_ratio })
}

/// Two-variable analogue of [`lf_continuity_check`] with the max-norm
/// distance: |f(x,y) − f(x₀,y₀)| ≤ C·max(|x−x₀|, |y−y₀|)^α over a square
/// sample lattice around the center at every scale in `deltas`.
pub fn lf_continuity_check_2d<T: Real, F: Fn(T, T) -> T>(
    f: F,
    center: (T, T),
    order: FractalOrder<T>,
    deltas: &[T],
    c: T,
) -> Result<ContinuityReport<T>, AnalysisError> {
    validate_check_inputs(deltas, c)?;
    let (x0, y0) = center;
    let f0 = f(x0, y0);
    if !f0.is_finite() {
        return Err(AnalysisError::Evaluation { at: to_f64(x0) });
    }
    let alpha = order.alpha();
    let k = CHECK_GRID_HALF;
    let mut worst_ratio = T::zero();
    let mut worst_point = (x0, y0);
    for &delta in deltas {
        for i in -k..=k {
            for j in -k..=k {
                if i == 0 && j == 0 {
                    continue;
                }
                let dx = delta * cst::<T>(i as f64) / cst::<T>(k as f64);
                let dy = delta * cst::<T>(j as f64) / cst::<T>(k as f64);
                let (x, y) = (x0 + dx, y0 + dy);
                let fxy = f(x, y);
                if !fxy.is_finite() {
                    return Err(AnalysisError::Evaluation { at: to_f64(x) });
                }
                let dist = dx.abs().max(dy.abs());
                let ratio = (fxy - f0).abs() / dist.powf(alpha);
                if ratio > worst_ratio {
                    worst_ratio = ratio;
                    worst_point = (x, y);
                }
            }
        }
    }
    Ok(ContinuityReport { is_continuous: worst_ratio <= c, worst_pair: worst_point, worst_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::cantor_staircase;
    use approx::assert_relative_eq;

    #[test]
    fn fit_recovers_the_square_root_exponent_exactly_on_the_grid() {
        // max|√(x+s) − √x| over [0,1] is √s, attained at x = 0, which the
        // deterministic grid always contains; the log-log fit is then exact
        let est = hoelder_fit(|x: f64| x.sqrt(), 0.0, 1.0, 64).unwrap();
        assert_relative_eq!(est.exponent_hat, 0.5, epsilon = 1e-9);
        assert_relative_eq!(est.constant_hat, 1.0, epsilon = 1e-9);
        assert!(est.fit_residual < 1e-9);
        assert!(est.pairs_used >= 8);
    }

    #[test]
    fn fit_recovers_slope_and_constant_of_a_linear_function() {
        let est = hoelder_fit(|x: f64| 3.0 * x, 0.0, 1.0, 64).unwrap();
        assert_relative_eq!(est.exponent_hat, 1.0, epsilon = 1e-10);
        assert_relative_eq!(est.constant_hat, 3.0, max_relative = 1e-10);
    }

    #[test]
    fn fit_estimates_the_staircase_dimension_near_ln2_over_ln3() {
        let est = hoelder_fit(|x: f64| cantor_staircase(x, 12).unwrap(), 0.0, 1.0, 64).unwrap();
        assert!(
            (est.exponent_hat - 0.6309297535714574).abs() < 0.05,
            "exponent {}",
            est.exponent_hat
        );
    }

    #[test]
    fn fit_rejects_constant_data_and_short_budgets() {
        assert!(matches!(
            hoelder_fit(|_| 1.0f64, 0.0, 1.0, 64),
            Err(AnalysisError::DegenerateData { pairs_used: 0, .. })
        ));
        assert!(matches!(
            hoelder_fit(|x: f64| x, 0.0, 1.0, 15),
            Err(AnalysisError::Domain { .. })
        ));
        assert!(matches!(
            hoelder_fit(|x: f64| x, 1.0, 1.0, 64),
            Err(AnalysisError::Domain { .. })
        ));
    }

    #[test]
    fn fit_is_deterministic_across_runs() {
        let a = hoelder_fit(|x: f64| x.sqrt() + (5.0 * x).sin(), 0.0, 2.0, 48).unwrap();
        let b = hoelder_fit(|x: f64| x.sqrt() + (5.0 * x).sin(), 0.0, 2.0, 48).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn continuity_check_accepts_a_true_bound_and_rejects_a_tight_one() {
        let alpha = FractalOrder::new(0.5f64).unwrap();
        let f = |x: f64| x.abs().sqrt();
        let deltas = [1e-1, 1e-2, 1e-3];
        // |√|x|| at x0 = 0 satisfies the α = 1/2 bound with C = 1 exactly
        let ok = lf_continuity_check(f, 0.0, alpha, &deltas, 1.0 + 1e-12).unwrap();
        assert!(ok.is_continuous);
        assert_relative_eq!(ok.worst_ratio, 1.0, max_relative = 1e-12);
        let bad = lf_continuity_check(f, 0.0, alpha, &deltas, 0.5).unwrap();
        assert!(!bad.is_continuous);
        assert_eq!(bad.worst_pair.0, 0.0);
    }

    #[test]
    fn continuity_check_validates_the_delta_ladder() {
        let alpha = FractalOrder::new(0.5f64).unwrap();
        let f = |x: f64| x;
        assert!(lf_continuity_check(f, 0.0, alpha, &[], 1.0).is_err());
        assert!(lf_continuity_check(f, 0.0, alpha, &[1e-3, 1e-2], 1.0).is_err());
        assert!(lf_continuity_check(f, 0.0, alpha, &[1e-2, -1e-3], 1.0).is_err());
        assert!(lf_continuity_check(f, 0.0, alpha, &[1e-2], 0.0).is_err());
    }

    #[test]
    fn continuity_check_2d_uses_the_max_norm() {
        let alpha = FractalOrder::new(1.0f64).unwrap();
        let f = |x: f64, y: f64| x + y;
        let deltas = [1e-1, 1e-2];
        // along the diagonal |Δf| = 2·max(|dx|, |dy|), so C = 2 is sharp
        let ok = lf_continuity_check_2d(f, (0.5, 0.5), alpha, &deltas, 2.0 + 1e-12).unwrap();
        assert!(ok.is_continuous);
        assert_relative_eq!(ok.worst_ratio, 2.0, max_relative = 1e-12);
        let bad = lf_continuity_check_2d(f, (0.5, 0.5), alpha, &deltas, 1.5).unwrap();
        assert!(!bad.is_continuous);
    }

    #[test]
    fn continuity_check_surfaces_evaluation_failures() {
        let alpha = FractalOrder::new(0.5f64).unwrap();
        let err = lf_continuity_check(|x: f64| x.sqrt(), 0.0, alpha, &[1e-2], 1.0).unwrap_err();
        assert!(matches!(err, AnalysisError::Evaluation { .. }));
    }
}
