//! Special-function kernel: Γ, the one-parameter Mittag-Leffler series
//! underlying E_α(x^α), fractal powers, and the semigroup-defect diagnostic.

use thiserror::Error;

use crate::numeric::{cst, to_f64, KahanSum, Real};

/// Errors from the special-function kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("fractal order must satisfy 0 < alpha <= 1, got {alpha}")]
    InvalidOrder { alpha: f64 },
    #[error("gamma pole at {x} (zero or negative integer)")]
    Pole { x: f64 },
    #[error("series control requires abs_tol > 0 and max_terms >= 1")]
    InvalidControl,
    #[error("series not converged after {max_terms} terms (last term {last_term:e})")]
    Truncation { max_terms: usize, last_term: f64 },
    #[error("domain error: {reason}, got {value}")]
    Domain { reason: &'static str, value: f64 },
}

/// The exponent α ∈ (0,1] of the fractal calculus, with its Γ(1+kα) ladder
/// computed on demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractalOrder<T> {
    alpha: T,
}

impl<T: Real> FractalOrder<T> {
    /// Construction rejects any α outside (0, 1].
    pub fn new(alpha: T) -> Result<Self, SpecialError> {
        if alpha.is_finite() && alpha > T::zero() && alpha <= T::one() {
            Ok(Self { alpha })
        } else {
            Err(SpecialError::InvalidOrder { alpha: to_f64(alpha) })
        }
    }

    /// α = ln2/ln3, the dimension of the middle-thirds Cantor set — the one
    /// fractal support the toolkit realizes exactly.
    pub fn cantor() -> Self {
        Self { alpha: cst(std::f64::consts::LN_2 / 3f64.ln()) }
    }

    /// The classical limit α = 1.
    pub fn classical() -> Self {
        Self { alpha: T::one() }
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// Γ(1+kα) for k = 0..=n. Entries overflow to +∞ once kα exceeds ≈170.6;
    /// ratio-based callers should use [`gamma_ratio`] instead.
    pub fn gamma_ladder(&self, n: usize) -> Vec<T> {
        (0..=n).map(|k| self.gamma_1p(k)).collect()
    }

    /// Γ(1+kα) for a single index.
    pub fn gamma_1p(&self, k: usize) -> T {
        gamma_positive(T::one() + cst::<T>(k as f64) * self.alpha)
    }
}

// Lanczos approximation in the Pugh parameterization; ~16 correct digits.
const GAMMA_R: f64 = 10.900511;
const GAMMA_DK: [f64; 11] = [
    2.4857408913875355e-5,
    1.0514237858172197,
    -3.4568709722201625,
    4.512277094668948,
    -2.9828522532357664,
    1.056397115771267,
    -1.9542877319164587e-1,
    1.709705434044412e-2,
    -5.719261174043057e-4,
    4.633994733599057e-6,
    -2.7199490848860772e-9,
];
const TWO_SQRT_E_OVER_PI: f64 = 1.8603827342052657;
const LN_2_SQRT_E_OVER_PI: f64 = 0.6207822376352452;

fn lanczos_series<T: Real>(x: T) -> T {
    let mut s = cst::<T>(GAMMA_DK[0]);
    for (i, &dk) in GAMMA_DK.iter().enumerate().skip(1) {
        s += cst::<T>(dk) / (x + cst::<T>(i as f64 - 1.0));
    }
    s
}

/// Γ(x) for x ≥ 0.5, where no reflection or pole handling is needed.
fn gamma_positive<T: Real>(x: T) -> T {
    let half = cst::<T>(0.5);
    let e = cst::<T>(std::f64::consts::E);
    lanczos_series(x) * cst::<T>(TWO_SQRT_E_OVER_PI) * ((x - half + cst(GAMMA_R)) / e).powf(x - half)
}

/// ln Γ(x) for x ≥ 0.5; stays finite long after Γ itself overflows.
fn ln_gamma_positive<T: Real>(x: T) -> T {
    let half = cst::<T>(0.5);
    let e = cst::<T>(std::f64::consts::E);
    lanczos_series(x).ln() + cst::<T>(LN_2_SQRT_E_OVER_PI) + (x - half) * ((x - half + cst(GAMMA_R)) / e).ln()
}

/// Γ(x), accurate to at least 12 significant digits on [0.1, 50].
///
/// Negative non-integer arguments go through the reflection formula
/// Γ(x) = π / (sin(πx)·Γ(1−x)).
pub fn gamma<T: Real>(x: T) -> Result<T, SpecialError> {
    if !x.is_finite() {
        return Err(SpecialError::Domain { reason: "gamma argument must be finite", value: to_f64(x) });
    }
    if x <= T::zero() && x == x.floor() {
        return Err(SpecialError::Pole { x: to_f64(x) });
    }
    if x < cst(0.5) {
        let pi = cst::<T>(std::f64::consts::PI);
        Ok(pi / ((pi * x).sin() * gamma_positive(T::one() - x)))
    } else {
        Ok(gamma_positive(x))
    }
}

/// Γ(a)/Γ(b) for a, b ≥ 0.5, routed through ln Γ when either factor would
/// overflow on its own.
pub fn gamma_ratio<T: Real>(a: T, b: T) -> T {
    let overflow_edge = cst::<T>(170.0);
    if a < overflow_edge && b < overflow_edge {
        gamma_positive(a) / gamma_positive(b)
    } else {
        (ln_gamma_positive(a) - ln_gamma_positive(b)).exp()
    }
}

/// Truncation control for the Mittag-Leffler series: stop once the running
/// term is below `abs_tol` and the next term is smaller still.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl<T> {
    pub abs_tol: T,
    pub max_terms: usize,
}

impl<T: Real> Default for SeriesControl<T> {
    fn default() -> Self {
        Self { abs_tol: cst(1e-14), max_terms: 400 }
    }
}

impl<T: Real> SeriesControl<T> {
    fn validate(&self) -> Result<(), SpecialError> {
        if self.abs_tol > T::zero() && self.max_terms >= 1 {
            Ok(())
        } else {
            Err(SpecialError::InvalidControl)
        }
    }
}

/// A truncated Mittag-Leffler sum together with the number of terms it used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlValue<T> {
    pub value: T,
    pub terms_used: usize,
}

/// The one-parameter Mittag-Leffler series Σ_{k≥0} w^k/Γ(1+kα), so that
/// E_α(x^α) = ml(α, x^α) and E_α(−c^α t^α) = ml(α, −(c·t)^α).
///
/// Terms are formed directly while w^k and Γ(1+kα) stay inside f64 range and
/// through exp(k·ln|w| − ln Γ(1+kα)) beyond that. Summation is compensated.
/// At α = 1 negative arguments go through the exact identity
/// E₁(−x) = 1/E₁(x), because the alternating series loses ~|w| digits to
/// cancellation; no such identity exists for α < 1 (its failure is exactly
/// the semigroup defect), so those arguments sum directly.
pub fn ml<T: Real>(order: FractalOrder<T>, w: T, ctl: SeriesControl<T>) -> Result<MlValue<T>, SpecialError> {
    ctl.validate()?;
    if !w.is_finite() {
        return Err(SpecialError::Domain { reason: "ml argument must be finite", value: to_f64(w) });
    }
    let alpha = order.alpha();
    if w < T::zero() && alpha == T::one() {
        let pos = ml(order, -w, ctl)?;
        return Ok(MlValue { value: pos.value.recip(), terms_used: pos.terms_used });
    }
    let overflow_edge = cst::<T>(170.0);
    let mut sum = KahanSum::new();
    let mut prev: Option<T> = None;
    let mut term = T::zero();
    for k in 0..ctl.max_terms {
        let one_plus_ka = T::one() + cst::<T>(k as f64) * alpha;
        term = if w == T::zero() {
            if k == 0 { T::one() } else { T::zero() }
        } else if one_plus_ka < overflow_edge {
            let direct = w.powi(k as i32) / gamma_positive(one_plus_ka);
            if direct.is_finite() { direct } else { ml_term_via_logs(w, k, one_plus_ka) }
        } else {
            ml_term_via_logs(w, k, one_plus_ka)
        };
        if let Some(p) = prev {
            if p.abs() < ctl.abs_tol && (term.abs() < p.abs() || term == T::zero()) {
                return Ok(MlValue { value: sum.value(), terms_used: k });
            }
        }
        sum.add(term);
        prev = Some(term);
    }
    Err(SpecialError::Truncation { max_terms: ctl.max_terms, last_term: to_f64(term) })
}

fn ml_term_via_logs<T: Real>(w: T, k: usize, one_plus_ka: T) -> T {
    let magnitude = (cst::<T>(k as f64) * w.abs().ln() - ln_gamma_positive(one_plus_ka)).exp();
    if w < T::zero() && k % 2 == 1 {
        -magnitude
    } else {
        magnitude
    }
}

/// x^p for x ≥ 0, p ≥ 0, with the 0^0 = 1 convention so the k = 0 term of a
/// fractal Taylor expansion equals f(x₀).
pub fn fractal_pow<T: Real>(x: T, p: T) -> Result<T, SpecialError> {
    if !(x.is_finite() && x >= T::zero()) {
        return Err(SpecialError::Domain { reason: "fractal_pow base must be >= 0", value: to_f64(x) });
    }
    if !(p.is_finite() && p >= T::zero()) {
        return Err(SpecialError::Domain { reason: "fractal_pow exponent must be >= 0", value: to_f64(p) });
    }
    if x == T::zero() && p == T::zero() {
        return Ok(T::one());
    }
    Ok(x.powf(p))
}

/// |E_α((x+y)^α) − E_α(x^α)·E_α(y^α)| for x, y ≥ 0: how far the semigroup
/// identity is from holding for real-number powers. Zero (to roundoff) at
/// α = 1; strictly positive in general for α < 1.
pub fn ml_semigroup_defect<T: Real>(order: FractalOrder<T>, x: T, y: T) -> Result<T, SpecialError> {
    let ctl = SeriesControl::default();
    let combined = ml(order, fractal_pow(x + y, order.alpha())?, ctl)?.value;
    let split = ml(order, fractal_pow(x, order.alpha())?, ctl)?.value * ml(order, fractal_pow(y, order.alpha())?, ctl)?.value;
    Ok((combined - split).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn order(alpha: f64) -> FractalOrder<f64> {
        FractalOrder::new(alpha).unwrap()
    }

    #[test]
    fn order_construction_enforces_unit_interval() {
        assert!(FractalOrder::new(0.5).is_ok());
        assert!(FractalOrder::new(1.0).is_ok());
        assert!(FractalOrder::new(0.0).is_err());
        assert!(FractalOrder::new(-0.3).is_err());
        assert!(FractalOrder::new(1.1).is_err());
        assert!(FractalOrder::new(f64::NAN).is_err());
        assert_relative_eq!(FractalOrder::<f64>::cantor().alpha(), 0.6309297535714574, max_relative = 1e-15);
    }

    // Reference values computed with mpmath at 30 digits.
    #[test]
    fn gamma_matches_reference_values() {
        let cases = [
            (0.1, 9.513507698668732),
            (0.5, 1.772453850905516),
            (1.5, 0.886226925452758),
            (2.5, 1.329340388179137),
            (10.0, 362880.0),
            (25.5, 3.0867705405286968e24),
            (50.0, 6.082818640342675e62),
        ];
        for (x, expected) in cases {
            assert_relative_eq!(gamma(x).unwrap(), expected, max_relative = 1e-12);
        }
        assert_relative_eq!(gamma(1.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(5.0).unwrap(), 24.0, max_relative = 1e-14);
    }

    #[test]
    fn gamma_reflects_to_negative_non_integers() {
        // Γ(−0.5) = −2√π
        assert_relative_eq!(gamma(-0.5).unwrap(), -3.5449077018110318, max_relative = 1e-12);
    }

    #[test]
    fn gamma_rejects_poles() {
        assert_eq!(gamma(0.0), Err(SpecialError::Pole { x: 0.0 }));
        assert_eq!(gamma(-3.0), Err(SpecialError::Pole { x: -3.0 }));
        assert!(gamma(f64::NAN).is_err());
    }

    #[test]
    fn gamma_satisfies_recurrence_on_test_grid() {
        let mut x = 0.5_f64;
        while x <= 20.0 {
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs(), "recurrence failed at x={x}");
            x += 0.125;
        }
    }

    #[test]
    fn gamma_ratio_survives_overflowing_numerators() {
        // Γ(201)/Γ(200) = 200 even though both factors overflow f64.
        assert_relative_eq!(gamma_ratio(201.0, 200.0), 200.0, max_relative = 1e-10);
        assert_relative_eq!(gamma_ratio(5.0, 4.0), 4.0, max_relative = 1e-13);
    }

    #[test]
    fn gamma_ladder_holds_reference_values() {
        let ladder = order(0.5).gamma_ladder(4);
        let expected = [1.0, 0.886226925452758, 1.0, 1.329340388179137, 2.0];
        for (got, want) in ladder.iter().zip(expected) {
            assert_relative_eq!(got, &want, max_relative = 1e-13);
        }
    }

    #[test]
    fn ml_at_order_one_is_exp() {
        let ctl = SeriesControl::default();
        assert_relative_eq!(ml(order(1.0), 1.0, ctl).unwrap().value, std::f64::consts::E, max_relative = 1e-14);
        assert_relative_eq!(ml(order(1.0), 5.0, ctl).unwrap().value, 148.4131591025766, max_relative = 1e-13);
        assert!((ml(order(1.0), -5.0, ctl).unwrap().value - 6.737946999085467e-3).abs() < 1e-12);
    }

    // E_{1/2}(z) = e^{z²}·erfc(−z); values frozen from mpmath.
    #[test]
    fn ml_matches_half_order_reference_values() {
        let ctl = SeriesControl::default();
        assert_relative_eq!(ml(order(0.5), 1.0, ctl).unwrap().value, 5.008980080762283, max_relative = 1e-12);
        assert_relative_eq!(ml(order(0.5), 2.0, ctl).unwrap().value, 108.94090438997797, max_relative = 1e-12);
        assert_relative_eq!(ml(order(0.5), -1.0, ctl).unwrap().value, 0.42758357615580705, max_relative = 1e-11);
    }

    #[test]
    fn ml_of_zero_is_exactly_one() {
        let out = ml(order(0.5), 0.0, SeriesControl::default()).unwrap();
        assert_eq!(out.value, 1.0);
        assert!(out.terms_used <= 2);
    }

    #[test]
    fn ml_reports_truncation_when_budget_is_too_small() {
        let ctl = SeriesControl { abs_tol: 1e-14, max_terms: 3 };
        assert!(matches!(ml(order(0.5), 5.0, ctl), Err(SpecialError::Truncation { max_terms: 3, .. })));
        assert_eq!(ml(order(0.5), 1.0, SeriesControl { abs_tol: 0.0, max_terms: 10 }), Err(SpecialError::InvalidControl));
    }

    #[test]
    fn fractal_pow_conventions_and_domain() {
        assert_eq!(fractal_pow(0.0, 0.0), Ok(1.0));
        assert_eq!(fractal_pow(4.0, 0.5), Ok(2.0));
        assert_eq!(fractal_pow(0.0, 0.7), Ok(0.0));
        // exp((ln2/ln3)·ln 8) frozen from mpmath
        assert_relative_eq!(
            fractal_pow(8.0, FractalOrder::<f64>::cantor().alpha()).unwrap(),
            3.7135249226116581,
            max_relative = 1e-14
        );
        assert!(fractal_pow(-1.0, 0.5).is_err());
        assert!(fractal_pow(1.0, -0.5).is_err());
    }

    #[test]
    fn semigroup_defect_vanishes_classically_and_not_otherwise() {
        assert!(ml_semigroup_defect(order(1.0), 1.0, 2.0).unwrap() < 1e-12);
        assert!(ml_semigroup_defect(order(1.0), 0.0, 5.0).unwrap() < 1e-12);
        // |E_{1/2}(√2) − E_{1/2}(1)²| frozen from mpmath
        assert_relative_eq!(ml_semigroup_defect(order(0.5), 1.0, 1.0).unwrap(), 10.647973254058373, max_relative = 1e-10);
        assert!(ml_semigroup_defect(order(0.5), -1.0, 1.0).is_err());
    }
}
