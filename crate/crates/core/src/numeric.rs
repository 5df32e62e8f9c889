//! Scalar abstraction and shared numerical primitives: compensated and
//! pairwise summation, least-squares line fitting, and a tiny deterministic
//! random generator for reproducible sampling.

use std::fmt;

use num_traits::{Float, NumAssign};

/// Scalar type for every computation in this crate. `f64` is the production
/// instantiation; `f32` works everywhere the reduced precision is acceptable.
pub trait Real: Float + NumAssign + fmt::Debug + fmt::Display + Send + Sync + 'static {}

impl<T> Real for T where T: Float + NumAssign + fmt::Debug + fmt::Display + Send + Sync + 'static {}

/// Converts an `f64` constant into the working scalar type.
///
/// Panics only if `T` cannot represent ordinary finite doubles, which no
/// supported scalar type triggers.
pub fn cst<T: Real>(value: f64) -> T {
    T::from(value).expect("constant not representable in scalar type")
}

/// Widens a scalar to `f64` for diagnostics; NaN when the value does not fit.
pub fn to_f64<T: Real>(value: T) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Kahan compensated accumulator: running sums keep an error term so that
/// adding many small terms to a large partial sum does not lose them.
#[derive(Debug, Clone, Copy)]
pub struct KahanSum<T> {
    sum: T,
    comp: T,
}

impl<T: Real> KahanSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), comp: T::zero() }
    }

    pub fn add(&mut self, term: T) {
        let y = term - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum
    }
}

impl<T: Real> Default for KahanSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Sums a slice by pairwise tree reduction. The association order depends
/// only on the slice length, never on chunking, so results are bit-stable
/// no matter how callers split the work.
pub fn pairwise_sum<T: Real>(values: &[T]) -> T {
    match values.len() {
        0 => T::zero(),
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// n equally spaced nodes from a to b inclusive; n = 1 yields [a].
pub fn linspace<T: Real>(a: T, b: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let step = (b - a) / cst((n - 1) as f64);
            let mut nodes: Vec<T> = (0..n).map(|i| a + step * cst(i as f64)).collect();
            nodes[n - 1] = b;
            nodes
        }
    }
}

/// Result of an ordinary least-squares line fit y ≈ slope·x + intercept.
#[derive(Debug, Clone, Copy)]
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Root-mean-square residual of the fit.
    pub rms_residual: T,
}

/// Fits a line through (xs[i], ys[i]) by least squares.
///
/// Requires at least two points with distinct x values; otherwise the slope
/// denominator vanishes and the result is non-finite.
pub fn linear_fit<T: Real>(xs: &[T], ys: &[T]) -> LineFit<T> {
    let n = cst::<T>(xs.len() as f64);
    let sx = pairwise_sum(xs);
    let sy = pairwise_sum(ys);
    let sxx = pairwise_sum(&xs.iter().map(|&x| x * x).collect::<Vec<_>>());
    let sxy = pairwise_sum(&xs.iter().zip(ys).map(|(&x, &y)| x * y).collect::<Vec<_>>());
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let mut sq = KahanSum::new();
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - (slope * x + intercept);
        sq.add(r * r);
    }
    LineFit { slope, intercept, rms_residual: (sq.value() / n).sqrt() }
}

/// SplitMix64: a fixed-constant generator used wherever sampling must be
/// reproducible byte-for-byte across runs and platforms.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform sample in [0, 1) with 53 random bits.
    pub fn next_unit<T: Real>(&mut self) -> T {
        cst((self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64))
    }
}
