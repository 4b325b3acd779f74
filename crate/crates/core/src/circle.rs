//! Arithmetic on the unit circle S = R/Z and compensated floating-point
//! accumulation.
//!
//! Everything downstream leans on two guarantees fixed here: circle values
//! stay inside [0, 1) after every operation, and long mixed-magnitude sums
//! are accumulated with Neumaier compensation so their absolute error stays
//! at a few ulps of the result instead of growing with the term count.

/// A position on the circle R/Z, kept reduced to [0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CircleValue(f64);

impl CircleValue {
    /// Reduces an arbitrary finite real to its representative in [0, 1).
    ///
    /// `rem_euclid(1.0)` can round to exactly 1.0 when the input is a tiny
    /// negative number; that case is folded back to 0.0 so the half-open
    /// invariant holds unconditionally.
    pub fn new(raw: f64) -> Self {
        debug_assert!(raw.is_finite(), "circle value built from {raw}");
        let mut v = raw.rem_euclid(1.0);
        if v >= 1.0 {
            v = 0.0;
        }
        CircleValue(v)
    }

    /// The representative in [0, 1).
    pub fn get(self) -> f64 {
        self.0
    }

    /// This value translated by `delta` and re-reduced.
    pub fn shift(self, delta: f64) -> Self {
        CircleValue::new(self.0 + delta)
    }
}

/// Arc-length distance on R/Z: `min(|a - b|, 1 - |a - b|)`, in [0, 1/2].
pub fn circle_dist(a: CircleValue, b: CircleValue) -> f64 {
    let d = (a.0 - b.0).abs();
    d.min(1.0 - d)
}

/// Neumaier-compensated accumulator for f64 sums.
///
/// The compensation term also captures the case where an incoming term is
/// larger than the running sum, which plain Kahan summation mishandles.
/// The absolute error of `value()` is a small constant multiple of the ulp
/// of the exact sum, independent of how many terms were added.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        KahanSum::default()
    }

    /// Adds one term, updating the compensation for the rounding error of
    /// this addition.
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// The compensated total.
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}
