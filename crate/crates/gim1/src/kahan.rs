//! Compensated (Neumaier) summation.

/// Running sum with a correction term for lost low-order bits.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    compensation: f64,
    abs_sum: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
        self.abs_sum += value.abs();
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    /// Sum of absolute values of all inputs, for cancellation diagnostics.
    #[inline]
    pub fn abs_value(&self) -> f64 {
        self.abs_sum
    }
}
