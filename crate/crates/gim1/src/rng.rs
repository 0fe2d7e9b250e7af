//! Counter-based random streams and the variate generators the simulator needs.
//!
//! A [`Stream`] is keyed by `(seed, stream_id)` and produces its output as a
//! pure function of an internal counter, so any number of streams can be split
//! off a single seed and consumed in parallel with no shared state and no
//! dependence on scheduling order.

use crate::special::ln_gamma;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Splittable counter-based generator keyed by `(seed, stream_id)`.
#[derive(Debug, Clone)]
pub struct Stream {
    key: u64,
    counter: u64,
}

impl Stream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        // Two mixing rounds separate related (seed, stream_id) pairs.
        let key = mix(mix(seed.wrapping_add(GOLDEN)) ^ mix(stream_id.wrapping_mul(GOLDEN) ^ 0xD1B5_4A32_D192_ED03));
        Stream { key, counter: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform in [0, 1).
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1].
    #[inline]
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Exponential variate with the given rate.
    #[inline]
    pub fn exp(&mut self, rate: f64) -> f64 {
        -self.next_open01().ln() / rate
    }

    /// Poisson variate: sequential inversion for small means, PTRS
    /// transformed rejection above `mean > 30`.
    pub fn poisson(&mut self, mean: f64) -> u64 {
        debug_assert!(mean >= 0.0);
        if mean == 0.0 {
            return 0;
        }
        if mean <= 30.0 {
            self.poisson_inversion(mean)
        } else {
            self.poisson_ptrs(mean)
        }
    }

    fn poisson_inversion(&mut self, mean: f64) -> u64 {
        let mut p = (-mean).exp();
        let mut cdf = p;
        let u = self.next_f64();
        let mut k = 0u64;
        while u > cdf {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
            if k > 1000 {
                break; // u in the far tail beyond f64 resolution of the cdf
            }
        }
        k
    }

    fn poisson_ptrs(&mut self, mean: f64) -> u64 {
        let b = 0.931 + 2.53 * mean.sqrt();
        let a = -0.059 + 0.02483 * b;
        let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        let v_r = 0.9277 - 3.6224 / (b - 2.0);
        let ln_mean = mean.ln();
        loop {
            let u = self.next_f64() - 0.5;
            let v = self.next_f64();
            let us = 0.5 - u.abs();
            let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
            if us >= 0.07 && v <= v_r {
                return k as u64;
            }
            if k < 0.0 || (us < 0.013 && v > us) {
                continue;
            }
            if (v * inv_alpha / (a / (us * us) + b)).ln() <= k * ln_mean - mean - ln_gamma(k + 1.0)
            {
                return k as u64;
            }
        }
    }
}
