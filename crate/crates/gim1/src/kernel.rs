//! Exact loss probabilities via the partial-sum recurrence.
//!
//! The table of `tilde_pi_k` is marched forward from `tilde_pi_0 = 1` by
//! rearranging the convolution identity
//! `tilde_pi_k = Σ_{i=0}^k r_i · tilde_pi_{k−i+1}` into
//! `tilde_pi_{k+1} = (tilde_pi_k − Σ_{i=1}^k r_i · tilde_pi_{k−i+1}) / r_0`,
//! and the loss probability of the buffer-`k` system is `p_k = 1/tilde_pi_k`.
//!
//! For subcritical queues the sequence grows geometrically and the
//! subtraction cancels same-order terms, so the convolution is accumulated
//! with compensated summation and the worst relative cancellation is
//! reported on the table. A power-of-two rescaling kicks in when entries
//! approach f64 range, keeping `p_k` accurate even when `tilde_pi_k`
//! itself overflows.

use crate::dist::{InterarrivalModel, QueueStats};
use crate::error::{Error, Result};
use crate::kahan::Kahan;

/// Rescale whole history by 2^-512 once entries pass this magnitude.
const RESCALE_THRESHOLD: f64 = 1e250;
const RESCALE_BITS: i32 = 512;
const CANCELLATION_WARN: f64 = 1e-6;

/// A GI/M/1/n instance: interarrival model, service rate, buffer size
/// (server position included).
#[derive(Debug, Clone)]
pub struct QueueSpec {
    pub arrival: InterarrivalModel,
    pub mu: f64,
    pub n: usize,
}

impl QueueSpec {
    pub fn new(arrival: InterarrivalModel, mu: f64, n: usize) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "service rate mu must be positive and finite, got {mu}"
            )));
        }
        Ok(QueueSpec { arrival, mu, n })
    }

    /// Load `ρ = λ/μ`.
    pub fn rho(&self) -> f64 {
        self.arrival.rate() / self.mu
    }

    pub fn stats(&self) -> Result<QueueStats> {
        QueueStats::compute(&self.arrival, self.mu)
    }
}

/// Numerical health of a computed table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionFlag {
    WellConditioned,
    PrecisionWarning,
}

/// The computed sequences `tilde_pi_0..tilde_pi_n`, `pi_0..pi_n` and
/// `p_0..p_n`, with precision diagnostics.
#[derive(Debug, Clone)]
pub struct LossTable {
    pub tilde_pi: Vec<f64>,
    pub pi: Vec<f64>,
    pub p: Vec<f64>,
    pub condition_flag: ConditionFlag,
    /// Worst relative cancellation seen in the recurrence subtraction.
    pub worst_cancellation: f64,
}

/// Computes the full loss table for buffer sizes `0..=n`.
pub fn solve_loss_table(queue: &QueueSpec) -> Result<LossTable> {
    let n = queue.n;
    let r = queue.arrival.completion_probs(queue.mu, n + 1)?;
    let r0 = r[0];
    if !(r0 > 0.0) {
        return Err(Error::CorruptedTable(format!(
            "r_0 = alpha(mu) must be positive, got {r0}"
        )));
    }

    // Scaled representation: tilde_pi_k = v[k] * 2^(512 * e[k]).
    let mut v = Vec::with_capacity(n + 1);
    let mut e: Vec<i32> = Vec::with_capacity(n + 1);
    v.push(1.0f64);
    e.push(0);

    let mut worst_cancellation = 0.0f64;

    for k in 0..n {
        let cur_e = e[k];
        let mut sum = Kahan::new();
        sum.add(v[k]);
        for i in 1..=k {
            let idx = k - i + 1;
            let mut term = -r[i] * v[idx];
            let shift = e[idx] - cur_e;
            if shift != 0 {
                term = ldexp(term, RESCALE_BITS * shift);
            }
            sum.add(term);
        }
        let diff = sum.value();
        if diff <= 0.0 {
            return Err(Error::CorruptedTable(format!(
                "tilde_pi_{} would be nonpositive ({}); completion probabilities corrupted",
                k + 1,
                diff / r0
            )));
        }
        let cancellation = sum.abs_value() * f64::EPSILON / diff;
        worst_cancellation = worst_cancellation.max(cancellation);

        let mut next = diff / r0;
        let mut next_e = cur_e;
        // Monotonicity: tilde_pi is nondecreasing (every pi_k >= 0).
        if next < v[k] * (1.0 - 1e-9) {
            return Err(Error::CorruptedTable(format!(
                "tilde_pi_{} decreased ({} < {})",
                k + 1,
                next,
                v[k]
            )));
        }
        if next > RESCALE_THRESHOLD {
            next = ldexp(next, -RESCALE_BITS);
            next_e = cur_e + 1;
        }
        v.push(next);
        e.push(next_e);
    }

    let mut tilde_pi = Vec::with_capacity(n + 1);
    let mut p = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if e[k] == 0 {
            tilde_pi.push(v[k]);
            p.push(1.0 / v[k]);
        } else {
            tilde_pi.push(ldexp(v[k], RESCALE_BITS * e[k]));
            // Reconstruct in log space; underflows honestly to 0.
            let ln_p = -(v[k].ln() + f64::from(RESCALE_BITS * e[k]) * std::f64::consts::LN_2);
            p.push(ln_p.exp());
        }
    }

    let mut pi = Vec::with_capacity(n + 1);
    pi.push(1.0);
    for k in 1..=n {
        let shift = e[k] - e[k - 1];
        let prev = ldexp(v[k - 1], -RESCALE_BITS * shift);
        pi.push(ldexp(v[k] - prev, RESCALE_BITS * e[k]));
    }

    let condition_flag = if worst_cancellation > CANCELLATION_WARN {
        ConditionFlag::PrecisionWarning
    } else {
        ConditionFlag::WellConditioned
    };

    Ok(LossTable {
        tilde_pi,
        pi,
        p,
        condition_flag,
        worst_cancellation,
    })
}

/// Loss probability `p_n` of the queue; convenience over [`solve_loss_table`].
pub fn loss_probability(queue: &QueueSpec) -> Result<f64> {
    let table = solve_loss_table(queue)?;
    Ok(table.p[queue.n])
}

/// Maximum relative residual of the convolution identity over the table.
///
/// `r` holds the completion probabilities of the same queue; indices past its
/// truncation cutoff are treated as zero, which only perturbs the residual by
/// the truncated tail mass.
pub fn verify_recurrence(table: &LossTable, r: &[f64]) -> f64 {
    let n = table.tilde_pi.len() - 1;
    let mut worst = 0.0f64;
    for k in 0..n {
        let mut sum = Kahan::new();
        for i in 0..=k.min(r.len() - 1) {
            sum.add(r[i] * table.tilde_pi[k - i + 1]);
        }
        let residual = (table.tilde_pi[k] - sum.value()).abs() / table.tilde_pi[k];
        worst = worst.max(residual);
    }
    worst
}

#[inline]
fn ldexp(x: f64, exp: i32) -> f64 {
    // Two steps so |exp| up to 1024 stays in range mid-computation.
    let half = exp / 2;
    x * f64::powi(2.0, half) * f64::powi(2.0, exp - half)
}
