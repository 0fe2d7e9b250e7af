//! Monte Carlo oracle: embedded-chain simulation at arrival epochs.
//!
//! Exponential services make the departure process while the server is
//! busy a rate-μ Poisson stream, so the queue length just before the
//! `k+1`st arrival is a deterministic function of the length before the
//! `k`th arrival, an interarrival draw `T`, and `N ~ Poisson(μT)`:
//! admit if there is room, then remove `min(q, N)` customers. No event
//! calendar is needed and the step mirrors the `r_j` structure of the
//! exact recurrence.
//!
//! Replications use disjoint counter-based streams keyed by
//! `(seed, replication index)` and commutative aggregation, so estimates
//! are bit-identical regardless of how the replications are scheduled.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::QueueSpec;
use crate::rng::Stream;

/// Monte Carlo loss estimate with replication-level error bars.
#[derive(Debug, Clone, PartialEq)]
pub struct SimEstimate {
    pub losses: u64,
    pub arrivals: u64,
    /// Mean of the per-replication loss fractions.
    pub estimate: f64,
    /// Across-replication standard error of the mean.
    pub std_error: f64,
    pub replications: u32,
    pub seed: u64,
}

/// Arrivals discarded per replication before counting starts, so the
/// estimate targets the stationary loss fraction.
pub fn warmup_policy(queue: &QueueSpec) -> u64 {
    10_000u64.max(50 * queue.n as u64)
}

/// Simulates the loss fraction over `replications` independent runs of
/// `arrivals_per_rep` counted arrivals each.
pub fn simulate(
    queue: &QueueSpec,
    arrivals_per_rep: u64,
    replications: u32,
    seed: u64,
) -> Result<SimEstimate> {
    if arrivals_per_rep == 0 {
        return Err(Error::InvalidParameter("arrivals_per_rep must be >= 1".into()));
    }
    if replications == 0 {
        return Err(Error::InvalidParameter("replications must be >= 1".into()));
    }
    let warmup = warmup_policy(queue);

    let per_rep: Vec<u64> = (0..replications)
        .into_par_iter()
        .map(|rep| run_replication(queue, arrivals_per_rep, warmup, seed, rep))
        .collect();

    let losses: u64 = per_rep.iter().sum();
    let arrivals = arrivals_per_rep * replications as u64;
    let fractions: Vec<f64> = per_rep
        .iter()
        .map(|l| *l as f64 / arrivals_per_rep as f64)
        .collect();
    let estimate = fractions.iter().sum::<f64>() / replications as f64;
    let std_error = if replications > 1 {
        let var = fractions
            .iter()
            .map(|f| (f - estimate) * (f - estimate))
            .sum::<f64>()
            / (replications as f64 - 1.0);
        (var / replications as f64).sqrt()
    } else {
        0.0
    };

    Ok(SimEstimate {
        losses,
        arrivals,
        estimate,
        std_error,
        replications,
        seed,
    })
}

fn run_replication(queue: &QueueSpec, counted: u64, warmup: u64, seed: u64, rep: u32) -> u64 {
    let mut stream = Stream::new(seed, rep as u64);
    let n = queue.n;
    let mu = queue.mu;
    let mut q: usize = 0;
    let mut losses = 0u64;

    for arrival in 0..(warmup + counted) {
        let lost = q == n;
        if lost && arrival >= warmup {
            losses += 1;
        }
        if !lost {
            q += 1;
        }
        let t = queue.arrival.sample(&mut stream);
        let completions = stream.poisson(mu * t) as usize;
        q = q.saturating_sub(completions);
    }
    losses
}
