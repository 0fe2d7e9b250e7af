//! The characteristic root `σ` of `z = α(μ − μz)`.
//!
//! `σ` is the minimal nonnegative root: inside `(0, 1)` for subcritical
//! queues and exactly 1 otherwise. It drives the geometric decay of the
//! loss probability, with decay coefficient `1 + μ·α′(μ − μσ)`.

use crate::error::{Error, Result};
use crate::kernel::QueueSpec;

/// Loads within this distance of 1 are treated as critical and get `σ = 1`
/// analytically; the root at `z = 1` is tangential there and a numeric
/// search would stall.
pub const CRITICALITY_TOL: f64 = 1e-9;

pub const DEFAULT_TOL: f64 = 1e-14;
pub const DEFAULT_MAX_ITER: u64 = 1_000_000;
const NEWTON_CAP: u32 = 50;

/// Solved root with diagnostics.
#[derive(Debug, Clone)]
pub struct SigmaSolution {
    /// Minimal nonnegative root of `z = α(μ − μz)`, in `[0, 1]`.
    pub sigma: f64,
    /// `|σ − α(μ − μσ)|`.
    pub residual: f64,
    /// `1 + μ·α′(μ − μσ)`; positive for subcritical queues.
    pub decay_coeff: f64,
    pub iterations: u64,
}

/// Solves for `σ` with default tolerance and iteration budget.
pub fn solve_sigma(queue: &QueueSpec) -> Result<SigmaSolution> {
    solve_sigma_with(queue, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

/// Solves for `σ`: monotone fixed-point iteration from 0 (the map is a
/// generating-function composition, so iterates increase to the least
/// root), then Newton polish on `f(z) = z − α(μ − μz)`.
pub fn solve_sigma_with(queue: &QueueSpec, tol: f64, max_iter: u64) -> Result<SigmaSolution> {
    let mu = queue.mu;
    let rho = queue.rho();

    if rho >= 1.0 - CRITICALITY_TOL {
        // σ = 1 exactly; α(0) = 1 so the residual is zero by construction.
        let decay_coeff = 1.0 + mu * queue.arrival.lst_derivative(0.0, 1)?;
        return Ok(SigmaSolution {
            sigma: 1.0,
            residual: 0.0,
            decay_coeff,
            iterations: 0,
        });
    }

    let map = |z: f64| queue.arrival.lst(mu * (1.0 - z));

    let mut z = 0.0f64;
    let mut iterations = 0u64;
    loop {
        let next = map(z)?;
        iterations += 1;
        let done = (next - z).abs() <= 0.25 * tol;
        z = next;
        if done {
            break;
        }
        if iterations >= max_iter {
            return Err(Error::NonConvergence {
                iterations,
                last: z,
            });
        }
    }

    for _ in 0..NEWTON_CAP {
        let f = z - map(z)?;
        if f.abs() <= tol {
            break;
        }
        let fp = 1.0 + mu * queue.arrival.lst_derivative(mu * (1.0 - z), 1)?;
        let step = f / fp;
        z -= step;
        iterations += 1;
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::NonConvergence {
                iterations,
                last: z,
            });
        }
    }

    let residual = (z - map(z)?).abs();
    if residual > tol {
        return Err(Error::NonConvergence {
            iterations,
            last: z,
        });
    }
    let decay_coeff = 1.0 + mu * queue.arrival.lst_derivative(mu * (1.0 - z), 1)?;
    Ok(SigmaSolution {
        sigma: z,
        residual,
        decay_coeff,
        iterations,
    })
}

/// Explicit terms of the near-critical expansion `σ = 1 − 2ε/ρ̃₂ + O(ε²)`.
pub fn sigma_expansion(epsilon: f64, rho2: f64) -> f64 {
    1.0 - 2.0 * epsilon / rho2
}
