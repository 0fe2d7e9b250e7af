//! Asymptotic loss-probability formulas and regime dispatch.
//!
//! Each estimator returns the estimate tagged with the equation it came
//! from and the moment conditions it assumes. The subcritical expansion
//! is exact for Poisson arrivals; elsewhere its remainder decays
//! geometrically in `n`, which the test suites verify against the exact
//! kernel.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::QueueSpec;
use crate::roots::{SigmaSolution, CRITICALITY_TOL};

/// Dispatch threshold on `C = εn` between the heavy-traffic and
/// near-critical readings. The two formulas agree as `C → 0`; the cut
/// itself is an artifact choice.
pub const HEAVY_NEAR_THRESHOLD: f64 = 0.1;

/// Which asymptotic regime a queue falls in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
    /// `ρ = 1 − ε` with `εn ≈ C > 0`.
    HeavyTraffic { c: f64 },
    /// `ρ = 1 − ε` with `εn ≈ 0`.
    NearCritical,
}

/// Source formula of an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Source {
    Eq35,
    Eq36,
    Eq37,
    Eq312,
    Eq313,
    Eq317,
    Eq319,
}

/// A moment condition an estimate relies on, and whether it was checked.
#[derive(Debug, Clone, Serialize)]
pub struct MomentCondition {
    pub name: String,
    pub verified: bool,
}

/// An asymptotic loss estimate tagged with provenance.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticEstimate {
    pub value: f64,
    pub source: Source,
    pub conditions: Vec<MomentCondition>,
}

/// Classifies the queue by load, or by `(ε, n)` when supplied.
pub fn classify(queue: &QueueSpec, heavy_params: Option<(f64, usize)>) -> Result<Regime> {
    classify_with_threshold(queue, heavy_params, HEAVY_NEAR_THRESHOLD)
}

pub fn classify_with_threshold(
    queue: &QueueSpec,
    heavy_params: Option<(f64, usize)>,
    threshold: f64,
) -> Result<Regime> {
    let rho = queue.rho();
    if let Some((epsilon, n)) = heavy_params {
        if rho > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "heavy-traffic parameters require rho <= 1, got rho = {rho}"
            )));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be in (0, 1), got {epsilon}"
            )));
        }
        let c = epsilon * n as f64;
        return Ok(if c > threshold {
            Regime::HeavyTraffic { c }
        } else {
            Regime::NearCritical
        });
    }
    Ok(if (rho - 1.0).abs() < CRITICALITY_TOL {
        Regime::Critical
    } else if rho < 1.0 {
        Regime::Subcritical
    } else {
        Regime::Supercritical
    })
}

/// Subcritical estimate `(1−ρ)Kσⁿ / (1−ρ − ρKσⁿ)` with
/// `K = 1 + μα′(μ−μσ)`; remainder `o(σ^{2n})` is not added.
pub fn approx_subcritical(
    queue: &QueueSpec,
    n: usize,
    sigma: &SigmaSolution,
) -> Result<AsymptoticEstimate> {
    let rho = queue.rho();
    if rho >= 1.0 - CRITICALITY_TOL {
        return Err(Error::OutOfRegime(format!(
            "subcritical expansion requires rho < 1 (source Eq35), got rho = {rho}"
        )));
    }
    let k = sigma.decay_coeff;
    let geom = k * sigma.sigma.powi(n as i32);
    let denom = 1.0 - rho - rho * geom;
    if denom <= 0.0 {
        return Err(Error::OutOfRegime(format!(
            "n = {n} too small for the geometric regime (source Eq35, denominator {denom:.3e}); use the exact kernel"
        )));
    }
    // At n = 0 the formula collapses to exactly 1 for M/M/1 and roundoff can
    // push it a few ulps past; clamp that, reject anything genuinely above 1.
    let mut value = (1.0 - rho) * geom / denom;
    if value > 1.0 && value <= 1.0 + 1e-9 {
        value = 1.0;
    }
    if value > 1.0 {
        return Err(Error::OutOfRegime(format!(
            "n = {n} too small for the geometric regime (source Eq35, estimate {value:.3e} > 1)"
        )));
    }
    Ok(AsymptoticEstimate {
        value,
        source: Source::Eq35,
        conditions: vec![],
    })
}

/// Limit of `p_n` for `ρ > 1`: `(ρ−1)/ρ`.
pub fn limit_supercritical(queue: &QueueSpec) -> Result<AsymptoticEstimate> {
    let rho = queue.rho();
    if rho <= 1.0 {
        return Err(Error::OutOfRegime(format!(
            "supercritical limit requires rho > 1 (source Eq37), got rho = {rho}"
        )));
    }
    Ok(AsymptoticEstimate {
        value: (rho - 1.0) / rho,
        source: Source::Eq37,
        conditions: vec![],
    })
}

/// Critical estimate `ρ₂/(2n)`.
///
/// The source is tagged Eq312 when `ρ₃ < ∞` could be verified (the
/// remainder is then `O(log n/n²)`), Eq36 otherwise (`o(1/n)` only).
pub fn approx_critical(queue: &QueueSpec, n: usize) -> Result<AsymptoticEstimate> {
    let rho = queue.rho();
    if (rho - 1.0).abs() >= CRITICALITY_TOL {
        return Err(Error::OutOfRegime(format!(
            "critical estimate requires rho = 1 (source Eq36), got rho = {rho}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter(
            "critical estimate needs n >= 1".into(),
        ));
    }
    let rho2 = queue.arrival.scaled_moment(queue.mu, 2)?;
    let rho3_ok = queue.arrival.scaled_moment(queue.mu, 3).is_ok();
    Ok(AsymptoticEstimate {
        value: rho2 / (2.0 * n as f64),
        source: if rho3_ok { Source::Eq312 } else { Source::Eq36 },
        conditions: vec![
            MomentCondition {
                name: "rho2 < inf".into(),
                verified: true,
            },
            MomentCondition {
                name: "rho3 < inf".into(),
                verified: rho3_ok,
            },
        ],
    })
}

/// Limit slope of `1/p_n` at criticality: `2/ρ₂`.
///
/// Checks the hypothesis `r₀ + r₁ < 1`, which fails only for a
/// distribution degenerate at 0; violation is reported as a model bug.
pub fn reciprocal_increment(queue: &QueueSpec) -> Result<f64> {
    let rho = queue.rho();
    if (rho - 1.0).abs() >= CRITICALITY_TOL {
        return Err(Error::OutOfRegime(format!(
            "reciprocal increment requires rho = 1 (source Eq313), got rho = {rho}"
        )));
    }
    let r = queue.arrival.completion_probs(queue.mu, 1)?;
    if r[0] + r[1] >= 1.0 - 1e-12 {
        return Err(Error::UnsupportedModel(format!(
            "r0 + r1 = {} >= 1: interarrival distribution is degenerate at 0",
            r[0] + r[1]
        )));
    }
    let rho2 = queue.arrival.scaled_moment(queue.mu, 2)?;
    Ok(2.0 / rho2)
}

/// Heavy-traffic estimate `ε·e^{−2C/ρ̃₂} / (1 − e^{−2C/ρ̃₂})` with `C = εn`.
pub fn heavy_traffic_approx(epsilon: f64, n: usize, rho2_tilde: f64) -> Result<AsymptoticEstimate> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be in (0, 1), got {epsilon}"
        )));
    }
    if n == 0 {
        return Err(Error::OutOfRegime(
            "C = epsilon * n is 0; use the near-critical estimate (source Eq319)".into(),
        ));
    }
    if !(rho2_tilde > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rho2_tilde must be positive, got {rho2_tilde}"
        )));
    }
    let c = epsilon * n as f64;
    let w = (-2.0 * c / rho2_tilde).exp();
    Ok(AsymptoticEstimate {
        value: epsilon * w / (1.0 - w),
        source: Source::Eq317,
        conditions: vec![
            MomentCondition {
                name: "rho3 bounded".into(),
                verified: false,
            },
            MomentCondition {
                name: "rho2 convergent".into(),
                verified: false,
            },
        ],
    })
}

/// Near-critical estimate `ρ̃₂/(2n)`, the small-`C` reading of the
/// heavy-traffic formula.
pub fn near_critical_approx(n: usize, rho2_tilde: f64) -> Result<AsymptoticEstimate> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "near-critical estimate needs n >= 1".into(),
        ));
    }
    if !(rho2_tilde > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rho2_tilde must be positive, got {rho2_tilde}"
        )));
    }
    Ok(AsymptoticEstimate {
        value: rho2_tilde / (2.0 * n as f64),
        source: Source::Eq319,
        conditions: vec![],
    })
}
