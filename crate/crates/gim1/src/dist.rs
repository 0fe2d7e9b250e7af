//! Interarrival distributions and their transform-side machinery.
//!
//! Everything the recurrence and the asymptotic formulas consume lives here:
//! the Laplace–Stieltjes transform `α(s)` and its derivatives, the scaled
//! moments `ρ_m = μ^m E[A^m]`, the service-completion-count probabilities
//! `r_j = ∫ e^{−μx}(μx)^j/j! dA(x)`, and a sampler for the simulator.
//!
//! Closed forms are used for the Exponential, Erlang, Hyperexponential and
//! Deterministic families; a generic density family falls back on adaptive
//! quadrature.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_with_breaks};
use crate::rng::Stream;
use crate::special::{ln_factorial, ln_gamma};

const QUAD_TOL: f64 = 1e-12;

/// Default tail bound for "sums to 1" truncation of the `r_j` series.
pub const TAIL_BOUND: f64 = 1e-12;

/// Generic interarrival density on `[0, upper]`, evaluated by quadrature.
#[derive(Clone)]
pub struct GenericDensity {
    density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    upper: f64,
    /// Total mass of the callback over `[0, upper]`; results are normalized
    /// by it so the truncated density is a proper distribution.
    mass: f64,
    /// Cumulative distribution on an equispaced grid, used for sampling.
    cdf_grid: Vec<f64>,
}

impl fmt::Debug for GenericDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenericDensity")
            .field("upper", &self.upper)
            .field("mass", &self.mass)
            .finish()
    }
}

/// Parametric family of the interarrival distribution.
#[derive(Debug, Clone)]
pub enum Family {
    Exponential { rate: f64 },
    Erlang { shape: u32, rate: f64 },
    Hyperexponential { probs: Vec<f64>, rates: Vec<f64> },
    Deterministic { value: f64 },
    Quadrature(GenericDensity),
}

/// A renewal interarrival distribution `A(x)` with cached mean.
#[derive(Debug, Clone)]
pub struct InterarrivalModel {
    family: Family,
    mean: f64,
}

impl InterarrivalModel {
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "exponential rate must be positive and finite, got {rate}"
            )));
        }
        Ok(Self {
            family: Family::Exponential { rate },
            mean: 1.0 / rate,
        })
    }

    pub fn erlang(shape: u32, rate: f64) -> Result<Self> {
        if shape == 0 {
            return Err(Error::InvalidParameter("erlang shape must be >= 1".into()));
        }
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "erlang per-stage rate must be positive and finite, got {rate}"
            )));
        }
        Ok(Self {
            family: Family::Erlang { shape, rate },
            mean: shape as f64 / rate,
        })
    }

    pub fn hyperexponential(probs: Vec<f64>, rates: Vec<f64>) -> Result<Self> {
        if probs.is_empty() || probs.len() != rates.len() {
            return Err(Error::InvalidParameter(
                "hyperexponential needs matching, nonempty probability and rate lists".into(),
            ));
        }
        if probs.iter().any(|q| *q < 0.0 || !q.is_finite()) {
            return Err(Error::InvalidParameter(
                "hyperexponential branch probabilities must be nonnegative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "hyperexponential branch probabilities must sum to 1, got {total}"
            )));
        }
        if rates.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidParameter(
                "hyperexponential branch rates must be positive and finite".into(),
            ));
        }
        let mean = probs.iter().zip(&rates).map(|(q, l)| q / l).sum();
        Ok(Self {
            family: Family::Hyperexponential { probs, rates },
            mean,
        })
    }

    pub fn deterministic(value: f64) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "deterministic interarrival must be positive and finite, got {value}"
            )));
        }
        Ok(Self {
            family: Family::Deterministic { value },
            mean: value,
        })
    }

    /// Builds the generic family from a density callback supported on
    /// `[0, upper]`. The callback's mass over that interval must be within
    /// 1e-6 of 1; it is renormalized to exactly 1 internally.
    pub fn quadrature<F>(density: F, upper: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(upper > 0.0 && upper.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "generic density needs a finite positive support bound, got {upper}"
            )));
        }
        let density: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(density);
        let mass = integrate(|x| density(x), 0.0, upper, QUAD_TOL)?;
        if !(mass.is_finite() && (mass - 1.0).abs() <= 1e-6) {
            return Err(Error::InvalidParameter(format!(
                "density mass over [0, {upper}] is {mass}, expected 1 within 1e-6"
            )));
        }
        // Cumulative grid for inverse-transform sampling.
        let cells = 512;
        let step = upper / cells as f64;
        let mut cdf_grid = Vec::with_capacity(cells + 1);
        cdf_grid.push(0.0);
        let mut acc = 0.0;
        for i in 0..cells {
            let a = i as f64 * step;
            acc += integrate(|x| density(x), a, a + step, QUAD_TOL)?;
            cdf_grid.push(acc / mass);
        }
        cdf_grid[cells] = 1.0;
        let gd = GenericDensity {
            density,
            upper,
            mass,
            cdf_grid,
        };
        let mean = integrate(|x| x * (gd.density)(x), 0.0, upper, QUAD_TOL)? / mass;
        Ok(Self {
            family: Family::Quadrature(gd),
            mean,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Mean interarrival time `E[A] = 1/λ`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Arrival rate `λ = 1/E[A]`.
    pub fn rate(&self) -> f64 {
        1.0 / self.mean
    }

    /// Laplace–Stieltjes transform `α(s) = ∫ e^{−sx} dA(x)` for `s ≥ 0`.
    pub fn lst(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::InvalidParameter(format!("lst needs s >= 0, got {s}")));
        }
        match &self.family {
            Family::Exponential { rate } => Ok(rate / (rate + s)),
            Family::Erlang { shape, rate } => Ok((rate / (rate + s)).powi(*shape as i32)),
            Family::Hyperexponential { probs, rates } => Ok(probs
                .iter()
                .zip(rates)
                .map(|(q, l)| q * l / (l + s))
                .sum()),
            Family::Deterministic { value } => Ok((-s * value).exp()),
            Family::Quadrature(gd) => {
                let d = gd.density.clone();
                let v = integrate(|x| (-s * x).exp() * d(x), 0.0, gd.upper, QUAD_TOL)?;
                Ok(v / gd.mass)
            }
        }
    }

    /// `i`th derivative of the transform, `α^{(i)}(s) = (−1)^i ∫ x^i e^{−sx} dA(x)`.
    pub fn lst_derivative(&self, s: f64, order: u32) -> Result<f64> {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lst_derivative needs s >= 0, got {s}"
            )));
        }
        if order == 0 {
            return self.lst(s);
        }
        let i = order;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        match &self.family {
            Family::Exponential { rate } => {
                // α^{(i)}(s) = (−1)^i i! λ/(λ+s)^{i+1}
                let ln_mag = rate.ln() + ln_factorial(i as u64) - (i as f64 + 1.0) * (rate + s).ln();
                Ok(sign * ln_mag.exp())
            }
            Family::Erlang { shape, rate } => {
                let k = *shape as f64;
                // α^{(i)}(s) = (−1)^i (k+i−1)!/(k−1)! β^k/(β+s)^{k+i}
                let ln_mag = ln_gamma(k + i as f64) - ln_gamma(k) + k * rate.ln()
                    - (k + i as f64) * (rate + s).ln();
                Ok(sign * ln_mag.exp())
            }
            Family::Hyperexponential { probs, rates } => {
                let mut acc = 0.0;
                for (q, l) in probs.iter().zip(rates) {
                    let ln_mag = l.ln() + ln_factorial(i as u64) - (i as f64 + 1.0) * (l + s).ln();
                    acc += q * ln_mag.exp();
                }
                Ok(sign * acc)
            }
            Family::Deterministic { value } => {
                Ok(sign * (i as f64 * value.ln() - s * value).exp())
            }
            Family::Quadrature(gd) => {
                let d = gd.density.clone();
                let v = integrate(
                    |x| x.powi(i as i32) * (-s * x).exp() * d(x),
                    0.0,
                    gd.upper,
                    QUAD_TOL,
                )?;
                Ok(sign * v / gd.mass)
            }
        }
    }

    /// Probabilities `r_j = ∫ e^{−μx}(μx)^j/j! dA(x)` for `j = 0..=count`:
    /// the chance of `j` potential service completions during one
    /// interarrival time when services run at rate `mu`.
    pub fn completion_probs(&self, mu: f64, count: usize) -> Result<Vec<f64>> {
        check_mu(mu)?;
        let mut r = Vec::with_capacity(count + 1);
        match &self.family {
            Family::Exponential { rate } => {
                // Geometric: r_j = [λ/(λ+μ)]·[μ/(λ+μ)]^j
                let p = rate / (rate + mu);
                let q = mu / (rate + mu);
                let mut term = p;
                for _ in 0..=count {
                    r.push(term);
                    term *= q;
                }
            }
            Family::Erlang { shape, rate } => {
                // Negative binomial with k successes at probability β/(β+μ).
                let k = *shape as f64;
                let ln_p = (rate / (rate + mu)).ln();
                let ln_q = (mu / (rate + mu)).ln();
                for j in 0..=count {
                    let jf = j as f64;
                    let ln_r = ln_gamma(k + jf) - ln_gamma(k) - ln_factorial(j as u64)
                        + k * ln_p
                        + jf * ln_q;
                    r.push(ln_r.exp());
                }
            }
            Family::Hyperexponential { probs, rates } => {
                r.resize(count + 1, 0.0);
                for (qb, l) in probs.iter().zip(rates) {
                    let p = l / (l + mu);
                    let q = mu / (l + mu);
                    let mut term = qb * p;
                    for slot in r.iter_mut() {
                        *slot += term;
                        term *= q;
                    }
                }
            }
            Family::Deterministic { value } => {
                // Poisson pmf with mean μd, in log space.
                let m = mu * value;
                let ln_m = m.ln();
                for j in 0..=count {
                    let ln_r = -m + j as f64 * ln_m - ln_factorial(j as u64);
                    r.push(ln_r.exp());
                }
            }
            Family::Quadrature(gd) => {
                let d = gd.density.clone();
                for j in 0..=count {
                    let jf = j as f64;
                    let ln_fact = ln_factorial(j as u64);
                    let f = |x: f64| {
                        if x <= 0.0 {
                            if j == 0 {
                                d(x)
                            } else {
                                0.0
                            }
                        } else {
                            (-mu * x + jf * (mu * x).ln() - ln_fact).exp() * d(x)
                        }
                    };
                    // Split at the Poisson-weight mode x = j/μ.
                    let v = integrate_with_breaks(f, 0.0, gd.upper, QUAD_TOL, &[jf / mu])?;
                    r.push(v / gd.mass);
                }
            }
        }
        Ok(r)
    }

    /// Smallest `J` for which the analytic tail bound on `Σ_{j>J} r_j`
    /// drops below `bound`.
    pub fn completion_tail_cutoff(&self, mu: f64, bound: f64) -> Result<usize> {
        check_mu(mu)?;
        match &self.family {
            Family::Exponential { rate } => {
                // Tail after J is exactly q^{J+1}.
                let q = mu / (rate + mu);
                Ok((bound.ln() / q.ln()).ceil().max(1.0) as usize)
            }
            Family::Hyperexponential { probs, rates } => {
                let mut j = 1usize;
                loop {
                    let tail: f64 = probs
                        .iter()
                        .zip(rates)
                        .map(|(qb, l)| qb * (mu / (l + mu)).powi(j as i32 + 1))
                        .sum();
                    if tail < bound {
                        return Ok(j);
                    }
                    j += 1;
                    if j > 10_000_000 {
                        return Err(Error::NonConvergence {
                            iterations: j as u64,
                            last: tail,
                        });
                    }
                }
            }
            Family::Erlang { shape, rate } => {
                let k = *shape as f64;
                let q = mu / (rate + mu);
                let mut j = *shape as usize;
                loop {
                    // r_{j+1}/r_j = q(k+j)/(j+1); once < 1 the tail is geometric.
                    let ratio = q * (k + j as f64) / (j as f64 + 1.0);
                    if ratio < 1.0 {
                        let r_j = self.completion_probs(mu, j)?[j];
                        if r_j * ratio / (1.0 - ratio) < bound {
                            return Ok(j);
                        }
                    }
                    j += 1;
                }
            }
            Family::Deterministic { value } => {
                poisson_style_cutoff(mu * value, bound, |j| {
                    (-mu * value + j as f64 * (mu * value).ln() - ln_factorial(j as u64)).exp()
                })
            }
            Family::Quadrature(gd) => {
                // N given T <= upper is stochastically below Poisson(μ·upper).
                let m = mu * gd.upper;
                poisson_style_cutoff(m, bound, |j| {
                    (-m + j as f64 * m.ln() - ln_factorial(j as u64)).exp()
                })
            }
        }
    }

    /// Raw moment `E[A^m]`.
    pub fn raw_moment(&self, m: u32) -> Result<f64> {
        if m == 0 {
            return Ok(1.0);
        }
        match &self.family {
            Family::Exponential { rate } => {
                Ok((ln_factorial(m as u64) - m as f64 * rate.ln()).exp())
            }
            Family::Erlang { shape, rate } => {
                let k = *shape as f64;
                Ok((ln_gamma(k + m as f64) - ln_gamma(k) - m as f64 * rate.ln()).exp())
            }
            Family::Hyperexponential { probs, rates } => Ok(probs
                .iter()
                .zip(rates)
                .map(|(q, l)| q * (ln_factorial(m as u64) - m as f64 * l.ln()).exp())
                .sum()),
            Family::Deterministic { value } => Ok(value.powi(m as i32)),
            Family::Quadrature(gd) => {
                let d = gd.density.clone();
                let v = integrate(|x| x.powi(m as i32) * d(x), 0.0, gd.upper, QUAD_TOL)?;
                Ok(v / gd.mass)
            }
        }
    }

    /// Scaled moment `ρ_m = μ^m E[A^m]`, `m ∈ {1, 2, 3}`.
    pub fn scaled_moment(&self, mu: f64, m: u32) -> Result<f64> {
        check_mu(mu)?;
        if !(1..=3).contains(&m) {
            return Err(Error::InvalidParameter(format!(
                "scaled moment order must be 1, 2 or 3, got {m}"
            )));
        }
        Ok(mu.powi(m as i32) * self.raw_moment(m)?)
    }

    /// Draws one interarrival time from `A` using the given stream.
    pub fn sample(&self, stream: &mut Stream) -> f64 {
        match &self.family {
            Family::Exponential { rate } => stream.exp(*rate),
            Family::Erlang { shape, rate } => {
                (0..*shape).map(|_| stream.exp(*rate)).sum()
            }
            Family::Hyperexponential { probs, rates } => {
                let u = stream.next_f64();
                let mut acc = 0.0;
                for (q, l) in probs.iter().zip(rates) {
                    acc += q;
                    if u < acc {
                        return stream.exp(*l);
                    }
                }
                stream.exp(*rates.last().unwrap())
            }
            Family::Deterministic { value } => *value,
            Family::Quadrature(gd) => {
                let u = stream.next_f64();
                let idx = gd.cdf_grid.partition_point(|c| *c <= u).min(gd.cdf_grid.len() - 1);
                let lo = idx - 1;
                let step = gd.upper / (gd.cdf_grid.len() - 1) as f64;
                let c0 = gd.cdf_grid[lo];
                let c1 = gd.cdf_grid[idx];
                let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
                (lo as f64 + frac) * step
            }
        }
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "service rate mu must be positive and finite, got {mu}"
        )));
    }
    Ok(())
}

fn poisson_style_cutoff<F: Fn(usize) -> f64>(mean: f64, bound: f64, pmf: F) -> Result<usize> {
    let mut j = mean.ceil() as usize + 1;
    loop {
        // pmf ratio mean/(j+1) < 1 past the mode; geometric tail bound.
        let ratio = mean / (j as f64 + 1.0);
        if ratio < 1.0 && pmf(j) * ratio / (1.0 - ratio) < bound {
            return Ok(j);
        }
        j += 1;
        if j > 100_000_000 {
            return Err(Error::NonConvergence {
                iterations: j as u64,
                last: pmf(j),
            });
        }
    }
}

/// Load and scaled-moment summary of a queue's arrival side.
///
/// `gamma_m` are the factorial moments of the completion-count distribution,
/// related to the scaled moments by `γ₁ = 1/ρ`, `γ₂ = ρ₂`, `γ₃ = ρ₃`.
#[derive(Debug, Clone)]
pub struct QueueStats {
    pub rho: f64,
    pub rho_m: [f64; 3],
    pub gamma_m: [f64; 3],
}

impl QueueStats {
    pub fn compute(model: &InterarrivalModel, mu: f64) -> Result<Self> {
        check_mu(mu)?;
        let rho = model.rate() / mu;
        let rho_m = [
            model.scaled_moment(mu, 1)?,
            model.scaled_moment(mu, 2)?,
            model.scaled_moment(mu, 3)?,
        ];
        Ok(QueueStats {
            rho,
            rho_m,
            gamma_m: rho_m,
        })
    }
}

/// Parses the CLI distribution grammar:
/// `exp:rate=L`, `erlang:k=K,rate=B`, `hyper:q=q1,q2,...;rates=l1,l2,...`,
/// `det:d=D`.
pub fn parse_model(spec: &str) -> Result<InterarrivalModel> {
    let (head, body) = spec
        .split_once(':')
        .ok_or_else(|| Error::InvalidParameter(format!("bad distribution spec '{spec}'")))?;
    match head {
        "exp" => {
            let rate = parse_field(body, "rate")?;
            InterarrivalModel::exponential(rate)
        }
        "erlang" => {
            let mut k = None;
            let mut rate = None;
            for part in body.split(',') {
                let (key, val) = split_kv(part)?;
                match key {
                    "k" => k = Some(parse_num(val)?),
                    "rate" => rate = Some(parse_num(val)?),
                    _ => {
                        return Err(Error::InvalidParameter(format!(
                            "unknown erlang field '{key}'"
                        )))
                    }
                }
            }
            let k = k.ok_or_else(|| Error::InvalidParameter("erlang needs k=".into()))?;
            let rate = rate.ok_or_else(|| Error::InvalidParameter("erlang needs rate=".into()))?;
            if k.fract() != 0.0 || k < 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "erlang shape must be a positive integer, got {k}"
                )));
            }
            InterarrivalModel::erlang(k as u32, rate)
        }
        "hyper" => {
            let mut probs = None;
            let mut rates = None;
            for part in body.split(';') {
                let (key, val) = split_kv(part)?;
                match key {
                    "q" => probs = Some(parse_list(val)?),
                    "rates" => rates = Some(parse_list(val)?),
                    _ => {
                        return Err(Error::InvalidParameter(format!(
                            "unknown hyper field '{key}'"
                        )))
                    }
                }
            }
            let probs = probs.ok_or_else(|| Error::InvalidParameter("hyper needs q=".into()))?;
            let rates = rates.ok_or_else(|| Error::InvalidParameter("hyper needs rates=".into()))?;
            InterarrivalModel::hyperexponential(probs, rates)
        }
        "det" => {
            let d = parse_field(body, "d")?;
            InterarrivalModel::deterministic(d)
        }
        other => Err(Error::InvalidParameter(format!(
            "unknown distribution family '{other}'"
        ))),
    }
}

fn split_kv(part: &str) -> Result<(&str, &str)> {
    part.split_once('=')
        .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got '{part}'")))
}

fn parse_field(body: &str, key: &str) -> Result<f64> {
    let (k, v) = split_kv(body)?;
    if k != key {
        return Err(Error::InvalidParameter(format!(
            "expected field '{key}', got '{k}'"
        )));
    }
    parse_num(v)
}

fn parse_num(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad number '{s}'")))
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_num).collect()
}
