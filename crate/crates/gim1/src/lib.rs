//! Loss probabilities for the GI/M/1/n single-server loss queue.
//!
//! Three mutually validating layers:
//!
//! - [`kernel`] — the exact table `p_0..p_n` via the partial-sum
//!   recurrence driven by the service-completion probabilities `r_j`;
//! - [`asympt`] — closed asymptotic formulas (geometric subcritical decay,
//!   the `ρ₂/(2n)` critical law, the supercritical limit `(ρ−1)/ρ`, and
//!   the heavy-traffic scaling in `C = εn`), dispatched by regime;
//! - [`sim`] — an embedded-chain Monte Carlo oracle with reproducible
//!   counter-based streams.
//!
//! [`dist`] supplies the interarrival families and their transform
//! machinery, [`roots`] the characteristic root `σ` of `z = α(μ−μz)`, and
//! [`cli`] a batch front end over all of it. See the crate `examples/`
//! directory for one runnable example per capability.
//!
//! ```
//! use gim1::dist::InterarrivalModel;
//! use gim1::kernel::{loss_probability, QueueSpec};
//!
//! let queue = QueueSpec::new(InterarrivalModel::exponential(0.5)?, 1.0, 2)?;
//! let p = loss_probability(&queue)?;
//! assert!((p - 1.0 / 7.0).abs() < 1e-12);
//! # Ok::<(), gim1::Error>(())
//! ```

pub mod asympt;
pub mod cli;
pub mod dist;
pub mod error;
mod kahan;
pub mod kernel;
pub mod quadrature;
pub mod rng;
pub mod roots;
pub mod sim;
mod special;

pub use error::{Error, Result};
