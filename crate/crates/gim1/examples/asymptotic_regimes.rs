//! Classify queues into asymptotic regimes and evaluate the matching formula,
//! reporting which equation produced each estimate and under what moment
//! conditions.

use gim1::asympt::{self, Regime};
use gim1::dist::InterarrivalModel;
use gim1::kernel::{loss_probability, QueueSpec};
use gim1::roots::solve_sigma;

fn main() -> gim1::Result<()> {
    let cases = [
        ("subcritical", InterarrivalModel::erlang(2, 1.4)?, 25),
        ("critical", InterarrivalModel::erlang(2, 2.0)?, 200),
        ("supercritical", InterarrivalModel::exponential(1.6)?, 60),
    ];

    for (label, model, n) in cases {
        let queue = QueueSpec::new(model, 1.0, n)?;
        let regime = asympt::classify(&queue, None)?;
        let estimate = match regime {
            Regime::Subcritical => {
                let sigma = solve_sigma(&queue)?;
                asympt::approx_subcritical(&queue, n, &sigma)?
            }
            Regime::Critical => asympt::approx_critical(&queue, n)?,
            Regime::Supercritical => asympt::limit_supercritical(&queue)?,
            // classify(..., None) never returns the scaled regimes
            other => unreachable!("{other:?}"),
        };
        let exact = loss_probability(&queue)?;
        println!(
            "{label:<13} rho={:.2} n={n:<4} {:?} -> {:.6e} (exact {:.6e}, rel err {:.2e})",
            queue.rho(),
            estimate.source,
            estimate.value,
            exact,
            (estimate.value - exact).abs() / exact
        );
        for cond in &estimate.conditions {
            println!("              condition: {} verified={}", cond.name, cond.verified);
        }
    }
    Ok(())
}
