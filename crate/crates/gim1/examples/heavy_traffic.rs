//! Heavy-traffic and near-critical scalings: load 1 - epsilon with buffer n,
//! where the product C = epsilon * n decides which expansion applies. Shrink
//! epsilon at fixed C and watch the heavy-traffic formula converge to the
//! exact kernel value.

use gim1::asympt::{self, Regime};
use gim1::dist::InterarrivalModel;
use gim1::kernel::{loss_probability, QueueSpec};

fn main() -> gim1::Result<()> {
    // M/M/1 at fixed C = 1: (epsilon, n) = (0.02, 50), (0.01, 100), (0.005, 200).
    println!("heavy traffic, C = 1:");
    for (eps, n) in [(0.02, 50), (0.01, 100), (0.005, 200)] {
        let queue = QueueSpec::new(InterarrivalModel::exponential(1.0 - eps)?, 1.0, n)?;
        let rho2 = queue.arrival.scaled_moment(queue.mu, 2)?;
        let approx = asympt::heavy_traffic_approx(eps, n, rho2)?;
        let exact = loss_probability(&queue)?;
        println!(
            "  eps={eps:<6} n={n:<4} approx {:.6e}  exact {:.6e}  rel gap {:.2e}",
            approx.value,
            exact,
            (approx.value - exact).abs() / exact
        );
    }

    // Small C falls into the near-critical regime instead: p ~ rho2/(2n).
    println!("\nnear-critical, C = eps*n small:");
    for (eps, n) in [(0.001, 50), (0.0005, 100)] {
        let queue = QueueSpec::new(InterarrivalModel::exponential(1.0 - eps)?, 1.0, n)?;
        let rho2 = queue.arrival.scaled_moment(queue.mu, 2)?;
        let regime = asympt::classify(&queue, Some((eps, n)))?;
        assert!(matches!(regime, Regime::NearCritical));
        let approx = asympt::near_critical_approx(n, rho2)?;
        let exact = loss_probability(&queue)?;
        println!(
            "  eps={eps:<7} n={n:<4} approx {:.6e}  exact {:.6e}  rel gap {:.2e}",
            approx.value,
            exact,
            (approx.value - exact).abs() / exact
        );
    }
    Ok(())
}
