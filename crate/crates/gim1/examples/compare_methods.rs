//! Exact vs asymptotic vs simulated loss probability across buffer sizes for
//! one subcritical queue — the same sweep the `compare` CLI subcommand does.

use gim1::asympt;
use gim1::dist::InterarrivalModel;
use gim1::kernel::{solve_loss_table, QueueSpec};
use gim1::roots::solve_sigma;
use gim1::sim::simulate;

fn main() -> gim1::Result<()> {
    let ns = [2usize, 5, 10, 20, 40];
    let max_n = *ns.iter().max().unwrap();
    let queue = QueueSpec::new(InterarrivalModel::erlang(2, 1.4)?, 1.0, max_n)?;
    let table = solve_loss_table(&queue)?;
    let sigma = solve_sigma(&queue)?;

    println!(
        "{:>4} {:>14} {:>14} {:>10} {:>14} {:>8}",
        "n", "exact", "asympt", "rel_err", "sim", "z"
    );
    for n in ns {
        let exact = table.p[n];
        let approx = asympt::approx_subcritical(&queue, n, &sigma)?.value;
        let sub = QueueSpec::new(queue.arrival.clone(), queue.mu, n)?;
        let sim = simulate(&sub, 200_000, 10, 7)?;
        println!(
            "{:>4} {:>14.6e} {:>14.6e} {:>10.2e} {:>14.6e} {:>8.2}",
            n,
            exact,
            approx,
            (approx - exact).abs() / exact,
            sim.estimate,
            (sim.estimate - exact) / sim.std_error
        );
    }
    Ok(())
}
