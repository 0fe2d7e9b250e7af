//! Solve the embedded-chain recurrence for an Erlang-2 queue and print the
//! full table: unnormalized tilde-pi, stationary pi, and loss probability p
//! at every buffer size up to n.

use gim1::dist::InterarrivalModel;
use gim1::kernel::{solve_loss_table, verify_recurrence, QueueSpec};

fn main() -> gim1::Result<()> {
    let arrival = InterarrivalModel::erlang(2, 1.4)?; // mean 1/0.7 => rho = 0.7
    let queue = QueueSpec::new(arrival, 1.0, 12)?;
    let table = solve_loss_table(&queue)?;

    println!("rho = {:.3}, condition = {:?}", queue.rho(), table.condition_flag);
    println!("{:>3} {:>18} {:>14} {:>14}", "k", "tilde_pi", "pi", "p");
    for k in 0..table.p.len() {
        println!(
            "{:>3} {:>18.10e} {:>14.6e} {:>14.6e}",
            k, table.tilde_pi[k], table.pi[k], table.p[k]
        );
    }

    // Re-check the solved table against the recurrence it came from.
    let cutoff = queue.arrival.completion_tail_cutoff(queue.mu, 1e-14)?;
    let r = queue.arrival.completion_probs(queue.mu, cutoff)?;
    println!("recurrence residual: {:.3e}", verify_recurrence(&table, &r));
    println!("worst cancellation:  {:.3e}", table.worst_cancellation);
    Ok(())
}
