//! Solve the characteristic root sigma of z = alpha(mu - mu z) for several
//! interarrival families and compare against what each family predicts.

use gim1::dist::InterarrivalModel;
use gim1::kernel::QueueSpec;
use gim1::roots::solve_sigma;

fn main() -> gim1::Result<()> {
    let models = [
        ("exp rho=0.5", InterarrivalModel::exponential(0.5)?),
        ("exp rho=0.9", InterarrivalModel::exponential(0.9)?),
        ("erlang-2 rho=0.7", InterarrivalModel::erlang(2, 1.4)?),
        ("det d=1.25", InterarrivalModel::deterministic(1.25)?),
        (
            "hyper-2 rho=0.7",
            InterarrivalModel::hyperexponential(vec![0.5, 0.5], vec![1.0, 7.0 / 13.0])?,
        ),
        ("exp rho=1.3 (supercritical)", InterarrivalModel::exponential(1.3)?),
    ];

    println!(
        "{:<30} {:>8} {:>18} {:>12} {:>10} {:>6}",
        "model", "rho", "sigma", "residual", "K", "iters"
    );
    for (name, model) in models {
        let queue = QueueSpec::new(model, 1.0, 10)?;
        let sol = solve_sigma(&queue)?;
        println!(
            "{:<30} {:>8.4} {:>18.15} {:>12.2e} {:>10.6} {:>6}",
            name,
            queue.rho(),
            sol.sigma,
            sol.residual,
            sol.decay_coeff,
            sol.iterations
        );
    }

    // For exponential interarrivals sigma is exactly rho.
    let mm1 = QueueSpec::new(InterarrivalModel::exponential(0.5)?, 1.0, 10)?;
    let gap = (solve_sigma(&mm1)?.sigma - 0.5).abs();
    println!("\nM/M/1 check: |sigma - rho| = {gap:.2e}");
    Ok(())
}
