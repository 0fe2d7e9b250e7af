//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `cargo test --test acceptance -- --nocapture`
//! to see them all).
//!
//! The criteria cross-validate the three layers: the exact recurrence
//! against the closed-form M/M/1/n oracle, the asymptotic formulas
//! against the exact kernel, and the Monte Carlo oracle against both.

use std::time::Instant;

use gim1::asympt;
use gim1::dist::{InterarrivalModel, TAIL_BOUND};
use gim1::kernel::{solve_loss_table, QueueSpec};
use gim1::roots::{sigma_expansion, solve_sigma};
use gim1::sim::simulate;

/// Closed-form M/M/1/n loss probability (independent oracle).
fn mm1_loss(rho: f64, n: usize) -> f64 {
    if (rho - 1.0).abs() < 1e-14 {
        1.0 / (n as f64 + 1.0)
    } else {
        (1.0 - rho) * rho.powi(n as i32) / (1.0 - rho.powi(n as i32 + 1))
    }
}

fn mm1_queue(rho: f64, n: usize) -> QueueSpec {
    QueueSpec::new(InterarrivalModel::exponential(rho).unwrap(), 1.0, n).unwrap()
}

/// Hyperexponential with two balanced branches and the given arrival rate.
fn hyper2(lambda: f64, rate1: f64) -> InterarrivalModel {
    // mean = 0.5/rate1 + 0.5/rate2 = 1/lambda
    let rate2 = 0.5 / (1.0 / lambda - 0.5 / rate1);
    InterarrivalModel::hyperexponential(vec![0.5, 0.5], vec![rate1, rate2]).unwrap()
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "{}  {criterion}  ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion}: {detail}");
}

#[test]
fn c01_exact_oracle_equivalence() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for &rho in &[0.3, 0.5, 0.9, 1.0, 2.0] {
        let table = solve_loss_table(&mm1_queue(rho, 200)).unwrap();
        for n in 0..=200 {
            let oracle = mm1_loss(rho, n);
            worst = worst.max((table.p[n] - oracle).abs() / oracle);
        }
    }
    let elapsed = start.elapsed();
    report(
        "criterion 1: exact kernel matches M/M/1/n closed form",
        worst < 1e-10 && elapsed.as_secs_f64() < 1.0,
        &format!("worst rel err {worst:.3e}, {elapsed:.2?}"),
    );
}

#[test]
fn c02_subcritical_formula_exact_for_mm1() {
    let mut worst = 0.0f64;
    for &rho in &[0.3, 0.5, 0.9] {
        let q = mm1_queue(rho, 100);
        let sigma = solve_sigma(&q).unwrap();
        for n in 0..=100 {
            let est = asympt::approx_subcritical(&q, n, &sigma).unwrap().value;
            worst = worst.max((est - mm1_loss(rho, n)).abs());
        }
    }
    report(
        "criterion 2: subcritical formula exact on M/M/1",
        worst < 1e-12,
        &format!("worst abs err {worst:.3e}"),
    );
}

#[test]
fn c03_geometric_remainder_decay() {
    let start = Instant::now();
    let models = [
        ("erlang-2", InterarrivalModel::erlang(2, 1.4).unwrap()),
        ("hyper-2", hyper2(0.7, 1.0)),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (name, model) in models {
        let q = QueueSpec::new(model, 1.0, 60).unwrap();
        assert!((q.rho() - 0.7).abs() < 1e-12);
        let table = solve_loss_table(&q).unwrap();
        let sigma = solve_sigma(&q).unwrap();
        // The o(sigma^{2n}) remainder only bounds the relative error by a
        // sigma-per-step rate; for these rational-transform families the true
        // rate is sigma/z2 with z2 the next root of z = alpha(mu - mu z), which
        // is strictly faster. The check is therefore one-sided (at least 80% of
        // the ln sigma rate) and restricted to errors above the f64 noise floor
        // of the kernel, where geometric decay is actually observable.
        const NOISE_FLOOR: f64 = 1e-11;
        let points: Vec<(f64, f64)> = (10..=60)
            .filter_map(|n| {
                let est = asympt::approx_subcritical(&q, n, &sigma).unwrap().value;
                let rel = (est - table.p[n]).abs() / table.p[n];
                (rel > NOISE_FLOOR).then(|| (n as f64, rel.ln()))
            })
            .collect();
        let decreasing = points.windows(2).all(|w| w[1].1 < w[0].1);
        // Least-squares slope of ln(rel err) against n over the usable points.
        let m = points.len() as f64;
        let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
        let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for &(x, y) in &points {
            sxy += (x - mean_x) * (y - mean_y);
            sxx += (x - mean_x) * (x - mean_x);
        }
        let slope = sxy / sxx;
        let target = sigma.sigma.ln();
        let ratio = slope / target;
        let ok = points.len() >= 3 && decreasing && ratio >= 0.8;
        details.push(format!(
            "{name}: slope {slope:.4} vs ln sigma {target:.4} (ratio {ratio:.3}, >=0.8), \
             monotone {decreasing} over {} points above noise",
            points.len()
        ));
        pass &= ok;
    }
    let elapsed = start.elapsed();
    pass &= elapsed.as_secs_f64() < 1.0;
    report(
        "criterion 3: geometric remainder decay at rho = 0.7",
        pass,
        &format!("{}; {elapsed:.2?}", details.join("; ")),
    );
}

#[test]
fn c04_critical_limit() {
    let n = 2000;
    let erlang = QueueSpec::new(InterarrivalModel::erlang(2, 2.0).unwrap(), 1.0, n).unwrap();
    let e_gap = (n as f64 * solve_loss_table(&erlang).unwrap().p[n] - 0.75).abs();
    let m_gap = (n as f64 * solve_loss_table(&mm1_queue(1.0, n)).unwrap().p[n] - 1.0).abs();
    report(
        "criterion 4: critical limit n*p_n -> rho2/2",
        e_gap <= 0.01 && m_gap <= 0.001,
        &format!("erlang-2 gap {e_gap:.4e} (<=0.01), M/M/1 gap {m_gap:.4e} (<=0.001)"),
    );
}

#[test]
fn c05_reciprocal_slope() {
    let cases = [
        ("mm1", InterarrivalModel::exponential(1.0).unwrap(), 1.0),
        ("det-1", InterarrivalModel::deterministic(1.0).unwrap(), 2.0),
        (
            "erlang-2",
            InterarrivalModel::erlang(2, 2.0).unwrap(),
            4.0 / 3.0,
        ),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (name, model, slope) in cases {
        let q = QueueSpec::new(model, 1.0, 1001).unwrap();
        let table = solve_loss_table(&q).unwrap();
        let expected = asympt::reciprocal_increment(&q).unwrap();
        assert!((expected - slope).abs() < 1e-12);
        let worst = (500..1000)
            .map(|n| ((1.0 / table.p[n + 1] - 1.0 / table.p[n]) - slope).abs())
            .fold(0.0f64, f64::max);
        pass &= worst <= 0.01;
        if name == "mm1" {
            let exact_worst = (0..1000)
                .map(|n| ((1.0 / table.p[n + 1] - 1.0 / table.p[n]) - 1.0).abs())
                .fold(0.0f64, f64::max);
            pass &= exact_worst <= 1e-10;
            details.push(format!("mm1 exact increment dev {exact_worst:.2e}"));
        }
        details.push(format!("{name} worst dev {worst:.4e}"));
    }
    report(
        "criterion 5: reciprocal slope 2/rho2 at criticality",
        pass,
        &details.join("; "),
    );
}

#[test]
fn c06_heavy_traffic_gap() {
    let mut pass = true;
    let mut details = Vec::new();
    for &(eps, n, max_gap) in &[(0.01, 100usize, 0.05), (0.005, 200, 0.025)] {
        let q = mm1_queue(1.0 - eps, n);
        let rho2 = q.arrival.scaled_moment(q.mu, 2).unwrap();
        let formula = asympt::heavy_traffic_approx(eps, n, rho2).unwrap().value;
        let exact = solve_loss_table(&q).unwrap().p[n];
        let gap = (formula - exact).abs() / exact;
        pass &= gap <= max_gap;
        details.push(format!(
            "(eps={eps}, n={n}): formula {formula:.6e} vs exact {exact:.6e}, gap {:.2}% (<= {:.1}%)",
            100.0 * gap,
            100.0 * max_gap
        ));
    }
    report("criterion 6: heavy-traffic formula vs exact", pass, &details.join("; "));
}

#[test]
fn c07_sigma_properties() {
    let mut pass = true;
    let mut details = Vec::new();

    // M/M/1: sigma = rho to 1e-12; residuals within tolerance everywhere.
    let mut worst_sigma = 0.0f64;
    let mut worst_res = 0.0f64;
    for &rho in &[0.2, 0.5, 0.8, 0.95] {
        let sol = solve_sigma(&mm1_queue(rho, 1)).unwrap();
        worst_sigma = worst_sigma.max((sol.sigma - rho).abs());
        worst_res = worst_res.max(sol.residual);
    }
    pass &= worst_sigma < 1e-12 && worst_res <= 1e-14;
    details.push(format!(
        "mm1 sigma dev {worst_sigma:.2e}, worst residual {worst_res:.2e}"
    ));

    // Expansion order: |sigma(eps) - (1 - 2 eps/rho2)| / eps^2 stable under halving.
    for family in ["mm1", "erlang-2"] {
        let mut ks = Vec::new();
        for &eps in &[0.04, 0.02, 0.01, 0.005] {
            let lambda = 1.0 - eps;
            let model = match family {
                "mm1" => InterarrivalModel::exponential(lambda).unwrap(),
                _ => InterarrivalModel::erlang(2, 2.0 * lambda).unwrap(),
            };
            let q = QueueSpec::new(model, 1.0, 1).unwrap();
            let rho2 = q.arrival.scaled_moment(q.mu, 2).unwrap();
            let sigma = solve_sigma(&q).unwrap().sigma;
            ks.push((sigma - sigma_expansion(eps, rho2)).abs() / (eps * eps));
        }
        let max = ks.iter().cloned().fold(f64::MIN, f64::max);
        let min = ks.iter().cloned().fold(f64::MAX, f64::min);
        let ok = max <= 1e-6 || max / min < 2.0;
        pass &= ok;
        details.push(format!("{family} remainder ratios {ks:?}"));
    }
    report("criterion 7: sigma root and expansion order", pass, &details.join("; "));
}

#[test]
fn c08_supercritical_limit() {
    let models = [
        ("exp", InterarrivalModel::exponential(2.0).unwrap()),
        ("hyper-2", hyper2(2.0, 3.0)),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (name, model) in models {
        let q = QueueSpec::new(model, 1.0, 80).unwrap();
        assert!((q.rho() - 2.0).abs() < 1e-12);
        let limit = asympt::limit_supercritical(&q).unwrap().value;
        assert!((limit - 0.5).abs() < 1e-15);
        let p80 = solve_loss_table(&q).unwrap().p[80];
        let gap = (p80 - limit).abs();
        pass &= gap <= 1e-4;
        details.push(format!("{name}: |p_80 - 0.5| = {gap:.2e}"));
    }
    report("criterion 8: supercritical limit reached by n = 80", pass, &details.join("; "));
}

#[test]
fn c09_simulation_agreement_and_determinism() {
    let start = Instant::now();
    let families: Vec<(&str, Box<dyn Fn(f64) -> InterarrivalModel>)> = vec![
        (
            "exp",
            Box::new(|lambda| InterarrivalModel::exponential(lambda).unwrap()),
        ),
        (
            "erlang-2",
            Box::new(|lambda| InterarrivalModel::erlang(2, 2.0 * lambda).unwrap()),
        ),
        ("hyper-2", Box::new(|lambda| hyper2(lambda, 2.0 * lambda))),
        (
            "det",
            Box::new(|lambda| InterarrivalModel::deterministic(1.0 / lambda).unwrap()),
        ),
    ];
    let mut pass = true;
    let mut worst_z = 0.0f64;
    let mut first_run = Vec::new();
    for (name, make) in &families {
        for &rho in &[0.8, 1.0, 1.25] {
            for &n in &[5usize, 20] {
                let q = QueueSpec::new(make(rho), 1.0, n).unwrap();
                let exact = solve_loss_table(&q).unwrap().p[n];
                let est = simulate(&q, 1_000_000, 20, 2024).unwrap();
                let dev = (est.estimate - exact).abs();
                let z = dev / est.std_error;
                worst_z = worst_z.max(z);
                if dev > 4.0 * est.std_error {
                    pass = false;
                    println!(
                        "  grid point {name} rho={rho} n={n}: sim {} vs exact {exact} (z = {z:.2})",
                        est.estimate
                    );
                }
                first_run.push(est);
            }
        }
    }
    let elapsed = start.elapsed();
    pass &= elapsed.as_secs_f64() < 120.0;

    // Bit-exact reproducibility of the whole grid under the same seed.
    let mut idx = 0;
    let mut reproducible = true;
    for (_, make) in &families {
        for &rho in &[0.8, 1.0, 1.25] {
            for &n in &[5usize, 20] {
                let q = QueueSpec::new(make(rho), 1.0, n).unwrap();
                let est = simulate(&q, 1_000_000, 20, 2024).unwrap();
                reproducible &= est == first_run[idx];
                idx += 1;
            }
        }
    }
    pass &= reproducible;
    report(
        "criterion 9: simulation agreement and determinism",
        pass,
        &format!("worst |z| {worst_z:.2} (<4), grid {elapsed:.1?} (<120s), bit-identical rerun {reproducible}"),
    );
}

#[test]
fn c10_normalization_and_lemma_hypothesis() {
    let models = [
        InterarrivalModel::exponential(0.8).unwrap(),
        InterarrivalModel::exponential(1.25).unwrap(),
        InterarrivalModel::erlang(2, 2.0).unwrap(),
        InterarrivalModel::erlang(4, 3.0).unwrap(),
        InterarrivalModel::hyperexponential(vec![0.5, 0.5], vec![1.0, 3.0]).unwrap(),
        InterarrivalModel::deterministic(1.0).unwrap(),
        InterarrivalModel::deterministic(0.4).unwrap(),
    ];
    let mut pass = true;
    let mut worst_gap = 0.0f64;
    let mut worst_r01 = 0.0f64;
    for model in &models {
        for &mu in &[0.7, 1.0, 2.3] {
            let cutoff = model.completion_tail_cutoff(mu, TAIL_BOUND).unwrap();
            let r = model.completion_probs(mu, cutoff).unwrap();
            let gap = (1.0 - r.iter().sum::<f64>()).abs();
            worst_gap = worst_gap.max(gap);
            pass &= gap <= 1e-10;
            let r01 = r[0] + r[1];
            worst_r01 = worst_r01.max(r01);
            pass &= r01 < 1.0;
        }
    }
    report(
        "criterion 10: r_j normalization and r0+r1 < 1",
        pass,
        &format!("worst |1 - sum r_j| = {worst_gap:.2e}, max r0+r1 = {worst_r01:.6}"),
    );
}
