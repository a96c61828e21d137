//! Acceptance criteria, one test each. Every test prints a single verdict line to
//! stdout (uncaptured) and then asserts it.

use std::io::Write;
use std::time::{Duration, Instant};

use corrsim::channels::{entropy_exchange_purified, local_instrument_check, MixedUnitaryChannel};
use corrsim::chernoff::{chernoff_trial, WeylSampler};
use corrsim::entropy::{entanglement_entropy, mutual_information, shannon_entropy, spectral_entropy};
use corrsim::fixtures;
use corrsim::operator::{trace_norm, ComplexMatrix, DimList};
use corrsim::protocols::{
    bell_erasure_demo, conjecture_scan, decorrelate_prop2, disentangle_pure, multipartite_erasure, prop1_check,
    ssa_scan, ChannelFamily, Prop2Params,
};
use corrsim::random::{haar_unitary, simplex_point, stream};
use corrsim::states::{random_induced, random_pure, Bipartition, DensityMatrix};
use corrsim::typicality::{gentle_measurement_check, typical_projector, typicality_report, typicality_report_diagonal};

fn verdict(id: u32, title: &str, pass: bool, elapsed: Duration, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let line = format!("acceptance {id:>2} [{tag}] {title} ({:.2} s): {detail}\n", elapsed.as_secs_f64());
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(pass, "acceptance criterion {id} failed: {detail}");
}

fn qubits(n: usize) -> DimList {
    DimList::uniform(2, n).unwrap()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

#[test]
fn criterion_01_bell_pipeline() {
    let start = Instant::now();
    let cut = Bipartition::split_at(1, 2).unwrap();
    let mut failures = Vec::new();

    let i0 = mutual_information(&fixtures::bell().density(), &cut).unwrap();
    if (i0 - 2.0).abs() > 1e-9 {
        failures.push(format!("I(Φ+) = {i0}"));
    }
    let r = bell_erasure_demo().unwrap();
    let step1 = &r.steps[0];
    let after_z = fixtures::bell_dephased();
    let z_out = corrsim::channels::qubit_twirl(3).apply(&fixtures::bell().density()).unwrap();
    let z_dist = trace_norm(&(z_out.matrix() - after_z.matrix()));
    if z_dist > 1e-10 {
        failures.push(format!("Z-twirl output off by {z_dist:e}"));
    }
    if !step1.separability.certifies_separable() {
        failures.push("Z-twirl output not PPT-certified".into());
    }
    if (r.snapshots[1].mutual_information - 1.0).abs() > 1e-9 {
        failures.push(format!("I after Z = {}", r.snapshots[1].mutual_information));
    }
    let c = step1.cost;
    if (c.log_n - 1.0).abs() > 1e-9 || (c.shannon - 1.0).abs() > 1e-9 || (c.entropy_exchange - 1.0).abs() > 1e-9 {
        failures.push(format!("step 1 cost {c:?}"));
    }
    let x_dist = trace_norm(&(r.final_state.matrix() - &ComplexMatrix::identity(4).scale(0.25)));
    if x_dist > 1e-10 {
        failures.push(format!("final state off 1/4 by {x_dist:e}"));
    }
    if r.snapshots[2].mutual_information.abs() > 1e-9 {
        failures.push(format!("final I = {}", r.snapshots[2].mutual_information));
    }
    if (r.totals.log_n - 2.0).abs() > 1e-12 {
        failures.push(format!("total log N = {}", r.totals.log_n));
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(1) {
        failures.push("runtime above 1 s".into());
    }
    let detail = if failures.is_empty() {
        format!("I: 2 -> {:.3} -> {:.3}, totals = {:?}", r.snapshots[1].mutual_information, r.snapshots[2].mutual_information, r.totals)
    } else {
        failures.join("; ")
    };
    verdict(1, "Bell two-step erasure", failures.is_empty(), elapsed, &detail);
}

#[test]
fn criterion_02_noise_cost_chain() {
    let start = Instant::now();
    let dims = qubits(2);
    let mut worst_slack = f64::INFINITY;
    let mut worst_route = 0.0f64;
    for trial in 0..500u64 {
        let mut rng = stream(2002, trial);
        let n = 1 + (trial as usize % 16);
        let p = simplex_point(&mut rng, n);
        let ensemble: Vec<(f64, ComplexMatrix)> = p.iter().map(|&pi| (pi, haar_unitary(&mut rng, 4))).collect();
        let channel = MixedUnitaryChannel::general(2, 2, ensemble).unwrap();
        let rho = random_induced(&mut rng, &dims, None).unwrap();
        let log_n = (n as f64).log2();
        let h = shannon_entropy(&p);
        let gram = spectral_entropy(&channel.environment_gram(&rho).unwrap()).unwrap();
        let purified = entropy_exchange_purified(&channel.kraus_operators(), &rho).unwrap();
        worst_slack = worst_slack.min(log_n - h).min(h - gram);
        worst_route = worst_route.max((gram - purified).abs());
    }
    let elapsed = start.elapsed();
    let pass = worst_slack >= -2e-9 && worst_route <= 1e-8 && elapsed < Duration::from_secs(30);
    verdict(
        2,
        "log N >= H(p) >= S_e on 500 random channels",
        pass,
        elapsed,
        &format!("min slack {worst_slack:.3e}, max |S_e(gram) - S_e(purified)| {worst_route:.3e}"),
    );
}

#[test]
fn criterion_03_ssa_scan() {
    let start = Instant::now();
    let r = ssa_scan(1000, &qubits(3), 42, false).unwrap();
    let elapsed = start.elapsed();
    let pass = r.min_value >= -1e-9 && r.violations == 0 && elapsed < Duration::from_secs(60);
    verdict(
        3,
        "strong subadditivity on 1000 random 2x2x2 states",
        pass,
        elapsed,
        &format!("min I(A:C|B) = {:.3e} (state {}), violations = {}", r.min_value, r.argmin, r.violations),
    );
}

#[test]
fn criterion_04_pure_state_results() {
    let start = Instant::now();
    let cut = Bipartition::split_at(1, 2).unwrap();
    let mut worst_diag = 0.0f64;
    let mut worst_i = 0.0f64;
    let mut worst_pure = 0.0f64;
    let mut uncertified = 0;
    for k in 0..100u64 {
        let d = 2 + (k as usize % 3);
        let psi = random_pure(&mut stream(4004, k), &DimList::new(vec![d, d]).unwrap());
        let e = entanglement_entropy(&psi, &cut).unwrap();
        let r = disentangle_pure(&psi, &cut).unwrap();
        worst_diag = worst_diag.max(r.schmidt_diagonal_error);
        if !(r.separability.ppt.is_ppt && r.separability.certified()) {
            uncertified += 1;
        }
        worst_i = worst_i.max((mutual_information(&r.output, &cut).unwrap() - e).abs());
        worst_pure = worst_pure.max((mutual_information(&psi.density(), &cut).unwrap() - 2.0 * e).abs());
    }
    let elapsed = start.elapsed();
    let pass = worst_diag <= 1e-10 && uncertified == 0 && worst_i <= 1e-9 && worst_pure <= 1e-9 && elapsed < Duration::from_secs(10);
    verdict(
        4,
        "pure-state phase randomization on 100 states",
        pass,
        elapsed,
        &format!(
            "max Schmidt-diagonal error {worst_diag:.1e}, uncertified {uncertified}, max |I(out) - E| {worst_i:.1e}, max |I(psi) - 2E| {worst_pure:.1e}"
        ),
    );
}

#[test]
fn criterion_05_entropy_exchange_lower_bound() {
    let start = Instant::now();
    let rho = fixtures::bell_dephased();
    let mut worst = f64::INFINITY;
    let mut checked = 0;
    for n in [2usize, 3, 4] {
        for n_unitaries in [4usize, 16, 64] {
            for seed in 0..10u64 {
                let r = decorrelate_prop2(&rho, 1, n, Prop2Params::uniform(0.1), n_unitaries, seed).unwrap();
                let check = prop1_check(&r, 1.0, 1.0).unwrap();
                worst = worst.min(check.entropy_exchange - check.bound);
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = worst >= -1e-6 && elapsed < Duration::from_secs(300);
    verdict(5, "entropy-exchange lower bound on decorrelating channels", pass, elapsed, &format!("{checked} channels, min S_e - bound = {worst:.4}"));
}

#[test]
fn criterion_06_decorrelation_trend() {
    let start = Instant::now();
    let rho = fixtures::bell_dephased();
    let n = 4;
    let grid = [2usize, 4, 8, 16, 32, 64, 128, 256];
    let medians: Vec<f64> = grid
        .iter()
        .map(|&nu| {
            median((0..20u64).map(|seed| decorrelate_prop2(&rho, 1, n, Prop2Params::uniform(0.1), nu, seed).unwrap().achieved_eps).collect())
        })
        .collect();
    let decreasing = medians[..6].windows(2).all(|w| w[1] < w[0]);
    let needed = grid.iter().zip(&medians).find(|(_, &m)| m <= 0.3).map(|(&nu, _)| nu);
    let rate = needed.map(|nu| (nu as f64).log2() / n as f64);
    let rate_ok = rate.is_some_and(|r| (0.5..=2.5).contains(&r));
    let elapsed = start.elapsed();
    let pass = decreasing && rate_ok && elapsed < Duration::from_secs(600);
    let shown: Vec<String> = grid.iter().zip(&medians).map(|(nu, m)| format!("{nu}:{m:.3}")).collect();
    verdict(
        6,
        "decorrelation trend for the dephased Bell state, n = 4",
        pass,
        elapsed,
        &format!("median eps by N [{}], strictly decreasing to 64: {decreasing}, rate at eps <= 0.3: {rate:?}", shown.join(" ")),
    );
}

#[test]
fn criterion_07_typicality() {
    let start = Instant::now();
    let rho = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
    let mut failures = Vec::new();

    let tp = typical_projector(&rho, 10, 0.2).unwrap();
    let r10 = typicality_report(&tp, &rho).unwrap();
    let exact = 10.0 * 0.9f64.powi(9) * 0.1;
    if (r10.dim - 10.0).abs() > 1e-9 {
        failures.push(format!("tr Pi = {} at n = 10", r10.dim));
    }
    if (r10.mass - exact).abs() > 1e-9 {
        failures.push(format!("mass {} vs {exact} at n = 10", r10.mass));
    }
    let mut sandwich_points = 0;
    for n in 1..=10 {
        for eps in [0.1, 0.2, 0.3] {
            let tp = typical_projector(&rho, n, eps).unwrap();
            let r = typicality_report(&tp, &rho).unwrap();
            let fast = typicality_report_diagonal(&[0.9, 0.1], n, eps).unwrap();
            sandwich_points += 1;
            if !r.sandwich_ok || !fast.sandwich_ok || (r.mass - fast.mass).abs() > 1e-9 {
                failures.push(format!("sandwich or counting mismatch at n = {n}, eps = {eps}"));
            }
        }
    }
    let r200 = typicality_report_diagonal(&[0.9, 0.1], 200, 0.1).unwrap();
    if !r200.sandwich_ok {
        failures.push("sandwich fails at n = 200".into());
    }
    if r200.mass < 0.9 {
        failures.push(format!("mass at n = 200, eps = 0.1 is {:.5} < 0.9", r200.mass));
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(30) {
        failures.push("runtime above 30 s".into());
    }
    let detail = format!(
        "n = 10: tr Pi = {}, mass = {:.10}; n = 200: mass = {:.5}, dim = {:.3e}; sandwich checked at {} points{}",
        r10.dim,
        r10.mass,
        r200.mass,
        r200.dim,
        sandwich_points + 1,
        if failures.is_empty() { String::new() } else { format!("; FAILURES: {}", failures.join("; ")) }
    );
    verdict(7, "typical subspace of diag(0.9, 0.1)", failures.is_empty(), elapsed, &detail);
}

#[test]
fn criterion_08_gentle_and_chernoff() {
    let start = Instant::now();
    let mut worst_gentle = f64::INFINITY;
    for trial in 0..500u64 {
        let mut rng = stream(8008, trial);
        let d = 4;
        let rho = random_induced(&mut rng, &DimList::new(vec![d]).unwrap(), None).unwrap();
        let u = haar_unitary(&mut rng, d);
        let rank = 1 + (trial as usize % (d - 1)) + 1;
        let mut proj = ComplexMatrix::zeros(d, d);
        for k in 0..rank.min(d) {
            proj = &proj + &ComplexMatrix::projector(&u.column_vec(k));
        }
        let g = gentle_measurement_check(rho.matrix(), &proj).unwrap();
        worst_gentle = worst_gentle.min(g.bound + 1e-9 - g.lhs);
    }

    let mut rng = stream(8008, u64::MAX);
    let tau = random_induced(&mut rng, &DimList::new(vec![4, 2]).unwrap(), None).unwrap();
    let sampler = WeylSampler::new(tau.matrix(), 4, 2).unwrap();
    let mut grid_ok = true;
    let mut cells = Vec::new();
    for eps in [0.2, 0.5] {
        for n in [32usize, 64, 128, 256, 512, 1024] {
            let r = chernoff_trial(&sampler, n, eps, 200, 8 + n as u64).unwrap();
            grid_ok &= r.ok;
            cells.push(format!("({n},{eps}):{:.3}/{:.2e}", r.violation_rate, r.bound));
        }
    }
    let elapsed = start.elapsed();
    let pass = worst_gentle >= 0.0 && grid_ok && elapsed < Duration::from_secs(300);
    verdict(
        8,
        "gentle measurement and operator Chernoff",
        pass,
        elapsed,
        &format!("min sqrt(8 delta) + 1e-9 - lhs = {worst_gentle:.3e}; rate/bound {}", cells.join(" ")),
    );
}

#[test]
fn criterion_09_multipartite() {
    let start = Instant::now();
    let ghz = multipartite_erasure(&fixtures::ghz3().density()).unwrap();
    let ghz_ok = (ghz.c_er - 3.0).abs() <= 1e-9 && (ghz.sequential[0] - 2.0).abs() <= 1e-9 && (ghz.sequential[1] - 1.0).abs() <= 1e-9;
    let mut worst = 0.0f64;
    for k in 0..200u64 {
        let rho = random_induced(&mut stream(9009, k), &qubits(3), None).unwrap();
        worst = worst.max(multipartite_erasure(&rho).unwrap().telescoping_residual);
    }
    let elapsed = start.elapsed();
    let pass = ghz_ok && worst <= 1e-9 && elapsed < Duration::from_secs(30);
    verdict(
        9,
        "multipartite total correlation",
        pass,
        elapsed,
        &format!("GHZ C_er = {:.12}, sequential = {:?}; max telescoping residual {worst:.1e}", ghz.c_er, ghz.sequential),
    );
}

#[test]
fn criterion_10_lopc_monotonicity() {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    for k in 0..500u64 {
        let mut rng = stream(1010, k);
        let rho = random_induced(&mut rng, &qubits(2), None).unwrap();
        let u = haar_unitary(&mut rng, 4);
        let block = |r0: usize| ComplexMatrix::from_fn(2, 2, |i, j| u.get(r0 + i, j));
        let instrument = vec![vec![block(0)], vec![block(2)]];
        let check = local_instrument_check(&rho, 2, &instrument).unwrap();
        worst = worst.min(check.lhs - check.rhs);
    }
    let elapsed = start.elapsed();
    let pass = worst >= -1e-9 && elapsed < Duration::from_secs(60);
    verdict(10, "mutual information under local instruments", pass, elapsed, &format!("min I(rho) - sum p_i I(rho_i) = {worst:.3e}"));
}

#[test]
fn criterion_11_conjecture_scan() {
    let start = Instant::now();
    let seed = 1111;
    let schmidt = conjecture_scan(10_000, 2, 2, seed, ChannelFamily::SchmidtDephasing).unwrap();
    let random = conjecture_scan(10_000, 2, 2, seed, ChannelFamily::RandomDephasingUnitary).unwrap();
    let serialized = serde_json::to_string(&random).is_ok() && serde_json::to_string(&schmidt).is_ok();
    let elapsed = start.elapsed();
    let pass = schmidt.witnesses.is_empty() && schmidt.evaluated == 10_000 && serialized && elapsed < Duration::from_secs(600);
    verdict(
        11,
        "separable-output mutual information vs entanglement scan",
        pass,
        elapsed,
        &format!(
            "seed {seed}; Schmidt dephasing: max excess {:.2e}, witnesses {}; random dephasing+unitary: evaluated {}, skipped {}, max excess {:.3e}, witnesses {}",
            schmidt.max_excess,
            schmidt.witnesses.len(),
            random.evaluated,
            random.skipped,
            random.max_excess,
            random.witnesses.len()
        ),
    );
}
