//! The artificial branching system that dominates the dual's jumps:
//! Borel–Tanner total progeny, population growth, and the coupled
//! clock comparison `R_i <= T_i` with integrated-mass domination.
//!
//!     cargo run --release --example branching_bound

use sbmlab::branching::{
    borel_tanner_table, coupled_dual_branching, simulate_branching, total_progeny_sample,
    BranchingConfig,
};
use sbmlab::drift::{DriftSpec, MeasureSpec, TruncationLevel};
use sbmlab::dual::{ClockSource, DualConfig, DualInit};
use sbmlab::grid::{Field, Grid1d};
use sbmlab::pde::PdeSolver;
use sbmlab::profile::default_profile;
use sbmlab::rng::{derive, stream};

fn main() -> sbmlab::Result<()> {
    // Borel-Tanner law vs simulated Galton-Watson total progeny.
    let lambda = 0.5;
    let pmf = borel_tanner_table(lambda, 12)?;
    let mut rng = stream(99, 0);
    let n = 200_000;
    let mut counts = vec![0u32; 13];
    for _ in 0..n {
        let z = total_progeny_sample(&mut rng, lambda)? as usize;
        if z <= 12 {
            counts[z] += 1;
        }
    }
    println!("total progeny at lambda = {lambda} (empirical vs Borel-Tanner):");
    for k in 1..=6 {
        println!(
            "  k = {k}: {:.5} vs {:.5}",
            counts[k] as f64 / n as f64,
            pmf[k - 1]
        );
    }
    println!("  mean should be 1/(1-lambda) = {}", 1.0 / (1.0 - lambda));

    // Branching population over a short window.
    let grid = Grid1d::new(6.0, 241)?;
    let solver = PdeSolver::new(grid, 1e-3)?;
    let mut y0 = Field::zeros(grid);
    y0.deposit_atom(0.0, 1.0);
    let horizon = 0.2;
    let (_, root_curve) = solver.evolve_recording(&y0, horizon)?;
    let profile = default_profile();
    let cfg = BranchingConfig::new(1.0, horizon);
    let mut total_alive = 0usize;
    let mut max_alive = 0usize;
    let runs = 2000;
    for p in 0..runs {
        let rec = simulate_branching(&root_curve, profile, &cfg, &mut stream(7, p))?;
        total_alive += rec.particles.len();
        max_alive = max_alive.max(rec.particles.len());
    }
    println!(
        "\nbranching population at T = {horizon}, nu_bar = 1: mean |I_T| = {:.2}, max = {max_alive}",
        total_alive as f64 / runs as f64
    );

    // Coupled comparison on shared Exp(1) clocks.
    let nu1 = MeasureSpec::from_atoms(vec![(1.0, 1.0)])?;
    let drift = DriftSpec::new(1.0, 1.0, nu1, MeasureSpec::zero())?;
    let dcfg = DualConfig::new(drift, TruncationLevel::Finite(5), grid, 1e-3, horizon);
    let mut wait_viol = 0;
    let mut mass_viol = 0;
    let mut dual_jumps = 0;
    let paths = 500;
    for p in 0..paths {
        let mut rng = stream(11, p);
        let mut clocks = ClockSource::new(stream(derive(11, 0xc10c), p));
        let (check, _) = coupled_dual_branching(
            &DualInit::atom(0.0, 1.0),
            &dcfg,
            &root_curve,
            profile,
            &mut rng,
            &mut clocks,
            1_000_000,
        )?;
        wait_viol += check.wait_violations;
        mass_viol += check.mass_violations;
        dual_jumps += check.dual_jumps;
    }
    println!(
        "\ncoupling over {paths} paths: {dual_jumps} dual jumps, \
         wait violations = {wait_viol}, mass violations = {mass_viol}"
    );
    Ok(())
}
