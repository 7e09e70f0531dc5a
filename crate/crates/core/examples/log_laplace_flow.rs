//! Solve the log-Laplace equation `d_t V = 1/2 ΔV − 1/2 V²` for a unit
//! Dirac and check the textbook comparison facts along the way:
//! domination by the heat semigroup, subadditivity, and mass decay.
//!
//!     cargo run --release --example log_laplace_flow

use sbmlab::grid::{Field, Grid1d};
use sbmlab::pde::{heat_kernel, PdeSolver};

fn main() -> sbmlab::Result<()> {
    let grid = Grid1d::new(8.0, 1601)?; // dx = 0.01
    let solver = PdeSolver::new(grid, 2.5e-4)?;

    // V_t(delta_0) at a few times, with <V_t, 1> decaying from 1.
    println!("flow of V_t(delta_0):");
    for t in [0.05, 0.1, 0.25, 0.5, 1.0] {
        let (v, diag) = solver.evolve_atoms(&[(0.0, 1.0)], t)?;
        println!(
            "  t = {t:<4}: peak = {:8.4}  mass = {:.6}  boundary leak = {:.2e}",
            v.at(0.0),
            v.mass(),
            diag.boundary_leak
        );
    }

    // Domination: V_t(mu) <= S_t mu pointwise (heat kernel oracle).
    let t = 0.5;
    let (v, _) = solver.evolve_atoms(&[(0.0, 1.0)], t)?;
    let worst = v
        .iter_nodes()
        .map(|(x, val)| val - heat_kernel(t, x))
        .fold(f64::NEG_INFINITY, f64::max);
    println!("\nsup (V_t - S_t mu) at t = {t}: {worst:.3e}  (negative = dominated)");

    // Subadditivity: V_t(mu + eta) <= V_t(mu) + V_t(eta).
    let bump_a = Field::from_fn(grid, |x| 0.8 * (-(x - 1.0) * (x - 1.0)).exp());
    let bump_b = Field::from_fn(grid, |x| 1.2 * (-(x + 0.5) * (x + 0.5) / 0.5).exp());
    let sum = Field::from_values(
        grid,
        bump_a.values().iter().zip(bump_b.values()).map(|(a, b)| a + b).collect(),
    )?;
    let (v_sum, _) = solver.evolve(&sum, t)?;
    let (v_a, _) = solver.evolve(&bump_a, t)?;
    let (v_b, _) = solver.evolve(&bump_b, t)?;
    let worst = v_sum
        .values()
        .iter()
        .zip(v_a.values().iter().zip(v_b.values()))
        .map(|(s, (a, b))| s - a - b)
        .fold(f64::NEG_INFINITY, f64::max);
    println!("sup (V(mu+eta) - V(mu) - V(eta)) at t = {t}: {worst:.3e}");

    // The mass integral of V(delta_0) keeps growing (no saturation):
    // the total-mass time integral diverges for nonzero initial data.
    println!("\nintegral of <V_s(delta_0), 1> ds over [0, T]:");
    let (_, curve) = solver.evolve_recording(&{
        let mut f = Field::zeros(grid);
        f.deposit_atom(0.0, 1.0);
        f
    }, 4.0)?;
    let mut prev = 0.0;
    for horizon in [1.0, 2.0, 4.0] {
        let v = curve.integral(horizon);
        println!("  T = {horizon}: {v:.4}  (increment {:.4})", v - prev);
        prev = v;
    }
    Ok(())
}
