//! Explicit Euler–Maruyama simulation of
//! `d_t X = 1/2 ΔX + h(X) + sqrt(X) Ẇ` on a grid.
//!
//! Update per node:
//! `X_i ← X_i + dt (1/2 Δ_h X)_i + dt h(X_i) + sqrt(dt/dx) sqrt(X_i) ξ`,
//! with iid standard normal `ξ` per node and step (the lattice
//! discretization of space-time white noise), Dirichlet-zero boundary,
//! and clipping at zero.  The stability constraint `dt <= dx²/2` is
//! enforced at construction; clipped mass and pre-clip minima are
//! logged so the clipping bias is measurable.  The discontinuous drift
//! is evaluated on the post-clip value, so exact zeros are attainable;
//! a threshold `eps0` (default 0) widens the `x = 0` tie if requested.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::drift::DriftSpec;
use crate::error::{Error, Result};
use crate::grid::{Field, Grid1d};

/// How the drift enters the scheme: the exact discontinuous `h`, or its
/// level-`n` continuous approximation `h_n`.
#[derive(Debug, Clone)]
pub enum SchemeDrift {
    Exact(DriftSpec),
    Truncated(DriftSpec, u32),
}

impl SchemeDrift {
    fn eval(&self, x: f64, eps0: f64) -> f64 {
        match self {
            SchemeDrift::Exact(spec) => {
                if x <= eps0 {
                    spec.eval(0.0)
                } else {
                    spec.eval(x)
                }
            }
            SchemeDrift::Truncated(spec, n) => spec.eval_truncated(x, *n),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpdeParams {
    pub grid: Grid1d,
    pub dt: f64,
    pub drift: SchemeDrift,
    /// Width of the `x = 0` tie for the discontinuous drift.
    pub eps0: f64,
    /// Multiplier on the noise term (1.0 = the SPDE; 0.0 = deterministic
    /// reduction, used by scheme checks).
    pub noise_scale: f64,
}

impl SpdeParams {
    pub fn new(grid: Grid1d, dt: f64, drift: SchemeDrift) -> Result<Self> {
        let dx = grid.dx();
        if !(dt > 0.0) {
            return Err(Error::config("spde.dt", "dt must be > 0"));
        }
        if dt > dx * dx / 2.0 {
            return Err(Error::config(
                "spde.dt",
                format!("dt = {dt} violates the stability constraint dt <= dx^2/2 = {}", dx * dx / 2.0),
            ));
        }
        Ok(SpdeParams { grid, dt, drift, eps0: 0.0, noise_scale: 1.0 })
    }
}

/// Running diagnostics of one path.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct SpdeDiag {
    /// Total mass added by clipping.
    pub clipped_mass: f64,
    /// Most negative pre-clip value observed.
    pub min_before_clip: f64,
    pub steps: usize,
}

/// One SPDE path advanced step by step; the Monte Carlo layers drive
/// this directly and fold functionals without storing trajectories.
#[derive(Debug, Clone)]
pub struct SpdeStepper {
    params: SpdeParams,
    state: Field,
    scratch: Vec<f64>,
    time: f64,
    pub diag: SpdeDiag,
}

impl SpdeStepper {
    pub fn new(params: SpdeParams, x0: Field) -> Result<Self> {
        if x0.grid() != params.grid {
            return Err(Error::invalid("SpdeStepper::new", "initial field grid mismatch"));
        }
        let n = params.grid.n();
        Ok(SpdeStepper { params, state: x0, scratch: vec![0.0; n], time: 0.0, diag: SpdeDiag::default() })
    }

    pub fn state(&self) -> &Field {
        &self.state
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        let grid = self.params.grid;
        let n = grid.n();
        let dx = grid.dx();
        let dt = self.params.dt;
        let noise_coef = self.params.noise_scale * (dt / dx).sqrt();
        let inv_dx2 = 1.0 / (dx * dx);
        let v = self.state.values();
        let new = &mut self.scratch;

        new[0] = 0.0;
        new[n - 1] = 0.0;
        let mut min_seen = 0.0f64;
        let mut clipped = 0.0f64;
        for i in 1..n - 1 {
            let lap = (v[i - 1] - 2.0 * v[i] + v[i + 1]) * inv_dx2;
            let drift = self.params.drift.eval(v[i], self.params.eps0);
            let xi: f64 = rng.sample(StandardNormal);
            let mut x = v[i] + dt * (0.5 * lap + drift) + noise_coef * v[i].sqrt() * xi;
            if x < min_seen {
                min_seen = x;
            }
            if x < 0.0 {
                clipped -= x;
                x = 0.0;
            }
            new[i] = x;
        }
        self.state.swap_buffer(new);
        self.diag.clipped_mass += clipped * dx;
        self.diag.min_before_clip = self.diag.min_before_clip.min(min_seen);
        self.diag.steps += 1;
        self.time += dt;

        if self.state.values().iter().any(|x| !x.is_finite()) {
            return Err(Error::numerical(
                "simulate_spde",
                format!("non-finite field value at t = {} (step {})", self.time, self.diag.steps),
            ));
        }
        Ok(())
    }

    /// Advance `k` steps.
    pub fn run<R: Rng + ?Sized>(&mut self, rng: &mut R, k: usize) -> Result<()> {
        for _ in 0..k {
            self.step(rng)?;
        }
        Ok(())
    }
}

/// Field snapshots and diagnostics of one simulated path.
#[derive(Debug, Clone)]
pub struct SpdePath {
    pub snapshots: Vec<(f64, Field)>,
    pub final_field: Field,
    pub diag: SpdeDiag,
    /// Total mass after each step.
    pub mass_trajectory: Vec<f64>,
}

/// Simulate one path to `horizon`, storing snapshots at the requested
/// times (snapped to step boundaries).
pub fn simulate_spde<R: Rng + ?Sized>(
    x0: &Field,
    params: &SpdeParams,
    horizon: f64,
    snapshot_times: &[f64],
    rng: &mut R,
) -> Result<SpdePath> {
    let steps = (horizon / params.dt).round().max(1.0) as usize;
    let mut snap_steps: Vec<usize> = snapshot_times
        .iter()
        .map(|t| ((t / params.dt).round() as usize).min(steps))
        .collect();
    snap_steps.sort_unstable();
    snap_steps.dedup();
    let mut stepper = SpdeStepper::new(params.clone(), x0.clone())?;
    let mut snapshots = Vec::with_capacity(snap_steps.len());
    let mut mass_trajectory = Vec::with_capacity(steps);
    for k in 1..=steps {
        stepper.step(rng)?;
        mass_trajectory.push(stepper.state().mass());
        if snap_steps.binary_search(&k).is_ok() {
            snapshots.push((stepper.time(), stepper.state().clone()));
        }
    }
    Ok(SpdePath {
        snapshots,
        final_field: stepper.state.clone(),
        diag: stepper.diag,
        mass_trajectory,
    })
}

/// `exp(−⟨X, μ⟩)` for an atomic measure `μ` (nearest-node evaluation).
pub fn laplace_functional(x: &Field, mu: &[(f64, f64)]) -> f64 {
    let s: f64 = mu.iter().map(|&(loc, w)| w * x.at(loc)).sum();
    (-s).exp()
}

/// `C_tem` seminorm `sup_x e^{λ|x|} X(x)` for `λ < 0`.
pub fn ctem_norm(x: &Field, lam: f64) -> f64 {
    assert!(lam < 0.0, "ctem_norm requires lam < 0");
    x.iter_nodes().map(|(pos, v)| (lam * pos.abs()).exp() * v).fold(0.0, f64::max)
}

/// Lebesgue measure of `{x : X(x) > eps}` on the grid.
pub fn cozero_measure(x: &Field, eps: f64) -> f64 {
    assert!(eps >= 0.0);
    x.grid().dx() * x.values().iter().filter(|v| **v > eps).count() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::{heat_kernel, CrankNicolson};
    use crate::rng::stream;
    use crate::stats;

    fn box_field(grid: Grid1d, half_width: f64, height: f64) -> Field {
        Field::from_fn(grid, |x| if x.abs() <= half_width { height } else { 0.0 })
    }

    #[test]
    fn rejects_unstable_dt() {
        let g = Grid1d::new(2.0, 81).unwrap(); // dx = 0.05
        assert!(SpdeParams::new(g, 2e-3, SchemeDrift::Exact(DriftSpec::zero())).is_err());
        assert!(SpdeParams::new(g, 1e-3, SchemeDrift::Exact(DriftSpec::zero())).is_ok());
    }

    /// Noise off, h = 0: the explicit scheme tracks the Crank–Nicolson
    /// heat flow within scheme error.
    #[test]
    fn deterministic_reduction_matches_heat_flow() {
        let g = Grid1d::new(4.0, 161).unwrap(); // dx = 0.05
        let dt = 1e-3;
        let mut params = SpdeParams::new(g, dt, SchemeDrift::Exact(DriftSpec::zero())).unwrap();
        params.noise_scale = 0.0;
        let x0 = box_field(g, 1.0, 1.0);
        let mut rng = stream(31, 0);
        let path = simulate_spde(&x0, &params, 0.25, &[], &mut rng).unwrap();

        let mut cn_field = x0.clone();
        let mut cn = CrankNicolson::new(g, dt);
        for _ in 0..250 {
            cn.apply(&mut cn_field);
        }
        let sup: f64 = path
            .final_field
            .values()
            .iter()
            .zip(cn_field.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(sup < 5e-3, "sup difference {sup}");
        assert_eq!(path.diag.clipped_mass, 0.0);
    }

    /// h = 0: the noise has mean zero, so the MC mean mass matches the
    /// deterministic (noise off) run of the same scheme.  Uses a field
    /// bounded away from zero so clipping stays negligible; the
    /// full-size run is an acceptance criterion.
    #[test]
    fn mass_martingale_smoke() {
        let g = Grid1d::new(4.0, 161).unwrap();
        let params = SpdeParams::new(g, 2.5e-4, SchemeDrift::Exact(DriftSpec::zero())).unwrap();
        let x0 = Field::from_fn(g, |x| 0.5 + (-x * x / 4.0).exp());
        let mut det_params = params.clone();
        det_params.noise_scale = 0.0;
        let mut det_rng = stream(0, 0);
        let reference = simulate_spde(&x0, &det_params, 0.1, &[], &mut det_rng)
            .unwrap()
            .final_field
            .mass();
        let n = 400;
        let mut clip = 0.0;
        let samples: Vec<f64> = (0..n)
            .map(|p| {
                let mut rng = stream(32, p);
                let path = simulate_spde(&x0, &params, 0.1, &[], &mut rng).unwrap();
                clip += path.diag.clipped_mass;
                path.final_field.mass()
            })
            .collect();
        clip /= n as f64;
        let s = stats::summarize(&samples);
        assert!(clip < 0.01, "clipping not negligible: {clip}");
        assert!(
            (s.mean - reference).abs() < 3.0 * s.stderr + clip,
            "mean {} vs reference {reference} (stderr {})",
            s.mean,
            s.stderr
        );
    }

    #[test]
    fn laplace_functional_values() {
        let g = Grid1d::new(4.0, 161).unwrap();
        let zero = Field::zeros(g);
        assert_eq!(laplace_functional(&zero, &[]), 1.0);
        assert_eq!(laplace_functional(&zero, &[(0.0, 2.0)]), 1.0);
        let hk = Field::from_fn(g, |x| heat_kernel(1.0, x));
        let got = laplace_functional(&hk, &[(0.0, 2.0)]);
        let expect = (-2.0 * 0.3989422804f64).exp();
        assert!((got - expect).abs() < 1e-6, "{got} vs {expect}");
    }

    #[test]
    fn ctem_norm_values() {
        let g = Grid1d::new(6.0, 241).unwrap();
        assert_eq!(ctem_norm(&Field::zeros(g), -1.0), 0.0);
        let ones = Field::from_fn(g, |_| 1.0);
        assert!((ctem_norm(&ones, -0.5) - 1.0).abs() < 1e-12);
        // e^{-|x|} p_1(x) has its max at x = 0
        let hk = Field::from_fn(g, |x| heat_kernel(1.0, x));
        assert!((ctem_norm(&hk, -1.0) - heat_kernel(1.0, 0.0)).abs() < 1e-9);
    }

    #[test]
    fn cozero_measure_values() {
        let g = Grid1d::new(4.0, 1601).unwrap();
        assert_eq!(cozero_measure(&Field::zeros(g), 0.0), 0.0);
        let ind = box_field(g, 1.0, 1.0);
        assert!((cozero_measure(&ind, 0.0) - 2.0).abs() <= 2.0 * g.dx());
        assert_eq!(cozero_measure(&ind, 1.5), 0.0);
    }

    /// Same seed gives bit-identical paths.
    #[test]
    fn deterministic_replay() {
        let g = Grid1d::new(3.0, 121).unwrap();
        let params =
            SpdeParams::new(g, 2.5e-4, SchemeDrift::Exact(DriftSpec::step(0.0, 1.0).unwrap())).unwrap();
        let x0 = box_field(g, 1.0, 0.5);
        let run = || {
            let mut rng = stream(33, 7);
            simulate_spde(&x0, &params, 0.05, &[0.025], &mut rng).unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.final_field.values(), b.final_field.values());
        assert_eq!(a.snapshots[0].1.values(), b.snapshots[0].1.values());
    }
}
