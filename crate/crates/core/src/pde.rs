//! Splitting solver for the log-Laplace equation
//! `d_t V = 1/2 ΔV − 1/2 V²` on a truncated grid with Dirichlet-zero
//! boundary.
//!
//! The reaction part has the exact flow `v ↦ v/(1 + v τ/2)`; the
//! diffusion part is advanced by Crank–Nicolson with a cached
//! tridiagonal factorization.  A full step is Strang-composed
//! (half reaction, full heat, half reaction), second order in `dt` on
//! smooth data.  Negative undershoots from the heat step are clipped
//! to zero and the clipped mass is recorded, as is the mass leaking
//! through the Dirichlet boundary.

use crate::error::{Error, Result};
use crate::grid::{Field, Grid1d};

/// Minimum allowed substep; requests below this are config errors.
pub const MIN_DT: f64 = 1e-9;

/// Gaussian heat kernel `p_t(x) = (2πt)^{-1/2} e^{-x²/(2t)}`.
pub fn heat_kernel(t: f64, x: f64) -> f64 {
    assert!(t > 0.0, "heat_kernel requires t > 0, got {t}");
    (2.0 * std::f64::consts::PI * t).sqrt().recip() * (-x * x / (2.0 * t)).exp()
}

/// Exact reaction flow of `v' = -1/2 v²` over time `tau`:
/// `v ↦ v / (1 + v τ/2)`, applied pointwise.
pub fn reaction_substep(v: &mut Field, tau: f64) {
    debug_assert!(tau >= 0.0);
    for x in v.values_mut() {
        *x /= 1.0 + *x * tau / 2.0;
    }
}

/// Per-step accounting for clipping and boundary loss.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepDiag {
    /// Mass added back by clipping negative undershoots to zero.
    pub clipped_mass: f64,
    /// Mass lost through the Dirichlet boundary during the heat step.
    pub boundary_leak: f64,
}

/// Crank–Nicolson step for `v_t = 1/2 v_xx` with Dirichlet-zero rows,
/// factorization cached for a fixed step size.
#[derive(Debug, Clone)]
pub struct CrankNicolson {
    beta: f64,
    /// Precomputed forward-elimination multipliers of the Thomas solve.
    cp: Vec<f64>,
    scratch: Vec<f64>,
}

impl CrankNicolson {
    pub fn new(grid: Grid1d, tau: f64) -> Self {
        assert!(tau > 0.0);
        let n = grid.n();
        let dx = grid.dx();
        let beta = tau / (4.0 * dx * dx);
        // Interior rows: -beta, 1+2beta, -beta. Boundary rows identity.
        let mut cp = vec![0.0; n];
        let b = 1.0 + 2.0 * beta;
        // row 1 is the first interior row; its left neighbor (row 0) is
        // an identity row, so no elimination is needed into it.
        cp[1] = -beta / b;
        for i in 2..n - 1 {
            cp[i] = -beta / (b + beta * cp[i - 1]);
        }
        CrankNicolson { beta, cp, scratch: vec![0.0; n] }
    }

    /// Advance one heat substep in place, returning clip/leak accounting.
    pub fn apply(&mut self, v: &mut Field) -> StepDiag {
        let n = v.grid().n();
        let dx = v.grid().dx();
        let beta = self.beta;
        let b = 1.0 + 2.0 * beta;
        let vals = v.values_mut();
        let rhs = &mut self.scratch;

        let mass_before: f64 = vals.iter().sum::<f64>() * dx;

        // Explicit half: rhs = (I + beta D2) v, Dirichlet rows pinned to 0.
        rhs[0] = 0.0;
        rhs[n - 1] = 0.0;
        for i in 1..n - 1 {
            rhs[i] = beta * vals[i - 1] + (1.0 - 2.0 * beta) * vals[i] + beta * vals[i + 1];
        }

        // Thomas forward sweep with cached multipliers.
        vals[0] = 0.0;
        let mut d_prev = rhs[1] / b;
        vals[1] = d_prev;
        for i in 2..n - 1 {
            let denom = b + beta * self.cp[i - 1];
            d_prev = (rhs[i] + beta * d_prev) / denom;
            vals[i] = d_prev;
        }
        vals[n - 1] = 0.0;

        // Back substitution.
        for i in (1..n - 2).rev() {
            vals[i] -= self.cp[i] * vals[i + 1];
        }

        let mass_after: f64 = vals.iter().sum::<f64>() * dx;

        // Clip undershoots.
        let mut clipped = 0.0;
        for x in vals.iter_mut() {
            if *x < 0.0 {
                clipped -= *x;
                *x = 0.0;
            }
        }
        StepDiag { clipped_mass: clipped * dx, boundary_leak: mass_before - mass_after }
    }
}

/// Cumulative diagnostics of a flow.
#[derive(Debug, Clone, Copy, Default)]
pub struct FlowDiag {
    pub clipped_mass: f64,
    pub boundary_leak: f64,
    pub steps: usize,
}

impl FlowDiag {
    fn absorb(&mut self, step: StepDiag) {
        self.clipped_mass += step.clipped_mass;
        self.boundary_leak += step.boundary_leak;
    }
}

/// Splitting solver bound to a grid and a nominal step size.
#[derive(Debug, Clone)]
pub struct PdeSolver {
    grid: Grid1d,
    dt: f64,
}

impl PdeSolver {
    pub fn new(grid: Grid1d, dt: f64) -> Result<Self> {
        if !(dt >= MIN_DT) {
            return Err(Error::config("pde.dt", format!("dt = {dt} below the {MIN_DT} floor")));
        }
        Ok(PdeSolver { grid, dt })
    }

    pub fn grid(&self) -> Grid1d {
        self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Evolve `init` for time `t >= dt`, splitting `t` into equal Strang
    /// steps no longer than the nominal `dt`.
    pub fn evolve(&self, init: &Field, t: f64) -> Result<(Field, FlowDiag)> {
        let mut flow = Flow::begin(self, init.clone());
        flow.advance(t)?;
        Ok((flow.field, flow.diag))
    }

    /// Evolve a list of point atoms (regularized as grid deltas).
    pub fn evolve_atoms(&self, atoms: &[(f64, f64)], t: f64) -> Result<(Field, FlowDiag)> {
        let mut f = Field::zeros(self.grid);
        for &(x, m) in atoms {
            f.deposit_atom(x, m);
        }
        self.evolve(&f, t)
    }

    /// Evolve with startup substepping: `τ_k = min(dt, max(t_k/ramp,
    /// dt/1024))`, so the fast reaction transient of very concentrated
    /// initial data is resolved before the nominal step takes over.
    pub fn evolve_ramped(&self, init: &Field, t: f64, ramp: f64) -> Result<(Field, FlowDiag)> {
        assert!(ramp >= 1.0);
        let mut flow = Flow::begin(self, init.clone());
        let floor = (self.dt / 1024.0).max(MIN_DT);
        while flow.time < t - 1e-15 * t {
            let tau = (flow.time / ramp).clamp(floor, self.dt).min(t - flow.time);
            flow.step(tau.max(floor))?;
        }
        Ok((flow.field, flow.diag))
    }

    /// Evolve recording the total-mass trajectory at substep boundaries;
    /// returns the final field and the sampled mass curve.
    pub fn evolve_recording(&self, init: &Field, t: f64) -> Result<(Field, MassCurve)> {
        let steps = (t / self.dt).ceil().max(1.0) as usize;
        let tau = t / steps as f64;
        let mut flow = Flow::begin(self, init.clone());
        let mut curve = MassCurve::new(flow.field.mass());
        for _ in 0..steps {
            flow.step(tau)?;
            curve.push(flow.time, flow.field.mass());
        }
        Ok((flow.field, curve))
    }
}

/// One in-progress PDE flow: field, elapsed time, diagnostics.
#[derive(Debug, Clone)]
pub struct Flow<'a> {
    solver: &'a PdeSolver,
    pub field: Field,
    pub time: f64,
    pub diag: FlowDiag,
    cached: Option<(f64, CrankNicolson)>,
}

impl<'a> Flow<'a> {
    pub fn begin(solver: &'a PdeSolver, field: Field) -> Self {
        Flow { solver, field, time: 0.0, diag: FlowDiag::default(), cached: None }
    }

    /// One Strang step of size `tau`.
    pub fn step(&mut self, tau: f64) -> Result<()> {
        if !(tau >= MIN_DT) {
            return Err(Error::config("pde.dt", format!("substep {tau} below the {MIN_DT} floor")));
        }
        let rebuild = match &self.cached {
            Some((t, _)) => (*t - tau).abs() > 1e-15 * tau.max(1.0),
            None => true,
        };
        if rebuild {
            self.cached = Some((tau, CrankNicolson::new(self.field.grid(), tau)));
        }
        reaction_substep(&mut self.field, tau / 2.0);
        let d = self.cached.as_mut().unwrap().1.apply(&mut self.field);
        self.diag.absorb(d);
        reaction_substep(&mut self.field, tau / 2.0);
        self.diag.steps += 1;
        self.time += tau;
        Ok(())
    }

    /// Advance by `t` using equal steps no longer than the solver's dt.
    pub fn advance(&mut self, t: f64) -> Result<()> {
        let steps = (t / self.solver.dt).ceil().max(1.0) as usize;
        let tau = t / steps as f64;
        for _ in 0..steps {
            self.step(tau)?;
        }
        Ok(())
    }
}

/// Piecewise-linear record of a scalar mass trajectory `t ↦ ⟨V_t, 1⟩`
/// with its running integral (trapezoid on the sample cells).
#[derive(Debug, Clone)]
pub struct MassCurve {
    times: Vec<f64>,
    masses: Vec<f64>,
    cum: Vec<f64>,
}

impl MassCurve {
    pub fn new(mass0: f64) -> Self {
        MassCurve { times: vec![0.0], masses: vec![mass0], cum: vec![0.0] }
    }

    /// Append a sample. Zero-width pushes (same `t`) are allowed and
    /// carry jump discontinuities (left then right limit).
    pub fn push(&mut self, t: f64, mass: f64) {
        let t_prev = *self.times.last().unwrap();
        let m_prev = *self.masses.last().unwrap();
        debug_assert!(t >= t_prev, "mass curve time went backwards: {t} < {t_prev}");
        let inc = 0.5 * (mass + m_prev) * (t - t_prev).max(0.0);
        self.cum.push(self.cum.last().unwrap() + inc);
        self.times.push(t);
        self.masses.push(mass);
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Mass at `t` (linear interpolation; clamped to the record).
    pub fn value(&self, t: f64) -> f64 {
        match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => self.masses[i],
            Err(0) => self.masses[0],
            Err(i) if i >= self.times.len() => *self.masses.last().unwrap(),
            Err(i) => {
                let w = (t - self.times[i - 1]) / (self.times[i] - self.times[i - 1]);
                self.masses[i - 1] * (1.0 - w) + self.masses[i] * w
            }
        }
    }

    /// `∫_0^t mass(s) ds` under the piecewise-linear interpolant.
    pub fn integral(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let i = match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.cum[i],
            Err(i) => i.min(self.times.len() - 1),
        };
        let t0 = self.times[i - 1];
        let dt = (t - t0).min(self.times[i] - t0);
        self.cum[i - 1] + 0.5 * (self.masses[i - 1] + self.value(t)) * dt
    }

    /// Smallest `t` with `∫_0^t mass ds > target`, or `None` if the
    /// record never accumulates that much.
    pub fn invert_integral(&self, target: f64) -> Option<f64> {
        if target < 0.0 {
            return Some(0.0);
        }
        let i = self.cum.iter().position(|&c| c > target)?;
        // Crossing is inside cell (i-1, i]; the integral is quadratic in
        // t there, solve by bisection (cheap and robust).
        let (mut lo, mut hi) = (self.times[i - 1], self.times[i]);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.integral(mid) > target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(l: f64, n: usize) -> Grid1d {
        Grid1d::new(l, n).unwrap()
    }

    #[test]
    fn heat_kernel_values() {
        assert!((heat_kernel(1.0, 0.0) - 0.3989422804).abs() < 1e-9);
        let expect = (4.0 * std::f64::consts::PI).sqrt().recip() * (-0.25f64).exp();
        assert!((heat_kernel(2.0, 1.0) - expect).abs() < 1e-12);
        // normalization: dx-sum over a wide grid
        let g = grid(20.0, 4001);
        for t in [0.3, 1.0, 3.0] {
            let s: f64 = g.nodes().map(|x| heat_kernel(t, x)).sum::<f64>() * g.dx();
            assert!((s - 1.0).abs() < 1e-6, "t={t}: {s}");
        }
    }

    #[test]
    #[should_panic]
    fn heat_kernel_rejects_nonpositive_t() {
        heat_kernel(0.0, 1.0);
    }

    #[test]
    fn reaction_flow_exact_values() {
        let g = grid(1.0, 5);
        let mut f = Field::from_fn(g, |_| 2.0);
        reaction_substep(&mut f, 1.0);
        for &v in f.values() {
            assert!((v - 1.0).abs() < 1e-15);
        }
        let mut z = Field::zeros(g);
        reaction_substep(&mut z, 5.0);
        assert!(z.values().iter().all(|&v| v == 0.0));
    }

    /// The exact flow composes: ten tau = 0.1 steps equal one tau = 1 step.
    #[test]
    fn reaction_flow_semigroup() {
        let g = grid(1.0, 3);
        let mut a = Field::from_fn(g, |_| 1.0);
        for _ in 0..10 {
            reaction_substep(&mut a, 0.1);
        }
        let mut b = Field::from_fn(g, |_| 1.0);
        reaction_substep(&mut b, 1.0);
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn heat_step_constant_interior_unchanged() {
        let g = grid(10.0, 1001);
        let mut f = Field::from_fn(g, |_| 3.0);
        let mut cn = CrankNicolson::new(g, 1e-3);
        for _ in 0..100 {
            cn.apply(&mut f);
        }
        // interior nodes far from the boundary stay at 3
        let mid = g.nearest_node(0.0);
        assert!((f.values()[mid] - 3.0).abs() < 1e-8);
        assert!((f.at(2.0) - 3.0).abs() < 1e-8);
    }

    /// Grid delta evolved by the heat step alone matches the analytic
    /// kernel within 0.5% sup error (relative to the peak).
    #[test]
    fn heat_step_delta_matches_kernel() {
        let g = grid(10.0, 2001); // dx = 0.01
        let mut f = Field::zeros(g);
        f.deposit_atom(0.0, 1.0);
        let tau = 2.5e-4;
        let t = 0.5;
        let mut cn = CrankNicolson::new(g, tau);
        let steps = (t / tau).round() as usize;
        for _ in 0..steps {
            cn.apply(&mut f);
        }
        let peak = heat_kernel(t, 0.0);
        let mut sup = 0.0f64;
        for (x, v) in f.iter_nodes() {
            sup = sup.max((v - heat_kernel(t, x)).abs());
        }
        assert!(sup / peak < 5e-3, "sup err {sup:.3e} vs peak {peak:.3e}");
    }

    /// Interior mass is conserved up to boundary flux < 1e-8 while the
    /// support stays well inside the domain.
    #[test]
    fn heat_step_mass_conservation() {
        let g = grid(10.0, 1001);
        let mut f = Field::zeros(g);
        f.deposit_atom(0.0, 1.0);
        let m0 = f.mass();
        let mut cn = CrankNicolson::new(g, 1e-3);
        let mut leak = 0.0;
        for _ in 0..500 {
            leak += cn.apply(&mut f).boundary_leak;
        }
        assert!((f.mass() - m0).abs() < 1e-8 + leak.abs() + 1e-12);
        assert!(leak.abs() < 1e-8, "boundary leak {leak:.3e}");
    }

    #[test]
    fn evolve_zero_stays_zero() {
        let g = grid(5.0, 501);
        let solver = PdeSolver::new(g, 1e-3).unwrap();
        let (v, _) = solver.evolve(&Field::zeros(g), 1.0).unwrap();
        assert!(v.values().iter().all(|&x| x == 0.0));
    }

    /// Flat data far from the boundary follow the reaction ODE:
    /// v0 = 4 at t = 1 gives 4/3 within 1%.
    #[test]
    fn evolve_flat_matches_reaction_ode() {
        let g = grid(10.0, 1001);
        let solver = PdeSolver::new(g, 1e-3).unwrap();
        let init = Field::from_fn(g, |_| 4.0);
        let (v, _) = solver.evolve(&init, 1.0).unwrap();
        let got = v.at(0.0);
        let expect = 4.0 / 3.0;
        assert!((got - expect).abs() / expect < 1e-2, "{got} vs {expect}");
    }

    /// Domination V_t(μ) <= S_t μ (analytic heat kernel oracle).
    #[test]
    fn evolve_dominated_by_heat_semigroup() {
        let g = grid(8.0, 801);
        let solver = PdeSolver::new(g, 5e-4).unwrap();
        let t = 0.5;
        let (v, _) = solver.evolve_atoms(&[(0.0, 1.0)], t).unwrap();
        for (x, val) in v.iter_nodes() {
            let s = heat_kernel(t, x); // S_t delta_0
            assert!(val <= s + 1e-6 + 0.01 * s, "V({x}) = {val} > S = {s}");
        }
    }

    #[test]
    fn evolve_rejects_tiny_dt() {
        let g = grid(1.0, 11);
        assert!(PdeSolver::new(g, 1e-12).is_err());
    }

    #[test]
    fn mass_curve_interpolation_and_inversion() {
        let mut c = MassCurve::new(2.0);
        c.push(1.0, 1.0); // integral over [0,1] = 1.5
        c.push(2.0, 1.0); // integral over [1,2] = 1.0
        assert!((c.integral(2.0) - 2.5).abs() < 1e-12);
        assert!((c.value(0.5) - 1.5).abs() < 1e-12);
        let t = c.invert_integral(1.5).unwrap();
        assert!((c.integral(t) - 1.5).abs() < 1e-9);
        assert!(c.invert_integral(10.0).is_none());
    }

    /// dx-weighted mass of a grid delta is the deposited mass.
    #[test]
    fn mass_of_grid_delta() {
        let g = grid(5.0, 500); // 0 is not a node here; nearest-node deposit
        let mut f = Field::zeros(g);
        f.deposit_atom(0.2, 1.7);
        assert!((f.mass() - 1.7).abs() < 1e-12);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            /// The exact reaction flow composes: k substeps of tau/k
            /// equal one step of tau to rounding.
            #[test]
            fn reaction_semigroup(v0 in 0.0f64..10.0, tau in 0.01f64..1.0, k in 1usize..20) {
                let g = Grid1d::new(1.0, 3).unwrap();
                let mut split = Field::from_fn(g, |_| v0);
                for _ in 0..k {
                    reaction_substep(&mut split, tau / k as f64);
                }
                let mut whole = Field::from_fn(g, |_| v0);
                reaction_substep(&mut whole, tau);
                prop_assert!((split.values()[0] - whole.values()[0]).abs() < 1e-12);
            }

            /// Mass-curve inversion is a right inverse of the integral.
            #[test]
            fn mass_curve_inversion_consistent(
                masses in proptest::collection::vec(0.01f64..3.0, 3..30),
                frac in 0.05f64..0.95,
            ) {
                let mut c = MassCurve::new(masses[0]);
                for (i, m) in masses.iter().enumerate().skip(1) {
                    c.push(i as f64 * 0.1, *m);
                }
                let total = c.integral(c.horizon());
                let target = frac * total;
                let t = c.invert_integral(target).unwrap();
                prop_assert!((c.integral(t) - target).abs() < 1e-9 * total.max(1.0));
            }
        }
    }
}
