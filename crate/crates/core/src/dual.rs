//! The dual jump process `Y`.
//!
//! Between jumps `Y` follows the log-Laplace PDE flow.  Jumps arrive
//! when the exponential clock level `S_k ~ Exp(1)` is crossed by
//! `ν((0,∞]) ∫₀^t ⟨Y_s, 1⟩ ds`; the jump location is drawn with
//! probability proportional to the pre-jump field, the mark selects the
//! measure branch (type 2 jumps flip the sign process `J`), and the
//! height is drawn from the (possibly truncated) jump measure.  The new
//! atom `Z δ_U` is regularized into the field — as a grid delta for
//! finite `Z`, as a warm-started very singular profile for `Z = ∞` at
//! level infinity.

use rand::Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::drift::{DriftSpec, Mark, TruncationLevel};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid1d};
use crate::pde::{Flow, FlowDiag, MassCurve, PdeSolver};
use crate::profile::SingularProfile;

/// Relative accuracy of the bisection refinement of clock crossings.
const CLOCK_TOL: f64 = 1e-6;

/// Dual-process state: a regular field part plus not-yet-absorbed
/// point atoms (mass may be `f64::INFINITY` at level infinity only).
#[derive(Debug, Clone)]
pub struct RegMeasureState {
    pub field: Field,
    pub atoms: Vec<(f64, f64)>,
}

impl RegMeasureState {
    pub fn new(field: Field) -> Self {
        RegMeasureState { field, atoms: Vec::new() }
    }

    /// Record a jump `Z δ_U`. Infinite heights are only admissible at
    /// level infinity.
    pub fn apply_jump(&mut self, location: f64, height: f64, level: TruncationLevel) -> Result<()> {
        if !(height > 0.0) {
            return Err(Error::invalid("apply_jump", format!("height {height} must be > 0")));
        }
        if height.is_infinite() && level != TruncationLevel::Infinite {
            return Err(Error::invalid("apply_jump", "infinite atom at a finite truncation level"));
        }
        self.atoms.push((location, height));
        Ok(())
    }

    /// Absorb pending atoms into the field: grid deltas for finite
    /// masses, the `ε_w`-warm-started very singular profile for
    /// infinite ones.
    pub fn absorb(&mut self, profile: &SingularProfile, eps_warm: f64) {
        for (x, m) in self.atoms.drain(..) {
            if m.is_infinite() {
                profile.add_to_field(&mut self.field, x, eps_warm);
            } else {
                self.field.deposit_atom(x, m);
            }
        }
    }
}

/// Draw a jump location: grid node with probability proportional to
/// the field value.
pub fn sample_jump_location<R: Rng + ?Sized>(rng: &mut R, field: &Field) -> Result<f64> {
    let total: f64 = field.values().iter().sum();
    if !(total > 0.0) {
        return Err(Error::invalid("sample_jump_location", "field has zero mass"));
    }
    let mut u = rng.gen::<f64>() * total;
    for (i, &v) in field.values().iter().enumerate() {
        if u < v {
            return Ok(field.grid().node(i));
        }
        u -= v;
    }
    Ok(field.grid().node(field.grid().n() - 1))
}

/// One jump of the dual path.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct JumpRecord {
    pub time: f64,
    pub location: f64,
    pub height: f64,
    pub mark: Mark,
}

/// Full record of one dual path.
#[derive(Debug, Clone)]
pub struct DualPath {
    pub jumps: Vec<JumpRecord>,
    /// `⟨Y_s, 1⟩` sampled at every substep boundary (duplicated points
    /// at jump times carry the left and right limits).
    pub mass_curve: MassCurve,
    pub snapshots: Vec<(f64, Field)>,
    pub final_field: Field,
    pub horizon: f64,
    pub diag: FlowDiag,
}

impl DualPath {
    /// `J_t`: number of type-2 jumps up to and including `t`.
    pub fn jump_count_type2(&self, t: f64) -> usize {
        self.jumps.iter().filter(|j| j.time <= t && j.mark == 2).count()
    }

    /// `(-1)^{J_t}`.
    pub fn sign(&self, t: f64) -> f64 {
        if self.jump_count_type2(t) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `∫₀^t ⟨Y_s, 1⟩ ds` (trapezoid on the recorded mass curve).
    pub fn integrated_mass(&self, t: f64) -> f64 {
        assert!(t <= self.horizon + 1e-12, "t = {t} beyond horizon {}", self.horizon);
        self.mass_curve.integral(t)
    }
}

/// Simulation parameters for the dual process.
#[derive(Debug, Clone)]
pub struct DualConfig {
    pub drift: DriftSpec,
    pub level: TruncationLevel,
    pub grid: Grid1d,
    pub dt: f64,
    pub horizon: f64,
    /// Warm-start offset for infinite atoms.
    pub eps_warm: f64,
    pub snapshot_times: Vec<f64>,
    /// Diagnostic jump cap (should be unreachable at sane horizons).
    pub max_jumps: usize,
}

impl DualConfig {
    pub fn new(drift: DriftSpec, level: TruncationLevel, grid: Grid1d, dt: f64, horizon: f64) -> Self {
        DualConfig {
            drift,
            level,
            grid,
            dt,
            horizon,
            eps_warm: 1e-3,
            snapshot_times: Vec::new(),
            max_jumps: 1_000_000,
        }
    }
}

/// Initial condition: optional field plus point atoms (`f64::INFINITY`
/// mass marks a very singular warm start).
#[derive(Debug, Clone, Default)]
pub struct DualInit {
    pub field: Option<Field>,
    pub atoms: Vec<(f64, f64)>,
}

impl DualInit {
    pub fn atom(x: f64, mass: f64) -> Self {
        DualInit { field: None, atoms: vec![(x, mass)] }
    }

    pub fn field(field: Field) -> Self {
        DualInit { field: Some(field), atoms: Vec::new() }
    }
}

/// Anything that can drive the exponential clock: exposes total mass
/// and advances by substeps.  The PDE flow is the real driver; tests
/// use synthetic flows.
pub trait ClockFlow: Clone {
    fn mass(&self) -> f64;
    fn step(&mut self, tau: f64) -> Result<()>;
}

#[derive(Clone)]
struct PdeClockFlow<'a> {
    flow: Flow<'a>,
}

impl ClockFlow for PdeClockFlow<'_> {
    fn mass(&self) -> f64 {
        self.flow.field.mass()
    }

    fn step(&mut self, tau: f64) -> Result<()> {
        self.flow.step(tau)
    }
}

/// Outcome of advancing a flow against the clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClockAdvance {
    /// Crossed the clock level after `tau` within the leg.
    Jump { tau: f64 },
    /// Reached the stop time first; carries the accumulated intensity.
    Stop { accumulated: f64 },
}

/// Advance `flow` until `nu_bar · ∫ mass ds` exceeds `target` or until
/// `t_stop` elapses, stepping with `dt` and recording `(t_leg, mass)`
/// samples through `record`.  Crossings are refined by bisection on a
/// re-run substep to relative accuracy `1e-6`.
pub fn advance_until_clock<F: ClockFlow>(
    flow: &mut F,
    nu_bar: f64,
    target: f64,
    dt: f64,
    t_stop: f64,
    mut record: impl FnMut(f64, f64),
) -> Result<ClockAdvance> {
    let mut t = 0.0;
    let mut acc = 0.0;
    loop {
        let remaining = t_stop - t;
        if remaining <= crate::pde::MIN_DT {
            break;
        }
        let tau = dt.min(remaining);
        let before = flow.mass();
        let saved = flow.clone();
        flow.step(tau)?;
        let after = flow.mass();
        let inc = nu_bar * 0.5 * (before + after) * tau;
        if acc + inc > target && nu_bar > 0.0 {
            // Bisect theta in (0, tau]: one substep of size theta from
            // the saved state.  Resolution floors at the solver's
            // minimum substep.
            let need = target - acc;
            let (mut lo, mut hi) = (0.0f64, tau);
            for _ in 0..60 {
                if (hi - lo) <= (CLOCK_TOL * (t + hi).max(CLOCK_TOL)).max(2.0 * crate::pde::MIN_DT)
                {
                    break;
                }
                let theta = (0.5 * (lo + hi)).max(crate::pde::MIN_DT);
                let mut trial = saved.clone();
                trial.step(theta)?;
                let g = nu_bar * 0.5 * (before + trial.mass()) * theta;
                if g > need {
                    hi = theta;
                } else {
                    lo = theta;
                }
            }
            // Land on the hi end so the clock is actually crossed.
            let hi = hi.max(crate::pde::MIN_DT);
            let mut landed = saved;
            landed.step(hi)?;
            *flow = landed;
            record(t + hi, flow.mass());
            return Ok(ClockAdvance::Jump { tau: t + hi });
        }
        acc += inc;
        t += tau;
        record(t, after);
    }
    Ok(ClockAdvance::Stop { accumulated: acc })
}

/// Replayable source of the Exp(1) clock levels `S_k`, so a dual path
/// and its dominating branching system can share the same clocks.
#[derive(Debug, Clone)]
pub struct ClockSource {
    rng: rand_chacha::ChaCha12Rng,
    draws: Vec<f64>,
    cursor: usize,
}

impl ClockSource {
    pub fn new(rng: rand_chacha::ChaCha12Rng) -> Self {
        ClockSource { rng, draws: Vec::new(), cursor: 0 }
    }

    fn ensure(&mut self, k: usize) {
        while self.draws.len() <= k {
            self.draws.push(self.rng.sample(Exp1));
        }
    }

    /// Next clock level in sequence (used by the dual simulation).
    pub fn next_level(&mut self) -> f64 {
        self.ensure(self.cursor);
        let v = self.draws[self.cursor];
        self.cursor += 1;
        v
    }

    /// `S_{k+1}` (0-indexed), drawing further levels on demand.
    pub fn level(&mut self, k: usize) -> f64 {
        self.ensure(k);
        self.draws[k]
    }
}

/// Simulate one dual path.  Reproducible from the caller-owned RNG.
pub fn simulate_dual<R: Rng + ?Sized>(
    init: &DualInit,
    cfg: &DualConfig,
    profile: &SingularProfile,
    rng: &mut R,
) -> Result<DualPath> {
    simulate_dual_inner(init, cfg, profile, rng, None)
}

/// Same as [`simulate_dual`] but with the clock levels taken from a
/// caller-owned [`ClockSource`] (for clock-coupled comparisons).
pub fn simulate_dual_clocked<R: Rng + ?Sized>(
    init: &DualInit,
    cfg: &DualConfig,
    profile: &SingularProfile,
    rng: &mut R,
    clocks: &mut ClockSource,
) -> Result<DualPath> {
    simulate_dual_inner(init, cfg, profile, rng, Some(clocks))
}

fn simulate_dual_inner<R: Rng + ?Sized>(
    init: &DualInit,
    cfg: &DualConfig,
    profile: &SingularProfile,
    rng: &mut R,
    mut clocks: Option<&mut ClockSource>,
) -> Result<DualPath> {
    let solver = PdeSolver::new(cfg.grid, cfg.dt)?;
    let mut state = RegMeasureState::new(match &init.field {
        Some(f) => f.clone(),
        None => Field::zeros(cfg.grid),
    });
    for &(x, m) in &init.atoms {
        if m.is_infinite() && cfg.level != TruncationLevel::Infinite {
            return Err(Error::invalid("simulate_dual", "infinite initial atom at a finite level"));
        }
        state.atoms.push((x, m));
    }
    state.absorb(profile, cfg.eps_warm);
    if !(state.field.mass() > 0.0) {
        return Err(Error::invalid("simulate_dual", "initial condition has zero mass"));
    }

    let nu_bar = cfg.drift.nu_bar(cfg.level);
    let mut stops: Vec<f64> = cfg
        .snapshot_times
        .iter()
        .copied()
        .filter(|&t| t > 0.0 && t < cfg.horizon)
        .collect();
    stops.sort_by(|a, b| a.partial_cmp(b).unwrap());
    stops.push(cfg.horizon);

    let mut path_jumps: Vec<JumpRecord> = Vec::new();
    let mut snapshots = Vec::new();
    let mut curve = MassCurve::new(state.field.mass());
    let mut t = 0.0f64;
    let next_level = |rng: &mut R, clocks: &mut Option<&mut ClockSource>| -> f64 {
        match clocks.as_mut() {
            Some(c) => c.next_level(),
            None => rng.sample(Exp1),
        }
    };
    let mut pending_s: f64 = next_level(rng, &mut clocks);
    let mut flow = PdeClockFlow { flow: Flow::begin(&solver, state.field) };
    let mut leg_acc = 0.0f64;

    for stop in stops {
        loop {
            let remaining = stop - t;
            if remaining <= 1e-15 * stop.max(1.0) {
                break;
            }
            let t_leg_start = t;
            let outcome = advance_until_clock(
                &mut flow,
                nu_bar,
                pending_s - leg_acc,
                cfg.dt,
                remaining,
                |tl, m| curve.push(t_leg_start + tl, m),
            )?;
            match outcome {
                ClockAdvance::Stop { accumulated } => {
                    leg_acc += accumulated;
                    t = stop;
                    break;
                }
                ClockAdvance::Jump { tau } => {
                    t += tau;
                    if path_jumps.len() >= cfg.max_jumps {
                        return Err(Error::numerical(
                            "simulate_dual",
                            format!("jump cap {} reached at t = {t}", cfg.max_jumps),
                        ));
                    }
                    let location = sample_jump_location(rng, &flow.flow.field)?;
                    let mark = cfg.drift.sample_jump_mark(rng, cfg.level)?;
                    let height = cfg.drift.sample_jump_height(rng, mark, cfg.level)?;
                    path_jumps.push(JumpRecord { time: t, location, height, mark });

                    let mut st = RegMeasureState::new(flow.flow.field.clone());
                    st.apply_jump(location, height, cfg.level)?;
                    st.absorb(profile, cfg.eps_warm);
                    curve.push(t, st.field.mass());

                    let diag_so_far = flow.flow.diag;
                    let mut next = Flow::begin(&solver, st.field);
                    next.diag = diag_so_far;
                    flow = PdeClockFlow { flow: next };
                    pending_s = next_level(rng, &mut clocks);
                    leg_acc = 0.0;
                }
            }
        }
        if stop < cfg.horizon {
            snapshots.push((stop, flow.flow.field.clone()));
        }
    }

    Ok(DualPath {
        jumps: path_jumps,
        mass_curve: curve,
        snapshots,
        final_field: flow.flow.field.clone(),
        horizon: cfg.horizon,
        diag: flow.flow.diag,
    })
}
