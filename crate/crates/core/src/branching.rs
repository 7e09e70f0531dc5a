//! Artificial branching system dominating the dual's jump structure.
//!
//! Particles never die.  The root carries the mass curve
//! `⟨V_t(Y₀), 1⟩`; every other particle born at `τ` carries the very
//! singular curve `⟨W_{t−τ}(0,0), 1⟩`.  Each particle births children
//! at rate `ν((0,∞]) · ⟨Y^{(α)}_t, 1⟩`, which dominates the dual's jump
//! intensity by PDE subadditivity, giving per-index domination of the
//! inter-jump waits and of the integrated total mass when both systems
//! share the same Exp(1) clock levels.  The total progeny of the
//! bounding Galton–Watson tree follows the Borel–Tanner law
//! `P(Z = k) = e^{-λk} (λk)^{k-1} / k!`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_distr::{Exp1, Poisson};
use serde::Serialize;

use crate::dual::{simulate_dual_clocked, ClockSource, DualConfig, DualInit, DualPath};
use crate::error::{Error, Result};
use crate::pde::MassCurve;
use crate::profile::SingularProfile;

/// Borel–Tanner pmf `P(Z = k) = e^{-λk} (λk)^{k-1} / k!`, computed in
/// log space (`ln k!` by exact summation).
pub fn borel_tanner_pmf(lambda: f64, k: u64) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::invalid("borel_tanner_pmf", format!("lambda = {lambda} outside (0, 1]")));
    }
    if k == 0 {
        return Err(Error::invalid("borel_tanner_pmf", "k must be >= 1"));
    }
    let kf = k as f64;
    let mut ln_kfact = 0.0;
    for j in 2..=k {
        ln_kfact += (j as f64).ln();
    }
    let ln_p = -lambda * kf + (kf - 1.0) * (lambda * kf).ln() - ln_kfact;
    Ok(ln_p.exp())
}

/// Borel–Tanner pmf table for `k = 1..=k_max` (incremental `ln k!`).
pub fn borel_tanner_table(lambda: f64, k_max: u64) -> Result<Vec<f64>> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::invalid("borel_tanner_table", format!("lambda = {lambda} outside (0, 1]")));
    }
    let mut out = Vec::with_capacity(k_max as usize);
    let mut ln_kfact = 0.0;
    for k in 1..=k_max {
        let kf = k as f64;
        if k > 1 {
            ln_kfact += kf.ln();
        }
        out.push((-lambda * kf + (kf - 1.0) * (lambda * kf).ln() - ln_kfact).exp());
    }
    Ok(out)
}

/// Total progeny of a Poisson(λ) Galton–Watson tree, simulated
/// generation by generation (a.s. finite for λ < 1).
pub fn total_progeny_sample<R: Rng + ?Sized>(rng: &mut R, lambda: f64) -> Result<u64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::invalid("total_progeny_sample", format!("lambda = {lambda} outside (0, 1)")));
    }
    let mut alive: u64 = 1;
    let mut total: u64 = 1;
    while alive > 0 {
        // Sum of `alive` iid Poisson(lambda) is Poisson(alive * lambda).
        let next = rng.sample(Poisson::new(alive as f64 * lambda).unwrap()) as u64;
        total += next;
        alive = next;
        if total > 100_000_000 {
            return Err(Error::numerical("total_progeny_sample", "progeny cap reached"));
        }
    }
    Ok(total)
}

/// One particle of the branching record.
#[derive(Debug, Clone, Serialize)]
pub struct Particle {
    /// Prefix-closed tree label: root is `[1]`, the i-th child of `α`
    /// is `α ++ [i]`.
    pub label: Vec<u32>,
    pub birth_time: f64,
    pub generation: u32,
}

/// Labeled particle tree with birth times (no deaths).
#[derive(Debug, Clone)]
pub struct BranchingRecord {
    /// Particles in birth order; index 0 is the root (birth time 0).
    pub particles: Vec<Particle>,
    pub horizon: f64,
}

impl BranchingRecord {
    /// `|I_t|`: particles alive at time `t` (nondecreasing step function).
    pub fn alive_count(&self, t: f64) -> usize {
        self.particles.partition_point(|p| p.birth_time <= t)
    }

    /// Per-generation counts `|I_t^i|` (index 0 = the root generation).
    pub fn generation_counts(&self, t: f64) -> Vec<usize> {
        let mut out = Vec::new();
        for p in &self.particles {
            if p.birth_time > t {
                continue;
            }
            let g = p.generation as usize;
            if out.len() <= g {
                out.resize(g + 1, 0);
            }
            out[g] += 1;
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct BranchingConfig {
    /// Total jump-measure mass `ν((0,∞])`.
    pub nu_bar: f64,
    pub horizon: f64,
    /// Diagnostic population cap.
    pub cap: usize,
}

impl BranchingConfig {
    pub fn new(nu_bar: f64, horizon: f64) -> Self {
        BranchingConfig { nu_bar, horizon, cap: 1_000_000 }
    }
}

/// Age at which the cumulative child intensity
/// `ν̄ ∫₀^age ⟨W_s(0,0), 1⟩ ds` reaches `c` (closed-form inversion of
/// the square-root law).
fn child_age_at(profile: &SingularProfile, nu_bar: f64, c: f64) -> f64 {
    let unit = nu_bar * profile.w_mass_integral(1.0);
    let r = c / unit;
    r * r
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Event {
    time: f64,
    parent: usize,
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.time.total_cmp(&other.time).then(self.parent.cmp(&other.parent))
    }
}

/// Simulate the (uncoupled) branching system: each particle births at
/// rate `ν̄ ⟨Y^{(α)}_s, 1⟩`, the root carrying the supplied
/// `⟨V_s(Y₀), 1⟩` curve and children the very singular mass curve from
/// their birth times.
pub fn simulate_branching<R: Rng + ?Sized>(
    root_curve: &MassCurve,
    profile: &SingularProfile,
    cfg: &BranchingConfig,
    rng: &mut R,
) -> Result<BranchingRecord> {
    if !(cfg.horizon > 0.0) {
        return Err(Error::invalid("simulate_branching", "horizon must be > 0"));
    }
    if root_curve.horizon() < cfg.horizon - 1e-12 {
        return Err(Error::invalid("simulate_branching", "root curve shorter than the horizon"));
    }
    let mut particles = vec![Particle { label: vec![1], birth_time: 0.0, generation: 0 }];
    let mut child_counts = vec![0u32];
    // Cumulative intensity already consumed per particle.
    let mut consumed = vec![0.0f64];
    let mut heap: BinaryHeap<Reverse<Event>> = BinaryHeap::new();

    fn schedule<R: Rng + ?Sized>(
        root_curve: &MassCurve,
        profile: &SingularProfile,
        cfg: &BranchingConfig,
        consumed: &mut [f64],
        particles: &[Particle],
        heap: &mut BinaryHeap<Reverse<Event>>,
        rng: &mut R,
        idx: usize,
    ) {
        if cfg.nu_bar <= 0.0 {
            return;
        }
        let e: f64 = rng.sample(Exp1);
        consumed[idx] += e;
        let target = consumed[idx];
        let t_next = if idx == 0 {
            match root_curve.invert_integral(target / cfg.nu_bar) {
                Some(t) => t,
                None => return, // no further root births in the window
            }
        } else {
            particles[idx].birth_time + child_age_at(profile, cfg.nu_bar, target)
        };
        if t_next <= cfg.horizon {
            heap.push(Reverse(Event { time: t_next, parent: idx }));
        }
    }

    schedule(root_curve, profile, cfg, &mut consumed, &particles, &mut heap, rng, 0);
    while let Some(Reverse(ev)) = heap.pop() {
        if particles.len() >= cfg.cap {
            return Err(Error::numerical(
                "simulate_branching",
                format!("population cap {} reached at t = {}", cfg.cap, ev.time),
            ));
        }
        child_counts[ev.parent] += 1;
        let mut label = particles[ev.parent].label.clone();
        label.push(child_counts[ev.parent]);
        let generation = particles[ev.parent].generation + 1;
        particles.push(Particle { label, birth_time: ev.time, generation });
        child_counts.push(0);
        consumed.push(0.0);
        let new_idx = particles.len() - 1;
        schedule(root_curve, profile, cfg, &mut consumed, &particles, &mut heap, rng, new_idx);
        schedule(root_curve, profile, cfg, &mut consumed, &particles, &mut heap, rng, ev.parent);
    }
    Ok(BranchingRecord { particles, horizon: cfg.horizon })
}

/// Coupled comparison report for one path.
#[derive(Debug, Clone, Serialize)]
pub struct CouplingCheck {
    pub dual_jumps: usize,
    pub branch_births: usize,
    /// Indices `i` with `R_i > T_i` beyond slack.
    pub wait_violations: usize,
    /// Check times where the integrated dual mass exceeds the branching
    /// bound beyond slack.
    pub mass_violations: usize,
    pub max_wait_excess: f64,
    pub max_mass_excess: f64,
}

/// Relative slack applied to the coupling inequalities.
pub const COUPLING_SLACK: f64 = 1e-6;

/// Run the dual and the branching system on shared clock levels `S_k`
/// and check the per-index wait domination `R_i <= T_i` and the
/// integrated-mass domination, with `COUPLING_SLACK` relative slack.
///
/// `root_curve` must be the pure flow `⟨V_s(Y₀),1⟩` over the horizon at
/// the dual's resolution.  Returns the report alongside the dual path.
pub fn coupled_dual_branching<R: Rng + ?Sized>(
    init: &DualInit,
    cfg: &DualConfig,
    root_curve: &MassCurve,
    profile: &SingularProfile,
    rng: &mut R,
    clocks: &mut ClockSource,
    cap: usize,
) -> Result<(CouplingCheck, DualPath)> {
    let dual = simulate_dual_clocked(init, cfg, profile, rng, clocks)?;
    let nu_bar = cfg.drift.nu_bar(cfg.level);

    // Branching leg times R̄_i: pooled intensity of all alive particles,
    // crossing the shared S_i. Legs are materialized lazily — the wait
    // check needs only as many as the dual has jumps, and any truncated
    // particle set already gives a lower bound on the branching mass
    // integral (particles only add mass), which suffices to certify
    // domination.  The first legs integrate the same pure flow on both
    // sides (R_1 = T_1), so R̄_1 is taken from the dual.
    let mut legs = LegBuilder {
        r_bar: Vec::new(),
        exhausted: false,
        nu_bar,
        root_curve,
        profile,
        horizon: cfg.horizon,
        cap,
    };
    if let Some(first) = dual.jumps.first() {
        legs.r_bar.push(first.time);
    } else {
        legs.exhausted = true; // no shared clock crossings at all
    }

    // (i) Wait domination per index, on the dual's realized jumps.
    let mut wait_violations = 0usize;
    let mut max_wait_excess = 0.0f64;
    let mut prev_t = 0.0;
    let mut prev_r = 0.0;
    for (i, j) in dual.jumps.iter().enumerate() {
        let t_i = j.time - prev_t;
        prev_t = j.time;
        legs.extend_to(i + 1, clocks)?;
        let r_i = match legs.r_bar.get(i) {
            Some(&rb) => rb - prev_r,
            None => {
                // The branching ran out of legs inside the horizon while
                // the dual still jumped: a violation by itself.
                wait_violations += 1;
                continue;
            }
        };
        prev_r = legs.r_bar[i];
        let excess = r_i - t_i;
        if excess > COUPLING_SLACK * t_i.max(1.0) {
            wait_violations += 1;
            max_wait_excess = max_wait_excess.max(excess);
        }
    }

    // (iii) Integrated-mass domination at the jump times, the horizon,
    // and a uniform grid of check times; the truncated particle set is
    // extended only when its lower bound does not already dominate.
    let mut check_times: Vec<f64> = dual.jumps.iter().map(|j| j.time).collect();
    for k in 1..=20 {
        check_times.push(cfg.horizon * k as f64 / 20.0);
    }
    check_times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut mass_violations = 0usize;
    let mut max_mass_excess = 0.0f64;
    for &t in &check_times {
        let lhs = dual.integrated_mass(t);
        loop {
            let rhs = legs.integral(t) / nu_bar;
            let excess = lhs - rhs;
            if excess <= COUPLING_SLACK * rhs.max(1.0) {
                break;
            }
            // Only particles born before t can raise the bound at t.
            let can_grow =
                !legs.exhausted && legs.r_bar.last().map_or(false, |&last| last < t);
            if !can_grow {
                mass_violations += 1;
                max_mass_excess = max_mass_excess.max(excess);
                break;
            }
            let want = legs.r_bar.len() + 16;
            legs.extend_to(want, clocks)?;
        }
    }

    Ok((
        CouplingCheck {
            dual_jumps: dual.jumps.len(),
            branch_births: legs.r_bar.len(),
            wait_violations,
            mass_violations,
            max_wait_excess,
            max_mass_excess,
        },
        dual,
    ))
}

struct LegBuilder<'a> {
    r_bar: Vec<f64>,
    exhausted: bool,
    nu_bar: f64,
    root_curve: &'a MassCurve,
    profile: &'a SingularProfile,
    horizon: f64,
    cap: usize,
}

impl LegBuilder<'_> {
    fn integral(&self, t: f64) -> f64 {
        let mut v = self.root_curve.integral(t);
        for &rk in &self.r_bar {
            if t > rk {
                v += self.profile.w_mass_integral(t - rk);
            }
        }
        self.nu_bar * v
    }

    fn intensity(&self, t: f64) -> f64 {
        let mut v = self.root_curve.value(t);
        for &rk in &self.r_bar {
            if t > rk {
                v += self.profile.w_mass(t - rk);
            }
        }
        self.nu_bar * v
    }

    /// Materialize legs until `count` exist (or the window is spent).
    fn extend_to(&mut self, count: usize, clocks: &mut ClockSource) -> Result<()> {
        while self.r_bar.len() < count && !self.exhausted {
            let i = self.r_bar.len(); // next leg consumes S_{i+1} = level(i)
            if i >= self.cap {
                return Err(Error::numerical("coupled_dual_branching", "branching leg cap reached"));
            }
            let start = match self.r_bar.last() {
                Some(&s) => s,
                None => {
                    self.exhausted = true;
                    break;
                }
            };
            if start >= self.horizon {
                self.exhausted = true;
                break;
            }
            let target = self.integral(start) + clocks.level(i);
            if self.integral(self.horizon) <= target {
                self.exhausted = true; // next birth falls beyond the horizon
                break;
            }
            // Safeguarded Newton on the bracketed, monotone integral.
            let (mut lo, mut hi) = (start, self.horizon);
            let mut t = 0.5 * (lo + hi);
            for _ in 0..60 {
                let g = self.integral(t) - target;
                if g > 0.0 {
                    hi = t;
                } else {
                    lo = t;
                }
                if hi - lo < 1e-13 * hi.max(1.0) {
                    break;
                }
                let d = self.intensity(t);
                let step = t - g / d;
                t = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
            }
            self.r_bar.push(0.5 * (lo + hi));
        }
        Ok(())
    }
}
