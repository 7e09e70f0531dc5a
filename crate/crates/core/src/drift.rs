//! Admissible drifts `h = h₁ + h_∞` and the measures behind them.
//!
//! A drift is specified by two finite measures `ν¹, ν²` on `(0, ∞)`
//! (atoms plus a piecewise-constant density) and boundary values
//! `b₀ ≥ ⟨ν¹ − ν², 1⟩`, `b₁ ∈ ℝ`, giving
//!
//! ```text
//!     h(x) = ∫ e^{-λx} (ν² − ν¹)(dλ) + b₀·1{x=0} + b₁·1{x>0}.
//! ```
//!
//! Construction derives the dual-process parameters `(d₁, d₂, a)`:
//! `d₁ = b₁ − b₀/2`, `d₂ = b₀/2`, `a = −⟨ν¹+ν², 1⟩` when `b₀ < b₁`, and
//! `d₁ = 0`, `d₂ = b₀ − b₁`, `a = 2b₁ − b₀ − ⟨ν¹+ν², 1⟩` otherwise, so
//! that `2d₂·1{x=0} + (d₁+d₂)·1{x>0} + ⟨ν¹+ν², 1⟩ + a` reproduces `h_∞`
//! exactly. Jump marks and heights for the dual process are sampled
//! from the combined measure `ν = ν¹ + ν² + d₁δ_∞ + d₂δ_∞`, truncated
//! at a level `n` when requested (`δ_∞ ↦ δ_n`, densities and atoms
//! restricted to `(0, n]`).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite measure on `(0, ∞)`: point atoms plus an optional
/// piecewise-constant density given by breakpoints and cell values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    /// `(location, weight)` pairs, locations > 0, weights >= 0.
    #[serde(default)]
    pub atoms: Vec<(f64, f64)>,
    /// Ascending cell edges `b_0 < b_1 < ... < b_m`, all > 0. Cell `j`
    /// is `(b_j, b_{j+1}]` with constant density `density_values[j]`.
    #[serde(default)]
    pub density_breaks: Vec<f64>,
    #[serde(default)]
    pub density_values: Vec<f64>,
}

impl MeasureSpec {
    pub fn zero() -> Self {
        MeasureSpec::default()
    }

    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let m = MeasureSpec { atoms, ..Default::default() };
        m.validate("measure")?;
        Ok(m)
    }

    pub fn with_density(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let m = MeasureSpec { atoms: vec![], density_breaks: breaks, density_values: values };
        m.validate("measure")?;
        Ok(m)
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        for &(l, w) in &self.atoms {
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::config(format!("{path}.atoms"), format!("atom location {l} must be finite and > 0")));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::config(format!("{path}.atoms"), format!("atom weight {w} must be finite and >= 0")));
            }
        }
        if self.density_values.len() + usize::from(!self.density_breaks.is_empty())
            != self.density_breaks.len().max(1)
        {
            // breaks must be one longer than values (or both empty)
            if !(self.density_breaks.is_empty() && self.density_values.is_empty()) {
                return Err(Error::config(
                    format!("{path}.density_breaks"),
                    format!(
                        "{} breakpoints require {} cell values, got {}",
                        self.density_breaks.len(),
                        self.density_breaks.len().saturating_sub(1),
                        self.density_values.len()
                    ),
                ));
            }
        }
        if !self.density_breaks.is_empty() {
            if !(self.density_breaks[0] > 0.0) {
                return Err(Error::config(format!("{path}.density_breaks"), "breakpoints must be > 0"));
            }
            if self.density_breaks.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::config(format!("{path}.density_breaks"), "breakpoints must be strictly increasing"));
            }
            if self.density_values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                return Err(Error::config(format!("{path}.density_values"), "density values must be finite and >= 0"));
            }
        }
        if !self.total_mass().is_finite() {
            return Err(Error::config(path.to_string(), "total mass must be finite"));
        }
        Ok(())
    }

    fn density_cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.density_breaks
            .windows(2)
            .zip(&self.density_values)
            .map(|(w, &c)| (w[0], w[1], c))
    }

    /// Total mass `⟨ν, 1⟩`.
    pub fn total_mass(&self) -> f64 {
        self.mass_up_to(f64::INFINITY)
    }

    /// Mass of the restriction to `(0, cap]`.
    pub fn mass_up_to(&self, cap: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|(l, _)| *l <= cap).map(|(_, w)| w).sum();
        let dens: f64 = self
            .density_cells()
            .map(|(l, r, c)| c * ((r.min(cap) - l).max(0.0)))
            .sum();
        atoms + dens
    }

    /// `∫_(0,cap] e^{-λx} ν(dλ)`, exact for atoms and piecewise-constant
    /// cells (no quadrature).
    pub fn laplace_up_to(&self, x: f64, cap: f64) -> f64 {
        debug_assert!(x >= 0.0);
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|(l, _)| *l <= cap)
            .map(|(l, w)| w * (-l * x).exp())
            .sum();
        let dens: f64 = self
            .density_cells()
            .filter(|(l, _, _)| *l < cap)
            .map(|(l, r, c)| {
                let r = r.min(cap);
                if x == 0.0 {
                    c * (r - l)
                } else {
                    c * ((-l * x).exp() - (-r * x).exp()) / x
                }
            })
            .sum();
        atoms + dens
    }

    /// `∫ e^{-λx} ν(dλ)` over all of `(0, ∞)`.
    pub fn laplace(&self, x: f64) -> f64 {
        self.laplace_up_to(x, f64::INFINITY)
    }

    /// Inverse-CDF sample from the normalized restriction to `(0, cap]`.
    /// Panics if the restricted mass is zero (caller checks).
    pub fn sample_restricted<R: Rng + ?Sized>(&self, rng: &mut R, cap: f64) -> f64 {
        let total = self.mass_up_to(cap);
        assert!(total > 0.0, "sampling from a zero-mass measure");
        let mut u = rng.gen::<f64>() * total;
        for &(l, w) in self.atoms.iter().filter(|(l, _)| *l <= cap) {
            if u < w {
                return l;
            }
            u -= w;
        }
        for (l, r, c) in self.density_cells() {
            let r = r.min(cap);
            if r <= l {
                continue;
            }
            let cell_mass = c * (r - l);
            if u < cell_mass {
                return l + u / c; // uniform within the constant cell
            }
            u -= cell_mass;
        }
        // Rounding can leave u marginally past the last cell; return the
        // supremum of the support.
        self.support_sup(cap)
    }

    fn support_sup(&self, cap: f64) -> f64 {
        let a = self
            .atoms
            .iter()
            .filter(|(l, w)| *l <= cap && *w > 0.0)
            .map(|(l, _)| *l)
            .fold(f64::NEG_INFINITY, f64::max);
        let d = self.density_breaks.last().copied().unwrap_or(f64::NEG_INFINITY).min(cap);
        a.max(d)
    }
}

/// Jump-size truncation level for the dual process: level `n` uses
/// `ν_n = ν¹|_(0,n] + ν²|_(0,n] + d₁δ_n + d₂δ_n`; level infinity keeps
/// the atoms at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TruncationLevel {
    Finite(u32),
    Infinite,
}

impl TruncationLevel {
    pub fn cap(&self) -> f64 {
        match self {
            TruncationLevel::Finite(n) => *n as f64,
            TruncationLevel::Infinite => f64::INFINITY,
        }
    }
}

/// Jump type mark: 1 = positive branch `(1−e^{-λx})`, 2 = signed branch
/// `(1+e^{-λx})` (these are what the dual's sign process counts).
pub type Mark = u8;

/// Validated drift specification with derived dual parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftSpec {
    nu1: MeasureSpec,
    nu2: MeasureSpec,
    b0: f64,
    b1: f64,
    d1: f64,
    d2: f64,
    a: f64,
}

/// Parameter map `(b₀, b₁, ν¹, ν²) ↦ (d₁, d₂, a)`.
///
/// Rejects inputs with `b₀ < ⟨ν¹ − ν², 1⟩` (these would give `h(0) < 0`).
pub fn derive_params(b0: f64, b1: f64, nu1: &MeasureSpec, nu2: &MeasureSpec) -> Result<(f64, f64, f64)> {
    let m1 = nu1.total_mass();
    let m2 = nu2.total_mass();
    if b0 < m1 - m2 {
        return Err(Error::invalid(
            "derive_params",
            format!("b0 = {b0} < <nu1 - nu2, 1> = {}; h(0) would be negative", m1 - m2),
        ));
    }
    if b0 < b1 {
        // d2 = b0/2 must stay nonnegative for this branch of the map.
        if b0 < 0.0 {
            return Err(Error::invalid(
                "derive_params",
                format!("b0 = {b0} < 0 with b0 < b1 = {b1} has no (d1, d2 >= 0) representation"),
            ));
        }
        Ok((b1 - b0 / 2.0, b0 / 2.0, -(m1 + m2)))
    } else {
        Ok((0.0, b0 - b1, 2.0 * b1 - b0 - (m1 + m2)))
    }
}

impl DriftSpec {
    pub fn new(b0: f64, b1: f64, nu1: MeasureSpec, nu2: MeasureSpec) -> Result<Self> {
        nu1.validate("drift.nu1")?;
        nu2.validate("drift.nu2")?;
        let (d1, d2, a) = derive_params(b0, b1, &nu1, &nu2)?;
        Ok(DriftSpec { nu1, nu2, b0, b1, d1, d2, a })
    }

    /// Zero drift: the classical super-Brownian motion case.
    pub fn zero() -> Self {
        DriftSpec::new(0.0, 0.0, MeasureSpec::zero(), MeasureSpec::zero()).unwrap()
    }

    /// Pure step drift `h(x) = b₀·1{x=0} + b₁·1{x>0}` (the
    /// `h_{b₀,b₁}` family; `h_{0,1}`, `h_{c,1}`, `h_{1,0}` are the
    /// headline cases).
    pub fn step(b0: f64, b1: f64) -> Result<Self> {
        DriftSpec::new(b0, b1, MeasureSpec::zero(), MeasureSpec::zero())
    }

    /// Constant drift `h ≡ a` (immigration).
    pub fn constant(a: f64) -> Result<Self> {
        DriftSpec::step(a, a)
    }

    pub fn nu1(&self) -> &MeasureSpec {
        &self.nu1
    }

    pub fn nu2(&self) -> &MeasureSpec {
        &self.nu2
    }

    pub fn b0(&self) -> f64 {
        self.b0
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }

    pub fn d1(&self) -> f64 {
        self.d1
    }

    pub fn d2(&self) -> f64 {
        self.d2
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Total jump intensity `ν((0,∞])` at the given truncation level:
    /// truncated measure masses plus the `d₁ + d₂` (infinite) atoms.
    pub fn nu_bar(&self, level: TruncationLevel) -> f64 {
        let cap = level.cap();
        self.nu1.mass_up_to(cap) + self.nu2.mass_up_to(cap) + self.d1 + self.d2
    }

    /// Evaluate `h(x)` for a field value `x >= 0`.
    pub fn eval(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0);
        let h1 = self.nu2.laplace(x) - self.nu1.laplace(x);
        let hinf = if x == 0.0 { self.b0 } else { self.b1 };
        h1 + hinf
    }

    /// Evaluate the level-`n` approximation
    /// `h_n(x) = ∫₀ⁿ(1−e^{-λx})ν¹ + ∫₀ⁿ(1+e^{-λx})ν² + d₁(1−e^{-nx}) +
    /// d₂(1+e^{-nx}) + a`, which converges boundedly pointwise to `h`.
    pub fn eval_truncated(&self, x: f64, n: u32) -> f64 {
        debug_assert!(x >= 0.0);
        let cap = n as f64;
        let t1 = self.nu1.mass_up_to(cap) - self.nu1.laplace_up_to(x, cap);
        let t2 = self.nu2.mass_up_to(cap) + self.nu2.laplace_up_to(x, cap);
        let e = (-cap * x).exp();
        t1 + t2 + self.d1 * (1.0 - e) + self.d2 * (1.0 + e) + self.a
    }

    /// Sample the jump mark: `P(mark = i) ∝ ν^i((0,n]) + d_i`.
    pub fn sample_jump_mark<R: Rng + ?Sized>(&self, rng: &mut R, level: TruncationLevel) -> Result<Mark> {
        let cap = level.cap();
        let w1 = self.nu1.mass_up_to(cap) + self.d1;
        let w2 = self.nu2.mass_up_to(cap) + self.d2;
        let total = w1 + w2;
        if !(total > 0.0) {
            return Err(Error::invalid("sample_jump_mark", "total jump measure mass is zero"));
        }
        Ok(if rng.gen::<f64>() * total < w1 { 1 } else { 2 })
    }

    /// Sample the jump height for a given mark. With probability
    /// `d_mark / (⟨ν^mark⟩ + d_mark)` the height is the `δ_∞` atom:
    /// `∞` at level infinity, the value `n` at level `n` (matching the
    /// `d_i δ_n` atoms of the truncated measure).  Otherwise an
    /// inverse-CDF draw from `ν^mark` restricted to `(0, n]`.
    pub fn sample_jump_height<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        mark: Mark,
        level: TruncationLevel,
    ) -> Result<f64> {
        let cap = level.cap();
        let (nu, d) = match mark {
            1 => (&self.nu1, self.d1),
            2 => (&self.nu2, self.d2),
            _ => return Err(Error::invalid("sample_jump_height", format!("mark {mark} not in {{1,2}}"))),
        };
        let m = nu.mass_up_to(cap);
        let total = m + d;
        if !(total > 0.0) {
            return Err(Error::invalid("sample_jump_height", format!("mark {mark} has zero mass")));
        }
        if rng.gen::<f64>() * total < d {
            Ok(match level {
                TruncationLevel::Finite(n) => n as f64,
                TruncationLevel::Infinite => f64::INFINITY,
            })
        } else {
            Ok(nu.sample_restricted(rng, cap))
        }
    }
}
