//! Numerical laboratory for the one-dimensional super-Brownian SPDE
//!
//! ```text
//!     d_t X = 1/2 ΔX + h(X) + sqrt(X) Ẇ
//! ```
//!
//! with bounded, possibly discontinuous drifts `h(x) = h₁(x) + h_∞(x)`,
//! where `h₁` is a Laplace transform of signed finite measures and
//! `h_∞(x) = b₀·1{x=0} + b₁·1{x>0}`.  The crate implements:
//!
//! * the drift representation `(ν¹, ν², b₀, b₁) ↦ (d₁, d₂, a)` and its
//!   truncations ([`drift`]);
//! * a splitting solver for the log-Laplace equation
//!   `d_t V = 1/2 ΔV − 1/2 V²` including Dirac and "infinite atom"
//!   (very singular) initial data ([`pde`], [`profile`]);
//! * the dual jump process: PDE flow punctuated by atom insertions at
//!   exponential clock times, with a sign process counting type-2 jumps
//!   ([`dual`]);
//! * the dominating artificial branching system, the Borel–Tanner total
//!   progeny law, and coupled-clock comparison checks ([`branching`]);
//! * explicit Euler–Maruyama simulation of the SPDE and of the scalar
//!   SDE analogue ([`spde`], [`sde`]);
//! * Monte Carlo verification of the duality identities
//!   `E exp(−⟨X_t, Y₀⟩) = E (−1)^{J_t} exp(−⟨X₀, Y_t⟩ − a∫⟨Y_s,1⟩ds)`
//!   ([`duality`]);
//! * experiment orchestration from TOML configs ([`config`], [`runner`]).
//!
//! Start with the runnable examples (`cargo run --release --example
//! duality_h0`, etc.) or the thin `sbmlab` binary which dispatches the
//! same experiments from config files.

pub mod branching;
pub mod config;
pub mod drift;
pub mod dual;
pub mod duality;
pub mod error;
pub mod grid;
pub mod pde;
pub mod profile;
pub mod rng;
pub mod runner;
pub mod sde;
pub mod spde;
pub mod stats;

pub use drift::{DriftSpec, MeasureSpec, TruncationLevel};
pub use error::{Error, Result};
pub use grid::{Field, Grid1d};
pub use pde::PdeSolver;
pub use profile::SingularProfile;
