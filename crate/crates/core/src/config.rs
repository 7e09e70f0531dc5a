//! Experiment configuration: a nested key-value (TOML) schema shared
//! by the CLI and the examples.
//!
//! Schema (all physical parameters live here; see the files under
//! `configs/` for working presets):
//!
//! ```toml
//! seed = 42                  # master seed (CLI --seed overrides)
//!
//! [grid]
//! L = 4.0                    # half extent; domain is [-L, L]
//! N = 161                    # node count (odd keeps x = 0 on a node)
//!
//! [time]
//! dt = 2.5e-4                # scheme step (SPDE / SDE)
//! pde_dt = 2.5e-4            # log-Laplace solver step
//! horizon = 0.25             # experiment horizon T
//!
//! [drift]
//! b0 = 0.0                   # h(0) boundary value
//! b1 = 1.0                   # h(x>0) boundary value
//! nu1_atoms = [[1.0, 0.5]]   # (lambda, weight) pairs
//! nu2_atoms = []
//! nu1_density_breaks = []    # piecewise-constant density cells
//! nu1_density_values = []
//! nu2_density_breaks = []
//! nu2_density_values = []
//!
//! [initial]                  # X0 profile
//! kind = "box"               # box | gaussian | plateau | zero
//! height = 1.0
//! half_width = 1.0           # box half width / gaussian sigma
//! floor = 0.0                # plateau floor
//!
//! [mu]
//! atoms = [[0.0, 1.0]]       # duality functional / dual initial
//!                            # (weight may be `inf` at level infinity)
//!
//! [dual]
//! level = 40                 # jump-size truncation level n
//! levels = [5, 10, 20, 40]   # n-sweep for the duality harness
//! eps_warm = 1e-3            # warm-start offset for infinite atoms
//! max_jumps = 1000000
//!
//! [mc]
//! paths = 10000
//! bias_paths = 2500          # dt-halving rerun size
//!
//! [sde]
//! x0 = 0.0
//! eps_sweep = [0.0, 1e-4, 1e-3, 1e-2]
//!
//! [output]
//! snapshot_times = [0.1, 0.25]
//! ```

use serde::{Deserialize, Serialize};

use crate::drift::{DriftSpec, MeasureSpec};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid1d};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift: Option<DriftCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<MuCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual: Option<DualCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc: Option<McCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sde: Option<SdeCfg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputCfg>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridCfg {
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeCfg {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pde_dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftCfg {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b1: Option<f64>,
    #[serde(default)]
    pub nu1_atoms: Vec<(f64, f64)>,
    #[serde(default)]
    pub nu2_atoms: Vec<(f64, f64)>,
    #[serde(default)]
    pub nu1_density_breaks: Vec<f64>,
    #[serde(default)]
    pub nu1_density_values: Vec<f64>,
    #[serde(default)]
    pub nu2_density_breaks: Vec<f64>,
    #[serde(default)]
    pub nu2_density_values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialCfg {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub floor: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuCfg {
    #[serde(default)]
    pub atoms: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualCfg {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    #[serde(default)]
    pub levels: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_warm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_jumps: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McCfg {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paths: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bias_paths: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdeCfg {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(default)]
    pub eps_sweep: Vec<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputCfg {
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
}

fn missing(path: &str) -> Error {
    Error::config(path, "missing required field")
}

impl Config {
    /// Parse TOML text, applying `key=value` dotted-path overrides
    /// before deserialization.
    pub fn from_toml(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut value: toml::Value = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config("<config>", e.to_string()))?;
        for (key, raw) in overrides {
            apply_override(&mut value, key, raw)?;
        }
        let canonical =
            toml::to_string(&value).map_err(|e| Error::config("<config>", e.to_string()))?;
        let cfg: Config =
            toml::from_str(&canonical).map_err(|e| Error::config("<config>", e.to_string()))?;
        Ok(cfg)
    }

    /// Canonical serialized form (drives the run-directory hash and the
    /// resolved-config echo).
    pub fn canonical(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn grid(&self) -> Result<Grid1d> {
        let g = self.grid.as_ref().ok_or_else(|| missing("grid"))?;
        let l = g.l.ok_or_else(|| missing("grid.L"))?;
        let n = g.n.ok_or_else(|| missing("grid.N"))?;
        Grid1d::new(l, n)
    }

    pub fn dt(&self) -> Result<f64> {
        self.time.as_ref().and_then(|t| t.dt).ok_or_else(|| missing("time.dt"))
    }

    pub fn pde_dt(&self) -> Result<f64> {
        let t = self.time.as_ref().ok_or_else(|| missing("time"))?;
        t.pde_dt.or(t.dt).ok_or_else(|| missing("time.pde_dt"))
    }

    pub fn horizon(&self) -> Result<f64> {
        let h = self
            .time
            .as_ref()
            .and_then(|t| t.horizon)
            .ok_or_else(|| missing("time.horizon"))?;
        if !(h > 0.0) {
            return Err(Error::config("time.horizon", "must be > 0"));
        }
        Ok(h)
    }

    pub fn drift(&self) -> Result<DriftSpec> {
        let d = self.drift.as_ref().ok_or_else(|| missing("drift"))?;
        let b0 = d.b0.ok_or_else(|| missing("drift.b0"))?;
        let b1 = d.b1.ok_or_else(|| missing("drift.b1"))?;
        let nu1 = measure(&d.nu1_atoms, &d.nu1_density_breaks, &d.nu1_density_values, "drift.nu1")?;
        let nu2 = measure(&d.nu2_atoms, &d.nu2_density_breaks, &d.nu2_density_values, "drift.nu2")?;
        DriftSpec::new(b0, b1, nu1, nu2)
    }

    pub fn initial_field(&self, grid: Grid1d) -> Result<Field> {
        let i = self.initial.as_ref().ok_or_else(|| missing("initial"))?;
        let kind = i.kind.as_deref().ok_or_else(|| missing("initial.kind"))?;
        let height = i.height.unwrap_or(1.0);
        let hw = i.half_width.unwrap_or(1.0);
        let floor = i.floor.unwrap_or(0.0);
        let f = match kind {
            "box" => Field::from_fn(grid, |x| if x.abs() <= hw { height } else { 0.0 }),
            "gaussian" => Field::from_fn(grid, |x| height * (-x * x / (2.0 * hw * hw)).exp()),
            "plateau" => Field::from_fn(grid, |x| floor + height * (-x * x / (2.0 * hw * hw)).exp()),
            "zero" => Field::zeros(grid),
            other => {
                return Err(Error::config(
                    "initial.kind",
                    format!("unknown kind `{other}` (box | gaussian | plateau | zero)"),
                ))
            }
        };
        Ok(f)
    }

    pub fn mu_atoms(&self) -> Result<Vec<(f64, f64)>> {
        Ok(self.mu.as_ref().ok_or_else(|| missing("mu"))?.atoms.clone())
    }

    pub fn paths(&self) -> Result<usize> {
        self.mc.as_ref().and_then(|m| m.paths).ok_or_else(|| missing("mc.paths"))
    }

    pub fn bias_paths(&self) -> usize {
        self.mc
            .as_ref()
            .and_then(|m| m.bias_paths)
            .unwrap_or_else(|| (self.paths().unwrap_or(400) / 4).max(100))
    }

    pub fn dual_level(&self) -> u32 {
        self.dual.as_ref().and_then(|d| d.level).unwrap_or(40)
    }

    pub fn dual_levels(&self) -> Vec<u32> {
        let ls = self.dual.as_ref().map(|d| d.levels.clone()).unwrap_or_default();
        if ls.is_empty() {
            vec![5, 10, 20, 40]
        } else {
            ls
        }
    }

    pub fn eps_warm(&self) -> f64 {
        self.dual.as_ref().and_then(|d| d.eps_warm).unwrap_or(1e-3)
    }

    pub fn max_jumps(&self) -> usize {
        self.dual.as_ref().and_then(|d| d.max_jumps).unwrap_or(1_000_000)
    }

    pub fn snapshot_times(&self) -> Vec<f64> {
        self.output.as_ref().map(|o| o.snapshot_times.clone()).unwrap_or_default()
    }

    pub fn sde_x0(&self) -> f64 {
        self.sde.as_ref().and_then(|s| s.x0).unwrap_or(0.0)
    }

    pub fn sde_eps_sweep(&self) -> Vec<f64> {
        let v = self.sde.as_ref().map(|s| s.eps_sweep.clone()).unwrap_or_default();
        if v.is_empty() {
            vec![0.0, 1e-4, 1e-3, 1e-2]
        } else {
            v
        }
    }
}

fn measure(atoms: &[(f64, f64)], breaks: &[f64], values: &[f64], path: &str) -> Result<MeasureSpec> {
    let m = MeasureSpec {
        atoms: atoms.to_vec(),
        density_breaks: breaks.to_vec(),
        density_values: values.to_vec(),
    };
    m.validate(path)?;
    Ok(m)
}

/// Apply a dotted-path override like `grid.N=321` onto a TOML tree.
fn apply_override(root: &mut toml::Value, key: &str, raw: &str) -> Result<()> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.is_empty() || parts.iter().any(|p| p.is_empty()) {
        return Err(Error::config(key.to_string(), "malformed override key"));
    }
    let mut cur = root;
    for part in &parts[..parts.len() - 1] {
        let table = cur
            .as_table_mut()
            .ok_or_else(|| Error::config(key.to_string(), "override path walks through a non-table"))?;
        cur = table
            .entry(part.to_string())
            .or_insert(toml::Value::Table(Default::default()));
    }
    let table = cur
        .as_table_mut()
        .ok_or_else(|| Error::config(key.to_string(), "override path walks through a non-table"))?;
    // Parse the value as a TOML literal, falling back to a string.
    let parsed: toml::Value = match format!("v = {raw}").parse::<toml::Value>() {
        Ok(toml::Value::Table(t)) => t.get("v").cloned().unwrap_or(toml::Value::String(raw.into())),
        _ => toml::Value::String(raw.to_string()),
    };
    table.insert(parts[parts.len() - 1].to_string(), parsed);
    Ok(())
}

/// Built-in presets (the same files ship under `configs/`).
pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "h0-smoke" => Some(include_str!("../configs/h0-smoke.toml")),
        "duality-h0" => Some(include_str!("../configs/duality-h0.toml")),
        "duality-immigration" => Some(include_str!("../configs/duality-immigration.toml")),
        "duality-full" => Some(include_str!("../configs/duality-full.toml")),
        "pde-default" => Some(include_str!("../configs/pde-default.toml")),
        "dual-default" => Some(include_str!("../configs/dual-default.toml")),
        "branching-default" => Some(include_str!("../configs/branching-default.toml")),
        "spde-default" => Some(include_str!("../configs/spde-default.toml")),
        "sde-default" => Some(include_str!("../configs/sde-default.toml")),
        "cozero-default" => Some(include_str!("../configs/cozero-default.toml")),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overrides() {
        let text = "seed = 1\n[grid]\nL = 4.0\nN = 161\n[time]\ndt = 1e-3\nhorizon = 0.1\n";
        let cfg = Config::from_toml(text, &[("grid.N".into(), "321".into())]).unwrap();
        assert_eq!(cfg.grid().unwrap().n(), 321);
        assert_eq!(cfg.seed(), 1);
        assert!((cfg.dt().unwrap() - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn missing_field_names_path() {
        let text = "[grid]\nL = 4.0\n";
        let cfg = Config::from_toml(text, &[]).unwrap();
        let err = cfg.grid().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("grid.N"), "{msg}");
    }

    #[test]
    fn unknown_key_rejected() {
        let text = "[grid]\nL = 4.0\nN = 11\nbogus = 1\n";
        assert!(Config::from_toml(text, &[]).is_err());
    }

    #[test]
    fn infinite_atom_weight_parses() {
        let text = "[mu]\natoms = [[0.0, inf]]\n";
        let cfg = Config::from_toml(text, &[]).unwrap();
        let atoms = cfg.mu_atoms().unwrap();
        assert!(atoms[0].1.is_infinite());
    }

    #[test]
    fn canonical_is_stable() {
        let text = "seed = 7\n[grid]\nN = 11\nL = 2.0\n";
        let a = Config::from_toml(text, &[]).unwrap().canonical();
        let b = Config::from_toml(text, &[]).unwrap().canonical();
        assert_eq!(a, b);
        assert!(!a.is_empty());
    }

    #[test]
    fn presets_all_parse() {
        for name in [
            "h0-smoke",
            "duality-h0",
            "duality-immigration",
            "duality-full",
            "pde-default",
            "dual-default",
            "branching-default",
            "spde-default",
            "sde-default",
            "cozero-default",
        ] {
            let text = preset(name).unwrap();
            let cfg = Config::from_toml(text, &[]).unwrap();
            cfg.grid().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}
