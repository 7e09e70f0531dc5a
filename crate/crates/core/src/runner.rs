//! Experiment orchestration: subcommand dispatch, deterministic
//! seeding, and artifact emission.
//!
//! Every run writes into `out_root/<experiment>-<confighash>-s<seed>/`:
//! the resolved config echo, a `report.json` summary, and CSV/JSONL
//! exports whose headers carry the config hash, seed, and truncation
//! level.  Identical `(config, seed)` pairs produce byte-identical
//! artifacts, including under parallel path execution.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde_json::json;

use crate::branching::{coupled_dual_branching, simulate_branching, BranchingConfig};
use crate::config::Config;
use crate::drift::TruncationLevel;
use crate::dual::{simulate_dual, ClockSource, DualConfig, DualInit};
use crate::duality::{duality_const_immigration, duality_full, duality_h0, DualitySetup};
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::pde::PdeSolver;
use crate::profile::default_profile;
use crate::rng;
use crate::sde::{occupation_time_at_zero, simulate_sde, SdeParams};
use crate::spde::{cozero_measure, simulate_spde, SchemeDrift, SpdeParams};
use crate::stats;
use rand::Rng as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Pde,
    Dual,
    Branching,
    Spde,
    Sde,
    Duality,
    Cozero,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Pde => "pde",
            ExperimentKind::Dual => "dual",
            ExperimentKind::Branching => "branching",
            ExperimentKind::Spde => "spde",
            ExperimentKind::Sde => "sde",
            ExperimentKind::Duality => "duality",
            ExperimentKind::Cozero => "cozero",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "pde" => ExperimentKind::Pde,
            "dual" => ExperimentKind::Dual,
            "branching" => ExperimentKind::Branching,
            "spde" => ExperimentKind::Spde,
            "sde" => ExperimentKind::Sde,
            "duality" => ExperimentKind::Duality,
            "cozero" => ExperimentKind::Cozero,
            other => {
                return Err(Error::config(
                    "subcommand",
                    format!("unknown experiment `{other}` (pde|dual|branching|spde|sde|duality|cozero)"),
                ))
            }
        })
    }
}

#[derive(Debug)]
pub struct RunOutput {
    pub dir: PathBuf,
    pub report: serde_json::Value,
}

/// FNV-1a over the canonical config text: the run-directory fingerprint.
fn config_hash(canonical: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in canonical.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn write_csv(
    path: &Path,
    header_lines: &[String],
    columns: &[&str],
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<()> {
    let mut out = String::new();
    for line in header_lines {
        writeln!(out, "# {line}").unwrap();
    }
    writeln!(out, "{}", columns.join(",")).unwrap();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

/// Run one experiment; returns the run directory and the JSON report.
pub fn run(cfg: &Config, kind: ExperimentKind, out_root: &Path) -> Result<RunOutput> {
    let canonical = cfg.canonical();
    let hash = config_hash(&canonical);
    let seed = cfg.seed();
    let dir = out_root.join(format!("{}-{hash:016x}-s{seed}", kind.name()));
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("resolved_config.toml"), &canonical)?;
    let stamp = vec![format!("config_hash={hash:016x}"), format!("seed={seed}")];

    let report = match kind {
        ExperimentKind::Pde => run_pde(cfg, &dir, &stamp)?,
        ExperimentKind::Dual => run_dual(cfg, &dir, &stamp)?,
        ExperimentKind::Branching => run_branching(cfg, &dir, &stamp)?,
        ExperimentKind::Spde => run_spde(cfg, &dir, &stamp)?,
        ExperimentKind::Sde => run_sde(cfg, &dir, &stamp)?,
        ExperimentKind::Duality => run_duality(cfg, &dir, &stamp)?,
        ExperimentKind::Cozero => run_cozero(cfg, &dir, &stamp)?,
    };

    fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report).unwrap())?;
    Ok(RunOutput { dir, report })
}

/// Build the dual/PDE initial state from the `[mu]` atoms; infinite
/// weights warm-start the very singular profile.
fn mu_init_field(cfg: &Config, grid: crate::grid::Grid1d) -> Result<Field> {
    let mut f = Field::zeros(grid);
    for (x, m) in cfg.mu_atoms()? {
        if m.is_infinite() {
            default_profile().add_to_field(&mut f, x, cfg.eps_warm());
        } else {
            f.deposit_atom(x, m);
        }
    }
    Ok(f)
}

fn run_pde(cfg: &Config, dir: &Path, stamp: &[String]) -> Result<serde_json::Value> {
    let grid = cfg.grid()?;
    let solver = PdeSolver::new(grid, cfg.pde_dt()?)?;
    let horizon = cfg.horizon()?;
    let init = mu_init_field(cfg, grid)?;
    let (final_field, curve) = solver.evolve_recording(&init, horizon)?;
    let (_, diag) = solver.evolve(&init, horizon)?;

    write_csv(
        &dir.join("final_field.csv"),
        &stamp.to_vec(),
        &["x", "v"],
        final_field.iter_nodes().map(|(x, v)| vec![x, v]),
    )?;
    let ts: Vec<f64> = (0..=100).map(|k| horizon * k as f64 / 100.0).collect();
    write_csv(
        &dir.join("mass_curve.csv"),
        &stamp.to_vec(),
        &["t", "mass", "integral"],
        ts.iter().map(|&t| vec![t, curve.value(t), curve.integral(t)]),
    )?;
    let profile = default_profile();
    write_csv(
        &dir.join("profile_table.csv"),
        &stamp.to_vec(),
        &["xi", "f"],
        profile.table().map(|(xi, f)| vec![xi, f]),
    )?;
    Ok(json!({
        "experiment": "pde",
        "final_mass": final_field.mass(),
        "mass_integral": curve.integral(horizon),
        "clipped_mass": diag.clipped_mass,
        "boundary_leak": diag.boundary_leak,
        "profile_f0": profile.f0(),
        "profile_tail_constant": profile.tail_constant(),
        "profile_residual": profile.residual(),
    }))
}

fn run_dual(cfg: &Config, dir: &Path, stamp: &[String]) -> Result<serde_json::Value> {
    let grid = cfg.grid()?;
    let drift = cfg.drift()?;
    let level = TruncationLevel::Finite(cfg.dual_level());
    let mut dcfg = DualConfig::new(drift, level, grid, cfg.pde_dt()?, cfg.horizon()?);
    dcfg.eps_warm = cfg.eps_warm();
    dcfg.snapshot_times = cfg.snapshot_times();
    dcfg.max_jumps = cfg.max_jumps();
    let init = DualInit { field: None, atoms: cfg.mu_atoms()? };
    let paths = cfg.paths()?;
    let seed = cfg.seed();
    let profile = default_profile();

    let results: Result<Vec<_>> = (0..paths as u64)
        .into_par_iter()
        .map(|p| {
            let mut rng_p = rng::stream(seed, p);
            simulate_dual(&init, &dcfg, profile, &mut rng_p)
        })
        .collect();
    let results = results?;

    let mut stamp_l = stamp.to_vec();
    stamp_l.push(format!("level={}", cfg.dual_level()));

    // One jump record per line across all paths; the first line is the
    // run header (config hash, seed, level).
    let mut jsonl = String::new();
    let header = json!({
        "header": true,
        "config_hash": stamp_l[0].trim_start_matches("config_hash="),
        "seed": seed,
        "level": cfg.dual_level(),
    });
    writeln!(jsonl, "{header}").unwrap();
    for (p, path) in results.iter().enumerate() {
        for j in &path.jumps {
            let rec = json!({
                "path": p,
                "time": j.time,
                "location": j.location,
                "height": j.height,
                "mark": j.mark,
            });
            writeln!(jsonl, "{rec}").unwrap();
        }
    }
    fs::write(dir.join("jumps.jsonl"), jsonl)?;

    if let Some(first) = results.first() {
        for (k, (t, field)) in first.snapshots.iter().enumerate() {
            let mut lines = stamp_l.clone();
            lines.push(format!("snapshot_t={t}"));
            write_csv(
                &dir.join(format!("snapshot_{k}.csv")),
                &lines,
                &["x", "y"],
                field.iter_nodes().map(|(x, v)| vec![x, v]),
            )?;
        }
    }

    let horizon = dcfg.horizon;
    let jump_counts: Vec<f64> = results.iter().map(|r| r.jumps.len() as f64).collect();
    let integrated: Vec<f64> = results.iter().map(|r| r.integrated_mass(horizon)).collect();
    let sign_odd = results.iter().filter(|r| r.sign(horizon) < 0.0).count();
    let jc = stats::summarize(&jump_counts);
    let im = stats::summarize(&integrated);
    Ok(json!({
        "experiment": "dual",
        "paths": paths,
        "level": cfg.dual_level(),
        "mean_jumps": jc.mean,
        "max_jumps": jump_counts.iter().cloned().fold(0.0, f64::max),
        "mean_integrated_mass": im.mean,
        "p_sign_odd": sign_odd as f64 / paths as f64,
    }))
}

fn run_branching(cfg: &Config, dir: &Path, stamp: &[String]) -> Result<serde_json::Value> {
    let grid = cfg.grid()?;
    let drift = cfg.drift()?;
    let level = TruncationLevel::Finite(cfg.dual_level());
    let horizon = cfg.horizon()?;
    let mut dcfg = DualConfig::new(drift.clone(), level, grid, cfg.pde_dt()?, horizon);
    dcfg.eps_warm = cfg.eps_warm();
    dcfg.max_jumps = cfg.max_jumps();
    let init = DualInit { field: None, atoms: cfg.mu_atoms()? };
    let y0 = mu_init_field(cfg, grid)?;
    let solver = PdeSolver::new(grid, cfg.pde_dt()?)?;
    let (_, root_curve) = solver.evolve_recording(&y0, horizon)?;
    let profile = default_profile();
    let paths = cfg.paths()?;
    let seed = cfg.seed();
    let nu_bar = drift.nu_bar(level);

    // Coupled checks plus the standalone branching record per path.
    let rows: Result<Vec<_>> = (0..paths as u64)
        .into_par_iter()
        .map(|p| {
            let mut rng_p = rng::stream(seed, p);
            let mut clocks = ClockSource::new(rng::stream(rng::derive(seed, 0xc10c), p));
            let (check, _) = coupled_dual_branching(
                &init,
                &dcfg,
                &root_curve,
                profile,
                &mut rng_p,
                &mut clocks,
                cfg.max_jumps(),
            )?;
            let mut rng_b = rng::stream(rng::derive(seed, 0xb4a2), p);
            let rec = simulate_branching(
                &root_curve,
                profile,
                &BranchingConfig { nu_bar, horizon, cap: cfg.max_jumps() },
                &mut rng_b,
            )?;
            let gens = rec.generation_counts(horizon);
            Ok((check, rec.particles.len(), gens))
        })
        .collect();
    let rows = rows?;

    write_csv(
        &dir.join("coupling.csv"),
        &stamp.to_vec(),
        &[
            "path",
            "dual_jumps",
            "branch_births",
            "wait_violations",
            "mass_violations",
            "max_wait_excess",
            "max_mass_excess",
            "alive_count",
            "generations",
        ],
        rows.iter().enumerate().map(|(p, (c, alive, gens))| {
            vec![
                p as f64,
                c.dual_jumps as f64,
                c.branch_births as f64,
                c.wait_violations as f64,
                c.mass_violations as f64,
                c.max_wait_excess,
                c.max_mass_excess,
                *alive as f64,
                gens.len() as f64,
            ]
        }),
    )?;

    let wait_viol: usize = rows.iter().map(|(c, _, _)| c.wait_violations).sum();
    let mass_viol: usize = rows.iter().map(|(c, _, _)| c.mass_violations).sum();
    let alive: Vec<f64> = rows.iter().map(|(_, a, _)| *a as f64).collect();
    let s = stats::summarize(&alive);
    Ok(json!({
        "experiment": "branching",
        "paths": paths,
        "nu_bar": nu_bar,
        "mean_alive": s.mean,
        "max_alive": alive.iter().cloned().fold(0.0, f64::max),
        "wait_violations": wait_viol,
        "mass_violations": mass_viol,
    }))
}

fn run_spde(cfg: &Config, dir: &Path, stamp: &[String]) -> Result<serde_json::Value> {
    let grid = cfg.grid()?;
    let params = SpdeParams::new(grid, cfg.dt()?, SchemeDrift::Exact(cfg.drift()?))?;
    let x0 = cfg.initial_field(grid)?;
    let horizon = cfg.horizon()?;
    let snaps = cfg.snapshot_times();
    let paths = cfg.paths()?;
    let seed = cfg.seed();

    let results: Result<Vec<_>> = (0..paths as u64)
        .into_par_iter()
        .map(|p| {
            let mut rng_p = rng::stream(seed, p);
            simulate_spde(&x0, &params, horizon, &snaps, &mut rng_p)
        })
        .collect();
    let results = results?;

    if let Some(first) = results.first() {
        for (k, (t, field)) in first.snapshots.iter().enumerate() {
            let mut lines = stamp.to_vec();
            lines.push(format!("snapshot_t={t}"));
            write_csv(
                &dir.join(format!("snapshot_{k}.csv")),
                &lines,
                &["x", "X"],
                field.iter_nodes().map(|(x, v)| vec![x, v]),
            )?;
        }
        write_csv(
            &dir.join("mass_trajectory.csv"),
            &stamp.to_vec(),
            &["step", "mass"],
            first.mass_trajectory.iter().enumerate().map(|(k, m)| vec![(k + 1) as f64, *m]),
        )?;
    }

    let masses: Vec<f64> = results.iter().map(|r| r.final_field.mass()).collect();
    let clip: Vec<f64> = results.iter().map(|r| r.diag.clipped_mass).collect();
    let min_v = results.iter().map(|r| r.diag.min_before_clip).fold(0.0f64, f64::min);
    let ms = stats::summarize(&masses);
    let cs = stats::summarize(&clip);
    Ok(json!({
        "experiment": "spde",
        "paths": paths,
        "final_mass_mean": ms.mean,
        "final_mass_stderr": ms.stderr,
        "clipped_mass_mean": cs.mean,
        "min_before_clip": min_v,
    }))
}

fn run_sde(cfg: &Config, dir: &Path, stamp: &[String]) -> Result<serde_json::Value> {
    let drift = cfg.drift()?;
    let label = format!("b0={},b1={}", drift.b0(), drift.b1());
    let base = SdeParams::new(drift, cfg.dt()?, cfg.horizon()?)?;
    let x0 = cfg.sde_x0();
    let paths = cfg.paths()?;
    let seed = cfg.seed();
    let eps_sweep = cfg.sde_eps_sweep();

    // Both zero-escape policies: with the default the clipped scheme
    // started at zero keeps the all-zero solution, with escape it
    // follows the nontrivial family — the two-solution phenomenon.
    let simulate_family = |escape: bool| -> Result<Vec<Vec<f64>>> {
        let mut params = base.clone();
        params.escape_at_zero = escape;
        (0..paths as u64)
            .into_par_iter()
            .map(|p| {
                let mut rng_p = rng::stream(seed, p);
                simulate_sde(x0, &params, &mut rng_p)
            })
            .collect()
    };
    let stuck_runs = simulate_family(false)?;
    let escape_runs = simulate_family(true)?;

    // Occupation-time threshold sweep for both families.
    let mut occ_rows = Vec::new();
    for &eps in &eps_sweep {
        let occ_s: Vec<f64> =
            stuck_runs.iter().map(|p| occupation_time_at_zero(p, base.dt, eps)).collect();
        let occ_e: Vec<f64> =
            escape_runs.iter().map(|p| occupation_time_at_zero(p, base.dt, eps)).collect();
        let (s, e) = (stats::summarize(&occ_s), stats::summarize(&occ_e));
        occ_rows.push(vec![eps, s.mean, s.stderr, e.mean, e.stderr]);
    }
    write_csv(
        &dir.join("occupation.csv"),
        &stamp.to_vec(),
        &["eps", "default_mean", "default_stderr", "escape_mean", "escape_stderr"],
        occ_rows.into_iter(),
    )?;

    write_csv(
        &dir.join("path0.csv"),
        &stamp.to_vec(),
        &["t", "x_default", "x_escape"],
        stuck_runs[0]
            .iter()
            .zip(&escape_runs[0])
            .enumerate()
            .map(|(k, (a, b))| vec![k as f64 * base.dt, *a, *b]),
    )?;

    // Final-marginal comparison of the escape family against the exact
    // law of B_t^2/2 (sampled via normal squares). Reported, not
    // asserted.
    let t = base.horizon;
    let mut ref_rng = rng::stream(rng::derive(seed, 0x5de0), 0);
    let mut reference: Vec<f64> = (0..200_000)
        .map(|_| {
            let b: f64 = ref_rng.sample::<f64, _>(StandardNormal) * t.sqrt();
            0.5 * b * b
        })
        .collect();
    reference.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n_ref = reference.len() as f64;
    let ref_cdf = move |x: f64| reference.partition_point(|v| *v <= x) as f64 / n_ref;
    let mut finals: Vec<f64> = escape_runs.iter().map(|p| *p.last().unwrap()).collect();
    let escape_mean = stats::summarize(&finals);
    let ks = stats::ks_statistic(&mut finals, ref_cdf);
    let zero_fraction =
        stuck_runs.iter().filter(|p| *p.last().unwrap() == 0.0).count() as f64 / paths as f64;

    Ok(json!({
        "experiment": "sde",
        "drift": label,
        "paths": paths,
        "default_policy_zero_fraction": zero_fraction,
        "escape_family_mean": escape_mean.mean,
        "escape_family_stderr": escape_mean.stderr,
        "escape_ks_vs_half_squared_brownian": ks,
        "occupation_eps0_default": stats::summarize(
            &stuck_runs.iter().map(|p| occupation_time_at_zero(p, base.dt, 0.0)).collect::<Vec<_>>()
        ).mean,
        "occupation_eps0_escape": stats::summarize(
            &escape_runs.iter().map(|p| occupation_time_at_zero(p, base.dt, 0.0)).collect::<Vec<_>>()
        ).mean,
    }))
}

fn run_duality(cfg: &Config, dir: &Path, stamp: &[String]) -> Result<serde_json::Value> {
    let grid = cfg.grid()?;
    let drift = cfg.drift()?;
    let x0 = cfg.initial_field(grid)?;
    let mu = cfg.mu_atoms()?;
    let mut setup = DualitySetup::new(grid, cfg.dt()?, cfg.pde_dt()?, cfg.horizon()?, cfg.paths()?, cfg.seed());
    setup.bias_paths = cfg.bias_paths();

    let nu_mass = drift.nu1().total_mass() + drift.nu2().total_mass();
    let is_zero = nu_mass == 0.0 && drift.b0() == 0.0 && drift.b1() == 0.0;
    let is_const = nu_mass == 0.0 && drift.b0() == drift.b1() && drift.b0() > 0.0;

    if is_zero {
        let rep = duality_h0(&x0, &mu, &setup)?;
        return Ok(json!({ "experiment": "duality", "variant": "h0", "pass": rep.pass, "report": rep }));
    }
    if is_const {
        let rep = duality_const_immigration(&x0, &mu, drift.b0(), &setup)?;
        return Ok(json!({
            "experiment": "duality", "variant": "const_immigration", "a": drift.b0(),
            "pass": rep.pass, "report": rep,
        }));
    }

    let levels = cfg.dual_levels();
    let rep = duality_full(&x0, &mu, &drift, &levels, &setup, default_profile(), cfg.pde_dt()?)?;
    write_csv(
        &dir.join("level_sweep.csv"),
        &stamp.to_vec(),
        &["level", "mean", "stderr", "mean_jumps", "p_sign_odd"],
        rep.levels
            .iter()
            .map(|l| vec![l.level as f64, l.mean, l.stderr, l.mean_jumps, l.p_sign_odd]),
    )?;
    write_csv(
        &dir.join("cauchy_diffs.csv"),
        &stamp.to_vec(),
        &["level_a", "level_b", "abs_diff", "stderr"],
        rep.cauchy_diffs.iter().map(|c| vec![c.0 as f64, c.1 as f64, c.2, c.3]),
    )?;
    Ok(json!({ "experiment": "duality", "variant": "full", "pass": rep.pass, "report": rep }))
}

fn run_cozero(cfg: &Config, dir: &Path, stamp: &[String]) -> Result<serde_json::Value> {
    let grid = cfg.grid()?;
    let drift = cfg.drift()?;
    if drift.nu2().total_mass() != 0.0 || drift.b0() != 0.0 {
        return Err(Error::config(
            "drift",
            "cozero experiment requires the theorem regime nu2 = 0, b0 = 0",
        ));
    }
    let x0 = cfg.initial_field(grid)?;
    let horizon = cfg.horizon()?;
    let paths = cfg.paths()?;
    let seed = cfg.seed();

    let measure_at = |g: crate::grid::Grid1d, x0: &Field| -> Result<Vec<f64>> {
        let params = SpdeParams::new(g, cfg.dt()?, SchemeDrift::Exact(drift.clone()))?;
        (0..paths as u64)
            .into_par_iter()
            .map(|p| {
                let mut rng_p = rng::stream(seed, p);
                let path = simulate_spde(x0, &params, horizon, &[], &mut rng_p)?;
                Ok(cozero_measure(&path.final_field, 0.0))
            })
            .collect()
    };

    let mut base = measure_at(grid, &x0)?;
    // Doubled domain at the same dx: 2L with 2(N-1)+1 nodes.
    let grid2 = crate::grid::Grid1d::new(2.0 * grid.half_extent(), 2 * (grid.n() - 1) + 1)?;
    let x0_2 = cfg.initial_field(grid2)?;
    let mut dbl = measure_at(grid2, &x0_2)?;

    base.sort_by(|a, b| a.partial_cmp(b).unwrap());
    dbl.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let med = |v: &[f64]| v[v.len() / 2];
    let median_base = med(&base);
    let median_dbl = med(&dbl);
    let shift = (median_dbl - median_base).abs() / median_base.max(1e-12);

    write_csv(
        &dir.join("cozero_samples.csv"),
        &stamp.to_vec(),
        &["path", "measure_L", "measure_2L"],
        base.iter().zip(&dbl).enumerate().map(|(p, (a, b))| vec![p as f64, *a, *b]),
    )?;
    Ok(json!({
        "experiment": "cozero",
        "paths": paths,
        "median_L": median_base,
        "median_2L": median_dbl,
        "median_shift_rel": shift,
        "stable": shift < 0.05,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::preset;

    #[test]
    fn h0_smoke_preset_passes() {
        let cfg = Config::from_toml(preset("h0-smoke").unwrap(), &[]).unwrap();
        let tmp = std::env::temp_dir().join("sbmlab-test-h0-smoke");
        let out = run(&cfg, ExperimentKind::Duality, &tmp).unwrap();
        assert_eq!(out.report["variant"], "h0");
        assert_eq!(out.report["pass"], true);
        assert!(out.dir.join("report.json").exists());
        assert!(out.dir.join("resolved_config.toml").exists());
    }

    #[test]
    fn determinism_byte_identical_outputs() {
        let mut text = preset("spde-default").unwrap().to_string();
        text = text.replace("paths = 100", "paths = 8");
        let cfg = Config::from_toml(&text, &[("grid.N".into(), "81".into())]).unwrap();
        let tmp = std::env::temp_dir().join("sbmlab-test-determinism");
        let a = run(&cfg, ExperimentKind::Spde, &tmp).unwrap();
        let snap_a = fs::read(a.dir.join("snapshot_0.csv")).unwrap();
        let mass_a = fs::read(a.dir.join("mass_trajectory.csv")).unwrap();
        let b = run(&cfg, ExperimentKind::Spde, &tmp).unwrap();
        let snap_b = fs::read(b.dir.join("snapshot_0.csv")).unwrap();
        let mass_b = fs::read(b.dir.join("mass_trajectory.csv")).unwrap();
        assert_eq!(snap_a, snap_b);
        assert_eq!(mass_a, mass_b);
    }

    #[test]
    fn missing_grid_field_is_config_error() {
        let cfg = Config::from_toml("[grid]\nL = 4.0\n", &[]).unwrap();
        let tmp = std::env::temp_dir().join("sbmlab-test-missing");
        let err = run(&cfg, ExperimentKind::Pde, &tmp).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("grid.N"));
    }
}
