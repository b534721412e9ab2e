//! Subcommand implementations and the run manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use amoeba_engine::{run_iterations, DriverConfig, Mode};
use anyhow::{Context, Result};
use asymptotics::{coefficient_curves, linspace, run_suite, Suite};
use field_core::io::csv::{fmt_real, write_csv};
use field_core::io::pgm::{load_pgm, save_pgm};
use field_core::levelset::{contour_mask, zero_crossings};
use field_core::ScalarField;
use pde_solver::{self_snakes_step, GacSolver};
use serde::Serialize;

use crate::config::{Config, PdeMode};
use crate::error::UsageError;
use crate::init::InitSpec;

/// What to run, with its input paths.
#[derive(Debug, Clone, PartialEq)]
pub enum Invocation {
    Amf { input: PathBuf },
    Aac { f: PathBuf },
    Pde { f: Option<PathBuf> },
    Verify { suite: String },
    Curves { output: Option<PathBuf> },
}

impl Invocation {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Amf { .. } => "amf",
            Self::Aac { .. } => "aac",
            Self::Pde { .. } => "pde",
            Self::Verify { .. } => "verify",
            Self::Curves { .. } => "curves",
        }
    }

    fn inputs(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        match self {
            Self::Amf { input } => {
                m.insert("input".into(), input.display().to_string());
            }
            Self::Aac { f } => {
                m.insert("f".into(), f.display().to_string());
            }
            Self::Pde { f: Some(f) } => {
                m.insert("f".into(), f.display().to_string());
            }
            Self::Verify { suite } => {
                m.insert("suite".into(), suite.clone());
            }
            Self::Pde { f: None } | Self::Curves { .. } => {}
        }
        m
    }
}

/// Global options shared by all subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunContext {
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub seed: u64,
}

/// Result of a subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub outputs: Vec<PathBuf>,
    pub iterations: usize,
    /// False when a verification tolerance was missed.
    pub passed: bool,
    /// Lines for standard output.
    pub report: Vec<String>,
}

/// Reproducibility record written as `manifest.json` next to the outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: Config,
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub duration_secs: f64,
    pub iterations: usize,
    pub seed: u64,
    pub threads: Option<usize>,
}

/// Runs a subcommand and writes its manifest.
pub fn execute(inv: &Invocation, cfg: &Config, ctx: &RunContext) -> Result<Outcome> {
    std::fs::create_dir_all(&ctx.out).with_context(|| format!("creating {}", ctx.out.display()))?;
    let start = Instant::now();
    let outcome = match inv {
        Invocation::Amf { input } => cmd_amf(input, cfg, &ctx.out)?,
        Invocation::Aac { f } => cmd_aac(f, cfg, &ctx.out)?,
        Invocation::Pde { f } => cmd_pde(f.as_deref(), cfg, &ctx.out)?,
        Invocation::Verify { suite } => cmd_verify(suite, &ctx.out)?,
        Invocation::Curves { output } => cmd_curves(cfg, output.clone().unwrap_or_else(|| ctx.out.join("curves.csv")))?,
    };
    let manifest = RunManifest {
        subcommand: inv.name().into(),
        config: cfg.clone(),
        inputs: inv.inputs(),
        outputs: outcome.outputs.iter().map(|p| p.display().to_string()).collect(),
        duration_secs: start.elapsed().as_secs_f64(),
        iterations: outcome.iterations,
        seed: ctx.seed,
        threads: ctx.threads,
    };
    let path = ctx.out.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?).with_context(|| format!("writing {}", path.display()))?;
    Ok(outcome)
}

fn load(path: &Path) -> Result<ScalarField> {
    load_pgm(path).with_context(|| format!("loading {}", path.display()))
}

fn initial_level_set(cfg: &Config, like: &ScalarField) -> Result<ScalarField> {
    let spec = cfg.u0.as_deref().ok_or_else(|| UsageError("config key `u0` is required".into()))?;
    InitSpec::parse(spec)?.build(like.width(), like.height(), like.spacing())
}

/// Affine map of `[min, max]` onto `[0, top]`; constant fields map to `top/2`.
fn normalized(u: &ScalarField, top: f64) -> Result<ScalarField> {
    let (lo, hi) = u.min_max();
    let span = hi - lo;
    Ok(u.map(|v| if span > 0.0 { top * (v - lo) / span } else { 0.5 * top })?)
}

/// `f` dimmed to `[0, 200]` with the zero level of `u` drawn at 255.
pub fn contour_overlay(f: &ScalarField, u: &ScalarField) -> Result<ScalarField> {
    let base = normalized(f, 200.0)?;
    let mask = contour_mask(u);
    let values = base.values().iter().zip(&mask).map(|(&v, &m)| if m { 255.0 } else { v }).collect();
    Ok(base.with_values(values)?)
}

/// Writes the level set, its overlay on `f` and the sub-pixel contour points.
fn write_level_set(out: &Path, stem: &str, f: &ScalarField, u: &ScalarField, outputs: &mut Vec<PathBuf>) -> Result<()> {
    let pu = out.join(format!("{stem}_u.pgm"));
    save_pgm(&normalized(u, 255.0)?, &pu)?;
    let po = out.join(format!("{stem}_overlay.pgm"));
    save_pgm(&contour_overlay(f, u)?, &po)?;
    let pc = out.join(format!("{stem}_contour.csv"));
    write_csv(&pc, &["x", "y"], zero_crossings(u).iter().map(|p| [fmt_real(p[0]), fmt_real(p[1])]))?;
    outputs.extend([pu, po, pc]);
    Ok(())
}

fn cmd_amf(input: &Path, cfg: &Config, out: &Path) -> Result<Outcome> {
    let f = load(input)?;
    let dc = DriverConfig {
        mode: Mode::Amf,
        iterations: cfg.iterations,
        metric: cfg.amoeba_metric(),
        rho: cfg.rho,
        bias: cfg.bias_spec(),
        snapshot_every: cfg.snapshot_every,
    };
    let snaps = run_iterations(&dc, &f, None)?;
    let mut outputs = Vec::new();
    for s in &snaps {
        let p = out.join(format!("amf_{:04}.pgm", s.iteration));
        save_pgm(&s.field, &p)?;
        outputs.push(p);
    }
    Ok(Outcome { outputs, iterations: cfg.iterations, passed: true, report: Vec::new() })
}

fn cmd_aac(f_path: &Path, cfg: &Config, out: &Path) -> Result<Outcome> {
    let f = load(f_path)?;
    let u0 = initial_level_set(cfg, &f)?;
    let dc = DriverConfig {
        mode: Mode::Aac,
        iterations: cfg.iterations,
        metric: cfg.amoeba_metric(),
        rho: cfg.rho,
        bias: cfg.bias_spec(),
        snapshot_every: cfg.snapshot_every,
    };
    let snaps = run_iterations(&dc, &f, Some(&u0))?;
    let mut outputs = Vec::new();
    for s in &snaps {
        write_level_set(out, &format!("aac_{:04}", s.iteration), &f, &s.field, &mut outputs)?;
    }
    Ok(Outcome { outputs, iterations: cfg.iterations, passed: true, report: Vec::new() })
}

fn cmd_pde(f_path: Option<&Path>, cfg: &Config, out: &Path) -> Result<Outcome> {
    let mut outputs = Vec::new();
    match cfg.pde_mode {
        PdeMode::Gac => {
            let f_path = f_path.ok_or_else(|| UsageError("pde_mode `gac` needs a pilot image (--f)".into()))?;
            let f = load(f_path)?;
            let u0 = initial_level_set(cfg, &f)?;
            let solver = GacSolver::new(&f, cfg.pde_params())?;
            for (k, u) in solver.run(&u0, cfg.iterations, cfg.snapshot_every)? {
                write_level_set(out, &format!("gac_{k:04}"), &f, &u, &mut outputs)?;
            }
        }
        PdeMode::Selfsnakes => {
            if f_path.is_some() {
                log::warn!("self-snakes evolves u0 as its own pilot image; --f is ignored");
            }
            let spec = cfg.u0.as_deref().ok_or_else(|| UsageError("config key `u0` is required".into()))?;
            let path = match InitSpec::parse(spec)? {
                InitSpec::Image(p) => p,
                InitSpec::Shape(_) => return Err(UsageError("self-snakes needs a PGM image as `u0`".into()).into()),
            };
            let params = cfg.pde_params();
            params.validate()?;
            let mut u = load(Path::new(&path))?;
            for k in 1..=cfg.iterations {
                u = self_snakes_step(&u, &params)?;
                if k == cfg.iterations || (cfg.snapshot_every > 0 && k.is_multiple_of(cfg.snapshot_every)) {
                    let p = out.join(format!("selfsnakes_{k:04}.pgm"));
                    save_pgm(&u, &p)?;
                    outputs.push(p);
                }
            }
        }
    }
    Ok(Outcome { outputs, iterations: cfg.iterations, passed: true, report: Vec::new() })
}

fn cmd_verify(suite: &str, out: &Path) -> Result<Outcome> {
    let suite: Suite = suite.parse()?;
    let report = run_suite(suite)?;
    let path = out.join(format!("verify_{}.csv", suite.name()));
    let header: Vec<&str> = report.label_header.iter().chain(report.header.iter()).copied().collect();
    let rows = report.rows.iter().enumerate().map(|(i, row)| {
        let labels = report.labels.get(i).cloned().unwrap_or_default();
        labels.into_iter().chain(row.iter().map(|&v| fmt_real(v))).collect::<Vec<String>>()
    });
    write_csv(&path, &header, rows)?;
    let mut lines: Vec<String> = report.checks.iter().map(|c| c.to_string()).collect();
    let passed = report.passed();
    lines.push(format!("suite {suite}: {}", if passed { "PASS" } else { "FAIL" }));
    Ok(Outcome { outputs: vec![path], iterations: 0, passed, report: lines })
}

fn cmd_curves(cfg: &Config, path: PathBuf) -> Result<Outcome> {
    let s_grid = linspace(cfg.s_min, cfg.s_max, cfg.s_count);
    let rows = coefficient_curves(&cfg.amoeba_metric(), &cfg.alphas, &s_grid, cfg.scaled)?;
    write_csv(
        &path,
        &["s", "alpha", "J1", "J2", "J3", "method"],
        rows.iter().map(|r| {
            [fmt_real(r.s), fmt_real(r.alpha), fmt_real(r.j1), fmt_real(r.j2), fmt_real(r.j3), r.method.name().to_string()]
        }),
    )?;
    Ok(Outcome { outputs: vec![path], iterations: 0, passed: true, report: Vec::new() })
}
