//! Amoeba median filtering (AMF) and amoeba active contours (AAC).

use field_core::{Error, Result, ScalarField};
use rayon::prelude::*;

use crate::amoeba::AmoebaBuilder;
use crate::metric::AmoebaMetric;
use crate::rank::{BiasSpec, ResolvedBias};

/// All amoebas of an image in compressed-row form.
pub struct AmoebaSet {
    offsets: Vec<usize>,
    members: Vec<u32>,
}

impl AmoebaSet {
    pub fn compute(f: &ScalarField, metric: &AmoebaMetric, rho: f64) -> Result<Self> {
        check_rho(rho)?;
        let w = f.width();
        let rows: Vec<(Vec<u32>, Vec<usize>)> = (0..f.height())
            .into_par_iter()
            .map_init(
                || (AmoebaBuilder::new(rho, f.spacing()), Vec::new()),
                |(builder, scratch), y| {
                    let mut members = Vec::new();
                    let mut counts = Vec::with_capacity(w);
                    for x in 0..w {
                        scratch.clear();
                        builder.build_into(f, metric, rho, f.index(x, y), scratch);
                        counts.push(scratch.len());
                        members.extend(scratch.iter().map(|&(i, _)| i as u32));
                    }
                    (members, counts)
                },
            )
            .collect();
        let mut offsets = Vec::with_capacity(f.len() + 1);
        offsets.push(0);
        let mut members = Vec::with_capacity(rows.iter().map(|r| r.0.len()).sum());
        for (m, counts) in rows {
            for c in counts {
                offsets.push(offsets.last().unwrap() + c);
            }
            members.extend(m);
        }
        Ok(Self { offsets, members })
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Member pixel indices of the amoeba centred at `pixel`.
    pub fn members(&self, pixel: usize) -> &[u32] {
        &self.members[self.offsets[pixel]..self.offsets[pixel + 1]]
    }

    /// Replaces every pixel of `u` by the biased rank of `u` over its amoeba.
    pub fn filter(&self, u: &ScalarField, bias: &ResolvedBias) -> Result<ScalarField> {
        if u.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} amoebas for a field of {} pixels",
                self.len(),
                u.len()
            )));
        }
        let vals = u.values();
        let out: Vec<f64> = (0..u.len())
            .into_par_iter()
            .map_init(Vec::new, |buf: &mut Vec<f64>, i| {
                buf.clear();
                buf.extend(self.members(i).iter().map(|&j| vals[j as usize]));
                bias.select(buf)
            })
            .collect();
        u.with_values(out)
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("rho", format!("{rho} is not positive")))
    }
}

/// One AAC step: amoebas from the pilot image `f`, rank selection on `u`.
pub fn aac_step(
    f: &ScalarField,
    u: &ScalarField,
    metric: &AmoebaMetric,
    rho: f64,
    bias: &BiasSpec,
) -> Result<ScalarField> {
    f.ensure_same_shape(u, "aac_step")?;
    let resolved = bias.resolve(rho, f.spacing())?;
    AmoebaSet::compute(f, metric, rho)?.filter(u, &resolved)
}

/// One AMF step: the amoeba median of `f` with amoebas from `f` itself.
pub fn amf_step(f: &ScalarField, metric: &AmoebaMetric, rho: f64) -> Result<ScalarField> {
    AmoebaSet::compute(f, metric, rho)?.filter(f, &ResolvedBias::None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Amoebas are recomputed from the current iterate each step.
    Amf,
    /// Amoebas come from the fixed pilot image and are computed once.
    Aac,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriverConfig {
    pub mode: Mode,
    pub iterations: usize,
    pub metric: AmoebaMetric,
    pub rho: f64,
    pub bias: BiasSpec,
    /// Keep every n-th iterate; 0 keeps only the final one.
    pub snapshot_every: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub iteration: usize,
    pub field: ScalarField,
}

fn wants_snapshot(cfg: &DriverConfig, k: usize) -> bool {
    k == cfg.iterations || (cfg.snapshot_every > 0 && k.is_multiple_of(cfg.snapshot_every))
}

/// Iterates AMF on `f`, or AAC on `u0` steered by `f`, returning the kept iterates.
pub fn run_iterations(cfg: &DriverConfig, f: &ScalarField, u0: Option<&ScalarField>) -> Result<Vec<Snapshot>> {
    if cfg.iterations == 0 {
        return Err(Error::invalid("iterations", "must be at least 1"));
    }
    check_rho(cfg.rho)?;
    let bias = cfg.bias.resolve(cfg.rho, f.spacing())?;
    let mut snaps = Vec::new();
    match cfg.mode {
        Mode::Amf => {
            if bias != ResolvedBias::None {
                log::warn!("AMF ignores the configured bias");
            }
            let mut cur = f.clone();
            for k in 1..=cfg.iterations {
                cur = amf_step(&cur, &cfg.metric, cfg.rho)?;
                if wants_snapshot(cfg, k) {
                    snaps.push(Snapshot { iteration: k, field: cur.clone() });
                }
            }
        }
        Mode::Aac => {
            let u0 = u0.ok_or_else(|| Error::invalid("u0", "AAC needs an initial level-set function"))?;
            f.ensure_same_shape(u0, "run_iterations")?;
            let set = AmoebaSet::compute(f, &cfg.metric, cfg.rho)?;
            let mut cur = u0.clone();
            for k in 1..=cfg.iterations {
                cur = set.filter(&cur, &bias)?;
                if wants_snapshot(cfg, k) {
                    snaps.push(Snapshot { iteration: k, field: cur.clone() });
                }
                log::debug!("AAC iteration {k} done");
            }
        }
    }
    Ok(snaps)
}
