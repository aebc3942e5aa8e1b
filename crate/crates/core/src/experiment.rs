//! Experiment orchestration: interventional trials, replicates, and the
//! effective-information curve over block scales.
//!
//! One trial = one intervention: every block is clamped to an independently
//! drawn target, the microstate is sampled at maximum entropy given those
//! targets, the dynamics advance dt steps, and the (target label, post-step
//! label) pair of every block lands in one 3x3 histogram. A replicate
//! averages the corrected mutual information of `trials_per_scale` such
//! trials; the curve reports mean and s.e.m. over replicates.

use crate::abm::{abm_step, gaussian_kernel, AbmParams, AgentSet};
use crate::coarse::{block_means, fit_tertiles, Discretizer};
use crate::error::{Error, Result};
use crate::infotheory::{panzeri_treves_correct, JointHistogram};
use crate::intervention::{draw_block_targets, maxent_abm, maxent_ising, InterventionTarget};
use crate::ising::{metropolis_sweep, IsingParams};
use crate::lattice::{BlockPartition, GridShape};
use crate::rng::{SeedTree, Stream};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Macro-variable threshold for spin block means.
pub const SPIN_THRESHOLD: f64 = 0.33;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemConfig {
    Ising {
        temperature: f64,
        #[serde(default = "default_coupling")]
        coupling: f64,
        #[serde(default = "default_spin_targets")]
        targets: [f64; 3],
    },
    Abm {
        agents: usize,
        #[serde(flatten, default)]
        params: AbmParams,
        #[serde(default = "default_field_targets")]
        targets: [f64; 3],
    },
}

fn default_coupling() -> f64 {
    1.0
}

fn default_spin_targets() -> [f64; 3] {
    InterventionTarget::default_magnetizations().levels()
}

fn default_field_targets() -> [f64; 3] {
    InterventionTarget::default_densities().levels()
}

impl SystemConfig {
    pub fn name(&self) -> &'static str {
        match self {
            SystemConfig::Ising { .. } => "ising",
            SystemConfig::Abm { .. } => "abm",
        }
    }

    fn target_set(&self) -> Result<InterventionTarget> {
        match *self {
            SystemConfig::Ising { targets, .. } => InterventionTarget::magnetizations(targets),
            SystemConfig::Abm { targets, .. } => InterventionTarget::densities(targets),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub system: SystemConfig,
    #[serde(rename = "L")]
    pub grid_size: usize,
    pub scales: Vec<usize>,
    pub trials_per_scale: usize,
    pub replicates: usize,
    #[serde(default = "default_dt")]
    pub dt_steps: usize,
    pub master_seed: u64,
}

fn default_dt() -> usize {
    1
}

impl ExperimentConfig {
    /// Near-critical spin run: 64 grid, 60 trials x 10 replicates per scale.
    pub fn ising_reference(master_seed: u64) -> Self {
        Self {
            system: SystemConfig::Ising {
                temperature: 2.2,
                coupling: 1.0,
                targets: default_spin_targets(),
            },
            grid_size: 64,
            scales: vec![1, 2, 4, 8, 16, 32],
            trials_per_scale: 60,
            replicates: 10,
            dt_steps: 1,
            master_seed,
        }
    }

    /// Pheromone-agent run: 400 agents, 80 trials x 10 replicates per scale.
    pub fn abm_reference(master_seed: u64) -> Self {
        Self {
            system: SystemConfig::Abm {
                agents: 400,
                params: AbmParams::default(),
                targets: default_field_targets(),
            },
            grid_size: 64,
            scales: vec![1, 2, 4, 8, 16, 32],
            trials_per_scale: 80,
            replicates: 10,
            dt_steps: 1,
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let shape = GridShape::new(self.grid_size)?;
        if self.scales.is_empty() {
            return Err(Error::Config("at least one scale is required".into()));
        }
        for &b in &self.scales {
            BlockPartition::new(shape, b)?;
        }
        if self.trials_per_scale == 0 {
            return Err(Error::Config("trials_per_scale must be >= 1".into()));
        }
        if self.replicates < 2 {
            return Err(Error::Config("replicates must be >= 2 for a standard error".into()));
        }
        if self.dt_steps == 0 {
            return Err(Error::Config("dt_steps must be >= 1".into()));
        }
        self.system.target_set()?;
        match self.system {
            SystemConfig::Ising { temperature, coupling, .. } => {
                if !(temperature > 0.0) || !temperature.is_finite() {
                    return Err(Error::Config(format!("temperature must be positive, got {temperature}")));
                }
                if !coupling.is_finite() {
                    return Err(Error::Config("coupling must be finite".into()));
                }
            }
            SystemConfig::Abm { agents, params, .. } => {
                if agents == 0 {
                    return Err(Error::Config("agents must be >= 1".into()));
                }
                if params.kappa < 0.0 || !params.kappa.is_finite() {
                    return Err(Error::Config("kappa must be >= 0".into()));
                }
                if params.deposit < 0.0 || !params.deposit.is_finite() {
                    return Err(Error::Config("deposit must be >= 0".into()));
                }
                if !(params.evaporation > 0.0 && params.evaporation <= 1.0) {
                    return Err(Error::Config("evaporation must be in (0, 1]".into()));
                }
                if !(params.diffusion_sigma > 0.0) || !params.diffusion_sigma.is_finite() {
                    return Err(Error::Config("diffusion_sigma must be positive".into()));
                }
            }
        }
        Ok(())
    }

    /// Stable hex digest of the full configuration, for provenance lines in
    /// emitted files.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalePoint {
    pub block_size: usize,
    pub ei_mean_bits: f64,
    pub ei_sem_bits: f64,
    pub replicates: usize,
    /// Trials dropped because the tertile fit had no spread, summed over
    /// replicates. Nonzero values flag an under-resolved scale.
    pub degenerate_trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EiCurve {
    pub system: String,
    pub points: Vec<ScalePoint>,
    pub config_fingerprint: String,
    pub master_seed: u64,
}

impl EiCurve {
    pub fn peak(&self) -> Option<&ScalePoint> {
        self.points
            .iter()
            .max_by(|a, b| a.ei_mean_bits.partial_cmp(&b.ei_mean_bits).expect("finite EI"))
    }
}

/// Runs one intervention trial at the given scale and returns its (target
/// label, post label) histogram: one count per block.
pub fn run_trial(config: &ExperimentConfig, block_size: usize, stream: &mut Stream) -> Result<JointHistogram> {
    let shape = GridShape::new(config.grid_size)?;
    let partition = BlockPartition::new(shape, block_size)?;
    let target_set = config.system.target_set()?;
    let targets = draw_block_targets(&target_set, partition.num_blocks(), stream);

    let (pre_discretizer, post_means) = match config.system {
        SystemConfig::Ising { temperature, coupling, .. } => {
            let mut lattice = maxent_ising(&targets, &partition, stream);
            let params = IsingParams { coupling, temperature };
            for _ in 0..config.dt_steps {
                metropolis_sweep(&mut lattice, &params, stream);
            }
            (Discretizer::symmetric(SPIN_THRESHOLD), block_means(&lattice.site_values(), &partition))
        }
        SystemConfig::Abm { agents, params, .. } => {
            let mut field = maxent_abm(&targets, &partition);
            let mut swarm = AgentSet::random(shape, agents, stream);
            let kernel = gaussian_kernel(params.diffusion_sigma);
            for _ in 0..config.dt_steps {
                abm_step(&mut field, &mut swarm, &params, &kernel, stream);
            }
            let post = block_means(field.values(), &partition);
            // Cut points have no canonical scale here: fit them on this
            // trial's pooled pre- and post-step block means. The pre means
            // equal the imposed targets exactly.
            let mut pooled = targets.clone();
            pooled.extend_from_slice(&post);
            let cuts = fit_tertiles(&pooled)?;
            (Discretizer::GlobalTertiles { cuts: Some(cuts) }, post)
        }
    };

    let mut hist = JointHistogram::new();
    for (t, m) in targets.iter().zip(&post_means) {
        let row = pre_discretizer.label(*t)?;
        let col = pre_discretizer.label(*m)?;
        hist.record(row.index(), col.index());
    }
    Ok(hist)
}

struct ReplicateOutcome {
    mean_bits: f64,
    degenerate_trials: usize,
}

fn run_replicate(config: &ExperimentConfig, block_size: usize, replicate: usize) -> Result<ReplicateOutcome> {
    let node = SeedTree::new(config.master_seed)
        .child("scale", block_size as u64)
        .child("replicate", replicate as u64);
    let mut values = Vec::with_capacity(config.trials_per_scale);
    let mut degenerate = 0;
    for trial in 0..config.trials_per_scale {
        let mut stream = node.child("trial", trial as u64).stream();
        match run_trial(config, block_size, &mut stream) {
            Ok(hist) => values.push(panzeri_treves_correct(&hist).corrected_bits),
            Err(Error::DegenerateSample) => degenerate += 1,
            Err(e) => return Err(e),
        }
    }
    let mean_bits = if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    };
    Ok(ReplicateOutcome { mean_bits, degenerate_trials: degenerate })
}

/// Full EI-vs-scale curve. (scale, replicate) pairs are independent work
/// units seeded by their own tree paths, so the result is identical under
/// any parallel schedule.
pub fn run_curve(config: &ExperimentConfig) -> Result<EiCurve> {
    config.validate()?;
    let units: Vec<(usize, usize)> = config
        .scales
        .iter()
        .flat_map(|&b| (0..config.replicates).map(move |r| (b, r)))
        .collect();
    let outcomes: Vec<ReplicateOutcome> = units
        .par_iter()
        .map(|&(b, r)| run_replicate(config, b, r))
        .collect::<Result<_>>()?;

    let r = config.replicates;
    let points = config
        .scales
        .iter()
        .enumerate()
        .map(|(si, &b)| {
            let reps = &outcomes[si * r..(si + 1) * r];
            let mean = reps.iter().map(|o| o.mean_bits).sum::<f64>() / r as f64;
            let var = reps.iter().map(|o| (o.mean_bits - mean).powi(2)).sum::<f64>() / (r - 1) as f64;
            ScalePoint {
                block_size: b,
                ei_mean_bits: mean,
                ei_sem_bits: (var / r as f64).sqrt(),
                replicates: r,
                degenerate_trials: reps.iter().map(|o| o.degenerate_trials).sum(),
            }
        })
        .collect();
    Ok(EiCurve {
        system: config.system.name().to_string(),
        points,
        config_fingerprint: config.fingerprint(),
        master_seed: config.master_seed,
    })
}

/// Runs each configuration to its own curve, isolating per-config failures.
pub fn robustness_sweep(configs: &[ExperimentConfig]) -> Vec<Result<EiCurve>> {
    configs.iter().map(run_curve).collect()
}
