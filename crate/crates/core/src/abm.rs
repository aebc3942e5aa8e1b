//! Pheromone-following agents on a periodic grid. One step: every agent
//! samples a move toward one of its four neighbors by a softmax over the
//! pre-step field, deposits at its new cell, then the whole field evaporates
//! and diffuses.

use crate::lattice::GridShape;
use crate::rng::Stream;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbmParams {
    /// Softmax sharpness for neighbor choice.
    #[serde(default = "defaults::kappa")]
    pub kappa: f64,
    /// Pheromone dropped by each agent per step.
    #[serde(default = "defaults::deposit")]
    pub deposit: f64,
    /// Multiplicative field retention per step (1 = none lost).
    #[serde(default = "defaults::evaporation")]
    pub evaporation: f64,
    /// Gaussian diffusion width per step, in lattice units.
    #[serde(default = "defaults::diffusion_sigma")]
    pub diffusion_sigma: f64,
}

mod defaults {
    pub fn kappa() -> f64 {
        2.0
    }
    pub fn deposit() -> f64 {
        0.5
    }
    pub fn evaporation() -> f64 {
        0.95
    }
    pub fn diffusion_sigma() -> f64 {
        1.0
    }
}

impl Default for AbmParams {
    fn default() -> Self {
        Self {
            kappa: defaults::kappa(),
            deposit: defaults::deposit(),
            evaporation: defaults::evaporation(),
            diffusion_sigma: defaults::diffusion_sigma(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneField {
    shape: GridShape,
    values: Vec<f64>,
}

impl PheromoneField {
    pub fn uniform(shape: GridShape, value: f64) -> Self {
        assert!(value >= 0.0);
        Self { shape, values: vec![value; shape.num_sites()] }
    }

    pub fn from_values(shape: GridShape, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), shape.num_sites());
        Self { shape, values }
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[self.shape.index(row, col)]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.values[self.shape.index(row, col)] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }
}

/// Agent positions as (row, col) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentSet {
    positions: Vec<(usize, usize)>,
}

impl AgentSet {
    pub fn random(shape: GridShape, count: usize, rng: &mut Stream) -> Self {
        let n = shape.size();
        let positions =
            (0..count).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
        Self { positions }
    }

    pub fn positions(&self) -> &[(usize, usize)] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Move distribution over the four neighbors of (row, col), in the same
/// order as [`GridShape::neighbors`]: softmax of kappa times the neighbor
/// field values, with max subtraction so large fields cannot overflow.
pub fn move_probabilities(field: &PheromoneField, row: usize, col: usize, kappa: f64) -> [f64; 4] {
    let nbrs = field.shape().neighbors(row, col);
    let mut logits = [0.0; 4];
    for (k, &(r, c)) in nbrs.iter().enumerate() {
        logits[k] = kappa * field.get(r, c);
    }
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut probs = [0.0; 4];
    let mut sum = 0.0;
    for k in 0..4 {
        probs[k] = (logits[k] - max).exp();
        sum += probs[k];
    }
    for p in &mut probs {
        *p /= sum;
    }
    probs
}

/// Normalized 1D Gaussian kernel, truncated at radius ceil(3 sigma).
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    assert!(sigma > 0.0);
    let r = (3.0 * sigma).ceil() as i64;
    let mut w: Vec<f64> =
        (-r..=r).map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let sum: f64 = w.iter().sum();
    for v in &mut w {
        *v /= sum;
    }
    w
}

/// Periodic separable convolution with a symmetric 1D kernel, rows then
/// columns. The kernel is normalized, so total mass is preserved.
pub fn diffuse(field: &mut PheromoneField, kernel: &[f64]) {
    let n = field.shape.size();
    let r = (kernel.len() / 2) as i64;
    let mut pass = vec![0.0; n * n];
    for row in 0..n {
        for col in 0..n {
            let mut acc = 0.0;
            for (w, k) in kernel.iter().zip(-r..=r) {
                let src = (row as i64 - k).rem_euclid(n as i64) as usize;
                acc += w * field.values[src * n + col];
            }
            pass[row * n + col] = acc;
        }
    }
    for row in 0..n {
        for col in 0..n {
            let mut acc = 0.0;
            for (w, k) in kernel.iter().zip(-r..=r) {
                let src = (col as i64 - k).rem_euclid(n as i64) as usize;
                acc += w * pass[row * n + src];
            }
            field.values[row * n + col] = acc;
        }
    }
}

/// Advances the system by one step. All agents sample their moves against a
/// snapshot of the pre-step field (synchronous update); deposits land after
/// every move is decided, then evaporation, then diffusion.
pub fn abm_step(
    field: &mut PheromoneField,
    agents: &mut AgentSet,
    params: &AbmParams,
    kernel: &[f64],
    rng: &mut Stream,
) {
    let moves: Vec<(usize, usize)> = agents
        .positions
        .iter()
        .map(|&(row, col)| {
            let probs = move_probabilities(field, row, col, params.kappa);
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let nbrs = field.shape().neighbors(row, col);
            for k in 0..3 {
                acc += probs[k];
                if u < acc {
                    return nbrs[k];
                }
            }
            nbrs[3]
        })
        .collect();
    for (agent, &(row, col)) in moves.iter().enumerate() {
        agents.positions[agent] = (row, col);
        let i = field.shape.index(row, col);
        field.values[i] += params.deposit;
    }
    field.scale(params.evaporation);
    diffuse(field, kernel);
}
