//! Maximum-entropy interventions: clamp each block's macro variable to a
//! randomly drawn target, with the microstate otherwise as unconstrained as
//! the target allows.

use crate::abm::PheromoneField;
use crate::error::{Error, Result};
use crate::ising::SpinLattice;
use crate::lattice::BlockPartition;
use crate::rng::Stream;
use rand::Rng;

/// The three-level target alphabet an intervention draws from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterventionTarget {
    levels: [f64; 3],
}

impl InterventionTarget {
    /// Target block magnetizations; each level must lie in [-1, 1].
    pub fn magnetizations(levels: [f64; 3]) -> Result<Self> {
        if levels.iter().any(|m| !(-1.0..=1.0).contains(m)) {
            return Err(Error::Config(format!("magnetization outside [-1, 1]: {levels:?}")));
        }
        Self::ordered(levels)
    }

    /// Target block field densities; each level must be non-negative.
    pub fn densities(levels: [f64; 3]) -> Result<Self> {
        if levels.iter().any(|d| *d < 0.0 || !d.is_finite()) {
            return Err(Error::Config(format!("density must be finite and >= 0: {levels:?}")));
        }
        Self::ordered(levels)
    }

    fn ordered(levels: [f64; 3]) -> Result<Self> {
        if !(levels[0] < levels[1] && levels[1] < levels[2]) {
            return Err(Error::Config(format!("target levels must be strictly increasing: {levels:?}")));
        }
        Ok(Self { levels })
    }

    /// Spin targets used throughout: one per macro label.
    pub fn default_magnetizations() -> Self {
        Self { levels: [-0.8, 0.0, 0.8] }
    }

    /// Field targets used throughout: one per macro label.
    pub fn default_densities() -> Self {
        Self { levels: [0.0, 5.0, 10.0] }
    }

    pub fn levels(&self) -> [f64; 3] {
        self.levels
    }
}

/// One independent uniform draw from the target alphabet per block.
pub fn draw_block_targets(
    target: &InterventionTarget,
    num_blocks: usize,
    rng: &mut Stream,
) -> Vec<f64> {
    (0..num_blocks).map(|_| target.levels[rng.gen_range(0..3)]).collect()
}

/// Maximum-entropy spin configuration with the given per-block mean
/// magnetizations: sites are independent, p(up) = (1 + m)/2, drawn in
/// row-major site order.
pub fn maxent_ising(
    block_targets: &[f64],
    partition: &BlockPartition,
    rng: &mut Stream,
) -> SpinLattice {
    assert_eq!(block_targets.len(), partition.num_blocks());
    assert!(block_targets.iter().all(|m| (-1.0..=1.0).contains(m)));
    let shape = partition.shape();
    let n = shape.size();
    let mut spins = vec![0i8; shape.num_sites()];
    for row in 0..n {
        for col in 0..n {
            let p_up = (1.0 + block_targets[partition.block_of(row, col)]) / 2.0;
            let u: f64 = rng.gen();
            spins[shape.index(row, col)] = if u < p_up { 1 } else { -1 };
        }
    }
    SpinLattice::from_spins(shape, spins)
}

/// Field clamped to the target density, uniform within each block. With only
/// the block mean constrained, the flat field is the least-structured choice.
pub fn maxent_abm(block_targets: &[f64], partition: &BlockPartition) -> PheromoneField {
    assert_eq!(block_targets.len(), partition.num_blocks());
    let shape = partition.shape();
    let n = shape.size();
    let mut values = vec![0.0; shape.num_sites()];
    for row in 0..n {
        for col in 0..n {
            values[shape.index(row, col)] = block_targets[partition.block_of(row, col)];
        }
    }
    PheromoneField::from_values(shape, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coarse::block_means;
    use crate::lattice::GridShape;
    use crate::rng::SeedTree;

    fn partition(size: usize, block: usize) -> BlockPartition {
        BlockPartition::new(GridShape::new(size).unwrap(), block).unwrap()
    }

    #[test]
    fn target_validation() {
        assert!(InterventionTarget::magnetizations([-0.8, 0.0, 0.8]).is_ok());
        assert!(InterventionTarget::magnetizations([-1.2, 0.0, 0.8]).is_err());
        assert!(InterventionTarget::magnetizations([0.8, 0.0, -0.8]).is_err());
        assert!(InterventionTarget::magnetizations([0.0, 0.0, 0.8]).is_err());
        assert!(InterventionTarget::densities([0.0, 5.0, 10.0]).is_ok());
        assert!(InterventionTarget::densities([-1.0, 5.0, 10.0]).is_err());
        assert!(InterventionTarget::densities([0.0, f64::INFINITY, 10.0]).is_err());
    }

    #[test]
    fn block_target_draws_cover_the_alphabet_uniformly() {
        let t = InterventionTarget::default_magnetizations();
        let mut rng = SeedTree::new(31).child("targets", 0).stream();
        let draws = draw_block_targets(&t, 9000, &mut rng);
        let mut counts = [0usize; 3];
        for d in &draws {
            let k = t.levels().iter().position(|l| l == d).expect("draw outside alphabet");
            counts[k] += 1;
        }
        for c in counts {
            let frac = c as f64 / 9000.0;
            assert!((frac - 1.0 / 3.0).abs() < 0.02, "level fraction {frac}");
        }
    }

    #[test]
    fn extreme_magnetization_pins_every_spin() {
        let p = partition(16, 4);
        let mut rng = SeedTree::new(32).child("pinned", 0).stream();
        let up = maxent_ising(&vec![1.0; p.num_blocks()], &p, &mut rng);
        assert_eq!(up.magnetization(), 1.0);
        let down = maxent_ising(&vec![-1.0; p.num_blocks()], &p, &mut rng);
        assert_eq!(down.magnetization(), -1.0);
    }

    #[test]
    fn block_means_track_their_targets() {
        let p = partition(64, 32);
        let targets = vec![-0.8, 0.0, 0.8, 0.0];
        let mut rng = SeedTree::new(33).child("block-means", 0).stream();
        let lattice = maxent_ising(&targets, &p, &mut rng);
        let means = block_means(&lattice.site_values(), &p);
        for (m, t) in means.iter().zip(&targets) {
            // sd of a 1024-site mean is at most 0.6/32; 0.08 is > 4 sigma.
            assert!((m - t).abs() < 0.08, "block mean {m} for target {t}");
        }
    }

    #[test]
    fn sites_are_uncorrelated_under_the_intervention() {
        // Nearest-neighbor spin products must average zero at m = 0; any
        // leakage of correlation here would smuggle dynamics into the
        // intervention itself.
        let p = partition(16, 16);
        let mut rng = SeedTree::new(34).child("independence", 0).stream();
        let mut sum = 0.0;
        let mut pairs = 0usize;
        for _ in 0..200 {
            let lat = maxent_ising(&[0.0], &p, &mut rng);
            let n = 16;
            for row in 0..n {
                for col in 0..n {
                    let s = lat.spin(row, col) as f64;
                    sum += s * lat.spin((row + 1) % n, col) as f64;
                    sum += s * lat.spin(row, (col + 1) % n) as f64;
                    pairs += 2;
                }
            }
        }
        let corr = sum / pairs as f64;
        assert!(corr.abs() < 0.012, "neighbor correlation {corr}");
    }

    #[test]
    fn field_intervention_is_exact_and_flat() {
        let p = partition(8, 4);
        let targets = vec![0.0, 5.0, 10.0, 5.0];
        let field = maxent_abm(&targets, &p);
        assert_eq!(block_means(field.values(), &p), targets);
        for (block, &t) in targets.iter().enumerate() {
            for site in p.sites_of(block) {
                assert_eq!(field.values()[site], t);
            }
        }
    }
}
