//! Coarse-graining: block means over a partitioned grid and their reduction
//! to the 3-symbol macro alphabet.

use crate::error::{Error, Result};
use crate::lattice::BlockPartition;

/// Macro label, ordered Minus < Zero < Plus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MacroLabel {
    Minus,
    Zero,
    Plus,
}

impl MacroLabel {
    /// Histogram index in 0..3.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            MacroLabel::Minus => 0,
            MacroLabel::Zero => 1,
            MacroLabel::Plus => 2,
        }
    }

    pub fn from_index(i: usize) -> Self {
        match i {
            0 => MacroLabel::Minus,
            1 => MacroLabel::Zero,
            2 => MacroLabel::Plus,
            _ => panic!("label index out of range: {i}"),
        }
    }

    /// Signed representative used when a label is fed back as a number.
    pub fn value(self) -> f64 {
        match self {
            MacroLabel::Minus => -1.0,
            MacroLabel::Zero => 0.0,
            MacroLabel::Plus => 1.0,
        }
    }
}

pub type MacroLabelField = Vec<MacroLabel>;

/// Per-block means of a site-indexed scalar field, ordered by block index.
/// Summation per block is exact for integer-valued sites (spins) well past
/// any lattice size we run.
pub fn block_means(values: &[f64], partition: &BlockPartition) -> Vec<f64> {
    let shape = partition.shape();
    assert_eq!(values.len(), shape.num_sites(), "field/partition size mismatch");
    let mut sums = vec![0.0; partition.num_blocks()];
    for row in 0..shape.size() {
        for col in 0..shape.size() {
            sums[partition.block_of(row, col)] += values[shape.index(row, col)];
        }
    }
    let norm = partition.sites_per_block() as f64;
    for s in &mut sums {
        *s /= norm;
    }
    sums
}

/// Maps block means to macro labels.
///
/// `FixedThresholds` suits fields with a canonical symmetric range (spin
/// magnetization): strict outer inequalities, so a mean sitting exactly on a
/// threshold is Zero. `GlobalTertiles` suits fields with no canonical scale
/// (pheromone mass): cut points are fitted per trial on the pooled pre- and
/// post-step block means, making labels invariant under increasing affine
/// rescalings of the field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Discretizer {
    FixedThresholds { lo: f64, hi: f64 },
    GlobalTertiles { cuts: Option<(f64, f64)> },
}

impl Discretizer {
    /// Thresholds at -t and +t.
    pub fn symmetric(t: f64) -> Self {
        assert!(t > 0.0);
        Discretizer::FixedThresholds { lo: -t, hi: t }
    }

    /// Unfitted tertile discretizer; call [`Discretizer::fit`] before labeling.
    pub fn tertiles() -> Self {
        Discretizer::GlobalTertiles { cuts: None }
    }

    /// Fits tertile cut points on a pooled sample. No-op for fixed thresholds.
    pub fn fit(&mut self, sample: &[f64]) -> Result<()> {
        if let Discretizer::GlobalTertiles { cuts } = self {
            let (q1, q2) = fit_tertiles(sample)?;
            *cuts = Some((q1, q2));
        }
        Ok(())
    }

    pub fn label(&self, x: f64) -> Result<MacroLabel> {
        match self {
            Discretizer::FixedThresholds { lo, hi } => Ok(if x < *lo {
                MacroLabel::Minus
            } else if x > *hi {
                MacroLabel::Plus
            } else {
                MacroLabel::Zero
            }),
            Discretizer::GlobalTertiles { cuts } => {
                let (q1, q2) = cuts.ok_or(Error::UnfittedDiscretizer)?;
                // Same strict-outer convention as fixed thresholds: a value
                // sitting exactly on a cut point is Zero.
                Ok(if x < q1 {
                    MacroLabel::Minus
                } else if x > q2 {
                    MacroLabel::Plus
                } else {
                    MacroLabel::Zero
                })
            }
        }
    }

    pub fn label_all(&self, xs: &[f64]) -> Result<MacroLabelField> {
        xs.iter().map(|&x| self.label(x)).collect()
    }
}

/// Tertile cut points by linear interpolation of order statistics
/// (the same convention as R type 7): q(p) sits at rank (n-1)p.
pub fn fit_tertiles(sample: &[f64]) -> Result<(f64, f64)> {
    if sample.len() < 2 {
        return Err(Error::DegenerateSample);
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("NaN in tertile sample"));
    let q = |p: f64| -> f64 {
        let h = (sorted.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let frac = h - lo as f64;
        if lo + 1 < sorted.len() {
            sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
        } else {
            sorted[lo]
        }
    };
    let q1 = q(1.0 / 3.0);
    let q2 = q(2.0 / 3.0);
    if q1 == q2 {
        return Err(Error::DegenerateSample);
    }
    Ok((q1, q2))
}
