//! Discrete mutual information over 3-symbol macro alphabets, with the
//! Panzeri-Treves small-sample correction, plus the Gaussian channel capacity
//! used by the analytic bound.

use crate::error::{Error, Result};

pub const LOG2_3: f64 = 1.584962500721156;

/// Joint counts over (label at t, label at t+dt), both in {-1, 0, +1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct JointHistogram {
    counts: [[u64; 3]; 3],
}

impl JointHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn record(&mut self, row: usize, col: usize) {
        self.counts[row][col] += 1;
    }

    #[inline]
    pub fn count(&self, row: usize, col: usize) -> u64 {
        self.counts[row][col]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Cell-wise sum. Associative and commutative, so partial histograms can
    /// be merged in any order without changing downstream estimates.
    pub fn merge(&self, other: &Self) -> Self {
        let mut out = *self;
        for r in 0..3 {
            for c in 0..3 {
                out.counts[r][c] += other.counts[r][c];
            }
        }
        out
    }

    pub fn row_totals(&self) -> [u64; 3] {
        let mut t = [0; 3];
        for r in 0..3 {
            t[r] = self.counts[r].iter().sum();
        }
        t
    }

    pub fn col_totals(&self) -> [u64; 3] {
        let mut t = [0; 3];
        for c in 0..3 {
            t[c] = self.counts.iter().map(|row| row[c]).sum();
        }
        t
    }
}

impl From<[[u64; 3]; 3]> for JointHistogram {
    fn from(counts: [[u64; 3]; 3]) -> Self {
        Self { counts }
    }
}

/// Plug-in estimate I = sum p_ij log2(p_ij / (p_i. p_.j)), with 0 log 0 = 0.
/// Empty histogram yields 0.
pub fn plugin_mi(h: &JointHistogram) -> f64 {
    let n = h.total();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    let rows = h.row_totals();
    let cols = h.col_totals();
    let mut mi = 0.0;
    for r in 0..3 {
        for c in 0..3 {
            let cnt = h.count(r, c);
            if cnt == 0 {
                continue;
            }
            let p = cnt as f64 / n;
            let pr = rows[r] as f64 / n;
            let pc = cols[c] as f64 / n;
            mi += p * (p / (pr * pc)).log2();
        }
    }
    mi
}

/// Plug-in estimate with its bias-corrected counterpart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiEstimate {
    pub plugin_bits: f64,
    pub corrected_bits: f64,
    pub samples: u64,
}

/// Panzeri-Treves bias correction.
///
/// bias = [ sum over occupied rows (R~_row - 1) - (R~ - 1) ] / (2 N ln 2)
/// where R~_row counts nonzero cells in the row and R~ counts nonzero column
/// marginals. The corrected value is clamped to [0, plugin]: the correction
/// is a first-order expansion and may overshoot on near-deterministic tables.
pub fn panzeri_treves_correct(h: &JointHistogram) -> MiEstimate {
    let plugin = plugin_mi(h);
    let n = h.total();
    if n == 0 {
        return MiEstimate { plugin_bits: 0.0, corrected_bits: 0.0, samples: 0 };
    }
    let mut row_terms = 0.0;
    for r in 0..3 {
        let occupied = h.counts[r].iter().filter(|&&c| c > 0).count();
        if occupied > 0 {
            row_terms += occupied as f64 - 1.0;
        }
    }
    let r_tilde = h.col_totals().iter().filter(|&&c| c > 0).count() as f64;
    let bias = (row_terms - (r_tilde - 1.0)) / (2.0 * n as f64 * std::f64::consts::LN_2);
    let corrected = (plugin - bias).clamp(0.0, plugin.max(0.0));
    MiEstimate { plugin_bits: plugin, corrected_bits: corrected, samples: n }
}

/// Shannon capacity of the scalar Gaussian channel, C = 1/2 log2(1 + snr).
pub fn gaussian_capacity(snr: f64) -> Result<f64> {
    if snr < 0.0 || snr.is_nan() {
        return Err(Error::NegativeSnr(snr));
    }
    Ok(0.5 * (1.0 + snr).log2())
}
