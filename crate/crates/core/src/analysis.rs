//! Curve-shape analysis: raw peak detection and monotone-vs-unimodal model
//! selection with weighted isotonic fits, AIC, and a parametric bootstrap
//! for the peak location.

use crate::error::{Error, Result};
use crate::experiment::EiCurve;
use crate::rng::Stream;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakFinding {
    pub scale: usize,
    pub ei_mean_bits: f64,
    /// True when the argmax sits at the smallest or largest scale: the curve
    /// never turned over inside the observed range.
    pub at_boundary: bool,
}

/// Argmax of the mean EI over scales; ties go to the smaller block size.
pub fn detect_peak(curve: &EiCurve) -> Result<PeakFinding> {
    if curve.points.len() < 3 {
        return Err(Error::InsufficientScales { need: 3, got: curve.points.len() });
    }
    let mut order: Vec<usize> = (0..curve.points.len()).collect();
    order.sort_by_key(|&i| curve.points[i].block_size);
    let mut best = order[0];
    for &i in &order[1..] {
        if curve.points[i].ei_mean_bits > curve.points[best].ei_mean_bits {
            best = i;
        }
    }
    let scale = curve.points[best].block_size;
    Ok(PeakFinding {
        scale,
        ei_mean_bits: curve.points[best].ei_mean_bits,
        at_boundary: scale == curve.points[order[0]].block_size
            || scale == curve.points[*order.last().unwrap()].block_size,
    })
}

/// Weighted pool-adjacent-violators fit. Returns the fitted values, ordered
/// as the input.
pub fn isotonic_fit(y: &[f64], weights: &[f64], increasing: bool) -> Vec<f64> {
    assert_eq!(y.len(), weights.len());
    let (y_ord, w_ord): (Vec<f64>, Vec<f64>) = if increasing {
        (y.to_vec(), weights.to_vec())
    } else {
        (y.iter().rev().cloned().collect(), weights.iter().rev().cloned().collect())
    };
    let mut vals: Vec<f64> = Vec::new();
    let mut wts: Vec<f64> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    for (&yi, &wi) in y_ord.iter().zip(&w_ord) {
        vals.push(yi);
        wts.push(wi);
        sizes.push(1);
        while vals.len() > 1 && vals[vals.len() - 2] > vals[vals.len() - 1] {
            let (va, vb) = (vals.pop().unwrap(), vals.pop().unwrap());
            let (wa, wb) = (wts.pop().unwrap(), wts.pop().unwrap());
            let (sa, sb) = (sizes.pop().unwrap(), sizes.pop().unwrap());
            vals.push((va * wa + vb * wb) / (wa + wb));
            wts.push(wa + wb);
            sizes.push(sa + sb);
        }
    }
    let mut fit: Vec<f64> =
        vals.iter().zip(&sizes).flat_map(|(&v, &s)| std::iter::repeat(v).take(s)).collect();
    if !increasing {
        fit.reverse();
    }
    fit
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitModel {
    MonotoneIncreasing,
    MonotoneDecreasing,
    Unimodal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateFit {
    pub model: FitModel,
    pub chi2: f64,
    /// Distinct fitted levels; the parameter count in the AIC penalty.
    pub levels: usize,
    pub aic: f64,
    pub fitted: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSelectionReport {
    pub best_model: FitModel,
    pub candidates: Vec<CandidateFit>,
    /// Present exactly when the winner is Unimodal.
    pub peak_scale: Option<usize>,
    /// Central 95% bootstrap interval for the peak location, in scale units.
    pub peak_ci: Option<(usize, usize)>,
    /// True when the two best AICs sit closer than 2: the data do not
    /// separate the shapes.
    pub inconclusive: bool,
}

fn chi2(y: &[f64], fit: &[f64], w: &[f64]) -> f64 {
    y.iter().zip(fit).zip(w).map(|((&yi, &fi), &wi)| wi * (yi - fi) * (yi - fi)).sum()
}

fn distinct_levels(fit: &[f64]) -> usize {
    fit.iter().map(|v| (v * 1e12).round() as i64).collect::<BTreeSet<_>>().len()
}

fn candidate(model: FitModel, fitted: Vec<f64>, y: &[f64], w: &[f64]) -> CandidateFit {
    let chi2 = chi2(y, &fitted, w);
    let levels = distinct_levels(&fitted);
    CandidateFit { model, chi2, levels, aic: chi2 + 2.0 * levels as f64, fitted }
}

/// Best rise-then-fall fit over interior peak positions: an increasing fit
/// up to the peak joined to a decreasing fit after it, the peak taking the
/// larger of the two arm values. Returns the fit and its peak index.
fn umbrella_fit(y: &[f64], w: &[f64]) -> (Vec<f64>, usize) {
    let n = y.len();
    let mut best: Option<(f64, Vec<f64>, usize)> = None;
    for j in 1..n - 1 {
        let rise = isotonic_fit(&y[..=j], &w[..=j], true);
        let fall = isotonic_fit(&y[j..], &w[j..], false);
        let mut fit = Vec::with_capacity(n);
        fit.extend_from_slice(&rise[..j]);
        fit.push(rise[j].max(fall[0]));
        fit.extend_from_slice(&fall[1..]);
        let score = chi2(y, &fit, w) + 2.0 * distinct_levels(&fit) as f64;
        if best.as_ref().map_or(true, |(s, _, _)| score < *s) {
            best = Some((score, fit, j));
        }
    }
    let (_, fit, j) = best.expect("n >= 4 guarantees an interior index");
    (fit, j)
}

/// Fits the three shape candidates by weighted least squares (weights
/// 1/sem^2), ranks them by AIC = chi^2 + 2 levels, and bootstraps the peak
/// location by resampling each point from Gaussian(mean, sem).
pub fn select_model(
    curve: &EiCurve,
    bootstrap_resamples: usize,
    rng: &mut Stream,
) -> Result<ModelSelectionReport> {
    let n = curve.points.len();
    if n < 4 {
        return Err(Error::InsufficientScales { need: 4, got: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| curve.points[i].block_size);
    let scales: Vec<usize> = order.iter().map(|&i| curve.points[i].block_size).collect();
    let y: Vec<f64> = order.iter().map(|&i| curve.points[i].ei_mean_bits).collect();
    let sems: Vec<f64> = order.iter().map(|&i| curve.points[i].ei_sem_bits).collect();
    if sems.iter().any(|s| !(s > &0.0)) {
        return Err(Error::Config("model selection needs a positive sem at every scale".into()));
    }
    let w: Vec<f64> = sems.iter().map(|s| 1.0 / (s * s)).collect();

    let (umb, peak_idx) = umbrella_fit(&y, &w);
    let candidates = vec![
        candidate(FitModel::MonotoneIncreasing, isotonic_fit(&y, &w, true), &y, &w),
        candidate(FitModel::MonotoneDecreasing, isotonic_fit(&y, &w, false), &y, &w),
        candidate(FitModel::Unimodal, umb, &y, &w),
    ];
    let mut ranked: Vec<&CandidateFit> = candidates.iter().collect();
    ranked.sort_by(|a, b| a.aic.partial_cmp(&b.aic).expect("finite AIC"));
    let best_model = ranked[0].model;
    let inconclusive = ranked[1].aic - ranked[0].aic < 2.0;

    let (peak_scale, peak_ci) = if best_model == FitModel::Unimodal {
        let ci = if bootstrap_resamples > 0 {
            let mut peaks: Vec<usize> = (0..bootstrap_resamples)
                .map(|_| {
                    let mut best = 0;
                    let mut best_val = f64::NEG_INFINITY;
                    for i in 0..n {
                        // Box-Muller; one Gaussian per point is plenty here.
                        let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
                        let u2: f64 = rng.gen();
                        let z = (-2.0 * u1.ln()).sqrt()
                            * (2.0 * std::f64::consts::PI * u2).cos();
                        let v = y[i] + sems[i] * z;
                        if v > best_val {
                            best_val = v;
                            best = i;
                        }
                    }
                    scales[best]
                })
                .collect();
            peaks.sort_unstable();
            let lo = peaks[((peaks.len() - 1) as f64 * 0.025).floor() as usize];
            let hi = peaks[((peaks.len() - 1) as f64 * 0.975).ceil() as usize];
            Some((lo, hi))
        } else {
            None
        };
        (Some(scales[peak_idx]), ci)
    } else {
        (None, None)
    };

    Ok(ModelSelectionReport { best_model, candidates, peak_scale, peak_ci, inconclusive })
}
