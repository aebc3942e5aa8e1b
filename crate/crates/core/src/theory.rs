//! Closed-form lower bound on effective information as a function of scale,
//! for a Gaussian read-out: averaging an ell^d-site block divides the noise
//! by ell^d while the macro signal decays as a model-dependent s(ell). The
//! bound is C(ell) = 1/2 log2(1 + snr_scale * s(ell)^2 * ell^d), and an
//! interior maximum exists exactly when g(ell) = 2 ell s'(ell) + d s(ell)
//! changes sign.

use crate::error::{Error, Result};
use crate::infotheory::gaussian_capacity;
use serde::{Deserialize, Serialize};

/// How the macro signal decays with block scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResponseModel {
    /// s(ell) = exp(-ell / lambda): correlations with a finite length.
    Exponential { lambda: f64 },
    /// s(ell) = ell^-alpha: scale-free decay.
    PowerLaw { alpha: f64 },
    /// s(ell) = max(0, 1 - c / ell^2): signal only above a resolution floor.
    Diffusive { c: f64 },
}

impl ResponseModel {
    pub fn response(&self, ell: f64) -> f64 {
        match *self {
            ResponseModel::Exponential { lambda } => (-ell / lambda).exp(),
            ResponseModel::PowerLaw { alpha } => ell.powf(-alpha),
            ResponseModel::Diffusive { c } => (1.0 - c / (ell * ell)).max(0.0),
        }
    }

    /// ds/dell. Zero inside the diffusive model's clipped region.
    pub fn response_derivative(&self, ell: f64) -> f64 {
        match *self {
            ResponseModel::Exponential { lambda } => -(-ell / lambda).exp() / lambda,
            ResponseModel::PowerLaw { alpha } => -alpha * ell.powf(-alpha - 1.0),
            ResponseModel::Diffusive { c } => {
                if ell * ell > c {
                    2.0 * c / (ell * ell * ell)
                } else {
                    0.0
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            ResponseModel::Exponential { lambda } => lambda > 0.0 && lambda.is_finite(),
            ResponseModel::PowerLaw { alpha } => alpha > 0.0 && alpha.is_finite(),
            ResponseModel::Diffusive { c } => c > 0.0 && c.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("response model parameter out of range: {self:?}")))
        }
    }
}

/// Effective signal-to-noise gain at scale ell: f(ell) = s(ell)^2 ell^d.
pub fn signal_function(model: &ResponseModel, dimension: u32, ell: f64) -> f64 {
    let s = model.response(ell);
    s * s * ell.powi(dimension as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub model: ResponseModel,
    /// Spatial dimension d of the substrate.
    pub dimension: u32,
    /// Base SNR of a single site's read-out.
    pub snr_scale: f64,
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.dimension == 0 || self.dimension > 3 {
            return Err(Error::Config(format!("dimension must be 1..=3, got {}", self.dimension)));
        }
        if !(self.snr_scale > 0.0) || !self.snr_scale.is_finite() {
            return Err(Error::Config(format!("snr_scale must be positive, got {}", self.snr_scale)));
        }
        Ok(())
    }
}

/// The capacity lower bound at one scale.
pub fn ei_lower_bound(params: &BoundParams, ell: f64) -> Result<f64> {
    params.validate()?;
    if !(ell > 0.0) {
        return Err(Error::Config(format!("scale must be positive, got {ell}")));
    }
    gaussian_capacity(params.snr_scale * signal_function(&params.model, params.dimension, ell))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakReport {
    /// Location of the interior maximum of the bound.
    pub ell_star: f64,
    /// True when g changes sign exactly once (rise then fall).
    pub is_unimodal: bool,
    pub derivative_sign_changes: usize,
}

/// Scans g(ell) = 2 ell s' + d s over the grid and, when it crosses from
/// positive to negative, refines the root by bisection. Monotone or flat
/// profiles have no interior peak and return an error.
pub fn verify_peak(params: &BoundParams, grid: &[f64]) -> Result<PeakReport> {
    params.validate()?;
    if grid.len() < 3 {
        return Err(Error::InsufficientScales { need: 3, got: grid.len() });
    }
    if grid.windows(2).any(|w| !(w[0] > 0.0 && w[0] < w[1])) {
        return Err(Error::Config("scale grid must be positive and strictly increasing".into()));
    }
    let d = params.dimension as f64;
    // The two terms can cancel exactly (critical power law); rounding noise
    // at the ulp level must read as zero, not as spurious sign flips.
    let g = |ell: f64| {
        let growth = 2.0 * ell * params.model.response_derivative(ell);
        let decay = d * params.model.response(ell);
        let v = growth + decay;
        if v.abs() <= 1e-12 * (growth.abs() + decay.abs()) {
            0.0
        } else {
            v
        }
    };

    // Exact zeros (flat stretches) carry no sign information of their own.
    let signs: Vec<f64> = grid.iter().map(|&l| g(l)).filter(|v| *v != 0.0).map(f64::signum).collect();
    let mut changes = 0;
    for w in signs.windows(2) {
        if w[0] != w[1] {
            changes += 1;
        }
    }
    let downward = grid
        .windows(2)
        .find(|w| g(w[0]) > 0.0 && g(w[1]) <= 0.0)
        .map(|w| (w[0], w[1]));
    let (mut lo, mut hi) = match downward {
        Some(bracket) => bracket,
        None => return Err(Error::NoInteriorPeak),
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(PeakReport {
        ell_star: 0.5 * (lo + hi),
        is_unimodal: changes == 1,
        derivative_sign_changes: changes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn dense_grid() -> Vec<f64> {
        (1..=240).map(|i| i as f64 * 0.25).collect()
    }

    #[test]
    fn bound_reference_value() {
        // Independent evaluation: s = e^-1, f = 64 e^-2 = 8.661458127143213,
        // 1/2 log2(1 + f) = 1.636120469998859.
        let p = BoundParams {
            model: ResponseModel::Exponential { lambda: 8.0 },
            dimension: 2,
            snr_scale: 1.0,
        };
        assert_abs_diff_eq!(
            signal_function(&p.model, p.dimension, 8.0),
            8.661_458_127_143_213,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(ei_lower_bound(&p, 8.0).unwrap(), 1.636_120_469_998_859, epsilon = 1e-12);
    }

    #[test]
    fn exponential_peak_sits_at_half_d_lambda() {
        for lambda in [4.0, 8.0, 16.0] {
            for dimension in [1u32, 2, 3] {
                let p = BoundParams {
                    model: ResponseModel::Exponential { lambda },
                    dimension,
                    snr_scale: 2.0,
                };
                let report = verify_peak(&p, &dense_grid()).unwrap();
                assert!(report.is_unimodal);
                assert_eq!(report.derivative_sign_changes, 1);
                assert_abs_diff_eq!(report.ell_star, dimension as f64 * lambda / 2.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn peak_location_maximizes_the_bound_on_the_grid() {
        let p = BoundParams {
            model: ResponseModel::Exponential { lambda: 8.0 },
            dimension: 2,
            snr_scale: 1.0,
        };
        let report = verify_peak(&p, &dense_grid()).unwrap();
        let at_peak = ei_lower_bound(&p, report.ell_star).unwrap();
        for ell in dense_grid() {
            assert!(ei_lower_bound(&p, ell).unwrap() <= at_peak + 1e-12);
        }
    }

    #[test]
    fn critical_power_law_is_scale_free() {
        // alpha = d/2 makes f constant: g vanishes identically.
        for dimension in [1u32, 2, 3] {
            let p = BoundParams {
                model: ResponseModel::PowerLaw { alpha: dimension as f64 / 2.0 },
                dimension,
                snr_scale: 1.0,
            };
            let f1 = signal_function(&p.model, p.dimension, 1.0);
            let f9 = signal_function(&p.model, p.dimension, 9.0);
            assert_abs_diff_eq!(f1, f9, epsilon = 1e-12);
            assert!(matches!(verify_peak(&p, &dense_grid()), Err(Error::NoInteriorPeak)));
        }
    }

    #[test]
    fn off_critical_power_laws_are_monotone() {
        for (alpha, rising) in [(0.3, true), (2.0, false)] {
            let p = BoundParams {
                model: ResponseModel::PowerLaw { alpha },
                dimension: 2,
                snr_scale: 1.0,
            };
            let err = verify_peak(&p, &dense_grid()).unwrap_err();
            assert!(matches!(err, Error::NoInteriorPeak));
            let f2 = signal_function(&p.model, 2, 2.0);
            let f20 = signal_function(&p.model, 2, 20.0);
            assert_eq!(f20 > f2, rising);
        }
    }

    #[test]
    fn diffusive_response_never_peaks() {
        let p = BoundParams { model: ResponseModel::Diffusive { c: 4.0 }, dimension: 2, snr_scale: 1.0 };
        assert_eq!(p.model.response(1.0), 0.0);
        assert!(matches!(verify_peak(&p, &dense_grid()), Err(Error::NoInteriorPeak)));
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let good = BoundParams {
            model: ResponseModel::Exponential { lambda: 8.0 },
            dimension: 2,
            snr_scale: 1.0,
        };
        let bad_lambda = BoundParams { model: ResponseModel::Exponential { lambda: 0.0 }, ..good };
        assert!(bad_lambda.validate().is_err());
        assert!(BoundParams { dimension: 0, ..good }.validate().is_err());
        assert!(BoundParams { snr_scale: -1.0, ..good }.validate().is_err());
        assert!(ei_lower_bound(&good, 0.0).is_err());
        assert!(matches!(
            verify_peak(&good, &[1.0, 2.0]),
            Err(Error::InsufficientScales { need: 3, got: 2 })
        ));
        assert!(verify_peak(&good, &[1.0, 3.0, 2.0]).is_err());
    }

    proptest! {
        #[test]
        fn bound_is_nonnegative_and_monotone_in_snr(
            lambda in 0.5..40.0f64,
            ell in 0.1..100.0f64,
            snr in 0.01..50.0f64,
        ) {
            let p = BoundParams {
                model: ResponseModel::Exponential { lambda },
                dimension: 2,
                snr_scale: snr,
            };
            let b = ei_lower_bound(&p, ell).unwrap();
            prop_assert!(b >= 0.0);
            let stronger = BoundParams { snr_scale: snr * 2.0, ..p };
            prop_assert!(ei_lower_bound(&stronger, ell).unwrap() >= b);
        }
    }
}
