//! Stitching parameters and their defaults.

use serde::{Deserialize, Serialize};

use crate::error::{Result, StitchError};

/// How the per-crossing evaluation signals are smoothed before combining.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Smoothing {
    /// Haar wavelet decomposition with universal soft thresholding.
    #[default]
    Wavelet,
    /// Centered moving average, window 9, replicated ends.
    MovingAverage,
    /// Leave the raw signals untouched.
    None,
}

impl std::str::FromStr for Smoothing {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "wavelet" => Ok(Smoothing::Wavelet),
            "movavg" | "moving-average" => Ok(Smoothing::MovingAverage),
            "none" => Ok(Smoothing::None),
            other => Err(format!(
                "unknown smoothing `{other}` (expected wavelet, movavg or none)"
            )),
        }
    }
}

/// All tunables of the pipeline. Defaults: 21x21 patches, lambda 10,
/// sigma 5, epsilon 0.12, a 5-pixel band on each side of the seam, a
/// 20-iteration cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StitchConfig {
    /// SSIM / ZNCC window edge, odd and >= 3.
    pub patch_size: u32,
    /// Scale factor of the combined patch-point evaluation.
    pub lambda: f64,
    /// Steepness of the reweighting curve `f(x) = exp(sigma * (x - epsilon))`.
    pub sigma: f64,
    /// Evaluation level at which reweighting is neutral (`f(epsilon) = 1`).
    pub epsilon: f64,
    /// Chebyshev radius of the banding area around the seam.
    pub band_radius: u32,
    /// Safety cap on refinement iterations (counting the initial cut).
    pub max_iterations: u32,
    /// Signal smoothing method.
    pub smoothing: Smoothing,
    /// Relative residual target of the gradient-domain solve.
    pub poisson_tolerance: f64,
    /// When true (the default) each reweighting acts on the previous
    /// iteration's map, so factors compound; when false the pristine
    /// color difference map is reweighted each iteration.
    pub compounding: bool,
}

impl Default for StitchConfig {
    fn default() -> Self {
        Self {
            patch_size: 21,
            lambda: 10.0,
            sigma: 5.0,
            epsilon: 0.12,
            band_radius: 5,
            max_iterations: 20,
            smoothing: Smoothing::Wavelet,
            poisson_tolerance: 1e-6,
            compounding: true,
        }
    }
}

impl StitchConfig {
    /// Checks the structural invariants of the parameter set.
    pub fn validate(&self) -> Result<()> {
        if self.patch_size < 3 || self.patch_size.is_multiple_of(2) {
            return Err(StitchError::Format(format!(
                "patch_size must be odd and >= 3, got {}",
                self.patch_size
            )));
        }
        if self.band_radius < 1 {
            return Err(StitchError::Format("band_radius must be >= 1".into()));
        }
        if self.max_iterations < 1 {
            return Err(StitchError::Format("max_iterations must be >= 1".into()));
        }
        if self.poisson_tolerance.is_nan() || self.poisson_tolerance <= 0.0 {
            return Err(StitchError::Format(
                "poisson_tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}
