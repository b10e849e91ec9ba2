//! Patch-point evaluation of a seam.
//!
//! Every crossing is scored twice: the patch evaluation
//! `(1 - SSIM(p_i)) / 2` measures structural disagreement of the windows
//! around the label-0 pixel, and the point evaluation averages the color
//! differences of the two pixels straddling the cut. Both signals are
//! smoothed along the seam and multiplied, scaled by lambda.

mod smoothing;
mod ssim;

pub use smoothing::smooth_signal;
pub use ssim::{ssim_patch, SSIM_C1, SSIM_C2};

use crate::config::StitchConfig;
use crate::error::{Result, StitchError};
use crate::graphcut::Seam;
use crate::image::Image;

/// Per-crossing evaluation signals, raw and smoothed, indexed by seam
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationSignal {
    pub patch_raw: Vec<f64>,
    pub point_raw: Vec<f64>,
    pub patch_smooth: Vec<f64>,
    pub point_smooth: Vec<f64>,
    /// `lambda * patch_smooth * point_smooth`, elementwise.
    pub combined: Vec<f64>,
}

impl EvaluationSignal {
    pub fn len(&self) -> usize {
        self.combined.len()
    }

    pub fn is_empty(&self) -> bool {
        self.combined.is_empty()
    }

    pub fn max_combined(&self) -> f64 {
        self.combined.iter().fold(0.0f64, |acc, &v| acc.max(v))
    }

    pub fn mean_combined(&self) -> f64 {
        if self.combined.is_empty() {
            0.0
        } else {
            self.combined.iter().sum::<f64>() / self.combined.len() as f64
        }
    }

    pub fn max_point(&self) -> f64 {
        self.point_raw.iter().fold(0.0f64, |acc, &v| acc.max(v))
    }
}

/// Patch evaluation `(1 - SSIM(p_i)) / 2` for every crossing, the patch
/// centered at the label-0 pixel.
pub fn patch_eval(seam: &Seam, i0: &Image, i1: &Image, cfg: &StitchConfig) -> Vec<f64> {
    seam.crossings()
        .iter()
        .map(|c| (1.0 - ssim_patch(i0, i1, c.p, cfg.patch_size)) / 2.0)
        .collect()
}

/// Point evaluation: mean of the two straddling color differences.
pub fn point_eval(seam: &Seam, i0: &Image, i1: &Image) -> Vec<f64> {
    seam.crossings()
        .iter()
        .map(|c| {
            let dp = i0.color_distance(i1, c.p.0, c.p.1);
            let dq = i0.color_distance(i1, c.q.0, c.q.1);
            (dp + dq) / 2.0
        })
        .collect()
}

/// Elementwise `lambda * patch * point`.
pub fn combine(patch_smooth: &[f64], point_smooth: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if patch_smooth.len() != point_smooth.len() {
        return Err(StitchError::LengthMismatch {
            left: patch_smooth.len(),
            right: point_smooth.len(),
        });
    }
    Ok(patch_smooth
        .iter()
        .zip(point_smooth)
        .map(|(&a, &b)| lambda * a * b)
        .collect())
}

/// Runs the full evaluation of a seam: raw patch and point signals,
/// separate smoothing of each, and the combined signal.
pub fn evaluate(seam: &Seam, i0: &Image, i1: &Image, cfg: &StitchConfig) -> Result<EvaluationSignal> {
    let patch_raw = patch_eval(seam, i0, i1, cfg);
    let point_raw = point_eval(seam, i0, i1);
    let patch_smooth = smooth_signal(&patch_raw, cfg.smoothing);
    let point_smooth = smooth_signal(&point_raw, cfg.smoothing);
    let combined = combine(&patch_smooth, &point_smooth, cfg.lambda)?;
    Ok(EvaluationSignal {
        patch_raw,
        point_raw,
        patch_smooth,
        point_smooth,
        combined,
    })
}
