//! Seam-quality metrics for comparison and regression tracking.
//!
//! The ZNCC-based quality averages `(1 - ZNCC(p_i)) / 2` over the seam.
//! It is reported for reference only: a scalar average cannot tell a
//! perceptually consistent seam from one with a few severe crossings,
//! which is why the refinement loop never consumes it.

use serde::Serialize;

use crate::config::StitchConfig;
use crate::error::Result;
use crate::evaluation::EvaluationSignal;
use crate::graphcut::Seam;
use crate::image::Image;

/// Zero-mean normalized cross correlation of the luma windows centered
/// at `center`, replicate-padded at the borders. Zero-variance windows
/// score 1 when both are constant with equal means and 0 otherwise.
pub fn zncc_patch(i0: &Image, i1: &Image, center: (u32, u32), patch_size: u32) -> f64 {
    debug_assert!(patch_size % 2 == 1);
    let radius = (patch_size / 2) as i64;
    let (cx, cy) = (center.0 as i64, center.1 as i64);
    let n = (patch_size as f64) * (patch_size as f64);

    let mut sum_x = 0.0;
    let mut sum_y = 0.0;
    let mut min_x = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for dy in -radius..=radius {
        for dx in -radius..=radius {
            let x = i0.luma_clamped(cx + dx, cy + dy);
            let y = i1.luma_clamped(cx + dx, cy + dy);
            sum_x += x;
            sum_y += y;
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
        }
    }
    let constant_x = min_x == max_x;
    let constant_y = min_y == max_y;
    if constant_x || constant_y {
        return if constant_x && constant_y && min_x == min_y {
            1.0
        } else {
            0.0
        };
    }

    let mean_x = sum_x / n;
    let mean_y = sum_y / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for dy in -radius..=radius {
        for dx in -radius..=radius {
            let x = i0.luma_clamped(cx + dx, cy + dy) - mean_x;
            let y = i1.luma_clamped(cx + dx, cy + dy) - mean_y;
            cov += x * y;
            var_x += x * x;
            var_y += y * y;
        }
    }
    // Rounding can push affine-identical patches a few ulps past 1.
    (cov / (var_x * var_y).sqrt()).clamp(-1.0, 1.0)
}

/// Average ZNCC seam quality `(1/N) * sum (1 - ZNCC(p_i)) / 2` over the
/// label-0 seam pixels. An empty seam scores 0.
pub fn zncc_quality(seam: &Seam, i0: &Image, i1: &Image, patch_size: u32) -> f64 {
    if seam.is_empty() {
        return 0.0;
    }
    let total: f64 = seam
        .crossings()
        .iter()
        .map(|c| (1.0 - zncc_patch(i0, i1, c.p, patch_size)) / 2.0)
        .sum();
    total / seam.len() as f64
}

/// One row of the per-crossing score table.
#[derive(Debug, Clone, Serialize)]
pub struct CrossingScore {
    pub index: usize,
    pub p: (u32, u32),
    pub q: (u32, u32),
    pub patch_raw: f64,
    pub point_raw: f64,
    pub combined: f64,
}

/// Aggregated seam-quality report.
#[derive(Debug, Clone, Serialize)]
pub struct SeamReport {
    /// ZNCC quality in [0, 1]; 0 for a perfectly correlated (or empty) seam.
    pub q_seam: f64,
    pub seam_length: usize,
    pub mean_combined: f64,
    pub max_combined: f64,
    pub median_combined: f64,
    pub p90_combined: f64,
    pub max_point: f64,
    pub crossings: Vec<CrossingScore>,
}

fn percentile(sorted: &[f64], fraction: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = (fraction * (sorted.len() - 1) as f64).round() as usize;
    sorted[rank.min(sorted.len() - 1)]
}

/// Builds the full report from a seam and its evaluation signals.
pub fn seam_report(
    seam: &Seam,
    signal: &EvaluationSignal,
    i0: &Image,
    i1: &Image,
    cfg: &StitchConfig,
) -> Result<SeamReport> {
    if signal.len() != seam.len() {
        return Err(crate::error::StitchError::LengthMismatch {
            left: signal.len(),
            right: seam.len(),
        });
    }
    let crossings = seam
        .crossings()
        .iter()
        .enumerate()
        .map(|(index, c)| CrossingScore {
            index,
            p: c.p,
            q: c.q,
            patch_raw: signal.patch_raw[index],
            point_raw: signal.point_raw[index],
            combined: signal.combined[index],
        })
        .collect();
    let mut sorted = signal.combined.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite evaluations"));
    Ok(SeamReport {
        q_seam: zncc_quality(seam, i0, i1, cfg.patch_size),
        seam_length: seam.len(),
        mean_combined: signal.mean_combined(),
        max_combined: signal.max_combined(),
        median_combined: percentile(&sorted, 0.5),
        p90_combined: percentile(&sorted, 0.9),
        max_point: signal.max_point(),
        crossings,
    })
}

/// Writes the per-crossing table as CSV.
pub fn save_report_csv(report: &SeamReport, path: &std::path::Path) -> Result<()> {
    let mut text = String::from("index,px,py,qx,qy,patch_raw,point_raw,combined\n");
    for row in &report.crossings {
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.index, row.p.0, row.p.1, row.q.0, row.q.1, row.patch_raw, row.point_raw, row.combined
        ));
    }
    std::fs::write(path, text).map_err(|e| crate::error::StitchError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}
