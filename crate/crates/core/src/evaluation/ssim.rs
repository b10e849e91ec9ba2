//! Single-window SSIM on luma patches.

use crate::image::Image;

/// Stabilization constants on the [0, 1] dynamic range: (0.01)^2 and
/// (0.03)^2.
pub const SSIM_C1: f64 = 0.0001;
pub const SSIM_C2: f64 = 0.0009;

/// SSIM index of the two `patch_size x patch_size` luma windows centered
/// at `center`. Windows are clamped at the canvas border (replicate
/// padding) and use uniform, unweighted statistics. The result lies in
/// `[-1, 1]` and equals exactly 1 for identical patches.
pub fn ssim_patch(i0: &Image, i1: &Image, center: (u32, u32), patch_size: u32) -> f64 {
    debug_assert!(patch_size % 2 == 1);
    let radius = (patch_size / 2) as i64;
    let (cx, cy) = (center.0 as i64, center.1 as i64);
    let n = (patch_size as f64) * (patch_size as f64);

    let mut sum_x = 0.0;
    let mut sum_y = 0.0;
    let mut sum_xx = 0.0;
    let mut sum_yy = 0.0;
    let mut sum_xy = 0.0;
    for dy in -radius..=radius {
        for dx in -radius..=radius {
            let x = i0.luma_clamped(cx + dx, cy + dy);
            let y = i1.luma_clamped(cx + dx, cy + dy);
            sum_x += x;
            sum_y += y;
            sum_xx += x * x;
            sum_yy += y * y;
            sum_xy += x * y;
        }
    }
    let mean_x = sum_x / n;
    let mean_y = sum_y / n;
    let var_x = sum_xx / n - mean_x * mean_x;
    let var_y = sum_yy / n - mean_y * mean_y;
    let cov = sum_xy / n - mean_x * mean_y;

    // Rounding can push near-identical patches a few ulps past 1; the
    // clamp keeps the patch evaluation inside [0, 1]. Identical patches
    // produce bitwise-equal numerator and denominator, so the exact 1.0
    // survives.
    (((2.0 * mean_x * mean_y + SSIM_C1) * (2.0 * cov + SSIM_C2))
        / ((mean_x * mean_x + mean_y * mean_y + SSIM_C1) * (var_x + var_y + SSIM_C2)))
        .clamp(-1.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(w: u32, h: u32, invert: bool) -> Image {
        let mut img = Image::new(w, h);
        for y in 0..h {
            for x in 0..w {
                let v = (x + y * w) as f64 / (w * h) as f64;
                let v = if invert { 1.0 - v } else { v };
                img.set_pixel(x, y, [v, v, v]);
            }
        }
        img
    }

    #[test]
    fn identical_patches_score_exactly_one() {
        let img = ramp(25, 25, false);
        assert_eq!(ssim_patch(&img, &img, (12, 12), 21), 1.0);
        // Border centers rely on replicate padding and still hit 1.
        assert_eq!(ssim_patch(&img, &img, (0, 0), 21), 1.0);
    }

    #[test]
    fn negated_content_scores_below_zero() {
        // x vs 1 - x around a symmetric ramp: anti-correlated structure.
        let a = ramp(25, 25, false);
        let b = ramp(25, 25, true);
        let s = ssim_patch(&a, &b, (12, 12), 21);
        assert!(s < 0.0, "ssim = {s}");
    }

    #[test]
    fn symmetric_in_its_inputs() {
        let a = ramp(30, 30, false);
        let mut b = ramp(30, 30, false);
        b.set_pixel(14, 14, [0.9, 0.1, 0.4]);
        b.set_pixel(10, 17, [0.0, 0.8, 0.2]);
        let s01 = ssim_patch(&a, &b, (14, 15), 21);
        let s10 = ssim_patch(&b, &a, (14, 15), 21);
        assert_eq!(s01, s10);
    }
}
