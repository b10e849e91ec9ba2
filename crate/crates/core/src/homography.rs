//! Homography application: inverse-map bilinear warping of the target
//! image onto the reference canvas. Estimation is out of scope; the 3x3
//! matrix is supplied by the caller.

use serde::{Deserialize, Serialize};

use crate::error::{Result, StitchError};
use crate::image::{Image, Mask};

/// A 3x3 projective transform, row-major, mapping target pixel
/// coordinates into reference/canvas coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Homography(pub [f64; 9]);

impl Homography {
    pub fn identity() -> Self {
        Homography([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0])
    }

    pub fn translation(dx: f64, dy: f64) -> Self {
        Homography([1.0, 0.0, dx, 0.0, 1.0, dy, 0.0, 0.0, 1.0])
    }

    /// Applies the transform to a point, with projective division.
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        let m = &self.0;
        let w = m[6] * x + m[7] * y + m[8];
        (
            (m[0] * x + m[1] * y + m[2]) / w,
            (m[3] * x + m[4] * y + m[5]) / w,
        )
    }

    /// Determinant of the matrix scaled so its largest entry is 1.
    pub fn normalized_det(&self) -> f64 {
        let m = &self.0;
        let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let n: Vec<f64> = m.iter().map(|v| v / scale).collect();
        n[0] * (n[4] * n[8] - n[5] * n[7]) - n[1] * (n[3] * n[8] - n[5] * n[6])
            + n[2] * (n[3] * n[7] - n[4] * n[6])
    }

    /// Inverse transform via the adjugate. Fails when the normalized
    /// determinant magnitude drops below 1e-12.
    pub fn inverse(&self) -> Result<Homography> {
        let det = self.normalized_det();
        if det.abs() <= 1e-12 {
            return Err(StitchError::SingularHomography { det });
        }
        let m = &self.0;
        let d = m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
            + m[2] * (m[3] * m[7] - m[4] * m[6]);
        let adj = [
            m[4] * m[8] - m[5] * m[7],
            m[2] * m[7] - m[1] * m[8],
            m[1] * m[5] - m[2] * m[4],
            m[5] * m[6] - m[3] * m[8],
            m[0] * m[8] - m[2] * m[6],
            m[2] * m[3] - m[0] * m[5],
            m[3] * m[7] - m[4] * m[6],
            m[1] * m[6] - m[0] * m[7],
            m[0] * m[4] - m[1] * m[3],
        ];
        let mut out = [0.0; 9];
        for (o, a) in out.iter_mut().zip(adj.iter()) {
            *o = a / d;
        }
        Ok(Homography(out))
    }

    /// Left-composes a pixel translation: `T(dx, dy) * self`.
    pub fn translated(&self, dx: f64, dy: f64) -> Homography {
        let m = &self.0;
        Homography([
            m[0] + dx * m[6],
            m[1] + dx * m[7],
            m[2] + dx * m[8],
            m[3] + dy * m[6],
            m[4] + dy * m[7],
            m[5] + dy * m[8],
            m[6],
            m[7],
            m[8],
        ])
    }
}

/// Warps `target` onto a `canvas_width x canvas_height` canvas with
/// inverse mapping and bilinear sampling. The returned mask is true
/// exactly where the preimage lies inside the source rectangle; there is
/// no extrapolation.
pub fn warp_target(
    target: &Image,
    h: &Homography,
    canvas_width: u32,
    canvas_height: u32,
) -> Result<(Image, Mask)> {
    let inv = h.inverse()?;
    let mut out = Image::new(canvas_width, canvas_height);
    let mut mask = Mask::filled(canvas_width, canvas_height, false);
    let (sw, sh) = (target.width(), target.height());

    for y in 0..canvas_height {
        for x in 0..canvas_width {
            let (sx, sy) = inv.apply(x as f64, y as f64);
            if !sx.is_finite() || !sy.is_finite() {
                continue;
            }
            if sx < 0.0 || sy < 0.0 || sx > (sw - 1) as f64 || sy > (sh - 1) as f64 {
                continue;
            }
            out.set_pixel(x, y, sample_bilinear(target, sx, sy));
            mask.set(x, y, true);
        }
    }
    Ok((out, mask))
}

/// Bilinear sample at a point known to lie inside `[0, w-1] x [0, h-1]`.
fn sample_bilinear(img: &Image, sx: f64, sy: f64) -> [f64; 3] {
    let x0 = sx.floor() as u32;
    let y0 = sy.floor() as u32;
    let x1 = (x0 + 1).min(img.width() - 1);
    let y1 = (y0 + 1).min(img.height() - 1);
    let fx = sx - x0 as f64;
    let fy = sy - y0 as f64;
    let p00 = img.pixel(x0, y0);
    let p10 = img.pixel(x1, y0);
    let p01 = img.pixel(x0, y1);
    let p11 = img.pixel(x1, y1);
    let mut rgb = [0.0; 3];
    for c in 0..3 {
        let top = (1.0 - fx) * p00[c] + fx * p10[c];
        let bottom = (1.0 - fx) * p01[c] + fx * p11[c];
        // Guard against bilinear rounding producing values like 1.0 + eps.
        rgb[c] = ((1.0 - fy) * top + fy * bottom).clamp(0.0, 1.0);
    }
    rgb
}

/// Canvas plan for aligning a reference image with a warped target:
/// the bounding box of both footprints, plus the translation that moves
/// everything into nonnegative coordinates.
#[derive(Debug, Clone, Copy)]
pub struct CanvasPlan {
    pub width: u32,
    pub height: u32,
    /// Offset of the reference image's (0, 0) on the canvas.
    pub ref_offset: (u32, u32),
    /// Homography from target coordinates to canvas coordinates.
    pub target_to_canvas: Homography,
}

/// Computes the joint canvas of a `ref_w x ref_h` reference and a target
/// warped by `h`: the bounding box of the reference footprint and the
/// forward-mapped target corners.
pub fn plan_canvas(
    ref_w: u32,
    ref_h: u32,
    target_w: u32,
    target_h: u32,
    h: &Homography,
) -> Result<CanvasPlan> {
    h.inverse()?; // reject singular warps up front
    let corners = [
        (0.0, 0.0),
        ((target_w - 1) as f64, 0.0),
        (0.0, (target_h - 1) as f64),
        ((target_w - 1) as f64, (target_h - 1) as f64),
    ];
    let mut min_x = 0.0f64;
    let mut min_y = 0.0f64;
    let mut max_x = (ref_w - 1) as f64;
    let mut max_y = (ref_h - 1) as f64;
    for (cx, cy) in corners {
        let (x, y) = h.apply(cx, cy);
        if !x.is_finite() || !y.is_finite() {
            return Err(StitchError::Format(
                "homography maps a target corner to infinity".into(),
            ));
        }
        min_x = min_x.min(x);
        min_y = min_y.min(y);
        max_x = max_x.max(x);
        max_y = max_y.max(y);
    }
    let ox = (-min_x.floor()).max(0.0);
    let oy = (-min_y.floor()).max(0.0);
    let width = (max_x.ceil() + ox) as u32 + 1;
    let height = (max_y.ceil() + oy) as u32 + 1;
    Ok(CanvasPlan {
        width,
        height,
        ref_offset: (ox as u32, oy as u32),
        target_to_canvas: h.translated(ox, oy),
    })
}
