//! File ingestion and emission: raster images, seam overlays, labeling
//! interchange files and homography files.

use std::path::Path;

use image::{DynamicImage, ImageBuffer, Luma, Rgb};
use serde::{Deserialize, Serialize};

use crate::error::{Result, StitchError};
use crate::evaluation::EvaluationSignal;
use crate::graphcut::{Labeling, Seam};
use crate::homography::Homography;
use crate::image::{Image, Mask};
use crate::overlap::OverlapRegion;

fn io_err(path: &Path, source: std::io::Error) -> StitchError {
    StitchError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn codec_err(path: &Path, source: image::ImageError) -> StitchError {
    match source {
        image::ImageError::IoError(e) => io_err(path, e),
        other => StitchError::Decode {
            path: path.to_path_buf(),
            source: other,
        },
    }
}

/// Loads a PNG or JPEG and normalizes channels to `[0, 1]`: 8-bit
/// sources divide by 255, 16-bit sources by 65535.
pub fn load_image(path: &Path) -> Result<Image> {
    let dynamic = image::open(path).map_err(|e| codec_err(path, e))?;
    let sixteen_bit = matches!(
        dynamic,
        DynamicImage::ImageLuma16(_) | DynamicImage::ImageLumaA16(_)
            | DynamicImage::ImageRgb16(_)
            | DynamicImage::ImageRgba16(_)
    );
    let (width, height) = (dynamic.width(), dynamic.height());
    let data = if sixteen_bit {
        let rgb = dynamic.to_rgb16();
        rgb.into_raw().iter().map(|&v| v as f64 / 65535.0).collect()
    } else {
        let rgb = dynamic.to_rgb8();
        rgb.into_raw().iter().map(|&v| v as f64 / 255.0).collect()
    };
    Image::from_data(width, height, data)
}

/// Writes an image as 8-bit PNG. Saving then loading an
/// 8-bit-representable image is lossless.
pub fn save_image(img: &Image, path: &Path) -> Result<()> {
    let buffer: ImageBuffer<Rgb<u8>, Vec<u8>> = ImageBuffer::from_fn(img.width(), img.height(), |x, y| {
        let rgb = img.pixel(x, y);
        Rgb([
            quantize8(rgb[0]),
            quantize8(rgb[1]),
            quantize8(rgb[2]),
        ])
    });
    buffer.save(path).map_err(|e| codec_err(path, e))
}

#[inline]
fn quantize8(v: f64) -> u8 {
    (v * 255.0).round().clamp(0.0, 255.0) as u8
}

/// Classic hot colormap: black through red and yellow to white.
pub fn hot_color(t: f64) -> [f64; 3] {
    let t = t.clamp(0.0, 1.0);
    [
        (3.0 * t).min(1.0),
        (3.0 * t - 1.0).clamp(0.0, 1.0),
        (3.0 * t - 2.0).clamp(0.0, 1.0),
    ]
}

/// Writes `img` with the seam painted as a hot map of the combined
/// evaluation. Both pixels of every crossing are colored. An all-zero
/// signal (or an empty seam) renders in the colormap's minimum color.
pub fn save_overlay(img: &Image, seam: &Seam, signal: &EvaluationSignal, path: &Path) -> Result<()> {
    let mut out = img.clone();
    let max = signal
        .combined
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v));
    for (i, crossing) in seam.crossings().iter().enumerate() {
        let t = if max > 0.0 {
            signal.combined.get(i).copied().unwrap_or(0.0) / max
        } else {
            0.0
        };
        let color = hot_color(t);
        out.set_pixel(crossing.p.0, crossing.p.1, color);
        out.set_pixel(crossing.q.0, crossing.q.1, color);
    }
    save_image(&out, path)
}

/// Saves a boolean mask as an 8-bit gray PNG (255 inside, 0 outside).
pub fn save_mask(mask: &Mask, path: &Path) -> Result<()> {
    let buffer: ImageBuffer<Luma<u8>, Vec<u8>> =
        ImageBuffer::from_fn(mask.width(), mask.height(), |x, y| {
            Luma([if mask.get(x, y) { 255 } else { 0 }])
        });
    buffer.save(path).map_err(|e| codec_err(path, e))
}

/// Sidecar metadata accompanying a labeling image: canvas size and the
/// overlap bounding box the gray image covers.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct LabelingSidecar {
    pub canvas_width: u32,
    pub canvas_height: u32,
    pub bbox_x: u32,
    pub bbox_y: u32,
    pub bbox_width: u32,
    pub bbox_height: u32,
}

/// Writes a labeling as a single-channel PNG over the overlap bounding
/// box (0 = reference, 255 = target, non-overlap pixels 0) plus a JSON
/// sidecar naming the box.
pub fn save_labeling(
    labeling: &Labeling,
    region: &OverlapRegion,
    png_path: &Path,
    sidecar_path: &Path,
) -> Result<()> {
    let (bx, by, bw, bh) = region.bbox();
    let buffer: ImageBuffer<Luma<u8>, Vec<u8>> = ImageBuffer::from_fn(bw, bh, |x, y| {
        let value = match region.id_at((bx + x) as i64, (by + y) as i64) {
            Some(id) if labeling.get(id) == 1 => 255,
            _ => 0,
        };
        Luma([value])
    });
    buffer.save(png_path).map_err(|e| codec_err(png_path, e))?;
    let sidecar = LabelingSidecar {
        canvas_width: region.canvas_width(),
        canvas_height: region.canvas_height(),
        bbox_x: bx,
        bbox_y: by,
        bbox_width: bw,
        bbox_height: bh,
    };
    let text = serde_json::to_string_pretty(&sidecar)
        .map_err(|e| StitchError::Format(e.to_string()))?;
    std::fs::write(sidecar_path, text).map_err(|e| io_err(sidecar_path, e))
}

/// Reads a labeling written by [`save_labeling`], validating it against
/// the pair's overlap region.
pub fn load_labeling(
    png_path: &Path,
    sidecar_path: &Path,
    region: &OverlapRegion,
) -> Result<Labeling> {
    let text = std::fs::read_to_string(sidecar_path).map_err(|e| io_err(sidecar_path, e))?;
    let sidecar: LabelingSidecar =
        serde_json::from_str(&text).map_err(|e| StitchError::Format(e.to_string()))?;
    let (bx, by, bw, bh) = region.bbox();
    if (
        sidecar.canvas_width,
        sidecar.canvas_height,
        sidecar.bbox_x,
        sidecar.bbox_y,
        sidecar.bbox_width,
        sidecar.bbox_height,
    ) != (
        region.canvas_width(),
        region.canvas_height(),
        bx,
        by,
        bw,
        bh,
    ) {
        return Err(StitchError::Format(
            "labeling sidecar does not match the pair's overlap geometry".into(),
        ));
    }
    let dynamic = image::open(png_path).map_err(|e| codec_err(png_path, e))?;
    let gray = dynamic.to_luma8();
    if gray.width() != bw || gray.height() != bh {
        return Err(StitchError::Format(format!(
            "labeling image is {}x{}, sidecar says {}x{}",
            gray.width(),
            gray.height(),
            bw,
            bh
        )));
    }
    let mut labels = vec![0u8; region.len()];
    for (id, x, y) in region.iter() {
        let v = gray.get_pixel(x - bx, y - by)[0];
        labels[id as usize] = match v {
            0 => 0,
            255 => 1,
            other => {
                return Err(StitchError::Format(format!(
                    "labeling pixel ({x}, {y}) has value {other}, expected 0 or 255"
                )))
            }
        };
    }
    Ok(Labeling::from_labels(labels))
}

/// Parses a homography file: either a JSON array of 9 numbers or 9
/// whitespace-separated numbers in a text file, row-major.
pub fn load_homography(path: &Path) -> Result<Homography> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let values: Vec<f64> = if text.trim_start().starts_with('[') {
        serde_json::from_str(&text)
            .map_err(|e| StitchError::Format(format!("homography JSON: {e}")))?
    } else {
        text.split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|e| StitchError::Format(format!("homography entry `{tok}`: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?
    };
    if values.len() != 9 {
        return Err(StitchError::Format(format!(
            "homography file holds {} numbers, expected 9",
            values.len()
        )));
    }
    let mut m = [0.0; 9];
    m.copy_from_slice(&values);
    let h = Homography(m);
    h.inverse()?;
    Ok(h)
}

/// Writes the per-crossing evaluation signals as CSV with the columns
/// `index, patch_raw, point_raw, patch_smooth, point_smooth, combined`.
pub fn save_signals_csv(signal: &EvaluationSignal, path: &Path) -> Result<()> {
    let mut text = String::from("index,patch_raw,point_raw,patch_smooth,point_smooth,combined\n");
    for i in 0..signal.len() {
        text.push_str(&format!(
            "{},{},{},{},{},{}\n",
            i,
            signal.patch_raw[i],
            signal.point_raw[i],
            signal.patch_smooth[i],
            signal.point_smooth[i],
            signal.combined[i]
        ));
    }
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}
