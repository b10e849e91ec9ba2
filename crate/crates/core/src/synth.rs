//! Deterministic synthetic fixtures: aligned pairs with a known
//! parallax band and a known zero-error corridor.
//!
//! The reference image shows a procedural texture. The target copies it
//! but samples the texture shifted horizontally inside the parallax
//! band, leaving a two-column corridor (and thin buffer columns around
//! it) in exact agreement. A fixture therefore always admits a zero-cost
//! cut through the corridor, while the band offers only disagreeing
//! pixels, and the misaligned mask records exactly where the pair
//! genuinely disagrees.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, StitchError};
use crate::homography::Homography;
use crate::image::{Image, Mask};
use crate::overlap::AlignedPair;

/// Procedural base textures. All of them are defined on the whole
/// integer plane so shifted sampling never leaves the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Texture {
    /// Monotone per-channel ramps; a shift disagrees everywhere.
    Gradient,
    /// Two-color checkerboard with block size equal to the shift, so a
    /// shift flips the parity of every block.
    Checker,
    /// Hashed per-pixel colors quantized to 8-bit levels.
    Noise,
}

/// Parameters of a synthetic fixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureSpec {
    pub canvas_width: u32,
    pub canvas_height: u32,
    /// Width of the overlap strip, centered on the canvas.
    pub overlap_width: u32,
    /// Horizontal parallax shift inside the misaligned band, in pixels.
    /// Zero renders a degenerate fixture with an empty misaligned mask.
    pub shift: u32,
    pub texture: Texture,
    /// Canvas x of the corridor's left column; the corridor is two
    /// columns wide and must lie inside the overlap.
    pub corridor_col: u32,
    pub seed: u64,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        Self {
            canvas_width: 64,
            canvas_height: 48,
            overlap_width: 24,
            shift: 4,
            texture: Texture::Checker,
            corridor_col: 36,
            seed: 1,
        }
    }
}

/// A generated fixture: the aligned pair plus the oracle masks.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub pair: AlignedPair,
    /// Pixels where the two images genuinely disagree.
    pub misaligned: Mask,
    /// The untouched two-column corridor of exact agreement.
    pub corridor: Mask,
    pub spec: FixtureSpec,
}

impl FixtureSpec {
    /// Left edge of the overlap strip.
    pub fn overlap_start(&self) -> u32 {
        (self.canvas_width - self.overlap_width) / 2
    }

    /// One past the right edge of the overlap strip.
    pub fn overlap_end(&self) -> u32 {
        self.overlap_start() + self.overlap_width
    }

    fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(StitchError::InvalidSpec(msg));
        if self.canvas_width < 8 || self.canvas_width > 160 {
            return err(format!("canvas_width {} outside [8, 160]", self.canvas_width));
        }
        if self.canvas_height < 4 || self.canvas_height > 160 {
            return err(format!(
                "canvas_height {} outside [4, 160]",
                self.canvas_height
            ));
        }
        if self.shift > 48 {
            return err(format!("shift {} exceeds 48", self.shift));
        }
        if self.overlap_width < 2 || self.overlap_width > self.canvas_width - 2 {
            return err(format!(
                "overlap_width {} outside [2, {}]",
                self.overlap_width,
                self.canvas_width - 2
            ));
        }
        let (os, oe) = (self.overlap_start(), self.overlap_end());
        if self.corridor_col < os || self.corridor_col + 2 > oe {
            return err(format!(
                "corridor columns [{}, {}) outside the overlap [{os}, {oe})",
                self.corridor_col,
                self.corridor_col + 2
            ));
        }
        Ok(())
    }
}

fn splitmix64(mut state: u64) -> u64 {
    state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Base texture color at an arbitrary integer coordinate.
fn texture_color(spec: &FixtureSpec, x: i64, y: i64) -> [f64; 3] {
    match spec.texture {
        Texture::Gradient => [
            ((x + 64) as f64 / 255.0).clamp(0.0, 1.0),
            ((y + 64) as f64 / 255.0).clamp(0.0, 1.0),
            ((x + y + 128) as f64 / 765.0).clamp(0.0, 1.0),
        ],
        Texture::Checker => {
            let block = spec.shift.max(1) as i64;
            let parity = (x.div_euclid(block) + y.div_euclid(block)).rem_euclid(2);
            if parity == 0 {
                [51.0 / 255.0, 77.0 / 255.0, 102.0 / 255.0]
            } else {
                [204.0 / 255.0, 178.0 / 255.0, 153.0 / 255.0]
            }
        }
        Texture::Noise => {
            let h = splitmix64(spec.seed ^ (x as u64).wrapping_mul(0x100000001b3) ^ (y as u64));
            [
                (h & 0xff) as f64 / 255.0,
                ((h >> 8) & 0xff) as f64 / 255.0,
                ((h >> 16) & 0xff) as f64 / 255.0,
            ]
        }
    }
}

/// Renders the fixture described by `spec`.
pub fn make_fixture(spec: &FixtureSpec) -> Result<Fixture> {
    spec.validate()?;
    let (w, h) = (spec.canvas_width, spec.canvas_height);
    let (os, oe) = (spec.overlap_start(), spec.overlap_end());
    let cc = spec.corridor_col;

    // Misaligned band: the interior overlap columns minus the corridor
    // and one buffer column on each flank.
    let in_band = |x: u32| -> bool {
        let (x, os, oe, cc) = (x as i64, os as i64, oe as i64, cc as i64);
        x > os && x < oe - 1 && !(x > cc - 2 && x < cc + 3)
    };

    let mut reference = Image::new(w, h);
    let mut target = Image::new(w, h);
    let mut misaligned = Mask::filled(w, h, false);
    let mut corridor = Mask::filled(w, h, false);

    for y in 0..h {
        for x in 0..w {
            let base = texture_color(spec, x as i64, y as i64);
            reference.set_pixel(x, y, base);
            let shifted = if in_band(x) && spec.shift > 0 {
                texture_color(spec, x as i64 - spec.shift as i64, y as i64)
            } else {
                base
            };
            target.set_pixel(x, y, shifted);
            if (cc..cc + 2).contains(&x) {
                corridor.set(x, y, true);
            }
            let in_overlap = (os..oe).contains(&x);
            if in_overlap && shifted != base {
                misaligned.set(x, y, true);
            }
        }
    }

    let mask0 = Mask::from_rect(w, h, 0, 0, oe, h);
    let mask1 = Mask::from_rect(w, h, os, 0, w, h);
    let pair = AlignedPair::new(reference, mask0, target, mask1)?;
    Ok(Fixture {
        pair,
        misaligned,
        corridor,
        spec: *spec,
    })
}

/// A deterministic family of varied fixture specs: sizes, overlap
/// widths, shifts, textures and corridor placements all cycle with the
/// index. Used by the test and acceptance suites.
pub fn fixture_suite(count: usize) -> Vec<FixtureSpec> {
    (0..count)
        .map(|i| {
            let h = splitmix64(0xf1c5 ^ (i as u64).wrapping_mul(0x9e37));
            let canvas_width = 48 + (h % 49) as u32;
            let canvas_height = 32 + ((h >> 8) % 33) as u32;
            let overlap_width = 12 + ((h >> 16) % 17) as u32;
            let shift = 1 + ((h >> 24) % 6) as u32;
            let texture = match i % 3 {
                0 => Texture::Gradient,
                1 => Texture::Checker,
                _ => Texture::Noise,
            };
            let os = (canvas_width - overlap_width) / 2;
            let oe = os + overlap_width;
            let corridor_col = match (h >> 32) % 3 {
                0 => os,
                1 => os + (overlap_width - 2) / 2,
                _ => oe - 2,
            };
            FixtureSpec {
                canvas_width,
                canvas_height,
                overlap_width,
                shift,
                texture,
                corridor_col,
                seed: h,
            }
        })
        .collect()
}

fn crop(img: &Image, x0: u32, y0: u32, w: u32, h: u32) -> Image {
    let mut out = Image::new(w, h);
    for y in 0..h {
        for x in 0..w {
            out.set_pixel(x, y, img.pixel(x0 + x, y0 + y));
        }
    }
    out
}

impl Fixture {
    /// Writes the fixture as CLI-consumable files: the two footprint
    /// crops, a translation homography placing the target crop back on
    /// the canvas, both oracle masks, and the spec echo.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| StitchError::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
        let spec = &self.spec;
        let (os, oe) = (spec.overlap_start(), spec.overlap_end());
        let (w, h) = (spec.canvas_width, spec.canvas_height);
        crate::io::save_image(&crop(self.pair.reference(), 0, 0, oe, h), &dir.join("ref.png"))?;
        crate::io::save_image(
            &crop(self.pair.target(), os, 0, w - os, h),
            &dir.join("target.png"),
        )?;
        let h_json = serde_json::to_string(&Homography::translation(os as f64, 0.0).0)
            .map_err(|e| StitchError::Format(e.to_string()))?;
        std::fs::write(dir.join("homography.json"), h_json).map_err(|e| StitchError::Io {
            path: dir.join("homography.json"),
            source: e,
        })?;
        crate::io::save_mask(&self.misaligned, &dir.join("mask_misaligned.png"))?;
        crate::io::save_mask(&self.corridor, &dir.join("mask_corridor.png"))?;
        let echo = serde_json::to_string_pretty(spec)
            .map_err(|e| StitchError::Format(e.to_string()))?;
        std::fs::write(dir.join("spec.json"), echo).map_err(|e| StitchError::Io {
            path: dir.join("spec.json"),
            source: e,
        })
    }
}
