//! Overlap geometry and the color difference map.
//!
//! The overlap region enumerates the pixels valid in both aligned images
//! and classifies the remaining footprint into reference-only and
//! target-only sets. The difference map stores the per-pixel L2 color
//! difference densely over the overlap bounding box with a presence
//! mask, which keeps grid-graph construction and band dilation simple.

use crate::error::{Result, StitchError};
use crate::image::{Image, Mask};

/// Sentinel for "not an overlap pixel" in the dense id table.
const NO_PIXEL: u32 = u32::MAX;

/// Classification of a canvas into overlap, reference-only and
/// target-only pixels, with a dense enumeration of the overlap.
#[derive(Debug, Clone)]
pub struct OverlapRegion {
    width: u32,
    height: u32,
    overlap: Mask,
    ref_only: Mask,
    target_only: Mask,
    /// Canvas-sized table mapping (x, y) to the overlap pixel id.
    ids: Vec<u32>,
    /// Overlap pixel id to canvas coordinates, row-major order.
    pixels: Vec<(u32, u32)>,
    /// Bounding box of the overlap: (x0, y0, width, height).
    bbox: (u32, u32, u32, u32),
}

impl OverlapRegion {
    pub fn canvas_width(&self) -> u32 {
        self.width
    }

    pub fn canvas_height(&self) -> u32 {
        self.height
    }

    pub fn overlap(&self) -> &Mask {
        &self.overlap
    }

    pub fn ref_only(&self) -> &Mask {
        &self.ref_only
    }

    pub fn target_only(&self) -> &Mask {
        &self.target_only
    }

    /// Number of overlap pixels.
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    /// Dense id of an overlap pixel, if `(x, y)` lies in the overlap.
    #[inline]
    pub fn id_at(&self, x: i64, y: i64) -> Option<u32> {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return None;
        }
        let id = self.ids[y as usize * self.width as usize + x as usize];
        (id != NO_PIXEL).then_some(id)
    }

    /// Canvas coordinates of overlap pixel `id`.
    #[inline]
    pub fn coords(&self, id: u32) -> (u32, u32) {
        self.pixels[id as usize]
    }

    /// Overlap bounding box as (x0, y0, width, height).
    pub fn bbox(&self) -> (u32, u32, u32, u32) {
        self.bbox
    }

    /// Iterator over (id, x, y) in id order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, u32)> + '_ {
        self.pixels
            .iter()
            .enumerate()
            .map(|(id, &(x, y))| (id as u32, x, y))
    }
}

/// Splits two validity masks into overlap, reference-only and
/// target-only regions. Fails with [`StitchError::EmptyOverlap`] if the
/// masks share no pixel.
pub fn compute_overlap(mask0: &Mask, mask1: &Mask) -> Result<OverlapRegion> {
    if !mask0.same_dims(mask1) {
        return Err(StitchError::DimensionMismatch(format!(
            "mask canvases differ: {}x{} vs {}x{}",
            mask0.width(),
            mask0.height(),
            mask1.width(),
            mask1.height()
        )));
    }
    let (width, height) = (mask0.width(), mask0.height());
    let mut overlap = Mask::filled(width, height, false);
    let mut ref_only = Mask::filled(width, height, false);
    let mut target_only = Mask::filled(width, height, false);
    let mut ids = vec![NO_PIXEL; width as usize * height as usize];
    let mut pixels = Vec::new();
    let (mut x0, mut y0, mut x1, mut y1) = (u32::MAX, u32::MAX, 0u32, 0u32);

    for y in 0..height {
        for x in 0..width {
            match (mask0.get(x, y), mask1.get(x, y)) {
                (true, true) => {
                    overlap.set(x, y, true);
                    ids[y as usize * width as usize + x as usize] = pixels.len() as u32;
                    pixels.push((x, y));
                    x0 = x0.min(x);
                    y0 = y0.min(y);
                    x1 = x1.max(x);
                    y1 = y1.max(y);
                }
                (true, false) => ref_only.set(x, y, true),
                (false, true) => target_only.set(x, y, true),
                (false, false) => {}
            }
        }
    }

    if pixels.is_empty() {
        return Err(StitchError::EmptyOverlap);
    }

    Ok(OverlapRegion {
        width,
        height,
        overlap,
        ref_only,
        target_only,
        ids,
        pixels,
        bbox: (x0, y0, x1 - x0 + 1, y1 - y0 + 1),
    })
}

/// Nonnegative per-overlap-pixel cost field, indexed by overlap pixel id.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceMap {
    values: Vec<f64>,
}

impl DifferenceMap {
    /// Builds a map from per-id values. All values must be finite and >= 0.
    pub fn from_values(values: Vec<f64>, region: &OverlapRegion) -> Result<Self> {
        if values.len() != region.len() {
            return Err(StitchError::DimensionMismatch(format!(
                "difference map holds {} values for {} overlap pixels",
                values.len(),
                region.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(StitchError::Format(
                "difference map values must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { values })
    }

    #[inline]
    pub fn get(&self, id: u32) -> f64 {
        self.values[id as usize]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// Computes the L2 color difference `||i0(p) - i1(p)||` on every overlap
/// pixel.
pub fn difference_map(i0: &Image, i1: &Image, region: &OverlapRegion) -> Result<DifferenceMap> {
    if i0.width() != region.canvas_width()
        || i0.height() != region.canvas_height()
        || !i0.same_dims(i1)
    {
        return Err(StitchError::DimensionMismatch(format!(
            "images {}x{} / {}x{} do not match the {}x{} canvas",
            i0.width(),
            i0.height(),
            i1.width(),
            i1.height(),
            region.canvas_width(),
            region.canvas_height()
        )));
    }
    let values = region
        .iter()
        .map(|(_, x, y)| i0.color_distance(i1, x, y))
        .collect();
    Ok(DifferenceMap { values })
}

/// Two same-canvas images with their validity masks and the derived
/// overlap region. Immutable once built.
#[derive(Debug, Clone)]
pub struct AlignedPair {
    reference: Image,
    target: Image,
    region: OverlapRegion,
}

impl AlignedPair {
    /// Builds a pair, deriving the overlap from the two masks.
    pub fn new(reference: Image, mask0: Mask, target: Image, mask1: Mask) -> Result<Self> {
        if !reference.same_dims(&target) {
            return Err(StitchError::DimensionMismatch(format!(
                "image canvases differ: {}x{} vs {}x{}",
                reference.width(),
                reference.height(),
                target.width(),
                target.height()
            )));
        }
        if mask0.width() != reference.width() || mask0.height() != reference.height() {
            return Err(StitchError::DimensionMismatch(
                "mask canvas does not match the images".into(),
            ));
        }
        let region = compute_overlap(&mask0, &mask1)?;
        Ok(Self {
            reference,
            target,
            region,
        })
    }

    pub fn reference(&self) -> &Image {
        &self.reference
    }

    pub fn target(&self) -> &Image {
        &self.target
    }

    pub fn region(&self) -> &OverlapRegion {
        &self.region
    }

    /// L2 color difference of the pair over the overlap.
    pub fn difference_map(&self) -> Result<DifferenceMap> {
        difference_map(&self.reference, &self.target, &self.region)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(w: u32, h: u32) -> Mask {
        Mask::filled(w, h, true)
    }

    #[test]
    fn full_masks_overlap_everywhere() {
        let region = compute_overlap(&full(4, 3), &full(4, 3)).unwrap();
        assert_eq!(region.len(), 12);
        assert_eq!(region.ref_only().count(), 0);
        assert_eq!(region.target_only().count(), 0);
        assert_eq!(region.bbox(), (0, 0, 4, 3));
    }

    #[test]
    fn left_right_60pct_masks_give_middle_two_columns() {
        // mask0 covers the left 60% of a 10x10 canvas, mask1 the right 60%.
        let mask0 = Mask::from_rect(10, 10, 0, 0, 6, 10);
        let mask1 = Mask::from_rect(10, 10, 4, 0, 10, 10);
        let region = compute_overlap(&mask0, &mask1).unwrap();
        assert_eq!(region.len(), 20);
        assert_eq!(region.bbox(), (4, 0, 2, 10));
        assert_eq!(region.ref_only().count(), 40);
        assert_eq!(region.target_only().count(), 40);
    }

    #[test]
    fn disjoint_masks_error() {
        let mask0 = Mask::from_rect(10, 4, 0, 0, 5, 4);
        let mask1 = Mask::from_rect(10, 4, 5, 0, 10, 4);
        assert!(matches!(
            compute_overlap(&mask0, &mask1),
            Err(StitchError::EmptyOverlap)
        ));
    }

    #[test]
    fn masks_partition_the_union() {
        let mask0 = Mask::from_rect(9, 7, 0, 1, 6, 6);
        let mask1 = Mask::from_rect(9, 7, 3, 0, 9, 5);
        let region = compute_overlap(&mask0, &mask1).unwrap();
        for y in 0..7 {
            for x in 0..9 {
                let in_union = mask0.get(x, y) || mask1.get(x, y);
                let parts = [
                    region.overlap().get(x, y),
                    region.ref_only().get(x, y),
                    region.target_only().get(x, y),
                ];
                assert_eq!(parts.iter().filter(|&&p| p).count(), usize::from(in_union));
            }
        }
    }

    #[test]
    fn identical_images_give_zero_map() {
        let img = Image::new(5, 5);
        let region = compute_overlap(&full(5, 5), &full(5, 5)).unwrap();
        let map = difference_map(&img, &img, &region).unwrap();
        assert!(map.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn white_vs_black_is_sqrt3() {
        let mut a = Image::new(2, 1);
        a.set_pixel(0, 0, [1.0, 1.0, 1.0]);
        a.set_pixel(1, 0, [1.0, 1.0, 1.0]);
        let b = Image::new(2, 1);
        let region = compute_overlap(&full(2, 1), &full(2, 1)).unwrap();
        let map = difference_map(&a, &b, &region).unwrap();
        assert!((map.get(0) - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ids_enumerate_row_major() {
        let mask = Mask::from_rect(4, 4, 1, 1, 3, 3);
        let region = compute_overlap(&mask, &mask).unwrap();
        assert_eq!(region.coords(0), (1, 1));
        assert_eq!(region.coords(1), (2, 1));
        assert_eq!(region.coords(2), (1, 2));
        assert_eq!(region.id_at(2, 2), Some(3));
        assert_eq!(region.id_at(0, 0), None);
        assert_eq!(region.id_at(-1, 2), None);
    }
}
