//! Two-image stitching with iterative, perception-aware seam estimation.
//!
//! The pipeline aligns a target image onto a reference canvas (the warp
//! is supplied, not estimated), cuts an initial seam through the overlap
//! by minimizing a color-difference labeling energy with max-flow, then
//! repeatedly scores the seam with a patch-point evaluation (SSIM
//! structure times straddling color difference), inflates the difference
//! map around poorly scored stretches, and re-cuts until the seam
//! settles inside the already-explored band. The final composite is
//! produced by gradient-domain fusion across the seam.
//!
//! # Module map
//! - [`image`]: dense RGB / mask buffers shared by everything.
//! - [`config`]: [`StitchConfig`] and its defaults.
//! - [`overlap`]: overlap geometry, [`AlignedPair`], the difference map.
//! - [`homography`]: inverse-map bilinear warping and canvas planning.
//! - [`io`]: PNG/JPEG ingestion, overlays, labeling interchange files.
//! - [`graphcut`]: the labeling energy, max-flow min-cut, seam extraction.
//! - [`evaluation`]: patch/point evaluation signals and smoothing.
//! - [`refine`]: the coarse-to-fine loop.
//! - [`blend`]: naive and gradient-domain compositing.
//! - [`metrics`]: ZNCC seam quality and reporting.
//! - [`synth`]: deterministic synthetic fixtures for tests and demos.

pub mod blend;
pub mod config;
pub mod error;
pub mod evaluation;
pub mod graphcut;
pub mod homography;
pub mod image;
pub mod io;
pub mod metrics;
pub mod overlap;
pub mod refine;
pub mod synth;

pub use config::{Smoothing, StitchConfig};
pub use error::{Result, StitchError};
pub use image::{Image, Mask};
pub use overlap::{compute_overlap, difference_map, AlignedPair, DifferenceMap, OverlapRegion};
