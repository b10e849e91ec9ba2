//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

/// Errors produced by the stitching pipeline.
#[derive(Debug, Error)]
pub enum StitchError {
    /// File could not be read or written.
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Raster file could not be decoded or encoded.
    #[error("image codec error on {path}: {source}")]
    Decode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    /// Two buffers that must share a canvas do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// The two validity masks share no pixel.
    #[error("the input footprints do not overlap")]
    EmptyOverlap,
    /// The supplied homography is not invertible.
    #[error("homography is singular (normalized |det| = {det:.3e})")]
    SingularHomography { det: f64 },
    /// An overlap pixel is border-adjacent to both exclusive regions.
    #[error("pixel ({x}, {y}) is forced to both labels; the overlap is too thin to cut")]
    ConstraintConflict { x: u32, y: u32 },
    /// A constant labeling has no crossing to extract.
    #[error("labeling is constant; there is no seam")]
    EmptySeam,
    /// Two per-crossing signals have different lengths.
    #[error("signal length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    /// The Poisson solver failed to reach the requested residual.
    #[error("poisson solver did not converge: residual {residual:.3e} after {iterations} iterations")]
    SolverDivergence { residual: f64, iterations: usize },
    /// An interchange file (labeling, sidecar, config) is malformed.
    #[error("format error: {0}")]
    Format(String),
    /// A fixture spec violates its constraints.
    #[error("invalid fixture spec: {0}")]
    InvalidSpec(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, StitchError>;
