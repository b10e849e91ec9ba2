//! Coarse-to-fine seam refinement.
//!
//! Starting from the cut of the plain color difference map, each
//! iteration evaluates the current seam, dilates it into a banding area,
//! rescales the difference map inside the band by
//! `f(x) = exp(sigma * (x - epsilon))` of the nearest crossing's combined
//! evaluation, and re-cuts. The loop stops once the new seam is entirely
//! contained in the union of all previous banding areas, or at the
//! iteration cap.

use serde::Serialize;

use crate::config::StitchConfig;
use crate::error::Result;
use crate::evaluation::{evaluate, EvaluationSignal};
use crate::graphcut::{build_energy, extract_seam, min_cut, Labeling, Seam};
use crate::overlap::{AlignedPair, DifferenceMap, OverlapRegion};

/// A set of overlap pixels produced by dilating a seam, tagged with the
/// iteration that generated it.
#[derive(Debug, Clone)]
pub struct BandingArea {
    members: Vec<bool>,
    count: usize,
    /// Iteration whose seam was dilated.
    pub seam_iteration: u32,
}

impl BandingArea {
    pub fn contains(&self, id: u32) -> bool {
        self.members[id as usize]
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }
}

/// Chebyshev dilation of the seam pixel set (both sides of every
/// crossing) by `radius`, clipped to the overlap.
pub fn band(seam: &Seam, radius: u32, region: &OverlapRegion, seam_iteration: u32) -> BandingArea {
    let mut members = vec![false; region.len()];
    let mut count = 0usize;
    let r = radius as i64;
    for (id, _) in seam.unique_pixels() {
        let (x, y) = region.coords(id);
        for dy in -r..=r {
            for dx in -r..=r {
                if let Some(other) = region.id_at(x as i64 + dx, y as i64 + dy) {
                    if !members[other as usize] {
                        members[other as usize] = true;
                        count += 1;
                    }
                }
            }
        }
    }
    BandingArea {
        members,
        count,
        seam_iteration,
    }
}

/// Reweighting curve `f(x) = exp(sigma * (x - epsilon))`: neutral at
/// `x = epsilon`, shrinking below, inflating above.
#[inline]
pub fn reweight_factor(evaluation: f64, sigma: f64, epsilon: f64) -> f64 {
    (sigma * (evaluation - epsilon)).exp()
}

/// Applies the banded reweighting: pixels inside `area` are scaled by
/// `f` of the combined evaluation of their Euclidean-nearest seam pixel
/// (ties broken by the smaller crossing index); pixels outside the band
/// are copied bit for bit.
pub fn reweight(
    diff: &DifferenceMap,
    seam: &Seam,
    combined: &[f64],
    area: &BandingArea,
    region: &OverlapRegion,
    cfg: &StitchConfig,
) -> DifferenceMap {
    debug_assert_eq!(combined.len(), seam.len());
    // Seam pixels bucketed by row, each with the smallest crossing index
    // touching it.
    let mut rows: std::collections::BTreeMap<u32, Vec<(u32, usize)>> =
        std::collections::BTreeMap::new();
    for (id, idx) in seam.unique_pixels() {
        let (x, y) = region.coords(id);
        rows.entry(y).or_default().push((x, idx));
    }

    // Every band pixel lies within Chebyshev `band_radius` of a seam
    // pixel, so its Euclidean-nearest seam pixel lies within Chebyshev
    // radius * sqrt(2); scanning that window is exact.
    let scan = ((cfg.band_radius as f64) * std::f64::consts::SQRT_2).ceil() as i64 + 1;

    let mut out = diff.clone();
    let values = out.values_mut();
    for id in 0..region.len() as u32 {
        if !area.contains(id) {
            continue;
        }
        let (x, y) = region.coords(id);
        let mut best: Option<(i64, usize)> = None;
        let y_range = (y as i64 - scan).max(0) as u32..=(y as i64 + scan) as u32;
        for (&sy, entries) in rows.range(y_range) {
            let dy = sy as i64 - y as i64;
            for &(sx, idx) in entries {
                let dx = sx as i64 - x as i64;
                if dx.abs() > scan {
                    continue;
                }
                let key = (dx * dx + dy * dy, idx);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
        }
        let (_, idx) = best.expect("band pixel has a seam pixel within the scan window");
        values[id as usize] *= reweight_factor(combined[idx], cfg.sigma, cfg.epsilon);
    }
    out
}

/// One row of the per-iteration diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct IterationDiagnostics {
    pub iteration: u32,
    pub seam_length: usize,
    pub mean_combined: f64,
    pub max_combined: f64,
    pub max_point: f64,
    /// Size of the banding area generated from this seam; `None` for the
    /// final seam, which generates no band.
    pub band_size: Option<usize>,
}

/// Full state of a refinement run.
#[derive(Debug, Clone)]
pub struct RefineState {
    /// Number of graph cuts performed (the initial cut counts as 1).
    pub iterations: u32,
    /// True when the loop stopped because the seam was contained in the
    /// accumulated banding area (or the labeling was constant); false on
    /// the iteration cap.
    pub converged: bool,
    /// Difference map after the last reweighting.
    pub diff: DifferenceMap,
    /// Accumulated union of all banding areas.
    pub accumulated_band: Vec<bool>,
    pub diagnostics: Vec<IterationDiagnostics>,
    /// Evaluation signal of each seam, aligned with `diagnostics`.
    pub signals: Vec<EvaluationSignal>,
    /// The seam of each iteration, aligned with `diagnostics`.
    pub seams: Vec<Seam>,
}

/// Result of [`run`]: the final seam, its labeling, and the loop state.
#[derive(Debug, Clone)]
pub struct RefineOutcome {
    pub seam: Seam,
    pub labeling: Labeling,
    pub state: RefineState,
}

fn empty_signal() -> EvaluationSignal {
    EvaluationSignal {
        patch_raw: Vec::new(),
        point_raw: Vec::new(),
        patch_smooth: Vec::new(),
        point_smooth: Vec::new(),
        combined: Vec::new(),
    }
}

/// Executes the full coarse-to-fine loop on an aligned pair.
///
/// A constant initial labeling (possible when no pixel is forced, e.g.
/// coincident footprints) yields an empty seam and an immediately
/// converged state rather than an error, so degenerate-but-valid inputs
/// stitch to a plain copy. Hitting `max_iterations` is flagged as
/// `converged = false`, not an error.
pub fn run(pair: &AlignedPair, cfg: &StitchConfig) -> Result<RefineOutcome> {
    cfg.validate()?;
    let region = pair.region();
    let base = pair.difference_map()?;
    let mut current = base.clone();

    let mut labeling = min_cut(&build_energy(&current, region)?);
    let mut iterations = 1u32;

    if !labeling.is_mixed() {
        let state = RefineState {
            iterations,
            converged: true,
            diff: current,
            accumulated_band: vec![false; region.len()],
            diagnostics: vec![IterationDiagnostics {
                iteration: 1,
                seam_length: 0,
                mean_combined: 0.0,
                max_combined: 0.0,
                max_point: 0.0,
                band_size: None,
            }],
            signals: vec![empty_signal()],
            seams: vec![Seam::empty()],
        };
        return Ok(RefineOutcome {
            seam: Seam::empty(),
            labeling,
            state,
        });
    }

    let mut seam = extract_seam(&labeling, region)?;
    let mut accumulated = vec![false; region.len()];
    let mut diagnostics = Vec::new();
    let mut signals = Vec::new();
    let mut seams = Vec::new();
    let converged;

    loop {
        let signal = evaluate(&seam, pair.reference(), pair.target(), cfg)?;
        let contained = seam
            .unique_pixels()
            .iter()
            .all(|&(id, _)| accumulated[id as usize]);

        if contained || iterations >= cfg.max_iterations {
            diagnostics.push(IterationDiagnostics {
                iteration: iterations,
                seam_length: seam.len(),
                mean_combined: signal.mean_combined(),
                max_combined: signal.max_combined(),
                max_point: signal.max_point(),
                band_size: None,
            });
            signals.push(signal);
            seams.push(seam.clone());
            converged = contained;
            break;
        }

        let area = band(&seam, cfg.band_radius, region, iterations);
        diagnostics.push(IterationDiagnostics {
            iteration: iterations,
            seam_length: seam.len(),
            mean_combined: signal.mean_combined(),
            max_combined: signal.max_combined(),
            max_point: signal.max_point(),
            band_size: Some(area.len()),
        });

        let source = if cfg.compounding { &current } else { &base };
        let reweighted = reweight(source, &seam, &signal.combined, &area, region, cfg);
        signals.push(signal);
        seams.push(seam.clone());

        for (id, slot) in accumulated.iter_mut().enumerate() {
            *slot |= area.contains(id as u32);
        }
        current = reweighted;

        labeling = min_cut(&build_energy(&current, region)?);
        seam = extract_seam(&labeling, region)?;
        iterations += 1;
    }

    Ok(RefineOutcome {
        seam,
        labeling,
        state: RefineState {
            iterations,
            converged,
            diff: current,
            accumulated_band: accumulated,
            diagnostics,
            signals,
            seams,
        },
    })
}
