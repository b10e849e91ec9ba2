//! Binary labeling of the overlap grid by max-flow min-cut.
//!
//! The energy over labelings `l : P -> {0, 1}` is
//! `E(l) = sum_p D_p(l_p) + sum_{(p,q)} 0.5 * |l_p - l_q| * (I_d(p) + I_d(q))`
//! on the 4-neighborhood of the overlap. The data term is a hard border
//! constraint: overlap pixels touching the reference-only region are
//! forced to label 0, pixels touching the target-only region to label 1.
//! The pairwise term is submodular by construction
//! (`S(0,0) + S(1,1) = 0 <= S(0,1) + S(1,0)`), so the min cut is the
//! global optimum.

mod maxflow;
mod seam;

pub use seam::{extract_seam, Crossing, Seam};

use crate::error::{Result, StitchError};
use crate::overlap::{DifferenceMap, OverlapRegion};

/// Data cost used to force a border label. Exceeds any achievable total
/// smoothness cost (per-edge costs are bounded by sqrt(3) per side).
pub const HARD: f64 = 1e9;

/// A 4-adjacent pair of overlap pixels and the cost of cutting it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridEdge {
    pub a: u32,
    pub b: u32,
    /// Smoothness cost when the two labels differ.
    pub weight: f64,
}

/// The full labeling energy: nodes, 4-neighborhood edges with their
/// differ-costs, and per-node data costs for both labels.
#[derive(Debug, Clone)]
pub struct EnergyModel {
    node_count: usize,
    edges: Vec<GridEdge>,
    data_zero: Vec<f64>,
    data_one: Vec<f64>,
    forced_zero: usize,
    forced_one: usize,
}

impl EnergyModel {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[GridEdge] {
        &self.edges
    }

    pub fn data_costs(&self, node: u32) -> (f64, f64) {
        (self.data_zero[node as usize], self.data_one[node as usize])
    }

    /// Evaluates the labeling energy: data terms plus the cut edges.
    pub fn energy(&self, labeling: &Labeling) -> f64 {
        let mut total = 0.0;
        for id in 0..self.node_count {
            total += match labeling.get(id as u32) {
                0 => self.data_zero[id],
                _ => self.data_one[id],
            };
        }
        for e in &self.edges {
            if labeling.get(e.a) != labeling.get(e.b) {
                total += e.weight;
            }
        }
        total
    }
}

/// Per-overlap-pixel binary assignment: 0 keeps the reference image,
/// 1 keeps the target image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    labels: Vec<u8>,
}

impl Labeling {
    pub fn from_labels(labels: Vec<u8>) -> Self {
        debug_assert!(labels.iter().all(|&l| l <= 1));
        Self { labels }
    }

    #[inline]
    pub fn get(&self, id: u32) -> u8 {
        self.labels[id as usize]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// True when both labels occur.
    pub fn is_mixed(&self) -> bool {
        self.labels.windows(2).any(|w| w[0] != w[1])
    }
}

/// The four grid neighbors of a canvas coordinate.
#[inline]
pub(crate) fn neighbors4(x: u32, y: u32) -> [(i64, i64); 4] {
    let (x, y) = (x as i64, y as i64);
    [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)]
}

/// Builds the labeling energy from a difference map: pairwise costs
/// `0.5 * (I_d(p) + I_d(q))` on 4-adjacent overlap pairs, and hard data
/// costs on pixels bordering an exclusive region.
pub fn build_energy(diff: &DifferenceMap, region: &OverlapRegion) -> Result<EnergyModel> {
    if diff.len() != region.len() {
        return Err(StitchError::DimensionMismatch(format!(
            "difference map holds {} values for {} overlap pixels",
            diff.len(),
            region.len()
        )));
    }
    let n = region.len();
    let mut edges = Vec::new();
    let mut data_zero = vec![0.0; n];
    let mut data_one = vec![0.0; n];
    let mut forced_zero = 0usize;
    let mut forced_one = 0usize;

    for (id, x, y) in region.iter() {
        // Right and down neighbors only, so each edge appears once.
        for (nx, ny) in [(x as i64 + 1, y as i64), (x as i64, y as i64 + 1)] {
            if let Some(other) = region.id_at(nx, ny) {
                edges.push(GridEdge {
                    a: id,
                    b: other,
                    weight: 0.5 * (diff.get(id) + diff.get(other)),
                });
            }
        }
        let mut touches_ref = false;
        let mut touches_target = false;
        for (nx, ny) in neighbors4(x, y) {
            touches_ref |= region.ref_only().get_checked(nx, ny);
            touches_target |= region.target_only().get_checked(nx, ny);
        }
        if touches_ref && touches_target {
            return Err(StitchError::ConstraintConflict { x, y });
        }
        if touches_ref {
            data_one[id as usize] = HARD; // forced to label 0
            forced_zero += 1;
        } else if touches_target {
            data_zero[id as usize] = HARD; // forced to label 1
            forced_one += 1;
        }
    }

    Ok(EnergyModel {
        node_count: n,
        edges,
        data_zero,
        data_one,
        forced_zero,
        forced_one,
    })
}

/// Returns a labeling attaining the global minimum of the energy.
///
/// When only one side (or neither) carries a hard constraint the
/// constant labeling satisfying it is already optimal and is returned
/// without a solve. Ties between equal-cost cuts resolve to the cut
/// closest to the reference side, which makes the result deterministic.
pub fn min_cut(model: &EnergyModel) -> Labeling {
    let n = model.node_count;
    if model.forced_zero == 0 && model.forced_one > 0 {
        return Labeling::from_labels(vec![1; n]);
    }
    if model.forced_one == 0 {
        return Labeling::from_labels(vec![0; n]);
    }

    let mut graph = maxflow::FlowGraph::new(n + 2);
    let source = n as u32;
    let sink = n as u32 + 1;
    for id in 0..n {
        if model.data_one[id] > 0.0 {
            graph.add_arc(source, id as u32, model.data_one[id]);
        }
        if model.data_zero[id] > 0.0 {
            graph.add_arc(id as u32, sink, model.data_zero[id]);
        }
    }
    for e in &model.edges {
        if e.weight > 0.0 {
            graph.add_undirected(e.a, e.b, e.weight);
        }
    }
    graph.max_flow(source, sink);
    let source_side = graph.source_side(source);

    let labels = (0..n)
        .map(|id| if source_side[id] { 0 } else { 1 })
        .collect();
    let labeling = Labeling::from_labels(labels);
    debug_assert!((0..n).all(|id| {
        (model.data_one[id] < HARD || labeling.get(id as u32) == 0)
            && (model.data_zero[id] < HARD || labeling.get(id as u32) == 1)
    }));
    labeling
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Mask;
    use crate::overlap::compute_overlap;

    /// Overlap strip of `w x h` pixels flanked by one ref-only column on
    /// the left and one target-only column on the right.
    pub(crate) fn strip_region(w: u32, h: u32) -> OverlapRegion {
        let mask0 = Mask::from_rect(w + 2, h, 0, 0, w + 1, h);
        let mask1 = Mask::from_rect(w + 2, h, 1, 0, w + 2, h);
        compute_overlap(&mask0, &mask1).unwrap()
    }

    fn map_from(values: &[f64], region: &OverlapRegion) -> DifferenceMap {
        DifferenceMap::from_values(values.to_vec(), region).unwrap()
    }

    #[test]
    fn uniform_map_prices_every_cut_edge_at_d() {
        let region = strip_region(3, 3);
        let diff = map_from(&[0.25; 9], &region);
        let model = build_energy(&diff, &region).unwrap();
        assert_eq!(model.edges().len(), 12);
        assert!(model.edges().iter().all(|e| e.weight == 0.25));
    }

    #[test]
    fn hand_computed_edge_costs_on_3x3() {
        let region = strip_region(3, 3);
        // Row-major values over the 3x3 overlap.
        let values = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
        let diff = map_from(&values, &region);
        let model = build_energy(&diff, &region).unwrap();
        // Edge (0,1) horizontal: 0.5 * (0.1 + 0.2) = 0.15
        // Edge (0,3) vertical:   0.5 * (0.1 + 0.4) = 0.25
        // Edge (4,5) horizontal: 0.5 * (0.5 + 0.6) = 0.55
        let find = |a: u32, b: u32| {
            model
                .edges()
                .iter()
                .find(|e| (e.a, e.b) == (a, b) || (e.a, e.b) == (b, a))
                .unwrap()
                .weight
        };
        assert!((find(0, 1) - 0.15).abs() < 1e-15);
        assert!((find(0, 3) - 0.25).abs() < 1e-15);
        assert!((find(4, 5) - 0.55).abs() < 1e-15);
    }

    #[test]
    fn border_pixels_are_forced() {
        let region = strip_region(3, 2);
        let diff = map_from(&[0.0; 6], &region);
        let model = build_energy(&diff, &region).unwrap();
        // Left column ids 0, 3 forced to 0; right column ids 2, 5 forced to 1.
        assert_eq!(model.data_costs(0), (0.0, HARD));
        assert_eq!(model.data_costs(3), (0.0, HARD));
        assert_eq!(model.data_costs(2), (HARD, 0.0));
        assert_eq!(model.data_costs(5), (HARD, 0.0));
        assert_eq!(model.data_costs(1), (0.0, 0.0));
    }

    #[test]
    fn one_pixel_wide_overlap_conflicts() {
        let region = strip_region(1, 3);
        let diff = map_from(&[0.0; 3], &region);
        assert!(matches!(
            build_energy(&diff, &region),
            Err(StitchError::ConstraintConflict { .. })
        ));
    }

    #[test]
    fn identical_images_cut_has_zero_energy() {
        let region = strip_region(4, 3);
        let diff = map_from(&[0.0; 12], &region);
        let model = build_energy(&diff, &region).unwrap();
        let labeling = min_cut(&model);
        assert_eq!(model.energy(&labeling), 0.0);
        assert!(labeling.is_mixed());
    }

    #[test]
    fn unconstrained_model_returns_trivial_labeling() {
        // Full-canvas masks: no exclusive regions, no forced pixels.
        let mask = Mask::filled(3, 3, true);
        let region = compute_overlap(&mask, &mask).unwrap();
        let diff = map_from(&[0.5; 9], &region);
        let model = build_energy(&diff, &region).unwrap();
        let labeling = min_cut(&model);
        assert!(labeling.labels().iter().all(|&l| l == 0));
        assert_eq!(model.energy(&labeling), 0.0);
    }

    #[test]
    fn zero_corridor_attracts_the_cut() {
        // 6x4 overlap with an all-zero vertical corridor at columns 2-3.
        let region = strip_region(6, 4);
        let mut values = vec![0.8; 24];
        for (id, x, _) in region.iter() {
            let local = x - 1; // overlap starts at canvas x = 1
            if local == 2 || local == 3 {
                values[id as usize] = 0.0;
            }
        }
        let diff = map_from(&values, &region);
        let model = build_energy(&diff, &region).unwrap();
        let labeling = min_cut(&model);
        assert_eq!(model.energy(&labeling), 0.0);
        // Cut must lie strictly inside the corridor.
        for (id, x, _) in region.iter() {
            let local = x - 1;
            if local <= 2 {
                assert_eq!(labeling.get(id), 0, "column {local}");
            } else {
                assert_eq!(labeling.get(id), 1, "column {local}");
            }
        }
    }

    #[test]
    fn min_cut_matches_exhaustive_enumeration_on_small_grids() {
        // Deterministic pseudo-random dyadic costs keep every energy sum
        // exact in f64; enumeration of all 2^n labelings is the oracle.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for case in 0..120 {
            let w = 2 + (next() % 2) as u32; // 2..3
            let h = 2 + (next() % 3) as u32; // 2..4
            let region = strip_region(w, h);
            let n = region.len();
            assert!(n <= 12);
            let values: Vec<f64> = (0..n).map(|_| (next() % 1024) as f64 / 1024.0).collect();
            let diff = map_from(&values, &region);
            let model = build_energy(&diff, &region).unwrap();
            let labeling = min_cut(&model);
            let achieved = model.energy(&labeling);

            let mut best = f64::INFINITY;
            for bits in 0..(1u32 << n) {
                let candidate = Labeling::from_labels(
                    (0..n).map(|i| ((bits >> i) & 1) as u8).collect(),
                );
                best = best.min(model.energy(&candidate));
            }
            assert_eq!(achieved, best, "case {case}: {w}x{h} overlap");
        }
    }

    #[test]
    fn scaling_the_map_scales_the_energy_and_keeps_the_argmin() {
        let region = strip_region(4, 3);
        let mut state = 42u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state >> 33
        };
        let values: Vec<f64> = (0..12).map(|_| (next() % 1024) as f64 / 1024.0 + 0.001).collect();
        let diff = map_from(&values, &region);
        let model = build_energy(&diff, &region).unwrap();
        let labeling = min_cut(&model);

        let scaled_values: Vec<f64> = values.iter().map(|v| v * 4.0).collect();
        let scaled = map_from(&scaled_values, &region);
        let scaled_model = build_energy(&scaled, &region).unwrap();
        let scaled_labeling = min_cut(&scaled_model);
        assert_eq!(labeling, scaled_labeling);
        let base = model.energy(&labeling);
        let quad = scaled_model.energy(&scaled_labeling);
        assert!((quad - 4.0 * base).abs() <= 1e-12 * quad.max(1.0));
    }
}
