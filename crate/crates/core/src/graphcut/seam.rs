//! Seam extraction: collecting the label-discontinuous pixel pairs and
//! ordering them by walking the cut as a path in the dual grid.

use std::collections::BTreeMap;

use crate::error::{Result, StitchError};
use crate::overlap::OverlapRegion;

use super::Labeling;

/// One seam crossing: `p` keeps the reference image (label 0), `q` the
/// target image (label 1); the two are 4-adjacent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crossing {
    /// Canvas coordinates of the label-0 pixel.
    pub p: (u32, u32),
    /// Canvas coordinates of the label-1 pixel.
    pub q: (u32, u32),
    /// Overlap id of `p`.
    pub p_id: u32,
    /// Overlap id of `q`.
    pub q_id: u32,
}

/// Ordered sequence of seam crossings. The position in the sequence is
/// the arc-length index used by the evaluation signals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seam {
    crossings: Vec<Crossing>,
}

impl Seam {
    /// A seam with no crossings, used for constant labelings.
    pub fn empty() -> Self {
        Self {
            crossings: Vec::new(),
        }
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    /// Unique seam pixels (both sides of every crossing) with the
    /// smallest crossing index that touches each, ordered by overlap id.
    pub fn unique_pixels(&self) -> Vec<(u32, usize)> {
        let mut first: BTreeMap<u32, usize> = BTreeMap::new();
        for (i, c) in self.crossings.iter().enumerate() {
            first.entry(c.p_id).or_insert(i);
            first.entry(c.q_id).or_insert(i);
        }
        first.into_iter().collect()
    }
}

/// Dual-lattice vertex keyed as (row, column) so the natural tuple
/// ordering picks the topmost-then-leftmost vertex first.
type DualVertex = (u32, u32);

/// Dual endpoints of a crossing between geometrically adjacent pixels
/// `a` and `b` (given in scan order: b is right of or below a).
fn dual_endpoints(a: (u32, u32), b: (u32, u32)) -> (DualVertex, DualVertex) {
    if b.0 == a.0 + 1 {
        // Horizontal pair: vertical dual segment at x = b.0.
        ((a.1, b.0), (a.1 + 1, b.0))
    } else {
        // Vertical pair: horizontal dual segment at y = b.1.
        ((b.1, a.0), (b.1, a.0 + 1))
    }
}

/// Collects every label-discontinuous 4-adjacent pair and orders the
/// pairs by walking the cut in the dual grid. Each connected cut
/// component is traversed from its own minimal endpoint; components are
/// concatenated in order of those endpoints.
pub fn extract_seam(labeling: &Labeling, region: &OverlapRegion) -> Result<Seam> {
    if labeling.len() != region.len() {
        return Err(StitchError::DimensionMismatch(format!(
            "labeling holds {} labels for {} overlap pixels",
            labeling.len(),
            region.len()
        )));
    }
    if !labeling.is_mixed() {
        return Err(StitchError::EmptySeam);
    }

    // Crossings in row-major scan order (right and down neighbors).
    let mut crossings = Vec::new();
    let mut duals = Vec::new();
    for (id, x, y) in region.iter() {
        for (nx, ny) in [(x as i64 + 1, y as i64), (x as i64, y as i64 + 1)] {
            let Some(other) = region.id_at(nx, ny) else {
                continue;
            };
            let (la, lb) = (labeling.get(id), labeling.get(other));
            if la == lb {
                continue;
            }
            let a = (x, y);
            let b = (nx as u32, ny as u32);
            let (p, q, p_id, q_id) = if la == 0 {
                (a, b, id, other)
            } else {
                (b, a, other, id)
            };
            duals.push(dual_endpoints(a, b));
            crossings.push(Crossing { p, q, p_id, q_id });
        }
    }

    // Incidence lists of the dual graph, keyed so iteration follows the
    // (row, column) order.
    let mut incidence: BTreeMap<DualVertex, Vec<usize>> = BTreeMap::new();
    for (i, &(v1, v2)) in duals.iter().enumerate() {
        incidence.entry(v1).or_default().push(i);
        incidence.entry(v2).or_default().push(i);
    }

    let other_end = |edge: usize, at: DualVertex| -> DualVertex {
        let (v1, v2) = duals[edge];
        if v1 == at {
            v2
        } else {
            v1
        }
    };

    let mut used = vec![false; crossings.len()];
    let mut order = Vec::with_capacity(crossings.len());
    let mut remaining = crossings.len();

    while remaining > 0 {
        // Prefer an endpoint (odd unused degree); cycles fall back to the
        // smallest vertex that still has an unused edge.
        let mut start: Option<DualVertex> = None;
        for (&v, edges) in &incidence {
            let unused = edges.iter().filter(|&&e| !used[e]).count();
            if unused % 2 == 1 {
                start = Some(v);
                break;
            }
            if unused > 0 && start.is_none() {
                start = Some(v);
            }
        }
        let mut at = start.expect("remaining edges imply an incident vertex");

        loop {
            // Deterministic step: smallest next vertex, then smallest
            // edge index.
            let next = incidence[&at]
                .iter()
                .filter(|&&e| !used[e])
                .map(|&e| (other_end(e, at), e))
                .min();
            let Some((to, edge)) = next else {
                break;
            };
            used[edge] = true;
            remaining -= 1;
            order.push(crossings[edge]);
            at = to;
        }
    }

    Ok(Seam { crossings: order })
}
