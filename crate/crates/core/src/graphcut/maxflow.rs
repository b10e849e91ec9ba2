//! Dinic max-flow on an adjacency-array residual graph.
//!
//! Capacities are `f64`. An augmentation always subtracts the exact
//! bottleneck from the bottleneck edge, driving it to exactly zero, so
//! the algorithm terminates without any epsilon thresholds and the final
//! reachability query is exact for inputs whose capacities are exactly
//! representable.

/// Residual arc: paired with its reverse at `index ^ 1`.
#[derive(Debug, Clone, Copy)]
struct Arc {
    to: u32,
    residual: f64,
}

#[derive(Debug)]
pub struct FlowGraph {
    arcs: Vec<Arc>,
    /// Per-node list of arc indices, in insertion order.
    adjacency: Vec<Vec<u32>>,
    level: Vec<i32>,
    cursor: Vec<usize>,
}

impl FlowGraph {
    pub fn new(nodes: usize) -> Self {
        Self {
            arcs: Vec::new(),
            adjacency: vec![Vec::new(); nodes],
            level: vec![-1; nodes],
            cursor: vec![0; nodes],
        }
    }

    /// Directed arc with capacity `cap` and a zero-capacity reverse.
    pub fn add_arc(&mut self, from: u32, to: u32, cap: f64) {
        debug_assert!(cap >= 0.0);
        let idx = self.arcs.len() as u32;
        self.arcs.push(Arc { to, residual: cap });
        self.arcs.push(Arc {
            to: from,
            residual: 0.0,
        });
        self.adjacency[from as usize].push(idx);
        self.adjacency[to as usize].push(idx + 1);
    }

    /// Symmetric pair of arcs, each with capacity `cap`.
    pub fn add_undirected(&mut self, a: u32, b: u32, cap: f64) {
        debug_assert!(cap >= 0.0);
        let idx = self.arcs.len() as u32;
        self.arcs.push(Arc { to: b, residual: cap });
        self.arcs.push(Arc { to: a, residual: cap });
        self.adjacency[a as usize].push(idx);
        self.adjacency[b as usize].push(idx + 1);
    }

    fn bfs(&mut self, source: u32, sink: u32) -> bool {
        self.level.fill(-1);
        self.level[source as usize] = 0;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &ai in &self.adjacency[u as usize] {
                let arc = self.arcs[ai as usize];
                if arc.residual > 0.0 && self.level[arc.to as usize] < 0 {
                    self.level[arc.to as usize] = self.level[u as usize] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        self.level[sink as usize] >= 0
    }

    fn augment(&mut self, u: u32, sink: u32, pushed: f64) -> f64 {
        if u == sink {
            return pushed;
        }
        while self.cursor[u as usize] < self.adjacency[u as usize].len() {
            let ai = self.adjacency[u as usize][self.cursor[u as usize]] as usize;
            let Arc { to, residual } = self.arcs[ai];
            if residual > 0.0 && self.level[to as usize] == self.level[u as usize] + 1 {
                let flow = self.augment(to, sink, pushed.min(residual));
                if flow > 0.0 {
                    self.arcs[ai].residual -= flow;
                    self.arcs[ai ^ 1].residual += flow;
                    if self.arcs[ai].residual <= 0.0 {
                        // Bottleneck arc saturated exactly; skip it from now on.
                        self.arcs[ai].residual = 0.0;
                        self.cursor[u as usize] += 1;
                    }
                    return flow;
                }
            }
            self.cursor[u as usize] += 1;
        }
        0.0
    }

    /// Runs Dinic to completion and returns the total flow shipped.
    pub fn max_flow(&mut self, source: u32, sink: u32) -> f64 {
        let mut total = 0.0;
        while self.bfs(source, sink) {
            self.cursor.fill(0);
            loop {
                let pushed = self.augment(source, sink, f64::INFINITY);
                if pushed <= 0.0 {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    /// Nodes reachable from the source in the residual graph; the
    /// complement is the sink side of the minimum cut.
    pub fn source_side(&self, source: u32) -> Vec<bool> {
        let mut seen = vec![false; self.adjacency.len()];
        let mut queue = std::collections::VecDeque::new();
        seen[source as usize] = true;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &ai in &self.adjacency[u as usize] {
                let arc = self.arcs[ai as usize];
                if arc.residual > 0.0 && !seen[arc.to as usize] {
                    seen[arc.to as usize] = true;
                    queue.push_back(arc.to);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_arc() {
        let mut g = FlowGraph::new(2);
        g.add_arc(0, 1, 3.5);
        assert_eq!(g.max_flow(0, 1), 3.5);
        let side = g.source_side(0);
        assert!(side[0] && !side[1]);
    }

    #[test]
    fn classic_diamond() {
        // s=0, t=3; both source arcs saturate through the cross edge.
        let mut g = FlowGraph::new(4);
        g.add_arc(0, 1, 3.0);
        g.add_arc(1, 3, 2.0);
        g.add_arc(0, 2, 2.0);
        g.add_arc(2, 3, 3.0);
        g.add_arc(1, 2, 1.0);
        assert_eq!(g.max_flow(0, 3), 5.0);
    }

    #[test]
    fn zero_capacity_blocks() {
        let mut g = FlowGraph::new(3);
        g.add_arc(0, 1, 5.0);
        g.add_arc(1, 2, 0.0);
        assert_eq!(g.max_flow(0, 2), 0.0);
        let side = g.source_side(0);
        assert!(side[0] && side[1] && !side[2]);
    }

    #[test]
    fn undirected_edge_carries_flow_both_ways() {
        let mut g = FlowGraph::new(3);
        g.add_undirected(0, 1, 2.0);
        g.add_undirected(1, 2, 1.5);
        assert_eq!(g.max_flow(0, 2), 1.5);
    }
}
