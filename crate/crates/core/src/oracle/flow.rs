//! Edmonds–Karp maximum flow on real capacities.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

const EPS: f64 = 1e-13;

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: f64,
    flow: f64,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn add_node(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    /// Adds a directed edge and returns its id.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: f64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap, flow: 0.0 });
        self.adj[from].push(id);
        self.edges.push(Edge {
            to: from,
            cap: 0.0,
            flow: 0.0,
        });
        self.adj[to].push(id + 1);
        id
    }

    pub fn flow(&self, edge: usize) -> f64 {
        self.edges[edge].flow
    }

    fn residual(&self, e: usize) -> f64 {
        self.edges[e].cap - self.edges[e].flow
    }

    /// Runs BFS augmentation until no path remains and returns the total flow.
    pub fn max_flow(&mut self, source: usize, sink: usize) -> f64 {
        let mut total = 0.0;
        loop {
            let mut parent: Vec<Option<usize>> = vec![None; self.adj.len()];
            let mut seen = vec![false; self.adj.len()];
            seen[source] = true;
            let mut queue = VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                if u == sink {
                    break;
                }
                for &e in &self.adj[u] {
                    let v = self.edges[e].to;
                    if !seen[v] && self.residual(e) > EPS {
                        seen[v] = true;
                        parent[v] = Some(e);
                        queue.push_back(v);
                    }
                }
            }
            if !seen[sink] {
                return total;
            }
            let mut push = f64::INFINITY;
            let mut v = sink;
            while let Some(e) = parent[v] {
                push = push.min(self.residual(e));
                v = self.edges[e ^ 1].to;
            }
            let mut v = sink;
            while let Some(e) = parent[v] {
                self.edges[e].flow += push;
                self.edges[e ^ 1].flow -= push;
                v = self.edges[e ^ 1].to;
            }
            total += push;
        }
    }
}

/// Result of a bipartite flow with node capacities.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteFlow {
    pub value: f64,
    /// `flow[l][r]` on each listed edge (zero elsewhere).
    pub flow: Vec<Vec<f64>>,
    pub left_load: Vec<f64>,
    pub right_load: Vec<f64>,
}

/// Maximum flow from left nodes to right nodes along `edges`, where each node
/// carries a capacity. Node capacities become source and sink edge capacities.
pub fn bipartite_max_flow(
    left_cap: &[f64],
    right_cap: &[f64],
    edges: &[(usize, usize)],
) -> BipartiteFlow {
    let nl = left_cap.len();
    let nr = right_cap.len();
    let source = nl + nr;
    let sink = source + 1;
    let mut net = FlowNetwork::new(nl + nr + 2);
    for (l, &c) in left_cap.iter().enumerate() {
        net.add_edge(source, l, c);
    }
    for (r, &c) in right_cap.iter().enumerate() {
        net.add_edge(nl + r, sink, c);
    }
    let ids: Vec<usize> = edges
        .iter()
        .map(|&(l, r)| net.add_edge(l, nl + r, f64::INFINITY))
        .collect();
    let value = net.max_flow(source, sink);
    let mut flow = vec![vec![0.0; nr]; nl];
    let mut left_load = vec![0.0; nl];
    let mut right_load = vec![0.0; nr];
    for (&(l, r), &id) in edges.iter().zip(&ids) {
        let f = net.flow(id).max(0.0);
        flow[l][r] += f;
        left_load[l] += f;
        right_load[r] += f;
    }
    BipartiteFlow {
        value,
        flow,
        left_load,
        right_load,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_network() {
        let mut net = FlowNetwork::new(4);
        net.add_edge(0, 1, 3.0);
        net.add_edge(0, 2, 2.0);
        net.add_edge(1, 2, 1.0);
        net.add_edge(1, 3, 2.0);
        net.add_edge(2, 3, 3.0);
        assert!((net.max_flow(0, 3) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn bipartite_with_node_capacities() {
        let f = bipartite_max_flow(&[0.3, 0.5], &[0.4, 0.1], &[(0, 0), (1, 0), (1, 1)]);
        assert!((f.value - 0.5).abs() < 1e-12);
        assert!(f.right_load[0] <= 0.4 + 1e-12);
        let total: f64 = f.left_load.iter().sum();
        assert!((total - f.value).abs() < 1e-12);
    }

    #[test]
    fn no_edges() {
        let f = bipartite_max_flow(&[1.0], &[1.0], &[]);
        assert_eq!(f.value, 0.0);
    }
}
