//! Network graphs: semi-random deployments, spanning trees, the small
//! example graphs used by the overcounting analysis, and the hop/degree
//! metrics consumed by the trackers and the cost model.
//!
//! Nodes are indexed from 0 in memory. The text format and all printed
//! reports use 1-based labels.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result};

/// 2D position in metres.
pub type Point = [f64; 2];

/// Upper bound on the node count accepted by the text parser.
pub const MAX_PARSED_NODES: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGraph {
    positions: Vec<Point>,
    comm_radius: f64,
    sense_radius: f64,
    /// Sorted, deduplicated neighbour lists.
    neighbors: Vec<Vec<usize>>,
}

/// Per-node degrees together with their maximum and mean.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeMetrics {
    pub degrees: Vec<usize>,
    pub max: usize,
    pub mean: f64,
}

fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn check_radii(comm_radius: f64, sense_radius: f64) -> Result<()> {
    if !(comm_radius.is_finite() && comm_radius >= 0.0) {
        return Err(Error::invalid(format!("communication radius {comm_radius}")));
    }
    if !(sense_radius.is_finite() && sense_radius >= 0.0) {
        return Err(Error::invalid(format!("sensing radius {sense_radius}")));
    }
    if sense_radius > comm_radius {
        return Err(Error::invalid(format!(
            "sensing radius {sense_radius} exceeds communication radius {comm_radius}"
        )));
    }
    Ok(())
}

impl NetworkGraph {
    /// Unit-disk graph: `n` and `u` are linked iff their distance is at most
    /// `comm_radius`.
    pub fn geometric(positions: Vec<Point>, comm_radius: f64, sense_radius: f64) -> Result<Self> {
        check_radii(comm_radius, sense_radius)?;
        if positions.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::invalid("non-finite node position"));
        }
        let n = positions.len();
        let mut neighbors = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                if distance(positions[i], positions[j]) <= comm_radius {
                    neighbors[i].push(j);
                    neighbors[j].push(i);
                }
            }
        }
        Ok(Self {
            positions,
            comm_radius,
            sense_radius,
            neighbors,
        })
    }

    /// Graph with an explicit edge list. Duplicate edges are merged;
    /// self-loops and out-of-range endpoints are rejected.
    pub fn from_edges(
        positions: Vec<Point>,
        comm_radius: f64,
        sense_radius: f64,
        edges: &[(usize, usize)],
    ) -> Result<Self> {
        check_radii(comm_radius, sense_radius)?;
        let n = positions.len();
        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::invalid(format!("edge ({a}, {b}) out of range for {n} nodes")));
            }
            if a == b {
                return Err(Error::invalid(format!("self-loop at node {a}")));
            }
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self {
            positions,
            comm_radius,
            sense_radius,
            neighbors,
        })
    }

    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn position(&self, n: usize) -> Point {
        self.positions[n]
    }

    pub fn comm_radius(&self) -> f64 {
        self.comm_radius
    }

    pub fn sense_radius(&self) -> f64 {
        self.sense_radius
    }

    pub fn neighbors(&self, n: usize) -> &[usize] {
        &self.neighbors[n]
    }

    pub fn degree(&self, n: usize) -> usize {
        self.neighbors[n].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn degree_metrics(&self) -> DegreeMetrics {
        let degrees: Vec<usize> = self.neighbors.iter().map(Vec::len).collect();
        let max = degrees.iter().copied().max().unwrap_or(0);
        let mean = if degrees.is_empty() {
            0.0
        } else {
            degrees.iter().sum::<usize>() as f64 / degrees.len() as f64
        };
        DegreeMetrics { degrees, max, mean }
    }

    /// BFS hop counts from `source`; `None` for unreachable nodes.
    pub fn hop_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0);
            for &u in &self.neighbors[v] {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        if self.node_count() == 0 {
            return true;
        }
        self.hop_distances(0).iter().all(Option::is_some)
    }

    /// Largest shortest-path hop count over all node pairs.
    pub fn diameter(&self) -> Result<usize> {
        let mut diameter = 0;
        for source in 0..self.node_count() {
            for d in self.hop_distances(source) {
                diameter = diameter.max(d.ok_or(Error::Disconnected)?);
            }
        }
        Ok(diameter)
    }

    /// Two-colourability by BFS, component by component.
    pub fn is_bipartite(&self) -> bool {
        let mut color: Vec<Option<bool>> = vec![None; self.node_count()];
        let mut queue = VecDeque::new();
        for start in 0..self.node_count() {
            if color[start].is_some() {
                continue;
            }
            color[start] = Some(false);
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                let cv = color[v].unwrap_or(false);
                for &u in &self.neighbors[v] {
                    match color[u] {
                        None => {
                            color[u] = Some(!cv);
                            queue.push_back(u);
                        }
                        Some(cu) if cu == cv => return false,
                        Some(_) => {}
                    }
                }
            }
        }
        true
    }

    /// Node nearest the centre of the positions' bounding box, lowest index
    /// on ties.
    pub fn central_node(&self) -> Option<usize> {
        if self.positions.is_empty() {
            return None;
        }
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &self.positions {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let centre = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.positions.iter().enumerate() {
            let d = distance(*p, centre);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        Some(best)
    }

    /// Breadth-first spanning tree rooted at [`Self::central_node`].
    /// Neighbours are visited in ascending index order.
    pub fn spanning_tree(&self) -> Result<NetworkGraph> {
        let Some(root) = self.central_node() else {
            return Ok(self.clone());
        };
        let n = self.node_count();
        let mut visited = vec![false; n];
        let mut edges = Vec::with_capacity(n.saturating_sub(1));
        let mut queue = VecDeque::from([root]);
        visited[root] = true;
        while let Some(v) = queue.pop_front() {
            for &u in &self.neighbors[v] {
                if !visited[u] {
                    visited[u] = true;
                    edges.push((v, u));
                    queue.push_back(u);
                }
            }
        }
        if edges.len() + 1 != n {
            return Err(Error::Disconnected);
        }
        NetworkGraph::from_edges(self.positions.clone(), self.comm_radius, self.sense_radius, &edges)
    }

    /// Structured-text export: a `graph` header, one `node` line per node and
    /// one `edge` line per edge, all 1-based.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "graph {} {} {}",
            self.node_count(),
            self.comm_radius,
            self.sense_radius
        );
        for (i, p) in self.positions.iter().enumerate() {
            let _ = writeln!(out, "node {} {} {}", i + 1, p[0], p[1]);
        }
        for (i, j) in self.edges() {
            let _ = writeln!(out, "edge {} {}", i + 1, j + 1);
        }
        out
    }

    /// Parse the format written by [`Self::to_text`]. Blank lines and lines
    /// starting with `#` are ignored. Edges are taken as listed, not derived
    /// from the radius.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut header: Option<(usize, f64, f64)> = None;
        let mut positions: Vec<Option<Point>> = Vec::new();
        let mut edges = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[0] {
                "graph" => {
                    if header.is_some() {
                        return Err(Error::parse(line_no, "duplicate graph header"));
                    }
                    let [_, n, big_r, small_r] = fields[..] else {
                        return Err(Error::parse(line_no, "expected `graph <nodes> <R> <r>`"));
                    };
                    let n: usize = parse_field(line_no, n)?;
                    if n > MAX_PARSED_NODES {
                        return Err(Error::parse(line_no, format!("too many nodes ({n})")));
                    }
                    let big_r: f64 = parse_field(line_no, big_r)?;
                    let small_r: f64 = parse_field(line_no, small_r)?;
                    check_radii(big_r, small_r).map_err(|e| Error::parse(line_no, e.to_string()))?;
                    header = Some((n, big_r, small_r));
                    positions = vec![None; n];
                }
                "node" => {
                    if header.is_none() {
                        return Err(Error::parse(line_no, "node before graph header"));
                    }
                    let [_, i, x, y] = fields[..] else {
                        return Err(Error::parse(line_no, "expected `node <index> <x> <y>`"));
                    };
                    let i = parse_label(line_no, i, positions.len())?;
                    let x: f64 = parse_field(line_no, x)?;
                    let y: f64 = parse_field(line_no, y)?;
                    if !(x.is_finite() && y.is_finite()) {
                        return Err(Error::parse(line_no, "non-finite coordinate"));
                    }
                    if positions[i].replace([x, y]).is_some() {
                        return Err(Error::parse(line_no, format!("node {} listed twice", i + 1)));
                    }
                }
                "edge" => {
                    if header.is_none() {
                        return Err(Error::parse(line_no, "edge before graph header"));
                    }
                    let [_, a, b] = fields[..] else {
                        return Err(Error::parse(line_no, "expected `edge <i> <j>`"));
                    };
                    let a = parse_label(line_no, a, positions.len())?;
                    let b = parse_label(line_no, b, positions.len())?;
                    if a == b {
                        return Err(Error::parse(line_no, "self-loop"));
                    }
                    edges.push((a, b));
                }
                other => {
                    return Err(Error::parse(line_no, format!("unknown record `{other}`")));
                }
            }
        }

        let (_, big_r, small_r) = header.ok_or_else(|| Error::parse(0, "missing graph header"))?;
        let positions = positions
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.ok_or_else(|| Error::parse(0, format!("node {} missing", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        NetworkGraph::from_edges(positions, big_r, small_r, &edges)
    }
}

fn parse_field<T: FromStr>(line: usize, field: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::parse(line, format!("cannot parse `{field}`")))
}

fn parse_label(line: usize, field: &str, n: usize) -> Result<usize> {
    let label: usize = parse_field(line, field)?;
    if label == 0 || label > n {
        return Err(Error::parse(line, format!("node label {label} outside 1..={n}")));
    }
    Ok(label - 1)
}

/// Jittered-grid deployment parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiRandomParams {
    pub rows: usize,
    pub cols: usize,
    /// Deployment extent `[width, height]` in metres.
    pub area: [f64; 2],
    /// Standard deviation of the per-coordinate Gaussian jitter.
    pub jitter_std: f64,
    pub comm_radius: f64,
    pub sense_radius: f64,
}

impl SemiRandomParams {
    /// Grid pitch along each axis: nodes sit at cell centres.
    pub fn spacing(&self) -> [f64; 2] {
        [self.area[0] / self.cols as f64, self.area[1] / self.rows as f64]
    }

    /// 15% of the smaller grid pitch.
    pub fn default_jitter(&self) -> f64 {
        let s = self.spacing();
        0.15 * s[0].min(s[1])
    }
}

/// Regular `rows × cols` grid of cell centres over the area, each coordinate
/// perturbed by independent zero-mean Gaussian jitter and clamped to the
/// area. Node `row * cols + col`.
pub fn generate_semi_random(params: &SemiRandomParams, seed: u64) -> Result<NetworkGraph> {
    let SemiRandomParams {
        rows,
        cols,
        area,
        jitter_std,
        comm_radius,
        sense_radius,
    } = *params;
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(Error::invalid(format!("grid {rows}x{cols} needs at least two nodes")));
    }
    if !(area[0] > 0.0 && area[1] > 0.0 && area[0].is_finite() && area[1].is_finite()) {
        return Err(Error::invalid(format!("area {}x{}", area[0], area[1])));
    }
    if !(jitter_std.is_finite() && jitter_std >= 0.0) {
        return Err(Error::invalid(format!("jitter std {jitter_std}")));
    }
    let spacing = params.spacing();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions = Vec::with_capacity(rows * cols);
    for row in 0..rows {
        for col in 0..cols {
            let base = [(col as f64 + 0.5) * spacing[0], (row as f64 + 0.5) * spacing[1]];
            let mut p = [0.0; 2];
            for k in 0..2 {
                let z: f64 = StandardNormal.sample(&mut rng);
                p[k] = (base[k] + jitter_std * z).clamp(0.0, area[k]);
            }
            positions.push(p);
        }
    }
    NetworkGraph::geometric(positions, comm_radius, sense_radius)
}

/// Draw semi-random graphs until one is connected. Attempt `k` uses the seed
/// `seed + k`. Returns the graph and the number of attempts taken.
pub fn generate_connected(params: &SemiRandomParams, seed: u64, max_attempts: usize) -> Result<(NetworkGraph, usize)> {
    for attempt in 0..max_attempts.max(1) {
        let g = generate_semi_random(params, seed.wrapping_add(attempt as u64))?;
        if g.is_connected() {
            return Ok((g, attempt + 1));
        }
    }
    Err(Error::RetriesExhausted(max_attempts.max(1)))
}

/// Small topologies for the overcounting analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleKind {
    /// Complete graph on `k` nodes.
    Clique(usize),
    /// Single cycle, `k` even.
    EvenCycle(usize),
    /// Single cycle, `k` odd.
    OddCycle(usize),
    /// Six-node cycle plus `n` extra nodes, each closing a triangle over the
    /// edge between nodes 1 and 6.
    ShortLoop(usize),
}

impl FromStr for ExampleKind {
    type Err = Error;

    /// Accepts `clique:K`, `even-cycle:K`, `odd-cycle:K` and `short-loop:N`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, size) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("example kind `{s}` must look like name:size")))?;
        let size: usize = size
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("example size `{size}`")))?;
        match name.trim() {
            "clique" => Ok(ExampleKind::Clique(size)),
            "even-cycle" => Ok(ExampleKind::EvenCycle(size)),
            "odd-cycle" => Ok(ExampleKind::OddCycle(size)),
            "short-loop" => Ok(ExampleKind::ShortLoop(size)),
            other => Err(Error::invalid(format!("unknown example kind `{other}`"))),
        }
    }
}

/// Cycle visiting order under the labelling of the builtin examples:
/// node 1 on top, then labels assigned layer by layer in alternating
/// direction, so the 5-cycle reads 1-2-5-4-3 and the 4-cycle 1-2-4-3.
fn labelled_cycle_order(k: usize) -> Vec<usize> {
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut bottom = None;
    let mut next = 1;
    let mut left_first = true;
    let mut remaining = k - 1;
    while remaining > 0 {
        if remaining == 1 {
            bottom = Some(next);
            remaining = 0;
        } else {
            let (a, b) = (next, next + 1);
            if left_first {
                left.push(a);
                right.push(b);
            } else {
                right.push(a);
                left.push(b);
            }
            next += 2;
            remaining -= 2;
            left_first = !left_first;
        }
    }
    let mut order = vec![0];
    order.extend(&left);
    order.extend(bottom);
    order.extend(right.iter().rev());
    order
}

fn ring_positions(k: usize) -> Vec<Point> {
    (0..k)
        .map(|i| {
            let angle = std::f64::consts::TAU * i as f64 / k as f64;
            [10.0 * angle.sin(), 10.0 * angle.cos()]
        })
        .collect()
}

fn cycle_graph(k: usize) -> Result<NetworkGraph> {
    let order = labelled_cycle_order(k);
    let mut positions = vec![[0.0; 2]; k];
    for (slot, p) in order.iter().zip(ring_positions(k)) {
        positions[*slot] = p;
    }
    let edges: Vec<(usize, usize)> = (0..k).map(|i| (order[i], order[(i + 1) % k])).collect();
    NetworkGraph::from_edges(positions, 0.0, 0.0, &edges)
}

/// Build one of the example topologies. Radii are zero: example graphs are
/// defined by their edge lists.
pub fn example_graph(kind: ExampleKind) -> Result<NetworkGraph> {
    match kind {
        ExampleKind::Clique(k) => {
            if k < 1 {
                return Err(Error::invalid("clique needs at least one node"));
            }
            let edges: Vec<_> = (0..k).flat_map(|i| ((i + 1)..k).map(move |j| (i, j))).collect();
            NetworkGraph::from_edges(ring_positions(k), 0.0, 0.0, &edges)
        }
        ExampleKind::EvenCycle(k) => {
            if k < 3 || k % 2 != 0 {
                return Err(Error::invalid(format!("even cycle needs an even k >= 4, got {k}")));
            }
            cycle_graph(k)
        }
        ExampleKind::OddCycle(k) => {
            if k < 3 || k % 2 != 1 {
                return Err(Error::invalid(format!("odd cycle needs an odd k >= 3, got {k}")));
            }
            cycle_graph(k)
        }
        ExampleKind::ShortLoop(extra) => {
            // Hexagon 1..6 with the 1-6 edge on the left; loop nodes stack
            // outward from that edge.
            let mut positions: Vec<Point> = vec![
                [0.0, 10.0],
                [8.66, 5.0],
                [8.66, -5.0],
                [0.0, -10.0],
                [-8.66, -5.0],
                [-8.66, 5.0],
            ];
            let mut edges: Vec<(usize, usize)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
            for s in 0..extra {
                let node = positions.len();
                positions.push([-8.66 - 6.0 * (s as f64 + 1.0), 2.5 + 5.0 * s as f64]);
                edges.push((0, node));
                edges.push((5, node));
            }
            NetworkGraph::from_edges(positions, 0.0, 0.0, &edges)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> NetworkGraph {
        let positions = (0..n).map(|i| [i as f64, 0.0]).collect();
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        NetworkGraph::from_edges(positions, 1.0, 1.0, &edges).unwrap()
    }

    fn star(leaves: usize) -> NetworkGraph {
        let positions = (0..=leaves).map(|i| [i as f64, 0.0]).collect();
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        NetworkGraph::from_edges(positions, 1.0, 1.0, &edges).unwrap()
    }

    fn grid_params(rows: usize, cols: usize, jitter: f64, r: f64) -> SemiRandomParams {
        SemiRandomParams {
            rows,
            cols,
            area: [100.0, 100.0],
            jitter_std: jitter,
            comm_radius: r,
            sense_radius: r.min(25.0),
        }
    }

    #[test]
    fn default_grid_has_25_nodes() {
        let p = grid_params(5, 5, 3.0, 45.0);
        let g = generate_semi_random(&p, 7).unwrap();
        assert_eq!(g.node_count(), 25);
        for q in g.positions() {
            assert!((0.0..=100.0).contains(&q[0]) && (0.0..=100.0).contains(&q[1]));
        }
    }

    #[test]
    fn zero_radius_isolates_nodes() {
        let p = grid_params(5, 5, 0.0, 0.0);
        let g = generate_semi_random(&p, 1).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert!(!g.is_connected());
    }

    #[test]
    fn two_node_grid_single_edge() {
        let p = SemiRandomParams {
            rows: 1,
            cols: 2,
            area: [40.0, 20.0],
            jitter_std: 0.0,
            comm_radius: 25.0,
            sense_radius: 25.0,
        };
        assert_eq!(p.spacing(), [20.0, 20.0]);
        let g = generate_semi_random(&p, 0).unwrap();
        assert_eq!(g.edges(), vec![(0, 1)]);
        assert_eq!(g.degree_metrics().degrees, vec![1, 1]);
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(generate_semi_random(&grid_params(1, 1, 0.0, 10.0), 0).is_err());
        assert!(generate_semi_random(&grid_params(0, 5, 0.0, 10.0), 0).is_err());
        let mut p = grid_params(2, 2, 0.0, 10.0);
        p.area = [0.0, 10.0];
        assert!(generate_semi_random(&p, 0).is_err());
        p.area = [10.0, 10.0];
        p.sense_radius = 20.0;
        assert!(generate_semi_random(&p, 0).is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let p = grid_params(5, 5, 3.0, 45.0);
        assert_eq!(
            generate_semi_random(&p, 11).unwrap(),
            generate_semi_random(&p, 11).unwrap()
        );
        assert_ne!(
            generate_semi_random(&p, 11).unwrap(),
            generate_semi_random(&p, 12).unwrap()
        );
    }

    #[test]
    fn unjittered_grid_is_connected() {
        let g = generate_semi_random(&grid_params(5, 5, 0.0, 20.0), 0).unwrap();
        assert!(g.is_connected());
        // 4-neighbour lattice: 2 * 5 * 4 edges.
        assert_eq!(g.edge_count(), 40);
        assert_eq!(g.diameter().unwrap(), 8);
    }

    #[test]
    fn connectivity_edge_cases() {
        let single = NetworkGraph::from_edges(vec![[0.0, 0.0]], 1.0, 1.0, &[]).unwrap();
        assert!(single.is_connected());
        let pair = NetworkGraph::from_edges(vec![[0.0, 0.0], [5.0, 0.0]], 1.0, 1.0, &[]).unwrap();
        assert!(!pair.is_connected());
        assert!(matches!(pair.diameter(), Err(Error::Disconnected)));
        assert!(matches!(pair.spanning_tree(), Err(Error::Disconnected)));
    }

    #[test]
    fn diameters() {
        assert_eq!(example_graph(ExampleKind::Clique(6)).unwrap().diameter().unwrap(), 1);
        assert_eq!(example_graph(ExampleKind::EvenCycle(4)).unwrap().diameter().unwrap(), 2);
        assert_eq!(path(7).diameter().unwrap(), 6);
    }

    #[test]
    fn degree_metrics_basic() {
        let k5 = example_graph(ExampleKind::Clique(5)).unwrap().degree_metrics();
        assert_eq!(k5.degrees, vec![4; 5]);
        let s = star(3).degree_metrics();
        assert_eq!(s.max, 3);
        assert!((s.mean - 1.5).abs() < 1e-15);
    }

    #[test]
    fn bipartite_checks() {
        assert!(example_graph(ExampleKind::EvenCycle(4)).unwrap().is_bipartite());
        assert!(!example_graph(ExampleKind::OddCycle(5)).unwrap().is_bipartite());
        assert!(path(6).is_bipartite());
        assert!(star(4).is_bipartite());
        assert!(!example_graph(ExampleKind::Clique(3)).unwrap().is_bipartite());
    }

    #[test]
    fn spanning_tree_of_triangle() {
        let k3 = example_graph(ExampleKind::Clique(3)).unwrap();
        let t = k3.spanning_tree().unwrap();
        assert_eq!(t.edge_count(), 2);
        assert!(t.is_connected());
    }

    #[test]
    fn spanning_tree_of_tree_is_identity() {
        let p = path(6);
        assert_eq!(p.spanning_tree().unwrap().edges(), p.edges());
        let s = star(5);
        assert_eq!(s.spanning_tree().unwrap().edges(), s.edges());
    }

    #[test]
    fn spanning_tree_rooted_at_centre() {
        let g = generate_semi_random(&grid_params(5, 5, 0.0, 20.0), 0).unwrap();
        assert_eq!(g.central_node(), Some(12));
        let t = g.spanning_tree().unwrap();
        assert_eq!(t.degree(12), 4);
        // BFS tree from the centre of a 4-lattice: depth 4, diameter 8.
        assert_eq!(t.diameter().unwrap(), 8);
    }

    #[test]
    fn example_graph_shapes() {
        let k4 = example_graph(ExampleKind::Clique(4)).unwrap();
        assert_eq!((k4.edge_count(), k4.diameter().unwrap()), (6, 1));
        let c5 = example_graph(ExampleKind::OddCycle(5)).unwrap();
        assert_eq!((c5.edge_count(), c5.diameter().unwrap()), (5, 2));
        // Builtin labelling: 1-2-5-4-3.
        assert_eq!(c5.neighbors(0), &[1, 2]);
        assert_eq!(c5.neighbors(1), &[0, 4]);
        assert_eq!(c5.neighbors(2), &[0, 3]);
        let c4 = example_graph(ExampleKind::EvenCycle(4)).unwrap();
        assert_eq!(c4.neighbors(3), &[1, 2]);
        let sl1 = example_graph(ExampleKind::ShortLoop(1)).unwrap();
        assert_eq!((sl1.node_count(), sl1.diameter().unwrap()), (7, 3));
        let d = sl1.degree_metrics().degrees;
        assert_eq!((d[0], d[5]), (3, 3));
        let sl2 = example_graph(ExampleKind::ShortLoop(2)).unwrap();
        assert_eq!((sl2.node_count(), sl2.diameter().unwrap()), (8, 3));
        assert!(sl2.has_edge(7, 0) && sl2.has_edge(7, 5));
    }

    #[test]
    fn example_graph_rejects_small_cycles() {
        assert!(example_graph(ExampleKind::OddCycle(1)).is_err());
        assert!(example_graph(ExampleKind::EvenCycle(2)).is_err());
        assert!(example_graph(ExampleKind::EvenCycle(5)).is_err());
        assert!(example_graph(ExampleKind::OddCycle(6)).is_err());
    }

    #[test]
    fn example_kind_parsing() {
        assert_eq!("clique:4".parse::<ExampleKind>().unwrap(), ExampleKind::Clique(4));
        assert_eq!(
            "short-loop:2".parse::<ExampleKind>().unwrap(),
            ExampleKind::ShortLoop(2)
        );
        assert!("triangle:3".parse::<ExampleKind>().is_err());
        assert!("clique".parse::<ExampleKind>().is_err());
    }

    #[test]
    fn text_roundtrip_and_errors() {
        let g = generate_semi_random(&grid_params(3, 4, 2.0, 40.0), 5).unwrap();
        let back = NetworkGraph::parse_text(&g.to_text()).unwrap();
        assert_eq!(back, g);

        let bad = [
            "node 1 0 0\n",
            "graph 2 10 5\nnode 1 0 0\n",
            "graph 2 10 5\nnode 1 0 0\nnode 2 1 1\nedge 1 3\n",
            "graph 2 10 5\nnode 1 0 0\nnode 1 1 1\n",
            "graph 2 5 10\nnode 1 0 0\nnode 2 1 1\n",
            "graph 1 5 5\nnode 1 0 0\nedge 1 1\n",
            "graph 1 5 5\nnode 1 nan 0\n",
            "graph 1 5 5\nvertex 1 0 0\n",
        ];
        for text in bad {
            assert!(NetworkGraph::parse_text(text).is_err(), "{text:?}");
        }
    }
}
