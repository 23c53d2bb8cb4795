//! Overcounting exponents of BP consensus.
//!
//! The BP recursion is linear in the initial log-likelihoods, so after any
//! number of iterations node `n` holds `Σ_u α_{u,n} · log p(y_u | x)` for
//! integer exponents `α`. Running the recursion on indicator vectors with
//! exact integer arithmetic yields those exponents; `α = 1` everywhere means
//! every node recovered the exact global likelihood.

use std::fmt::Write as _;

use crate::topology::NetworkGraph;
use crate::{Error, Result};

/// `α_{u,n}` for every source `u` and node `n` at one iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaMatrix {
    nodes: usize,
    /// Row `n` holds node `n`'s exponent vector over sources.
    exponents: Vec<u64>,
    pub iteration: usize,
}

impl AlphaMatrix {
    fn from_signed(nodes: usize, signed: &[i64], iteration: usize) -> Result<Self> {
        let mut exponents = Vec::with_capacity(signed.len());
        for (k, &v) in signed.iter().enumerate() {
            if v < 0 {
                return Err(Error::NegativeExponent {
                    origin: k % nodes,
                    node: k / nodes,
                });
            }
            exponents.push(v as u64);
        }
        Ok(Self {
            nodes,
            exponents,
            iteration,
        })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Multiplicity of `source`'s likelihood in `node`'s belief.
    pub fn get(&self, source: usize, node: usize) -> u64 {
        self.exponents[node * self.nodes + source]
    }

    /// Exponent vector of `node` over all sources.
    pub fn belief(&self, node: usize) -> &[u64] {
        &self.exponents[node * self.nodes..(node + 1) * self.nodes]
    }

    pub fn max(&self) -> u64 {
        self.exponents.iter().copied().max().unwrap_or(0)
    }

    pub fn all_ones(&self) -> bool {
        self.exponents.iter().all(|&a| a == 1)
    }

    /// `Σ_u α_{u,n} v_u` for a numeric initial vector `v`.
    pub fn apply(&self, node: usize, v: &[f64]) -> f64 {
        self.belief(node).iter().zip(v).map(|(&a, &x)| a as f64 * x).sum()
    }

    /// Belief of `node` as a product of `φ` factors, e.g. `φ1φ2φ4^2`.
    /// Sources are 1-based.
    pub fn factor_string(&self, node: usize) -> String {
        let mut out = String::new();
        for (u, &a) in self.belief(node).iter().enumerate() {
            match a {
                0 => {}
                1 => {
                    let _ = write!(out, "φ{}", u + 1);
                }
                _ => {
                    let _ = write!(out, "φ{}^{}", u + 1, a);
                }
            }
        }
        if out.is_empty() {
            out.push('1');
        }
        out
    }

    /// Matrix layout: one line per node, exponents over sources 1..N.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for n in 0..self.nodes {
            let cells: Vec<String> = self.belief(n).iter().map(u64::to_string).collect();
            let _ = writeln!(out, "node {}: {}", n + 1, cells.join(" "));
        }
        out
    }
}

/// Symbolic BP recursion, returning slots `1..=iterations`.
pub fn bp_symbolic_table(g: &NetworkGraph, iterations: usize) -> Result<Vec<AlphaMatrix>> {
    if iterations == 0 {
        return Err(Error::invalid("iterations must be at least 1"));
    }
    let n = g.node_count();
    let mut identity = vec![0i64; n * n];
    for k in 0..n {
        identity[k * n + k] = 1;
    }
    let mut history = vec![AlphaMatrix::from_signed(n, &identity, 1)?];
    if iterations == 1 {
        return Ok(history);
    }

    let mut second = identity.clone();
    for node in 0..n {
        for &u in g.neighbors(node) {
            for s in 0..n {
                second[node * n + s] += identity[u * n + s];
            }
        }
    }
    history.push(AlphaMatrix::from_signed(n, &second, 2)?);

    let (mut older, mut newer) = (identity, second);
    for i in 3..=iterations {
        let mut next = older.clone();
        for node in 0..n {
            for &u in g.neighbors(node) {
                for s in 0..n {
                    next[node * n + s] += newer[u * n + s] - older[node * n + s];
                }
            }
        }
        history.push(AlphaMatrix::from_signed(n, &next, i)?);
        older = std::mem::replace(&mut newer, next);
    }
    Ok(history)
}

/// Exponents at one iteration index.
pub fn alpha_exponents(g: &NetworkGraph, iterations: usize) -> Result<AlphaMatrix> {
    let mut history = bp_symbolic_table(g, iterations)?;
    Ok(history.pop().expect("at least one slot"))
}

/// Largest exponent after `diameter + 1` iterations.
pub fn alpha_max(g: &NetworkGraph) -> Result<u64> {
    let d = g.diameter()?;
    Ok(alpha_exponents(g, d + 1)?.max())
}

/// Per-iteration table with one row per node and one column per iteration,
/// each cell the belief's factor list.
pub fn render_iteration_table(history: &[AlphaMatrix]) -> String {
    let mut out = String::new();
    let header: Vec<String> = history.iter().map(|m| format!("iter. {}", m.iteration)).collect();
    let _ = writeln!(out, "node | {}", header.join(" | "));
    let nodes = history.first().map_or(0, AlphaMatrix::nodes);
    for n in 0..nodes {
        let cells: Vec<String> = history.iter().map(|m| m.factor_string(n)).collect();
        let _ = writeln!(out, "{} | {}", n + 1, cells.join(" | "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{example_graph, ExampleKind};

    #[test]
    fn clique_alpha_is_one() {
        let g = example_graph(ExampleKind::Clique(5)).unwrap();
        let a = alpha_exponents(&g, 2).unwrap();
        assert!(a.all_ones());
        assert_eq!(alpha_max(&g).unwrap(), 1);
    }

    #[test]
    fn even_cycle_double_counts_opposite_node() {
        let g = example_graph(ExampleKind::EvenCycle(4)).unwrap();
        let a = alpha_exponents(&g, 3).unwrap();
        assert_eq!(a.max(), 2);
        assert_eq!(a.get(3, 0), 2);
        assert_eq!(a.factor_string(0), "φ1φ2φ3φ4^2");
    }

    #[test]
    fn odd_cycle_is_exact_at_three() {
        let g = example_graph(ExampleKind::OddCycle(5)).unwrap();
        assert!(alpha_exponents(&g, 3).unwrap().all_ones());
    }

    #[test]
    fn short_loop_family() {
        for (extra, expected) in [(1, 3), (2, 5), (3, 7)] {
            let g = example_graph(ExampleKind::ShortLoop(extra)).unwrap();
            assert_eq!(alpha_max(&g).unwrap(), expected, "N_sh = {extra}");
        }
        let g = example_graph(ExampleKind::ShortLoop(1)).unwrap();
        let a = alpha_exponents(&g, 4).unwrap();
        assert_eq!((a.get(0, 0), a.get(5, 5)), (3, 3));
    }

    #[test]
    fn five_cycle_table_layout() {
        let g = example_graph(ExampleKind::OddCycle(5)).unwrap();
        let table = render_iteration_table(&bp_symbolic_table(&g, 3).unwrap());
        let expected = "\
node | iter. 1 | iter. 2 | iter. 3
1 | φ1 | φ1φ2φ3 | φ1φ2φ3φ4φ5
2 | φ2 | φ1φ2φ5 | φ1φ2φ3φ4φ5
3 | φ3 | φ1φ3φ4 | φ1φ2φ3φ4φ5
4 | φ4 | φ3φ4φ5 | φ1φ2φ3φ4φ5
5 | φ5 | φ2φ4φ5 | φ1φ2φ3φ4φ5
";
        assert_eq!(table, expected);
    }

    #[test]
    fn first_slot_is_identity() {
        let g = example_graph(ExampleKind::ShortLoop(2)).unwrap();
        let a = alpha_exponents(&g, 1).unwrap();
        for n in 0..g.node_count() {
            for u in 0..g.node_count() {
                assert_eq!(a.get(u, n), u64::from(u == n));
            }
        }
    }

    #[test]
    fn zero_iterations_rejected() {
        let g = example_graph(ExampleKind::Clique(3)).unwrap();
        assert!(bp_symbolic_table(&g, 0).is_err());
    }

    #[test]
    fn below_diameter_leaves_zeros() {
        let g = example_graph(ExampleKind::OddCycle(7)).unwrap();
        let a = alpha_exponents(&g, 2).unwrap();
        assert_eq!(a.belief(0).iter().filter(|&&x| x == 0).count(), 4);
        assert_eq!(a.factor_string(0), "φ1φ2φ3");
    }
}
