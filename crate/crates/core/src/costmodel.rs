//! Packets broadcast per node per time slot by DPF and NCPF.

use crate::topology::NetworkGraph;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CostInputs {
    /// Particles (weights exchanged per iteration).
    pub particles: u64,
    /// Scalars per packet.
    pub packet_size: u64,
    /// Graph diameter in hops.
    pub diameter: u64,
    /// Average node degree.
    pub mean_degree: f64,
    /// Scalars of local data flooded by NCPF.
    pub data_scalars: u64,
    /// Consensus iterations.
    pub iterations: u64,
}

impl CostInputs {
    pub fn validate(&self) -> Result<()> {
        if self.packet_size == 0 {
            return Err(Error::invalid("packet size must be positive"));
        }
        if !(self.mean_degree.is_finite() && self.mean_degree >= 0.0) {
            return Err(Error::invalid(format!("mean degree {}", self.mean_degree)));
        }
        Ok(())
    }

    /// The same inputs with `iterations = diameter + 1`.
    pub fn with_matched_iterations(&self) -> Self {
        Self {
            iterations: self.diameter + 1,
            ..self.clone()
        }
    }
}

/// `⌈N_p/P⌉·(D_g + N_it − 1)`.
pub fn dpf_cost(c: &CostInputs) -> u64 {
    c.particles.div_ceil(c.packet_size) * (c.diameter + c.iterations).saturating_sub(1)
}

/// `⌈x / P⌉` for a non-negative real payload.
fn packets_for(payload: f64, packet_size: u64) -> u64 {
    (payload / packet_size as f64).ceil() as u64
}

/// Flooding cost with every node's degree approximated by `degree`:
/// `Σ_{k<D_g} ⌈degree^k · N_data / P⌉`.
fn flooding_cost(degree: f64, diameter: u64, data_scalars: u64, packet_size: u64) -> u64 {
    let mut total = 0;
    let mut spread = 1.0;
    for _ in 0..diameter {
        total += packets_for(spread * data_scalars as f64, packet_size);
        spread *= degree;
    }
    total
}

/// `Σ_{k=0}^{D_g−1} ⌈η̄^k·N_data/P⌉`.
pub fn ncpf_cost(c: &CostInputs) -> u64 {
    flooding_cost(c.mean_degree, c.diameter, c.data_scalars, c.packet_size)
}

/// Whether DPF needs fewer packets than NCPF when `N_it = D_g + 1`:
/// `⌈N_p/P⌉ < (1/(2 D_g)) Σ_k ⌈η̄^k N_data/P⌉`, compared in integers.
pub fn dpf_preferred(c: &CostInputs) -> bool {
    let lhs = c.particles.div_ceil(c.packet_size) * 2 * c.diameter;
    lhs < ncpf_cost(c)
}

/// NCPF cost averaged over nodes, each node's own degree standing in for
/// the network average.
pub fn ncpf_cost_per_node(g: &NetworkGraph, diameter: u64, data_scalars: u64, packet_size: u64) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    let total: u64 = (0..n)
        .map(|v| flooding_cost(g.degree(v) as f64, diameter, data_scalars, packet_size))
        .sum();
    total as f64 / n as f64
}
