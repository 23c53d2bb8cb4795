//! Belief consensus over a per-node × per-particle table of log-beliefs.
//!
//! All algorithms work in the log domain, where products of beliefs become
//! sums and the geometric averages of the averaging family become
//! arithmetic means:
//!
//! - SBC: constant-weight synchronous averaging.
//! - RG: randomized pairwise gossip.
//! - BG: broadcast gossip with mixing parameter `γ(η̄) = 1 − a·exp(−b·η̄)`.
//! - MBC: synchronous averaging with Metropolis (local-degree) weights.
//! - BP: two-slot belief-propagation recursion, which targets the full
//!   product rather than its `N_s`-th root.
//!
//! Max-consensus floods the entrywise maximum and is exact after
//! `diameter` rounds.
//!
//! `ConsensusSpec::iterations` is the iteration index reached by a run.
//! Index 1 is the initialization from the local likelihoods, so the
//! synchronous algorithms perform `iterations - 1` exchange rounds. The
//! gossip algorithms instead receive the cost-matched tick budgets
//! `⌈iterations·N_s/2⌉` (RG) and `iterations·N_s` (BG).

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::Rng;

use crate::dynamics::{local_log_likelihood, MixtureNoise, ObservationSet};
use crate::filter::ParticleSet;
use crate::numerics::clamp_log;
use crate::topology::NetworkGraph;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LogBeliefTable {
    nodes: usize,
    particles: usize,
    values: Vec<f64>,
    /// Iteration index of the synchronous recursion (1 after init).
    pub iteration: usize,
    /// Gossip ticks consumed so far.
    pub ticks: usize,
}

impl LogBeliefTable {
    /// Row-major `nodes × particles` values.
    pub fn from_rows(nodes: usize, particles: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != nodes * particles {
            return Err(Error::invalid(format!(
                "{} values for a {nodes}x{particles} table",
                values.len()
            )));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::invalid("NaN log-belief"));
        }
        Ok(Self {
            nodes,
            particles,
            values: values.into_iter().map(clamp_log).collect(),
            iteration: 1,
            ticks: 0,
        })
    }

    pub fn zeros(nodes: usize, particles: usize) -> Self {
        Self {
            nodes,
            particles,
            values: vec![0.0; nodes * particles],
            iteration: 1,
            ticks: 0,
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.values[n * self.particles + m]
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.values[n * self.particles..(n + 1) * self.particles]
    }

    pub fn row_mut(&mut self, n: usize) -> &mut [f64] {
        &mut self.values[n * self.particles..(n + 1) * self.particles]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.particles];
        for n in 0..self.nodes {
            for (s, v) in sums.iter_mut().zip(self.row(n)) {
                *s += v;
            }
        }
        sums
    }

    pub fn column_means(&self) -> Vec<f64> {
        let k = self.nodes as f64;
        self.column_sums().into_iter().map(|s| s / k).collect()
    }

    /// Table whose every row is `row`.
    pub fn broadcast_row(nodes: usize, row: &[f64]) -> Self {
        let mut values = Vec::with_capacity(nodes * row.len());
        for _ in 0..nodes {
            values.extend_from_slice(row);
        }
        Self {
            nodes,
            particles: row.len(),
            values: values.into_iter().map(clamp_log).collect(),
            iteration: 1,
            ticks: 0,
        }
    }

    /// Per node: max over particles of `L[n][m] − min_u L[u][m]`. The maximum
    /// over nodes is [`Self::disagreement`].
    pub fn node_disagreement(&self) -> Vec<f64> {
        let mut col_min = vec![f64::INFINITY; self.particles];
        for n in 0..self.nodes {
            for (c, v) in col_min.iter_mut().zip(self.row(n)) {
                *c = c.min(*v);
            }
        }
        (0..self.nodes)
            .map(|n| self.row(n).iter().zip(&col_min).map(|(v, c)| v - c).fold(0.0, f64::max))
            .collect()
    }

    /// Max over particles of the spread `max_n L − min_n L`.
    pub fn disagreement(&self) -> f64 {
        self.node_disagreement().into_iter().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Sbc,
    Rg,
    Bg,
    Mbc,
    Bp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Sbc,
        Algorithm::Rg,
        Algorithm::Bg,
        Algorithm::Mbc,
        Algorithm::Bp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sbc => "sbc",
            Algorithm::Rg => "rg",
            Algorithm::Bg => "bg",
            Algorithm::Mbc => "mbc",
            Algorithm::Bp => "bp",
        }
    }

    /// Whether the algorithm converges to the `N_s`-th root of the product.
    pub fn averages(self) -> bool {
        !matches!(self, Algorithm::Bp)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::invalid(format!("unknown consensus algorithm `{s}`")))
    }
}

/// Graph quantities the algorithms are allowed to know in advance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioMetrics {
    pub nodes: usize,
    pub max_degree: usize,
    pub mean_degree: f64,
    pub diameter: usize,
    pub bipartite: bool,
}

impl ScenarioMetrics {
    pub fn of(g: &NetworkGraph) -> Result<Self> {
        let d = g.degree_metrics();
        Ok(Self {
            nodes: g.node_count(),
            max_degree: d.max,
            mean_degree: d.mean,
            diameter: g.diameter()?,
            bipartite: g.is_bipartite(),
        })
    }
}

/// Which Metropolis weight variant to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BipartiteMode {
    /// `+1` correction iff the graph is bipartite.
    #[default]
    Auto,
    Corrected,
    Uncorrected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusSpec {
    pub algorithm: Algorithm,
    /// Iteration index `N_it` (see the module docs).
    pub iterations: usize,
    /// SBC update rate; `None` means `1/(η_max + 1)`.
    pub xi: Option<f64>,
    /// BG mixing model parameters `(a, b)`.
    pub gamma_params: (f64, f64),
    pub metrics: ScenarioMetrics,
    pub bipartite: BipartiteMode,
    pub seed: u64,
}

impl ConsensusSpec {
    pub const DEFAULT_GAMMA_PARAMS: (f64, f64) = (0.49, 0.17);

    pub fn new(algorithm: Algorithm, iterations: usize, metrics: ScenarioMetrics) -> Self {
        Self {
            algorithm,
            iterations,
            xi: None,
            gamma_params: Self::DEFAULT_GAMMA_PARAMS,
            metrics,
            bipartite: BipartiteMode::Auto,
            seed: 0,
        }
    }

    /// Synchronous exchange rounds: `iterations - 1`.
    pub fn rounds(&self) -> usize {
        self.iterations.saturating_sub(1)
    }

    pub fn xi(&self) -> f64 {
        self.xi.unwrap_or_else(|| 1.0 / (self.metrics.max_degree as f64 + 1.0))
    }

    pub fn gamma(&self) -> f64 {
        bg_gamma(self.gamma_params.0, self.gamma_params.1, self.metrics.mean_degree)
    }

    pub fn rg_ticks(&self) -> usize {
        rg_ticks(self.iterations, self.metrics.nodes)
    }

    pub fn bg_ticks(&self) -> usize {
        bg_ticks(self.iterations, self.metrics.nodes)
    }

    pub fn use_bipartite_correction(&self) -> bool {
        match self.bipartite {
            BipartiteMode::Auto => self.metrics.bipartite,
            BipartiteMode::Corrected => true,
            BipartiteMode::Uncorrected => false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let xi = self.xi();
        if !(xi.is_finite() && xi > 0.0) {
            return Err(Error::invalid(format!("update rate {xi}")));
        }
        if self.algorithm == Algorithm::Bg {
            let g = self.gamma();
            if !(g > 0.0 && g < 1.0) {
                return Err(Error::invalid(format!(
                    "broadcast gossip mixing parameter {g} outside (0, 1)"
                )));
            }
        }
        Ok(())
    }
}

/// `γ(η̄) = 1 − a·exp(−b·η̄)`.
pub fn bg_gamma(a: f64, b: f64, mean_degree: f64) -> f64 {
    1.0 - a * (-b * mean_degree).exp()
}

/// `⌈N_it·N_s/2⌉`.
pub fn rg_ticks(iterations: usize, nodes: usize) -> usize {
    (iterations * nodes).div_ceil(2)
}

/// `N_it·N_s`.
pub fn bg_ticks(iterations: usize, nodes: usize) -> usize {
    iterations * nodes
}

/// Local log-likelihood of every particle at every node; zero rows for
/// nodes without a measurement.
pub fn init_beliefs(
    obs: &ObservationSet,
    particles: &ParticleSet,
    g: &NetworkGraph,
    noise: &MixtureNoise,
) -> LogBeliefTable {
    let mut table = LogBeliefTable::zeros(g.node_count(), particles.len());
    for n in obs.detecting_nodes() {
        for (v, x) in table.row_mut(n).iter_mut().zip(&particles.states) {
            *v = clamp_log(local_log_likelihood(g, noise, obs, n, x));
        }
    }
    table
}

/// Observer invoked after initialization and after every round or tick.
pub trait Observer {
    fn observe(&mut self, table: &LogBeliefTable);
}

impl<F: FnMut(&LogBeliefTable)> Observer for F {
    fn observe(&mut self, table: &LogBeliefTable) {
        self(table)
    }
}

struct Silent;

impl Observer for Silent {
    fn observe(&mut self, _: &LogBeliefTable) {}
}

/// One synchronous constant-weight round: `L_n += ξ Σ_{u∈G_n} (L_u − L_n)`.
pub fn sbc_round(b: &LogBeliefTable, g: &NetworkGraph, xi: f64) -> LogBeliefTable {
    let mut next = b.clone();
    for n in 0..b.nodes {
        let own = b.row(n);
        let out = next.row_mut(n);
        for &u in g.neighbors(n) {
            for ((o, &lu), &ln) in out.iter_mut().zip(b.row(u)).zip(own) {
                *o += xi * (lu - ln);
            }
        }
    }
    next.iteration += 1;
    next
}

fn run_sbc_observed(
    mut b: LogBeliefTable,
    g: &NetworkGraph,
    spec: &ConsensusSpec,
    obs: &mut dyn Observer,
) -> LogBeliefTable {
    let xi = spec.xi();
    obs.observe(&b);
    for _ in 0..spec.rounds() {
        b = sbc_round(&b, g, xi);
        obs.observe(&b);
    }
    b
}

pub fn run_sbc(b: LogBeliefTable, g: &NetworkGraph, spec: &ConsensusSpec) -> LogBeliefTable {
    run_sbc_observed(b, g, spec, &mut Silent)
}

/// One randomized-gossip tick: a uniform node and a uniform neighbour both
/// take the mean of their rows.
pub fn rg_tick<R: Rng + ?Sized>(b: &mut LogBeliefTable, g: &NetworkGraph, rng: &mut R) {
    b.ticks += 1;
    let nodes = b.nodes;
    if nodes == 0 {
        return;
    }
    let n = rng.random_range(0..nodes);
    let neighbors = g.neighbors(n);
    if neighbors.is_empty() {
        return;
    }
    let u = neighbors[rng.random_range(0..neighbors.len())];
    let p = b.particles;
    let (lo, hi) = (n.min(u), n.max(u));
    let (head, tail) = b.values.split_at_mut(hi * p);
    let a = &mut head[lo * p..(lo + 1) * p];
    let c = &mut tail[..p];
    for (x, y) in a.iter_mut().zip(c.iter_mut()) {
        let mean = 0.5 * (*x + *y);
        *x = mean;
        *y = mean;
    }
}

fn run_rg_observed<R: Rng + ?Sized>(
    mut b: LogBeliefTable,
    g: &NetworkGraph,
    spec: &ConsensusSpec,
    rng: &mut R,
    obs: &mut dyn Observer,
) -> LogBeliefTable {
    obs.observe(&b);
    for _ in 0..spec.rg_ticks() {
        rg_tick(&mut b, g, rng);
        obs.observe(&b);
    }
    b
}

pub fn run_rg<R: Rng + ?Sized>(
    b: LogBeliefTable,
    g: &NetworkGraph,
    spec: &ConsensusSpec,
    rng: &mut R,
) -> LogBeliefTable {
    run_rg_observed(b, g, spec, rng, &mut Silent)
}

/// One broadcast-gossip tick: a uniform broadcaster `n`; each neighbour
/// mixes `L_u ← γ L_u + (1 − γ) L_n`.
pub fn bg_tick<R: Rng + ?Sized>(b: &mut LogBeliefTable, g: &NetworkGraph, gamma: f64, rng: &mut R) {
    b.ticks += 1;
    if b.nodes == 0 {
        return;
    }
    let n = rng.random_range(0..b.nodes);
    let p = b.particles;
    let source: Vec<f64> = b.row(n).to_vec();
    for &u in g.neighbors(n) {
        let row = &mut b.values[u * p..(u + 1) * p];
        for (x, s) in row.iter_mut().zip(&source) {
            *x = gamma * *x + (1.0 - gamma) * s;
        }
    }
}

fn run_bg_observed<R: Rng + ?Sized>(
    mut b: LogBeliefTable,
    g: &NetworkGraph,
    spec: &ConsensusSpec,
    rng: &mut R,
    obs: &mut dyn Observer,
) -> LogBeliefTable {
    let gamma = spec.gamma();
    obs.observe(&b);
    for _ in 0..spec.bg_ticks() {
        bg_tick(&mut b, g, gamma, rng);
        obs.observe(&b);
    }
    b
}

pub fn run_bg<R: Rng + ?Sized>(
    b: LogBeliefTable,
    g: &NetworkGraph,
    spec: &ConsensusSpec,
    rng: &mut R,
) -> LogBeliefTable {
    run_bg_observed(b, g, spec, rng, &mut Silent)
}

/// Metropolis weights: `(neighbour weights per node, self weight per node)`.
pub fn metropolis_weights(g: &NetworkGraph, corrected: bool) -> (Vec<Vec<f64>>, Vec<f64>) {
    let extra = if corrected { 1.0 } else { 0.0 };
    let mut edge_weights = Vec::with_capacity(g.node_count());
    let mut self_weights = Vec::with_capacity(g.node_count());
    for n in 0..g.node_count() {
        let w: Vec<f64> = g
            .neighbors(n)
            .iter()
            .map(|&u| 1.0 / (g.degree(n).max(g.degree(u)) as f64 + extra))
            .collect();
        self_weights.push(1.0 - w.iter().sum::<f64>());
        edge_weights.push(w);
    }
    (edge_weights, self_weights)
}

/// One Metropolis round, written as `L_n += Σ_u ξ_nu (L_u − L_n)`, which
/// equals `ξ_nn L_n + Σ_u ξ_nu L_u`.
pub fn mbc_round(b: &LogBeliefTable, g: &NetworkGraph, edge_weights: &[Vec<f64>]) -> LogBeliefTable {
    let mut next = b.clone();
    for n in 0..b.nodes {
        let own = b.row(n);
        let out = next.row_mut(n);
        for (&u, &w) in g.neighbors(n).iter().zip(&edge_weights[n]) {
            for ((o, &lu), &ln) in out.iter_mut().zip(b.row(u)).zip(own) {
                *o += w * (lu - ln);
            }
        }
    }
    next.iteration += 1;
    next
}

fn run_mbc_observed(
    mut b: LogBeliefTable,
    g: &NetworkGraph,
    spec: &ConsensusSpec,
    obs: &mut dyn Observer,
) -> LogBeliefTable {
    let (edge_weights, _) = metropolis_weights(g, spec.use_bipartite_correction());
    obs.observe(&b);
    for _ in 0..spec.rounds() {
        b = mbc_round(&b, g, &edge_weights);
        obs.observe(&b);
    }
    b
}

pub fn run_mbc(b: LogBeliefTable, g: &NetworkGraph, spec: &ConsensusSpec) -> LogBeliefTable {
    run_mbc_observed(b, g, spec, &mut Silent)
}

/// BP-consensus recursion.
///
/// Slot 2 is `L_n^(1) + Σ_u L_u^(1)`; from slot 3 on,
/// `L_n^(i) = L_n^(i−2) + Σ_u (L_u^(i−1) − L_n^(i−2))`.
fn run_bp_observed(b: LogBeliefTable, g: &NetworkGraph, target: usize, obs: &mut dyn Observer) -> LogBeliefTable {
    obs.observe(&b);
    if target <= 1 {
        return b;
    }
    let mut older = b.clone();
    let mut newer = b;
    {
        let mut second = newer.clone();
        for n in 0..newer.nodes {
            let out = second.row_mut(n);
            for &u in g.neighbors(n) {
                for (o, &lu) in out.iter_mut().zip(newer.row(u)) {
                    *o += lu;
                }
            }
        }
        second.iteration = 2;
        newer = second;
    }
    obs.observe(&newer);
    for i in 3..=target {
        let mut next = older.clone();
        for n in 0..newer.nodes {
            let base = older.row(n);
            let out = next.row_mut(n);
            for &u in g.neighbors(n) {
                for ((o, &lu), &ln) in out.iter_mut().zip(newer.row(u)).zip(base) {
                    *o += lu - ln;
                }
            }
        }
        next.iteration = i;
        older = std::mem::replace(&mut newer, next);
        obs.observe(&newer);
    }
    newer
}

pub fn run_bp(b: LogBeliefTable, g: &NetworkGraph, spec: &ConsensusSpec) -> LogBeliefTable {
    run_bp_observed(b, g, spec.iterations, &mut Silent)
}

/// BP recursion run to iteration index `target`, returning every slot
/// `1..=target`.
pub fn bp_history(b: LogBeliefTable, g: &NetworkGraph, target: usize) -> Vec<LogBeliefTable> {
    let mut history = Vec::new();
    let mut keep = |t: &LogBeliefTable| history.push(t.clone());
    run_bp_observed(b, g, target.max(1), &mut keep);
    history
}

/// One synchronous max-consensus round.
pub fn max_round(b: &LogBeliefTable, g: &NetworkGraph) -> LogBeliefTable {
    let mut next = b.clone();
    for n in 0..b.nodes {
        let out = next.row_mut(n);
        for &u in g.neighbors(n) {
            for (o, &lu) in out.iter_mut().zip(b.row(u)) {
                if lu > *o {
                    *o = lu;
                }
            }
        }
    }
    next
}

/// `rounds` synchronous rounds of entrywise max over closed neighbourhoods.
pub fn run_max_consensus(mut b: LogBeliefTable, g: &NetworkGraph, rounds: usize) -> LogBeliefTable {
    for _ in 0..rounds {
        b = max_round(&b, g);
    }
    b
}

/// Undo the `N_s`-th root for the averaging algorithms; identity for BP.
pub fn recover_product(mut b: LogBeliefTable, nodes: usize, algorithm: Algorithm) -> LogBeliefTable {
    if algorithm.averages() {
        let k = nodes as f64;
        for v in &mut b.values {
            *v = clamp_log(*v * k);
        }
    }
    b
}

/// Run the algorithm selected by `spec`. `rng` is only consumed by the
/// gossip algorithms.
pub fn run_consensus<R: Rng + ?Sized>(
    b: LogBeliefTable,
    g: &NetworkGraph,
    spec: &ConsensusSpec,
    rng: &mut R,
) -> LogBeliefTable {
    run_consensus_observed(b, g, spec, rng, &mut Silent)
}

pub fn run_consensus_observed<R: Rng + ?Sized>(
    b: LogBeliefTable,
    g: &NetworkGraph,
    spec: &ConsensusSpec,
    rng: &mut R,
    obs: &mut dyn Observer,
) -> LogBeliefTable {
    match spec.algorithm {
        Algorithm::Sbc => run_sbc_observed(b, g, spec, obs),
        Algorithm::Rg => run_rg_observed(b, g, spec, rng, obs),
        Algorithm::Bg => run_bg_observed(b, g, spec, rng, obs),
        Algorithm::Mbc => run_mbc_observed(b, g, spec, obs),
        Algorithm::Bp => run_bp_observed(b, g, spec.iterations, obs),
    }
}

/// Per-iteration convergence trace. Gossip runs record one step per tick.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConsensusTrace {
    /// `(step, node, disagreement)`; step 1 is the initial table.
    pub rows: Vec<(usize, usize, f64)>,
    step: usize,
}

impl Observer for ConsensusTrace {
    fn observe(&mut self, table: &LogBeliefTable) {
        self.step += 1;
        for (n, d) in table.node_disagreement().into_iter().enumerate() {
            self.rows.push((self.step, n, d));
        }
    }
}

impl ConsensusTrace {
    /// CSV with header `iteration,node,disagreement`, 1-based node labels.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,node,disagreement\n");
        for (i, n, d) in &self.rows {
            let _ = writeln!(out, "{},{},{}", i, n + 1, d);
        }
        out
    }
}
