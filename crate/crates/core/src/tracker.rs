//! Per-slot distributed trackers.
//!
//! Every node runs the same filter with the same random streams, so the
//! simulator keeps one particle set per tracker plus, for DPF, the
//! `N_s × N_p` table of beliefs in which the nodes actually differ.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::consensus::{
    init_beliefs, recover_product, run_consensus, run_max_consensus, Algorithm, ConsensusSpec, LogBeliefTable,
    ScenarioMetrics,
};
use crate::dynamics::{MixtureNoise, MotionModel, ObservationSet, TargetState};
use crate::filter::{cpf_step, draw_particles, estimate_with, ParticleSet};
use crate::numerics::normalize_log_weights;
use crate::topology::NetworkGraph;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TrackerKind {
    /// Centralized filter over all observations.
    Exact,
    /// Observation flooding followed by local filtering.
    Ncpf,
    /// Distributed filter with belief consensus.
    Dpf(Algorithm),
    /// Distributed filter with consensus replaced by exact column sums.
    DpfOracle,
}

impl TrackerKind {
    pub fn name(&self) -> String {
        match self {
            TrackerKind::Exact => "exact".into(),
            TrackerKind::Ncpf => "ncpf".into(),
            TrackerKind::Dpf(a) => format!("dpf-{a}"),
            TrackerKind::DpfOracle => "dpf-oracle".into(),
        }
    }
}

impl fmt::Display for TrackerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for TrackerKind {
    type Err = Error;

    /// `exact`, `ncpf`, `oracle`/`dpf-oracle`, or an algorithm name with an
    /// optional `dpf-` prefix.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "exact" => Ok(TrackerKind::Exact),
            "ncpf" => Ok(TrackerKind::Ncpf),
            "oracle" | "dpf-oracle" => Ok(TrackerKind::DpfOracle),
            other => other
                .strip_prefix("dpf-")
                .unwrap_or(other)
                .parse()
                .map(TrackerKind::Dpf)
                .map_err(|_| Error::invalid(format!("unknown tracker `{s}`"))),
        }
    }
}

/// How a DPF obtains the global likelihood.
#[derive(Debug, Clone, PartialEq)]
pub enum BeliefFusion {
    Consensus(ConsensusSpec),
    /// Every node receives the exact column sums.
    Oracle,
}

/// Filter state shared by all nodes of one tracker.
#[derive(Debug, Clone)]
pub struct TrackerState {
    pub particles: ParticleSet,
    /// Particle draws and resampling thresholds, identical at every node.
    pub particle_rng: ChaCha8Rng,
    pub metrics: ScenarioMetrics,
    /// Per-slot per-node estimates.
    pub history: Vec<Vec<TargetState>>,
}

impl TrackerState {
    pub fn new(particles: ParticleSet, particle_seed: u64, metrics: ScenarioMetrics) -> Self {
        Self {
            particles,
            particle_rng: ChaCha8Rng::seed_from_u64(particle_seed),
            metrics,
            history: Vec::new(),
        }
    }
}

/// Normalized per-node log-weights after fusion, before max-consensus.
pub fn fused_node_weights(prior: &[f64], fused: &LogBeliefTable) -> Result<LogBeliefTable> {
    let nodes = fused.nodes();
    let particles = fused.particles();
    let mut values = Vec::with_capacity(nodes * particles);
    for n in 0..nodes {
        let mut row: Vec<f64> = prior.iter().zip(fused.row(n)).map(|(p, b)| p + b).collect();
        normalize_log_weights(&mut row).ok_or(Error::FilterDivergence)?;
        values.extend(row);
    }
    LogBeliefTable::from_rows(nodes, particles, values)
}

/// One DPF slot at every node: draw, local likelihoods, fusion, recovery of
/// the product, per-node normalization, max-consensus over `D_g` rounds,
/// renormalization, estimate, resample.
pub fn dpf_step<R: rand::Rng + ?Sized>(
    state: &mut TrackerState,
    obs: &ObservationSet,
    g: &NetworkGraph,
    motion: &MotionModel,
    noise: &MixtureNoise,
    fusion: &BeliefFusion,
    consensus_rng: &mut R,
) -> Result<Vec<TargetState>> {
    let drawn = draw_particles(&state.particles, motion, &mut state.particle_rng);
    let local = init_beliefs(obs, &drawn, g, noise);
    let fused = match fusion {
        BeliefFusion::Consensus(spec) => {
            let out = run_consensus(local, g, spec, consensus_rng);
            recover_product(out, g.node_count(), spec.algorithm)
        }
        BeliefFusion::Oracle => LogBeliefTable::broadcast_row(g.node_count(), &local.column_sums()),
    };
    let weights = fused_node_weights(&drawn.log_weights, &fused)?;
    let mut agreed = run_max_consensus(weights, g, state.metrics.diameter);

    let mut estimates = Vec::with_capacity(g.node_count());
    for n in 0..agreed.nodes() {
        let row = agreed.row_mut(n);
        normalize_log_weights(row).ok_or(Error::FilterDivergence)?;
        estimates.push(estimate_with(&drawn.states, row));
    }

    // Rows agree after max-consensus; node 0 stands for every node.
    let shared = ParticleSet {
        states: drawn.states,
        log_weights: agreed.row(0).to_vec(),
    };
    state.particles = crate::filter::resample(&shared, &mut state.particle_rng);
    state.history.push(estimates.clone());
    Ok(estimates)
}

/// Synchronous observation flooding: the set of detecting nodes whose data
/// each node holds after `rounds` rounds.
pub fn flood_observations(g: &NetworkGraph, obs: &ObservationSet, rounds: usize) -> Vec<BTreeSet<usize>> {
    let mut known: Vec<BTreeSet<usize>> = (0..g.node_count())
        .map(|n| obs.get(n).map(|_| n).into_iter().collect())
        .collect();
    for _ in 0..rounds {
        let snapshot = known.clone();
        for (n, set) in known.iter_mut().enumerate() {
            for &u in g.neighbors(n) {
                set.extend(snapshot[u].iter().copied());
            }
        }
    }
    known
}

/// One NCPF slot: `D_g` flooding rounds, then the centralized filter at
/// every node on the data it holds.
pub fn ncpf_step(
    state: &mut TrackerState,
    obs: &ObservationSet,
    g: &NetworkGraph,
    motion: &MotionModel,
    noise: &MixtureNoise,
) -> Result<Vec<TargetState>> {
    let known = flood_observations(g, obs, state.metrics.diameter);
    let full: BTreeSet<usize> = obs.detecting_nodes().collect();
    if known.iter().any(|k| *k != full) {
        return Err(Error::Disconnected);
    }
    let local = obs.restricted_to(full);
    let (particles, est) = cpf_step(&state.particles, &local, g, motion, noise, &mut state.particle_rng)?;
    state.particles = particles;
    let estimates = vec![est; g.node_count()];
    state.history.push(estimates.clone());
    Ok(estimates)
}

/// One slot of the centralized benchmark.
pub fn exact_step(
    state: &mut TrackerState,
    obs: &ObservationSet,
    g: &NetworkGraph,
    motion: &MotionModel,
    noise: &MixtureNoise,
) -> Result<TargetState> {
    let (particles, est) = cpf_step(&state.particles, obs, g, motion, noise, &mut state.particle_rng)?;
    state.particles = particles;
    state.history.push(vec![est; g.node_count()]);
    Ok(est)
}

/// A tracker of any kind together with its random streams.
#[derive(Debug, Clone)]
pub struct Tracker {
    pub kind: TrackerKind,
    pub state: TrackerState,
    fusion: Option<BeliefFusion>,
    consensus_rng: ChaCha8Rng,
    pub divergences: usize,
}

impl Tracker {
    /// `consensus` is required for [`TrackerKind::Dpf`] and ignored
    /// otherwise.
    pub fn new(
        kind: TrackerKind,
        particles: ParticleSet,
        particle_seed: u64,
        metrics: ScenarioMetrics,
        consensus: Option<ConsensusSpec>,
    ) -> Result<Self> {
        let (fusion, seed) = match kind {
            TrackerKind::Dpf(algorithm) => {
                let spec = consensus.ok_or_else(|| Error::invalid("DPF tracker needs a consensus spec"))?;
                if spec.algorithm != algorithm {
                    return Err(Error::invalid("consensus spec algorithm does not match tracker"));
                }
                spec.validate()?;
                let seed = spec.seed;
                (Some(BeliefFusion::Consensus(spec)), seed)
            }
            TrackerKind::DpfOracle => (Some(BeliefFusion::Oracle), 0),
            TrackerKind::Exact | TrackerKind::Ncpf => (None, 0),
        };
        Ok(Self {
            kind,
            state: TrackerState::new(particles, particle_seed, metrics),
            fusion,
            consensus_rng: ChaCha8Rng::seed_from_u64(seed),
            divergences: 0,
        })
    }

    /// Per-node estimates for one slot.
    pub fn step(
        &mut self,
        obs: &ObservationSet,
        g: &NetworkGraph,
        motion: &MotionModel,
        noise: &MixtureNoise,
    ) -> Result<Vec<TargetState>> {
        match (&self.kind, &self.fusion) {
            (TrackerKind::Exact, _) => {
                exact_step(&mut self.state, obs, g, motion, noise).map(|e| vec![e; g.node_count()])
            }
            (TrackerKind::Ncpf, _) => ncpf_step(&mut self.state, obs, g, motion, noise),
            (_, Some(fusion)) => dpf_step(&mut self.state, obs, g, motion, noise, fusion, &mut self.consensus_rng),
            (_, None) => unreachable!("DPF trackers always carry a fusion rule"),
        }
    }

    /// Like [`Self::step`], but a weight underflow falls back to the
    /// prediction (the propagated cloud under uniform weights) and is
    /// counted.
    pub fn step_or_predict(
        &mut self,
        obs: &ObservationSet,
        g: &NetworkGraph,
        motion: &MotionModel,
        noise: &MixtureNoise,
    ) -> Result<Vec<TargetState>> {
        let backup = self.state.clone();
        match self.step(obs, g, motion, noise) {
            Err(Error::FilterDivergence) => {
                self.state = backup;
                self.divergences += 1;
                let drawn = draw_particles(&self.state.particles, motion, &mut self.state.particle_rng);
                let predicted = ParticleSet::uniform(drawn.states);
                let est = crate::filter::estimate(&predicted);
                self.state.particles = predicted;
                let estimates = vec![est; g.node_count()];
                self.state.history.push(estimates.clone());
                Ok(estimates)
            }
            other => other,
        }
    }
}
