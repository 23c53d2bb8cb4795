//! Monte-Carlo runs, RMSE aggregation and the three experiment families.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{IterationSetting, ScenarioConfig};
use super::seeds::{derive_seed, Stream};
use crate::consensus::{ConsensusSpec, ScenarioMetrics};
use crate::costmodel::{dpf_cost, ncpf_cost, ncpf_cost_per_node, CostInputs};
use crate::dynamics::{observe, random_heading_start, simulate_track, ObservationSet, TargetState};
use crate::filter::ParticleSet;
use crate::topology::{generate_connected, NetworkGraph};
use crate::tracker::{Tracker, TrackerKind};
use crate::{Error, Result};

/// Scalars of local data flooded per node by NCPF: two for the node
/// position, six for the observation model and one for the measurement.
pub const NCPF_DATA_SCALARS: u64 = 9;

/// Child seeds of one run, indexed like [`Stream::ALL`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSeeds([u64; 6]);

impl RunSeeds {
    pub fn derive(master: u64, run: usize) -> Self {
        Self(Stream::ALL.map(|s| derive_seed(master, run, s)))
    }

    pub fn get(&self, stream: Stream) -> u64 {
        let k = Stream::ALL.iter().position(|&s| s == stream).expect("listed stream");
        self.0[k]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Stream, u64)> + '_ {
        Stream::ALL.into_iter().zip(self.0)
    }
}

/// Network, track and observations shared by every tracker of a run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub graph: NetworkGraph,
    pub metrics: ScenarioMetrics,
    /// Graph draws needed to obtain a connected network.
    pub attempts: usize,
    pub initial: TargetState,
    /// True states at slots `1..=N_t`.
    pub track: Vec<TargetState>,
    pub observations: Vec<ObservationSet>,
}

/// Outcome of one tracker over one run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackerRun {
    pub kind: TrackerKind,
    pub iterations: usize,
    /// Position error `[slot][node]` in metres.
    pub errors: Vec<Vec<f64>>,
    /// Estimates `[slot][node]`.
    pub estimates: Vec<Vec<TargetState>>,
    pub divergences: usize,
    /// Packets per node per slot at packet size `N_p`, where defined.
    pub packets: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub run: usize,
    pub seeds: RunSeeds,
    pub scenario: Scenario,
    pub trackers: Vec<TrackerRun>,
}

/// All runs of one scenario.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub trackers: Vec<TrackerKind>,
    pub records: Vec<RunRecord>,
}

/// `√(Σ e² / count)`.
pub fn rmse(errors: &[f64]) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::invalid("no errors to aggregate"));
    }
    Ok((errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt())
}

fn sum_sq(rows: &[Vec<f64>]) -> (f64, usize) {
    rows.iter().flatten().fold((0.0, 0), |(s, c), e| (s + e * e, c + 1))
}

impl RunResult {
    fn column(&self, kind: TrackerKind) -> Result<usize> {
        self.trackers
            .iter()
            .position(|&k| k == kind)
            .ok_or_else(|| Error::invalid(format!("tracker {kind} not in result")))
    }

    /// RMSE over all runs, slots and nodes.
    pub fn rmse(&self, kind: TrackerKind) -> Result<f64> {
        let k = self.column(kind)?;
        let (s, c) = self
            .records
            .iter()
            .map(|r| sum_sq(&r.trackers[k].errors))
            .fold((0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        if c == 0 {
            return Err(Error::invalid("no errors to aggregate"));
        }
        Ok((s / c as f64).sqrt())
    }

    /// RMSE per slot over runs and nodes.
    pub fn rmse_per_slot(&self, kind: TrackerKind) -> Result<Vec<f64>> {
        let k = self.column(kind)?;
        let slots = self.records.first().map_or(0, |r| r.trackers[k].errors.len());
        (0..slots)
            .map(|t| {
                let errs: Vec<f64> = self
                    .records
                    .iter()
                    .flat_map(|r| r.trackers[k].errors[t].iter().copied())
                    .collect();
                rmse(&errs)
            })
            .collect()
    }

    pub fn divergences(&self, kind: TrackerKind) -> Result<usize> {
        let k = self.column(kind)?;
        Ok(self.records.iter().map(|r| r.trackers[k].divergences).sum())
    }

    /// Mean packets per node per slot across runs.
    pub fn mean_packets(&self, kind: TrackerKind) -> Result<Option<f64>> {
        let k = self.column(kind)?;
        let vals: Option<Vec<f64>> = self.records.iter().map(|r| r.trackers[k].packets).collect();
        Ok(vals.map(|v| v.iter().sum::<f64>() / v.len().max(1) as f64))
    }
}

/// Connected network for a seed, reduced to its spanning tree when the
/// scenario asks for one.
pub fn build_network(cfg: &ScenarioConfig, seed: u64) -> Result<(NetworkGraph, usize)> {
    let (g, attempts) = generate_connected(&cfg.topology_params(), seed, cfg.max_graph_attempts)?;
    let g = if cfg.tree { g.spanning_tree()? } else { g };
    Ok((g, attempts))
}

/// Initial state and `N_t`-slot track from one stream.
pub fn build_track(cfg: &ScenarioConfig, seed: u64) -> Result<(TargetState, Vec<TargetState>)> {
    let motion = cfg.motion()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let initial = random_heading_start(cfg.start, cfg.initial_speed, &mut rng);
    let track = simulate_track(initial, &motion, cfg.area, cfg.time_slots, &mut rng);
    Ok((initial, track))
}

pub fn build_observations(
    cfg: &ScenarioConfig,
    g: &NetworkGraph,
    track: &[TargetState],
    seed: u64,
) -> Result<Vec<ObservationSet>> {
    let noise = cfg.noise()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(track
        .iter()
        .enumerate()
        .map(|(k, s)| observe(g, k + 1, s, &noise, &mut rng))
        .collect())
}

pub fn build_scenario(cfg: &ScenarioConfig, seeds: &RunSeeds) -> Result<Scenario> {
    let (graph, attempts) = build_network(cfg, seeds.get(Stream::Network))?;
    let (initial, track) = build_track(cfg, seeds.get(Stream::Track))?;
    let observations = build_observations(cfg, &graph, &track, seeds.get(Stream::Observation))?;
    Ok(Scenario {
        metrics: ScenarioMetrics::of(&graph)?,
        graph,
        attempts,
        initial,
        track,
        observations,
    })
}

/// Consensus settings a DPF tracker of `kind` uses in this scenario.
pub fn consensus_spec(
    cfg: &ScenarioConfig,
    kind: TrackerKind,
    iterations: usize,
    metrics: ScenarioMetrics,
    seed: u64,
) -> Option<ConsensusSpec> {
    match kind {
        TrackerKind::Dpf(algorithm) => {
            let mut spec = ConsensusSpec::new(algorithm, iterations, metrics);
            spec.xi = cfg.sbc_xi;
            spec.gamma_params = (cfg.bg_a, cfg.bg_b);
            spec.bipartite = cfg.mbc_bipartite;
            spec.seed = seed;
            Some(spec)
        }
        _ => None,
    }
}

fn tracker_packets(
    cfg: &ScenarioConfig,
    kind: TrackerKind,
    g: &NetworkGraph,
    m: &ScenarioMetrics,
    iterations: usize,
) -> Option<f64> {
    let inputs = CostInputs {
        particles: cfg.particles as u64,
        packet_size: cfg.particles as u64,
        diameter: m.diameter as u64,
        mean_degree: m.mean_degree,
        data_scalars: NCPF_DATA_SCALARS,
        iterations: iterations as u64,
    };
    match kind {
        TrackerKind::Dpf(_) => Some(dpf_cost(&inputs) as f64),
        TrackerKind::Ncpf => Some(ncpf_cost_per_node(
            g,
            inputs.diameter,
            NCPF_DATA_SCALARS,
            inputs.packet_size,
        )),
        TrackerKind::Exact | TrackerKind::DpfOracle => None,
    }
}

/// Run one tracker over a scenario from a shared initial cloud.
pub fn run_tracker(
    cfg: &ScenarioConfig,
    scenario: &Scenario,
    kind: TrackerKind,
    iterations: usize,
    cloud: &ParticleSet,
    seeds: &RunSeeds,
) -> Result<TrackerRun> {
    let motion = cfg.motion()?;
    let noise = cfg.noise()?;
    let spec = consensus_spec(cfg, kind, iterations, scenario.metrics, seeds.get(Stream::Consensus));
    let mut tracker = Tracker::new(kind, cloud.clone(), seeds.get(Stream::Particle), scenario.metrics, spec)?;
    let mut errors = Vec::with_capacity(scenario.track.len());
    let mut estimates = Vec::with_capacity(scenario.track.len());
    for (obs, truth) in scenario.observations.iter().zip(&scenario.track) {
        let est = tracker.step_or_predict(obs, &scenario.graph, &motion, &noise)?;
        errors.push(est.iter().map(|e| e.position_error(truth)).collect());
        estimates.push(est);
    }
    Ok(TrackerRun {
        kind,
        iterations,
        errors,
        estimates,
        divergences: tracker.divergences,
        packets: tracker_packets(cfg, kind, &scenario.graph, &scenario.metrics, iterations),
    })
}

/// Initial particle cloud around the true initial state.
pub fn initial_cloud(cfg: &ScenarioConfig, initial: &TargetState, seed: u64) -> ParticleSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ParticleSet::gaussian_around(initial, cfg.prior_pos_std, cfg.prior_vel_std, cfg.particles, &mut rng)
}

fn run_all_trackers(
    cfg: &ScenarioConfig,
    scenario: &Scenario,
    seeds: &RunSeeds,
    iterations: IterationSetting,
) -> Result<Vec<TrackerRun>> {
    let cloud = initial_cloud(cfg, &scenario.initial, seeds.get(Stream::Prior));
    let n_it = iterations.resolve(scenario.metrics.diameter);
    cfg.trackers
        .iter()
        .map(|&k| run_tracker(cfg, scenario, k, n_it, &cloud, seeds))
        .collect()
}

/// One Monte-Carlo run: scenario generation followed by every configured
/// tracker on the same data and streams.
pub fn run_single(cfg: &ScenarioConfig, run: usize) -> Result<RunRecord> {
    let seeds = RunSeeds::derive(cfg.seed, run);
    let scenario = build_scenario(cfg, &seeds)?;
    let trackers = run_all_trackers(cfg, &scenario, &seeds, cfg.iterations)?;
    Ok(RunRecord {
        run,
        seeds,
        scenario,
        trackers,
    })
}

/// Runs `0..N_mc` in parallel, collected in run order.
pub fn run_monte_carlo(cfg: &ScenarioConfig) -> Result<RunResult> {
    cfg.validate()?;
    let records = (0..cfg.runs)
        .into_par_iter()
        .map(|run| run_single(cfg, run))
        .collect::<Result<Vec<_>>>()?;
    Ok(RunResult {
        trackers: cfg.trackers.clone(),
        records,
    })
}

/// One row of an iteration sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub tracker: TrackerKind,
    pub iterations: usize,
    pub rmse: f64,
}

/// Squared-error sums and counts per (tracker, grid point) for one run.
type SweepAccumulator = Vec<Vec<(f64, usize)>>;

fn sweep_one_run(cfg: &ScenarioConfig, run: usize, grid: &[usize]) -> Result<SweepAccumulator> {
    let seeds = RunSeeds::derive(cfg.seed, run);
    let scenario = build_scenario(cfg, &seeds)?;
    let cloud = initial_cloud(cfg, &scenario.initial, seeds.get(Stream::Prior));
    let mut acc = Vec::with_capacity(cfg.trackers.len());
    for &kind in &cfg.trackers {
        if matches!(kind, TrackerKind::Dpf(_)) {
            let mut row = Vec::with_capacity(grid.len());
            for &n_it in grid {
                row.push(sum_sq(&run_tracker(cfg, &scenario, kind, n_it, &cloud, &seeds)?.errors));
            }
            acc.push(row);
        } else {
            let first = grid.first().copied().unwrap_or(1);
            let s = sum_sq(&run_tracker(cfg, &scenario, kind, first, &cloud, &seeds)?.errors);
            acc.push(vec![s; grid.len()]);
        }
    }
    Ok(acc)
}

/// RMSE of every tracker at each `N_it` of the grid. Trackers that ignore
/// `N_it` are run once per Monte-Carlo run and repeated along the grid.
pub fn sweep_iterations(cfg: &ScenarioConfig, grid: &[usize]) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    if grid.is_empty() {
        return Err(Error::invalid("empty iteration grid"));
    }
    let per_run = (0..cfg.runs)
        .into_par_iter()
        .map(|run| sweep_one_run(cfg, run, grid))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (k, &tracker) in cfg.trackers.iter().enumerate() {
        for (j, &iterations) in grid.iter().enumerate() {
            let (s, c) = per_run.iter().fold((0.0, 0), |a, r| (a.0 + r[k][j].0, a.1 + r[k][j].1));
            rows.push(SweepRow {
                tracker,
                iterations,
                rmse: (s / c as f64).sqrt(),
            });
        }
    }
    Ok(rows)
}

/// Runs over one fixed network and track; observation, prior, particle and
/// consensus streams still vary with the run index.
pub fn rmse_vs_time(cfg: &ScenarioConfig) -> Result<RunResult> {
    cfg.validate()?;
    let fixed = RunSeeds::derive(cfg.seed, 0);
    let (graph, attempts) = build_network(cfg, fixed.get(Stream::Network))?;
    let (initial, track) = build_track(cfg, fixed.get(Stream::Track))?;
    let metrics = ScenarioMetrics::of(&graph)?;
    let records = (0..cfg.runs)
        .into_par_iter()
        .map(|run| {
            let seeds = RunSeeds::derive(cfg.seed, run);
            let observations = build_observations(cfg, &graph, &track, seeds.get(Stream::Observation))?;
            let scenario = Scenario {
                graph: graph.clone(),
                metrics,
                attempts,
                initial,
                track: track.clone(),
                observations,
            };
            let trackers = run_all_trackers(cfg, &scenario, &seeds, cfg.iterations)?;
            Ok(RunRecord {
                run,
                seeds,
                scenario,
                trackers,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunResult {
        trackers: cfg.trackers.clone(),
        records,
    })
}

/// Communication-cost method of a radius sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostMethod {
    Dpf,
    /// Flooding with each node's own degree, averaged over nodes.
    Ncpf,
    /// Flooding with the network's mean degree.
    NcpfMean,
}

impl CostMethod {
    pub const ALL: [CostMethod; 3] = [CostMethod::Dpf, CostMethod::Ncpf, CostMethod::NcpfMean];

    pub fn name(self) -> &'static str {
        match self {
            CostMethod::Dpf => "dpf",
            CostMethod::Ncpf => "ncpf",
            CostMethod::NcpfMean => "ncpf-mean",
        }
    }
}

/// Diameter entering the cost formulas of a radius sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiameterRule {
    /// `⌈L/R⌉`, the hop count the iteration rule assumes.
    AreaRule,
    /// Hop diameter of each generated network.
    Realized,
}

impl DiameterRule {
    pub const ALL: [DiameterRule; 2] = [DiameterRule::AreaRule, DiameterRule::Realized];

    pub fn name(self) -> &'static str {
        match self {
            DiameterRule::AreaRule => "area",
            DiameterRule::Realized => "realized",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusRow {
    pub comm_radius: f64,
    pub packet_size: u64,
    pub diameter: DiameterRule,
    pub method: CostMethod,
    /// Packets per node per slot, averaged over networks.
    pub packets: f64,
}

/// `⌈L/R⌉` with `L` the area diagonal.
pub fn area_hops(area_diameter: f64, comm_radius: f64) -> u64 {
    (area_diameter / comm_radius).ceil() as u64
}

/// `⌈L/R⌉ + 1`.
pub fn radius_iteration_rule(area_diameter: f64, comm_radius: f64) -> u64 {
    area_hops(area_diameter, comm_radius) + 1
}

/// Costs of every method at one network.
fn network_costs(
    g: &NetworkGraph,
    diameter: u64,
    particles: u64,
    packet_size: u64,
    iterations: u64,
    data: u64,
) -> Result<[f64; 3]> {
    let m = ScenarioMetrics::of(g)?;
    let inputs = CostInputs {
        particles,
        packet_size,
        diameter,
        mean_degree: m.mean_degree,
        data_scalars: data,
        iterations,
    };
    Ok([
        dpf_cost(&inputs) as f64,
        ncpf_cost_per_node(g, inputs.diameter, data, packet_size),
        ncpf_cost(&inputs) as f64,
    ])
}

/// DPF and NCPF packet counts per node per slot across communication radii,
/// each averaged over `networks` connected draws, with `data_scalars` flooded
/// per node by NCPF and `N_it = ⌈L/R⌉ + 1`. Degrees always come from the
/// generated networks; every method is reported under both diameter rules.
/// The sensing radius is capped at each `R`, and spanning trees are used
/// when the scenario is a tree scenario.
pub fn sweep_radius(
    cfg: &ScenarioConfig,
    radii: &[f64],
    packet_sizes: &[u64],
    networks: usize,
    data_scalars: u64,
) -> Result<Vec<RadiusRow>> {
    if networks == 0 {
        return Err(Error::invalid("need at least one network per radius"));
    }
    if packet_sizes.contains(&0) {
        return Err(Error::invalid("packet size must be positive"));
    }
    let mut rows = Vec::new();
    for &r in radii {
        let mut c = cfg.clone();
        c.comm_radius = r;
        c.sense_radius = cfg.sense_radius.min(r);
        c.validate()?;
        let graphs = (0..networks)
            .into_par_iter()
            .map(|k| build_network(&c, derive_seed(cfg.seed, k, Stream::Network)).map(|(g, _)| g))
            .collect::<Result<Vec<_>>>()?;
        let hops = area_hops(cfg.area_diameter(), r);
        let n_it = hops + 1;
        for &p in packet_sizes {
            for rule in DiameterRule::ALL {
                let mut totals = [0.0; 3];
                for g in &graphs {
                    let d = match rule {
                        DiameterRule::AreaRule => hops,
                        DiameterRule::Realized => g.diameter()? as u64,
                    };
                    let costs = network_costs(g, d, cfg.particles as u64, p, n_it, data_scalars)?;
                    for (t, v) in totals.iter_mut().zip(costs) {
                        *t += v;
                    }
                }
                for (method, total) in CostMethod::ALL.into_iter().zip(totals) {
                    rows.push(RadiusRow {
                        comm_radius: r,
                        packet_size: p,
                        diameter: rule,
                        method,
                        packets: total / networks as f64,
                    });
                }
            }
        }
    }
    Ok(rows)
}
