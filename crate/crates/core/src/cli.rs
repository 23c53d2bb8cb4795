//! Command-line interface.
//!
//! Every subcommand writes its CSV tables and a `manifest.txt` (config echo
//! plus per-run seeds) to `--out`. Outputs contain no timestamps, so a
//! repeated invocation with the same seed reproduces them byte for byte.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::analysis::{alpha_exponents, bp_symbolic_table, render_iteration_table};
use crate::dynamics::{observations_to_csv, track_to_csv};
use crate::harness::experiment::{build_network, RunSeeds};
use crate::harness::output::{
    cost_csv, estimates_csv, manifest, radius_csv, summary_csv, sweep_csv, time_csv, write_file,
};
use crate::harness::{
    derive_seed, rmse_vs_time, run_monte_carlo, sweep_iterations, sweep_radius, ScenarioConfig, Stream,
};
use crate::topology::{example_graph, ExampleKind, NetworkGraph};
use crate::{Error, Result};

#[derive(Parser)]
#[command(
    name = "bcdpf",
    version,
    about = "Distributed particle-filter tracking with belief consensus"
)]
struct Cli {
    /// Suppress the summary printed to stdout.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named preset applied before the config file.
    #[arg(long)]
    preset: Option<String>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Monte-Carlo runs.
    #[arg(long)]
    runs: Option<usize>,
    /// Particles per filter.
    #[arg(long)]
    particles: Option<usize>,
    /// Communication radius override.
    #[arg(long)]
    comm_radius: Option<f64>,
    /// Comma-separated tracker list override.
    #[arg(long)]
    trackers: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write per-node estimates.
    Simulate(Common),
    /// RMSE as a function of the consensus iteration count.
    SweepIterations {
        #[command(flatten)]
        common: Common,
        /// Iteration grid, e.g. `1..10` or `1,3,5`.
        #[arg(long, default_value = "1..10")]
        grid: String,
    },
    /// Packet counts as a function of the communication radius.
    SweepRadius {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        radius: RadiusArgs,
        /// Packet sizes as multiples of the particle count.
        #[arg(long, default_value = "1,5")]
        packet_multiples: String,
    },
    /// RMSE per time slot over a fixed network and track.
    RmseTime(Common),
    /// Packets per node per slot for DPF and NCPF at one packet size.
    Cost {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        radius: RadiusArgs,
        /// Scalars per packet; defaults to the particle count.
        #[arg(long)]
        packet_size: Option<u64>,
        /// Grid rows and columns (N_s = rows·cols).
        #[arg(long)]
        grid_side: Option<usize>,
    },
    /// Overcounting exponents of BP consensus.
    AnalyzeAlpha {
        /// Graph file in the text format.
        #[arg(long, conflicts_with = "kind")]
        graph: Option<PathBuf>,
        /// Builtin graph: `clique:K`, `even-cycle:K`, `odd-cycle:K`, `short-loop:N`.
        #[arg(long)]
        kind: Option<String>,
        /// Last iteration index; defaults to diameter + 1.
        #[arg(long)]
        iterations: Option<usize>,
        /// Also write `alpha.txt` here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a network (or a builtin graph) and write it as text.
    Topology {
        #[command(flatten)]
        common: Common,
        /// Builtin graph instead of a generated network.
        #[arg(long)]
        kind: Option<String>,
        /// Monte-Carlo run index whose network stream is used.
        #[arg(long, default_value_t = 0)]
        run: usize,
    },
}

#[derive(Args, Clone)]
struct RadiusArgs {
    /// Radii as `start:stop:step` or a comma list.
    #[arg(long, default_value = "25:100:5")]
    radii: String,
    /// Networks drawn per radius.
    #[arg(long, default_value_t = 100)]
    networks: usize,
    /// Scalars of local data flooded per node by NCPF.
    #[arg(long, default_value_t = 9)]
    data_scalars: u64,
}

fn load_config(c: &Common) -> Result<ScenarioConfig> {
    let mut cfg = match &c.preset {
        Some(p) => ScenarioConfig::preset(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(path) = &c.config {
        cfg = cfg.overlay(&std::fs::read_to_string(path)?)?;
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(r) = c.runs {
        cfg.runs = r;
    }
    if let Some(p) = c.particles {
        cfg.particles = p;
    }
    if let Some(r) = c.comm_radius {
        cfg.comm_radius = r;
        cfg.sense_radius = cfg.sense_radius.min(r);
    }
    if let Some(t) = &c.trackers {
        cfg.set("trackers", t)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_grid(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::invalid(format!("bad iteration grid `{s}`"));
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a == 0 || b < a {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    let v: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    if v.is_empty() || v.contains(&0) {
        return Err(bad());
    }
    Ok(v)
}

fn parse_radii(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::invalid(format!("bad radius list `{s}`"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let nums: Vec<f64> = parts
            .iter()
            .map(|x| x.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0 && start > 0.0 && stop >= start) {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|k| start + k as f64 * step).collect());
    }
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    if v.is_empty() || v.iter().any(|&r| !(r > 0.0)) {
        return Err(bad());
    }
    Ok(v)
}

fn parse_u64_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad integer list `{s}`")))
        })
        .collect()
}

fn all_seeds(cfg: &ScenarioConfig) -> Vec<(usize, RunSeeds)> {
    (0..cfg.runs).map(|r| (r, RunSeeds::derive(cfg.seed, r))).collect()
}

struct Console {
    quiet: bool,
}

impl Console {
    /// Write to stdout, ignoring a closed pipe.
    fn say(&self, text: &str) {
        if !self.quiet {
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
    }

    fn report(&self, dir: &Path, files: &[&str]) {
        for f in files {
            self.say(&format!("wrote {}\n", dir.join(f).display()));
        }
    }
}

fn builtin(kind: &str) -> Result<NetworkGraph> {
    example_graph(kind.parse::<ExampleKind>()?)
}

fn execute(cli: Cli) -> Result<()> {
    let con = Console { quiet: cli.quiet };
    match cli.command {
        Command::Simulate(c) => {
            let cfg = load_config(&c)?;
            let result = run_monte_carlo(&cfg)?;
            write_file(&c.out, "estimates.csv", &estimates_csv(&result))?;
            let summary = summary_csv(&result)?;
            write_file(&c.out, "summary.csv", &summary)?;
            let first = &result.records[0].scenario;
            write_file(&c.out, "track.csv", &track_to_csv(&first.track))?;
            write_file(&c.out, "observations.csv", &observations_to_csv(&first.observations))?;
            write_file(&c.out, "graph.txt", &first.graph.to_text())?;
            write_file(&c.out, "manifest.txt", &manifest(&cfg, "simulate", &all_seeds(&cfg)))?;
            con.say(&summary);
            con.report(
                &c.out,
                &[
                    "estimates.csv",
                    "summary.csv",
                    "track.csv",
                    "observations.csv",
                    "graph.txt",
                    "manifest.txt",
                ],
            );
        }
        Command::SweepIterations { common, grid } => {
            let cfg = load_config(&common)?;
            let rows = sweep_iterations(&cfg, &parse_grid(&grid)?)?;
            write_file(&common.out, "sweep.csv", &sweep_csv(&rows))?;
            write_file(
                &common.out,
                "manifest.txt",
                &manifest(&cfg, "sweep-iterations", &all_seeds(&cfg)),
            )?;
            con.report(&common.out, &["sweep.csv", "manifest.txt"]);
        }
        Command::SweepRadius {
            common,
            radius,
            packet_multiples,
        } => {
            let cfg = load_config(&common)?;
            let sizes: Vec<u64> = parse_u64_list(&packet_multiples)?
                .into_iter()
                .map(|m| m * cfg.particles as u64)
                .collect();
            let rows = sweep_radius(
                &cfg,
                &parse_radii(&radius.radii)?,
                &sizes,
                radius.networks,
                radius.data_scalars,
            )?;
            write_file(&common.out, "radius.csv", &radius_csv(&rows))?;
            write_file(&common.out, "manifest.txt", &manifest(&cfg, "sweep-radius", &[]))?;
            con.report(&common.out, &["radius.csv", "manifest.txt"]);
        }
        Command::RmseTime(c) => {
            let cfg = load_config(&c)?;
            let result = rmse_vs_time(&cfg)?;
            write_file(&c.out, "time.csv", &time_csv(&result)?)?;
            write_file(&c.out, "manifest.txt", &manifest(&cfg, "rmse-time", &all_seeds(&cfg)))?;
            con.report(&c.out, &["time.csv", "manifest.txt"]);
        }
        Command::Cost {
            common,
            radius,
            packet_size,
            grid_side,
        } => {
            let mut cfg = load_config(&common)?;
            if let Some(side) = grid_side {
                cfg.rows = side;
                cfg.cols = side;
                cfg.validate()?;
            }
            let p = packet_size.unwrap_or(cfg.particles as u64);
            let rows = sweep_radius(
                &cfg,
                &parse_radii(&radius.radii)?,
                &[p],
                radius.networks,
                radius.data_scalars,
            )?;
            write_file(&common.out, "cost.csv", &cost_csv(&rows))?;
            write_file(&common.out, "manifest.txt", &manifest(&cfg, "cost", &[]))?;
            con.report(&common.out, &["cost.csv", "manifest.txt"]);
        }
        Command::AnalyzeAlpha {
            graph,
            kind,
            iterations,
            out,
        } => {
            let g = match (graph, kind) {
                (Some(path), _) => NetworkGraph::parse_text(&std::fs::read_to_string(path)?)?,
                (None, Some(k)) => builtin(&k)?,
                (None, None) => return Err(Error::invalid("give --graph or --kind")),
            };
            let d = g.diameter()?;
            let last = iterations.unwrap_or(d + 1);
            let final_alpha = alpha_exponents(&g, last)?;
            let mut text = format!("nodes = {}\ndiameter = {d}\niteration = {last}\n\n", g.node_count());
            text.push_str(&final_alpha.render());
            text.push_str(&format!("\nalpha_max = {}\n\n", final_alpha.max()));
            text.push_str(&render_iteration_table(&bp_symbolic_table(&g, last)?));
            con.say(&text);
            if let Some(dir) = out {
                write_file(&dir, "alpha.txt", &text)?;
            }
        }
        Command::Topology { common, kind, run } => {
            let g = match kind {
                Some(k) => builtin(&k)?,
                None => {
                    let cfg = load_config(&common)?;
                    build_network(&cfg, derive_seed(cfg.seed, run, Stream::Network))?.0
                }
            };
            write_file(&common.out, "graph.txt", &g.to_text())?;
            let m = g.degree_metrics();
            con.say(&format!(
                "nodes = {}\nedges = {}\nmax_degree = {}\nmean_degree = {}\nconnected = {}\nbipartite = {}\n",
                g.node_count(),
                g.edge_count(),
                m.max,
                m.mean,
                g.is_connected(),
                g.is_bipartite()
            ));
            if let Ok(d) = g.diameter() {
                con.say(&format!("diameter = {d}\n"));
            }
            con.report(&common.out, &["graph.txt"]);
        }
    }
    Ok(())
}

/// Parse `args` (including the program name) and run the subcommand.
pub fn run<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::invalid(e.to_string()))?;
    execute(cli)
}

/// Entry point of the `bcdpf` binary.
pub fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
