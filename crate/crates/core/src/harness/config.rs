//! Flat `key = value` scenario files and the named presets.
//!
//! ```text
//! # desk-scale loopy network
//! preset = desk-small
//! comm_radius = 25
//! trackers = exact, ncpf, mbc
//! ```
//!
//! A `preset` line resets every field to that preset; later lines override
//! single fields. Unknown keys are errors.

use std::fmt::Write as _;

use crate::consensus::{Algorithm, BipartiteMode, ConsensusSpec};
use crate::dynamics::{MixtureNoise, MotionModel};
use crate::topology::{SemiRandomParams, MAX_PARSED_NODES};
use crate::tracker::TrackerKind;
use crate::{Error, Result};

pub const PRESET_NAMES: [&str; 4] = ["paper-loopy-25", "paper-loopy-45", "paper-tree-45", "desk-small"];

/// Consensus iteration count used by the DPF trackers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterationSetting {
    Fixed(usize),
    /// `D_g + 1` of each run's realized graph.
    DiameterPlusOne,
}

impl IterationSetting {
    pub fn resolve(self, diameter: usize) -> usize {
        match self {
            IterationSetting::Fixed(n) => n,
            IterationSetting::DiameterPlusOne => diameter + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub rows: usize,
    pub cols: usize,
    pub area: [f64; 2],
    pub comm_radius: f64,
    pub sense_radius: f64,
    /// Replace each network with its breadth-first spanning tree.
    pub tree: bool,
    /// Jitter standard deviation as a fraction of the grid pitch.
    pub jitter_frac: f64,
    pub max_graph_attempts: usize,

    pub sample_interval: f64,
    /// Isotropic process-noise variance, (m/s²)².
    pub process_var: f64,
    pub initial_speed: f64,
    pub start: [f64; 2],

    pub noise_means: Vec<f64>,
    pub noise_vars: Vec<f64>,
    pub noise_weights: Vec<f64>,

    pub particles: usize,
    pub prior_pos_std: f64,
    pub prior_vel_std: f64,
    pub time_slots: usize,
    pub runs: usize,

    pub iterations: IterationSetting,
    pub trackers: Vec<TrackerKind>,
    pub sbc_xi: Option<f64>,
    pub bg_a: f64,
    pub bg_b: f64,
    pub mbc_bipartite: BipartiteMode,

    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self::preset("desk-small").expect("built-in preset")
    }
}

fn all_trackers() -> Vec<TrackerKind> {
    let mut v = vec![TrackerKind::Exact, TrackerKind::Ncpf];
    v.extend(Algorithm::ALL.into_iter().map(TrackerKind::Dpf));
    v
}

impl ScenarioConfig {
    fn reference_base() -> Self {
        Self {
            rows: 5,
            cols: 5,
            area: [100.0, 100.0],
            comm_radius: 45.0,
            sense_radius: 25.0,
            tree: false,
            jitter_frac: 0.15,
            max_graph_attempts: 100,
            sample_interval: 1.0,
            process_var: 0.5,
            initial_speed: 5.0,
            start: [50.0, 50.0],
            noise_means: vec![1.0, 10.0],
            noise_vars: vec![1.0, 1.0],
            noise_weights: vec![0.9, 0.1],
            particles: 500,
            prior_pos_std: 5.0,
            prior_vel_std: 1.0,
            time_slots: 50,
            runs: 500,
            iterations: IterationSetting::DiameterPlusOne,
            trackers: all_trackers(),
            sbc_xi: None,
            bg_a: ConsensusSpec::DEFAULT_GAMMA_PARAMS.0,
            bg_b: ConsensusSpec::DEFAULT_GAMMA_PARAMS.1,
            mbc_bipartite: BipartiteMode::Auto,
            seed: 1,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        let base = Self::reference_base();
        Ok(match name {
            "paper-loopy-25" => Self {
                comm_radius: 25.0,
                ..base
            },
            "paper-loopy-45" => base,
            "paper-tree-45" => Self {
                tree: true,
                iterations: IterationSetting::DiameterPlusOne,
                ..base
            },
            "desk-small" => Self {
                particles: 200,
                runs: 50,
                ..base
            },
            other => {
                return Err(Error::invalid(format!(
                    "unknown preset `{other}` (known: {})",
                    PRESET_NAMES.join(", ")
                )))
            }
        })
    }

    pub fn nodes(&self) -> usize {
        self.rows * self.cols
    }

    /// Diagonal of the deployment area.
    pub fn area_diameter(&self) -> f64 {
        self.area[0].hypot(self.area[1])
    }

    pub fn topology_params(&self) -> SemiRandomParams {
        let mut p = SemiRandomParams {
            rows: self.rows,
            cols: self.cols,
            area: self.area,
            jitter_std: 0.0,
            comm_radius: self.comm_radius,
            sense_radius: self.sense_radius,
        };
        let s = p.spacing();
        p.jitter_std = self.jitter_frac * s[0].min(s[1]);
        p
    }

    pub fn motion(&self) -> Result<MotionModel> {
        MotionModel::isotropic(self.sample_interval, self.process_var)?.with_area(self.area)
    }

    pub fn noise(&self) -> Result<MixtureNoise> {
        MixtureNoise::new(
            self.noise_means.clone(),
            self.noise_vars.clone(),
            self.noise_weights.clone(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 || self.rows.saturating_mul(self.cols) < 2 {
            return Err(Error::invalid("need at least two nodes"));
        }
        if self.rows.saturating_mul(self.cols) > MAX_PARSED_NODES {
            return Err(Error::invalid(format!("at most {MAX_PARSED_NODES} nodes")));
        }
        for (name, v) in [
            ("particles", self.particles),
            ("time_slots", self.time_slots),
            ("runs", self.runs),
        ] {
            if v == 0 {
                return Err(Error::invalid(format!("{name} must be positive")));
            }
        }
        if self.max_graph_attempts == 0 {
            return Err(Error::invalid("max_graph_attempts must be positive"));
        }
        if self.trackers.is_empty() {
            return Err(Error::invalid("no trackers configured"));
        }
        if !(self.area[0] > 0.0 && self.area[1] > 0.0) || self.area.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("area must be positive"));
        }
        if !(self.comm_radius > 0.0 && self.comm_radius.is_finite()) {
            return Err(Error::invalid("comm_radius must be positive"));
        }
        if !(self.sense_radius >= 0.0 && self.sense_radius <= self.comm_radius) {
            return Err(Error::invalid("sense_radius must lie in [0, comm_radius]"));
        }
        if !(self.jitter_frac >= 0.0 && self.jitter_frac.is_finite()) {
            return Err(Error::invalid("jitter_frac must be non-negative"));
        }
        for (name, v) in [
            ("prior_pos_std", self.prior_pos_std),
            ("prior_vel_std", self.prior_vel_std),
            ("initial_speed", self.initial_speed),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be non-negative")));
            }
        }
        if self.start.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("start must be finite"));
        }
        if let Some(xi) = self.sbc_xi {
            if !(xi > 0.0 && xi.is_finite()) {
                return Err(Error::invalid("sbc_xi must be positive"));
            }
        }
        if !(self.bg_a.is_finite() && self.bg_b.is_finite()) {
            return Err(Error::invalid("bg_a and bg_b must be finite"));
        }
        self.motion()?;
        self.noise()?;
        Ok(())
    }

    /// Full key-value listing, parseable by [`Self::parse`].
    pub fn to_text(&self) -> String {
        let list = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("rows", self.rows.to_string());
        kv("cols", self.cols.to_string());
        kv("area_width", self.area[0].to_string());
        kv("area_height", self.area[1].to_string());
        kv("comm_radius", self.comm_radius.to_string());
        kv("sense_radius", self.sense_radius.to_string());
        kv("tree", self.tree.to_string());
        kv("jitter_frac", self.jitter_frac.to_string());
        kv("max_graph_attempts", self.max_graph_attempts.to_string());
        kv("sample_interval", self.sample_interval.to_string());
        kv("process_var", self.process_var.to_string());
        kv("initial_speed", self.initial_speed.to_string());
        kv("start_x", self.start[0].to_string());
        kv("start_y", self.start[1].to_string());
        kv("noise_means", list(&self.noise_means));
        kv("noise_vars", list(&self.noise_vars));
        kv("noise_weights", list(&self.noise_weights));
        kv("particles", self.particles.to_string());
        kv("prior_pos_std", self.prior_pos_std.to_string());
        kv("prior_vel_std", self.prior_vel_std.to_string());
        kv("time_slots", self.time_slots.to_string());
        kv("runs", self.runs.to_string());
        kv(
            "iterations",
            match self.iterations {
                IterationSetting::Fixed(n) => n.to_string(),
                IterationSetting::DiameterPlusOne => "auto".into(),
            },
        );
        kv(
            "trackers",
            self.trackers
                .iter()
                .map(TrackerKind::name)
                .collect::<Vec<_>>()
                .join(","),
        );
        kv("sbc_xi", self.sbc_xi.map_or("auto".into(), |x| x.to_string()));
        kv("bg_a", self.bg_a.to_string());
        kv("bg_b", self.bg_b.to_string());
        kv(
            "mbc_bipartite",
            match self.mbc_bipartite {
                BipartiteMode::Auto => "auto",
                BipartiteMode::Corrected => "on",
                BipartiteMode::Uncorrected => "off",
            }
            .into(),
        );
        kv("seed", self.seed.to_string());
        out
    }

    /// Parse a scenario file on top of the `desk-small` preset.
    pub fn parse(text: &str) -> Result<Self> {
        Self::default().overlay(text)
    }

    /// Apply `key = value` lines on top of `self`, then validate.
    pub fn overlay(mut self, text: &str) -> Result<Self> {
        let cfg = &mut self;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(line_no, "expected `key = value`"))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::parse(line_no, e.to_string()))?;
        }
        self.validate()?;
        Ok(self)
    }

    /// Set one field from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "preset" => *self = Self::preset(value)?,
            "rows" => self.rows = num(key, value)?,
            "cols" => self.cols = num(key, value)?,
            "area_width" => self.area[0] = num(key, value)?,
            "area_height" => self.area[1] = num(key, value)?,
            "comm_radius" => self.comm_radius = num(key, value)?,
            "sense_radius" => self.sense_radius = num(key, value)?,
            "tree" => self.tree = flag(key, value)?,
            "jitter_frac" => self.jitter_frac = num(key, value)?,
            "max_graph_attempts" => self.max_graph_attempts = num(key, value)?,
            "sample_interval" => self.sample_interval = num(key, value)?,
            "process_var" => self.process_var = num(key, value)?,
            "initial_speed" => self.initial_speed = num(key, value)?,
            "start_x" => self.start[0] = num(key, value)?,
            "start_y" => self.start[1] = num(key, value)?,
            "noise_means" => self.noise_means = num_list(key, value)?,
            "noise_vars" => self.noise_vars = num_list(key, value)?,
            "noise_weights" => self.noise_weights = num_list(key, value)?,
            "particles" => self.particles = num(key, value)?,
            "prior_pos_std" => self.prior_pos_std = num(key, value)?,
            "prior_vel_std" => self.prior_vel_std = num(key, value)?,
            "time_slots" => self.time_slots = num(key, value)?,
            "runs" => self.runs = num(key, value)?,
            "iterations" => {
                self.iterations = if value.eq_ignore_ascii_case("auto") {
                    IterationSetting::DiameterPlusOne
                } else {
                    IterationSetting::Fixed(num(key, value)?)
                }
            }
            "trackers" => {
                self.trackers = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?;
            }
            "sbc_xi" => {
                self.sbc_xi = if value.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    Some(num(key, value)?)
                }
            }
            "bg_a" => self.bg_a = num(key, value)?,
            "bg_b" => self.bg_b = num(key, value)?,
            "mbc_bipartite" => {
                self.mbc_bipartite = match value {
                    "auto" => BipartiteMode::Auto,
                    "on" | "true" => BipartiteMode::Corrected,
                    "off" | "false" => BipartiteMode::Uncorrected,
                    _ => return Err(Error::invalid(format!("mbc_bipartite: `{value}`"))),
                }
            }
            "seed" => self.seed = num(key, value)?,
            _ => return Err(Error::invalid(format!("unknown key `{key}`"))),
        }
        Ok(())
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::invalid(format!("{key}: cannot parse `{value}`")))
}

fn num_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|v| num(key, v.trim())).collect()
}

fn flag(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::invalid(format!("{key}: expected a boolean, got `{value}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oversized_grid_is_rejected() {
        assert!(ScenarioConfig::parse("rows = 100000\ncols = 100000\n").is_err());
        assert!(ScenarioConfig::parse("rows = 18446744073709551615\ncols = 2\n").is_err());
    }

    #[test]
    fn presets_validate() {
        for name in PRESET_NAMES {
            let cfg = ScenarioConfig::preset(name).unwrap();
            cfg.validate().unwrap();
            assert_eq!(cfg.nodes(), 25);
        }
        let p = ScenarioConfig::preset("paper-loopy-25").unwrap();
        assert_eq!(
            (p.comm_radius, p.sense_radius, p.particles, p.runs),
            (25.0, 25.0, 500, 500)
        );
        let d = ScenarioConfig::preset("desk-small").unwrap();
        assert_eq!((d.particles, d.runs, d.time_slots), (200, 50, 50));
        assert!(ScenarioConfig::preset("nope").is_err());
    }

    #[test]
    fn text_roundtrip() {
        let mut cfg = ScenarioConfig::preset("paper-tree-45").unwrap();
        cfg.sbc_xi = Some(0.125);
        cfg.iterations = IterationSetting::DiameterPlusOne;
        cfg.trackers = vec![
            TrackerKind::Exact,
            TrackerKind::DpfOracle,
            TrackerKind::Dpf(Algorithm::Bg),
        ];
        cfg.mbc_bipartite = BipartiteMode::Uncorrected;
        assert_eq!(ScenarioConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn preset_then_override() {
        let cfg = ScenarioConfig::parse("preset = paper-loopy-25\nruns = 3 # few\n\ntrackers = exact, mbc\n").unwrap();
        assert_eq!(cfg.comm_radius, 25.0);
        assert_eq!(cfg.runs, 3);
        assert_eq!(cfg.trackers, vec![TrackerKind::Exact, TrackerKind::Dpf(Algorithm::Mbc)]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        for (text, line) in [
            ("runs = 3\nbogus = 1\n", 2),
            ("no equals sign\n", 1),
            ("tree = maybe\n", 1),
            ("iterations = -2\n", 1),
        ] {
            match ScenarioConfig::parse(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(ScenarioConfig::parse("runs = 0\n").is_err());
        assert!(ScenarioConfig::parse("sense_radius = 60\n").is_err());
        assert!(ScenarioConfig::parse("noise_weights = 0.5,0.4\n").is_err());
    }
}
