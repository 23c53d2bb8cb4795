//! Target motion, range observations and local likelihoods.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::numerics::log_sum_exp;
use crate::topology::{NetworkGraph, Point};
use crate::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Position (m) and velocity (m/s) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TargetState {
    pub pos: Point,
    pub vel: [f64; 2],
}

impl TargetState {
    pub fn new(x1: f64, x2: f64, v1: f64, v2: f64) -> Self {
        Self {
            pos: [x1, x2],
            vel: [v1, v2],
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.pos[0], self.pos[1], self.vel[0], self.vel[1]]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|c| c.is_finite())
    }

    pub fn speed(&self) -> f64 {
        self.vel[0].hypot(self.vel[1])
    }

    pub fn position_error(&self, other: &TargetState) -> f64 {
        (self.pos[0] - other.pos[0]).hypot(self.pos[1] - other.pos[1])
    }
}

/// Constant-velocity model driven by white acceleration noise.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionModel {
    sample_interval: f64,
    process_cov: [[f64; 2]; 2],
    /// Lower Cholesky factor of `process_cov`.
    chol: [[f64; 2]; 2],
    /// Reflecting boundary `[0, w] × [0, h]`, if any.
    area: Option<[f64; 2]>,
}

impl MotionModel {
    pub fn new(sample_interval: f64, process_cov: [[f64; 2]; 2]) -> Result<Self> {
        if !(sample_interval.is_finite() && sample_interval > 0.0) {
            return Err(Error::invalid(format!("sample interval {sample_interval}")));
        }
        let [[a, b], [c, d]] = process_cov;
        if [a, b, c, d].iter().any(|v| !v.is_finite()) || b != c {
            return Err(Error::invalid("process covariance must be finite and symmetric"));
        }
        if a < 0.0 || d < 0.0 || a * d - b * b < -1e-12 {
            return Err(Error::invalid("process covariance must be positive semidefinite"));
        }
        let l11 = a.sqrt();
        let l21 = if l11 > 0.0 { b / l11 } else { 0.0 };
        let l22 = (d - l21 * l21).max(0.0).sqrt();
        Ok(Self {
            sample_interval,
            process_cov,
            chol: [[l11, 0.0], [l21, l22]],
            area: None,
        })
    }

    /// The same model with a reflecting boundary at the edges of `area`.
    pub fn with_area(mut self, area: [f64; 2]) -> Result<Self> {
        if !(area[0] > 0.0 && area[1] > 0.0 && area.iter().all(|a| a.is_finite())) {
            return Err(Error::invalid("area must be positive"));
        }
        self.area = Some(area);
        Ok(self)
    }

    pub fn area(&self) -> Option<[f64; 2]> {
        self.area
    }

    /// Isotropic covariance `variance * I`.
    pub fn isotropic(sample_interval: f64, variance: f64) -> Result<Self> {
        Self::new(sample_interval, [[variance, 0.0], [0.0, variance]])
    }

    pub fn sample_interval(&self) -> f64 {
        self.sample_interval
    }

    pub fn process_cov(&self) -> [[f64; 2]; 2] {
        self.process_cov
    }

    /// One acceleration draw `u ~ N(0, process_cov)`.
    pub fn sample_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        let z0: f64 = StandardNormal.sample(rng);
        let z1: f64 = StandardNormal.sample(rng);
        [self.chol[0][0] * z0, self.chol[1][0] * z0 + self.chol[1][1] * z1]
    }

    /// `pos' = pos + T vel + T²/2 u`, `vel' = vel + T u`.
    pub fn propagate(&self, s: &TargetState, u: [f64; 2]) -> TargetState {
        let t = self.sample_interval;
        let half_t2 = 0.5 * t * t;
        TargetState {
            pos: [
                s.pos[0] + t * s.vel[0] + half_t2 * u[0],
                s.pos[1] + t * s.vel[1] + half_t2 * u[1],
            ],
            vel: [s.vel[0] + t * u[0], s.vel[1] + t * u[1]],
        }
    }

    /// [`Self::propagate`] followed by reflection at the boundary, if the
    /// model has one.
    pub fn transition(&self, s: &TargetState, u: [f64; 2]) -> TargetState {
        let next = self.propagate(s, u);
        match self.area {
            Some(area) => reflect_into_area(next, area),
            None => next,
        }
    }
}

/// Mirror a state back into `[0, area]` per axis, negating the velocity
/// component that crossed the boundary.
pub fn reflect_into_area(mut s: TargetState, area: [f64; 2]) -> TargetState {
    for k in 0..2 {
        let hi = area[k];
        // Bounded number of folds; a single step never crosses more than a
        // few widths for sane parameters.
        for _ in 0..64 {
            if s.pos[k] < 0.0 {
                s.pos[k] = -s.pos[k];
                s.vel[k] = -s.vel[k];
            } else if s.pos[k] > hi {
                s.pos[k] = 2.0 * hi - s.pos[k];
                s.vel[k] = -s.vel[k];
            } else {
                break;
            }
        }
        s.pos[k] = s.pos[k].clamp(0.0, hi);
    }
    s
}

/// Simulate `steps` Gaussian random-walk transitions from `initial`,
/// reflecting at the area boundary. The returned track holds the states at
/// slots `1..=steps` (the initial state is not included).
pub fn simulate_track<R: Rng + ?Sized>(
    initial: TargetState,
    motion: &MotionModel,
    area: [f64; 2],
    steps: usize,
    rng: &mut R,
) -> Vec<TargetState> {
    let mut track = Vec::with_capacity(steps);
    let mut s = initial;
    for _ in 0..steps {
        let u = motion.sample_noise(rng);
        s = reflect_into_area(motion.propagate(&s, u), area);
        track.push(s);
    }
    track
}

/// Initial state at `start` with the given speed in a uniformly random
/// heading.
pub fn random_heading_start<R: Rng + ?Sized>(start: Point, speed: f64, rng: &mut R) -> TargetState {
    let heading = rng.random::<f64>() * std::f64::consts::TAU;
    TargetState::new(start[0], start[1], speed * heading.cos(), speed * heading.sin())
}

/// Finite Gaussian mixture for the range-measurement noise.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureNoise {
    means: Vec<f64>,
    variances: Vec<f64>,
    weights: Vec<f64>,
    log_weights: Vec<f64>,
}

impl MixtureNoise {
    /// Zero variances are accepted for sampling (degenerate components);
    /// such a mixture has no density.
    pub fn new(means: Vec<f64>, variances: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if means.is_empty() || means.len() != variances.len() || means.len() != weights.len() {
            return Err(Error::invalid(
                "mixture means, variances and weights must be non-empty and of equal length",
            ));
        }
        if means.iter().chain(&variances).chain(&weights).any(|v| !v.is_finite()) {
            return Err(Error::invalid("mixture parameters must be finite"));
        }
        if variances.iter().any(|&v| v < 0.0) || weights.iter().any(|&w| w < 0.0) {
            return Err(Error::invalid("mixture variances and weights must be non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("mixture weights sum to {total}, not 1")));
        }
        let log_weights = weights.iter().map(|w| w.ln()).collect();
        Ok(Self {
            means,
            variances,
            weights,
            log_weights,
        })
    }

    /// Two components: means (1, 10) m, unit variances, weights (0.9, 0.1).
    pub fn standard() -> Self {
        Self::new(vec![1.0, 10.0], vec![1.0, 1.0], vec![0.9, 0.1]).expect("valid preset")
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mean(&self) -> f64 {
        self.means.iter().zip(&self.weights).map(|(m, w)| m * w).sum()
    }

    /// Pick a component by weight, then draw from it.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut k = self.weights.len() - 1;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                k = i;
                break;
            }
        }
        let z: f64 = StandardNormal.sample(rng);
        self.means[k] + self.variances[k].sqrt() * z
    }

    /// Log mixture density, evaluated as a log-sum-exp over components.
    pub fn log_density(&self, residual: f64) -> f64 {
        let mut terms = [0.0f64; 8];
        let mut heap;
        let terms: &mut [f64] = if self.means.len() <= terms.len() {
            &mut terms[..self.means.len()]
        } else {
            heap = vec![0.0; self.means.len()];
            &mut heap
        };
        for (k, t) in terms.iter_mut().enumerate() {
            let var = self.variances[k];
            let d = residual - self.means[k];
            *t = self.log_weights[k] - LN_SQRT_2PI - 0.5 * var.ln() - 0.5 * d * d / var;
        }
        let v = log_sum_exp(terms);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    }
}

/// Range measurements of one time slot, keyed by node. The key set is the
/// detection set.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObservationSet {
    pub t: usize,
    entries: BTreeMap<usize, f64>,
}

impl ObservationSet {
    pub fn new(t: usize, entries: BTreeMap<usize, f64>) -> Self {
        Self { t, entries }
    }

    pub fn empty(t: usize) -> Self {
        Self {
            t,
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.entries.get(&n).copied()
    }

    pub fn detecting_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn entries(&self) -> &BTreeMap<usize, f64> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The same slot restricted to `nodes`.
    pub fn restricted_to(&self, nodes: impl IntoIterator<Item = usize>) -> Self {
        let entries = nodes.into_iter().filter_map(|n| self.get(n).map(|y| (n, y))).collect();
        Self { t: self.t, entries }
    }
}

/// Nodes within the sensing radius of the target measure their distance to
/// it plus mixture noise.
pub fn observe<R: Rng + ?Sized>(
    g: &NetworkGraph,
    t: usize,
    s: &TargetState,
    noise: &MixtureNoise,
    rng: &mut R,
) -> ObservationSet {
    let mut entries = BTreeMap::new();
    for (n, l) in g.positions().iter().enumerate() {
        let d = (l[0] - s.pos[0]).hypot(l[1] - s.pos[1]);
        if d <= g.sense_radius() {
            entries.insert(n, d + noise.sample(rng));
        }
    }
    ObservationSet { t, entries }
}

/// `log p(y_n | x)`; zero for nodes without a measurement.
pub fn local_log_likelihood(
    g: &NetworkGraph,
    noise: &MixtureNoise,
    obs: &ObservationSet,
    n: usize,
    x: &TargetState,
) -> f64 {
    match obs.get(n) {
        None => 0.0,
        Some(y) => {
            let l = g.position(n);
            let d = (l[0] - x.pos[0]).hypot(l[1] - x.pos[1]);
            noise.log_density(y - d)
        }
    }
}

/// CSV with header `t,x1,x2,v1,v2`; slot numbers start at 1.
pub fn track_to_csv(track: &[TargetState]) -> String {
    let mut out = String::from("t,x1,x2,v1,v2\n");
    for (i, s) in track.iter().enumerate() {
        let _ = writeln!(out, "{},{},{},{},{}", i + 1, s.pos[0], s.pos[1], s.vel[0], s.vel[1]);
    }
    out
}

/// CSV with header `t,node,y`; node labels are 1-based.
pub fn observations_to_csv(observations: &[ObservationSet]) -> String {
    let mut out = String::from("t,node,y\n");
    for obs in observations {
        for (n, y) in obs.entries() {
            let _ = writeln!(out, "{},{},{}", obs.t, n + 1, y);
        }
    }
    out
}
