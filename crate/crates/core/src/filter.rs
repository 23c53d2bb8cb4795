//! Sample-importance-resampling particle filter core.
//!
//! Every tracker shares this code. Particles are propagated with draws from
//! one particle stream and resampled with the same stream, so two trackers
//! seeded identically consume identical random numbers in each slot.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dynamics::{local_log_likelihood, MixtureNoise, MotionModel, ObservationSet, TargetState};
use crate::numerics::normalize_log_weights;
use crate::topology::NetworkGraph;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSet {
    pub states: Vec<TargetState>,
    pub log_weights: Vec<f64>,
}

impl ParticleSet {
    /// Uniformly weighted set.
    pub fn uniform(states: Vec<TargetState>) -> Self {
        let n = states.len();
        let w = -(n as f64).ln();
        Self {
            states,
            log_weights: vec![w; n],
        }
    }

    /// `count` particles drawn independently around `centre` with per-axis
    /// standard deviations for position and velocity.
    pub fn gaussian_around<R: Rng + ?Sized>(
        centre: &TargetState,
        pos_std: f64,
        vel_std: f64,
        count: usize,
        rng: &mut R,
    ) -> Self {
        let mut states = Vec::with_capacity(count);
        for _ in 0..count {
            let mut z = [0.0f64; 4];
            for v in &mut z {
                *v = StandardNormal.sample(rng);
            }
            states.push(TargetState::new(
                centre.pos[0] + pos_std * z[0],
                centre.pos[1] + pos_std * z[1],
                centre.vel[0] + vel_std * z[2],
                centre.vel[1] + vel_std * z[3],
            ));
        }
        Self::uniform(states)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Shift the log-weights so they sum to one in the linear domain.
    pub fn normalize(&mut self) -> Result<()> {
        normalize_log_weights(&mut self.log_weights)
            .map(|_| ())
            .ok_or(Error::FilterDivergence)
    }
}

/// Propagate each particle with its own process-noise draw through the
/// model's transition. Weights are carried over.
pub fn draw_particles<R: Rng + ?Sized>(prev: &ParticleSet, motion: &MotionModel, rng: &mut R) -> ParticleSet {
    let states = prev
        .states
        .iter()
        .map(|s| {
            let u = motion.sample_noise(rng);
            motion.transition(s, u)
        })
        .collect();
    ParticleSet {
        states,
        log_weights: prev.log_weights.clone(),
    }
}

/// Sum of local log-likelihoods over the detection set, per particle.
pub fn global_log_likelihood(
    particles: &ParticleSet,
    obs: &ObservationSet,
    g: &NetworkGraph,
    noise: &MixtureNoise,
) -> Vec<f64> {
    particles
        .states
        .iter()
        .map(|x| {
            obs.detecting_nodes()
                .map(|n| local_log_likelihood(g, noise, obs, n, x))
                .sum()
        })
        .collect()
}

/// Multiply in the global likelihood and normalize.
pub fn weight_global(
    mut particles: ParticleSet,
    obs: &ObservationSet,
    g: &NetworkGraph,
    noise: &MixtureNoise,
) -> Result<ParticleSet> {
    let increments = global_log_likelihood(&particles, obs, g, noise);
    for (w, inc) in particles.log_weights.iter_mut().zip(increments) {
        *w += inc;
    }
    particles.normalize()?;
    Ok(particles)
}

/// Weighted mean under already-normalized log-weights.
pub fn estimate_with(states: &[TargetState], log_weights: &[f64]) -> TargetState {
    let mut acc = [0.0f64; 4];
    for (s, &lw) in states.iter().zip(log_weights) {
        let w = lw.exp();
        for (a, c) in acc.iter_mut().zip(s.as_array()) {
            *a += w * c;
        }
    }
    TargetState::from_array(acc)
}

pub fn estimate(p: &ParticleSet) -> TargetState {
    estimate_with(&p.states, &p.log_weights)
}

/// Systematic resampling: indices of the selected parents. One uniform draw
/// is consumed from `rng`.
pub fn systematic_indices<R: Rng + ?Sized>(log_weights: &[f64], rng: &mut R) -> Vec<usize> {
    let n = log_weights.len();
    if n == 0 {
        return Vec::new();
    }
    let weights: Vec<f64> = log_weights.iter().map(|w| w.exp()).collect();
    let total: f64 = weights.iter().sum();
    let offset: f64 = rng.random();
    let step = total / n as f64;
    let mut indices = Vec::with_capacity(n);
    let mut cumulative = weights[0];
    let mut i = 0;
    for k in 0..n {
        let threshold = (offset + k as f64) * step;
        while cumulative < threshold && i + 1 < n {
            i += 1;
            cumulative += weights[i];
        }
        indices.push(i);
    }
    indices
}

/// Resample with replacement; the result is uniformly weighted.
pub fn resample<R: Rng + ?Sized>(p: &ParticleSet, rng: &mut R) -> ParticleSet {
    let states = systematic_indices(&p.log_weights, rng)
        .into_iter()
        .map(|i| p.states[i])
        .collect();
    ParticleSet::uniform(states)
}

/// One centralized SIR slot: draw, weight, normalize, estimate, resample.
pub fn cpf_step<R: Rng + ?Sized>(
    prev: &ParticleSet,
    obs: &ObservationSet,
    g: &NetworkGraph,
    motion: &MotionModel,
    noise: &MixtureNoise,
    rng: &mut R,
) -> Result<(ParticleSet, TargetState)> {
    let drawn = draw_particles(prev, motion, rng);
    let weighted = weight_global(drawn, obs, g, noise)?;
    let est = estimate(&weighted);
    Ok((resample(&weighted, rng), est))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn counts(indices: &[usize], n: usize) -> Vec<usize> {
        let mut c = vec![0; n];
        for &i in indices {
            c[i] += 1;
        }
        c
    }

    fn log(ws: &[f64]) -> Vec<f64> {
        ws.iter().map(|w| w.ln()).collect()
    }

    #[test]
    fn uniform_weights_resample_once_each() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let lw = vec![-(8f64).ln(); 8];
        assert_eq!(counts(&systematic_indices(&lw, &mut rng), 8), vec![1; 8]);
    }

    #[test]
    fn point_mass_resamples_to_single_parent() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let lw = log(&[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(systematic_indices(&lw, &mut rng), vec![0; 4]);
    }

    #[test]
    fn exact_proportions() {
        // With N w integral, every threshold lands strictly inside a block.
        let lw = log(&[0.5, 0.3, 0.2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = counts(&systematic_indices(&lw, &mut rng), 10);
            assert_eq!(&c[..3], &[5, 3, 2]);
        }
    }

    #[test]
    fn resample_output_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = ParticleSet {
            states: (0..5).map(|i| TargetState::new(i as f64, 0.0, 0.0, 0.0)).collect(),
            log_weights: log(&[0.1, 0.2, 0.3, 0.2, 0.2]),
        };
        let r = resample(&p, &mut rng);
        assert_eq!(r.len(), 5);
        assert!(r.log_weights.iter().all(|&w| (w + 5f64.ln()).abs() < 1e-15));
    }

    #[test]
    fn zero_noise_draw_is_deterministic() {
        let motion = MotionModel::isotropic(1.0, 0.0).unwrap();
        let p = ParticleSet::uniform(vec![TargetState::new(0.0, 0.0, 1.0, 2.0); 3]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let d = draw_particles(&p, &motion, &mut rng);
        assert!(d.states.iter().all(|s| *s == TargetState::new(1.0, 2.0, 1.0, 2.0)));
        assert_eq!(d.log_weights, p.log_weights);
    }

    #[test]
    fn draw_is_reproducible_and_sized() {
        let motion = MotionModel::isotropic(1.0, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = ParticleSet::gaussian_around(&TargetState::new(50.0, 50.0, 5.0, 0.0), 5.0, 1.0, 500, &mut rng);
        let a = draw_particles(&p, &motion, &mut ChaCha8Rng::seed_from_u64(2));
        let b = draw_particles(&p, &motion, &mut ChaCha8Rng::seed_from_u64(2));
        assert_eq!(a, b);
        assert_eq!(a.len(), 500);
    }

    #[test]
    fn estimate_point_mass_and_symmetry() {
        let s = TargetState::new(1.0, -2.0, 3.0, 0.5);
        let neg = TargetState::from_array(s.as_array().map(|c| -c));
        let p = ParticleSet {
            states: vec![s, neg, TargetState::default()],
            log_weights: vec![0.0, f64::NEG_INFINITY, f64::NEG_INFINITY],
        };
        assert_eq!(estimate(&p), s);
        let sym = ParticleSet::uniform(vec![s, neg]);
        assert!(estimate(&sym).as_array().iter().all(|c| c.abs() < 1e-15));
    }

    #[test]
    fn estimate_matches_dot_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let states: Vec<TargetState> = (0..10)
            .map(|_| TargetState::from_array([(); 4].map(|_| rng.random::<f64>() * 100.0)))
            .collect();
        let raw: Vec<f64> = (0..10).map(|_| rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        let p = ParticleSet {
            states: states.clone(),
            log_weights: raw.iter().map(|w| (w / total).ln()).collect(),
        };
        let est = estimate(&p).as_array();
        for k in 0..4 {
            let direct: f64 = states.iter().zip(&raw).map(|(s, w)| s.as_array()[k] * w / total).sum();
            assert!((est[k] - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn all_underflow_is_divergence() {
        let mut p = ParticleSet::uniform(vec![TargetState::default(); 2]);
        p.log_weights = vec![f64::NEG_INFINITY; 2];
        assert!(matches!(p.normalize(), Err(Error::FilterDivergence)));
    }
}
