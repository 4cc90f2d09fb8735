//! Particle swarm optimization with linearly decreasing inertia.
//!
//! Velocity and position of particle i in dimension d evolve as
//!
//! ```text
//! v_id <- w * v_id + c1 * phi1 * (p_id - x_id) + c2 * phi2 * (p_gd - x_id)
//! x_id <- x_id + v_id
//! ```
//!
//! with fresh `phi1, phi2 ~ U[0, 1]` per particle, per dimension, per
//! iteration. The inertia `w` decreases linearly from `inertia_start` at
//! iteration 0 to `inertia_end` at the last iteration. Positions are clamped
//! coordinate-wise to the search box (velocities are left untouched and
//! unbounded). Personal bests are updated after all particles of an
//! iteration have been evaluated, and the global best after that, so the
//! trajectory is reproducible for a fixed seed regardless of evaluation
//! order.
//!
//! Non-finite fitness values (failed candidate evaluations) are treated as
//! positive infinity: the particle is repelled rather than crashing the run.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Swarm dimensions, schedule, learning rates, bounds and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct PsoConfig {
    pub dims: usize,
    pub swarm_size: usize,
    pub iterations: usize,
    /// Cognitive learning rate c1.
    pub c1: f64,
    /// Social learning rate c2.
    pub c2: f64,
    pub inertia_start: f64,
    pub inertia_end: f64,
    /// Per-dimension (min, max) position box; enforced after every step.
    pub position_bounds: Vec<(f64, f64)>,
    /// Per-dimension (min, max) range of the initial velocities.
    pub velocity_init_bounds: Vec<(f64, f64)>,
    pub seed: u64,
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims == 0 {
            return Err(Error::Config("dims must be at least 1".into()));
        }
        if self.swarm_size == 0 {
            return Err(Error::Config("swarm size must be at least 1".into()));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iteration count must be at least 1".into()));
        }
        if !(self.inertia_start.is_finite() && self.inertia_end.is_finite()) {
            return Err(Error::Config("inertia endpoints must be finite".into()));
        }
        if self.inertia_start < self.inertia_end {
            return Err(Error::Config(format!(
                "inertia must not increase over time: start {} < end {}",
                self.inertia_start, self.inertia_end
            )));
        }
        for (name, bounds) in [
            ("position", &self.position_bounds),
            ("velocity", &self.velocity_init_bounds),
        ] {
            if bounds.len() != self.dims {
                return Err(Error::Config(format!(
                    "{name} bounds cover {} dimensions, expected {}",
                    bounds.len(),
                    self.dims
                )));
            }
            for (d, (lo, hi)) in bounds.iter().enumerate() {
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return Err(Error::Config(format!(
                        "{name} bounds for dimension {d} are not well-ordered: ({lo}, {hi})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One particle: position, velocity and personal best.
#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub pbest_position: Vec<f64>,
    pub pbest_fitness: f64,
}

/// Outcome of a swarm run.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmResult {
    pub gbest_position: Vec<f64>,
    pub gbest_fitness: f64,
    /// Global best fitness after each iteration; non-increasing.
    pub history: Vec<f64>,
}

/// Swarm state stepped one iteration at a time.
#[derive(Debug, Clone)]
pub struct Swarm {
    cfg: PsoConfig,
    particles: Vec<Particle>,
    gbest_position: Vec<f64>,
    gbest_fitness: f64,
    rng: ChaCha8Rng,
    iteration: usize,
}

/// Inertia at `iteration` on the linear schedule; `inertia_start` at
/// iteration 0, `inertia_end` at the final iteration. A single-iteration
/// schedule stays at the start value.
pub fn inertia_at(cfg: &PsoConfig, iteration: usize) -> f64 {
    if cfg.iterations <= 1 {
        return cfg.inertia_start;
    }
    let t = iteration as f64 / (cfg.iterations - 1) as f64;
    cfg.inertia_start - (cfg.inertia_start - cfg.inertia_end) * t
}

fn sanitize(fitness: f64) -> f64 {
    if fitness.is_nan() {
        f64::INFINITY
    } else {
        fitness
    }
}

fn sample_range(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

impl Swarm {
    /// Draws the initial swarm and evaluates it.
    ///
    /// Positions are uniform within the position box, velocities within the
    /// velocity-init box; the personal best of each particle starts at its
    /// initial position, the global best at the best of those.
    pub fn initialize<F: Fn(&[f64]) -> f64>(cfg: PsoConfig, fitness: &F) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut particles = Vec::with_capacity(cfg.swarm_size);
        for _ in 0..cfg.swarm_size {
            let position: Vec<f64> = cfg
                .position_bounds
                .iter()
                .map(|&(lo, hi)| sample_range(&mut rng, lo, hi))
                .collect();
            let velocity: Vec<f64> = cfg
                .velocity_init_bounds
                .iter()
                .map(|&(lo, hi)| sample_range(&mut rng, lo, hi))
                .collect();
            let pbest_fitness = sanitize(fitness(&position));
            particles.push(Particle {
                pbest_position: position.clone(),
                position,
                velocity,
                pbest_fitness,
            });
        }
        let best = particles
            .iter()
            .min_by(|a, b| a.pbest_fitness.total_cmp(&b.pbest_fitness))
            .expect("swarm is non-empty");
        let gbest_position = best.pbest_position.clone();
        let gbest_fitness = best.pbest_fitness;
        Ok(Self {
            cfg,
            particles,
            gbest_position,
            gbest_fitness,
            rng,
            iteration: 0,
        })
    }

    /// Advances the swarm by one iteration.
    pub fn step<F: Fn(&[f64]) -> f64>(&mut self, fitness: &F) {
        assert!(
            self.iteration < self.cfg.iterations,
            "stepping past the configured iteration count"
        );
        let omega = inertia_at(&self.cfg, self.iteration);

        for particle in &mut self.particles {
            for d in 0..self.cfg.dims {
                let phi1: f64 = self.rng.random_range(0.0..=1.0);
                let phi2: f64 = self.rng.random_range(0.0..=1.0);
                let v = omega * particle.velocity[d]
                    + self.cfg.c1 * phi1 * (particle.pbest_position[d] - particle.position[d])
                    + self.cfg.c2 * phi2 * (self.gbest_position[d] - particle.position[d]);
                particle.velocity[d] = v;
                let (lo, hi) = self.cfg.position_bounds[d];
                particle.position[d] = (particle.position[d] + v).clamp(lo, hi);
            }
        }

        for particle in &mut self.particles {
            let f = sanitize(fitness(&particle.position));
            if f < particle.pbest_fitness {
                particle.pbest_fitness = f;
                particle.pbest_position.clone_from(&particle.position);
            }
        }

        for particle in &self.particles {
            if particle.pbest_fitness < self.gbest_fitness {
                self.gbest_fitness = particle.pbest_fitness;
                self.gbest_position.clone_from(&particle.pbest_position);
            }
        }

        self.iteration += 1;
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn gbest_position(&self) -> &[f64] {
        &self.gbest_position
    }

    pub fn gbest_fitness(&self) -> f64 {
        self.gbest_fitness
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }
}

/// Initializes a swarm and runs it for the configured iteration count.
pub fn run<F: Fn(&[f64]) -> f64>(cfg: PsoConfig, fitness: F) -> Result<SwarmResult> {
    let iterations = cfg.iterations;
    let mut swarm = Swarm::initialize(cfg, &fitness)?;
    let mut history = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        swarm.step(&fitness);
        history.push(swarm.gbest_fitness);
    }
    Ok(SwarmResult {
        gbest_position: swarm.gbest_position,
        gbest_fitness: swarm.gbest_fitness,
        history,
    })
}
