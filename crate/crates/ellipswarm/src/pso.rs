//! The modified particle swarm.
//!
//! Velocities combine the three classic terms (inertia, personal best,
//! global best) with two additions: a pull toward a problem-specific
//! attractor point `a`, and a "craziness" kick of random direction and
//! random length that keeps the swarm exploring after it has clustered:
//!
//! ```text
//! v' = w v + c1 r1 (x_pb - x) + c2 r2 (x_gb - x) + c3 r3 (a - x) + c4 r4
//! ```
//!
//! `r1..r3` are fresh scalar draws from U[0,1]; `r4` is a random unit
//! direction scaled by a U[0,1] radius. Position updates that would leave
//! the feasible ellipsoid are rejected: the particle keeps its old position
//! but keeps the new velocity.

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{unit_sphere_point, Ellipsoid};

/// Swarm hyperparameters. The defaults are the working set used across all
/// experiments: small inertia and attraction weights with a dominant kick.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PsoConfig {
    pub w: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    /// Particles per swarm.
    pub swarm_size: usize,
    /// Iteration budget T.
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        PsoConfig {
            w: 0.05,
            c1: 0.05,
            c2: 0.05,
            c3: 0.05,
            c4: 0.20,
            swarm_size: 10,
            max_iterations: 1000,
            seed: 0,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        let coeffs = [self.w, self.c1, self.c2, self.c3, self.c4];
        if coeffs.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidConfig(
                "w, c1..c4 must be finite and non-negative".into(),
            ));
        }
        if self.swarm_size == 0 {
            return Err(Error::InvalidConfig("swarm_size must be at least 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Copy with a different seed; used to derive per-run configs.
    pub fn with_seed(&self, seed: u64) -> PsoConfig {
        PsoConfig { seed, ..self.clone() }
    }
}

#[derive(Clone, Debug)]
pub struct Particle {
    pub position: DVector<f64>,
    pub velocity: DVector<f64>,
    pub best_position: DVector<f64>,
    pub best_value: f64,
}

/// A particle population bound to one feasible ellipsoid.
#[derive(Clone, Debug)]
pub struct Swarm {
    pub particles: Vec<Particle>,
    pub region: Ellipsoid,
    pub best_position: DVector<f64>,
    pub best_value: f64,
    pub iteration: usize,
}

/// Initializes particles uniformly in the region, or near `center_bias`
/// when given (rejection-sampled from a copy of the region scaled to a
/// tenth and parked at the bias point). Velocities start at zero; bests
/// are fixed by the first evaluation.
pub fn init_swarm<R: Rng + ?Sized>(
    region: &Ellipsoid,
    cfg: &PsoConfig,
    center_bias: Option<&DVector<f64>>,
    rng: &mut R,
) -> Result<Swarm> {
    cfg.validate()?;
    if let Some(b) = center_bias {
        if !region.contains(b) {
            return Err(Error::InvalidConfig(
                "center bias must lie inside the region".into(),
            ));
        }
    }
    let dim = region.dim();
    let particles: Vec<Particle> = (0..cfg.swarm_size)
        .map(|_| {
            let position = match center_bias {
                Some(b) => region.sample_near(b, 0.1, rng),
                None => region.sample_inside(rng),
            };
            Particle {
                best_position: position.clone(),
                position,
                velocity: DVector::zeros(dim),
                best_value: f64::INFINITY,
            }
        })
        .collect();
    Ok(Swarm {
        // placeholder until the first evaluation; best_value stays infinite
        best_position: particles[0].position.clone(),
        particles,
        region: region.clone(),
        best_value: f64::INFINITY,
        iteration: 0,
    })
}

/// One velocity draw. The attractor term is skipped when no attractor is
/// given, but the r3 draw still happens so RNG streams stay aligned across
/// problem variants; the same holds for zero coefficients.
pub fn velocity_update<R: Rng + ?Sized>(
    p: &Particle,
    global_best: &DVector<f64>,
    attractor: Option<&DVector<f64>>,
    cfg: &PsoConfig,
    rng: &mut R,
) -> DVector<f64> {
    let r1: f64 = rng.random();
    let r2: f64 = rng.random();
    let r3: f64 = rng.random();
    // flat radius, not the ball-uniform r^(1/n) law: short kicks must stay
    // common in high dimension or the swarm cannot settle
    let radius: f64 = rng.random();
    let kick = unit_sphere_point(p.position.len(), rng) * radius;
    let mut v = &p.velocity * cfg.w;
    v += (&p.best_position - &p.position) * (cfg.c1 * r1);
    v += (global_best - &p.position) * (cfg.c2 * r2);
    if let Some(a) = attractor {
        v += (a - &p.position) * (cfg.c3 * r3);
    }
    v += kick * cfg.c4;
    v
}

/// Moves the particle by `velocity`, reverting the position (but keeping
/// the velocity) if the step would leave the region.
pub fn apply_velocity_with_repair(p: &mut Particle, velocity: DVector<f64>, region: &Ellipsoid) {
    let candidate = &p.position + &velocity;
    p.velocity = velocity;
    if region.contains(&candidate) {
        p.position = candidate;
    }
}

impl Swarm {
    /// Evaluates the objective at every particle and refreshes personal and
    /// global bests. Strict improvement only, so ties keep the incumbent.
    /// Returns the per-call best (this iteration's minimum and its position)
    /// for callers that track pair candidates.
    pub fn evaluate_and_update_bests<F>(&mut self, objective: F) -> Result<(f64, DVector<f64>)>
    where
        F: Fn(&DVector<f64>) -> f64,
    {
        let mut iter_best = f64::INFINITY;
        let mut iter_best_pos = None;
        for (i, p) in self.particles.iter_mut().enumerate() {
            let value = objective(&p.position);
            if !value.is_finite() {
                return Err(Error::NonFiniteObjective { particle: i });
            }
            if value < p.best_value {
                p.best_value = value;
                p.best_position = p.position.clone();
            }
            if value < iter_best {
                iter_best = value;
                iter_best_pos = Some(p.position.clone());
            }
        }
        for p in &self.particles {
            if p.best_value < self.best_value {
                self.best_value = p.best_value;
                self.best_position = p.best_position.clone();
            }
        }
        Ok((iter_best, iter_best_pos.expect("swarm is never empty")))
    }

    /// One full iteration: evaluate, update bests, then move every particle.
    /// Returns the global best value after the evaluation step.
    pub fn step<F, R: Rng + ?Sized>(
        &mut self,
        objective: F,
        attractor: Option<&DVector<f64>>,
        cfg: &PsoConfig,
        rng: &mut R,
    ) -> Result<f64>
    where
        F: Fn(&DVector<f64>) -> f64,
    {
        self.evaluate_and_update_bests(objective)?;
        self.move_particles(attractor, cfg, rng);
        Ok(self.best_value)
    }

    /// The movement half of an iteration, split out for solvers that need
    /// to examine evaluations before the swarm moves.
    pub fn move_particles<R: Rng + ?Sized>(
        &mut self,
        attractor: Option<&DVector<f64>>,
        cfg: &PsoConfig,
        rng: &mut R,
    ) {
        let global_best = self.best_position.clone();
        for p in &mut self.particles {
            let v = velocity_update(p, &global_best, attractor, cfg, rng);
            apply_velocity_with_repair(p, v, &self.region);
            debug_assert!(self.region.contains(&p.position));
        }
        self.iteration += 1;
    }
}
