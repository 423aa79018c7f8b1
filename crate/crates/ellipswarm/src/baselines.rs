//! Deterministic reference solvers for the linear-objective problem, used
//! as convergence baselines against the swarm: a central-cut ellipsoid
//! method and a damped interior ascent. Both maximize aᵀx over one
//! ellipsoidal region and emit a per-iteration trace, with entry 0 at the
//! region center and one entry per iteration after it.
//!
//! The interior ascent stands in for an affine-scaling step applied to a
//! quadratic constraint. It walks the objective direction with step length
//! δ · slack² scaled by the region's shortest semi-axis, where slack is
//! 1 − √(quadratic form); squaring the slack keeps the iterate strictly
//! interior and gives the slow boundary approach the comparison looks at.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{ensure_finite_vec, eigen_spd, Ellipsoid};
use crate::solver::TracePoint;

fn check_objective(a: &DVector<f64>, region: &Ellipsoid) -> Result<()> {
    ensure_finite_vec(a, "objective vector")?;
    if a.len() != region.dim() {
        return Err(Error::DimensionMismatch {
            expected: region.dim(),
            got: a.len(),
        });
    }
    if a.norm() == 0.0 {
        return Err(Error::InvalidConfig(
            "LP objective vector must be nonzero".into(),
        ));
    }
    Ok(())
}

/// Central-cut ellipsoid method state. The localization ellipsoid
/// {x: (x−center)ᵀ shape⁻¹ (x−center) ≤ 1} starts equal to the feasible
/// region; feasible centers cut away the halfspace of worse objective
/// values, infeasible centers cut along the constraint gradient.
pub struct EllipsoidMethodState {
    objective_vector: DVector<f64>,
    region: Ellipsoid,
    pub center: DVector<f64>,
    pub shape: DMatrix<f64>,
    pub best_feasible_value: f64,
    pub iteration: usize,
    converged: bool,
}

impl EllipsoidMethodState {
    pub fn new(a: DVector<f64>, region: Ellipsoid) -> Result<Self> {
        check_objective(&a, &region)?;
        if region.dim() == 1 {
            // the n²/(n²−1) volume factor degenerates; nothing in the
            // comparison needs 1-d regions
            return Err(Error::InvalidConfig(
                "ellipsoid method needs dimension at least 2".into(),
            ));
        }
        let center = region.center().clone();
        let shape = crate::geometry::spd_inverse(region.shape())?;
        Ok(EllipsoidMethodState {
            best_feasible_value: a.dot(&center),
            objective_vector: a,
            region,
            center,
            shape,
            iteration: 0,
            converged: false,
        })
    }

    /// One cut. Returns the best feasible value so far. Once the
    /// localization ellipsoid shrinks below float resolution (or loses
    /// definiteness to rounding) the method is converged and further steps
    /// hold the incumbent.
    pub fn step(&mut self) -> f64 {
        self.iteration += 1;
        if self.converged {
            return self.best_feasible_value;
        }
        let n = self.region.dim() as f64;
        let g = if self.region.contains(&self.center) {
            self.best_feasible_value = self
                .best_feasible_value
                .max(self.objective_vector.dot(&self.center));
            -self.objective_vector.clone()
        } else {
            self.region.shape() * (&self.center - self.region.center())
        };
        let hg = &self.shape * &g;
        let ghg = g.dot(&hg);
        if ghg <= f64::MIN_POSITIVE || !ghg.is_finite() {
            self.converged = true;
            return self.best_feasible_value;
        }
        self.center -= &hg / (ghg.sqrt() * (n + 1.0));
        let outer = &hg * hg.transpose();
        let h = (&self.shape - outer * (2.0 / ((n + 1.0) * ghg))) * (n * n / (n * n - 1.0));
        // symmetrize to keep rounding from accumulating in the downdate
        self.shape = (&h + h.transpose()) * 0.5;
        self.best_feasible_value
    }
}

/// Runs the ellipsoid method for the given budget. The trace records the
/// best feasible objective seen so far (non-decreasing by construction),
/// with entry 0 taken at the region center.
pub fn ellipsoid_method_lp(
    a: &DVector<f64>,
    region: &Ellipsoid,
    iterations: usize,
) -> Result<Vec<TracePoint>> {
    if iterations == 0 {
        return Err(Error::InvalidConfig(
            "iteration count must be at least 1".into(),
        ));
    }
    let mut state = EllipsoidMethodState::new(a.clone(), region.clone())?;
    let mut trace = vec![TracePoint {
        iteration: 0,
        objective: state.best_feasible_value,
    }];
    for t in 1..=iterations {
        let best = state.step();
        trace.push(TracePoint {
            iteration: t,
            objective: best,
        });
    }
    Ok(trace)
}

/// Damped interior ascent state; the iterate stays strictly interior
/// because the step length vanishes quadratically at the boundary.
pub struct InteriorStepState {
    objective_vector: DVector<f64>,
    region: Ellipsoid,
    direction: DVector<f64>,
    r_min: f64,
    pub current: DVector<f64>,
    pub delta: f64,
    pub iteration: usize,
}

impl InteriorStepState {
    pub fn new(a: DVector<f64>, region: Ellipsoid, delta: f64) -> Result<Self> {
        check_objective(&a, &region)?;
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidConfig(
                "delta must lie strictly between 0 and 1".into(),
            ));
        }
        // shortest semi-axis: step lengths must make sense in the region's
        // narrowest direction regardless of the shape's scaling
        let (eigenvalues, _) = eigen_spd(region.shape())?;
        let r_min = 1.0 / eigenvalues[0].sqrt();
        let direction = &a / a.norm();
        Ok(InteriorStepState {
            objective_vector: a,
            current: region.center().clone(),
            region,
            direction,
            r_min,
            delta,
            iteration: 0,
        })
    }

    /// One ascent step; returns aᵀx at the new iterate.
    pub fn step(&mut self) -> f64 {
        self.iteration += 1;
        let slack = 1.0 - self.region.quadratic_form(&self.current).sqrt();
        self.current += &self.direction * (self.delta * slack * slack * self.r_min);
        debug_assert!(self.region.quadratic_form(&self.current) < 1.0);
        self.objective_vector.dot(&self.current)
    }

    pub fn value(&self) -> f64 {
        self.objective_vector.dot(&self.current)
    }
}

/// Runs the interior ascent for the given budget, recording aᵀx per
/// iteration with entry 0 at the region center.
pub fn interior_step_lp(
    a: &DVector<f64>,
    region: &Ellipsoid,
    delta: f64,
    iterations: usize,
) -> Result<Vec<TracePoint>> {
    if iterations == 0 {
        return Err(Error::InvalidConfig(
            "iteration count must be at least 1".into(),
        ));
    }
    let mut state = InteriorStepState::new(a.clone(), region.clone(), delta)?;
    let mut trace = vec![TracePoint {
        iteration: 0,
        objective: state.value(),
    }];
    for t in 1..=iterations {
        let value = state.step();
        trace.push(TracePoint {
            iteration: t,
            objective: value,
        });
    }
    Ok(trace)
}
