//! Swarm solvers for the three problem shapes the library cares about:
//! nearest point on an ellipsoid to an outside target, shortest segment
//! between two disjoint ellipsoids, and a linear objective maximized over
//! one ellipsoid. Each solver owns its swarm state and can be stepped one
//! iteration at a time, or driven to completion through the `solve_*`
//! functions.

use nalgebra::{Cholesky, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ensure_finite_vec, Ellipsoid};
use crate::pso::{init_swarm, PsoConfig, Swarm};
use crate::rng::{derive_seed, stream, Stream};

/// Global best objective after the evaluation half of one iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub objective: f64,
}

/// Outcome of a completed solve. `best_y` is present only for two-region
/// problems. The trace column is monotone: non-increasing for the distance
/// problems, non-decreasing for the LP objective.
#[derive(Clone, Debug, Serialize)]
pub struct SolveResult {
    pub best_x: Vec<f64>,
    pub best_y: Option<Vec<f64>>,
    pub objective_value: f64,
    pub trace: Vec<TracePoint>,
    pub iterations_used: usize,
}

/// Minimize ‖a − x‖ over x in the region, with the target a strictly
/// outside it.
#[derive(Clone, Debug)]
pub struct NearestPointProblem {
    region: Ellipsoid,
    target: DVector<f64>,
}

impl NearestPointProblem {
    pub fn new(region: Ellipsoid, target: DVector<f64>) -> Result<Self> {
        ensure_finite_vec(&target, "target")?;
        if target.len() != region.dim() {
            return Err(Error::DimensionMismatch {
                expected: region.dim(),
                got: target.len(),
            });
        }
        if region.contains(&target) {
            return Err(Error::TargetInsideRegion);
        }
        Ok(NearestPointProblem { region, target })
    }

    pub fn region(&self) -> &Ellipsoid {
        &self.region
    }

    pub fn target(&self) -> &DVector<f64> {
        &self.target
    }
}

/// Shortest segment between two disjoint regions of equal dimension.
#[derive(Clone, Debug)]
pub struct TwoEllipsoidProblem {
    region_x: Ellipsoid,
    region_y: Ellipsoid,
}

impl TwoEllipsoidProblem {
    pub fn new(region_x: Ellipsoid, region_y: Ellipsoid) -> Result<Self> {
        if region_x.dim() != region_y.dim() {
            return Err(Error::DimensionMismatch {
                expected: region_x.dim(),
                got: region_y.dim(),
            });
        }
        if ellipsoids_intersect(&region_x, &region_y)? {
            return Err(Error::IntersectingRegions);
        }
        Ok(TwoEllipsoidProblem { region_x, region_y })
    }

    pub fn region_x(&self) -> &Ellipsoid {
        &self.region_x
    }

    pub fn region_y(&self) -> &Ellipsoid {
        &self.region_y
    }
}

/// Largest common factor by which both ellipsoids can be scaled about
/// their centers while staying disjoint; they touch exactly at this scale.
/// Values above 1 mean the pair is separated, below 1 intersecting.
///
/// Computed from the standard parametric overlap test: the concave function
/// K(s) = min_x [s·q₁(x) + (1−s)·q₂(x)] over s in (0,1), whose maximum K*
/// exceeds 1 exactly when the regions are disjoint, and scales as the
/// square of a common inflation factor. The inner minimizer solves the
/// normal equations of the blended quadratic; the outer maximum is found
/// by ternary search, which concavity makes exact.
pub fn separation_scale(e1: &Ellipsoid, e2: &Ellipsoid) -> Result<f64> {
    if e1.dim() != e2.dim() {
        return Err(Error::DimensionMismatch {
            expected: e1.dim(),
            got: e2.dim(),
        });
    }
    let blend_value = |s: f64| -> Result<f64> {
        let m = e1.shape() * s + e2.shape() * (1.0 - s);
        let rhs = e1.shape() * e1.center() * s + e2.shape() * e2.center() * (1.0 - s);
        let chol = Cholesky::new(m).ok_or(Error::NotPositiveDefinite)?;
        let x = chol.solve(&rhs);
        Ok(s * e1.quadratic_form(&x) + (1.0 - s) * e2.quadratic_form(&x))
    };
    let mut lo = 1e-9;
    let mut hi = 1.0 - 1e-9;
    for _ in 0..100 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if blend_value(m1)? < blend_value(m2)? {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let k_star = blend_value(0.5 * (lo + hi))?;
    Ok(k_star.sqrt())
}

/// Whether the two regions share a point. Tangency counts as intersecting,
/// so a `true` here rejects degenerate (length zero) shortest-path problems.
pub fn ellipsoids_intersect(e1: &Ellipsoid, e2: &Ellipsoid) -> Result<bool> {
    let scale = separation_scale(e1, e2)?;
    Ok(scale * scale <= 1.0 + 1e-9)
}

/// Single-swarm solver for [`NearestPointProblem`], steppable for callers
/// that want per-iteration state.
pub struct NearestPointSolver {
    problem: NearestPointProblem,
    cfg: PsoConfig,
    swarm: Swarm,
    rng: Stream,
    trace: Vec<TracePoint>,
}

impl NearestPointSolver {
    pub fn new(problem: NearestPointProblem, cfg: PsoConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = stream(cfg.seed);
        let swarm = init_swarm(&problem.region, &cfg, None, &mut rng)?;
        Ok(NearestPointSolver {
            problem,
            cfg,
            swarm,
            rng,
            trace: Vec::new(),
        })
    }

    /// One iteration; returns the global best distance so far.
    pub fn step(&mut self) -> Result<f64> {
        let target = self.problem.target.clone();
        let best = self
            .swarm
            .step(|x| (x - &target).norm(), Some(&target), &self.cfg, &mut self.rng)?;
        self.trace.push(TracePoint {
            iteration: self.trace.len(),
            objective: best,
        });
        Ok(best)
    }

    pub fn is_complete(&self) -> bool {
        self.trace.len() >= self.cfg.max_iterations
    }

    pub fn swarm(&self) -> &Swarm {
        &self.swarm
    }

    pub fn trace(&self) -> &[TracePoint] {
        &self.trace
    }

    pub fn into_result(self) -> SolveResult {
        SolveResult {
            best_x: self.swarm.best_position.as_slice().to_vec(),
            best_y: None,
            objective_value: self.swarm.best_value,
            iterations_used: self.trace.len(),
            trace: self.trace,
        }
    }
}

/// Maximize aᵀx over one region by minimizing −aᵀx. The attractor is the
/// analytic maximizer c + P⁻¹a / √(aᵀP⁻¹a); passing `use_attractor = false`
/// runs the same swarm without the pull (the r3 draw still happens, so the
/// two variants consume identical random streams).
pub struct LpSolver {
    objective_vector: DVector<f64>,
    attractor: Option<DVector<f64>>,
    cfg: PsoConfig,
    swarm: Swarm,
    rng: Stream,
    trace: Vec<TracePoint>,
}

impl LpSolver {
    pub fn new(
        objective_vector: DVector<f64>,
        region: &Ellipsoid,
        cfg: PsoConfig,
        use_attractor: bool,
    ) -> Result<Self> {
        cfg.validate()?;
        ensure_finite_vec(&objective_vector, "objective vector")?;
        if objective_vector.len() != region.dim() {
            return Err(Error::DimensionMismatch {
                expected: region.dim(),
                got: objective_vector.len(),
            });
        }
        if objective_vector.norm() == 0.0 {
            return Err(Error::InvalidConfig(
                "LP objective vector must be nonzero".into(),
            ));
        }
        let attractor = if use_attractor {
            let pulled = region.shape_solve(&objective_vector);
            let gain = objective_vector.dot(&pulled).sqrt();
            Some(region.center() + pulled / gain)
        } else {
            None
        };
        let mut rng = stream(cfg.seed);
        let swarm = init_swarm(region, &cfg, None, &mut rng)?;
        Ok(LpSolver {
            objective_vector,
            attractor,
            cfg,
            swarm,
            rng,
            trace: Vec::new(),
        })
    }

    /// One iteration; returns the best aᵀx found so far.
    pub fn step(&mut self) -> Result<f64> {
        let a = self.objective_vector.clone();
        let best = self.swarm.step(
            |x| -a.dot(x),
            self.attractor.as_ref(),
            &self.cfg,
            &mut self.rng,
        )?;
        self.trace.push(TracePoint {
            iteration: self.trace.len(),
            objective: -best,
        });
        Ok(-best)
    }

    pub fn is_complete(&self) -> bool {
        self.trace.len() >= self.cfg.max_iterations
    }

    pub fn swarm(&self) -> &Swarm {
        &self.swarm
    }

    pub fn trace(&self) -> &[TracePoint] {
        &self.trace
    }

    pub fn into_result(self) -> SolveResult {
        SolveResult {
            best_x: self.swarm.best_position.as_slice().to_vec(),
            best_y: None,
            objective_value: -self.swarm.best_value,
            iterations_used: self.trace.len(),
            trace: self.trace,
        }
    }
}

/// Two cooperating swarms, one per region, each chasing the other's
/// previous-iteration global best (both start on the other region's
/// center). Updates are simultaneous: targets swap only after both swarms
/// have moved, so the iteration outcome does not depend on swarm order.
///
/// The reported segment is the best feasible pair seen across all
/// iterations, where a pair is an iteration's best current position on one
/// side together with the target it was chasing (itself a feasible point
/// of the other region). Global bests alone would not do: each swarm's
/// best is measured against a moving target, so the distance between the
/// two bests can transiently grow.
pub struct TwoSwarmSolver {
    cfg: PsoConfig,
    swarm_x: Swarm,
    swarm_y: Swarm,
    rng_x: Stream,
    rng_y: Stream,
    target_x: DVector<f64>,
    target_y: DVector<f64>,
    best_pair: Option<(f64, DVector<f64>, DVector<f64>)>,
    trace: Vec<TracePoint>,
}

impl TwoSwarmSolver {
    pub fn new(problem: TwoEllipsoidProblem, cfg: PsoConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng_x = stream(derive_seed(cfg.seed, 1));
        let mut rng_y = stream(derive_seed(cfg.seed, 2));
        // particles start packed around their own center: early iterations
        // then pull the packs toward each other along the joining segment
        let swarm_x = init_swarm(
            &problem.region_x,
            &cfg,
            Some(&problem.region_x.center().clone()),
            &mut rng_x,
        )?;
        let swarm_y = init_swarm(
            &problem.region_y,
            &cfg,
            Some(&problem.region_y.center().clone()),
            &mut rng_y,
        )?;
        Ok(TwoSwarmSolver {
            cfg,
            target_x: problem.region_y.center().clone(),
            target_y: problem.region_x.center().clone(),
            swarm_x,
            swarm_y,
            rng_x,
            rng_y,
            best_pair: None,
            trace: Vec::new(),
        })
    }

    /// One simultaneous iteration of both swarms; returns the best pair
    /// distance so far.
    pub fn step(&mut self) -> Result<f64> {
        let target_x = self.target_x.clone();
        let target_y = self.target_y.clone();
        let (value_x, pos_x) = self
            .swarm_x
            .evaluate_and_update_bests(|x| (x - &target_x).norm())?;
        let (value_y, pos_y) = self
            .swarm_y
            .evaluate_and_update_bests(|y| (y - &target_y).norm())?;
        for (value, x_end, y_end) in [
            (value_x, pos_x, target_x.clone()),
            (value_y, target_y.clone(), pos_y),
        ] {
            if self.best_pair.as_ref().is_none_or(|p| value < p.0) {
                self.best_pair = Some((value, x_end, y_end));
            }
        }
        let best = self.best_pair.as_ref().expect("pair set above").0;
        self.trace.push(TracePoint {
            iteration: self.trace.len(),
            objective: best,
        });
        self.swarm_x
            .move_particles(Some(&target_x), &self.cfg, &mut self.rng_x);
        self.swarm_y
            .move_particles(Some(&target_y), &self.cfg, &mut self.rng_y);
        self.target_x = self.swarm_y.best_position.clone();
        self.target_y = self.swarm_x.best_position.clone();
        Ok(best)
    }

    pub fn is_complete(&self) -> bool {
        self.trace.len() >= self.cfg.max_iterations
    }

    pub fn swarm_x(&self) -> &Swarm {
        &self.swarm_x
    }

    pub fn swarm_y(&self) -> &Swarm {
        &self.swarm_y
    }

    pub fn best_pair(&self) -> Option<(&DVector<f64>, &DVector<f64>)> {
        self.best_pair.as_ref().map(|(_, x, y)| (x, y))
    }

    pub fn trace(&self) -> &[TracePoint] {
        &self.trace
    }

    pub fn into_result(self) -> SolveResult {
        let (objective_value, x, y) = self.best_pair.expect("solver has stepped at least once");
        SolveResult {
            best_x: x.as_slice().to_vec(),
            best_y: Some(y.as_slice().to_vec()),
            objective_value,
            iterations_used: self.trace.len(),
            trace: self.trace,
        }
    }
}

pub fn solve_nearest_point(problem: NearestPointProblem, cfg: &PsoConfig) -> Result<SolveResult> {
    let mut solver = NearestPointSolver::new(problem, cfg.clone())?;
    while !solver.is_complete() {
        solver.step()?;
    }
    Ok(solver.into_result())
}

pub fn solve_two_ellipsoids(problem: TwoEllipsoidProblem, cfg: &PsoConfig) -> Result<SolveResult> {
    let mut solver = TwoSwarmSolver::new(problem, cfg.clone())?;
    while !solver.is_complete() {
        solver.step()?;
    }
    Ok(solver.into_result())
}

pub fn solve_lp_on_ellipsoid(
    a: DVector<f64>,
    region: &Ellipsoid,
    cfg: &PsoConfig,
) -> Result<SolveResult> {
    solve_lp_with(a, region, cfg, true)
}

/// [`solve_lp_on_ellipsoid`] with the attractor pull optional.
pub fn solve_lp_with(
    a: DVector<f64>,
    region: &Ellipsoid,
    cfg: &PsoConfig,
    use_attractor: bool,
) -> Result<SolveResult> {
    let mut solver = LpSolver::new(a, region, cfg.clone(), use_attractor)?;
    while !solver.is_complete() {
        solver.step()?;
    }
    Ok(solver.into_result())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn cfg(seed: u64) -> PsoConfig {
        PsoConfig {
            seed,
            ..PsoConfig::default()
        }
    }

    fn circle(cx: f64, cy: f64) -> Ellipsoid {
        Ellipsoid::new(
            DVector::from_row_slice(&[cx, cy]),
            DMatrix::identity(2, 2),
        )
        .unwrap()
    }

    #[test]
    fn nearest_point_on_unit_circle_is_radial() {
        let prob = NearestPointProblem::new(
            Ellipsoid::unit_ball(2),
            DVector::from_row_slice(&[2.0, 0.0]),
        )
        .unwrap();
        let res = solve_nearest_point(prob, &cfg(7)).unwrap();
        assert_abs_diff_eq!(res.objective_value, 1.0, epsilon = 1e-2);
        // the distance is second-order flat along the boundary, so the
        // position tolerance is the square root of the value tolerance
        assert_abs_diff_eq!(res.best_x[0], 1.0, epsilon = 5e-2);
        assert_abs_diff_eq!(res.best_x[1], 0.0, epsilon = 5e-2);

        let prob = NearestPointProblem::new(
            Ellipsoid::unit_ball(2),
            DVector::from_row_slice(&[0.0, 3.0]),
        )
        .unwrap();
        let res = solve_nearest_point(prob, &cfg(8)).unwrap();
        assert_abs_diff_eq!(res.objective_value, 2.0, epsilon = 1e-2);
    }

    #[test]
    fn nearest_point_on_axis_aligned_ellipse() {
        // semi-axes 1 and 2; from (5,0) the nearest point is (1,0)
        let shape = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.25]);
        let region = Ellipsoid::new(DVector::zeros(2), shape).unwrap();
        let prob =
            NearestPointProblem::new(region, DVector::from_row_slice(&[5.0, 0.0])).unwrap();
        let res = solve_nearest_point(prob, &cfg(9)).unwrap();
        assert_abs_diff_eq!(res.objective_value, 4.0, epsilon = 1e-2);
    }

    #[test]
    fn nearest_point_rejects_inside_target() {
        let err = NearestPointProblem::new(
            Ellipsoid::unit_ball(2),
            DVector::from_row_slice(&[0.5, 0.0]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::TargetInsideRegion));
    }

    #[test]
    fn nearest_point_trace_is_monotone_and_feasible() {
        let prob = NearestPointProblem::new(
            Ellipsoid::unit_ball(2),
            DVector::from_row_slice(&[2.0, 1.0]),
        )
        .unwrap();
        let region = prob.region().clone();
        let res = solve_nearest_point(prob, &cfg(10)).unwrap();
        assert_eq!(res.trace.len(), res.iterations_used);
        for pair in res.trace.windows(2) {
            assert!(pair[1].objective <= pair[0].objective);
        }
        assert!(region.contains(&DVector::from_row_slice(&res.best_x)));
    }

    #[test]
    fn nearest_point_spheres_converge_for_most_seeds() {
        // distance within 1e-2 of the radial-projection optimum at T=200
        // for at least 48 of 50 seeds, position within the flatness-adjusted
        // 5e-2 of the projection itself
        let mut hits = 0;
        let short = PsoConfig {
            max_iterations: 200,
            ..PsoConfig::default()
        };
        for seed in 0..50u64 {
            let prob = NearestPointProblem::new(
                Ellipsoid::unit_ball(2),
                DVector::from_row_slice(&[2.0, 1.0]),
            )
            .unwrap();
            let res = solve_nearest_point(prob, &short.with_seed(seed)).unwrap();
            let norm = 5.0f64.sqrt();
            let proj = [2.0 / norm, 1.0 / norm];
            let close = (res.objective_value - (norm - 1.0)).abs() < 1e-2
                && (res.best_x[0] - proj[0]).abs() < 5e-2
                && (res.best_x[1] - proj[1]).abs() < 5e-2;
            hits += close as u32;
        }
        assert!(hits >= 48, "only {hits}/50 runs converged");
    }

    #[test]
    fn two_swarm_collinear_circles() {
        let prob = TwoEllipsoidProblem::new(circle(0.0, 0.0), circle(4.0, 0.0)).unwrap();
        let res = solve_two_ellipsoids(prob, &cfg(11)).unwrap();
        assert_abs_diff_eq!(res.objective_value, 2.0, epsilon = 1e-2);
        let y = res.best_y.as_ref().unwrap();
        assert_abs_diff_eq!(res.best_x[0], 1.0, epsilon = 2e-2);
        assert_abs_diff_eq!(y[0], 3.0, epsilon = 2e-2);

        let prob = TwoEllipsoidProblem::new(circle(0.0, 0.0), circle(0.0, 6.0)).unwrap();
        let res = solve_two_ellipsoids(prob, &cfg(12)).unwrap();
        assert_abs_diff_eq!(res.objective_value, 4.0, epsilon = 1e-2);
    }

    #[test]
    fn two_swarm_endpoints_are_feasible_and_trace_monotone() {
        let rx = circle(0.0, 0.0);
        let ry = circle(4.0, 3.0);
        let prob = TwoEllipsoidProblem::new(rx.clone(), ry.clone()).unwrap();
        let res = solve_two_ellipsoids(prob, &cfg(13)).unwrap();
        assert!(rx.contains(&DVector::from_row_slice(&res.best_x)));
        assert!(ry.contains(&DVector::from_row_slice(res.best_y.as_ref().unwrap())));
        for pair in res.trace.windows(2) {
            assert!(pair[1].objective <= pair[0].objective);
        }
    }

    #[test]
    fn two_swarm_is_symmetric_under_region_swap() {
        let ra = circle(0.0, 0.0);
        let rb = circle(4.0, 0.0);
        let fwd = solve_two_ellipsoids(
            TwoEllipsoidProblem::new(ra.clone(), rb.clone()).unwrap(),
            &cfg(14),
        )
        .unwrap();
        let rev =
            solve_two_ellipsoids(TwoEllipsoidProblem::new(rb, ra).unwrap(), &cfg(15)).unwrap();
        assert_abs_diff_eq!(fwd.objective_value, 2.0, epsilon = 1e-2);
        assert_abs_diff_eq!(rev.objective_value, 2.0, epsilon = 1e-2);
    }

    #[test]
    fn two_swarm_rejects_intersecting_regions() {
        let err = TwoEllipsoidProblem::new(circle(0.0, 0.0), circle(1.5, 0.0)).unwrap_err();
        assert!(matches!(err, Error::IntersectingRegions));
        // tangency counts as intersecting
        let err = TwoEllipsoidProblem::new(circle(0.0, 0.0), circle(2.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::IntersectingRegions));
    }

    #[test]
    fn separation_scale_matches_sphere_geometry() {
        // unit circles d apart touch when inflated by d/2
        let s = separation_scale(&circle(0.0, 0.0), &circle(4.0, 0.0)).unwrap();
        assert_abs_diff_eq!(s, 2.0, epsilon = 1e-6);
        let s = separation_scale(&circle(0.0, 0.0), &circle(3.0, 0.0)).unwrap();
        assert_abs_diff_eq!(s, 1.5, epsilon = 1e-6);
        // overlapping pair needs shrinking: scale below 1
        let s = separation_scale(&circle(0.0, 0.0), &circle(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(s, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn intersection_test_matches_examples() {
        assert!(!ellipsoids_intersect(&circle(0.0, 0.0), &circle(4.0, 0.0)).unwrap());
        assert!(ellipsoids_intersect(&circle(0.0, 0.0), &circle(1.5, 0.0)).unwrap());
        assert!(ellipsoids_intersect(&circle(0.0, 0.0), &circle(2.0, 0.0)).unwrap());
        let e3 = Ellipsoid::unit_ball(3);
        assert!(matches!(
            separation_scale(&circle(0.0, 0.0), &e3).unwrap_err(),
            Error::DimensionMismatch { .. }
        ));
    }

    #[test]
    fn lp_on_unit_circle_matches_analytic_optimum() {
        let short = PsoConfig {
            max_iterations: 50,
            ..PsoConfig::default()
        };
        let res = solve_lp_on_ellipsoid(
            DVector::from_row_slice(&[1.0, 1.0]),
            &Ellipsoid::unit_ball(2),
            &short.with_seed(3),
        )
        .unwrap();
        assert_abs_diff_eq!(res.objective_value, 2f64.sqrt(), epsilon = 5e-2);

        let res = solve_lp_on_ellipsoid(
            DVector::from_row_slice(&[3.0, 4.0]),
            &Ellipsoid::unit_ball(2),
            &cfg(4),
        )
        .unwrap();
        assert_abs_diff_eq!(res.objective_value, 5.0, epsilon = 5e-2);
        assert_abs_diff_eq!(res.best_x[0], 0.6, epsilon = 2e-2);
        assert_abs_diff_eq!(res.best_x[1], 0.8, epsilon = 2e-2);
    }

    #[test]
    fn lp_trace_is_non_decreasing() {
        let res = solve_lp_on_ellipsoid(
            DVector::from_row_slice(&[1.0, 1.0]),
            &Ellipsoid::unit_ball(2),
            &cfg(5),
        )
        .unwrap();
        for pair in res.trace.windows(2) {
            assert!(pair[1].objective >= pair[0].objective);
        }
    }

    #[test]
    fn lp_attractor_lands_on_tilted_ellipsoid_boundary() {
        // attractor must be the analytic maximizer: on the boundary, with
        // aᵀx = sqrt(aᵀ P⁻¹ a) + aᵀc
        let shape = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let center = DVector::from_row_slice(&[1.0, -1.0]);
        let region = Ellipsoid::new(center, shape).unwrap();
        let a = DVector::from_row_slice(&[1.0, 2.0]);
        let solver = LpSolver::new(a.clone(), &region, cfg(6), true).unwrap();
        let att = solver.attractor.clone().unwrap();
        assert_abs_diff_eq!(region.quadratic_form(&att), 1.0, epsilon = 1e-10);
        let gain = a.dot(&region.shape_solve(&a)).sqrt();
        assert_abs_diff_eq!(a.dot(&att), gain + a.dot(region.center()), epsilon = 1e-10);
    }

    #[test]
    fn lp_without_attractor_still_solves_small_problems() {
        let res = solve_lp_with(
            DVector::from_row_slice(&[1.0, 1.0]),
            &Ellipsoid::unit_ball(2),
            &cfg(16),
            false,
        )
        .unwrap();
        assert_abs_diff_eq!(res.objective_value, 2f64.sqrt(), epsilon = 5e-2);
    }

    #[test]
    fn lp_rejects_zero_objective() {
        let err = solve_lp_on_ellipsoid(DVector::zeros(2), &Ellipsoid::unit_ball(2), &cfg(1))
            .unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
    }

    #[test]
    fn solves_are_deterministic_per_seed() {
        let run = || {
            solve_two_ellipsoids(
                TwoEllipsoidProblem::new(circle(0.0, 0.0), circle(5.0, 1.0)).unwrap(),
                &cfg(42),
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.best_x, b.best_x);
        assert_eq!(a.best_y, b.best_y);
        assert_eq!(a.objective_value, b.objective_value);
        assert_eq!(a.trace, b.trace);
    }
}
