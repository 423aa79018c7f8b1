//! Canned experiment drivers behind the CLI: repeated-run LP error
//! statistics and the five-series baseline convergence comparison.

use nalgebra::DVector;
use serde::Serialize;

use crate::baselines::{ellipsoid_method_lp, interior_step_lp};
use crate::error::{Error, Result};
use crate::geometry::Ellipsoid;
use crate::pso::PsoConfig;
use crate::rng::derive_seed;
use crate::solver::LpSolver;

/// Optimum of the reference LP: maximize x + y over the unit disk.
pub const LP_TARGET: f64 = std::f64::consts::SQRT_2;

fn reference_problem() -> (DVector<f64>, Ellipsoid) {
    (DVector::from_row_slice(&[1.0, 1.0]), Ellipsoid::unit_ball(2))
}

/// Final-error statistics over independent seeded runs of the reference LP.
#[derive(Clone, Debug, Serialize)]
pub struct LpStatistics {
    pub runs: usize,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    pub std_dev: f64,
    /// |f_best − √2| per run, in run order.
    pub errors: Vec<f64>,
    pub config: PsoConfig,
}

/// True optimum of maximizing aᵀx over an ellipsoid:
/// aᵀc + sqrt(aᵀ P⁻¹ a).
pub fn lp_optimum(a: &DVector<f64>, region: &Ellipsoid) -> f64 {
    a.dot(region.center()) + a.dot(&region.shape_solve(a)).sqrt()
}

/// Statistics of |f_best − f*| over `runs` solves of one LP, run r seeded
/// with derive_seed(cfg.seed, r). f* is the analytic optimum, so the
/// errors need no external reference. The standard deviation is the
/// sample estimate, zero for a single run.
pub fn lp_error_statistics_on(
    a: &DVector<f64>,
    region: &Ellipsoid,
    runs: usize,
    cfg: &PsoConfig,
    use_attractor: bool,
) -> Result<LpStatistics> {
    if runs == 0 {
        return Err(Error::InvalidConfig("need at least one run".into()));
    }
    cfg.validate()?;
    let target = lp_optimum(a, region);
    let mut errors = Vec::with_capacity(runs);
    for run in 0..runs {
        let run_cfg = cfg.with_seed(derive_seed(cfg.seed, run as u64));
        let mut solver = LpSolver::new(a.clone(), region, run_cfg, use_attractor)?;
        while !solver.is_complete() {
            solver.step()?;
        }
        errors.push((solver.into_result().objective_value - target).abs());
    }
    let min = errors.iter().copied().fold(f64::INFINITY, f64::min);
    let max = errors.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = errors.iter().sum::<f64>() / runs as f64;
    let std_dev = if runs < 2 {
        0.0
    } else {
        let var = errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (runs as f64 - 1.0);
        var.sqrt()
    };
    Ok(LpStatistics {
        runs,
        min,
        mean,
        max,
        std_dev,
        errors,
        config: cfg.clone(),
    })
}

/// [`lp_error_statistics_on`] applied to the reference problem.
pub fn lp_error_statistics(runs: usize, cfg: &PsoConfig) -> Result<LpStatistics> {
    let (a, region) = reference_problem();
    lp_error_statistics_on(&a, &region, runs, cfg, true)
}

/// One iteration of the five-series comparison on the reference LP.
/// Values are the incumbent objective aᵀx, not errors.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BaselineRow {
    pub iteration: usize,
    pub ellipsoid: f64,
    pub karmarkar_d05: f64,
    pub karmarkar_d50: f64,
    pub pso_c4_005: f64,
    pub pso_c4_020: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BaselineComparison {
    pub iterations: usize,
    pub seed: u64,
    pub rows: Vec<BaselineRow>,
}

impl BaselineComparison {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("iteration,ellipsoid,karmarkar_d05,karmarkar_d50,pso_c4_005,pso_c4_020\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.iteration, r.ellipsoid, r.karmarkar_d05, r.karmarkar_d50, r.pso_c4_005, r.pso_c4_020
            ));
        }
        out
    }
}

/// Runs the cutting-plane method, the damped interior step at δ = 0.05 and
/// 0.50, and the swarm at c₄ = 0.05 and 0.20 on the reference LP, aligned
/// per iteration. Row i holds each method's incumbent after i updates; both
/// swarm arms share one seed and consume identical draw sequences, so the
/// columns differ only through c₄.
pub fn baseline_comparison(iterations: usize, cfg: &PsoConfig) -> Result<BaselineComparison> {
    if iterations == 0 {
        return Err(Error::InvalidConfig("need at least one iteration".into()));
    }
    cfg.validate()?;
    let (a, region) = reference_problem();
    let ellipsoid = ellipsoid_method_lp(&a, &region, iterations)?;
    let karmarkar_d05 = interior_step_lp(&a, &region, 0.05, iterations)?;
    let karmarkar_d50 = interior_step_lp(&a, &region, 0.50, iterations)?;
    let mut swarm_traces = Vec::with_capacity(2);
    for c4 in [0.05, 0.20] {
        let arm_cfg = PsoConfig {
            c4,
            max_iterations: iterations + 1,
            ..cfg.clone()
        };
        let mut solver = LpSolver::new(a.clone(), &region, arm_cfg, true)?;
        while !solver.is_complete() {
            solver.step()?;
        }
        swarm_traces.push(solver.into_result().trace);
    }
    let rows = (0..=iterations)
        .map(|i| BaselineRow {
            iteration: i,
            ellipsoid: ellipsoid[i].objective,
            karmarkar_d05: karmarkar_d05[i].objective,
            karmarkar_d50: karmarkar_d50[i].objective,
            pso_c4_005: swarm_traces[0][i].objective,
            pso_c4_020: swarm_traces[1][i].objective,
        })
        .collect();
    Ok(BaselineComparison {
        iterations,
        seed: cfg.seed,
        rows,
    })
}
