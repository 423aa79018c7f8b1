//! JSON-in/JSON-out API for the browser demo. Three operations: stepwise
//! two-ellipsoid shortest-path animation, the LP convergence race, and the
//! synthetic two-class classifier.
//!
//! Every function takes and returns JSON strings so the wasm boundary
//! stays trivial; failures come back as `{"error": "..."}` rather than a
//! panic crossing the FFI. The same functions compile and run on the host,
//! which is where the unit tests live. Build the browser package with
//! wasm-pack (see the repo README).

use std::cell::RefCell;
use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use ellipswarm::classifier::fit_hyperplane;
use ellipswarm::data::generate_synthetic;
use ellipswarm::experiments::{baseline_comparison, LP_TARGET};
use ellipswarm::solver::{LpSolver, TwoEllipsoidProblem, TwoSwarmSolver};
use ellipswarm::{Ellipsoid, Error, PsoConfig, Result};

const OUTLINE_POINTS: usize = 96;
/// Step/iteration caps so a stuck page cannot wedge the browser tab.
const MAX_ITERATIONS: usize = 5000;
const MAX_COUNT: usize = 5000;

fn json_ok<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).unwrap_or_else(|e| json_err(&format!("serialization: {e}")))
}

fn json_err(message: &str) -> String {
    let mut out = String::from("{\"error\":");
    out.push_str(&serde_json::to_string(message).unwrap_or_else(|_| "\"error\"".into()));
    out.push('}');
    out
}

fn points_of(swarm: &ellipswarm::pso::Swarm) -> Vec<[f64; 2]> {
    swarm
        .particles
        .iter()
        .map(|p| [p.position[0], p.position[1]])
        .collect()
}

fn outline(region: &Ellipsoid) -> Vec<[f64; 2]> {
    (0..=OUTLINE_POINTS)
        .map(|i| {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / OUTLINE_POINTS as f64;
            let u = DVector::from_row_slice(&[theta.cos(), theta.sin()]);
            let p = region.from_ball(&u);
            [p[0], p[1]]
        })
        .collect()
}

fn build_region(center: [f64; 2], shape: Option<[f64; 4]>) -> Result<Ellipsoid> {
    let c = DVector::from_row_slice(&center);
    let p = match shape {
        Some(s) => DMatrix::from_row_slice(2, 2, &s),
        None => DMatrix::identity(2, 2),
    };
    Ellipsoid::new(c, p)
}

fn demo_config(seed: u64, c4: Option<f64>) -> PsoConfig {
    let mut cfg = PsoConfig {
        seed,
        ..PsoConfig::default()
    };
    if let Some(c4) = c4 {
        cfg.c4 = c4;
    }
    cfg
}

// ---- two-ellipsoid shortest path ----------------------------------------

#[derive(Deserialize)]
struct TwoParams {
    center_x: [f64; 2],
    center_y: [f64; 2],
    #[serde(default)]
    shape_x: Option<[f64; 4]>,
    #[serde(default)]
    shape_y: Option<[f64; 4]>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    c4: Option<f64>,
}

#[derive(Serialize)]
struct TwoStart {
    handle: u32,
    outline_x: Vec<[f64; 2]>,
    outline_y: Vec<[f64; 2]>,
    particles_x: Vec<[f64; 2]>,
    particles_y: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct TwoStep {
    iteration: usize,
    particles_x: Vec<[f64; 2]>,
    particles_y: Vec<[f64; 2]>,
    best_x: [f64; 2],
    best_y: [f64; 2],
    distance: f64,
}

thread_local! {
    static TWO_SESSIONS: RefCell<HashMap<u32, TwoSwarmSolver>> = RefCell::new(HashMap::new());
    static NEXT_HANDLE: RefCell<u32> = const { RefCell::new(1) };
}

fn two_start_inner(params_json: &str) -> Result<String> {
    let params: TwoParams = serde_json::from_str(params_json)
        .map_err(|e| Error::InvalidConfig(format!("bad params: {e}")))?;
    let region_x = build_region(params.center_x, params.shape_x)?;
    let region_y = build_region(params.center_y, params.shape_y)?;
    let problem = TwoEllipsoidProblem::new(region_x, region_y)?;
    let cfg = demo_config(params.seed, params.c4);
    let solver = TwoSwarmSolver::new(problem, cfg)?;
    let start = TwoStart {
        handle: NEXT_HANDLE.with(|h| {
            let mut h = h.borrow_mut();
            let id = *h;
            *h += 1;
            id
        }),
        outline_x: outline(&solver.swarm_x().region),
        outline_y: outline(&solver.swarm_y().region),
        particles_x: points_of(solver.swarm_x()),
        particles_y: points_of(solver.swarm_y()),
    };
    TWO_SESSIONS.with(|s| s.borrow_mut().insert(start.handle, solver));
    Ok(json_ok(&start))
}

/// Creates a session; the result carries its `handle` for `two_step`.
pub fn two_start(params_json: &str) -> String {
    two_start_inner(params_json).unwrap_or_else(|e| json_err(&e.to_string()))
}

/// Advances a session `steps` iterations and reports the new swarm state.
pub fn two_step(handle: u32, steps: u32) -> String {
    TWO_SESSIONS.with(|sessions| {
        let mut sessions = sessions.borrow_mut();
        let Some(solver) = sessions.get_mut(&handle) else {
            return json_err("unknown session handle");
        };
        for _ in 0..steps {
            if solver.trace().len() >= MAX_ITERATIONS {
                break;
            }
            if let Err(e) = solver.step() {
                return json_err(&e.to_string());
            }
        }
        let Some((bx, by)) = solver.best_pair() else {
            return json_err("no iterations run yet");
        };
        let last = solver.trace().last().expect("stepped at least once");
        json_ok(&TwoStep {
            iteration: solver.trace().len(),
            particles_x: points_of(solver.swarm_x()),
            particles_y: points_of(solver.swarm_y()),
            best_x: [bx[0], bx[1]],
            best_y: [by[0], by[1]],
            distance: last.objective,
        })
    })
}

/// Drops a session. Unknown handles are ignored.
pub fn two_free(handle: u32) {
    TWO_SESSIONS.with(|s| {
        s.borrow_mut().remove(&handle);
    });
}

// ---- LP convergence race -------------------------------------------------

#[derive(Deserialize)]
struct RaceParams {
    #[serde(default)]
    seed: u64,
    iterations: usize,
}

#[derive(Serialize)]
struct RaceRow {
    iteration: usize,
    ellipsoid: f64,
    karmarkar_d05: f64,
    karmarkar_d50: f64,
    pso_c4_005: f64,
    pso_c4_020: f64,
}

#[derive(Serialize)]
struct RaceOut {
    optimum: f64,
    region: Vec<[f64; 2]>,
    rows: Vec<RaceRow>,
    /// Particle cloud per iteration for the c4 = 0.20 swarm arm; frame i
    /// matches the pso_c4_020 column of row i.
    frames: Vec<Vec<[f64; 2]>>,
}

fn lp_race_inner(params_json: &str) -> Result<String> {
    let params: RaceParams = serde_json::from_str(params_json)
        .map_err(|e| Error::InvalidConfig(format!("bad params: {e}")))?;
    if params.iterations == 0 || params.iterations > MAX_ITERATIONS {
        return Err(Error::InvalidConfig(format!(
            "iterations must be in 1..={MAX_ITERATIONS}"
        )));
    }
    let cfg = demo_config(params.seed, None);
    let cmp = baseline_comparison(params.iterations, &cfg)?;
    let rows = cmp
        .rows
        .iter()
        .map(|r| RaceRow {
            iteration: r.iteration,
            ellipsoid: r.ellipsoid,
            karmarkar_d05: r.karmarkar_d05,
            karmarkar_d50: r.karmarkar_d50,
            pso_c4_005: r.pso_c4_005,
            pso_c4_020: r.pso_c4_020,
        })
        .collect();
    // rerun the c4 = 0.20 arm with the identical seed purely to harvest
    // particle positions; the draw sequence matches the table's column
    let region = Ellipsoid::unit_ball(2);
    let a = DVector::from_row_slice(&[1.0, 1.0]);
    let arm = PsoConfig {
        c4: 0.20,
        max_iterations: params.iterations + 1,
        ..cfg
    };
    let mut solver = LpSolver::new(a, &region, arm, true)?;
    let mut frames = Vec::with_capacity(params.iterations + 1);
    while !solver.is_complete() {
        solver.step()?;
        frames.push(points_of(solver.swarm()));
    }
    Ok(json_ok(&RaceOut {
        optimum: LP_TARGET,
        region: outline(&region),
        rows,
        frames,
    }))
}

/// Five-series convergence comparison plus swarm animation frames.
pub fn lp_race(params_json: &str) -> String {
    lp_race_inner(params_json).unwrap_or_else(|e| json_err(&e.to_string()))
}

// ---- synthetic classifier -------------------------------------------------

#[derive(Deserialize)]
struct ClassifyParams {
    #[serde(default)]
    seed: u64,
    count: usize,
}

#[derive(Serialize)]
struct ClassifyOut {
    points_1: Vec<[f64; 2]>,
    points_2: Vec<[f64; 2]>,
    ellipse_1: Vec<[f64; 2]>,
    ellipse_2: Vec<[f64; 2]>,
    shrunk_1: Vec<[f64; 2]>,
    shrunk_2: Vec<[f64; 2]>,
    boundary_x: [f64; 2],
    boundary_y: [f64; 2],
    midpoint: [f64; 2],
    /// Hyperplane as w·x + w0 = 0, normalized.
    w: [f64; 2],
    w0: f64,
    shrink: f64,
    training_accuracy: f64,
}

fn classify_inner(params_json: &str) -> Result<String> {
    let params: ClassifyParams = serde_json::from_str(params_json)
        .map_err(|e| Error::InvalidConfig(format!("bad params: {e}")))?;
    if params.count < 3 || params.count > MAX_COUNT {
        return Err(Error::InvalidConfig(format!(
            "count must be in 3..={MAX_COUNT}"
        )));
    }
    let dataset = generate_synthetic(params.count, params.seed)?;
    let split = |label: &str| -> Vec<DVector<f64>> {
        dataset
            .indices_of(label)
            .into_iter()
            .map(|i| dataset.features()[i].clone())
            .collect()
    };
    let pts_1 = split("1");
    let pts_2 = split("2");
    let cfg = demo_config(params.seed, None);
    let trained = fit_hyperplane("1", "2", &pts_1, &pts_2, &cfg)?;
    let correct = dataset
        .features()
        .iter()
        .zip(dataset.labels())
        .filter(|(x, label)| trained.classify(x) == label.as_str())
        .count();
    let normalized = trained.hyperplane.normalized()?;
    let midpoint = trained.midpoint();
    let out = ClassifyOut {
        points_1: pts_1.iter().map(|p| [p[0], p[1]]).collect(),
        points_2: pts_2.iter().map(|p| [p[0], p[1]]).collect(),
        ellipse_1: outline(&trained.models.0.ellipsoid),
        ellipse_2: outline(&trained.models.1.ellipsoid),
        shrunk_1: outline(&trained.models.0.ellipsoid.scaled(trained.shrink)?),
        shrunk_2: outline(&trained.models.1.ellipsoid.scaled(trained.shrink)?),
        boundary_x: [trained.boundary_x[0], trained.boundary_x[1]],
        boundary_y: [trained.boundary_y[0], trained.boundary_y[1]],
        midpoint: [midpoint[0], midpoint[1]],
        w: [normalized.weights[0], normalized.weights[1]],
        w0: normalized.bias,
        shrink: trained.shrink,
        training_accuracy: correct as f64 / (2.0 * params.count as f64),
    };
    Ok(json_ok(&out))
}

/// Generates the two-Gaussian sample, fits the pairwise separator, and
/// returns everything the page needs to draw it.
pub fn classify(params_json: &str) -> String {
    classify_inner(params_json).unwrap_or_else(|e| json_err(&e.to_string()))
}

#[cfg(target_arch = "wasm32")]
mod wasm {
    use wasm_bindgen::prelude::wasm_bindgen;

    #[wasm_bindgen]
    pub fn two_start(params_json: &str) -> String {
        super::two_start(params_json)
    }

    #[wasm_bindgen]
    pub fn two_step(handle: u32, steps: u32) -> String {
        super::two_step(handle, steps)
    }

    #[wasm_bindgen]
    pub fn two_free(handle: u32) {
        super::two_free(handle);
    }

    #[wasm_bindgen]
    pub fn lp_race(params_json: &str) -> String {
        super::lp_race(params_json)
    }

    #[wasm_bindgen]
    pub fn classify(params_json: &str) -> String {
        super::classify(params_json)
    }
}
