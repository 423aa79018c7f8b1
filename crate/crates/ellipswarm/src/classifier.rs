//! The ellipsoid-margin classifier. Each class becomes an ellipsoid
//! centered on its sample mean with the inverse covariance as shape,
//! rescaled so the class's own frontier point (the sample nearest the
//! other class's mean, measured in the other class's Mahalanobis metric)
//! sits exactly on the boundary. The separating hyperplane is the
//! perpendicular bisector of the shortest segment between the two class
//! ellipsoids, found by the two-swarm solver.
//!
//! Class ellipsoids built from real data routinely overlap. Before the
//! solve, both are shrunk about their centers by ρ = min(1, 0.9·s) where
//! s is the common scale at which the pair would touch; disjoint pairs
//! with a wide margin (s ≥ 1/0.9) are untouched, everything else separates
//! with 10% clearance. The bisector of the shrunk pair is the same
//! hyperplane an exact solver would produce for mildly overlapping
//! classes, and the clearance keeps the swarm away from the noisy
//! near-tangent regime. If even shrinking cannot separate the classes
//! (coincident ellipsoids), the mean-difference bisector is used instead.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::{sample_covariance, sample_mean};
use crate::error::{Error, Result};
use crate::geometry::{mahalanobis_sq, spd_inverse, Ellipsoid};
use crate::pso::PsoConfig;
use crate::rng::derive_seed;
use crate::solver::{separation_scale, solve_two_ellipsoids, TwoEllipsoidProblem};

/// Shrink margin applied to the touch scale; see the module docs.
const SHRINK_MARGIN: f64 = 0.9;
/// Below this shrink factor the class ellipsoids are effectively
/// coincident and the solve is replaced by the mean-difference bisector.
const DEGENERATE_SHRINK: f64 = 1e-6;

/// One labeled point set.
#[derive(Clone, Debug)]
pub struct ClassSamples {
    pub label: String,
    pub points: Vec<DVector<f64>>,
}

/// Per-class geometry: sample statistics plus the frontier-normalized
/// ellipsoid.
#[derive(Clone, Debug)]
pub struct ClassModel {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
    /// Squared Mahalanobis radius (own metric) of the class's frontier
    /// point; the ellipsoid shape is covariance⁻¹ divided by this.
    pub boundary_scale: f64,
    pub ellipsoid: Ellipsoid,
}

/// Fits the class ellipsoid for `own` against `other`. Both classes need
/// nondegenerate covariances: the frontier point is selected in the other
/// class's metric.
pub fn fit_class_model(own: &[DVector<f64>], other: &[DVector<f64>]) -> Result<ClassModel> {
    if own.is_empty() || other.is_empty() {
        return Err(Error::InvalidConfig(
            "both classes need at least one sample".into(),
        ));
    }
    let dim = own[0].len();
    if own.len() < dim + 1 {
        return Err(Error::DegenerateData(format!(
            "class needs at least {} samples in {dim} dimensions, got {}",
            dim + 1,
            own.len()
        )));
    }
    let mean = sample_mean(own);
    let covariance = sample_covariance(own, &mean)?;
    let inverse = spd_inverse(&covariance).map_err(|_| {
        Error::DegenerateData(
            "singular class covariance; whiten the data or drop constant features".into(),
        )
    })?;
    let other_mean = sample_mean(other);
    let other_inverse = spd_inverse(&sample_covariance(other, &other_mean)?).map_err(|_| {
        Error::DegenerateData(
            "singular class covariance; whiten the data or drop constant features".into(),
        )
    })?;
    let frontier = own
        .iter()
        .min_by(|a, b| {
            let da = mahalanobis_sq(a, &other_mean, &other_inverse);
            let db = mahalanobis_sq(b, &other_mean, &other_inverse);
            da.partial_cmp(&db).expect("finite Mahalanobis distances")
        })
        .expect("own is nonempty");
    let boundary_scale = mahalanobis_sq(frontier, &mean, &inverse);
    if boundary_scale.is_nan() || boundary_scale <= 1e-12 {
        return Err(Error::DegenerateData(
            "frontier point coincides with the class mean".into(),
        ));
    }
    let ellipsoid = Ellipsoid::new(mean.clone(), &inverse / boundary_scale)?;
    Ok(ClassModel {
        mean,
        covariance,
        boundary_scale,
        ellipsoid,
    })
}

/// z(x) = wᵀx + w0; the sign carries the class decision.
#[derive(Clone, Debug)]
pub struct Hyperplane {
    pub weights: DVector<f64>,
    pub bias: f64,
}

impl Hyperplane {
    pub fn decision(&self, x: &DVector<f64>) -> f64 {
        self.weights.dot(x) + self.bias
    }

    /// Same zero set, unit-norm weights.
    pub fn normalized(&self) -> Result<Hyperplane> {
        let norm = self.weights.norm();
        if norm == 0.0 {
            return Err(Error::InvalidConfig(
                "cannot normalize a zero weight vector".into(),
            ));
        }
        Ok(Hyperplane {
            weights: &self.weights / norm,
            bias: self.bias / norm,
        })
    }
}

/// A trained one-vs-one separator: z(x) ≥ 0 votes for the first label.
#[derive(Clone, Debug)]
pub struct PairwiseClassifier {
    pub labels: (String, String),
    pub hyperplane: Hyperplane,
    pub models: (ClassModel, ClassModel),
    /// Factor both class ellipsoids were scaled by before the solve.
    pub shrink: f64,
    pub boundary_x: DVector<f64>,
    pub boundary_y: DVector<f64>,
    pub seed: u64,
    pub iterations: usize,
    pub objective: f64,
}

impl PairwiseClassifier {
    pub fn classify(&self, x: &DVector<f64>) -> &str {
        if self.hyperplane.decision(x) >= 0.0 {
            &self.labels.0
        } else {
            &self.labels.1
        }
    }

    /// Midpoint of the boundary segment; lies on the hyperplane.
    pub fn midpoint(&self) -> DVector<f64> {
        (&self.boundary_x + &self.boundary_y) * 0.5
    }

    pub fn record(&self) -> ClassifierRecord {
        ClassifierRecord {
            pair: self.labels.clone(),
            dim: self.boundary_x.len(),
            w: self.hyperplane.weights.as_slice().to_vec(),
            w0: self.hyperplane.bias,
            x_b: self.boundary_x.as_slice().to_vec(),
            y_b: self.boundary_y.as_slice().to_vec(),
            seed: self.seed,
            iterations: self.iterations,
            objective: self.objective,
        }
    }
}

/// Flat serialization of one trained hyperplane (one JSON object per
/// line in model files). Weights are the raw boundary-point difference;
/// normalize via [`Hyperplane::normalized`] when comparing magnitudes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassifierRecord {
    pub pair: (String, String),
    pub dim: usize,
    pub w: Vec<f64>,
    pub w0: f64,
    pub x_b: Vec<f64>,
    pub y_b: Vec<f64>,
    pub seed: u64,
    pub iterations: usize,
    pub objective: f64,
}

/// Trains the separator for one labeled pair. The hyperplane is the
/// perpendicular bisector of the shortest segment between the (possibly
/// shrunk) class ellipsoids, oriented so the first class's mean scores
/// z ≥ 0.
pub fn fit_hyperplane(
    label1: &str,
    label2: &str,
    class1: &[DVector<f64>],
    class2: &[DVector<f64>],
    cfg: &PsoConfig,
) -> Result<PairwiseClassifier> {
    cfg.validate()?;
    let m1 = fit_class_model(class1, class2)?;
    let m2 = fit_class_model(class2, class1)?;
    let touch_scale = separation_scale(&m1.ellipsoid, &m2.ellipsoid)?;
    let shrink = (SHRINK_MARGIN * touch_scale).min(1.0);
    if shrink <= DEGENERATE_SHRINK {
        // coincident class ellipsoids: no segment to bisect, fall back to
        // the mean-difference bisector
        let weights = &m1.mean - &m2.mean;
        if weights.norm() == 0.0 {
            return Err(Error::DegenerateData(format!(
                "classes {label1} and {label2} have identical means"
            )));
        }
        let bias = -weights.dot(&(&m1.mean + &m2.mean)) / 2.0;
        let objective = weights.norm();
        return Ok(PairwiseClassifier {
            labels: (label1.to_string(), label2.to_string()),
            hyperplane: Hyperplane { weights, bias },
            boundary_x: m1.mean.clone(),
            boundary_y: m2.mean.clone(),
            models: (m1, m2),
            shrink,
            seed: cfg.seed,
            iterations: 0,
            objective,
        });
    }
    let problem = TwoEllipsoidProblem::new(
        m1.ellipsoid.scaled(shrink)?,
        m2.ellipsoid.scaled(shrink)?,
    )
    .map_err(|e| match e {
        Error::IntersectingRegions => Error::NotSeparable {
            first: label1.to_string(),
            second: label2.to_string(),
        },
        other => other,
    })?;
    let result = solve_two_ellipsoids(problem, cfg)?;
    let boundary_x = DVector::from_row_slice(&result.best_x);
    let boundary_y = DVector::from_row_slice(result.best_y.as_ref().expect("two-region solve"));
    let mut weights = &boundary_x - &boundary_y;
    let mut bias = -weights.dot(&(&boundary_x + &boundary_y)) / 2.0;
    if weights.dot(&m1.mean) + bias < 0.0 {
        weights = -weights;
        bias = -bias;
    }
    Ok(PairwiseClassifier {
        labels: (label1.to_string(), label2.to_string()),
        hyperplane: Hyperplane { weights, bias },
        models: (m1, m2),
        shrink,
        boundary_x,
        boundary_y,
        seed: cfg.seed,
        iterations: result.iterations_used,
        objective: result.objective_value,
    })
}

/// One classifier per unordered class pair (1 for two classes, 3 for
/// three), with per-pair seeds derived from the master seed and the pair
/// index so the pairs are independent but reproducible.
pub fn multiclass_train(
    classes: &[ClassSamples],
    cfg: &PsoConfig,
) -> Result<Vec<PairwiseClassifier>> {
    if classes.len() < 2 || classes.len() > 3 {
        return Err(Error::InvalidConfig(format!(
            "classifier handles 2 or 3 classes, got {}",
            classes.len()
        )));
    }
    let dim = classes
        .first()
        .and_then(|c| c.points.first())
        .map(|p| p.len())
        .ok_or_else(|| Error::InvalidConfig("empty class".into()))?;
    for class in classes {
        if class.points.len() < dim + 1 {
            return Err(Error::TooFewSamples {
                label: class.label.clone(),
                needed: dim + 1,
                got: class.points.len(),
            });
        }
    }
    let mut out = Vec::new();
    let mut pair_index = 0u64;
    for i in 0..classes.len() {
        for j in (i + 1)..classes.len() {
            let pair_cfg = cfg.with_seed(derive_seed(cfg.seed, pair_index));
            out.push(fit_hyperplane(
                &classes[i].label,
                &classes[j].label,
                &classes[i].points,
                &classes[j].points,
                &pair_cfg,
            )?);
            pair_index += 1;
        }
    }
    Ok(out)
}

/// Majority vote over pairwise ballots of (winning label, |margin|).
/// Ties, vote cycles included, go to the largest margin among ballots
/// naming a tied label; equal margins keep the earliest ballot.
pub fn majority_vote<'a>(ballots: &[(&'a str, f64)]) -> &'a str {
    assert!(!ballots.is_empty(), "vote over no ballots");
    let mut tally: Vec<(&str, usize)> = Vec::new();
    for (winner, _) in ballots {
        match tally.iter_mut().find(|(label, _)| label == winner) {
            Some((_, count)) => *count += 1,
            None => tally.push((winner, 1)),
        }
    }
    let top = tally.iter().map(|(_, c)| *c).max().expect("nonempty");
    let tied: Vec<&str> = tally
        .iter()
        .filter(|(_, c)| *c == top)
        .map(|(label, _)| *label)
        .collect();
    if tied.len() == 1 {
        return tied[0];
    }
    let mut best: Option<(&str, f64)> = None;
    for (winner, margin) in ballots {
        if tied.contains(winner) && best.is_none_or(|(_, m)| *margin > m) {
            best = Some((winner, *margin));
        }
    }
    best.expect("tied labels appear in ballots").0
}

/// Majority vote over the pairwise decisions, with normalized margins as
/// the tiebreak.
pub fn classify_multiclass<'a>(
    classifiers: &'a [PairwiseClassifier],
    x: &DVector<f64>,
) -> Result<&'a str> {
    if classifiers.is_empty() {
        return Err(Error::InvalidConfig("no classifiers to vote with".into()));
    }
    let mut ballots: Vec<(&str, f64)> = Vec::with_capacity(classifiers.len());
    for pc in classifiers {
        let z = pc.hyperplane.normalized()?.decision(x);
        let winner = if z >= 0.0 { &pc.labels.0 } else { &pc.labels.1 };
        ballots.push((winner, z.abs()));
    }
    Ok(majority_vote(&ballots))
}
