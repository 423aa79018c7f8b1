//! Dataset handling: sample statistics, synthetic Gaussian generation,
//! CSV ingestion, whitening, pairwise 2D projection, and the stratified
//! cross-validation harness.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::classifier::{fit_hyperplane, majority_vote, Hyperplane};
use crate::error::{Error, Result};
use crate::geometry::{eigen_spd, ensure_finite_vec};
use crate::pso::PsoConfig;
use crate::rng::{derive_seed, stream, Stream};

/// Sample mean of a nonempty point set.
pub fn sample_mean(points: &[DVector<f64>]) -> DVector<f64> {
    assert!(!points.is_empty(), "mean of an empty point set");
    let mut sum = DVector::zeros(points[0].len());
    for p in points {
        sum += p;
    }
    sum / points.len() as f64
}

/// Unbiased sample covariance (divisor N−1). Needs at least two points.
pub fn sample_covariance(points: &[DVector<f64>], mean: &DVector<f64>) -> Result<DMatrix<f64>> {
    if points.len() < 2 {
        return Err(Error::DegenerateData(
            "covariance needs at least two samples".into(),
        ));
    }
    let dim = mean.len();
    let mut cov = DMatrix::zeros(dim, dim);
    for p in points {
        let d = p - mean;
        cov += &d * d.transpose();
    }
    Ok(cov / (points.len() as f64 - 1.0))
}

/// Labeled point set. Every feature vector has the same dimension; labels
/// are free-form strings.
#[derive(Clone, Debug)]
pub struct Dataset {
    features: Vec<DVector<f64>>,
    labels: Vec<String>,
}

impl Dataset {
    pub fn new(features: Vec<DVector<f64>>, labels: Vec<String>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::DegenerateData("dataset has no rows".into()));
        }
        if features.len() != labels.len() {
            return Err(Error::InvalidConfig(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        let dim = features[0].len();
        for x in &features {
            if x.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: x.len(),
                });
            }
            ensure_finite_vec(x, "dataset feature")?;
        }
        Ok(Dataset { features, labels })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features[0].len()
    }

    pub fn features(&self) -> &[DVector<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Distinct labels in lexicographic order, independent of row order.
    pub fn classes(&self) -> Vec<String> {
        let mut classes: Vec<String> = Vec::new();
        for label in &self.labels {
            if !classes.contains(label) {
                classes.push(label.clone());
            }
        }
        classes.sort();
        classes
    }

    pub fn indices_of(&self, label: &str) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&i| self.labels[i] == label)
            .collect()
    }
}

/// Two overlapping Gaussian clouds in the plane, `count` points per class,
/// labels "1" and "2". Class means are (8, 0) and (0, 8); both classes
/// share the covariance [[2, 1], [1, 2]].
pub fn generate_synthetic(count: usize, seed: u64) -> Result<Dataset> {
    if count < 3 {
        return Err(Error::InvalidConfig(format!(
            "need at least 3 points per class, got {count}"
        )));
    }
    // lower Cholesky factor of [[2, 1], [1, 2]]
    let l = DMatrix::from_row_slice(
        2,
        2,
        &[2f64.sqrt(), 0.0, 1.0 / 2f64.sqrt(), 1.5f64.sqrt()],
    );
    let means = [
        DVector::from_row_slice(&[8.0, 0.0]),
        DVector::from_row_slice(&[0.0, 8.0]),
    ];
    let mut rng = stream(seed);
    let mut features = Vec::with_capacity(2 * count);
    let mut labels = Vec::with_capacity(2 * count);
    for (k, mean) in means.iter().enumerate() {
        for _ in 0..count {
            let z = DVector::from_fn(2, |_, _| rng.sample::<f64, _>(StandardNormal));
            features.push(mean + &l * z);
            labels.push((k + 1).to_string());
        }
    }
    Dataset::new(features, labels)
}

/// Column layout of a dataset CSV file. Stored alongside the data as JSON.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CsvSchema {
    /// Zero-based index of the label column among all columns.
    pub label_column: usize,
    /// Number of numeric attribute columns (total columns minus one).
    pub attribute_count: usize,
    #[serde(default)]
    pub has_header: bool,
    /// When present, rows whose label is not listed are rejected.
    #[serde(default)]
    pub labels: Option<Vec<String>>,
}

impl CsvSchema {
    pub fn from_file(path: &Path) -> Result<CsvSchema> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| {
            Error::InvalidConfig(format!("bad schema file {}: {e}", path.display()))
        })
    }
}

/// Reads a labeled CSV dataset. Malformed rows do not abort the scan; they
/// are collected and reported together so one pass shows every problem.
pub fn load_csv(path: &Path, schema: &CsvSchema) -> Result<Dataset> {
    let columns = schema.attribute_count + 1;
    if schema.label_column >= columns {
        return Err(Error::InvalidConfig(format!(
            "label column {} out of range for {} columns",
            schema.label_column, columns
        )));
    }
    let file = fs::File::open(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(schema.has_header)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file);
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut problems: Vec<(usize, String)> = Vec::new();
    for item in reader.records() {
        let record = match item {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
                problems.push((line, e.to_string()));
                continue;
            }
        };
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != columns {
            problems.push((
                line,
                format!("expected {columns} fields, found {}", record.len()),
            ));
            continue;
        }
        let label = record[schema.label_column].to_string();
        if label.is_empty() {
            problems.push((line, "empty label".into()));
            continue;
        }
        if let Some(allowed) = &schema.labels {
            if !allowed.contains(&label) {
                problems.push((line, format!("unknown label {label:?}")));
                continue;
            }
        }
        let mut x = Vec::with_capacity(schema.attribute_count);
        let mut bad = None;
        for (j, field) in record.iter().enumerate() {
            if j == schema.label_column {
                continue;
            }
            match field.parse::<f64>() {
                Ok(v) if v.is_finite() => x.push(v),
                _ => {
                    bad = Some(format!("column {j} is not a finite number: {field:?}"));
                    break;
                }
            }
        }
        if let Some(msg) = bad {
            problems.push((line, msg));
            continue;
        }
        features.push(DVector::from_vec(x));
        labels.push(label);
    }
    if !problems.is_empty() {
        return Err(Error::Ingestion {
            path: path.display().to_string(),
            problems,
        });
    }
    Dataset::new(features, labels)
}

/// Affine map fitted to one sample: subtract the mean, then rotate and
/// rescale so every component of the fitted sample has unit variance.
#[derive(Clone, Debug)]
pub struct Whitening {
    mean: DVector<f64>,
    forward: DMatrix<f64>,
    inverse: DMatrix<f64>,
}

impl Whitening {
    /// Fits on `points` only; apply to held-out data without refitting.
    pub fn fit(points: &[DVector<f64>]) -> Result<Whitening> {
        if points.len() < 2 {
            return Err(Error::DegenerateData(
                "whitening needs at least two samples".into(),
            ));
        }
        let dim = points[0].len();
        for j in 0..dim {
            let lo = points.iter().map(|p| p[j]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max);
            if hi == lo {
                return Err(Error::DegenerateData(format!(
                    "feature {j} has zero variance; drop it before whitening"
                )));
            }
        }
        let mean = sample_mean(points);
        let cov = sample_covariance(points, &mean)?;
        let (eigenvalues, eigenvectors) = eigen_spd(&cov)?;
        let lam_max = eigenvalues[0];
        // NaN must land in the error branch too
        if lam_max.is_nan() || lam_max <= 0.0 {
            return Err(Error::DegenerateData(
                "dataset covariance has no positive eigenvalue".into(),
            ));
        }
        // floor near-zero eigenvalues instead of failing: correlated
        // attribute pairs are common in real tables and only need a
        // bounded rescale, while the exactly-constant case is caught above
        let floor = 1e-12 * lam_max;
        let scales = eigenvalues.map(|l| l.max(floor));
        let mut forward = eigenvectors.transpose();
        let mut inverse = eigenvectors;
        for k in 0..dim {
            let s = scales[k].sqrt();
            forward.row_mut(k).scale_mut(1.0 / s);
            inverse.column_mut(k).scale_mut(s);
        }
        Ok(Whitening {
            mean,
            forward,
            inverse,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.forward * (x - &self.mean)
    }

    pub fn apply_all(&self, points: &[DVector<f64>]) -> Vec<DVector<f64>> {
        points.iter().map(|x| self.apply(x)).collect()
    }

    /// Inverse of [`Whitening::apply`].
    pub fn unapply(&self, w: &DVector<f64>) -> DVector<f64> {
        &self.inverse * w + &self.mean
    }
}

/// Orthonormal rank-two projection used to train one class pair in the
/// plane. Rows of `directions` are the two projection axes.
#[derive(Clone, Debug)]
pub struct PairProjection {
    directions: DMatrix<f64>,
}

impl PairProjection {
    pub fn directions(&self) -> &DMatrix<f64> {
        &self.directions
    }

    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.directions * x
    }
}

/// Builds the 2D projection for one class pair: the first axis is the
/// normalized mean difference, the second is the pooled within-class
/// covariance eigenvector with the smallest eigenvalue that stays
/// independent of the first axis (Gram-Schmidt residual at least 1e-8),
/// orthonormalized against it. Low within-class spread means the retained
/// second axis adds discrimination rather than noise.
pub fn project_pair_2d(
    class1: &[DVector<f64>],
    class2: &[DVector<f64>],
) -> Result<PairProjection> {
    if class1.len() < 2 || class2.len() < 2 {
        return Err(Error::DegenerateData(
            "projection needs at least two samples per class".into(),
        ));
    }
    let dim = class1[0].len();
    if dim < 2 {
        return Err(Error::InvalidConfig(
            "pairwise projection needs at least two attributes".into(),
        ));
    }
    let m1 = sample_mean(class1);
    let m2 = sample_mean(class2);
    let gap = &m1 - &m2;
    let gap_norm = gap.norm();
    if gap_norm <= 1e-12 {
        return Err(Error::DegenerateProjection);
    }
    let d1 = gap / gap_norm;
    let s1 = sample_covariance(class1, &m1)?;
    let s2 = sample_covariance(class2, &m2)?;
    let n1 = class1.len() as f64;
    let n2 = class2.len() as f64;
    let sw = (s1 * (n1 - 1.0) + s2 * (n2 - 1.0)) / (n1 + n2 - 2.0);
    let (_, eigenvectors) = eigen_spd(&sw)?;
    // eigen_spd sorts descending; scan from the back for ascending spread
    for k in (0..dim).rev() {
        let v = eigenvectors.column(k);
        let mut d2 = v - &d1 * d1.dot(&v);
        let residual = d2.norm();
        if residual >= 1e-8 {
            d2 /= residual;
            let mut directions = DMatrix::zeros(2, dim);
            directions.row_mut(0).copy_from(&d1.transpose());
            directions.row_mut(1).copy_from(&d2.transpose());
            return Ok(PairProjection { directions });
        }
    }
    Err(Error::DegenerateProjection)
}

/// Assigns each sample a fold in 0..n_folds, stratified so per-class fold
/// sizes differ by at most one. Classes are visited in lexicographic order
/// and shuffled with `rng`, so the assignment depends only on the label
/// sequence and the stream state.
pub fn stratified_folds(
    labels: &[String],
    n_folds: usize,
    rng: &mut Stream,
) -> Result<Vec<usize>> {
    if n_folds < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 folds, got {n_folds}"
        )));
    }
    let mut classes: Vec<&String> = Vec::new();
    for label in labels {
        if !classes.contains(&label) {
            classes.push(label);
        }
    }
    classes.sort();
    let mut assignment = vec![usize::MAX; labels.len()];
    for class in classes {
        let mut idx: Vec<usize> = (0..labels.len())
            .filter(|&i| &labels[i] == class)
            .collect();
        if idx.len() < n_folds {
            return Err(Error::TooFewSamples {
                label: class.clone(),
                needed: n_folds,
                got: idx.len(),
            });
        }
        idx.shuffle(rng);
        for (pos, &i) in idx.iter().enumerate() {
            assignment[i] = pos % n_folds;
        }
    }
    Ok(assignment)
}

/// Cross-validation summary. Errors are percentages.
#[derive(Clone, Debug, Serialize)]
pub struct CvReport {
    pub dataset: String,
    pub trials: usize,
    pub folds: usize,
    pub per_trial_error_pct: Vec<f64>,
    pub mean_error_pct: f64,
    pub std_dev_pct: f64,
    /// Outer index trial, inner index fold.
    pub per_fold_error_pct: Vec<Vec<f64>>,
    pub config: PsoConfig,
}

impl CvReport {
    /// Flat per-fold table, one row per (trial, fold).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,fold,error_pct\n");
        for (t, fold_errors) in self.per_fold_error_pct.iter().enumerate() {
            for (f, err) in fold_errors.iter().enumerate() {
                out.push_str(&format!("{t},{f},{err}\n"));
            }
        }
        out
    }
}

const CV_FOLDS: usize = 10;

struct PairVoter {
    labels: (String, String),
    projection: PairProjection,
    hyperplane: Hyperplane,
}

/// Repeated stratified 10-fold cross-validation of the pairwise classifier.
///
/// Per fold: whitening is fitted on the training rows alone, each class
/// pair gets its own 2D projection of the whitened training data, and a
/// hyperplane is trained per pair. Held-out rows are whitened and projected
/// with those fitted maps and classified by majority vote, margins breaking
/// ties. Fold assignment reshuffles every trial; every fit seed derives
/// from `cfg.seed`, the trial, the fold, and the pair, so reruns reproduce
/// the report exactly.
pub fn cross_validate(
    name: &str,
    dataset: &Dataset,
    cfg: &PsoConfig,
    trials: usize,
) -> Result<CvReport> {
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::InvalidConfig("need at least one trial".into()));
    }
    let classes = dataset.classes();
    if classes.len() < 2 || classes.len() > 3 {
        return Err(Error::InvalidConfig(format!(
            "need 2 or 3 classes, dataset has {}",
            classes.len()
        )));
    }
    let mut per_trial = Vec::with_capacity(trials);
    let mut per_fold = Vec::with_capacity(trials);
    for t in 0..trials {
        let mut fold_rng = stream(derive_seed(cfg.seed, 1000 + t as u64));
        let folds = stratified_folds(dataset.labels(), CV_FOLDS, &mut fold_rng)?;
        let mut fold_errors = Vec::with_capacity(CV_FOLDS);
        let mut wrong_total = 0usize;
        for f in 0..CV_FOLDS {
            let train_idx: Vec<usize> = (0..dataset.len()).filter(|&i| folds[i] != f).collect();
            let test_idx: Vec<usize> = (0..dataset.len()).filter(|&i| folds[i] == f).collect();
            let train_points: Vec<DVector<f64>> = train_idx
                .iter()
                .map(|&i| dataset.features()[i].clone())
                .collect();
            let whitening = Whitening::fit(&train_points)?;
            let mut voters = Vec::new();
            let mut pair_index = 0u64;
            for i in 0..classes.len() {
                for j in (i + 1)..classes.len() {
                    let pts_a: Vec<DVector<f64>> = train_idx
                        .iter()
                        .filter(|&&r| dataset.labels()[r] == classes[i])
                        .map(|&r| whitening.apply(&dataset.features()[r]))
                        .collect();
                    let pts_b: Vec<DVector<f64>> = train_idx
                        .iter()
                        .filter(|&&r| dataset.labels()[r] == classes[j])
                        .map(|&r| whitening.apply(&dataset.features()[r]))
                        .collect();
                    let projection = project_pair_2d(&pts_a, &pts_b)?;
                    let proj_a: Vec<DVector<f64>> =
                        pts_a.iter().map(|x| projection.project(x)).collect();
                    let proj_b: Vec<DVector<f64>> =
                        pts_b.iter().map(|x| projection.project(x)).collect();
                    let salt = 1_000_000 + t as u64 * 100 + f as u64 * 10 + pair_index;
                    let pair_cfg = cfg.with_seed(derive_seed(cfg.seed, salt));
                    let trained =
                        fit_hyperplane(&classes[i], &classes[j], &proj_a, &proj_b, &pair_cfg)?;
                    voters.push(PairVoter {
                        labels: trained.labels.clone(),
                        projection,
                        hyperplane: trained.hyperplane.normalized()?,
                    });
                    pair_index += 1;
                }
            }
            let mut wrong = 0usize;
            for &i in &test_idx {
                let xw = whitening.apply(&dataset.features()[i]);
                let ballots: Vec<(&str, f64)> = voters
                    .iter()
                    .map(|v| {
                        let z = v.hyperplane.decision(&v.projection.project(&xw));
                        let winner = if z >= 0.0 { &v.labels.0 } else { &v.labels.1 };
                        (winner.as_str(), z.abs())
                    })
                    .collect();
                if majority_vote(&ballots) != dataset.labels()[i] {
                    wrong += 1;
                }
            }
            wrong_total += wrong;
            fold_errors.push(100.0 * wrong as f64 / test_idx.len() as f64);
        }
        per_trial.push(100.0 * wrong_total as f64 / dataset.len() as f64);
        per_fold.push(fold_errors);
    }
    let mean = per_trial.iter().sum::<f64>() / trials as f64;
    let std_dev = if trials < 2 {
        0.0
    } else {
        let var = per_trial.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (trials as f64 - 1.0);
        var.sqrt()
    };
    Ok(CvReport {
        dataset: name.to_string(),
        trials,
        folds: CV_FOLDS,
        per_trial_error_pct: per_trial,
        mean_error_pct: mean,
        std_dev_pct: std_dev,
        per_fold_error_pct: per_fold,
        config: cfg.clone(),
    })
}
