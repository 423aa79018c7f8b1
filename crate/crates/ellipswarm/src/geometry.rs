//! Dense linear algebra primitives and ellipsoid regions.
//!
//! An [`Ellipsoid`] is the set `{x : (x - c)^T P (x - c) <= 1}` with `P`
//! symmetric positive definite. Membership is inclusive, so boundary points
//! belong to the region. The Cholesky factor of `P` is kept alongside the
//! matrix; it drives uniform sampling and linear solves.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Relative tolerance for symmetry checks.
pub const SYMMETRY_TOL: f64 = 1e-10;

pub(crate) fn ensure_finite_vec(v: &DVector<f64>, what: &'static str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

pub(crate) fn ensure_finite_mat(m: &DMatrix<f64>, what: &'static str) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// True if `m` is square and symmetric within `SYMMETRY_TOL` relative to its
/// largest entry.
pub fn is_symmetric(m: &DMatrix<f64>) -> bool {
    if !m.is_square() {
        return false;
    }
    let scale = m.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1e-300);
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return false;
            }
        }
    }
    true
}

/// Squared Mahalanobis distance `(x - m)^T C^-1 (x - m)`.
///
/// Takes the already-inverted covariance. Panics on dimension mismatch,
/// matching the convention of the underlying matrix ops.
pub fn mahalanobis_sq(point: &DVector<f64>, mean: &DVector<f64>, cov_inverse: &DMatrix<f64>) -> f64 {
    assert_eq!(point.len(), mean.len(), "point/mean dimension mismatch");
    assert_eq!(
        cov_inverse.nrows(),
        point.len(),
        "matrix/vector dimension mismatch"
    );
    let d = point - mean;
    (cov_inverse * &d).dot(&d)
}

/// Inverse of a symmetric positive definite matrix via Cholesky.
pub fn spd_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !is_symmetric(m) {
        return Err(Error::NotSymmetric);
    }
    // Cholesky tolerates pivots at rounding level, which makes singular
    // input "succeed" with a garbage inverse; demand that the inverse
    // actually inverts
    let inverse = Cholesky::new(m.clone())
        .map(|c| c.inverse())
        .ok_or(Error::NotPositiveDefinite)?;
    if inverse.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotPositiveDefinite);
    }
    let residual = m * &inverse - DMatrix::identity(m.nrows(), m.ncols());
    if residual.norm() > 1e-6 * m.nrows() as f64 {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(inverse)
}

/// Eigendecomposition of a symmetric matrix.
///
/// Returns eigenvalues in descending order and the matching orthonormal
/// eigenvectors as columns, so `m = V diag(l) V^T`.
pub fn eigen_spd(m: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    if !is_symmetric(m) {
        return Err(Error::NotSymmetric);
    }
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    Ok((values, vectors))
}

/// Uniform random point on the unit sphere: normalized standard Gaussian.
pub fn unit_sphere_point<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<f64> {
    assert!(dim >= 1, "sphere dimension must be at least 1");
    loop {
        let v = DVector::from_iterator(dim, (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let norm = v.norm();
        // redraw on an all-zeros fluke so the normalization is well defined
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Uniform random point in the closed unit ball.
pub fn unit_ball_point<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<f64> {
    let radius: f64 = rng.random::<f64>().powf(1.0 / dim as f64);
    unit_sphere_point(dim, rng) * radius
}

/// A solid ellipsoid `{x : (x - c)^T P (x - c) <= 1}`.
#[derive(Clone, Debug)]
pub struct Ellipsoid {
    center: DVector<f64>,
    shape: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    // lower Cholesky factor of shape, kept for sampling transforms
    l: DMatrix<f64>,
}

impl Ellipsoid {
    /// Validates that `shape` is symmetric positive definite with finite
    /// entries and matches the center's dimension.
    pub fn new(center: DVector<f64>, shape: DMatrix<f64>) -> Result<Self> {
        ensure_finite_vec(&center, "ellipsoid center")?;
        ensure_finite_mat(&shape, "ellipsoid shape")?;
        if shape.nrows() != center.len() || shape.ncols() != center.len() {
            return Err(Error::DimensionMismatch {
                expected: center.len(),
                got: shape.nrows(),
            });
        }
        if center.is_empty() {
            return Err(Error::InvalidConfig("ellipsoid dimension is zero".into()));
        }
        if !is_symmetric(&shape) {
            return Err(Error::NotSymmetric);
        }
        let chol = Cholesky::new(shape.clone()).ok_or(Error::NotPositiveDefinite)?;
        let l = chol.l();
        Ok(Ellipsoid {
            center,
            shape,
            chol,
            l,
        })
    }

    /// Unit ball of the given dimension.
    pub fn unit_ball(dim: usize) -> Ellipsoid {
        Ellipsoid::new(DVector::zeros(dim), DMatrix::identity(dim, dim))
            .expect("unit ball is always valid")
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    /// `(x - c)^T P (x - c)`; 1 on the boundary, less inside.
    pub fn quadratic_form(&self, x: &DVector<f64>) -> f64 {
        let d = x - &self.center;
        (&self.shape * &d).dot(&d)
    }

    /// Inclusive membership test.
    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.quadratic_form(x) <= 1.0
    }

    /// Solves `P y = b` using the stored factorization.
    pub fn shape_solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(b)
    }

    /// Maps a point from the unit ball into the ellipsoid: `c + L^-T u`
    /// where `P = L L^T`. Unit-ball-uniform input stays uniform here.
    pub fn from_ball(&self, u: &DVector<f64>) -> DVector<f64> {
        let y = self
            .l
            .transpose()
            .solve_upper_triangular(u)
            .expect("Cholesky factor is nonsingular");
        &self.center + y
    }

    /// Uniform sample from the solid ellipsoid.
    pub fn sample_inside<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let u = unit_ball_point(self.dim(), rng);
        self.from_ball(&u)
    }

    /// Sample near `anchor`: uniform in a copy of the ellipsoid scaled by
    /// `radius` and re-centered at the anchor, rejecting draws that leave
    /// the region. The anchor must lie inside.
    pub fn sample_near<R: Rng + ?Sized>(
        &self,
        anchor: &DVector<f64>,
        radius: f64,
        rng: &mut R,
    ) -> DVector<f64> {
        debug_assert!(self.contains(anchor), "anchor must lie inside the region");
        for _ in 0..1000 {
            let u = unit_ball_point(self.dim(), rng) * radius;
            let y = self
                .l
                .transpose()
                .solve_upper_triangular(&u)
                .expect("Cholesky factor is nonsingular");
            let x = anchor + y;
            if self.contains(&x) {
                return x;
            }
        }
        // anchor hugs the boundary and the scaled ball keeps escaping
        anchor.clone()
    }

    /// The ellipsoid with every boundary radius multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Ellipsoid> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "scale factor must be positive and finite, got {factor}"
            )));
        }
        Ellipsoid::new(self.center.clone(), &self.shape / (factor * factor))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use approx::assert_relative_eq;

    fn mat2(a: f64, b: f64, c: f64, d: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[a, b, c, d])
    }

    #[test]
    fn mahalanobis_known_value() {
        // cov [[2,1],[1,2]], inverse (1/3)[[2,-1],[-1,2]]; offset (2,1)
        // gives (1/3)(2*4 - 2*2*1 + 2*1) = 2
        let inv = spd_inverse(&mat2(2.0, 1.0, 1.0, 2.0)).unwrap();
        let d = mahalanobis_sq(
            &DVector::from_row_slice(&[3.0, 2.0]),
            &DVector::from_row_slice(&[1.0, 1.0]),
            &inv,
        );
        assert_relative_eq!(d, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn mahalanobis_identity_is_euclidean() {
        let p = DVector::from_row_slice(&[3.0, 4.0]);
        let m = DVector::zeros(2);
        let d = mahalanobis_sq(&p, &m, &DMatrix::identity(2, 2));
        assert_relative_eq!(d, 25.0, max_relative = 1e-14);
    }

    #[test]
    fn mahalanobis_symmetric_in_point_and_mean() {
        let inv = spd_inverse(&mat2(2.0, 1.0, 1.0, 2.0)).unwrap();
        let a = DVector::from_row_slice(&[0.3, -1.2]);
        let b = DVector::from_row_slice(&[2.0, 0.5]);
        assert_relative_eq!(
            mahalanobis_sq(&a, &b, &inv),
            mahalanobis_sq(&b, &a, &inv),
            max_relative = 1e-14
        );
    }

    #[test]
    fn spd_inverse_known_value() {
        let inv = spd_inverse(&mat2(2.0, 1.0, 1.0, 2.0)).unwrap();
        let expect = mat2(2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0);
        assert!((inv - expect).amax() < 1e-12);
    }

    #[test]
    fn spd_inverse_rejects_indefinite() {
        // eigenvalues 3 and -1
        assert!(matches!(
            spd_inverse(&mat2(1.0, 2.0, 2.0, 1.0)),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn spd_inverse_rejects_asymmetric() {
        assert!(matches!(
            spd_inverse(&mat2(2.0, 1.0, 0.0, 2.0)),
            Err(Error::NotSymmetric)
        ));
    }

    #[test]
    fn eigen_known_matrix() {
        let (vals, vecs) = eigen_spd(&mat2(2.0, 1.0, 1.0, 2.0)).unwrap();
        assert_relative_eq!(vals[0], 3.0, max_relative = 1e-12);
        assert_relative_eq!(vals[1], 1.0, max_relative = 1e-12);
        // leading eigenvector is (1,1)/sqrt(2) up to sign
        let v0 = vecs.column(0);
        assert_relative_eq!(v0[0].abs(), v0[1].abs(), max_relative = 1e-10);
        // reconstruction within the documented tolerance
        let recon = &vecs * DMatrix::from_diagonal(&vals) * vecs.transpose();
        assert!((recon - mat2(2.0, 1.0, 1.0, 2.0)).amax() < 1e-8);
    }

    #[test]
    fn eigen_rejects_asymmetric() {
        assert!(matches!(
            eigen_spd(&mat2(1.0, 0.5, 0.0, 1.0)),
            Err(Error::NotSymmetric)
        ));
    }

    #[test]
    fn sphere_points_have_unit_norm() {
        let mut rng = stream(1);
        for dim in [1usize, 2, 3, 7] {
            for _ in 0..50 {
                let p = unit_sphere_point(dim, &mut rng);
                assert_relative_eq!(p.norm(), 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn sphere_sampling_is_deterministic() {
        let a = unit_sphere_point(3, &mut stream(9));
        let b = unit_sphere_point(3, &mut stream(9));
        assert_eq!(a, b);
    }

    #[test]
    fn ellipsoid_rejects_bad_inputs() {
        let c = DVector::zeros(2);
        assert!(Ellipsoid::new(c.clone(), mat2(1.0, 0.5, 0.0, 1.0)).is_err());
        assert!(Ellipsoid::new(c.clone(), mat2(1.0, 2.0, 2.0, 1.0)).is_err());
        assert!(Ellipsoid::new(c.clone(), mat2(f64::NAN, 0.0, 0.0, 1.0)).is_err());
        assert!(Ellipsoid::new(DVector::zeros(3), mat2(1.0, 0.0, 0.0, 1.0)).is_err());
        assert!(Ellipsoid::new(DVector::zeros(0), DMatrix::zeros(0, 0)).is_err());
    }

    #[test]
    fn membership_is_inclusive_on_the_boundary() {
        let ball = Ellipsoid::unit_ball(2);
        assert!(ball.contains(&DVector::from_row_slice(&[1.0, 0.0])));
        assert!(!ball.contains(&DVector::from_row_slice(&[1.0 + 1e-9, 0.0])));
        assert!(ball.contains(&DVector::zeros(2)));
    }

    #[test]
    fn quadratic_form_matches_axes() {
        // semi-axes 1 and 2: P = diag(1, 1/4)
        let e = Ellipsoid::new(DVector::zeros(2), mat2(1.0, 0.0, 0.0, 0.25)).unwrap();
        assert_relative_eq!(
            e.quadratic_form(&DVector::from_row_slice(&[0.0, 2.0])),
            1.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            e.quadratic_form(&DVector::from_row_slice(&[1.0, 0.0])),
            1.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn samples_stay_inside_and_cover_the_region() {
        let e = Ellipsoid::new(
            DVector::from_row_slice(&[1.0, -2.0]),
            mat2(0.5, 0.2, 0.2, 0.8),
        )
        .unwrap();
        let mut rng = stream(7);
        let n = 5000;
        let mut mean = DVector::zeros(2);
        for _ in 0..n {
            let x = e.sample_inside(&mut rng);
            assert!(e.contains(&x));
            mean += &x;
        }
        mean /= n as f64;
        // uniform law centers on the ellipsoid center
        assert!((mean - e.center()).norm() < 0.1);
    }

    #[test]
    fn near_samples_stay_inside() {
        let e = Ellipsoid::unit_ball(2);
        let anchor = DVector::from_row_slice(&[0.95, 0.0]);
        let mut rng = stream(3);
        for _ in 0..200 {
            let x = e.sample_near(&anchor, 0.1, &mut rng);
            assert!(e.contains(&x));
            assert!((x - &anchor).norm() < 0.2);
        }
    }

    #[test]
    fn scaling_moves_the_boundary() {
        let e = Ellipsoid::unit_ball(2);
        let half = e.scaled(0.5).unwrap();
        let p = DVector::from_row_slice(&[0.5, 0.0]);
        assert_relative_eq!(half.quadratic_form(&p), 1.0, max_relative = 1e-12);
        assert!(half.scaled(0.0).is_err());
    }
}
