//! Calibrated cameras: `K[R | −RC]` decomposition, the image of the absolute conic,
//! essential matrices and calibration data.

use crate::error::{degenerate, precondition, GeomError, Result};
use crate::matrix::{cholesky_upper, rq_decompose, skew, svd, Mat};
use crate::multiview::CameraConfig;
use crate::projective::{project_space_conic, pullback_cone, Camera, Conic2, Degeneracy, SpaceConic};
use crate::scalar::Field;

/// Default relative tolerance of [`is_essential`] for data from noisy sources.
pub const ESSENTIAL_TOL: f64 = 1e-8;

/// `P ∝ K [R | −R C]`.
#[derive(Clone, Debug)]
pub struct CalibrationDecomposition {
    /// Upper triangular, `αx, αy > 0`, `K[2][2] = 1`.
    pub k: Mat<f64>,
    /// Orthogonal; may be a reflection, see `orientation_reversed`.
    pub r: Mat<f64>,
    /// Affine center.
    pub c: [f64; 3],
    /// `det R = −1`.
    pub orientation_reversed: bool,
}

impl CalibrationDecomposition {
    /// The same camera with `R` replaced by `−R`, which is a rotation when
    /// `orientation_reversed` is set (the camera matrix only changes sign).
    pub fn proper(&self) -> Self {
        if !self.orientation_reversed {
            return self.clone();
        }
        Self {
            k: self.k.clone(),
            r: self.r.scale(&-1.0),
            c: self.c,
            orientation_reversed: false,
        }
    }

    /// `K [R | −R C]`.
    pub fn compose(&self) -> Mat<f64> {
        let rc = self.r.mul_vec(&self.c);
        let t = Mat::column(&rc.iter().map(|x| -x).collect::<Vec<_>>());
        self.k.mul(&self.r.hstack(&t))
    }
}

pub fn decompose_camera(p: &Camera<f64>) -> Result<CalibrationDecomposition> {
    let m = p.matrix().submatrix(&[0, 1, 2], &[0, 1, 2]);
    let rq = rq_decompose(&m).map_err(|e| match e {
        GeomError::Singular => precondition("camera center lies on the plane at infinity"),
        other => other,
    })?;
    let inv = m.inverse().ok_or(GeomError::Singular)?;
    let c = inv.mul_vec(&p.matrix().col(3));
    Ok(CalibrationDecomposition {
        k: rq.k,
        r: rq.r,
        c: [-c[0], -c[1], -c[2]],
        orientation_reversed: rq.reflection,
    })
}

/// Image of the absolute conic; proportional to `(K Kᵀ)⁻¹`.
pub fn image_of_absolute_conic<F: Field>(p: &Camera<F>) -> Result<Conic2<F>> {
    project_space_conic(p, &SpaceConic::absolute())
        .map_err(|_| precondition("camera center lies on the plane at infinity"))
}

/// `K` from a conic proportional to `(K Kᵀ)⁻¹`, by inversion and Cholesky.
pub fn calibration_from_iac(w: &Mat<f64>) -> Result<Mat<f64>> {
    let s = w.inverse().ok_or(GeomError::Singular)?;
    let s = if s[(2, 2)] < 0.0 { s.scale(&-1.0) } else { s };
    cholesky_upper(&s)
}

fn check_rotation<F: Field>(r: &Mat<F>) -> Result<()> {
    if r.rows() != 3 || r.cols() != 3 {
        return Err(GeomError::Dimension("rotation must be 3×3".into()));
    }
    let d = r.mul(&r.transpose()).sub(&Mat::identity(3));
    if !d.data().iter().all(|x| F::negligible(x, 1.0)) {
        return Err(precondition("R Rᵀ ≠ I"));
    }
    Ok(())
}

/// `[t]× R`.
pub fn essential_from_pose<F: Field>(r: &Mat<F>, t: &[F]) -> Result<Mat<F>> {
    check_rotation(r)?;
    if t.len() != 3 {
        return Err(GeomError::Dimension("t must have 3 entries".into()));
    }
    if t.iter().all(Field::is_zero) {
        return Err(degenerate("t = 0"));
    }
    Ok(skew(t).mul(r))
}

/// Two equal nonzero singular values and a vanishing third, relative to `σ1`.
pub fn is_essential(e: &Mat<f64>, tol: f64) -> Result<bool> {
    if e.rows() != 3 || e.cols() != 3 {
        return Err(GeomError::Dimension("expected a 3×3 matrix".into()));
    }
    if !(tol > 0.0) {
        return Err(GeomError::MissingTolerance);
    }
    let s = svd(e)?.singular_values;
    if s[0] == 0.0 {
        return Err(degenerate("zero matrix"));
    }
    Ok(s[2] / s[0] < tol && (s[0] - s[1]).abs() / s[0] < tol)
}

/// Exact test: `det E = 0` and `2 E Eᵀ E − tr(E Eᵀ) E = 0`.
pub fn is_essential_exact<F: Field>(e: &Mat<F>) -> Result<bool> {
    if e.rows() != 3 || e.cols() != 3 {
        return Err(GeomError::Dimension("expected a 3×3 matrix".into()));
    }
    if e.is_zero() {
        return Err(degenerate("zero matrix"));
    }
    let eet = e.mul(&e.transpose());
    let tr = (0..3).fold(F::zero(), |acc, i| acc + eet[(i, i)].clone());
    let lhs = eet.mul(e).scale(&F::from_i64(2)).sub(&e.scale(&tr));
    Ok(e.det().is_zero() && lhs.is_zero())
}

/// Whether `(P, (C, D))` is a calibrated camera: `C` lies on the cone over `D`
/// and the center is off the plane of `C`.
pub fn is_calibrated_camera<F: Field>(p: &Camera<F>, c: &SpaceConic<F>, d: &Conic2<F>) -> Result<bool> {
    if !d.is_smooth() {
        return Err(degenerate("image conic is not smooth"));
    }
    if c.degeneracy() == Degeneracy::TwoLines {
        return Err(precondition("two distinct lines are not a calibration datum"));
    }
    let cone = pullback_cone(p, d)?;
    let center = p.center();
    let off_plane = !crate::projective::incident(c.plane(), center.coords());
    Ok(off_plane && c.lies_on(&cone))
}

/// Cameras, one smooth image conic per view, and a space conic lying on every cone.
///
/// Construction checks containment only; a doubled line through the camera centers
/// passes here but fails [`is_calibrated_camera`].
#[derive(Clone, Debug)]
pub struct CalibratedConfig<F> {
    config: CameraConfig<F>,
    image_conics: Vec<Conic2<F>>,
    space_conic: SpaceConic<F>,
}

impl<F: Field> CalibratedConfig<F> {
    pub fn new(config: CameraConfig<F>, image_conics: Vec<Conic2<F>>, space_conic: SpaceConic<F>) -> Result<Self> {
        if image_conics.len() != config.len() {
            return Err(GeomError::Dimension("one image conic per camera is required".into()));
        }
        if space_conic.degeneracy() == Degeneracy::TwoLines {
            return Err(precondition("two distinct lines are not a calibration datum"));
        }
        for (p, d) in config.cameras().iter().zip(&image_conics) {
            if !space_conic.lies_on(&pullback_cone(p, d)?) {
                return Err(precondition("space conic does not lie on a pullback cone"));
            }
        }
        Ok(Self { config, image_conics, space_conic })
    }

    pub fn config(&self) -> &CameraConfig<F> {
        &self.config
    }

    pub fn image_conics(&self) -> &[Conic2<F>] {
        &self.image_conics
    }

    pub fn space_conic(&self) -> &SpaceConic<F> {
        &self.space_conic
    }

    pub fn with_space_conic(&self, space_conic: SpaceConic<F>) -> Result<Self> {
        Self::new(self.config.clone(), self.image_conics.clone(), space_conic)
    }
}

impl<F: Field> PartialEq for CalibratedConfig<F> {
    fn eq(&self, other: &Self) -> bool {
        self.config.cameras() == other.config.cameras()
            && self.image_conics == other.image_conics
            && self.space_conic == other.space_conic
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, Rational};

    fn rot_z(theta: f64) -> Mat<f64> {
        let (s, c) = theta.sin_cos();
        Mat::from_rows(vec![vec![c, -s, 0.0], vec![s, c, 0.0], vec![0.0, 0.0, 1.0]]).unwrap()
    }

    fn max_diff(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
        a.data().iter().zip(b.data()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    fn k0() -> Mat<f64> {
        Mat::from_ints(&[[2, 1, 4], [0, 3, 5], [0, 0, 1]])
    }

    #[test]
    fn identity_camera_decomposes_trivially() {
        let p = Camera::new(Mat::<f64>::identity(3).hstack(&Mat::zeros(3, 1))).unwrap();
        let d = decompose_camera(&p).unwrap();
        assert!(max_diff(&d.k, &Mat::identity(3)) < 1e-12);
        assert!(max_diff(&d.r, &Mat::identity(3)) < 1e-12);
        assert!(d.c.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn round_trip() {
        let truth = CalibrationDecomposition {
            k: k0(),
            r: rot_z(0.3).mul(&Mat::from_rows(vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.6, -0.8], vec![0.0, 0.8, 0.6]]).unwrap()),
            c: [1.0, -2.0, 0.5],
            orientation_reversed: false,
        };
        let p = Camera::new(truth.compose().scale(&-3.0)).unwrap();
        let d = decompose_camera(&p).unwrap().proper();
        assert!(max_diff(&d.k, &truth.k) < 1e-10);
        assert!(max_diff(&d.r, &truth.r) < 1e-10);
        assert!(d.c.iter().zip(truth.c).all(|(a, b)| (a - b).abs() < 1e-10));
    }

    #[test]
    fn singular_left_block_rejected() {
        let p = Camera::new(Mat::<f64>::from_ints(&[[0, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0]])).unwrap();
        assert!(matches!(decompose_camera(&p), Err(GeomError::Precondition(_))));
    }

    #[test]
    fn iac_and_cholesky() {
        let r = rot_z(0.7);
        let p = Camera::new(k0().mul(&r.hstack(&Mat::column(&[1.0, 2.0, 3.0])))).unwrap();
        let w = image_of_absolute_conic(&p).unwrap();
        let want = k0().mul(&k0().transpose()).inverse().unwrap();
        let s = want[(2, 2)] / w.matrix()[(2, 2)];
        assert!(max_diff(&w.matrix().scale(&s), &want) < 1e-10);
        assert!(max_diff(&calibration_from_iac(w.matrix()).unwrap(), &k0()) < 1e-10);
        let id = Camera::<Rational>::from_ints([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]).unwrap();
        assert_eq!(image_of_absolute_conic(&id).unwrap(), Conic2::euclidean());
    }

    #[test]
    fn essential_examples() {
        let e = essential_from_pose(&Mat::<Rational>::identity(3), &[rational(1, 1), rational(0, 1), rational(0, 1)]).unwrap();
        assert_eq!(e, Mat::from_ints(&[[0, 0, 0], [0, 0, -1], [0, 1, 0]]));
        assert!(is_essential_exact(&e).unwrap());
        assert!(!is_essential_exact(&Mat::<Rational>::diag(&[rational(2, 1), rational(1, 1), rational(0, 1)])).unwrap());
        let ef = essential_from_pose(&rot_z(0.4), &[0.3, -1.0, 2.0]).unwrap();
        assert!(is_essential(&ef, 1e-10).unwrap());
        assert!(!is_essential(&Mat::diag(&[2.0, 1.0, 0.0]), 1e-10).unwrap());
        assert!(matches!(is_essential(&Mat::zeros(3, 3), 1e-10), Err(GeomError::Degenerate(_))));
        assert!(matches!(essential_from_pose(&rot_z(0.1), &[0.0, 0.0, 0.0]), Err(GeomError::Degenerate(_))));
    }

    #[test]
    fn calibrated_identity_camera() {
        let p = Camera::<Rational>::from_ints([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]).unwrap();
        let c = SpaceConic::absolute();
        assert!(is_calibrated_camera(&p, &c, &Conic2::euclidean()).unwrap());
        let d = Conic2::new(Mat::diag(&[rational(1, 1), rational(2, 1), rational(1, 1)])).unwrap();
        assert!(!is_calibrated_camera(&p, &c, &d).unwrap());
        let on_plane = Camera::<Rational>::from_ints([[0, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0]]).unwrap();
        assert!(!is_calibrated_camera(&on_plane, &c, &Conic2::euclidean()).unwrap());
    }
}
