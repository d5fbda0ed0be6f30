//! Homogeneous points, cameras, homographies, conics, quadrics and space conics.
//!
//! Every object is a matrix or vector up to nonzero scale; `==` is proportionality.

use crate::error::{degenerate, precondition, GeomError, Result};
use crate::matrix::{dot, proportional, Mat};
use crate::scalar::Field;

fn check_nonzero<F: Field>(v: &[F]) -> Result<()> {
    let scale = v.iter().map(Field::magnitude).fold(0.0, f64::max);
    if scale == 0.0 || v.iter().all(|x| F::negligible(x, scale)) {
        return Err(degenerate("homogeneous coordinates are all zero"));
    }
    if v.iter().any(|x| !x.magnitude().is_finite()) {
        return Err(GeomError::NonFinite);
    }
    Ok(())
}

fn check_finite<F: Field>(m: &Mat<F>) -> Result<()> {
    if m.data().iter().any(|x| !x.magnitude().is_finite()) {
        return Err(GeomError::NonFinite);
    }
    Ok(())
}

/// Whether `a · b` vanishes (relative to the operand sizes in float mode).
pub(crate) fn incident<F: Field>(a: &[F], b: &[F]) -> bool {
    let na = a.iter().map(|x| x.magnitude().powi(2)).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x.magnitude().powi(2)).sum::<f64>().sqrt();
    F::negligible(&dot(a, b), na * nb)
}

macro_rules! hpoint {
    ($name:ident, $n:expr) => {
        #[derive(Clone, Debug)]
        pub struct $name<F> {
            coords: Vec<F>,
        }

        impl<F: Field> $name<F> {
            pub fn new(coords: Vec<F>) -> Result<Self> {
                if coords.len() != $n {
                    return Err(GeomError::Dimension(format!(
                        "expected {} homogeneous coordinates, got {}",
                        $n,
                        coords.len()
                    )));
                }
                check_nonzero(&coords)?;
                Ok(Self { coords })
            }

            pub fn from_ints(c: [i64; $n]) -> Self {
                Self::new(c.iter().map(|&x| F::from_i64(x)).collect()).expect("nonzero point")
            }

            pub fn coords(&self) -> &[F] {
                &self.coords
            }

            pub fn into_coords(self) -> Vec<F> {
                self.coords
            }
        }

        impl<F: Field> PartialEq for $name<F> {
            fn eq(&self, other: &Self) -> bool {
                proportional(&self.coords, &other.coords)
            }
        }
    };
}

hpoint!(HPoint2, 3);
hpoint!(HPoint3, 4);

/// Pinhole camera: a rank-3 3×4 matrix up to scale.
#[derive(Clone, Debug)]
pub struct Camera<F> {
    m: Mat<F>,
}

impl<F: Field> Camera<F> {
    pub fn new(m: Mat<F>) -> Result<Self> {
        if m.rows() != 3 || m.cols() != 4 {
            return Err(GeomError::Dimension(format!(
                "camera must be 3×4, got {}×{}",
                m.rows(),
                m.cols()
            )));
        }
        check_finite(&m)?;
        let r = m.rank();
        if r != 3 {
            return Err(GeomError::Rank { expected: "3".into(), found: r });
        }
        Ok(Self { m })
    }

    pub fn from_ints(rows: [[i64; 4]; 3]) -> Result<Self> {
        Self::new(Mat::from_ints(&rows))
    }

    pub fn matrix(&self) -> &Mat<F> {
        &self.m
    }

    /// The right kernel.
    pub fn center(&self) -> HPoint3<F> {
        let ns = self.m.null_space();
        HPoint3::new(ns.into_iter().next().expect("rank-3 camera has a kernel")).expect("kernel vector")
    }

    /// Image of a world point; fails at the center.
    pub fn project(&self, x: &HPoint3<F>) -> Result<HPoint2<F>> {
        HPoint2::new(self.m.mul_vec(x.coords()))
            .map_err(|_| degenerate("the world point is the camera center"))
    }

    /// `P · H`.
    pub fn transform(&self, h: &Homography<F>) -> Self {
        Self { m: self.m.mul(h.matrix()) }
    }
}

impl<F: Field> PartialEq for Camera<F> {
    fn eq(&self, other: &Self) -> bool {
        proportional(self.m.data(), other.m.data())
    }
}

/// Invertible square matrix up to scale.
#[derive(Clone, Debug)]
pub struct Homography<F> {
    m: Mat<F>,
}

impl<F: Field> Homography<F> {
    pub fn new(m: Mat<F>) -> Result<Self> {
        if !m.is_square() {
            return Err(GeomError::Dimension("homography must be square".into()));
        }
        check_finite(&m)?;
        if m.rank() != m.rows() {
            return Err(GeomError::Singular);
        }
        Ok(Self { m })
    }

    pub fn identity(n: usize) -> Self {
        Self { m: Mat::identity(n) }
    }

    pub fn matrix(&self) -> &Mat<F> {
        &self.m
    }

    pub fn inverse(&self) -> Self {
        Self { m: self.m.inverse().expect("homography is invertible") }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { m: self.m.mul(&other.m) }
    }

    pub fn apply(&self, x: &[F]) -> Vec<F> {
        self.m.mul_vec(x)
    }
}

impl<F: Field> PartialEq for Homography<F> {
    fn eq(&self, other: &Self) -> bool {
        self.m.rows() == other.m.rows() && proportional(self.m.data(), other.m.data())
    }
}

fn symmetric<F: Field>(m: Mat<F>, n: usize, what: &str) -> Result<(Mat<F>, usize)> {
    if m.rows() != n || m.cols() != n {
        return Err(GeomError::Dimension(format!("{what} must be {n}×{n}")));
    }
    check_finite(&m)?;
    if !m.is_symmetric() {
        return Err(precondition(format!("{what} matrix is not symmetric")));
    }
    let r = m.rank();
    Ok((m, r))
}

/// Plane conic: symmetric 3×3 matrix up to scale.
#[derive(Clone, Debug)]
pub struct Conic2<F> {
    m: Mat<F>,
    rank: usize,
}

impl<F: Field> Conic2<F> {
    pub fn new(m: Mat<F>) -> Result<Self> {
        let (m, rank) = symmetric(m, 3, "conic")?;
        Ok(Self { m, rank })
    }

    /// `X² + Y² + Z²`.
    pub fn euclidean() -> Self {
        Self::new(Mat::identity(3)).expect("identity conic")
    }

    pub fn matrix(&self) -> &Mat<F> {
        &self.m
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_smooth(&self) -> bool {
        self.rank == 3
    }

    pub fn eval(&self, x: &[F]) -> F {
        dot(x, &self.m.mul_vec(x))
    }
}

impl<F: Field> PartialEq for Conic2<F> {
    fn eq(&self, other: &Self) -> bool {
        proportional(self.m.data(), other.m.data())
    }
}

/// Space quadric: symmetric 4×4 matrix up to scale.
#[derive(Clone, Debug)]
pub struct Quadric3<F> {
    m: Mat<F>,
    rank: usize,
}

impl<F: Field> Quadric3<F> {
    pub fn new(m: Mat<F>) -> Result<Self> {
        let (m, rank) = symmetric(m, 4, "quadric")?;
        Ok(Self { m, rank })
    }

    pub fn matrix(&self) -> &Mat<F> {
        &self.m
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Rank 3, i.e. a cone over a smooth conic.
    pub fn is_cone(&self) -> bool {
        self.rank == 3
    }

    /// Cone point of a rank-3 quadric.
    pub fn vertex(&self) -> Result<HPoint3<F>> {
        if self.rank != 3 {
            return Err(GeomError::Rank { expected: "3".into(), found: self.rank });
        }
        HPoint3::new(self.m.null_space().remove(0))
    }

    pub fn eval(&self, x: &[F]) -> F {
        dot(x, &self.m.mul_vec(x))
    }

    /// `Hᵀ Q H`: the quadric pulled back along the point map `H`.
    pub fn congruence(&self, h: &Homography<F>) -> Self {
        let m = h.matrix().transpose().mul(&self.m).mul(h.matrix());
        Self { m, rank: self.rank }
    }
}

impl<F: Field> PartialEq for Quadric3<F> {
    fn eq(&self, other: &Self) -> bool {
        proportional(self.m.data(), other.m.data())
    }
}

/// Degeneracy of a plane section, read off the rank of the restricted form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Degeneracy {
    /// rank 3
    Smooth,
    /// rank 2
    TwoLines,
    /// rank 1
    DoubleLine,
}

impl Degeneracy {
    pub fn from_rank(r: usize) -> Option<Self> {
        match r {
            3 => Some(Self::Smooth),
            2 => Some(Self::TwoLines),
            1 => Some(Self::DoubleLine),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Smooth => "smooth",
            Self::TwoLines => "two-lines",
            Self::DoubleLine => "double-line",
        }
    }
}

/// Degree-2 space curve: the section of a quadric by a plane.
#[derive(Clone, Debug)]
pub struct SpaceConic<F> {
    plane: Vec<F>,
    quadric: Quadric3<F>,
    degeneracy: Degeneracy,
}

impl<F: Field> SpaceConic<F> {
    pub fn new(plane: Vec<F>, quadric: Quadric3<F>) -> Result<Self> {
        if plane.len() != 4 {
            return Err(GeomError::Dimension("plane must have 4 coordinates".into()));
        }
        check_nonzero(&plane)?;
        let r = restrict_quadric_to_plane(&quadric, &plane)?.rank();
        let degeneracy = Degeneracy::from_rank(r)
            .ok_or_else(|| degenerate("the plane lies on the quadric; the section is not a curve"))?;
        Ok(Self { plane, quadric, degeneracy })
    }

    /// `{w = 0, x² + y² + z² = 0}`.
    pub fn absolute() -> Self {
        let q = Quadric3::new(Mat::diag(&[F::one(), F::one(), F::one(), F::zero()])).expect("symmetric");
        Self::new(vec![F::zero(), F::zero(), F::zero(), F::one()], q).expect("smooth section")
    }

    pub fn plane(&self) -> &[F] {
        &self.plane
    }

    pub fn quadric(&self) -> &Quadric3<F> {
        &self.quadric
    }

    pub fn degeneracy(&self) -> Degeneracy {
        self.degeneracy
    }

    /// The quadric restricted to the plane, in the canonical plane basis.
    pub fn restricted(&self) -> Conic2<F> {
        restrict_quadric_to_plane(&self.quadric, &self.plane).expect("validated on construction")
    }

    pub fn contains_point(&self, x: &[F]) -> bool {
        let n = x.iter().map(|v| v.magnitude().powi(2)).sum::<f64>();
        incident(&self.plane, x) && F::negligible(&self.quadric.eval(x), n * self.quadric.m.max_magnitude())
    }

    /// Whether the curve lies on the quadric `q` (as schemes: the restriction of
    /// `q` to the plane is a multiple of the curve's own restricted form).
    pub fn lies_on(&self, q: &Quadric3<F>) -> bool {
        let other = restrict_quadric_to_plane(q, &self.plane).expect("plane is valid");
        let scale = other.m.max_magnitude().max(f64::MIN_POSITIVE);
        other.m.data().iter().all(|x| F::negligible(x, scale))
            || proportional(other.m.data(), self.restricted().m.data())
    }

    /// Image of the curve under the point map `x ↦ A x`.
    pub fn transport(&self, a: &Homography<F>) -> Self {
        let inv = a.inverse();
        let plane = inv.matrix().left_mul_vec(&self.plane);
        let m = inv.matrix().transpose().mul(&self.quadric.m).mul(inv.matrix());
        let quadric = Quadric3 { m, rank: self.quadric.rank };
        Self { plane, quadric, degeneracy: self.degeneracy }
    }
}

/// Same plane and the same curve on it.
impl<F: Field> PartialEq for SpaceConic<F> {
    fn eq(&self, other: &Self) -> bool {
        proportional(&self.plane, &other.plane)
            && proportional(self.restricted().m.data(), other.restricted().m.data())
    }
}

/// Basis of a plane `π`: with `k` the coordinate of largest magnitude, the vectors
/// `e_j − (π_j/π_k) e_k` for `j ≠ k`, as the columns of a 4×3 matrix.
pub fn plane_basis<F: Field>(plane: &[F]) -> Mat<F> {
    let mut k = 0;
    for j in 1..4 {
        if plane[j].magnitude() > plane[k].magnitude() {
            k = j;
        }
    }
    let others: Vec<usize> = (0..4).filter(|&j| j != k).collect();
    Mat::from_fn(4, 3, |r, c| {
        let j = others[c];
        if r == j {
            F::one()
        } else if r == k {
            -(plane[j].clone() / plane[k].clone())
        } else {
            F::zero()
        }
    })
}

pub fn camera_center<F: Field>(p: &Camera<F>) -> HPoint3<F> {
    p.center()
}

pub fn transform_camera<F: Field>(p: &Camera<F>, h: &Homography<F>) -> Camera<F> {
    p.transform(h)
}

/// `Pᵀ D P`, the cone over `D` with vertex at the camera center.
pub fn pullback_cone<F: Field>(p: &Camera<F>, d: &Conic2<F>) -> Result<Quadric3<F>> {
    if !d.is_smooth() {
        return Err(degenerate("image conic is not smooth"));
    }
    let m = p.matrix().transpose().mul(d.matrix()).mul(p.matrix());
    Quadric3::new(m)
}

/// The symmetric 3×3 form induced on the plane through [`plane_basis`].
pub fn restrict_quadric_to_plane<F: Field>(q: &Quadric3<F>, plane: &[F]) -> Result<Conic2<F>> {
    if plane.len() != 4 {
        return Err(GeomError::Dimension("plane must have 4 coordinates".into()));
    }
    check_nonzero(plane)?;
    let b = plane_basis(plane);
    Conic2::new(b.transpose().mul(q.matrix()).mul(&b))
}

/// Image conic of a space conic whose plane avoids the camera center.
pub fn project_space_conic<F: Field>(p: &Camera<F>, c: &SpaceConic<F>) -> Result<Conic2<F>> {
    let center = p.center();
    if incident(c.plane(), center.coords()) {
        return Err(precondition("camera center lies on the plane of the conic"));
    }
    let b = plane_basis(c.plane());
    let pb = p.matrix().mul(&b);
    let inv = pb.inverse().ok_or(GeomError::Singular)?;
    let s = c.restricted();
    Conic2::new(inv.transpose().mul(s.matrix()).mul(&inv))
}
