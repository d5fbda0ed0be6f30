//! Pencils of quadric cones: intersection type, decalibration fibers, the residual
//! calibration and twisted pairs.
//!
//! Classification of two cones `Q1`, `Q2` with distinct vertices:
//!
//! | rank-2 member `R` | `v1ᵀ R v1` | `det(λQ1 + μQ2)` | class |
//! |---|---|---|---|
//! | yes | ≠ 0 | any | `TwoSmoothConics` |
//! | yes | = 0 | any | `ConicPlusDoubleLine` |
//! | no | | `∝ λ²μ²` | `CubicPlusLine` |
//! | no | | otherwise nonzero | `IrreducibleQuartic` |
//!
//! Members of rank ≤ 2 are the common roots of the sixteen 3×3 minors of
//! `λQ1 + μQ2`, found as a gcd of binary cubics, so the table also covers pencils
//! whose determinant vanishes identically.

use crate::calibration::CalibratedConfig;
use crate::error::{degenerate, precondition, GeomError, Result};
use crate::matrix::{dot, normalize_vec, Mat};
use crate::multipoly::MPoly;
use crate::multiview::CameraConfig;
use crate::poly::{BinaryForm, FormRoot, ProjectiveRoot};
use crate::projective::{pullback_cone, Camera, Conic2, Degeneracy, Homography, Quadric3, SpaceConic};
use crate::scalar::{ExactField, Field, Gaussian};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PencilClass {
    IrreducibleQuartic,
    CubicPlusLine,
    TwoSmoothConics,
    ConicPlusDoubleLine,
}

impl PencilClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::IrreducibleQuartic => "IrreducibleQuartic",
            Self::CubicPlusLine => "CubicPlusLine",
            Self::TwoSmoothConics => "TwoSmoothConics",
            Self::ConicPlusDoubleLine => "ConicPlusDoubleLine",
        }
    }
}

/// A root of the pencil determinant with the rank of the member there (exact roots only).
#[derive(Clone, Debug)]
pub struct RootRank<F> {
    pub root: ProjectiveRoot<F>,
    pub multiplicity: usize,
    pub rank: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct PencilClassification<F> {
    pub class: PencilClass,
    pub det_form: BinaryForm<F>,
    /// Empty when the determinant vanishes identically.
    pub roots: Vec<RootRank<F>>,
    pub singular_pencil: bool,
    /// `(λ : μ)` of the rank-2 member, if there is one.
    pub rank_two_member: Option<(Gaussian, Gaussian)>,
}

fn lift<F: ExactField>(m: &Mat<F>) -> Mat<Gaussian> {
    m.map(ExactField::to_gaussian)
}

fn member<F: ExactField>(q1: &Quadric3<F>, q2: &Quadric3<F>, l: &Gaussian, m: &Gaussian) -> Mat<Gaussian> {
    lift(q1.matrix()).lin_comb(l, &lift(q2.matrix()), m)
}

fn check_cone_pair<F: ExactField>(q1: &Quadric3<F>, q2: &Quadric3<F>) -> Result<()> {
    for q in [q1, q2] {
        if q.rank() != 3 {
            return Err(GeomError::Rank { expected: "3".into(), found: q.rank() });
        }
    }
    if q1.vertex()? == q2.vertex()? {
        return Err(precondition("cone vertices coincide"));
    }
    Ok(())
}

/// Gcd of the sixteen 3×3 minors of `λA + μB`, as a binary form.
fn minors_gcd<F: ExactField>(a: &Mat<F>, b: &Mat<F>) -> Option<BinaryForm<F>> {
    let mut g: Option<BinaryForm<F>> = None;
    for r in 0..4 {
        for c in 0..4 {
            let rows: Vec<usize> = (0..4).filter(|&i| i != r).collect();
            let cols: Vec<usize> = (0..4).filter(|&j| j != c).collect();
            let f = BinaryForm::pencil_det(&a.submatrix(&rows, &cols), &b.submatrix(&rows, &cols));
            if f.is_zero() {
                continue;
            }
            g = Some(match g {
                None => f,
                Some(g) => g.gcd(&f),
            });
        }
    }
    g
}

fn exact_root<F: Field>(r: &FormRoot<F>) -> Result<(Gaussian, Gaussian)> {
    r.root
        .exact_coords()
        .ok_or_else(|| degenerate("rank-2 pencil member is not defined over ℚ(i)"))
}

pub fn pencil_classify<F: ExactField>(q1: &Quadric3<F>, q2: &Quadric3<F>) -> Result<PencilClassification<F>> {
    check_cone_pair(q1, q2)?;
    let det_form = BinaryForm::pencil_det(q1.matrix(), q2.matrix());
    let singular_pencil = det_form.is_zero();
    let roots = if singular_pencil {
        Vec::new()
    } else {
        det_form
            .roots()?
            .into_iter()
            .map(|r| {
                let rank = r.root.exact_coords().map(|(l, m)| member(q1, q2, &l, &m).rank());
                RootRank { root: r.root, multiplicity: r.multiplicity, rank }
            })
            .collect()
    };

    let g = minors_gcd(q1.matrix(), q2.matrix()).ok_or_else(|| degenerate("every pencil member has rank ≤ 2"))?;
    if g.degree() > 0 {
        let common = g.roots()?;
        if common.len() != 1 {
            return Err(degenerate("more than one pencil member of rank ≤ 2; outside the four-case table"));
        }
        let (l, m) = exact_root(&common[0])?;
        let r = member(q1, q2, &l, &m);
        if r.rank() != 2 {
            return Err(degenerate("pencil member of rank < 2; outside the four-case table"));
        }
        let v1 = lift(&Mat::column(q1.vertex()?.coords())).col(0);
        let class = if dot(&v1, &r.mul_vec(&v1)).is_zero() {
            PencilClass::ConicPlusDoubleLine
        } else {
            PencilClass::TwoSmoothConics
        };
        return Ok(PencilClassification { class, det_form, roots, singular_pencil, rank_two_member: Some((l, m)) });
    }
    if singular_pencil {
        return Err(degenerate("singular pencil without a rank-2 member; outside the four-case table"));
    }
    let c = det_form.coeffs();
    let class = if c[0].is_zero() && c[1].is_zero() && c[3].is_zero() && c[4].is_zero() {
        PencilClass::CubicPlusLine
    } else {
        PencilClass::IrreducibleQuartic
    };
    Ok(PencilClassification { class, det_form, roots, singular_pencil, rank_two_member: None })
}

/// The two planes of a rank-2 symmetric form `R`.
///
/// For `p` with `q(p) = pᵀRp ≠ 0`, `L = Rp` and `S = LLᵀ − q(p)R = MMᵀ` has rank one,
/// and the planes are `L ± M`. Reading `M` off a row of `S` needs `√S_kk`.
pub fn split_plane_pair(r: &Mat<Gaussian>) -> Result<[Vec<Gaussian>; 2]> {
    let n = r.rows();
    let unit = |i: usize| (0..n).map(|k| if k == i { Gaussian::one() } else { Gaussian::zero() }).collect::<Vec<_>>();
    let mut candidates: Vec<Vec<Gaussian>> = (0..n).map(unit).collect();
    for i in 0..n {
        for j in i + 1..n {
            candidates.push(unit(i).into_iter().zip(unit(j)).map(|(a, b)| a + b).collect());
        }
    }
    let (p, qp) = candidates
        .into_iter()
        .map(|p| {
            let qp = dot(&p, &r.mul_vec(&p));
            (p, qp)
        })
        .find(|(_, qp)| !qp.is_zero())
        .ok_or_else(|| degenerate("zero quadratic form"))?;
    let l = r.mul_vec(&p);
    let s = Mat::column(&l).mul(&Mat::column(&l).transpose()).sub(&r.scale(&qp));
    let k = (0..n).find(|&k| !s[(k, k)].is_zero()).ok_or_else(|| degenerate("form does not have rank 2"))?;
    let root = s[(k, k)]
        .sqrt()
        .ok_or_else(|| GeomError::Unrepresentable("the planes need a square root outside ℚ(i)".into()))?;
    let row = s.row(k);
    let plane = |sign: i64| -> Vec<Gaussian> {
        let v: Vec<Gaussian> = l
            .iter()
            .zip(&row)
            .map(|(a, b)| root.clone() * a.clone() + Gaussian::from_ints(sign, 0) * b.clone())
            .collect();
        normalize_vec(&v)
    };
    Ok([plane(-1), plane(1)])
}

/// The two plane sections making up `Q1 ∩ Q2` when the pencil has a rank-2 member.
pub fn intersect_two_smooth_case<F: ExactField>(q1: &Quadric3<F>, q2: &Quadric3<F>) -> Result<[SpaceConic<Gaussian>; 2]> {
    let cls = pencil_classify(q1, q2)?;
    let (l, m) = match (cls.class, cls.rank_two_member) {
        (PencilClass::TwoSmoothConics | PencilClass::ConicPlusDoubleLine, Some(lm)) => lm,
        _ => return Err(precondition(format!("intersection is {}, not a pair of plane sections", cls.class.as_str()))),
    };
    let planes = split_plane_pair(&member(q1, q2, &l, &m))?;
    let g1 = Quadric3::new(lift(q1.matrix()))?;
    let g2 = Quadric3::new(lift(q2.matrix()))?;
    let mut out = Vec::with_capacity(2);
    for plane in planes {
        let c = SpaceConic::new(plane, g1.clone())?;
        if c.degeneracy() == Degeneracy::TwoLines || !c.lies_on(&g2) {
            return Err(degenerate("plane section outside the four-case table"));
        }
        out.push(c);
    }
    // smooth section first
    out.sort_by_key(|c| c.degeneracy() != Degeneracy::Smooth);
    let b = out.pop().expect("two sections");
    let a = out.pop().expect("two sections");
    Ok([a, b])
}

/// Space conics (over ℚ(i)) lying on every cone of a configuration.
#[derive(Clone, Debug)]
pub struct DecalibrationFiber {
    pub conics: Vec<SpaceConic<Gaussian>>,
    /// Intersection type of the first two cones.
    pub class: PencilClass,
}

impl DecalibrationFiber {
    pub fn len(&self) -> usize {
        self.conics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conics.is_empty()
    }

    pub fn contains(&self, c: &SpaceConic<Gaussian>) -> bool {
        self.conics.iter().any(|x| x == c)
    }
}

pub fn lift_space_conic<F: ExactField>(c: &SpaceConic<F>) -> SpaceConic<Gaussian> {
    let q = Quadric3::new(lift(c.quadric().matrix())).expect("symmetric");
    SpaceConic::new(c.plane().iter().map(ExactField::to_gaussian).collect(), q).expect("valid section")
}

pub fn decalibration_fiber<F: ExactField>(config: &CameraConfig<F>, image_conics: &[Conic2<F>]) -> Result<DecalibrationFiber> {
    if config.len() < 2 {
        return Err(GeomError::Dimension("a fiber needs at least two views".into()));
    }
    if image_conics.len() != config.len() {
        return Err(GeomError::Dimension("one image conic per camera is required".into()));
    }
    if !config.is_general() {
        return Err(precondition("configuration is not general: two camera centers coincide"));
    }
    let cones = config
        .cameras()
        .iter()
        .zip(image_conics)
        .map(|(p, d)| pullback_cone(p, d))
        .collect::<Result<Vec<_>>>()?;
    let cls = pencil_classify(&cones[0], &cones[1])?;
    let mut conics = match cls.class {
        PencilClass::TwoSmoothConics | PencilClass::ConicPlusDoubleLine => intersect_two_smooth_case(&cones[0], &cones[1])?.to_vec(),
        PencilClass::CubicPlusLine | PencilClass::IrreducibleQuartic => Vec::new(),
    };
    for cone in &cones[2..] {
        let g = Quadric3::new(lift(cone.matrix()))?;
        conics.retain(|c| c.lies_on(&g));
    }
    Ok(DecalibrationFiber { conics, class: cls.class })
}

/// Lowers a ℚ(i) space conic whose plane is proportional to one over `F`,
/// using `cone` (over `F`, containing the curve) as its quadric.
fn lower_space_conic<F: ExactField>(c: &SpaceConic<Gaussian>, cone: &Quadric3<F>) -> Result<SpaceConic<F>> {
    let plane = normalize_vec(c.plane())
        .iter()
        .map(F::from_gaussian)
        .collect::<Option<Vec<F>>>()
        .ok_or_else(|| GeomError::Unrepresentable("residual plane is not defined over the input tower".into()))?;
    SpaceConic::new(plane, cone.clone())
}

/// Swaps the calibrating curve of a calibrated pair for the other curve of the fiber.
pub fn residual_calibration<F: ExactField>(cal: &CalibratedConfig<F>) -> Result<CalibratedConfig<F>> {
    if cal.config().len() != 2 {
        return Err(GeomError::Dimension("residual calibration needs exactly two views".into()));
    }
    let fiber = decalibration_fiber(cal.config(), cal.image_conics())?;
    if fiber.len() != 2 {
        return Err(degenerate(format!("fiber has length {}, expected 2", fiber.len())));
    }
    let current = lift_space_conic(cal.space_conic());
    let idx = fiber
        .conics
        .iter()
        .position(|c| *c == current)
        .ok_or_else(|| precondition("calibration datum is not in the fiber"))?;
    let cone = pullback_cone(&cal.config().cameras()[0], &cal.image_conics()[0])?;
    let other = lower_space_conic(&fiber.conics[1 - idx], &cone)?;
    cal.with_space_conic(other)
}

/// Two calibrated views sharing the absolute conic, and the twisted companion of the second.
///
/// Camera 1 is `[I | 0]` and camera 2 is `R[I | -t]`, with center `t`. The twisted camera is
/// `P2 · R_t`, `R_t = diag(core, 1)` with `core = (2ttᵀ - |t|²I)/|t|²` when `|t|² ≠ 0` and
/// `2ttᵀ - I` otherwise.
#[derive(Clone, Debug)]
pub struct TwistedPair<F> {
    pub rotation: Mat<F>,
    pub t: Vec<F>,
    pub r_t_core: Mat<F>,
    pub r_t: Mat<F>,
    pub p1: Camera<F>,
    pub p2: Camera<F>,
    pub p2_twisted: Camera<F>,
    /// `[[I, 0], [-2tᵀ, 1]]`. Its inverse carries the absolute conic to the residual conic
    /// when `|t|² = 1`.
    pub h: Homography<F>,
    /// `[[|t|²I, 0], [2tᵀ, -|t|²]]`: an involution fixing camera 1, taking the twisted camera
    /// to camera 2 and the absolute conic to the residual one. `None` when `|t|² = 0`.
    pub camera_involution: Option<Homography<F>>,
    /// `|t|² w - 2 t·x`.
    pub residual_plane: Vec<F>,
    /// `|t|² = 0`, where the residual curve is a doubled line.
    pub degenerate: bool,
}

impl<F: Field> TwistedPair<F> {
    pub fn residual_conic(&self) -> Result<SpaceConic<F>> {
        SpaceConic::new(self.residual_plane.clone(), SpaceConic::<F>::absolute().quadric().clone())
    }

    pub fn config(&self) -> Result<CameraConfig<F>> {
        CameraConfig::new(vec![self.p1.clone(), self.p2.clone()])
    }

    /// The pair calibrated by the absolute conic, with Euclidean image conics.
    pub fn calibrated_pair(&self) -> Result<CalibratedConfig<F>> {
        CalibratedConfig::new(self.config()?, vec![Conic2::euclidean(), Conic2::euclidean()], SpaceConic::absolute())
    }
}

fn is_rotation<F: Field>(r: &Mat<F>) -> bool {
    let e = r.mul(&r.transpose()).sub(&Mat::identity(3));
    let scale = r.max_magnitude().max(1.0).powi(2);
    e.data().iter().all(|x| F::negligible(x, scale)) && !r.det().is_zero()
}

pub fn twisted_pair<F: Field>(rotation: &Mat<F>, t: &[F]) -> Result<TwistedPair<F>> {
    if rotation.rows() != 3 || rotation.cols() != 3 || t.len() != 3 {
        return Err(GeomError::Dimension("rotation must be 3×3 and t a 3-vector".into()));
    }
    if !is_rotation(rotation) {
        return Err(precondition("R Rᵀ ≠ I"));
    }
    let t_scale = t.iter().map(Field::magnitude).fold(0.0, f64::max);
    if t_scale == 0.0 || t.iter().all(|x| F::negligible(x, 1.0)) {
        return Err(precondition("t = 0"));
    }
    let n2 = dot(t, t);
    let degenerate = F::negligible(&n2, t_scale * t_scale);
    let two = F::from_i64(2);
    let ttt = Mat::column(t).mul(&Mat::column(t).transpose()).scale(&two);
    let r_t_core = if degenerate {
        ttt.sub(&Mat::identity(3))
    } else {
        let inv = F::one() / n2.clone();
        ttt.sub(&Mat::identity(3).scale(&n2)).scale(&inv)
    };
    let r_t = Mat::from_fn(4, 4, |i, j| match (i < 3, j < 3) {
        (true, true) => r_t_core[(i, j)].clone(),
        (false, false) => F::one(),
        _ => F::zero(),
    });
    let p1 = Camera::new(Mat::identity(3).hstack(&Mat::zeros(3, 1)))?;
    let minus_t: Vec<F> = t.iter().map(|x| -x.clone()).collect();
    let p2 = Camera::new(rotation.mul(&Mat::identity(3).hstack(&Mat::column(&minus_t))))?;
    let p2_twisted = Camera::new(p2.matrix().mul(&r_t))?;
    let h = Homography::new(Mat::from_fn(4, 4, |i, j| match (i < 3, j < 3) {
        (true, true) if i == j => F::one(),
        (false, true) => -(two.clone() * t[j].clone()),
        (false, false) => F::one(),
        _ => F::zero(),
    }))?;
    let camera_involution = if degenerate {
        None
    } else {
        Some(Homography::new(Mat::from_fn(4, 4, |i, j| match (i < 3, j < 3) {
            (true, true) if i == j => n2.clone(),
            (false, true) => two.clone() * t[j].clone(),
            (false, false) => -n2.clone(),
            _ => F::zero(),
        }))?)
    };
    let mut residual_plane: Vec<F> = t.iter().map(|x| -(two.clone() * x.clone())).collect();
    residual_plane.push(n2);
    Ok(TwistedPair {
        rotation: rotation.clone(),
        t: t.to_vec(),
        r_t_core,
        r_t,
        p1,
        p2,
        p2_twisted,
        h,
        camera_involution,
        residual_plane,
        degenerate,
    })
}

/// A linear space of quadrics in P³, by a basis of symmetric matrices.
#[derive(Clone, Debug)]
pub struct QuadricSpace<F> {
    pub basis: Vec<Mat<F>>,
}

impl<F: Field> QuadricSpace<F> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn member(&self, coeffs: &[F]) -> Mat<F> {
        self.basis
            .iter()
            .zip(coeffs)
            .fold(Mat::zeros(4, 4), |acc, (b, c)| acc.add(&b.scale(c)))
    }
}

pub enum Curve<'a, F> {
    Conic(&'a SpaceConic<F>),
    Intersection(&'a Quadric3<F>, &'a Quadric3<F>),
}

const SYM_INDEX: [(usize, usize); 10] = [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];

fn sym_unit<F: Field>(k: usize) -> Mat<F> {
    let (a, b) = SYM_INDEX[k];
    Mat::from_fn(4, 4, |i, j| if (i, j) == (a, b) || (i, j) == (b, a) { F::one() } else { F::zero() })
}

fn space_from_null<F: Field>(null: Vec<Vec<F>>) -> QuadricSpace<F> {
    let basis = null
        .into_iter()
        .map(|v| v.iter().enumerate().fold(Mat::zeros(4, 4), |acc, (k, c)| acc.add(&sym_unit::<F>(k).scale(c))))
        .collect();
    QuadricSpace { basis }
}

/// Quadrics containing a curve, as the kernel of a linear map on the 10-dimensional space
/// of quadrics.
///
/// For a plane section the map is restriction to the plane modulo the section's form.
/// For `Q1 ∩ Q2` a quadric `Q` is kept when `Q · m` lies in `(Q1, Q2)` in degree 4 for every
/// quadratic monomial `m`. That test needs `Q1, Q2` to be a regular sequence, which is
/// checked by the rank (19) of the degree-4 products.
pub fn quadrics_through<F: ExactField>(curve: Curve<'_, F>) -> Result<QuadricSpace<F>> {
    match curve {
        Curve::Conic(c) => {
            let b = crate::projective::plane_basis(c.plane());
            let restrict = |m: &Mat<F>| b.transpose().mul(m).mul(&b);
            let s = c.restricted().matrix().clone();
            let pos: Vec<(usize, usize)> = (0..3).flat_map(|i| (i..3).map(move |j| (i, j))).collect();
            let images: Vec<Mat<F>> = (0..10).map(|k| restrict(&sym_unit(k))).collect();
            let mut rows = Vec::new();
            for (x, &(i, j)) in pos.iter().enumerate() {
                for &(k, l) in &pos[x + 1..] {
                    rows.push(
                        images
                            .iter()
                            .map(|r| r[(i, j)].clone() * s[(k, l)].clone() - r[(k, l)].clone() * s[(i, j)].clone())
                            .collect(),
                    );
                }
            }
            Ok(space_from_null(Mat::from_rows(rows)?.null_space()))
        }
        Curve::Intersection(q1, q2) => {
            let monomials: Vec<MPoly<F>> = (0..4)
                .flat_map(|i| (i..4).map(move |j| (i, j)))
                .map(|(i, j)| MPoly::var(4, i).mul(&MPoly::var(4, j)))
                .collect();
            let quartics: Vec<Vec<u32>> = monomials
                .iter()
                .flat_map(|a| monomials.iter().map(move |b| a.mul(b)))
                .flat_map(|p| p.terms().map(|(e, _)| e.clone()).collect::<Vec<_>>())
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            let vec4 = |p: &MPoly<F>| -> Vec<F> { quartics.iter().map(|e| p.coeff(e)).collect() };
            let f1 = MPoly::quadratic_form(q1.matrix());
            let f2 = MPoly::quadratic_form(q2.matrix());
            let products: Vec<Vec<F>> = [f1, f2]
                .iter()
                .flat_map(|f| monomials.iter().map(|m| vec4(&f.mul(m))).collect::<Vec<_>>())
                .collect();
            let ideal = Mat::from_rows(products)?;
            let r = ideal.rank();
            if r != 19 {
                return Err(degenerate(format!("quadrics are not a regular sequence (degree-4 rank {r})")));
            }
            let annihilator = ideal.null_space();
            let units: Vec<MPoly<F>> = (0..10).map(|k| MPoly::quadratic_form(&sym_unit(k))).collect();
            let mut rows = Vec::new();
            for m in &monomials {
                let cols: Vec<Vec<F>> = units.iter().map(|u| vec4(&u.mul(m))).collect();
                for n in &annihilator {
                    rows.push(cols.iter().map(|c| dot(n, c)).collect());
                }
            }
            Ok(space_from_null(Mat::from_rows(rows)?.null_space()))
        }
    }
}
