//! Two-view geometry. Bilinear forms are read as `xᵀ A y` with `x` in view 1.

use num_complex::Complex64;

use crate::error::{degenerate, GeomError, Result};
use crate::matrix::{proportional, Mat};
use crate::poly::{solve_cubic_f64, BinaryForm, Poly, ProjectiveRoot, RootValue};
use crate::projective::{Camera, HPoint2};
use crate::scalar::{ExactField, Field, Gaussian, DEFAULT_TOL};

/// A 3×3 bilinear form up to scale.
#[derive(Clone, Debug)]
pub struct BilinearForm<F> {
    m: Mat<F>,
}

impl<F: Field> BilinearForm<F> {
    pub fn new(m: Mat<F>) -> Result<Self> {
        if m.rows() != 3 || m.cols() != 3 {
            return Err(GeomError::Dimension("bilinear form must be 3×3".into()));
        }
        if m.is_zero() {
            return Err(degenerate("zero bilinear form"));
        }
        Ok(Self { m })
    }

    pub fn matrix(&self) -> &Mat<F> {
        &self.m
    }

    pub fn into_matrix(self) -> Mat<F> {
        self.m
    }

    /// `xᵀ A y`.
    pub fn eval(&self, x: &[F], y: &[F]) -> F {
        crate::matrix::dot(x, &self.m.mul_vec(y))
    }

    pub fn rank(&self) -> usize {
        self.m.rank()
    }
}

impl<F: Field> PartialEq for BilinearForm<F> {
    fn eq(&self, other: &Self) -> bool {
        proportional(self.m.data(), other.m.data())
    }
}

/// One image point per view.
#[derive(Clone, Debug)]
pub struct Correspondence<F> {
    pub points: Vec<HPoint2<F>>,
}

impl<F: Field> PartialEq for Correspondence<F> {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
    }
}

impl<F: Field> Correspondence<F> {
    pub fn new(points: Vec<HPoint2<F>>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `A_ij = (−1)^{i+j} det[P1 without row i; P2 without row j]`.
pub fn fundamental_from_pair<F: Field>(p1: &Camera<F>, p2: &Camera<F>) -> Result<BilinearForm<F>> {
    if p1.center() == p2.center() {
        return Err(degenerate("camera centers coincide"));
    }
    let (a, b) = (p1.matrix(), p2.matrix());
    let m = Mat::from_fn(3, 3, |i, j| {
        let rows: Vec<Vec<F>> = (0..3)
            .filter(|&r| r != i)
            .map(|r| a.row(r))
            .chain((0..3).filter(|&r| r != j).map(|r| b.row(r)))
            .collect();
        let d = Mat::from_rows(rows).expect("4×4").det();
        if (i + j) % 2 == 0 {
            d
        } else {
            -d
        }
    });
    BilinearForm::new(m)
}

/// `(left, right)` kernels: `leftᵀ A = 0`, `A right = 0`.
pub fn epipoles<F: Field>(a: &BilinearForm<F>) -> Result<(HPoint2<F>, HPoint2<F>)> {
    let r = a.rank();
    if r != 2 {
        return Err(GeomError::Rank { expected: "2".into(), found: r });
    }
    let right = a.m.null_space().remove(0);
    let left = a.m.transpose().null_space().remove(0);
    Ok((HPoint2::new(left)?, HPoint2::new(right)?))
}

/// A camera pair with fundamental form `a`: `[I | 0]` and `[[e]ₓ Aᵀ | e]`, `e` the right epipole.
pub fn canonical_cameras<F: Field>(a: &BilinearForm<F>) -> Result<(Camera<F>, Camera<F>)> {
    let (_, e) = epipoles(a)?;
    let e = e.into_coords();
    let p1 = Camera::new(Mat::identity(3).hstack(&Mat::zeros(3, 1)))?;
    let p2 = Camera::new(crate::matrix::skew(&e).mul(&a.m.transpose()).hstack(&Mat::column(&e)))?;
    Ok((p1, p2))
}

/// Coefficients `h` with `h · vec(A) = xᵀ A y` (row-major `vec`).
pub fn correspondence_hyperplane<F: Field>(x: &HPoint2<F>, y: &HPoint2<F>) -> Vec<F> {
    let mut h = Vec::with_capacity(9);
    for xi in x.coords() {
        for yj in y.coords() {
            h.push(xi.clone() * yj.clone());
        }
    }
    h
}

fn design_matrix<F: Field>(corrs: &[Correspondence<F>]) -> Result<Mat<F>> {
    let mut rows = Vec::with_capacity(corrs.len());
    for c in corrs {
        if c.len() != 2 {
            return Err(GeomError::Dimension(format!("expected 2 views, got {}", c.len())));
        }
        rows.push(correspondence_hyperplane(&c.points[0], &c.points[1]));
    }
    Mat::from_rows(rows)
}

fn as_form<F: Field>(v: Vec<F>) -> Mat<F> {
    Mat::new(3, 3, v).expect("9 entries")
}

fn seven_point_basis<F: Field>(corrs: &[Correspondence<F>], tol: f64) -> Result<(Mat<F>, Mat<F>)> {
    if corrs.len() != 7 {
        return Err(GeomError::Dimension(format!("expected 7 correspondences, got {}", corrs.len())));
    }
    let d = design_matrix(corrs)?;
    let r = F::rank_impl(&d, tol);
    if r != 7 {
        return Err(GeomError::Rank { expected: "7".into(), found: r });
    }
    let mut ns = F::null_space_impl(&d, tol);
    let f2 = as_form(ns.pop().expect("two kernel vectors"));
    let f1 = as_form(ns.pop().expect("two kernel vectors"));
    Ok((f1, f2))
}

/// A root `(λ : μ)` of `det(λF1 + μF2)` and the corresponding form.
#[derive(Clone, Debug)]
pub enum SevenPointSolution<F> {
    /// `(λ : μ)` in ℚ(i); the form is exact.
    Exact {
        lambda: Gaussian,
        mu: Gaussian,
        form: Mat<Gaussian>,
        multiplicity: usize,
    },
    /// `(x : 1)` with `x` a root of `factor` outside ℚ(i).
    Algebraic {
        factor: Poly<F>,
        approx: Complex64,
        multiplicity: usize,
    },
}

impl<F: Field> SevenPointSolution<F> {
    pub fn is_exact(&self) -> bool {
        matches!(self, Self::Exact { .. })
    }

    pub fn is_real(&self) -> bool {
        match self {
            Self::Exact { lambda, mu, .. } => {
                // real up to a common scale
                let ratio_real = |a: &Gaussian, b: &Gaussian| (a.clone() * b.conj()).is_real();
                ratio_real(lambda, mu)
            }
            Self::Algebraic { approx, .. } => approx.im.abs() <= 1e-9 * (1.0 + approx.norm()),
        }
    }

    pub fn multiplicity(&self) -> usize {
        match self {
            Self::Exact { multiplicity, .. } | Self::Algebraic { multiplicity, .. } => *multiplicity,
        }
    }
}

/// Exact seven-point result: the kernel basis, the cubic `det(λF1 + μF2)` and its roots.
#[derive(Clone, Debug)]
pub struct SevenPoint<F> {
    pub f1: Mat<F>,
    pub f2: Mat<F>,
    pub cubic: BinaryForm<F>,
    pub solutions: Vec<SevenPointSolution<F>>,
}

impl<F: ExactField> SevenPoint<F> {
    /// Approximate complex form for any solution.
    pub fn approx_form(&self, s: &SevenPointSolution<F>) -> [[Complex64; 3]; 3] {
        let entry = |r: usize, c: usize| match s {
            SevenPointSolution::Exact { form, .. } => form[(r, c)].to_c64(),
            SevenPointSolution::Algebraic { approx, .. } => approx * self.f1[(r, c)].to_c64() + self.f2[(r, c)].to_c64(),
        };
        std::array::from_fn(|r| std::array::from_fn(|c| entry(r, c)))
    }

    /// `det = 0` for every solution: evaluated directly for exact ones, and as
    /// divisibility of the dehomogenized cubic by the defining factor otherwise.
    pub fn certify_determinants(&self) -> bool {
        let (p, _) = self.cubic.dehomogenize();
        self.solutions.iter().all(|s| match s {
            SevenPointSolution::Exact { form, .. } => form.det().is_zero(),
            SevenPointSolution::Algebraic { factor, .. } => p.div_rem(factor).1.is_zero(),
        })
    }
}

/// Seven-point solver in an exact tower.
pub fn seven_point<F: ExactField>(corrs: &[Correspondence<F>]) -> Result<SevenPoint<F>> {
    let (f1, f2) = seven_point_basis(corrs, DEFAULT_TOL)?;
    let cubic = BinaryForm::pencil_det(&f1, &f2);
    let roots = cubic.roots().map_err(|_| degenerate("every member of the kernel pencil is singular"))?;
    let (g1, g2) = (f1.map(ExactField::to_gaussian), f2.map(ExactField::to_gaussian));
    let solutions = roots
        .into_iter()
        .map(|r| match r.root {
            ProjectiveRoot::Infinity => SevenPointSolution::Exact {
                lambda: Gaussian::one(),
                mu: Gaussian::zero(),
                form: g1.clone(),
                multiplicity: r.multiplicity,
            },
            ProjectiveRoot::Finite(RootValue::Exact(x)) => SevenPointSolution::Exact {
                form: g1.lin_comb(&x, &g2, &Gaussian::one()),
                lambda: x,
                mu: Gaussian::one(),
                multiplicity: r.multiplicity,
            },
            ProjectiveRoot::Finite(RootValue::Algebraic { factor, approx }) => SevenPointSolution::Algebraic {
                factor,
                approx,
                multiplicity: r.multiplicity,
            },
        })
        .collect();
    Ok(SevenPoint { f1, f2, cubic, solutions })
}

/// Float seven-point result: real solutions as forms, complex roots counted.
#[derive(Clone, Debug)]
pub struct SevenPointFloat {
    pub real_solutions: Vec<Mat<f64>>,
    pub complex_roots: Vec<Complex64>,
}

pub fn seven_point_f64(corrs: &[Correspondence<f64>], tol: f64) -> Result<SevenPointFloat> {
    if !(tol > 0.0) {
        return Err(GeomError::MissingTolerance);
    }
    let (f1, f2) = seven_point_basis(corrs, tol)?;
    let cubic = BinaryForm::pencil_det(&f1, &f2);
    let c = cubic.coeffs();
    let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Err(degenerate("every member of the kernel pencil is singular"));
    }
    let mut real = Vec::new();
    let mut complex = Vec::new();
    if c[0].abs() <= 1e-12 * scale {
        real.push(f1.clone());
    }
    let roots = if c[0].abs() <= 1e-12 * scale {
        crate::poly::float_roots(&[c[3], c[2], c[1]].map(|x| Complex64::new(x, 0.0)))
            .into_iter()
            .collect::<Vec<_>>()
    } else {
        solve_cubic_f64([c[0], c[1], c[2], c[3]])?
            .into_iter()
            .flat_map(|r| std::iter::repeat(r.value).take(r.multiplicity))
            .collect()
    };
    for z in roots {
        if z.im.abs() <= 1e-9 * (1.0 + z.norm()) {
            let f = f1.lin_comb(&z.re, &f2, &1.0);
            if !real.iter().any(|g: &Mat<f64>| proportional(g.data(), f.data())) {
                real.push(f);
            }
        } else {
            complex.push(z);
        }
    }
    Ok(SevenPointFloat { real_solutions: real, complex_roots: complex })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::HPoint3;
    use crate::scalar::{rational, Rational};

    fn cam(rows: [[i64; 4]; 3]) -> Camera<Rational> {
        Camera::from_ints(rows).unwrap()
    }

    fn q(n: i64) -> Rational {
        rational(n, 1)
    }

    #[test]
    fn pure_translation() {
        let p1 = cam([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]);
        let p2 = cam([[1, 0, 0, -1], [0, 1, 0, 0], [0, 0, 1, 0]]);
        let a = fundamental_from_pair(&p1, &p2).unwrap();
        assert_eq!(a.rank(), 2);
        let e = p2.project(&p1.center()).unwrap();
        assert!(a.matrix().mul_vec(e.coords()).iter().all(Field::is_zero));
        let t = [q(-1), q(0), q(0)];
        assert_eq!(a, BilinearForm::new(crate::matrix::skew(&t)).unwrap());
    }

    #[test]
    fn canonical_pair_reproduces_the_form() {
        let p1 = cam([[3, 1, 0, 2], [0, 1, -1, 0], [1, 0, 2, 1]]);
        let p2 = cam([[1, 0, 4, 0], [2, 1, 0, -1], [0, 5, 1, 1]]);
        let a = fundamental_from_pair(&p1, &p2).unwrap();
        let (c1, c2) = canonical_cameras(&a).unwrap();
        assert_eq!(fundamental_from_pair(&c1, &c2).unwrap(), a);
    }

    #[test]
    fn equal_centers_rejected() {
        let p1 = cam([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]);
        let p2 = cam([[2, 1, 0, 0], [0, 1, 3, 0], [1, 0, 1, 0]]);
        assert!(matches!(fundamental_from_pair(&p1, &p2), Err(GeomError::Degenerate(_))));
    }

    #[test]
    fn epipole_examples() {
        let a = BilinearForm::new(Mat::<Rational>::from_ints(&[[0, 0, 0], [0, 0, -1], [0, 1, 0]])).unwrap();
        let (l, r) = epipoles(&a).unwrap();
        assert_eq!(l, HPoint2::from_ints([1, 0, 0]));
        assert_eq!(r, HPoint2::from_ints([1, 0, 0]));
        let full = BilinearForm::new(Mat::<Rational>::identity(3)).unwrap();
        assert!(matches!(epipoles(&full), Err(GeomError::Rank { found: 3, .. })));
    }

    #[test]
    fn hyperplane_of_basis_points() {
        let e = HPoint2::<Rational>::from_ints([1, 0, 0]);
        let h = correspondence_hyperplane(&e, &e);
        assert_eq!(h[0], q(1));
        assert!(h[1..].iter().all(Field::is_zero));
    }

    #[test]
    fn seven_point_recovers_generating_form() {
        let p1 = cam([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]);
        let p2 = cam([[2, -1, 0, 3], [1, 4, -2, 1], [0, 1, 1, -5]]);
        let truth = fundamental_from_pair(&p1, &p2).unwrap();
        let pts = [[1, 2, 3, 1], [-2, 1, 5, 2], [3, 3, -1, 1], [0, 1, 7, 3], [4, -2, 2, 1], [1, 5, 1, -1], [2, 0, 9, 4]];
        let corrs: Vec<_> = pts
            .iter()
            .map(|p| {
                let x = HPoint3::from_ints(*p);
                Correspondence::new(vec![p1.project(&x).unwrap(), p2.project(&x).unwrap()])
            })
            .collect();
        let sol = seven_point(&corrs).unwrap();
        assert!((1..=3).contains(&sol.solutions.len()));
        assert!(sol.certify_determinants());
        let target = truth.matrix().map(ExactField::to_gaussian);
        assert!(sol.solutions.iter().any(|s| match s {
            SevenPointSolution::Exact { form, .. } => proportional(form.data(), target.data()),
            _ => false,
        }));
        let fl: Vec<_> = corrs
            .iter()
            .map(|c| Correspondence::new(c.points.iter().map(|p| HPoint2::new(p.coords().iter().map(|x| x.to_c64().re).collect()).unwrap()).collect()))
            .collect();
        let fs = seven_point_f64(&fl, 1e-10).unwrap();
        let tf = truth.matrix().map(|x| x.to_c64().re);
        let tn = tf.data().iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(fs.real_solutions.iter().any(|f| {
            let fnrm = f.data().iter().map(|x| x * x).sum::<f64>().sqrt();
            let s = if f.data().iter().zip(tf.data()).map(|(a, b)| a * b).sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
            f.data().iter().zip(tf.data()).all(|(a, b)| (s * a / fnrm - b / tn).abs() < 1e-8)
        }));
    }

    #[test]
    fn seven_equal_correspondences_rejected() {
        let x = HPoint2::<Rational>::from_ints([1, 2, 3]);
        let corrs = vec![Correspondence::new(vec![x.clone(), x]); 7];
        assert!(matches!(seven_point(&corrs), Err(GeomError::Rank { found: 1, .. })));
    }
}
