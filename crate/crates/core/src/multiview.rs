//! n-view configurations and the multiview matrix.
//!
//! For cameras `P_i` and image points `x_i` the multiview matrix is the
//! `3n × (4+n)` block matrix with row block `i` equal to `[P_i | x_i in column 4+i]`.
//! A correspondence lies on the joint image exactly when this matrix has a kernel.

use crate::epipolar::{fundamental_from_pair, BilinearForm, Correspondence};
use crate::error::{degenerate, precondition, GeomError, Result};
use crate::matrix::{proportional, rank, Mat};
use crate::projective::{Camera, HPoint2, HPoint3, Homography};
use crate::scalar::Field;

#[derive(Clone, Debug)]
pub struct CameraConfig<F> {
    cameras: Vec<Camera<F>>,
}

impl<F: Field> CameraConfig<F> {
    pub fn new(cameras: Vec<Camera<F>>) -> Result<Self> {
        if cameras.is_empty() {
            return Err(GeomError::Dimension("a configuration needs at least one camera".into()));
        }
        Ok(Self { cameras })
    }

    pub fn cameras(&self) -> &[Camera<F>] {
        &self.cameras
    }

    pub fn len(&self) -> usize {
        self.cameras.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cameras.is_empty()
    }

    pub fn centers(&self) -> Vec<HPoint3<F>> {
        self.cameras.iter().map(Camera::center).collect()
    }

    /// Pairwise distinct centers.
    pub fn is_general(&self) -> bool {
        let c = self.centers();
        (0..c.len()).all(|i| (i + 1..c.len()).all(|j| c[i] != c[j]))
    }

    /// `{P_i · H}`.
    pub fn transform(&self, h: &Homography<F>) -> Self {
        Self { cameras: self.cameras.iter().map(|p| p.transform(h)).collect() }
    }

    /// Projections of a world point in every view; fails at a center.
    pub fn project(&self, x: &HPoint3<F>) -> Result<Correspondence<F>> {
        let points = self.cameras.iter().map(|p| p.project(x)).collect::<Result<Vec<_>>>()?;
        Ok(Correspondence::new(points))
    }

    fn require_general(&self) -> Result<()> {
        if self.is_general() {
            Ok(())
        } else {
            Err(precondition("configuration is not general: two camera centers coincide"))
        }
    }
}

pub fn multiview_matrix<F: Field>(config: &CameraConfig<F>, corr: &Correspondence<F>) -> Result<Mat<F>> {
    let n = config.len();
    if corr.len() != n {
        return Err(GeomError::Dimension(format!(
            "correspondence has {} points for {} cameras",
            corr.len(),
            n
        )));
    }
    Ok(Mat::from_fn(3 * n, 4 + n, |r, c| {
        let i = r / 3;
        if c < 4 {
            config.cameras[i].matrix()[(r % 3, c)].clone()
        } else if c - 4 == i {
            corr.points[i].coords()[r % 3].clone()
        } else {
            F::zero()
        }
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Membership {
    pub rank: usize,
    pub on_joint_image: bool,
}

/// Rank of the multiview matrix and whether it is at most `n + 3`.
///
/// Any kernel vector `(ξ, λ)` has `ξ ≠ 0` because every `x_i` is nonzero, so the
/// rank drop alone certifies a nonzero witness. `tol` is required in float mode.
pub fn membership_rank<F: Field>(
    config: &CameraConfig<F>,
    corr: &Correspondence<F>,
    tol: Option<f64>,
) -> Result<Membership> {
    let m = multiview_matrix(config, corr)?;
    let r = rank(&m, tol)?;
    Ok(Membership { rank: r, on_joint_image: r <= config.len() + 3 })
}

/// World point `ξ` with `P_i ξ ∝ x_i` (where `P_i ξ` may vanish if `ξ` is a center).
pub fn triangulate<F: Field>(config: &CameraConfig<F>, corr: &Correspondence<F>) -> Result<HPoint3<F>> {
    let m = multiview_matrix(config, corr)?;
    let mut ns = m.null_space();
    match ns.len() {
        0 => Err(precondition("correspondence is not on the joint image")),
        1 => HPoint3::new(ns.remove(0)[..4].to_vec()),
        _ => Err(degenerate("ambiguous: the correspondence is the image of a whole line")),
    }
}

/// Camera from at least six world/image pairs.
pub fn resect<F: Field>(world: &[HPoint3<F>], image: &[HPoint2<F>]) -> Result<Camera<F>> {
    if world.len() != image.len() {
        return Err(GeomError::Dimension("world and image point counts differ".into()));
    }
    if world.len() < 6 {
        return Err(GeomError::Dimension("resection needs at least six points".into()));
    }
    let mut rows = Vec::with_capacity(3 * world.len());
    for (xi, x) in world.iter().zip(image) {
        let xi = xi.coords();
        let x = x.coords();
        // x × (P ξ) = 0, with P stored row-major
        let row = |pairs: [(usize, usize, bool); 2]| {
            let mut r = vec![F::zero(); 12];
            for (coord, prow, neg) in pairs {
                for k in 0..4 {
                    let v = x[coord].clone() * xi[k].clone();
                    r[4 * prow + k] = if neg { -v } else { v };
                }
            }
            r
        };
        rows.push(row([(1, 2, false), (2, 1, true)]));
        rows.push(row([(2, 0, false), (0, 2, true)]));
        rows.push(row([(0, 1, false), (1, 0, true)]));
    }
    let d = Mat::from_rows(rows)?;
    let r = d.rank();
    if r != 11 {
        return Err(GeomError::Rank { expected: "11".into(), found: r });
    }
    let p = d.null_space().remove(0);
    Camera::new(Mat::new(3, 4, p)?)
}

/// All 7×7 minors of the three-view multiview matrix, as an evaluator.
#[derive(Clone, Debug)]
pub struct TrilinearBundle<F> {
    pub views: [usize; 3],
    cameras: [Camera<F>; 3],
}

impl<F: Field> TrilinearBundle<F> {
    /// Values of the 36 minors at `(x, y, z)`.
    pub fn eval(&self, x: &HPoint2<F>, y: &HPoint2<F>, z: &HPoint2<F>) -> Vec<F> {
        let config = CameraConfig { cameras: self.cameras.to_vec() };
        let corr = Correspondence::new(vec![x.clone(), y.clone(), z.clone()]);
        let m = multiview_matrix(&config, &corr).expect("three views");
        let cols: Vec<usize> = (0..7).collect();
        let mut out = Vec::with_capacity(36);
        for a in 0..9 {
            for b in a + 1..9 {
                let rows: Vec<usize> = (0..9).filter(|&r| r != a && r != b).collect();
                out.push(m.submatrix(&rows, &cols).det());
            }
        }
        out
    }

    pub fn count(&self) -> usize {
        36
    }
}

/// Bilinear forms for every pair of views and trilinear bundles for every triple.
#[derive(Clone, Debug)]
pub struct Constraints<F> {
    pub bilinear: Vec<([usize; 2], BilinearForm<F>)>,
    pub trilinear: Vec<TrilinearBundle<F>>,
}

impl<F: Field> Constraints<F> {
    /// Whether every constraint vanishes at `corr`.
    pub fn vanish_on(&self, corr: &Correspondence<F>) -> bool {
        let p = &corr.points;
        let bil = self.bilinear.iter().all(|([i, j], a)| {
            let v = a.eval(p[*i].coords(), p[*j].coords());
            F::negligible(&v, a.matrix().max_magnitude() * point_scale(&p[*i]) * point_scale(&p[*j]))
        });
        bil && self.trilinear.iter().all(|t| {
            let [i, j, k] = t.views;
            let vals = t.eval(&p[i], &p[j], &p[k]);
            let scale = t
                .cameras
                .iter()
                .map(|c| c.matrix().max_magnitude())
                .fold(1.0, |a, b| a * b * b)
                * point_scale(&p[i])
                * point_scale(&p[j])
                * point_scale(&p[k]);
            vals.iter().all(|v| F::negligible(v, scale))
        })
    }
}

fn point_scale<F: Field>(x: &HPoint2<F>) -> f64 {
    x.coords().iter().map(Field::magnitude).fold(0.0, f64::max)
}

pub fn constraint_polynomials<F: Field>(config: &CameraConfig<F>) -> Result<Constraints<F>> {
    config.require_general()?;
    let c = config.cameras();
    let n = c.len();
    let mut bilinear = Vec::new();
    let mut trilinear = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            bilinear.push(([i, j], fundamental_from_pair(&c[i], &c[j])?));
            for k in j + 1..n {
                trilinear.push(TrilinearBundle {
                    views: [i, j, k],
                    cameras: [c[i].clone(), c[j].clone(), c[k].clone()],
                });
            }
        }
    }
    Ok(Constraints { bilinear, trilinear })
}

/// `H` with `P^B_i ∝ P^A_i · H` for every `i`, or `None` when no such `H` exists.
///
/// Each proportionality is the vanishing of all 2×2 minors of the pair
/// `(vec(P^A_i H), vec(P^B_i))`, which is linear in the entries of `H`.
pub fn recover_homography<F: Field>(a: &CameraConfig<F>, b: &CameraConfig<F>) -> Result<Option<Homography<F>>> {
    if a.len() != b.len() {
        return Err(GeomError::Dimension("configurations differ in length".into()));
    }
    if a.len() < 2 {
        return Err(GeomError::Dimension("need at least two cameras".into()));
    }
    a.require_general()?;
    b.require_general()?;
    let mut rows = Vec::new();
    for (pa, pb) in a.cameras.iter().zip(&b.cameras) {
        let (pa, pb) = (pa.matrix(), pb.matrix());
        // (P^A H)[r][c] = Σ_k pa[r][k] · h[4k + c]
        let coeff = |r: usize, c: usize| {
            let mut v = vec![F::zero(); 16];
            for k in 0..4 {
                v[4 * k + c] = pa[(r, k)].clone();
            }
            v
        };
        let entries: Vec<(usize, usize)> = (0..3).flat_map(|r| (0..4).map(move |c| (r, c))).collect();
        for (s, &(r1, c1)) in entries.iter().enumerate() {
            for &(r2, c2) in &entries[s + 1..] {
                let (u, v) = (coeff(r1, c1), coeff(r2, c2));
                let row: Vec<F> = (0..16)
                    .map(|k| u[k].clone() * pb[(r2, c2)].clone() - v[k].clone() * pb[(r1, c1)].clone())
                    .collect();
                rows.push(row);
            }
        }
    }
    let sys = Mat::from_rows(rows)?;
    let ns = sys.null_space();
    if ns.len() != 1 {
        return Ok(None);
    }
    let h = match Homography::new(Mat::new(4, 4, ns.into_iter().next().expect("one vector"))?) {
        Ok(h) => h,
        Err(_) => return Ok(None),
    };
    let ok = a
        .cameras
        .iter()
        .zip(&b.cameras)
        .all(|(pa, pb)| proportional(pa.transform(&h).matrix().data(), pb.matrix().data()));
    Ok(ok.then_some(h))
}

/// Rank of the 4×n matrix of centers is at most 2.
pub fn centers_collinear<F: Field>(config: &CameraConfig<F>) -> Result<bool> {
    config.require_general()?;
    let cols: Vec<Vec<F>> = config.centers().into_iter().map(HPoint3::into_coords).collect();
    let m = Mat::from_rows(cols)?;
    Ok(m.rank() <= 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn cam(rows: [[i64; 4]; 3]) -> Camera<Rational> {
        Camera::from_ints(rows).unwrap()
    }

    fn translated(tx: i64) -> Camera<Rational> {
        cam([[1, 0, 0, -tx], [0, 1, 0, 0], [0, 0, 1, 0]])
    }

    fn pair() -> CameraConfig<Rational> {
        CameraConfig::new(vec![translated(0), translated(-1)]).unwrap()
    }

    #[test]
    fn triangulates_the_generating_point() {
        let config = pair();
        let xi = HPoint3::from_ints([0, 0, 1, 1]);
        let corr = config.project(&xi).unwrap();
        assert_eq!(corr.points[0], HPoint2::from_ints([0, 0, 1]));
        assert_eq!(corr.points[1], HPoint2::from_ints([1, 0, 1]));
        assert!(membership_rank(&config, &corr, None).unwrap().on_joint_image);
        assert_eq!(triangulate(&config, &corr).unwrap(), xi);
        let off = Correspondence::new(vec![HPoint2::from_ints([0, 0, 1]), HPoint2::from_ints([1, 1, 1])]);
        let m = membership_rank(&config, &off, None).unwrap();
        assert_eq!(m, Membership { rank: 6, on_joint_image: false });
        assert!(matches!(triangulate(&config, &off), Err(GeomError::Precondition(_))));
    }

    #[test]
    fn baseline_points_are_ambiguous() {
        let config = CameraConfig::new(vec![translated(0), translated(-1), translated(-2)]).unwrap();
        assert!(centers_collinear(&config).unwrap());
        // the baseline direction (1,0,0) images to (1:0:0) in every view
        let corr = Correspondence::new(vec![HPoint2::from_ints([1, 0, 0]); 3]);
        assert!(membership_rank(&config, &corr, None).unwrap().on_joint_image);
        assert!(matches!(triangulate(&config, &corr), Err(GeomError::Degenerate(_))));
    }

    #[test]
    fn collinearity() {
        let c = CameraConfig::new(vec![translated(0), cam([[1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]), translated(3)]).unwrap();
        assert!(!centers_collinear(&c).unwrap());
        assert!(centers_collinear(&pair()).unwrap());
    }

    #[test]
    fn resection_round_trip_and_coplanar_rejection() {
        let p = cam([[2, -1, 0, 3], [1, 4, -2, 1], [0, 1, 1, -5]]);
        let world: Vec<_> = [[1, 2, 3, 1], [-2, 1, 5, 2], [3, 3, -1, 1], [0, 1, 7, 3], [4, -2, 2, 1], [1, 5, 1, -1], [2, 0, 9, 4]]
            .map(HPoint3::from_ints)
            .to_vec();
        let image: Vec<_> = world.iter().map(|x| p.project(x).unwrap()).collect();
        assert_eq!(resect(&world, &image).unwrap(), p);
        let identity = cam([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]);
        let image: Vec<_> = world.iter().map(|x| identity.project(x).unwrap()).collect();
        assert_eq!(resect(&world, &image).unwrap(), identity);
        let flat: Vec<_> = [[1, 2, 0, 1], [-2, 1, 0, 2], [3, 3, 0, 1], [0, 1, 0, 3], [4, -2, 0, 1], [1, 5, 0, -1]]
            .map(HPoint3::from_ints)
            .to_vec();
        let image: Vec<_> = flat.iter().map(|x| p.project(x).unwrap()).collect();
        assert!(matches!(resect(&flat, &image), Err(GeomError::Rank { .. })));
    }

    #[test]
    fn constraint_counts_and_vanishing() {
        let p3 = cam([[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        let config = CameraConfig::new(vec![translated(0), translated(-1), p3]).unwrap();
        let cons = constraint_polynomials(&config).unwrap();
        assert_eq!(cons.bilinear.len(), 3);
        assert_eq!(cons.trilinear.len(), 1);
        let corr = config.project(&HPoint3::from_ints([2, 3, 5, 7])).unwrap();
        assert!(cons.vanish_on(&corr));
        let off = Correspondence::new(vec![HPoint2::from_ints([1, 2, 3]); 3]);
        assert!(!cons.vanish_on(&off));
        let two = constraint_polynomials(&pair()).unwrap();
        assert_eq!((two.bilinear.len(), two.trilinear.len()), (1, 0));
    }

    #[test]
    fn homography_recovery() {
        let config = pair();
        let h0 = Homography::new(Mat::from_ints(&[[1, 2, 0, 0], [0, 1, 3, 0], [1, 0, 1, 1], [0, 0, 2, 1]])).unwrap();
        assert_eq!(recover_homography(&config, &config).unwrap(), Some(Homography::identity(4)));
        assert_eq!(recover_homography(&config, &config.transform(&h0)).unwrap(), Some(h0));
        let three_a = CameraConfig::new(vec![translated(0), translated(-1), translated(5)]).unwrap();
        let three_b = CameraConfig::new(vec![translated(0), translated(-1), cam([[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])]).unwrap();
        assert_eq!(recover_homography(&three_a, &three_b).unwrap(), None);
    }
}
