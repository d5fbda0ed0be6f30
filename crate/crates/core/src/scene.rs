//! Seeded generators for synthetic scenes: integer cameras, rational poses, calibrated
//! configurations and cone pairs.

use rand::Rng;

use crate::calibration::CalibratedConfig;
use crate::epipolar::Correspondence;
use crate::error::Result;
use crate::matrix::Mat;
use crate::multiview::CameraConfig;
use crate::projective::{project_space_conic, Camera, HPoint3, Homography, Quadric3, SpaceConic};
use crate::scalar::{rational, ExactField, Field, Gaussian, Rational};

/// Bound on integer entries drawn by the generators.
pub const ENTRY_BOUND: i64 = 9;

pub fn small_int(rng: &mut impl Rng) -> i64 {
    rng.gen_range(-ENTRY_BOUND..=ENTRY_BOUND)
}

fn nonzero_int(rng: &mut impl Rng) -> i64 {
    loop {
        let v = small_int(rng);
        if v != 0 {
            return v;
        }
    }
}

pub fn random_int_matrix<F: Field>(rng: &mut impl Rng, rows: usize, cols: usize) -> Mat<F> {
    Mat::from_fn(rows, cols, |_, _| F::from_i64(small_int(rng)))
}

pub fn random_camera<F: Field>(rng: &mut impl Rng) -> Camera<F> {
    loop {
        if let Ok(p) = Camera::new(random_int_matrix(rng, 3, 4)) {
            return p;
        }
    }
}

/// `n` integer cameras with pairwise distinct centers; for `n ≥ 3` the centers are also
/// not all collinear.
pub fn random_config<F: Field>(rng: &mut impl Rng, n: usize) -> CameraConfig<F> {
    loop {
        let config = CameraConfig::new((0..n).map(|_| random_camera(rng)).collect()).expect("nonempty");
        let collinear = n >= 3 && crate::multiview::centers_collinear(&config).unwrap_or(true);
        if config.is_general() && !collinear {
            return config;
        }
    }
}

pub fn random_point<F: Field>(rng: &mut impl Rng) -> HPoint3<F> {
    loop {
        let c: Vec<F> = (0..4).map(|_| F::from_i64(small_int(rng))).collect();
        if let Ok(x) = HPoint3::new(c) {
            return x;
        }
    }
}

pub fn random_homography<F: Field>(rng: &mut impl Rng, n: usize) -> Homography<F> {
    loop {
        if let Ok(h) = Homography::new(random_int_matrix(rng, n, n)) {
            return h;
        }
    }
}

fn random_rational(rng: &mut impl Rng) -> Rational {
    rational(small_int(rng), rng.gen_range(1..=ENTRY_BOUND))
}

/// Rational rotation from an integer quaternion (Euler–Rodrigues).
pub fn random_rotation<F: Field>(rng: &mut impl Rng) -> Mat<F> {
    let (a, b, c, d) = loop {
        let q = (small_int(rng), small_int(rng), small_int(rng), small_int(rng));
        if q != (0, 0, 0, 0) {
            break q;
        }
    };
    let n = a * a + b * b + c * c + d * d;
    let m = [
        [a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)],
        [2 * (b * c + a * d), a * a - b * b + c * c - d * d, 2 * (c * d - a * b)],
        [2 * (b * d - a * c), 2 * (c * d + a * b), a * a - b * b - c * c + d * d],
    ];
    let inv = F::from_rational(&rational(1, n));
    Mat::from_ints(&m).map(|x: &Rational| F::from_rational(x) * inv.clone())
}

/// Rational point on the unit sphere by inverse stereographic projection.
pub fn random_unit_vector<F: Field>(rng: &mut impl Rng) -> Vec<F> {
    let u = random_rational(rng);
    let v = random_rational(rng);
    let one = rational(1, 1);
    let s = u.clone() * u.clone() + v.clone() * v.clone();
    let den = s.clone() + one.clone();
    let two = rational(2, 1);
    [two.clone() * u / den.clone(), two * v / den.clone(), (s - one) / den]
        .iter()
        .map(F::from_rational)
        .collect()
}

/// `(1 - s², i(1 + s²), 2s)`, which has `a² + b² + c² = 0`.
pub fn random_isotropic_vector(rng: &mut impl Rng) -> Vec<Gaussian> {
    let s = random_rational(rng);
    let s2 = s.clone() * s.clone();
    let one = rational(1, 1);
    vec![
        Gaussian::real(one.clone() - s2.clone()),
        Gaussian::new(rational(0, 1), one + s2),
        Gaussian::real(rational(2, 1) * s),
    ]
}

/// A calibrated configuration whose space conic is the image of the absolute conic under a
/// random integer homography.
pub fn random_calibrated_config<F: ExactField>(rng: &mut impl Rng, n: usize) -> CalibratedConfig<F> {
    let h = random_homography::<F>(rng, 4);
    let conic = SpaceConic::absolute().transport(&h);
    loop {
        let config = random_config::<F>(rng, n);
        let off_plane = config.centers().iter().all(|c| !crate::matrix::dot(conic.plane(), c.coords()).is_zero());
        if !off_plane {
            continue;
        }
        let images = config
            .cameras()
            .iter()
            .map(|p| project_space_conic(p, &conic))
            .collect::<Result<Vec<_>>>()
            .expect("center off the plane");
        return CalibratedConfig::new(config, images, conic).expect("consistent by construction");
    }
}

/// `Aᵀ diag(d1, d2, d3, 0) A` with integer `A` invertible and `dᵢ ≠ 0`.
pub fn random_cone<F: Field>(rng: &mut impl Rng) -> Quadric3<F> {
    let a = random_homography::<F>(rng, 4);
    let d = Mat::diag(&[F::from_i64(nonzero_int(rng)), F::from_i64(nonzero_int(rng)), F::from_i64(nonzero_int(rng)), F::zero()]);
    Quadric3::new(a.matrix().transpose().mul(&d).mul(a.matrix())).expect("symmetric")
}

/// Two cones over a twisted cubic, with vertices at two distinct points of the curve, moved
/// by a random homography.
pub fn twisted_cubic_cones<F: ExactField>(rng: &mut impl Rng) -> (Quadric3<F>, Quadric3<F>) {
    // the net of quadrics through (s³, s²t, st², t³): xz - y², yw - z², xw - yz
    let net = [
        Mat::from_ints(&[[0, 0, 1, 0], [0, -2, 0, 0], [1, 0, 0, 0], [0, 0, 0, 0]]),
        Mat::from_ints(&[[0, 0, 0, 0], [0, 0, 0, 1], [0, 0, -2, 0], [0, 1, 0, 0]]),
        Mat::from_ints(&[[0, 0, 0, 1], [0, 0, -1, 0], [0, -1, 0, 0], [1, 0, 0, 0]]),
    ]
    .map(|m| m.map(|x: &Rational| F::from_rational(x)));
    let cone_at = |s: i64, t: i64| -> Quadric3<F> {
        let p: Vec<F> = [s * s * s, s * s * t, s * t * t, t * t * t].iter().map(|&v| F::from_i64(v)).collect();
        // a·Q_a p + b·Q_b p + c·Q_c p = 0
        let cols: Vec<Vec<F>> = net.iter().map(|q| q.mul_vec(&p)).collect();
        let system = Mat::from_fn(4, 3, |i, j| cols[j][i].clone());
        let k = system.null_space();
        assert_eq!(k.len(), 1, "cone through the cubic with a given vertex is unique");
        let m = net.iter().zip(&k[0]).fold(Mat::zeros(4, 4), |acc, (q, c)| acc.add(&q.scale(c)));
        Quadric3::new(m).expect("symmetric")
    };
    let (s1, t1) = (nonzero_int(rng), nonzero_int(rng));
    let (s2, t2) = loop {
        let (s, t) = (nonzero_int(rng), nonzero_int(rng));
        if s * t1 != t * s1 {
            break (s, t);
        }
    };
    let h = random_homography::<F>(rng, 4);
    (cone_at(s1, t1).congruence(&h), cone_at(s2, t2).congruence(&h))
}

/// A simulated scene: cameras, world points and their images.
#[derive(Clone, Debug)]
pub struct SimulatedScene<F> {
    pub config: CameraConfig<F>,
    pub points: Vec<HPoint3<F>>,
    pub correspondences: Vec<Correspondence<F>>,
}

pub fn simulate<F: Field>(rng: &mut impl Rng, views: usize, points: usize) -> SimulatedScene<F> {
    let config = random_config::<F>(rng, views);
    let mut world = Vec::with_capacity(points);
    let mut corrs = Vec::with_capacity(points);
    while world.len() < points {
        let x = random_point::<F>(rng);
        if let Ok(c) = config.project(&x) {
            world.push(x);
            corrs.push(c);
        }
    }
    SimulatedScene { config, points: world, correspondences: corrs }
}
