//! Univariate polynomials and binary forms, with exact root extraction in ℚ(i).
//!
//! Roots are found in two stages: float approximations (closed form up to degree
//! two, Aberth iteration above), then exact Newton refinement in ℚ(i) at doubling
//! dyadic precision followed by continued-fraction reconstruction. A candidate is
//! accepted only after exact substitution. Roots that do not lie in ℚ(i) are kept
//! as [`RootValue::Algebraic`]: a float approximation plus the exact factor they
//! are a root of.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed};

use crate::error::{GeomError, Result};
use crate::matrix::Mat;
use crate::scalar::{ExactField, Field, Gaussian, Rational};

/// Polynomial with coefficients in ascending degree order; no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<F> {
    coeffs: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(Field::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    /// `x − r`.
    pub fn linear_root(r: F) -> Self {
        Self::new(vec![-r, F::one()])
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> Option<&F> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &F) -> F {
        let mut acc = F::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * F::from_i64(i as i64))
                .collect(),
        )
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).cloned().unwrap_or_else(F::zero);
                    let b = o.coeffs.get(i).cloned().unwrap_or_else(F::zero);
                    a + b
                })
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-F::one()))
    }

    pub fn scale(&self, s: &F) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lc = d.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let Some(n) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if n < dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![F::zero(); n - dd + 1];
        for k in (0..=n - dd).rev() {
            let c = rem[k + dd].clone() / lc.clone();
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].clone() - c.clone() * dc.clone();
            }
            // the leading slot is cancelled exactly in exact towers; force it for floats
            rem[k + dd] = F::zero();
            q[k] = c;
        }
        rem.truncate(dd);
        (Self::new(q), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        match self.lc() {
            Some(lc) => {
                let inv = F::one() / lc.clone();
                self.scale(&inv)
            }
            None => Self::zero(),
        }
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = x.div_rem(&y).1;
            x = y;
            y = r;
        }
        x.monic()
    }

    /// Lagrange interpolation through `(xs[i], ys[i])` (Newton divided differences).
    pub fn interpolate(xs: &[F], ys: &[F]) -> Self {
        assert_eq!(xs.len(), ys.len());
        let n = xs.len();
        let mut dd = ys.to_vec();
        for j in 1..n {
            for i in (j..n).rev() {
                dd[i] = (dd[i].clone() - dd[i - 1].clone()) / (xs[i].clone() - xs[i - j].clone());
            }
        }
        let mut p = Self::constant(dd[n - 1].clone());
        for i in (0..n - 1).rev() {
            p = p.mul(&Self::linear_root(xs[i].clone())).add(&Self::constant(dd[i].clone()));
        }
        p
    }

    pub fn to_c64(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(Field::to_c64).collect()
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Poly<G> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<F: ExactField> Poly<F> {
    /// Yun's square-free decomposition: `p = c · Π fᵢ^i` with each `fᵢ` square-free,
    /// pairwise coprime, monic and non-constant. Returns `(fᵢ, i)`.
    pub fn squarefree_factors(&self) -> Vec<(Self, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let dp = self.derivative();
        let a0 = Self::gcd(self, &dp);
        let mut b = self.div_rem(&a0).0;
        let c = dp.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = Self::gcd(&b, &d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            let c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    pub fn to_gaussian(&self) -> Poly<Gaussian> {
        self.map(ExactField::to_gaussian)
    }

    /// Exact roots of a nonzero polynomial, grouped with multiplicity.
    pub fn roots(&self) -> Result<Vec<PolyRoot<F>>> {
        if self.is_zero() {
            return Err(GeomError::ZeroPolynomial);
        }
        let mut out = Vec::new();
        for (factor, mult) in self.squarefree_factors() {
            let (exact, leftover) = split_exact_roots(&factor);
            out.extend(exact.into_iter().map(|g| PolyRoot {
                value: RootValue::Exact(g),
                multiplicity: mult,
            }));
            if leftover.degree().unwrap_or(0) > 0 {
                for z in float_roots(&leftover.to_c64()) {
                    out.push(PolyRoot {
                        value: RootValue::Algebraic {
                            factor: leftover.clone(),
                            approx: z,
                        },
                        multiplicity: mult,
                    });
                }
            }
        }
        Ok(out)
    }
}

/// A root value: exactly in ℚ(i), or an approximation tagged with its exact defining factor.
#[derive(Clone, Debug, PartialEq)]
pub enum RootValue<F> {
    Exact(Gaussian),
    Algebraic { factor: Poly<F>, approx: Complex64 },
}

impl<F: Field> RootValue<F> {
    pub fn approx(&self) -> Complex64 {
        match self {
            RootValue::Exact(g) => g.to_c64(),
            RootValue::Algebraic { approx, .. } => *approx,
        }
    }

    pub fn exact(&self) -> Option<&Gaussian> {
        match self {
            RootValue::Exact(g) => Some(g),
            RootValue::Algebraic { .. } => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, RootValue::Exact(_))
    }

    /// Real-valued; decided exactly for exact roots, numerically otherwise.
    pub fn is_real(&self) -> bool {
        match self {
            RootValue::Exact(g) => g.is_real(),
            RootValue::Algebraic { approx, .. } => approx.im.abs() <= 1e-9 * (1.0 + approx.norm()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolyRoot<F> {
    pub value: RootValue<F>,
    pub multiplicity: usize,
}

/// Splits a square-free polynomial into its ℚ(i) roots and the cofactor over `F`.
fn split_exact_roots<F: ExactField>(s: &Poly<F>) -> (Vec<Gaussian>, Poly<F>) {
    let sg = s.to_gaussian();
    let mut found: Vec<Gaussian> = Vec::new();
    for z in float_roots(&s.to_c64()) {
        if let Some(r) = lift_root(&sg, z) {
            if !found.contains(&r) {
                found.push(r);
            }
        }
    }
    // Over a real tower, non-real roots come in conjugate pairs.
    if F::from_gaussian(&Gaussian::i()).is_none() {
        let conjugates: Vec<Gaussian> = found
            .iter()
            .filter(|g| !g.is_real())
            .map(Field::conj)
            .filter(|c| !found.contains(c))
            .collect();
        for c in conjugates {
            if sg.eval(&c).is_zero() {
                found.push(c);
            }
        }
    }
    let mut rest = sg;
    for r in &found {
        rest = rest.div_rem(&Poly::linear_root(r.clone())).0;
    }
    let leftover: Option<Vec<F>> = rest.coeffs().iter().map(F::from_gaussian).collect();
    match leftover {
        Some(c) => (found, Poly::new(c)),
        // unpaired non-real root over a real tower: report everything as algebraic
        None => (Vec::new(), s.clone()),
    }
}

fn to_dyadic(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

fn round_dyadic(x: &Rational, bits: u64) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = x * Rational::from_integer(scale.clone());
    let rounded = (scaled + Rational::new(BigInt::one(), BigInt::from(2))).floor();
    Rational::new(rounded.to_integer(), scale)
}

fn round_gaussian(z: &Gaussian, bits: u64) -> Gaussian {
    Gaussian::new(round_dyadic(&z.re, bits), round_dyadic(&z.im, bits))
}

/// Last two continued-fraction convergents of `x` with denominator at most `bound`.
fn convergents_within(x: &Rational, bound: &BigInt) -> Vec<Rational> {
    let (mut h1, mut h2) = (BigInt::one(), BigInt::from(0));
    let (mut k1, mut k2) = (BigInt::from(0), BigInt::one());
    let mut rest = x.clone();
    let mut out: Vec<Rational> = Vec::new();
    loop {
        let a = rest.floor().to_integer();
        let h = &a * &h1 + &h2;
        let k = &a * &k1 + &k2;
        if &k > bound {
            break;
        }
        out.push(Rational::new(h.clone(), k.clone()));
        let frac = &rest - Rational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rest = frac.recip();
        h2 = std::mem::replace(&mut h1, h);
        k2 = std::mem::replace(&mut k1, k);
    }
    let n = out.len();
    out.split_off(n.saturating_sub(2))
}

fn lcm_of_denominators(p: &Poly<Gaussian>) -> BigInt {
    p.coeffs()
        .iter()
        .flat_map(|c| [c.re.denom().clone(), c.im.denom().clone()])
        .fold(BigInt::one(), |acc, d| acc.lcm(&d))
}

/// Exact ℚ(i) root of the square-free `p` near `approx`, if there is one.
fn lift_root(p: &Poly<Gaussian>, approx: Complex64) -> Option<Gaussian> {
    let re = to_dyadic(approx.re)?;
    let im = to_dyadic(approx.im)?;
    let mut x = Gaussian::new(re, im);

    let integral = p.scale(&Gaussian::real(Rational::from_integer(lcm_of_denominators(p))));
    let lc = integral.lc()?;
    // lc·root is a Gaussian integer, so root denominators divide |lc|²
    let bound = lc.norm().to_integer().abs();
    let target_bits = 2 * bound.bits() + 8;

    let dp = p.derivative();
    let mut bits = 48u64;
    let mut extra = 0;
    for _ in 0..64 {
        let fx = p.eval(&x);
        if fx.is_zero() {
            return Some(x);
        }
        let dfx = dp.eval(&x);
        if dfx.is_zero() {
            return None;
        }
        x = round_gaussian(&(x.clone() - fx / dfx), bits);
        if bits >= target_bits {
            extra += 1;
            if extra >= 2 {
                break;
            }
        }
        bits = (bits * 2).min(target_bits);
    }
    let res = convergents_within(&x.re, &bound);
    let ims = convergents_within(&x.im, &bound);
    for r in res.iter().rev() {
        for i in ims.iter().rev() {
            let cand = Gaussian::new(r.clone(), i.clone());
            if p.eval(&cand).is_zero() {
                return Some(cand);
            }
        }
    }
    None
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All complex roots (with repetition) of a polynomial given by ascending coefficients.
pub fn float_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|z| z.norm() == 0.0) {
        c.pop();
    }
    let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if c.len() <= 1 || scale == 0.0 {
        return Vec::new();
    }
    let c: Vec<Complex64> = c.iter().map(|z| z / scale).collect();
    let n = c.len() - 1;
    match n {
        1 => return vec![-c[0] / c[1]],
        2 => return quadratic_roots(c[2], c[1], c[0]).to_vec(),
        _ => {}
    }
    // Aberth-Ehrlich with starting points on a circle of the Cauchy radius.
    let lead = c[n];
    let radius = 1.0 + c[..n].iter().map(|z| (z / lead).norm()).fold(0.0, f64::max);
    let radius = radius.min(1e6).max(1e-6);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(radius * 0.5, theta)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = horner(&c, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    sum += 1.0 / (z[k] - z[j]);
                }
            }
            let step = ratio / (1.0 - ratio * sum);
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

fn quadratic_roots(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 2] {
    let disc = (b * b - 4.0 * a * c).sqrt();
    // pick the sign that avoids cancellation
    let q = if (b.conj() * disc).re >= 0.0 {
        -0.5 * (b + disc)
    } else {
        -0.5 * (b - disc)
    };
    if q.norm() == 0.0 {
        return [Complex64::new(0.0, 0.0); 2];
    }
    [q / a, c / q]
}

/// A float root with multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloatRoot {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// Roots of `c3·x³ + c2·x² + c1·x + c0` in an exact tower.
pub fn solve_cubic<F: ExactField>(c: [F; 4]) -> Result<Vec<PolyRoot<F>>> {
    let [c3, c2, c1, c0] = c;
    Poly::new(vec![c0, c1, c2, c3]).roots()
}

/// Closed-form (Cardano) roots of a float cubic, Newton-polished, clustered by multiplicity.
pub fn solve_cubic_f64(c: [f64; 4]) -> Result<Vec<FloatRoot>> {
    if c.iter().any(|x| !x.is_finite()) {
        return Err(GeomError::NonFinite);
    }
    let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Err(GeomError::ZeroPolynomial);
    }
    let [a, b, cc, d] = c.map(|x| Complex64::new(x / scale, 0.0));
    let asc = [d, cc, b, a];
    let raw: Vec<Complex64> = if a.norm() <= 1e-14 {
        float_roots(&asc)
    } else {
        let d0 = b * b - 3.0 * a * cc;
        let d1 = 2.0 * b * b * b - 9.0 * a * b * cc + 27.0 * a * a * d;
        let sq = (d1 * d1 - 4.0 * d0 * d0 * d0).sqrt();
        let p = (d1 + sq) / 2.0;
        let m = (d1 - sq) / 2.0;
        let big = if p.norm() >= m.norm() { p } else { m };
        if big.norm() <= 1e-300 {
            vec![-b / (3.0 * a); 3]
        } else {
            let cr = big.powf(1.0 / 3.0);
            let xi = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
            (0..3)
                .map(|k| {
                    let ck = cr * xi.powu(k);
                    -(b + ck + d0 / ck) / (3.0 * a)
                })
                .collect()
        }
    };
    let polished: Vec<Complex64> = raw
        .into_iter()
        .map(|mut z| {
            for _ in 0..3 {
                let (p, dp) = horner(&asc, z);
                if dp.norm() == 0.0 {
                    break;
                }
                let next = z - p / dp;
                if horner(&asc, next).0.norm() < p.norm() {
                    z = next;
                } else {
                    break;
                }
            }
            z
        })
        .collect();
    Ok(cluster(polished))
}

fn cluster(roots: Vec<Complex64>) -> Vec<FloatRoot> {
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for z in roots {
        match out
            .iter_mut()
            .find(|(w, _)| (*w - z).norm() <= 1e-6 * (1.0 + z.norm()))
        {
            Some((w, m)) => {
                *w = (*w * *m as f64 + z) / (*m as f64 + 1.0);
                *m += 1;
            }
            None => out.push((z, 1)),
        }
    }
    out.into_iter()
        .map(|(value, multiplicity)| FloatRoot { value, multiplicity })
        .collect()
}

/// Binary form `c₀λᵈ + c₁λᵈ⁻¹μ + … + c_d μᵈ`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryForm<F> {
    coeffs: Vec<F>,
}

/// A root `(λ : μ)` of a binary form.
#[derive(Clone, Debug, PartialEq)]
pub enum ProjectiveRoot<F> {
    /// `(1 : 0)`.
    Infinity,
    /// `(x : 1)`.
    Finite(RootValue<F>),
}

impl<F: Field> ProjectiveRoot<F> {
    /// Homogeneous coordinates `(λ, μ)` when exact.
    pub fn exact_coords(&self) -> Option<(Gaussian, Gaussian)> {
        match self {
            ProjectiveRoot::Infinity => Some((Gaussian::from_ints(1, 0), Gaussian::from_ints(0, 0))),
            ProjectiveRoot::Finite(RootValue::Exact(g)) => Some((g.clone(), Gaussian::from_ints(1, 0))),
            ProjectiveRoot::Finite(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FormRoot<F> {
    pub root: ProjectiveRoot<F>,
    pub multiplicity: usize,
}

impl<F: Field> BinaryForm<F> {
    /// Coefficients `c₀..c_d` for `λᵈ, λᵈ⁻¹μ, …, μᵈ`.
    pub fn new(coeffs: Vec<F>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(GeomError::Dimension("binary form needs degree+1 coefficients".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Field::is_zero)
    }

    pub fn eval(&self, lambda: &F, mu: &F) -> F {
        let d = self.degree();
        let mut acc = F::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            let mut term = c.clone();
            for _ in 0..d - k {
                term = term * lambda.clone();
            }
            for _ in 0..k {
                term = term * mu.clone();
            }
            acc = acc + term;
        }
        acc
    }

    /// `f(x, 1)` and the multiplicity of the root `(1 : 0)`.
    pub fn dehomogenize(&self) -> (Poly<F>, usize) {
        let p = Poly::new(self.coeffs.iter().rev().cloned().collect());
        let inf = match p.degree() {
            Some(d) => self.degree() - d,
            None => self.degree(),
        };
        (p, inf)
    }

    fn from_dehomogenized(p: &Poly<F>, degree: usize) -> Self {
        let mut coeffs = vec![F::zero(); degree + 1];
        for (j, c) in p.coeffs().iter().enumerate() {
            coeffs[degree - j] = c.clone();
        }
        Self { coeffs }
    }

    /// `det(λA + μB)` for square `A`, `B`, as a form of degree `n`.
    pub fn pencil_det(a: &Mat<F>, b: &Mat<F>) -> Self {
        let n = a.rows();
        let xs: Vec<F> = (0..=n as i64).map(F::from_i64).collect();
        let ys: Vec<F> = xs.iter().map(|x| a.lin_comb(x, b, &F::one()).det()).collect();
        Self::from_dehomogenized(&Poly::interpolate(&xs, &ys), n)
    }

    /// Greatest common divisor as a binary form.
    pub fn gcd(&self, other: &Self) -> Self {
        let (p, ip) = self.dehomogenize();
        let (q, iq) = other.dehomogenize();
        let g = Poly::gcd(&p, &q);
        if g.is_zero() {
            // both forms vanish identically
            return self.clone();
        }
        let inf = if self.is_zero() {
            iq
        } else if other.is_zero() {
            ip
        } else {
            ip.min(iq)
        };
        let d = g.degree().unwrap_or(0) + inf;
        Self::from_dehomogenized(&g, d)
    }
}

impl<F: ExactField> BinaryForm<F> {
    /// Roots `(λ : μ)` with multiplicities summing to the degree.
    pub fn roots(&self) -> Result<Vec<FormRoot<F>>> {
        if self.is_zero() {
            return Err(GeomError::ZeroPolynomial);
        }
        let (p, inf) = self.dehomogenize();
        let mut out = Vec::new();
        if inf > 0 {
            out.push(FormRoot {
                root: ProjectiveRoot::Infinity,
                multiplicity: inf,
            });
        }
        if p.degree().unwrap_or(0) > 0 {
            for r in p.roots()? {
                out.push(FormRoot {
                    root: ProjectiveRoot::Finite(r.value),
                    multiplicity: r.multiplicity,
                });
            }
        }
        Ok(out)
    }
}

/// Root structure of a binary quartic: each root `(λ : μ)` with its multiplicity.
pub fn quartic_root_structure<F: ExactField>(f: &BinaryForm<F>) -> Result<Vec<FormRoot<F>>> {
    if f.degree() != 4 {
        return Err(GeomError::Dimension(format!("expected a quartic, got degree {}", f.degree())));
    }
    f.roots()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn q(n: i64) -> Rational {
        rational(n, 1)
    }

    fn exact_values(roots: &[PolyRoot<Rational>]) -> Vec<(Gaussian, usize)> {
        let mut v: Vec<(Gaussian, usize)> = roots
            .iter()
            .map(|r| (r.value.exact().cloned().expect("exact root"), r.multiplicity))
            .collect();
        v.sort_by(|a, b| a.0.to_c64().re.total_cmp(&b.0.to_c64().re));
        v
    }

    #[test]
    fn cubic_x3_minus_x() {
        let roots = solve_cubic([q(1), q(0), q(-1), q(0)]).unwrap();
        let v = exact_values(&roots);
        assert_eq!(
            v,
            vec![
                (Gaussian::from_ints(-1, 0), 1),
                (Gaussian::from_ints(0, 0), 1),
                (Gaussian::from_ints(1, 0), 1)
            ]
        );
    }

    #[test]
    fn cubic_triple_zero() {
        let roots = solve_cubic([q(1), q(0), q(0), q(0)]).unwrap();
        assert_eq!(exact_values(&roots), vec![(Gaussian::from_ints(0, 0), 3)]);
        let f = solve_cubic_f64([1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].multiplicity, 3);
    }

    #[test]
    fn cubic_zero_is_error() {
        assert_eq!(solve_cubic([q(0), q(0), q(0), q(0)]).unwrap_err(), GeomError::ZeroPolynomial);
        assert_eq!(solve_cubic_f64([0.0; 4]).unwrap_err(), GeomError::ZeroPolynomial);
    }

    #[test]
    fn float_cubic_residuals() {
        for c in [[1.0, -6.0, 11.0, -6.0], [2.0, 0.5, -3.0, 7.0], [1.0, 0.0, 1.0, 0.0]] {
            let roots = solve_cubic_f64(c).unwrap();
            let total: usize = roots.iter().map(|r| r.multiplicity).sum();
            assert_eq!(total, 3);
            let maxc = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let asc: Vec<Complex64> = c.iter().rev().map(|&x| Complex64::new(x, 0.0)).collect();
            for r in roots {
                assert!(horner(&asc, r.value).0.norm() < 1e-9 * maxc);
            }
        }
    }

    #[test]
    fn gaussian_and_irrational_roots() {
        // x² + 1 over ℚ: both roots lie in ℚ(i)
        let p = Poly::new(vec![q(1), q(0), q(1)]);
        let mut roots: Vec<Gaussian> = p.roots().unwrap().iter().map(|r| r.value.exact().unwrap().clone()).collect();
        roots.sort_by(|a, b| a.im.cmp(&b.im));
        assert_eq!(roots, vec![Gaussian::from_ints(0, -1), Gaussian::from_ints(0, 1)]);
        // (x - 1/3)(x² - 2): one exact root, two algebraic ones with the exact cofactor
        let p = Poly::new(vec![q(2), q(-6), q(-1), q(3)]).scale(&rational(1, 3));
        let roots = p.roots().unwrap();
        let exact: Vec<_> = roots.iter().filter(|r| r.value.is_exact()).collect();
        assert_eq!(exact.len(), 1);
        assert_eq!(exact[0].value.exact().unwrap(), &Gaussian::real(rational(1, 3)));
        for r in roots.iter().filter(|r| !r.value.is_exact()) {
            let RootValue::Algebraic { factor, approx } = &r.value else { unreachable!() };
            assert_eq!(factor.monic(), Poly::new(vec![q(-2), q(0), q(1)]));
            assert!((approx.norm() - 2f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn large_rational_root_is_recovered() {
        // root 123456789/987654321 with huge cofactor coefficients
        let r = Rational::new(BigInt::from(123456789), BigInt::from(987654321i64));
        let other = Poly::new(vec![q(7), q(-3), q(1000003)]);
        let p = Poly::linear_root(r.clone()).mul(&other);
        let roots = p.roots().unwrap();
        assert!(roots.iter().any(|x| x.value.exact() == Some(&Gaussian::real(r.clone()))));
    }

    #[test]
    fn gaussian_coefficient_roots() {
        // (x - (1+2i))(x - 3i/5)(x + 1)
        let a = Gaussian::new(q(1), q(2));
        let b = Gaussian::new(q(0), rational(3, 5));
        let p = Poly::linear_root(a.clone())
            .mul(&Poly::linear_root(b.clone()))
            .mul(&Poly::linear_root(Gaussian::from_ints(-1, 0)));
        let roots = p.roots().unwrap();
        assert_eq!(roots.len(), 3);
        for want in [a, b, Gaussian::from_ints(-1, 0)] {
            assert!(roots.iter().any(|r| r.value.exact() == Some(&want)));
        }
    }

    #[test]
    fn yun_multiplicities() {
        // (x-1)^2 (x+2)^3 x
        let p = Poly::linear_root(q(1))
            .mul(&Poly::linear_root(q(1)))
            .mul(&Poly::linear_root(q(-2)))
            .mul(&Poly::linear_root(q(-2)))
            .mul(&Poly::linear_root(q(-2)))
            .mul(&Poly::linear_root(q(0)));
        let v = exact_values(&p.roots().unwrap());
        assert_eq!(
            v,
            vec![
                (Gaussian::from_ints(-2, 0), 3),
                (Gaussian::from_ints(0, 0), 1),
                (Gaussian::from_ints(1, 0), 2)
            ]
        );
    }

    #[test]
    fn quartic_examples() {
        // λμ(λ−μ)(λ+μ) = λ³μ − λμ³
        let f = BinaryForm::new(vec![q(0), q(1), q(0), q(-1), q(0)]).unwrap();
        let roots = quartic_root_structure(&f).unwrap();
        assert_eq!(roots.len(), 4);
        assert!(roots.iter().all(|r| r.multiplicity == 1));
        assert!(roots.iter().any(|r| r.root == ProjectiveRoot::Infinity));
        // λ²μ²
        let f = BinaryForm::new(vec![q(0), q(0), q(1), q(0), q(0)]).unwrap();
        let roots = quartic_root_structure(&f).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| r.multiplicity == 2));
        let zero = BinaryForm::new(vec![q(0); 5]).unwrap();
        assert_eq!(quartic_root_structure(&zero).unwrap_err(), GeomError::ZeroPolynomial);
    }

    #[test]
    fn pencil_det_of_two_cones() {
        // X²+Y²+Z² and Y²+Z²+W²: det(λA+μB) = λμ(λ+μ)²
        let a: Mat<Rational> = Mat::diag(&[q(1), q(1), q(1), q(0)]);
        let b: Mat<Rational> = Mat::diag(&[q(0), q(1), q(1), q(1)]);
        let f = BinaryForm::pencil_det(&a, &b);
        assert_eq!(f.coeffs(), &[q(0), q(1), q(2), q(1), q(0)]);
    }

    #[test]
    fn form_gcd_tracks_infinity() {
        // λ²μ and λμ(λ+μ) share λμ
        let a = BinaryForm::new(vec![q(0), q(1), q(0), q(0)]).unwrap();
        let b = BinaryForm::new(vec![q(0), q(1), q(1), q(0)]).unwrap();
        let g = a.gcd(&b);
        assert_eq!(g.degree(), 2);
        assert!(g.eval(&q(1), &q(0)).is_zero());
        assert!(g.eval(&q(0), &q(1)).is_zero());
        assert!(!g.eval(&q(1), &q(1)).is_zero());
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = Poly::new(vec![q(3), q(-1), q(0), q(2)]);
        let xs: Vec<Rational> = (0..4).map(q).collect();
        let ys: Vec<Rational> = xs.iter().map(|x| p.eval(x)).collect();
        assert_eq!(Poly::interpolate(&xs, &ys), p);
    }
}
