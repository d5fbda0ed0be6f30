//! Sparse multivariate polynomials and elimination for pairs of quadrics.

use std::collections::BTreeMap;

use crate::error::{degenerate, GeomError, Result};
use crate::matrix::Mat;
use crate::scalar::{ExactField, Field};

/// Polynomial in `nvars` variables; exponent vectors ordered lexicographically.
#[derive(Clone, Debug, PartialEq)]
pub struct MPoly<F> {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, F>,
}

impl<F: Field> MPoly<F> {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: F) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, F::one());
        p
    }

    /// Linear form `Σ cᵢ xᵢ`.
    pub fn linear(coeffs: &[F]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    /// Quadratic form `xᵀ S x` of a symmetric matrix.
    pub fn quadratic_form(s: &Mat<F>) -> Self {
        let n = s.rows();
        let mut p = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                let mut e = vec![0; n];
                e[i] += 1;
                e[j] += 1;
                p.add_term(e, s[(i, j)].clone());
            }
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &F)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> F {
        self.terms.get(exps).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            Some(d) => degs.all(|x| x == d),
            None => true,
        }
    }

    fn add_term(&mut self, e: Vec<u32>, c: F) {
        if c.is_zero() {
            return;
        }
        let next = match self.terms.remove(&e) {
            Some(old) => old + c,
            None => c,
        };
        if !next.is_zero() {
            self.terms.insert(e, next);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.nvars, o.nvars);
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-F::one()))
    }

    pub fn scale(&self, s: &F) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            p.add_term(e.clone(), c.clone() * s.clone());
        }
        p
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.nvars, o.nvars);
        let mut p = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1.clone() * c2.clone());
            }
        }
        p
    }

    pub fn eval(&self, x: &[F]) -> F {
        assert_eq!(x.len(), self.nvars);
        let mut acc = F::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t = t * xi.clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    fn leading(&self) -> Option<(&Vec<u32>, &F)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        assert_eq!(self.nvars, d.nvars);
        let (de, dc) = d.leading()?;
        let (de, dc) = (de.clone(), dc.clone());
        let mut rem = self.clone();
        let mut q = Self::zero(self.nvars);
        while let Some((re, rc)) = rem.leading() {
            if re.iter().zip(&de).any(|(a, b)| a < b) {
                return None;
            }
            let e: Vec<u32> = re.iter().zip(&de).map(|(a, b)| a - b).collect();
            let c = rc.clone() / dc.clone();
            let mut t = Self::zero(self.nvars);
            t.add_term(e, c);
            rem = rem.sub(&t.mul(d));
            q = q.add(&t);
        }
        Some(q)
    }
}

/// Eliminates one coordinate from two quadrics in four variables.
///
/// Coordinates are changed so that `direction` becomes the last basis vector
/// `s`; writing `qᵢ = aᵢs² + bᵢs + cᵢ` with `bᵢ, cᵢ` forms in the remaining three
/// coordinates `u`, the result is the Sylvester resultant in `s`, a quartic in `u`
/// whose zero set is the projection of `{q1 = q2 = 0}` from `direction`.
pub fn resultant_eliminate<F: ExactField>(q1: &Mat<F>, q2: &Mat<F>, direction: &[F]) -> Result<MPoly<F>> {
    for q in [q1, q2] {
        if q.rows() != 4 || q.cols() != 4 || !q.is_symmetric() {
            return Err(GeomError::Dimension("expected symmetric 4×4 quadrics".into()));
        }
    }
    if direction.len() != 4 {
        return Err(GeomError::Dimension("direction must have 4 coordinates".into()));
    }
    let pivot = (0..4)
        .find(|&k| !direction[k].is_zero())
        .ok_or_else(|| degenerate("zero direction"))?;
    // columns: e_j for j ≠ pivot, then the direction
    let others: Vec<usize> = (0..4).filter(|&j| j != pivot).collect();
    let t = Mat::from_fn(4, 4, |r, c| {
        if c < 3 {
            if r == others[c] {
                F::one()
            } else {
                F::zero()
            }
        } else {
            direction[r].clone()
        }
    });
    let parts = |q: &Mat<F>| {
        let m = t.transpose().mul(q).mul(&t);
        let a = m[(3, 3)].clone();
        let two = F::from_i64(2);
        let b = MPoly::linear(&[0, 1, 2].map(|j| m[(3, j)].clone() * two.clone()));
        let c = MPoly::quadratic_form(&m.submatrix(&[0, 1, 2], &[0, 1, 2]));
        (a, b, c)
    };
    let (a1, b1, c1) = parts(q1);
    let (a2, b2, c2) = parts(q2);
    if a1.is_zero() && a2.is_zero() {
        return Err(degenerate("direction is a common zero of both quadrics"));
    }
    let ac = c2.scale(&a1).sub(&c1.scale(&a2));
    let ab = b2.scale(&a1).sub(&b1.scale(&a2));
    let bc = b1.mul(&c2).sub(&b2.mul(&c1));
    let res = ac.mul(&ac).sub(&ab.mul(&bc));
    if res.is_zero() {
        return Err(degenerate("resultant vanishes identically"));
    }
    Ok(res)
}
