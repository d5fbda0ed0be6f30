//! Dense small matrices over any [`Field`], plus the float-only factorizations
//! (SVD, RQ, Cholesky) backed by nalgebra.

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;

use crate::error::{GeomError, Result};
use crate::scalar::{Field, DEFAULT_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F> Index<(usize, usize)> for Mat<F> {
    type Output = F;
    fn index(&self, (r, c): (usize, usize)) -> &F {
        &self.data[r * self.cols + c]
    }
}

impl<F> IndexMut<(usize, usize)> for Mat<F> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut F {
        &mut self.data[r * self.cols + c]
    }
}

impl<F: Field> Mat<F> {
    pub fn new(rows: usize, cols: usize, data: Vec<F>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(GeomError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(GeomError::Dimension("ragged rows".into()));
        }
        Self::new(n, m, rows.into_iter().flatten().collect())
    }

    /// Convenience constructor from integer rows; panics on ragged input.
    pub fn from_ints<const C: usize>(rows: &[[i64; C]]) -> Self {
        Self::from_fn(rows.len(), C, |r, c| F::from_i64(rows[r][c]))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| F::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { F::one() } else { F::zero() })
    }

    pub fn diag(entries: &[F]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |r, c| if r == c { entries[r].clone() } else { F::zero() })
    }

    pub fn column(v: &[F]) -> Self {
        Self::from_fn(v.len(), 1, |r, _| v[r].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[F] {
        &self.data
    }

    pub fn row(&self, r: usize) -> Vec<F> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn col(&self, c: usize) -> Vec<F> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn map<G>(&self, f: impl Fn(&F) -> G) -> Mat<G> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn mul(&self, other: &Mat<F>) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        Self::from_fn(self.rows, other.cols, |r, c| {
            let mut acc = F::zero();
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                acc = acc + a.clone() * other[(k, c)].clone();
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|r| dot(&self.data[r * self.cols..(r + 1) * self.cols], v))
            .collect()
    }

    /// `vᵀ · self` for a row vector `v`.
    pub fn left_mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.rows, v.len(), "vector-matrix shape mismatch");
        (0..self.cols)
            .map(|c| {
                let mut acc = F::zero();
                for r in 0..self.rows {
                    acc = acc + v[r].clone() * self[(r, c)].clone();
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Mat<F>) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |r, c| {
            self[(r, c)].clone() + other[(r, c)].clone()
        })
    }

    pub fn sub(&self, other: &Mat<F>) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |r, c| {
            self[(r, c)].clone() - other[(r, c)].clone()
        })
    }

    pub fn scale(&self, s: &F) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    /// `a·self + b·other`.
    pub fn lin_comb(&self, a: &F, other: &Mat<F>, b: &F) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |r, c| {
            a.clone() * self[(r, c)].clone() + b.clone() * other[(r, c)].clone()
        })
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |r, c| self[(rows[r], cols[c])].clone())
    }

    pub fn hstack(&self, other: &Mat<F>) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self[(r, c)].clone()
            } else {
                other[(r, c - self.cols)].clone()
            }
        })
    }

    pub fn vstack(&self, other: &Mat<F>) -> Self {
        assert_eq!(self.cols, other.cols);
        Self::from_fn(self.rows + other.rows, self.cols, |r, c| {
            if r < self.rows {
                self[(r, c)].clone()
            } else {
                other[(r - self.rows, c)].clone()
            }
        })
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        let scale = self.max_magnitude();
        self.data.iter().all(|x| x.is_zero()) || (!F::EXACT && scale == 0.0)
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.max_magnitude().max(f64::MIN_POSITIVE);
        (0..self.rows).all(|r| {
            (r + 1..self.cols).all(|c| {
                let d = self[(r, c)].clone() - self[(c, r)].clone();
                if F::EXACT {
                    d.is_zero()
                } else {
                    d.magnitude() <= 1e-12 * scale
                }
            })
        })
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(Field::magnitude).fold(0.0, f64::max)
    }

    /// Determinant by Gaussian elimination (partial pivoting on magnitude).
    pub fn det(&self) -> F {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = F::one();
        for k in 0..n {
            let Some(p) = pivot_row(&a, k, k) else {
                return F::zero();
            };
            if p != k {
                a.swap_rows(p, k);
                det = -det;
            }
            let pivot = a[(k, k)].clone();
            det = det * pivot.clone();
            for r in k + 1..n {
                if a[(r, k)].is_zero() {
                    continue;
                }
                let f = a[(r, k)].clone() / pivot.clone();
                for c in k..n {
                    let v = a[(r, c)].clone() - f.clone() * a[(k, c)].clone();
                    a[(r, c)] = v;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan; `None` when singular (exactly, or numerically in float mode).
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let scale = self.max_magnitude();
        let mut a = self.hstack(&Mat::identity(n));
        for k in 0..n {
            let p = pivot_row(&a, k, k)?;
            if F::negligible(&a[(p, k)], scale) {
                return None;
            }
            a.swap_rows(p, k);
            let pivot = a[(k, k)].clone();
            for c in 0..2 * n {
                let v = a[(k, c)].clone() / pivot.clone();
                a[(k, c)] = v;
            }
            for r in 0..n {
                if r == k || a[(r, k)].is_zero() {
                    continue;
                }
                let f = a[(r, k)].clone();
                for c in 0..2 * n {
                    let v = a[(r, c)].clone() - f.clone() * a[(k, c)].clone();
                    a[(r, c)] = v;
                }
            }
        }
        Some(a.submatrix(&(0..n).collect::<Vec<_>>(), &(n..2 * n).collect::<Vec<_>>()))
    }

    /// Rank with the tower's default tolerance (exact towers ignore it).
    pub fn rank(&self) -> usize {
        F::rank_impl(self, DEFAULT_TOL)
    }

    /// Basis of the right kernel with the tower's default tolerance.
    pub fn null_space(&self) -> Vec<Vec<F>> {
        F::null_space_impl(self, DEFAULT_TOL)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

/// Row index `>= start` with the largest-magnitude nonzero entry in column `col`.
fn pivot_row<F: Field>(a: &Mat<F>, start: usize, col: usize) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for r in start..a.rows {
        let x = &a[(r, col)];
        if x.is_zero() {
            continue;
        }
        let m = x.magnitude();
        if F::EXACT {
            // exact towers only need a nonzero pivot; keep the first for determinism
            return Some(r);
        }
        if best.map_or(true, |(_, bm)| m > bm) {
            best = Some((r, m));
        }
    }
    best.map(|(r, _)| r)
}

pub fn dot<F: Field>(a: &[F], b: &[F]) -> F {
    assert_eq!(a.len(), b.len());
    let mut acc = F::zero();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        acc = acc + x.clone() * y.clone();
    }
    acc
}

pub fn cross<F: Field>(a: &[F], b: &[F]) -> [F; 3] {
    [
        a[1].clone() * b[2].clone() - a[2].clone() * b[1].clone(),
        a[2].clone() * b[0].clone() - a[0].clone() * b[2].clone(),
        a[0].clone() * b[1].clone() - a[1].clone() * b[0].clone(),
    ]
}

/// Cross-product matrix `[t]×`, so that `[t]× v = t × v`.
pub fn skew<F: Field>(t: &[F]) -> Mat<F> {
    let z = F::zero;
    Mat::from_rows(vec![
        vec![z(), -t[2].clone(), t[1].clone()],
        vec![t[2].clone(), z(), -t[0].clone()],
        vec![-t[1].clone(), t[0].clone(), z()],
    ])
    .expect("3x3")
}

/// Whether two vectors are proportional (all 2×2 minors vanish).
///
/// Exact towers decide exactly; floats compare minors against the product of norms.
pub fn proportional<F: Field>(a: &[F], b: &[F]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let na = a.iter().map(|x| x.magnitude().powi(2)).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x.magnitude().powi(2)).sum::<f64>().sqrt();
    let scale = na * nb;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let m = a[i].clone() * b[j].clone() - a[j].clone() * b[i].clone();
            if !F::negligible(&m, scale) {
                return false;
            }
        }
    }
    true
}

/// Scales a nonzero vector so its first nonzero entry is one.
pub fn normalize_vec<F: Field>(v: &[F]) -> Vec<F> {
    let scale = v.iter().map(Field::magnitude).fold(0.0, f64::max);
    match v.iter().find(|x| !F::negligible(x, scale) && !x.is_zero()) {
        Some(p) => {
            let p = p.clone();
            v.iter().map(|x| x.clone() / p.clone()).collect()
        }
        None => v.to_vec(),
    }
}

/// Rank of `m`. Exact towers ignore `tol`; float mode requires it and counts singular
/// values above `tol · σ_max`.
pub fn rank<F: Field>(m: &Mat<F>, tol: Option<f64>) -> Result<usize> {
    if F::EXACT {
        return Ok(F::rank_impl(m, 0.0));
    }
    match tol {
        Some(t) if t > 0.0 => Ok(F::rank_impl(m, t)),
        _ => Err(GeomError::MissingTolerance),
    }
}

/// Basis of `{v : m v = 0}`; exact towers only (float callers use [`svd`]).
pub fn null_space<F: Field>(m: &Mat<F>) -> Result<Vec<Vec<F>>> {
    if !F::EXACT {
        return Err(GeomError::Precondition(
            "exact null space requested for float matrix; use svd".into(),
        ));
    }
    Ok(exact_null_space(m))
}

/// Reduced row echelon form; returns the pivot columns.
fn rref<F: Field>(m: &Mat<F>) -> (Mat<F>, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = pivot_row(&a, row, col) else {
            continue;
        };
        a.swap_rows(p, row);
        let pivot = a[(row, col)].clone();
        for c in col..a.cols {
            let v = a[(row, c)].clone() / pivot.clone();
            a[(row, c)] = v;
        }
        for r in 0..a.rows {
            if r == row || a[(r, col)].is_zero() {
                continue;
            }
            let f = a[(r, col)].clone();
            for c in col..a.cols {
                let v = a[(r, c)].clone() - f.clone() * a[(row, c)].clone();
                a[(r, c)] = v;
            }
        }
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

pub(crate) fn exact_rank<F: Field>(m: &Mat<F>) -> usize {
    rref(m).1.len()
}

pub(crate) fn exact_null_space<F: Field>(m: &Mat<F>) -> Vec<Vec<F>> {
    let (r, pivots) = rref(m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![F::zero(); m.cols];
            v[f] = F::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[(row, f)].clone();
            }
            v
        })
        .collect()
}

/// Singular value decomposition `M = U · diag(σ) · Vᵀ` with `σ` sorted descending.
///
/// `U` is `rows × k`, `V` is `cols × k` where `k = min(rows, cols)`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: Mat<f64>,
    pub singular_values: Vec<f64>,
    pub v: Mat<f64>,
}

fn to_dmatrix(m: &Mat<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows, m.cols, &m.data)
}

fn from_dmatrix(m: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
}

pub fn svd(m: &Mat<f64>) -> Result<Svd> {
    if m.data.iter().any(|x| !x.is_finite()) {
        return Err(GeomError::NonFinite);
    }
    let d = to_dmatrix(m).svd(true, true);
    let u = d.u.expect("requested U");
    let vt = d.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..d.singular_values.len()).collect();
    order.sort_by(|&a, &b| d.singular_values[b].total_cmp(&d.singular_values[a]));
    let k = order.len();
    Ok(Svd {
        u: Mat::from_fn(m.rows, k, |r, c| u[(r, order[c])]),
        singular_values: order.iter().map(|&i| d.singular_values[i]).collect(),
        v: Mat::from_fn(m.cols, k, |r, c| vt[(order[c], r)]),
    })
}

/// Full right-singular basis for an `m × n` matrix (pads with zero rows when `m < n`).
fn full_right_svd(m: &Mat<f64>) -> Result<Svd> {
    if m.rows >= m.cols {
        return svd(m);
    }
    let padded = m.vstack(&Mat::zeros(m.cols - m.rows, m.cols));
    svd(&padded)
}

pub(crate) fn float_rank(m: &Mat<f64>, tol: f64) -> usize {
    match svd(m) {
        Ok(s) => {
            let top = s.singular_values.first().copied().unwrap_or(0.0);
            if top == 0.0 {
                return 0;
            }
            s.singular_values.iter().filter(|&&x| x > tol * top).count()
        }
        Err(_) => 0,
    }
}

pub(crate) fn float_null_space(m: &Mat<f64>, tol: f64) -> Vec<Vec<f64>> {
    let Ok(s) = full_right_svd(m) else {
        return Vec::new();
    };
    let top = s.singular_values.first().copied().unwrap_or(0.0);
    (0..s.singular_values.len())
        .filter(|&i| top == 0.0 || s.singular_values[i] <= tol * top)
        .map(|i| s.v.col(i))
        .collect()
}

/// Result of [`rq_decompose`]: `M ∝ K · R` with a positive scale.
#[derive(Clone, Debug)]
pub struct Rq {
    /// Upper triangular, positive diagonal, `K[2][2] = 1`.
    pub k: Mat<f64>,
    /// Orthogonal; `det R = sign(det M)`.
    pub r: Mat<f64>,
    /// Set when `det R = −1` (the input had negative determinant).
    pub reflection: bool,
}

/// RQ factorization of an invertible 3×3 matrix.
pub fn rq_decompose(m: &Mat<f64>) -> Result<Rq> {
    if m.rows != 3 || m.cols != 3 {
        return Err(GeomError::Dimension("rq_decompose expects 3x3".into()));
    }
    let s = svd(m)?;
    if s.singular_values[0] == 0.0 || s.singular_values[2] <= 1e-12 * s.singular_values[0] {
        return Err(GeomError::Singular);
    }
    // Flip rows/cols so a QR of (J M)ᵀ yields the RQ of M.
    let flip = |a: &Mat<f64>| Mat::from_fn(3, 3, |r, c| a[(2 - r, 2 - c)]);
    let jm_t = Mat::from_fn(3, 3, |r, c| m[(2 - c, r)]);
    let qr = to_dmatrix(&jm_t).qr();
    let q = from_dmatrix(&qr.q());
    let u = from_dmatrix(&qr.r());
    let mut k = flip(&u.transpose());
    let q_t = q.transpose();
    let mut r = Mat::from_fn(3, 3, |i, j| q_t[(2 - i, j)]);
    for i in 0..3 {
        if k[(i, i)] < 0.0 {
            for row in 0..3 {
                k[(row, i)] = -k[(row, i)];
            }
            for col in 0..3 {
                r[(i, col)] = -r[(i, col)];
            }
        }
    }
    let k22 = k[(2, 2)];
    let k = k.map(|x| x / k22);
    let reflection = r.det() < 0.0;
    Ok(Rq { k, r, reflection })
}

/// Upper-triangular `K` with positive diagonal and `S = K · Kᵀ`, normalized to `K[2][2] = 1`
/// for 3×3 inputs. Fails unless `S` is symmetric positive definite.
pub fn cholesky_upper(s: &Mat<f64>) -> Result<Mat<f64>> {
    let n = s.rows;
    if !s.is_square() {
        return Err(GeomError::Dimension("cholesky expects a square matrix".into()));
    }
    // J S J = L Lᵀ with L lower triangular ⇒ S = (J L J)(J L J)ᵀ
    let js = Mat::from_fn(n, n, |r, c| s[(n - 1 - r, n - 1 - c)]);
    let l = to_dmatrix(&js)
        .cholesky()
        .ok_or_else(|| GeomError::Precondition("matrix is not positive definite".into()))?
        .l();
    let k = Mat::from_fn(n, n, |r, c| l[(n - 1 - r, n - 1 - c)]);
    let last = k[(n - 1, n - 1)];
    Ok(k.map(|x| x / last))
}
