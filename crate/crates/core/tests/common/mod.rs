//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use mvlab_core::matrix::Mat;
use mvlab_core::multipoly::resultant_eliminate;
use mvlab_core::poly::Poly;
use mvlab_core::projective::{Camera, Quadric3};
use mvlab_core::scalar::{rational, Field, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(v: i64) -> Rational {
    rational(v, 1)
}

/// Fundamental form from the textbook recipe `[e₂]ₓ P₂ P₁⁺`, transposed so that the first
/// argument is the view-1 point.
pub fn fundamental_oracle(p1: &Camera<Rational>, p2: &Camera<Rational>) -> Mat<Rational> {
    let a = p1.matrix();
    let pinv = a.transpose().mul(&a.mul(&a.transpose()).inverse().expect("rank 3"));
    let e2 = p2.matrix().mul_vec(p1.center().coords());
    let skew = Mat::from_rows(vec![
        vec![q(0), -e2[2].clone(), e2[1].clone()],
        vec![e2[2].clone(), q(0), -e2[0].clone()],
        vec![-e2[1].clone(), e2[0].clone(), q(0)],
    ])
    .unwrap();
    skew.mul(p2.matrix()).mul(&pinv).transpose()
}

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

fn rem_mod(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let dm = m.len() - 1;
    let inv = inv_mod(m[dm], p);
    while a.len() > dm {
        let shift = a.len() - 1 - dm;
        let f = a[a.len() - 1] * inv % p;
        for (i, c) in m.iter().enumerate() {
            a[shift + i] = (a[shift + i] + p - f * c % p) % p;
        }
        a = trim(a);
    }
    a
}

fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    rem_mod(&out, m, p)
}

fn gcd_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = rem_mod(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Whether an integer polynomial (ascending) of degree 4 stays degree 4 and is irreducible
/// modulo `p`: no factor of degree 1 or 2, i.e. `gcd(f, x^{p²} - x) = 1`.
pub fn irreducible_quartic_mod(f: &[BigInt], p: u64) -> bool {
    let pb = BigInt::from(p);
    let fp: Vec<u64> = f.iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect();
    if fp.len() != 5 || fp[4] == 0 {
        return false;
    }
    // x^{p²} mod f by repeated p-th powers
    let mut xp = vec![0, 1];
    for _ in 0..2 {
        let mut acc = vec![1];
        let mut base = xp.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &base, &fp, p);
            }
            base = mul_mod(&base, &base, &fp, p);
            e >>= 1;
        }
        xp = acc;
    }
    let mut h = xp;
    h.resize(h.len().max(2), 0);
    h[1] = (h[1] + p - 1) % p;
    gcd_mod(&fp, &h, p).len() == 1
}

const PRIMES: [u64; 20] = [101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197];

/// Certifies that `Q1 ∩ Q2` is an irreducible quartic curve: its projection from an
/// integer point, specialized to a line `u₂ = c u₁`, is irreducible mod some prime.
pub fn certify_irreducible_intersection(q1: &Quadric3<Rational>, q2: &Quadric3<Rational>) -> bool {
    let directions = [[1, 2, 3, 5], [2, -1, 4, 1], [3, 1, -2, 7]];
    for d in directions {
        let d: Vec<Rational> = d.iter().map(|&v| q(v)).collect();
        let Ok(res) = resultant_eliminate(q1.matrix(), q2.matrix(), &d) else { continue };
        for c in [2, 3, 5, 7, 11] {
            let xs: Vec<Rational> = (0..5).map(|k| q(k)).collect();
            let ys: Vec<Rational> = xs.iter().map(|x| res.eval(&[x.clone(), q(1), q(c)])).collect();
            let f = Poly::interpolate(&xs, &ys);
            if f.degree() != Some(4) {
                continue;
            }
            let den = f.coeffs().iter().fold(BigInt::from(1), |acc, r| acc.lcm(r.denom()));
            let ints: Vec<BigInt> = f.coeffs().iter().map(|r| (r * Rational::from_integer(den.clone())).to_integer()).collect();
            if PRIMES.iter().any(|&p| irreducible_quartic_mod(&ints, p)) {
                return true;
            }
        }
    }
    false
}

pub fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn is_exact_zero<F: Field>(v: &[F]) -> bool {
    v.iter().all(Field::is_zero)
}
