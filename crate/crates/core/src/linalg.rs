//! Dense exact linear algebra over the rationals.
//!
//! Elimination works on integer rows: each row is cleared of denominators
//! and divided by its content after every update.

use crate::arith::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<Rat>>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![vec![Rat::zero(); cols]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = Rat::one();
        }
        m
    }

    pub fn from_rows(data: Vec<Vec<Rat>>, cols: usize) -> Self {
        assert!(data.iter().all(|r| r.len() == cols));
        Matrix { rows: data.len(), cols, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<Rat>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..rows {
                m.data[i][j] = c[i].clone();
            }
        }
        m
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        self.data.iter().map(|r| r[j].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j][i] = self.data[i][j].clone();
            }
        }
        t
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows);
        let mut r = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let x = &self.data[i][l];
                if x.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    if !o.data[l][j].is_zero() {
                        r.data[i][j] += x * &o.data[l][j];
                    }
                }
            }
        }
        r
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        self.data
            .iter()
            .map(|row| row.iter().zip(v).fold(Rat::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        let mut r = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                r.data[i][j] += &o.data[i][j];
            }
        }
        r
    }

    pub fn scale(&self, c: &Rat) -> Matrix {
        let mut r = self.clone();
        for row in r.data.iter_mut() {
            for x in row.iter_mut() {
                *x *= c;
            }
        }
        r
    }

    pub fn sub_scalar(&self, c: &Rat) -> Matrix {
        let mut r = self.clone();
        for i in 0..self.rows.min(self.cols) {
            r.data[i][i] -= c;
        }
        r
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(|x| x.is_zero()))
    }

    pub fn trace(&self) -> Rat {
        (0..self.rows.min(self.cols)).fold(Rat::zero(), |a, i| a + &self.data[i][i])
    }

    pub fn rank(&self) -> usize {
        rref(self).1.len()
    }

    pub fn kernel(&self) -> Vec<Vec<Rat>> {
        kernel(self)
    }
}

fn lcm_denoms(row: &[Rat]) -> BigInt {
    row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()))
}

fn primitive(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

/// Reduced row echelon form.  Returns the nonzero rows (pivot entry 1) and
/// the pivot columns.
pub fn rref(m: &Matrix) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let mut rows: Vec<Vec<BigInt>> = m
        .data
        .iter()
        .map(|r| {
            let l = lcm_denoms(r);
            let mut v: Vec<BigInt> = r.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
            primitive(&mut v);
            v
        })
        .collect();
    let mut pivots = Vec::new();
    let mut top = 0;
    for c in 0..m.cols {
        if top == rows.len() {
            break;
        }
        let Some(pr) = (top..rows.len())
            .filter(|&i| !rows[i][c].is_zero())
            .min_by_key(|&i| rows[i][c].abs())
        else {
            continue;
        };
        rows.swap(top, pr);
        let piv = rows[top].clone();
        for i in 0..rows.len() {
            if i == top || rows[i][c].is_zero() {
                continue;
            }
            let g = piv[c].gcd(&rows[i][c]);
            let f1 = &piv[c] / &g;
            let f2 = &rows[i][c] / &g;
            let row = &mut rows[i];
            for j in 0..m.cols {
                row[j] = &row[j] * &f1 - &piv[j] * &f2;
            }
            primitive(row);
        }
        pivots.push(c);
        top += 1;
    }
    let out = rows
        .into_iter()
        .take(pivots.len())
        .zip(&pivots)
        .map(|(r, &c)| {
            let p = r[c].clone();
            r.into_iter().map(|x| Rat::new(x, p.clone())).collect()
        })
        .collect();
    (out, pivots)
}

/// Basis of the right kernel {v : m v = 0}.
pub fn kernel(m: &Matrix) -> Vec<Vec<Rat>> {
    let (rows, pivots) = rref(m);
    let mut out = Vec::new();
    for f in 0..m.cols {
        if pivots.contains(&f) {
            continue;
        }
        let mut v = vec![Rat::zero(); m.cols];
        v[f] = Rat::one();
        for (r, &c) in rows.iter().zip(&pivots) {
            v[c] = -r[f].clone();
        }
        out.push(v);
    }
    out
}

/// Row-reduced basis of the span of `vecs`.
pub fn span_basis(vecs: &[Vec<Rat>], dim: usize) -> Vec<Vec<Rat>> {
    if vecs.is_empty() {
        return Vec::new();
    }
    rref(&Matrix::from_rows(vecs.to_vec(), dim)).0
}

/// Basis of the intersection of two subspaces given by spanning sets.
pub fn intersect(a: &[Vec<Rat>], b: &[Vec<Rat>], dim: usize) -> Vec<Vec<Rat>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    // solve sum x_i a_i - sum y_j b_j = 0
    let mut cols: Vec<Vec<Rat>> = a.to_vec();
    cols.extend(b.iter().map(|v| v.iter().map(|x| -x.clone()).collect()));
    let m = Matrix::from_cols(&cols, dim);
    let vecs: Vec<Vec<Rat>> = kernel(&m)
        .into_iter()
        .map(|k| {
            let mut v = vec![Rat::zero(); dim];
            for (i, ai) in a.iter().enumerate() {
                if !k[i].is_zero() {
                    for t in 0..dim {
                        v[t] += &k[i] * &ai[t];
                    }
                }
            }
            v
        })
        .collect();
    span_basis(&vecs, dim)
}

/// Coordinates of `v` with respect to an echelon basis `(rows, pivots)` as
/// produced by [`rref`]; `None` if `v` is outside the span.
pub fn coords_in(rows: &[Vec<Rat>], pivots: &[usize], v: &[Rat]) -> Option<Vec<Rat>> {
    let c: Vec<Rat> = pivots.iter().map(|&p| v[p].clone()).collect();
    let mut w = v.to_vec();
    for (ci, r) in c.iter().zip(rows) {
        if ci.is_zero() {
            continue;
        }
        for (wj, rj) in w.iter_mut().zip(r) {
            if !rj.is_zero() {
                *wj -= ci * rj;
            }
        }
    }
    if w.iter().all(|x| x.is_zero()) {
        Some(c)
    } else {
        None
    }
}

/// Solves for coordinates of `v` in the span of arbitrary `basis` vectors
/// (assumed linearly independent).
pub fn solve_in_basis(basis: &[Vec<Rat>], v: &[Rat]) -> Option<Vec<Rat>> {
    let dim = v.len();
    if basis.is_empty() {
        return if v.iter().all(|x| x.is_zero()) { Some(Vec::new()) } else { None };
    }
    let mut cols = basis.to_vec();
    cols.push(v.iter().map(|x| -x.clone()).collect());
    let m = Matrix::from_cols(&cols, dim);
    let ker = kernel(&m);
    let n = basis.len();
    let k = ker.into_iter().find(|k| !k[n].is_zero())?;
    let s = k[n].clone();
    Some(k[..n].iter().map(|x| x / &s).collect())
}

/// Characteristic polynomial det(xI - m), coefficients in increasing degree.
pub fn charpoly(m: &Matrix) -> Vec<Rat> {
    // Faddeev-LeVerrier
    let n = m.rows;
    assert_eq!(n, m.cols);
    let mut c = vec![Rat::zero(); n + 1];
    c[n] = Rat::one();
    let mut mk = Matrix::zeros(n, n);
    for k in 1..=n {
        let mut next = m.mul(&mk);
        for i in 0..n {
            next.data[i][i] += &c[n - k + 1];
        }
        mk = next;
        let tr = m.mul(&mk).trace();
        c[n - k] = -tr / Rat::from_integer(BigInt::from(k));
    }
    c
}

/// Polynomial helpers on coefficient vectors (increasing degree).
pub mod poly {
    use super::Rat;
    use num_traits::{Signed, Zero};

    pub fn trim(mut p: Vec<Rat>) -> Vec<Rat> {
        while p.last().is_some_and(|x| x.is_zero()) {
            p.pop();
        }
        p
    }

    pub fn eval(p: &[Rat], x: &Rat) -> Rat {
        p.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(p: &[Rat]) -> Vec<Rat> {
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Rat::from_integer((i as i64).into()))
            .collect()
    }

    pub fn rem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        let b = trim(b.to_vec());
        let mut r = trim(a.to_vec());
        let lb = b.last().expect("division by zero polynomial").clone();
        while r.len() >= b.len() && !r.is_empty() {
            let f = r.last().unwrap() / &lb;
            let s = r.len() - b.len();
            for (i, bi) in b.iter().enumerate() {
                r[s + i] -= &f * bi;
            }
            r.pop();
            r = trim(r);
        }
        r
    }

    pub fn gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
        while !y.is_empty() {
            let r = rem(&x, &y);
            x = y;
            y = r;
        }
        match x.last().cloned() {
            Some(l) => x.into_iter().map(|c| c / &l).collect(),
            None => x,
        }
    }

    /// Number of distinct complex roots.
    pub fn distinct_roots(p: &[Rat]) -> usize {
        let p = trim(p.to_vec());
        if p.len() <= 1 {
            return 0;
        }
        let g = gcd(&p, &derivative(&p));
        (p.len() - 1) - (g.len() - 1)
    }

    fn sign_changes(seq: &[Vec<Rat>], x: &Rat) -> usize {
        let signs: Vec<i32> = seq
            .iter()
            .map(|p| eval(p, x))
            .filter(|v| !v.is_zero())
            .map(|v| if v.is_positive() { 1 } else { -1 })
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Number of distinct real roots in the half-open interval (lo, hi].
    pub fn sturm_count(p: &[Rat], lo: &Rat, hi: &Rat) -> usize {
        let p = trim(p.to_vec());
        if p.len() <= 1 {
            return 0;
        }
        let mut seq = vec![p.clone(), trim(derivative(&p))];
        loop {
            let n = seq.len();
            if seq[n - 1].is_empty() {
                seq.pop();
                break;
            }
            let r = rem(&seq[n - 2], &seq[n - 1]);
            if r.is_empty() {
                break;
            }
            seq.push(r.into_iter().map(|c| -c).collect());
        }
        sign_changes(&seq, lo) - sign_changes(&seq, hi)
    }

    /// Number of distinct real roots overall.
    pub fn distinct_real_roots(p: &[Rat]) -> usize {
        let p = trim(p.to_vec());
        if p.len() <= 1 {
            return 0;
        }
        // Cauchy bound
        let lead = p.last().unwrap().abs();
        let m = p[..p.len() - 1].iter().map(|c| c.abs() / &lead).fold(Rat::zero(), |a, b| if b > a { b } else { a });
        let b = m + Rat::from_integer(1.into());
        sturm_count(&p, &-b.clone(), &b)
    }
}
