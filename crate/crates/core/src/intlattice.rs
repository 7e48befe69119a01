//! Exact integer linear algebra: Hermite and Smith normal forms and
//! lattices of integer row vectors.
//!
//! Conventions are row-oriented throughout. A matrix acts on row vectors from
//! the right (`v · M`), a lattice is the row span of its basis, and the
//! Hermite normal form has positive pivots with the entries above each pivot
//! reduced into `[0, pivot)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from row vectors; `cols` is needed for the empty case.
    pub fn from_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged row");
            data.extend(r);
        }
        IntMatrix { rows: n, cols, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(cols, rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::RankMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.rows {
            return Err(Error::RankMismatch { expected: self.rows, got: v.len() });
        }
        let mut out = vec![BigInt::zero(); self.cols];
        for (k, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += a * &self[(k, j)];
            }
        }
        Ok(out)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::RankMismatch { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(p) => {
                        a.swap_rows(k, p);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = v / &prev;
                }
            }
            prev = a[(k, k)].clone();
        }
        Ok(sign * &a[(n - 1, n - 1)])
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = c * &self[(src, j)];
            self[(dst, j)] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self[(r, j)];
            self[(r, j)] = v;
        }
    }

    /// Replaces rows (r1, r2) by (s·r1 + t·r2, u·r1 + v·r2).
    fn combine_rows(&mut self, r1: usize, r2: usize, s: &BigInt, t: &BigInt, u: &BigInt, v: &BigInt) {
        for j in 0..self.cols {
            let x = self[(r1, j)].clone();
            let y = self[(r2, j)].clone();
            self[(r1, j)] = s * &x + t * &y;
            self[(r2, j)] = u * &x + v * &y;
        }
    }

    fn combine_cols(&mut self, c1: usize, c2: usize, s: &BigInt, t: &BigInt, u: &BigInt, v: &BigInt) {
        for i in 0..self.rows {
            let x = self[(i, c1)].clone();
            let y = self[(i, c2)].clone();
            self[(i, c1)] = s * &x + t * &y;
            self[(i, c2)] = u * &x + v * &y;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Extended gcd with non-negative gcd: returns (g, s, t) with s·a + t·b = g.
pub(crate) fn xgcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Row Hermite normal form. Returns `(h, u)` with `h = u · m` and `u`
/// unimodular. Zero rows of `h` sit at the bottom.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        // gcd-eliminate column c below row r
        for i in r + 1..m.rows {
            if h[(i, c)].is_zero() {
                continue;
            }
            if h[(r, c)].is_zero() {
                h.swap_rows(r, i);
                u.swap_rows(r, i);
                continue;
            }
            let a = h[(r, c)].clone();
            let b = h[(i, c)].clone();
            let (g, s, t) = xgcd(&a, &b);
            let ua = -(&b / &g);
            let va = &a / &g;
            h.combine_rows(r, i, &s, &t, &ua, &va);
            u.combine_rows(r, i, &s, &t, &ua, &va);
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        let p = h[(r, c)].clone();
        for i in 0..r {
            let q = -h[(i, c)].div_floor(&p);
            h.add_row(i, r, &q);
            u.add_row(i, r, &q);
        }
        r += 1;
    }
    (h, u)
}

/// Unimodular `[[s, x], [ua, va]]` sending `(p, q)` to `(gcd, 0)`. A plain
/// subtraction when `p | q`, so the pivot line is left alone and the
/// reduction cannot cycle.
fn elimination(p: &BigInt, q: &BigInt) -> (BigInt, BigInt, BigInt, BigInt) {
    if (q % p).is_zero() {
        return (BigInt::one(), BigInt::zero(), -(q / p), BigInt::one());
    }
    let (g, s, x) = xgcd(p, q);
    (s, x, -(q / &g), p / &g)
}

/// Invariant factors d_1 | d_2 | ... of `m`, `min(rows, cols)` of them,
/// zeros last.
pub fn snf(m: &IntMatrix) -> Vec<BigInt> {
    let mut a = m.clone();
    let n = m.rows.min(m.cols);
    for t in 0..n {
        // pick a nonzero pivot of minimal absolute value in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..a.rows {
            for j in t..a.cols {
                if !a[(i, j)].is_zero() && best.map_or(true, |(bi, bj)| a[(i, j)].abs() < a[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        a.swap_cols(t, pj);
        loop {
            let mut changed = false;
            for i in t + 1..a.rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let (s, x, ua, va) = elimination(&a[(t, t)], &a[(i, t)]);
                a.combine_rows(t, i, &s, &x, &ua, &va);
                changed = true;
            }
            for j in t + 1..a.cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let (s, x, ua, va) = elimination(&a[(t, t)], &a[(t, j)]);
                a.combine_cols(t, j, &s, &x, &ua, &va);
                changed = true;
            }
            if !changed {
                break;
            }
        }
    }
    let mut diag: Vec<BigInt> = (0..n).map(|i| a[(i, i)].abs()).collect();
    // restore the divisibility chain: (x, y) -> (gcd, lcm)
    for i in 0..n {
        for j in i + 1..n {
            if diag[i].is_zero() && !diag[j].is_zero() {
                diag.swap(i, j);
            }
            if diag[i].is_zero() || diag[j].is_zero() {
                continue;
            }
            let g = diag[i].gcd(&diag[j]);
            let l = diag[i].lcm(&diag[j]);
            diag[i] = g;
            diag[j] = l;
        }
    }
    diag
}

/// A sublattice of `Z^n`, stored as a row HNF basis without zero rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    ambient_rank: usize,
    basis: IntMatrix,
}

impl Lattice {
    pub fn from_generators(ambient_rank: usize, gens: Vec<Vec<BigInt>>) -> Result<Self> {
        for g in &gens {
            if g.len() != ambient_rank {
                return Err(Error::RankMismatch { expected: ambient_rank, got: g.len() });
            }
        }
        let (h, _) = hnf(&IntMatrix::from_rows(ambient_rank, gens));
        let rows = h.row_vecs().into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
        Ok(Lattice { ambient_rank, basis: IntMatrix::from_rows(ambient_rank, rows) })
    }

    pub fn zero(ambient_rank: usize) -> Self {
        Lattice { ambient_rank, basis: IntMatrix::zeros(0, ambient_rank) }
    }

    pub fn full(ambient_rank: usize) -> Self {
        Lattice { ambient_rank, basis: IntMatrix::identity(ambient_rank) }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    /// Index in the ambient lattice, `None` when the rank is deficient.
    pub fn index(&self) -> Option<BigInt> {
        if self.rank() < self.ambient_rank {
            return None;
        }
        Some((0..self.rank()).map(|i| pivot(self.basis.row(i)).1.clone()).product())
    }

    pub fn contains(&self, v: &[BigInt]) -> Result<bool> {
        lattice_member(v, self)
    }

    /// Coefficients of `v` over the stored basis, if `v` is in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        if v.len() != self.ambient_rank {
            return Err(Error::RankMismatch { expected: self.ambient_rank, got: v.len() });
        }
        let mut rest = v.to_vec();
        let mut coeffs = Vec::with_capacity(self.rank());
        for i in 0..self.rank() {
            let row = self.basis.row(i);
            let (c, p) = pivot(row);
            let (q, r) = rest[c].div_rem(p);
            if !r.is_zero() {
                return Ok(None);
            }
            for (x, y) in rest.iter_mut().zip(row) {
                *x -= &q * y;
            }
            coeffs.push(q);
        }
        Ok(if rest.iter().all(Zero::is_zero) { Some(coeffs) } else { None })
    }

    pub fn is_sublattice_of(&self, other: &Lattice) -> Result<bool> {
        for r in self.basis.row_vecs() {
            if !other.contains(&r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice(Z^{}, {})", self.ambient_rank, self.basis)
    }
}

fn pivot(row: &[BigInt]) -> (usize, &BigInt) {
    row.iter().enumerate().find(|(_, x)| !x.is_zero()).expect("nonzero basis row")
}

pub fn lattice_member(v: &[BigInt], l: &Lattice) -> Result<bool> {
    Ok(l.coordinates(v)?.is_some())
}

/// Left kernel `{v : v · m = 0}`.
pub fn lattice_kernel(m: &IntMatrix) -> Lattice {
    let (h, u) = hnf(m);
    let gens = (0..h.rows()).filter(|&i| h.row(i).iter().all(Zero::is_zero)).map(|i| u.row(i).to_vec()).collect();
    Lattice::from_generators(m.rows(), gens).expect("kernel rows have the right rank")
}

pub fn lattice_intersect(a: &Lattice, b: &Lattice) -> Result<Lattice> {
    if a.ambient_rank != b.ambient_rank {
        return Err(Error::RankMismatch { expected: a.ambient_rank, got: b.ambient_rank });
    }
    let n = a.ambient_rank;
    if a.is_zero() || b.is_zero() {
        return Ok(Lattice::zero(n));
    }
    // x·A = y·B  <=>  (x, y) in the left kernel of [A; -B]
    let mut rows = a.basis.row_vecs();
    rows.extend(b.basis.row_vecs().into_iter().map(|r| r.into_iter().map(|x| -x).collect()));
    let k = lattice_kernel(&IntMatrix::from_rows(n, rows));
    let gens = k
        .basis
        .row_vecs()
        .into_iter()
        .map(|kv| a.basis.apply_row(&kv[..a.rank()]))
        .collect::<Result<Vec<_>>>()?;
    Lattice::from_generators(n, gens)
}

/// Smallest lattice containing both.
pub fn lattice_sum(a: &Lattice, b: &Lattice) -> Result<Lattice> {
    if a.ambient_rank != b.ambient_rank {
        return Err(Error::RankMismatch { expected: a.ambient_rank, got: b.ambient_rank });
    }
    let mut rows = a.basis.row_vecs();
    rows.extend(b.basis.row_vecs());
    Lattice::from_generators(a.ambient_rank, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hnf_examples() {
        let m = bi(&[&[2, 4], &[1, 1]]);
        let (h, u) = hnf(&m);
        assert_eq!(h, bi(&[&[1, 1], &[0, 2]]));
        assert_eq!(u.mul(&m).unwrap(), h);
        assert_eq!(u.det().unwrap().abs(), BigInt::one());

        let (h, _) = hnf(&IntMatrix::identity(3));
        assert_eq!(h, IntMatrix::identity(3));

        let (h, _) = hnf(&bi(&[&[0, 0]]));
        assert_eq!(h, bi(&[&[0, 0]]));
    }

    #[test]
    fn snf_examples() {
        assert_eq!(snf(&bi(&[&[2, 0], &[0, 3]])), v(&[1, 6]));
        assert_eq!(snf(&IntMatrix::identity(2)), v(&[1, 1]));
        assert_eq!(snf(&bi(&[&[0]])), v(&[0]));
        assert_eq!(snf(&bi(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]])), v(&[2, 6, 12]));
    }

    #[test]
    fn snf_with_dividing_pivot_terminates() {
        // a unit pivot with Bezout steps instead of subtraction used to cycle
        let m = bi(&[&[1, 2, 4, -1], &[3, 4, -4, 0], &[-2, -4, -2, -2], &[0, 0, -1, 1]]);
        assert_eq!(snf(&m), v(&[1, 1, 1, 4]));
    }

    #[test]
    fn intersect_examples() {
        let a = Lattice::from_generators(2, vec![v(&[2, 0]), v(&[0, 1])]).unwrap();
        let b = Lattice::from_generators(2, vec![v(&[1, 0]), v(&[0, 3])]).unwrap();
        let c = lattice_intersect(&a, &b).unwrap();
        assert_eq!(c, Lattice::from_generators(2, vec![v(&[2, 0]), v(&[0, 3])]).unwrap());
        assert_eq!(lattice_intersect(&a, &a).unwrap(), a);
        assert_eq!(lattice_intersect(&a, &Lattice::full(2)).unwrap(), a);
        assert!(matches!(lattice_intersect(&a, &Lattice::full(3)), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn kernel_examples() {
        let k = lattice_kernel(&bi(&[&[1, 0], &[1, 0]]));
        assert_eq!(k, Lattice::from_generators(2, vec![v(&[1, -1])]).unwrap());
        assert!(lattice_kernel(&bi(&[&[2, 1], &[1, 1]])).is_zero());
        assert_eq!(lattice_kernel(&IntMatrix::zeros(3, 2)), Lattice::full(3));
    }

    #[test]
    fn member_examples() {
        let l = Lattice::from_generators(2, vec![v(&[2, 0]), v(&[0, 3])]).unwrap();
        assert!(lattice_member(&v(&[2, 0]), &l).unwrap());
        assert!(!lattice_member(&v(&[1, 0]), &l).unwrap());
        assert!(lattice_member(&v(&[0, 0]), &l).unwrap());
        assert!(lattice_member(&v(&[0, 0]), &Lattice::zero(2)).unwrap());
        assert!(lattice_member(&v(&[1]), &l).is_err());
    }

    #[test]
    fn det_and_index() {
        let m = bi(&[&[2, 1, 0], &[0, 3, 5], &[1, 0, 4]]);
        // 2*(12) - 1*(0-5) + 0 = 29
        assert_eq!(m.det().unwrap(), BigInt::from(29));
        let l = Lattice::from_generators(3, m.row_vecs()).unwrap();
        assert_eq!(l.index(), Some(BigInt::from(29)));
    }
}
