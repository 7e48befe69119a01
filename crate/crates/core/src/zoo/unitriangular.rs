use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::intlattice::IntMatrix;
use crate::pcgroup::{Expr, GroupElement, PcPresentation, PresentationBuilder};

/// Positions `(i, j)` (0-based, `i < j`) of the transvection basis, ordered by
/// `j - i` and then by row.
pub fn ut_positions(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for w in 1..n {
        for i in 0..n - w {
            out.push((i, i + w));
        }
    }
    out
}

/// An upper unitriangular integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UTMatrix(IntMatrix);

impl UTMatrix {
    pub fn new(m: IntMatrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::InvalidParameter("unitriangular matrix must be square".into()));
        }
        for i in 0..m.rows() {
            for j in 0..=i {
                let want = if i == j { BigInt::one() } else { BigInt::zero() };
                if m[(i, j)] != want {
                    return Err(Error::InvalidParameter(format!("entry ({i}, {j}) breaks unitriangularity")));
                }
            }
        }
        Ok(UTMatrix(m))
    }

    pub fn identity(n: usize) -> Self {
        UTMatrix(IntMatrix::identity(n))
    }

    /// `I + e·E_ij`.
    pub fn transvection(n: usize, i: usize, j: usize, e: &BigInt) -> Self {
        let mut m = IntMatrix::identity(n);
        m[(i, j)] = e.clone();
        UTMatrix(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.0
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.0[(i, j)]
    }

    pub fn mul(&self, other: &UTMatrix) -> UTMatrix {
        UTMatrix(self.0.mul(&other.0).expect("same dimension"))
    }

    /// Inverse via the finite series `Σ (-N)^k` with `N` nilpotent.
    pub fn inverse(&self) -> UTMatrix {
        let n = self.dim();
        let mut neg = self.0.clone();
        for i in 0..n {
            for j in 0..n {
                let v = if i == j { BigInt::zero() } else { -&neg[(i, j)] };
                neg[(i, j)] = v;
            }
        }
        let mut acc = IntMatrix::identity(n);
        let mut term = IntMatrix::identity(n);
        for _ in 1..n {
            term = term.mul(&neg).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let v = &acc[(i, j)] + &term[(i, j)];
                    acc[(i, j)] = v;
                }
            }
        }
        UTMatrix(acc)
    }

    pub fn commutator(&self, other: &UTMatrix) -> UTMatrix {
        self.inverse().mul(&other.inverse()).mul(self).mul(other)
    }

    /// Entrywise `x_ij ↦ x_ij · m^(j-i)`, i.e. `D^-1 x D` for `D = diag(1, m, m², …)`.
    pub fn conjugate_by_dm(&self, m: &BigInt) -> UTMatrix {
        let n = self.dim();
        let mut out = self.0.clone();
        for i in 0..n {
            for j in i + 1..n {
                out[(i, j)] = &self.0[(i, j)] * num_traits::pow(m.clone(), j - i);
            }
        }
        UTMatrix(out)
    }

    /// Inverse scaling `x_ij ↦ x_ij / m^(j-i)`; `None` unless every entry divides.
    pub fn conjugate_by_dm_inverse(&self, m: &BigInt) -> Option<UTMatrix> {
        let n = self.dim();
        let mut out = self.0.clone();
        for i in 0..n {
            for j in i + 1..n {
                let d = num_traits::pow(m.clone(), j - i);
                let (q, r) = num_integer::Integer::div_rem(&self.0[(i, j)], &d);
                if !r.is_zero() {
                    return None;
                }
                out[(i, j)] = q;
            }
        }
        Some(UTMatrix(out))
    }

    /// Normal-form exponents over the transvection basis of `ut:n`.
    pub fn to_element(&self, pres: &Arc<PcPresentation>) -> Result<GroupElement> {
        let n = self.dim();
        let pos = ut_positions(n);
        if pres.len() != pos.len() {
            return Err(Error::PresentationMismatch);
        }
        let mut rest = self.clone();
        let mut exps = Vec::with_capacity(pos.len());
        for &(i, j) in &pos {
            let e = rest.entry(i, j).clone();
            rest = UTMatrix::transvection(n, i, j, &-&e).mul(&rest);
            exps.push(e);
        }
        debug_assert_eq!(rest, UTMatrix::identity(n));
        GroupElement::from_exponents(pres, exps)
    }

    pub fn from_element(x: &GroupElement, n: usize) -> UTMatrix {
        let pos = ut_positions(n);
        let mut acc = UTMatrix::identity(n);
        for (&(i, j), e) in pos.iter().zip(x.exponents()) {
            if !e.is_zero() {
                acc = acc.mul(&UTMatrix::transvection(n, i, j, e));
            }
        }
        acc
    }
}

impl fmt::Debug for UTMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UT{}", self.0)
    }
}

/// `Tr_1(n, Z)` for `2 <= n <= 4` over the transvections `t_ij`, with tails
/// read off from matrix commutators.
pub fn unitriangular(n: usize) -> Result<Arc<PcPresentation>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("unitriangular dimension {n} < 2")));
    }
    if n > 4 {
        return Err(Error::InvalidParameter(format!("unitriangular dimension {n} has class {} > 3", n - 1)));
    }
    let pos = ut_positions(n);
    let index = |i: usize, j: usize| pos.iter().position(|&p| p == (i, j)).unwrap();
    let mut b = PresentationBuilder::new();
    for &(i, j) in &pos {
        let def = if j - i == 1 {
            None
        } else {
            Some(Expr::comm(Expr::gen(index(i, i + 1)), Expr::gen(index(i + 1, j))))
        };
        b.generator(format!("t{}{}", i + 1, j + 1), (j - i) as u8, def);
    }
    let one = BigInt::one();
    for q in 0..pos.len() {
        for p in 0..q {
            let (x, y) = (pos[q], pos[p]);
            let c = UTMatrix::transvection(n, x.0, x.1, &one).commutator(&UTMatrix::transvection(n, y.0, y.1, &one));
            let mut word = Vec::new();
            for (l, &(i, j)) in pos.iter().enumerate() {
                if !c.entry(i, j).is_zero() {
                    word.push((l, c.entry(i, j).clone()));
                }
            }
            // commutators of transvections are single transvections
            debug_assert!(word.len() <= 1);
            if !word.is_empty() {
                b.commutator_big(q, p, word);
            }
        }
    }
    Ok(Arc::new(b.build()?))
}
