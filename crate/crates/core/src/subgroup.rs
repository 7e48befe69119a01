//! Subgroups of pc groups in standard form.
//!
//! A standard sequence `s_1, ..., s_r` has strictly increasing depths (index of
//! the first nonzero exponent), positive leading exponents, and every
//! commutator `[s_j, s_i]` sifts to the identity. Each element is reduced
//! against the later ones so that its exponents at their depths lie in
//! `[0, lead)`, which makes the sequence canonical.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::intlattice::xgcd;
use crate::pcgroup::{GroupElement, PcPresentation};

/// Largest transversal materialized in memory.
pub const MAX_TRANSVERSAL: usize = 1 << 22;

pub(crate) trait SiftElem: Clone {
    fn depth(&self) -> Option<usize>;
    fn coord(&self, d: usize) -> &BigInt;
    fn mul(&self, o: &Self) -> Self;
    fn inv(&self) -> Self;
    fn pow(&self, e: &BigInt) -> Self;
    fn comm(&self, o: &Self) -> Self;
}

impl SiftElem for GroupElement {
    fn depth(&self) -> Option<usize> {
        GroupElement::depth(self)
    }
    fn coord(&self, d: usize) -> &BigInt {
        &self.exponents()[d]
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn inv(&self) -> Self {
        self.inverse()
    }
    fn pow(&self, e: &BigInt) -> Self {
        GroupElement::pow(self, e)
    }
    fn comm(&self, o: &Self) -> Self {
        self.commutator(o).expect("same group")
    }
}

/// An element `(src, dst)` of a direct product, ordered source-first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct GraphElem {
    pub src: GroupElement,
    pub dst: GroupElement,
}

impl SiftElem for GraphElem {
    fn depth(&self) -> Option<usize> {
        self.src.depth().or_else(|| self.dst.depth().map(|d| d + self.src.exponents().len()))
    }
    fn coord(&self, d: usize) -> &BigInt {
        let n1 = self.src.exponents().len();
        if d < n1 {
            &self.src.exponents()[d]
        } else {
            &self.dst.exponents()[d - n1]
        }
    }
    fn mul(&self, o: &Self) -> Self {
        GraphElem { src: &self.src * &o.src, dst: &self.dst * &o.dst }
    }
    fn inv(&self) -> Self {
        GraphElem { src: self.src.inverse(), dst: self.dst.inverse() }
    }
    fn pow(&self, e: &BigInt) -> Self {
        GraphElem { src: self.src.pow(e), dst: self.dst.pow(e) }
    }
    fn comm(&self, o: &Self) -> Self {
        GraphElem { src: self.src.comm(&o.src), dst: self.dst.comm(&o.dst) }
    }
}

pub(crate) struct Sifter<T> {
    slots: Vec<Option<T>>,
}

impl<T: SiftElem> Sifter<T> {
    pub fn new(width: usize) -> Self {
        Sifter { slots: vec![None; width] }
    }

    /// Adds `x` to the generated subgroup; true if any slot changed.
    pub fn insert(&mut self, x: T) -> bool {
        let mut changed = false;
        let mut queue = vec![x];
        while let Some(mut x) = queue.pop() {
            while let Some(d) = x.depth() {
                let Some(s) = self.slots[d].clone() else {
                    if x.coord(d).is_negative() {
                        x = x.inv();
                    }
                    self.slots[d] = Some(x);
                    changed = true;
                    break;
                };
                let (a, b) = (s.coord(d).clone(), x.coord(d).clone());
                if b.is_multiple_of(&a) {
                    x = s.pow(&-(b / a)).mul(&x);
                    continue;
                }
                let (g, u, v) = xgcd(&a, &b);
                let new = s.pow(&u).mul(&x.pow(&v));
                queue.push(new.pow(&-(&a / &g)).mul(&s));
                x = new.pow(&-(&b / &g)).mul(&x);
                self.slots[d] = Some(new);
                changed = true;
            }
        }
        changed
    }

    /// Inserts commutators of the current sequence until it is closed.
    pub fn saturate(&mut self) {
        loop {
            let filled: Vec<T> = self.slots.iter().flatten().cloned().collect();
            let mut changed = false;
            for j in 0..filled.len() {
                for i in 0..j {
                    changed |= self.insert(filled[j].comm(&filled[i]));
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Reduces each element's exponents at later depths into `[0, lead)`.
    pub fn reduce(&mut self) {
        let depths: Vec<usize> = (0..self.slots.len()).filter(|&d| self.slots[d].is_some()).collect();
        for (p, &di) in depths.iter().enumerate() {
            let mut si = self.slots[di].clone().unwrap();
            for &dj in &depths[p + 1..] {
                let sj = self.slots[dj].as_ref().unwrap();
                let q = si.coord(dj).div_floor(sj.coord(dj));
                if !q.is_zero() {
                    si = si.mul(&sj.pow(&-q));
                }
            }
            self.slots[di] = Some(si);
        }
    }

    pub fn finish(mut self) -> (Vec<usize>, Vec<T>) {
        self.saturate();
        self.reduce();
        self.slots.into_iter().enumerate().filter_map(|(d, s)| s.map(|s| (d, s))).unzip()
    }
}

/// Left-sifts `x` through a standard sequence, returning the exponents `c`
/// with `x = s_1^c_1 ··· s_r^c_r` and the remainder.
fn sift_left<T: SiftElem>(depths: &[usize], seq: &[T], mut x: T, stop: usize) -> (Vec<BigInt>, T, bool) {
    let mut coeffs = vec![BigInt::zero(); seq.len()];
    while let Some(d) = x.depth() {
        if d >= stop {
            break;
        }
        let Ok(p) = depths.binary_search(&d) else {
            return (coeffs, x, false);
        };
        let (q, r) = x.coord(d).div_rem(seq[p].coord(d));
        if !r.is_zero() {
            return (coeffs, x, false);
        }
        x = seq[p].pow(&-&q).mul(&x);
        coeffs[p] = q;
    }
    (coeffs, x, true)
}

#[derive(Clone, Debug)]
pub struct Subgroup {
    pres: Arc<PcPresentation>,
    depths: Vec<usize>,
    seq: Vec<GroupElement>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.depths == other.depths && self.seq == other.seq
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    /// The subgroup generated by `gens`, in standard form.
    pub fn sift(pres: &Arc<PcPresentation>, gens: &[GroupElement]) -> Result<Subgroup> {
        let mut s = Sifter::new(pres.len());
        for g in gens {
            if g.presentation() != pres && **g.presentation() != **pres {
                return Err(Error::PresentationMismatch);
            }
            s.insert(g.clone());
        }
        let (depths, seq) = s.finish();
        Ok(Subgroup { pres: pres.clone(), depths, seq })
    }

    pub fn whole(pres: &Arc<PcPresentation>) -> Subgroup {
        let depths: Vec<usize> = (0..pres.len()).collect();
        let seq = depths.iter().map(|&i| GroupElement::generator(pres, i)).collect();
        Subgroup { pres: pres.clone(), depths, seq }
    }

    pub fn trivial(pres: &Arc<PcPresentation>) -> Subgroup {
        Subgroup { pres: pres.clone(), depths: Vec::new(), seq: Vec::new() }
    }

    pub fn presentation(&self) -> &Arc<PcPresentation> {
        &self.pres
    }

    pub fn sequence(&self) -> &[GroupElement] {
        &self.seq
    }

    pub fn leading_depths(&self) -> &[usize] {
        &self.depths
    }

    pub fn leading_exponents(&self) -> Vec<BigInt> {
        self.seq.iter().zip(&self.depths).map(|(s, &d)| s.exponents()[d].clone()).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.seq.is_empty()
    }

    /// `None` for infinite index.
    pub fn index(&self) -> Option<BigInt> {
        if self.seq.len() != self.pres.len() {
            return None;
        }
        Some(self.leading_exponents().iter().product())
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        self.express(x).is_some()
    }

    /// Exponents `c` with `x = s_1^c_1 ··· s_r^c_r`, or `None` if `x` is outside.
    pub fn express(&self, x: &GroupElement) -> Option<Vec<BigInt>> {
        let (c, rest, ok) = sift_left(&self.depths, &self.seq, x.clone(), usize::MAX);
        (ok && rest.is_identity()).then_some(c)
    }

    /// The transversal element `t` with `x ∈ H·t`.
    pub fn coset_representative(&self, x: &GroupElement) -> Result<GroupElement> {
        let mut x = x.clone();
        for d in 0..self.pres.len() {
            match self.depths.binary_search(&d) {
                Ok(p) => {
                    let s = &self.seq[p];
                    let q = x.exponents()[d].div_floor(&s.exponents()[d]);
                    if !q.is_zero() {
                        x = &s.pow(&-q) * &x;
                    }
                }
                Err(_) if !x.exponents()[d].is_zero() => return Err(Error::InfiniteIndex),
                Err(_) => {}
            }
        }
        Ok(x)
    }

    /// `(c, k)` with `x = s_1^c_1 ··· s_r^c_r · t_k`, where `t_k` is the
    /// `k`-th element of [`Subgroup::transversal`]. Needs finite index.
    pub fn split(&self, x: &GroupElement) -> Result<(Vec<BigInt>, usize)> {
        if self.seq.len() != self.pres.len() {
            return Err(Error::InfiniteIndex);
        }
        let mut x = x.clone();
        let mut coeffs = Vec::with_capacity(self.seq.len());
        let mut idx = BigInt::zero();
        for (d, s) in self.seq.iter().enumerate() {
            let lead = &s.exponents()[d];
            let (q, r) = x.exponents()[d].div_mod_floor(lead);
            if !q.is_zero() {
                x = &s.pow(&-&q) * &x;
            }
            idx = idx * lead + r;
            coeffs.push(q);
        }
        let k = idx.to_usize().ok_or_else(|| Error::Precondition("coset index exceeds usize".into()))?;
        Ok((coeffs, k))
    }

    /// Position of `x`'s coset in [`Subgroup::transversal`].
    pub fn coset_of(&self, x: &GroupElement) -> Result<usize> {
        self.index().ok_or(Error::InfiniteIndex)?;
        let r = self.coset_representative(x)?;
        let mut idx = BigInt::zero();
        for (p, s) in self.seq.iter().enumerate() {
            let d = self.depths[p];
            idx = idx * &s.exponents()[d] + &r.exponents()[d];
        }
        idx.to_usize().ok_or_else(|| Error::Precondition("coset index exceeds usize".into()))
    }

    /// The `idx`-th transversal element (mixed radix, first coordinate most
    /// significant).
    pub fn transversal_element(&self, idx: usize) -> Result<GroupElement> {
        let leads = self.leading_exponents();
        if leads.len() != self.pres.len() {
            return Err(Error::InfiniteIndex);
        }
        let mut rem = BigInt::from(idx);
        let mut exps = vec![BigInt::zero(); leads.len()];
        for d in (0..leads.len()).rev() {
            let (q, r) = rem.div_rem(&leads[d]);
            exps[d] = r;
            rem = q;
        }
        if !rem.is_zero() {
            return Err(Error::Precondition(format!("transversal position {idx} out of range")));
        }
        GroupElement::from_exponents(&self.pres, exps)
    }

    /// Right-coset representatives in lexicographic order, starting with 1.
    pub fn transversal(&self) -> Result<Vec<GroupElement>> {
        let m = self.index().ok_or(Error::InfiniteIndex)?;
        let m = m
            .to_usize()
            .filter(|&m| m <= MAX_TRANSVERSAL)
            .ok_or_else(|| Error::Precondition(format!("index {m} too large to enumerate")))?;
        (0..m).map(|i| self.transversal_element(i)).collect()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.seq.iter().all(|s| other.contains(s))
    }

    /// `[other : self]` for `self <= other`; `None` when infinite.
    pub fn index_in(&self, other: &Subgroup) -> Result<Option<BigInt>> {
        if !self.is_subgroup_of(other) {
            return Err(Error::NotInSubgroup);
        }
        if self.depths != other.depths {
            return Ok(None);
        }
        let (a, b) = (self.leading_exponents(), other.leading_exponents());
        Ok(Some(a.iter().zip(&b).map(|(x, y)| x / y).product()))
    }

    /// Closed under conjugation by every weight-1 generator and its inverse.
    pub fn is_normal(&self) -> bool {
        let gens: Vec<GroupElement> = self
            .pres
            .indices_of_weight(1)
            .flat_map(|i| {
                let g = GroupElement::generator(&self.pres, i);
                [g.inverse(), g]
            })
            .collect();
        self.seq.iter().all(|s| gens.iter().all(|g| self.contains(&s.conjugate_by(g).unwrap())))
    }
}

/// Standard form of a subgroup of `G1 × G2`, used to invert and validate maps.
#[derive(Clone, Debug)]
pub(crate) struct GraphSubgroup {
    n1: usize,
    depths: Vec<usize>,
    seq: Vec<GraphElem>,
}

impl GraphSubgroup {
    pub fn sift(pairs: Vec<GraphElem>) -> GraphSubgroup {
        let n1 = pairs.first().map_or(0, |p| p.src.exponents().len());
        let width = n1 + pairs.first().map_or(0, |p| p.dst.exponents().len());
        let mut s = Sifter::new(width);
        for p in pairs {
            s.insert(p);
        }
        let (depths, seq) = s.finish();
        GraphSubgroup { n1, depths, seq }
    }

    fn split(&self) -> usize {
        self.depths.iter().position(|&d| d >= self.n1).unwrap_or(self.depths.len())
    }

    /// Standard sequence of the projection to the source, with matching targets.
    pub fn source_part(&self) -> &[GraphElem] {
        &self.seq[..self.split()]
    }

    pub fn all(&self) -> &[GraphElem] {
        &self.seq
    }

    /// Targets paired with the trivial source: nonempty iff the pairs do not
    /// describe a well-defined map.
    pub fn kernel_part(&self) -> Vec<GroupElement> {
        self.seq[self.split()..].iter().map(|p| p.dst.clone()).collect()
    }

    /// A target of `x` under the relation; `None` if `x` is not a source.
    pub fn image_of(&self, x: &GroupElement) -> Option<GroupElement> {
        let k = self.split();
        let id = GroupElement::identity(self.seq.first()?.dst.presentation());
        let start = GraphElem { src: x.clone(), dst: id };
        let (_, rest, ok) = sift_left(&self.depths[..k], &self.seq[..k], start, self.n1);
        (ok && rest.src.is_identity()).then(|| rest.dst.inverse())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{free_abelian, heisenberg};

    fn el(p: &Arc<PcPresentation>, e: &[i64]) -> GroupElement {
        GroupElement::from_i64(p, e).unwrap()
    }

    #[test]
    fn abelian_echelon() {
        let z2 = free_abelian(2).unwrap();
        let h = Subgroup::sift(&z2, &[el(&z2, &[2, 0]), el(&z2, &[0, 1])]).unwrap();
        assert_eq!(h.sequence(), &[el(&z2, &[2, 0]), el(&z2, &[0, 1])]);
        assert_eq!(h.index(), Some(BigInt::from(2)));
        assert_eq!(h.transversal().unwrap(), vec![el(&z2, &[0, 0]), el(&z2, &[1, 0])]);
        assert!(h.contains(&el(&z2, &[4, -1])));
        assert_eq!(h.coset_of(&el(&z2, &[3, 0])).unwrap(), 1);
    }

    #[test]
    fn gcd_step_merges_generators() {
        let z = free_abelian(1).unwrap();
        let h = Subgroup::sift(&z, &[el(&z, &[6]), el(&z, &[-4])]).unwrap();
        assert_eq!(h.sequence(), &[el(&z, &[2])]);
    }

    #[test]
    fn heisenberg_index_four() {
        let h3 = heisenberg().unwrap();
        let h = Subgroup::sift(&h3, &[el(&h3, &[2, 0, 0]), el(&h3, &[0, 2, 0]), el(&h3, &[0, 0, 1])]).unwrap();
        assert_eq!(h.index(), Some(BigInt::from(4)));
        let t = h.transversal().unwrap();
        assert_eq!(t, vec![el(&h3, &[0, 0, 0]), el(&h3, &[0, 1, 0]), el(&h3, &[1, 0, 0]), el(&h3, &[1, 1, 0])]);
        assert_eq!(h.coset_of(&el(&h3, &[0, 0, 1])).unwrap(), 0);
    }

    #[test]
    fn commutator_saturation_finds_center() {
        let h3 = heisenberg().unwrap();
        let h = Subgroup::sift(&h3, &[el(&h3, &[2, 0, 0]), el(&h3, &[0, 3, 0])]).unwrap();
        assert_eq!(h.leading_exponents(), vec![BigInt::from(2), BigInt::from(3), BigInt::from(6)]);
        assert_eq!(h.index(), Some(BigInt::from(36)));
    }

    #[test]
    fn infinite_index() {
        let h3 = heisenberg().unwrap();
        let h = Subgroup::sift(&h3, &[el(&h3, &[1, 0, 0])]).unwrap();
        assert_eq!(h.index(), None);
        assert!(matches!(h.transversal(), Err(Error::InfiniteIndex)));
        assert!(matches!(h.coset_of(&el(&h3, &[0, 1, 0])), Err(Error::InfiniteIndex)));
    }

    #[test]
    fn express_round_trips() {
        let h3 = heisenberg().unwrap();
        let h = Subgroup::sift(&h3, &[el(&h3, &[2, 1, 0]), el(&h3, &[0, 2, 3])]).unwrap();
        let x = &(&h.sequence()[0].pow_i64(3) * &h.sequence()[1].pow_i64(-2)) * &h.sequence()[2];
        let c = h.express(&x).unwrap();
        let mut y = GroupElement::identity(&h3);
        for (s, e) in h.sequence().iter().zip(&c) {
            y = &y * &s.pow(e);
        }
        assert_eq!(x, y);
    }

    #[test]
    fn graph_detects_ill_defined_map() {
        let h3 = heisenberg().unwrap();
        let pairs = vec![
            GraphElem { src: el(&h3, &[2, 0, 0]), dst: el(&h3, &[1, 0, 0]) },
            GraphElem { src: el(&h3, &[0, 2, 0]), dst: el(&h3, &[0, 1, 0]) },
            GraphElem { src: el(&h3, &[0, 0, 1]), dst: el(&h3, &[0, 0, 1]) },
        ];
        assert!(!GraphSubgroup::sift(pairs).kernel_part().is_empty());
    }

    #[test]
    fn graph_inverts_doubling() {
        let z = free_abelian(1).unwrap();
        let g = GraphSubgroup::sift(vec![GraphElem { src: el(&z, &[2]), dst: el(&z, &[1]) }]);
        assert!(g.kernel_part().is_empty());
        assert_eq!(g.image_of(&el(&z, &[6])), Some(el(&z, &[3])));
        assert_eq!(g.image_of(&el(&z, &[3])), None);
    }
}
