use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::intlattice::IntMatrix;
use crate::pcgroup::{GroupElement, PcPresentation};
use crate::subgroup::{GraphElem, GraphSubgroup, Subgroup};

fn product_of_powers(id: &GroupElement, images: &[GroupElement], exps: &[BigInt]) -> GroupElement {
    let mut acc = id.clone();
    for (g, e) in images.iter().zip(exps) {
        if !e.is_zero() {
            acc = &acc * &g.pow(e);
        }
    }
    acc
}

/// An endomorphism of a pc group, given by the image of every basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endomorphism {
    pres: Arc<PcPresentation>,
    images: Vec<GroupElement>,
}

impl Endomorphism {
    /// Extends images of the weight-1 generators through the basis
    /// definitions and checks every commutator relation.
    pub fn from_generator_images(pres: &Arc<PcPresentation>, gen_images: Vec<GroupElement>) -> Result<Self> {
        let r = pres.abelian_rank();
        if gen_images.len() != r {
            return Err(Error::RankMismatch { expected: r, got: gen_images.len() });
        }
        let id = GroupElement::identity(pres);
        let mut images = gen_images;
        for i in r..pres.len() {
            let def = pres
                .definition(i)
                .ok_or_else(|| Error::Precondition(format!("basis element {} has no definition", pres.name(i))))?;
            let img = def.eval_with(&id, &images)?;
            images.push(img);
        }
        Self::from_images(pres, images)
    }

    /// Images for the whole basis; rejects maps that break a relation.
    pub fn from_images(pres: &Arc<PcPresentation>, images: Vec<GroupElement>) -> Result<Self> {
        if images.len() != pres.len() {
            return Err(Error::RankMismatch { expected: pres.len(), got: images.len() });
        }
        for g in &images {
            if **g.presentation() != **pres {
                return Err(Error::PresentationMismatch);
            }
        }
        let e = Endomorphism { pres: pres.clone(), images };
        for j in 0..pres.len() {
            for i in 0..j {
                let lhs = e.images[j].commutator(&e.images[i])?;
                let rhs = e.apply_exps(&pres.commutator_tail(j, i));
                if lhs != rhs {
                    return Err(Error::RelationViolation(format!(
                        "[{}, {}] maps to {} but its tail maps to {}",
                        pres.name(j),
                        pres.name(i),
                        lhs,
                        rhs
                    )));
                }
            }
        }
        Ok(e)
    }

    pub fn identity(pres: &Arc<PcPresentation>) -> Self {
        let images = (0..pres.len()).map(|i| GroupElement::generator(pres, i)).collect();
        Endomorphism { pres: pres.clone(), images }
    }

    pub fn presentation(&self) -> &Arc<PcPresentation> {
        &self.pres
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    fn apply_exps(&self, exps: &[BigInt]) -> GroupElement {
        product_of_powers(&GroupElement::identity(&self.pres), &self.images, exps)
    }

    pub fn apply(&self, x: &GroupElement) -> GroupElement {
        self.apply_exps(x.exponents())
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Endomorphism) -> Endomorphism {
        let images = self.images.iter().map(|g| other.apply(g)).collect();
        Endomorphism { pres: self.pres.clone(), images }
    }

    /// Matrices of the induced maps on the weight layers, rows indexed by
    /// basis elements of that weight.
    pub fn graded_blocks(&self) -> Result<Vec<IntMatrix>> {
        let p = &self.pres;
        let mut out = Vec::new();
        for w in 1..=p.nilpotency_class() {
            let idx: Vec<usize> = p.indices_of_weight(w).collect();
            let mut rows = Vec::new();
            for &i in &idx {
                let img = &self.images[i];
                if let Some(d) = img.depth() {
                    if p.weight(d) < w {
                        return Err(Error::NotGraded(format!("{} maps to {}", p.name(i), img)));
                    }
                }
                rows.push(img.graded_image(w));
            }
            out.push(IntMatrix::from_rows(idx.len(), rows));
        }
        Ok(out)
    }

    pub fn graded_determinants(&self) -> Result<Vec<BigInt>> {
        self.graded_blocks()?.iter().map(IntMatrix::det).collect()
    }

    pub fn is_injective(&self) -> Result<bool> {
        Ok(self.graded_determinants()?.iter().all(|d| !d.is_zero()))
    }

    /// `[G : ψ(G)] = |Π det|` for injective maps; `None` otherwise.
    pub fn image_index(&self) -> Result<Option<BigInt>> {
        let dets = self.graded_determinants()?;
        if dets.iter().any(Zero::is_zero) {
            return Ok(None);
        }
        Ok(Some(dets.iter().product::<BigInt>().abs()))
    }

    pub fn image(&self) -> Result<Subgroup> {
        Subgroup::sift(&self.pres, &self.images)
    }

    /// `ψ^-1 : ψ(G) -> G` as a virtual endomorphism.
    pub fn inverse_on_image(&self) -> Result<VirtualEndomorphism> {
        if !self.is_injective()? {
            return Err(Error::NotInjective("a graded block is singular".into()));
        }
        let pairs = (0..self.pres.len())
            .map(|i| GraphElem { src: self.images[i].clone(), dst: GroupElement::generator(&self.pres, i) })
            .collect();
        VirtualEndomorphism::from_graph(&self.pres, GraphSubgroup::sift(pairs))
    }
}

/// A homomorphism from a finite-index subgroup into the group.
#[derive(Clone, Debug)]
pub struct VirtualEndomorphism {
    domain: Subgroup,
    images: Vec<GroupElement>,
    graph: GraphSubgroup,
}

impl PartialEq for VirtualEndomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.images == other.images
    }
}

impl VirtualEndomorphism {
    /// Images of the domain's standard generators.
    pub fn new(domain: Subgroup, images: Vec<GroupElement>) -> Result<Self> {
        let pres = domain.presentation().clone();
        if images.len() != domain.sequence().len() {
            return Err(Error::RankMismatch { expected: domain.sequence().len(), got: images.len() });
        }
        let v = Self::from_pairs(&pres, domain.sequence(), &images)?;
        Ok(VirtualEndomorphism { domain, images, graph: v.graph })
    }

    /// The map determined by `sources[i] -> images[i]` on the subgroup the
    /// sources generate.
    pub fn from_pairs(pres: &Arc<PcPresentation>, sources: &[GroupElement], images: &[GroupElement]) -> Result<Self> {
        if sources.len() != images.len() {
            return Err(Error::RankMismatch { expected: sources.len(), got: images.len() });
        }
        for g in sources.iter().chain(images) {
            if **g.presentation() != **pres {
                return Err(Error::PresentationMismatch);
            }
        }
        let pairs = sources.iter().zip(images).map(|(s, t)| GraphElem { src: s.clone(), dst: t.clone() }).collect();
        Self::from_graph(pres, GraphSubgroup::sift(pairs))
    }

    fn from_graph(pres: &Arc<PcPresentation>, graph: GraphSubgroup) -> Result<Self> {
        if let Some(k) = graph.kernel_part().first() {
            return Err(Error::RelationViolation(format!("the identity would map to {k}")));
        }
        let srcs: Vec<GroupElement> = graph.source_part().iter().map(|p| p.src.clone()).collect();
        let domain = Subgroup::sift(pres, &srcs)?;
        if domain.index().is_none() {
            return Err(Error::InfiniteIndex);
        }
        let images = domain.sequence().iter().map(|s| graph.image_of(s).expect("source")).collect();
        Ok(VirtualEndomorphism { domain, images, graph })
    }

    pub fn identity(pres: &Arc<PcPresentation>) -> Self {
        Endomorphism::identity(pres).as_virtual()
    }

    /// `x -> g^-1 x g`.
    pub fn inner(g: &GroupElement) -> Self {
        let pres = g.presentation();
        let images = (0..pres.len()).map(|i| GroupElement::generator(pres, i).conjugate_by(g).unwrap()).collect();
        Endomorphism::from_images(pres, images).expect("conjugation is an automorphism").as_virtual()
    }

    /// Everything maps to 1.
    pub fn trivial(domain: Subgroup) -> Self {
        let id = GroupElement::identity(domain.presentation());
        let images = vec![id; domain.sequence().len()];
        Self::new(domain, images).expect("trivial map is a homomorphism")
    }

    pub fn presentation(&self) -> &Arc<PcPresentation> {
        self.domain.presentation()
    }

    pub fn domain(&self) -> &Subgroup {
        &self.domain
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement> {
        let c = self.domain.express(x).ok_or(Error::NotInSubgroup)?;
        Ok(product_of_powers(&GroupElement::identity(self.presentation()), &self.images, &c))
    }

    /// `f(s_1^c_1 ··· s_r^c_r)` for the standard generators `s_i` of the domain.
    pub fn apply_coefficients(&self, c: &[BigInt]) -> GroupElement {
        product_of_powers(&GroupElement::identity(self.presentation()), &self.images, c)
    }

    /// Whether `f(s) ∈ n` for every standard generator `s` of `n`.
    pub fn invariant_check(&self, n: &Subgroup) -> Result<bool> {
        for s in n.sequence() {
            if !n.contains(&self.apply(s)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The restriction to a subgroup of the domain.
    pub fn restrict(&self, sub: &Subgroup) -> Result<Self> {
        let images = sub.sequence().iter().map(|s| self.apply(s)).collect::<Result<Vec<_>>>()?;
        Self::new(sub.clone(), images)
    }
}

impl Endomorphism {
    pub fn as_virtual(&self) -> VirtualEndomorphism {
        let pres = &self.pres;
        let pairs: Vec<GraphElem> = (0..pres.len())
            .map(|i| GraphElem { src: GroupElement::generator(pres, i), dst: self.images[i].clone() })
            .collect();
        VirtualEndomorphism::from_graph(pres, GraphSubgroup::sift(pairs)).expect("endomorphisms are well defined")
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
    fn adding_machine_datum() {
        let z = free_abelian(1).unwrap();
        let f = VirtualEndomorphism::from_pairs(&z, &[el(&z, &[2])], &[el(&z, &[1])]).unwrap();
        assert_eq!(f.apply(&el(&z, &[4])).unwrap(), el(&z, &[2]));
        assert!(matches!(f.apply(&el(&z, &[1])), Err(Error::NotInSubgroup)));
        let four = Subgroup::sift(&z, &[el(&z, &[4])]).unwrap();
        assert!(!f.invariant_check(&four).unwrap());
    }

    #[test]
    fn heisenberg_halving_is_not_a_homomorphism() {
        let h = heisenberg().unwrap();
        let srcs = [el(&h, &[2, 0, 0]), el(&h, &[0, 2, 0]), el(&h, &[0, 0, 1])];
        let imgs = [el(&h, &[1, 0, 0]), el(&h, &[0, 1, 0]), el(&h, &[0, 0, 1])];
        assert!(matches!(VirtualEndomorphism::from_pairs(&h, &srcs, &imgs), Err(Error::RelationViolation(_))));
    }

    #[test]
    fn heisenberg_doubling_blocks() {
        let h = heisenberg().unwrap();
        let psi = Endomorphism::from_generator_images(&h, vec![el(&h, &[2, 0, 0]), el(&h, &[0, 2, 0])]).unwrap();
        assert_eq!(psi.images()[2], el(&h, &[0, 0, 4]));
        assert_eq!(psi.image_index().unwrap(), Some(BigInt::from(16)));
        assert_eq!(psi.image().unwrap().index(), Some(BigInt::from(16)));
        let inv = psi.inverse_on_image().unwrap();
        let x = el(&h, &[1, -2, 3]);
        assert_eq!(inv.apply(&psi.apply(&x)).unwrap(), x);
    }

    #[test]
    fn inner_and_identity_agree_on_center() {
        let h = heisenberg().unwrap();
        let f = VirtualEndomorphism::inner(&el(&h, &[1, 1, 0]));
        let c = el(&h, &[0, 0, 5]);
        assert_eq!(f.apply(&c).unwrap(), c);
        assert_eq!(VirtualEndomorphism::identity(&h).apply(&c).unwrap(), c);
    }
}
