//! Witnesses for a nontrivial F-core: a nontrivial subgroup inside every
//! `H_i` that is normal in `G` and invariant under every `f_i`. Such a
//! subgroup acts trivially in the induced tree representation.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::rep::GData;
use super::vendo::VirtualEndomorphism;
use crate::error::{Error, Result};
use crate::intlattice::{lattice_intersect, IntMatrix, Lattice};
use crate::pcgroup::{GroupElement, PcPresentation};
use crate::subgroup::{GraphElem, GraphSubgroup, Subgroup};

/// Rows are the weight-1 exponents of `f(g_i^{p_i})` for the weight-1
/// generators `g_i`, without dividing by `p_i`.
pub fn nf_matrix(f: &VirtualEndomorphism, powers: &[BigInt]) -> Result<IntMatrix> {
    let pres = f.presentation();
    let gens: Vec<usize> = pres.indices_of_weight(1).collect();
    if powers.len() != gens.len() {
        return Err(Error::RankMismatch { expected: gens.len(), got: powers.len() });
    }
    let mut rows = Vec::new();
    for (&g, p) in gens.iter().zip(powers) {
        let x = GroupElement::generator(pres, g).pow(p);
        rows.push(f.apply(&x)?.graded_image(1));
    }
    Ok(IntMatrix::from_rows(gens.len(), rows))
}

/// Least `p > 0` with `g^p ∈ h`.
fn min_power_in(h: &Subgroup, g: &GroupElement) -> Result<BigInt> {
    let m = h.index().ok_or(Error::InfiniteIndex)?;
    let mut x = g.clone();
    let mut p = BigInt::one();
    while p <= m {
        if h.contains(&x) {
            return Ok(p);
        }
        x = &x * g;
        p += 1;
    }
    Err(Error::Precondition(format!("no power of {g} up to the index lies in the subgroup")))
}

/// The powers `p_i` (lcm over all parts) with `K = <g_i^{p_i}> <= ⋂ H_i`.
pub fn common_powers(data: &GData) -> Result<Vec<BigInt>> {
    let pres = data.presentation();
    pres.indices_of_weight(1)
        .map(|i| {
            let g = GroupElement::generator(pres, i);
            data.parts().iter().try_fold(BigInt::one(), |acc, f| Ok(acc.lcm(&min_power_in(f.domain(), &g)?)))
        })
        .collect()
}

fn lattice_of(pres: &Arc<PcPresentation>, elems: &[GroupElement]) -> Result<Lattice> {
    Lattice::from_generators(pres.len(), elems.iter().map(|e| e.exponents().to_vec()).collect())
}

fn elements_of(pres: &Arc<PcPresentation>, l: &Lattice) -> Vec<GroupElement> {
    l.basis().row_vecs().into_iter().map(|v| GroupElement::from_exponents(pres, v).expect("rank")).collect()
}

/// `{z ∈ l : f(z) ∈ t}` for lattices `l, t` of exponent vectors of elements
/// of the abelian subgroup spanned by weight >= 2 generators, with `l`
/// inside the domain of `f`.
pub fn central_preimage(f: &VirtualEndomorphism, l: &Lattice, t: &Lattice) -> Result<Lattice> {
    let pres = f.presentation();
    let n = pres.len();
    let r = pres.abelian_rank();
    let basis = elements_of(pres, l);
    if basis.is_empty() {
        return Ok(Lattice::zero(n));
    }
    let pairs = basis
        .iter()
        .map(|b| Ok(GraphElem { src: f.apply(b)?, dst: b.clone() }))
        .collect::<Result<Vec<_>>>()?;
    let graph = GraphSubgroup::sift(pairs);
    // pairs whose image has no weight-1 part
    let mut rows = Vec::new();
    for p in graph.all() {
        if p.src.depth().map_or(true, |d| d >= r) {
            let mut v = p.src.exponents().to_vec();
            v.extend(p.dst.exponents().iter().cloned());
            rows.push(v);
        }
    }
    let lambda = Lattice::from_generators(2 * n, rows)?;
    let mut cond = t.basis().row_vecs().into_iter().map(|mut v| {
        v.extend(std::iter::repeat(BigInt::zero()).take(n));
        v
    }).collect::<Vec<_>>();
    for i in 0..n {
        let mut v = vec![BigInt::zero(); 2 * n];
        v[n + i] = BigInt::one();
        cond.push(v);
    }
    let both = lattice_intersect(&lambda, &Lattice::from_generators(2 * n, cond)?)?;
    let proj = both.basis().row_vecs().into_iter().map(|v| v[n..].to_vec()).collect();
    Lattice::from_generators(n, proj)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    /// `Z(K)`, fixed pointwise by every part.
    CenterOfK,
    /// `Z(K)` intersected with the kernels of the parts with singular `N_f`.
    KernelOfSingularParts,
    /// A nonzero sublattice of `Z(K)` mapped into itself by every part.
    InvariantChain,
}

#[derive(Debug, Clone)]
pub struct WitnessChecks {
    pub nontrivial: bool,
    pub inside_every_domain: bool,
    pub normal: bool,
    pub invariant: Vec<bool>,
}

impl WitnessChecks {
    pub fn passed(&self) -> bool {
        self.nontrivial && self.inside_every_domain && self.normal && self.invariant.iter().all(|&b| b)
    }
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub powers: Vec<BigInt>,
    pub k: Subgroup,
    pub center_of_k: Lattice,
    pub determinants: Vec<BigInt>,
    pub kind: WitnessKind,
    pub subgroup: Subgroup,
    /// Whether every part fixes every witness generator (set for `CenterOfK`).
    pub pointwise_fixed: Option<bool>,
    pub checks: WitnessChecks,
}

#[derive(Debug, Clone)]
pub enum WitnessOutcome {
    Found(Box<Witness>),
    NoneFound { reason: String },
}

/// Steps allowed when searching for an invariant sublattice.
pub const INVARIANT_CHAIN_STEPS: usize = 64;

/// Searches the center of `K = <g_i^{p_i}>` for a witness.
///
/// Requires the center of `G` to avoid weight 1.
pub fn fcore_witness(data: &GData) -> Result<WitnessOutcome> {
    let pres = data.presentation();
    let r = pres.abelian_rank();
    let center = pres.center_lattice();
    if center.basis().row_vecs().iter().any(|v| v[..r].iter().any(|x| !x.is_zero())) {
        return Err(Error::Precondition("the center meets the weight-1 layer".into()));
    }
    let powers = common_powers(data)?;
    let k_gens: Vec<GroupElement> = pres
        .indices_of_weight(1)
        .zip(&powers)
        .map(|(i, p)| GroupElement::generator(pres, i).pow(p))
        .collect();
    let k = Subgroup::sift(pres, &k_gens)?;
    let k_upper: Vec<GroupElement> =
        k.sequence().iter().zip(k.leading_depths()).filter(|(_, &d)| d >= r).map(|(s, _)| s.clone()).collect();
    let zk = lattice_intersect(&lattice_of(pres, &k_upper)?, &center)?;

    let mut determinants = Vec::new();
    for f in data.parts() {
        determinants.push(nf_matrix(f, &powers)?.det()?);
    }
    let singular: Vec<&VirtualEndomorphism> =
        data.parts().iter().zip(&determinants).filter(|(_, d)| d.is_zero()).map(|(f, _)| f).collect();

    let (kind, lattice) = if singular.is_empty() {
        (WitnessKind::CenterOfK, zk.clone())
    } else {
        let zero = Lattice::zero(pres.len());
        let mut w = zk.clone();
        for f in &singular {
            w = lattice_intersect(&w, &central_preimage(f, &zk, &zero)?)?;
        }
        if !w.is_zero() {
            (WitnessKind::KernelOfSingularParts, w)
        } else {
            match invariant_chain(data, &zk)? {
                Some(l) => (WitnessKind::InvariantChain, l),
                None => {
                    return Ok(WitnessOutcome::NoneFound {
                        reason: format!("no invariant sublattice of Z(K) within {INVARIANT_CHAIN_STEPS} steps"),
                    })
                }
            }
        }
    };

    let subgroup = Subgroup::sift(pres, &elements_of(pres, &lattice))?;
    let pointwise_fixed = (kind == WitnessKind::CenterOfK).then(|| {
        subgroup.sequence().iter().all(|z| data.parts().iter().all(|f| f.apply(z).map_or(false, |y| &y == z)))
    });
    let checks = WitnessChecks {
        nontrivial: !subgroup.is_trivial(),
        inside_every_domain: data.parts().iter().all(|f| subgroup.is_subgroup_of(f.domain())),
        normal: subgroup.is_normal(),
        invariant: data.parts().iter().map(|f| f.invariant_check(&subgroup).unwrap_or(false)).collect(),
    };
    let w = Witness { powers, k, center_of_k: zk, determinants, kind, subgroup, pointwise_fixed, checks };
    if !w.checks.passed() {
        return Ok(WitnessOutcome::NoneFound { reason: format!("constructed witness failed verification: {:?}", w.checks) });
    }
    Ok(WitnessOutcome::Found(Box::new(w)))
}

/// `L_{t+1} = ⋂_i {z ∈ L_t : f_i(z) ∈ L_t}` from `L_0 = start`, until stable.
fn invariant_chain(data: &GData, start: &Lattice) -> Result<Option<Lattice>> {
    let mut l = start.clone();
    for _ in 0..INVARIANT_CHAIN_STEPS {
        if l.is_zero() {
            return Ok(None);
        }
        let mut next = l.clone();
        for f in data.parts() {
            next = lattice_intersect(&next, &central_preimage(f, &l, &l)?)?;
        }
        if next == l {
            return Ok(Some(l));
        }
        l = next;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::heisenberg;

    fn el(p: &Arc<PcPresentation>, e: &[i64]) -> GroupElement {
        GroupElement::from_i64(p, e).unwrap()
    }

    #[test]
    fn heisenberg_identity_has_center_witness() {
        let h = heisenberg().unwrap();
        let data = GData::new(vec![VirtualEndomorphism::identity(&h)]).unwrap();
        let WitnessOutcome::Found(w) = fcore_witness(&data).unwrap() else { panic!("no witness") };
        assert_eq!(w.kind, WitnessKind::CenterOfK);
        assert_eq!(w.subgroup.sequence(), &[el(&h, &[0, 0, 1])]);
        assert_eq!(w.pointwise_fixed, Some(true));
    }

    #[test]
    fn kernel_of_projection() {
        let h = heisenberg().unwrap();
        let f = VirtualEndomorphism::from_pairs(
            &h,
            &[el(&h, &[1, 0, 0]), el(&h, &[0, 1, 0])],
            &[el(&h, &[1, 0, 0]), el(&h, &[0, 0, 0])],
        )
        .unwrap();
        let data = GData::new(vec![f]).unwrap();
        let WitnessOutcome::Found(w) = fcore_witness(&data).unwrap() else { panic!("no witness") };
        assert_eq!(w.kind, WitnessKind::KernelOfSingularParts);
        assert!(w.checks.passed());
    }

    #[test]
    fn preimage_of_zero_is_kernel() {
        let h = heisenberg().unwrap();
        let f = VirtualEndomorphism::trivial(Subgroup::whole(&h));
        let c = Lattice::from_generators(3, vec![el(&h, &[0, 0, 1]).into_exponents()]).unwrap();
        assert_eq!(central_preimage(&f, &c, &Lattice::zero(3)).unwrap(), c);
    }
}
