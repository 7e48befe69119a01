use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::tree::TreeAction;
use super::vendo::{Endomorphism, VirtualEndomorphism};
use crate::error::{Error, Result};
use crate::pcgroup::{GroupElement, PcPresentation};
use crate::subgroup::MAX_TRANSVERSAL;

/// Virtual endomorphisms `f_i : H_i -> G` of one group.
#[derive(Clone, Debug)]
pub struct GData {
    pres: Arc<PcPresentation>,
    parts: Vec<VirtualEndomorphism>,
}

impl GData {
    pub fn new(parts: Vec<VirtualEndomorphism>) -> Result<GData> {
        let pres = parts.first().ok_or_else(|| Error::Precondition("G-data needs at least one part".into()))?.presentation().clone();
        for p in &parts {
            if **p.presentation() != *pres {
                return Err(Error::PresentationMismatch);
            }
            p.domain().index().ok_or(Error::InfiniteIndex)?;
        }
        Ok(GData { pres, parts })
    }

    pub fn presentation(&self) -> &Arc<PcPresentation> {
        &self.pres
    }

    pub fn parts(&self) -> &[VirtualEndomorphism] {
        &self.parts
    }

    /// `m_i = [G : H_i]`.
    pub fn m_parts(&self) -> Vec<BigInt> {
        self.parts.iter().map(|p| p.domain().index().expect("finite index")).collect()
    }

    pub fn alphabet(&self) -> BigInt {
        self.m_parts().iter().sum()
    }
}

struct Part {
    vendo: VirtualEndomorphism,
    transversal: Vec<GroupElement>,
    offset: usize,
}

type Expansion = Arc<(Vec<u32>, Vec<GroupElement>)>;

/// States kept in the expansion memo before it is flushed.
const MEMO_STATES: usize = 1 << 19;

/// The tree action induced by G-data: letters are pairs (part `i`, coset
/// `j` of `H_i`), `g` sends `(i, j)` to `(i, j')` with `t_j g ∈ H_i t_j'`,
/// and the state there is `f_i(t_j g t_j'^-1)`.
pub struct GDataRep {
    pres: Arc<PcPresentation>,
    parts: Vec<Part>,
    alphabet: usize,
    memo: Mutex<HashMap<Vec<BigInt>, Expansion>>,
    /// Root permutation of each basis generator, filled on first use.
    generator_perms: OnceLock<Vec<Vec<u32>>>,
}

/// `p^e` for a permutation `p`, one cycle at a time.
fn perm_power(p: &[u32], e: &BigInt) -> Vec<u32> {
    let mut out = vec![u32::MAX; p.len()];
    let mut cycle = Vec::new();
    for start in 0..p.len() {
        if out[start] != u32::MAX {
            continue;
        }
        cycle.clear();
        let mut x = start as u32;
        loop {
            cycle.push(x);
            x = p[x as usize];
            if x as usize == start {
                break;
            }
        }
        let len = cycle.len();
        let shift = e.mod_floor(&BigInt::from(len)).to_usize().expect("below cycle length");
        for (i, &y) in cycle.iter().enumerate() {
            out[y as usize] = cycle[(i + shift) % len];
        }
    }
    out
}

impl GDataRep {
    pub fn new(data: &GData) -> Result<GDataRep> {
        let mut parts = Vec::new();
        let mut offset = 0usize;
        for v in data.parts() {
            let transversal = v.domain().transversal()?;
            let len = transversal.len();
            parts.push(Part { vendo: v.clone(), transversal, offset });
            offset += len;
            if offset > MAX_TRANSVERSAL {
                return Err(Error::Precondition(format!("alphabet size {offset} too large")));
            }
        }
        Ok(GDataRep { pres: data.presentation().clone(), parts, alphabet: offset,
            memo: Mutex::new(HashMap::new()),
            generator_perms: OnceLock::new(),
        })
    }

    pub fn presentation(&self) -> &Arc<PcPresentation> {
        &self.pres
    }

    /// `(part, transversal element)` for each letter.
    pub fn letter(&self, x: usize) -> Option<(usize, &GroupElement)> {
        self.parts.iter().enumerate().find_map(|(i, p)| {
            (x >= p.offset && x < p.offset + p.transversal.len()).then(|| (i, &p.transversal[x - p.offset]))
        })
    }

    fn target(&self, part: &Part, j: usize, g: &GroupElement) -> Result<usize> {
        part.vendo.domain().coset_of(&(&part.transversal[j] * g))
    }

    /// Whether `g` moves some first-level letter, stopping at the first one.
    pub fn moves_some_letter(&self, g: &GroupElement) -> Result<bool> {
        if let Some(e) = self.memo.lock().unwrap().get(g.exponents()) {
            return Ok(e.0.iter().enumerate().any(|(i, &p)| i as u32 != p));
        }
        for p in &self.parts {
            for j in 0..p.transversal.len() {
                if self.target(p, j, g)? != j {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    fn compute(&self, g: &GroupElement) -> Result<(Vec<u32>, Vec<GroupElement>)> {
        let mut perm = Vec::with_capacity(self.alphabet);
        let mut states = Vec::with_capacity(self.alphabet);
        for p in &self.parts {
            for t in &p.transversal {
                let (c, k) = p.vendo.domain().split(&(t * g))?;
                states.push(p.vendo.apply_coefficients(&c));
                perm.push((p.offset + k) as u32);
            }
        }
        Ok((perm, states))
    }

    fn generator_perms(&self) -> Result<&[Vec<u32>]> {
        if let Some(p) = self.generator_perms.get() {
            return Ok(p);
        }
        let mut perms = Vec::with_capacity(self.pres.len());
        for i in 0..self.pres.len() {
            let g = GroupElement::generator(&self.pres, i);
            let mut perm = Vec::with_capacity(self.alphabet);
            for p in &self.parts {
                for j in 0..p.transversal.len() {
                    perm.push((p.offset + self.target(p, j, &g)?) as u32);
                }
            }
            perms.push(perm);
        }
        Ok(self.generator_perms.get_or_init(|| perms))
    }

    /// Root permutation of `g`, composed from the generator permutations
    /// (the first-level action is a homomorphism into the symmetric group).
    pub fn permutation(&self, g: &GroupElement) -> Result<Vec<u32>> {
        if let Some(e) = self.memo.lock().unwrap().get(g.exponents()) {
            return Ok(e.0.clone());
        }
        let gens = self.generator_perms()?;
        let mut out: Vec<u32> = (0..self.alphabet as u32).collect();
        for (perm, e) in gens.iter().zip(g.exponents()) {
            if e.is_zero() {
                continue;
            }
            let q = perm_power(perm, e);
            for x in out.iter_mut() {
                *x = q[*x as usize];
            }
        }
        Ok(out)
    }

    pub fn expand_shared(&self, g: &GroupElement) -> Result<Expansion> {
        if let Some(e) = self.memo.lock().unwrap().get(g.exponents()) {
            return Ok(e.clone());
        }
        let e = Arc::new(self.compute(g)?);
        let mut memo = self.memo.lock().unwrap();
        if (memo.len() + 1) * self.alphabet > MEMO_STATES {
            memo.clear();
        }
        memo.insert(g.exponents().to_vec(), e.clone());
        Ok(e)
    }
}

impl TreeAction for GDataRep {
    type State = GroupElement;

    fn alphabet(&self) -> usize {
        self.alphabet
    }

    fn expand(&self, s: &GroupElement) -> Result<(Vec<u32>, Vec<GroupElement>)> {
        let e = self.expand_shared(s)?;
        Ok((e.0.clone(), e.1.clone()))
    }

    fn permutation(&self, s: &GroupElement) -> Result<Vec<u32>> {
        GDataRep::permutation(self, s)
    }

    fn is_trivial_state(&self, s: &GroupElement) -> bool {
        s.is_identity()
    }
}

/// The representation on the coset tree of an injective endomorphism `ψ`:
/// the single-part G-data `ψ^-1 : ψ(G) -> G`.
pub fn build_cosettree_rep(psi: &Endomorphism) -> Result<GDataRep> {
    let v = psi.inverse_on_image()?;
    GDataRep::new(&GData::new(vec![v])?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Detection {
    pub element: GroupElement,
    /// Least level at which the element acts nontrivially.
    pub depth: Option<usize>,
    /// The element lies in the kernel: its state set closed up with only
    /// trivial permutations.
    pub in_kernel: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaithfulReport {
    pub max_depth: usize,
    pub detections: Vec<Detection>,
}

impl FaithfulReport {
    pub fn all_detected(&self) -> bool {
        self.detections.iter().all(|d| d.element.is_identity() || d.depth.is_some())
    }

    pub fn undetected(&self) -> Vec<&GroupElement> {
        self.detections.iter().filter(|d| !d.element.is_identity() && d.depth.is_none()).map(|d| &d.element).collect()
    }
}

/// Least depth at which each element acts nontrivially, up to `d`.
pub fn faithful_to_depth(rep: &GDataRep, elements: &[GroupElement], d: usize) -> Result<FaithfulReport> {
    let mut detections = Vec::new();
    for g in elements {
        detections.push(detect(rep, g, d)?);
    }
    Ok(FaithfulReport { max_depth: d, detections })
}

fn detect(rep: &GDataRep, g: &GroupElement, d: usize) -> Result<Detection> {
    let mut frontier = vec![g.clone()];
    let mut seen: HashSet<GroupElement> = HashSet::new();
    for level in 1..=d {
        frontier.retain(|x| !x.is_identity());
        if frontier.is_empty() {
            return Ok(Detection { element: g.clone(), depth: None, in_kernel: true });
        }
        for x in &frontier {
            if rep.moves_some_letter(x)? {
                return Ok(Detection { element: g.clone(), depth: Some(level), in_kernel: false });
            }
        }
        let mut next = Vec::new();
        for x in &frontier {
            for s in rep.expand_shared(x)?.1.iter() {
                if !s.is_identity() && seen.insert(s.clone()) {
                    next.push(s.clone());
                }
            }
        }
        frontier = next;
    }
    let in_kernel = frontier.iter().all(GroupElement::is_identity);
    Ok(Detection { element: g.clone(), depth: None, in_kernel })
}

/// For `k = 1..=k_max`, whether every exponent of `ψ^{2k}` applied to the
/// weight-1 generators is divisible by `m1^k`.
pub fn divisibility_certificate(psi: &Endomorphism, m1: &BigInt, k_max: usize) -> Vec<(usize, bool)> {
    let pres = psi.presentation();
    let mut gens: Vec<GroupElement> = pres.indices_of_weight(1).map(|i| GroupElement::generator(pres, i)).collect();
    let mut modulus = BigInt::from(1);
    let mut out = Vec::new();
    for k in 1..=k_max {
        gens = gens.iter().map(|g| psi.apply(&psi.apply(g))).collect();
        modulus *= m1;
        let ok = gens.iter().all(|g| g.exponents().iter().all(|e| e.is_multiple_of(&modulus)));
        out.push((k, ok));
    }
    out
}

/// Letters of a word written with one digit per letter (alphabet ≤ 10) or
/// comma-separated numbers.
pub fn parse_tree_word(s: &str, alphabet: usize) -> Result<Vec<u32>> {
    let s = s.trim();
    let letters: Vec<u32> = if s.contains(',') || alphabet > 10 {
        s.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse { pos: 0, msg: format!("bad letter `{t}`") }))
            .collect::<Result<_>>()?
    } else {
        s.chars()
            .enumerate()
            .map(|(i, c)| c.to_digit(10).ok_or_else(|| Error::Parse { pos: i, msg: format!("bad letter `{c}`") }))
            .collect::<Result<_>>()?
    };
    if let Some(x) = letters.iter().find(|&&x| x as usize >= alphabet) {
        return Err(Error::Precondition(format!("letter {x} outside alphabet of size {alphabet}")));
    }
    Ok(letters)
}

pub fn format_tree_word(w: &[u32], alphabet: usize) -> String {
    if alphabet <= 10 {
        w.iter().map(|x| char::from_digit(*x, 10).unwrap()).collect()
    } else {
        w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selfsim::tree::{act_on_word, states, Portrait};
    use crate::zoo::{free_abelian, heisenberg};

    fn el(p: &Arc<PcPresentation>, e: &[i64]) -> GroupElement {
        GroupElement::from_i64(p, e).unwrap()
    }

    #[test]
    fn doubling_gives_the_odometer() {
        let z = free_abelian(1).unwrap();
        let psi = Endomorphism::from_images(&z, vec![el(&z, &[2])]).unwrap();
        let rep = build_cosettree_rep(&psi).unwrap();
        assert_eq!(rep.alphabet(), 2);
        let one = el(&z, &[1]);
        assert_eq!(rep.expand(&one).unwrap(), (vec![1, 0], vec![el(&z, &[0]), el(&z, &[1])]));
        assert_eq!(act_on_word(&rep, &one, &[0, 0, 0]).unwrap(), vec![1, 0, 0]);
        assert_eq!(states(&rep, &one, 4).unwrap().len(), 2);
        let r = faithful_to_depth(&rep, &[el(&z, &[1]), el(&z, &[4])], 6).unwrap();
        assert_eq!(r.detections[0].depth, Some(1));
        assert_eq!(r.detections[1].depth, Some(3));
    }

    #[test]
    fn heisenberg_root_permutation_of_a() {
        let h = heisenberg().unwrap();
        let psi = Endomorphism::from_generator_images(&h, vec![el(&h, &[2, 0, 0]), el(&h, &[0, 2, 0])]).unwrap();
        let rep = build_cosettree_rep(&psi).unwrap();
        assert_eq!(rep.alphabet(), 16);
        let (perm, _) = rep.expand(&el(&h, &[1, 0, 0])).unwrap();
        let order = (1..=16)
            .find(|&k| {
                let mut p: Vec<u32> = (0..16).collect();
                for _ in 0..k {
                    p = p.iter().map(|&x| perm[x as usize]).collect();
                }
                p.iter().enumerate().all(|(i, &x)| i as u32 == x)
            })
            .unwrap();
        // b^-1 a^2 b = a^2 c^2 leaves the image, so a^2 still moves cosets
        assert_eq!(order, 4);
        let img = psi.image().unwrap();
        assert!(!img.contains(&el(&h, &[2, 0, 2])));
        let p = Portrait::of(&rep, &el(&h, &[0, 0, 1]), 3).unwrap();
        assert!(!p.is_identity());
    }

    #[test]
    fn tree_words() {
        assert_eq!(parse_tree_word("0110", 2).unwrap(), vec![0, 1, 1, 0]);
        assert_eq!(parse_tree_word("12,3", 16).unwrap(), vec![12, 3]);
        assert!(parse_tree_word("2", 2).is_err());
        assert_eq!(format_tree_word(&[12, 3], 16), "12,3");
    }
}
