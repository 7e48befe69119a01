use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::PcPresentation;
use crate::error::{Error, Result};

/// An element in normal form over a shared presentation.
#[derive(Clone)]
pub struct GroupElement {
    pres: Arc<PcPresentation>,
    exps: Vec<BigInt>,
}

impl GroupElement {
    pub fn identity(pres: &Arc<PcPresentation>) -> Self {
        GroupElement { pres: pres.clone(), exps: vec![BigInt::zero(); pres.len()] }
    }

    pub fn generator(pres: &Arc<PcPresentation>, i: usize) -> Self {
        let mut e = Self::identity(pres);
        e.exps[i] = BigInt::one();
        e
    }

    pub fn from_exponents(pres: &Arc<PcPresentation>, exps: Vec<BigInt>) -> Result<Self> {
        if exps.len() != pres.len() {
            return Err(Error::RankMismatch { expected: pres.len(), got: exps.len() });
        }
        Ok(GroupElement { pres: pres.clone(), exps })
    }

    pub fn from_i64(pres: &Arc<PcPresentation>, exps: &[i64]) -> Result<Self> {
        Self::from_exponents(pres, exps.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn presentation(&self) -> &Arc<PcPresentation> {
        &self.pres
    }

    pub fn exponents(&self) -> &[BigInt] {
        &self.exps
    }

    pub fn into_exponents(self) -> Vec<BigInt> {
        self.exps
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(Zero::is_zero)
    }

    /// Index of the first nonzero exponent.
    pub fn depth(&self) -> Option<usize> {
        self.exps.iter().position(|x| !x.is_zero())
    }

    fn same_group(&self, other: &GroupElement) -> Result<()> {
        if Arc::ptr_eq(&self.pres, &other.pres) || *self.pres == *other.pres {
            Ok(())
        } else {
            Err(Error::PresentationMismatch)
        }
    }

    pub fn multiply(&self, other: &GroupElement) -> Result<GroupElement> {
        self.same_group(other)?;
        Ok(self.with(self.pres.mul_vec(&self.exps, &other.exps)))
    }

    pub fn inverse(&self) -> GroupElement {
        self.with(self.pres.inv_vec(&self.exps))
    }

    pub fn pow(&self, n: &BigInt) -> GroupElement {
        self.with(self.pres.pow_vec(&self.exps, n))
    }

    pub fn pow_i64(&self, n: i64) -> GroupElement {
        self.pow(&BigInt::from(n))
    }

    /// `[x, y] = x^-1 y^-1 x y`.
    pub fn commutator(&self, other: &GroupElement) -> Result<GroupElement> {
        self.same_group(other)?;
        Ok(self.with(self.pres.comm_vec(&self.exps, &other.exps)))
    }

    /// `y^-1 x y`.
    pub fn conjugate_by(&self, y: &GroupElement) -> Result<GroupElement> {
        self.same_group(y)?;
        let p = &self.pres;
        Ok(self.with(p.mul_vec(&p.mul_vec(&p.inv_vec(&y.exps), &self.exps), &y.exps)))
    }

    /// Exponents at the generators of the given weight, in basis order.
    pub fn graded_image(&self, weight: u8) -> Vec<BigInt> {
        self.pres.indices_of_weight(weight).map(|i| self.exps[i].clone()).collect()
    }

    fn with(&self, exps: Vec<BigInt>) -> GroupElement {
        GroupElement { pres: self.pres.clone(), exps }
    }

    pub(crate) fn format_word(names: &[String], exps: &[BigInt]) -> String {
        let parts: Vec<String> = names
            .iter()
            .zip(exps)
            .filter(|(_, e)| !e.is_zero())
            .map(|(n, e)| if e.is_one() { n.clone() } else { format!("{n}^{e}") })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    /// Word form, e.g. `a^2*[a,b]^-1`.
    pub fn to_word(&self) -> String {
        Self::format_word(self.pres.names(), &self.exps)
    }

    /// Exponent tuple, e.g. `(1, 1, -1, 0, 0)`.
    pub fn to_tuple(&self) -> String {
        let parts: Vec<String> = self.exps.iter().map(|e| e.to_string()).collect();
        format!("({})", parts.join(", "))
    }
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        self.exps == other.exps && (Arc::ptr_eq(&self.pres, &other.pres) || *self.pres == *other.pres)
    }
}

impl Eq for GroupElement {}

impl Hash for GroupElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.exps.hash(state);
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_tuple())
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_word())
    }
}

/// Panics on a presentation mismatch; use [`GroupElement::multiply`] to get an error instead.
impl std::ops::Mul<&GroupElement> for &GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: &GroupElement) -> GroupElement {
        self.multiply(rhs).expect("multiplying elements of different groups")
    }
}
