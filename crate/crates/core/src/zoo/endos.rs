use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use super::unitriangular::{unitriangular, ut_positions};
use crate::error::{Error, Result};
use crate::pcgroup::{GroupElement, PcPresentation};
use crate::selfsim::{Endomorphism, VirtualEndomorphism};

/// `g ↦ g^s` on the weight-1 generators, extended through the basis.
pub fn scaling_endo(pres: &Arc<PcPresentation>, s: i64) -> Result<Endomorphism> {
    let images = pres.indices_of_weight(1).map(|i| GroupElement::generator(pres, i).pow_i64(s)).collect();
    Endomorphism::from_generator_images(pres, images)
}

/// Conjugation by `diag(1, m, …, m^{n-1})` on `Tr_1(n, Z)`: `t_ij ↦ t_ij^{m^{j-i}}`.
pub fn dm_conjugation(n: usize, m: i64) -> Result<Endomorphism> {
    if m < 1 {
        return Err(Error::InvalidParameter(format!("scaling factor {m} must be positive")));
    }
    let pres = unitriangular(n)?;
    let images = ut_positions(n)
        .iter()
        .enumerate()
        .map(|(l, &(i, j))| GroupElement::generator(&pres, l).pow(&num_traits::pow(BigInt::from(m), j - i)))
        .collect();
    Endomorphism::from_images(&pres, images)
}

/// The inverse of [`dm_conjugation`] on its image: a surjective virtual
/// endomorphism of `Tr_1(n, Z)` with domain of index `m^{(n³-n)/6}`.
pub fn dm_endo(n: usize, m: i64) -> Result<VirtualEndomorphism> {
    dm_conjugation(n, m)?.inverse_on_image()
}

/// `m1 = k11·d`, `m2 = k13·d - d·m1·k13 - m1(m1-1)/2`,
/// `m3 = -k12·d + d·m1·k12 + m1(m1-1)/2`.
pub fn psi_params(k11: i64, k12: i64, k13: i64, d: i64) -> (BigInt, BigInt, BigInt) {
    let (k11, k12, k13, d) = (BigInt::from(k11), BigInt::from(k12), BigInt::from(k13), BigInt::from(d));
    let m1 = &k11 * &d;
    let half = &m1 * (&m1 - BigInt::one()) / 2;
    let m2 = &k13 * &d - &d * &m1 * &k13 - &half;
    let m3 = -(&k12 * &d) + &d * &m1 * &k12 + &half;
    (m1, m2, m3)
}

/// `a ↦ a^{m1} [a,b]^{m2}`, `b ↦ b^{m1} [a,b]^{m3}` on a 2-generated class-3
/// group with basis `a, b, [a,b], …`.
pub fn psi_endo(pres: &Arc<PcPresentation>, m1: i64, m2: i64, m3: i64) -> Result<Endomorphism> {
    if m1 < 1 {
        return Err(Error::InvalidParameter(format!("m1 = {m1} must be at least 1")));
    }
    let ab = pres.index_of("[a,b]").ok_or_else(|| Error::UnknownGenerator("[a,b]".into()))?;
    if pres.abelian_rank() != 2 {
        return Err(Error::InvalidParameter("expected two weight-1 generators".into()));
    }
    let c = GroupElement::generator(pres, ab);
    let a = &GroupElement::generator(pres, 0).pow_i64(m1) * &c.pow_i64(m2);
    let b = &GroupElement::generator(pres, 1).pow_i64(m1) * &c.pow_i64(m3);
    let psi = Endomorphism::from_generator_images(pres, vec![a, b])?;
    if !psi.is_injective()? {
        return Err(Error::NotInjective("induced graded map is singular".into()));
    }
    Ok(psi)
}
