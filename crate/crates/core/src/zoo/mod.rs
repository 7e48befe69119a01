//! Named groups and endomorphisms: free abelian groups, the Heisenberg group,
//! 2-generated class-3 groups, unitriangular groups and the 4-generated
//! class-3 group `N_{3,4}`.

mod endos;
mod n34;
mod unitriangular;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::intlattice::{snf, xgcd, IntMatrix};
use crate::pcgroup::{Expr, PcPresentation, PresentationBuilder};

pub use endos::{dm_conjugation, dm_endo, psi_endo, psi_params, scaling_endo};
pub use n34::{
    defining_relations, derived_relations, n34, n34_subgroup_k, n34_with_flipped_sign, RelationCheck, N34_A, N34_B, N34_C, N34_D,
};
pub use unitriangular::{unitriangular, ut_positions, UTMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    FreeAbelian(usize),
    Heisenberg,
    FreeNilC3R2,
    TwoGenC3 { k14: i64, k15: i64 },
    Unitriangular(usize),
    N34,
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// `free_abelian:3`, `heisenberg`, `free_nil_c3_r2`, `two_gen_c3:1,0`, `ut:4`, `n34`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let unknown = || Error::UnknownSpec(s.to_string());
        let int = |t: &str| t.trim().parse::<i64>().map_err(|_| unknown());
        Ok(match (head, arg) {
            ("free_abelian", Some(n)) => GroupSpec::FreeAbelian(int(n)?.try_into().map_err(|_| unknown())?),
            ("heisenberg", None) => GroupSpec::Heisenberg,
            ("free_nil_c3_r2", None) => GroupSpec::FreeNilC3R2,
            ("two_gen_c3", Some(a)) => {
                let (x, y) = a.split_once(',').ok_or_else(unknown)?;
                GroupSpec::TwoGenC3 { k14: int(x)?, k15: int(y)? }
            }
            ("ut" | "unitriangular", Some(n)) => GroupSpec::Unitriangular(int(n)?.try_into().map_err(|_| unknown())?),
            ("n34", None) => GroupSpec::N34,
            _ => return Err(unknown()),
        })
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::FreeAbelian(n) => write!(f, "free_abelian:{n}"),
            GroupSpec::Heisenberg => write!(f, "heisenberg"),
            GroupSpec::FreeNilC3R2 => write!(f, "free_nil_c3_r2"),
            GroupSpec::TwoGenC3 { k14, k15 } => write!(f, "two_gen_c3:{k14},{k15}"),
            GroupSpec::Unitriangular(n) => write!(f, "ut:{n}"),
            GroupSpec::N34 => write!(f, "n34"),
        }
    }
}

pub fn make_group(spec: &GroupSpec) -> Result<Arc<PcPresentation>> {
    match *spec {
        GroupSpec::FreeAbelian(n) => free_abelian(n),
        GroupSpec::Heisenberg => heisenberg(),
        GroupSpec::FreeNilC3R2 => two_gen_c3(0, 0),
        GroupSpec::TwoGenC3 { k14, k15 } => two_gen_c3(k14, k15),
        GroupSpec::Unitriangular(n) => unitriangular(n),
        GroupSpec::N34 => n34(),
    }
}

fn letter_names(n: usize) -> Vec<String> {
    if n <= 26 {
        (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

pub fn free_abelian(n: usize) -> Result<Arc<PcPresentation>> {
    let mut b = PresentationBuilder::new();
    for name in letter_names(n) {
        b.generator(name, 1, None);
    }
    Ok(Arc::new(b.build()?))
}

/// `a, b, c = [a,b]`.
pub fn heisenberg() -> Result<Arc<PcPresentation>> {
    let mut b = PresentationBuilder::new();
    let a = b.generator("a", 1, None);
    let bb = b.generator("b", 1, None);
    let c = b.generator("c", 2, Some(Expr::comm(Expr::gen(a), Expr::gen(bb))));
    b.commutator(bb, a, &[(c, -1)]);
    Ok(Arc::new(b.build()?))
}

pub fn free_nil_c3_r2() -> Result<Arc<PcPresentation>> {
    two_gen_c3(0, 0)
}

/// The free nilpotent class-3 group on `a, b` modulo the central relator
/// `[a,b,a]^k14 [a,b,b]^k15`.
///
/// Basis `a, b, [a,b]` and then either `[a,b,a], [a,b,b]` (both parameters
/// zero) or a single weight-3 generator `z` spanning the rank-1 quotient of
/// the weight-3 layer.
pub fn two_gen_c3(k14: i64, k15: i64) -> Result<Arc<PcPresentation>> {
    let (p14, p15) = (BigInt::from(k14), BigInt::from(k15));
    let mut b = PresentationBuilder::new();
    let a = b.generator("a", 1, None);
    let bg = b.generator("b", 1, None);
    let c = b.generator("[a,b]", 2, Some(Expr::comm(Expr::gen(a), Expr::gen(bg))));
    b.commutator(bg, a, &[(c, -1)]);
    let caa = Expr::comm(Expr::gen(c), Expr::gen(a));
    let cbb = Expr::comm(Expr::gen(c), Expr::gen(bg));
    if k14 == 0 && k15 == 0 {
        let u = b.generator("[a,b,a]", 3, Some(caa));
        let v = b.generator("[a,b,b]", 3, Some(cbb));
        b.commutator(c, a, &[(u, 1)]);
        b.commutator(c, bg, &[(v, 1)]);
        return Ok(Arc::new(b.build()?));
    }
    let factors = snf(&IntMatrix::from_rows(2, vec![vec![p14.clone(), p15.clone()]]));
    if factors.iter().any(|d| !d.is_one() && !d.is_zero()) {
        return Err(Error::TorsionQuotient(factors.iter().map(|d| d.to_string()).collect()));
    }
    // Z^2 / <(k14, k15)> -> Z,  (x, y) |-> y·k14 - x·k15
    let (_, s, t) = xgcd(&p14, &p15);
    // z = [a,b,a]^p [a,b,b]^q with q·k14 - p·k15 = 1
    let (p, q) = (-t, s);
    let name = match (i64::try_from(&p).ok(), i64::try_from(&q).ok()) {
        (Some(0), Some(1)) => "[a,b,b]".to_string(),
        (Some(1), Some(0)) => "[a,b,a]".to_string(),
        _ => "z".to_string(),
    };
    let def = Expr::Product(vec![caa.pow(p), cbb.pow(q)]);
    let z = b.generator(name, 3, Some(def));
    b.commutator_big(c, a, vec![(z, -p15)]);
    b.commutator_big(c, bg, vec![(z, p14)]);
    Ok(Arc::new(b.build()?))
}
