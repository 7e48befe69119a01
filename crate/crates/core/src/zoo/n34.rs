use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::Result;
use crate::pcgroup::{parse_expr, Expr, GroupElement, PcPresentation, PresentationBuilder};
use crate::subgroup::Subgroup;

pub const N34_A: usize = 0;
pub const N34_B: usize = 1;
pub const N34_C: usize = 2;
pub const N34_D: usize = 3;

/// Nonzero commutators `[g_j, g_i] = g_l^e` of the basis below.
pub(super) const N34_TABLE: [(usize, usize, usize, i64); 20] = [
    (1, 0, 8, -1),
    (2, 0, 4, -1),
    (3, 0, 5, -1),
    (2, 1, 6, -1),
    (3, 1, 7, -1),
    (3, 2, 9, -1),
    (4, 0, 9, -1),
    (4, 1, 11, -1),
    (4, 2, 8, 1),
    (4, 3, 12, -1),
    (5, 0, 10, -1),
    (5, 1, 12, -1),
    (5, 2, 12, -1),
    (6, 0, 11, -1),
    (6, 2, 10, 1),
    (6, 3, 8, 1),
    (7, 0, 12, -1),
    (7, 1, 9, -1),
    (7, 2, 8, 1),
    (7, 3, 11, -1),
];

fn n34_builder(flip: Option<(usize, usize)>) -> PresentationBuilder {
    let mut b = PresentationBuilder::new();
    let g = |i| Expr::gen(i);
    let (a, bb, c, d) = (
        b.generator("a", 1, None),
        b.generator("b", 1, None),
        b.generator("c", 1, None),
        b.generator("d", 1, None),
    );
    b.generator("[a,c]", 2, Some(Expr::comm(g(a), g(c))));
    b.generator("[a,d]", 2, Some(Expr::comm(g(a), g(d))));
    b.generator("[b,c]", 2, Some(Expr::comm(g(bb), g(c))));
    b.generator("[b,d]", 2, Some(Expr::comm(g(bb), g(d))));
    b.generator("[a,b]", 3, Some(Expr::comm(g(a), g(bb))));
    b.generator("[c,d]", 3, Some(Expr::comm(g(c), g(d))));
    b.generator("[a,[a,d]]", 3, Some(Expr::comm(g(a), Expr::comm(g(a), g(d)))));
    b.generator("[a,[b,c]]", 3, Some(Expr::comm(g(a), Expr::comm(g(bb), g(c)))));
    b.generator("[a,[b,d]]", 3, Some(Expr::comm(g(a), Expr::comm(g(bb), g(d)))));
    for &(j, i, l, e) in &N34_TABLE {
        let e = if flip == Some((j, i)) { -e } else { e };
        b.commutator(j, i, &[(l, e)]);
    }
    b
}

/// The 4-generator class-3 group with 13-element basis
/// `a, b, c, d | [a,c], [a,d], [b,c], [b,d] | [a,b], [c,d], [a,[a,d]], [a,[b,c]], [a,[b,d]]`.
///
/// `[a,b]` and `[c,d]` lie in the third term of the lower central series, so
/// they carry weight 3 and the whole last block is central.
pub fn n34() -> Result<Arc<PcPresentation>> {
    Ok(Arc::new(n34_builder(None).build()?))
}

/// The table of [`n34`] with the sign of `[g_j, g_i]` flipped, validated only
/// structurally.
pub fn n34_with_flipped_sign(j: usize, i: usize) -> Result<PcPresentation> {
    n34_builder(Some((j, i))).build_unchecked()
}

/// `K = <a^m, b^n, c^k, d^j>`.
pub fn n34_subgroup_k(pres: &Arc<PcPresentation>, m: i64, n: i64, k: i64, j: i64) -> Result<Subgroup> {
    Subgroup::sift(pres, &k_generators(pres, m, n, k, j))
}

fn k_generators(pres: &Arc<PcPresentation>, m: i64, n: i64, k: i64, j: i64) -> Vec<GroupElement> {
    [(N34_A, m), (N34_B, n), (N34_C, k), (N34_D, j)]
        .iter()
        .map(|&(g, e)| GroupElement::generator(pres, g).pow_i64(e))
        .collect()
}

/// One relation `lhs = rhs`, evaluated as stated and with the right-hand side
/// inverted.
#[derive(Debug, Clone)]
pub struct RelationCheck {
    pub label: String,
    pub lhs: GroupElement,
    pub rhs: GroupElement,
    pub holds: bool,
    pub flipped_holds: bool,
}

impl RelationCheck {
    fn new(label: String, lhs: GroupElement, rhs: GroupElement) -> Self {
        let holds = lhs == rhs;
        let flipped_holds = lhs == rhs.inverse();
        RelationCheck { label, lhs, rhs, holds, flipped_holds }
    }
}

fn eval_word(pres: &Arc<PcPresentation>, word: &str, images: &[GroupElement]) -> Result<GroupElement> {
    parse_expr(word, pres)?.eval_with(&GroupElement::identity(pres), images)
}

fn check_all(
    pres: &Arc<PcPresentation>,
    images: &[GroupElement],
    rels: &[(&str, BigInt, &str, BigInt)],
    suffix: &str,
) -> Result<Vec<RelationCheck>> {
    rels.iter()
        .map(|(l, le, r, re)| {
            let lhs = eval_word(pres, l, images)?.pow(le);
            let rhs = eval_word(pres, r, images)?.pow(re);
            let label = format!("{}{} = {}{}{}", l, exp_label(le), r, exp_label(re), suffix);
            Ok(RelationCheck::new(label, lhs, rhs))
        })
        .collect()
}

fn exp_label(e: &BigInt) -> String {
    if *e == BigInt::from(1) {
        String::new()
    } else {
        format!("^{e}")
    }
}

/// The defining relations, each block written as `x = y` (a product
/// `x·y^-1 = 1` in the original form, or `x = 1`).
pub fn defining_relations(pres: &Arc<PcPresentation>) -> Result<Vec<RelationCheck>> {
    let gens: Vec<GroupElement> = (0..4).map(|i| GroupElement::generator(pres, i)).collect();
    let one = BigInt::from(1);
    let rels: Vec<(&str, BigInt, &str, BigInt)> = [
        ("[a,[a,b]]", "1"),
        ("[a,b,b]", "1"),
        ("[a,[c,d]]", "1"),
        ("[a,d,d]", "1"),
        ("[b,[b,c]]", "1"),
        ("[b,[c,d]]", "1"),
        ("[c,[c,d]]", "1"),
        ("[c,d,d]", "1"),
        ("[a,[b,c]]", "[a,c,b]^-1"),
        ("[a,[b,d]]", "[a,d,b]^-1"),
        ("[a,[a,d]]", "[b,c,c]"),
        ("[a,[a,c]]", "[b,[b,d]]"),
        ("[a,c,b]", "[b,d,d]"),
        ("[a,c,c]", "[b,d,c]"),
        ("[a,d,b]", "[a,d,c]"),
        ("[a,b]", "[a,c,c]"),
        ("[c,d]", "[a,[a,c]]"),
    ]
    .iter()
    .map(|&(l, r)| (l, one.clone(), r, one.clone()))
    .collect();
    check_all(pres, &gens, &rels, "")
}

/// The relations satisfied by `a1 = a^m, b1 = b^n, c1 = c^k, d1 = d^j`.
pub fn derived_relations(pres: &Arc<PcPresentation>, m: i64, n: i64, k: i64, j: i64) -> Result<Vec<RelationCheck>> {
    let gens = k_generators(pres, m, n, k, j);
    let b = BigInt::from;
    let rels: Vec<(&str, BigInt, &str, BigInt)> = vec![
        ("[a,[a,b]]", b(1), "1", b(1)),
        ("[a,b,b]", b(1), "1", b(1)),
        ("[a,[c,d]]", b(1), "1", b(1)),
        ("[a,d,d]", b(1), "1", b(1)),
        ("[b,[b,c]]", b(1), "1", b(1)),
        ("[b,[c,d]]", b(1), "1", b(1)),
        ("[c,[c,d]]", b(1), "1", b(1)),
        ("[c,d,d]", b(1), "1", b(1)),
        ("[a,[b,c]]", b(1), "[a,c,b]", b(-1)),
        ("[a,[b,d]]", b(1), "[a,d,b]", b(-1)),
        ("[a,[a,d]]", b(n * k * k), "[b,c,c]", b(m * m * j)),
        ("[a,[a,c]]", b(n * n * j), "[b,[b,d]]", b(m * m * k)),
        ("[a,c,b]", b(j * j), "[b,d,d]", b(m * k)),
        ("[a,c,c]", b(n * j), "[b,d,c]", b(m * k)),
        ("[a,d,b]", b(k), "[a,d,c]", b(n)),
        ("[a,b]", b(k * k), "[a,c,c]", b(n)),
        ("[c,d]", b(m * m), "[a,[a,c]]", b(j)),
    ];
    let suffix = format!(" at (m,n,k,j) = ({m},{n},{k},{j})");
    check_all(pres, &gens, &rels, &suffix)
}
