use super::*;
use std::sync::Arc;
use crate::zoo::{free_nil_c3_r2, heisenberg, n34};

fn el(p: &Arc<PcPresentation>, e: &[i64]) -> GroupElement {
    GroupElement::from_i64(p, e).unwrap()
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[test]
fn swapping_generators_leaves_a_commutator() {
    let g = free_nil_c3_r2().unwrap();
    let (a, b) = (GroupElement::generator(&g, 0), GroupElement::generator(&g, 1));
    assert_eq!(&b * &a, el(&g, &[1, 1, -1, 0, 0]));
    assert_eq!(a.commutator(&b).unwrap(), el(&g, &[0, 0, 1, 0, 0]));
}

#[test]
fn heisenberg_products() {
    let h = heisenberg().unwrap();
    assert!(consistency_check(&h).passed());
    let x = el(&h, &[2, 3, 0]);
    let y = el(&h, &[-1, 4, 5]);
    // b^3 a^-1 = a^-1 b^3 c^3
    assert_eq!(&x * &y, el(&h, &[1, 7, 8]));
    // x^2 = a^4 b^6 c^-6, and reversing b^-6 past a^-4 costs c^-24
    assert_eq!(x.pow_i64(-2), el(&h, &[-4, -6, -18]));
    assert!((&x * &x.inverse()).is_identity());
}

#[test]
fn words_parse_and_evaluate() {
    let g = free_nil_c3_r2().unwrap();
    let eval = |s: &str| parse_expr(s, &g).unwrap().eval(&g).unwrap();
    // moving b left past [a,b]^-1 leaves [a,b,b]^-1
    assert_eq!(eval("a^2*[a,b]^-1*b"), el(&g, &[2, 1, -1, 0, -1]));
    assert_eq!(eval("[a,b,a]"), el(&g, &[0, 0, 0, 1, 0]));
    assert_eq!(eval("[[a,b],b]"), eval("[a,b,b]"));
    assert_eq!(eval("[b,a]"), eval("[a,b]^-1"));
    assert!(eval("1").is_identity());
    assert!(parse_expr("a*q", &g).is_err());
    assert!(parse_expr("[a,b", &g).is_err());
}

#[test]
fn graded_parts() {
    let g = free_nil_c3_r2().unwrap();
    let x = el(&g, &[3, -1, 2, 5, -7]);
    assert_eq!(x.graded_image(1), big(&[3, -1]));
    assert_eq!(x.graded_image(2), big(&[2]));
    assert_eq!(x.graded_image(3), big(&[5, -7]));
    assert_eq!(x.depth(), Some(0));
    assert_eq!(el(&g, &[0, 0, 0, 0, 1]).depth(), Some(4));
    assert_eq!(GroupElement::identity(&g).depth(), None);
}

#[test]
fn n34_left_normed_against_nested() {
    let g = n34().unwrap();
    let eval = |s: &str| parse_expr(s, &g).unwrap().eval(&g).unwrap();
    assert_eq!(eval("[[a,c],b]"), eval("[a,[b,c]]").inverse());
    assert_eq!(eval("[a,c,b]"), eval("[[a,c],b]"));
}

#[test]
fn centers() {
    let g = free_nil_c3_r2().unwrap();
    let z = g.center_lattice();
    assert_eq!(z.rank(), 2);
    assert!(z.contains(&big(&[0, 0, 0, 1, 0])).unwrap());
    assert!(!z.contains(&big(&[0, 0, 1, 0, 0])).unwrap());
    let h = heisenberg().unwrap();
    assert_eq!(h.nilpotency_class(), 2);
    assert_eq!(g.nilpotency_class(), 3);
}

#[test]
fn mismatched_groups_are_rejected() {
    let g = free_nil_c3_r2().unwrap();
    let h = heisenberg().unwrap();
    assert!(GroupElement::generator(&g, 0).commutator(&GroupElement::generator(&h, 0)).is_err());
    assert!(GroupElement::from_i64(&h, &[1, 2]).is_err());
}
