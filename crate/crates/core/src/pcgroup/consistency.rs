use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::PcPresentation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    /// `(g_k g_j) g_i != g_k (g_j g_i)`
    Associativity,
    /// `[[x,y],z]·[[y,z],x]·[[z,x],y] != 1`
    Jacobi,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyFailure {
    pub kind: FailureKind,
    /// Generator indices `(i, j, k)` with `i < j < k`.
    pub triple: (usize, usize, usize),
    pub names: (String, String, String),
    pub detail: String,
}

impl fmt::Display for ConsistencyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b, c) = &self.names;
        write!(f, "{:?} fails on ({a}, {b}, {c}): {}", self.kind, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub overlaps_checked: usize,
    pub jacobi_checked: usize,
    pub failures: Vec<ConsistencyFailure>,
}

impl ConsistencyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn first_failure(&self) -> Option<&ConsistencyFailure> {
        self.failures.first()
    }
}

/// Checks all overlaps `(g_k g_j) g_i = g_k (g_j g_i)` for `i < j < k` and the
/// Jacobi identity on weight-1 triples. Every failure is recorded in
/// generator order.
pub fn consistency_check(p: &PcPresentation) -> ConsistencyReport {
    let n = p.len();
    let unit = |i: usize| {
        let mut v = vec![BigInt::zero(); n];
        v[i] = BigInt::one();
        v
    };
    let names = |i: usize, j: usize, k: usize| (p.name(i).to_string(), p.name(j).to_string(), p.name(k).to_string());
    let mut report = ConsistencyReport { overlaps_checked: 0, jacobi_checked: 0, failures: Vec::new() };
    for k in 0..n {
        for j in 0..k {
            for i in 0..j {
                let (gi, gj, gk) = (unit(i), unit(j), unit(k));
                let lhs = p.mul_vec(&p.mul_vec(&gk, &gj), &gi);
                let rhs = p.mul_vec(&gk, &p.mul_vec(&gj, &gi));
                report.overlaps_checked += 1;
                if lhs != rhs {
                    report.failures.push(ConsistencyFailure {
                        kind: FailureKind::Associativity,
                        triple: (i, j, k),
                        names: names(i, j, k),
                        detail: format!("{} vs {}", fmt_vec(&lhs), fmt_vec(&rhs)),
                    });
                }
            }
        }
    }
    let r = p.abelian_rank();
    for i in 0..r {
        for j in i + 1..r {
            for k in j + 1..r {
                let (x, y, z) = (unit(i), unit(j), unit(k));
                let t1 = p.comm_vec(&p.comm_vec(&x, &y), &z);
                let t2 = p.comm_vec(&p.comm_vec(&y, &z), &x);
                let t3 = p.comm_vec(&p.comm_vec(&z, &x), &y);
                let prod = p.mul_vec(&p.mul_vec(&t1, &t2), &t3);
                report.jacobi_checked += 1;
                if prod.iter().any(|e| !e.is_zero()) {
                    report.failures.push(ConsistencyFailure {
                        kind: FailureKind::Jacobi,
                        triple: (i, j, k),
                        names: names(i, j, k),
                        detail: format!("product is {}", fmt_vec(&prod)),
                    });
                }
            }
        }
    }
    report
}

fn fmt_vec(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}
