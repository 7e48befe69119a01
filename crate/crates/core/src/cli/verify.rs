use std::fmt::Write as _;

use clap::ValueEnum;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::pcgroup::{consistency_check, GroupElement};
use crate::subgroup::Subgroup;
use crate::zoo::{
    defining_relations, derived_relations, dm_conjugation, dm_endo, make_group, n34, psi_endo, GroupSpec, RelationCheck,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    N34Relations,
    Psi,
    Dm,
    Consistency,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub passed: bool,
    pub text: String,
}

/// Parameters exercised by the psi suite.
pub const PSI_PARAMETERS: [(i64, i64, i64); 3] = [(2, -1, 1), (2, 0, 0), (3, 1, -1)];

/// Runs a suite, restricted to `only` when given.
pub fn verify_suite(suite: Suite, only: Option<&GroupSpec>) -> Result<SuiteReport> {
    let mut r = Recorder::default();
    match suite {
        Suite::N34Relations => {
            if only.is_some_and(|s| *s != GroupSpec::N34) {
                return Err(Error::InvalidParameter("n34-relations runs on n34 only".into()));
            }
            n34_relations(&mut r)?
        }
        Suite::Psi => {
            let groups = match only {
                Some(s) => vec![s.clone()],
                None => vec![GroupSpec::FreeNilC3R2, GroupSpec::TwoGenC3 { k14: 1, k15: 0 }],
            };
            for g in &groups {
                psi_suite(&mut r, g)?;
            }
        }
        Suite::Dm => {
            let ns = match only {
                Some(GroupSpec::Unitriangular(n)) => vec![*n],
                Some(s) => return Err(Error::InvalidParameter(format!("dm needs a group ut:n, got {s}"))),
                None => vec![3, 4],
            };
            for n in ns {
                for m in [2, 3] {
                    dm_suite(&mut r, n, m)?;
                }
            }
        }
        Suite::Consistency => {
            let groups = match only {
                Some(s) => vec![s.clone()],
                None => vec![
                    GroupSpec::FreeAbelian(3),
                    GroupSpec::Heisenberg,
                    GroupSpec::FreeNilC3R2,
                    GroupSpec::TwoGenC3 { k14: 1, k15: 0 },
                    GroupSpec::Unitriangular(3),
                    GroupSpec::Unitriangular(4),
                    GroupSpec::N34,
                ],
            };
            for g in &groups {
                let report = consistency_check(&*make_group(g)?);
                let what = format!(
                    "{g}: {} overlaps, {} Jacobi triples",
                    report.overlaps_checked, report.jacobi_checked
                );
                match report.first_failure() {
                    None => r.check(true, what),
                    Some(f) => r.check(false, format!("{what}; {f}")),
                }
            }
        }
    }
    Ok(r.finish())
}

#[derive(Default)]
struct Recorder {
    text: String,
    passed: usize,
    failed: usize,
}

impl Recorder {
    fn check(&mut self, ok: bool, what: impl AsRef<str>) {
        let tag = if ok { "pass" } else { "FAIL" };
        let _ = writeln!(self.text, "{tag} {}", what.as_ref());
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }

    fn note(&mut self, what: impl AsRef<str>) {
        let _ = writeln!(self.text, "     {}", what.as_ref());
    }

    fn finish(mut self) -> SuiteReport {
        let verdict = if self.failed == 0 { "PASS" } else { "FAIL" };
        let _ = writeln!(self.text, "{verdict}: {} passed, {} failed", self.passed, self.failed);
        SuiteReport { passed: self.failed == 0, text: self.text }
    }
}

fn relation_line(c: &RelationCheck) -> String {
    if c.holds {
        c.label.clone()
    } else {
        format!("{}: lhs {} rhs {}", c.label, c.lhs.to_tuple(), c.rhs.to_tuple())
    }
}

fn n34_relations(r: &mut Recorder) -> Result<()> {
    let g = n34()?;
    let report = consistency_check(&g);
    r.check(report.passed(), format!("consistency: {} overlaps, {} Jacobi triples", report.overlaps_checked, report.jacobi_checked));
    if let Some(f) = report.first_failure() {
        r.note(f.to_string());
    }
    let defining = defining_relations(&g)?;
    for c in &defining {
        r.check(c.holds, relation_line(c));
    }
    let flipped = defining.iter().filter(|c| !c.rhs.is_identity() && c.flipped_holds).count();
    let nontrivial = defining.iter().filter(|c| !c.rhs.is_identity()).count();
    r.note(format!("sign-flipped forms holding: {flipped} of {nontrivial} two-sided relations"));

    let (mut total, mut stated, mut flip) = (0usize, 0usize, 0usize);
    for m in 1..=3 {
        for n in 1..=3 {
            for k in 1..=3 {
                for j in 1..=3 {
                    for c in derived_relations(&g, m, n, k, j)? {
                        total += 1;
                        stated += usize::from(c.holds);
                        flip += usize::from(!c.rhs.is_identity() && c.flipped_holds);
                        if !c.holds {
                            r.check(false, relation_line(&c));
                        }
                    }
                }
            }
        }
    }
    r.check(stated == total, format!("derived relations over (m,n,k,j) in [1,3]^4: {stated} of {total} hold as stated"));
    r.note(format!("sign-flipped forms holding: {flip}"));
    Ok(())
}

fn all_divisible(g: &GroupElement, m: &BigInt) -> bool {
    g.exponents().iter().all(|e| e.is_multiple_of(m))
}

fn psi_suite(r: &mut Recorder, spec: &GroupSpec) -> Result<()> {
    let g = make_group(spec)?;
    let ab = g.index_of("[a,b]");
    for (m1, m2, m3) in PSI_PARAMETERS {
        let name = format!("psi({m1},{m2},{m3}) on {spec}");
        let psi = match psi_endo(&g, m1, m2, m3) {
            Ok(p) => p,
            Err(e) => {
                r.check(false, format!("{name}: {e}"));
                continue;
            }
        };
        let dets: Vec<String> = psi.graded_determinants()?.iter().map(|d| d.to_string()).collect();
        r.check(true, format!("{name}: injective, graded determinants ({})", dets.join(", ")));
        let m = BigInt::from(m1);
        let (a, b) = (&psi.images()[0], &psi.images()[1]);
        let comm = a.commutator(b)?;
        let square = ab.is_some_and(|i| comm.exponents()[i].abs() == &m * &m);
        r.check(
            all_divisible(&comm, &m) && square,
            format!("{name}: [A,B] = {} is [a,b]^(±{}) times weight 3, all exponents divisible by {m1}", comm.to_tuple(), m1 * m1),
        );
        let (a2, b2) = (psi.apply(a), psi.apply(b));
        r.check(
            all_divisible(&a2, &m) && all_divisible(&b2, &m),
            format!("{name}: psi^2(a) = {}, psi^2(b) = {} divisible by {m1}", a2.to_tuple(), b2.to_tuple()),
        );
    }
    Ok(())
}

fn dm_suite(r: &mut Recorder, n: usize, m: i64) -> Result<()> {
    let name = format!("dm on ut:{n} with m = {m}");
    let expected = num_traits::pow(BigInt::from(m), (n * n * n - n) / 6);
    let f = dm_endo(n, m)?;
    let index = f.domain().index().ok_or(Error::InfiniteIndex)?;
    let det: BigInt = dm_conjugation(n, m)?.graded_determinants()?.iter().product();
    r.check(
        index == expected && det.abs() == index,
        format!("{name}: domain index {index}, expected {expected}, |det| {}", det.abs()),
    );
    let image = Subgroup::sift(f.presentation(), f.images())?;
    r.check(image == Subgroup::whole(f.presentation()), format!("{name}: images generate ut:{n}"));
    Ok(())
}
