//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line;
//! run with `--nocapture` to see them.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selfsim::cli::run;
use selfsim::pcgroup::{consistency_check, parse_expr, GroupElement, PcPresentation};
use selfsim::selfsim::{
    act_on_word, build_cosettree_rep, divisibility_certificate, faithful_to_depth, fcore_witness, parse_gdata,
    states, Endomorphism, GData, GDataRep, Portrait, VirtualEndomorphism, WitnessKind, WitnessOutcome,
};
use selfsim::subgroup::Subgroup;
use selfsim::zoo::{
    defining_relations, derived_relations, dm_conjugation, free_abelian, free_nil_c3_r2, heisenberg, n34,
    n34_subgroup_k, psi_endo, scaling_endo, two_gen_c3,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|x| x.to_string())
}

/// Runs one criterion, prints its line and fails the test on a failure.
fn criterion(n: u32, title: &str, limit: Option<Duration>, body: impl FnOnce() -> Outcome) {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|p| {
        Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
    });
    let took = start.elapsed();
    let outcome = match (outcome, limit) {
        (Ok(_), Some(l)) if took > l => Err(format!("took {took:.2?}, limit {l:?}")),
        (o, _) => o,
    };
    match outcome {
        Ok(detail) => println!("PASS criterion {n}: {title}: {detail} [{took:.2?}]"),
        Err(msg) => {
            println!("FAIL criterion {n}: {title}: {msg} [{took:.2?}]");
            panic!("criterion {n} failed: {msg}");
        }
    }
}

fn el(pres: &Arc<PcPresentation>, w: &str) -> GroupElement {
    parse_expr(w, pres).unwrap().eval(pres).unwrap()
}

fn random_element(rng: &mut ChaCha8Rng, pres: &Arc<PcPresentation>, r: i64) -> GroupElement {
    let exps: Vec<i64> = (0..pres.len()).map(|_| rng.gen_range(-r..=r)).collect();
    GroupElement::from_i64(pres, &exps).unwrap()
}

fn divisible(g: &GroupElement, m: &BigInt) -> bool {
    g.exponents().iter().all(|x| x.is_multiple_of(m))
}

#[test]
fn n34_presentation_is_valid() {
    criterion(1, "n34 defining relations and consistency", Some(Duration::from_secs(10)), || {
        let g = e(n34())?;
        let report = consistency_check(&g);
        ensure(report.passed(), || format!("consistency: {:?}", report.first_failure().map(|f| f.to_string())))?;
        let rels = e(defining_relations(&g))?;
        let bad: Vec<&str> = rels.iter().filter(|c| !c.holds).map(|c| c.label.as_str()).collect();
        ensure(bad.is_empty(), || format!("relations failing: {bad:?}"))?;
        Ok(format!(
            "{} relations hold, {} overlaps and {} Jacobi triples consistent",
            rels.len(),
            report.overlaps_checked,
            report.jacobi_checked
        ))
    });
}

#[test]
fn derived_relations_hold() {
    criterion(2, "derived relations over [1,3]^4", Some(Duration::from_secs(60)), || {
        let g = e(n34())?;
        let (mut tuples, mut total) = (0, 0);
        for m in 1..=3 {
            for n in 1..=3 {
                for k in 1..=3 {
                    for j in 1..=3 {
                        tuples += 1;
                        for c in e(derived_relations(&g, m, n, k, j))? {
                            total += 1;
                            ensure(c.holds, || format!("({m},{n},{k},{j}) {}", c.label))?;
                        }
                    }
                }
            }
        }
        ensure(tuples == 81, || format!("{tuples} tuples"))?;
        Ok(format!("{total} relations over {tuples} tuples"))
    });
}

/// Repeatedly applies `f` to a central element; a nontrivial `f`-invariant
/// central subgroup would keep the orbit inside the domain forever.
fn leaves_domain(f: &VirtualEndomorphism, z: &GroupElement, steps: usize) -> bool {
    let mut x = z.clone();
    for _ in 0..steps {
        match f.apply(&x) {
            Ok(y) => x = y,
            Err(_) => return true,
        }
    }
    false
}

#[test]
fn unitriangular_scaling_is_faithful() {
    criterion(3, "dm on ut(n), n in {3,4}, m in {2,3}", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut lines = Vec::new();
        for n in [3usize, 4] {
            for m in [2i64, 3] {
                let psi = e(dm_conjugation(n, m))?;
                let f = e(psi.inverse_on_image())?;
                let pres = psi.presentation().clone();
                let expected = num_traits::pow(BigInt::from(m), (n * n * n - n) / 6);
                let index = f.domain().index().ok_or("infinite index")?;
                let det: BigInt = e(psi.graded_determinants())?.iter().product();
                ensure(index == expected && det.abs() == expected, || {
                    format!("ut({n}), m={m}: index {index}, |det| {}, expected {expected}", det.abs())
                })?;
                let image = e(Subgroup::sift(&pres, f.images()))?;
                ensure(image == Subgroup::whole(&pres), || format!("ut({n}), m={m}: not recurrent"))?;

                // the center is <t_1n>; every nontrivial central element eventually leaves the domain
                let corner = GroupElement::generator(&pres, pres.len() - 1);
                for k in 1..=12 {
                    for z in [corner.pow_i64(k), corner.pow_i64(-k * m.pow(3))] {
                        ensure(leaves_domain(&f, &z, 64), || format!("ut({n}), m={m}: {z} stays in the domain"))?;
                    }
                }
                ensure(matches!(e(fcore_witness(&e(GData::new(vec![f.clone()]))?))?, WitnessOutcome::NoneFound { .. }), || {
                    format!("ut({n}), m={m}: witness found")
                })?;

                let rep = e(build_cosettree_rep(&psi))?;
                let mut sample = Vec::new();
                while sample.len() < 50 {
                    let x = random_element(&mut rng, &pres, 3);
                    if !x.is_identity() {
                        sample.push(x);
                    }
                }
                let report = e(faithful_to_depth(&rep, &sample, 8))?;
                ensure(report.all_detected(), || format!("ut({n}), m={m}: undetected {:?}", report.undetected()))?;
                let deepest = report.detections.iter().filter_map(|d| d.depth).max().unwrap_or(0);
                lines.push(format!("ut({n}) m={m} index {index} depth<={deepest}"));
            }
        }
        Ok(lines.join("; "))
    });
}

/// Every element with all exponents in `[-r, r]`.
fn box_elements(pres: &Arc<PcPresentation>, r: i64) -> Vec<GroupElement> {
    let n = pres.len();
    let side = 2 * r + 1;
    (0..side.pow(n as u32))
        .map(|mut k| {
            let exps: Vec<i64> = (0..n)
                .map(|_| {
                    let x = k % side - r;
                    k /= side;
                    x
                })
                .collect();
            GroupElement::from_i64(pres, &exps).unwrap()
        })
        .collect()
}

#[test]
fn psi_mechanism() {
    criterion(4, "psi on free_nil_c3_r2 and two_gen_c3(1,0)", None, || {
        let mut lines = Vec::new();
        for (name, g) in [("free_nil_c3_r2", e(free_nil_c3_r2())?), ("two_gen_c3:1,0", e(two_gen_c3(1, 0))?)] {
            let ab = g.index_of("[a,b]").ok_or("no [a,b]")?;
            let test_elements: Vec<GroupElement> =
                box_elements(&g, 2).into_iter().filter(|x| !x.is_identity()).collect();
            for (m1, m2, m3) in [(2, -1, 1), (2, 0, 0), (3, 1, -1)] {
                let tag = format!("{name} ({m1},{m2},{m3})");
                let psi = e(psi_endo(&g, m1, m2, m3))?;
                ensure(e(psi.is_injective())?, || format!("{tag}: not injective"))?;
                let m = BigInt::from(m1);
                let (a, b) = (&psi.images()[0], &psi.images()[1]);
                let comm = e(a.commutator(b))?;
                ensure(comm.exponents()[..ab].iter().all(Zero::is_zero), || format!("{tag}: [A,B] = {comm} has weight 1"))?;
                ensure(comm.exponents()[ab].abs() == &m * &m, || format!("{tag}: [A,B] = {comm}"))?;
                ensure(divisible(&comm, &m), || format!("{tag}: [A,B] = {comm} not in G^{m1}"))?;
                let (a2, b2) = (psi.apply(a), psi.apply(b));
                ensure(divisible(&a2, &m) && divisible(&b2, &m), || format!("{tag}: psi^2 = {a2}, {b2}"))?;
                let cert = divisibility_certificate(&psi, &m, 3);
                ensure(cert.iter().all(|&(_, ok)| ok), || format!("{tag}: certificate {cert:?}"))?;

                let rep = e(build_cosettree_rep(&psi))?;
                let report = e(faithful_to_depth(&rep, &test_elements, 10))?;
                ensure(report.all_detected(), || format!("{tag}: {} undetected", report.undetected().len()))?;
                let deepest = report.detections.iter().filter_map(|d| d.depth).max().unwrap_or(0);
                lines.push(format!("{tag} [A,B]={} depth<={deepest}", comm.to_tuple()));
            }
        }
        Ok(lines.join("; "))
    });
}

#[test]
fn odometer() {
    criterion(5, "adding machine", None, || {
        let z = e(free_abelian(1))?;
        let rep = e(build_cosettree_rep(&e(scaling_endo(&z, 2))?))?;
        let one = GroupElement::generator(&z, 0);
        for k in 0..8u32 {
            let word: Vec<u32> = (0..3).map(|i| (k >> i) & 1).collect();
            let want: Vec<u32> = (0..3).map(|i| ((k + 1) % 8 >> i) & 1).collect();
            let got = e(act_on_word(&rep, &one, &word))?;
            ensure(got == want, || format!("{word:?} -> {got:?}, expected {want:?}"))?;
        }
        let s = e(states(&rep, &one, 6))?;
        ensure(s.len() == 2, || format!("{} states", s.len()))?;
        Ok("8 words incremented, 2 states".into())
    });
}

fn n34_two_parts(g: &Arc<PcPresentation>) -> GData {
    let text = std::fs::read_to_string(format!("{}/data/n34_two_parts.gdata", env!("CARGO_MANIFEST_DIR"))).unwrap();
    parse_gdata(&text, g).unwrap()
}

/// Index-2 G-data on n34: the inclusion of `{x : ε_a(x) even}` and
/// conjugation by `a` on `{x : ε_b(x) even}`.
fn n34_index_two(g: &Arc<PcPresentation>) -> GData {
    let even = |i: usize| {
        let gens: Vec<GroupElement> =
            (0..g.len()).map(|j| GroupElement::generator(g, j).pow_i64(if i == j { 2 } else { 1 })).collect();
        Subgroup::sift(g, &gens).unwrap()
    };
    let conj = VirtualEndomorphism::inner(&el(g, "a")).restrict(&even(1)).unwrap();
    GData::new(vec![inclusion(even(0)), conj]).unwrap()
}

/// 200 random pairs checked at depth 4, with exponents in `[-r, r]`.
fn homomorphism_pairs(name: &str, rep: &GDataRep, r: i64, seed: u64) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = rep.presentation();
    for _ in 0..200 {
        let x = random_element(&mut rng, p, r);
        let y = random_element(&mut rng, p, r);
        let px = e(Portrait::of(rep, &x, 4))?;
        let py = e(Portrait::of(rep, &y, 4))?;
        let pxy = e(Portrait::of(rep, &(&x * &y), 4))?;
        ensure(pxy == e(px.compose(&py))?, || format!("{name}: product of {x} and {y}"))?;
        ensure(e(Portrait::of(rep, &x.inverse(), 4))? == px.inverse(), || format!("{name}: inverse of {x}"))?;
    }
    Ok(format!("{name} {:.1?}", start.elapsed()))
}

#[test]
fn portraits_are_homomorphic() {
    criterion(6, "portrait homomorphism at depth 4", None, || {
        let z3 = e(free_abelian(3))?;
        let h = e(heisenberg())?;
        let fnil = e(free_nil_c3_r2())?;
        let tg = e(two_gen_c3(1, 0))?;
        let g34 = e(n34())?;
        // (group, representation, exponent range); at 1024 letters a depth-4
        // portrait of a large element costs seconds
        let reps: Vec<(&str, GDataRep, i64)> = vec![
            ("free_abelian:3", e(build_cosettree_rep(&e(scaling_endo(&z3, 2))?))?, 3),
            ("heisenberg", e(build_cosettree_rep(&e(scaling_endo(&h, 2))?))?, 3),
            ("free_nil_c3_r2", e(build_cosettree_rep(&e(psi_endo(&fnil, 2, -1, 1))?))?, 1),
            ("two_gen_c3:1,0", e(build_cosettree_rep(&e(psi_endo(&tg, 2, -1, 1))?))?, 3),
            ("ut:3", e(build_cosettree_rep(&e(dm_conjugation(3, 2))?))?, 3),
            ("ut:4", e(build_cosettree_rep(&e(dm_conjugation(4, 2))?))?, 1),
            ("n34", e(GDataRep::new(&n34_index_two(&g34)))?, 3),
        ];
        let results: Vec<Outcome> = std::thread::scope(|scope| {
            let handles: Vec<_> = reps
                .iter()
                .enumerate()
                .map(|(i, (name, rep, r))| scope.spawn(move || homomorphism_pairs(name, rep, *r, 6 + i as u64)))
                .collect();
            handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err("panicked".into()))).collect()
        });
        let timings = results.into_iter().collect::<Result<Vec<_>, _>>()?;
        Ok(format!("200 pairs each: {}", timings.join(", ")))
    });
}

fn inclusion(k: Subgroup) -> VirtualEndomorphism {
    let gens = k.sequence().to_vec();
    VirtualEndomorphism::new(k, gens).unwrap()
}

/// Valid G-data on n34 of every flavour.
fn n34_corpus(g: &Arc<PcPresentation>) -> Vec<(&'static str, GData)> {
    let k2111 = n34_subgroup_k(g, 2, 1, 1, 1).unwrap();
    let k1123 = n34_subgroup_k(g, 1, 1, 2, 3).unwrap();
    // n34 has no diagonal power maps, so the scaled maps factor through the abelianization
    let endo = |ws: [&str; 4]| Endomorphism::from_generator_images(g, ws.iter().map(|w| el(g, w)).collect()).unwrap();
    let a_scaled = endo(["a^2", "1", "1", "1"]);
    let ac_scaled = endo(["a^2", "1", "a^3", "1"]);
    let into_center = endo(["[c,d]^2", "1", "1", "[a,[b,d]]^-3"]);
    let twist = endo(["a*[c,d]", "b", "c", "d*[a,b]^-1"]);
    let inner_a = VirtualEndomorphism::inner(&el(g, "a"));
    let one = |f: VirtualEndomorphism| GData::new(vec![f]).unwrap();
    vec![
        ("identity", one(VirtualEndomorphism::identity(g))),
        ("inner by a", one(inner_a.clone())),
        ("inner by b*d", one(VirtualEndomorphism::inner(&el(g, "b*d")))),
        ("trivial on G", one(VirtualEndomorphism::trivial(Subgroup::whole(g)))),
        ("trivial on K(2,1,1,1)", one(VirtualEndomorphism::trivial(k2111.clone()))),
        ("inclusion of K(2,1,1,1)", one(inclusion(k2111.clone()))),
        ("inclusion of K(1,1,2,3)", one(inclusion(k1123.clone()))),
        ("a-exponent scaled into <a>", one(a_scaled.as_virtual())),
        ("a- and c-exponents scaled into <a>", one(ac_scaled.as_virtual())),
        ("scaled into the center", one(into_center.as_virtual())),
        ("central twist", one(twist.as_virtual())),
        ("central twist on K(2,1,1,1)", one(twist.as_virtual().restrict(&k2111).unwrap())),
        ("two parts from file", n34_two_parts(g)),
        ("identity and inner by a", GData::new(vec![VirtualEndomorphism::identity(g), inner_a]).unwrap()),
        ("inclusion and trivial", GData::new(vec![inclusion(k1123.clone()), VirtualEndomorphism::trivial(k2111)]).unwrap()),
        ("scaled and inner on K(1,1,2,3)", GData::new(vec![
            a_scaled.as_virtual(),
            VirtualEndomorphism::inner(&el(g, "b*d")).restrict(&k1123).unwrap(),
        ]).unwrap()),
    ]
}

#[test]
fn n34_gdata_have_witnesses() {
    criterion(7, "every n34 G-data has a verified F-core witness", None, || {
        let g = e(n34())?;
        let corpus = n34_corpus(&g);
        let mut center_of_k = 0;
        for (name, data) in &corpus {
            let w = match e(fcore_witness(data))? {
                WitnessOutcome::Found(w) => w,
                WitnessOutcome::NoneFound { reason } => return Err(format!("{name}: {reason}")),
            };
            ensure(w.checks.passed(), || format!("{name}: {:?}", w.checks))?;
            ensure(w.checks.invariant.len() == data.parts().len(), || format!("{name}: invariance not checked per part"))?;
            ensure(w.subgroup.is_normal(), || format!("{name}: not normal"))?;
            if w.determinants.iter().all(|d| !d.is_zero()) {
                ensure(w.kind == WitnessKind::CenterOfK, || format!("{name}: kind {:?}", w.kind))?;
                ensure(w.pointwise_fixed == Some(true), || format!("{name}: Z(K) not fixed pointwise"))?;
                center_of_k += 1;
            }
        }
        ensure(corpus.len() >= 10, || format!("only {} G-data", corpus.len()))?;
        Ok(format!("{} G-data, {center_of_k} with Z(K) fixed pointwise", corpus.len()))
    });
}

#[test]
fn runs_are_deterministic() {
    criterion(8, "byte-identical verify and rep output", None, || {
        let invocations = [
            "verify n34-relations",
            "verify psi",
            "verify dm",
            "verify consistency",
            "rep --group heisenberg --depth 3",
            "rep --group free_nil_c3_r2 --depth 2 --format text",
            "rep --group ut:3 --endo dm:2 --depth 3 --format dot",
        ];
        for args in invocations {
            let argv: Vec<String> = std::iter::once("selfsim").chain(args.split_whitespace()).map(String::from).collect();
            let (a, b) = (run(&argv), run(&argv));
            ensure(a.code == 0, || format!("`{args}` exited {}: {}", a.code, a.stderr))?;
            ensure(a.stdout == b.stdout && a.stderr == b.stderr && a.code == b.code, || format!("`{args}` differs"))?;
        }
        Ok(format!("{} invocations", invocations.len()))
    });
}
