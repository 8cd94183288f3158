//! Acceptance runner: one PASS/FAIL line per criterion item.
//!
//! A few items fail on the mathematics itself (see KNOWN_FAILURES); they are
//! printed as FAIL like any other. The run succeeds when the failing set is
//! exactly that list, so a new failure or a silently fixed one both stop it.

mod common;

use common::*;
use solvbase::basesize::{check_intersection, class_sum, dominance, Target, Verdict};
use solvbase::bounds::{sinbase_scan, Denominator};
use solvbase::constructions::{
    gamma_singer_normalizer, general_linear, scalar, singer_normalizer, singer_params,
    OrbitScheme, SingerModel,
};
use solvbase::families::{check_gr, check_ni1, check_orbits, DEFAULT_PRIOR_CAP};
use solvbase::gf::Field;
use solvbase::linalg::diag;
use solvbase::scenarios::{run_named, Outcome, RunOptions};
use solvbase::semilinear::{all_in_shape, closure, intersect, MatGroup, SemiElement, Shape, DEFAULT_CLOSURE_CAP};
use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

/// Items expected to fail, with the reason in one line.
const KNOWN_FAILURES: &[(&str, &str)] = &[
    ("2(1) q=9 shape", "the semilinear pair intersection has order 32 and contains phi-twisted antidiagonal elements"),
    ("2(1) q=9 some x", "no x in SL_2(9) puts S ∩ S^x in D or RT, even modulo phi"),
    ("2(1) q=4 = <phi>Z", "the pair intersection has order 12, not |<phi>Z| = 6"),
    ("2(1) q=8 = <phi>Z", "the pair intersection is linear of order 14, not |<phi>Z| = 21"),
    ("2(1) q=9 = <phi>Z", "the pair intersection has order 32, not |<phi>Z| = 16"),
    ("2(2) displayed x, y", "S ∩ S^x has order 64 and is not in RT ⋊ <phi>"),
];

struct Runner {
    lines: Vec<(String, bool)>,
}

impl Runner {
    fn item(&mut self, id: &str, pass: bool, detail: impl AsRef<str>, took: Duration) {
        let mark = if pass { "PASS" } else { "FAIL" };
        let known = if !pass && KNOWN_FAILURES.iter().any(|(k, _)| *k == id) { " (known)" } else { "" };
        println!("{mark}{known}  {id}  {}  [{:.2} s]", detail.as_ref(), took.as_secs_f64());
        self.lines.push((id.to_string(), pass));
    }

    fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
        let t = Instant::now();
        let out = f();
        (out, t.elapsed())
    }

    fn scenario(&mut self, id: &str, name: &str, limit: Duration) -> Outcome {
        let (out, took) = Self::timed(|| run_named(name, &RunOptions::default()).expect("scenario runs"));
        let detail: Vec<String> = out.lines.iter().map(|l| format!("{}: {}", l.claim, l.computed)).collect();
        let pass = out.verdict == Verdict::Verified && took < limit;
        self.item(id, pass, format!("{name}: {}", detail.join("; ")), took);
        out
    }
}

fn gf(q: u32) -> Arc<Field> {
    Arc::new(Field::of_order(q).expect("prime power"))
}

fn keys(g: &MatGroup) -> BTreeSet<Vec<u8>> {
    g.elements()
        .expect("enumerated")
        .iter()
        .map(|x| {
            let mut k = vec![x.l, x.j];
            k.extend(x.g.canonical_bytes());
            k
        })
        .collect()
}

/// Valid unordered pairs of Singer parameters: distinct, and `a != -b`
/// for odd `q`.
fn valid_pairs(f: &Field) -> Vec<(u32, u32)> {
    let ps = singer_params(f);
    let mut out = Vec::new();
    for (i, &a) in ps.iter().enumerate() {
        for &b in &ps[i + 1..] {
            if f.p() == 2 || b != f.neg(a) {
                out.push((a, b));
            }
        }
    }
    out
}

fn scalars(f: &Arc<Field>, n: usize) -> Vec<SemiElement> {
    vec![SemiElement::linear(scalar(n, f, f.primitive_element()))]
}

fn criterion_1(r: &mut Runner) {
    let minute = Duration::from_secs(60);
    for q in [5, 7, 9, 11] {
        r.scenario(&format!("1(1) q={q}"), &format!("thm-irred-1-q{q}"), minute);
    }
    for q in [4, 8] {
        r.scenario(&format!("1(2) q={q}"), &format!("thm-irred-2-q{q}"), minute);
    }
    let out = r.scenario("1(3)", "thm-irred-3", minute);
    let s_order = out.certificates[0].order_trace.first().copied().unwrap_or(0);
    let gl_order = general_linear(2, &gf(9)).enumerate(DEFAULT_CLOSURE_CAP).expect("GL_2(9)").order().unwrap_or(0);
    println!("      |S| = {s_order}, index in GL_2(9) = {}, index in S SL_2(9) = 15", gl_order / s_order.max(1));
    for q in [5, 7] {
        r.scenario(&format!("1(4) q={q}"), &format!("thm-irred-4-q{q}"), minute);
    }
    r.scenario("1(5)", "thm-irred-5", minute);
    r.scenario("1(6)", "thm-irred-6", Duration::from_secs(600));
}

fn criterion_2(r: &mut Runner) {
    for q in [4u32, 8, 9] {
        r.scenario(&format!("2(1) q={q} shape"), &format!("lemma-rtdiagfield-1-q{q}"), Duration::from_secs(60));
        // the intersection against <phi>Z, phi the Frobenius on coordinates, over every valid pair
        let (res, took) = Runner::timed(|| {
            let f = gf(q);
            let mut orders = BTreeSet::new();
            let mut all_equal = true;
            for (a, b) in valid_pairs(&f) {
                let na = gamma_singer_normalizer(&SingerModel::gl2(&f, Some(a)).expect("valid a")).expect("normaliser");
                let nb = gamma_singer_normalizer(&SingerModel::gl2(&f, Some(b)).expect("valid b")).expect("normaliser");
                let i = intersect(&na, &nb).expect("intersection");
                let mut gens = scalars(&f, 2);
                gens.push(SemiElement::phi(2, &f));
                let pz = closure(&na.ambient, gens, DEFAULT_CLOSURE_CAP).expect("<phi>Z");
                let linear = i.elements().expect("enumerated").iter().filter(|x| x.is_linear()).count();
                orders.insert((i.order().unwrap_or(0), linear, pz.order().unwrap_or(0)));
                all_equal &= keys(&i) == keys(&pz);
            }
            (all_equal, orders)
        });
        let detail: Vec<String> = res
            .1
            .iter()
            .map(|(i, l, p)| format!("|N_a ∩ N_b| = {i} ({l} linear), |<phi>Z| = {p}"))
            .collect();
        r.item(&format!("2(1) q={q} = <phi>Z"), res.0, detail.join("; "), took);
    }
    // existence of x in SL_2(9), exhaustively
    let (res, took) = Runner::timed(|| {
        let f = gf(9);
        let s = gamma_singer_normalizer(&SingerModel::gl2(&f, None).expect("model")).expect("normaliser");
        let mut least = usize::MAX;
        let mut found = 0;
        let sl = solvbase::constructions::special_linear(2, &f).enumerate(DEFAULT_CLOSURE_CAP).expect("SL_2(9)");
        for x in sl.elements().expect("enumerated").iter() {
            let rep = check_intersection(&s, std::slice::from_ref(&x), &Target::Equals(s.clone())).expect("intersection");
            let i = rep.intersection;
            least = least.min(i.order().unwrap_or(0));
            let ok = [Shape::Diagonal, Shape::UpperTriangular, Shape::LowerTriangular]
                .iter()
                .any(|&sh| all_in_shape(&i, sh, true).unwrap_or(false));
            found += usize::from(ok);
        }
        (found, least, sl.order().unwrap_or(0))
    });
    r.item(
        "2(1) q=9 some x",
        res.0 > 0,
        format!("{} of {} x in SL_2(9) give D, RT or LT modulo phi; least |S ∩ S^x| = {}", res.0, res.2, res.1),
        took,
    );
    let (out, took) = Runner::timed(|| run_named("lemma-rtdiagfield-2", &RunOptions::default()).expect("scenario"));
    let l = &out.lines;
    r.item(
        "2(2) displayed x, y",
        l[0].verdict == Verdict::Verified && l[1].verdict == Verdict::Verified,
        format!("x: {}; x, y: {}", l[0].computed, l[1].computed),
        took,
    );
    r.item(
        "2(2) searched x, y",
        l[2].verdict == Verdict::Verified,
        format!("{} via {}, trace {:?}", l[2].computed, out.certificates[2].conjugators.join(" "), out.certificates[2].order_trace),
        Duration::ZERO,
    );
    r.scenario("2(3)", "lemma-rtdiagfield-3", Duration::from_secs(60));
}

fn criterion_3(r: &mut Runner) {
    r.scenario("3", "sym8-wreath", Duration::from_secs(300));
}

fn criterion_4(r: &mut Runner) {
    for q in [7u32, 9, 4, 8] {
        let (res, took) = Runner::timed(|| {
            let f = gf(q);
            let mut ok = true;
            let mut orders = BTreeSet::new();
            let pairs = valid_pairs(&f);
            for &(a, b) in &pairs {
                let ma = SingerModel::gl2(&f, Some(a)).expect("valid a");
                let na = singer_normalizer(&ma).expect("normaliser");
                let nb = singer_normalizer(&SingerModel::gl2(&f, Some(b)).expect("valid b")).expect("normaliser");
                let i = intersect(&na, &nb).expect("intersection");
                orders.insert(i.order().unwrap_or(0));
                if q % 2 == 1 {
                    let mut gens = scalars(&f, 2);
                    gens.push(SemiElement::linear(diag(&f, &[f.neg(1), 1])));
                    let expected = closure(&na.ambient, gens, DEFAULT_CLOSURE_CAP).expect("<diag(-1,1)>Z");
                    ok &= keys(&i) == keys(&expected) && all_in_shape(&i, Shape::Diagonal, false).unwrap_or(false);
                } else {
                    ok &= all_in_shape(&i, Shape::LowerTriangular, false).unwrap_or(false);
                }
            }
            (ok, pairs.len(), orders)
        });
        let what = if q % 2 == 1 { "= <diag(-1,1)>Z, diagonal" } else { "lower triangular" };
        r.item(&format!("4 q={q}"), res.0, format!("{} pairs, N_a ∩ N_b {what}, orders {:?}", res.1, res.2), took);
    }
}

fn criterion_5(r: &mut Runner) {
    for name in SMALL_DESK {
        let (res, took) = Runner::timed(|| {
            let d = desk(name);
            let cs = space(&d);
            let dom = dominance(cs, 2, 100_000).expect("dominance");
            let sum = class_sum(cs, 2, 100_000).expect("class sum");
            let pass = dom.q_exact <= dom.q_hat && sum <= dom.ab_bound && dom.fpr_identity;
            (pass, format!("{name}: Q = {} ≤ Q^ = {}, class sum {} ≤ B(A/B)^2 = {}", dom.q_exact, dom.q_hat, sum, dom.ab_bound))
        });
        r.item(&format!("5 {name}"), res.0, res.1, took);
    }
}

fn criterion_6(r: &mut Runner) {
    let ((q1, nm1), took) = Runner::timed(|| {
        let set = |d| -> BTreeSet<(u64, u64)> { sinbase_scan(4..=12, 2..=64, d).iter().map(|r| (r.n, r.q)).collect() };
        (set(Denominator::QMinusOne), set(Denominator::NMinusOne))
    });
    let must: Vec<(u64, u64)> = [(6, 2), (5, 3), (5, 2)].into_iter().chain([2, 3, 4, 5, 7, 8, 9, 11].map(|q| (4, q))).collect();
    let must_not = [(4u64, 13u64), (5, 4), (6, 3), (7, 2)];
    let pass = must.iter().all(|p| q1.contains(p)) && must_not.iter().all(|p| !q1.contains(p));
    let extra: Vec<_> = q1.iter().filter(|p| !must.contains(p)).collect();
    r.item("6", pass, format!("n ≤ 12, q ≤ 64: {} cases with a^2/b ≥ 1, further elements {:?}", q1.len(), extra), took);
    println!("      (n-1) denominator: {} cases: {:?}", nm1.len(), nm1);
}

fn criterion_7(r: &mut Runner) {
    let (res, took) = Runner::timed(|| {
        let qs = prime_powers_up_to(512);
        qs.iter().try_for_each(|&q| field_axioms(q).and_then(|_| frobenius_is_automorphism(q))).map(|_| qs.len())
    });
    r.item("7 field axioms", res.is_ok(), format!("{res:?} fields up to 512"), took);
    let (res, took) = Runner::timed(|| [4u32, 5, 7, 8, 9, 11].iter().try_for_each(|&q| singer_field_closure(q)));
    r.item("7 Singer field closure", res.is_ok(), format!("{res:?}"), took);
    let (res, took) = Runner::timed(|| {
        SMALL_DESK.iter().try_for_each(|name| {
            let d = desk(name);
            let again = closure(&d.s.ambient, d.s.gens.iter().rev().cloned().collect(), DEFAULT_CLOSURE_CAP)
                .map_err(|e| e.to_string())?;
            if keys(&again) == keys(&d.s) { Ok(()) } else { Err(format!("{name}: closure depends on generator order")) }
        })
    });
    r.item("7 closure determinism", res.is_ok(), format!("{res:?}"), took);
    let (res, took) = Runner::timed(|| {
        ALL_DESK.iter().try_for_each(|name| orbit_stabilizer(space(&desk(name))).map_err(|e| format!("{name}: {e}")))
    });
    r.item("7 orbit-stabilizer", res.is_ok(), format!("{res:?}"), took);
    let (res, took) = Runner::timed(|| {
        ALL_DESK
            .iter()
            .map(|name| base_inequalities(space(&desk(name))).map(|(b, r, l)| format!("{name} b={b} Reg5={r} log={l}")))
            .collect::<Result<Vec<_>, _>>()
    });
    let detail = match &res {
        Ok(v) => v.join(", "),
        Err(e) => e.clone(),
    };
    r.item("7 b ≤ 4 ⇒ Reg5 ≥ 5 and b ≥ log bound", res.is_ok(), detail, took);
    let (res, took) = Runner::timed(|| {
        let mut count = 0;
        for name in ["thm-irred-1-q7", "thm-irred-2-q8", "thm-irred-3", "thm-irred-6", "tab-case1-q3", "tab-case4-q2"] {
            let out = run_named(name, &RunOptions::default()).map_err(|e| e.to_string())?;
            let f = gf(out.certificates[0].ambient.q);
            for c in &out.certificates {
                for t in &c.conjugators {
                    let x = SemiElement::parse(&f, t).map_err(|e| e.to_string())?;
                    if x.g.det() != 1 {
                        return Err(format!("{name}: det {t} != 1"));
                    }
                    count += 1;
                }
            }
        }
        Ok::<_, String>(count)
    });
    r.item("7 conjugator determinants", res.is_ok(), format!("{res:?} conjugators"), took);
    let (res, took) = Runner::timed(|| block_conjugation_trials(7, 5000));
    r.item("7 block conjugation forces s = 1", res.is_ok(), format!("{res:?} swapped samples leave the wreath product"), took);
}

fn families(r: &mut Runner) {
    let (res, took) = Runner::timed(|| {
        let mut failures = Vec::new();
        let mut checked = 0u64;
        let mut configs = 0;
        for q in [2u32, 3, 4, 5, 7, 8, 9] {
            let f = gf(q);
            for n in 2..=6usize {
                let mut reports = Vec::new();
                if (n, q) != (2, 2) && (n, q) != (2, 3) {
                    reports.push(check_ni1(&f, n, DEFAULT_PRIOR_CAP).expect("ni1"));
                }
                if n >= 4 {
                    for m in 2..=n - 2 {
                        reports.push(check_orbits(&f, n, OrbitScheme::Orb { m }, DEFAULT_PRIOR_CAP).expect("orbits"));
                    }
                }
                for rep in &reports {
                    configs += 1;
                    checked += rep.checked;
                    if !rep.passed() {
                        failures.push(rep.line());
                    }
                }
                for g in check_gr(&f, n, DEFAULT_PRIOR_CAP).expect("pair stabilisers") {
                    configs += 1;
                    checked += g.linear.checked + g.iota.checked;
                    if !g.passed() {
                        failures.push(g.linear.line());
                    }
                }
            }
        }
        (failures, configs, checked)
    });
    r.item(
        "families n ≤ 6, q ≤ 9",
        res.0.is_empty(),
        format!("{} configurations, {} prior elements checked, failures {:?}", res.1, res.2, res.0),
        took,
    );
}

fn main() {
    let mut r = Runner { lines: Vec::new() };
    criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_3(&mut r);
    criterion_4(&mut r);
    criterion_5(&mut r);
    criterion_6(&mut r);
    criterion_7(&mut r);
    families(&mut r);

    let failed: BTreeSet<&str> = r.lines.iter().filter(|(_, p)| !p).map(|(id, _)| id.as_str()).collect();
    let known: BTreeSet<&str> = KNOWN_FAILURES.iter().map(|(k, _)| *k).collect();
    let passed = r.lines.len() - failed.len();
    println!("acceptance: {passed} passed, {} failed", failed.len());
    for (id, why) in KNOWN_FAILURES {
        println!("  known failure {id}: {why}");
    }
    let unexpected: Vec<_> = failed.difference(&known).collect();
    let fixed: Vec<_> = known.difference(&failed).collect();
    if !unexpected.is_empty() || !fixed.is_empty() {
        eprintln!("unexpected failures {unexpected:?}; known failures now passing {fixed:?}");
        std::process::exit(1);
    }
}
