//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use haar_groupoid::constructions::random::{random_cospan_with, random_haar_groupoid, Bounds, Strategy};
use haar_groupoid::constructions::{
    canonical_iso_cech, canonical_iso_transformation, is_isomorphism, non_quasi_invariant_cospan, regular_pullback,
    weak_to_regular, z2_cospan, CechParams, TransformationParams,
};
use haar_groupoid::haar::{modular_function, HaarGroupoid};
use haar_groupoid::io::{
    cospan_to_string, haar_groupoid_to_string, parse_document, to_canonical_string, weak_pullback_to_string,
    ExampleDocument,
};
use haar_groupoid::pullback::{
    alternate_disintegrations, build_weak_pullback, build_with_disintegrations, check_haar_theorem, run_all_checks,
    square_failure_witness, Cospan, WeakPullbackResult,
};
use haar_groupoid::{Error, HaarSystem, Weight};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let detail = f()?;
    let el = t.elapsed();
    ensure(el < limit, format!("took {el:?}, limit {limit:?}"))?;
    Ok(format!("{detail} in {el:.2?}"))
}

fn err(e: Error) -> String {
    e.to_string()
}

fn cospans(strategy: Strategy, count: u64) -> Result<Vec<Cospan>, String> {
    (0..count)
        .map(|seed| random_cospan_with(seed, Bounds::default(), strategy).map_err(err))
        .collect()
}

// triples (s, g, t) of ids with r(g) = p(r s) and d(g) = q(r t), counted
// directly from the document tables
fn brute_force_count(c: &Cospan) -> (usize, usize) {
    let (s, g, t) = (c.s().groupoid(), c.g().groupoid(), c.t().groupoid());
    let (mut all, mut units) = (0, 0);
    for si in 0..s.len() {
        for gi in 0..g.len() {
            for ti in 0..t.len() {
                let ps = c.p().apply(s.range(si));
                let qt = c.q().apply(t.range(ti));
                if g.range(gi) == ps && g.source(gi) == qt {
                    all += 1;
                    if s.is_unit(si) && t.is_unit(ti) {
                        units += 1;
                    }
                }
            }
        }
    }
    (all, units)
}

fn criterion_1() -> Outcome {
    timed(Duration::from_secs(1), || {
        let c = z2_cospan().map_err(err)?;
        let w = build_weak_pullback(&c).map_err(err)?;
        let (n, n0) = (w.groupoid().len(), w.groupoid().units().len());
        ensure((n, n0) == (8, 2), format!("|P| = {n}, |P⁽⁰⁾| = {n0}"))?;
        ensure(brute_force_count(&c) == (8, 2), "brute-force count disagrees")?;
        let report = run_all_checks(&w, true).map_err(err)?;
        ensure(report.all_passed(), report.to_string())?;
        let delta = w.modular().ok_or("Δ_P undefined")?;
        ensure(delta.len() == 8 && delta.is_identically_one(), "Δ_P is not identically 1")?;
        Ok(format!("|P| = 8, |P⁽⁰⁾| = 2, {} claims pass, Δ_P ≡ 1", report.claims.len()))
    })
}

fn criterion_2() -> Outcome {
    timed(Duration::from_secs(1), || {
        let ex = canonical_iso_cech(&CechParams::worked()).map_err(err)?;
        let n = ex.pullback.groupoid().len();
        ensure(n == 8, format!("weak pullback has {n} elements"))?;
        ensure(ex.target.len() == 8, "Čech groupoid of the product cover is not of size 8")?;
        ensure(ex.is_isomorphism, "canonical map is not an isomorphism")?;
        Ok("8 ↔ 8, canonical map is an isomorphism".into())
    })
}

fn criterion_3() -> Outcome {
    timed(Duration::from_secs(1), || {
        let ex = canonical_iso_transformation(&TransformationParams::worked()).map_err(err)?;
        let n = ex.pullback.groupoid().len();
        ensure(n == 4, format!("weak pullback has {n} elements"))?;
        ensure(ex.is_isomorphism, "canonical map is not an isomorphism")?;
        ensure(ex.cospan().is_ok(), "counting Haar cospan is invalid")?;
        Ok("4 ↔ 4, canonical map is an isomorphism".into())
    })
}

const PROPERTY_CLAIMS: &[&str] = &[
    "def.weak_pullback.groupoid",
    "lem.fibers",
    "thm.haar_system",
    "prop.quasi_invariance",
    "remark.modular_formula",
    "prop.haar_homs",
    "diamond.commutes",
    "lem.triple_integrals",
    "lem.expanding_integral",
];

fn criterion_4(samples: &[Cospan]) -> Outcome {
    timed(Duration::from_secs(300), || {
        let bounds = Bounds::default();
        let (mut compared, mut max_p) = (0, 0);
        for (seed, c) in samples.iter().enumerate() {
            for h in [c.s(), c.g(), c.t()] {
                let (e, u) = (h.groupoid().len(), h.groupoid().units().len());
                ensure(e <= bounds.max_elements && u <= bounds.max_units, format!("seed {seed}: {e} elements, {u} units"))?;
            }
            let w = build_weak_pullback(c).map_err(err)?;
            let report = run_all_checks(&w, false).map_err(err)?;
            for claim in PROPERTY_CLAIMS {
                let outcome = report.get(claim).ok_or(format!("claim {claim} missing"))?;
                ensure(outcome.passed, format!("seed {seed}: {claim} fails: {}", outcome.detail))?;
            }
            ensure(report.all_passed(), format!("seed {seed}:\n{report}"))?;
            compared += w.modular().map_or(0, |m| m.len());
            max_p = max_p.max(w.groupoid().len());
        }
        Ok(format!(
            "{} cospans pass every claim (largest |P| = {max_p}, {compared} Δ_P values)",
            samples.len()
        ))
    })
}

fn criterion_5(samples: &[Cospan]) -> Outcome {
    let mut nulls = 0;
    for (seed, c) in samples.iter().enumerate() {
        let null_units: Vec<usize> = c.g().unit_measure().iter().filter(|(_, w)| w.is_zero()).map(|(u, _)| *u).collect();
        ensure(!null_units.is_empty(), format!("seed {seed}: no null unit in G"))?;
        nulls += null_units.len();
        let (gp, gq) = c.disintegrations().map_err(err)?;
        let (ap, aq) = alternate_disintegrations(c).map_err(err)?;
        ensure(gp != ap || gq != aq, format!("seed {seed}: the two choices coincide"))?;
        let canonical = build_with_disintegrations(c, gp, gq).map_err(err)?;
        let alternate = build_with_disintegrations(c, ap, aq).map_err(err)?;
        ensure(
            canonical.unit_measure() == alternate.unit_measure(),
            format!("seed {seed}: μ_P⁽⁰⁾ depends on the null-fiber choice"),
        )?;
    }
    Ok(format!(
        "{} cospans with {nulls} null units of G: μ_P⁽⁰⁾ identical under both choices",
        samples.len()
    ))
}

// μ(x) = λ^{r x}(x) μ⁽⁰⁾(r x), computed here rather than taken from the library
fn induced(h: &HaarGroupoid) -> Vec<Weight> {
    let g = h.groupoid();
    (0..g.len())
        .map(|x| &h.haar().weight(&g.range(x), &x) * &h.unit_measure().get(&g.range(x)))
        .collect()
}

fn left_invariance_corollary(g: &haar_groupoid::FiniteGroupoid, l: &HaarSystem) -> Result<usize, String> {
    for x in 0..g.len() {
        let d = g.source(x);
        ensure(
            l.weight(&g.range(x), &x) == l.weight(&d, &d),
            format!("λ^r(x)(x) != λ^d(x)(d(x)) at {}", g.id(x)),
        )?;
    }
    Ok(g.len())
}

fn modular_laws(h: &HaarGroupoid) -> Result<usize, String> {
    let g = h.groupoid();
    let mu = induced(h);
    ensure(mu.iter().all(Weight::is_positive), "μ is not strictly positive")?;
    let delta = modular_function(h).map_err(err)?;
    let d = |x: usize| delta.get(x).cloned().ok_or(format!("Δ undefined at {}", g.id(x)));
    let mut pairs = 0;
    for x in 0..g.len() {
        // Δ = μ / μ⁻¹
        ensure(d(x)? == mu[x].checked_div(&mu[g.inverse(x)]).unwrap(), format!("Δ({}) is not μ/μ⁻¹", g.id(x)))?;
        ensure(&d(x)? * &d(g.inverse(x))? == Weight::one(), format!("Δ(x⁻¹) != 1/Δ(x) at {}", g.id(x)))?;
        // Σ f Δ⁻¹ μ = Σ f∘inv μ for f the indicator of {x}
        ensure(
            mu[x].checked_div(&d(x)?).unwrap() == mu[g.inverse(x)],
            format!("summed identity fails at {}", g.id(x)),
        )?;
        for &(y, xy) in g.compose_row(x) {
            ensure(d(xy)? == &d(x)? * &d(y)?, format!("Δ(xy) != Δ(x)Δ(y) at ({}, {})", g.id(x), g.id(y)))?;
            pairs += 1;
        }
    }
    Ok(pairs)
}

fn criterion_6(samples: &[Cospan]) -> Outcome {
    let mut pairs = 0;
    let mut elements = 0;
    for seed in 0..200 {
        let h = random_haar_groupoid(seed, Bounds::default()).map_err(err)?;
        pairs += modular_laws(&h).map_err(|m| format!("seed {seed}: {m}"))?;
        elements += left_invariance_corollary(h.groupoid(), h.haar())?;
    }
    for c in samples.iter().take(50) {
        let w = build_weak_pullback(c).map_err(err)?;
        for h in [c.s(), c.g(), c.t(), w.haar()] {
            elements += left_invariance_corollary(h.groupoid(), h.haar())?;
        }
    }
    Ok(format!(
        "200 groupoids, {pairs} composable pairs; corollary on {elements} elements of valid Haar systems"
    ))
}

fn criterion_7() -> Outcome {
    // pair groupoid with μ⁽⁰⁾ = (1, 0)
    let c = non_quasi_invariant_cospan().map_err(err)?;
    match HaarGroupoid::try_new(c.s().groupoid().clone(), c.s().haar().clone(), c.s().unit_measure().clone()) {
        Err(Error::NotQuasiInvariant { witness }) => ensure(witness == "(1,2)", format!("witness {witness}"))?,
        other => return Err(format!("pair groupoid accepted: {other:?}")),
    }
    match Cospan::new(c.s().clone(), c.g().clone(), c.t().clone(), c.p().clone(), c.q().clone()) {
        Err(Error::InvalidCospan(r)) => {
            let v = r.find("S.quasi_invariance").ok_or("no S.quasi_invariance violation")?;
            ensure(v.witnesses == ["(1,2)"], "wrong cospan witness")?;
        }
        other => return Err(format!("cospan accepted: {other:?}")),
    }

    // outer square: p(π_S(α)) ≠ q(π_T(α)) for some α
    let w = build_weak_pullback(&z2_cospan().map_err(err)?).map_err(err)?;
    let a = square_failure_witness(&w).ok_or("square commutes on the Z₂ cospan")?;
    let (s, _, t) = w.structure().triple(a);
    let cs = w.cospan();
    ensure(cs.p().apply(s) != cs.q().apply(t), "reported witness does not separate the square")?;

    // corrupted λ_P
    let bad = corrupt_lambda(&w);
    let report = check_haar_theorem(&bad);
    ensure(!report.is_empty(), "corrupted λ_P passes check_haar_theorem")?;
    Ok(format!(
        "quasi-invariance witness (1,2); square fails at {}; corrupted λ_P: {}",
        w.groupoid().id(a),
        report.violations[0].axiom
    ))
}

fn corrupt_lambda(w: &WeakPullbackResult) -> WeakPullbackResult {
    let mut lambda = w.lambda().clone();
    let u = w.groupoid().units()[0];
    let (&x, wt) = lambda.entries(&u).next().expect("nonempty fiber");
    let doubled = wt + wt;
    lambda.set(u, x, doubled);
    w.with_lambda(lambda)
}

fn criterion_8(samples: &[Cospan]) -> Outcome {
    let mut total = 0;
    for (seed, c) in samples.iter().enumerate() {
        let g = c.g().groupoid();
        ensure(g.len() == g.units().len(), format!("seed {seed}: G is not cotrivial"))?;
        let w = build_weak_pullback(c).map_err(err)?;
        let (reg, index) = regular_pullback(c.s().groupoid(), c.t().groupoid(), c.p(), c.q()).map_err(err)?;
        ensure(reg.validate().is_empty(), format!("seed {seed}: regular pullback is not a groupoid"))?;
        let f = weak_to_regular(w.structure(), &index).map_err(err)?;
        ensure(is_isomorphism(w.groupoid(), &reg, &f), format!("seed {seed}: not an isomorphism"))?;
        total += reg.len();
    }
    Ok(format!("{} cotrivial-base cospans, {total} elements matched bijectively", samples.len()))
}

fn round_trip(text: &str, what: &str) -> Result<(), String> {
    let once = parse_document(text).map_err(|e| format!("{what}: {e}"))?.to_canonical_string();
    let twice = parse_document(&once).map_err(|e| format!("{what}: {e}"))?.to_canonical_string();
    ensure(once == twice, format!("{what}: second serialization differs"))?;
    ensure(once == text, format!("{what}: serialization is not stable"))
}

fn criterion_9(all: &[&[Cospan]]) -> Outcome {
    let mut count = 0;
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut paths: Vec<_> = fs::read_dir(&dir).map_err(|e| e.to_string())?.map(|e| e.unwrap().path()).collect();
    paths.sort();
    for path in paths {
        let text = fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        if name.ends_with("_params.json") {
            let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let again = if name.starts_with("cech") {
                let p: CechParams = serde_json::from_value(value).map_err(|e| e.to_string())?;
                to_canonical_string(&ExampleDocument::from_cech(&canonical_iso_cech(&p).map_err(err)?))
            } else {
                let p: TransformationParams = serde_json::from_value(value).map_err(|e| e.to_string())?;
                to_canonical_string(&ExampleDocument::from_transformation(
                    &canonical_iso_transformation(&p).map_err(err)?,
                ))
            };
            round_trip(&again, &name)?;
        } else {
            let text = parse_document(&text).map_err(|e| format!("{name}: {e}"))?.to_canonical_string();
            round_trip(&text, &name)?;
        }
        count += 1;
    }
    for samples in all {
        for c in samples.iter() {
            round_trip(&cospan_to_string(c), "cospan")?;
            round_trip(&weak_pullback_to_string(&build_weak_pullback(c).map_err(err)?), "weak pullback")?;
            count += 2;
        }
    }
    for seed in 0..200 {
        round_trip(&haar_groupoid_to_string(&random_haar_groupoid(seed, Bounds::default()).map_err(err)?), "groupoid")?;
        count += 1;
    }
    let nq = non_quasi_invariant_cospan().map_err(err)?;
    round_trip(&cospan_to_string(&nq), "non quasi-invariant cospan")?;
    Ok(format!("{} documents byte-identical after serialize → parse → serialize", count + 1))
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |n: usize, outcome: Outcome| match outcome {
        Ok(detail) => println!("criterion {n}: PASS: {detail}"),
        Err(why) => {
            failed += 1;
            println!("criterion {n}: FAIL: {why}");
        }
    };
    report(1, criterion_1());
    report(2, criterion_2());
    report(3, criterion_3());
    let default = cospans(Strategy::Default, 200);
    let null = cospans(Strategy::NullUnits, 20);
    let cotrivial = cospans(Strategy::CotrivialBase, 20);
    let (default, null, cotrivial) = match (default, null, cotrivial) {
        (Ok(a), Ok(b), Ok(c)) => (a, b, c),
        (a, b, c) => {
            let why = [a.err(), b.err(), c.err()].into_iter().flatten().collect::<Vec<_>>().join("; ");
            for n in 4..=9 {
                report(n, Err(format!("generation failed: {why}")));
            }
            return ExitCode::FAILURE;
        }
    };
    report(4, criterion_4(&default));
    report(5, criterion_5(&null));
    report(6, criterion_6(&default));
    report(7, criterion_7());
    report(8, criterion_8(&cotrivial));
    report(9, criterion_9(&[&default, &null, &cotrivial]));
    println!("{} of 9 criteria pass", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
