//! Exact verification of the structural claims about a weak pullback.
//!
//! Each check recomputes its statement from the cospan data by a route
//! independent of the constructor whenever one exists.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::{eta_system, pullback_unit_measure, weak_pullback_groupoid, Cospan, Triple, WeakPullbackResult};
use crate::error::{Error, Result};
use crate::groupoid::{orbit_map_through, validate_hom, ValidationReport};
use crate::haar::{is_haar, modular_function, quasi_invariance_witness, HaarGroupoid};
use crate::measure::{
    class_witness, compose_systems, compose_with_measure, disintegrate_with, is_disintegration, lift_system,
    product_system, push_forward, same_measure_class, FiniteMap, FiniteMeasure, MeasureSystem,
};
use crate::groupoid::GroupoidHom;
use crate::weight::Weight;

/// Outcome of one claim.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimOutcome {
    pub claim: String,
    pub passed: bool,
    /// Instances the claim does not cover (off-support triples).
    pub skipped: usize,
    pub witnesses: Vec<String>,
    pub detail: String,
}

impl ClaimOutcome {
    fn new(claim: &str, passed: bool, detail: impl Into<String>) -> Self {
        ClaimOutcome {
            claim: claim.to_string(),
            passed,
            skipped: 0,
            witnesses: Vec::new(),
            detail: detail.into(),
        }
    }

    fn from_report(claim: &str, report: &ValidationReport, ok: &str) -> Self {
        let mut c = ClaimOutcome::new(claim, report.is_empty(), ok);
        if let Some(v) = report.violations.first() {
            c.witnesses = v.witnesses.clone();
            c.detail = format!("{} violation(s), first {}: {}", report.len(), v.axiom, v.detail);
        }
        c
    }
}

/// One line per claim, in a fixed order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimsReport {
    pub claims: Vec<ClaimOutcome>,
}

impl ClaimsReport {
    pub fn all_passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }

    pub fn get(&self, claim: &str) -> Option<&ClaimOutcome> {
        self.claims.iter().find(|c| c.claim == claim)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ClaimOutcome> {
        self.claims.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ClaimsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.claims {
            write!(f, "{} {}", if c.passed { "PASS" } else { "FAIL" }, c.claim)?;
            if !c.witnesses.is_empty() {
                write!(f, " [{}]", c.witnesses.join(", "))?;
            }
            writeln!(f, ": {}", c.detail)?;
        }
        Ok(())
    }
}

fn p_label(w: &WeakPullbackResult, a: usize) -> String {
    w.groupoid().id(a).to_string()
}

/// Groupoid axioms for `P`, plus membership and completeness of the element
/// set against a brute-force scan of `S × G × T`.
pub fn check_groupoid(w: &WeakPullbackResult) -> ValidationReport {
    let c = w.cospan();
    let (s, g, t) = (c.s().groupoid(), c.g().groupoid(), c.t().groupoid());
    let mut report = w.groupoid().validate();
    let mut expected = 0usize;
    for si in 0..s.len() {
        for gi in 0..g.len() {
            for ti in 0..t.len() {
                let member = g.range(gi) == g.range(c.p().apply(si)) && g.source(gi) == g.range(c.q().apply(ti));
                if member {
                    expected += 1;
                    if w.structure().index_of(&(si, gi, ti)).is_none() {
                        report.push(
                            "pullback.missing",
                            vec![format!("{}|{}|{}", s.id(si), g.id(gi), t.id(ti))],
                            "triple satisfies the membership condition but is absent",
                        );
                    }
                }
            }
        }
    }
    if expected != w.groupoid().len() {
        report.push(
            "pullback.size",
            vec![],
            format!("{} elements, {} triples satisfy the condition", w.groupoid().len(), expected),
        );
    }
    for a in 0..w.groupoid().len() {
        let (si, gi, ti) = w.structure().triple(a);
        let (rs, rt) = (s.range(si), t.range(ti));
        let is_unit_triple = s.is_unit(si) && t.is_unit(ti) && g.range(gi) == c.p().apply(si) && g.source(gi) == c.q().apply(ti);
        if w.groupoid().is_unit(a) != is_unit_triple {
            report.push("pullback.units", vec![p_label(w, a)], "unit set differs from the unit triples");
        }
        let r_expect = w.structure().index_of(&(rs, gi, rt));
        if r_expect != Some(w.groupoid().range(a)) {
            report.push("pullback.range", vec![p_label(w, a)], "r(s,g,t) must be (r s, g, r t)");
        }
    }
    report
}

/// `P^{(s,g,t)} = S^s × {g} × T^t` at every unit, and the resulting count
/// `|P| = Σ |S^s| |T^t|`.
pub fn check_fiber_product_lemma(w: &WeakPullbackResult) -> bool {
    fiber_lemma_report(w).is_empty()
}

pub fn fiber_lemma_report(w: &WeakPullbackResult) -> ValidationReport {
    let c = w.cospan();
    let (s, t) = (c.s().groupoid(), c.t().groupoid());
    let pg = w.groupoid();
    let mut report = ValidationReport::new();
    let mut total = 0usize;
    for &v in pg.units() {
        let (su, gi, tu) = w.structure().triple(v);
        let mut got: Vec<Triple> = pg
            .r_fiber(v)
            .expect("unit")
            .iter()
            .map(|&a| w.structure().triple(a))
            .collect();
        got.sort_unstable();
        let mut expect: Vec<Triple> = Vec::new();
        for &sigma in s.r_fiber(su).expect("unit") {
            for &tau in t.r_fiber(tu).expect("unit") {
                expect.push((sigma, gi, tau));
            }
        }
        expect.sort_unstable();
        total += expect.len();
        if got != expect {
            report.push(
                "fiber_lemma",
                vec![p_label(w, v)],
                format!("fiber has {} elements, product has {}", got.len(), expect.len()),
            );
        }
    }
    if total != pg.len() {
        report.push("fiber_lemma.count", vec![], format!("Σ |S^s||T^t| = {total} but |P| = {}", pg.len()));
    }
    report
}

/// Haar property of `λ_P`, and agreement with `(λ_S * λ_T)^{(s,t)} × δ_g`
/// built through the generic fibred product.
pub fn check_haar_theorem(w: &WeakPullbackResult) -> ValidationReport {
    let pg = w.groupoid();
    let mut report = is_haar(pg, w.lambda());
    let c = w.cospan();
    let product = match product_system(c.s().haar(), c.t().haar(), |_, _| true, |_, _| true) {
        Ok(p) => p,
        Err(e) => {
            report.push("haar.product_route", vec![], e.to_string());
            return report;
        }
    };
    for &v in pg.units() {
        let (su, gi, tu) = w.structure().triple(v);
        let fiber = pg.r_fiber(v).expect("unit");
        for &a in fiber {
            let (sigma, x, tau) = w.structure().triple(a);
            let mut expect = product.weight(&(su, tu), &(sigma, tau));
            if x != gi {
                expect = Weight::zero();
            }
            if w.lambda().weight(&v, &a) != expect {
                report.push(
                    "haar.product_route",
                    vec![p_label(w, v), p_label(w, a)],
                    format!("λ_P = {} but λ_S × δ_g × λ_T = {expect}", w.lambda().weight(&v, &a)),
                );
            }
        }
        // no mass outside the fiber
        let mass: Weight = w.lambda().entries(&v).filter(|(a, _)| pg.range(**a) != v).map(|(_, x)| x.clone()).sum();
        if !mass.is_zero() {
            report.push("haar.product_route", vec![p_label(w, v)], "λ_P has mass off its fiber");
        }
    }
    report
}

/// Quasi-invariance of `μ_P⁽⁰⁾` and the identity
/// `Δ_P(σ,x,τ) Δ_G(q(τ)) = Δ_S(σ) Δ_T(τ)` on the checkable support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularCheck {
    pub quasi_invariant: bool,
    pub witness: Option<String>,
    pub compared: usize,
    /// Elements of `supp μ_P` where some constituent lies off its support.
    pub skipped: usize,
    pub mismatches: Vec<String>,
}

impl ModularCheck {
    pub fn passed(&self, strict: bool) -> bool {
        self.quasi_invariant && self.mismatches.is_empty() && (!strict || self.skipped == 0)
    }
}

pub fn check_quasi_invariance_and_modular(w: &WeakPullbackResult) -> ModularCheck {
    let haar = w.haar();
    let witness = quasi_invariance_witness(haar).map(|a| p_label(w, a));
    let mut out = ModularCheck {
        quasi_invariant: witness.is_none(),
        witness,
        compared: 0,
        skipped: 0,
        mismatches: Vec::new(),
    };
    let Some(dp) = w.modular() else {
        out.mismatches.push("Δ_P undefined".into());
        return out;
    };
    let c = w.cospan();
    let (Ok(ds), Ok(dg), Ok(dt)) = (modular_function(c.s()), modular_function(c.g()), modular_function(c.t())) else {
        out.mismatches.push("a cospan leg is not quasi-invariant".into());
        return out;
    };
    for a in 0..w.groupoid().len() {
        if !haar.induced().in_support(&a) {
            continue;
        }
        let (sigma, _, tau) = w.structure().triple(a);
        let qt = c.q().apply(tau);
        let (Some(vs), Some(vt), Some(vg)) = (ds.get(sigma), dt.get(tau), dg.get(qt)) else {
            out.skipped += 1;
            continue;
        };
        out.compared += 1;
        let vp = dp.get(a).expect("Δ_P is defined on supp μ_P");
        if vp * vg != vs * vt {
            out.mismatches.push(format!(
                "{}: Δ_P = {vp}, Δ_G(q(τ)) = {vg}, Δ_S(σ) = {vs}, Δ_T(τ) = {vt}",
                p_label(w, a)
            ));
        }
    }
    out
}

/// Both projections are Haar homomorphisms, and their pushforwards match
/// the closed forms `λ_S(σ) h₁(p(rσ)) μ_S⁽⁰⁾(rσ)` and
/// `λ_T(τ) h₂(q(rτ)) μ_T⁽⁰⁾(rτ)`.
pub fn check_projection_homs(w: &WeakPullbackResult) -> Result<ValidationReport> {
    let c = w.cospan();
    let pg = w.groupoid();
    let mut report = validate_hom(pg, c.s().groupoid(), w.structure().pi_s())?.scoped("pi_S");
    report.extend(validate_hom(pg, c.t().groupoid(), w.structure().pi_t())?.scoped("pi_T"));
    if !report.is_empty() {
        return Ok(report);
    }
    let mu_p = w.haar().induced();
    for (name, leg, pi) in [("pi_S", c.s(), w.structure().pi_s()), ("pi_T", c.t(), w.structure().pi_t())] {
        let lg = leg.groupoid();
        let map = FiniteMap::from_fn(0..pg.len(), 0..lg.len(), |&a| pi.apply(a))?;
        let pushed = push_forward(&map, mu_p)?;
        if !same_measure_class(&pushed, leg.induced())? {
            let x = class_witness(&pushed, leg.induced()).expect("classes differ");
            report.push(
                format!("{name}.measure_class"),
                vec![lg.id(x).to_string()],
                format!("pushforward {} but μ = {}", pushed.get(&x), leg.induced().get(&x)),
            );
        }
        let closed = if name == "pi_S" { pushforward_closed_form_s(c, w) } else { pushforward_closed_form_t(c, w) };
        for x in 0..lg.len() {
            if pushed.get(&x) != closed.get(&x) {
                report.push(
                    format!("{name}.closed_form"),
                    vec![lg.id(x).to_string()],
                    format!("pushforward {} but closed form {}", pushed.get(&x), closed.get(&x)),
                );
            }
        }
    }
    Ok(report)
}

// h₁(u) = Σ_{x ∈ G^u} λ_G^u(x) Σ_t γ_q^{d(x)}(t) λ_T^t(T^t)
fn pushforward_closed_form_s(c: &Cospan, w: &WeakPullbackResult) -> FiniteMeasure<usize> {
    let (s, g, t) = (c.s().groupoid(), c.g().groupoid(), c.t().groupoid());
    let t_mass: BTreeMap<usize, Weight> = t.units().iter().map(|&tu| (tu, c.t().haar().member(&tu).total())).collect();
    let h1 = |u: usize| -> Weight {
        let mut acc = Weight::zero();
        for &x in g.r_fiber(u).expect("unit") {
            let inner: Weight = w.gamma_q().entries(&g.source(x)).map(|(tu, gw)| gw * &t_mass[tu]).sum();
            acc += &c.g().haar().weight(&u, &x) * &inner;
        }
        acc
    };
    FiniteMeasure::from_fn(0..s.len(), |&sigma| {
        let rs = s.range(sigma);
        let ls = c.s().haar().weight(&rs, &sigma);
        &(&ls * &h1(c.p().apply(rs))) * &c.s().unit_measure().get(&rs)
    })
}

// h₂(v) = Σ_{x ∈ G_v} K(r(x)) μ_G(x) / μ_G⁽⁰⁾(v), K(u) = Σ_s γ_p^u(s) λ_S^s(S^s);
// zero on μ_G⁽⁰⁾-null v
fn pushforward_closed_form_t(c: &Cospan, w: &WeakPullbackResult) -> FiniteMeasure<usize> {
    let (s, g, t) = (c.s().groupoid(), c.g().groupoid(), c.t().groupoid());
    let s_mass: BTreeMap<usize, Weight> = s.units().iter().map(|&su| (su, c.s().haar().member(&su).total())).collect();
    let k = |u: usize| -> Weight { w.gamma_p().entries(&u).map(|(su, gw)| gw * &s_mass[su]).sum() };
    let h2 = |v: usize| -> Weight {
        let nv = c.g().unit_measure().get(&v);
        if nv.is_zero() {
            return Weight::zero();
        }
        let mut acc = Weight::zero();
        for x in (0..g.len()).filter(|&x| g.source(x) == v) {
            acc += &k(g.range(x)) * &c.g().induced().get(&x);
        }
        acc.checked_div(&nv).expect("positive")
    };
    FiniteMeasure::from_fn(0..t.len(), |&tau| {
        let rt = t.range(tau);
        let lt = c.t().haar().weight(&rt, &tau);
        &(&lt * &h2(c.q().apply(rt))) * &c.t().unit_measure().get(&rt)
    })
}

/// Alternate disintegrations: the canonical ones with null fibers weighted
/// `2 + (index mod 3)` instead of 1.
pub fn alternate_disintegrations(c: &Cospan) -> Result<(MeasureSystem<usize, usize>, MeasureSystem<usize, usize>)> {
    let choice = |_: &usize, x: &usize| Weight::from_integer(2 + (*x as u64 % 3));
    let mu_g0 = c.g().unit_measure();
    let gp = disintegrate_with(&c.p_units(), c.s().unit_measure(), mu_g0, choice)?;
    let gq = disintegrate_with(&c.q_units(), c.t().unit_measure(), mu_g0, choice)?;
    Ok((gp, gq))
}

/// `μ_P⁽⁰⁾` from the given disintegrations equals `μ_P⁽⁰⁾` from the
/// canonical ones. Fails with `NotADisintegration` if the alternates do not
/// reconstruct the unit measures.
pub fn check_disintegration_independence(
    c: &Cospan,
    alt_p: &MeasureSystem<usize, usize>,
    alt_q: &MeasureSystem<usize, usize>,
) -> Result<bool> {
    let mu_g0 = c.g().unit_measure();
    if alt_p.over() != &c.p_units() || !is_disintegration(alt_p, c.s().unit_measure(), mu_g0) {
        return Err(Error::NotADisintegration("alternate γ_p does not reconstruct μ_S⁽⁰⁾".into()));
    }
    if alt_q.over() != &c.q_units() || !is_disintegration(alt_q, c.t().unit_measure(), mu_g0) {
        return Err(Error::NotADisintegration("alternate γ_q does not reconstruct μ_T⁽⁰⁾".into()));
    }
    let (gp, gq) = c.disintegrations()?;
    let pg = weak_pullback_groupoid(c.s().groupoid(), c.g().groupoid(), c.t().groupoid(), c.p(), c.q())?;
    let canonical = pullback_unit_measure(c, &eta_system(c, &pg, &gp, &gq));
    let alternate = pullback_unit_measure(c, &eta_system(c, &pg, alt_p, alt_q));
    Ok(canonical == alternate)
}

/// Orbits of `r(p(π_S(α)))` and `r(q(π_T(α)))` agree for every `α`.
pub fn check_commuting_diamond(w: &WeakPullbackResult) -> bool {
    let c = w.cospan();
    let left = orbit_map_through(c.g().groupoid(), &w.structure().pi_s().then(c.p()));
    let right = orbit_map_through(c.g().groupoid(), &w.structure().pi_t().then(c.q()));
    left == right
}

/// First `α` with `p(π_S(α)) ≠ q(π_T(α))`: the square itself need not commute.
pub fn square_failure_witness(w: &WeakPullbackResult) -> Option<usize> {
    let c = w.cospan();
    (0..w.groupoid().len()).find(|&a| {
        let (si, _, ti) = w.structure().triple(a);
        c.p().apply(si) != c.q().apply(ti)
    })
}

type Side<'a> = (&'a HaarGroupoid, &'a GroupoidHom, &'a MeasureSystem<usize, usize>);

/// Both sides of the commuting triple integral identity, per unit `u` of `G`,
/// as measures on `G * S` keyed by `(y, σ)`. Zero entries are dropped.
fn triple_integral_sides(c: &Cospan, side: Side<'_>) -> BTreeMap<usize, (BTreeMap<(usize, usize), Weight>, BTreeMap<(usize, usize), Weight>)> {
    let (leg, hom, gamma) = side;
    let g = c.g().groupoid();
    let (lg, ll) = (c.g().haar(), leg.haar());
    let lgr = leg.groupoid();
    let mut out = BTreeMap::new();
    for &u in g.units() {
        let mut lhs: BTreeMap<(usize, usize), Weight> = BTreeMap::new();
        for (s, gw) in gamma.entries(&u) {
            for (sigma, lw) in ll.entries(s) {
                let base = hom.apply(lgr.range(*sigma));
                for (y, yw) in lg.entries(&base) {
                    let term = &(gw * lw) * yw;
                    *lhs.entry((*y, *sigma)).or_default() += term;
                }
            }
        }
        let mut rhs: BTreeMap<(usize, usize), Weight> = BTreeMap::new();
        for (y, yw) in lg.entries(&u) {
            for (s, gw) in gamma.entries(&g.range(*y)) {
                for (sigma, lw) in ll.entries(s) {
                    let term = &(lw * gw) * yw;
                    *rhs.entry((*y, *sigma)).or_default() += term;
                }
            }
        }
        lhs.retain(|_, w| !w.is_zero());
        rhs.retain(|_, w| !w.is_zero());
        out.insert(u, (lhs, rhs));
    }
    out
}

/// The same identity as an equality of systems over `G * S → G⁽⁰⁾`:
/// `(γ∘λ_S) ∘ (p∘r_S)^*λ_G = λ_G ∘ r_G^*(γ∘λ_S)`.
fn triple_integral_by_systems(c: &Cospan, side: Side<'_>) -> Result<bool> {
    let (leg, hom, gamma) = side;
    let g = c.g().groupoid();
    let lgr = leg.groupoid();
    let a = compose_systems(leg.haar(), gamma)?;
    let pr = FiniteMap::from_fn(0..lgr.len(), g.units().iter().copied(), |&x| hom.apply(lgr.range(x)))?;
    let rg = FiniteMap::from_fn(0..g.len(), g.units().iter().copied(), |&y| g.range(y))?;
    let lhs = compose_systems(&lift_system(c.g().haar(), &pr), &a)?;
    let rhs = compose_systems(&lift_system(&a, &rg), c.g().haar())?;
    for &u in g.units() {
        let l: BTreeMap<(usize, usize), Weight> = lhs
            .entries(&u)
            .filter(|(_, w)| !w.is_zero())
            .map(|((sigma, y), w)| ((*y, *sigma), w.clone()))
            .collect();
        let r: BTreeMap<(usize, usize), Weight> =
            rhs.entries(&u).filter(|(_, w)| !w.is_zero()).map(|(k, w)| (*k, w.clone())).collect();
        if l != r {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The commuting triple integral identity for both legs, checked on every
/// singleton indicator of `G * S` (resp. `G * T`) and through the system
/// algebra.
pub fn check_triple_integral_lemma(c: &Cospan) -> Result<bool> {
    Ok(triple_integral_report(c)?.is_empty())
}

pub fn triple_integral_report(c: &Cospan) -> Result<ValidationReport> {
    let (gp, gq) = c.disintegrations()?;
    let g = c.g().groupoid();
    let mut report = ValidationReport::new();
    for (name, side) in [("S", (c.s(), c.p(), &gp)), ("T", (c.t(), c.q(), &gq))] {
        let leg = side.0.groupoid();
        for (u, (lhs, rhs)) in triple_integral_sides(c, side) {
            for (key, w) in lhs.iter().chain(rhs.iter()) {
                let (y, sigma) = *key;
                if g.range(y) != side.1.apply(leg.range(sigma)) {
                    report.push(
                        format!("triple_integral.{name}.domain"),
                        vec![g.id(u).to_string(), g.id(y).to_string(), leg.id(sigma).to_string()],
                        format!("mass {w} outside the fibred product"),
                    );
                }
            }
            if lhs != rhs {
                let key = lhs
                    .keys()
                    .chain(rhs.keys())
                    .find(|k| lhs.get(k) != rhs.get(k))
                    .copied()
                    .expect("maps differ");
                report.push(
                    format!("triple_integral.{name}"),
                    vec![g.id(u).to_string(), g.id(key.0).to_string(), leg.id(key.1).to_string()],
                    format!(
                        "left {} but right {}",
                        lhs.get(&key).cloned().unwrap_or_default(),
                        rhs.get(&key).cloned().unwrap_or_default()
                    ),
                );
            }
        }
        if !triple_integral_by_systems(c, side)? {
            report.push(format!("triple_integral.{name}.systems"), vec![], "system compositions differ");
        }
    }
    Ok(report)
}

/// `∫ f dμ_P` equals the six-fold nested sum over
/// `(u, y, s, σ, t, τ)` for every singleton indicator `f`.
pub fn check_expanding_lemma(w: &WeakPullbackResult) -> bool {
    expanding_lemma_report(w).is_empty()
}

pub fn expanding_lemma_report(w: &WeakPullbackResult) -> ValidationReport {
    let c = w.cospan();
    let g = c.g().groupoid();
    let (lg, ls, lt) = (c.g().haar(), c.s().haar(), c.t().haar());
    let mut report = ValidationReport::new();
    let mut binned: BTreeMap<usize, Weight> = BTreeMap::new();
    for (u, mu_u) in c.g().unit_measure().iter() {
        if mu_u.is_zero() {
            continue;
        }
        for (y, yw) in lg.entries(u) {
            let wy = mu_u * yw;
            for (s, gs) in w.gamma_p().entries(&g.range(*y)) {
                for (sigma, sw) in ls.entries(s) {
                    let wys = &(&wy * gs) * sw;
                    for (t, gt) in w.gamma_q().entries(&g.source(*y)) {
                        for (tau, tw) in lt.entries(t) {
                            let term = &(&wys * gt) * tw;
                            if term.is_zero() {
                                continue;
                            }
                            match w.structure().index_of(&(*sigma, *y, *tau)) {
                                Some(a) => *binned.entry(a).or_default() += term,
                                None => report.push(
                                    "expanding.domain",
                                    vec![format!(
                                        "{}|{}|{}",
                                        c.s().groupoid().id(*sigma),
                                        g.id(*y),
                                        c.t().groupoid().id(*tau)
                                    )],
                                    "nested sum lands outside P",
                                ),
                            }
                        }
                    }
                }
            }
        }
    }
    let mu_p = w.haar().induced();
    for a in 0..w.groupoid().len() {
        let nested = binned.get(&a).cloned().unwrap_or_default();
        if nested != mu_p.get(&a) {
            report.push(
                "expanding",
                vec![p_label(w, a)],
                format!("μ_P = {} but nested sum = {nested}", mu_p.get(&a)),
            );
        }
    }
    report
}

/// `η` and `μ_P⁽⁰⁾` recomputed as `μ_G ∘ (r,d)^*(γ_p * γ_q)`.
pub fn unit_measure_by_lift_report(w: &WeakPullbackResult) -> ValidationReport {
    let c = w.cospan();
    let g = c.g().groupoid();
    let mut report = ValidationReport::new();
    let product = match product_system(w.gamma_p(), w.gamma_q(), |_, _| true, |_, _| true) {
        Ok(p) => p,
        Err(e) => {
            report.push("unit_measure.lift", vec![], e.to_string());
            return report;
        }
    };
    let units: Vec<(usize, usize)> = g.units().iter().flat_map(|&a| g.units().iter().map(move |&b| (a, b))).collect();
    let rd = FiniteMap::from_fn(0..g.len(), units, |&x| (g.range(x), g.source(x))).expect("pairs of units");
    let lifted = lift_system(&product, &rd);
    for x in 0..g.len() {
        for (key, lw) in lifted.entries(&x) {
            let (xx, (s, t)) = *key;
            let v = w.structure().index_of(&(s, xx, t));
            match v {
                Some(v) if w.groupoid().is_unit(v) => {
                    if w.eta().weight(&x, &v) != *lw {
                        report.push("eta.lift", vec![g.id(x).to_string(), p_label(w, v)], "η differs from the lifted product");
                    }
                }
                _ => {
                    if lw.is_positive() {
                        report.push("eta.lift", vec![g.id(x).to_string()], "lifted product has mass outside P⁽⁰⁾");
                    }
                }
            }
        }
    }
    let composed = compose_with_measure(&lifted, c.g().induced());
    let mut mu0 = FiniteMeasure::zero_on(w.groupoid().units().iter().copied());
    for ((x, (s, t)), m) in composed.iter() {
        if let Some(v) = w.structure().index_of(&(*s, *x, *t)) {
            let prev = mu0.get(&v);
            mu0.set(v, prev + m.clone());
        }
    }
    if mu0 != *w.unit_measure() {
        let v = class_witness(&mu0, w.unit_measure())
            .or_else(|| w.groupoid().units().iter().copied().find(|v| mu0.get(v) != w.unit_measure().get(v)));
        report.push(
            "unit_measure.lift",
            v.map(|v| vec![p_label(w, v)]).unwrap_or_default(),
            "μ_P⁽⁰⁾ differs from μ_G ∘ (r,d)^*(γ_p * γ_q)",
        );
    }
    report
}

/// Runs every claim. With `strict`, skipped off-support modular triples
/// count as a failure.
pub fn run_all_checks(w: &WeakPullbackResult, strict: bool) -> Result<ClaimsReport> {
    let c = w.cospan();
    let mut claims = Vec::new();

    let groupoid_report = check_groupoid(w);
    claims.push(ClaimOutcome::from_report(
        "def.weak_pullback.groupoid",
        &groupoid_report,
        format!("{} elements, {} units", w.groupoid().len(), w.groupoid().units().len()).as_str(),
    ));
    claims.push(ClaimOutcome::from_report(
        "lem.fibers",
        &fiber_lemma_report(w),
        "every unit fiber is S^s × {g} × T^t",
    ));
    claims.push(ClaimOutcome::from_report(
        "thm.haar_system",
        &check_haar_theorem(w),
        "λ_P is full and left invariant",
    ));
    claims.push(ClaimOutcome::from_report(
        "def.unit_measure",
        &unit_measure_by_lift_report(w),
        "η and μ_P⁽⁰⁾ agree with the lifted fibred product of disintegrations",
    ));

    let m = check_quasi_invariance_and_modular(w);
    let mut qi = ClaimOutcome::new(
        "prop.quasi_invariance",
        m.quasi_invariant,
        if m.quasi_invariant { "supp μ_P = supp μ_P⁻¹" } else { "μ_P and μ_P⁻¹ have different supports" },
    );
    qi.witnesses = m.witness.iter().cloned().collect();
    claims.push(qi);
    let mut modular = ClaimOutcome::new(
        "remark.modular_formula",
        m.passed(strict),
        format!("{} compared, {} skipped off support", m.compared, m.skipped),
    );
    modular.skipped = m.skipped;
    if let Some(first) = m.mismatches.first() {
        modular.detail = format!("{} mismatch(es), first {first}", m.mismatches.len());
    } else if strict && m.skipped > 0 {
        modular.detail = format!("{} skipped off support (strict)", m.skipped);
    }
    claims.push(modular);

    claims.push(ClaimOutcome::from_report(
        "prop.haar_homs",
        &check_projection_homs(w)?,
        "π_S and π_T are Haar homomorphisms",
    ));

    let (alt_p, alt_q) = alternate_disintegrations(c)?;
    let nulls = c.g().unit_measure().iter().filter(|(_, x)| x.is_zero()).count();
    let indep = check_disintegration_independence(c, &alt_p, &alt_q)?;
    claims.push(ClaimOutcome::new(
        "prop.disintegration_independence",
        indep,
        format!("μ_P⁽⁰⁾ unchanged under an alternate choice on {nulls} null unit(s) of G"),
    ));

    let diamond = check_commuting_diamond(w);
    let mut d = ClaimOutcome::new("diamond.commutes", diamond, "orbit maps through p∘π_S and q∘π_T agree");
    if let Some(a) = square_failure_witness(w) {
        d.detail.push_str(&format!("; inner square fails at {}", p_label(w, a)));
    }
    claims.push(d);

    claims.push(ClaimOutcome::from_report(
        "lem.triple_integrals",
        &triple_integral_report(c)?,
        "both orders of integration agree for S and T",
    ));
    claims.push(ClaimOutcome::from_report(
        "lem.expanding_integral",
        &expanding_lemma_report(w),
        "μ_P equals the six-fold nested sum on every singleton",
    ));
    claims.push(ClaimOutcome::from_report(
        "cor.haar_groupoid",
        &if groupoid_report.is_empty() { w.haar().validate_measures() } else { groupoid_report.clone() },
        "(P, λ_P, μ_P⁽⁰⁾) is a Haar groupoid",
    ));
    claims.push(ClaimOutcome::new(
        "assumption.locally_bounded",
        true,
        "finite sets: disintegrations and Δ_G are bounded",
    ));
    Ok(ClaimsReport { claims })
}
