//! The weak pullback of a cospan `S --p--> G <--q-- T` and its Haar data.
//!
//! Elements are triples `(s, g, t)` with `r(g) = r(p(s))` and
//! `d(g) = r(q(t))`; the id of a triple is `s|g|t`.

mod checks;

use std::collections::{BTreeMap, HashMap};

pub use checks::*;

use crate::error::{Error, Result};
use crate::groupoid::{validate_hom, ElementId, FiniteGroupoid, GroupoidHom, GroupoidParts, ValidationReport};
use crate::haar::{haar_from_unit_weights, modular_function, range_map, HaarGroupoid, HaarSystem, ModularFunction};
use crate::measure::{compose_with_measure, disintegrate, FiniteMap, FiniteMeasure, MeasureSystem};
use crate::weight::Weight;

/// Two Haar homomorphisms with a common codomain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cospan {
    s: HaarGroupoid,
    g: HaarGroupoid,
    t: HaarGroupoid,
    p: GroupoidHom,
    q: GroupoidHom,
}

impl Cospan {
    /// Validates the three Haar groupoids and both homomorphisms.
    pub fn new(s: HaarGroupoid, g: HaarGroupoid, t: HaarGroupoid, p: GroupoidHom, q: GroupoidHom) -> Result<Self> {
        let c = Cospan::new_unchecked(s, g, t, p, q);
        let report = c.validate()?;
        if !report.is_empty() {
            return Err(Error::InvalidCospan(report));
        }
        Ok(c)
    }

    pub fn new_unchecked(s: HaarGroupoid, g: HaarGroupoid, t: HaarGroupoid, p: GroupoidHom, q: GroupoidHom) -> Self {
        Cospan { s, g, t, p, q }
    }

    pub fn validate(&self) -> Result<ValidationReport> {
        let mut report = ValidationReport::new();
        report.extend(self.s.validate().scoped("S"));
        report.extend(self.g.validate().scoped("G"));
        report.extend(self.t.validate().scoped("T"));
        if !report.is_empty() {
            return Ok(report);
        }
        report.extend(crate::haar::validate_haar_hom(&self.p, &self.s, &self.g)?.scoped("p"));
        report.extend(crate::haar::validate_haar_hom(&self.q, &self.t, &self.g)?.scoped("q"));
        Ok(report)
    }

    pub fn s(&self) -> &HaarGroupoid {
        &self.s
    }

    pub fn g(&self) -> &HaarGroupoid {
        &self.g
    }

    pub fn t(&self) -> &HaarGroupoid {
        &self.t
    }

    pub fn p(&self) -> &GroupoidHom {
        &self.p
    }

    pub fn q(&self) -> &GroupoidHom {
        &self.q
    }

    /// `p` restricted to units, as a map `S⁽⁰⁾ → G⁽⁰⁾`.
    pub fn p_units(&self) -> FiniteMap<usize, usize> {
        unit_restriction(self.s.groupoid(), self.g.groupoid(), &self.p)
    }

    pub fn q_units(&self) -> FiniteMap<usize, usize> {
        unit_restriction(self.t.groupoid(), self.g.groupoid(), &self.q)
    }

    /// The canonical disintegrations `(γ_p, γ_q)`.
    pub fn disintegrations(&self) -> Result<(MeasureSystem<usize, usize>, MeasureSystem<usize, usize>)> {
        let mu_g0 = self.g.unit_measure();
        let gp = disintegrate(&self.p_units(), self.s.unit_measure(), mu_g0)?;
        let gq = disintegrate(&self.q_units(), self.t.unit_measure(), mu_g0)?;
        Ok((gp, gq))
    }
}

fn unit_restriction(dom: &FiniteGroupoid, cod: &FiniteGroupoid, hom: &GroupoidHom) -> FiniteMap<usize, usize> {
    FiniteMap::from_fn(dom.units().iter().copied(), cod.units().iter().copied(), |&u| hom.apply(u))
        .expect("hom sends units to units")
}

/// One element of a weak pullback, by component ids.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PElement {
    pub s: ElementId,
    pub g: ElementId,
    pub t: ElementId,
}

impl PElement {
    pub fn id(&self) -> String {
        format!("{}|{}|{}", self.s, self.g, self.t)
    }
}

/// `(s, g, t)` as indices into `S`, `G` and `T`.
pub type Triple = (usize, usize, usize);

/// The weak pullback groupoid with its two projections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullbackGroupoid {
    groupoid: FiniteGroupoid,
    triples: Vec<Triple>,
    index: HashMap<Triple, usize>,
    pi_s: GroupoidHom,
    pi_t: GroupoidHom,
}

impl PullbackGroupoid {
    pub fn groupoid(&self) -> &FiniteGroupoid {
        &self.groupoid
    }

    pub fn triple(&self, a: usize) -> Triple {
        self.triples[a]
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn index_of(&self, t: &Triple) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn pi_s(&self) -> &GroupoidHom {
        &self.pi_s
    }

    pub fn pi_t(&self) -> &GroupoidHom {
        &self.pi_t
    }

    /// The `G` component, which is not a homomorphism in general.
    pub fn pi_g(&self, a: usize) -> usize {
        self.triples[a].1
    }
}

/// Builds the weak pullback groupoid. The homomorphisms are validated
/// algebraically; no measure data is involved.
pub fn weak_pullback_groupoid(
    s: &FiniteGroupoid,
    g: &FiniteGroupoid,
    t: &FiniteGroupoid,
    p: &GroupoidHom,
    q: &GroupoidHom,
) -> Result<PullbackGroupoid> {
    let mut report = validate_hom(s, g, p)?.scoped("p");
    report.extend(validate_hom(t, g, q)?.scoped("q"));
    if !report.is_empty() {
        return Err(Error::InvalidCospan(report));
    }

    // T grouped by r_G(q(t))
    let mut t_by_unit: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for ti in 0..t.len() {
        t_by_unit.entry(g.range(q.apply(ti))).or_default().push(ti);
    }
    let mut found: Vec<(String, Triple)> = Vec::new();
    for si in 0..s.len() {
        let u = g.range(p.apply(si));
        for &gi in g.r_fiber(u)? {
            if let Some(ts) = t_by_unit.get(&g.source(gi)) {
                for &ti in ts {
                    found.push((format!("{}|{}|{}", s.id(si), g.id(gi), t.id(ti)), (si, gi, ti)));
                }
            }
        }
    }
    found.sort();
    let ids = found
        .iter()
        .map(|(id, _)| ElementId::new(id.clone()))
        .collect::<Result<Vec<_>>>()?;
    let triples: Vec<Triple> = found.into_iter().map(|(_, tr)| tr).collect();
    let mut index = HashMap::with_capacity(triples.len());
    for (a, tr) in triples.iter().enumerate() {
        index.insert(*tr, a);
    }
    let look = |tr: Triple| -> Result<usize> {
        index.get(&tr).copied().ok_or_else(|| {
            Error::MalformedInput(format!(
                "triple ({}, {}, {}) missing from the weak pullback",
                s.id(tr.0),
                g.id(tr.1),
                t.id(tr.2)
            ))
        })
    };
    // p(s)⁻¹ g q(t)
    let twist = |&(si, gi, ti): &Triple| -> Result<usize> {
        let ps_inv = g.inverse(p.apply(si));
        let a = g
            .compose(ps_inv, gi)
            .ok_or_else(|| Error::MalformedInput("p(s)⁻¹ g undefined".into()))?;
        g.compose(a, q.apply(ti))
            .ok_or_else(|| Error::MalformedInput("p(s)⁻¹ g q(t) undefined".into()))
    };

    let n = triples.len();
    let mut range = Vec::with_capacity(n);
    let mut source = Vec::with_capacity(n);
    let mut inverse = Vec::with_capacity(n);
    for tr in &triples {
        let (si, gi, ti) = *tr;
        let h = twist(tr)?;
        range.push(look((s.range(si), gi, t.range(ti)))?);
        source.push(look((s.source(si), h, t.source(ti)))?);
        inverse.push(look((s.inverse(si), h, t.inverse(ti)))?);
    }
    let units: Vec<usize> = (0..n).filter(|&a| range[a] == a).collect();

    let mut by_range: Vec<Vec<usize>> = vec![Vec::new(); n];
    for b in 0..n {
        by_range[range[b]].push(b);
    }
    let mut compose = Vec::new();
    for a in 0..n {
        let (si, gi, ti) = triples[a];
        for &b in &by_range[source[a]] {
            let (sj, _, tj) = triples[b];
            let ss = s
                .compose(si, sj)
                .ok_or_else(|| Error::MalformedInput("S product undefined on a composable pair".into()))?;
            let tt = t
                .compose(ti, tj)
                .ok_or_else(|| Error::MalformedInput("T product undefined on a composable pair".into()))?;
            compose.push((a, b, look((ss, gi, tt))?));
        }
    }
    let groupoid = FiniteGroupoid::from_parts(GroupoidParts {
        ids,
        units,
        range,
        source,
        inverse,
        compose,
    })?;
    let pi_s = GroupoidHom::new(triples.iter().map(|tr| tr.0).collect());
    let pi_t = GroupoidHom::new(triples.iter().map(|tr| tr.2).collect());
    Ok(PullbackGroupoid {
        groupoid,
        triples,
        index,
        pi_s,
        pi_t,
    })
}

/// The weak pullback with every measure the construction attaches to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakPullbackResult {
    cospan: Cospan,
    structure: PullbackGroupoid,
    haar: HaarGroupoid,
    gamma_p: MeasureSystem<usize, usize>,
    gamma_q: MeasureSystem<usize, usize>,
    eta: MeasureSystem<usize, usize>,
    modular: Option<ModularFunction>,
}

impl WeakPullbackResult {
    pub fn cospan(&self) -> &Cospan {
        &self.cospan
    }

    pub fn structure(&self) -> &PullbackGroupoid {
        &self.structure
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        self.structure.groupoid()
    }

    /// `(P, λ_P, μ_P⁽⁰⁾)`.
    pub fn haar(&self) -> &HaarGroupoid {
        &self.haar
    }

    pub fn lambda(&self) -> &HaarSystem {
        self.haar.haar()
    }

    pub fn unit_measure(&self) -> &FiniteMeasure<usize> {
        self.haar.unit_measure()
    }

    pub fn gamma_p(&self) -> &MeasureSystem<usize, usize> {
        &self.gamma_p
    }

    pub fn gamma_q(&self) -> &MeasureSystem<usize, usize> {
        &self.gamma_q
    }

    /// `η` over `π_G: P⁽⁰⁾ → G`.
    pub fn eta(&self) -> &MeasureSystem<usize, usize> {
        &self.eta
    }

    /// `Δ_P`, absent when `μ_P⁽⁰⁾` fails to be quasi-invariant.
    pub fn modular(&self) -> Option<&ModularFunction> {
        self.modular.as_ref()
    }

    pub fn element(&self, a: usize) -> PElement {
        let (si, gi, ti) = self.structure.triple(a);
        PElement {
            s: self.cospan.s.groupoid().id(si).clone(),
            g: self.cospan.g.groupoid().id(gi).clone(),
            t: self.cospan.t.groupoid().id(ti).clone(),
        }
    }

    /// Replaces `λ_P` keeping everything else; used to exercise the checks.
    pub fn with_lambda(&self, lambda: HaarSystem) -> Self {
        let mut out = self.clone();
        out.haar = HaarGroupoid::new_unchecked(self.groupoid().clone(), lambda, self.unit_measure().clone());
        out
    }

    /// Replaces `μ_P⁽⁰⁾` keeping everything else.
    pub fn with_unit_measure(&self, mu0: FiniteMeasure<usize>) -> Self {
        let mut out = self.clone();
        out.haar = HaarGroupoid::new_unchecked(self.groupoid().clone(), self.lambda().clone(), mu0);
        out.modular = modular_function(&out.haar).ok();
        out
    }
}

/// `λ_P^{(s,g,t)}(σ, x, τ) = λ_S^s(σ) [x = g] λ_T^t(τ)`.
pub fn pullback_haar_system(c: &Cospan, pg: &PullbackGroupoid) -> HaarSystem {
    let (ls, lt) = (c.s.haar(), c.t.haar());
    MeasureSystem::on_fibers(range_map(pg.groupoid()), |&v, &a| {
        let (s, g, t) = pg.triple(v);
        let (sigma, x, tau) = pg.triple(a);
        if x != g {
            return Weight::zero();
        }
        &ls.weight(&s, &sigma) * &lt.weight(&t, &tau)
    })
}

/// `η^x(s, g, t) = γ_p^{r(x)}(s) [g = x] γ_q^{d(x)}(t)` over `π_G: P⁽⁰⁾ → G`.
pub fn eta_system(
    c: &Cospan,
    pg: &PullbackGroupoid,
    gamma_p: &MeasureSystem<usize, usize>,
    gamma_q: &MeasureSystem<usize, usize>,
) -> MeasureSystem<usize, usize> {
    let g = c.g.groupoid();
    let p0 = pg.groupoid().units().iter().copied();
    let over = FiniteMap::from_fn(p0, 0..g.len(), |&v| pg.pi_g(v)).expect("G component lies in G");
    MeasureSystem::on_fibers(over, |&x, &v| {
        let (s, gi, t) = pg.triple(v);
        if gi != x {
            return Weight::zero();
        }
        &gamma_p.weight(&g.range(x), &s) * &gamma_q.weight(&g.source(x), &t)
    })
}

/// `μ_P⁽⁰⁾(v) = Σ_x η^x(v) μ_G(x)`.
pub fn pullback_unit_measure(c: &Cospan, eta: &MeasureSystem<usize, usize>) -> FiniteMeasure<usize> {
    compose_with_measure(eta, c.g.induced())
}

pub fn build_weak_pullback(c: &Cospan) -> Result<WeakPullbackResult> {
    let report = c.validate()?;
    if !report.is_empty() {
        return Err(Error::InvalidCospan(report));
    }
    let (gamma_p, gamma_q) = c.disintegrations()?;
    build_with_disintegrations(c, gamma_p, gamma_q)
}

/// Builds with caller-supplied disintegrations, which are not checked here.
pub fn build_with_disintegrations(
    c: &Cospan,
    gamma_p: MeasureSystem<usize, usize>,
    gamma_q: MeasureSystem<usize, usize>,
) -> Result<WeakPullbackResult> {
    let structure = weak_pullback_groupoid(c.s.groupoid(), c.g.groupoid(), c.t.groupoid(), &c.p, &c.q)?;
    let lambda = pullback_haar_system(c, &structure);
    let eta = eta_system(c, &structure, &gamma_p, &gamma_q);
    let mu0 = pullback_unit_measure(c, &eta);
    let haar = HaarGroupoid::new_unchecked(structure.groupoid().clone(), lambda, mu0);
    let modular = modular_function(&haar).ok();
    Ok(WeakPullbackResult {
        cospan: c.clone(),
        structure,
        haar,
        gamma_p,
        gamma_q,
        eta,
        modular,
    })
}

/// Haar data with a constant Haar weight `w` and unit measure `mu0` on
/// every unit; convenient for fixtures.
pub fn uniform_haar(g: FiniteGroupoid, w: Weight, mu0: Weight) -> Result<HaarGroupoid> {
    let units: Vec<usize> = g.units().to_vec();
    let wts = units.iter().map(|&u| (u, w.clone())).collect();
    let m = units.iter().map(|&u| (u, mu0.clone())).collect();
    let haar = haar_from_unit_weights(&g, &wts);
    HaarGroupoid::try_new(g, haar, FiniteMeasure::from_weights(m))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::groupoid::tests::{cyclic, pair_groupoid, trivial};

    pub fn z2_cospan() -> Cospan {
        let z2 = HaarGroupoid::counting(cyclic(2)).unwrap();
        let id = GroupoidHom::identity(z2.groupoid());
        Cospan::new(z2.clone(), z2.clone(), z2, id.clone(), id).unwrap()
    }

    #[test]
    fn z2_cospan_shape() {
        let w = build_weak_pullback(&z2_cospan()).unwrap();
        assert_eq!(w.groupoid().len(), 8);
        assert_eq!(w.groupoid().units().len(), 2);
        assert!(w.groupoid().validate().is_empty());
        let unit_ids: Vec<String> = w.groupoid().units().iter().map(|&u| w.groupoid().id(u).to_string()).collect();
        assert_eq!(unit_ids, vec!["e|e|e".to_string(), "e|g1|e".to_string()]);
        assert!(w.modular().unwrap().is_identically_one());
    }

    #[test]
    fn structure_formulas_on_z2() {
        let w = build_weak_pullback(&z2_cospan()).unwrap();
        let pg = w.groupoid();
        let a = pg.index_of_str("g1|e|g1").unwrap();
        // r = (e, e, e); d = (e, g⁻¹ e g, e) = (e, e, e); inverse = (g, e, g)
        assert_eq!(pg.id(pg.range(a)).as_str(), "e|e|e");
        assert_eq!(pg.id(pg.source(a)).as_str(), "e|e|e");
        assert_eq!(pg.id(pg.inverse(a)).as_str(), "g1|e|g1");
        let b = pg.index_of_str("g1|g1|e").unwrap();
        // d = (e, g⁻¹ g e, e) = (e, e, e)
        assert_eq!(pg.id(pg.source(b)).as_str(), "e|e|e");
        assert_eq!(pg.id(pg.range(b)).as_str(), "e|g1|e");
        assert_eq!(pg.id(pg.inverse(b)).as_str(), "g1|e|e");
    }

    #[test]
    fn trivial_base_gives_product() {
        let s = HaarGroupoid::counting(pair_groupoid(&["1", "2"])).unwrap();
        let t = HaarGroupoid::counting(cyclic(3)).unwrap();
        let g = HaarGroupoid::counting(trivial()).unwrap();
        let p = GroupoidHom::constant(s.groupoid(), 0);
        let q = GroupoidHom::constant(t.groupoid(), 0);
        let c = Cospan::new(s, g, t, p, q).unwrap();
        let w = build_weak_pullback(&c).unwrap();
        assert_eq!(w.groupoid().len(), 4 * 3);
        assert_eq!(w.groupoid().units().len(), 2);
        assert!(w.groupoid().validate().is_empty());
    }

    #[test]
    fn invalid_cospan_is_rejected() {
        let pg = pair_groupoid(&["1", "2"]);
        let m = crate::haar::tests::weights(&pg, &[1, 0]);
        let w = crate::haar::tests::weights(&pg, &[1, 1]);
        let bad = HaarGroupoid::new_unchecked(
            pg.clone(),
            haar_from_unit_weights(&pg, &w),
            FiniteMeasure::from_weights(m),
        );
        let g = HaarGroupoid::counting(trivial()).unwrap();
        let p = GroupoidHom::constant(&pg, 0);
        let err = Cospan::new(bad.clone(), g.clone(), bad, p.clone(), p).unwrap_err();
        match err {
            Error::InvalidCospan(r) => {
                let v = r.find("S.quasi_invariance").unwrap();
                assert_eq!(v.witnesses, vec!["(1,2)".to_string()]);
            }
            other => panic!("unexpected {other}"),
        }
    }
}
