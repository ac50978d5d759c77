//! Haar systems, induced measures, quasi-invariance and modular functions.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::groupoid::{validate_hom, FiniteGroupoid, GroupoidHom, ValidationReport};
use crate::measure::{
    class_witness, compose_with_measure, push_forward, same_measure_class, validate_system_labelled,
    FiniteMap, FiniteMeasure, MeasureSystem,
};
use crate::weight::Weight;

/// A system over the range map `r: G → G⁽⁰⁾`, indexed by element indices.
pub type HaarSystem = MeasureSystem<usize, usize>;

/// `r: G → G⁽⁰⁾` as a finite map on indices.
pub fn range_map(g: &FiniteGroupoid) -> FiniteMap<usize, usize> {
    FiniteMap::from_fn(0..g.len(), g.units().iter().copied(), |&x| g.range(x)).expect("ranges are units")
}

/// `d: G → G⁽⁰⁾` as a finite map on indices.
pub fn source_map(g: &FiniteGroupoid) -> FiniteMap<usize, usize> {
    FiniteMap::from_fn(0..g.len(), g.units().iter().copied(), |&x| g.source(x)).expect("sources are units")
}

/// The Haar system `λ^{r(y)}(y) = w(d(y))` for a weight per unit.
/// Every full left-invariant system on a finite groupoid has this form.
pub fn haar_from_unit_weights(g: &FiniteGroupoid, w: &BTreeMap<usize, Weight>) -> HaarSystem {
    MeasureSystem::on_fibers(range_map(g), |_, &y| w.get(&g.source(y)).cloned().unwrap_or_default())
}

/// Counting measure on every r-fiber.
pub fn counting_haar(g: &FiniteGroupoid) -> HaarSystem {
    MeasureSystem::counting(range_map(g))
}

/// Full support on every r-fiber and pointwise left invariance
/// `λ^{d(x)}(y) = λ^{r(x)}(xy)`.
pub fn is_haar(g: &FiniteGroupoid, s: &HaarSystem) -> ValidationReport {
    let label = |x: &usize| g.ids().get(*x).map(|i| i.to_string()).unwrap_or_else(|| x.to_string());
    let mut report = ValidationReport::new();
    for x in 0..g.len() {
        if s.over().apply(&x) != Some(&g.range(x)) {
            report.push("haar.over_range", vec![label(&x)], "system is not indexed over the range map");
        }
    }
    if s.over().domain_len() != g.len() {
        report.push("haar.over_range", vec![], "system domain is not the element set");
    }
    if !report.is_empty() {
        return report;
    }
    report.extend(validate_system_labelled(s, true, label, label));
    for x in 0..g.len() {
        let (rx, dx) = (g.range(x), g.source(x));
        for &(y, xy) in g.compose_row(x) {
            let left = s.weight(&dx, &y);
            let right = s.weight(&rx, &xy);
            if left != right {
                report.push(
                    "haar.left_invariance",
                    vec![label(&x), label(&y)],
                    format!("λ^d(x)(y) = {left} but λ^r(x)(xy) = {right}"),
                );
            }
        }
    }
    report
}

/// `(G, λ, μ⁽⁰⁾)` with its induced measure cached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HaarGroupoid {
    groupoid: FiniteGroupoid,
    haar: HaarSystem,
    unit_measure: FiniteMeasure<usize>,
    induced: FiniteMeasure<usize>,
}

impl HaarGroupoid {
    /// Bundles the data without checking any property.
    pub fn new_unchecked(groupoid: FiniteGroupoid, haar: HaarSystem, unit_measure: FiniteMeasure<usize>) -> Self {
        let induced = compose_with_measure(&haar, &unit_measure);
        HaarGroupoid {
            groupoid,
            haar,
            unit_measure,
            induced,
        }
    }

    /// Bundles and validates: groupoid axioms, Haar property, a non-zero
    /// measure on exactly the units, quasi-invariance.
    pub fn try_new(groupoid: FiniteGroupoid, haar: HaarSystem, unit_measure: FiniteMeasure<usize>) -> Result<Self> {
        let h = Self::new_unchecked(groupoid, haar, unit_measure);
        let report = h.validate();
        if let Some(v) = report.find("quasi_invariance") {
            if report.len() == 1 {
                return Err(Error::NotQuasiInvariant { witness: v.witnesses[0].clone() });
            }
        }
        if !report.is_empty() {
            return Err(Error::MalformedInput(report.to_string()));
        }
        Ok(h)
    }

    /// Haar groupoid with the Haar system from unit weights `w`.
    pub fn from_weights(
        groupoid: FiniteGroupoid,
        w: &BTreeMap<usize, Weight>,
        unit_measure: BTreeMap<usize, Weight>,
    ) -> Result<Self> {
        let haar = haar_from_unit_weights(&groupoid, w);
        Self::try_new(groupoid, haar, FiniteMeasure::from_weights(unit_measure))
    }

    /// Counting Haar system and unit weights 1.
    pub fn counting(groupoid: FiniteGroupoid) -> Result<Self> {
        let haar = counting_haar(&groupoid);
        let mu0 = FiniteMeasure::counting(groupoid.units().iter().copied());
        Self::try_new(groupoid, haar, mu0)
    }

    pub fn validate(&self) -> ValidationReport {
        let report = self.groupoid.validate().scoped("groupoid");
        if !report.is_empty() {
            return report;
        }
        self.validate_measures()
    }

    /// Everything in `validate` except the groupoid axioms, for callers
    /// that have already checked those.
    pub fn validate_measures(&self) -> ValidationReport {
        let g = &self.groupoid;
        let mut report = is_haar(g, &self.haar);
        if !self.unit_measure.base().copied().eq(g.units().iter().copied()) {
            report.push("unit_measure.base", vec![], "unit measure must be based on the unit set");
            return report;
        }
        if self.unit_measure.is_zero() {
            report.push("unit_measure.nonzero", vec![], "unit measure must be non-zero");
        }
        if report.is_empty() {
            if let Some(x) = quasi_invariance_witness(self) {
                report.push(
                    "quasi_invariance",
                    vec![g.id(x).to_string()],
                    format!(
                        "μ({}) = {} but μ({}) = {}",
                        g.id(x),
                        self.induced.get(&x),
                        g.id(g.inverse(x)),
                        self.induced.get(&g.inverse(x))
                    ),
                );
            }
        }
        report
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        &self.groupoid
    }

    pub fn haar(&self) -> &HaarSystem {
        &self.haar
    }

    pub fn unit_measure(&self) -> &FiniteMeasure<usize> {
        &self.unit_measure
    }

    /// `μ(x) = λ^{r(x)}(x) μ⁽⁰⁾(r(x))`.
    pub fn induced(&self) -> &FiniteMeasure<usize> {
        &self.induced
    }

    /// Ids of the support of `μ⁽⁰⁾`, for diagnostics.
    pub fn unit_weights_by_id(&self) -> BTreeMap<String, Weight> {
        self.unit_measure
            .iter()
            .map(|(u, w)| (self.groupoid.id(*u).to_string(), w.clone()))
            .collect()
    }
}

/// `μ = ∫ λ^u dμ⁽⁰⁾(u)`.
pub fn induced_measure(h: &HaarGroupoid) -> FiniteMeasure<usize> {
    compose_with_measure(&h.haar, &h.unit_measure)
}

/// `μ⁻¹(x) = μ(x⁻¹)`.
pub fn inverse_measure(mu: &FiniteMeasure<usize>, g: &FiniteGroupoid) -> FiniteMeasure<usize> {
    FiniteMeasure::from_fn(0..g.len(), |&x| mu.get(&g.inverse(x)))
}

/// First element (canonical order) with `μ(x) > 0` and `μ(x⁻¹) = 0`.
pub fn quasi_invariance_witness(h: &HaarGroupoid) -> Option<usize> {
    let g = &h.groupoid;
    (0..g.len()).find(|&x| h.induced.in_support(&x) && !h.induced.in_support(&g.inverse(x)))
}

pub fn is_quasi_invariant(h: &HaarGroupoid) -> bool {
    quasi_invariance_witness(h).is_none()
}

/// `Δ = dμ/dμ⁻¹`, defined on the support of `μ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularFunction {
    values: BTreeMap<usize, Weight>,
}

impl ModularFunction {
    pub fn get(&self, x: usize) -> Option<&Weight> {
        self.values.get(&x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Weight)> {
        self.values.iter().map(|(x, w)| (*x, w))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_identically_one(&self) -> bool {
        self.values.values().all(|w| *w == Weight::one())
    }

    /// Replaces one value; used for negative controls.
    pub fn set(&mut self, x: usize, w: Weight) {
        self.values.insert(x, w);
    }
}

pub fn modular_function(h: &HaarGroupoid) -> Result<ModularFunction> {
    if let Some(x) = quasi_invariance_witness(h) {
        return Err(Error::NotQuasiInvariant { witness: h.groupoid.id(x).to_string() });
    }
    let g = &h.groupoid;
    let mut values = BTreeMap::new();
    for x in 0..g.len() {
        let mx = h.induced.get(&x);
        if mx.is_positive() {
            let mi = h.induced.get(&g.inverse(x));
            values.insert(x, mx.checked_div(&mi).expect("support is inverse closed"));
        }
    }
    Ok(ModularFunction { values })
}

/// Element-level class preservation `p_*(μ_dom) ∼ μ_cod` together with the
/// derived unit-level statement `p_*(μ⁽⁰⁾_dom) ∼ μ⁽⁰⁾_cod`.
pub fn validate_haar_hom(p: &GroupoidHom, dom: &HaarGroupoid, cod: &HaarGroupoid) -> Result<ValidationReport> {
    let mut report = validate_hom(&dom.groupoid, &cod.groupoid, p)?;
    if !report.is_empty() {
        return Ok(report);
    }
    let (gd, gc) = (&dom.groupoid, &cod.groupoid);
    let elem_map = FiniteMap::from_fn(0..gd.len(), 0..gc.len(), |&x| p.apply(x))?;
    let pushed = push_forward(&elem_map, &dom.induced)?;
    if !same_measure_class(&pushed, &cod.induced)? {
        let y = class_witness(&pushed, &cod.induced).expect("classes differ");
        report.push(
            "haar_hom.measure_class",
            vec![gc.id(y).to_string()],
            format!("p_*μ = {} but μ = {}", pushed.get(&y), cod.induced.get(&y)),
        );
    }
    let unit_map = FiniteMap::from_fn(gd.units().iter().copied(), gc.units().iter().copied(), |&u| p.apply(u))?;
    let pushed0 = push_forward(&unit_map, &dom.unit_measure)?;
    if !same_measure_class(&pushed0, &cod.unit_measure)? {
        let u = class_witness(&pushed0, &cod.unit_measure).expect("classes differ");
        report.push(
            "haar_hom.unit_class",
            vec![gc.id(u).to_string()],
            format!("p_*μ⁽⁰⁾ = {} but μ⁽⁰⁾ = {}", pushed0.get(&u), cod.unit_measure.get(&u)),
        );
    }
    Ok(report)
}

/// `r_*(μ) ∼ μ⁽⁰⁾`.
pub fn range_class_check(h: &HaarGroupoid) -> bool {
    push_forward(&range_map(&h.groupoid), &h.induced)
        .and_then(|pushed| same_measure_class(&pushed, &h.unit_measure))
        .unwrap_or(false)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::groupoid::tests::{cyclic, pair_groupoid, trivial};

    pub fn weights(g: &FiniteGroupoid, values: &[u64]) -> BTreeMap<usize, Weight> {
        g.units().iter().zip(values).map(|(&u, &v)| (u, Weight::from_integer(v))).collect()
    }

    pub fn pair_haar(mu0: &[u64]) -> HaarGroupoid {
        let g = pair_groupoid(&["1", "2"]);
        let w = weights(&g, &[1, 1]);
        let m = weights(&g, mu0);
        HaarGroupoid::new_unchecked(g.clone(), haar_from_unit_weights(&g, &w), FiniteMeasure::from_weights(m))
    }

    fn at(h: &HaarGroupoid, id: &str) -> usize {
        h.groupoid().index_of_str(id).unwrap()
    }

    #[test]
    fn induced_measure_examples() {
        let t = HaarGroupoid::counting(trivial()).unwrap();
        assert_eq!(t.induced().get(&0), Weight::one());

        let h = pair_haar(&[1, 2]);
        assert!(h.validate().is_empty());
        let mu = induced_measure(&h);
        assert_eq!(mu, *h.induced());
        for (id, v) in [("(1,1)", 1), ("(1,2)", 1), ("(2,1)", 2), ("(2,2)", 2)] {
            assert_eq!(mu.get(&at(&h, id)), Weight::from_integer(v));
        }
        // pointwise formula agrees with the sum over units
        let g = h.groupoid();
        for x in 0..g.len() {
            let expect = &h.haar().weight(&g.range(x), &x) * &h.unit_measure().get(&g.range(x));
            assert_eq!(mu.get(&x), expect);
        }

        let z2 = cyclic(2);
        let h = HaarGroupoid::from_weights(z2.clone(), &weights(&z2, &[3]), weights(&z2, &[5])).unwrap();
        assert!(h.induced().iter().all(|(_, w)| *w == Weight::from_integer(15)));
    }

    #[test]
    fn inverse_measure_examples() {
        let h = pair_haar(&[1, 2]);
        let inv = inverse_measure(h.induced(), h.groupoid());
        assert_eq!(inv.get(&at(&h, "(1,2)")), Weight::from_integer(2));
        let z2 = HaarGroupoid::counting(cyclic(2)).unwrap();
        assert_eq!(inverse_measure(z2.induced(), z2.groupoid()), *z2.induced());
    }

    #[test]
    fn is_haar_examples() {
        let pg = pair_groupoid(&["1", "2"]);
        assert!(is_haar(&pg, &counting_haar(&pg)).is_empty());

        let z2 = cyclic(2);
        let bad = MeasureSystem::on_fibers(range_map(&z2), |_, &y| Weight::from_integer(if y == 0 { 1 } else { 2 }));
        let report = is_haar(&z2, &bad);
        let v = report.find("haar.left_invariance").unwrap();
        assert_eq!(v.witnesses, vec!["g1".to_string(), "e".to_string()]);

        let units_only = FiniteGroupoid::from_structure(
            vec![crate::groupoid::tests::eid("a"), crate::groupoid::tests::eid("b")],
            vec![0, 1],
            vec![0, 1],
            vec![0, 1],
            vec![0, 1],
            |x, _| x,
        )
        .unwrap();
        let s = MeasureSystem::on_fibers(range_map(&units_only), |_, &y| Weight::from_integer(y as u64 + 3));
        assert!(is_haar(&units_only, &s).is_empty());
    }

    #[test]
    fn quasi_invariance_examples() {
        assert!(is_quasi_invariant(&pair_haar(&[1, 2])));
        let h = pair_haar(&[1, 0]);
        assert_eq!(quasi_invariance_witness(&h), Some(at(&h, "(1,2)")));
        let err = HaarGroupoid::try_new(h.groupoid().clone(), h.haar().clone(), h.unit_measure().clone()).unwrap_err();
        assert!(matches!(err, Error::NotQuasiInvariant { ref witness } if witness == "(1,2)"));
        let zero = pair_haar(&[0, 0]);
        assert!(zero.validate().has_axiom("unit_measure.nonzero"));
    }

    #[test]
    fn modular_function_examples() {
        let z2 = HaarGroupoid::counting(cyclic(2)).unwrap();
        assert!(modular_function(&z2).unwrap().is_identically_one());
        let h = pair_haar(&[1, 2]);
        let d = modular_function(&h).unwrap();
        assert_eq!(d.get(at(&h, "(1,2)")), Some(&Weight::ratio(1, 2)));
        assert_eq!(d.get(at(&h, "(2,1)")), Some(&Weight::from_integer(2)));
        assert!(matches!(modular_function(&pair_haar(&[1, 0])), Err(Error::NotQuasiInvariant { .. })));
    }

    #[test]
    fn haar_hom_examples() {
        let h = pair_haar(&[1, 2]);
        assert!(validate_haar_hom(&GroupoidHom::identity(h.groupoid()), &h, &h).unwrap().is_empty());
        let t = HaarGroupoid::counting(trivial()).unwrap();
        let collapse = GroupoidHom::constant(h.groupoid(), 0);
        assert!(validate_haar_hom(&collapse, &h, &t).unwrap().is_empty());

        // trivial group into the units-only {a, b} with μ⁽⁰⁾(b) = 0 at the image
        let ab = FiniteGroupoid::from_structure(
            vec![crate::groupoid::tests::eid("a"), crate::groupoid::tests::eid("b")],
            vec![0, 1],
            vec![0, 1],
            vec![0, 1],
            vec![0, 1],
            |x, _| x,
        )
        .unwrap();
        let hab = HaarGroupoid::from_weights(ab.clone(), &weights(&ab, &[1, 1]), weights(&ab, &[1, 0])).unwrap();
        let report = validate_haar_hom(&GroupoidHom::new(vec![1]), &t, &hab).unwrap();
        let v = report.find("haar_hom.measure_class").unwrap();
        assert_eq!(v.witnesses, vec!["a".to_string()]);
    }

    #[test]
    fn range_class_examples() {
        assert!(range_class_check(&pair_haar(&[1, 2])));
        assert!(range_class_check(&HaarGroupoid::counting(trivial()).unwrap()));
        let z2 = cyclic(2);
        let zero = HaarGroupoid::new_unchecked(z2.clone(), counting_haar(&z2), FiniteMeasure::zero_on([0]));
        assert!(zero.validate().has_axiom("unit_measure.nonzero"));
    }
}
