//! Measures on finite sets and systems of measures along maps.
//!
//! Everything here is generic over the point type so that the same code
//! serves groupoid elements (indices), fibred products (pairs) and the
//! triples of a weak pullback.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::groupoid::ValidationReport;
use crate::weight::Weight;

/// A weight for each point of a finite base set. Points of the base may
/// carry weight zero; points outside the base are treated as zero too.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMeasure<P: Ord> {
    weights: BTreeMap<P, Weight>,
}

impl<P: Ord + Clone> FiniteMeasure<P> {
    pub fn from_weights(weights: BTreeMap<P, Weight>) -> Self {
        FiniteMeasure { weights }
    }

    pub fn from_fn(base: impl IntoIterator<Item = P>, weight: impl Fn(&P) -> Weight) -> Self {
        FiniteMeasure {
            weights: base.into_iter().map(|p| {
                let w = weight(&p);
                (p, w)
            }).collect(),
        }
    }

    pub fn zero_on(base: impl IntoIterator<Item = P>) -> Self {
        Self::from_fn(base, |_| Weight::zero())
    }

    pub fn counting(base: impl IntoIterator<Item = P>) -> Self {
        Self::from_fn(base, |_| Weight::one())
    }

    pub fn get(&self, p: &P) -> Weight {
        self.weights.get(p).cloned().unwrap_or_default()
    }

    pub fn weight_ref(&self, p: &P) -> Option<&Weight> {
        self.weights.get(p)
    }

    /// Overwrites the weight at a point, adding it to the base if needed.
    pub fn set(&mut self, p: P, w: Weight) {
        self.weights.insert(p, w);
    }

    pub fn base(&self) -> impl Iterator<Item = &P> {
        self.weights.keys()
    }

    pub fn base_len(&self) -> usize {
        self.weights.len()
    }

    pub fn contains(&self, p: &P) -> bool {
        self.weights.contains_key(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&P, &Weight)> {
        self.weights.iter()
    }

    pub fn support(&self) -> BTreeSet<P> {
        self.weights
            .iter()
            .filter(|(_, w)| w.is_positive())
            .map(|(p, _)| p.clone())
            .collect()
    }

    pub fn in_support(&self, p: &P) -> bool {
        self.weights.get(p).is_some_and(Weight::is_positive)
    }

    pub fn total(&self) -> Weight {
        self.weights.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.values().all(Weight::is_zero)
    }

    pub fn same_base<Q: Ord + Clone>(&self, other: &FiniteMeasure<Q>) -> bool
    where
        P: PartialEq<Q>,
    {
        self.weights.len() == other.weights.len()
            && self.weights.keys().zip(other.weights.keys()).all(|(a, b)| a == b)
    }

    /// `∫ f dμ`.
    pub fn integrate(&self, f: impl Fn(&P) -> Weight) -> Weight {
        let mut acc = Weight::zero();
        for (p, w) in &self.weights {
            if !w.is_zero() {
                acc += w * &f(p);
            }
        }
        acc
    }

    pub fn into_weights(self) -> BTreeMap<P, Weight> {
        self.weights
    }
}

/// A total map from a finite domain into a finite codomain, with its fibers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMap<X: Ord, Y: Ord> {
    map: BTreeMap<X, Y>,
    fibers: BTreeMap<Y, Vec<X>>,
}

impl<X: Ord + Clone, Y: Ord + Clone> FiniteMap<X, Y> {
    /// Fails if some value lies outside `codomain`.
    pub fn new(map: BTreeMap<X, Y>, codomain: impl IntoIterator<Item = Y>) -> Result<Self> {
        let mut fibers: BTreeMap<Y, Vec<X>> = codomain.into_iter().map(|y| (y, Vec::new())).collect();
        for (x, y) in &map {
            match fibers.get_mut(y) {
                Some(f) => f.push(x.clone()),
                None => {
                    return Err(Error::MalformedInput(
                        "map value lies outside the codomain".into(),
                    ))
                }
            }
        }
        Ok(FiniteMap { map, fibers })
    }

    pub fn from_fn(
        domain: impl IntoIterator<Item = X>,
        codomain: impl IntoIterator<Item = Y>,
        f: impl Fn(&X) -> Y,
    ) -> Result<Self> {
        let map = domain.into_iter().map(|x| {
            let y = f(&x);
            (x, y)
        }).collect();
        Self::new(map, codomain)
    }

    pub fn apply(&self, x: &X) -> Option<&Y> {
        self.map.get(x)
    }

    pub fn domain(&self) -> impl Iterator<Item = &X> {
        self.map.keys()
    }

    pub fn codomain(&self) -> impl Iterator<Item = &Y> {
        self.fibers.keys()
    }

    pub fn in_codomain(&self, y: &Y) -> bool {
        self.fibers.contains_key(y)
    }

    pub fn fiber(&self, y: &Y) -> &[X] {
        self.fibers.get(y).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&X, &Y)> {
        self.map.iter()
    }

    pub fn domain_len(&self) -> usize {
        self.map.len()
    }
}

/// A family `{λ^y}` of measures on the domain of `over`, indexed by its
/// codomain. Each `λ^y` is stored sparsely; absent points weigh zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureSystem<X: Ord, Y: Ord> {
    over: FiniteMap<X, Y>,
    family: BTreeMap<Y, BTreeMap<X, Weight>>,
}

impl<X: Ord + Clone, Y: Ord + Clone> MeasureSystem<X, Y> {
    /// Builds a system; family members for points outside the codomain are
    /// kept so that validation can report them.
    pub fn new(over: FiniteMap<X, Y>, family: BTreeMap<Y, BTreeMap<X, Weight>>) -> Self {
        MeasureSystem { over, family }
    }

    /// `λ^y(x) = weight(y, x)` on each fiber `f⁻¹(y)`.
    pub fn on_fibers(over: FiniteMap<X, Y>, weight: impl Fn(&Y, &X) -> Weight) -> Self {
        let family = over
            .fibers
            .iter()
            .map(|(y, xs)| (y.clone(), xs.iter().map(|x| (x.clone(), weight(y, x))).collect()))
            .collect();
        MeasureSystem { over, family }
    }

    /// Counting measure on every fiber.
    pub fn counting(over: FiniteMap<X, Y>) -> Self {
        Self::on_fibers(over, |_, _| Weight::one())
    }

    pub fn over(&self) -> &FiniteMap<X, Y> {
        &self.over
    }

    pub fn weight(&self, y: &Y, x: &X) -> Weight {
        self.family
            .get(y)
            .and_then(|m| m.get(x))
            .cloned()
            .unwrap_or_default()
    }

    pub fn weight_ref(&self, y: &Y, x: &X) -> Option<&Weight> {
        self.family.get(y).and_then(|m| m.get(x))
    }

    /// Nonzero and explicitly stored entries of `λ^y`.
    pub fn entries(&self, y: &Y) -> impl Iterator<Item = (&X, &Weight)> {
        self.family.get(y).into_iter().flat_map(|m| m.iter())
    }

    pub fn member(&self, y: &Y) -> FiniteMeasure<X> {
        FiniteMeasure::from_weights(self.family.get(y).cloned().unwrap_or_default())
    }

    pub fn family(&self) -> &BTreeMap<Y, BTreeMap<X, Weight>> {
        &self.family
    }

    /// Overwrites a single weight.
    pub fn set(&mut self, y: Y, x: X, w: Weight) {
        self.family.entry(y).or_default().insert(x, w);
    }

    /// `∫ f dλ^y`.
    pub fn integrate(&self, y: &Y, f: impl Fn(&X) -> Weight) -> Weight {
        let mut acc = Weight::zero();
        for (x, w) in self.entries(y) {
            if !w.is_zero() {
                acc += w * &f(x);
            }
        }
        acc
    }
}

impl<X: Ord + Clone> MeasureSystem<X, X> {
    /// `δ_x` at every point of `set`, over the identity map.
    pub fn dirac(set: impl IntoIterator<Item = X>) -> Self {
        let set: Vec<X> = set.into_iter().collect();
        let over = FiniteMap::from_fn(set.clone(), set, |x| x.clone()).expect("identity map");
        Self::on_fibers(over, |_, _| Weight::one())
    }
}

/// Concentration of every `λ^y` on `f⁻¹(y)` and, if asked, full support.
pub fn validate_system<X, Y>(s: &MeasureSystem<X, Y>, require_full: bool) -> ValidationReport
where
    X: Ord + Clone + Debug,
    Y: Ord + Clone + Debug,
{
    validate_system_labelled(s, require_full, |x| format!("{x:?}"), |y| format!("{y:?}"))
}

pub fn validate_system_labelled<X, Y>(
    s: &MeasureSystem<X, Y>,
    require_full: bool,
    label_x: impl Fn(&X) -> String,
    label_y: impl Fn(&Y) -> String,
) -> ValidationReport
where
    X: Ord + Clone,
    Y: Ord + Clone,
{
    let mut report = ValidationReport::new();
    for (y, m) in &s.family {
        if !s.over.in_codomain(y) {
            if m.values().any(Weight::is_positive) {
                report.push("system.index", vec![label_y(y)], "measure indexed by a point outside the codomain");
            }
            continue;
        }
        for (x, w) in m {
            if w.is_positive() && s.over.apply(x) != Some(y) {
                report.push(
                    "system.concentration",
                    vec![label_y(y), label_x(x)],
                    "positive weight off the fiber",
                );
            }
        }
    }
    if require_full {
        for (y, xs) in &s.over.fibers {
            for x in xs {
                if !s.weight_ref(y, x).is_some_and(Weight::is_positive) {
                    report.push(
                        "system.full",
                        vec![label_y(y), label_x(x)],
                        "fiber point has weight zero",
                    );
                }
            }
        }
    }
    report
}

/// `(f_*μ)(y) = Σ_{f(x)=y} μ(x)`; the base of μ must be the domain of `f`.
pub fn push_forward<X, Y>(f: &FiniteMap<X, Y>, mu: &FiniteMeasure<X>) -> Result<FiniteMeasure<Y>>
where
    X: Ord + Clone,
    Y: Ord + Clone,
{
    if !mu.base().eq(f.domain()) {
        return Err(Error::BaseMismatch);
    }
    let mut out = FiniteMeasure::zero_on(f.codomain().cloned());
    for (x, w) in mu.iter() {
        let y = f.apply(x).expect("base equals domain");
        let acc = out.weights.get_mut(y).expect("value in codomain");
        *acc += w;
    }
    Ok(out)
}

/// Equal supports on a common base.
pub fn same_measure_class<P: Ord + Clone>(mu: &FiniteMeasure<P>, nu: &FiniteMeasure<P>) -> Result<bool> {
    if !mu.base().eq(nu.base()) {
        return Err(Error::BaseMismatch);
    }
    Ok(mu
        .iter()
        .zip(nu.iter())
        .all(|((_, a), (_, b))| a.is_positive() == b.is_positive()))
}

/// First point where the supports of two measures on the same base differ.
pub fn class_witness<P: Ord + Clone>(mu: &FiniteMeasure<P>, nu: &FiniteMeasure<P>) -> Option<P> {
    let base: BTreeSet<&P> = mu.base().chain(nu.base()).collect();
    base.into_iter()
        .find(|p| mu.in_support(p) != nu.in_support(p))
        .cloned()
}

/// `μ(x) = Σ_y λ^y(x) ν(y)` on the domain of the system's map.
pub fn compose_with_measure<X, Y>(s: &MeasureSystem<X, Y>, nu: &FiniteMeasure<Y>) -> FiniteMeasure<X>
where
    X: Ord + Clone,
    Y: Ord + Clone,
{
    let mut out = FiniteMeasure::zero_on(s.over.domain().cloned());
    for (y, m) in &s.family {
        let ny = nu.get(y);
        if ny.is_zero() {
            continue;
        }
        for (x, w) in m {
            if let Some(acc) = out.weights.get_mut(x) {
                *acc += w * &ny;
            }
        }
    }
    out
}

/// The canonical disintegration of `μ` along `f` over `ν`: the fiber ratio
/// `μ(x)/ν(y)` where `ν(y) > 0` and counting measure on `ν`-null fibers.
pub fn disintegrate<X, Y>(f: &FiniteMap<X, Y>, mu: &FiniteMeasure<X>, nu: &FiniteMeasure<Y>) -> Result<MeasureSystem<X, Y>>
where
    X: Ord + Clone + Debug,
    Y: Ord + Clone + Debug,
{
    disintegrate_with(f, mu, nu, |_, _| Weight::one())
}

/// Like [`disintegrate`], with `null_choice(y, x)` used on `ν`-null fibers.
pub fn disintegrate_with<X, Y>(
    f: &FiniteMap<X, Y>,
    mu: &FiniteMeasure<X>,
    nu: &FiniteMeasure<Y>,
    null_choice: impl Fn(&Y, &X) -> Weight,
) -> Result<MeasureSystem<X, Y>>
where
    X: Ord + Clone + Debug,
    Y: Ord + Clone + Debug,
{
    let pushed = push_forward(f, mu)?;
    if !same_measure_class(&pushed, nu)? {
        let y = class_witness(&pushed, nu).expect("classes differ somewhere");
        return Err(Error::NotMeasureClassPreserving { witness: format!("{y:?}") });
    }
    Ok(MeasureSystem::on_fibers(f.clone(), |y, x| {
        let ny = nu.get(y);
        if ny.is_zero() {
            null_choice(y, x)
        } else {
            mu.get(x).checked_div(&ny).expect("positive denominator")
        }
    }))
}

/// Concentration plus the reconstruction identity `Σ_y γ^y ν(y) = μ`.
pub fn is_disintegration<X, Y>(gamma: &MeasureSystem<X, Y>, mu: &FiniteMeasure<X>, nu: &FiniteMeasure<Y>) -> bool
where
    X: Ord + Clone + Debug,
    Y: Ord + Clone + Debug,
{
    validate_system(gamma, false).is_empty() && compose_with_measure(gamma, nu) == *mu
}

/// `(α * β)^{(x₀,y₀)} = α^{x₀} × β^{y₀}` restricted to the fibred product
/// `in_pair`, over `(x, y) ↦ (f(x), g(y))` into the base product `in_base`.
pub fn product_system<X, X0, Y, Y0>(
    alpha: &MeasureSystem<X, X0>,
    beta: &MeasureSystem<Y, Y0>,
    in_pair: impl Fn(&X, &Y) -> bool,
    in_base: impl Fn(&X0, &Y0) -> bool,
) -> Result<MeasureSystem<(X, Y), (X0, Y0)>>
where
    X: Ord + Clone + Debug,
    X0: Ord + Clone + Debug,
    Y: Ord + Clone + Debug,
    Y0: Ord + Clone + Debug,
{
    let mut map = BTreeMap::new();
    for (x, x0) in alpha.over.iter() {
        for (y, y0) in beta.over.iter() {
            if !in_pair(x, y) {
                continue;
            }
            if !in_base(x0, y0) {
                return Err(Error::IncompatibleFibredProduct(format!("({x:?}, {y:?})")));
            }
            map.insert((x.clone(), y.clone()), (x0.clone(), y0.clone()));
        }
    }
    let mut codomain = Vec::new();
    for x0 in alpha.over.codomain() {
        for y0 in beta.over.codomain() {
            if in_base(x0, y0) {
                codomain.push((x0.clone(), y0.clone()));
            }
        }
    }
    let over = FiniteMap::new(map, codomain)?;
    let mut family: BTreeMap<(X0, Y0), BTreeMap<(X, Y), Weight>> = BTreeMap::new();
    for (x0, y0) in over.codomain() {
        let mut m = BTreeMap::new();
        for (x, a) in alpha.entries(x0) {
            for (y, b) in beta.entries(y0) {
                if in_pair(x, y) {
                    m.insert((x.clone(), y.clone()), a * b);
                }
            }
        }
        family.insert((x0.clone(), y0.clone()), m);
    }
    Ok(MeasureSystem::new(over, family))
}

/// Lift of `γ` (over `f: X → Y`) along `h: W → Y`: the system over the
/// projection `W * X → W` given by `(w', x) ↦ [w' = w] γ^{h(w)}(x)`.
pub fn lift_system<W, X, Y>(gamma: &MeasureSystem<X, Y>, h: &FiniteMap<W, Y>) -> MeasureSystem<(W, X), W>
where
    W: Ord + Clone,
    X: Ord + Clone,
    Y: Ord + Clone,
{
    let mut map = BTreeMap::new();
    for (w, y) in h.iter() {
        for x in gamma.over.fiber(y) {
            map.insert((w.clone(), x.clone()), w.clone());
        }
    }
    let over = FiniteMap::new(map, h.domain().cloned()).expect("projection lands in W");
    let mut family = BTreeMap::new();
    for (w, y) in h.iter() {
        let m: BTreeMap<(W, X), Weight> = gamma
            .entries(y)
            .filter(|(x, _)| gamma.over.apply(x) == Some(y))
            .map(|(x, wt)| ((w.clone(), x.clone()), wt.clone()))
            .collect();
        family.insert(w.clone(), m);
    }
    MeasureSystem::new(over, family)
}

/// `(β ∘ α)^z(x) = α^{p(x)}(x) β^z(p(x))` over `q ∘ p`.
pub fn compose_systems<X, Y, Z>(alpha: &MeasureSystem<X, Y>, beta: &MeasureSystem<Y, Z>) -> Result<MeasureSystem<X, Z>>
where
    X: Ord + Clone,
    Y: Ord + Clone,
    Z: Ord + Clone,
{
    if !alpha.over.codomain().eq(beta.over.domain()) {
        return Err(Error::BaseMismatch);
    }
    let map: BTreeMap<X, Z> = alpha
        .over
        .iter()
        .map(|(x, y)| (x.clone(), beta.over.apply(y).expect("y in domain of q").clone()))
        .collect();
    let over = FiniteMap::new(map, beta.over.codomain().cloned())?;
    let mut family: BTreeMap<Z, BTreeMap<X, Weight>> = BTreeMap::new();
    for z in beta.over.codomain() {
        let mut m = BTreeMap::new();
        for (y, b) in beta.entries(z) {
            if b.is_zero() {
                continue;
            }
            for x in alpha.over.fiber(y) {
                let a = alpha.weight(y, x);
                m.insert(x.clone(), &a * b);
            }
        }
        family.insert(z.clone(), m);
    }
    Ok(MeasureSystem::new(over, family))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(n: u64) -> Weight {
        Weight::from_integer(n)
    }

    fn abc_map() -> FiniteMap<char, u32> {
        FiniteMap::from_fn(['a', 'b', 'c'], [1, 2], |x| if *x == 'c' { 2 } else { 1 }).unwrap()
    }

    fn abc_measure() -> FiniteMeasure<char> {
        FiniteMeasure::from_weights([('a', w(2)), ('b', w(3)), ('c', w(5))].into_iter().collect())
    }

    #[test]
    fn dirac_and_counting_are_full() {
        let d = MeasureSystem::dirac([1u32, 2, 3]);
        assert!(validate_system(&d, true).is_empty());
        let c = MeasureSystem::counting(abc_map());
        assert!(validate_system(&c, true).is_empty());
    }

    #[test]
    fn off_fiber_weight_is_reported() {
        let mut c = MeasureSystem::counting(abc_map());
        c.set(2, 'a', w(1));
        let r = validate_system(&c, false);
        let v = r.find("system.concentration").unwrap();
        assert_eq!(v.witnesses, vec!["2".to_string(), "'a'".to_string()]);
    }

    #[test]
    fn push_forward_examples() {
        let mu = abc_measure();
        let id = FiniteMap::from_fn(['a', 'b', 'c'], ['a', 'b', 'c'], |x| *x).unwrap();
        assert_eq!(push_forward(&id, &mu).unwrap(), mu);
        let konst = FiniteMap::from_fn(['a', 'b'], [0u8], |_| 0).unwrap();
        let two_three = FiniteMeasure::from_weights([('a', w(2)), ('b', w(3))].into_iter().collect());
        assert_eq!(push_forward(&konst, &two_three).unwrap().get(&0), w(5));
        let pushed = push_forward(&abc_map(), &mu).unwrap();
        assert_eq!((pushed.get(&1), pushed.get(&2)), (w(5), w(5)));
    }

    #[test]
    fn measure_class_examples() {
        let m = |a, b| FiniteMeasure::from_weights([(0u8, w(a)), (1, w(b))].into_iter().collect());
        assert!(same_measure_class(&m(1, 0), &m(1, 0)).unwrap());
        assert!(same_measure_class(&m(1, 0), &m(2, 0)).unwrap());
        assert!(!same_measure_class(&m(1, 0), &m(0, 1)).unwrap());
        let other = FiniteMeasure::from_weights([(5u8, w(1))].into_iter().collect());
        assert!(matches!(same_measure_class(&m(1, 0), &other), Err(Error::BaseMismatch)));
    }

    #[test]
    fn compose_with_measure_examples() {
        let nu = FiniteMeasure::from_weights([(1u32, w(1)), (2, w(10))].into_iter().collect());
        let c = MeasureSystem::counting(abc_map());
        let mu = compose_with_measure(&c, &nu);
        assert_eq!(
            mu.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>(),
            vec![w(1), w(1), w(10)]
        );
        let d = MeasureSystem::dirac([1u32, 2]);
        assert_eq!(compose_with_measure(&d, &nu), nu);
        assert!(compose_with_measure(&c, &FiniteMeasure::zero_on([1u32, 2])).is_zero());
    }

    #[test]
    fn disintegrate_examples() {
        let f = abc_map();
        let mu = abc_measure();
        let nu = FiniteMeasure::from_weights([(1u32, w(1)), (2, w(10))].into_iter().collect());
        let g = disintegrate(&f, &mu, &nu).unwrap();
        assert_eq!(g.weight(&1, &'a'), w(2));
        assert_eq!(g.weight(&1, &'b'), w(3));
        assert_eq!(g.weight(&2, &'c'), Weight::ratio(1, 2));
        assert!(is_disintegration(&g, &mu, &nu));

        // identity map with nu = mu gives unit Diracs on the support
        let id = FiniteMap::from_fn(['a', 'b', 'c'], ['a', 'b', 'c'], |x| *x).unwrap();
        let gi = disintegrate(&id, &mu, &mu).unwrap();
        for x in ['a', 'b', 'c'] {
            assert_eq!(gi.weight(&x, &x), Weight::one());
        }

        // a forced null fiber gets counting measure
        let mu0 = FiniteMeasure::from_weights([('a', w(2)), ('b', w(3)), ('c', w(0))].into_iter().collect());
        let nu0 = FiniteMeasure::from_weights([(1u32, w(1)), (2, w(0))].into_iter().collect());
        let g0 = disintegrate(&f, &mu0, &nu0).unwrap();
        assert_eq!(g0.weight(&2, &'c'), Weight::one());
        assert_eq!(compose_with_measure(&g0, &nu0), mu0);
    }

    #[test]
    fn disintegrate_rejects_class_mismatch() {
        let nu = FiniteMeasure::from_weights([(1u32, w(1)), (2, w(0))].into_iter().collect());
        let err = disintegrate(&abc_map(), &abc_measure(), &nu).unwrap_err();
        assert!(matches!(err, Error::NotMeasureClassPreserving { ref witness } if witness == "2"));
    }

    #[test]
    fn product_system_examples() {
        let d1 = MeasureSystem::dirac([0u8, 1]);
        let d2 = MeasureSystem::dirac([5u8, 6]);
        let p = product_system(&d1, &d2, |_, _| true, |_, _| true).unwrap();
        assert!(validate_system(&p, true).is_empty());
        assert_eq!(p.weight(&(0, 5), &(0, 5)), Weight::one());
        assert_eq!(p.weight(&(0, 5), &(1, 5)), Weight::zero());

        let c = MeasureSystem::counting(abc_map());
        let cc = product_system(&c, &c, |_, _| true, |_, _| true).unwrap();
        assert!(validate_system(&cc, true).is_empty());
        assert_eq!(cc.entries(&(1, 1)).count(), 4);

        let err = product_system(&d1, &d2, |_, _| true, |a, _| *a == 0).unwrap_err();
        assert!(matches!(err, Error::IncompatibleFibredProduct(_)));
    }

    #[test]
    fn lift_examples() {
        let c = MeasureSystem::counting(abc_map());
        let id = FiniteMap::from_fn([1u32, 2], [1u32, 2], |y| *y).unwrap();
        let l = lift_system(&c, &id);
        assert!(validate_system(&l, true).is_empty());
        for (x, y) in abc_map().iter() {
            assert_eq!(l.weight(y, &(*y, *x)), c.weight(y, x));
        }
        let d = MeasureSystem::dirac([1u32, 2]);
        let h = FiniteMap::from_fn(['p', 'q'], [1u32, 2], |w| if *w == 'p' { 1 } else { 2 }).unwrap();
        let ld = lift_system(&d, &h);
        assert_eq!(ld.weight(&'p', &('p', 1)), Weight::one());
        assert_eq!(ld.entries(&'q').count(), 1);
    }

    #[test]
    fn compose_systems_matches_double_sum() {
        let alpha = MeasureSystem::on_fibers(abc_map(), |_, x| w(*x as u64 - 96));
        let q = FiniteMap::from_fn([1u32, 2], ['z'], |_| 'z').unwrap();
        let beta = MeasureSystem::on_fibers(q, |_, y| w(*y as u64 + 6));
        let ba = compose_systems(&alpha, &beta).unwrap();
        for x in ['a', 'b', 'c'] {
            let double: Weight = [1u32, 2]
                .iter()
                .map(|y| &alpha.weight(y, &x) * &beta.weight(&'z', y))
                .sum();
            assert_eq!(ba.weight(&'z', &x), double);
        }
        let dirac_z = MeasureSystem::dirac(['z']);
        let same = compose_systems(&ba, &dirac_z).unwrap();
        assert_eq!(same.family(), ba.family());
        let dirac_x = MeasureSystem::dirac(['a', 'b', 'c']);
        let again = compose_systems(&dirac_x, &alpha).unwrap();
        assert_eq!(again.family(), alpha.family());
    }
}
