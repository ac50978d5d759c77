//! Seeded random Haar groupoids and cospans.
//!
//! Instances are disjoint unions of components of two kinds: `n × H × n`
//! (pair groupoid on `n` points times a small finite group `H`; `n = 1`
//! gives a group, `H` trivial a pair groupoid) and transformation groupoids
//! of cyclic rotation actions. Homomorphisms between `n × H × n` components
//! have the form `(i,h,j) ↦ (φ(i), k_i ψ(h) k_j⁻¹, φ(j))`; anything may map
//! constantly onto a unit.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{cyclic_group, disjoint_union_all, transformation_groupoid, GroupAction};
use crate::error::{Error, Result};
use crate::groupoid::{ElementId, FiniteGroupoid, GroupoidHom};
use crate::haar::HaarGroupoid;
use crate::pullback::Cospan;
use crate::weight::Weight;

const MAX_ATTEMPTS: usize = 500;

/// Upper bounds on the size of each generated groupoid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_elements: usize,
    pub max_units: usize,
}

impl Bounds {
    pub fn new(max_elements: usize, max_units: usize) -> Result<Self> {
        if max_elements == 0 || max_units == 0 {
            return Err(Error::MalformedInput("bounds must be at least 1".into()));
        }
        Ok(Bounds { max_elements, max_units })
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_elements: 24,
            max_units: 4,
        }
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.max_elements, self.max_units)
    }
}

/// `"elements,units"`.
impl FromStr for Bounds {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::MalformedInput(format!("bounds `{s}` are not of the form `elements,units`"));
        let (e, u) = s.split_once(',').ok_or_else(bad)?;
        let e = e.trim().parse().map_err(|_| bad())?;
        let u = u.trim().parse().map_err(|_| bad())?;
        Bounds::new(e, u)
    }
}

/// How the measures of a random cospan are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Strictly positive unit measures everywhere.
    Default,
    /// One component of `G` carries zero unit measure, together with every
    /// component of `S` and `T` lying over it.
    NullUnits,
    /// `G` has units only.
    CotrivialBase,
}

/// A small finite group as a table; element 0 is the identity.
#[derive(Clone, Debug)]
struct Group {
    names: Vec<String>,
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    gens: Vec<usize>,
}

impl Group {
    fn from_table(names: Vec<String>, mul: Vec<Vec<usize>>, gens: Vec<usize>) -> Self {
        let n = names.len();
        let inv = (0..n).map(|a| (0..n).find(|&b| mul[a][b] == 0).expect("group table")).collect();
        Group { names, mul, inv, gens }
    }

    fn cyclic(n: usize) -> Self {
        let names = (0..n).map(|k| if k == 0 { "e".to_string() } else { format!("g{k}") }).collect();
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Group::from_table(names, mul, if n > 1 { vec![1] } else { vec![] })
    }

    fn klein() -> Self {
        let names = ["e", "a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let mul = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
        Group::from_table(names, mul, vec![1, 2])
    }

    fn symmetric3() -> Self {
        let mut perms: Vec<[usize; 3]> = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    if a != b && b != c && a != c {
                        perms.push([a, b, c]);
                    }
                }
            }
        }
        let pos = |p: [usize; 3]| perms.iter().position(|&q| q == p).expect("permutation");
        let mul = perms
            .iter()
            .map(|a| perms.iter().map(|b| pos([a[b[0]], a[b[1]], a[b[2]]])).collect())
            .collect();
        let names = perms.iter().map(|p| format!("p{}{}{}", p[0], p[1], p[2])).collect();
        Group::from_table(names, mul, vec![pos([1, 0, 2]), pos([1, 2, 0])])
    }

    fn len(&self) -> usize {
        self.names.len()
    }
}

fn catalogue() -> Vec<Group> {
    vec![
        Group::cyclic(1),
        Group::cyclic(2),
        Group::cyclic(3),
        Group::cyclic(4),
        Group::klein(),
        Group::symmetric3(),
    ]
}

/// Every homomorphism `h → k`, found by extending generator images.
fn group_homs(h: &Group, k: &Group) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let ng = h.gens.len();
    let total = k.len().pow(ng as u32);
    'assign: for code in 0..total {
        let mut img = Vec::with_capacity(ng);
        let mut c = code;
        for _ in 0..ng {
            img.push(c % k.len());
            c /= k.len();
        }
        let mut f = vec![usize::MAX; h.len()];
        f[0] = 0;
        let mut queue = vec![0];
        while let Some(x) = queue.pop() {
            for (gi, &g) in h.gens.iter().enumerate() {
                let y = h.mul[x][g];
                let fy = k.mul[f[x]][img[gi]];
                if f[y] == usize::MAX {
                    f[y] = fy;
                    queue.push(y);
                } else if f[y] != fy {
                    continue 'assign;
                }
            }
        }
        for a in 0..h.len() {
            for b in 0..h.len() {
                if f[h.mul[a][b]] != k.mul[f[a]][f[b]] {
                    continue 'assign;
                }
            }
        }
        if !out.contains(&f) {
            out.push(f);
        }
    }
    out
}

#[derive(Clone, Debug)]
enum Kind {
    /// `n × H × n` with `H` from the catalogue.
    Std { n: usize, group: usize },
    /// `Z_m` acting on `Z_n` by `y · g^k = y + k·step`.
    Trans { n: usize, m: usize, step: usize },
}

impl Kind {
    fn size(&self, cat: &[Group]) -> (usize, usize) {
        match *self {
            Kind::Std { n, group } => (n * n * cat[group].len(), n),
            Kind::Trans { n, m, .. } => (n * m, n),
        }
    }
}

/// A component with its element ids in local order and its local units.
struct Component {
    kind: Kind,
    groupoid: FiniteGroupoid,
    ids: Vec<String>,
    units: Vec<usize>,
}

fn std_index(n: usize, hlen: usize, i: usize, h: usize, j: usize) -> usize {
    (i * hlen + h) * n + j
}

fn build_component(kind: Kind, cat: &[Group]) -> Result<Component> {
    match kind {
        Kind::Std { n, group } => {
            let grp = &cat[group];
            let hl = grp.len();
            let at = |i, h, j| std_index(n, hl, i, h, j);
            let total = n * n * hl;
            let decode = |x: usize| (x / (hl * n), (x / n) % hl, x % n);
            let mut ids = Vec::with_capacity(total);
            for x in 0..total {
                let (i, h, j) = decode(x);
                ids.push(format!("({i},{},{j})", grp.names[h]));
            }
            let units: Vec<usize> = (0..n).map(|i| at(i, 0, i)).collect();
            let element_ids = ids.iter().map(ElementId::new).collect::<Result<Vec<_>>>()?;
            let groupoid = FiniteGroupoid::from_structure(
                element_ids,
                units.clone(),
                (0..total).map(|x| at(decode(x).0, 0, decode(x).0)).collect(),
                (0..total).map(|x| at(decode(x).2, 0, decode(x).2)).collect(),
                (0..total)
                    .map(|x| {
                        let (i, h, j) = decode(x);
                        at(j, grp.inv[h], i)
                    })
                    .collect(),
                |x, y| {
                    let (i, h, _) = decode(x);
                    let (_, h2, k) = decode(y);
                    at(i, grp.mul[h][h2], k)
                },
            )?;
            Ok(Component {
                kind,
                groupoid,
                ids,
                units,
            })
        }
        Kind::Trans { n, m, step } => {
            let group = cyclic_group(m)?;
            let space = (0..n).map(|y| ElementId::new(format!("y{y}"))).collect::<Result<Vec<_>>>()?;
            let mut act = vec![vec![0; m]; n];
            for (y, row) in act.iter_mut().enumerate() {
                for k in 0..m {
                    let name = if k == 0 { "e".to_string() } else { format!("g{k}") };
                    row[group.index_of_str(&name).expect("cyclic element")] = (y + k * step) % n;
                }
            }
            let groupoid = transformation_groupoid(&GroupAction::new(group, space, act)?)?;
            let ids = groupoid.ids().iter().map(|i| i.to_string()).collect();
            let units = groupoid.units().to_vec();
            Ok(Component {
                kind,
                groupoid,
                ids,
                units,
            })
        }
    }
}

/// A disjoint union of components, with the local-to-global index table.
struct Assembled {
    groupoid: FiniteGroupoid,
    components: Vec<Component>,
    global: Vec<Vec<usize>>,
}

fn assemble(components: Vec<Component>) -> Result<Assembled> {
    let parts: Vec<&FiniteGroupoid> = components.iter().map(|c| &c.groupoid).collect();
    let groupoid = disjoint_union_all(&parts)?;
    let global = components
        .iter()
        .enumerate()
        .map(|(k, c)| {
            c.ids
                .iter()
                .map(|id| groupoid.index_of_str(&format!("{k}:{id}")).expect("summand element"))
                .collect()
        })
        .collect();
    Ok(Assembled {
        groupoid,
        components,
        global,
    })
}

/// How one source component maps into one target component.
#[derive(Clone, Debug)]
enum ComponentMap {
    Constant { unit: usize },
    Std { phi: Vec<usize>, psi: Vec<usize>, k: Vec<usize> },
}

fn apply_map(map: &ComponentMap, src: &Kind, dst: &Kind, cat: &[Group], x: usize) -> usize {
    match map {
        ComponentMap::Constant { unit } => *unit,
        ComponentMap::Std { phi, psi, k } => {
            let (Kind::Std { n, group }, Kind::Std { n: m, group: g2 }) = (src, dst) else {
                unreachable!("structured maps join n × H × n components")
            };
            let hl = cat[*group].len();
            let (i, h, j) = (x / (hl * n), (x / n) % hl, x % n);
            let kg = &cat[*g2];
            let img = kg.mul[kg.mul[k[i]][psi[h]]][kg.inv[k[j]]];
            std_index(*m, kg.len(), phi[i], img, phi[j])
        }
    }
}

fn random_weight(rng: &mut ChaCha8Rng) -> Weight {
    Weight::ratio(rng.gen_range(1..=4), rng.gen_range(1..=3))
}

fn random_kind(rng: &mut ChaCha8Rng, cat: &[Group], max_elements: usize, max_units: usize) -> Option<Kind> {
    let mut options = Vec::new();
    for n in 1..=max_units.min(3) {
        for (g, grp) in cat.iter().enumerate() {
            if n * n * grp.len() <= max_elements {
                options.push(Kind::Std { n, group: g });
            }
        }
        for m in 2..=4 {
            if n * m <= max_elements {
                let steps: Vec<usize> = (0..n).filter(|&c| (m * c) % n == 0).collect();
                let step = *steps.choose(rng).expect("step 0 always works");
                options.push(Kind::Trans { n, m, step });
            }
        }
    }
    options.choose(rng).cloned()
}

fn positive_haar(assembled: Assembled, rng: &mut ChaCha8Rng, null: &[bool]) -> Result<HaarGroupoid> {
    let mut w = BTreeMap::new();
    let mut mu0 = BTreeMap::new();
    for (k, c) in assembled.components.iter().enumerate() {
        for &u in &c.units {
            let gu = assembled.global[k][u];
            w.insert(gu, random_weight(rng));
            mu0.insert(gu, if null[k] { Weight::zero() } else { random_weight(rng) });
        }
    }
    HaarGroupoid::from_weights(assembled.groupoid, &w, mu0)
}

/// A random Haar groupoid with strictly positive unit measure, within
/// `bounds`. Deterministic in `seed`.
pub fn random_haar_groupoid(seed: u64, bounds: Bounds) -> Result<HaarGroupoid> {
    let cat = catalogue();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let (mut elements, mut units) = (0, 0);
        let mut components = Vec::new();
        let wanted = rng.gen_range(1..=3);
        while components.len() < wanted {
            let Some(kind) = random_kind(&mut rng, &cat, bounds.max_elements - elements, bounds.max_units - units)
            else {
                break;
            };
            let (e, u) = kind.size(&cat);
            elements += e;
            units += u;
            components.push(build_component(kind, &cat)?);
            if elements >= bounds.max_elements || units >= bounds.max_units {
                break;
            }
        }
        if components.is_empty() {
            continue;
        }
        let null = vec![false; components.len()];
        if let Ok(h) = positive_haar(assemble(components)?, &mut rng, &null) {
            return Ok(h);
        }
    }
    Err(Error::GenerationExhausted(MAX_ATTEMPTS))
}

/// A random valid cospan with strictly positive measures.
pub fn random_cospan(seed: u64, bounds: Bounds) -> Result<Cospan> {
    random_cospan_with(seed, bounds, Strategy::Default)
}

struct Side {
    kinds: Vec<Kind>,
    targets: Vec<usize>,
    maps: Vec<ComponentMap>,
}

fn random_surjection(rng: &mut ChaCha8Rng, from: usize, onto: usize) -> Vec<usize> {
    let mut phi: Vec<usize> = (0..from).map(|i| if i < onto { i } else { rng.gen_range(0..onto) }).collect();
    phi.shuffle(rng);
    phi
}

/// A component over target `dst`: surjective onto it when `cover`.
fn component_over(
    rng: &mut ChaCha8Rng,
    cat: &[Group],
    homs: &[Vec<Vec<Vec<usize>>>],
    dst: &Kind,
    dst_units: usize,
    cover: bool,
) -> Option<(Kind, ComponentMap)> {
    let trivial_target = matches!(dst, Kind::Std { n: 1, group: 0 });
    if trivial_target || (!cover && rng.gen_bool(0.3)) {
        let kind = random_kind(rng, cat, 12, 2)?;
        let unit = rng.gen_range(0..dst_units);
        let unit = match dst {
            Kind::Std { n, group } => std_index(*n, cat[*group].len(), unit, 0, unit),
            Kind::Trans { .. } => unreachable!("targets are n × H × n components"),
        };
        return Some((kind, ComponentMap::Constant { unit }));
    }
    let Kind::Std { n: m, group: g2 } = *dst else {
        unreachable!("targets are n × H × n components")
    };
    let n = if cover { rng.gen_range(m..=m + 1).min(3) } else { rng.gen_range(1..=2) };
    let sources: Vec<(usize, Vec<Vec<usize>>)> = (0..cat.len())
        .map(|g| {
            let hs: Vec<Vec<usize>> = homs[g][g2]
                .iter()
                .filter(|f| !cover || (0..cat[g2].len()).all(|y| f.contains(&y)))
                .cloned()
                .collect();
            (g, hs)
        })
        .filter(|(g, hs)| !hs.is_empty() && n * n * cat[*g].len() <= 24)
        .collect();
    let (group, hs) = sources.choose(rng)?;
    let psi = hs.choose(rng)?.clone();
    let phi = if cover {
        random_surjection(rng, n, m)
    } else {
        (0..n).map(|_| rng.gen_range(0..m)).collect()
    };
    let k = (0..n).map(|_| rng.gen_range(0..cat[g2].len())).collect();
    Some((Kind::Std { n, group: *group }, ComponentMap::Std { phi, psi, k }))
}

fn random_side(
    rng: &mut ChaCha8Rng,
    cat: &[Group],
    homs: &[Vec<Vec<Vec<usize>>>],
    g_kinds: &[Kind],
    null: Option<usize>,
) -> Option<Side> {
    let mut side = Side {
        kinds: Vec::new(),
        targets: Vec::new(),
        maps: Vec::new(),
    };
    for (c, dst) in g_kinds.iter().enumerate() {
        let n = dst.size(cat).1;
        // null components need no cover, but get something over them
        let cover = Some(c) != null;
        let (kind, map) = component_over(rng, cat, homs, dst, n, cover)?;
        side.kinds.push(kind);
        side.targets.push(c);
        side.maps.push(map);
    }
    for _ in 0..rng.gen_range(0..=1) {
        let c = rng.gen_range(0..g_kinds.len());
        let dst = &g_kinds[c];
        let (kind, map) = component_over(rng, cat, homs, dst, dst.size(cat).1, false)?;
        side.kinds.push(kind);
        side.targets.push(c);
        side.maps.push(map);
    }
    Some(side)
}

fn side_hom(side: &Side, src: &Assembled, g: &Assembled, cat: &[Group]) -> GroupoidHom {
    let mut map = vec![0; src.groupoid.len()];
    for (k, comp) in src.components.iter().enumerate() {
        let c = side.targets[k];
        for x in 0..comp.ids.len() {
            let y = apply_map(&side.maps[k], &comp.kind, &g.components[c].kind, cat, x);
            map[src.global[k][x]] = g.global[c][y];
        }
    }
    GroupoidHom::new(map)
}

fn fits(kinds: &[Kind], cat: &[Group], bounds: Bounds) -> bool {
    let (e, u) = kinds
        .iter()
        .map(|k| k.size(cat))
        .fold((0, 0), |(e, u), (a, b)| (e + a, u + b));
    e <= bounds.max_elements && u <= bounds.max_units
}

/// A random valid cospan whose measures follow `strategy`.
pub fn random_cospan_with(seed: u64, bounds: Bounds, strategy: Strategy) -> Result<Cospan> {
    let cat = catalogue();
    let homs: Vec<Vec<Vec<Vec<usize>>>> = cat.iter().map(|h| cat.iter().map(|k| group_homs(h, k)).collect()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let g_kinds: Vec<Kind> = match strategy {
            Strategy::CotrivialBase => {
                let m = rng.gen_range(1..=bounds.max_units.min(3));
                vec![Kind::Std { n: 1, group: 0 }; m]
            }
            _ => {
                let count = match strategy {
                    Strategy::NullUnits => 2,
                    _ => rng.gen_range(1..=2),
                };
                (0..count)
                    .map(|_| {
                        let n = rng.gen_range(1..=2);
                        let group = rng.gen_range(0..cat.len());
                        Kind::Std { n, group }
                    })
                    .collect()
            }
        };
        let null = match strategy {
            Strategy::NullUnits => Some(rng.gen_range(0..g_kinds.len())),
            _ => None,
        };
        if !fits(&g_kinds, &cat, bounds) {
            continue;
        }
        let (Some(s_side), Some(t_side)) = (
            random_side(&mut rng, &cat, &homs, &g_kinds, null),
            random_side(&mut rng, &cat, &homs, &g_kinds, null),
        ) else {
            continue;
        };
        if !fits(&s_side.kinds, &cat, bounds) || !fits(&t_side.kinds, &cat, bounds) {
            continue;
        }
        let build = |kinds: &[Kind]| -> Result<Assembled> {
            assemble(kinds.iter().cloned().map(|k| build_component(k, &cat)).collect::<Result<Vec<_>>>()?)
        };
        let g = build(&g_kinds)?;
        let s = build(&s_side.kinds)?;
        let t = build(&t_side.kinds)?;
        let p = side_hom(&s_side, &s, &g, &cat);
        let q = side_hom(&t_side, &t, &g, &cat);
        let g_null: Vec<bool> = (0..g_kinds.len()).map(|c| Some(c) == null).collect();
        let s_null: Vec<bool> = s_side.targets.iter().map(|&c| Some(c) == null).collect();
        let t_null: Vec<bool> = t_side.targets.iter().map(|&c| Some(c) == null).collect();
        let (Ok(gh), Ok(sh), Ok(th)) = (
            positive_haar(g, &mut rng, &g_null),
            positive_haar(s, &mut rng, &s_null),
            positive_haar(t, &mut rng, &t_null),
        ) else {
            continue;
        };
        if let Ok(c) = Cospan::new(sh, gh, th, p, q) {
            return Ok(c);
        }
    }
    Err(Error::GenerationExhausted(MAX_ATTEMPTS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::is_quasi_invariant;
    use crate::measure::validate_system;

    #[test]
    fn catalogue_homs_include_identity_and_trivial() {
        let cat = catalogue();
        for g in &cat {
            let hs = group_homs(g, g);
            assert!(hs.contains(&(0..g.len()).collect::<Vec<_>>()));
            assert!(hs.contains(&vec![0; g.len()]));
        }
        // S3 → Z2: sign and trivial
        assert_eq!(group_homs(&cat[5], &cat[1]).len(), 2);
        // Z4 → Z2
        assert_eq!(group_homs(&cat[3], &cat[1]).len(), 2);
        // Z3 → Z2 trivial only
        assert_eq!(group_homs(&cat[2], &cat[1]).len(), 1);
    }

    #[test]
    fn random_groupoids_are_valid_and_reproducible() {
        for seed in 0..30 {
            let h = random_haar_groupoid(seed, Bounds::default()).unwrap();
            assert!(h.validate().is_empty());
            assert!(is_quasi_invariant(&h));
            assert!(validate_system(h.haar(), true).is_empty());
            assert!(h.groupoid().len() <= 24 && h.groupoid().units().len() <= 4);
            assert_eq!(h, random_haar_groupoid(seed, Bounds::default()).unwrap());
        }
    }

    #[test]
    fn smallest_bounds_give_trivial_group() {
        let h = random_haar_groupoid(3, Bounds::new(1, 1).unwrap()).unwrap();
        assert_eq!(h.groupoid().len(), 1);
        assert!(h.unit_measure().total().is_positive());
    }

    #[test]
    fn two_unit_bound() {
        let h = random_haar_groupoid(0, Bounds::new(2, 2).unwrap()).unwrap();
        assert!(h.groupoid().units().len() <= 2);
        assert!(h.validate().is_empty());
    }

    #[test]
    fn strategies_produce_valid_cospans() {
        for seed in 0..10 {
            for strategy in [Strategy::Default, Strategy::NullUnits, Strategy::CotrivialBase] {
                let c = random_cospan_with(seed, Bounds::default(), strategy).unwrap();
                assert!(c.validate().unwrap().is_empty());
                match strategy {
                    Strategy::NullUnits => assert!(c.g().unit_measure().iter().any(|(_, w)| w.is_zero())),
                    Strategy::CotrivialBase => {
                        assert_eq!(c.g().groupoid().len(), c.g().groupoid().units().len())
                    }
                    Strategy::Default => assert!(c.s().unit_measure().iter().all(|(_, w)| w.is_positive())),
                }
            }
        }
    }

    #[test]
    fn bounds_parse() {
        assert_eq!("24,4".parse::<Bounds>().unwrap(), Bounds::default());
        assert!("0,1".parse::<Bounds>().is_err());
        assert!("24".parse::<Bounds>().is_err());
    }
}
