//! Example families: cotrivial, product, Čech and transformation groupoids,
//! the canonical maps of the two worked examples, and random instances.

mod examples;
pub mod random;

use std::collections::{BTreeMap, BTreeSet, HashMap};

pub use examples::*;

use crate::error::{Error, Result};
use crate::groupoid::{validate_hom, ElementId, FiniteGroupoid, GroupoidHom};
use crate::haar::{validate_haar_hom, HaarGroupoid};
use crate::pullback::PullbackGroupoid;

fn eid(s: String) -> Result<ElementId> {
    ElementId::new(s)
}

/// Units only, with `r = d = id`.
pub fn cotrivial_groupoid(space: &[ElementId]) -> Result<FiniteGroupoid> {
    if space.is_empty() {
        return Err(Error::EmptySpace);
    }
    let n = space.len();
    FiniteGroupoid::from_structure(
        space.to_vec(),
        (0..n).collect(),
        (0..n).collect(),
        (0..n).collect(),
        (0..n).collect(),
        |x, _| x,
    )
}

/// Pair groupoid `X × X` with ids `(a,b)` and `(a,b)(b,c) = (a,c)`.
pub fn pair_groupoid(space: &[ElementId]) -> Result<FiniteGroupoid> {
    if space.is_empty() {
        return Err(Error::EmptySpace);
    }
    let n = space.len();
    let ids = (0..n * n)
        .map(|k| eid(format!("({},{})", space[k / n], space[k % n])))
        .collect::<Result<Vec<_>>>()?;
    FiniteGroupoid::from_structure(
        ids,
        (0..n).map(|i| i * n + i).collect(),
        (0..n * n).map(|k| (k / n) * n + k / n).collect(),
        (0..n * n).map(|k| (k % n) * n + k % n).collect(),
        (0..n * n).map(|k| (k % n) * n + k / n).collect(),
        |x, y| (x / n) * n + y % n,
    )
}

/// Disjoint union; element ids are prefixed by the summand index, `0:x`.
pub fn disjoint_union_all(parts: &[&FiniteGroupoid]) -> Result<FiniteGroupoid> {
    let mut ids = Vec::new();
    let mut offsets = Vec::new();
    for (k, g) in parts.iter().enumerate() {
        offsets.push(ids.len());
        for id in g.ids() {
            ids.push(eid(format!("{k}:{id}"))?);
        }
    }
    let mut units = Vec::new();
    let mut range = Vec::new();
    let mut source = Vec::new();
    let mut inverse = Vec::new();
    let mut compose = Vec::new();
    for (k, g) in parts.iter().enumerate() {
        let o = offsets[k];
        units.extend(g.units().iter().map(|u| u + o));
        for x in 0..g.len() {
            range.push(g.range(x) + o);
            source.push(g.source(x) + o);
            inverse.push(g.inverse(x) + o);
            for &(y, z) in g.compose_row(x) {
                compose.push((x + o, y + o, z + o));
            }
        }
    }
    FiniteGroupoid::from_parts(crate::groupoid::GroupoidParts {
        ids,
        units,
        range,
        source,
        inverse,
        compose,
    })
}

pub fn disjoint_union(a: &FiniteGroupoid, b: &FiniteGroupoid) -> Result<FiniteGroupoid> {
    disjoint_union_all(&[a, b])
}

/// Direct product `A × B` with ids `(a,b)`. Returns the groupoid and the
/// index of `(a, b)` as `a * |B| + b` mapped to its canonical position.
pub fn product_groupoid(a: &FiniteGroupoid, b: &FiniteGroupoid) -> Result<(FiniteGroupoid, Vec<usize>)> {
    let nb = b.len();
    let pair = |x: usize, y: usize| x * nb + y;
    let mut ids = Vec::with_capacity(a.len() * nb);
    for x in 0..a.len() {
        for y in 0..nb {
            ids.push(eid(format!("({},{})", a.id(x), b.id(y)))?);
        }
    }
    let mut units = Vec::new();
    for &u in a.units() {
        for &v in b.units() {
            units.push(pair(u, v));
        }
    }
    let all: Vec<(usize, usize)> = (0..a.len()).flat_map(|x| (0..nb).map(move |y| (x, y))).collect();
    let range = all.iter().map(|&(x, y)| pair(a.range(x), b.range(y))).collect();
    let source = all.iter().map(|&(x, y)| pair(a.source(x), b.source(y))).collect();
    let inverse = all.iter().map(|&(x, y)| pair(a.inverse(x), b.inverse(y))).collect();
    let ids_copy = ids.clone();
    let g = FiniteGroupoid::from_structure(ids, units, range, source, inverse, |i, j| {
        let (x1, y1) = (i / nb, i % nb);
        let (x2, y2) = (j / nb, j % nb);
        pair(
            a.compose(x1, x2).expect("composable factors"),
            b.compose(y1, y2).expect("composable factors"),
        )
    })?;
    let position = ids_copy.iter().map(|id| g.index_of(id).expect("present")).collect();
    Ok((g, position))
}

/// An indexed cover of a finite set. Blocks may be empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCover {
    pub space: Vec<ElementId>,
    pub blocks: BTreeMap<ElementId, BTreeSet<ElementId>>,
}

impl FiniteCover {
    pub fn new(space: Vec<ElementId>, blocks: BTreeMap<ElementId, BTreeSet<ElementId>>) -> Result<Self> {
        let set: BTreeSet<&ElementId> = space.iter().collect();
        if set.len() != space.len() {
            return Err(Error::MalformedInput("cover space has duplicate points".into()));
        }
        let mut covered = BTreeSet::new();
        for (a, block) in &blocks {
            for y in block {
                if !set.contains(y) {
                    return Err(Error::MalformedInput(format!("block `{a}` contains unknown point `{y}`")));
                }
                covered.insert(y);
            }
        }
        if covered.len() != set.len() {
            return Err(Error::MalformedInput("blocks do not cover the space".into()));
        }
        Ok(FiniteCover { space, blocks })
    }
}

pub fn cech_id(a: &ElementId, y: &ElementId, b: &ElementId) -> String {
    format!("({a},{y},{b})")
}

/// `(α, y, β)` for every `y ∈ U_α ∩ U_β`, in a fixed order.
pub fn cech_triples(cover: &FiniteCover) -> Vec<(ElementId, ElementId, ElementId)> {
    let mut triples = Vec::new();
    for y in &cover.space {
        let idx: Vec<&ElementId> = cover.blocks.iter().filter(|(_, b)| b.contains(y)).map(|(a, _)| a).collect();
        for a in &idx {
            for b in &idx {
                triples.push(((*a).clone(), y.clone(), (*b).clone()));
            }
        }
    }
    triples
}

/// `{(α, y, β) : y ∈ U_α ∩ U_β}` with `(α,y,β)(β,y,δ) = (α,y,δ)`.
pub fn cech_groupoid(cover: &FiniteCover) -> Result<FiniteGroupoid> {
    let triples = cech_triples(cover);
    let index: HashMap<(ElementId, ElementId, ElementId), usize> =
        triples.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let at = |a: &ElementId, y: &ElementId, b: &ElementId| index[&(a.clone(), y.clone(), b.clone())];
    let ids = triples
        .iter()
        .map(|(a, y, b)| eid(cech_id(a, y, b)))
        .collect::<Result<Vec<_>>>()?;
    let units = triples.iter().enumerate().filter(|(_, (a, _, b))| a == b).map(|(i, _)| i).collect();
    let range = triples.iter().map(|(a, y, _)| at(a, y, a)).collect();
    let source = triples.iter().map(|(_, y, b)| at(b, y, b)).collect();
    let inverse = triples.iter().map(|(a, y, b)| at(b, y, a)).collect();
    FiniteGroupoid::from_structure(ids, units, range, source, inverse, |i, j| {
        let (a, y, _) = &triples[i];
        let (_, _, d) = &triples[j];
        at(a, y, d)
    })
}

/// `(α, y, β)` of each element of `cech_groupoid(cover)`, by index.
pub fn cech_components(cover: &FiniteCover, g_u: &FiniteGroupoid) -> Result<Vec<(ElementId, ElementId, ElementId)>> {
    let mut out = vec![None; g_u.len()];
    for (a, y, b) in cech_triples(cover) {
        let i = g_u
            .index_of_str(&cech_id(&a, &y, &b))
            .ok_or_else(|| Error::MalformedInput(format!("`{}` is not in the Čech groupoid", cech_id(&a, &y, &b))))?;
        out[i] = Some((a, y, b));
    }
    out.into_iter()
        .map(|t| t.ok_or_else(|| Error::MalformedInput("groupoid is not the Čech groupoid of the cover".into())))
        .collect()
}

/// `p̂(α, y, β) = (α, f(y), β)`; requires `f(U_α) ⊆ V_α`.
pub fn cech_hom(
    f: &BTreeMap<ElementId, ElementId>,
    cover_y: &FiniteCover,
    cover_x: &FiniteCover,
    g_u: &FiniteGroupoid,
    g_v: &FiniteGroupoid,
) -> Result<GroupoidHom> {
    for (a, block) in &cover_y.blocks {
        let target = cover_x.blocks.get(a).ok_or_else(|| Error::ImageMismatch(a.to_string()))?;
        for y in block {
            let fy = f.get(y).ok_or_else(|| Error::MalformedInput(format!("map has no image for `{y}`")))?;
            if !target.contains(fy) {
                return Err(Error::ImageMismatch(a.to_string()));
            }
        }
    }
    let map = cech_components(cover_y, g_u)?
        .iter()
        .map(|(a, y, b)| {
            g_v.index_of_str(&cech_id(a, &f[y], b))
                .ok_or_else(|| Error::ImageMismatch(a.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GroupoidHom::new(map))
}

/// `V_α = f(U_α)` for every block.
pub fn image_cover(f: &BTreeMap<ElementId, ElementId>, cover_y: &FiniteCover, space_x: &[ElementId]) -> Result<FiniteCover> {
    let blocks = cover_y
        .blocks
        .iter()
        .map(|(a, block)| {
            let img = block
                .iter()
                .map(|y| f.get(y).cloned().ok_or_else(|| Error::MalformedInput(format!("map has no image for `{y}`"))))
                .collect::<Result<BTreeSet<_>>>()?;
            Ok((a.clone(), img))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    FiniteCover::new(space_x.to_vec(), blocks)
}

/// The cyclic group of order `n` as a one-unit groupoid, elements `e`,
/// `g1`, ..., `g{n-1}` with `g_a g_b = g_{a+b mod n}`.
pub fn cyclic_group(n: usize) -> Result<FiniteGroupoid> {
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    let name = |k: usize| if k == 0 { eid("e".into()) } else { eid(format!("g{k}")) };
    FiniteGroupoid::from_structure(
        (0..n).map(name).collect::<Result<Vec<_>>>()?,
        vec![0],
        vec![0; n],
        vec![0; n],
        (0..n).map(|k| (n - k) % n).collect(),
        |a, b| (a + b) % n,
    )
}

/// A right action of a one-unit groupoid on a finite set:
/// `act[y][γ]` is the index of `y · γ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAction {
    pub group: FiniteGroupoid,
    pub space: Vec<ElementId>,
    pub act: Vec<Vec<usize>>,
}

impl GroupAction {
    pub fn new(group: FiniteGroupoid, space: Vec<ElementId>, act: Vec<Vec<usize>>) -> Result<Self> {
        if group.units().len() != 1 {
            return Err(Error::MalformedInput("acting groupoid must have exactly one unit".into()));
        }
        let e = group.units()[0];
        let n = space.len();
        if act.len() != n || act.iter().any(|row| row.len() != group.len() || row.iter().any(|&z| z >= n)) {
            return Err(Error::MalformedInput("action table has the wrong shape".into()));
        }
        for y in 0..n {
            if act[y][e] != y {
                return Err(Error::MalformedInput(format!("{} · e != {}", space[y], space[y])));
            }
            for a in 0..group.len() {
                for &(b, ab) in group.compose_row(a) {
                    if act[act[y][a]][b] != act[y][ab] {
                        return Err(Error::MalformedInput(format!(
                            "({} · {}) · {} != {} · ({}{})",
                            space[y],
                            group.id(a),
                            group.id(b),
                            space[y],
                            group.id(a),
                            group.id(b)
                        )));
                    }
                }
            }
        }
        Ok(GroupAction { group, space, act })
    }

    /// The trivial action.
    pub fn trivial(group: FiniteGroupoid, space: Vec<ElementId>) -> Result<Self> {
        let act = vec![vec![0; group.len()]; space.len()]
            .into_iter()
            .enumerate()
            .map(|(y, row)| row.into_iter().map(|_| y).collect())
            .collect();
        GroupAction::new(group, space, act)
    }
}

pub fn transformation_id(y: &ElementId, gamma: &ElementId) -> String {
    format!("({y},{gamma})")
}

/// `Y ⋊ Γ`: `(y,γ)(yγ,γ') = (y,γγ')`, `r(y,γ) = (y,e)`, `d(y,γ) = (yγ,e)`,
/// `(y,γ)⁻¹ = (yγ,γ⁻¹)`.
pub fn transformation_groupoid(a: &GroupAction) -> Result<FiniteGroupoid> {
    let g = &a.group;
    let e = g.units()[0];
    let ng = g.len();
    let at = |y: usize, h: usize| y * ng + h;
    let n = a.space.len() * ng;
    let ids = (0..n)
        .map(|k| eid(transformation_id(&a.space[k / ng], g.id(k % ng))))
        .collect::<Result<Vec<_>>>()?;
    let units = (0..a.space.len()).map(|y| at(y, e)).collect();
    let range = (0..n).map(|k| at(k / ng, e)).collect();
    let source = (0..n).map(|k| at(a.act[k / ng][k % ng], e)).collect();
    let inverse = (0..n).map(|k| at(a.act[k / ng][k % ng], g.inverse(k % ng))).collect();
    FiniteGroupoid::from_structure(ids, units, range, source, inverse, |i, j| {
        at(i / ng, g.compose(i % ng, j % ng).expect("one-unit groupoid"))
    })
}

/// `{(σ, τ) : p(σ) = q(τ)}` with componentwise structure, ids `(σ,τ)`.
/// Only a groupoid when every `p(σ)`, `q(τ)` is a unit, i.e. `G` cotrivial.
pub fn regular_pullback(
    s: &FiniteGroupoid,
    t: &FiniteGroupoid,
    p: &GroupoidHom,
    q: &GroupoidHom,
) -> Result<(FiniteGroupoid, HashMap<(usize, usize), usize>)> {
    let mut pairs = Vec::new();
    for si in 0..s.len() {
        for ti in 0..t.len() {
            if p.apply(si) == q.apply(ti) {
                pairs.push((si, ti));
            }
        }
    }
    let pos: HashMap<(usize, usize), usize> = pairs.iter().copied().enumerate().map(|(i, pr)| (pr, i)).collect();
    let look = |pr: (usize, usize)| -> usize { pos.get(&pr).copied().unwrap_or(usize::MAX) };
    let ids = pairs
        .iter()
        .map(|&(a, b)| eid(format!("({},{})", s.id(a), t.id(b))))
        .collect::<Result<Vec<_>>>()?;
    let units = pairs
        .iter()
        .enumerate()
        .filter(|(_, (a, b))| s.is_unit(*a) && t.is_unit(*b))
        .map(|(i, _)| i)
        .collect();
    let range: Vec<usize> = pairs.iter().map(|&(a, b)| look((s.range(a), t.range(b)))).collect();
    let source: Vec<usize> = pairs.iter().map(|&(a, b)| look((s.source(a), t.source(b)))).collect();
    let inverse: Vec<usize> = pairs.iter().map(|&(a, b)| look((s.inverse(a), t.inverse(b)))).collect();
    if range.iter().chain(&source).chain(&inverse).any(|&i| i == usize::MAX) {
        return Err(Error::MalformedInput("regular pullback is not closed under the structure maps".into()));
    }
    let g = FiniteGroupoid::from_structure(ids.clone(), units, range, source, inverse, |i, j| {
        let (a1, b1) = pairs[i];
        let (a2, b2) = pairs[j];
        match (s.compose(a1, a2), t.compose(b1, b2)) {
            (Some(a), Some(b)) => look((a, b)),
            _ => usize::MAX,
        }
    })?;
    let canon: HashMap<(usize, usize), usize> = pairs
        .iter()
        .zip(&ids)
        .map(|(pr, id)| (*pr, g.index_of(id).expect("present")))
        .collect();
    Ok((g, canon))
}

/// `(s, g, t) ↦ (s, t)` from the weak pullback into the regular pullback;
/// `g` must be the unit `p(r(s))`.
pub fn weak_to_regular(
    pg: &PullbackGroupoid,
    regular_index: &HashMap<(usize, usize), usize>,
) -> Result<GroupoidHom> {
    let mut map = Vec::with_capacity(pg.triples().len());
    for &(s, _, t) in pg.triples() {
        let target = regular_index
            .get(&(s, t))
            .ok_or_else(|| Error::PrecomputedConditionFailed("pair missing from the regular pullback".into()))?;
        map.push(*target);
    }
    Ok(GroupoidHom::new(map))
}

/// A valid homomorphism that is bijective on elements.
pub fn is_isomorphism(dom: &FiniteGroupoid, cod: &FiniteGroupoid, f: &GroupoidHom) -> bool {
    dom.len() == cod.len() && f.is_injective() && validate_hom(dom, cod, f).map(|r| r.is_empty()).unwrap_or(false)
}

/// Isomorphism of the underlying groupoids, and whether `f` and its inverse
/// are measure class preserving.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HaarIsoVerdict {
    pub isomorphism: bool,
    pub measure_class_forward: bool,
    pub measure_class_backward: bool,
}

pub fn haar_isomorphism(dom: &HaarGroupoid, cod: &HaarGroupoid, f: &GroupoidHom) -> Result<HaarIsoVerdict> {
    let iso = is_isomorphism(dom.groupoid(), cod.groupoid(), f);
    if !iso {
        return Ok(HaarIsoVerdict {
            isomorphism: false,
            measure_class_forward: false,
            measure_class_backward: false,
        });
    }
    let mut inv = vec![0; f.map.len()];
    for (x, &y) in f.map.iter().enumerate() {
        inv[y] = x;
    }
    let forward = validate_haar_hom(f, dom, cod)?.is_empty();
    let backward = validate_haar_hom(&GroupoidHom::new(inv), cod, dom)?.is_empty();
    Ok(HaarIsoVerdict {
        isomorphism: true,
        measure_class_forward: forward,
        measure_class_backward: backward,
    })
}
