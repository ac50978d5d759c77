//! The two worked examples and small fixture cospans.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{
    cech_components, cech_groupoid, cech_hom, cech_id, cotrivial_groupoid, cyclic_group, image_cover, is_isomorphism, pair_groupoid,
    product_groupoid, transformation_groupoid, transformation_id, FiniteCover, GroupAction,
};
use crate::error::{Error, Result};
use crate::groupoid::{ElementId, FiniteGroupoid, GroupoidHom};
use crate::haar::{counting_haar, HaarGroupoid};
use crate::measure::FiniteMeasure;
use crate::weight::Weight;
use crate::pullback::{weak_pullback_groupoid, Cospan, PullbackGroupoid};

/// Spaces `X`, `Y`, `Z`, maps `p: Y → X`, `q: Z → X` and covers of `Y`, `Z`
/// indexed by the same set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CechParams {
    pub x: Vec<ElementId>,
    pub y: Vec<ElementId>,
    pub z: Vec<ElementId>,
    pub p: BTreeMap<ElementId, ElementId>,
    pub q: BTreeMap<ElementId, ElementId>,
    pub cover_y: BTreeMap<ElementId, BTreeSet<ElementId>>,
    pub cover_z: BTreeMap<ElementId, BTreeSet<ElementId>>,
}

impl CechParams {
    /// `Y = {y1, y2}` split in two blocks, `Z = {z1}` covered twice, `X = {x}`.
    pub fn worked() -> Self {
        let id = |s: &str| ElementId::new(s).expect("literal id");
        let set = |xs: &[&str]| xs.iter().map(|s| id(s)).collect::<BTreeSet<_>>();
        CechParams {
            x: vec![id("x")],
            y: vec![id("y1"), id("y2")],
            z: vec![id("z1")],
            p: [(id("y1"), id("x")), (id("y2"), id("x"))].into_iter().collect(),
            q: [(id("z1"), id("x"))].into_iter().collect(),
            cover_y: [(id("1"), set(&["y1"])), (id("2"), set(&["y2"]))].into_iter().collect(),
            cover_z: [(id("1"), set(&["z1"])), (id("2"), set(&["z1"]))].into_iter().collect(),
        }
    }
}

/// The Čech cospan `G_U → G_V ← G_W`, its weak pullback, the Čech
/// groupoid of the product cover and the canonical map between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CechExample {
    pub g_u: FiniteGroupoid,
    pub g_v: FiniteGroupoid,
    pub g_w: FiniteGroupoid,
    pub p_hat: GroupoidHom,
    pub q_hat: GroupoidHom,
    pub pullback: PullbackGroupoid,
    pub product_cover: FiniteCover,
    pub target: FiniteGroupoid,
    pub iso: GroupoidHom,
    pub is_isomorphism: bool,
}

fn check_map(
    f: &BTreeMap<ElementId, ElementId>,
    dom: &[ElementId],
    cod: &[ElementId],
    what: &str,
) -> Result<()> {
    let cod: BTreeSet<&ElementId> = cod.iter().collect();
    for y in dom {
        let fy = f.get(y).ok_or_else(|| Error::MalformedInput(format!("{what} has no image for `{y}`")))?;
        if !cod.contains(fy) {
            return Err(Error::MalformedInput(format!("{what} sends `{y}` outside its codomain")));
        }
    }
    if f.len() != dom.len() {
        return Err(Error::MalformedInput(format!("{what} maps points outside its domain")));
    }
    Ok(())
}

fn pair_id(a: &ElementId, b: &ElementId) -> Result<ElementId> {
    ElementId::new(format!("({a},{b})"))
}

/// Builds the Čech example and the map
/// `((α,y,β),(α,x,ε),(ε,z,ζ)) ↦ ((α,ε),(y,z),(β,ζ))`.
pub fn canonical_iso_cech(params: &CechParams) -> Result<CechExample> {
    check_map(&params.p, &params.y, &params.x, "p")?;
    check_map(&params.q, &params.z, &params.x, "q")?;
    let cover_y = FiniteCover::new(params.y.clone(), params.cover_y.clone())?;
    let cover_z = FiniteCover::new(params.z.clone(), params.cover_z.clone())?;
    let idx_y: BTreeSet<&ElementId> = cover_y.blocks.keys().collect();
    let idx_z: BTreeSet<&ElementId> = cover_z.blocks.keys().collect();
    if idx_y != idx_z {
        let a = idx_y.symmetric_difference(&idx_z).next().expect("sets differ");
        return Err(Error::ImageMismatch(a.to_string()));
    }
    // p(U_α) = q(W_α) for every α
    for (a, ua) in &cover_y.blocks {
        let pu: BTreeSet<&ElementId> = ua.iter().map(|y| &params.p[y]).collect();
        let qw: BTreeSet<&ElementId> = cover_z.blocks[a].iter().map(|z| &params.q[z]).collect();
        if pu != qw {
            return Err(Error::ImageMismatch(a.to_string()));
        }
    }
    let cover_v = image_cover(&params.p, &cover_y, &params.x)?;

    let g_u = cech_groupoid(&cover_y)?;
    let g_w = cech_groupoid(&cover_z)?;
    let g_v = cech_groupoid(&cover_v)?;
    let p_hat = cech_hom(&params.p, &cover_y, &cover_v, &g_u, &g_v)?;
    let q_hat = cech_hom(&params.q, &cover_z, &cover_v, &g_w, &g_v)?;
    let pullback = weak_pullback_groupoid(&g_u, &g_v, &g_w, &p_hat, &q_hat)?;

    // the regular pullback Y * Z and its cover by (U_a × W_b) ∩ Y * Z
    let mut yz = Vec::new();
    let mut yz_points = Vec::new();
    for y in &params.y {
        for z in &params.z {
            if params.p[y] == params.q[z] {
                yz.push((y.clone(), z.clone()));
                yz_points.push(pair_id(y, z)?);
            }
        }
    }
    let mut blocks = BTreeMap::new();
    for (a, ua) in &cover_y.blocks {
        for (b, wb) in &cover_z.blocks {
            let block: BTreeSet<ElementId> = yz
                .iter()
                .filter(|(y, z)| ua.contains(y) && wb.contains(z))
                .map(|(y, z)| pair_id(y, z))
                .collect::<Result<_>>()?;
            blocks.insert(pair_id(a, b)?, block);
        }
    }
    let product_cover = FiniteCover::new(yz_points, blocks)?;
    let target = cech_groupoid(&product_cover)?;

    let cu = cech_components(&cover_y, &g_u)?;
    let cv = cech_components(&cover_v, &g_v)?;
    let cw = cech_components(&cover_z, &g_w)?;
    let mut map = Vec::with_capacity(pullback.triples().len());
    for &(s, g, t) in pullback.triples() {
        let (alpha, y, beta) = &cu[s];
        let (gamma, x, delta) = &cv[g];
        let (eps, z, zeta) = &cw[t];
        if gamma != alpha || delta != eps || params.p[y] != *x || params.q[z] != *x {
            return Err(Error::PrecomputedConditionFailed(format!(
                "{}|{}|{} does not have the form ((α,y,β),(α,x,ε),(ε,z,ζ))",
                g_u.id(s),
                g_v.id(g),
                g_w.id(t)
            )));
        }
        let id = cech_id(&pair_id(alpha, eps)?, &pair_id(y, z)?, &pair_id(beta, zeta)?);
        map.push(
            target
                .index_of_str(&id)
                .ok_or_else(|| Error::PrecomputedConditionFailed(format!("`{id}` is not in G_U*W")))?,
        );
    }
    let iso = GroupoidHom::new(map);
    let ok = is_isomorphism(pullback.groupoid(), &target, &iso);
    Ok(CechExample {
        g_u,
        g_v,
        g_w,
        p_hat,
        q_hat,
        pullback,
        product_cover,
        target,
        iso,
        is_isomorphism: ok,
    })
}

/// Spaces, equivariant maps and two cyclic group actions, each action given
/// by the permutation of its generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformationParams {
    pub x: Vec<ElementId>,
    pub y: Vec<ElementId>,
    pub z: Vec<ElementId>,
    pub p: BTreeMap<ElementId, ElementId>,
    pub q: BTreeMap<ElementId, ElementId>,
    pub gamma_order: usize,
    pub lambda_order: usize,
    pub gamma_generator: BTreeMap<ElementId, ElementId>,
    pub lambda_generator: BTreeMap<ElementId, ElementId>,
}

impl TransformationParams {
    /// `Γ = Z₂` swapping `Y = {y1, y2}`, `Λ` trivial on `Z = {z1}`, `X = {x}`.
    pub fn worked() -> Self {
        let id = |s: &str| ElementId::new(s).expect("literal id");
        TransformationParams {
            x: vec![id("x")],
            y: vec![id("y1"), id("y2")],
            z: vec![id("z1")],
            p: [(id("y1"), id("x")), (id("y2"), id("x"))].into_iter().collect(),
            q: [(id("z1"), id("x"))].into_iter().collect(),
            gamma_order: 2,
            lambda_order: 1,
            gamma_generator: [(id("y1"), id("y2")), (id("y2"), id("y1"))].into_iter().collect(),
            lambda_generator: [(id("z1"), id("z1"))].into_iter().collect(),
        }
    }
}

/// Action of the cyclic group of order `n` where `g1` acts by `generator`.
pub fn cyclic_action(
    n: usize,
    space: &[ElementId],
    generator: &BTreeMap<ElementId, ElementId>,
) -> Result<GroupAction> {
    check_map(generator, space, space, "generator")?;
    let group = cyclic_group(n)?;
    let pos: BTreeMap<&ElementId, usize> = space.iter().enumerate().map(|(i, y)| (y, i)).collect();
    let step: Vec<usize> = space.iter().map(|y| pos[&generator[y]]).collect();
    let mut act = vec![vec![0; n]; space.len()];
    for (y, row) in act.iter_mut().enumerate() {
        let mut cur = y;
        for k in 0..n {
            let name = if k == 0 { "e".to_string() } else { format!("g{k}") };
            row[group.index_of_str(&name).expect("cyclic element")] = cur;
            cur = step[cur];
        }
        if cur != y {
            return Err(Error::MalformedInput(format!(
                "generator of order {n} does not return `{}` to itself",
                space[y]
            )));
        }
    }
    GroupAction::new(group, space.to_vec(), act)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformationExample {
    pub s: FiniteGroupoid,
    pub g: FiniteGroupoid,
    pub t: FiniteGroupoid,
    pub p_hat: GroupoidHom,
    pub q_hat: GroupoidHom,
    pub pullback: PullbackGroupoid,
    pub target: FiniteGroupoid,
    pub iso: GroupoidHom,
    pub is_isomorphism: bool,
}

impl TransformationExample {
    /// The cospan with counting Haar systems and unit weights 1.
    pub fn cospan(&self) -> Result<Cospan> {
        Cospan::new(
            HaarGroupoid::counting(self.s.clone())?,
            HaarGroupoid::counting(self.g.clone())?,
            HaarGroupoid::counting(self.t.clone())?,
            self.p_hat.clone(),
            self.q_hat.clone(),
        )
    }
}

// (y, γ) of each element of Y ⋊ Γ, by index
fn transformation_components(a: &GroupAction, tg: &FiniteGroupoid) -> Vec<(usize, usize)> {
    let mut out = vec![(0, 0); tg.len()];
    for y in 0..a.space.len() {
        for h in 0..a.group.len() {
            let i = tg
                .index_of_str(&transformation_id(&a.space[y], a.group.id(h)))
                .expect("element of the transformation groupoid");
            out[i] = (y, h);
        }
    }
    out
}

fn equivariant_hom(
    a: &GroupAction,
    tg: &FiniteGroupoid,
    f: &BTreeMap<ElementId, ElementId>,
    x: &FiniteGroupoid,
) -> Result<GroupoidHom> {
    for (y, row) in a.act.iter().enumerate() {
        for (h, &yh) in row.iter().enumerate() {
            if f[&a.space[yh]] != f[&a.space[y]] {
                return Err(Error::NotEquivariant(format!(
                    "f({} · {}) != f({})",
                    a.space[y],
                    a.group.id(h),
                    a.space[y]
                )));
            }
        }
    }
    let comps = transformation_components(a, tg);
    Ok(GroupoidHom::new(
        comps
            .iter()
            .map(|&(y, _)| x.index_of(&f[&a.space[y]]).expect("point of X"))
            .collect(),
    ))
}

/// Builds the transformation example and the map
/// `((y,γ), p(y), (z,λ)) ↦ ((y,z),(γ,λ))`.
pub fn canonical_iso_transformation(params: &TransformationParams) -> Result<TransformationExample> {
    check_map(&params.p, &params.y, &params.x, "p")?;
    check_map(&params.q, &params.z, &params.x, "q")?;
    let ay = cyclic_action(params.gamma_order, &params.y, &params.gamma_generator)?;
    let az = cyclic_action(params.lambda_order, &params.z, &params.lambda_generator)?;
    let s = transformation_groupoid(&ay)?;
    let t = transformation_groupoid(&az)?;
    let g = cotrivial_groupoid(&params.x)?;
    let p_hat = equivariant_hom(&ay, &s, &params.p, &g)?;
    let q_hat = equivariant_hom(&az, &t, &params.q, &g)?;
    let pullback = weak_pullback_groupoid(&s, &g, &t, &p_hat, &q_hat)?;

    let mut yz = Vec::new();
    for (i, y) in params.y.iter().enumerate() {
        for (j, z) in params.z.iter().enumerate() {
            if params.p[y] == params.q[z] {
                yz.push((i, j));
            }
        }
    }
    let (group, position) = product_groupoid(&ay.group, &az.group)?;
    let nl = az.group.len();
    let space = yz
        .iter()
        .map(|&(i, j)| pair_id(&params.y[i], &params.z[j]))
        .collect::<Result<Vec<_>>>()?;
    let yz_pos: BTreeMap<(usize, usize), usize> = yz.iter().copied().enumerate().map(|(k, pr)| (pr, k)).collect();
    let mut act = vec![vec![0; group.len()]; yz.len()];
    for (k, &(i, j)) in yz.iter().enumerate() {
        for gam in 0..ay.group.len() {
            for lam in 0..nl {
                let moved = (ay.act[i][gam], az.act[j][lam]);
                let target = yz_pos
                    .get(&moved)
                    .ok_or_else(|| Error::NotEquivariant("product action leaves Y * Z".into()))?;
                act[k][position[gam * nl + lam]] = *target;
            }
        }
    }
    let product_action = GroupAction::new(group, space, act)?;
    let target = transformation_groupoid(&product_action)?;

    let cs = transformation_components(&ay, &s);
    let ct = transformation_components(&az, &t);
    let mut map = Vec::with_capacity(pullback.triples().len());
    for &(si, gi, ti) in pullback.triples() {
        let (y, gam) = cs[si];
        let (z, lam) = ct[ti];
        if !g.is_unit(gi) || gi != p_hat.apply(si) {
            return Err(Error::PrecomputedConditionFailed(format!(
                "G component `{}` is not p(y)",
                g.id(gi)
            )));
        }
        let pt = pair_id(&params.y[y], &params.z[z])?;
        let gl = product_action.group.id(position[gam * nl + lam]);
        let id = transformation_id(&pt, gl);
        map.push(
            target
                .index_of_str(&id)
                .ok_or_else(|| Error::PrecomputedConditionFailed(format!("`{id}` is not in the target")))?,
        );
    }
    let iso = GroupoidHom::new(map);
    let ok = is_isomorphism(pullback.groupoid(), &target, &iso);
    Ok(TransformationExample {
        s,
        g,
        t,
        p_hat,
        q_hat,
        pullback,
        target,
        iso,
        is_isomorphism: ok,
    })
}

/// `S = T = G = Z₂`, identity maps, counting Haar systems, unit weights 1.
pub fn z2_cospan() -> Result<Cospan> {
    let z2 = HaarGroupoid::counting(cyclic_group(2)?)?;
    let id = GroupoidHom::identity(z2.groupoid());
    Cospan::new(z2.clone(), z2.clone(), z2, id.clone(), id)
}

/// `S` the pair groupoid on `{1, 2}` with counting Haar system and
/// `μ_S⁽⁰⁾ = (1, 0)`; `G = T` the trivial group. `μ_S⁽⁰⁾` is not
/// quasi-invariant, so the cospan is returned unchecked.
pub fn non_quasi_invariant_cospan() -> Result<Cospan> {
    let points = [ElementId::new("1")?, ElementId::new("2")?];
    let pair = pair_groupoid(&points)?;
    let mut mu0 = BTreeMap::new();
    mu0.insert(pair.index_of_str("(1,1)").expect("unit"), Weight::one());
    mu0.insert(pair.index_of_str("(2,2)").expect("unit"), Weight::zero());
    let s = HaarGroupoid::new_unchecked(pair.clone(), counting_haar(&pair), FiniteMeasure::from_weights(mu0));
    let trivial = HaarGroupoid::counting(cyclic_group(1)?)?;
    let p = GroupoidHom::constant(&pair, 0);
    let q = GroupoidHom::identity(trivial.groupoid());
    Ok(Cospan::new_unchecked(s, trivial.clone(), trivial, p, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_cech_example() {
        let ex = canonical_iso_cech(&CechParams::worked()).unwrap();
        assert_eq!(ex.g_u.len(), 2);
        assert_eq!(ex.g_w.len(), 4);
        assert_eq!(ex.g_v.len(), 4);
        assert_eq!(ex.pullback.groupoid().len(), 8);
        assert_eq!(ex.pullback.groupoid().units().len(), 4);
        assert_eq!(ex.target.len(), 8);
        assert!(ex.is_isomorphism);
    }

    #[test]
    fn one_block_cech_example() {
        let id = |s: &str| ElementId::new(s).unwrap();
        let one = |p: &str| [(id("a"), [id(p)].into_iter().collect())].into_iter().collect();
        let params = CechParams {
            x: vec![id("x")],
            y: vec![id("y")],
            z: vec![id("z")],
            p: [(id("y"), id("x"))].into_iter().collect(),
            q: [(id("z"), id("x"))].into_iter().collect(),
            cover_y: one("y"),
            cover_z: one("z"),
        };
        let ex = canonical_iso_cech(&params).unwrap();
        assert_eq!(ex.pullback.groupoid().len(), 1);
        assert!(ex.is_isomorphism);
    }

    #[test]
    fn identity_cech_example() {
        let id = |s: &str| ElementId::new(s).unwrap();
        let pts = vec![id("a"), id("b")];
        let ident: BTreeMap<_, _> = pts.iter().map(|p| (p.clone(), p.clone())).collect();
        let cover: BTreeMap<ElementId, BTreeSet<ElementId>> = [
            (id("1"), [id("a"), id("b")].into_iter().collect()),
            (id("2"), [id("b")].into_iter().collect()),
        ]
        .into_iter()
        .collect();
        let params = CechParams {
            x: pts.clone(),
            y: pts.clone(),
            z: pts.clone(),
            p: ident.clone(),
            q: ident,
            cover_y: cover.clone(),
            cover_z: cover,
        };
        let ex = canonical_iso_cech(&params).unwrap();
        assert!(ex.is_isomorphism);
        assert!(ex.pullback.groupoid().validate().is_empty());
    }

    #[test]
    fn mismatched_images_are_rejected() {
        let mut params = CechParams::worked();
        params.x.push(ElementId::new("x2").unwrap());
        params.p.insert(ElementId::new("y2").unwrap(), ElementId::new("x2").unwrap());
        assert!(matches!(canonical_iso_cech(&params), Err(Error::ImageMismatch(_))));
    }

    #[test]
    fn worked_transformation_example() {
        let ex = canonical_iso_transformation(&TransformationParams::worked()).unwrap();
        assert_eq!(ex.pullback.groupoid().len(), 4);
        assert_eq!(ex.target.len(), 4);
        assert!(ex.is_isomorphism);
        assert!(ex.cospan().is_ok());
    }

    #[test]
    fn trivial_groups_give_cotrivial_pullback() {
        let mut params = TransformationParams::worked();
        params.gamma_order = 1;
        params.gamma_generator = params.y.iter().map(|y| (y.clone(), y.clone())).collect();
        let ex = canonical_iso_transformation(&params).unwrap();
        assert_eq!(ex.pullback.groupoid().len(), 2);
        assert_eq!(ex.pullback.groupoid().units().len(), 2);
        assert!(ex.is_isomorphism);
    }

    #[test]
    fn non_equivariant_map_is_rejected() {
        let mut params = TransformationParams::worked();
        params.x.push(ElementId::new("x2").unwrap());
        params.p.insert(ElementId::new("y2").unwrap(), ElementId::new("x2").unwrap());
        assert!(matches!(canonical_iso_transformation(&params), Err(Error::NotEquivariant(_))));
    }
}
