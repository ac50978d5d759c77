//! Finite groupoids given by explicit tables, their axioms, fibers, orbits
//! and homomorphisms.
//!
//! A [`FiniteGroupoid`] stores its elements in canonical (lexicographic id)
//! order and refers to them by index. The composition table is an arbitrary
//! partial map so that malformed tables can be represented and reported by
//! [`FiniteGroupoid::validate`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque element name: nonempty and free of whitespace.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ElementId(String);

impl ElementId {
    pub fn new(s: impl Into<String>) -> Result<Self> {
        let s = s.into();
        if s.is_empty() {
            return Err(Error::MalformedInput("empty element id".into()));
        }
        if s.chars().any(char::is_whitespace) {
            return Err(Error::MalformedInput(format!(
                "element id `{s}` contains whitespace"
            )));
        }
        Ok(ElementId(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for ElementId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        ElementId::new(s)
    }
}

impl From<ElementId> for String {
    fn from(id: ElementId) -> String {
        id.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One failed axiom instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Stable axiom code, e.g. `inverse_law`.
    pub axiom: String,
    /// Ids of the elements witnessing the failure.
    pub witnesses: Vec<String>,
    pub detail: String,
}

/// Result of a validator: empty iff every checked property holds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn push(&mut self, axiom: impl Into<String>, witnesses: Vec<String>, detail: impl Into<String>) {
        self.violations.push(Violation {
            axiom: axiom.into(),
            witnesses,
            detail: detail.into(),
        });
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    /// Prefixes every axiom code, e.g. to say which groupoid of a cospan failed.
    pub fn scoped(mut self, scope: &str) -> Self {
        for v in &mut self.violations {
            v.axiom = format!("{scope}.{}", v.axiom);
        }
        self
    }

    pub fn has_axiom(&self, axiom: &str) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }

    pub fn find(&self, axiom: &str) -> Option<&Violation> {
        self.violations.iter().find(|v| v.axiom == axiom)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{} [{}]: {}", v.axiom, v.witnesses.join(", "), v.detail)?;
        }
        Ok(())
    }
}

/// Id-level tables, as read from a document.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupoidTables {
    pub elements: Vec<ElementId>,
    pub units: Vec<ElementId>,
    pub range: BTreeMap<ElementId, ElementId>,
    pub source: BTreeMap<ElementId, ElementId>,
    pub inverse: BTreeMap<ElementId, ElementId>,
    pub compose: Vec<(ElementId, ElementId, ElementId)>,
}

/// Index-level tables. Indices refer to positions in `ids`, in any order.
#[derive(Clone, Debug, Default)]
pub struct GroupoidParts {
    pub ids: Vec<ElementId>,
    pub units: Vec<usize>,
    pub range: Vec<usize>,
    pub source: Vec<usize>,
    pub inverse: Vec<usize>,
    pub compose: Vec<(usize, usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupoid {
    ids: Vec<ElementId>,
    index: HashMap<ElementId, usize>,
    is_unit: Vec<bool>,
    units: Vec<usize>,
    range: Vec<usize>,
    source: Vec<usize>,
    inverse: Vec<usize>,
    // row x holds (y, xy) sorted by y
    compose: Vec<Vec<(usize, usize)>>,
    // elements grouped by their range value
    r_fibers: Vec<Vec<usize>>,
}

impl FiniteGroupoid {
    /// Builds from index-level tables, reordering elements canonically.
    pub fn from_parts(parts: GroupoidParts) -> Result<Self> {
        let n = parts.ids.len();
        for (name, v) in [("range", &parts.range), ("source", &parts.source), ("inverse", &parts.inverse)] {
            if v.len() != n {
                return Err(Error::MalformedInput(format!(
                    "{name} table has {} entries for {n} elements",
                    v.len()
                )));
            }
            if let Some(bad) = v.iter().find(|&&i| i >= n) {
                return Err(Error::MalformedInput(format!("{name} table references index {bad}")));
            }
        }
        if let Some(bad) = parts.units.iter().find(|&&i| i >= n) {
            return Err(Error::MalformedInput(format!("unit index {bad} out of range")));
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| parts.ids[a].cmp(&parts.ids[b]));
        let mut new_of_old = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            new_of_old[old] = new;
        }
        let ids: Vec<ElementId> = order.iter().map(|&o| parts.ids[o].clone()).collect();
        let mut index = HashMap::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::MalformedInput(format!("duplicate element id `{id}`")));
            }
        }
        let remap = |v: &[usize]| -> Vec<usize> { order.iter().map(|&o| new_of_old[v[o]]).collect() };
        let range = remap(&parts.range);
        let source = remap(&parts.source);
        let inverse = remap(&parts.inverse);

        let mut is_unit = vec![false; n];
        for &u in &parts.units {
            is_unit[new_of_old[u]] = true;
        }
        let units: Vec<usize> = (0..n).filter(|&i| is_unit[i]).collect();

        let mut compose: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for &(x, y, z) in &parts.compose {
            if x >= n || y >= n || z >= n {
                return Err(Error::MalformedInput(format!(
                    "compose entry ({x}, {y}, {z}) out of range"
                )));
            }
            compose[new_of_old[x]].push((new_of_old[y], new_of_old[z]));
        }
        for (x, row) in compose.iter_mut().enumerate() {
            row.sort_unstable();
            for w in row.windows(2) {
                if w[0].0 == w[1].0 && w[0].1 != w[1].1 {
                    return Err(Error::MalformedInput(format!(
                        "compose({}, {}) given two different values",
                        ids[x], ids[w[0].0]
                    )));
                }
            }
            row.dedup();
        }

        let mut r_fibers = vec![Vec::new(); n];
        for x in 0..n {
            r_fibers[range[x]].push(x);
        }

        Ok(FiniteGroupoid {
            ids,
            index,
            is_unit,
            units,
            range,
            source,
            inverse,
            compose,
            r_fibers,
        })
    }

    /// Builds from structure maps and a product function, which is queried
    /// exactly on the pairs with `source(x) == range(y)`.
    pub fn from_structure(
        ids: Vec<ElementId>,
        units: Vec<usize>,
        range: Vec<usize>,
        source: Vec<usize>,
        inverse: Vec<usize>,
        product: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let n = ids.len();
        if range.len() != n || source.len() != n {
            return Err(Error::MalformedInput("structure maps have wrong length".into()));
        }
        let mut by_range: Vec<Vec<usize>> = vec![Vec::new(); n];
        for y in 0..n {
            if range[y] >= n {
                return Err(Error::MalformedInput(format!("range index {} out of range", range[y])));
            }
            by_range[range[y]].push(y);
        }
        let mut compose = Vec::new();
        for x in 0..n {
            let dx = source[x];
            if dx >= n {
                return Err(Error::MalformedInput(format!("source index {dx} out of range")));
            }
            for &y in &by_range[dx] {
                compose.push((x, y, product(x, y)));
            }
        }
        FiniteGroupoid::from_parts(GroupoidParts {
            ids,
            units,
            range,
            source,
            inverse,
            compose,
        })
    }

    /// Builds from id-level tables. Unknown ids are reported as malformed input.
    pub fn from_tables(tables: &GroupoidTables) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, id) in tables.elements.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::MalformedInput(format!("duplicate element id `{id}`")));
            }
        }
        let look = |id: &ElementId, what: &str| -> Result<usize> {
            index
                .get(id)
                .copied()
                .ok_or_else(|| Error::MalformedInput(format!("{what} references unknown id `{id}`")))
        };
        let map_table = |table: &BTreeMap<ElementId, ElementId>, what: &str| -> Result<Vec<usize>> {
            for k in table.keys() {
                look(k, what)?;
            }
            tables
                .elements
                .iter()
                .map(|x| {
                    let v = table
                        .get(x)
                        .ok_or_else(|| Error::MalformedInput(format!("{what} has no entry for `{x}`")))?;
                    look(v, what)
                })
                .collect()
        };
        let units = tables
            .units
            .iter()
            .map(|u| look(u, "units"))
            .collect::<Result<Vec<_>>>()?;
        let range = map_table(&tables.range, "range")?;
        let source = map_table(&tables.source, "source")?;
        let inverse = map_table(&tables.inverse, "inverse")?;
        let compose = tables
            .compose
            .iter()
            .map(|(x, y, z)| Ok((look(x, "compose")?, look(y, "compose")?, look(z, "compose")?)))
            .collect::<Result<Vec<_>>>()?;
        FiniteGroupoid::from_parts(GroupoidParts {
            ids: tables.elements.clone(),
            units,
            range,
            source,
            inverse,
            compose,
        })
    }

    /// Id-level tables in canonical order.
    pub fn to_tables(&self) -> GroupoidTables {
        let id = |i: usize| self.ids[i].clone();
        let mut compose = Vec::new();
        for x in 0..self.len() {
            for &(y, z) in &self.compose[x] {
                compose.push((id(x), id(y), id(z)));
            }
        }
        compose.sort();
        GroupoidTables {
            elements: self.ids.clone(),
            units: self.units.iter().map(|&u| id(u)).collect(),
            range: (0..self.len()).map(|x| (id(x), id(self.range[x]))).collect(),
            source: (0..self.len()).map(|x| (id(x), id(self.source[x]))).collect(),
            inverse: (0..self.len()).map(|x| (id(x), id(self.inverse[x]))).collect(),
            compose,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[ElementId] {
        &self.ids
    }

    pub fn id(&self, x: usize) -> &ElementId {
        &self.ids[x]
    }

    pub fn index_of(&self, id: &ElementId) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Looks up by string, returning `None` for unknown or invalid ids.
    pub fn index_of_str(&self, id: &str) -> Option<usize> {
        ElementId::new(id).ok().and_then(|id| self.index_of(&id))
    }

    pub fn units(&self) -> &[usize] {
        &self.units
    }

    pub fn is_unit(&self, x: usize) -> bool {
        self.is_unit[x]
    }

    pub fn range(&self, x: usize) -> usize {
        self.range[x]
    }

    pub fn source(&self, x: usize) -> usize {
        self.source[x]
    }

    pub fn inverse(&self, x: usize) -> usize {
        self.inverse[x]
    }

    pub fn compose(&self, x: usize, y: usize) -> Option<usize> {
        let row = &self.compose[x];
        row.binary_search_by_key(&y, |&(k, _)| k).ok().map(|i| row[i].1)
    }

    /// Defined products `(y, xy)` with left factor `x`.
    pub fn compose_row(&self, x: usize) -> &[(usize, usize)] {
        &self.compose[x]
    }

    pub fn composable_pairs(&self) -> usize {
        self.compose.iter().map(Vec::len).sum()
    }

    /// `G^u`, the elements with range `u`.
    pub fn r_fiber(&self, u: usize) -> Result<&[usize]> {
        if u >= self.len() || !self.is_unit[u] {
            return Err(Error::NotAUnit(
                self.ids.get(u).map(|i| i.to_string()).unwrap_or_else(|| u.to_string()),
            ));
        }
        Ok(&self.r_fibers[u])
    }

    pub fn r_fiber_ids(&self, u: &ElementId) -> Result<BTreeSet<ElementId>> {
        let ui = self.index_of(u).ok_or_else(|| Error::NotAUnit(u.to_string()))?;
        Ok(self.r_fiber(ui)?.iter().map(|&x| self.ids[x].clone()).collect())
    }

    /// `G^u_v`.
    pub fn hom_set(&self, u: usize, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.r_fibers[u].iter().copied().filter(move |&x| self.source[x] == v)
    }

    /// Checks every groupoid axiom exhaustively.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        let n = self.len();
        let id = |i: usize| self.ids[i].to_string();

        for &u in &self.units {
            if self.range[u] != u || self.source[u] != u {
                report.push("unit.range_source", vec![id(u)], "unit must be its own range and source");
            }
        }
        for x in 0..n {
            if !self.is_unit[self.range[x]] {
                report.push("range.not_unit", vec![id(x), id(self.range[x])], "range is not a unit");
            }
            if !self.is_unit[self.source[x]] {
                report.push("source.not_unit", vec![id(x), id(self.source[x])], "source is not a unit");
            }
        }

        for x in 0..n {
            let dx = self.source[x];
            for &(y, z) in &self.compose[x] {
                if self.range[y] != dx {
                    report.push(
                        "compose.domain",
                        vec![id(x), id(y)],
                        "product defined although d(x) != r(y)",
                    );
                    continue;
                }
                if self.range[z] != self.range[x] || self.source[z] != self.source[y] {
                    report.push(
                        "compose.range_source",
                        vec![id(x), id(y), id(z)],
                        "r(xy) = r(x) and d(xy) = d(y) must hold",
                    );
                }
            }
            for &y in &self.r_fibers[dx] {
                if self.compose(x, y).is_none() {
                    report.push("compose.domain", vec![id(x), id(y)], "product undefined although d(x) = r(y)");
                }
            }
        }

        for x in 0..n {
            if self.compose(x, self.source[x]) != Some(x) {
                report.push("unit_law.right", vec![id(x)], "x d(x) must equal x");
            }
            if self.compose(self.range[x], x) != Some(x) {
                report.push("unit_law.left", vec![id(x)], "r(x) x must equal x");
            }
            let inv = self.inverse[x];
            if self.compose(x, inv) != Some(self.range[x]) || self.compose(inv, x) != Some(self.source[x]) {
                report.push(
                    "inverse_law",
                    vec![id(x)],
                    format!("x x^-1 = r(x) and x^-1 x = d(x) fail for x^-1 = {}", id(inv)),
                );
            }
            if self.inverse[inv] != x {
                report.push("inverse.involution", vec![id(x)], "inverse of inverse must be x");
            }
        }

        for x in 0..n {
            for &(y, xy) in &self.compose[x] {
                for &(z, yz) in &self.compose[y] {
                    let left = self.compose(xy, z);
                    let right = self.compose(x, yz);
                    if left.is_none() || left != right {
                        report.push(
                            "associativity",
                            vec![id(x), id(y), id(z)],
                            "(xy)z must equal x(yz)",
                        );
                    }
                }
            }
        }
        report
    }

    /// Connected components of the unit set under `r(x) ~ d(x)`.
    pub fn orbits(&self) -> OrbitPartition {
        let n = self.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut a: usize) -> usize {
            while parent[a] != a {
                parent[a] = parent[parent[a]];
                a = parent[a];
            }
            a
        }
        for x in 0..n {
            let a = find(&mut parent, self.range[x]);
            let b = find(&mut parent, self.source[x]);
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi] = lo;
            }
        }
        let mut block_of_root: BTreeMap<usize, usize> = BTreeMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut orbit_of = vec![None; n];
        // units are visited in canonical order, so blocks are ordered by their least unit
        for &u in &self.units {
            let root = find(&mut parent, u);
            let b = *block_of_root.entry(root).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(u);
            orbit_of[u] = Some(b);
        }
        OrbitPartition { blocks, orbit_of }
    }
}

/// Partition of the unit set into orbits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition {
    pub blocks: Vec<Vec<usize>>,
    orbit_of: Vec<Option<usize>>,
}

impl OrbitPartition {
    /// Orbit index of a unit; `None` for non-units.
    pub fn orbit_of(&self, u: usize) -> Option<usize> {
        self.orbit_of.get(u).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Element map between two finite groupoids (domain index to codomain index).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupoidHom {
    pub map: Vec<usize>,
}

impl GroupoidHom {
    pub fn new(map: Vec<usize>) -> Self {
        GroupoidHom { map }
    }

    pub fn identity(g: &FiniteGroupoid) -> Self {
        GroupoidHom { map: (0..g.len()).collect() }
    }

    /// Every element sent to `target`.
    pub fn constant(domain: &FiniteGroupoid, target: usize) -> Self {
        GroupoidHom { map: vec![target; domain.len()] }
    }

    pub fn from_ids(
        domain: &FiniteGroupoid,
        codomain: &FiniteGroupoid,
        map: &BTreeMap<ElementId, ElementId>,
    ) -> Result<Self> {
        let mut out = Vec::with_capacity(domain.len());
        for id in domain.ids() {
            let target = map
                .get(id)
                .ok_or_else(|| Error::MalformedInput(format!("hom has no image for `{id}`")))?;
            let t = codomain
                .index_of(target)
                .ok_or_else(|| Error::MalformedInput(format!("hom image `{target}` is not in the codomain")))?;
            out.push(t);
        }
        if let Some(extra) = map.keys().find(|k| domain.index_of(k).is_none()) {
            return Err(Error::MalformedInput(format!("hom maps unknown element `{extra}`")));
        }
        Ok(GroupoidHom { map: out })
    }

    pub fn to_ids(&self, domain: &FiniteGroupoid, codomain: &FiniteGroupoid) -> BTreeMap<ElementId, ElementId> {
        self.map
            .iter()
            .enumerate()
            .map(|(x, &y)| (domain.id(x).clone(), codomain.id(y).clone()))
            .collect()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &GroupoidHom) -> GroupoidHom {
        GroupoidHom { map: self.map.iter().map(|&y| next.map[y]).collect() }
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.map.iter().all(|y| seen.insert(*y))
    }
}

/// Checks that `hom` preserves units, range, source, inverses and products.
pub fn validate_hom(domain: &FiniteGroupoid, codomain: &FiniteGroupoid, hom: &GroupoidHom) -> Result<ValidationReport> {
    if hom.map.len() != domain.len() {
        return Err(Error::MalformedInput(format!(
            "hom has {} images for {} elements",
            hom.map.len(),
            domain.len()
        )));
    }
    if let Some(bad) = hom.map.iter().find(|&&y| y >= codomain.len()) {
        return Err(Error::MalformedInput(format!("hom image index {bad} out of range")));
    }
    let mut report = ValidationReport::new();
    let did = |x: usize| domain.id(x).to_string();
    let p = |x: usize| hom.map[x];
    for &u in domain.units() {
        if !codomain.is_unit(p(u)) {
            report.push(
                "hom.units",
                vec![did(u), codomain.id(p(u)).to_string()],
                "unit is not sent to a unit",
            );
        }
    }
    for x in 0..domain.len() {
        if p(domain.range(x)) != codomain.range(p(x)) {
            report.push("hom.range", vec![did(x)], "p(r(x)) != r(p(x))");
        }
        if p(domain.source(x)) != codomain.source(p(x)) {
            report.push("hom.source", vec![did(x)], "p(d(x)) != d(p(x))");
        }
        if p(domain.inverse(x)) != codomain.inverse(p(x)) {
            report.push("hom.inverse", vec![did(x)], "p(x^-1) != p(x)^-1");
        }
        for &(y, xy) in domain.compose_row(x) {
            if codomain.compose(p(x), p(y)) != Some(p(xy)) {
                report.push("hom.compose", vec![did(x), did(y)], "p(xy) != p(x)p(y)");
            }
        }
    }
    Ok(report)
}

/// `x ↦ [r(p(x))]` in the codomain's orbit space.
pub fn orbit_map_through(codomain: &FiniteGroupoid, hom: &GroupoidHom) -> Vec<usize> {
    let orbits = codomain.orbits();
    hom.map
        .iter()
        .map(|&y| {
            orbits
                .orbit_of(codomain.range(y))
                .expect("range of a valid groupoid element is a unit")
        })
        .collect()
}
