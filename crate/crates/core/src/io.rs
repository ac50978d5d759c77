//! JSON documents for groupoids, cospans, weak pullbacks and worked
//! examples.
//!
//! Every document is an object with `format_version` and `kind`. Weights are
//! reduced fraction strings. Output is canonical: object keys sorted, lists
//! in canonical element order, two-space indentation and a final newline, so
//! that serializing a value twice gives identical bytes.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::constructions::{CechExample, TransformationExample};
use crate::error::{Error, Result};
use crate::groupoid::{ElementId, FiniteGroupoid, GroupoidHom, GroupoidTables};
use crate::haar::{counting_haar, range_map, HaarGroupoid, HaarSystem};
use crate::measure::{FiniteMeasure, MeasureSystem};
use crate::pullback::{Cospan, WeakPullbackResult};
use crate::weight::Weight;

pub const FORMAT_VERSION: u64 = 1;

type IdMap = BTreeMap<ElementId, ElementId>;

/// Tables of one groupoid with optional Haar data. `haar` maps each unit `u`
/// to the weights of `λ^u`; `unit_measure` maps each unit to `μ⁽⁰⁾(u)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidBody {
    pub elements: Vec<ElementId>,
    pub units: Vec<ElementId>,
    pub r: IdMap,
    pub d: IdMap,
    pub inverse: IdMap,
    pub compose: Vec<(ElementId, ElementId, ElementId)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub haar: Option<BTreeMap<ElementId, BTreeMap<ElementId, Weight>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_measure: Option<BTreeMap<ElementId, Weight>>,
}

fn dangling(locus: impl Into<String>, id: &ElementId) -> Error {
    Error::DanglingReference {
        locus: locus.into(),
        id: id.to_string(),
    }
}

fn parse_error(locus: impl Into<String>, message: impl Into<String>) -> Error {
    Error::ParseError {
        locus: locus.into(),
        message: message.into(),
    }
}

impl GroupoidBody {
    pub fn from_groupoid(g: &FiniteGroupoid) -> Self {
        let t = g.to_tables();
        GroupoidBody {
            elements: t.elements,
            units: t.units,
            r: t.range,
            d: t.source,
            inverse: t.inverse,
            compose: t.compose,
            haar: None,
            unit_measure: None,
        }
    }

    pub fn from_haar(h: &HaarGroupoid) -> Self {
        let g = h.groupoid();
        let mut body = Self::from_groupoid(g);
        body.haar = Some(
            h.haar()
                .family()
                .iter()
                .map(|(u, m)| (g.id(*u).clone(), m.iter().map(|(x, w)| (g.id(*x).clone(), w.clone())).collect()))
                .collect(),
        );
        body.unit_measure = Some(h.unit_measure().iter().map(|(u, w)| (g.id(*u).clone(), w.clone())).collect());
        body
    }

    /// Checks every reference, then builds the groupoid. `locus` prefixes
    /// error positions.
    pub fn to_groupoid(&self, locus: &str) -> Result<FiniteGroupoid> {
        let mut known = HashMap::new();
        for (i, x) in self.elements.iter().enumerate() {
            if known.insert(x, i).is_some() {
                return Err(parse_error(format!("{locus}.elements[{i}]"), format!("duplicate element `{x}`")));
            }
        }
        let check = |id: &ElementId, at: String| if known.contains_key(id) { Ok(()) } else { Err(dangling(at, id)) };
        for (i, u) in self.units.iter().enumerate() {
            check(u, format!("{locus}.units[{i}]"))?;
        }
        for (name, table) in [("r", &self.r), ("d", &self.d), ("inverse", &self.inverse)] {
            for (k, v) in table {
                check(k, format!("{locus}.{name}"))?;
                check(v, format!("{locus}.{name}.{k}"))?;
            }
            if let Some(x) = self.elements.iter().find(|x| !table.contains_key(x)) {
                return Err(parse_error(format!("{locus}.{name}"), format!("no entry for `{x}`")));
            }
        }
        for (i, (x, y, z)) in self.compose.iter().enumerate() {
            for (j, id) in [x, y, z].into_iter().enumerate() {
                check(id, format!("{locus}.compose[{i}][{j}]"))?;
            }
        }
        FiniteGroupoid::from_tables(&GroupoidTables {
            elements: self.elements.clone(),
            units: self.units.clone(),
            range: self.r.clone(),
            source: self.d.clone(),
            inverse: self.inverse.clone(),
            compose: self.compose.clone(),
        })
        .map_err(|e| parse_error(locus, e.to_string()))
    }

    /// The Haar groupoid without validating it. Missing Haar data defaults
    /// to counting measures, a missing unit measure to weight 1 per unit.
    pub fn to_haar(&self, locus: &str) -> Result<HaarGroupoid> {
        let g = self.to_groupoid(locus)?;
        let look = |id: &ElementId, at: String| g.index_of(id).ok_or_else(|| dangling(at, id));
        let haar: HaarSystem = match &self.haar {
            None => counting_haar(&g),
            Some(family) => {
                let mut out = BTreeMap::new();
                for (u, m) in family {
                    let ui = look(u, format!("{locus}.haar"))?;
                    let mut row = BTreeMap::new();
                    for (x, w) in m {
                        row.insert(look(x, format!("{locus}.haar.{u}"))?, w.clone());
                    }
                    out.insert(ui, row);
                }
                MeasureSystem::new(range_map(&g), out)
            }
        };
        let mu0 = match &self.unit_measure {
            None => FiniteMeasure::counting(g.units().iter().copied()),
            Some(m) => {
                let mut out = BTreeMap::new();
                for (u, w) in m {
                    out.insert(look(u, format!("{locus}.unit_measure"))?, w.clone());
                }
                FiniteMeasure::from_weights(out)
            }
        };
        Ok(HaarGroupoid::new_unchecked(g, haar, mu0))
    }
}

fn hom_from_ids(dom: &FiniteGroupoid, cod: &FiniteGroupoid, map: &IdMap, locus: &str) -> Result<GroupoidHom> {
    for (k, v) in map {
        if dom.index_of(k).is_none() {
            return Err(dangling(locus, k));
        }
        if cod.index_of(v).is_none() {
            return Err(dangling(format!("{locus}.{k}"), v));
        }
    }
    GroupoidHom::from_ids(dom, cod, map).map_err(|e| parse_error(locus, e.to_string()))
}

/// `S --p--> G <--q-- T`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CospanBody {
    pub s: GroupoidBody,
    pub g: GroupoidBody,
    pub t: GroupoidBody,
    pub p: IdMap,
    pub q: IdMap,
}

impl CospanBody {
    pub fn from_cospan(c: &Cospan) -> Self {
        CospanBody {
            s: GroupoidBody::from_haar(c.s()),
            g: GroupoidBody::from_haar(c.g()),
            t: GroupoidBody::from_haar(c.t()),
            p: c.p().to_ids(c.s().groupoid(), c.g().groupoid()),
            q: c.q().to_ids(c.t().groupoid(), c.g().groupoid()),
        }
    }

    /// The cospan without validating it; see [`Cospan::validate`].
    pub fn to_cospan(&self, locus: &str) -> Result<Cospan> {
        let s = self.s.to_haar(&format!("{locus}s"))?;
        let g = self.g.to_haar(&format!("{locus}g"))?;
        let t = self.t.to_haar(&format!("{locus}t"))?;
        let p = hom_from_ids(s.groupoid(), g.groupoid(), &self.p, &format!("{locus}p"))?;
        let q = hom_from_ids(t.groupoid(), g.groupoid(), &self.q, &format!("{locus}q"))?;
        Ok(Cospan::new_unchecked(s, g, t, p, q))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidDocument {
    pub format_version: u64,
    pub kind: String,
    pub groupoid: GroupoidBody,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CospanDocument {
    pub format_version: u64,
    pub kind: String,
    pub cospan: CospanBody,
}

/// The cospan, `(P, λ_P, μ_P⁽⁰⁾)`, `Δ_P` on the support of `μ_P` and both
/// projections.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeakPullbackDocument {
    pub format_version: u64,
    pub kind: String,
    pub cospan: CospanBody,
    pub pullback: GroupoidBody,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modular: Option<BTreeMap<ElementId, Weight>>,
    pub pi_s: IdMap,
    pub pi_t: IdMap,
}

/// A worked example: its cospan, the weak pullback, the target groupoid and
/// the canonical map with its verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleDocument {
    pub format_version: u64,
    pub kind: String,
    pub example: String,
    pub cospan: CospanBody,
    pub haar_cospan_valid: bool,
    pub pullback: GroupoidBody,
    pub target: GroupoidBody,
    pub iso: IdMap,
    pub is_isomorphism: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Groupoid(GroupoidDocument),
    Cospan(CospanDocument),
    WeakPullback(WeakPullbackDocument),
    Example(ExampleDocument),
}

impl GroupoidDocument {
    pub fn from_groupoid(g: &FiniteGroupoid) -> Self {
        GroupoidDocument {
            format_version: FORMAT_VERSION,
            kind: "groupoid".into(),
            groupoid: GroupoidBody::from_groupoid(g),
        }
    }

    pub fn from_haar(h: &HaarGroupoid) -> Self {
        GroupoidDocument {
            format_version: FORMAT_VERSION,
            kind: "groupoid".into(),
            groupoid: GroupoidBody::from_haar(h),
        }
    }
}

impl CospanDocument {
    pub fn from_cospan(c: &Cospan) -> Self {
        CospanDocument {
            format_version: FORMAT_VERSION,
            kind: "cospan".into(),
            cospan: CospanBody::from_cospan(c),
        }
    }

    pub fn to_cospan(&self) -> Result<Cospan> {
        self.cospan.to_cospan("cospan.")
    }
}

impl WeakPullbackDocument {
    pub fn from_result(w: &WeakPullbackResult) -> Self {
        let c = w.cospan();
        let p = w.groupoid();
        WeakPullbackDocument {
            format_version: FORMAT_VERSION,
            kind: "weak_pullback".into(),
            cospan: CospanBody::from_cospan(c),
            pullback: GroupoidBody::from_haar(w.haar()),
            modular: w
                .modular()
                .map(|m| m.iter().map(|(a, d)| (p.id(a).clone(), d.clone())).collect()),
            pi_s: w.structure().pi_s().to_ids(p, c.s().groupoid()),
            pi_t: w.structure().pi_t().to_ids(p, c.t().groupoid()),
        }
    }
}

fn example_document(
    example: &str,
    cospan: CospanBody,
    haar_cospan_valid: bool,
    pullback: &FiniteGroupoid,
    target: &FiniteGroupoid,
    iso: &GroupoidHom,
    is_isomorphism: bool,
) -> ExampleDocument {
    ExampleDocument {
        format_version: FORMAT_VERSION,
        kind: "example".into(),
        example: example.into(),
        cospan,
        haar_cospan_valid,
        pullback: GroupoidBody::from_groupoid(pullback),
        target: GroupoidBody::from_groupoid(target),
        iso: iso.to_ids(pullback, target),
        is_isomorphism,
    }
}

impl ExampleDocument {
    /// The Čech cospan carries no Haar data: `p̂` is not surjective onto
    /// `G_V`, so no choice of full Haar systems makes it a Haar cospan.
    pub fn from_cech(ex: &CechExample) -> Self {
        let cospan = CospanBody {
            s: GroupoidBody::from_groupoid(&ex.g_u),
            g: GroupoidBody::from_groupoid(&ex.g_v),
            t: GroupoidBody::from_groupoid(&ex.g_w),
            p: ex.p_hat.to_ids(&ex.g_u, &ex.g_v),
            q: ex.q_hat.to_ids(&ex.g_w, &ex.g_v),
        };
        let valid = cospan
            .to_cospan("cospan.")
            .and_then(|c| c.validate())
            .map(|r| r.is_empty())
            .unwrap_or(false);
        example_document(
            "cech",
            cospan,
            valid,
            ex.pullback.groupoid(),
            &ex.target,
            &ex.iso,
            ex.is_isomorphism,
        )
    }

    pub fn from_transformation(ex: &TransformationExample) -> Self {
        let (cospan, valid) = match ex.cospan() {
            Ok(c) => (CospanBody::from_cospan(&c), true),
            Err(_) => (
                CospanBody {
                    s: GroupoidBody::from_groupoid(&ex.s),
                    g: GroupoidBody::from_groupoid(&ex.g),
                    t: GroupoidBody::from_groupoid(&ex.t),
                    p: ex.p_hat.to_ids(&ex.s, &ex.g),
                    q: ex.q_hat.to_ids(&ex.t, &ex.g),
                },
                false,
            ),
        };
        example_document(
            "transformation",
            cospan,
            valid,
            ex.pullback.groupoid(),
            &ex.target,
            &ex.iso,
            ex.is_isomorphism,
        )
    }
}

/// Canonical text of any document.
pub fn to_canonical_string<T: Serialize>(doc: &T) -> String {
    // going through Value sorts every object's keys
    let value = serde_json::to_value(doc).expect("documents serialize");
    let mut s = serde_json::to_string_pretty(&value).expect("values serialize");
    s.push('\n');
    s
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Groupoid(_) => "groupoid",
            Document::Cospan(_) => "cospan",
            Document::WeakPullback(_) => "weak_pullback",
            Document::Example(_) => "example",
        }
    }

    pub fn to_canonical_string(&self) -> String {
        match self {
            Document::Groupoid(d) => to_canonical_string(d),
            Document::Cospan(d) => to_canonical_string(d),
            Document::WeakPullback(d) => to_canonical_string(d),
            Document::Example(d) => to_canonical_string(d),
        }
    }
}

fn json_error(e: serde_json::Error) -> Error {
    parse_error(format!("line {} column {}", e.line(), e.column()), e.to_string())
}

fn typed<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(json_error)
}

/// Parses any document, checking its version, kind and every id reference.
pub fn parse_document(text: &str) -> Result<Document> {
    let value: Value = serde_json::from_str(text).map_err(json_error)?;
    let obj = value
        .as_object()
        .ok_or_else(|| parse_error("document", "top level must be an object"))?;
    let version = obj
        .get("format_version")
        .ok_or_else(|| parse_error("format_version", "missing"))?
        .as_u64()
        .ok_or_else(|| parse_error("format_version", "must be a nonnegative integer"))?;
    if version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| parse_error("kind", "missing or not a string"))?;
    let doc = match kind {
        "groupoid" => {
            let d: GroupoidDocument = typed(text)?;
            d.groupoid.to_haar("groupoid")?;
            Document::Groupoid(d)
        }
        "cospan" => {
            let d: CospanDocument = typed(text)?;
            d.to_cospan()?;
            Document::Cospan(d)
        }
        "weak_pullback" => {
            let d: WeakPullbackDocument = typed(text)?;
            d.cospan.to_cospan("cospan.")?;
            let p = d.pullback.to_groupoid("pullback")?;
            if let Some(m) = &d.modular {
                for k in m.keys() {
                    if p.index_of(k).is_none() {
                        return Err(dangling("modular", k));
                    }
                }
            }
            Document::WeakPullback(d)
        }
        "example" => {
            let d: ExampleDocument = typed(text)?;
            d.cospan.to_cospan("cospan.")?;
            d.pullback.to_groupoid("pullback")?;
            d.target.to_groupoid("target")?;
            Document::Example(d)
        }
        other => return Err(parse_error("kind", format!("unknown document kind `{other}`"))),
    };
    Ok(doc)
}

/// Parses a cospan document; the result is not validated.
pub fn parse_cospan(text: &str) -> Result<Cospan> {
    match parse_document(text)? {
        Document::Cospan(d) => d.to_cospan(),
        other => Err(parse_error("kind", format!("expected a cospan, found `{}`", other.kind()))),
    }
}

/// Parses a groupoid document; the result is not validated.
pub fn parse_haar_groupoid(text: &str) -> Result<HaarGroupoid> {
    match parse_document(text)? {
        Document::Groupoid(d) => d.groupoid.to_haar("groupoid"),
        other => Err(parse_error("kind", format!("expected a groupoid, found `{}`", other.kind()))),
    }
}

pub fn cospan_to_string(c: &Cospan) -> String {
    to_canonical_string(&CospanDocument::from_cospan(c))
}

pub fn haar_groupoid_to_string(h: &HaarGroupoid) -> String {
    to_canonical_string(&GroupoidDocument::from_haar(h))
}

pub fn weak_pullback_to_string(w: &WeakPullbackResult) -> String {
    to_canonical_string(&WeakPullbackDocument::from_result(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{canonical_iso_cech, cyclic_group, z2_cospan, CechParams};
    use crate::pullback::build_weak_pullback;

    #[test]
    fn trivial_group_round_trips() {
        let h = HaarGroupoid::counting(cyclic_group(1).unwrap()).unwrap();
        let text = haar_groupoid_to_string(&h);
        assert_eq!(parse_haar_groupoid(&text).unwrap(), h);
        let again = parse_document(&text).unwrap().to_canonical_string();
        assert_eq!(again, text);
    }

    #[test]
    fn cospan_and_pullback_round_trip() {
        let c = z2_cospan().unwrap();
        let text = cospan_to_string(&c);
        assert_eq!(parse_cospan(&text).unwrap(), c);
        let w = build_weak_pullback(&c).unwrap();
        let pt = weak_pullback_to_string(&w);
        assert_eq!(parse_document(&pt).unwrap().to_canonical_string(), pt);
        assert!(pt.contains("\"e|g1|e\""));
    }

    #[test]
    fn example_round_trips() {
        let ex = canonical_iso_cech(&CechParams::worked()).unwrap();
        let doc = ExampleDocument::from_cech(&ex);
        assert!(doc.is_isomorphism);
        assert!(!doc.haar_cospan_valid);
        let text = to_canonical_string(&doc);
        assert_eq!(parse_document(&text).unwrap(), Document::Example(doc));
    }

    fn z2_text() -> String {
        haar_groupoid_to_string(&HaarGroupoid::counting(cyclic_group(2).unwrap()).unwrap())
    }

    #[test]
    fn negative_weight_is_a_parse_error() {
        let text = z2_text().replacen("\"1\"", "\"-1/2\"", 1);
        assert!(matches!(parse_document(&text), Err(Error::ParseError { .. })));
    }

    #[test]
    fn decimal_weight_is_a_parse_error() {
        let text = z2_text().replacen("\"1\"", "\"0.5\"", 1);
        assert!(matches!(parse_document(&text), Err(Error::ParseError { .. })));
        let text = z2_text().replacen("\"1\"", "0.5", 1);
        assert!(matches!(parse_document(&text), Err(Error::ParseError { .. })));
    }

    #[test]
    fn unknown_compose_id_is_dangling() {
        let mut doc = GroupoidDocument::from_groupoid(&cyclic_group(2).unwrap());
        doc.groupoid.compose[0].2 = ElementId::new("nowhere").unwrap();
        let text = to_canonical_string(&doc);
        match parse_document(&text) {
            Err(Error::DanglingReference { locus, id }) => {
                assert_eq!(id, "nowhere");
                assert!(locus.starts_with("groupoid.compose[0]"));
            }
            other => panic!("expected a dangling reference, got {other:?}"),
        }
    }

    #[test]
    fn version_is_checked() {
        let text = z2_text().replace("\"format_version\": 1", "\"format_version\": 2");
        assert!(matches!(parse_document(&text), Err(Error::UnsupportedVersion(2))));
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        match parse_document("{\n  \"format_version\": 1,\n  oops\n}") {
            Err(Error::ParseError { locus, .. }) => assert!(locus.starts_with("line 3")),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn unreduced_weights_are_normalized() {
        let text = z2_text().replacen("\"1\"", "\"2/2\"", 1);
        let doc = parse_document(&text).unwrap();
        assert_eq!(doc.to_canonical_string(), z2_text());
    }
}
