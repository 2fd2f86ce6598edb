//! The `procat/1` job document: named systems, morphisms between them, and queries.
//!
//! ```json
//! {
//!   "format": "procat/1",
//!   "category": "fgab",
//!   "systems": [
//!     { "name": "X", "tower": { "prefix": { "objects": [], "bonds": [] },
//!                               "period": { "objects": ["Z"], "bonds": [[[2]]] } } }
//!   ],
//!   "morphisms": [ { "name": "f", "source": "X", "target": "Y", "components": [[[1]]] } ],
//!   "queries": [ { "property": "mono", "subject": "f", "horizon": 6 } ]
//! }
//! ```
//!
//! Tower bond `k` of a block goes from the next level to level `k`; the last period bond
//! wraps around to the first period level. Finite sets are label lists and maps are label
//! maps; groups are `"Z^2 + Z/4"` or `{ "generators": n, "relations": [[..], ..] }`, one
//! relation vector per entry, and homomorphisms are row-major matrices acting on columns.
//! In `dual:` categories every map is written in the underlying category, so arrows point
//! the other way.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::categories::{Category, FgAbMorphism, FgAbObject, FinSetMorphism, FinSetObject, Morphism, Object};
use crate::deciders::Property;
use crate::prosys::{Index, InverseSystem, LevelMorphism, PosetIndex, Tail, TowerIndex};
use crate::zlinalg::IntMatrix;

pub const DOC_FORMAT: &str = "procat/1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DocError {
    pub path: String,
    pub message: String,
}

impl DocError {
    fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        DocError { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for DocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for DocError {}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDocument {
    pub format: String,
    pub category: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub systems: Vec<RawSystem>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub morphisms: Vec<RawMorphism>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub queries: Vec<RawQuery>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSystem {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tower: Option<RawTower>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poset: Option<RawPoset>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTower {
    #[serde(default, skip_serializing_if = "RawBlock::is_empty")]
    pub prefix: RawBlock,
    pub period: RawBlock,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBlock {
    pub objects: Vec<Value>,
    pub bonds: Vec<Value>,
}

impl RawBlock {
    fn is_empty(&self) -> bool {
        self.objects.is_empty() && self.bonds.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPoset {
    pub elements: Vec<String>,
    /// `[smaller, larger]` pairs; the order is their reflexive-transitive closure.
    #[serde(default)]
    pub order: Vec<[String; 2]>,
    pub objects: BTreeMap<String, Value>,
    #[serde(default)]
    pub bonds: Vec<RawBond>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBond {
    pub from: String,
    pub to: String,
    pub map: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMorphism {
    pub name: String,
    pub source: String,
    pub target: String,
    pub components: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawQuery {
    pub property: String,
    pub subject: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub property: Property,
    pub subject: String,
    pub horizon: Option<usize>,
}

/// A parsed, validated document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Workspace {
    pub category: Category,
    pub systems: Vec<(String, InverseSystem)>,
    pub morphisms: Vec<(String, LevelMorphism)>,
    pub queries: Vec<Query>,
}

pub enum SubjectRef<'a> {
    System(&'a InverseSystem),
    Morphism(&'a LevelMorphism),
}

impl Workspace {
    pub fn new(category: Category) -> Self {
        Workspace { category, systems: Vec::new(), morphisms: Vec::new(), queries: Vec::new() }
    }

    pub fn system(&self, name: &str) -> Option<&InverseSystem> {
        self.systems.iter().find(|(n, _)| n == name).map(|(_, x)| x)
    }

    pub fn morphism(&self, name: &str) -> Option<&LevelMorphism> {
        self.morphisms.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn subject(&self, name: &str) -> Option<SubjectRef<'_>> {
        self.morphism(name).map(SubjectRef::Morphism).or_else(|| self.system(name).map(SubjectRef::System))
    }

    pub fn names(&self) -> Vec<&str> {
        self.systems.iter().map(|(n, _)| n.as_str()).chain(self.morphisms.iter().map(|(n, _)| n.as_str())).collect()
    }

    /// Add a morphism with its source and target, naming the systems `X` and `Y` (or
    /// reusing names of systems already present).
    pub fn add_morphism(&mut self, name: &str, f: &LevelMorphism) {
        let mut system_name = |x: &InverseSystem, fallback: &str| -> String {
            if let Some((n, _)) = self.systems.iter().find(|(_, y)| y == x) {
                return n.clone();
            }
            let mut n = fallback.to_string();
            while self.systems.iter().any(|(m, _)| *m == n) {
                n.push('\'');
            }
            self.systems.push((n.clone(), x.clone()));
            n
        };
        system_name(f.source(), "X");
        system_name(f.target(), "Y");
        self.morphisms.push((name.to_string(), f.clone()));
    }
}

pub fn parse_document(text: &str) -> Result<Workspace, DocError> {
    let raw: RawDocument = serde_json::from_str(text)
        .map_err(|e| DocError::at(format!("line {}, column {}", e.line(), e.column()), e.to_string()))?;
    from_raw(&raw)
}

pub fn serialize_document(ws: &Workspace) -> Result<String, DocError> {
    let raw = serde_json::to_value(to_raw(ws)?).expect("documents serialize");
    let mut s = String::new();
    render(&raw, 0, &mut s);
    s.push('\n');
    Ok(s)
}

fn one_line(v: &Value) -> String {
    match v {
        Value::Array(items) => format!("[{}]", items.iter().map(one_line).collect::<Vec<_>>().join(", ")),
        Value::Object(m) => format!(
            "{{ {} }}",
            m.iter()
                .map(|(k, x)| format!("{}: {}", serde_json::to_string(k).unwrap(), one_line(x)))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        _ => v.to_string(),
    }
}

/// Pretty JSON that keeps small values (labels, matrices, label maps) on one line.
fn render(v: &Value, indent: usize, out: &mut String) {
    let compact = one_line(v);
    let nested_objects = match v {
        Value::Object(m) => m.values().any(|x| x.is_object() || x.is_array()),
        Value::Array(items) => items.iter().any(Value::is_object),
        _ => false,
    };
    if !nested_objects && compact.len() + indent <= 96 {
        out.push_str(&compact);
        return;
    }
    let pad = "  ".repeat(indent + 1);
    match v {
        Value::Object(m) => {
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                out.push_str(&pad);
                out.push_str(&serde_json::to_string(k).unwrap());
                out.push_str(": ");
                render(x, indent + 1, out);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad);
                render(x, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        _ => out.push_str(&compact),
    }
}

// ---- objects and maps ----

/// Whether maps are written backwards relative to the category's arrows.
fn reversed(cat: &Category) -> bool {
    let mut c = cat;
    let mut flips = false;
    while let Category::Dual(inner) = c {
        flips = !flips;
        c = inner;
    }
    flips
}

fn parse_group_shorthand(s: &str, path: &str) -> Result<FgAbObject, DocError> {
    let mut orders = Vec::new();
    for term in s.split(['+', '⊕']).map(str::trim) {
        let bad =
            || DocError::at(path, format!("cannot read {:?} as a group; expected terms like Z, Z^3, Z/4, 0", term));
        if term == "0" {
            continue;
        }
        let term = term.strip_prefix('Z').or_else(|| term.strip_prefix('ℤ')).ok_or_else(bad)?;
        if term.is_empty() {
            orders.push(0);
        } else if let Some(n) = term.strip_prefix('^') {
            let n: usize = n.trim().parse().map_err(|_| bad())?;
            orders.extend(std::iter::repeat_n(0, n));
        } else if let Some(k) = term.strip_prefix('/') {
            let k: i64 = k.trim().parse().map_err(|_| bad())?;
            if k <= 0 {
                return Err(bad());
            }
            orders.push(k);
        } else {
            return Err(bad());
        }
    }
    Ok(FgAbObject::from_orders(&orders))
}

/// `Z^2 + Z/4` when the presentation is exactly the one that notation produces.
fn group_shorthand(g: &FgAbObject) -> Option<String> {
    let rel = g.relations();
    let mut orders = Vec::new();
    for i in 0..g.generators() {
        let nonzero: Vec<usize> = (0..rel.cols()).filter(|&c| rel.get(i, c) != &0.into()).collect();
        match nonzero.as_slice() {
            [] => orders.push(0),
            [c] => orders.push(i64::try_from(rel.get(i, *c)).ok().filter(|k| *k > 0)?),
            _ => return None,
        }
    }
    if FgAbObject::from_orders(&orders) != *g {
        return None;
    }
    let mut terms = Vec::new();
    let mut i = 0;
    while i < orders.len() {
        if orders[i] == 0 {
            let run = orders[i..].iter().take_while(|&&k| k == 0).count();
            terms.push(if run == 1 { "Z".to_string() } else { format!("Z^{}", run) });
            i += run;
        } else {
            terms.push(format!("Z/{}", orders[i]));
            i += 1;
        }
    }
    Some(if terms.is_empty() { "0".to_string() } else { terms.join(" + ") })
}

fn int_rows(v: &Value, path: &str, what: &str) -> Result<Vec<Vec<i64>>, DocError> {
    let bad = || DocError::at(path, format!("{} must be a list of integer rows", what));
    v.as_array()
        .ok_or_else(bad)?
        .iter()
        .map(|row| row.as_array().ok_or_else(bad)?.iter().map(|x| x.as_i64().ok_or_else(bad)).collect())
        .collect()
}

fn rows_value(m: &IntMatrix, path: &str) -> Result<Value, DocError> {
    let rows = m.to_i64_rows().ok_or_else(|| DocError::at(path, "matrix entries do not fit in 64 bits"))?;
    Ok(serde_json::to_value(rows).unwrap())
}

fn parse_object(cat: &Category, v: &Value, path: &str) -> Result<Object, DocError> {
    match cat.base() {
        Category::FinSet => {
            let set = match v {
                Value::Number(n) => {
                    let n =
                        n.as_u64().ok_or_else(|| DocError::at(path, "a set size must be a non-negative integer"))?;
                    FinSetObject::range(n as usize)
                }
                Value::Array(items) => {
                    let labels = items
                        .iter()
                        .map(|x| match x {
                            Value::String(s) => Ok(s.clone()),
                            Value::Number(n) => Ok(n.to_string()),
                            _ => Err(DocError::at(path, "set elements must be strings")),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    FinSetObject::new(labels).map_err(|e| DocError::at(path, e.to_string()))?
                }
                _ => return Err(DocError::at(path, "a finite set is a list of element labels")),
            };
            Ok(Object::Set(set))
        }
        Category::FgAb => {
            let g = match v {
                Value::String(s) => parse_group_shorthand(s, path)?,
                Value::Object(m) => {
                    for k in m.keys() {
                        if k != "generators" && k != "relations" {
                            return Err(DocError::at(path, format!("unknown field {:?} in a group presentation", k)));
                        }
                    }
                    let n = m
                        .get("generators")
                        .and_then(Value::as_u64)
                        .ok_or_else(|| DocError::at(path, "a presentation needs a generator count"))?
                        as usize;
                    let rels = match m.get("relations") {
                        Some(r) => int_rows(r, &format!("{}.relations", path), "relations")?,
                        None => Vec::new(),
                    };
                    if let Some(i) = rels.iter().position(|r| r.len() != n) {
                        return Err(DocError::at(
                            format!("{}.relations[{}]", path, i),
                            format!("relation has {} coordinates for {} generators", rels[i].len(), n),
                        ));
                    }
                    let cols = IntMatrix::from_rows_sized(&rels, n)
                        .map_err(|e| DocError::at(path, e.to_string()))?
                        .transpose();
                    FgAbObject::new(n, cols).map_err(|e| DocError::at(path, e.to_string()))?
                }
                _ => return Err(DocError::at(path, "a group is \"Z^a + Z/k + ...\" or a presentation")),
            };
            Ok(Object::Group(g))
        }
        Category::Dual(_) => unreachable!("base is never dual"),
    }
}

fn object_value(o: &Object, path: &str) -> Result<Value, DocError> {
    Ok(match o {
        Object::Set(s) => serde_json::to_value(s.elements()).unwrap(),
        Object::Group(g) => match group_shorthand(g) {
            Some(s) => Value::String(s),
            None => {
                let rels = g.relations().transpose();
                let mut m = Map::new();
                m.insert("generators".into(), g.generators().into());
                m.insert("relations".into(), rows_value(&rels, path)?);
                Value::Object(m)
            }
        },
    })
}

/// A map written in the underlying category, from `src` to `dst` as arrows of `cat`.
fn parse_map(cat: &Category, v: &Value, src: &Object, dst: &Object, path: &str) -> Result<Morphism, DocError> {
    let (from, to) = if reversed(cat) { (dst, src) } else { (src, dst) };
    let m = match (from, to) {
        (Object::Set(a), Object::Set(b)) => {
            let target_of = |x: &Value| -> Result<usize, DocError> {
                let label = match x {
                    Value::String(s) => s.clone(),
                    Value::Number(n) => n.to_string(),
                    _ => return Err(DocError::at(path, "map values must be element labels")),
                };
                b.index_of(&label)
                    .ok_or_else(|| DocError::at(path, format!("{:?} is not an element of the target", label)))
            };
            let table = match v {
                Value::Object(m) => {
                    for k in m.keys() {
                        if a.index_of(k).is_none() {
                            return Err(DocError::at(path, format!("{:?} is not an element of the source", k)));
                        }
                    }
                    a.elements()
                        .iter()
                        .map(|e| {
                            let x = m.get(e).ok_or_else(|| DocError::at(path, format!("no value for {:?}", e)))?;
                            target_of(x)
                        })
                        .collect::<Result<Vec<_>, _>>()?
                }
                Value::Array(items) => {
                    if items.len() != a.len() {
                        return Err(DocError::at(
                            path,
                            format!("{} values for a source with {} elements", items.len(), a.len()),
                        ));
                    }
                    items.iter().map(target_of).collect::<Result<Vec<_>, _>>()?
                }
                _ => return Err(DocError::at(path, "a map of finite sets is an object from labels to labels")),
            };
            Morphism::Set(
                FinSetMorphism::new(a.clone(), b.clone(), table).map_err(|e| DocError::at(path, e.to_string()))?,
            )
        }
        (Object::Group(a), Object::Group(b)) => {
            let rows = int_rows(v, path, "a homomorphism")?;
            if rows.len() != b.generators() {
                return Err(DocError::at(
                    path,
                    format!("{} rows for a target with {} generators", rows.len(), b.generators()),
                ));
            }
            if let Some(i) = rows.iter().position(|r| r.len() != a.generators()) {
                return Err(DocError::at(
                    format!("{}[{}]", path, i),
                    format!("{} entries for a source with {} generators", rows[i].len(), a.generators()),
                ));
            }
            let m = IntMatrix::from_rows_sized(&rows, a.generators()).map_err(|e| DocError::at(path, e.to_string()))?;
            Morphism::Group(FgAbMorphism::new(a.clone(), b.clone(), m).map_err(|e| DocError::at(path, e.to_string()))?)
        }
        _ => return Err(DocError::at(path, "objects of different kinds")),
    };
    Ok(m)
}

fn map_value(m: &Morphism, path: &str) -> Result<Value, DocError> {
    match m {
        Morphism::Set(s) => {
            let mut out = Map::new();
            for (i, e) in s.source().elements().iter().enumerate() {
                out.insert(e.clone(), Value::String(s.target().label(s.apply(i)).to_string()));
            }
            Ok(Value::Object(out))
        }
        Morphism::Group(g) => rows_value(g.matrix(), path),
    }
}

// ---- systems ----

fn parse_tower(cat: &Category, t: &RawTower, path: &str) -> Result<InverseSystem, DocError> {
    for (block, b) in [("prefix", &t.prefix), ("period", &t.period)] {
        if b.objects.len() != b.bonds.len() {
            return Err(DocError::at(
                format!("{}.tower.{}", path, block),
                format!("{} objects but {} bonds", b.objects.len(), b.bonds.len()),
            ));
        }
    }
    let idx = TowerIndex::new(t.prefix.objects.len(), t.period.objects.len())
        .map_err(|e| DocError::at(format!("{}.tower.period", path), e.to_string()))?;
    let located: Vec<(String, &Value)> = t
        .prefix
        .objects
        .iter()
        .enumerate()
        .map(|(i, v)| (format!("{}.tower.prefix.objects[{}]", path, i), v))
        .chain(t.period.objects.iter().enumerate().map(|(i, v)| (format!("{}.tower.period.objects[{}]", path, i), v)))
        .collect();
    let objects = located.iter().map(|(p, v)| parse_object(cat, v, p)).collect::<Result<Vec<_>, _>>()?;
    let bond_paths: Vec<(String, &Value)> = t
        .prefix
        .bonds
        .iter()
        .enumerate()
        .map(|(i, v)| (format!("{}.tower.prefix.bonds[{}]", path, i), v))
        .chain(t.period.bonds.iter().enumerate().map(|(i, v)| (format!("{}.tower.period.bonds[{}]", path, i), v)))
        .collect();
    let steps = bond_paths
        .iter()
        .enumerate()
        .map(|(k, (p, v))| parse_map(cat, v, &objects[idx.slot(k + 1)], &objects[k], p))
        .collect::<Result<Vec<_>, _>>()?;
    InverseSystem::tower(cat.clone(), idx, objects, steps).map_err(|e| DocError::at(path, e.to_string()))
}

fn parse_poset(cat: &Category, p: &RawPoset, path: &str) -> Result<InverseSystem, DocError> {
    let find = |label: &str, at: &str| {
        p.elements
            .iter()
            .position(|e| e == label)
            .ok_or_else(|| DocError::at(at, format!("{:?} is not an element", label)))
    };
    let mut pairs = Vec::new();
    for (i, [a, b]) in p.order.iter().enumerate() {
        let at = format!("{}.poset.order[{}]", path, i);
        pairs.push((find(a, &at)?, find(b, &at)?));
    }
    let index = PosetIndex::from_relations(p.elements.clone(), &pairs)
        .map_err(|v| DocError::at(format!("{}.poset", path), v.message))?;
    for k in p.objects.keys() {
        find(k, &format!("{}.poset.objects", path))?;
    }
    let objects = p
        .elements
        .iter()
        .map(|e| {
            let at = format!("{}.poset.objects.{}", path, e);
            let v = p.objects.get(e).ok_or_else(|| DocError::at(&at, "missing object"))?;
            parse_object(cat, v, &at)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut bonds = BTreeMap::new();
    for (i, b) in p.bonds.iter().enumerate() {
        let at = format!("{}.poset.bonds[{}]", path, i);
        let (hi, lo) = (find(&b.from, &at)?, find(&b.to, &at)?);
        if hi == lo || !index.leq(lo, hi) {
            return Err(DocError::at(&at, format!("{} is not above {}", b.from, b.to)));
        }
        let m = parse_map(cat, &b.map, &objects[hi], &objects[lo], &format!("{}.map", at))?;
        if bonds.insert((hi, lo), m).is_some() {
            return Err(DocError::at(&at, "bond listed twice"));
        }
    }
    InverseSystem::poset(cat.clone(), index, objects, bonds).map_err(|e| DocError::at(path, e.to_string()))
}

fn system_to_raw(name: &str, x: &InverseSystem, path: &str) -> Result<RawSystem, DocError> {
    match x.index() {
        Index::Tower(t) => {
            if !x.poset_bonds().is_empty() {
                return Err(DocError::at(path, "towers with explicit long bonds cannot be written as documents"));
            }
            let block = |range: std::ops::Range<usize>| -> Result<RawBlock, DocError> {
                Ok(RawBlock {
                    objects: range.clone().map(|k| object_value(x.object(k), path)).collect::<Result<_, _>>()?,
                    bonds: range.map(|k| map_value(x.step(k), path)).collect::<Result<_, _>>()?,
                })
            };
            Ok(RawSystem {
                name: name.into(),
                tower: Some(RawTower { prefix: block(0..t.prefix_len)?, period: block(t.prefix_len..t.stored())? }),
                poset: None,
            })
        }
        Index::Poset(p) => {
            let covers = p.covers();
            let order = covers.iter().map(|&(a, b)| [p.label(a).to_string(), p.label(b).to_string()]).collect();
            let objects = (0..p.len())
                .map(|a| Ok((p.label(a).to_string(), object_value(x.object(a), path)?)))
                .collect::<Result<_, DocError>>()?;
            let bonds = covers
                .iter()
                .map(|&(a, b)| {
                    Ok(RawBond {
                        from: p.label(b).to_string(),
                        to: p.label(a).to_string(),
                        map: map_value(&x.poset_bonds()[&(b, a)], path)?,
                    })
                })
                .collect::<Result<_, DocError>>()?;
            Ok(RawSystem {
                name: name.into(),
                tower: None,
                poset: Some(RawPoset { elements: p.labels().to_vec(), order, objects, bonds }),
            })
        }
    }
}

// ---- whole documents ----

pub fn from_raw(raw: &RawDocument) -> Result<Workspace, DocError> {
    if raw.format != DOC_FORMAT {
        return Err(DocError::at("format", format!("unsupported format {:?}; expected {:?}", raw.format, DOC_FORMAT)));
    }
    let category: Category =
        raw.category.parse().map_err(|e: crate::categories::CategoryError| DocError::at("category", e.to_string()))?;
    let mut ws = Workspace::new(category.clone());
    let mut names = BTreeSet::new();
    for (i, s) in raw.systems.iter().enumerate() {
        let path = format!("systems[{}]", i);
        if !names.insert(s.name.clone()) {
            return Err(DocError::at(&path, format!("name {:?} used twice", s.name)));
        }
        let x = match (&s.tower, &s.poset) {
            (Some(t), None) => parse_tower(&category, t, &path)?,
            (None, Some(p)) => parse_poset(&category, p, &path)?,
            _ => return Err(DocError::at(&path, "a system has exactly one of \"tower\" and \"poset\"")),
        };
        x.validate().map_err(|v| DocError::at(&path, v.to_string()))?;
        ws.systems.push((s.name.clone(), x));
    }
    for (i, m) in raw.morphisms.iter().enumerate() {
        let path = format!("morphisms[{}]", i);
        if !names.insert(m.name.clone()) {
            return Err(DocError::at(&path, format!("name {:?} used twice", m.name)));
        }
        let lookup = |n: &str, field: &str| {
            ws.system(n)
                .cloned()
                .ok_or_else(|| DocError::at(format!("{}.{}", path, field), format!("no system named {:?}", n)))
        };
        let (x, y) = (lookup(&m.source, "source")?, lookup(&m.target, "target")?);
        if x.index() != y.index() {
            return Err(DocError::at(&path, "source and target must share an index"));
        }
        let at = |k: String| format!("{}.components{}", path, k);
        let comps = match x.index() {
            Index::Tower(t) => {
                let items = m.components.as_array().ok_or_else(|| {
                    DocError::at(at(String::new()), "tower components are a list, one per stored level")
                })?;
                if items.len() != t.stored() {
                    return Err(DocError::at(
                        at(String::new()),
                        format!("{} components for {} stored levels", items.len(), t.stored()),
                    ));
                }
                items
                    .iter()
                    .enumerate()
                    .map(|(k, v)| parse_map(&category, v, x.object(k), y.object(k), &at(format!("[{}]", k))))
                    .collect::<Result<Vec<_>, _>>()?
            }
            Index::Poset(p) => {
                let items = m
                    .components
                    .as_object()
                    .ok_or_else(|| DocError::at(at(String::new()), "poset components are keyed by element"))?;
                for k in items.keys() {
                    if p.index_of(k).is_none() {
                        return Err(DocError::at(at(format!(".{}", k)), "not an element"));
                    }
                }
                (0..p.len())
                    .map(|a| {
                        let k = p.label(a);
                        let v = items.get(k).ok_or_else(|| DocError::at(at(format!(".{}", k)), "missing component"))?;
                        parse_map(&category, v, x.object(a), y.object(a), &at(format!(".{}", k)))
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
        };
        let tail = match m.tail.as_deref() {
            None | Some("periodic") => Tail::Periodic,
            Some("anchored") => Tail::Anchored,
            Some(other) => {
                return Err(DocError::at(
                    format!("{}.tail", path),
                    format!("unknown tail {:?}; expected periodic or anchored", other),
                ))
            }
        };
        let f = LevelMorphism::new(x, y, comps, tail).map_err(|e| DocError::at(&path, e.to_string()))?;
        f.validate().map_err(|v| DocError::at(&path, v.to_string()))?;
        ws.morphisms.push((m.name.clone(), f));
    }
    for (i, q) in raw.queries.iter().enumerate() {
        let path = format!("queries[{}]", i);
        let property: Property = q
            .property
            .parse()
            .map_err(|e: crate::deciders::UnknownProperty| DocError::at(format!("{}.property", path), e.to_string()))?;
        check_subject(&ws, property, &q.subject).map_err(|m| DocError::at(format!("{}.subject", path), m))?;
        ws.queries.push(Query { property, subject: q.subject.clone(), horizon: q.horizon });
    }
    Ok(ws)
}

/// The subject exists and has the right kind for the property.
pub fn check_subject(ws: &Workspace, property: Property, subject: &str) -> Result<(), String> {
    match (ws.subject(subject), property.is_morphism_property()) {
        (None, _) => Err(format!("no system or morphism named {:?}; known: {}", subject, ws.names().join(", "))),
        (Some(SubjectRef::System(_)), true) => {
            Err(format!("{} is a property of morphisms but {:?} is a system", property, subject))
        }
        (Some(SubjectRef::Morphism(_)), false) => {
            Err(format!("{} is a property of systems but {:?} is a morphism", property, subject))
        }
        _ => Ok(()),
    }
}

pub fn to_raw(ws: &Workspace) -> Result<RawDocument, DocError> {
    let systems = ws
        .systems
        .iter()
        .enumerate()
        .map(|(i, (n, x))| system_to_raw(n, x, &format!("systems[{}]", i)))
        .collect::<Result<_, _>>()?;
    let mut morphisms = Vec::new();
    for (i, (n, f)) in ws.morphisms.iter().enumerate() {
        let path = format!("morphisms[{}]", i);
        let name_of = |x: &InverseSystem| {
            ws.systems
                .iter()
                .find(|(_, y)| y == x)
                .map(|(n, _)| n.clone())
                .ok_or_else(|| DocError::at(&path, "source or target is not a named system"))
        };
        let components = match f.index() {
            Index::Tower(_) => Value::Array(
                (0..f.index().stored())
                    .map(|k| map_value(&f.component(k).unwrap(), &path))
                    .collect::<Result<_, _>>()?,
            ),
            Index::Poset(p) => Value::Object(
                (0..p.len())
                    .map(|a| Ok((p.label(a).to_string(), map_value(&f.component(a).unwrap(), &path)?)))
                    .collect::<Result<_, DocError>>()?,
            ),
        };
        morphisms.push(RawMorphism {
            name: n.clone(),
            source: name_of(f.source())?,
            target: name_of(f.target())?,
            components,
            tail: (f.tail() == Tail::Anchored).then(|| "anchored".to_string()),
        });
    }
    let queries = ws
        .queries
        .iter()
        .map(|q| RawQuery { property: q.property.name().to_string(), subject: q.subject.clone(), horizon: q.horizon })
        .collect();
    Ok(RawDocument { format: DOC_FORMAT.into(), category: ws.category.to_string(), systems, morphisms, queries })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DYADIC: &str = r#"{
      "format": "procat/1",
      "category": "fgab",
      "systems": [
        { "name": "D", "tower": { "period": { "objects": ["Z"], "bonds": [[[2]]] } } },
        { "name": "E", "tower": { "period": { "objects": ["Z + Z/2"], "bonds": [[[2, 0], [0, 1]]] } } }
      ],
      "morphisms": [ { "name": "f", "source": "D", "target": "E", "components": [[[1], [0]]] } ],
      "queries": [ { "property": "mono", "subject": "f", "horizon": 6 } ]
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let ws = parse_document(DYADIC).unwrap();
        assert_eq!(ws.systems.len(), 2);
        assert_eq!(ws.queries[0].property, Property::Mono);
        let text = serialize_document(&ws).unwrap();
        assert_eq!(parse_document(&text).unwrap(), ws);
        assert_eq!(serialize_document(&parse_document(&text).unwrap()).unwrap(), text);
    }

    #[test]
    fn errors_name_the_field() {
        let bad = DYADIC.replace("[[[1], [0]]] } ],", "[[[1, 0], [0]]] } ],");
        let e = parse_document(&bad).unwrap_err();
        assert!(e.path.starts_with("morphisms[0].components[0]"), "{}", e);
        let e = parse_document(&DYADIC.replace("\"mono\"", "\"monic\"")).unwrap_err();
        assert_eq!(e.path, "queries[0].property");
        assert!(e.message.contains("strong-mono"));
        let e = parse_document("{ \"format\": ").unwrap_err();
        assert!(e.path.starts_with("line 1"));
    }

    #[test]
    fn group_shorthand_round_trips() {
        for s in ["0", "Z", "Z^3", "Z/4", "Z^2 + Z/4 + Z + Z/2"] {
            let g = parse_group_shorthand(s, "").unwrap();
            assert_eq!(group_shorthand(&g).as_deref(), Some(s));
        }
        assert!(parse_group_shorthand("Q", "").is_err());
        assert!(parse_group_shorthand("Z/0", "").is_err());
    }

    #[test]
    fn explicit_presentations_survive() {
        let text = r#"{ "format": "procat/1", "category": "fgab", "systems": [
            { "name": "X", "tower": { "period": { "objects": [{ "generators": 2, "relations": [[2, 2]] }], "bonds": [[[1, 0], [0, 1]]] } } } ] }"#;
        let ws = parse_document(text).unwrap();
        let again = parse_document(&serialize_document(&ws).unwrap()).unwrap();
        assert_eq!(again, ws);
    }

    #[test]
    fn finite_sets_posets_and_duals() {
        let text = r#"{ "format": "procat/1", "category": "dual:finset", "systems": [
            { "name": "P", "poset": { "elements": ["a", "b", "top"], "order": [["a", "top"], ["b", "top"]],
              "objects": { "a": ["x"], "b": ["x", "y"], "top": ["x"] },
              "bonds": [ { "from": "top", "to": "a", "map": { "x": "x" } },
                         { "from": "top", "to": "b", "map": { "x": "y", "y": "x" } } ] } } ] }"#;
        // In the dual category the bond top → b is a function b → top, which must be total.
        let e = parse_document(text).unwrap_err();
        assert!(e.message.contains("not an element"), "{}", e);
        let fixed = text.replace(r#"{ "x": "y", "y": "x" }"#, r#"{ "x": "x", "y": "x" }"#);
        let ws = parse_document(&fixed).unwrap();
        assert_eq!(parse_document(&serialize_document(&ws).unwrap()).unwrap(), ws);
    }
}
