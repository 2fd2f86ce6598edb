//! Finite sets and functions.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::CategoryError;

/// A finite set with an ordered list of distinct labels. The order is part of the identity of
/// the object and fixes the enumeration order used for deterministic witnesses.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct FinSetObject {
    elements: Vec<String>,
}

impl TryFrom<Vec<String>> for FinSetObject {
    type Error = CategoryError;
    fn try_from(v: Vec<String>) -> Result<Self, Self::Error> {
        FinSetObject::new(v)
    }
}

impl From<FinSetObject> for Vec<String> {
    fn from(o: FinSetObject) -> Self {
        o.elements
    }
}

impl FinSetObject {
    pub fn new<S: Into<String>>(elements: impl IntoIterator<Item = S>) -> Result<Self, CategoryError> {
        let elements: Vec<String> = elements.into_iter().map(Into::into).collect();
        let distinct: BTreeSet<&String> = elements.iter().collect();
        if distinct.len() != elements.len() {
            return Err(CategoryError::Invalid(format!("duplicate labels in {:?}", elements)));
        }
        Ok(FinSetObject { elements })
    }

    /// `{0, 1, ..., n-1}` with decimal labels.
    pub fn range(n: usize) -> Self {
        FinSetObject { elements: (0..n).map(|i| i.to_string()).collect() }
    }

    pub fn point() -> Self {
        FinSetObject { elements: vec!["*".to_string()] }
    }

    pub fn empty() -> Self {
        FinSetObject { elements: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn label(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == label)
    }

    /// The subset at the given positions, keeping this set's order.
    pub fn subset(&self, positions: &BTreeSet<usize>) -> FinSetObject {
        FinSetObject { elements: positions.iter().map(|&i| self.elements[i].clone()).collect() }
    }
}

/// A function between finite sets, stored as `table[i] = index in target of f(source[i])`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinSetMorphism {
    source: FinSetObject,
    target: FinSetObject,
    table: Vec<usize>,
}

impl FinSetMorphism {
    pub fn new(source: FinSetObject, target: FinSetObject, table: Vec<usize>) -> Result<Self, CategoryError> {
        if table.len() != source.len() {
            return Err(CategoryError::Invalid(format!(
                "table has {} entries for a source of size {}",
                table.len(),
                source.len()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&t| t >= target.len()) {
            return Err(CategoryError::Invalid(format!("table entry {} outside target of size {}", bad, target.len())));
        }
        Ok(FinSetMorphism { source, target, table })
    }

    /// Build from `(source label, target label)` pairs.
    pub fn from_labels(
        source: FinSetObject,
        target: FinSetObject,
        pairs: &[(&str, &str)],
    ) -> Result<Self, CategoryError> {
        let mut table = vec![usize::MAX; source.len()];
        for (a, b) in pairs {
            let i =
                source.index_of(a).ok_or_else(|| CategoryError::Invalid(format!("unknown source label {:?}", a)))?;
            let j =
                target.index_of(b).ok_or_else(|| CategoryError::Invalid(format!("unknown target label {:?}", b)))?;
            if table[i] != usize::MAX && table[i] != j {
                return Err(CategoryError::Invalid(format!("label {:?} mapped twice", a)));
            }
            table[i] = j;
        }
        if let Some(i) = table.iter().position(|&t| t == usize::MAX) {
            return Err(CategoryError::Invalid(format!("label {:?} is not mapped", source.label(i))));
        }
        Self::new(source, target, table)
    }

    pub fn source(&self) -> &FinSetObject {
        &self.source
    }

    pub fn target(&self) -> &FinSetObject {
        &self.target
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, i: usize) -> usize {
        self.table[i]
    }

    pub fn image(&self) -> BTreeSet<usize> {
        self.table.iter().copied().collect()
    }

    pub fn is_injective(&self) -> bool {
        self.image().len() == self.table.len()
    }

    pub fn is_surjective(&self) -> bool {
        self.image().len() == self.target.len()
    }

    /// Same function with a replacement table entry; used to build perturbations.
    pub fn with_entry(&self, i: usize, value: usize) -> Result<Self, CategoryError> {
        let mut table = self.table.clone();
        table[i] = value;
        Self::new(self.source.clone(), self.target.clone(), table)
    }
}

pub fn identity(a: &FinSetObject) -> FinSetMorphism {
    FinSetMorphism { source: a.clone(), target: a.clone(), table: (0..a.len()).collect() }
}

pub fn constant(a: &FinSetObject, b: &FinSetObject, value: usize) -> Result<FinSetMorphism, CategoryError> {
    FinSetMorphism::new(a.clone(), b.clone(), vec![value; a.len()])
}

pub fn compose(g: &FinSetMorphism, f: &FinSetMorphism) -> Result<FinSetMorphism, CategoryError> {
    if f.target != g.source {
        return Err(CategoryError::NotComposable(format!(
            "target {:?} of the first map is not the source {:?} of the second",
            f.target.elements, g.source.elements
        )));
    }
    let table = f.table.iter().map(|&i| g.table[i]).collect();
    Ok(FinSetMorphism { source: f.source.clone(), target: g.target.clone(), table })
}

pub fn equal(f: &FinSetMorphism, g: &FinSetMorphism) -> bool {
    f == g
}

/// `g: C → A` with `f∘g = p`; exists iff `im p ⊆ im f`. Takes the first preimage.
pub fn solve_right_factor(f: &FinSetMorphism, p: &FinSetMorphism) -> Result<Option<FinSetMorphism>, CategoryError> {
    if f.target != p.target {
        return Err(CategoryError::NotComposable("right factor: f and p need a common target".into()));
    }
    let mut table = Vec::with_capacity(p.source.len());
    for &b in &p.table {
        match f.table.iter().position(|&x| x == b) {
            Some(a) => table.push(a),
            None => return Ok(None),
        }
    }
    Ok(Some(FinSetMorphism { source: p.source.clone(), target: f.source.clone(), table }))
}

/// `g: B → C` with `g∘f = p`; exists iff the fibres of `f` are collapsed by `p`. Off the image
/// of `f` the witness takes the first element of `C`.
pub fn solve_left_factor(f: &FinSetMorphism, p: &FinSetMorphism) -> Result<Option<FinSetMorphism>, CategoryError> {
    if f.source != p.source {
        return Err(CategoryError::NotComposable("left factor: f and p need a common source".into()));
    }
    let mut table: Vec<Option<usize>> = vec![None; f.target.len()];
    for (a, &b) in f.table.iter().enumerate() {
        match table[b] {
            Some(c) if c != p.table[a] => return Ok(None),
            _ => table[b] = Some(p.table[a]),
        }
    }
    if table.iter().any(Option::is_none) && p.target.is_empty() {
        return Ok(None);
    }
    let table = table.into_iter().map(|c| c.unwrap_or(0)).collect();
    Ok(Some(FinSetMorphism { source: f.target.clone(), target: p.target.clone(), table }))
}

/// `g: Y_β → X_α` with `f_α∘g = p_Y` and `g∘f_β = p_X`.
pub fn solve_iso_pair(
    f_alpha: &FinSetMorphism,
    f_beta: &FinSetMorphism,
    p_x: &FinSetMorphism,
    p_y: &FinSetMorphism,
) -> Result<Option<FinSetMorphism>, CategoryError> {
    let left = compose(f_alpha, p_x)?;
    let right = compose(p_y, f_beta)?;
    if left != right {
        let x = (0..left.table.len()).find(|&i| left.table[i] != right.table[i]).unwrap_or(0);
        return Err(CategoryError::NonCommuting(format!(
            "f_alpha∘p_X and p_Y∘f_beta differ at {:?}",
            p_x.source.label(x)
        )));
    }
    // g is forced on the image of f_beta by the second equation.
    let mut table: Vec<Option<usize>> = vec![None; f_beta.target.len()];
    for (x, &y) in f_beta.table.iter().enumerate() {
        match table[y] {
            Some(v) if v != p_x.table[x] => return Ok(None),
            _ => table[y] = Some(p_x.table[x]),
        }
    }
    // Elsewhere it must lift p_Y through f_alpha.
    let mut out = Vec::with_capacity(table.len());
    for (y, slot) in table.into_iter().enumerate() {
        match slot {
            Some(v) => out.push(v),
            None => match f_alpha.table.iter().position(|&t| t == p_y.table[y]) {
                Some(v) => out.push(v),
                None => return Ok(None),
            },
        }
    }
    Ok(Some(FinSetMorphism { source: f_beta.target.clone(), target: f_alpha.source.clone(), table: out }))
}

/// `u∘f = v∘f ⟹ u∘p = v∘p` for all `u, v` out of the common target; equivalent to `im p ⊆ im f`.
pub fn cancel_right_after(f: &FinSetMorphism, p: &FinSetMorphism) -> Result<bool, CategoryError> {
    if f.target != p.target {
        return Err(CategoryError::NotComposable("cancel_right_after: f and p need a common target".into()));
    }
    let im = f.image();
    Ok(p.table.iter().all(|b| im.contains(b)))
}

/// `f∘u = f∘v ⟹ p∘u = p∘v` for all `u, v` into the common source; equivalent to the fibres of
/// `f` being collapsed by `p`.
pub fn cancel_left_before(f: &FinSetMorphism, p: &FinSetMorphism) -> Result<bool, CategoryError> {
    if f.source != p.source {
        return Err(CategoryError::NotComposable("cancel_left_before: f and p need a common source".into()));
    }
    let n = f.table.len();
    for x in 0..n {
        for y in x + 1..n {
            if f.table[x] == f.table[y] && p.table[x] != p.table[y] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `f = m∘e` through the image, listed in target order.
pub fn image_factorization(f: &FinSetMorphism) -> (FinSetMorphism, FinSetMorphism) {
    let im = f.image();
    let positions: Vec<usize> = im.iter().copied().collect();
    let obj = f.target.subset(&im);
    let e_table = f.table.iter().map(|b| positions.iter().position(|p| p == b).unwrap()).collect();
    let e = FinSetMorphism { source: f.source.clone(), target: obj.clone(), table: e_table };
    let m = FinSetMorphism { source: obj, target: f.target.clone(), table: positions };
    (e, m)
}

/// All `|B|^|A|` functions, in lexicographic order of tables.
pub fn enumerate_homs(a: &FinSetObject, b: &FinSetObject) -> Vec<FinSetMorphism> {
    let (n, k) = (a.len(), b.len());
    if n == 0 {
        return vec![FinSetMorphism { source: a.clone(), target: b.clone(), table: vec![] }];
    }
    if k == 0 {
        return vec![];
    }
    let mut out = Vec::new();
    let mut table = vec![0usize; n];
    loop {
        out.push(FinSetMorphism { source: a.clone(), target: b.clone(), table: table.clone() });
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            table[i] += 1;
            if table[i] < k {
                break;
            }
            table[i] = 0;
        }
    }
}
