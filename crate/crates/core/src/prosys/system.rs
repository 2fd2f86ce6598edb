use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Index, PosetIndex, ProError, TowerIndex, Violation, ViolationKind};
use crate::categories::{Category, Morphism, Object};

/// Serialize `(usize, usize)`-keyed maps as lists, since JSON keys must be strings.
mod pair_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        from: usize,
        to: usize,
        map: Morphism,
    }

    pub fn serialize<S: Serializer>(m: &BTreeMap<(usize, usize), Morphism>, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<Entry> = m.iter().map(|(&(from, to), map)| Entry { from, to, map: map.clone() }).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<(usize, usize), Morphism>, D::Error> {
        let v: Vec<Entry> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|e| ((e.from, e.to), e.map)).collect())
    }
}

/// An inverse system over a tower or a finite directed poset.
///
/// Towers store objects and consecutive bonds `X_{n+1} → X_n` for the first
/// `prefix_len + tail_period` levels; longer bonds are composites. Posets store every bond
/// `p^β_α` with `α < β`, keyed `(β, α)`. A tower may also carry explicit long bonds, which
/// override the composite and are checked by [`InverseSystem::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InverseSystem {
    category: Category,
    index: Index,
    objects: Vec<Object>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    steps: Vec<Morphism>,
    #[serde(default, with = "pair_map", skip_serializing_if = "BTreeMap::is_empty")]
    bonds: BTreeMap<(usize, usize), Morphism>,
}

impl InverseSystem {
    pub fn tower(
        category: Category,
        index: TowerIndex,
        objects: Vec<Object>,
        steps: Vec<Morphism>,
    ) -> Result<Self, ProError> {
        if objects.len() != index.stored() || steps.len() != index.stored() {
            return Err(ProError::Invalid(format!(
                "tower with prefix {} and period {} needs {} objects and bonds, got {} and {}",
                index.prefix_len,
                index.tail_period,
                index.stored(),
                objects.len(),
                steps.len()
            )));
        }
        for o in &objects {
            category.check_object(o)?;
        }
        let sys = InverseSystem { category, index: Index::Tower(index), objects, steps, bonds: BTreeMap::new() };
        for n in 0..index.stored() {
            sys.check_endpoints(sys.step(n), n + 1, n)?;
        }
        Ok(sys)
    }

    /// Bonds keyed `(β, α)`; pairs not listed are filled in by composing listed ones.
    pub fn poset(
        category: Category,
        index: PosetIndex,
        objects: Vec<Object>,
        mut bonds: BTreeMap<(usize, usize), Morphism>,
    ) -> Result<Self, ProError> {
        let n = index.len();
        if objects.len() != n {
            return Err(ProError::Invalid(format!(
                "poset with {} elements needs {} objects, got {}",
                n,
                n,
                objects.len()
            )));
        }
        for o in &objects {
            category.check_object(o)?;
        }
        for &(b, a) in bonds.keys() {
            if a >= n || b >= n || a == b || !index.leq(a, b) {
                return Err(ProError::Invalid(format!("bond ({}, {}) does not go down the order", b, a)));
            }
        }
        // Fill missing pairs through intermediate elements, shortest intervals first.
        let order = index.linear_extension();
        for &b in &order {
            for &a in order.iter().rev() {
                if a == b || !index.leq(a, b) || bonds.contains_key(&(b, a)) {
                    continue;
                }
                let mid =
                    (0..n).find(|&c| c != a && c != b && bonds.contains_key(&(b, c)) && bonds.contains_key(&(c, a)));
                match mid {
                    Some(c) => {
                        let m = category.compose(&bonds[&(c, a)], &bonds[&(b, c)])?;
                        bonds.insert((b, a), m);
                    }
                    None => {
                        return Err(ProError::Invalid(format!(
                            "no bond from {} to {} and no way to compose one",
                            index.label(b),
                            index.label(a)
                        )))
                    }
                }
            }
        }
        let sys = InverseSystem { category, index: Index::Poset(index), objects, steps: Vec::new(), bonds };
        for (&(b, a), m) in &sys.bonds {
            sys.check_endpoints(m, b, a)?;
        }
        Ok(sys)
    }

    /// The object as a tower with identity bonds.
    pub fn constant(category: Category, object: Object) -> Result<Self, ProError> {
        let id = category.identity(&object)?;
        Self::tower(category, TowerIndex::new(0, 1)?, vec![object], vec![id])
    }

    /// Tower `X ← X ← ...` with every bond `endo`.
    pub fn periodic(category: Category, object: Object, endo: Morphism) -> Result<Self, ProError> {
        Self::tower(category, TowerIndex::new(0, 1)?, vec![object], vec![endo])
    }

    /// Replace the bond `p^β_α` of a tower by an explicit morphism. Used to build broken
    /// systems for validation tests.
    pub fn with_explicit_bond(mut self, beta: usize, alpha: usize, m: Morphism) -> Result<Self, ProError> {
        self.check_endpoints(&m, beta, alpha)?;
        self.bonds.insert((beta, alpha), m);
        Ok(self)
    }

    fn check_endpoints(&self, m: &Morphism, beta: usize, alpha: usize) -> Result<(), ProError> {
        self.category.check_morphism(m)?;
        if self.category.source(m) != *self.object(beta) || self.category.target(m) != *self.object(alpha) {
            return Err(ProError::Invalid(format!(
                "bond {} -> {} has the wrong source or target",
                self.index.label(beta),
                self.index.label(alpha)
            )));
        }
        Ok(())
    }

    pub fn category(&self) -> &Category {
        &self.category
    }

    pub fn index(&self) -> &Index {
        &self.index
    }

    pub fn tower_index(&self) -> Option<TowerIndex> {
        self.index.as_tower().copied()
    }

    pub fn poset_index(&self) -> Option<&PosetIndex> {
        self.index.as_poset()
    }

    pub fn is_tower(&self) -> bool {
        self.tower_index().is_some()
    }

    pub fn objects(&self) -> &[Object] {
        &self.objects
    }

    pub fn object(&self, a: usize) -> &Object {
        match &self.index {
            Index::Tower(t) => &self.objects[t.slot(a)],
            Index::Poset(_) => &self.objects[a],
        }
    }

    /// Tower bond `X_{n+1} → X_n`.
    pub fn step(&self, n: usize) -> &Morphism {
        let t = self.tower_index().expect("step() on a tower");
        &self.steps[t.slot(n)]
    }

    pub fn steps(&self) -> &[Morphism] {
        &self.steps
    }

    pub fn poset_bonds(&self) -> &BTreeMap<(usize, usize), Morphism> {
        &self.bonds
    }

    /// `p^β_α: X_β → X_α`, for `α <= β`.
    pub fn bond(&self, beta: usize, alpha: usize) -> Result<Morphism, ProError> {
        if !self.index.leq(alpha, beta) {
            return Err(ProError::Invalid(format!(
                "no bond from {} to {}",
                self.index.label(beta),
                self.index.label(alpha)
            )));
        }
        if alpha == beta {
            return Ok(self.category.identity(self.object(alpha))?);
        }
        if let Some(m) = self.bonds.get(&(beta, alpha)) {
            return Ok(m.clone());
        }
        let mut acc = self.step(beta - 1).clone();
        for n in (alpha..beta - 1).rev() {
            acc = self.category.compose(self.step(n), &acc)?;
        }
        Ok(acc)
    }

    /// The bond `p^{n+P}_n` across one tail period, as an endomorphism of `X_n`.
    pub fn period_bond(&self, n: usize) -> Result<Morphism, ProError> {
        let t = self.tower_index().ok_or_else(|| ProError::Unsupported("period bond of a poset system".into()))?;
        self.bond(n + t.tail_period, n)
    }

    pub fn default_horizon(&self) -> usize {
        self.index.default_horizon()
    }

    /// Check objects, bonds and functoriality. Towers check explicit long bonds against
    /// composites; posets check every triple.
    pub fn validate(&self) -> Result<(), Violation> {
        let cat = &self.category;
        let shape = |message: String| Violation { kind: ViolationKind::Shape, message, triple: None };
        for o in &self.objects {
            cat.check_object(o).map_err(|e| shape(e.to_string()))?;
        }
        match &self.index {
            Index::Tower(t) => {
                for n in 0..t.stored() {
                    self.check_endpoints(self.step(n), n + 1, n).map_err(|e| shape(e.to_string()))?;
                }
                for (&(b, a), m) in &self.bonds {
                    let mut composite = self.step(b - 1).clone();
                    for n in (a..b - 1).rev() {
                        composite = cat.compose(self.step(n), &composite).map_err(|e| shape(e.to_string()))?;
                    }
                    if !cat.equal(m, &composite) {
                        return Err(Violation {
                            kind: ViolationKind::Functoriality,
                            message: format!("bond({}, {}) differs from the composite through {}", b, a, b - 1),
                            triple: Some([a, b - 1, b]),
                        });
                    }
                }
            }
            Index::Poset(p) => {
                PosetIndex::new(p.labels().to_vec(), p.leq_matrix().to_vec())?;
                let n = p.len();
                for a in 0..n {
                    for b in 0..n {
                        if a == b || !p.leq(a, b) {
                            continue;
                        }
                        let m = self.bonds.get(&(b, a)).ok_or_else(|| shape(format!("missing bond ({}, {})", b, a)))?;
                        self.check_endpoints(m, b, a).map_err(|e| shape(e.to_string()))?;
                        for c in 0..n {
                            if c == b || !p.leq(b, c) {
                                continue;
                            }
                            let direct = &self.bonds[&(c, a)];
                            let via = cat.compose(m, &self.bonds[&(c, b)]).map_err(|e| shape(e.to_string()))?;
                            if !cat.equal(direct, &via) {
                                return Err(Violation {
                                    kind: ViolationKind::Functoriality,
                                    message: format!(
                                        "bond {} -> {} differs from the composite through {}",
                                        p.label(c),
                                        p.label(a),
                                        p.label(b)
                                    ),
                                    triple: Some([a, b, c]),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The same tower stored with a longer prefix and a multiple of the period.
    pub fn reperiod(&self, prefix_len: usize, tail_period: usize) -> Result<Self, ProError> {
        let t = self.tower_index().ok_or_else(|| ProError::Unsupported("reperiod of a poset system".into()))?;
        if prefix_len < t.prefix_len || !tail_period.is_multiple_of(t.tail_period) {
            return Err(ProError::Invalid(format!(
                "cannot restore a tower with prefix {} and period {} as prefix {} and period {}",
                t.prefix_len, t.tail_period, prefix_len, tail_period
            )));
        }
        let idx = TowerIndex::new(prefix_len, tail_period)?;
        let objects = (0..idx.stored()).map(|n| self.object(n).clone()).collect();
        let steps = (0..idx.stored()).map(|n| self.step(n).clone()).collect();
        Self::tower(self.category.clone(), idx, objects, steps)
    }

    /// The tail `n ↦ X_{n+d}`.
    pub fn shifted(&self, d: usize) -> Result<Self, ProError> {
        let t = self.tower_index().ok_or_else(|| ProError::Unsupported("shift of a poset system".into()))?;
        let idx = TowerIndex::new(t.prefix_len.saturating_sub(d), t.tail_period)?;
        let objects = (0..idx.stored()).map(|n| self.object(n + d).clone()).collect();
        let steps = (0..idx.stored()).map(|n| self.step(n + d).clone()).collect();
        Self::tower(self.category.clone(), idx, objects, steps)
    }

    /// Apply a functor given on objects and morphisms.
    pub fn map(
        &self,
        category: Category,
        on_object: impl Fn(&Object) -> Result<Object, ProError>,
        on_bond: impl Fn(&Morphism, &Object, &Object) -> Result<Morphism, ProError>,
    ) -> Result<Self, ProError> {
        let objects: Vec<Object> = self.objects.iter().map(&on_object).collect::<Result<_, _>>()?;
        let image = |a: usize| -> &Object {
            match &self.index {
                Index::Tower(t) => &objects[t.slot(a)],
                Index::Poset(_) => &objects[a],
            }
        };
        match &self.index {
            Index::Tower(t) => {
                let steps =
                    (0..t.stored()).map(|n| on_bond(self.step(n), image(n + 1), image(n))).collect::<Result<_, _>>()?;
                Self::tower(category, *t, objects.clone(), steps)
            }
            Index::Poset(p) => {
                let mut bonds = BTreeMap::new();
                for (&(b, a), m) in &self.bonds {
                    bonds.insert((b, a), on_bond(m, image(b), image(a))?);
                }
                Self::poset(category, p.clone(), objects.clone(), bonds)
            }
        }
    }
}
