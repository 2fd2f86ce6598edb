//! Base categories: finite sets, finitely generated abelian groups, and formal duals.
//!
//! A morphism of `Dual(C)` from `A` to `B` is stored as the underlying `C`-morphism `B → A`.
//! Every operation on a dual unwraps one level and calls the mirrored operation, so nested
//! duals behave correctly without normalization.

pub mod fgab;
pub mod finset;

use serde::{Deserialize, Serialize};

use crate::zlinalg::ShapeError;
pub use fgab::{FgAbMorphism, FgAbObject};
pub use finset::{FinSetMorphism, FinSetObject};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CategoryError {
    #[error("invalid data: {0}")]
    Invalid(String),
    #[error("not composable: {0}")]
    NotComposable(String),
    #[error("square does not commute: {0}")]
    NonCommuting(String),
    #[error("object or morphism belongs to a different category")]
    Mixed,
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Object {
    Set(FinSetObject),
    Group(FgAbObject),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Morphism {
    Set(FinSetMorphism),
    Group(FgAbMorphism),
}

impl From<FinSetObject> for Object {
    fn from(o: FinSetObject) -> Self {
        Object::Set(o)
    }
}

impl From<FgAbObject> for Object {
    fn from(o: FgAbObject) -> Self {
        Object::Group(o)
    }
}

impl From<FinSetMorphism> for Morphism {
    fn from(m: FinSetMorphism) -> Self {
        Morphism::Set(m)
    }
}

impl From<FgAbMorphism> for Morphism {
    fn from(m: FgAbMorphism) -> Self {
        Morphism::Group(m)
    }
}

impl Object {
    pub fn as_set(&self) -> Option<&FinSetObject> {
        match self {
            Object::Set(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_group(&self) -> Option<&FgAbObject> {
        match self {
            Object::Group(g) => Some(g),
            _ => None,
        }
    }

    /// Short human-readable description: labels for sets, invariant factors for groups.
    pub fn describe(&self) -> String {
        match self {
            Object::Set(s) => format!("{{{}}}", s.elements().join(",")),
            Object::Group(g) => g.invariant_factors().to_string(),
        }
    }
}

impl Morphism {
    pub fn as_set(&self) -> Option<&FinSetMorphism> {
        match self {
            Morphism::Set(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_group(&self) -> Option<&FgAbMorphism> {
        match self {
            Morphism::Group(g) => Some(g),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Morphism::Set(s) => {
                let pairs: Vec<String> = (0..s.source().len())
                    .map(|i| format!("{}->{}", s.source().label(i), s.target().label(s.apply(i))))
                    .collect();
                format!("{{{}}}", pairs.join(", "))
            }
            Morphism::Group(g) => g.matrix().to_string(),
        }
    }
}

/// Enumerated hom-set; `complete` is false when only a bounded part of an infinite hom-set
/// was listed.
#[derive(Clone, Debug)]
pub struct HomSet {
    pub morphisms: Vec<Morphism>,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Category {
    FinSet,
    FgAb,
    Dual(Box<Category>),
}

impl std::fmt::Display for Category {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Category::FinSet => write!(f, "finset"),
            Category::FgAb => write!(f, "fgab"),
            Category::Dual(c) => write!(f, "dual:{}", c),
        }
    }
}

impl std::str::FromStr for Category {
    type Err = CategoryError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "finset" => Ok(Category::FinSet),
            "fgab" => Ok(Category::FgAb),
            _ => match s.strip_prefix("dual:") {
                Some(rest) => Ok(Category::Dual(Box::new(rest.parse()?))),
                None => Err(CategoryError::Invalid(format!(
                    "unknown category {:?}; expected finset, fgab, dual:finset or dual:fgab",
                    s
                ))),
            },
        }
    }
}

use Category::{Dual, FgAb, FinSet};

fn set_obj(o: &Object) -> Result<&FinSetObject, CategoryError> {
    o.as_set().ok_or(CategoryError::Mixed)
}

fn grp_obj(o: &Object) -> Result<&FgAbObject, CategoryError> {
    o.as_group().ok_or(CategoryError::Mixed)
}

fn set_mor(m: &Morphism) -> Result<&FinSetMorphism, CategoryError> {
    m.as_set().ok_or(CategoryError::Mixed)
}

fn grp_mor(m: &Morphism) -> Result<&FgAbMorphism, CategoryError> {
    m.as_group().ok_or(CategoryError::Mixed)
}

fn lift<T: Into<Morphism>>(r: Result<Option<T>, CategoryError>) -> Result<Option<Morphism>, CategoryError> {
    r.map(|o| o.map(Into::into))
}

impl Category {
    /// The formal dual. Dualizing a dual gives back the original instance.
    pub fn dualize(&self) -> Category {
        match self {
            Dual(c) => (**c).clone(),
            c => Dual(Box::new(c.clone())),
        }
    }

    /// Collapse double duals.
    pub fn normalized(&self) -> Category {
        match self {
            Dual(c) => match c.normalized() {
                Dual(inner) => *inner,
                n => Dual(Box::new(n)),
            },
            c => c.clone(),
        }
    }

    /// The concrete category underneath all dual wrappers.
    pub fn base(&self) -> &Category {
        match self {
            Dual(c) => c.base(),
            c => c,
        }
    }

    /// Odd number of dual wrappers.
    pub fn is_dual(&self) -> bool {
        match self {
            Dual(c) => !c.is_dual(),
            _ => false,
        }
    }

    pub fn check_object(&self, o: &Object) -> Result<(), CategoryError> {
        match (self.base(), o) {
            (FinSet, Object::Set(_)) | (FgAb, Object::Group(_)) => Ok(()),
            _ => Err(CategoryError::Mixed),
        }
    }

    pub fn check_morphism(&self, m: &Morphism) -> Result<(), CategoryError> {
        match (self.base(), m) {
            (FinSet, Morphism::Set(_)) | (FgAb, Morphism::Group(_)) => Ok(()),
            _ => Err(CategoryError::Mixed),
        }
    }

    pub fn source(&self, m: &Morphism) -> Object {
        match self {
            Dual(c) => c.target(m),
            _ => match m {
                Morphism::Set(s) => Object::Set(s.source().clone()),
                Morphism::Group(g) => Object::Group(g.source().clone()),
            },
        }
    }

    pub fn target(&self, m: &Morphism) -> Object {
        match self {
            Dual(c) => c.source(m),
            _ => match m {
                Morphism::Set(s) => Object::Set(s.target().clone()),
                Morphism::Group(g) => Object::Group(g.target().clone()),
            },
        }
    }

    pub fn identity(&self, a: &Object) -> Result<Morphism, CategoryError> {
        match self {
            FinSet => Ok(finset::identity(set_obj(a)?).into()),
            FgAb => Ok(fgab::identity(grp_obj(a)?).into()),
            Dual(c) => c.identity(a),
        }
    }

    /// `g ∘ f`.
    pub fn compose(&self, g: &Morphism, f: &Morphism) -> Result<Morphism, CategoryError> {
        match self {
            FinSet => Ok(finset::compose(set_mor(g)?, set_mor(f)?)?.into()),
            FgAb => Ok(fgab::compose(grp_mor(g)?, grp_mor(f)?)?.into()),
            Dual(c) => c.compose(f, g),
        }
    }

    /// Compose a chain listed outermost first: `ms[0] ∘ ms[1] ∘ ...`.
    pub fn compose_all(&self, ms: &[&Morphism]) -> Result<Morphism, CategoryError> {
        let (last, rest) = ms.split_last().ok_or_else(|| CategoryError::Invalid("empty composite".into()))?;
        let mut acc = (*last).clone();
        for m in rest.iter().rev() {
            acc = self.compose(m, &acc)?;
        }
        Ok(acc)
    }

    pub fn equal(&self, f: &Morphism, g: &Morphism) -> bool {
        match (f, g) {
            (Morphism::Set(a), Morphism::Set(b)) => finset::equal(a, b),
            (Morphism::Group(a), Morphism::Group(b)) => fgab::equal(a, b),
            _ => false,
        }
    }

    /// `g` with `f∘g = p`, where `f` and `p` share their target.
    pub fn solve_right_factor(&self, f: &Morphism, p: &Morphism) -> Result<Option<Morphism>, CategoryError> {
        match self {
            FinSet => lift(finset::solve_right_factor(set_mor(f)?, set_mor(p)?)),
            FgAb => lift(fgab::solve_right_factor(grp_mor(f)?, grp_mor(p)?)),
            Dual(c) => c.solve_left_factor(f, p),
        }
    }

    /// `g` with `g∘f = p`, where `f` and `p` share their source.
    pub fn solve_left_factor(&self, f: &Morphism, p: &Morphism) -> Result<Option<Morphism>, CategoryError> {
        match self {
            FinSet => lift(finset::solve_left_factor(set_mor(f)?, set_mor(p)?)),
            FgAb => lift(fgab::solve_left_factor(grp_mor(f)?, grp_mor(p)?)),
            Dual(c) => c.solve_right_factor(f, p),
        }
    }

    /// `g: Y_β → X_α` with `f_α∘g = p_Y` and `g∘f_β = p_X`.
    pub fn solve_iso_pair(
        &self,
        f_alpha: &Morphism,
        f_beta: &Morphism,
        p_x: &Morphism,
        p_y: &Morphism,
    ) -> Result<Option<Morphism>, CategoryError> {
        match self {
            FinSet => lift(finset::solve_iso_pair(set_mor(f_alpha)?, set_mor(f_beta)?, set_mor(p_x)?, set_mor(p_y)?)),
            FgAb => lift(fgab::solve_iso_pair(grp_mor(f_alpha)?, grp_mor(f_beta)?, grp_mor(p_x)?, grp_mor(p_y)?)),
            // Underneath, the roles of the two levels swap.
            Dual(c) => c.solve_iso_pair(f_beta, f_alpha, p_y, p_x),
        }
    }

    /// Whether `u∘f = v∘f` forces `u∘p = v∘p` for all `u, v` out of the common target.
    pub fn cancel_right_after(&self, f: &Morphism, p: &Morphism) -> Result<bool, CategoryError> {
        match self {
            FinSet => finset::cancel_right_after(set_mor(f)?, set_mor(p)?),
            FgAb => fgab::cancel_right_after(grp_mor(f)?, grp_mor(p)?),
            Dual(c) => c.cancel_left_before(f, p),
        }
    }

    /// Whether `f∘u = f∘v` forces `p∘u = p∘v` for all `u, v` into the common source.
    pub fn cancel_left_before(&self, f: &Morphism, p: &Morphism) -> Result<bool, CategoryError> {
        match self {
            FinSet => finset::cancel_left_before(set_mor(f)?, set_mor(p)?),
            FgAb => fgab::cancel_left_before(grp_mor(f)?, grp_mor(p)?),
            Dual(c) => c.cancel_right_after(f, p),
        }
    }

    /// `f = m∘e` with `e` epi and `m` mono.
    pub fn image_factorization(&self, f: &Morphism) -> Result<(Morphism, Morphism), CategoryError> {
        match self {
            FinSet => {
                let (e, m) = finset::image_factorization(set_mor(f)?);
                Ok((e.into(), m.into()))
            }
            FgAb => {
                let (e, m) = fgab::image_factorization(grp_mor(f)?);
                Ok((e.into(), m.into()))
            }
            Dual(c) => {
                let (e, m) = c.image_factorization(f)?;
                Ok((m, e))
            }
        }
    }

    /// `Hom(a, b)`. Complete for finite hom-sets; otherwise matrices with entries bounded by
    /// `bound`.
    pub fn enumerate_homs(&self, a: &Object, b: &Object, bound: u32) -> Result<HomSet, CategoryError> {
        match self {
            FinSet => Ok(HomSet {
                morphisms: finset::enumerate_homs(set_obj(a)?, set_obj(b)?).into_iter().map(Into::into).collect(),
                complete: true,
            }),
            FgAb => {
                let e = fgab::enumerate_homs(grp_obj(a)?, grp_obj(b)?, bound);
                Ok(HomSet { morphisms: e.morphisms.into_iter().map(Into::into).collect(), complete: e.complete })
            }
            Dual(c) => c.enumerate_homs(b, a, bound),
        }
    }

    pub fn is_mono(&self, f: &Morphism) -> Result<bool, CategoryError> {
        match self {
            FinSet => Ok(set_mor(f)?.is_injective()),
            FgAb => Ok(fgab::is_injective(grp_mor(f)?)),
            Dual(c) => c.is_epi(f),
        }
    }

    pub fn is_epi(&self, f: &Morphism) -> Result<bool, CategoryError> {
        match self {
            FinSet => Ok(set_mor(f)?.is_surjective()),
            FgAb => Ok(fgab::is_surjective(grp_mor(f)?)),
            Dual(c) => c.is_mono(f),
        }
    }

    /// Both base categories are balanced, so iso is mono plus epi.
    pub fn is_iso(&self, f: &Morphism) -> Result<bool, CategoryError> {
        Ok(self.is_mono(f)? && self.is_epi(f)?)
    }

    /// The terminal object: a point, the zero group, or (in a dual of sets) the empty set.
    pub fn terminal_object(&self) -> Object {
        match self {
            FinSet => Object::Set(FinSetObject::point()),
            FgAb => Object::Group(FgAbObject::zero()),
            Dual(c) => c.initial_object(),
        }
    }

    pub fn initial_object(&self) -> Object {
        match self {
            FinSet => Object::Set(FinSetObject::empty()),
            FgAb => Object::Group(FgAbObject::zero()),
            Dual(c) => c.terminal_object(),
        }
    }

    /// The unique morphism `a → terminal`.
    pub fn to_terminal(&self, a: &Object) -> Result<Morphism, CategoryError> {
        match self {
            FinSet => Ok(finset::constant(set_obj(a)?, &FinSetObject::point(), 0)?.into()),
            FgAb => Ok(fgab::zero_morphism(grp_obj(a)?, &FgAbObject::zero()).into()),
            Dual(c) => c.from_initial(a),
        }
    }

    /// The unique morphism `initial → a`.
    pub fn from_initial(&self, a: &Object) -> Result<Morphism, CategoryError> {
        match self {
            FinSet => Ok(FinSetMorphism::new(FinSetObject::empty(), set_obj(a)?.clone(), vec![])?.into()),
            FgAb => Ok(fgab::zero_morphism(&FgAbObject::zero(), grp_obj(a)?).into()),
            Dual(c) => c.to_terminal(a),
        }
    }

    /// Rough size of an object, used to bound oracle work.
    pub fn object_size(&self, a: &Object) -> usize {
        match a {
            Object::Set(s) => s.len(),
            Object::Group(g) => g.generators(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zlinalg::IntMatrix;

    fn z() -> FgAbObject {
        FgAbObject::free(1)
    }

    fn gm(a: &FgAbObject, b: &FgAbObject, k: i64) -> Morphism {
        FgAbMorphism::new(a.clone(), b.clone(), IntMatrix::scalar(k)).unwrap().into()
    }

    #[test]
    fn right_factor_examples() {
        let c = Category::FgAb;
        let two = gm(&z(), &z(), 2);
        let id = gm(&z(), &z(), 1);
        assert!(c.solve_right_factor(&two, &id).unwrap().is_none());
        let z2 = FgAbObject::cyclic(2);
        let proj = gm(&z(), &z2, 1);
        let g = c.solve_right_factor(&proj, &proj).unwrap().unwrap();
        assert!(c.equal(&c.compose(&proj, &g).unwrap(), &proj));

        let s = Category::FinSet;
        let a = FinSetObject::new(["a"]).unwrap();
        let xy = FinSetObject::new(["x", "y"]).unwrap();
        let f: Morphism = FinSetMorphism::from_labels(a, xy.clone(), &[("a", "x")]).unwrap().into();
        let p: Morphism = finset::identity(&xy).into();
        assert!(s.solve_right_factor(&f, &p).unwrap().is_none());
    }

    #[test]
    fn left_factor_examples() {
        let c = Category::FgAb;
        let two = gm(&z(), &z(), 2);
        let id = gm(&z(), &z(), 1);
        assert!(c.solve_left_factor(&two, &id).unwrap().is_none());
        let proj = gm(&z(), &FgAbObject::cyclic(2), 1);
        assert!(c.solve_left_factor(&two, &proj).unwrap().is_none());
    }

    #[test]
    fn iso_pair_examples() {
        let c = Category::FgAb;
        let id = gm(&z(), &z(), 1);
        let two = gm(&z(), &z(), 2);
        let g = c.solve_iso_pair(&id, &id, &id, &id).unwrap().unwrap();
        assert!(c.equal(&g, &id));
        assert!(c.solve_iso_pair(&two, &two, &id, &id).unwrap().is_none());
        let g = c.solve_iso_pair(&id, &id, &two, &two).unwrap().unwrap();
        assert!(c.equal(&g, &two));
        let err = c.solve_iso_pair(&id, &id, &two, &id).unwrap_err();
        assert!(matches!(err, CategoryError::NonCommuting(_)));
    }

    #[test]
    fn cancel_examples() {
        let c = Category::FgAb;
        let zero = gm(&z(), &z(), 0);
        let id = gm(&z(), &z(), 1);
        assert!(!c.cancel_right_after(&zero, &id).unwrap());
        let proj = gm(&z(), &FgAbObject::cyclic(2), 1);
        assert!(!c.cancel_left_before(&proj, &id).unwrap());
        assert!(c.cancel_left_before(&id, &proj).unwrap());
    }

    #[test]
    fn image_of_doubling_into_z4() {
        let z4 = FgAbObject::cyclic(4);
        let f = FgAbMorphism::new(z(), z4.clone(), IntMatrix::scalar(2)).unwrap();
        let (e, m) = fgab::image_factorization(&f);
        assert_eq!(e.target().order(), Some(2.into()));
        assert!(fgab::is_surjective(&e));
        assert!(fgab::is_injective(&m));
        assert!(fgab::equal(&fgab::compose(&m, &e).unwrap(), &f));
    }

    #[test]
    fn hom_set_sizes() {
        let c = Category::FgAb;
        let z2: Object = FgAbObject::cyclic(2).into();
        let z4: Object = FgAbObject::cyclic(4).into();
        let zz: Object = z().into();
        let h = c.enumerate_homs(&z2, &zz, 3).unwrap();
        assert!(h.complete);
        assert_eq!(h.morphisms.len(), 1);
        let h = c.enumerate_homs(&z2, &z4, 3).unwrap();
        assert_eq!(h.morphisms.len(), 2);
        let h = c.enumerate_homs(&zz, &zz, 2).unwrap();
        assert!(!h.complete);
        assert_eq!(h.morphisms.len(), 5);
        let s = Category::FinSet;
        let ab: Object = FinSetObject::new(["a", "b"]).unwrap().into();
        let x: Object = FinSetObject::new(["x"]).unwrap().into();
        assert_eq!(s.enumerate_homs(&ab, &x, 0).unwrap().morphisms.len(), 1);
    }

    #[test]
    fn dual_swaps_mono_and_epi() {
        let d = Category::FinSet.dualize();
        let f: Morphism =
            FinSetMorphism::new(FinSetObject::range(3), FinSetObject::range(2), vec![0, 1, 1]).unwrap().into();
        assert!(d.is_mono(&f).unwrap());
        assert!(!d.is_epi(&f).unwrap());
        assert_eq!(d.source(&f), Object::Set(FinSetObject::range(2)));
        let dd = Category::Dual(Box::new(Category::Dual(Box::new(Category::FinSet))));
        assert_eq!(dd.is_mono(&f).unwrap(), Category::FinSet.is_mono(&f).unwrap());
        assert_eq!(dd.normalized(), Category::FinSet);
        assert!(!dd.is_dual());
    }

    #[test]
    fn dual_strong_epi_witness_for_reversed_injection() {
        // In the dual, an injection i: A → B of sets is a morphism B → A; a right factor of it
        // through itself is a left inverse of i underneath.
        let d = Category::FinSet.dualize();
        let i: Morphism =
            FinSetMorphism::new(FinSetObject::range(2), FinSetObject::range(3), vec![0, 2]).unwrap().into();
        let id_a: Morphism = finset::identity(&FinSetObject::range(2)).into();
        let g = d.solve_right_factor(&i, &id_a).unwrap().unwrap();
        assert!(d.equal(&d.compose(&i, &g).unwrap(), &id_a));
    }

    #[test]
    fn category_names_round_trip() {
        for name in ["finset", "fgab", "dual:finset", "dual:fgab"] {
            let c: Category = name.parse().unwrap();
            assert_eq!(c.to_string(), name);
        }
        assert!("groups".parse::<Category>().is_err());
    }
}
