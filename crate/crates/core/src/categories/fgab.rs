//! Finitely generated abelian groups, given by presentations `ℤ^n / im(R)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::CategoryError;
use crate::zlinalg::{
    is_in_lattice, kernel_generators, lattice_basis, lattice_contains, smith_normal_form, solve_matrix_equation,
    IntMatrix, InvariantFactors,
};

/// `ℤ^generators / (column lattice of relations)`. Invariant factors are computed once at
/// construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PresentationRepr", into = "PresentationRepr")]
pub struct FgAbObject {
    generators: usize,
    relations: IntMatrix,
    factors: InvariantFactors,
}

#[derive(Serialize, Deserialize)]
struct PresentationRepr {
    generators: usize,
    relations: IntMatrix,
}

impl TryFrom<PresentationRepr> for FgAbObject {
    type Error = CategoryError;
    fn try_from(r: PresentationRepr) -> Result<Self, Self::Error> {
        FgAbObject::new(r.generators, r.relations)
    }
}

impl From<FgAbObject> for PresentationRepr {
    fn from(o: FgAbObject) -> Self {
        PresentationRepr { generators: o.generators, relations: o.relations }
    }
}

impl FgAbObject {
    pub fn new(generators: usize, relations: IntMatrix) -> Result<Self, CategoryError> {
        if relations.rows() != generators {
            return Err(CategoryError::Invalid(format!(
                "relation matrix has {} rows for {} generators",
                relations.rows(),
                generators
            )));
        }
        let factors = InvariantFactors::of_presentation(&relations);
        Ok(FgAbObject { generators, relations, factors })
    }

    /// `ℤ^n`.
    pub fn free(n: usize) -> Self {
        Self::new(n, IntMatrix::zeros(n, 0)).unwrap()
    }

    pub fn zero() -> Self {
        Self::free(0)
    }

    /// `ℤ/k`, with `k = 0` meaning `ℤ`.
    pub fn cyclic(k: i64) -> Self {
        if k == 0 {
            return Self::free(1);
        }
        Self::new(1, IntMatrix::scalar(k)).unwrap()
    }

    /// `ℤ/k1 ⊕ ℤ/k2 ⊕ ...`, one generator per summand, `0` meaning `ℤ`.
    pub fn from_orders(orders: &[i64]) -> Self {
        let cols: Vec<usize> = (0..orders.len()).filter(|&i| orders[i] != 0).collect();
        let mut rel = IntMatrix::zeros(orders.len(), cols.len());
        for (c, &i) in cols.iter().enumerate() {
            rel.set(i, c, BigInt::from(orders[i]));
        }
        Self::new(orders.len(), rel).unwrap()
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn invariant_factors(&self) -> &InvariantFactors {
        &self.factors
    }

    pub fn order(&self) -> Option<BigInt> {
        self.factors.order()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_trivial()
    }

    pub fn is_finite(&self) -> bool {
        self.factors.free_rank() == 0
    }

    pub fn direct_sum(&self, other: &FgAbObject) -> FgAbObject {
        Self::new(self.generators + other.generators, self.relations.block_diag(&other.relations)).unwrap()
    }

    /// Elements as coordinate vectors, when the group is finite: one representative per class,
    /// enumerated in Smith coordinates and mapped back.
    pub fn elements(&self) -> Option<Vec<IntMatrix>> {
        if !self.is_finite() {
            return None;
        }
        let snf = smith_normal_form(&self.relations);
        let u_inv = unimodular_inverse(&snf.u);
        let diag = snf.diagonal();
        let orders: Vec<BigInt> = (0..self.generators).map(|i| diag.get(i).cloned().unwrap_or_default()).collect();
        let mut out = Vec::new();
        let mut coord = vec![BigInt::zero(); self.generators];
        loop {
            out.push(u_inv.mul(&IntMatrix::column_vector(&coord)).unwrap());
            let mut i = self.generators;
            loop {
                if i == 0 {
                    return Some(out);
                }
                i -= 1;
                coord[i] += 1;
                if coord[i] < orders[i] {
                    break;
                }
                coord[i] = BigInt::zero();
            }
        }
    }
}

/// Homomorphism given by an integer matrix of shape `target.generators x source.generators`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FgAbMorphism {
    source: FgAbObject,
    target: FgAbObject,
    matrix: IntMatrix,
}

impl FgAbMorphism {
    /// Rejects matrices that do not send source relations into the target relation lattice.
    pub fn new(source: FgAbObject, target: FgAbObject, matrix: IntMatrix) -> Result<Self, CategoryError> {
        if matrix.shape() != (target.generators, source.generators) {
            return Err(CategoryError::Invalid(format!(
                "matrix is {}x{} but the map needs {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.generators,
                source.generators
            )));
        }
        let image = matrix.mul(&source.relations)?;
        if !is_in_lattice(&image, &target.relations)? {
            return Err(CategoryError::Invalid(format!(
                "matrix {} does not send source relations into the target relation lattice",
                matrix
            )));
        }
        Ok(FgAbMorphism { source, target, matrix })
    }

    pub(crate) fn new_unchecked(source: FgAbObject, target: FgAbObject, matrix: IntMatrix) -> Self {
        FgAbMorphism { source, target, matrix }
    }

    /// Multiplication by `k` on a cyclic or free group presented on one generator.
    pub fn scalar(obj: &FgAbObject, k: i64) -> Result<Self, CategoryError> {
        let n = obj.generators;
        Self::new(obj.clone(), obj.clone(), IntMatrix::identity(n).scale(&BigInt::from(k)))
    }

    pub fn source(&self) -> &FgAbObject {
        &self.source
    }

    pub fn target(&self) -> &FgAbObject {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &IntMatrix) -> IntMatrix {
        self.matrix.mul(x).expect("element shape")
    }
}

pub fn identity(a: &FgAbObject) -> FgAbMorphism {
    FgAbMorphism::new_unchecked(a.clone(), a.clone(), IntMatrix::identity(a.generators))
}

pub fn zero_morphism(a: &FgAbObject, b: &FgAbObject) -> FgAbMorphism {
    FgAbMorphism::new_unchecked(a.clone(), b.clone(), IntMatrix::zeros(b.generators, a.generators))
}

pub fn compose(g: &FgAbMorphism, f: &FgAbMorphism) -> Result<FgAbMorphism, CategoryError> {
    if f.target != g.source {
        return Err(CategoryError::NotComposable(
            "FgAb: target of the first map differs from source of the second".into(),
        ));
    }
    Ok(FgAbMorphism::new_unchecked(f.source.clone(), g.target.clone(), g.matrix.mul(&f.matrix)?))
}

/// Same hom-set and the difference lies in the target relation lattice.
pub fn equal(f: &FgAbMorphism, g: &FgAbMorphism) -> bool {
    if f.source != g.source || f.target != g.target {
        return false;
    }
    let diff = f.matrix.sub(&g.matrix).expect("same shape");
    is_in_lattice(&diff, &g.target.relations).expect("same rows")
}

/// `I_k ⊗ R`: the lattice of `rows(R) x k` matrices whose columns lie in `im R`.
fn column_relations(r: &IntMatrix, k: usize) -> IntMatrix {
    IntMatrix::identity(k).kron(r)
}

/// Linear constraints making an unknown `G: C → A` (as `vec G`) well defined.
fn well_defined_constraint(c: &FgAbObject, a: &FgAbObject) -> (IntMatrix, IntMatrix) {
    let lhs = c.relations.transpose().kron(&IntMatrix::identity(a.generators));
    let rel = column_relations(&a.relations, c.relations.cols());
    (lhs, rel)
}

struct System {
    lhs: IntMatrix,
    rhs: IntMatrix,
    rel: IntMatrix,
}

impl System {
    fn new(unknowns: usize) -> Self {
        System { lhs: IntMatrix::zeros(0, unknowns), rhs: IntMatrix::zeros(0, 1), rel: IntMatrix::zeros(0, 0) }
    }

    fn push(&mut self, lhs: IntMatrix, rhs: IntMatrix, rel: IntMatrix) {
        self.lhs = self.lhs.vstack(&lhs).unwrap();
        self.rhs = self.rhs.vstack(&rhs).unwrap();
        self.rel = self.rel.block_diag(&rel);
    }

    fn solve(&self) -> Result<Option<IntMatrix>, CategoryError> {
        Ok(solve_matrix_equation(&self.lhs, &self.rhs, &self.rel)?)
    }
}

/// `g: C → A` with `f∘g = p`.
pub fn solve_right_factor(f: &FgAbMorphism, p: &FgAbMorphism) -> Result<Option<FgAbMorphism>, CategoryError> {
    if f.target != p.target {
        return Err(CategoryError::NotComposable("right factor: f and p need a common target".into()));
    }
    let (a, b, c) = (&f.source, &f.target, &p.source);
    let mut sys = System::new(a.generators * c.generators);
    sys.push(
        IntMatrix::identity(c.generators).kron(&f.matrix),
        p.matrix.vectorize(),
        column_relations(&b.relations, c.generators),
    );
    let (wl, wr) = well_defined_constraint(c, a);
    let zeros = IntMatrix::zeros(wl.rows(), 1);
    sys.push(wl, zeros, wr);
    Ok(sys.solve()?.map(|v| {
        let g = IntMatrix::unvectorize(v.entries(), a.generators, c.generators);
        FgAbMorphism::new_unchecked(c.clone(), a.clone(), g)
    }))
}

/// `g: B → C` with `g∘f = p`.
pub fn solve_left_factor(f: &FgAbMorphism, p: &FgAbMorphism) -> Result<Option<FgAbMorphism>, CategoryError> {
    if f.source != p.source {
        return Err(CategoryError::NotComposable("left factor: f and p need a common source".into()));
    }
    let (a, b, c) = (&f.source, &f.target, &p.target);
    let mut sys = System::new(c.generators * b.generators);
    sys.push(
        f.matrix.transpose().kron(&IntMatrix::identity(c.generators)),
        p.matrix.vectorize(),
        column_relations(&c.relations, a.generators),
    );
    let (wl, wr) = well_defined_constraint(b, c);
    let zeros = IntMatrix::zeros(wl.rows(), 1);
    sys.push(wl, zeros, wr);
    Ok(sys.solve()?.map(|v| {
        let g = IntMatrix::unvectorize(v.entries(), c.generators, b.generators);
        FgAbMorphism::new_unchecked(b.clone(), c.clone(), g)
    }))
}

/// `g: Y_β → X_α` with `f_α∘g = p_Y` and `g∘f_β = p_X`, as one stacked system.
pub fn solve_iso_pair(
    f_alpha: &FgAbMorphism,
    f_beta: &FgAbMorphism,
    p_x: &FgAbMorphism,
    p_y: &FgAbMorphism,
) -> Result<Option<FgAbMorphism>, CategoryError> {
    let left = compose(f_alpha, p_x)?;
    let right = compose(p_y, f_beta)?;
    if !equal(&left, &right) {
        return Err(CategoryError::NonCommuting(format!(
            "f_alpha∘p_X = {} but p_Y∘f_beta = {}",
            left.matrix, right.matrix
        )));
    }
    let (xa, ya, xb, yb) = (&f_alpha.source, &f_alpha.target, &f_beta.source, &f_beta.target);
    let mut sys = System::new(xa.generators * yb.generators);
    sys.push(
        IntMatrix::identity(yb.generators).kron(&f_alpha.matrix),
        p_y.matrix.vectorize(),
        column_relations(&ya.relations, yb.generators),
    );
    sys.push(
        f_beta.matrix.transpose().kron(&IntMatrix::identity(xa.generators)),
        p_x.matrix.vectorize(),
        column_relations(&xa.relations, xb.generators),
    );
    let (wl, wr) = well_defined_constraint(yb, xa);
    let zeros = IntMatrix::zeros(wl.rows(), 1);
    sys.push(wl, zeros, wr);
    Ok(sys.solve()?.map(|v| {
        let g = IntMatrix::unvectorize(v.entries(), xa.generators, yb.generators);
        FgAbMorphism::new_unchecked(yb.clone(), xa.clone(), g)
    }))
}

/// `im p ⊆ im f` in the common target.
pub fn cancel_right_after(f: &FgAbMorphism, p: &FgAbMorphism) -> Result<bool, CategoryError> {
    if f.target != p.target {
        return Err(CategoryError::NotComposable("cancel_right_after: f and p need a common target".into()));
    }
    Ok(lattice_contains(&p.matrix, &f.matrix, &f.target.relations)?)
}

/// Generators of `ker f`, as columns in source coordinates.
pub fn kernel(f: &FgAbMorphism) -> IntMatrix {
    kernel_generators(&f.matrix, &f.target.relations).expect("morphism shapes are consistent")
}

/// `ker f ⊆ ker p`.
pub fn cancel_left_before(f: &FgAbMorphism, p: &FgAbMorphism) -> Result<bool, CategoryError> {
    if f.source != p.source {
        return Err(CategoryError::NotComposable("cancel_left_before: f and p need a common source".into()));
    }
    let k = kernel(f);
    Ok(is_in_lattice(&p.matrix.mul(&k)?, &p.target.relations)?)
}

pub fn is_injective(f: &FgAbMorphism) -> bool {
    is_in_lattice(&kernel(f), &f.source.relations).expect("shapes")
}

pub fn is_surjective(f: &FgAbMorphism) -> bool {
    let id = IntMatrix::identity(f.target.generators);
    lattice_contains(&id, &f.matrix, &f.target.relations).expect("shapes")
}

/// `f = m∘e` with the image presented on the source generators modulo `ker f`.
pub fn image_factorization(f: &FgAbMorphism) -> (FgAbMorphism, FgAbMorphism) {
    let k = kernel(f);
    let n = f.source.generators;
    let image = FgAbObject::new(n, lattice_basis(&k)).expect("kernel has n rows");
    let e = FgAbMorphism::new_unchecked(f.source.clone(), image.clone(), IntMatrix::identity(n));
    let m = FgAbMorphism::new_unchecked(image, f.target.clone(), f.matrix.clone());
    (e, m)
}

/// Inverse of a unimodular matrix.
pub fn unimodular_inverse(u: &IntMatrix) -> IntMatrix {
    let n = u.rows();
    solve_matrix_equation(u, &IntMatrix::identity(n), &IntMatrix::zeros(n, 0))
        .expect("square")
        .expect("unimodular matrices are invertible over the integers")
}

/// Result of enumerating a hom-set.
#[derive(Clone, Debug)]
pub struct HomEnumeration {
    pub morphisms: Vec<FgAbMorphism>,
    /// `false` when `Hom(A, B)` is infinite and only bounded matrices were listed.
    pub complete: bool,
}

/// All homomorphisms when `Hom(A, B)` is finite; otherwise every well-defined matrix with
/// entries in `[-bound, bound]`, up to equality, flagged incomplete.
pub fn enumerate_homs(a: &FgAbObject, b: &FgAbObject, bound: u32) -> HomEnumeration {
    let sa = smith_normal_form(&a.relations);
    let sb = smith_normal_form(&b.relations);
    let order = |diag: &[BigInt], i: usize| diag.get(i).cloned().unwrap_or_default();
    let (da, db) = (sa.diagonal(), sb.diagonal());
    let infinite =
        (0..a.generators).any(|j| order(&da, j).is_zero()) && (0..b.generators).any(|i| order(&db, i).is_zero());
    if infinite {
        return bounded_homs(a, b, bound);
    }
    // In Smith coordinates the hom-set is a product of Hom(Z/a_j, Z/b_i).
    let mut choices: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..b.generators {
        for j in 0..a.generators {
            let (aj, bi) = (order(&da, j), order(&db, i));
            let options = if bi.is_one() || aj.is_one() || (!aj.is_zero() && bi.is_zero()) {
                vec![BigInt::zero()]
            } else if aj.is_zero() {
                (0..u64::try_from(&bi).expect("small modulus")).map(BigInt::from).collect()
            } else {
                let g = aj.gcd(&bi);
                let step = &bi / &g;
                let mut v = Vec::new();
                let mut k = BigInt::zero();
                while k < g {
                    v.push(&k * &step);
                    k += 1;
                }
                v
            };
            choices.push(options);
        }
    }
    let u_b_inv = unimodular_inverse(&sb.u);
    let mut out = Vec::new();
    let mut pick = vec![0usize; choices.len()];
    loop {
        let mut mp = IntMatrix::zeros(b.generators, a.generators);
        for i in 0..b.generators {
            for j in 0..a.generators {
                let k = i * a.generators + j;
                mp.set(i, j, choices[k][pick[k]].clone());
            }
        }
        let m = u_b_inv.mul(&mp).unwrap().mul(&sa.u).unwrap();
        out.push(FgAbMorphism::new_unchecked(a.clone(), b.clone(), m));
        let mut k = choices.len();
        loop {
            if k == 0 {
                return HomEnumeration { morphisms: out, complete: true };
            }
            k -= 1;
            pick[k] += 1;
            if pick[k] < choices[k].len() {
                break;
            }
            pick[k] = 0;
        }
    }
}

fn bounded_homs(a: &FgAbObject, b: &FgAbObject, bound: u32) -> HomEnumeration {
    let cells = a.generators * b.generators;
    let bound = bound as i64;
    let mut out: Vec<FgAbMorphism> = Vec::new();
    let mut vals = vec![-bound; cells];
    loop {
        let m = IntMatrix::new(b.generators, a.generators, vals.iter().map(|&v| BigInt::from(v)).collect()).unwrap();
        if let Ok(f) = FgAbMorphism::new(a.clone(), b.clone(), m) {
            if !out.iter().any(|g| equal(g, &f)) {
                out.push(f);
            }
        }
        let mut k = cells;
        loop {
            if k == 0 {
                return HomEnumeration { morphisms: out, complete: false };
            }
            k -= 1;
            vals[k] += 1;
            if vals[k] <= bound {
                break;
            }
            vals[k] = -bound;
        }
    }
}

/// Torsion subgroup, presented on its own generators, with the inclusion into `a`.
pub fn torsion_inclusion(a: &FgAbObject) -> FgAbMorphism {
    // In Smith coordinates y = U x the group is ⊕ Z/d_i; the torsion part is spanned by the
    // coordinates with 0 < d_i, d_i ≠ 1.
    let snf = smith_normal_form(&a.relations);
    let diag = snf.diagonal();
    let u_inv = unimodular_inverse(&snf.u);
    let idx: Vec<usize> =
        (0..a.generators).filter(|&i| diag.get(i).is_some_and(|d| !d.is_zero() && !d.is_one())).collect();
    let orders: Vec<i64> = idx.iter().map(|&i| i64::try_from(&diag[i]).expect("torsion orders fit in i64")).collect();
    let tor = FgAbObject::from_orders(&orders);
    let incl = u_inv.select_cols(&idx);
    FgAbMorphism::new(tor, a.clone(), incl).expect("torsion inclusion is well defined")
}
