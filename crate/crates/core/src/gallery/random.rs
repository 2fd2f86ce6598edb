use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::categories::{Category, FgAbMorphism, FgAbObject, FinSetMorphism, FinSetObject, Morphism, Object};
use crate::deciders::HomGroup;
use crate::prosys::{InverseSystem, LevelMorphism, PosetIndex, ProError, Tail, TowerIndex};
use crate::zlinalg::{kernel_generators, IntMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    FinSet,
    FgAb,
}

impl Kind {
    pub fn category(self) -> Category {
        match self {
            Kind::FinSet => Category::FinSet,
            Kind::FgAb => Category::FgAb,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub kind: Kind,
    pub max_set_size: usize,
    pub max_generators: usize,
    pub max_relation_entry: i64,
    pub max_prefix: usize,
    pub max_period: usize,
    pub seed: u64,
}

impl GeneratorParams {
    pub fn new(kind: Kind, seed: u64) -> Self {
        GeneratorParams {
            kind,
            max_set_size: 6,
            max_generators: 3,
            max_relation_entry: 8,
            max_prefix: 3,
            max_period: 2,
            seed,
        }
    }

    /// Smaller caps that keep exhaustive oracles and deep searches fast.
    pub fn small(kind: Kind, seed: u64) -> Self {
        GeneratorParams {
            max_set_size: 5,
            max_generators: 2,
            max_relation_entry: 6,
            max_prefix: 2,
            ..Self::new(kind, seed)
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        GeneratorParams { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), ProError> {
        if self.max_set_size == 0 || self.max_generators == 0 || self.max_period == 0 || self.max_relation_entry < 1 {
            return Err(ProError::Invalid("generator caps must be positive".into()));
        }
        Ok(())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// A generated system or level morphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Instance {
    System(InverseSystem),
    Morphism(LevelMorphism),
}

/// Distinct seeds for the instances of a run.
pub fn instance_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64).rotate_left(17) ^ 0x5851_F42D_4C95_7F2D
}

const ATTEMPTS: usize = 1000;

fn retry<T>(
    rng: &mut ChaCha8Rng,
    mut make: impl FnMut(&mut ChaCha8Rng) -> Result<Option<T>, ProError>,
) -> Result<T, ProError> {
    for _ in 0..ATTEMPTS {
        if let Some(t) = make(rng)? {
            return Ok(t);
        }
    }
    Err(ProError::Invalid("rejection sampling gave up".into()))
}

pub fn random_index(p: &GeneratorParams, rng: &mut ChaCha8Rng) -> TowerIndex {
    TowerIndex { prefix_len: rng.gen_range(0..=p.max_prefix), tail_period: rng.gen_range(1..=p.max_period) }
}

// ---- FinSet ----

fn random_map(rng: &mut ChaCha8Rng, from: usize, to: usize) -> Vec<usize> {
    (0..from).map(|_| rng.gen_range(0..to)).collect()
}

pub fn random_finset_tower(
    p: &GeneratorParams,
    idx: TowerIndex,
    rng: &mut ChaCha8Rng,
) -> Result<InverseSystem, ProError> {
    let sizes: Vec<usize> = (0..idx.stored()).map(|_| rng.gen_range(1..=p.max_set_size)).collect();
    finset_tower_with_sizes(&sizes, idx, rng)
}

fn finset_tower_with_sizes(sizes: &[usize], idx: TowerIndex, rng: &mut ChaCha8Rng) -> Result<InverseSystem, ProError> {
    let objects: Vec<Object> = sizes.iter().map(|&k| FinSetObject::range(k).into()).collect();
    let steps = (0..idx.stored())
        .map(|n| {
            let from = sizes[idx.slot(n + 1)];
            let table = random_map(rng, from, sizes[n]);
            Ok(FinSetMorphism::new(FinSetObject::range(from), FinSetObject::range(sizes[n]), table)?.into())
        })
        .collect::<Result<_, ProError>>()?;
    InverseSystem::tower(Category::FinSet, idx, objects, steps)
}

/// `f: X → Y` with `X_n` a disjoint union of fibers over the points of `Y_n`, sizes drawn
/// from `fiber` (raised where a bond needs a nonempty target fiber). Every level morphism of
/// finite sets has this shape.
pub fn fibered_finset_morphism(
    p: &GeneratorParams,
    y: &InverseSystem,
    fiber: std::ops::RangeInclusive<usize>,
    rng: &mut ChaCha8Rng,
) -> Result<Option<LevelMorphism>, ProError> {
    let idx = y.tower_index().unwrap();
    let n = idx.stored();
    let ysize = |k: usize| y.object(k).as_set().unwrap().len();
    let mut sizes: Vec<Vec<usize>> =
        (0..n).map(|k| (0..ysize(k)).map(|_| rng.gen_range(fiber.clone())).collect()).collect();
    loop {
        let mut changed = false;
        for k in 0..n {
            let step = y.step(k).as_set().unwrap().clone();
            let up = idx.slot(k + 1);
            for yy in 0..ysize(up) {
                let down = step.apply(yy);
                if sizes[up][yy] > 0 && sizes[k][down] == 0 {
                    sizes[k][down] = 1;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    if sizes.iter().any(|s| s.iter().sum::<usize>() > p.max_set_size) {
        return Ok(None);
    }
    // Element lists (y, i) per level.
    let elems: Vec<Vec<(usize, usize)>> = sizes
        .iter()
        .map(|s| s.iter().enumerate().flat_map(|(yy, &c)| (0..c).map(move |i| (yy, i))).collect())
        .collect();
    let objects: Vec<Object> = elems.iter().map(|e| FinSetObject::range(e.len()).into()).collect();
    let mut steps = Vec::new();
    for k in 0..n {
        let up = idx.slot(k + 1);
        let ystep = y.step(k).as_set().unwrap().clone();
        let table: Vec<usize> = elems[up]
            .iter()
            .map(|&(yy, _)| {
                let target = ystep.apply(yy);
                let choices: Vec<usize> =
                    elems[k].iter().enumerate().filter(|(_, e)| e.0 == target).map(|(j, _)| j).collect();
                *choices.choose(rng).unwrap()
            })
            .collect();
        steps.push(
            FinSetMorphism::new(FinSetObject::range(elems[up].len()), FinSetObject::range(elems[k].len()), table)?
                .into(),
        );
    }
    let x = InverseSystem::tower(Category::FinSet, idx, objects, steps)?;
    let comps = (0..n)
        .map(|k| {
            let table = elems[k].iter().map(|e| e.0).collect();
            Ok(FinSetMorphism::new(FinSetObject::range(elems[k].len()), FinSetObject::range(ysize(k)), table)?.into())
        })
        .collect::<Result<_, ProError>>()?;
    Ok(Some(LevelMorphism::new(x, y.clone(), comps, Tail::Periodic)?))
}

// ---- FgAb ----

pub fn random_fgab_object(p: &GeneratorParams, rng: &mut ChaCha8Rng) -> FgAbObject {
    let n = rng.gen_range(1..=p.max_generators);
    let mut rel = IntMatrix::zeros(n, n);
    for i in 0..n {
        // Free, trivial and cyclic factors in roughly equal measure.
        let d = match rng.gen_range(0..3) {
            0 => 0,
            1 => rng.gen_range(1..=p.max_relation_entry.min(2)),
            _ => rng.gen_range(2..=p.max_relation_entry.max(2)),
        };
        rel.set(i, i, BigInt::from(d));
        if i + 1 < n && rng.gen_bool(0.2) {
            rel.set(i, i + 1, BigInt::from(rng.gen_range(-2..=2)));
        }
    }
    FgAbObject::new(n, rel).expect("square relation matrices present a group")
}

/// A random well-defined homomorphism: a small combination of generators of `Hom(a, b)`.
pub fn random_fgab_hom(a: &FgAbObject, b: &FgAbObject, rng: &mut ChaCha8Rng) -> Result<FgAbMorphism, ProError> {
    let hom = HomGroup::new(a, b)?;
    let coeffs: Vec<BigInt> = (0..hom.w.cols()).map(|_| BigInt::from(rng.gen_range(-2..=2))).collect();
    let v = hom.w.mul(&IntMatrix::column_vector(&coeffs))?;
    let m = IntMatrix::unvectorize(v.entries(), b.generators(), a.generators());
    Ok(FgAbMorphism::new(a.clone(), b.clone(), m)?)
}

pub fn random_fgab_tower(
    p: &GeneratorParams,
    idx: TowerIndex,
    rng: &mut ChaCha8Rng,
) -> Result<InverseSystem, ProError> {
    let objs: Vec<FgAbObject> = (0..idx.stored()).map(|_| random_fgab_object(p, rng)).collect();
    let steps = (0..idx.stored())
        .map(|n| Ok(random_fgab_hom(&objs[idx.slot(n + 1)], &objs[n], rng)?.into()))
        .collect::<Result<_, ProError>>()?;
    InverseSystem::tower(Category::FgAb, idx, objs.into_iter().map(Object::from).collect(), steps)
}

/// A random level morphism `X → Y` between FgAb towers over one index: a small combination
/// of generators of the group of families `(f_n)` that are well defined and commute with the
/// bonds, found as the kernel of one linear system.
pub fn random_intertwiner(
    x: &InverseSystem,
    y: &InverseSystem,
    rng: &mut ChaCha8Rng,
) -> Result<LevelMorphism, ProError> {
    let idx = x.tower_index().unwrap();
    let n = idx.stored();
    let gx = |k: usize| x.object(k).as_group().unwrap().clone();
    let gy = |k: usize| y.object(k).as_group().unwrap().clone();
    let sizes: Vec<usize> = (0..n).map(|k| gy(k).generators() * gx(k).generators()).collect();
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    let total: usize = sizes.iter().sum();
    let mut blocks: Vec<(IntMatrix, IntMatrix)> = Vec::new();
    let place = |m: &IntMatrix, k: usize| -> IntMatrix {
        let mut row = IntMatrix::zeros(m.rows(), total);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                row.set(i, offsets[k] + j, m.get(i, j).clone());
            }
        }
        row
    };
    for k in 0..n {
        let (xk, yk) = (gx(k), gy(k));
        // Well defined: f_k R_X ∈ im R_Y.
        let wd = xk.relations().transpose().kron(&IntMatrix::identity(yk.generators()));
        blocks.push((place(&wd, k), IntMatrix::identity(xk.relations().cols()).kron(yk.relations())));
        // Commutes: p(Y) f_{k+1} - f_k p(X) is zero into Y_k.
        let up = idx.slot(k + 1);
        let px = y_mat(x.step(k));
        let py = y_mat(y.step(k));
        let nx_up = gx(up).generators();
        let left = IntMatrix::identity(nx_up).kron(&py);
        let right = px.transpose().kron(&IntMatrix::identity(yk.generators()));
        let mut row = place(&left, up);
        let r2 = place(&right, k);
        row = row.sub(&r2)?;
        blocks.push((row, IntMatrix::identity(nx_up).kron(yk.relations())));
    }
    let mut a = IntMatrix::zeros(0, total);
    let mut rel = IntMatrix::zeros(0, 0);
    for (m, r) in &blocks {
        a = a.vstack(m)?;
        rel = rel.block_diag(r);
    }
    let kernel = kernel_generators(&a, &rel)?;
    let coeffs: Vec<BigInt> = (0..kernel.cols()).map(|_| BigInt::from(rng.gen_range(-2..=2))).collect();
    let v = kernel.mul(&IntMatrix::column_vector(&coeffs))?;
    let comps = (0..n)
        .map(|k| {
            let slice = &v.entries()[offsets[k]..offsets[k] + sizes[k]];
            let m = IntMatrix::unvectorize(slice, gy(k).generators(), gx(k).generators());
            Ok(FgAbMorphism::new(gx(k), gy(k), m)?.into())
        })
        .collect::<Result<_, ProError>>()?;
    LevelMorphism::new(x.clone(), y.clone(), comps, Tail::Periodic)
}

fn y_mat(m: &Morphism) -> IntMatrix {
    m.as_group().unwrap().matrix().clone()
}

/// `X ⊕ W` levelwise, with the inclusion of and projection onto `X`.
pub fn direct_sum_pair(x: &InverseSystem, w: &InverseSystem) -> Result<(LevelMorphism, LevelMorphism), ProError> {
    let idx = x.tower_index().unwrap();
    let n = idx.stored();
    let gx = |k: usize| x.object(k).as_group().unwrap().clone();
    let gw = |k: usize| w.object(k).as_group().unwrap().clone();
    let objs: Vec<Object> = (0..n).map(|k| gx(k).direct_sum(&gw(k)).into()).collect();
    let steps = (0..n)
        .map(|k| {
            let up = idx.slot(k + 1);
            let m = y_mat(x.step(k)).block_diag(&y_mat(w.step(k)));
            Ok(FgAbMorphism::new(gx(up).direct_sum(&gw(up)), gx(k).direct_sum(&gw(k)), m)?.into())
        })
        .collect::<Result<_, ProError>>()?;
    let s = InverseSystem::tower(Category::FgAb, idx, objs, steps)?;
    let inc = (0..n)
        .map(|k| {
            let m = IntMatrix::identity(gx(k).generators())
                .vstack(&IntMatrix::zeros(gw(k).generators(), gx(k).generators()))?;
            Ok(FgAbMorphism::new(gx(k), gx(k).direct_sum(&gw(k)), m)?.into())
        })
        .collect::<Result<_, ProError>>()?;
    let proj = (0..n)
        .map(|k| {
            let m = IntMatrix::identity(gx(k).generators())
                .hstack(&IntMatrix::zeros(gx(k).generators(), gw(k).generators()))?;
            Ok(FgAbMorphism::new(gx(k).direct_sum(&gw(k)), gx(k), m)?.into())
        })
        .collect::<Result<_, ProError>>()?;
    Ok((
        LevelMorphism::new(x.clone(), s.clone(), inc, Tail::Periodic)?,
        LevelMorphism::new(s, x.clone(), proj, Tail::Periodic)?,
    ))
}

fn scalar_morphism(x: &InverseSystem, k: i64) -> Result<LevelMorphism, ProError> {
    let comps = x
        .objects()
        .iter()
        .map(|o| Ok(FgAbMorphism::scalar(o.as_group().unwrap(), k)?.into()))
        .collect::<Result<_, ProError>>()?;
    LevelMorphism::new(x.clone(), x.clone(), comps, Tail::Periodic)
}

// ---- entry points ----

pub fn random_system(p: &GeneratorParams) -> Result<InverseSystem, ProError> {
    p.validate()?;
    let mut rng = p.rng();
    let idx = random_index(p, &mut rng);
    let x = match p.kind {
        Kind::FinSet => random_finset_tower(p, idx, &mut rng)?,
        Kind::FgAb => match rng.gen_range(0..4) {
            // A free group with an injective endomorphism as bond: mono bonds, often not iso.
            0 => {
                let g = FgAbObject::free(rng.gen_range(1..=p.max_generators.min(2)));
                let endo = retry(&mut rng, |r| {
                    let m = random_fgab_hom(&g, &g, r)?;
                    Ok(crate::categories::fgab::is_injective(&m).then_some(m))
                })?;
                InverseSystem::periodic(Category::FgAb, g.into(), endo.into())?
            }
            // A finite cyclic group with a multiplication bond.
            1 => {
                let g = FgAbObject::cyclic(rng.gen_range(2..=p.max_relation_entry.max(2)));
                let k = rng.gen_range(0..=3);
                InverseSystem::periodic(Category::FgAb, g.clone().into(), FgAbMorphism::scalar(&g, k)?.into())?
            }
            _ => random_fgab_tower(p, idx, &mut rng)?,
        },
    };
    x.validate().map_err(ProError::Violation)?;
    Ok(x)
}

/// A level morphism from one of several families, chosen by the seed.
pub fn random_morphism(p: &GeneratorParams) -> Result<LevelMorphism, ProError> {
    p.validate()?;
    let mut rng = p.rng();
    let f = match p.kind {
        Kind::FinSet => {
            let idx = random_index(p, &mut rng);
            let ymax = GeneratorParams { max_set_size: p.max_set_size.min(4), ..p.clone() };
            let family = rng.gen_range(0..4);
            retry(&mut rng, |r| {
                let y = random_finset_tower(&ymax, idx, r)?;
                match family {
                    0 => Ok(Some(LevelMorphism::identity(&y)?)),
                    1 => fibered_finset_morphism(p, &y, 1..=2, r),
                    2 => fibered_finset_morphism(p, &y, 0..=1, r),
                    _ => fibered_finset_morphism(p, &y, 0..=2, r),
                }
            })?
        }
        Kind::FgAb => {
            let family = rng.gen_range(0..6);
            let idx =
                if family == 5 { TowerIndex { prefix_len: 0, tail_period: 1 } } else { random_index(p, &mut rng) };
            match family {
                0 => LevelMorphism::identity(&random_fgab_tower(p, idx, &mut rng)?)?,
                1 => {
                    let x = random_fgab_tower(p, idx, &mut rng)?;
                    scalar_morphism(&x, *[-1i64, 2, 3].choose(&mut rng).unwrap())?
                }
                2 | 3 => {
                    let x = random_fgab_tower(p, idx, &mut rng)?;
                    let small = GeneratorParams { max_generators: 1, ..p.clone() };
                    let w = random_fgab_tower(&small, idx, &mut rng)?;
                    let (inc, proj) = direct_sum_pair(&x, &w)?;
                    if family == 2 {
                        inc
                    } else {
                        proj
                    }
                }
                _ => {
                    let x = random_fgab_tower(p, idx, &mut rng)?;
                    let y = random_fgab_tower(p, idx, &mut rng)?;
                    random_intertwiner(&x, &y, &mut rng)?
                }
            }
        }
    };
    f.validate().map_err(ProError::Violation)?;
    Ok(f)
}

/// Composable `f: X → Y`, `g: Y → Z` over one index.
pub fn random_composable(p: &GeneratorParams) -> Result<(LevelMorphism, LevelMorphism), ProError> {
    p.validate()?;
    let mut rng = p.rng();
    let idx = random_index(p, &mut rng);
    match p.kind {
        Kind::FinSet => {
            let zmax = GeneratorParams { max_set_size: p.max_set_size.min(3), ..p.clone() };
            retry(&mut rng, |r| {
                let z = random_finset_tower(&zmax, idx, r)?;
                let Some(g) = fibered_finset_morphism(&GeneratorParams { max_set_size: 4, ..p.clone() }, &z, 0..=2, r)?
                else {
                    return Ok(None);
                };
                let Some(f) = fibered_finset_morphism(p, g.source(), 0..=2, r)? else { return Ok(None) };
                Ok(Some((f, g)))
            })
        }
        Kind::FgAb => {
            let x = random_fgab_tower(p, idx, &mut rng)?;
            let y = random_fgab_tower(p, idx, &mut rng)?;
            let z = random_fgab_tower(p, idx, &mut rng)?;
            let f = if rng.gen_bool(0.3) { direct_sum_pair(&x, &y)?.0 } else { random_intertwiner(&x, &y, &mut rng)? };
            let mid = f.target().clone();
            let g = if rng.gen_bool(0.3) {
                LevelMorphism::identity(&mid)?
            } else {
                random_intertwiner(&mid, &z, &mut rng)?
            };
            Ok((f, g))
        }
    }
}

/// A system or a morphism, each with probability one half.
pub fn random_instance(p: &GeneratorParams) -> Result<Instance, ProError> {
    let inner = p.with_seed(p.seed.wrapping_add(1));
    if p.rng().gen_bool(0.5) {
        Ok(Instance::System(random_system(&inner)?))
    } else {
        Ok(Instance::Morphism(random_morphism(&inner)?))
    }
}

/// Rank of each element in the poset's linear extension.
fn ranks(p: &PosetIndex) -> Vec<usize> {
    let mut r = vec![0; p.len()];
    for (i, a) in p.linear_extension().into_iter().enumerate() {
        r[a] = i;
    }
    r
}

/// `X_a = Y_{rank(a)}` with bonds from the tower: a system over `p` that factors through a
/// linear extension.
pub fn restrict_to_poset(y: &InverseSystem, p: &PosetIndex) -> Result<InverseSystem, ProError> {
    let r = ranks(p);
    let objects = r.iter().map(|&n| y.object(n).clone()).collect();
    let mut bonds = BTreeMap::new();
    for a in 0..p.len() {
        for b in 0..p.len() {
            if a != b && p.leq(a, b) {
                bonds.insert((b, a), y.bond(r[b], r[a])?);
            }
        }
    }
    let x = InverseSystem::poset(y.category().clone(), p.clone(), objects, bonds)?;
    x.validate().map_err(ProError::Violation)?;
    Ok(x)
}

/// The restriction of a tower morphism along a linear extension of `p`.
pub fn restrict_morphism_to_poset(f: &LevelMorphism, p: &PosetIndex) -> Result<LevelMorphism, ProError> {
    let (x, y) = (restrict_to_poset(f.source(), p)?, restrict_to_poset(f.target(), p)?);
    let comps = ranks(p).iter().map(|&n| f.component(n)).collect::<Result<_, _>>()?;
    let g = LevelMorphism::new(x, y, comps, Tail::Periodic)?;
    g.validate().map_err(ProError::Violation)?;
    Ok(g)
}
