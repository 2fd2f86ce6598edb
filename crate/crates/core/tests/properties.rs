use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use procat::categories::{fgab, finset, Category, FinSetMorphism, FinSetObject, Morphism};
use procat::cli::{parse_document, serialize_document, Query, Workspace};
use procat::deciders::{check_morphism, check_system, Certificate, Property};
use procat::gallery::oracles;
use procat::gallery::random::{random_fgab_hom, random_fgab_object};
use procat::gallery::{random_morphism, GeneratorParams, Kind};
use procat::zlinalg::{abs_determinant, smith_normal_form, IntMatrix};

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-5i64..=5, c), r))
}

fn table(n: usize, m: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..m, n)
}

fn set_map(n: usize, m: usize, t: Vec<usize>) -> FinSetMorphism {
    FinSetMorphism::new(FinSetObject::range(n), FinSetObject::range(m), t).unwrap()
}

fn kind() -> impl Strategy<Value = Kind> {
    prop_oneof![Just(Kind::FinSet), Just(Kind::FgAb)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_diagonalizes_with_unimodular_factors(rows in matrix()) {
        let a = IntMatrix::from_rows(&rows);
        let r = smith_normal_form(&a);
        prop_assert_eq!(r.u.mul(&a).unwrap().mul(&r.v).unwrap(), r.s.clone());
        prop_assert_eq!(abs_determinant(&r.u), Some(BigInt::one()));
        prop_assert_eq!(abs_determinant(&r.v), Some(BigInt::one()));
        for i in 0..r.s.rows() {
            for j in 0..r.s.cols() {
                prop_assert!(i == j || r.s.get(i, j).is_zero());
            }
        }
        let d = r.diagonal();
        prop_assert!(d.iter().all(|x| !x.is_negative()));
        for w in d.windows(2) {
            prop_assert!(w[1].is_zero() || (!w[0].is_zero() && (&w[1] % &w[0]).is_zero()));
        }
        let nonzero: Vec<i128> = d.iter().filter(|x| !x.is_zero()).map(|x| i128::try_from(x).unwrap()).collect();
        prop_assert_eq!(nonzero, oracles::invariant_factors_by_minors(&rows));
    }

    #[test]
    fn finset_composition_is_associative_and_unital(
        (a, b, c) in (1usize..=4, 1usize..=4, 1usize..=4),
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = set_map(a, b, (0..a).map(|_| rng.gen_range(0..b)).collect());
        let g = set_map(b, c, (0..b).map(|_| rng.gen_range(0..c)).collect());
        let h = set_map(c, 2, (0..c).map(|_| rng.gen_range(0..2)).collect());
        let left = finset::compose(&h, &finset::compose(&g, &f).unwrap()).unwrap();
        let right = finset::compose(&finset::compose(&h, &g).unwrap(), &f).unwrap();
        prop_assert!(finset::equal(&left, &right));
        prop_assert!(finset::equal(&finset::compose(&f, &finset::identity(f.source())).unwrap(), &f));
        prop_assert!(finset::equal(&finset::compose(&finset::identity(f.target()), &f).unwrap(), &f));
    }

    #[test]
    fn finset_factor_solutions_factor(f in table(3, 3), p in table(3, 2), q in table(2, 3)) {
        let f = set_map(3, 3, f);
        // g∘f = p has a solution exactly when p is constant on the fibres of f.
        let p = set_map(3, 2, p);
        let collapses = (0..3).all(|i| (0..3).all(|j| f.apply(i) != f.apply(j) || p.apply(i) == p.apply(j)));
        match finset::solve_left_factor(&f, &p).unwrap() {
            Some(g) => prop_assert!(finset::equal(&finset::compose(&g, &f).unwrap(), &p)),
            None => prop_assert!(!collapses),
        }
        // f∘g = q has a solution exactly when the image of q lies in the image of f.
        let q = set_map(2, 3, q);
        match finset::solve_right_factor(&f, &q).unwrap() {
            Some(g) => prop_assert!(finset::equal(&finset::compose(&f, &g).unwrap(), &q)),
            None => prop_assert!(!q.image().is_subset(&f.image())),
        }
    }

    #[test]
    fn finset_cancellation_matches_enumeration(n in 1usize..=3, f in table(3, 3), p in table(3, 3)) {
        let f = set_map(3, 3, f[..3].to_vec());
        let p = set_map(3, 3, p[..3].to_vec());
        prop_assert_eq!(finset::cancel_left_before(&f, &p).unwrap(), oracles::left_cancels(3, f.table(), p.table(), n + 1));
        prop_assert_eq!(finset::cancel_right_after(&f, &p).unwrap(), oracles::right_cancels(3, f.table(), p.table(), n + 1));
    }

    #[test]
    fn finset_mono_and_epi_are_injective_and_surjective(n in 0usize..=4, m in 0usize..=4, seed in any::<u64>()) {
        prop_assume!(n == 0 || m > 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = set_map(n, m, (0..n).map(|_| rng.gen_range(0..m)).collect());
        let cat = Category::FinSet;
        let mf = Morphism::Set(f.clone());
        prop_assert_eq!(cat.is_mono(&mf).unwrap(), f.is_injective());
        prop_assert_eq!(cat.is_epi(&mf).unwrap(), f.is_surjective());
    }

    #[test]
    fn fgab_composition_is_associative(seed in any::<u64>()) {
        let p = GeneratorParams::small(Kind::FgAb, seed);
        let mut rng = p.rng();
        let objs: Vec<_> = (0..4).map(|_| random_fgab_object(&p, &mut rng)).collect();
        let f = random_fgab_hom(&objs[0], &objs[1], &mut rng).unwrap();
        let g = random_fgab_hom(&objs[1], &objs[2], &mut rng).unwrap();
        let h = random_fgab_hom(&objs[2], &objs[3], &mut rng).unwrap();
        let left = fgab::compose(&h, &fgab::compose(&g, &f).unwrap()).unwrap();
        let right = fgab::compose(&fgab::compose(&h, &g).unwrap(), &f).unwrap();
        prop_assert!(fgab::equal(&left, &right));
        prop_assert!(fgab::equal(&fgab::compose(&f, &fgab::identity(f.source())).unwrap(), &f));
    }

    #[test]
    fn fgab_factor_solutions_factor(seed in any::<u64>()) {
        let p = GeneratorParams::small(Kind::FgAb, seed);
        let mut rng = p.rng();
        let (a, b, c) = (random_fgab_object(&p, &mut rng), random_fgab_object(&p, &mut rng), random_fgab_object(&p, &mut rng));
        let f = random_fgab_hom(&a, &b, &mut rng).unwrap();
        let q = random_fgab_hom(&c, &b, &mut rng).unwrap();
        if let Some(g) = fgab::solve_right_factor(&f, &q).unwrap() {
            prop_assert!(fgab::equal(&fgab::compose(&f, &g).unwrap(), &q));
        }
        let r = random_fgab_hom(&a, &c, &mut rng).unwrap();
        if let Some(g) = fgab::solve_left_factor(&f, &r).unwrap() {
            prop_assert!(fgab::equal(&fgab::compose(&g, &f).unwrap(), &r));
        }
        // Anything of the form s∘f factors through f, and f∘s through f.
        let s = random_fgab_hom(&b, &c, &mut rng).unwrap();
        prop_assert!(fgab::solve_left_factor(&f, &fgab::compose(&s, &f).unwrap()).unwrap().is_some());
        let t = random_fgab_hom(&c, &a, &mut rng).unwrap();
        prop_assert!(fgab::solve_right_factor(&f, &fgab::compose(&f, &t).unwrap()).unwrap().is_some());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn documents_round_trip(k in kind(), seed in any::<u64>()) {
        let f = random_morphism(&GeneratorParams::small(k, seed)).unwrap();
        let mut ws = Workspace::new(f.category().clone());
        ws.add_morphism("f", &f);
        ws.queries.push(Query { property: Property::Mono, subject: "f".into(), horizon: Some(5) });
        ws.queries.push(Query { property: Property::Stable, subject: "X".into(), horizon: None });
        let text = serialize_document(&ws).unwrap();
        let back = parse_document(&text).unwrap();
        prop_assert_eq!(&back, &ws);
        prop_assert_eq!(serialize_document(&back).unwrap(), text);
    }

    #[test]
    fn holds_certificates_survive_json_and_replay(k in kind(), seed in any::<u64>()) {
        let f = random_morphism(&GeneratorParams::small(k, seed)).unwrap();
        for property in [Property::Mono, Property::Epi, Property::StrongMono, Property::StrongEpi, Property::Iso] {
            let v = check_morphism(property, &f, 6).unwrap();
            if let Some(c) = v.certificate() {
                let back = Certificate::from_json(&c.to_json()).unwrap();
                prop_assert_eq!(&back, c);
                prop_assert!(back.verify().is_ok(), "{} certificate rejected", property);
            }
        }
        let x = f.source();
        for property in [Property::Movable, Property::UniformlyMovable, Property::Stable] {
            if let Some(c) = check_system(property, x, 6).unwrap().certificate() {
                prop_assert!(c.verify().is_ok(), "{} certificate rejected", property);
            }
        }
    }

    #[test]
    fn verdicts_are_deterministic(k in kind(), seed in any::<u64>()) {
        let f = random_morphism(&GeneratorParams::small(k, seed)).unwrap();
        let g = random_morphism(&GeneratorParams::small(k, seed)).unwrap();
        prop_assert_eq!(&f, &g);
        for property in [Property::Mono, Property::StrongEpi] {
            prop_assert_eq!(check_morphism(property, &f, 6).unwrap(), check_morphism(property, &g, 6).unwrap());
        }
    }
}
