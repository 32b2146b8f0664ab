use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use unitorus::filtration::{build_chain_cyclic, compute_spaces, h_level, s_sequence};
use unitorus::gallery::{random_kahler, random_unipotent_group};
use unitorus::group::{derived_length, nilpotency_class, MatrixGroup};
use unitorus::groupfile::GroupFile;
use unitorus::growth::{growth_exponent, verify_growth_bounds};
use unitorus::torus::{intersection_number, intersection_number_wedge, is_kahler};
use unitorus::QMatrix;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn random_groups_are_unipotent_automorphisms(n in 1usize..=4, gens in 1usize..=3, seed in any::<u64>()) {
        let c = random_unipotent_group(n, gens, seed);
        for g in c.automorphisms() {
            prop_assert!(g.is_unipotent());
            prop_assert!(c.torus.validate_automorphism(&g.m).is_ok());
        }
    }

    #[test]
    fn class_and_length_bounds(n in 2usize..=4, gens in 1usize..=3, seed in any::<u64>()) {
        let c = random_unipotent_group(n, gens, seed);
        let g = c.lattice_group();
        let cl = nilpotency_class(&g).unwrap();
        let l = derived_length(&g).unwrap();
        prop_assert!(l <= cl);
        let h1 = MatrixGroup::new(2 * n, c.automorphisms().iter().map(|a| a.m.transpose()).collect()).unwrap();
        prop_assert!(nilpotency_class(&h1).unwrap() < n);
    }

    #[test]
    fn growth_bounds_hold(n in 1usize..=3, seed in any::<u64>()) {
        let c = random_unipotent_group(n, 1, seed);
        let g = &c.automorphisms()[0];
        let r = verify_growth_bounds(&c.torus, g).unwrap();
        prop_assert!(r.failures().is_empty(), "{:?}", r.failures());
        let e11 = growth_exponent(&c.torus, g, 1, 1).unwrap();
        prop_assert_eq!(e11 % 2, 0);
        prop_assert!(e11 <= 2 * (n - 1));
        // conjugation symmetry of the Hodge decomposition
        for p in 0..=n {
            for q in 0..=n {
                prop_assert_eq!(growth_exponent(&c.torus, g, p, q).unwrap(), growth_exponent(&c.torus, g, q, p).unwrap());
            }
        }
    }

    #[test]
    fn intersection_numbers_agree(n in 1usize..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cs: Vec<_> = (0..n).map(|_| random_kahler(n, &mut rng)).collect();
        prop_assert!(cs.iter().all(is_kahler));
        let a = intersection_number(&cs).unwrap();
        prop_assert_eq!(&a, &intersection_number_wedge(&cs).unwrap());
        prop_assert!(a.is_positive());
    }

    #[test]
    fn annihilation_at_dimension(n in 1usize..=3, seed in any::<u64>()) {
        let c = random_unipotent_group(n, 2, seed);
        let gens: Vec<QMatrix> = c.automorphisms().into_iter().map(|a| a.m).collect();
        let id = QMatrix::identity(2 * n);
        let mut prod = id.clone();
        for i in 0..n {
            prod = prod.mul(&id.sub(&gens[i % 2].transpose()));
        }
        prop_assert!(prod.is_zero());
    }

    #[test]
    fn group_file_round_trip(n in 1usize..=4, gens in 1usize..=3, seed in any::<u64>()) {
        let c = random_unipotent_group(n, gens, seed);
        let text = GroupFile::from_case(&c).to_canonical();
        let back = GroupFile::parse(&text).unwrap();
        prop_assert_eq!(back.to_canonical(), text);
        prop_assert_eq!(back.generators, c.automorphisms());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn s_sequence_is_independent_of_kahler_class(n in 2usize..=3, seed in any::<u64>(), kseed in any::<u64>()) {
        let c = random_unipotent_group(n, 1, seed);
        let g = &c.automorphisms()[0];
        let mut rng = ChaCha8Rng::seed_from_u64(kseed);
        let mut seqs = Vec::new();
        for _ in 0..2 {
            let omega = random_kahler(n, &mut rng);
            let chain = build_chain_cyclic(&c.torus, g, &omega).unwrap();
            let spaces = compute_spaces(&chain).unwrap();
            prop_assert!(spaces.all_pass());
            let seq = s_sequence(&c.torus, g, &chain, &spaces, &omega).unwrap();
            prop_assert!(seq.all_pass());
            prop_assert!(seq.s.windows(2).all(|w| w[0] > w[1]));
            prop_assert!(h_level(&c.torus, g, &spaces).unwrap() < n);
            seqs.push(seq.s);
        }
        prop_assert_eq!(&seqs[0], &seqs[1]);
    }
}
