//! Cross-module properties on seeded random specs.

use bellmoment::groupfn::{classify_table, Classification, GroupElement};
use bellmoment::moment::{
    construct, normalize, normalize_tables, random_spec, reconstruct, verify_rank, Status, TabulatedSequence,
    VerifyConfig,
};
use bellmoment::{MultiIndex, Scalar};
use num_traits::One;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tables(seed: u64, rank: usize, order: u32, d: usize, radius: i64) -> TabulatedSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = random_spec(&mut rng, rank, order, d).unwrap();
    construct(&spec).unwrap().tabulate(radius).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn tables_survive_json(seed in any::<u64>(), rank in 1usize..=2, d in 1usize..=2) {
        let t = tables(seed, rank, 2, d, 2);
        let back: TabulatedSequence = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn normalized_tables_have_trivial_exponential(seed in any::<u64>(), rank in 1usize..=2) {
        let t = normalize_tables(&tables(seed, rank, 2, 1, 3)).unwrap();
        let f0 = t.member(&MultiIndex::zero(rank)).unwrap();
        prop_assert!(f0.values().iter().all(One::is_one));
        let report = verify_rank(&t, &VerifyConfig::default()).unwrap();
        prop_assert_eq!(report.status, Status::Pass);
        let spec = reconstruct(&t).unwrap();
        prop_assert!(spec.exponential().is_identity());
    }

    #[test]
    fn normalizing_twice_changes_nothing(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_spec(&mut rng, 2, 2, 2).unwrap();
        let once = normalize(&construct(&spec).unwrap()).unwrap();
        let twice = normalize(&once).unwrap();
        prop_assert_eq!(once.spec(), twice.spec());
    }

    #[test]
    fn normalized_height_one_members_are_additive(seed in any::<u64>(), d in 1usize..=2) {
        let t = normalize_tables(&tables(seed, 2, 2, d, 2)).unwrap();
        for alpha in [MultiIndex::new(vec![1, 0]), MultiIndex::new(vec![0, 1])] {
            let class = classify_table(t.member(&alpha).unwrap()).unwrap();
            prop_assert!(matches!(class, Classification::Additive(_)), "{alpha}");
        }
    }

    #[test]
    fn reconstruction_reproduces_every_value(seed in any::<u64>(), rank in 1usize..=2, d in 1usize..=2) {
        let t = tables(seed, rank, 2, d, 2);
        let again = construct(&reconstruct(&t).unwrap()).unwrap().tabulate(2).unwrap();
        prop_assert_eq!(again, t);
    }
}

#[test]
fn generating_value_is_one_at_the_origin() {
    let t = tables(3, 2, 2, 2, 1);
    let f0 = t.member(&MultiIndex::zero(2)).unwrap();
    assert_eq!(f0.get(&GroupElement::zero(2)), Some(&Scalar::one()));
}
