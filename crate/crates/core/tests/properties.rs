//! Property tests for the closed form and the move construction.

use heapgame_core::density::p_class_size;
use heapgame_core::strategy::{analyze, apply, check_move, Move, Verdict};
use heapgame_core::{
    class_member_containing, enumerate_p_class, is_p_position, normalize, p_class_index,
    triangular, triangular_floor_index, Position,
};
use proptest::prelude::*;

const MAX_CLASS: u64 = 14;

#[test]
fn class_parts_stay_below_next_triangular() {
    for k in 3..=6 {
        for n in 0..=MAX_CLASS {
            let tn = triangular(n).unwrap();
            for p in enumerate_p_class(n, k).unwrap().members {
                assert_eq!(p.smallest(), tn);
                assert!(*p.heaps().last().unwrap() <= tn + n, "{p}");
                assert_eq!(p_class_index(&p), Some(n));
            }
        }
    }
}

#[test]
fn every_value_appears_in_exactly_one_class() {
    for k in 3..=5 {
        let classes: Vec<_> = (0..=MAX_CLASS)
            .map(|n| enumerate_p_class(n, k).unwrap())
            .collect();
        let limit = triangular(MAX_CLASS + 1).unwrap();
        for t in 0..limit {
            let w = class_member_containing(t, k).unwrap();
            assert!(is_p_position(&w));
            assert!(w.heaps().contains(&t));
            let home = triangular_floor_index(t);
            for class in &classes {
                let contains = class.members.iter().any(|p| p.heaps().contains(&t));
                assert_eq!(contains, class.n == home, "t={t} class {}", class.n);
            }
        }
    }
}

#[test]
fn class_sizes_match_partition_counts() {
    for k in 3..=6 {
        for n in 0..=MAX_CLASS {
            let listed = enumerate_p_class(n, k).unwrap().len();
            assert_eq!(p_class_size(n, k).unwrap(), listed.into(), "k={k} n={n}");
        }
    }
}

#[test]
fn classifier_agrees_with_enumeration() {
    // Every canonical 4-heap position with heaps <= 16.
    let classes: Vec<_> = (0..=5).map(|n| enumerate_p_class(n, 4).unwrap()).collect();
    for a in 0..=16u64 {
        for b in a..=16 {
            for c in b..=16 {
                for d in c..=16 {
                    let p = Position::new(vec![a, b, c, d]).unwrap();
                    let n = triangular_floor_index(a) as usize;
                    let listed = classes.get(n).is_some_and(|cl| cl.members.contains(&p));
                    assert_eq!(is_p_position(&p), listed, "{p}");
                }
            }
        }
    }
}

fn heaps_strategy(max_heap: u64) -> impl Strategy<Value = Vec<u64>> {
    (3usize..=8).prop_flat_map(move |k| prop::collection::vec(0..=max_heap, k))
}

fn check_winning(p: &Position) -> Result<(), TestCaseError> {
    let a = analyze(p);
    prop_assert_eq!(a.verdict == Verdict::P, is_p_position(p));
    prop_assert_eq!(a.verdict == Verdict::P, a.winning_move.is_none());
    if let Some(mv) = &a.winning_move {
        prop_assert!(check_move(p.heaps(), mv).is_ok(), "{} {:?}", p, mv);
        if let Move::Subset { amounts } = mv {
            prop_assert!(amounts.iter().filter(|&&x| x > 0).count() < p.k());
        }
        let q = apply(p, mv).unwrap();
        prop_assert!(is_p_position(&q), "{} -> {:?} -> {}", p, mv, q);
        let d = a.derivation.as_ref().unwrap();
        prop_assert!(d.j <= d.n);
        if let (Some(m), Some(t)) = (d.m, d.t) {
            prop_assert!(m < d.n);
            prop_assert!(t >= 1);
            prop_assert_eq!(p_class_index(&q), Some(m));
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn floor_index_brackets_random_values(m in any::<u64>()) {
        let n = triangular_floor_index(m) as u128;
        prop_assert!(n * (n + 1) / 2 <= m as u128);
        prop_assert!((m as u128) < (n + 1) * (n + 2) / 2);
    }

    #[test]
    fn winning_moves_small(heaps in heaps_strategy(40)) {
        check_winning(&Position::new(heaps).unwrap())?;
    }

    #[test]
    fn winning_moves_large(heaps in heaps_strategy(1 << 58)) {
        check_winning(&Position::new(heaps).unwrap())?;
    }

    #[test]
    fn winning_moves_near_p_positions(
        n in 0u64..200_000,
        k in 3usize..8,
        nudge in prop::collection::vec(-3i64..=3, 8),
    ) {
        // Perturb a witness so the search covers the interesting boundary cases.
        let t = triangular(n).unwrap();
        let base = class_member_containing(t + n / 2, k).unwrap();
        let heaps: Vec<u64> = base
            .heaps()
            .iter()
            .zip(nudge)
            .map(|(&h, d)| h.saturating_add_signed(d))
            .collect();
        check_winning(&Position::new(heaps).unwrap())?;
    }

    #[test]
    fn analyze_is_deterministic_and_label_independent(heaps in heaps_strategy(1000)) {
        let (p, perm) = normalize(&heaps).unwrap();
        let first = analyze(&p);
        prop_assert_eq!(&first, &analyze(&p));
        let labeled = first.to_labeled(&perm);
        if let Some(mv) = labeled.winning_move {
            let after = heaps_after(&heaps, &mv);
            prop_assert!(is_p_position(&Position::new(after).unwrap()));
        }
    }
}

fn heaps_after(heaps: &[u64], mv: &Move) -> Vec<u64> {
    heapgame_core::strategy::apply_labeled(heaps, mv).unwrap()
}
