use proptest::prelude::*;
use proptest::sample::subsequence;

use kmap_ecc::burst::{burst_triples, is_burst_safe, Ordering};
use kmap_ecc::codec::{build_tables, build_tables_with, Codec, ParityMode};
use kmap_ecc::coverage::{three_bit_coverage, CoverageRule};
use kmap_ecc::pattern::{patterns_of_size, CodeBit, ErrorPattern};
use kmap_ecc::placement::{double_weight_count, Footprint};
use kmap_ecc::{GrayLayout, KCode, Placement, SClass, Width};

fn width() -> impl Strategy<Value = Width> {
    (4u32..=16).prop_map(|n| Width::new(n).unwrap())
}

fn code_pair() -> impl Strategy<Value = (KCode, KCode, KCode)> {
    width().prop_flat_map(|w| {
        let m = w.mask() as u32;
        (0..=m, 0..=m, 0..=m).prop_map(move |(a, b, c)| {
            (
                KCode::new(a, w).unwrap(),
                KCode::new(b, w).unwrap(),
                KCode::new(c, w).unwrap(),
            )
        })
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn permute_code(k: KCode, perm: &[usize]) -> KCode {
    let bits = (0..perm.len()).fold(0u32, |acc, i| acc | ((k.bits() as u32 >> i & 1) << perm[i]));
    KCode::new(bits, k.width()).unwrap()
}

fn permute_placement(p: &Placement, perm: &[usize]) -> Placement {
    Placement::new(p.width(), p.data().iter().map(|&k| permute_code(k, perm)).collect()).unwrap()
}

fn permute_bit(b: CodeBit, perm: &[usize]) -> CodeBit {
    match b {
        CodeBit::Parity(k) => CodeBit::Parity(perm[k as usize - 1] as u8 + 1),
        d => d,
    }
}

/// Random valid 3-data placement at n = 7, found by rejection.
fn valid_three() -> impl Strategy<Value = Placement> {
    (16u32..128, 16u32..128, 16u32..128)
        .prop_map(|(a, b, c)| Placement::from_values(Width::SEVEN, &[a, b, c]).unwrap())
        .prop_filter("valid placement", |p| p.is_valid())
}

fn fig4() -> Placement {
    Placement::from_parity_sets(
        Width::SEVEN,
        &[&[2, 4, 6, 7], &[2, 3, 5, 7], &[1, 2, 3, 4, 5, 6, 7]],
    )
    .unwrap()
}

proptest! {
    #[test]
    fn xor_algebra((a, b, c) in code_pair()) {
        prop_assert_eq!(a ^ b, b ^ a);
        prop_assert_eq!((a ^ b) ^ c, a ^ (b ^ c));
        prop_assert!((a ^ a).is_zero());
        prop_assert_eq!(a.distance(b).unwrap(), (a ^ b).weight());
        prop_assert_eq!(a.distance(b).unwrap(), b.distance(a).unwrap());
    }

    #[test]
    fn side_square_shells((a, _, _) in code_pair()) {
        let n = a.width().get() as usize;
        let s1 = a.side_squares(1).unwrap();
        let s2 = a.side_squares(2).unwrap();
        prop_assert_eq!(s1.len(), n);
        prop_assert_eq!(s2.len(), n * (n - 1) / 2);
        prop_assert!(!s1.contains(&a) && !s2.contains(&a));
        prop_assert!(s1.iter().all(|s| !s2.contains(s)));
        let m = a.weight() as i64;
        prop_assert!(s1.iter().all(|s| (s.weight() as i64 - m).abs() == 1));
        prop_assert!(s2.iter().all(|s| [0, 2].contains(&(s.weight() as i64 - m).abs())));
    }

    #[test]
    fn gray_neighbours_differ_in_one_bit((a, _, _) in code_pair()) {
        let layout = GrayLayout::for_width(a.width());
        let (r, c) = layout.to_grid(a).unwrap();
        prop_assert_eq!(layout.from_grid(r, c).unwrap(), a);
        let (rows, cols) = (layout.rows(), layout.cols());
        for (nr, nc) in [((r + 1) % rows, c), (r, (c + 1) % cols)] {
            if (nr, nc) != (r, c) {
                prop_assert_eq!(layout.from_grid(nr, nc).unwrap().distance(a).unwrap(), 1);
            }
        }
    }

    #[test]
    fn double_weight_is_permutation_invariant(
        p in valid_three(),
        perm in permutation(7),
    ) {
        let q = permute_placement(&p, &perm);
        let priors = |x: &Placement| [
            Footprint::parity(Width::SEVEN),
            Footprint::of(x.data()[0]),
            Footprint::of(x.data()[1]),
        ];
        prop_assert_eq!(
            double_weight_count(p.data()[2], &priors(&p)),
            double_weight_count(q.data()[2], &priors(&q))
        );
        prop_assert_eq!(p.s_class(), q.s_class());
        let class = p.s_class().unwrap();
        prop_assert_eq!(SClass::of(p.data()), class);
    }

    #[test]
    fn coverage_is_permutation_invariant(p in valid_three(), perm in permutation(7)) {
        let q = permute_placement(&p, &perm);
        prop_assert!(q.is_valid());
        for rule in CoverageRule::ALL {
            let a = three_bit_coverage(&p, rule).unwrap();
            let b = three_bit_coverage(&q, rule).unwrap();
            prop_assert_eq!(a.counts, b.counts);
            prop_assert_eq!(a.assignable_squares, b.assignable_squares);
            prop_assert!(a.total <= 72);
            let [xxp, ppp, xpp, xxx] = a.counts.as_array();
            prop_assert!(xxp <= 21 && ppp <= 35 && xpp <= 63 && xxx <= 1);
        }
    }

    #[test]
    fn syndrome_is_linear(
        p in valid_three(),
        data in 0u32..8,
        members in subsequence((0..10).collect::<Vec<usize>>(), 0..=3),
        odd in any::<bool>(),
    ) {
        let mode = if odd { ParityMode::Odd } else { ParityMode::Even };
        let codec = Codec::with_mode(p.clone(), mode);
        let bits = p.code_bits();
        let e = ErrorPattern::new(&members.iter().map(|&i| bits[i]).collect::<Vec<_>>()).unwrap();
        let received = codec.encode(data).unwrap().with_pattern(&e);
        prop_assert_eq!(codec.syndrome(&received), p.syndrome_of(&e).unwrap());
    }

    #[test]
    fn triples_never_change_low_decoding(p in valid_three()) {
        let plain = build_tables(&p, false).unwrap();
        for rule in CoverageRule::ALL {
            let full = build_tables_with(&p, Some(rule), ParityMode::Even).unwrap();
            for (s, e) in plain.entries() {
                prop_assert_eq!(full.lookup(s), Some(e));
            }
        }
    }

    #[test]
    fn burst_safety_survives_reversal_and_relabelling(
        order in Just((0..10).collect::<Vec<usize>>()).prop_shuffle(),
        perm in permutation(7),
    ) {
        let p = fig4();
        let bits = p.code_bits();
        let o = Ordering::new(order.iter().map(|&i| bits[i]).collect(), 3, 7).unwrap();
        let report = three_bit_coverage(&p, CoverageRule::default()).unwrap();
        let safe = is_burst_safe(&o, &report);
        prop_assert_eq!(is_burst_safe(&o.reversed(), &report), safe);

        let q = permute_placement(&p, &perm);
        let moved = Ordering::new(
            o.sequence().iter().map(|&b| permute_bit(b, &perm)).collect(),
            3,
            7,
        )
        .unwrap();
        let q_report = three_bit_coverage(&q, CoverageRule::default()).unwrap();
        prop_assert_eq!(is_burst_safe(&moved, &q_report), safe);
        if safe {
            let mut w = burst_triples(&o);
            w.sort();
            w.dedup();
            prop_assert_eq!(w.len(), 8);
        }
    }
}

#[test]
fn linearity_exhaustive_fig4() {
    let p = fig4();
    let codec = Codec::new(p.clone());
    let bits = p.code_bits();
    for data in 0..8 {
        let clean = codec.encode(data).unwrap();
        for s in 0..=3 {
            for e in patterns_of_size(&bits, s) {
                assert_eq!(
                    codec.syndrome(&clean.with_pattern(&e)),
                    p.syndrome_of(&e).unwrap()
                );
            }
        }
    }
}
