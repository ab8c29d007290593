use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use kmap_ecc::burst::{is_burst_safe, search_orderings, Ordering};
use kmap_ecc::codec::{build_tables, DecodeReport};
use kmap_ecc::coverage::{
    census, placements_by_class, three_bit_coverage, CensusCheck, ClassCounts, CoverageRule,
};
use kmap_ecc::pattern::patterns_of_size;
use kmap_ecc::placement::{
    double_weight_count, guided_search, naive_search, theorem1_overlap, theorem2_overlap,
    Footprint, GuidedConfig,
};
use kmap_ecc::{n_class, KCode, Placement, SClass, Width};

const W: Width = Width::SEVEN;

fn fig4() -> Placement {
    Placement::from_parity_sets(W, &[&[2, 4, 6, 7], &[2, 3, 5, 7], &[1, 2, 3, 4, 5, 6, 7]]).unwrap()
}

fn all_codes() -> impl Iterator<Item = KCode> {
    (0..128).map(|v| KCode::new(v, W).unwrap())
}

/// Side squares of `x` found in `cover`, by direct distance test.
fn brute_double_weight(x: KCode, cover: &BTreeSet<KCode>) -> usize {
    all_codes()
        .filter(|s| matches!(s.distance(x).unwrap(), 1 | 2) && cover.contains(s))
        .count()
}

fn brute_cover(codes: &[KCode]) -> BTreeSet<KCode> {
    let mut cover: BTreeSet<KCode> = all_codes().filter(|s| s.weight() <= 3).collect();
    for &c in codes {
        cover.extend(all_codes().filter(|s| s.distance(c).unwrap() <= 2));
    }
    cover
}

#[test]
fn single_counts_exhaustive() {
    let parity = [Footprint::parity(W)];
    for m in 4..=7 {
        for c in n_class(m, W) {
            let expected = if m <= 5 { 10 } else { 0 };
            assert_eq!(double_weight_count(c, &parity), expected, "{c}");
            assert_eq!(brute_double_weight(c, &brute_cover(&[])), expected);
        }
    }
}

#[test]
fn pair_counts_exhaustive() {
    let expected: BTreeMap<(u32, u32, u32), usize> = [
        ((4, 4, 4), 15),
        ((4, 5, 3), 15),
        ((4, 6, 4), 6),
        ((4, 7, 3), 6),
        ((5, 4, 3), 15),
        ((5, 5, 4), 15),
        ((5, 6, 3), 6),
    ]
    .into();
    let mut seen = BTreeSet::new();
    for a in all_codes().filter(|c| c.weight() >= 4) {
        for b in all_codes().filter(|c| c.weight() >= 4 && *c != a) {
            let p = Placement::new(W, vec![a, b]).unwrap();
            let key = (a.weight(), b.weight(), a.distance(b).unwrap());
            if !p.is_valid() {
                continue;
            }
            let priors = [Footprint::parity(W), Footprint::of(a)];
            let count = double_weight_count(b, &priors);
            assert_eq!(count, brute_double_weight(b, &brute_cover(&[a])));
            if let Some(&e) = expected.get(&key) {
                assert_eq!(count, e, "{key:?}");
                seen.insert(key);
            }
            assert!(!(a.weight() == 5 && b.weight() == 7), "N5 then N7 is invalid");
        }
    }
    assert_eq!(seen.len(), expected.len());
}

/// Double-weight count of `X_3` per realizable class, with the Table-1 values.
#[test]
fn table_one_exhaustive() {
    let table: Vec<(&str, usize)> = [
        ("S446^444 S447^433 S456^343 S546^334", 11),
        (
            "S444^446 S444^464 S445^435 S445^453 S454^345 S544^354 \
             S454^363 S544^336 S455^354 S545^345 S554^435 S554^453",
            15,
        ),
        ("S444^444 S445^433 S454^343 S544^334 S455^334 S545^343 S554^433", 19),
    ]
    .into_iter()
    .flat_map(|(ls, v)| ls.split_whitespace().map(move |l| (l, v)))
    .collect();
    let groups = placements_by_class(W);
    let mut counts: BTreeMap<SClass, BTreeSet<usize>> = BTreeMap::new();
    for (class, members) in &groups {
        for p in members {
            let d = p.data();
            let priors = [Footprint::parity(W), Footprint::of(d[0]), Footprint::of(d[1])];
            counts
                .entry(class.clone())
                .or_default()
                .insert(double_weight_count(d[2], &priors));
        }
    }
    for set in counts.values() {
        assert_eq!(set.len(), 1, "count varies within a class");
    }
    for (label, value) in table {
        let class = SClass::parse(label).unwrap();
        let set = counts.get(&class).unwrap_or_else(|| panic!("{label} not realizable"));
        assert_eq!(set.iter().next(), Some(&value), "{label}");
    }
    for label in ["S445^455", "S454^365", "S544^356", "S554^455"] {
        assert!(!groups.contains_key(&SClass::parse(label).unwrap()), "{label}");
    }
}

#[test]
fn theorems_one_to_three_exhaustive() {
    for a in all_codes() {
        for b in all_codes() {
            let d = a.distance(b).unwrap();
            match theorem1_overlap(a, b) {
                Ok(v) => assert_eq!(v, 6),
                Err(_) => assert_ne!(d, 4),
            }
            match theorem2_overlap(a, b) {
                Ok(v) => assert_eq!(v, 6),
                Err(_) => assert!(d != 3 || a.weight().abs_diff(b.weight()) != 1),
            }
            if a != b && a.weight() >= 4 && b.weight() >= 4 {
                if Placement::new(W, vec![a, b]).unwrap().is_valid() {
                    let ab = a ^ b;
                    assert!(ab.distance(a).unwrap() >= 2 && ab.distance(b).unwrap() >= 2);
                }
            }
        }
    }
}

#[test]
fn guided_enumeration_matches_naive_valid_set() {
    let mut naive = BTreeSet::new();
    naive_search(W, 3, |p| {
        let mut v: Vec<u16> = p.data().iter().map(|k| k.bits()).collect();
        v.sort_unstable();
        naive.insert(v);
        ControlFlow::Continue(())
    });
    let mut guided = BTreeSet::new();
    let config = GuidedConfig {
        pin: None,
        all_tiers: true,
    };
    guided_search(W, 3, &config, |p| {
        assert!(p.is_valid());
        let mut v: Vec<u16> = p.data().iter().map(|k| k.bits()).collect();
        v.sort_unstable();
        guided.insert(v);
        ControlFlow::Continue(())
    });
    assert_eq!(guided, naive);
}

#[test]
fn pinned_search_reaches_fig3_up_to_coordinate_permutation() {
    let target = Placement::from_parity_sets(W, &[&[2, 4, 6, 7], &[2, 3, 5, 7], &[1, 2, 3, 4, 7]])
        .unwrap();
    let config = GuidedConfig {
        pin: Some(SClass::parse("S445^433").unwrap()),
        all_tiers: false,
    };
    let canon = |p: &Placement| canonical(p.data());
    let want = canon(&target);
    let mut found = false;
    guided_search(W, 3, &config, |p| {
        if canon(p) == want {
            found = true;
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    assert!(found);
}

/// Smallest image of the ordered code list under all 7! bit permutations.
fn canonical(codes: &[KCode]) -> Vec<u16> {
    let mut perm: Vec<usize> = (0..7).collect();
    let mut best: Option<Vec<u16>> = None;
    permute(&mut perm, 0, &mut |perm| {
        let img: Vec<u16> = codes
            .iter()
            .map(|c| {
                (0..7).fold(0u16, |acc, i| acc | ((c.bits() >> i & 1) << perm[i]))
            })
            .collect();
        if best.as_ref().map_or(true, |b| img < *b) {
            best = Some(img);
        }
    });
    best.unwrap()
}

fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

#[test]
fn census_is_class_invariant() {
    for rule in [CoverageRule::Strict, CoverageRule::DataTripleYields] {
        let rows = census(W, rule, CensusCheck::Exhaustive).unwrap();
        assert!(rows.iter().all(|r| r.invariant), "{rule}");
        assert!(rows.iter().all(|r| r.checked == r.realizations));
    }
}

#[test]
fn census_reported_families() {
    let rows = census(W, CoverageRule::Strict, CensusCheck::default()).unwrap();
    let get = |l: &str| {
        rows.iter()
            .find(|r| r.class == SClass::parse(l).unwrap())
            .unwrap()
            .counts
    };
    // Strict counts, checked against direct triple enumeration below.
    assert_eq!(get("S444^444"), ClassCounts::new(9, 11, 18, 1));
    assert_eq!(get("S445^433"), ClassCounts::new(11, 13, 23, 1));
    assert_eq!(get("S446^444"), ClassCounts::new(5, 17, 17, 0));
    for r in &rows {
        assert_eq!(r.counts, brute_strict(&r.representative));
    }
}

/// Strict coverage by counting how many ≤3-bit patterns share each syndrome.
fn brute_strict(p: &Placement) -> ClassCounts {
    let bits = p.code_bits();
    let mut hits: BTreeMap<KCode, usize> = BTreeMap::new();
    for s in 0..=3 {
        for t in patterns_of_size(&bits, s) {
            *hits.entry(p.syndrome_of(&t).unwrap()).or_default() += 1;
        }
    }
    let mut c = [0usize; 4];
    for t in patterns_of_size(&bits, 3) {
        if hits[&p.syndrome_of(&t).unwrap()] == 1 {
            let idx = match t.data_count() {
                2 => 0,
                0 => 1,
                1 => 2,
                _ => 3,
            };
            c[idx] += 1;
        }
    }
    ClassCounts::new(c[0], c[1], c[2], c[3])
}

#[test]
fn codec_exhaustive_round_trip_fig4() {
    let p = fig4();
    let plain = build_tables(&p, false).unwrap();
    let full = build_tables(&p, true).unwrap();
    assert_eq!(plain.len(), 55);
    assert_eq!(full.len(), 55 + 49);
    let bits = p.code_bits();
    for data in 0..8 {
        let clean = full.encode(data).unwrap();
        assert_eq!(full.decode(&clean).1, DecodeReport::Clean);
        for s in 1..=3 {
            for t in patterns_of_size(&bits, s) {
                let received = clean.with_pattern(&t);
                for tables in [&plain, &full] {
                    let (out, report) = tables.decode(&received);
                    let assigned = tables.lookup(p.syndrome_of(&t).unwrap()) == Some(t);
                    if s <= 2 {
                        assert!(assigned);
                    }
                    if assigned {
                        assert_eq!(out, clean);
                        assert_eq!(report, DecodeReport::Corrected { pattern: t });
                    }
                }
            }
        }
    }
}

#[test]
fn uncovered_triple_is_detected_or_miscorrected() {
    let p = fig4();
    let tables = build_tables(&p, true).unwrap();
    let report = three_bit_coverage(&p, CoverageRule::DataTripleYields).unwrap();
    let bits = p.code_bits();
    let clean = tables.encode(0b101).unwrap();
    let mut detected = 0;
    for t in patterns_of_size(&bits, 3) {
        if report.is_covered(&t) {
            continue;
        }
        let (out, r) = tables.decode(&clean.with_pattern(&t));
        assert_ne!(out, clean, "{t} must not decode to itself");
        if matches!(r, DecodeReport::Uncorrectable { .. }) {
            detected += 1;
        }
    }
    assert!(detected > 0);
}

#[test]
fn codec_exhaustive_round_trip_four_data_bits() {
    let mut first = None;
    guided_search(W, 4, &GuidedConfig::default(), |p| {
        first = Some(p.clone());
        ControlFlow::Break(())
    });
    let p = first.unwrap();
    let tables = build_tables(&p, false).unwrap();
    assert_eq!(tables.len(), 66);
    let bits = p.code_bits();
    for data in 0..16 {
        let clean = tables.encode(data).unwrap();
        for s in 1..=2 {
            for t in patterns_of_size(&bits, s) {
                assert_eq!(tables.decode(&clean.with_pattern(&t)).0, clean);
            }
        }
    }
}

#[test]
fn burst_census_fig4() {
    let report = three_bit_coverage(&fig4(), CoverageRule::DataTripleYields).unwrap();
    let census = search_orderings(&report).unwrap();
    for shape in [[0, 4, 9], [0, 3, 9], [0, 2, 9]] {
        assert!(census.has_shape(&shape), "{shape:?}");
    }
    assert!(census.reversal_closed());
    let total: u64 = census.shapes.iter().map(|s| s.orderings).sum();
    assert_eq!(total, census.safe_orderings);
    for s in &census.shapes {
        for a in &s.assignments {
            let o = &a.representative;
            assert!(is_burst_safe(o, &report));
            assert!(is_burst_safe(&o.reversed(), &report));
            assert_eq!(o.shape(), s.shape);
            let windows: BTreeSet<_> = kmap_ecc::burst_triples(o).into_iter().collect();
            assert_eq!(windows.len(), 8);
        }
    }
    let quoted = Ordering::parse("X1,P7,P3,P6,X3,P2,P4,P1,P5,X2", 3, 7).unwrap();
    assert!(is_burst_safe(&quoted, &report));
}

#[test]
fn min_parity_pruned_all_widths() {
    use kmap_ecc::coverage::{min_parity_search, MinParityMode};
    let expected = [(8, [56, 280, 0]), (9, [126, 2835, 7560]), (10, [252, 15876, 264600])];
    for (n, stages) in expected {
        let r = min_parity_search(Width::new(n).unwrap(), MinParityMode::Pruned);
        let got: Vec<u64> = r.stages.iter().take(3).map(|s| s.survivors).collect();
        assert_eq!(got, stages, "n={n}");
        assert!(!r.feasible, "n={n}");
        if n > 8 {
            assert!(r.failures.keys().all(|k| k.contains('X')), "{:?}", r.failures);
        }
    }
}

#[test]
fn min_parity_exhaustive_widths() {
    use kmap_ecc::coverage::{corrects_all_triples, min_parity_search, MinParityMode};
    for n in [8, 9] {
        let r = min_parity_search(Width::new(n).unwrap(), MinParityMode::Exhaustive);
        assert!(!r.feasible, "n={n}");
    }
    let r = min_parity_search(Width::new(10).unwrap(), MinParityMode::Exhaustive);
    assert!(corrects_all_triples(r.witness.as_ref().unwrap()));
}

/// No pruning at all: every unordered triple of distinct nonzero codes at
/// n = 8, checked by counting syndromes.
#[test]
fn min_parity_n8_unpruned_oracle() {
    let mut found = 0;
    for a in 1u32..256 {
        for b in a + 1..256 {
            for c in b + 1..256 {
                let data = [a as u16, b as u16, c as u16];
                if distinct_up_to_three(&data, 8) {
                    found += 1;
                }
            }
        }
    }
    assert_eq!(found, 0);
}

fn distinct_up_to_three(data: &[u16; 3], n: u32) -> bool {
    let codes: Vec<u16> = data.iter().copied().chain((0..n).map(|k| 1 << k)).collect();
    let mut seen = vec![false; 1 << n];
    seen[0] = true;
    let len = codes.len();
    for i in 0..len {
        let s = codes[i] as usize;
        if std::mem::replace(&mut seen[s], true) {
            return false;
        }
        for j in i + 1..len {
            let s2 = s ^ codes[j] as usize;
            if std::mem::replace(&mut seen[s2], true) {
                return false;
            }
            for k in j + 1..len {
                if std::mem::replace(&mut seen[s2 ^ codes[k] as usize], true) {
                    return false;
                }
            }
        }
    }
    true
}
