//! Transmission orderings and three-bit burst safety.
//!
//! A burst of length three flips three consecutive symbols on the wire. An
//! ordering is burst-safe when every such window is a covered error pattern,
//! so the decoder corrects any single burst.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::coverage::CoverageReport;
use crate::error::{Error, Result};
use crate::pattern::{CodeBit, ErrorPattern};

pub const BURST_LEN: usize = 3;

/// Largest code length `search_orderings` accepts (12! orderings).
pub const MAX_SEARCH_LEN: usize = 12;

/// A permutation of the code bits giving wire order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ordering {
    sequence: Vec<CodeBit>,
}

impl Ordering {
    /// Checks that `sequence` is a permutation of `X_1..X_d, P_1..P_n`.
    pub fn new(sequence: Vec<CodeBit>, d: usize, n: usize) -> Result<Self> {
        if sequence.len() != d + n {
            return Err(Error::Length {
                expected: d + n,
                got: sequence.len(),
            });
        }
        let mut sorted = sequence.clone();
        sorted.sort_unstable();
        let expected: Vec<CodeBit> = (1..=d as u8)
            .map(CodeBit::Data)
            .chain((1..=n as u8).map(CodeBit::Parity))
            .collect();
        if sorted != expected {
            return Err(Error::Parse(format!(
                "ordering must use each of X_1..X_{d} and P_1..P_{n} exactly once"
            )));
        }
        Ok(Ordering { sequence })
    }

    /// Parses `X1,P7,P3,...` or the concatenated `X_1P_7P_3...` form.
    pub fn parse(s: &str, d: usize, n: usize) -> Result<Self> {
        let s = s.trim();
        let bits: Vec<CodeBit> = if s.contains(',') || s.contains(char::is_whitespace) {
            s.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(str::parse)
                .collect::<Result<_>>()?
        } else {
            let mut out = Vec::new();
            let mut rest = s;
            while !rest.is_empty() {
                let next = rest[1..]
                    .find(['X', 'P', 'x', 'p'])
                    .map(|i| i + 1)
                    .unwrap_or(rest.len());
                out.push(rest[..next].parse()?);
                rest = &rest[next..];
            }
            out
        };
        Ordering::new(bits, d, n)
    }

    pub fn sequence(&self) -> &[CodeBit] {
        &self.sequence
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn reversed(&self) -> Ordering {
        let mut sequence = self.sequence.clone();
        sequence.reverse();
        Ordering { sequence }
    }

    /// Sorted positions of the data symbols.
    pub fn shape(&self) -> Vec<usize> {
        self.sequence
            .iter()
            .enumerate()
            .filter(|(_, b)| b.is_data())
            .map(|(i, _)| i)
            .collect()
    }

    /// Data indices in wire order.
    pub fn data_order(&self) -> Vec<u8> {
        self.sequence
            .iter()
            .filter(|b| b.is_data())
            .map(|b| b.index())
            .collect()
    }

    /// `X1,P7,P3,...`
    pub fn to_short_string(&self) -> String {
        self.sequence
            .iter()
            .map(|b| b.short_name())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.sequence {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl Serialize for Ordering {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_short_string())
    }
}

/// The consecutive width-3 windows, without wraparound.
pub fn burst_triples(o: &Ordering) -> Vec<ErrorPattern> {
    o.sequence
        .windows(BURST_LEN)
        .map(|w| ErrorPattern::new(w).expect("distinct symbols"))
        .collect()
}

/// First window (index, pattern) that is not covered.
pub fn first_unsafe_window(o: &Ordering, report: &CoverageReport) -> Option<(usize, ErrorPattern)> {
    burst_triples(o)
        .into_iter()
        .enumerate()
        .find(|(_, t)| !report.is_covered(t))
}

pub fn is_burst_safe(o: &Ordering, report: &CoverageReport) -> bool {
    first_unsafe_window(o, report).is_none()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssignmentEntry {
    /// Data indices in wire order, e.g. `[1, 3, 2]`.
    pub data_order: Vec<u8>,
    pub orderings: u64,
    /// Lexicographically first safe ordering with this shape and assignment.
    pub representative: Ordering,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShapeEntry {
    pub shape: Vec<usize>,
    pub orderings: u64,
    pub assignments: Vec<AssignmentEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BurstCensus {
    pub code_len: usize,
    pub safe_orderings: u64,
    pub shapes: Vec<ShapeEntry>,
}

impl BurstCensus {
    pub fn has_shape(&self, shape: &[usize]) -> bool {
        self.shapes.iter().any(|s| s.shape == shape)
    }

    /// True when the mirror `{len-1-s}` of every shape is also present.
    pub fn reversal_closed(&self) -> bool {
        self.shapes.iter().all(|s| {
            let mut m: Vec<usize> = s.shape.iter().map(|&p| self.code_len - 1 - p).collect();
            m.sort_unstable();
            self.has_shape(&m)
        })
    }
}

type Tally = BTreeMap<(Vec<usize>, Vec<u8>), (u64, Vec<usize>)>;

/// Enumerates every burst-safe ordering of the report's placement.
///
/// Orderings are built left to right and a prefix is abandoned as soon as
/// its last window is uncovered. Work is split by first symbol and merged in
/// symbol order, so the result does not depend on the thread count.
pub fn search_orderings(report: &CoverageReport) -> Result<BurstCensus> {
    let bits = report.placement.code_bits();
    let len = bits.len();
    if !(BURST_LEN..=MAX_SEARCH_LEN).contains(&len) {
        return Err(Error::Precondition(format!(
            "ordering search supports code lengths {BURST_LEN}..={MAX_SEARCH_LEN}, got {len}"
        )));
    }
    let index = |b: CodeBit| bits.iter().position(|&x| x == b).expect("own bit");
    let mut covered = vec![false; len * len * len];
    for t in &report.covered {
        let m: Vec<usize> = t.pattern.members().iter().map(|&b| index(b)).collect();
        for (a, b, c) in [
            (m[0], m[1], m[2]),
            (m[0], m[2], m[1]),
            (m[1], m[0], m[2]),
            (m[1], m[2], m[0]),
            (m[2], m[0], m[1]),
            (m[2], m[1], m[0]),
        ] {
            covered[(a * len + b) * len + c] = true;
        }
    }
    let is_data: Vec<bool> = bits.iter().map(|b| b.is_data()).collect();

    let partials: Vec<Tally> = (0..len)
        .into_par_iter()
        .map(|first| {
            let mut tally = Tally::new();
            let mut seq = vec![first];
            let mut used = 1u32 << first;
            extend(&mut seq, &mut used, len, &covered, &is_data, &bits, &mut tally);
            tally
        })
        .collect();

    let mut merged = Tally::new();
    for part in partials {
        for (key, (count, rep)) in part {
            merged
                .entry(key)
                .and_modify(|e| e.0 += count)
                .or_insert((count, rep));
        }
    }
    let mut shapes: BTreeMap<Vec<usize>, ShapeEntry> = BTreeMap::new();
    let mut safe = 0;
    for ((shape, data_order), (count, rep)) in merged {
        safe += count;
        let entry = shapes.entry(shape.clone()).or_insert_with(|| ShapeEntry {
            shape,
            orderings: 0,
            assignments: Vec::new(),
        });
        entry.orderings += count;
        entry.assignments.push(AssignmentEntry {
            data_order,
            orderings: count,
            representative: Ordering {
                sequence: rep.iter().map(|&i| bits[i]).collect(),
            },
        });
    }
    Ok(BurstCensus {
        code_len: len,
        safe_orderings: safe,
        shapes: shapes.into_values().collect(),
    })
}

fn extend(
    seq: &mut Vec<usize>,
    used: &mut u32,
    len: usize,
    covered: &[bool],
    is_data: &[bool],
    bits: &[CodeBit],
    tally: &mut Tally,
) {
    if seq.len() == len {
        let shape: Vec<usize> = (0..len).filter(|&i| is_data[seq[i]]).collect();
        let order: Vec<u8> = seq
            .iter()
            .filter(|&&i| is_data[i])
            .map(|&i| bits[i].index())
            .collect();
        tally
            .entry((shape, order))
            .and_modify(|e| e.0 += 1)
            .or_insert_with(|| (1, seq.clone()));
        return;
    }
    for next in 0..len {
        if *used >> next & 1 == 1 {
            continue;
        }
        let k = seq.len();
        if k >= 2 && !covered[(seq[k - 2] * len + seq[k - 1]) * len + next] {
            continue;
        }
        seq.push(next);
        *used |= 1 << next;
        extend(seq, used, len, covered, is_data, bits, tally);
        *used &= !(1 << next);
        seq.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::{three_bit_coverage, CoverageRule};
    use crate::kcode::Width;
    use crate::placement::Placement;

    fn fig4_report() -> CoverageReport {
        let p = Placement::from_parity_sets(
            Width::SEVEN,
            &[&[2, 4, 6, 7], &[2, 3, 5, 7], &[1, 2, 3, 4, 5, 6, 7]],
        )
        .unwrap();
        three_bit_coverage(&p, CoverageRule::default()).unwrap()
    }

    #[test]
    fn windows_of_quoted_ordering() {
        let o = Ordering::parse("X_1P_7P_3P_6X_3P_2P_4P_1P_5X_2", 3, 7).unwrap();
        let t = burst_triples(&o);
        assert_eq!(t.len(), 8);
        assert_eq!(t[0].label(), "X_1P_3P_7");
        assert_eq!(t[7].label(), "X_2P_1P_5");
        let mut r = burst_triples(&o.reversed());
        r.reverse();
        assert_eq!(r, t);
    }

    #[test]
    fn parse_forms_agree() {
        let a = Ordering::parse("X1,P7,P3,P6,X3,P2,P4,P1,P5,X2", 3, 7).unwrap();
        let b = Ordering::parse("X_1P_7P_3P_6X_3P_2P_4P_1P_5X_2", 3, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_short_string(), "X1,P7,P3,P6,X3,P2,P4,P1,P5,X2");
        assert_eq!(a.shape(), vec![0, 4, 9]);
        assert_eq!(a.data_order(), vec![1, 3, 2]);
        assert!(Ordering::parse("X1,P7", 3, 7).is_err());
        assert!(Ordering::parse("X1,X1,P3,P6,X3,P2,P4,P1,P5,X2", 3, 7).is_err());
        assert!(Ordering::parse("X1,P8,P3,P6,X3,P2,P4,P1,P5,X2", 3, 7).is_err());
    }

    #[test]
    fn quoted_orderings_are_safe() {
        let r = fig4_report();
        for s in [
            "X_1P_7P_3P_6X_3P_2P_4P_1P_5X_2",
            "X_1P_2P_5X_3P_4P_3P_1P_6P_7X_2",
            "X_2P_5X_3P_2P_4P_3P_7P_6P_1X_1",
        ] {
            let o = Ordering::parse(s, 3, 7).unwrap();
            assert!(is_burst_safe(&o, &r), "{s}");
            assert!(is_burst_safe(&o.reversed(), &r));
        }
        let bad = Ordering::parse("X1,X2,X3,P1,P2,P3,P4,P5,P6,P7", 3, 7).unwrap();
        let (i, w) = first_unsafe_window(&bad, &r).unwrap();
        assert_eq!((i, w.label().as_str()), (0, "X_1X_2X_3"));
    }

    #[test]
    fn small_search_matches_brute_force() {
        // Two data bits on six parity bits: 8! orderings, checked directly.
        let p = Placement::from_values(Width::new(6).unwrap(), &[0b111100, 0b001111]).unwrap();
        assert!(p.is_valid());
        let report = three_bit_coverage(&p, CoverageRule::Strict).unwrap();
        let census = search_orderings(&report).unwrap();
        let bits = p.code_bits();
        let mut expected = 0u64;
        let mut perm: Vec<usize> = (0..bits.len()).collect();
        permute(&mut perm, 0, &mut |perm| {
            let o = Ordering {
                sequence: perm.iter().map(|&i| bits[i]).collect(),
            };
            if is_burst_safe(&o, &report) {
                expected += 1;
            }
        });
        assert_eq!(census.safe_orderings, expected);
        assert!(census.reversal_closed());
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
}
