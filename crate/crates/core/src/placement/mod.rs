//! Placements of data-bit K-codes on the map.
//!
//! A placement fixes the K-code `X_i` of every data bit. The syndrome of an
//! error pattern is the XOR of its members' K-codes (`X_i` for data bits,
//! `e_k` for parity bits). A placement is valid when every pattern of at
//! most two bits lands on its own square; [`Placement::occupied_map`] is the
//! single source of truth for that.

mod footprint;
mod search;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kcode::{KCode, SquareSet, Width};
use crate::pattern::{patterns_of_size, CodeBit, ErrorPattern};

pub use footprint::{
    double_weight_count, forbidden_squares, sweep_theorem1, sweep_theorem2, sweep_theorem3,
    theorem1_overlap, theorem2_overlap, Footprint, PairSweep,
};
pub use search::{
    compare_first, guided_search, naive_search, GuidedConfig, SearchComparison, SearchStats,
};

/// Data K-codes `X_1..X_d` over `n` parity bits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PlacementFile", into = "PlacementFile")]
pub struct Placement {
    width: Width,
    data: Vec<KCode>,
}

/// On-disk form: `{"n": 7, "data": [106, 86, 79]}`.
#[derive(Serialize, Deserialize)]
struct PlacementFile {
    n: u32,
    data: Vec<u32>,
}

impl TryFrom<PlacementFile> for Placement {
    type Error = Error;

    fn try_from(f: PlacementFile) -> Result<Self> {
        Placement::from_values(Width::new(f.n)?, &f.data)
    }
}

impl From<Placement> for PlacementFile {
    fn from(p: Placement) -> Self {
        PlacementFile {
            n: p.width.get() as u32,
            data: p.data.iter().map(|k| k.bits() as u32).collect(),
        }
    }
}

/// Upper bound on data bits so a codeword fits in 32 bits.
pub const MAX_DATA_BITS: usize = 16;

impl Placement {
    pub fn new(width: Width, data: Vec<KCode>) -> Result<Self> {
        if data.len() > MAX_DATA_BITS {
            return Err(Error::Precondition(format!(
                "{} data bits, at most {MAX_DATA_BITS} supported",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|k| k.width() != width) {
            return Err(Error::WidthMismatch {
                left: bad.width().get(),
                right: width.get(),
            });
        }
        Ok(Placement { width, data })
    }

    pub fn from_values(width: Width, values: &[u32]) -> Result<Self> {
        let data = values
            .iter()
            .map(|&v| KCode::new(v, width))
            .collect::<Result<Vec<_>>>()?;
        Placement::new(width, data)
    }

    /// Placement given as parity index sets, e.g. `&[&[2, 4, 6, 7], &[2, 3, 5, 7]]`.
    pub fn from_parity_sets(width: Width, sets: &[&[u32]]) -> Result<Self> {
        let data = sets
            .iter()
            .map(|s| KCode::from_parities(s, width))
            .collect::<Result<Vec<_>>>()?;
        Placement::new(width, data)
    }

    pub fn width(&self) -> Width {
        self.width
    }

    pub fn data(&self) -> &[KCode] {
        &self.data
    }

    pub fn data_len(&self) -> usize {
        self.data.len()
    }

    /// Total code length `d + n`.
    pub fn code_len(&self) -> usize {
        self.data.len() + self.width.get() as usize
    }

    /// `X_1..X_d` then `P_1..P_n`.
    pub fn code_bits(&self) -> Vec<CodeBit> {
        (1..=self.data.len() as u8)
            .map(CodeBit::Data)
            .chain((1..=self.width.get()).map(CodeBit::Parity))
            .collect()
    }

    pub fn kcode_of(&self, bit: CodeBit) -> Result<KCode> {
        match bit {
            CodeBit::Data(i) => self
                .data
                .get((i as usize).wrapping_sub(1))
                .copied()
                .ok_or(Error::DataIndex {
                    index: i as u32,
                    count: self.data.len(),
                }),
            CodeBit::Parity(k) => KCode::unit(k as u32, self.width),
        }
    }

    /// Syndrome of a pattern: XOR of its members' K-codes.
    pub fn syndrome_of(&self, pattern: &ErrorPattern) -> Result<KCode> {
        pattern
            .members()
            .iter()
            .try_fold(KCode::zero(self.width), |acc, &b| Ok(acc ^ self.kcode_of(b)?))
    }

    /// All patterns of size 0, 1 and 2, in that order.
    pub fn low_patterns(&self) -> Vec<ErrorPattern> {
        let bits = self.code_bits();
        (0..=2).flat_map(|s| patterns_of_size(&bits, s)).collect()
    }

    /// Assigns the zero square, every single error, and every double error to
    /// its syndrome, or reports every syndrome that two patterns share.
    pub fn occupied_map(&self) -> std::result::Result<BTreeMap<KCode, ErrorPattern>, CollisionReport> {
        let mut map = BTreeMap::new();
        let mut collisions = Vec::new();
        for pattern in self.low_patterns() {
            let s = self.syndrome_of(&pattern).expect("pattern built from own bits");
            match map.get(&s) {
                Some(&first) => collisions.push(Collision {
                    syndrome: s,
                    first,
                    second: pattern,
                }),
                None => {
                    map.insert(s, pattern);
                }
            }
        }
        if collisions.is_empty() {
            Ok(map)
        } else {
            Err(CollisionReport { collisions })
        }
    }

    /// True iff all `1 + (d+n) + binomial(d+n, 2)` syndromes are distinct.
    pub fn is_valid(&self) -> bool {
        let raw: Vec<u16> = self.data.iter().map(|k| k.bits()).collect();
        raw_is_valid(self.width, &raw)
    }

    /// Class descriptor of the first (up to three) data bits.
    pub fn s_class(&self) -> Option<SClass> {
        if self.data.is_empty() {
            return None;
        }
        Some(SClass::of(&self.data[..self.data.len().min(3)]))
    }

    pub fn with_data(&self, extra: KCode) -> Result<Placement> {
        let mut data = self.data.clone();
        data.push(extra);
        Placement::new(self.width, data)
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} [", self.width)?;
        for (i, k) in self.data.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "X_{}={}", i + 1, k)?;
        }
        f.write_str("]")
    }
}

/// Validity on raw words; used on hot search paths.
pub(crate) fn raw_is_valid(width: Width, data: &[u16]) -> bool {
    let mut seen = SquareSet::new(width);
    seen.insert_raw(0);
    let codes: Vec<u16> = data
        .iter()
        .copied()
        .chain((0..width.get()).map(|k| 1u16 << k))
        .collect();
    for &c in &codes {
        if !seen.insert_raw(c) {
            return false;
        }
    }
    for i in 0..codes.len() {
        for j in i + 1..codes.len() {
            if !seen.insert_raw(codes[i] ^ codes[j]) {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collision {
    pub syndrome: KCode,
    pub first: ErrorPattern,
    pub second: ErrorPattern,
}

/// Every pair of ≤2-bit patterns that share a syndrome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionReport {
    pub collisions: Vec<Collision>,
}

impl fmt::Display for CollisionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} collision(s)", self.collisions.len())?;
        for c in self.collisions.iter().take(4) {
            write!(f, "; {} and {} on {}", c.first, c.second, c.syndrome)?;
        }
        if self.collisions.len() > 4 {
            f.write_str("; ...")?;
        }
        Ok(())
    }
}

/// `S_{ijk}^{pqr}`: weight classes of `X_1..X_3` and their pairwise
/// distances `d(X_1,X_2), d(X_1,X_3), d(X_2,X_3)`. Shorter forms
/// (`S_i`, `S_{ij}^p`) describe partial placements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SClass {
    pub weights: Vec<u32>,
    pub distances: Vec<u32>,
}

impl SClass {
    pub fn of(codes: &[KCode]) -> SClass {
        let weights = codes.iter().map(|k| k.weight()).collect();
        let mut distances = Vec::new();
        for i in 0..codes.len() {
            for j in i + 1..codes.len() {
                distances.push(codes[i].distance(codes[j]).expect("same width"));
            }
        }
        SClass { weights, distances }
    }

    pub fn new(weights: Vec<u32>, distances: Vec<u32>) -> Result<SClass> {
        let k = weights.len();
        if !(1..=3).contains(&k) || distances.len() != k * (k - 1) / 2 {
            return Err(Error::Parse(format!(
                "{} weights need {} distances, got {}",
                k,
                k * k.saturating_sub(1) / 2,
                distances.len()
            )));
        }
        Ok(SClass { weights, distances })
    }

    /// True if the first codes of `codes` realize this class.
    pub fn matches_prefix(&self, codes: &[KCode]) -> bool {
        let m = codes.len().min(self.weights.len());
        if codes[..m]
            .iter()
            .zip(&self.weights)
            .any(|(c, &w)| c.weight() != w)
        {
            return false;
        }
        let mut idx = 0;
        for i in 0..self.weights.len() {
            for j in i + 1..self.weights.len() {
                if j < m && codes[i].distance(codes[j]).ok() != Some(self.distances[idx]) {
                    return false;
                }
                idx += 1;
            }
        }
        true
    }

    /// `S_{445}^{433}` form.
    pub fn label(&self) -> String {
        let w: String = self.weights.iter().map(|w| w.to_string()).collect();
        if self.distances.is_empty() {
            return format!("S_{{{w}}}");
        }
        let d: String = self.distances.iter().map(|d| d.to_string()).collect();
        format!("S_{{{w}}}^{{{d}}}")
    }

    /// Parses `S_{445}^{433}`, `S445^433`, or `S4`.
    pub fn parse(s: &str) -> Result<SClass> {
        let cleaned: String = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, '{' | '}' | '_'))
            .collect();
        let body = cleaned
            .strip_prefix('S')
            .ok_or_else(|| Error::Parse(format!("class label {s:?} must start with S")))?;
        let (w, d) = body.split_once('^').unwrap_or((body, ""));
        let digits = |t: &str| -> Result<Vec<u32>> {
            t.chars()
                .map(|c| {
                    c.to_digit(10)
                        .ok_or_else(|| Error::Parse(format!("bad digit {c:?} in {s:?}")))
                })
                .collect()
        };
        SClass::new(digits(w)?, digits(d)?)
    }
}

impl fmt::Display for SClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}
