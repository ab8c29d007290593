//! Three-bit error analysis for placements: which triples a decoder can
//! correct on top of every single and double error, the class census, and the
//! two infeasibility searches (pre-placed parity triples and full triple
//! correction with few parity bits).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::ControlFlow;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kcode::{KCode, Width};
use crate::pattern::{patterns_of_size, CodeBit, ErrorPattern, TripleClass};
use crate::placement::{guided_search, raw_is_valid, GuidedConfig, Placement, SClass};

/// How a free square hit by several triples is resolved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverageRule {
    /// A triple is covered only if no other triple shares its syndrome.
    Strict,
    /// As `Strict`, except an all-data triple gives up its square when exactly
    /// one other triple lands there; that other triple is then covered.
    #[default]
    DataTripleYields,
    /// Every free square hit by at least one triple is used, labelled with the
    /// first such triple in canonical order.
    Assignable,
}

impl CoverageRule {
    pub const ALL: [CoverageRule; 3] = [
        CoverageRule::Strict,
        CoverageRule::DataTripleYields,
        CoverageRule::Assignable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CoverageRule::Strict => "strict",
            CoverageRule::DataTripleYields => "data-triple-yields",
            CoverageRule::Assignable => "assignable",
        }
    }
}

impl fmt::Display for CoverageRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CoverageRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CoverageRule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown coverage rule {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveredTriple {
    pub pattern: ErrorPattern,
    pub syndrome: KCode,
}

/// Per-class counts, in the order `X_iX_jP_k, P_lP_mP_n, X_iP_kP_m, X_1X_2X_3`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassCounts {
    pub data_data_parity: usize,
    pub parity_parity_parity: usize,
    pub data_parity_parity: usize,
    pub data_data_data: usize,
}

impl ClassCounts {
    pub fn new(xxp: usize, ppp: usize, xpp: usize, xxx: usize) -> Self {
        ClassCounts {
            data_data_parity: xxp,
            parity_parity_parity: ppp,
            data_parity_parity: xpp,
            data_data_data: xxx,
        }
    }

    pub fn get(&self, class: TripleClass) -> usize {
        match class {
            TripleClass::DataDataParity => self.data_data_parity,
            TripleClass::ParityParityParity => self.parity_parity_parity,
            TripleClass::DataParityParity => self.data_parity_parity,
            TripleClass::DataDataData => self.data_data_data,
        }
    }

    fn bump(&mut self, class: TripleClass) {
        match class {
            TripleClass::DataDataParity => self.data_data_parity += 1,
            TripleClass::ParityParityParity => self.parity_parity_parity += 1,
            TripleClass::DataParityParity => self.data_parity_parity += 1,
            TripleClass::DataDataData => self.data_data_data += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.data_data_parity + self.parity_parity_parity + self.data_parity_parity + self.data_data_data
    }

    pub fn as_array(&self) -> [usize; 4] {
        TripleClass::ALL.map(|c| self.get(c))
    }
}

impl fmt::Display for ClassCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} = {} + {} + {} + {}",
            self.total(),
            self.data_data_parity,
            self.parity_parity_parity,
            self.data_parity_parity,
            self.data_data_data
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub placement: Placement,
    pub rule: CoverageRule,
    /// Covered triples in ascending syndrome order.
    pub covered: Vec<CoveredTriple>,
    pub counts: ClassCounts,
    pub total: usize,
    /// Squares not used by the zero square or any ≤2-bit pattern.
    pub free_squares: usize,
    /// Free squares hit by at least one triple.
    pub assignable_squares: usize,
}

impl CoverageReport {
    pub fn is_covered(&self, pattern: &ErrorPattern) -> bool {
        self.covered.iter().any(|t| t.pattern == *pattern)
    }
}

/// Classifies every three-bit pattern of a valid placement.
pub fn three_bit_coverage(p: &Placement, rule: CoverageRule) -> Result<CoverageReport> {
    let occupied = p.occupied_map().map_err(Error::InvalidPlacement)?;
    let width = p.width();
    let mut by_syndrome: BTreeMap<KCode, Vec<ErrorPattern>> = BTreeMap::new();
    for t in patterns_of_size(&p.code_bits(), 3) {
        let s = p.syndrome_of(&t)?;
        if !occupied.contains_key(&s) {
            by_syndrome.entry(s).or_default().push(t);
        }
    }
    let mut covered = Vec::new();
    let mut counts = ClassCounts::default();
    for (&syndrome, group) in &by_syndrome {
        let pick = match rule {
            CoverageRule::Strict => (group.len() == 1).then(|| group[0]),
            CoverageRule::DataTripleYields => {
                let mixed: Vec<_> = group.iter().filter(|t| t.data_count() < 3).collect();
                match (mixed.len(), group.len()) {
                    (1, _) => Some(*mixed[0]),
                    (0, 1) => Some(group[0]),
                    _ => None,
                }
            }
            CoverageRule::Assignable => group.iter().min().copied(),
        };
        if let Some(pattern) = pick {
            counts.bump(pattern.triple_class().expect("three members"));
            covered.push(CoveredTriple { pattern, syndrome });
        }
    }
    Ok(CoverageReport {
        placement: p.clone(),
        rule,
        total: counts.total(),
        covered,
        counts,
        free_squares: width.squares() - occupied.len(),
        assignable_squares: by_syndrome.len(),
    })
}

/// One row of the class census.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub class: SClass,
    /// Valid placements realizing the class.
    pub realizations: usize,
    pub representative: Placement,
    pub counts: ClassCounts,
    pub total: usize,
    pub assignable_squares: usize,
    /// Placements whose counts were compared against the representative.
    pub checked: usize,
    /// True when every checked placement gave the same counts.
    pub invariant: bool,
}

/// How many placements per class the census compares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CensusCheck {
    /// Representative plus up to `per_class` seeded random others.
    Sample { seed: u64, per_class: usize },
    Exhaustive,
}

impl Default for CensusCheck {
    fn default() -> Self {
        CensusCheck::Sample {
            seed: 0,
            per_class: 16,
        }
    }
}

/// Every valid 3-data placement at `width`, grouped by class, in search order.
pub fn placements_by_class(width: Width) -> BTreeMap<SClass, Vec<Placement>> {
    let config = GuidedConfig {
        pin: None,
        all_tiers: true,
    };
    let mut groups: BTreeMap<SClass, Vec<Placement>> = BTreeMap::new();
    guided_search(width, 3, &config, |p| {
        groups
            .entry(p.s_class().expect("three data bits"))
            .or_default()
            .push(p.clone());
        ControlFlow::Continue(())
    });
    groups
}

/// Coverage of every realizable class of 3-data placements, sorted by class.
pub fn census(width: Width, rule: CoverageRule, check: CensusCheck) -> Result<Vec<CensusRow>> {
    let groups: Vec<(SClass, Vec<Placement>)> = placements_by_class(width).into_iter().collect();
    groups
        .par_iter()
        .map(|(class, members)| {
            let representative = members[0].clone();
            let base = three_bit_coverage(&representative, rule)?;
            let others: Vec<&Placement> = match check {
                CensusCheck::Exhaustive => members[1..].iter().collect(),
                CensusCheck::Sample { seed, per_class } => {
                    let mut rng = rand::rngs::StdRng::seed_from_u64(
                        seed ^ class_seed(class),
                    );
                    let mut rest: Vec<&Placement> = members[1..].iter().collect();
                    rest.shuffle(&mut rng);
                    rest.truncate(per_class);
                    rest
                }
            };
            let mut invariant = true;
            for q in &others {
                let r = three_bit_coverage(q, rule)?;
                invariant &= r.counts == base.counts && r.assignable_squares == base.assignable_squares;
            }
            Ok(CensusRow {
                class: class.clone(),
                realizations: members.len(),
                representative,
                counts: base.counts,
                total: base.total,
                assignable_squares: base.assignable_squares,
                checked: 1 + others.len(),
                invariant,
            })
        })
        .collect()
}

fn class_seed(class: &SClass) -> u64 {
    class
        .weights
        .iter()
        .chain(&class.distances)
        .fold(0u64, |h, &v| h.wrapping_mul(31).wrapping_add(v as u64))
}

/// Writes census rows as CSV.
pub fn census_csv(rows: &[CensusRow]) -> String {
    let mut out = String::from(
        "class,total,xixjpk,plpmpn,xipkpm,x1x2x3,assignable,realizations,checked,invariant\n",
    );
    for r in rows {
        let [a, b, c, d] = r.counts.as_array();
        out.push_str(&format!(
            "{},{},{a},{b},{c},{d},{},{},{},{}\n",
            r.class.label(),
            r.total,
            r.assignable_squares,
            r.realizations,
            r.checked,
            r.invariant
        ));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCount {
    pub stage: String,
    pub survivors: u64,
}

fn stage(name: &str, survivors: usize) -> StageCount {
    StageCount {
        stage: name.to_string(),
        survivors: survivors as u64,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem4Report {
    pub n: u32,
    pub stages: Vec<StageCount>,
    /// Placements keeping all ≤2-bit syndromes and all parity triples distinct.
    pub solutions: Vec<Placement>,
    pub impossible: bool,
}

/// Exhaustive search for 3-data placements whose ≤2-bit syndromes avoid every
/// parity-triple square `P_lP_mP_n` (weight exactly 3).
pub fn theorem4_check(width: Width) -> Theorem4Report {
    let n = width.get();
    let mask = width.mask();
    let clear_of_triples = |s: u16| s.count_ones() != 3;
    let singles: Vec<u16> = (1..=mask)
        .filter(|&x| {
            raw_is_valid(width, &[x])
                && clear_of_triples(x)
                && (0..n).all(|k| clear_of_triples(x ^ (1 << k)))
        })
        .collect();
    let mut pairs = Vec::new();
    for (i, &a) in singles.iter().enumerate() {
        for &b in &singles[i + 1..] {
            if clear_of_triples(a ^ b) && raw_is_valid(width, &[a, b]) {
                pairs.push((a, b));
            }
        }
    }
    let mut solutions = Vec::new();
    for &(a, b) in &pairs {
        for &c in singles.iter().filter(|&&c| c > b) {
            if clear_of_triples(a ^ c)
                && clear_of_triples(b ^ c)
                && raw_is_valid(width, &[a, b, c])
            {
                solutions.push(Placement::from_values(width, &[a as u32, b as u32, c as u32]).expect("in range"));
            }
        }
    }
    Theorem4Report {
        n: n as u32,
        stages: vec![
            stage("single data bit", singles.len()),
            stage("pairs", pairs.len()),
            stage("triples", solutions.len()),
        ],
        impossible: solutions.is_empty(),
        solutions,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MinParityMode {
    /// Every `X_i` of weight 5, pairwise distance at least 5.
    Pruned,
    /// Necessary conditions only: weight ≥ 6, pairwise distance ≥ 5, and
    /// `X_1X_2X_3` of weight ≥ 4.
    Exhaustive,
}

impl std::str::FromStr for MinParityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pruned" => Ok(MinParityMode::Pruned),
            "exhaustive" => Ok(MinParityMode::Exhaustive),
            _ => Err(Error::Parse(format!("unknown search mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinParityReport {
    pub n: u32,
    pub mode: MinParityMode,
    pub stages: Vec<StageCount>,
    pub feasible: bool,
    /// First placement in search order that corrects every ≤3-bit error.
    pub witness: Option<Placement>,
    /// Candidates rejected at the full check, keyed by the composition of
    /// the first colliding pair, e.g. `XPP=PPP`.
    pub failures: BTreeMap<String, u64>,
}

/// Searches for a 3-data placement on `n` parity bits whose 1-, 2- and
/// 3-bit syndromes are all distinct.
pub fn min_parity_search(width: Width, mode: MinParityMode) -> MinParityReport {
    let n = width.get();
    let mask = width.mask();
    let singles: Vec<u16> = (1..=mask)
        .filter(|x| match mode {
            MinParityMode::Pruned => x.count_ones() == 5,
            MinParityMode::Exhaustive => x.count_ones() >= 6,
        })
        .collect();
    let far = |a: u16, b: u16| (a ^ b).count_ones() >= 5;
    let mut pairs = Vec::new();
    for (i, &a) in singles.iter().enumerate() {
        for &b in &singles[i + 1..] {
            if far(a, b) {
                pairs.push((a, b));
            }
        }
    }
    let triples: Vec<[u16; 3]> = pairs
        .par_iter()
        .flat_map_iter(|&(a, b)| {
            singles
                .iter()
                .filter(move |&&c| c > b && far(a, c) && far(b, c))
                .filter(move |&&c| mode == MinParityMode::Pruned || (a ^ b ^ c).count_ones() >= 4)
                .map(move |&c| [a, b, c])
        })
        .collect();

    let bits: Vec<CodeBit> = (1..=3u8)
        .map(CodeBit::Data)
        .chain((1..=n).map(CodeBit::Parity))
        .collect();
    let patterns: Vec<ErrorPattern> = (0..=3).flat_map(|s| patterns_of_size(&bits, s)).collect();
    let outcomes: Vec<Option<String>> = triples
        .par_iter()
        .map_init(
            || vec![u32::MAX; width.squares()],
            |seen, data| first_collision(width, data, &patterns, seen),
        )
        .collect();

    let mut failures = BTreeMap::new();
    let mut witness = None;
    let mut passed = 0;
    for (t, o) in triples.iter().zip(&outcomes) {
        match o {
            Some(kind) => *failures.entry(kind.clone()).or_insert(0) += 1,
            None => {
                passed += 1;
                if witness.is_none() {
                    witness = Some(
                        Placement::from_values(width, &t.map(|v| v as u32)).expect("in range"),
                    );
                }
            }
        }
    }
    let (s1, s2, s3) = match mode {
        MinParityMode::Pruned => ("weight 5", "pairwise distance >= 5", "triples"),
        MinParityMode::Exhaustive => (
            "weight >= 6",
            "pairwise distance >= 5",
            "triples with X1X2X3 weight >= 4",
        ),
    };
    MinParityReport {
        n: n as u32,
        mode,
        stages: vec![
            stage(s1, singles.len()),
            stage(s2, pairs.len()),
            stage(s3, triples.len()),
            stage("all <=3-bit syndromes distinct", passed),
        ],
        feasible: witness.is_some(),
        witness,
        failures,
    }
}

/// Composition of the first pair of patterns (in canonical order) sharing a
/// syndrome, or `None` if all are distinct. `seen` must be all `u32::MAX` on
/// entry and is restored before returning.
fn first_collision(
    width: Width,
    data: &[u16; 3],
    patterns: &[ErrorPattern],
    seen: &mut [u32],
) -> Option<String> {
    let code = |b: &CodeBit| match *b {
        CodeBit::Data(i) => data[i as usize - 1],
        CodeBit::Parity(k) => 1 << (k - 1),
    };
    let mut touched = Vec::with_capacity(patterns.len());
    let mut result = None;
    for (idx, p) in patterns.iter().enumerate() {
        let s = p.members().iter().fold(0u16, |acc, b| acc ^ code(b)) & width.mask();
        let slot = &mut seen[s as usize];
        if *slot != u32::MAX {
            result = Some(format!(
                "{}={}",
                composition(&patterns[*slot as usize]),
                composition(p)
            ));
            break;
        }
        *slot = idx as u32;
        touched.push(s);
    }
    for s in touched {
        seen[s as usize] = u32::MAX;
    }
    result
}

fn composition(p: &ErrorPattern) -> String {
    if p.is_empty() {
        return "N".into();
    }
    let x = p.data_count();
    "X".repeat(x) + &"P".repeat(p.len() - x)
}

/// Brute-force reference for the full check: every ≤3-bit syndrome distinct.
pub fn corrects_all_triples(p: &Placement) -> bool {
    let bits = p.code_bits();
    let mut seen = HashMap::new();
    (0..=3)
        .flat_map(|s| patterns_of_size(&bits, s))
        .all(|t| seen.insert(p.syndrome_of(&t).expect("own bits"), t).is_none())
}
