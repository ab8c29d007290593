//! Encoder and table-driven decoder for a placement.
//!
//! Parity bit `P_k` is the modulo-2 sum of every data bit `X_i` whose K-code
//! has bit `k` set, so a clean codeword has a zero syndrome and a codeword
//! with error pattern `E` has syndrome `XOR of K-codes of E`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coverage::{three_bit_coverage, CoverageRule};
use crate::error::{Error, Result};
use crate::kcode::{KCode, Width};
use crate::pattern::{CodeBit, ErrorPattern};
use crate::placement::Placement;

pub use crate::pattern::{patterns_of_size, TripleClass};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityMode {
    #[default]
    Even,
    Odd,
}

/// Data bits (bit `i-1` is `X_i`) and parity bits (bit `k-1` is `P_k`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Codeword {
    pub data: u32,
    pub parity: u16,
}

impl Codeword {
    pub fn flip(&mut self, bit: CodeBit) {
        match bit {
            CodeBit::Data(i) => self.data ^= 1 << (i - 1),
            CodeBit::Parity(k) => self.parity ^= 1 << (k - 1),
        }
    }

    pub fn with_pattern(mut self, pattern: &ErrorPattern) -> Codeword {
        for &b in pattern.members() {
            self.flip(b);
        }
        self
    }

    /// Packs the codeword into one integer: `X_1..X_d` in bits `0..d`, then
    /// `P_1..P_n`.
    pub fn pack(&self, d: usize) -> u64 {
        self.data as u64 | (self.parity as u64) << d
    }

    pub fn unpack(value: u64, d: usize, n: usize) -> Result<Codeword> {
        if value >> (d + n) != 0 {
            return Err(Error::ValueOutOfRange {
                value,
                width: (d + n) as u8,
            });
        }
        Ok(Codeword {
            data: (value & ((1 << d) - 1)) as u32,
            parity: (value >> d) as u16,
        })
    }

    /// Bit string in memory order, `X_1` first and `P_n` last.
    pub fn to_bit_string(&self, d: usize, n: usize) -> String {
        let v = self.pack(d);
        (0..d + n)
            .map(|i| if v >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn from_bit_string(s: &str, d: usize, n: usize) -> Result<Codeword> {
        let s = s.trim();
        if s.len() != d + n {
            return Err(Error::Length {
                expected: d + n,
                got: s.len(),
            });
        }
        let mut v = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v |= 1 << i,
                _ => return Err(Error::Parse(format!("unexpected {c:?} in bit string"))),
            }
        }
        Codeword::unpack(v, d, n)
    }

    pub fn to_hex(&self, d: usize) -> String {
        format!("{:x}", self.pack(d))
    }

    pub fn from_hex(s: &str, d: usize, n: usize) -> Result<Codeword> {
        let s = s.trim().trim_start_matches("0x");
        let v = u64::from_str_radix(s, 16).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Codeword::unpack(v, d, n)
    }
}

/// Parity generation and syndrome computation for one placement.
#[derive(Clone, Debug)]
pub struct Codec {
    placement: Placement,
    mode: ParityMode,
    /// For each parity `P_k`, the data bits it covers.
    masks: Vec<u32>,
}

impl Codec {
    pub fn new(placement: Placement) -> Self {
        Codec::with_mode(placement, ParityMode::Even)
    }

    pub fn with_mode(placement: Placement, mode: ParityMode) -> Self {
        let n = placement.width().get() as usize;
        let masks = (0..n)
            .map(|k| {
                placement
                    .data()
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| x.bits() >> k & 1 == 1)
                    .fold(0u32, |m, (i, _)| m | 1 << i)
            })
            .collect();
        Codec {
            placement,
            mode,
            masks,
        }
    }

    pub fn placement(&self) -> &Placement {
        &self.placement
    }

    pub fn mode(&self) -> ParityMode {
        self.mode
    }

    fn parity_of(&self, data: u32) -> u16 {
        let bits = self
            .masks
            .iter()
            .enumerate()
            .fold(0u16, |p, (k, &m)| p | (((data & m).count_ones() & 1) as u16) << k);
        match self.mode {
            ParityMode::Even => bits,
            ParityMode::Odd => bits ^ self.placement.width().mask(),
        }
    }

    pub fn encode(&self, data: u32) -> Result<Codeword> {
        let d = self.placement.data_len();
        if d < 32 && data >> d != 0 {
            return Err(Error::ValueOutOfRange {
                value: data as u64,
                width: d as u8,
            });
        }
        Ok(Codeword {
            data,
            parity: self.parity_of(data),
        })
    }

    pub fn encode_bits(&self, bits: &[bool]) -> Result<Codeword> {
        let d = self.placement.data_len();
        if bits.len() != d {
            return Err(Error::Length {
                expected: d,
                got: bits.len(),
            });
        }
        let data = bits
            .iter()
            .enumerate()
            .fold(0u32, |v, (i, &b)| v | (b as u32) << i);
        self.encode(data)
    }

    /// Received parity XOR recomputed parity; zero iff every check passes.
    pub fn syndrome(&self, received: &Codeword) -> KCode {
        let width = self.placement.width();
        KCode::from_raw(
            (received.parity ^ self.parity_of(received.data)) & width.mask(),
            width,
        )
    }
}

/// Syndrome → error-pattern table for a valid placement.
#[derive(Clone, Debug)]
pub struct CodecTables {
    codec: Codec,
    table: Vec<Option<ErrorPattern>>,
    triples: usize,
    rule: Option<CoverageRule>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DecodeReport {
    Clean,
    Corrected { pattern: ErrorPattern },
    Uncorrectable { syndrome: KCode },
}

impl fmt::Display for DecodeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodeReport::Clean => f.write_str("clean"),
            DecodeReport::Corrected { pattern } => write!(f, "corrected {pattern}"),
            DecodeReport::Uncorrectable { syndrome } => {
                write!(f, "uncorrectable (syndrome {})", syndrome.to_binary_string())
            }
        }
    }
}

/// Builds the decode table: every 1- and 2-bit pattern, plus the covered
/// three-bit patterns under the default coverage rule when `include_triples`.
pub fn build_tables(placement: &Placement, include_triples: bool) -> Result<CodecTables> {
    build_tables_with(
        placement,
        include_triples.then(CoverageRule::default),
        ParityMode::Even,
    )
}

pub fn build_tables_with(
    placement: &Placement,
    triples: Option<CoverageRule>,
    mode: ParityMode,
) -> Result<CodecTables> {
    let occupied = placement.occupied_map().map_err(Error::InvalidPlacement)?;
    let width = placement.width();
    let mut table = vec![None; width.squares()];
    for (s, pattern) in occupied {
        if !pattern.is_empty() {
            table[s.bits() as usize] = Some(pattern);
        }
    }
    let mut count = 0;
    if let Some(rule) = triples {
        let report = three_bit_coverage(placement, rule)?;
        for t in &report.covered {
            let slot = &mut table[t.syndrome.bits() as usize];
            debug_assert!(slot.is_none(), "covered triple on an assigned square");
            *slot = Some(t.pattern);
            count += 1;
        }
    }
    Ok(CodecTables {
        codec: Codec::with_mode(placement.clone(), mode),
        table,
        triples: count,
        rule: triples,
    })
}

impl CodecTables {
    pub fn codec(&self) -> &Codec {
        &self.codec
    }

    pub fn placement(&self) -> &Placement {
        self.codec.placement()
    }

    pub fn triple_rule(&self) -> Option<CoverageRule> {
        self.rule
    }

    /// Number of non-zero syndromes with an assigned pattern.
    pub fn len(&self) -> usize {
        self.table.iter().filter(|e| e.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn triple_count(&self) -> usize {
        self.triples
    }

    pub fn lookup(&self, syndrome: KCode) -> Option<ErrorPattern> {
        self.table.get(syndrome.bits() as usize).copied().flatten()
    }

    /// Assigned entries in ascending syndrome order.
    pub fn entries(&self) -> impl Iterator<Item = (KCode, ErrorPattern)> + '_ {
        let width = self.placement().width();
        self.table
            .iter()
            .enumerate()
            .filter_map(move |(s, e)| e.map(|p| (KCode::from_raw(s as u16, width), p)))
    }

    pub fn encode(&self, data: u32) -> Result<Codeword> {
        self.codec.encode(data)
    }

    pub fn decode(&self, received: &Codeword) -> (Codeword, DecodeReport) {
        let s = self.codec.syndrome(received);
        if s.is_zero() {
            return (*received, DecodeReport::Clean);
        }
        match self.lookup(s) {
            Some(pattern) => (
                received.with_pattern(&pattern),
                DecodeReport::Corrected { pattern },
            ),
            None => (*received, DecodeReport::Uncorrectable { syndrome: s }),
        }
    }

    /// `syndrome,pattern` rows with the syndrome in `b_n..b_1` form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("syndrome,pattern\n");
        for (s, p) in self.entries() {
            out.push_str(&s.to_binary_string());
            out.push(',');
            out.push_str(&p.label());
            out.push('\n');
        }
        out
    }
}

/// Width of a placement's syndrome space; convenience for callers that only
/// hold tables.
pub fn syndrome_width(t: &CodecTables) -> Width {
    t.placement().width()
}
