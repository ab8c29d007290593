//! Code-bit identifiers and the error patterns built from them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One bit of a codeword: data bit `X_i` or parity bit `P_k`, both 1-indexed.
///
/// The derived ordering puts every data bit before every parity bit, then
/// sorts by index, which is the canonical label order (`X_1X_3P_2`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CodeBit {
    Data(u8),
    Parity(u8),
}

impl CodeBit {
    pub fn is_data(self) -> bool {
        matches!(self, CodeBit::Data(_))
    }

    pub fn index(self) -> u8 {
        match self {
            CodeBit::Data(i) | CodeBit::Parity(i) => i,
        }
    }

    /// Short form without underscore, as used on the command line (`X1`, `P7`).
    pub fn short_name(self) -> String {
        match self {
            CodeBit::Data(i) => format!("X{i}"),
            CodeBit::Parity(k) => format!("P{k}"),
        }
    }
}

impl fmt::Display for CodeBit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeBit::Data(i) => write!(f, "X_{i}"),
            CodeBit::Parity(k) => write!(f, "P_{k}"),
        }
    }
}

impl std::str::FromStr for CodeBit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s.split_at(s.len().min(1));
        let idx: u8 = rest
            .trim_start_matches('_')
            .parse()
            .map_err(|_| Error::Parse(format!("bad code bit {s:?}")))?;
        if idx == 0 {
            return Err(Error::Parse(format!("code bit index must be ≥ 1 in {s:?}")));
        }
        match kind {
            "X" | "x" => Ok(CodeBit::Data(idx)),
            "P" | "p" => Ok(CodeBit::Parity(idx)),
            _ => Err(Error::Parse(format!("bad code bit {s:?}"))),
        }
    }
}

/// A set of at most three flipped code bits. The empty pattern means
/// "no error" and is labelled `N`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ErrorPattern {
    len: u8,
    members: [CodeBit; 3],
}

pub const MAX_PATTERN_LEN: usize = 3;

impl ErrorPattern {
    pub const NONE: ErrorPattern = ErrorPattern {
        len: 0,
        members: [CodeBit::Data(0); 3],
    };

    pub fn new(bits: &[CodeBit]) -> Result<Self> {
        if bits.len() > MAX_PATTERN_LEN {
            return Err(Error::Precondition(format!(
                "error pattern has {} members, at most {MAX_PATTERN_LEN} allowed",
                bits.len()
            )));
        }
        let mut members = [CodeBit::Data(0); 3];
        members[..bits.len()].copy_from_slice(bits);
        members[..bits.len()].sort_unstable();
        if members[..bits.len()].windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Precondition("repeated code bit in pattern".into()));
        }
        Ok(ErrorPattern {
            len: bits.len() as u8,
            members,
        })
    }

    pub fn single(bit: CodeBit) -> Self {
        ErrorPattern {
            len: 1,
            members: [bit, CodeBit::Data(0), CodeBit::Data(0)],
        }
    }

    pub fn members(&self) -> &[CodeBit] {
        &self.members[..self.len as usize]
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn data_count(&self) -> usize {
        self.members().iter().filter(|b| b.is_data()).count()
    }

    pub fn contains(&self, bit: CodeBit) -> bool {
        self.members().contains(&bit)
    }

    /// Canonical label: members concatenated, data first (`X_2P_7`), `N` if empty.
    pub fn label(&self) -> String {
        if self.is_empty() {
            return "N".to_string();
        }
        self.members().iter().map(|b| b.to_string()).collect()
    }

    /// Parses a label such as `X_1X_3P_6`, `X1P7`, or `N`.
    pub fn parse_label(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "N" {
            return Ok(ErrorPattern::NONE);
        }
        let mut bits = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let next = rest[1..]
                .find(['X', 'P', 'x', 'p'])
                .map(|i| i + 1)
                .unwrap_or(rest.len());
            bits.push(rest[..next].parse()?);
            rest = &rest[next..];
        }
        if bits.is_empty() {
            return Err(Error::Parse("empty pattern label".into()));
        }
        ErrorPattern::new(&bits)
    }

    /// Which three-bit class this pattern belongs to, if it has three members.
    pub fn triple_class(&self) -> Option<TripleClass> {
        if self.len != 3 {
            return None;
        }
        Some(match self.data_count() {
            0 => TripleClass::ParityParityParity,
            1 => TripleClass::DataParityParity,
            2 => TripleClass::DataDataParity,
            _ => TripleClass::DataDataData,
        })
    }
}

impl fmt::Debug for ErrorPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl fmt::Display for ErrorPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for ErrorPattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for ErrorPattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ErrorPattern::parse_label(&s).map_err(serde::de::Error::custom)
    }
}

/// The four compositions a three-bit error can have when there are three
/// data bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TripleClass {
    /// `X_iX_jP_k`
    DataDataParity,
    /// `P_lP_mP_n`
    ParityParityParity,
    /// `X_iP_kP_m`
    DataParityParity,
    /// `X_1X_2X_3`
    DataDataData,
}

impl TripleClass {
    pub const ALL: [TripleClass; 4] = [
        TripleClass::DataDataParity,
        TripleClass::ParityParityParity,
        TripleClass::DataParityParity,
        TripleClass::DataDataData,
    ];

    pub fn label(self) -> &'static str {
        match self {
            TripleClass::DataDataParity => "XiXjPk",
            TripleClass::ParityParityParity => "PlPmPn",
            TripleClass::DataParityParity => "XiPkPm",
            TripleClass::DataDataData => "X1X2X3",
        }
    }
}

/// All patterns of exactly `size` members over `bits`, in lexicographic order
/// of positions within `bits`.
pub fn patterns_of_size(bits: &[CodeBit], size: usize) -> Vec<ErrorPattern> {
    let n = bits.len();
    let mut out = Vec::new();
    match size {
        0 => out.push(ErrorPattern::NONE),
        1 => out.extend(bits.iter().map(|&b| ErrorPattern::single(b))),
        2 => {
            for i in 0..n {
                for j in i + 1..n {
                    out.push(ErrorPattern::new(&[bits[i], bits[j]]).expect("distinct"));
                }
            }
        }
        3 => {
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        out.push(
                            ErrorPattern::new(&[bits[i], bits[j], bits[k]]).expect("distinct"),
                        );
                    }
                }
            }
        }
        _ => {}
    }
    out
}
