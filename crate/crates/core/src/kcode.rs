//! Syndrome vectors ("K-codes") and the Gray-coded map they live on.
//!
//! A [`KCode`] is an `n`-bit word where bit `k` (1-indexed) records whether
//! parity check `P_k` participates. Every square of an `n`-variable
//! Karnaugh map has exactly one K-code, and two squares are adjacent on the
//! map iff their K-codes are at Hamming distance one.

use std::fmt;
use std::ops::BitXor;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_WIDTH: u8 = 4;
pub const MAX_WIDTH: u8 = 16;

/// Number of parity bits of a map, `4 ≤ n ≤ 16`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Width(u8);

impl Width {
    /// The seven-parity map used throughout the construction.
    pub const SEVEN: Width = Width(7);

    pub fn new(n: u32) -> Result<Self> {
        if (MIN_WIDTH as u32..=MAX_WIDTH as u32).contains(&n) {
            Ok(Width(n as u8))
        } else {
            Err(Error::InvalidWidth(n))
        }
    }

    #[inline]
    pub fn get(self) -> u8 {
        self.0
    }

    /// Number of squares on the map, `2^n`.
    #[inline]
    pub fn squares(self) -> usize {
        1usize << self.0
    }

    #[inline]
    pub fn mask(self) -> u16 {
        ((1u32 << self.0) - 1) as u16
    }
}

impl TryFrom<u32> for Width {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        Width::new(n)
    }
}

impl From<Width> for u32 {
    fn from(w: Width) -> u32 {
        w.0 as u32
    }
}

impl fmt::Display for Width {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The label of one map square.
///
/// Ordering is by numeric value of the word; all emitted sets in this crate
/// are sorted that way.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawKCode", into = "RawKCode")]
pub struct KCode {
    bits: u16,
    width: Width,
}

#[derive(Serialize, Deserialize)]
struct RawKCode {
    value: u32,
    width: u32,
}

impl TryFrom<RawKCode> for KCode {
    type Error = Error;

    fn try_from(raw: RawKCode) -> Result<Self> {
        KCode::new(raw.value, Width::new(raw.width)?)
    }
}

impl From<KCode> for RawKCode {
    fn from(k: KCode) -> Self {
        RawKCode {
            value: k.bits as u32,
            width: k.width.0 as u32,
        }
    }
}

impl PartialOrd for KCode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for KCode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.bits, self.width).cmp(&(other.bits, other.width))
    }
}

impl KCode {
    pub fn new(value: u32, width: Width) -> Result<Self> {
        if value > width.mask() as u32 {
            return Err(Error::ValueOutOfRange {
                value: value as u64,
                width: width.get(),
            });
        }
        Ok(KCode {
            bits: value as u16,
            width,
        })
    }

    /// Builds a code from raw bits that are already known to fit.
    #[inline]
    pub(crate) fn from_raw(bits: u16, width: Width) -> Self {
        debug_assert!(bits <= width.mask());
        KCode { bits, width }
    }

    pub fn zero(width: Width) -> Self {
        KCode { bits: 0, width }
    }

    /// The unit vector `e_k`: the square of a single error in `P_k`.
    pub fn unit(k: u32, width: Width) -> Result<Self> {
        check_parity_index(k, width)?;
        Ok(KCode {
            bits: 1 << (k - 1),
            width,
        })
    }

    /// Builds a code from the set of participating parity indices.
    pub fn from_parities(parities: &[u32], width: Width) -> Result<Self> {
        let mut bits = 0u16;
        for &k in parities {
            check_parity_index(k, width)?;
            bits |= 1 << (k - 1);
        }
        Ok(KCode { bits, width })
    }

    #[inline]
    pub fn bits(self) -> u16 {
        self.bits
    }

    #[inline]
    pub fn width(self) -> Width {
        self.width
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    /// Number of set bits; the code lies in `N_m` iff `weight() == m`.
    #[inline]
    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }

    /// True if parity `P_k` (1-indexed) participates.
    pub fn has_parity(self, k: u32) -> bool {
        (1..=self.width.get() as u32).contains(&k) && self.bits & (1 << (k - 1)) != 0
    }

    /// Participating parity indices, ascending.
    pub fn parities(self) -> impl Iterator<Item = u32> {
        let bits = self.bits;
        (1..=self.width.get() as u32).filter(move |k| bits & (1 << (k - 1)) != 0)
    }

    pub fn checked_xor(self, other: KCode) -> Result<KCode> {
        same_width(self, other)?;
        Ok(KCode {
            bits: self.bits ^ other.bits,
            width: self.width,
        })
    }

    pub fn distance(self, other: KCode) -> Result<u32> {
        same_width(self, other)?;
        Ok((self.bits ^ other.bits).count_ones())
    }

    /// All squares at exact Hamming distance `order` (1 or 2), ascending.
    pub fn side_squares(self, order: u8) -> Result<Vec<KCode>> {
        let n = self.width.get() as u32;
        let mut out = match order {
            1 => (0..n)
                .map(|i| KCode::from_raw(self.bits ^ (1 << i), self.width))
                .collect::<Vec<_>>(),
            2 => {
                let mut v = Vec::with_capacity((n * (n - 1) / 2) as usize);
                for i in 0..n {
                    for j in i + 1..n {
                        v.push(KCode::from_raw(
                            self.bits ^ (1 << i) ^ (1 << j),
                            self.width,
                        ));
                    }
                }
                v
            }
            o => return Err(Error::SideOrder(o)),
        };
        out.sort_unstable();
        Ok(out)
    }

    /// Binary form `b_n..b_1`, most significant parity first.
    pub fn to_binary_string(self) -> String {
        let n = self.width.get() as usize;
        format!("{:0n$b}", self.bits, n = n)
    }

    /// Parses either set notation (`P2+P4+P6+P7`, `0` for the zero code)
    /// or an `n`-character binary string.
    pub fn parse(s: &str, width: Width) -> Result<KCode> {
        let s = s.trim();
        if s == "0" || s.eq_ignore_ascii_case("n") {
            return Ok(KCode::zero(width));
        }
        if s.len() == width.get() as usize && s.bytes().all(|b| b == b'0' || b == b'1') {
            let v = u32::from_str_radix(s, 2).map_err(|e| Error::Parse(e.to_string()))?;
            return KCode::new(v, width);
        }
        let mut parities = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            let idx = part
                .strip_prefix('P')
                .or_else(|| part.strip_prefix('p'))
                .map(|p| p.trim_start_matches('_'))
                .ok_or_else(|| Error::Parse(format!("expected P<k>, got {part:?}")))?;
            let k = u32::from_str(idx).map_err(|e| Error::Parse(format!("{part:?}: {e}")))?;
            parities.push(k);
        }
        KCode::from_parities(&parities, width)
    }
}

impl BitXor for KCode {
    type Output = KCode;

    /// Panics on a width mismatch; use [`KCode::checked_xor`] for fallible XOR.
    fn bitxor(self, rhs: KCode) -> KCode {
        assert_eq!(self.width, rhs.width, "xor of K-codes with different widths");
        KCode {
            bits: self.bits ^ rhs.bits,
            width: self.width,
        }
    }
}

impl fmt::Display for KCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits == 0 {
            return f.write_str("0");
        }
        let mut first = true;
        for k in self.parities() {
            if !first {
                f.write_str("+")?;
            }
            write!(f, "P{k}")?;
            first = false;
        }
        Ok(())
    }
}

fn check_parity_index(k: u32, width: Width) -> Result<()> {
    if k == 0 || k > width.get() as u32 {
        return Err(Error::ParityIndex {
            index: k,
            width: width.get(),
        });
    }
    Ok(())
}

fn same_width(a: KCode, b: KCode) -> Result<()> {
    if a.width != b.width {
        return Err(Error::WidthMismatch {
            left: a.width.get(),
            right: b.width.get(),
        });
    }
    Ok(())
}

/// All `binomial(n, m)` codes of weight `m`, ascending.
pub fn n_class(m: u32, width: Width) -> Vec<KCode> {
    (0..width.squares() as u32)
        .filter(|v| v.count_ones() == m)
        .map(|v| KCode::from_raw(v as u16, width))
        .collect()
}

/// A set of map squares, stored as a bitset over all `2^n` K-codes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareSet {
    width: Width,
    words: Vec<u64>,
}

impl SquareSet {
    pub fn new(width: Width) -> Self {
        SquareSet {
            width,
            words: vec![0; width.squares().div_ceil(64)],
        }
    }

    pub fn width(&self) -> Width {
        self.width
    }

    #[inline]
    pub fn insert_raw(&mut self, bits: u16) -> bool {
        let (w, b) = ((bits >> 6) as usize, bits & 63);
        let was = self.words[w] >> b & 1 == 1;
        self.words[w] |= 1 << b;
        !was
    }

    #[inline]
    pub fn contains_raw(&self, bits: u16) -> bool {
        self.words[(bits >> 6) as usize] >> (bits & 63) & 1 == 1
    }

    pub fn insert(&mut self, k: KCode) -> bool {
        debug_assert_eq!(k.width, self.width);
        self.insert_raw(k.bits)
    }

    pub fn contains(&self, k: KCode) -> bool {
        k.width == self.width && self.contains_raw(k.bits)
    }

    pub fn union_with(&mut self, other: &SquareSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn intersection_len(&self, other: &SquareSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_disjoint(&self, other: &SquareSet) -> bool {
        self.intersection_len(other) == 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = KCode> + '_ {
        let width = self.width;
        (0..width.squares() as u32)
            .filter(move |&v| self.contains_raw(v as u16))
            .map(move |v| KCode::from_raw(v as u16, width))
    }
}

impl Extend<KCode> for SquareSet {
    fn extend<I: IntoIterator<Item = KCode>>(&mut self, iter: I) {
        for k in iter {
            self.insert(k);
        }
    }
}

/// How parity variables are laid out along the two map axes.
///
/// Row and column indices walk a reflected Gray sequence over their
/// variables, listed most significant first as in the map headers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrayLayout {
    width: Width,
    row_vars: Vec<u32>,
    col_vars: Vec<u32>,
}

impl GrayLayout {
    pub fn new(width: Width, row_vars: Vec<u32>, col_vars: Vec<u32>) -> Result<Self> {
        let n = width.get() as u32;
        if row_vars.len() + col_vars.len() != n as usize {
            return Err(Error::Layout(format!(
                "{} row + {} column variables for width {n}",
                row_vars.len(),
                col_vars.len()
            )));
        }
        let mut seen = 0u32;
        for &v in row_vars.iter().chain(&col_vars) {
            if v == 0 || v > n {
                return Err(Error::Layout(format!("variable s_{v} outside 1..={n}")));
            }
            if seen & (1 << v) != 0 {
                return Err(Error::Layout(format!("variable s_{v} used twice")));
            }
            seen |= 1 << v;
        }
        Ok(GrayLayout {
            width,
            row_vars,
            col_vars,
        })
    }

    /// Odd-indexed variables on rows and even on columns, both descending.
    /// At `n = 7` this is rows `s7 s5 s3 s1`, columns `s6 s4 s2`.
    pub fn for_width(width: Width) -> Self {
        let n = width.get() as u32;
        let row_vars = (1..=n).rev().filter(|v| v % 2 == 1).collect();
        let col_vars = (1..=n).rev().filter(|v| v % 2 == 0).collect();
        GrayLayout {
            width,
            row_vars,
            col_vars,
        }
    }

    pub fn width(&self) -> Width {
        self.width
    }

    pub fn row_vars(&self) -> &[u32] {
        &self.row_vars
    }

    pub fn col_vars(&self) -> &[u32] {
        &self.col_vars
    }

    pub fn rows(&self) -> usize {
        1 << self.row_vars.len()
    }

    pub fn cols(&self) -> usize {
        1 << self.col_vars.len()
    }

    /// Header string for row `r`, e.g. `"0110"`.
    pub fn row_label(&self, r: usize) -> String {
        axis_label(gray(r), self.row_vars.len())
    }

    pub fn col_label(&self, c: usize) -> String {
        axis_label(gray(c), self.col_vars.len())
    }

    pub fn to_grid(&self, k: KCode) -> Result<(usize, usize)> {
        if k.width != self.width {
            return Err(Error::WidthMismatch {
                left: k.width.get(),
                right: self.width.get(),
            });
        }
        let row = inverse_gray(gather(k.bits, &self.row_vars));
        let col = inverse_gray(gather(k.bits, &self.col_vars));
        Ok((row, col))
    }

    pub fn from_grid(&self, row: usize, col: usize) -> Result<KCode> {
        if row >= self.rows() || col >= self.cols() {
            return Err(Error::GridIndex {
                row,
                col,
                rows: self.rows(),
                cols: self.cols(),
            });
        }
        let bits = scatter(gray(row), &self.row_vars) | scatter(gray(col), &self.col_vars);
        Ok(KCode::from_raw(bits, self.width))
    }

    /// Row index of the header string, e.g. `"1000"` → 15.
    pub fn row_of_label(&self, label: &str) -> Result<usize> {
        parse_axis_label(label, self.row_vars.len())
    }

    pub fn col_of_label(&self, label: &str) -> Result<usize> {
        parse_axis_label(label, self.col_vars.len())
    }
}

#[inline]
fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

#[inline]
fn inverse_gray(mut g: usize) -> usize {
    let mut i = 0;
    while g != 0 {
        i ^= g;
        g >>= 1;
    }
    i
}

/// Packs the listed variables of `bits` into an axis value, first variable
/// most significant.
fn gather(bits: u16, vars: &[u32]) -> usize {
    vars.iter()
        .fold(0, |acc, &v| (acc << 1) | ((bits >> (v - 1)) & 1) as usize)
}

fn scatter(value: usize, vars: &[u32]) -> u16 {
    let len = vars.len();
    vars.iter()
        .enumerate()
        .filter(|(j, _)| value >> (len - 1 - j) & 1 == 1)
        .fold(0, |acc, (_, &v)| acc | 1 << (v - 1))
}

fn axis_label(value: usize, len: usize) -> String {
    format!("{:0len$b}", value, len = len)
}

fn parse_axis_label(label: &str, len: usize) -> Result<usize> {
    if label.len() != len || !label.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::Parse(format!(
            "axis label {label:?} is not a {len}-bit string"
        )));
    }
    let g = usize::from_str_radix(label, 2).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(inverse_gray(g))
}
