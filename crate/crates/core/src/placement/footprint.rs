use crate::error::{Error, Result};
use crate::kcode::{KCode, SquareSet, Width};

/// Squares an entity occupies plus its first- and second-order side squares.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Footprint {
    pub occupied: SquareSet,
    pub sides: SquareSet,
}

impl Footprint {
    /// The parity structure: every `P_k` and `P_kP_m` square, plus the side
    /// squares of each `P_k` that are not themselves occupied.
    pub fn parity(width: Width) -> Self {
        let n = width.get();
        let mut occupied = SquareSet::new(width);
        for k in 0..n {
            occupied.insert_raw(1 << k);
            for m in k + 1..n {
                occupied.insert_raw((1 << k) | (1 << m));
            }
        }
        let mut sides = SquareSet::new(width);
        for k in 0..n {
            for_each_side(1 << k, n, |s| {
                if !occupied.contains_raw(s) {
                    sides.insert_raw(s);
                }
            });
        }
        Footprint { occupied, sides }
    }

    /// A single data bit's square and its side squares.
    pub fn of(code: KCode) -> Self {
        let width = code.width();
        let mut occupied = SquareSet::new(width);
        occupied.insert(code);
        let mut sides = SquareSet::new(width);
        for_each_side(code.bits(), width.get(), |s| {
            sides.insert_raw(s);
        });
        Footprint { occupied, sides }
    }

    /// `occupied ∪ sides`.
    pub fn cover(&self) -> SquareSet {
        let mut all = self.occupied.clone();
        all.union_with(&self.sides);
        all
    }
}

/// Calls `f` on every square at distance 1 or 2 from `bits`.
#[inline]
pub(crate) fn for_each_side(bits: u16, n: u8, mut f: impl FnMut(u16)) {
    for i in 0..n {
        let a = bits ^ (1 << i);
        f(a);
        for j in i + 1..n {
            f(a ^ (1 << j));
        }
    }
}

#[inline]
pub(crate) fn count_sides_in(cover: &SquareSet, bits: u16, n: u8) -> usize {
    let mut count = 0;
    for_each_side(bits, n, |s| {
        if cover.contains_raw(s) {
            count += 1;
        }
    });
    count
}

/// Number of distinct side squares of `candidate` that already belong to
/// some prior footprint (its occupied squares or side squares).
pub fn double_weight_count(candidate: KCode, priors: &[Footprint]) -> usize {
    let mut union = SquareSet::new(candidate.width());
    for p in priors {
        union.union_with(&p.occupied);
        union.union_with(&p.sides);
    }
    count_sides_in(&union, candidate.bits(), candidate.width().get())
}

/// Second-order side squares shared by two codes at distance 4.
pub fn theorem1_overlap(a: KCode, b: KCode) -> Result<usize> {
    let d = a.distance(b)?;
    if d != 4 {
        return Err(Error::Precondition(format!(
            "second-order overlap needs distance 4, got {d}"
        )));
    }
    let sa: SquareSet = collect(a.width(), a.side_squares(2)?);
    let sb: SquareSet = collect(b.width(), b.side_squares(2)?);
    Ok(sa.intersection_len(&sb))
}

/// Side squares (either order) shared by codes of adjacent weight classes at
/// distance 3.
pub fn theorem2_overlap(a: KCode, b: KCode) -> Result<usize> {
    let d = a.distance(b)?;
    if d != 3 || a.weight().abs_diff(b.weight()) != 1 {
        return Err(Error::Precondition(format!(
            "overlap needs adjacent weights at distance 3, got weights {} and {} at distance {d}",
            a.weight(),
            b.weight()
        )));
    }
    let sa = Footprint::of(a).sides;
    let sb = Footprint::of(b).sides;
    Ok(sa.intersection_len(&sb))
}

/// Squares where a third data bit would put `X_2X_3` on `X_1` or one of its
/// first-order sides: `{x1 ^ x2 ^ e_k}`.
pub fn forbidden_squares(x1: KCode, x2: KCode) -> Result<Vec<KCode>> {
    let base = x1.checked_xor(x2)?;
    let mut out: Vec<KCode> = (1..=x1.width().get() as u32)
        .map(|k| base ^ KCode::unit(k, x1.width()).expect("k in range"))
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Outcome of an exhaustive sweep over all pairs of codes of one width.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct PairSweep {
    pub checked: u64,
    pub failures: u64,
}

impl PairSweep {
    pub fn holds(&self) -> bool {
        self.checked > 0 && self.failures == 0
    }
}

fn sweep(width: Width, mut test: impl FnMut(KCode, KCode) -> Option<bool>) -> PairSweep {
    let mut out = PairSweep {
        checked: 0,
        failures: 0,
    };
    let codes: Vec<KCode> = (0..width.squares() as u16)
        .map(|v| KCode::from_raw(v, width))
        .collect();
    for (i, &a) in codes.iter().enumerate() {
        for &b in &codes[i + 1..] {
            if let Some(ok) = test(a, b) {
                out.checked += 1;
                out.failures += u64::from(!ok);
            }
        }
    }
    out
}

/// Every unordered pair at distance 4 shares exactly 6 second-order sides.
pub fn sweep_theorem1(width: Width) -> PairSweep {
    sweep(width, |a, b| {
        (a.distance(b).ok()? == 4).then(|| theorem1_overlap(a, b).ok() == Some(6))
    })
}

/// Every adjacent-weight pair at distance 3 shares exactly 6 side squares.
pub fn sweep_theorem2(width: Width) -> PairSweep {
    sweep(width, |a, b| {
        let qualifies = a.distance(b).ok()? == 3 && a.weight().abs_diff(b.weight()) == 1;
        qualifies.then(|| theorem2_overlap(a, b).ok() == Some(6))
    })
}

/// For every valid pair of data bits, `X_iX_j` is at distance ≥ 2 from both.
pub fn sweep_theorem3(width: Width) -> PairSweep {
    sweep(width, |a, b| {
        super::raw_is_valid(width, &[a.bits(), b.bits()]).then(|| {
            let ab = a ^ b;
            ab.distance(a).ok() >= Some(2) && ab.distance(b).ok() >= Some(2)
        })
    })
}

fn collect(width: Width, codes: Vec<KCode>) -> SquareSet {
    let mut s = SquareSet::new(width);
    s.extend(codes);
    s
}
