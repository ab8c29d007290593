//! Guided and naive placement searches.
//!
//! Both searches stream placements into a visitor and stop when it returns
//! [`ControlFlow::Break`]. They count every call to the validity oracle in
//! [`SearchStats::evaluations`]; the guided search also counts candidate
//! squares it scores without validating.

use std::ops::ControlFlow;

use serde::Serialize;

use super::footprint::{count_sides_in, for_each_side, Footprint};
use super::{raw_is_valid, Placement, SClass};
use crate::kcode::{KCode, SquareSet, Width};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Partial or complete placements checked with the validity oracle.
    pub evaluations: u64,
    /// Candidate squares whose double-weight count was computed.
    pub scored: u64,
    /// Valid placements handed to the visitor.
    pub emitted: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GuidedConfig {
    /// Only explore placements whose first three data bits realize this class.
    /// A pin replaces the top-tier restriction on `X_1` and `X_2`.
    pub pin: Option<SClass>,
    /// Explore every tier for `X_1` and `X_2`, not only the highest.
    pub all_tiers: bool,
}

struct Ctx<'a, F> {
    width: Width,
    d: usize,
    config: &'a GuidedConfig,
    parity_cover: SquareSet,
    stats: SearchStats,
    visit: F,
}

impl<F: FnMut(&Placement) -> ControlFlow<()>> Ctx<'_, F> {
    /// Free squares for the next data bit after `prefix`, sorted by
    /// descending double-weight count then ascending value.
    fn candidates(&mut self, prefix: &[u16]) -> Vec<(usize, u16)> {
        let n = self.width.get();
        let mut cover = self.parity_cover.clone();
        let mut blocked = SquareSet::new(self.width);
        for (i, &x) in prefix.iter().enumerate() {
            cover.insert_raw(x);
            for_each_side(x, n, |s| {
                cover.insert_raw(s);
            });
            for &y in &prefix[..i] {
                blocked.insert_raw(x ^ y);
                for k in 0..n {
                    blocked.insert_raw(x ^ y ^ (1 << k));
                }
            }
        }
        let pin = self.config.pin.as_ref();
        let mut codes: Vec<KCode> = prefix
            .iter()
            .map(|&b| KCode::from_raw(b, self.width))
            .collect();
        let mut out = Vec::new();
        for v in 0..self.width.squares() as u16 {
            if cover.contains_raw(v) || blocked.contains_raw(v) {
                continue;
            }
            if let Some(pin) = pin {
                if prefix.len() < pin.weights.len() {
                    codes.push(KCode::from_raw(v, self.width));
                    let ok = pin.matches_prefix(&codes);
                    codes.pop();
                    if !ok {
                        continue;
                    }
                }
            }
            self.stats.scored += 1;
            out.push((count_sides_in(&cover, v, n), v));
        }
        out.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        out
    }

    fn restrict_to_top(&self, cands: &mut Vec<(usize, u16)>) {
        if self.config.all_tiers || self.config.pin.is_some() {
            return;
        }
        if let Some(&(top, _)) = cands.first() {
            cands.retain(|c| c.0 == top);
        }
    }

    fn check(&mut self, placement: &[u16]) -> bool {
        self.stats.evaluations += 1;
        raw_is_valid(self.width, placement)
    }

    fn emit(&mut self, placement: &[u16]) -> ControlFlow<()> {
        self.stats.emitted += 1;
        let p = Placement {
            width: self.width,
            data: placement
                .iter()
                .map(|&b| KCode::from_raw(b, self.width))
                .collect(),
        };
        (self.visit)(&p)
    }

    /// Plain best-first depth-first completion from `prefix`.
    fn dfs(&mut self, prefix: &mut Vec<u16>, restrict: bool) -> ControlFlow<()> {
        if prefix.len() == self.d {
            return self.emit(prefix);
        }
        let mut cands = self.candidates(prefix);
        if restrict && prefix.len() < 2 {
            self.restrict_to_top(&mut cands);
        }
        for (_, v) in cands {
            prefix.push(v);
            let r = if self.check(prefix) {
                self.dfs(prefix, restrict)
            } else {
                ControlFlow::Continue(())
            };
            prefix.pop();
            r?;
        }
        ControlFlow::Continue(())
    }

    /// Visits third-bit tiers in descending double-weight order across all
    /// admissible `(X_1, X_2)` pairs, then completes depth-first.
    fn tiered(&mut self) -> ControlFlow<()> {
        struct Pair {
            x1: u16,
            x2: u16,
            valid: Option<bool>,
            third: Vec<(usize, u16)>,
        }

        let mut x1s = self.candidates(&[]);
        self.restrict_to_top(&mut x1s);
        let mut x1_valid = Vec::with_capacity(x1s.len());
        let mut pairs = Vec::new();
        for &(_, x1) in &x1s {
            let mut x2s = self.candidates(&[x1]);
            self.restrict_to_top(&mut x2s);
            for (_, x2) in x2s {
                let third = self.candidates(&[x1, x2]);
                if !third.is_empty() {
                    pairs.push(Pair {
                        x1,
                        x2,
                        valid: None,
                        third,
                    });
                }
            }
            x1_valid.push((x1, None::<bool>));
        }

        let mut tiers: Vec<usize> = pairs
            .iter()
            .flat_map(|p| p.third.iter().map(|t| t.0))
            .collect();
        tiers.sort_unstable_by(|a, b| b.cmp(a));
        tiers.dedup();

        let mut prefix = Vec::with_capacity(self.d);
        for tier in tiers {
            for pair in pairs.iter_mut() {
                let start = pair.third.partition_point(|t| t.0 > tier);
                let end = pair.third.partition_point(|t| t.0 >= tier);
                if start == end {
                    continue;
                }
                let slot = x1_valid
                    .iter_mut()
                    .find(|(x, _)| *x == pair.x1)
                    .expect("x1 recorded");
                let x1_ok = match slot.1 {
                    Some(v) => v,
                    None => {
                        self.stats.evaluations += 1;
                        let v = raw_is_valid(self.width, &[pair.x1]);
                        slot.1 = Some(v);
                        v
                    }
                };
                if !x1_ok {
                    continue;
                }
                let ok = match pair.valid {
                    Some(v) => v,
                    None => {
                        let v = self.check(&[pair.x1, pair.x2]);
                        pair.valid = Some(v);
                        v
                    }
                };
                if !ok {
                    continue;
                }
                for &(_, x3) in &pair.third[start..end] {
                    prefix.clear();
                    prefix.extend([pair.x1, pair.x2, x3]);
                    if self.check(&prefix) {
                        self.dfs(&mut prefix, false)?;
                    }
                }
            }
        }
        ControlFlow::Continue(())
    }
}

/// Streams valid placements of `d` data bits in priority order.
///
/// `X_1` and `X_2` are drawn from the highest double-weight tier available
/// (unless `config` pins a class or asks for all tiers). Third data bits are
/// then visited tier by tier, highest count first, across every admissible
/// pair; later data bits are chosen depth-first by descending count. Squares
/// that are already occupied, lie on a side square of a placed bit, or are
/// forbidden by an `X_iX_j` pair are never considered.
pub fn guided_search<F>(width: Width, d: usize, config: &GuidedConfig, visit: F) -> SearchStats
where
    F: FnMut(&Placement) -> ControlFlow<()>,
{
    let mut ctx = Ctx {
        width,
        d,
        config,
        parity_cover: Footprint::parity(width).cover(),
        stats: SearchStats::default(),
        visit,
    };
    if d == 0 {
        let _ = ctx.emit(&[]);
    } else if d < 3 {
        let _ = ctx.dfs(&mut Vec::with_capacity(d), true);
    } else {
        let _ = ctx.tiered();
    }
    ctx.stats
}

/// Enumerates ordered tuples of distinct weight-≥4 codes in numeric order and
/// keeps those that pass the validity oracle.
pub fn naive_search<F>(width: Width, d: usize, mut visit: F) -> SearchStats
where
    F: FnMut(&Placement) -> ControlFlow<()>,
{
    let codes: Vec<u16> = (0..width.squares() as u16)
        .filter(|v| v.count_ones() >= 4)
        .collect();
    let mut stats = SearchStats::default();
    let mut tuple = Vec::with_capacity(d);

    fn rec<F: FnMut(&Placement) -> ControlFlow<()>>(
        width: Width,
        d: usize,
        codes: &[u16],
        tuple: &mut Vec<u16>,
        stats: &mut SearchStats,
        visit: &mut F,
    ) -> ControlFlow<()> {
        if tuple.len() == d {
            stats.evaluations += 1;
            if raw_is_valid(width, tuple) {
                stats.emitted += 1;
                let p = Placement {
                    width,
                    data: tuple.iter().map(|&b| KCode::from_raw(b, width)).collect(),
                };
                return visit(&p);
            }
            return ControlFlow::Continue(());
        }
        for &c in codes {
            if tuple.contains(&c) {
                continue;
            }
            tuple.push(c);
            let r = rec(width, d, codes, tuple, stats, visit);
            tuple.pop();
            r?;
        }
        ControlFlow::Continue(())
    }

    let _ = rec(width, d, &codes, &mut tuple, &mut stats, &mut visit);
    stats
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchComparison {
    pub n: u8,
    pub d: usize,
    pub k: usize,
    pub guided: SearchStats,
    pub naive: SearchStats,
    pub guided_found: Vec<Placement>,
    pub naive_found: Vec<Placement>,
}

/// Runs both searches until each has produced `k` valid placements.
pub fn compare_first(width: Width, d: usize, k: usize) -> SearchComparison {
    let mut guided_found = Vec::new();
    let mut naive_found = Vec::new();
    let (guided, naive) = if k == 0 {
        (SearchStats::default(), SearchStats::default())
    } else {
        let g = guided_search(width, d, &GuidedConfig::default(), |p| {
            guided_found.push(p.clone());
            if guided_found.len() >= k {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        let nv = naive_search(width, d, |p| {
            naive_found.push(p.clone());
            if naive_found.len() >= k {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        (g, nv)
    };
    SearchComparison {
        n: width.get(),
        d,
        k,
        guided,
        naive,
        guided_found,
        naive_found,
    }
}
