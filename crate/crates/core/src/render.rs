//! Karnaugh-map rendering of a placement as a labelled grid.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::coverage::{three_bit_coverage, CoverageRule};
use crate::error::{Error, Result};
use crate::kcode::{GrayLayout, KCode, Width};
use crate::pattern::ErrorPattern;
use crate::placement::{forbidden_squares, Placement};

pub const FORBIDDEN_MARK: &str = "f";

/// Labels for every square, stored by K-code value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapGrid {
    layout: GrayLayout,
    cells: Vec<Option<String>>,
}

#[derive(Clone, Debug, Default)]
pub struct RenderOptions {
    /// Also label covered three-bit patterns under this rule.
    pub triples: Option<CoverageRule>,
    /// Mark the squares forbidden for a third data bit given data bits
    /// `(i, j)` (1-indexed).
    pub forbidden_for: Option<(usize, usize)>,
    /// Defaults to [`GrayLayout::for_width`].
    pub layout: Option<GrayLayout>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellDiff {
    pub row: usize,
    pub col: usize,
    pub row_bits: String,
    pub col_bits: String,
    pub left: Option<String>,
    pub right: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct GridJson {
    n: u32,
    row_vars: Vec<u32>,
    col_vars: Vec<u32>,
    cells: BTreeMap<u16, String>,
}

pub fn render_map(p: &Placement, options: &RenderOptions) -> Result<MapGrid> {
    let occupied = p.occupied_map().map_err(Error::InvalidPlacement)?;
    let layout = match &options.layout {
        Some(l) if l.width() != p.width() => {
            return Err(Error::WidthMismatch {
                left: l.width().get(),
                right: p.width().get(),
            })
        }
        Some(l) => l.clone(),
        None => GrayLayout::for_width(p.width()),
    };
    let mut grid = MapGrid::empty(layout);
    for (s, pattern) in occupied {
        grid.cells[s.bits() as usize] = Some(pattern.label());
    }
    if let Some(rule) = options.triples {
        for t in three_bit_coverage(p, rule)?.covered {
            grid.cells[t.syndrome.bits() as usize] = Some(t.pattern.label());
        }
    }
    if let Some((i, j)) = options.forbidden_for {
        let x = |k: usize| {
            p.data()
                .get(k.wrapping_sub(1))
                .copied()
                .ok_or(Error::DataIndex {
                    index: k as u32,
                    count: p.data_len(),
                })
        };
        for s in forbidden_squares(x(i)?, x(j)?)? {
            let cell = &mut grid.cells[s.bits() as usize];
            if cell.is_none() {
                *cell = Some(FORBIDDEN_MARK.to_string());
            }
        }
    }
    Ok(grid)
}

impl MapGrid {
    pub fn empty(layout: GrayLayout) -> Self {
        let cells = vec![None; layout.width().squares()];
        MapGrid { layout, cells }
    }

    pub fn layout(&self) -> &GrayLayout {
        &self.layout
    }

    pub fn width(&self) -> Width {
        self.layout.width()
    }

    pub fn label_of(&self, k: KCode) -> Option<&str> {
        self.cells.get(k.bits() as usize)?.as_deref()
    }

    pub fn get(&self, row: usize, col: usize) -> Result<Option<&str>> {
        let k = self.layout.from_grid(row, col)?;
        Ok(self.cells[k.bits() as usize].as_deref())
    }

    pub fn set(&mut self, k: KCode, label: Option<String>) -> Result<()> {
        if k.width() != self.width() {
            return Err(Error::WidthMismatch {
                left: k.width().get(),
                right: self.width().get(),
            });
        }
        self.cells[k.bits() as usize] = label;
        Ok(())
    }

    /// Labelled squares in ascending K-code order.
    pub fn labels(&self) -> impl Iterator<Item = (KCode, &str)> + '_ {
        let w = self.width();
        self.cells.iter().enumerate().filter_map(move |(v, c)| {
            c.as_deref()
                .map(|l| (KCode::new(v as u32, w).expect("in range"), l))
        })
    }

    pub fn labeled_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    /// Number of labels naming a three-bit pattern.
    pub fn triple_label_count(&self) -> usize {
        self.labels()
            .filter(|(_, l)| ErrorPattern::parse_label(l).is_ok_and(|p| p.len() == 3))
            .count()
    }

    /// Parses every label except forbidden marks back into patterns.
    pub fn patterns(&self) -> Result<BTreeMap<KCode, ErrorPattern>> {
        self.labels()
            .filter(|(_, l)| *l != FORBIDDEN_MARK)
            .map(|(k, l)| Ok((k, ErrorPattern::parse_label(l)?)))
            .collect()
    }

    fn header(&self) -> String {
        let name = |vs: &[u32]| vs.iter().map(|v| format!("s{v}")).collect::<String>();
        format!("{}\\{}", name(self.layout.row_vars()), name(self.layout.col_vars()))
    }

    /// Fixed-width grid with Gray-coded headers; empty squares print `.`.
    pub fn to_text(&self) -> String {
        let (rows, cols) = (self.layout.rows(), self.layout.cols());
        let cell_w = self
            .cells
            .iter()
            .flatten()
            .map(|l| l.len())
            .chain([self.layout.col_vars().len(), 1])
            .max()
            .unwrap_or(1);
        let head = self.header();
        let row_w = head.len().max(self.layout.row_vars().len());
        let mut out = format!("{head:<row_w$}");
        for c in 0..cols {
            let _ = write!(out, " {:<cell_w$}", self.layout.col_label(c));
        }
        out = out.trim_end().to_string();
        out.push('\n');
        for r in 0..rows {
            let mut line = format!("{:<row_w$}", self.layout.row_label(r));
            for c in 0..cols {
                let l = self.get(r, c).expect("in range").unwrap_or(".");
                let _ = write!(line, " {l:<cell_w$}");
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }

    /// `row_bits,col_bits,label` for labelled squares, row-major.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["row_bits", "col_bits", "label"]).expect("in-memory write");
        for r in 0..self.layout.rows() {
            for c in 0..self.layout.cols() {
                if let Some(l) = self.get(r, c).expect("in range") {
                    w.write_record([&self.layout.row_label(r), &self.layout.col_label(c), l])
                        .expect("in-memory write");
                }
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    pub fn from_csv(text: &str, layout: GrayLayout) -> Result<Self> {
        let mut grid = MapGrid::empty(layout);
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        for rec in reader.records() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            if rec.len() != 3 {
                return Err(Error::Parse(format!("expected 3 fields, got {}", rec.len())));
            }
            let row = grid.layout.row_of_label(&rec[0])?;
            let col = grid.layout.col_of_label(&rec[1])?;
            let k = grid.layout.from_grid(row, col)?;
            let cell = &mut grid.cells[k.bits() as usize];
            if cell.is_some() {
                return Err(Error::Parse(format!("cell {},{} given twice", &rec[0], &rec[1])));
            }
            *cell = Some(rec[2].to_string());
        }
        Ok(grid)
    }

    pub fn to_json(&self) -> String {
        let cells = self
            .cells
            .iter()
            .enumerate()
            .filter_map(|(v, c)| c.clone().map(|l| (v as u16, l)))
            .collect();
        serde_json::to_string_pretty(&GridJson {
            n: self.width().get() as u32,
            row_vars: self.layout.row_vars().to_vec(),
            col_vars: self.layout.col_vars().to_vec(),
            cells,
        })
        .expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: GridJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let layout = GrayLayout::new(Width::new(g.n)?, g.row_vars, g.col_vars)?;
        let mut grid = MapGrid::empty(layout);
        for (v, l) in g.cells {
            let k = KCode::new(v as u32, grid.width())?;
            grid.cells[k.bits() as usize] = Some(l);
        }
        Ok(grid)
    }
}

/// Cells whose labels differ, in row-major order.
pub fn diff_grids(a: &MapGrid, b: &MapGrid) -> Result<Vec<CellDiff>> {
    let (la, lb) = (&a.layout, &b.layout);
    if la.rows() != lb.rows() || la.cols() != lb.cols() {
        return Err(Error::Layout(format!(
            "grid {}x{} vs {}x{}",
            la.rows(),
            la.cols(),
            lb.rows(),
            lb.cols()
        )));
    }
    let mut out = Vec::new();
    for row in 0..la.rows() {
        for col in 0..la.cols() {
            let left = a.get(row, col)?;
            let right = b.get(row, col)?;
            if left != right {
                out.push(CellDiff {
                    row,
                    col,
                    row_bits: la.row_label(row),
                    col_bits: la.col_label(col),
                    left: left.map(str::to_string),
                    right: right.map(str::to_string),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3() -> Placement {
        Placement::from_parity_sets(Width::SEVEN, &[&[2, 4, 6, 7], &[2, 3, 5, 7], &[1, 2, 3, 4, 7]])
            .unwrap()
    }

    #[test]
    fn fig3_labels() {
        let p = fig3();
        let g = render_map(&p, &RenderOptions::default()).unwrap();
        assert_eq!(g.get(0, 0).unwrap(), Some("N"));
        assert_eq!(g.label_of(p.data()[0] ^ p.data()[1]), Some("X_1X_2"));
        assert_eq!(g.labeled_count(), 56);
        assert_eq!(g.patterns().unwrap(), p.occupied_map().unwrap());
    }

    #[test]
    fn x1_position_in_default_layout() {
        let g = render_map(&fig3(), &RenderOptions::default()).unwrap();
        let l = g.layout();
        let (r, c) = l.to_grid(fig3().data()[0]).unwrap();
        assert_eq!((l.row_label(r).as_str(), l.col_label(c).as_str()), ("1000", "111"));
    }

    #[test]
    fn empty_placement_has_parity_labels_only() {
        let p = Placement::new(Width::SEVEN, vec![]).unwrap();
        let g = render_map(&p, &RenderOptions::default()).unwrap();
        assert_eq!(g.labeled_count(), 29);
        assert!(g.labels().all(|(_, l)| l == "N" || !l.contains('X')));
    }

    #[test]
    fn forbidden_marks() {
        let p = Placement::from_parity_sets(Width::SEVEN, &[&[2, 4, 6, 7], &[2, 3, 5, 7]]).unwrap();
        let opts = RenderOptions {
            forbidden_for: Some((1, 2)),
            ..Default::default()
        };
        let g = render_map(&p, &opts).unwrap();
        assert_eq!(g.labels().filter(|(_, l)| *l == FORBIDDEN_MARK).count(), 7);
        let bad = RenderOptions {
            forbidden_for: Some((1, 3)),
            ..Default::default()
        };
        assert!(render_map(&p, &bad).is_err());
    }

    #[test]
    fn serial_forms_round_trip() {
        let g = render_map(&fig3(), &RenderOptions::default()).unwrap();
        let back = MapGrid::from_csv(&g.to_csv(), g.layout().clone()).unwrap();
        assert!(diff_grids(&g, &back).unwrap().is_empty());
        assert_eq!(MapGrid::from_json(&g.to_json()).unwrap(), g);
        let text = g.to_text();
        assert_eq!(text.lines().count(), 17);
        assert!(text.starts_with("s7s5s3s1\\s6s4s2"));
    }

    #[test]
    fn diffs() {
        let a = render_map(&fig3(), &RenderOptions::default()).unwrap();
        assert!(diff_grids(&a, &a).unwrap().is_empty());
        let other = Placement::from_parity_sets(
            Width::SEVEN,
            &[&[2, 4, 6, 7], &[2, 3, 5, 7], &[1, 2, 3, 4, 5, 6, 7]],
        )
        .unwrap();
        let b = render_map(&other, &RenderOptions::default()).unwrap();
        assert!(!diff_grids(&a, &b).unwrap().is_empty());
        let small = MapGrid::empty(GrayLayout::for_width(Width::new(6).unwrap()));
        assert!(diff_grids(&a, &small).is_err());
    }
}
