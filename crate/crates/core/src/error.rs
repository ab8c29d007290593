use thiserror::Error;

use crate::placement::CollisionReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("width {0} is outside the supported range 4..=16")]
    InvalidWidth(u32),

    #[error("width mismatch: {left} vs {right}")]
    WidthMismatch { left: u8, right: u8 },

    #[error("value {value:#x} does not fit in {width} bits")]
    ValueOutOfRange { value: u64, width: u8 },

    #[error("parity index {index} is outside 1..={width}")]
    ParityIndex { index: u32, width: u8 },

    #[error("data index {index} is outside 1..={count}")]
    DataIndex { index: u32, count: usize },

    #[error("side-square order must be 1 or 2, got {0}")]
    SideOrder(u8),

    #[error("grid position ({row}, {col}) is outside a {rows}x{cols} map")]
    GridIndex {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("invalid layout: {0}")]
    Layout(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("placement is not valid: {0}")]
    InvalidPlacement(CollisionReport),

    #[error("expected {expected} bits, got {got}")]
    Length { expected: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
