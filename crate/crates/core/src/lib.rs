//! Karnaugh-map construction of single- and double-error-correcting codes.
//!
//! Each square of an `n`-variable map is a K-code: the syndrome that a set of
//! bit errors produces. Data bits are placed on squares so that every one-
//! and two-bit error lands on its own square, which makes decoding a table
//! lookup. The crate covers placement search, encoding and decoding,
//! three-bit error analysis, burst-safe transmission orderings, and map
//! rendering.

pub mod burst;
pub mod codec;
pub mod coverage;
pub mod error;
pub mod kcode;
pub mod pattern;
pub mod placement;
pub mod render;

pub use burst::{burst_triples, is_burst_safe, search_orderings, BurstCensus, Ordering};
pub use codec::{build_tables, Codec, CodecTables, Codeword, DecodeReport, ParityMode};
pub use coverage::{
    census, min_parity_search, theorem4_check, three_bit_coverage, CensusCheck, ClassCounts,
    CoverageReport, CoverageRule, MinParityMode,
};
pub use error::{Error, Result};
pub use kcode::{n_class, GrayLayout, KCode, SquareSet, Width};
pub use pattern::{CodeBit, ErrorPattern, TripleClass};
pub use placement::{
    guided_search, naive_search, CollisionReport, Footprint, GuidedConfig, Placement, SClass,
    SearchStats,
};
pub use render::{diff_grids, render_map, MapGrid, RenderOptions};
