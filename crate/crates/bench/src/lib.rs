//! Shared inputs for the criterion benches.

pub use kmap_ecc::{Placement, Width};

/// The 3-data placement of the fully labelled map: X_3 on the all-ones square.
pub fn fig4() -> Placement {
    Placement::from_parity_sets(
        Width::SEVEN,
        &[&[2, 4, 6, 7], &[2, 3, 5, 7], &[1, 2, 3, 4, 5, 6, 7]],
    )
    .expect("static placement")
}

pub fn fig3() -> Placement {
    Placement::from_parity_sets(Width::SEVEN, &[&[2, 4, 6, 7], &[2, 3, 5, 7], &[1, 2, 3, 4, 7]])
        .expect("static placement")
}
