//! Small numerical helpers with a fixed evaluation order.

/// Pairwise (tree) summation. The split points depend only on the length,
/// so the result is a deterministic function of the input slice.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Independent stream seed for item `index` of a seeded computation.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
    seed ^ index.wrapping_add(1).wrapping_mul(GOLDEN)
}
