use crate::scalar::Real;

/// Pairwise summation in slice order; the association tree depends only on
/// the length, so results are reproducible.
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    match xs.len() {
        0 => T::zero(),
        1 => xs[0],
        2 => xs[0] + xs[1],
        len => {
            let mid = len / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Column-wise pairwise sums of equally sized rows.
pub fn pairwise_columns<T: Real>(rows: &[Vec<T>], width: usize) -> Vec<T> {
    (0..width)
        .map(|c| {
            let col: Vec<T> = rows.iter().map(|r| r[c]).collect();
            pairwise_sum(&col)
        })
        .collect()
}
