//! Fraction-free Gaussian elimination over `ℚ(i)[log 2, log 3, …]`.

use crate::arith::LogScalar;

/// Position of the next pivot: the smallest total log-degree among nonzero
/// entries, then the leftmost column, then the topmost row.
fn choose_pivot(a: &[Vec<LogScalar>], from_row: usize, used: &[bool]) -> Option<(usize, usize)> {
    let mut best: Option<(u32, usize, usize)> = None;
    for (j, _) in used.iter().enumerate().filter(|(_, u)| !**u) {
        for (i, row) in a.iter().enumerate().skip(from_row) {
            let v = &row[j];
            if v.is_zero() {
                continue;
            }
            let key = (v.total_degree(), j, i);
            if best.map_or(true, |b| key < b) {
                best = Some(key);
            }
        }
    }
    best.map(|(_, j, i)| (i, j))
}

/// Rank and pivot columns (0-based, in elimination order).
///
/// Each step replaces `a[i][j]` by `(p·a[i][j] − a[i][c]·a[r][j]) / p_prev`,
/// an exact division since every entry stays a minor of the input.
pub fn bareiss_rank(mut a: Vec<Vec<LogScalar>>) -> (usize, Vec<usize>) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut used = vec![false; cols];
    let mut pivots = Vec::new();
    let mut prev = LogScalar::from_int(1);
    for step in 0..rows {
        let Some((r, c)) = choose_pivot(&a, step, &used) else { break };
        a.swap(step, r);
        used[c] = true;
        pivots.push(c);
        let (top, rest) = a.split_at_mut(step + 1);
        let pivot_row = &top[step];
        let p = &pivot_row[c];
        for row in rest.iter_mut() {
            let factor = std::mem::take(&mut row[c]);
            for j in (0..cols).filter(|&j| !used[j]) {
                let mut v = &row[j] * p;
                if !factor.is_zero() && !pivot_row[j].is_zero() {
                    v = &v - &(&factor * &pivot_row[j]);
                }
                row[j] = v.div_exact(&prev).expect("Bareiss quotient is exact");
            }
        }
        prev = p.clone();
    }
    (pivots.len(), pivots)
}
