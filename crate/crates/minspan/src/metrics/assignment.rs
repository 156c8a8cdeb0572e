//! Exact one-to-one assignment between two sides of a weight matrix.
//!
//! The solver is the O(n^3) potential-based shortest-augmenting-path
//! algorithm for the assignment problem. Weights are maximized by negating
//! them into costs. Rectangular inputs are handled by solving with the
//! smaller side as rows, so every row is matched and extra columns stay
//! free.

/// Finds a maximum-weight one-to-one matching for a non-negative weight
/// matrix (rows x columns, any shape). Returns the total weight and the
/// matched (row, column) pairs in row order.
pub fn max_weight_matching(weights: &[Vec<f64>]) -> (f64, Vec<(usize, usize)>) {
    let rows = weights.len();
    if rows == 0 || weights[0].is_empty() {
        return (0.0, Vec::new());
    }
    let cols = weights[0].len();
    debug_assert!(weights.iter().all(|r| r.len() == cols));
    let pairs = if rows <= cols {
        let cost: Vec<Vec<f64>> = weights
            .iter()
            .map(|row| row.iter().map(|w| -w).collect())
            .collect();
        let row_to_col = min_cost_assignment(&cost);
        row_to_col.into_iter().enumerate().collect::<Vec<_>>()
    } else {
        let cost: Vec<Vec<f64>> = (0..cols)
            .map(|c| (0..rows).map(|r| -weights[r][c]).collect())
            .collect();
        let col_to_row = min_cost_assignment(&cost);
        let mut pairs: Vec<(usize, usize)> = col_to_row
            .into_iter()
            .enumerate()
            .map(|(c, r)| (r, c))
            .collect();
        pairs.sort_unstable();
        pairs
    };
    let total = pairs.iter().map(|&(r, c)| weights[r][c]).sum();
    (total, pairs)
}

/// Solves the square or wide assignment problem (rows <= columns) for
/// minimum total cost, returning the column chosen for each row. Row and
/// column potentials keep each augmentation linear in the matrix size.
fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let m = cost[0].len();
    assert!(n <= m, "cost matrix must not have more rows than columns");
    // Arrays are 1-indexed; index 0 is the virtual unmatched slot.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut matched_row = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut min_slack = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let reduced = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if reduced < min_slack[j] {
                    min_slack[j] = reduced;
                    way[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![usize::MAX; n];
    for j in 1..=m {
        if matched_row[j] != 0 {
            row_to_col[matched_row[j] - 1] = j - 1;
        }
    }
    debug_assert!(row_to_col.iter().all(|&c| c != usize::MAX));
    row_to_col
}
