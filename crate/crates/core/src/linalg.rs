//! Dense row reduction for the small span computations of the trig algebra.

/// Row-reduces `rows` (each of length `ncols`) in place to reduced row echelon
/// form and returns the pivot column of every nonzero row.
///
/// Entries below `tol * max|entry|` are treated as zero. Columns are visited
/// left to right, so earlier columns are preferred as pivots.
pub(crate) fn rref(rows: &mut Vec<Vec<f64>>, ncols: usize, rel_tol: f64) -> Vec<usize> {
    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        rows.clear();
        return Vec::new();
    }
    let tol = rel_tol * scale;
    let mut pivots = Vec::new();
    let mut lead = 0usize;
    for col in 0..ncols {
        if lead >= rows.len() {
            break;
        }
        let (best, best_val) = (lead..rows.len())
            .map(|i| (i, rows[i][col].abs()))
            .fold((lead, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_val <= tol {
            continue;
        }
        rows.swap(lead, best);
        let p = rows[lead][col];
        for v in rows[lead].iter_mut() {
            *v /= p;
        }
        let pivot_row = rows[lead].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == lead {
                continue;
            }
            let factor = row[col];
            if factor != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * pv;
                }
                row[col] = 0.0;
            }
        }
        for v in rows[lead].iter_mut() {
            if v.abs() <= tol {
                *v = 0.0;
            }
        }
        pivots.push(col);
        lead += 1;
    }
    rows.truncate(lead);
    pivots
}

/// Solves `A c = r` where `A` is given column-wise; returns the basic solution
/// (free variables set to zero) or `None` when the system is inconsistent.
pub(crate) fn solve_columns(columns: &[Vec<f64>], rhs: &[f64], rel_tol: f64) -> Option<Vec<f64>> {
    let nrows = rhs.len();
    let ncols = columns.len();
    let mut aug: Vec<Vec<f64>> = (0..nrows)
        .map(|i| {
            let mut row: Vec<f64> = columns.iter().map(|c| c[i]).collect();
            row.push(rhs[i]);
            row
        })
        .collect();
    let pivots = rref(&mut aug, ncols + 1, rel_tol);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut sol = vec![0.0; ncols];
    for (row, &p) in aug.iter().zip(&pivots) {
        sol[p] = row[ncols];
    }
    Some(sol)
}
