//! Small dense linear algebra: partial-pivot determinants and
//! normal-equation least squares. Matrices here are at most a handful of
//! rows, so plain Gaussian elimination is the right tool.

use crate::error::{Error, Result};

/// Determinant by Gaussian elimination with partial pivoting.
/// The input is row-major and must be square.
#[allow(clippy::needless_range_loop)] // two rows of one matrix; split_at_mut obscures the math
pub fn det_partial_pivot(matrix: &[Vec<f64>]) -> f64 {
    let n = matrix.len();
    debug_assert!(matrix.iter().all(|r| r.len() == n));
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot_row][col] == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            a.swap(pivot_row, col);
            det = -det;
        }
        let pivot = a[col][col];
        det *= pivot;
        for row in col + 1..n {
            let factor = a[row][col] / pivot;
            if factor != 0.0 {
                for k in col..n {
                    a[row][k] -= factor * a[col][k];
                }
            }
        }
    }
    det
}

/// Product of Euclidean row norms. For any square matrix the determinant
/// magnitude never exceeds this bound.
pub fn row_norm_product(matrix: &[Vec<f64>]) -> f64 {
    matrix
        .iter()
        .map(|row| row.iter().map(|x| x * x).sum::<f64>().sqrt())
        .product()
}

/// Solve `a x = b` in place by Gaussian elimination with partial pivoting.
/// Fails when a pivot is negligible relative to the matrix scale.
#[allow(clippy::needless_range_loop)]
pub fn solve_partial_pivot(a: &mut [Vec<f64>], b: &mut [f64]) -> Result<Vec<f64>> {
    let n = a.len();
    debug_assert_eq!(b.len(), n);
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |m, &x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() <= 1e-13 * scale {
            return Err(Error::RankDeficient(format!("pivot {col} below tolerance")));
        }
        if pivot_row != col {
            a.swap(pivot_row, col);
            b.swap(pivot_row, col);
        }
        let pivot = a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / pivot;
            if factor != 0.0 {
                for k in col..n {
                    a[row][k] -= factor * a[col][k];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// Least squares `min ||X beta - y||` through the normal equations
/// `(X^T X) beta = X^T y`, solved with partial pivoting. `rows` are the
/// rows of X. Rank deficiency surfaces as a pivot failure.
pub fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let m = rows.len();
    if m == 0 {
        return Err(Error::RankDeficient("no samples".into()));
    }
    let n = rows[0].len();
    if m < n {
        return Err(Error::RankDeficient(format!(
            "{m} samples for {n} unknowns"
        )));
    }
    debug_assert_eq!(y.len(), m);
    let mut ata = vec![vec![0.0; n]; n];
    let mut aty = vec![0.0; n];
    for (row, &yi) in rows.iter().zip(y) {
        debug_assert_eq!(row.len(), n);
        for i in 0..n {
            for j in i..n {
                ata[i][j] += row[i] * row[j];
            }
            aty[i] += row[i] * yi;
        }
    }
    #[allow(clippy::needless_range_loop)] // symmetric fill across two rows
    for i in 0..n {
        for j in 0..i {
            ata[i][j] = ata[j][i];
        }
    }
    solve_partial_pivot(&mut ata, &mut aty)
}
