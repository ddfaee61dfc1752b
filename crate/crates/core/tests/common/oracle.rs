//! Reference computations that deliberately avoid the library's
//! orthogonalization code: normal equations solved by Gaussian elimination
//! and explicit dense projectors.

#![allow(dead_code)]

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting. `a` is row-major.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let k = b.len();
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..k {
            let f = a[row][col] / a[col][col];
            let (upper, lower) = a.split_at_mut(row);
            for (t, s) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *t -= f * s;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut acc = b[i];
        for j in i + 1..k {
            acc -= a[i][j] * x[j];
        }
        x[i] = acc / a[i][i];
    }
    x
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Coefficients of `v` regressed on `cols` via `AᵀA b = Aᵀv`.
pub fn solve_normal_equations(cols: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let gram = cols
        .iter()
        .map(|ci| cols.iter().map(|cj| dot(ci, cj)).collect())
        .collect();
    let rhs = cols.iter().map(|c| dot(c, v)).collect();
    gauss_solve(gram, rhs)
}

/// Dense `n × n` projector `A (AᵀA)⁻¹ Aᵀ`, row-major.
pub fn dense_projector(cols: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = cols.first().map_or(0, Vec::len);
    let mut p = vec![vec![0.0; n]; n];
    if cols.is_empty() {
        return p;
    }
    // Column i of P is the fitted value of e_i.
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        let b = solve_normal_equations(cols, &e);
        for r in 0..n {
            p[r][i] = cols.iter().zip(&b).map(|(c, bj)| c[r] * bj).sum();
        }
    }
    p
}

/// `(I − P) v`.
pub fn apply_residual_projector(p: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    p.iter().zip(v).map(|(row, vi)| vi - dot(row, v)).collect()
}

/// Coefficient of `x` in the regression of `y` on `[x, covs...]`, via
/// normal equations.
pub fn slope_normal_equations(x: &[f64], y: &[f64], covs: &[Vec<f64>]) -> f64 {
    let mut design = vec![x.to_vec()];
    design.extend(covs.iter().cloned());
    solve_normal_equations(&design, y)[0]
}

/// Every subset of `0..p` as a sorted index list.
pub fn all_subsets(items: &[usize]) -> Vec<Vec<usize>> {
    (0u64..1 << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &i)| i)
                .collect()
        })
        .collect()
}
