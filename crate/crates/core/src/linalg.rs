//! Dense column-major linear algebra for centered data.
//!
//! Everything in here works on plain `f64` columns. Projections onto a span
//! are computed from an orthonormal basis built by modified Gram-Schmidt with
//! one full reorthogonalization pass, so `wᵀw` is never formed or inverted.
//! Full multiple-regression coefficients ([`multi_slope`]) go through a
//! separate Householder least-squares solve, which gives the residual-based
//! path an independent cross-check.

use crate::error::{Error, Result};

/// Relative tolerance for the centering invariant (scaled by the largest
/// absolute entry of a column).
pub const EPS_CENTER: f64 = 1e-10;
/// Relative tolerance for orthogonality of residuals (scaled by `‖v‖`).
pub const EPS_ORTH: f64 = 1e-8;
/// Relative tolerance for the linear-independence check.
pub const EPS_RANK: f64 = 1e-10;

pub type Vector = Vec<f64>;

/// Labelled columns sharing a common row count.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    nrows: usize,
    columns: Vec<Vector>,
    labels: Vec<String>,
}

impl Matrix {
    pub fn new(columns: Vec<Vector>, labels: Vec<String>) -> Result<Self> {
        if columns.len() != labels.len() {
            return Err(Error::InvalidInput(format!(
                "{} columns but {} labels",
                columns.len(),
                labels.len()
            )));
        }
        let nrows = columns.first().map_or(0, Vec::len);
        if let Some((i, _)) = columns.iter().enumerate().find(|(_, c)| c.len() != nrows) {
            return Err(Error::InvalidInput(format!(
                "column '{}' has {} rows, expected {}",
                labels[i],
                columns[i].len(),
                nrows
            )));
        }
        Ok(Self {
            nrows,
            columns,
            labels,
        })
    }

    /// Columns labelled `c0`, `c1`, ...
    pub fn unlabeled(columns: Vec<Vector>) -> Result<Self> {
        let labels = (0..columns.len()).map(|i| format!("c{i}")).collect();
        Self::new(columns, labels)
    }

    /// A matrix with `nrows` rows and no columns.
    pub fn empty(nrows: usize) -> Self {
        Self {
            nrows,
            columns: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }

    pub fn columns(&self) -> &[Vector] {
        &self.columns
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Sub-matrix of the given columns, in the given order.
    pub fn select(&self, indices: &[usize]) -> Matrix {
        Matrix {
            nrows: self.nrows,
            columns: indices.iter().map(|&i| self.columns[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
        }
    }

    pub fn push_column(&mut self, column: Vector, label: impl Into<String>) -> Result<()> {
        let label = label.into();
        if self.columns.is_empty() && self.nrows == 0 {
            self.nrows = column.len();
        }
        if column.len() != self.nrows {
            return Err(Error::InvalidInput(format!(
                "column '{label}' has {} rows, expected {}",
                column.len(),
                self.nrows
            )));
        }
        self.columns.push(column);
        self.labels.push(label);
        Ok(())
    }

    pub fn into_parts(self) -> (Vec<Vector>, Vec<String>) {
        (self.columns, self.labels)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Subtracts the mean from `v` unless it is already centered within
/// [`EPS_CENTER`]; skipping the subtraction keeps centering exactly
/// idempotent.
pub fn center(v: &[f64]) -> Vector {
    let m = mean(v);
    let scale = v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if m.abs() <= EPS_CENTER * scale {
        v.to_vec()
    } else {
        v.iter().map(|x| x - m).collect()
    }
}

pub fn center_columns(m: &Matrix) -> Result<Matrix> {
    if m.nrows() == 0 {
        return Err(Error::InvalidInput(
            "cannot center a matrix with no rows".into(),
        ));
    }
    Ok(Matrix {
        nrows: m.nrows,
        columns: m.columns.iter().map(|c| center(c)).collect(),
        labels: m.labels.clone(),
    })
}

/// Standard deviation with the `1/n` convention, for centered vectors.
pub fn std_dev(v: &[f64]) -> f64 {
    (dot(v, v) / v.len() as f64).sqrt()
}

/// Orthogonal projection onto the column span of a basis matrix.
#[derive(Debug, Clone)]
pub struct ProjectionContext {
    basis: Matrix,
    orthonormal: Vec<Vector>,
}

/// Builds the projection onto `span(w)`. An empty `w` gives the zero
/// projection.
pub fn make_context(w: &Matrix) -> Result<ProjectionContext> {
    let orthonormal =
        orthonormalize(w.columns()).map_err(|i| Error::RankDeficient(w.label(i).to_string()))?;
    Ok(ProjectionContext {
        basis: w.clone(),
        orthonormal,
    })
}

/// Modified Gram-Schmidt with reorthogonalization. On rank deficiency returns
/// the index of the first column that adds nothing new to the span.
pub(crate) fn orthonormalize(columns: &[Vector]) -> std::result::Result<Vec<Vector>, usize> {
    let largest = columns.iter().map(|c| norm(c)).fold(0.0_f64, f64::max);
    let mut q: Vec<Vector> = Vec::with_capacity(columns.len());
    for (j, col) in columns.iter().enumerate() {
        let original = norm(col);
        if !original.is_finite() || original == 0.0 || original <= EPS_RANK * largest {
            return Err(j);
        }
        let mut v = col.clone();
        for _ in 0..2 {
            for qi in &q {
                let c = dot(qi, &v);
                axpy(-c, qi, &mut v);
            }
        }
        let r = norm(&v);
        if r <= EPS_RANK * original {
            return Err(j);
        }
        v.iter_mut().for_each(|x| *x /= r);
        q.push(v);
    }
    Ok(q)
}

impl ProjectionContext {
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.orthonormal.len()
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if !self.orthonormal.is_empty() && v.len() != self.basis.nrows() {
            return Err(Error::InvalidInput(format!(
                "vector has {} rows, projection basis has {}",
                v.len(),
                self.basis.nrows()
            )));
        }
        Ok(())
    }

    /// `v - fitted(v)`.
    pub fn residual(&self, v: &[f64]) -> Result<Vector> {
        self.check_len(v)?;
        let mut r = v.to_vec();
        for q in &self.orthonormal {
            let c = dot(q, &r);
            axpy(-c, q, &mut r);
        }
        Ok(r)
    }

    pub fn fitted(&self, v: &[f64]) -> Result<Vector> {
        self.check_len(v)?;
        let mut f = vec![0.0; v.len()];
        for q in &self.orthonormal {
            axpy(dot(q, v), q, &mut f);
        }
        Ok(f)
    }

    /// `‖fitted(v)‖² / ‖v‖²`.
    pub fn r_squared(&self, v: &[f64]) -> Result<f64> {
        self.check_len(v)?;
        let vv = dot(v, v);
        if vv == 0.0 || !vv.is_finite() {
            return Err(Error::DegenerateInput(
                "cannot take R² of a zero vector".into(),
            ));
        }
        let explained: f64 = self.orthonormal.iter().map(|q| dot(q, v).powi(2)).sum();
        Ok((explained / vv).clamp(0.0, 1.0))
    }
}

pub fn residualize(ctx: &ProjectionContext, targets: &Matrix) -> Result<Matrix> {
    if !ctx.basis.is_empty() && !targets.is_empty() && targets.nrows() != ctx.basis.nrows() {
        return Err(Error::InvalidInput(format!(
            "targets have {} rows, projection basis has {}",
            targets.nrows(),
            ctx.basis.nrows()
        )));
    }
    let columns = targets
        .columns()
        .iter()
        .map(|c| ctx.residual(c))
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix {
        nrows: targets.nrows(),
        columns,
        labels: targets.labels().to_vec(),
    })
}

/// Least-squares slope of `y_res` on `x_res` through the origin.
pub fn simple_slope(x_res: &[f64], y_res: &[f64]) -> Result<f64> {
    if x_res.len() != y_res.len() {
        return Err(Error::InvalidInput(format!(
            "x has {} rows, y has {}",
            x_res.len(),
            y_res.len()
        )));
    }
    let xx = dot(x_res, x_res);
    if xx == 0.0 || !xx.is_finite() {
        return Err(Error::DegenerateExplanatory);
    }
    Ok(dot(x_res, y_res) / xx)
}

/// Coefficient of `x` in the least-squares fit of `y` on `x` and every
/// column of `covs` (no intercept; inputs are centered).
pub fn multi_slope(x: &[f64], y: &[f64], covs: &Matrix) -> Result<f64> {
    let mut design = Vec::with_capacity(covs.ncols() + 1);
    design.push(x.to_vec());
    design.extend(covs.columns().iter().cloned());
    let coefs = householder_lstsq(design, y).map_err(|j| {
        if j == 0 {
            Error::RankDeficient("x".into())
        } else {
            Error::RankDeficient(covs.label(j - 1).to_string())
        }
    })?;
    Ok(coefs[0])
}

/// Solves `min ‖A b − y‖` by Householder QR. `columns` is consumed as
/// scratch. On rank deficiency returns the offending column index.
pub(crate) fn householder_lstsq(
    mut columns: Vec<Vector>,
    y: &[f64],
) -> std::result::Result<Vec<f64>, usize> {
    let k = columns.len();
    let n = y.len();
    if columns.iter().any(|c| c.len() != n) || k > n {
        return Err(k.min(columns.iter().position(|c| c.len() != n).unwrap_or(k)));
    }
    let largest = columns.iter().map(|c| norm(c)).fold(0.0_f64, f64::max);
    let col_norms: Vec<f64> = columns.iter().map(|c| norm(c)).collect();
    let mut rhs = y.to_vec();
    let mut diag = vec![0.0; k];

    for j in 0..k {
        let (head, tail) = columns.split_at_mut(j + 1);
        let a = &mut head[j];
        let sub_norm = norm(&a[j..]);
        if !sub_norm.is_finite()
            || col_norms[j] <= EPS_RANK * largest
            || sub_norm <= EPS_RANK * col_norms[j]
        {
            return Err(j);
        }
        let alpha = if a[j] > 0.0 { -sub_norm } else { sub_norm };
        // Reflector v = a[j..] - alpha e1, stored in place.
        a[j] -= alpha;
        let vtv = dot(&a[j..], &a[j..]);
        let v = &a[j..];
        for other in tail.iter_mut() {
            let s = 2.0 * dot(v, &other[j..]) / vtv;
            axpy(-s, v, &mut other[j..]);
        }
        let s = 2.0 * dot(v, &rhs[j..]) / vtv;
        axpy(-s, v, &mut rhs[j..]);
        diag[j] = alpha;
    }

    // Back substitution on R b = Qᵀ y; R's strict upper triangle lives in
    // columns[j][i] for i < j.
    let mut b = vec![0.0; k];
    for i in (0..k).rev() {
        let mut acc = rhs[i];
        for j in i + 1..k {
            acc -= columns[j][i] * b[j];
        }
        b[i] = acc / diag[i];
    }
    Ok(b)
}

pub fn r_squared(basis: &Matrix, v: &[f64]) -> Result<f64> {
    make_context(basis)?.r_squared(v)
}

pub fn correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "vectors have {} and {} rows",
            a.len(),
            b.len()
        )));
    }
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 || !na.is_finite() || !nb.is_finite() {
        return Err(Error::DegenerateInput(
            "correlation with a zero vector".into(),
        ));
    }
    Ok((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}
