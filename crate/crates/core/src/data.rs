//! Loading, interaction construction, centering and validation.

use std::collections::HashSet;
use std::io;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};

/// Where a dataset came from and how its columns were picked.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Provenance {
    pub source: Option<PathBuf>,
    pub y_col: String,
    pub x_col: String,
    pub cov_cols: Vec<String>,
    pub rows_read: usize,
    pub rows_dropped: usize,
    pub interactions: Vec<String>,
}

/// Centered, validated response, explanatory variable and covariates.
///
/// The uncentered covariates are kept alongside so that interaction terms
/// can be formed from raw values.
#[derive(Debug, Clone)]
pub struct Dataset {
    y: Vector,
    x: Vector,
    s: Matrix,
    raw_s: Matrix,
    provenance: Provenance,
}

/// Which columns become covariates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CovariateSelection {
    Explicit(Vec<String>),
    /// Every column except the response and the explanatory variable.
    AllOthers,
}

impl Dataset {
    /// Centers and validates in-memory columns.
    pub fn from_columns(y: Vector, x: Vector, s: Matrix) -> Result<Self> {
        let provenance = Provenance {
            y_col: "y".into(),
            x_col: "x".into(),
            cov_cols: s.labels().to_vec(),
            rows_read: y.len(),
            ..Provenance::default()
        };
        Self::build(y, x, s, provenance)
    }

    fn build(y: Vector, x: Vector, s: Matrix, provenance: Provenance) -> Result<Self> {
        let n = y.len();
        if x.len() != n || (!s.is_empty() && s.nrows() != n) {
            return Err(Error::InvalidInput(format!(
                "row counts differ: y {n}, x {}, covariates {}",
                x.len(),
                s.nrows()
            )));
        }
        let p = s.ncols();
        if n <= p + 1 {
            return Err(Error::TooFewRows { n, p });
        }
        if let Some(bad) = [&y, &x]
            .into_iter()
            .chain(s.columns())
            .position(|c| c.iter().any(|v| !v.is_finite()))
        {
            let label = match bad {
                0 => provenance.y_col.clone(),
                1 => provenance.x_col.clone(),
                j => s.label(j - 2).to_string(),
            };
            return Err(Error::InvalidInput(format!(
                "column '{label}' has non-finite values"
            )));
        }

        let raw_s = if s.is_empty() { Matrix::empty(n) } else { s };
        let centered_s = linalg::center_columns(&raw_s)?;
        let y = linalg::center(&y);
        let x = linalg::center(&x);

        // [s | x | y] must be linearly independent.
        let mut all = centered_s.clone();
        all.push_column(x.clone(), provenance.x_col.clone())?;
        all.push_column(y.clone(), provenance.y_col.clone())?;
        linalg::make_context(&all)?;

        Ok(Self {
            y,
            x,
            s: centered_s,
            raw_s,
            provenance,
        })
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Centered covariate matrix.
    pub fn covariates(&self) -> &Matrix {
        &self.s
    }

    /// Covariates before centering.
    pub fn raw_covariates(&self) -> &Matrix {
        &self.raw_s
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.s.ncols()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Labels of covariates at the given indices.
    pub fn labels_of(&self, indices: &[usize]) -> Vec<String> {
        indices
            .iter()
            .map(|&i| self.s.label(i).to_string())
            .collect()
    }

    /// Writes the centered columns as comma-separated text with a header
    /// row. Reloading the output reproduces the same values exactly.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![
            self.provenance.y_col.as_str(),
            self.provenance.x_col.as_str(),
        ];
        header.extend(self.s.labels().iter().map(String::as_str));
        w.write_record(&header)?;
        for i in 0..self.n() {
            let mut row = vec![self.y[i].to_string(), self.x[i].to_string()];
            row.extend(self.s.columns().iter().map(|c| c[i].to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn is_missing(field: &str) -> bool {
    field.is_empty() || field.eq_ignore_ascii_case("na") || field.eq_ignore_ascii_case("nan")
}

fn parse_field(field: &str) -> Option<f64> {
    if is_missing(field) {
        return None;
    }
    field.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Loads `y`, `x` and the listed covariates from a comma-separated file with
/// a header row. Rows with a missing or non-numeric value in any selected
/// column are dropped before centering.
pub fn load_csv(
    path: impl AsRef<Path>,
    y_col: &str,
    x_col: &str,
    cov_cols: &[String],
) -> Result<Dataset> {
    load_csv_with(
        path,
        y_col,
        x_col,
        &CovariateSelection::Explicit(cov_cols.to_vec()),
    )
}

pub fn load_csv_with(
    path: impl AsRef<Path>,
    y_col: &str,
    x_col: &str,
    selection: &CovariateSelection,
) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(io::BufReader::new(file));
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();

    let find = |label: &str| {
        header
            .iter()
            .position(|h| h == label)
            .ok_or_else(|| Error::ColumnNotFound(label.to_string()))
    };
    let y_idx = find(y_col)?;
    let x_idx = find(x_col)?;
    if y_idx == x_idx {
        return Err(Error::InvalidInput(format!(
            "'{y_col}' cannot be both response and explanatory variable"
        )));
    }
    let cov_labels: Vec<String> = match selection {
        CovariateSelection::Explicit(list) => list.clone(),
        CovariateSelection::AllOthers => header
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != y_idx && i != x_idx)
            .map(|(_, h)| h.clone())
            .collect(),
    };
    let mut cov_idx = Vec::with_capacity(cov_labels.len());
    for label in &cov_labels {
        let i = find(label)?;
        if i == y_idx || i == x_idx {
            return Err(Error::InvalidInput(format!(
                "'{label}' is the response or explanatory variable and cannot be a covariate"
            )));
        }
        cov_idx.push(i);
    }

    let mut y = Vec::new();
    let mut x = Vec::new();
    let mut cols: Vec<Vector> = vec![Vec::new(); cov_idx.len()];
    let mut rows_read = 0;
    let mut rows_dropped = 0;
    let mut values = Vec::with_capacity(cov_idx.len() + 2);
    for record in reader.records() {
        let record = record?;
        rows_read += 1;
        values.clear();
        let complete = std::iter::once(y_idx)
            .chain(std::iter::once(x_idx))
            .chain(cov_idx.iter().copied())
            .all(|i| match record.get(i).and_then(parse_field) {
                Some(v) => {
                    values.push(v);
                    true
                }
                None => false,
            });
        if !complete {
            rows_dropped += 1;
            continue;
        }
        y.push(values[0]);
        x.push(values[1]);
        for (c, v) in cols.iter_mut().zip(&values[2..]) {
            c.push(*v);
        }
    }

    let n = y.len();
    let s = if cov_labels.is_empty() {
        Matrix::empty(n)
    } else {
        Matrix::new(cols, cov_labels.clone())?
    };
    let provenance = Provenance {
        source: Some(path.to_path_buf()),
        y_col: y_col.to_string(),
        x_col: x_col.to_string(),
        cov_cols: cov_labels,
        rows_read,
        rows_dropped,
        interactions: Vec::new(),
    };
    Dataset::build(y, x, s, provenance)
}

/// Which pairwise products of covariates to add.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InteractionSpec {
    pub base_labels: Vec<String>,
    /// Unordered pairs that are skipped.
    pub excluded_pairs: Vec<(String, String)>,
}

impl InteractionSpec {
    pub fn new(base_labels: Vec<String>) -> Self {
        Self {
            base_labels,
            excluded_pairs: Vec::new(),
        }
    }

    pub fn exclude(mut self, a: impl Into<String>, b: impl Into<String>) -> Self {
        self.excluded_pairs.push((a.into(), b.into()));
        self
    }

    fn is_excluded(&self, a: &str, b: &str) -> bool {
        self.excluded_pairs
            .iter()
            .any(|(p, q)| (p == a && q == b) || (p == b && q == a))
    }
}

/// Label of the product column for `a` and `b`.
pub fn interaction_label(a: &str, b: &str) -> String {
    format!("{a}×{b}")
}

/// Appends the product of every unordered pair of base columns that is not
/// excluded. Products are taken on the uncentered values and centered
/// afterwards, along with everything else.
pub fn build_interactions(d: &Dataset, spec: &InteractionSpec) -> Result<Dataset> {
    if spec.base_labels.is_empty() {
        return Ok(d.clone());
    }
    let raw = d.raw_covariates();
    let base: Vec<usize> = spec
        .base_labels
        .iter()
        .map(|l| {
            raw.position(l)
                .ok_or_else(|| Error::ColumnNotFound(l.clone()))
        })
        .collect::<Result<_>>()?;
    let known: HashSet<&str> = spec.base_labels.iter().map(String::as_str).collect();
    for (a, b) in &spec.excluded_pairs {
        for l in [a, b] {
            if !known.contains(l.as_str()) {
                return Err(Error::InvalidInput(format!(
                    "excluded pair {a}:{b} references '{l}', which is not an interaction base"
                )));
            }
        }
    }

    let mut s = raw.clone();
    let mut added = Vec::new();
    for (i, &ci) in base.iter().enumerate() {
        for &cj in &base[i + 1..] {
            let (a, b) = (raw.label(ci), raw.label(cj));
            if spec.is_excluded(a, b) {
                continue;
            }
            let product = raw
                .column(ci)
                .iter()
                .zip(raw.column(cj))
                .map(|(u, v)| u * v)
                .collect();
            let label = interaction_label(a, b);
            s.push_column(product, label.clone())?;
            added.push(label);
        }
    }

    let mut provenance = d.provenance.clone();
    provenance.cov_cols = s.labels().to_vec();
    provenance.interactions.extend(added);
    // x and y are already centered; rebuilding re-centers only the new columns.
    Dataset::build(d.y.clone(), d.x.clone(), s, provenance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn three_rows_no_missing() {
        let f = write_tmp("y,x\n1,2\n2,1\n6,3\n");
        let d = load_csv(f.path(), "y", "x", &[]).unwrap();
        assert_eq!(d.n(), 3);
        assert_eq!(d.p(), 0);
        assert_eq!(d.y(), &[-2.0, -1.0, 3.0]);
        assert_eq!(d.x(), &[0.0, -1.0, 1.0]);
    }

    #[test]
    fn missing_cell_drops_row() {
        let f = write_tmp("y,x,a\n1,2,0\n2,,1\n6,3,5\n4,7,2\n3,NA,1\n5,nan,9\n0,1,1\n2,2,0\n");
        let d = load_csv(f.path(), "y", "x", &["a".to_string()]).unwrap();
        assert_eq!(d.n(), 5);
        assert_eq!(d.provenance().rows_read, 8);
        assert_eq!(d.provenance().rows_dropped, 3);
    }

    #[test]
    fn missing_in_unselected_column_is_ignored() {
        let f = write_tmp("y,x,junk\n1,2,\n2,1,\n6,3,\n");
        let d = load_csv(f.path(), "y", "x", &[]).unwrap();
        assert_eq!(d.n(), 3);
    }

    #[test]
    fn duplicate_covariate_is_rank_deficient() {
        let f = write_tmp("y,x,a\n1,2,0\n2,1,1\n6,3,5\n4,7,2\n0,1,1\n2,2,0\n");
        let err = load_csv(f.path(), "y", "x", &["a".into(), "a".into()]).unwrap_err();
        assert!(
            matches!(err, Error::RankDeficient(ref l) if l == "a"),
            "{err}"
        );
    }

    #[test]
    fn constant_covariate_is_rejected() {
        let f = write_tmp("y,x,c\n1,2,3\n2,1,3\n6,3,3\n4,7,3\n0,1,3\n");
        let err = load_csv(f.path(), "y", "x", &["c".into()]).unwrap_err();
        assert!(matches!(err, Error::RankDeficient(ref l) if l == "c"));
    }

    #[test]
    fn load_errors() {
        assert!(matches!(
            load_csv("/nonexistent/data.csv", "y", "x", &[]),
            Err(Error::Io(_))
        ));
        let f = write_tmp("y,x\n1,2\n2,1\n6,3\n");
        assert!(matches!(
            load_csv(f.path(), "y", "z", &[]),
            Err(Error::ColumnNotFound(ref l)) if l == "z"
        ));
        let f = write_tmp("y,x,a\n1,2,0\n2,,1\n6,3,5\n");
        assert!(matches!(
            load_csv(f.path(), "y", "x", &["a".into()]),
            Err(Error::TooFewRows { n: 2, p: 1 })
        ));
    }

    #[test]
    fn all_others_selection() {
        let f = write_tmp("a,y,b,x\n1,2,0,1\n2,1,1,3\n6,3,5,2\n4,7,2,2\n0,1,1,5\n2,2,0,0\n");
        let d = load_csv_with(f.path(), "y", "x", &CovariateSelection::AllOthers).unwrap();
        assert_eq!(d.covariates().labels(), &["a".to_string(), "b".to_string()]);
    }

    fn dataset_with_bases(bases: usize, n: usize) -> Dataset {
        // Polynomial-free, deterministic but irregular columns.
        let col = |k: usize| -> Vec<f64> {
            (0..n)
                .map(|i| (((i + 1) * (k + 3) * 7919) % 101) as f64 / 10.0)
                .collect()
        };
        let labels = (0..bases).map(|k| format!("b{k}")).collect();
        let s = Matrix::new((0..bases).map(|k| col(k + 2)).collect(), labels).unwrap();
        Dataset::from_columns(col(0), col(1), s).unwrap()
    }

    #[test]
    fn interaction_counts() {
        let d = dataset_with_bases(7, 60);
        let bases: Vec<String> = d.covariates().labels().to_vec();
        let spec = InteractionSpec::new(bases).exclude("b5", "b6");
        let out = build_interactions(&d, &spec).unwrap();
        assert_eq!(out.p(), 27);
        assert!(out.covariates().position("b0×b1").is_some());
        assert!(out.covariates().position("b5×b6").is_none());

        let d2 = dataset_with_bases(2, 20);
        let out2 =
            build_interactions(&d2, &InteractionSpec::new(vec!["b0".into(), "b1".into()])).unwrap();
        assert_eq!(out2.p(), 3);
        assert_eq!(out2.covariates().label(2), "b0×b1");

        let same = build_interactions(&d2, &InteractionSpec::default()).unwrap();
        assert_eq!(same.covariates(), d2.covariates());
    }

    #[test]
    fn interactions_use_raw_values() {
        let d = dataset_with_bases(2, 20);
        let out =
            build_interactions(&d, &InteractionSpec::new(vec!["b0".into(), "b1".into()])).unwrap();
        let raw = d.raw_covariates();
        let product: Vec<f64> = raw
            .column(0)
            .iter()
            .zip(raw.column(1))
            .map(|(a, b)| a * b)
            .collect();
        assert_eq!(
            out.covariates().column(2),
            linalg::center(&product).as_slice()
        );
        assert_eq!(out.raw_covariates().column(2), product.as_slice());
        // Existing covariates are untouched.
        assert_eq!(out.covariates().column(0), d.covariates().column(0));
    }

    #[test]
    fn interaction_errors() {
        let d = dataset_with_bases(2, 20);
        assert!(matches!(
            build_interactions(&d, &InteractionSpec::new(vec!["nope".into()])),
            Err(Error::ColumnNotFound(_))
        ));
        let spec = InteractionSpec::new(vec!["b0".into(), "b1".into()]).exclude("b0", "zz");
        assert!(matches!(
            build_interactions(&d, &spec),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn mutually_exclusive_indicators_interact_to_zero() {
        let n = 12;
        let a: Vec<f64> = (0..n).map(|i| (i % 3 == 0) as u8 as f64).collect();
        let b: Vec<f64> = (0..n).map(|i| (i % 3 == 1) as u8 as f64).collect();
        let x: Vec<f64> = (0..n).map(|i| ((i * 5) % 7) as f64).collect();
        let y: Vec<f64> = (0..n).map(|i| ((i * 3) % 11) as f64).collect();
        let s = Matrix::new(vec![a, b], vec!["a".into(), "b".into()]).unwrap();
        let d = Dataset::from_columns(y, x, s).unwrap();
        let err = build_interactions(&d, &InteractionSpec::new(vec!["a".into(), "b".into()]))
            .unwrap_err();
        assert!(matches!(err, Error::RankDeficient(ref l) if l == "a×b"));
        let ok = build_interactions(
            &d,
            &InteractionSpec::new(vec!["a".into(), "b".into()]).exclude("b", "a"),
        )
        .unwrap();
        assert_eq!(ok.p(), 2);
    }
}
