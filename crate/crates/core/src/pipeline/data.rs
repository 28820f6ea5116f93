use std::collections::{BTreeMap, HashSet};
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// Column names recognized as metadata rather than variables.
pub const TIME_COLUMN: &str = "time";
pub const CONDITION_COLUMN: &str = "condition";

/// `n x p` observations with variable names and optional per-row time stamps
/// and condition labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSet {
    names: Vec<String>,
    data: Matrix,
    times: Option<Vec<f64>>,
    conditions: Option<Vec<String>>,
}

impl ObservationSet {
    pub fn new(
        names: Vec<String>,
        data: Matrix,
        times: Option<Vec<f64>>,
        conditions: Option<Vec<String>>,
    ) -> Result<Self> {
        let (n, p) = data.shape();
        if names.len() != p {
            return Err(Error::Dimension(format!("{} names for {p} columns", names.len())));
        }
        if p == 0 {
            return Err(Error::Data("no variables".into()));
        }
        if n == 0 {
            return Err(Error::Data("no observations".into()));
        }
        if n < 2 {
            return Err(Error::Data(format!("need at least two observations, got {n}")));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::Data(format!("duplicate variable name '{dup}'")));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("observations contain non-finite values".into()));
        }
        if times.as_ref().is_some_and(|t| t.len() != n) || conditions.as_ref().is_some_and(|c| c.len() != n) {
            return Err(Error::Dimension("metadata length differs from row count".into()));
        }
        Ok(Self { names, data, times, conditions })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn data(&self) -> &Matrix {
        &self.data
    }

    pub fn times(&self) -> Option<&[f64]> {
        self.times.as_deref()
    }

    pub fn conditions(&self) -> Option<&[String]> {
        self.conditions.as_deref()
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn p(&self) -> usize {
        self.data.ncols()
    }

    fn subset(&self, rows: &[usize]) -> Result<Self> {
        Self::new(
            self.names.clone(),
            self.data.select_rows(rows),
            self.times.as_ref().map(|t| rows.iter().map(|&r| t[r]).collect()),
            self.conditions.as_ref().map(|c| rows.iter().map(|&r| c[r].clone()).collect()),
        )
    }

    /// Rows grouped by condition label, sorted by label. Without a condition
    /// column the whole set is returned under the empty label.
    pub fn split_by_condition(&self) -> Result<Vec<(String, ObservationSet)>> {
        let Some(conds) = &self.conditions else {
            return Ok(vec![(String::new(), self.clone())]);
        };
        let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, c) in conds.iter().enumerate() {
            groups.entry(c.as_str()).or_default().push(i);
        }
        groups
            .into_iter()
            .map(|(label, rows)| {
                self.subset(&rows)
                    .map(|set| (label.to_string(), set))
                    .map_err(|e| Error::Data(format!("condition '{label}': {e}")))
            })
            .collect()
    }
}

/// Parses observations from CSV: a header of variable names, then one row
/// per observation. Columns named `time` and `condition` are metadata.
pub fn read_csv<R: Read>(reader: R) -> Result<ObservationSet> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let time_col = header.iter().position(|h| h.eq_ignore_ascii_case(TIME_COLUMN));
    let cond_col = header.iter().position(|h| h.eq_ignore_ascii_case(CONDITION_COLUMN));
    let var_cols: Vec<usize> =
        (0..header.len()).filter(|&c| Some(c) != time_col && Some(c) != cond_col).collect();
    let names: Vec<String> = var_cols.iter().map(|&c| header[c].clone()).collect();

    let mut values = Vec::new();
    let mut times = Vec::new();
    let mut conds = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let line = row + 2;
        let parse = |c: usize| -> Result<f64> {
            let cell = &record[c];
            cell.parse::<f64>().map_err(|_| {
                Error::Data(format!("line {line}, column '{}': '{cell}' is not numeric", header[c]))
            })
        };
        for &c in &var_cols {
            values.push(parse(c)?);
        }
        if let Some(c) = time_col {
            times.push(parse(c)?);
        }
        if let Some(c) = cond_col {
            conds.push(record[c].to_string());
        }
    }
    let n = values.len() / var_cols.len().max(1);
    if n == 0 {
        return Err(Error::Data("no observations".into()));
    }
    ObservationSet::new(
        names,
        Matrix::from_row_slice(n, var_cols.len(), &values),
        time_col.map(|_| times),
        cond_col.map(|_| conds),
    )
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<ObservationSet> {
    read_csv(std::fs::File::open(path)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CenterMode {
    /// Subtract column means.
    #[default]
    Mean,
    /// Subtract the column averages over rows at the earliest time stamp.
    Time0,
    None,
}

impl std::str::FromStr for CenterMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "mean" => Ok(CenterMode::Mean),
            "time0" => Ok(CenterMode::Time0),
            "none" => Ok(CenterMode::None),
            other => Err(format!("unknown centering '{other}' (expected mean|time0|none)")),
        }
    }
}

pub fn center(obs: &ObservationSet, mode: CenterMode) -> Result<ObservationSet> {
    let reference: Vector = match mode {
        CenterMode::None => return Ok(obs.clone()),
        CenterMode::Mean => obs.data.row_mean().transpose(),
        CenterMode::Time0 => {
            let times = obs
                .times()
                .ok_or_else(|| Error::Data("time0 centering needs a time column".into()))?;
            let t0 = times.iter().copied().fold(f64::INFINITY, f64::min);
            let rows: Vec<usize> = (0..times.len()).filter(|&i| times[i] == t0).collect();
            obs.data.select_rows(&rows).row_mean().transpose()
        }
    };
    let mut out = obs.clone();
    for mut row in out.data.row_iter_mut() {
        row -= reference.transpose();
    }
    Ok(out)
}

/// Maximum-likelihood covariance `(1/n) Σ (x − x̄)(x − x̄)ᵀ`.
pub fn sample_covariance(obs: &ObservationSet) -> Matrix {
    let n = obs.n() as f64;
    let mean = obs.data.row_mean();
    let mut centered = obs.data.clone();
    for mut row in centered.row_iter_mut() {
        row -= &mean;
    }
    let s = centered.transpose() * &centered / n;
    (&s + s.transpose()) * 0.5
}

/// Square numeric matrix stored as CSV with a header of variable names.
pub fn load_matrix_csv(path: impl AsRef<Path>) -> Result<(Vec<String>, Matrix)> {
    let set = load_csv(path)?;
    if set.n() != set.p() {
        return Err(Error::Data(format!("expected a square matrix, got {}x{}", set.n(), set.p())));
    }
    Ok((set.names.clone(), set.data.clone()))
}

/// Gold-standard edges from a CSV with `from,to` columns of variable names.
pub fn read_gold<R: Read>(reader: R, names: &[String]) -> Result<Vec<(usize, usize)>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Data(format!("gold file has no '{name}' column")))
    };
    let (from_col, to_col) = (col("from")?, col("to")?);
    let index = |name: &str| {
        names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Data(format!("gold edge references unknown variable '{name}'")))
    };
    let mut edges = Vec::new();
    for record in rdr.records() {
        let record = record?;
        edges.push((index(&record[from_col])?, index(&record[to_col])?));
    }
    Ok(edges)
}

pub fn load_gold(path: impl AsRef<Path>, names: &[String]) -> Result<Vec<(usize, usize)>> {
    read_gold(std::fs::File::open(path)?, names)
}
