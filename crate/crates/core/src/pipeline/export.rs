use std::io::{Read, Write};

use serde_json::json;

use super::roc::RocResult;
use super::scores::EdgeScoreMatrix;
use crate::error::{Error, Result};
use crate::graph::{Edge, Orientation};
use crate::linalg::Matrix;

const SIGNIFICANT_DIGITS: i32 = 12;

/// Shortest rendering of `x` at 12 significant digits: fixed notation for
/// moderate magnitudes, scientific otherwise, trailing zeros dropped.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..SIGNIFICANT_DIGITS).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{:.*e}", (SIGNIFICANT_DIGITS - 1) as usize, x);
        let (mantissa, e) = s.split_once('e').expect("scientific format");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{e}")
    }
}

fn round_sig(x: f64) -> f64 {
    fmt_sig(x).parse().unwrap_or(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
    Dot,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "dot" => Ok(Format::Dot),
            other => Err(format!("unknown format '{other}' (expected csv|json|dot)")),
        }
    }
}

fn name(names: &[String], i: usize) -> Result<&str> {
    names
        .get(i)
        .map(String::as_str)
        .ok_or_else(|| Error::Dimension(format!("node {i} has no name ({} names)", names.len())))
}

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Writes an edge list. Edges are sorted by `(from, to)`; an empty list
/// yields a header-only CSV, an empty JSON edge array or an empty digraph.
pub fn write_edges<W: Write>(
    mut w: W,
    names: &[String],
    edges: &[Edge],
    orientation: Orientation,
    format: Format,
) -> Result<()> {
    let mut edges = edges.to_vec();
    edges.sort_by_key(|e| (e.from, e.to));
    match format {
        Format::Csv => {
            let mut out = csv::Writer::from_writer(w);
            out.write_record(["from", "to", "weight"])?;
            for e in &edges {
                out.write_record([name(names, e.from)?, name(names, e.to)?, &fmt_sig(e.weight)])?;
            }
            out.flush()?;
        }
        Format::Json => {
            let p = names.len();
            let mut adjacency = vec![vec![0.0; p]; p];
            let mut list = Vec::with_capacity(edges.len());
            for e in &edges {
                name(names, e.from.max(e.to))?;
                adjacency[e.from][e.to] = round_sig(e.weight);
                list.push(json!({
                    "from": names[e.from],
                    "to": names[e.to],
                    "weight": round_sig(e.weight),
                    "sign_violation": e.sign_violation,
                }));
            }
            let doc = json!({
                "orientation": orientation,
                "nodes": names,
                "adjacency": adjacency,
                "edges": list,
            });
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w)?;
        }
        Format::Dot => {
            writeln!(w, "digraph G {{")?;
            for n in names {
                writeln!(w, "  {};", dot_id(n))?;
            }
            for e in &edges {
                let style = if e.sign_violation { ", style=dashed" } else { "" };
                writeln!(
                    w,
                    "  {} -> {} [weight={}{style}];",
                    dot_id(name(names, e.from)?),
                    dot_id(name(names, e.to)?),
                    fmt_sig(e.weight)
                )?;
            }
            writeln!(w, "}}")?;
        }
    }
    Ok(())
}

/// Writes every ordered pair `i != j` with its score, sorted by `(from, to)`.
/// DOT output keeps only strictly positive scores.
pub fn write_scores<W: Write>(mut w: W, names: &[String], scores: &EdgeScoreMatrix, format: Format) -> Result<()> {
    let p = scores.p();
    if names.len() != p {
        return Err(Error::Dimension(format!("{} names for {p} nodes", names.len())));
    }
    let pairs = (0..p).flat_map(|i| (0..p).filter(move |&j| j != i).map(move |j| (i, j)));
    match format {
        Format::Csv => {
            let mut out = csv::Writer::from_writer(w);
            out.write_record(["from", "to", "score"])?;
            for (i, j) in pairs {
                out.write_record([&names[i], &names[j], &fmt_sig(scores.scores[(i, j)])])?;
            }
            out.flush()?;
        }
        Format::Json => {
            let rows: Vec<Vec<f64>> =
                (0..p).map(|i| (0..p).map(|j| round_sig(scores.scores[(i, j)])).collect()).collect();
            let doc = json!({ "orientation": scores.orientation, "nodes": names, "scores": rows });
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w)?;
        }
        Format::Dot => {
            let edges: Vec<Edge> = pairs
                .filter(|&(i, j)| scores.scores[(i, j)] > 0.0)
                .map(|(i, j)| Edge { from: i, to: j, weight: scores.scores[(i, j)], sign_violation: false })
                .collect();
            write_edges(w, names, &edges, scores.orientation, Format::Dot)?;
        }
    }
    Ok(())
}

/// Reads a `from,to,score` CSV as written by [`write_scores`]. Nodes are
/// numbered in order of first appearance; missing pairs score zero.
pub fn read_scores<R: Read>(reader: R, orientation: Orientation) -> Result<(Vec<String>, EdgeScoreMatrix)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    let col = |n: &str| {
        header
            .iter()
            .position(|h| h.eq_ignore_ascii_case(n))
            .ok_or_else(|| Error::Data(format!("score file has no '{n}' column")))
    };
    let (fc, tc, sc) = (col("from")?, col("to")?, col("score")?);
    let mut names: Vec<String> = Vec::new();
    let mut triples = Vec::new();
    let index = |n: &str, names: &mut Vec<String>| match names.iter().position(|x| x == n) {
        Some(i) => i,
        None => {
            names.push(n.to_string());
            names.len() - 1
        }
    };
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let score: f64 = record[sc]
            .parse()
            .map_err(|_| Error::Data(format!("line {}: score '{}' is not numeric", row + 2, &record[sc])))?;
        let i = index(&record[fc], &mut names);
        let j = index(&record[tc], &mut names);
        if i == j {
            return Err(Error::Data(format!("line {}: self-loop in score file", row + 2)));
        }
        triples.push((i, j, score));
    }
    if names.len() < 2 {
        return Err(Error::Data("score file has fewer than two nodes".into()));
    }
    let mut m = Matrix::zeros(names.len(), names.len());
    for (i, j, s) in triples {
        m[(i, j)] = s;
    }
    Ok((names, EdgeScoreMatrix { scores: m, orientation }))
}

pub fn write_roc<W: Write>(mut w: W, roc: &RocResult, format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            let mut out = csv::Writer::from_writer(w);
            out.write_record(["fpr", "tpr"])?;
            for &(f, t) in &roc.points {
                out.write_record([fmt_sig(f), fmt_sig(t)])?;
            }
            out.flush()?;
        }
        Format::Json => {
            let points: Vec<[f64; 2]> = roc.points.iter().map(|&(f, t)| [round_sig(f), round_sig(t)]).collect();
            let doc = json!({ "auc": round_sig(roc.auc), "thresholds": roc.thresholds, "points": points });
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w)?;
        }
        Format::Dot => return Err(Error::InvalidArgument("ROC curves have no DOT rendering".into())),
    }
    Ok(())
}

/// Observations as CSV with an optional leading `time` column.
pub fn write_observations<W: Write>(w: W, names: &[String], data: &Matrix, times: Option<&[f64]>) -> Result<()> {
    if names.len() != data.ncols() {
        return Err(Error::Dimension(format!("{} names for {} columns", names.len(), data.ncols())));
    }
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<&str> = Vec::new();
    if times.is_some() {
        header.push("time");
    }
    header.extend(names.iter().map(String::as_str));
    out.write_record(&header)?;
    for (r, row) in data.row_iter().enumerate() {
        let mut rec: Vec<String> = Vec::with_capacity(header.len());
        if let Some(t) = times {
            rec.push(fmt_sig(t[r]));
        }
        rec.extend(row.iter().map(|&v| fmt_sig(v)));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}
