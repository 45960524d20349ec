//! File formats: complexes as JSON, cochains as `simplex,value` CSV.
//!
//! Simplices are written as node labels joined by `-`, e.g. `EUR-USD` or
//! `1-2-3`. Labels therefore must not contain `-` themselves.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::complex::{Degree, NodeId, SimplicialComplex2};
use crate::error::{Error, Result};

/// On-disk shape of a complex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexFile {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<[NodeId; 2]>,
    #[serde(default)]
    pub triangles: Vec<[NodeId; 3]>,
}

impl ComplexFile {
    pub fn from_complex(sc: &SimplicialComplex2) -> Self {
        Self {
            nodes: sc.nodes().to_vec(),
            edges: sc.labelled_edges(),
            triangles: sc.labelled_triangles(),
        }
    }

    pub fn into_complex(self, infer_triangles: bool) -> Result<SimplicialComplex2> {
        SimplicialComplex2::build(self.nodes, self.edges, self.triangles, infer_triangles)
    }
}

pub fn parse_complex_json(text: &str, infer_triangles: bool) -> Result<SimplicialComplex2> {
    let file: ComplexFile = serde_json::from_str(text)
        .map_err(|e| Error::ingestion(None, format!("complex JSON: {e}")))?;
    file.into_complex(infer_triangles)
}

pub fn read_complex_json(
    path: impl AsRef<Path>,
    infer_triangles: bool,
) -> Result<SimplicialComplex2> {
    let mut text = String::new();
    File::open(path.as_ref())?.read_to_string(&mut text)?;
    parse_complex_json(&text, infer_triangles)
}

pub fn write_complex_json(sc: &SimplicialComplex2, path: impl AsRef<Path>) -> Result<()> {
    let mut f = File::create(path)?;
    serde_json::to_writer_pretty(&mut f, &ComplexFile::from_complex(sc))?;
    writeln!(f)?;
    Ok(())
}

/// Resolves `i-j` / `i-j-k` labels against a complex.
pub struct SimplexParser<'a> {
    sc: &'a SimplicialComplex2,
    by_label: HashMap<String, NodeId>,
}

impl<'a> SimplexParser<'a> {
    pub fn new(sc: &'a SimplicialComplex2) -> Self {
        let by_label = sc
            .nodes()
            .iter()
            .map(|n| (n.to_string(), n.clone()))
            .collect();
        Self { sc, by_label }
    }

    /// Index of the simplex and the sign of the written orientation relative
    /// to the stored one.
    pub fn parse(&self, degree: Degree, label: &str) -> Option<(usize, f64)> {
        let parts: Vec<&NodeId> = label
            .trim()
            .split('-')
            .map(|p| self.by_label.get(p.trim()))
            .collect::<Option<_>>()?;
        match (degree, parts.as_slice()) {
            (Degree::Node, [a]) => self.sc.node_index(a).map(|i| (i, 1.0)),
            (Degree::Edge, [a, b]) => self.sc.oriented_edge(a, b),
            (Degree::Triangle, [a, b, c]) => self.sc.oriented_triangle(a, b, c),
            _ => None,
        }
    }
}

/// One parsed row of a cochain file.
#[derive(Clone, Debug, PartialEq)]
pub struct CochainRow {
    pub index: usize,
    /// Value re-signed to the stored orientation.
    pub value: f64,
    /// Whether the file wrote the simplex in its stored orientation.
    pub canonical: bool,
    pub split: Option<bool>,
}

/// Reads `simplex,value[,split]` rows. Unknown simplices and repeated rows
/// are ingestion errors carrying the 1-based data row number.
pub fn read_cochain_rows(
    sc: &SimplicialComplex2,
    degree: Degree,
    reader: impl Read,
) -> Result<Vec<CochainRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let simplex_col =
        col("simplex").ok_or_else(|| Error::ingestion(None, "missing `simplex` column"))?;
    let value_col = col("value").ok_or_else(|| Error::ingestion(None, "missing `value` column"))?;
    let split_col = col("split");
    let parser = SimplexParser::new(sc);
    let mut seen = vec![false; sc.count(degree)];
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::ingestion(Some(row), e.to_string()))?;
        let label = rec.get(simplex_col).unwrap_or("");
        let (index, sign) = parser
            .parse(degree, label)
            .ok_or_else(|| Error::ingestion(Some(row), format!("unknown simplex `{label}`")))?;
        if std::mem::replace(&mut seen[index], true) {
            return Err(Error::ingestion(
                Some(row),
                format!("duplicate row for simplex `{label}`"),
            ));
        }
        let raw = rec.get(value_col).unwrap_or("");
        let value: f64 = raw
            .parse()
            .map_err(|_| Error::ingestion(Some(row), format!("invalid value `{raw}`")))?;
        if !value.is_finite() {
            return Err(Error::ingestion(
                Some(row),
                format!("non-finite value `{raw}`"),
            ));
        }
        let split = match split_col.and_then(|c| rec.get(c)) {
            None | Some("") => None,
            Some(s) => Some(parse_split(s).ok_or_else(|| {
                Error::ingestion(Some(row), format!("invalid split `{s}` (use train/test)"))
            })?),
        };
        rows.push(CochainRow {
            index,
            value: sign * value,
            canonical: sign > 0.0,
            split,
        });
    }
    Ok(rows)
}

fn parse_split(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "train" | "1" | "true" => Some(true),
        "test" | "0" | "false" => Some(false),
        _ => None,
    }
}

/// Reads a full cochain; simplices absent from the file are zero and
/// reported as unobserved.
pub fn read_cochain_csv(
    sc: &SimplicialComplex2,
    degree: Degree,
    path: impl AsRef<Path>,
) -> Result<(DVector<f64>, Vec<bool>)> {
    let rows = read_cochain_rows(sc, degree, File::open(path)?)?;
    let mut values = DVector::zeros(sc.count(degree));
    let mut observed = vec![false; sc.count(degree)];
    for r in rows {
        values[r.index] = r.value;
        observed[r.index] = true;
    }
    Ok((values, observed))
}

/// Writes `simplex,value` for every simplex (or only those with `mask[i]`).
pub fn write_cochain_csv(
    sc: &SimplicialComplex2,
    degree: Degree,
    values: &DVector<f64>,
    mask: Option<&[bool]>,
    writer: impl Write,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["simplex", "value"])?;
    for i in 0..values.len() {
        if mask.is_some_and(|m| !m[i]) {
            continue;
        }
        w.write_record([sc.simplex_label(degree, i), values[i].to_string()])?;
    }
    w.flush()?;
    Ok(())
}
