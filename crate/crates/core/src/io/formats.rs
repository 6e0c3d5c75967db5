use std::io::{BufRead, BufReader, Read, Write};

use super::{assign_weights, Format, GraphIoError};
use crate::matrix::AdjacencyMatrix;

/// Edges as read from a file, 0-based, before cleaning.
pub(super) struct ParsedGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    weighted: bool,
}

impl ParsedGraph {
    pub(super) fn into_matrix(self, weight_seed: u64) -> Result<AdjacencyMatrix, GraphIoError> {
        if self.weighted {
            Ok(AdjacencyMatrix::from_edges(self.n, self.edges)?)
        } else {
            let a = AdjacencyMatrix::from_edges(self.n, self.edges)?;
            Ok(assign_weights(&a, weight_seed))
        }
    }
}

/// Numbered lines with surrounding whitespace removed.
fn lines<R: Read>(reader: R) -> impl Iterator<Item = Result<(usize, String), GraphIoError>> {
    BufReader::new(reader).lines().enumerate().map(|(i, line)| {
        line.map(|l| (i + 1, l.trim().to_string()))
            .map_err(GraphIoError::from)
    })
}

fn parse_count(line: usize, token: &str, what: &str) -> Result<usize, GraphIoError> {
    token
        .parse()
        .map_err(|_| GraphIoError::parse(line, format!("invalid {what} '{token}'")))
}

fn parse_vertex(line: usize, token: &str, n: Option<usize>) -> Result<usize, GraphIoError> {
    let v = parse_count(line, token, "vertex id")?;
    match n {
        _ if v == 0 => Err(GraphIoError::VertexOutOfRange {
            line,
            vertex: 0,
            n: n.unwrap_or(0),
        }),
        Some(n) if v > n => Err(GraphIoError::VertexOutOfRange { line, vertex: v, n }),
        _ => Ok(v - 1),
    }
}

fn parse_weight(line: usize, token: &str) -> Result<f64, GraphIoError> {
    match token.parse::<f64>() {
        Ok(w) if w.is_finite() => Ok(w),
        _ => Err(GraphIoError::parse(
            line,
            format!("invalid weight '{token}'"),
        )),
    }
}

pub(super) fn parse_matrix_market<R: Read>(reader: R) -> Result<ParsedGraph, GraphIoError> {
    let mut lines = lines(reader);
    let (_, banner) = lines
        .next()
        .transpose()?
        .ok_or(GraphIoError::MissingHeader("%%MatrixMarket"))?;
    let fields: Vec<String> = banner
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if fields.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(GraphIoError::parse(1, "expected a %%MatrixMarket banner"));
    }
    if fields.len() != 5 || fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err(GraphIoError::parse(
            1,
            "only 'matrix coordinate' files are supported",
        ));
    }
    let weighted = match fields[3].as_str() {
        "real" | "integer" => true,
        "pattern" => false,
        other => {
            return Err(GraphIoError::parse(
                1,
                format!("unsupported field '{other}'"),
            ))
        }
    };
    if !matches!(fields[4].as_str(), "symmetric" | "general") {
        return Err(GraphIoError::parse(
            1,
            format!("unsupported symmetry '{}'", fields[4]),
        ));
    }

    let mut size: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for item in lines {
        let (line, text) = item?;
        if text.is_empty() || text.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let Some((n, _)) = size else {
            if tokens.len() != 3 {
                return Err(GraphIoError::parse(line, "expected 'rows cols entries'"));
            }
            let rows = parse_count(line, tokens[0], "row count")?;
            let cols = parse_count(line, tokens[1], "column count")?;
            if rows != cols {
                return Err(GraphIoError::parse(
                    line,
                    format!("matrix is {rows}x{cols}, not square"),
                ));
            }
            size = Some((rows, parse_count(line, tokens[2], "entry count")?));
            continue;
        };
        let expected = if weighted { 3 } else { 2 };
        if tokens.len() != expected {
            return Err(GraphIoError::parse(
                line,
                format!("expected {expected} fields"),
            ));
        }
        let u = parse_vertex(line, tokens[0], Some(n))?;
        let v = parse_vertex(line, tokens[1], Some(n))?;
        let w = if weighted {
            parse_weight(line, tokens[2])?
        } else {
            1.0
        };
        edges.push((u, v, w));
    }
    let (n, declared) = size.ok_or(GraphIoError::MissingHeader("size line"))?;
    if declared != edges.len() {
        return Err(GraphIoError::CountMismatch {
            declared,
            found: edges.len(),
        });
    }
    Ok(ParsedGraph { n, edges, weighted })
}

pub(super) fn parse_dimacs<R: Read>(reader: R) -> Result<ParsedGraph, GraphIoError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for item in lines(reader) {
        let (line, text) = item?;
        let tokens: Vec<&str> = text.split_whitespace().collect();
        match tokens.first().copied() {
            None | Some("c") => {}
            Some("p") => {
                if header.is_some() {
                    return Err(GraphIoError::parse(line, "second problem line"));
                }
                if tokens.len() != 4 || tokens[1] != "sp" {
                    return Err(GraphIoError::parse(line, "expected 'p sp <n> <m>'"));
                }
                let n = parse_count(line, tokens[2], "vertex count")?;
                let m = parse_count(line, tokens[3], "arc count")?;
                header = Some((n, m));
            }
            Some("a") => {
                let (n, _) =
                    header.ok_or_else(|| GraphIoError::parse(line, "arc before problem line"))?;
                if tokens.len() != 4 {
                    return Err(GraphIoError::parse(line, "expected 'a <u> <v> <w>'"));
                }
                let u = parse_vertex(line, tokens[1], Some(n))?;
                let v = parse_vertex(line, tokens[2], Some(n))?;
                edges.push((u, v, parse_weight(line, tokens[3])?));
            }
            Some(other) => {
                return Err(GraphIoError::parse(
                    line,
                    format!("unknown line type '{other}'"),
                ));
            }
        }
    }
    let (n, declared) = header.ok_or(GraphIoError::MissingHeader("p sp <n> <m>"))?;
    if declared != edges.len() {
        return Err(GraphIoError::CountMismatch {
            declared,
            found: edges.len(),
        });
    }
    Ok(ParsedGraph {
        n,
        edges,
        weighted: true,
    })
}

pub(super) fn parse_edge_list<R: Read>(reader: R) -> Result<ParsedGraph, GraphIoError> {
    let mut weighted: Option<bool> = None;
    let mut edges = Vec::new();
    let mut n = 0;
    for item in lines(reader) {
        let (line, text) = item?;
        let body = text.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        let has_weight = match tokens.len() {
            2 => false,
            3 => true,
            _ => return Err(GraphIoError::parse(line, "expected 'u v' or 'u v w'")),
        };
        if *weighted.get_or_insert(has_weight) != has_weight {
            return Err(GraphIoError::parse(
                line,
                "mixes weighted and unweighted edges",
            ));
        }
        let u = parse_vertex(line, tokens[0], None)?;
        let v = parse_vertex(line, tokens[1], None)?;
        let w = if has_weight {
            parse_weight(line, tokens[2])?
        } else {
            1.0
        };
        n = n.max(u + 1).max(v + 1);
        edges.push((u, v, w));
    }
    Ok(ParsedGraph {
        n,
        edges,
        weighted: weighted.unwrap_or(true),
    })
}

pub(super) fn write<W: Write>(
    a: &AdjacencyMatrix,
    mut out: W,
    format: Format,
) -> std::io::Result<()> {
    let (n, m) = (a.n(), a.edge_count());
    match format {
        Format::Mm => {
            writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
            writeln!(out, "{n} {n} {m}")?;
            for (k, w) in a.edges() {
                writeln!(out, "{} {} {}", k.hi() + 1, k.lo() + 1, w.value())?;
            }
        }
        Format::Dimacs => {
            writeln!(out, "p sp {n} {m}")?;
            for (k, w) in a.edges() {
                writeln!(out, "a {} {} {}", k.lo() + 1, k.hi() + 1, w.value())?;
            }
        }
        Format::Edgelist => {
            writeln!(out, "# {n} vertices, {m} edges")?;
            for (k, w) in a.edges() {
                writeln!(out, "{} {} {}", k.lo() + 1, k.hi() + 1, w.value())?;
            }
        }
    }
    Ok(())
}
