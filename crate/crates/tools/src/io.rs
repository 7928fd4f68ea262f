//! SNAP edge lists in, `id<TAB>core` lines out.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use kcore::{CoreResult, EdgeList, Graph};

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: expected two ids, found {found} field(s)")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: `{token}` is not a vertex id")]
    BadToken { line: usize, token: String },
    #[error("line {line}: negative vertex id `{token}`")]
    NegativeId { line: usize, token: String },
    #[error("read failed: {0}")]
    Io(#[from] io::Error),
}

fn parse_id(token: &str, line: usize) -> Result<u64, ParseError> {
    token.parse::<u64>().map_err(|_| {
        if token.starts_with('-')
            && token[1..].bytes().all(|b| b.is_ascii_digit())
            && token.len() > 1
        {
            ParseError::NegativeId {
                line,
                token: token.to_owned(),
            }
        } else {
            ParseError::BadToken {
                line,
                token: token.to_owned(),
            }
        }
    })
}

/// Reads `u v` pairs, one per line, separated by any whitespace.
///
/// Lines starting with `#` and blank lines are skipped. Line numbers in errors
/// are 1-based.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<EdgeList, ParseError> {
    let mut edges = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(ParseError::FieldCount {
                line: line_no,
                found: trimmed.split_whitespace().count(),
            });
        };
        edges.push((parse_id(a, line_no)?, parse_id(b, line_no)?));
    }
    Ok(EdgeList::new(edges))
}

pub fn read_edge_list(path: &Path) -> Result<EdgeList, ParseError> {
    parse_edge_list(BufReader::new(File::open(path)?))
}

/// One `original_id<TAB>core` line per vertex, ascending by original id.
pub fn write_cores<W: Write>(result: &CoreResult, g: &Graph, sink: W) -> io::Result<()> {
    assert_eq!(result.len(), g.n(), "one core value per vertex");
    let mut rows: Vec<(u64, u32)> = g
        .id_map()
        .iter()
        .copied()
        .zip(result.core.iter().copied())
        .collect();
    rows.sort_unstable_by_key(|&(id, _)| id);
    let mut out = BufWriter::new(sink);
    for (id, core) in rows {
        writeln!(out, "{id}\t{core}")?;
    }
    out.flush()
}

pub fn write_cores_to_path(result: &CoreResult, g: &Graph, path: &Path) -> io::Result<()> {
    write_cores(result, g, File::create(path)?)
}

/// Every undirected edge once as `u<TAB>v` with original ids.
pub fn write_edges<W: Write>(g: &Graph, sink: W) -> io::Result<()> {
    let mut out = BufWriter::new(sink);
    for (u, v) in g.edges() {
        writeln!(out, "{}\t{}", g.original_id(u), g.original_id(v))?;
    }
    out.flush()
}
