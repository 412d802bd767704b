//! Text formats: ID documents, CNS matrices, and graph edge lists.
//!
//! ID document grammar: lines starting with '#' are comments; a block is a
//! run of consecutive non-blank lines of equal length over {I, X, Y, Z};
//! blocks are separated by one or more blank lines. Signs are never written:
//! the grid determines the sign, which is recomputed on load.

use thiserror::Error;

use crate::contextuality::{ContextError, IdSet};
use crate::id::{analyze_id, IdError, IdTable};
use crate::pauli::PauliWord;
use crate::stabilizer::SimpleGraph;

#[derive(Debug, Error, PartialEq, Clone)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("block at line {line} is not a valid ID: {source}")]
    InvalidId { line: usize, source: IdError },
    #[error(transparent)]
    Set(#[from] ContextError),
}

/// A raw block of word lines with its starting line number (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawBlock {
    pub line: usize,
    pub rows: Vec<PauliWord>,
}

/// Splits a document into blocks of Pauli words, reporting the offending
/// line on any grammar violation.
pub fn parse_blocks(text: &str) -> Result<Vec<RawBlock>, IoError> {
    let mut blocks: Vec<RawBlock> = Vec::new();
    let mut current: Option<RawBlock> = None;
    for (index, raw_line) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw_line.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            if let Some(block) = current.take() {
                blocks.push(block);
            }
            continue;
        }
        let word: PauliWord = line.parse().map_err(|e| IoError::Parse {
            line: line_no,
            message: format!("{e}"),
        })?;
        match &mut current {
            Some(block) => {
                if word.n() != block.rows[0].n() {
                    return Err(IoError::Parse {
                        line: line_no,
                        message: format!(
                            "row has {} letters, block rows have {}",
                            word.n(),
                            block.rows[0].n()
                        ),
                    });
                }
                block.rows.push(word);
            }
            None => current = Some(RawBlock { line: line_no, rows: vec![word] }),
        }
    }
    if let Some(block) = current.take() {
        blocks.push(block);
    }
    Ok(blocks)
}

/// Parses and validates every block as an ID.
pub fn parse_id_blocks(text: &str) -> Result<Vec<IdTable>, IoError> {
    parse_blocks(text)?
        .into_iter()
        .map(|block| {
            analyze_id(&block.rows).map_err(|source| IoError::InvalidId { line: block.line, source })
        })
        .collect()
}

/// Parses a document into a validated IdSet.
pub fn parse_idset(text: &str) -> Result<IdSet, IoError> {
    Ok(IdSet::new(parse_id_blocks(text)?)?)
}

/// Formats IDs as blank-line separated blocks; the inverse of
/// [`parse_id_blocks`] up to comments and blank lines.
pub fn format_ids(ids: &[IdTable]) -> String {
    let mut out = String::new();
    for (i, id) in ids.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&id.to_string());
        out.push('\n');
    }
    out
}

pub fn format_idset(set: &IdSet) -> String {
    format_ids(set.ids())
}

/// Parses a CNS matrix, tolerating comment and blank lines.
pub fn parse_cns(text: &str) -> Result<crate::cns::CnsMatrix, IoError> {
    let cleaned: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    cleaned
        .join("\n")
        .parse()
        .map_err(|e| IoError::Parse { line: 0, message: format!("{e}") })
}

/// Parses a graph as an edge list of 1-based vertex pairs, one pair per
/// line. An optional leading line with a single integer fixes the vertex
/// count (needed for isolated vertices).
pub fn parse_graph(text: &str) -> Result<SimpleGraph, IoError> {
    let mut vertex_count: Option<usize> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (index, raw_line) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [count] if vertex_count.is_none() && edges.is_empty() => {
                let count: usize = count.parse().map_err(|_| IoError::Parse {
                    line: line_no,
                    message: format!("expected a vertex count, got {count:?}"),
                })?;
                vertex_count = Some(count);
            }
            [a, b] => {
                let parse = |s: &str| -> Result<usize, IoError> {
                    let v: usize = s.parse().map_err(|_| IoError::Parse {
                        line: line_no,
                        message: format!("expected a vertex index, got {s:?}"),
                    })?;
                    if v == 0 {
                        return Err(IoError::Parse {
                            line: line_no,
                            message: "vertex indices are 1-based".into(),
                        });
                    }
                    Ok(v - 1)
                };
                edges.push((parse(a)?, parse(b)?));
            }
            _ => {
                return Err(IoError::Parse {
                    line: line_no,
                    message: format!("expected an edge pair, got {line:?}"),
                })
            }
        }
    }
    let needed = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
    let n = vertex_count.unwrap_or(needed).max(needed).max(1);
    Ok(SimpleGraph::from_edges(n, &edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contextuality::verify_nks;

    #[test]
    fn parse_two_block_document() {
        let text = "# the simplest multi-ID NKS set\nZZ\nXX\nYY\n\nZX\nXZ\nYY\n";
        let set = parse_idset(text).unwrap();
        assert_eq!(set.len(), 2);
        assert!(verify_nks(&set).holds);
    }

    #[test]
    fn ragged_rows_name_the_line() {
        let text = "ZZ\nXXX\n";
        assert_eq!(
            parse_blocks(text),
            Err(IoError::Parse { line: 2, message: "row has 3 letters, block rows have 2".into() })
        );
    }

    #[test]
    fn bad_letter_names_the_line() {
        let err = parse_blocks("ZZ\nZQ\n").unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 2, .. }));
    }

    #[test]
    fn invalid_block_is_reported_with_its_line() {
        let text = "ZZ\nXX\nYY\n\nZZ\nZX\n";
        let err = parse_id_blocks(text).unwrap_err();
        assert!(matches!(err, IoError::InvalidId { line: 5, .. }));
    }

    #[test]
    fn roundtrip() {
        let text = "ZZ\nXX\nYY\n\nZX\nXZ\nYY\n";
        let set = parse_idset(text).unwrap();
        let formatted = format_idset(&set);
        assert_eq!(parse_idset(&formatted).unwrap(), set);
        assert_eq!(formatted, text);
    }

    #[test]
    fn graph_parsing() {
        let graph = parse_graph("1 2\n2 3\n").unwrap();
        assert_eq!(graph.n(), 3);
        assert_eq!(graph.edges(), vec![(0, 1), (1, 2)]);

        let graph = parse_graph("4\n1 2\n").unwrap();
        assert_eq!(graph.n(), 4);

        assert!(parse_graph("0 1\n").is_err());
        assert!(parse_graph("1 2 3\n").is_err());
    }

    #[test]
    fn cns_parsing_with_comments() {
        let m = parse_cns("# ring\nOOI\nIOO\nOIO\n").unwrap();
        assert_eq!(m.to_string(), "OOI\nIOO\nOIO");
    }
}
