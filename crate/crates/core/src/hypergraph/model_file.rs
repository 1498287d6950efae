//! Plain-text model files.
//!
//! ```text
//! n 4
//! 0 1
//! 1 2
//! 2 3
//! ```
//!
//! The header gives the vertex count; every following non-blank line is one edge
//! as space-separated vertex indices. Lines starting with `#` are ignored.

use std::fmt::Write as _;

use super::CoverageModel;
use crate::error::{Error, Result};

pub fn parse_model(text: &str) -> Result<CoverageModel> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing `n <vertices>` header".into(),
    })?;
    let n_vertices = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["n", count] => count.parse::<usize>().map_err(|e| Error::Parse {
            line: header_line,
            msg: format!("bad vertex count {count:?}: {e}"),
        })?,
        _ => {
            return Err(Error::Parse {
                line: header_line,
                msg: format!("expected `n <vertices>`, found {header:?}"),
            })
        }
    };

    let mut edges = Vec::new();
    for (line, text) in lines {
        let edge = text
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>().map_err(|e| Error::Parse {
                    line,
                    msg: format!("bad vertex index {tok:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(&v) = edge.iter().find(|&&v| v >= n_vertices) {
            return Err(Error::Parse {
                line,
                msg: format!("vertex {v} out of range for n = {n_vertices}"),
            });
        }
        edges.push(edge);
    }
    CoverageModel::from_edge_lists(n_vertices, &edges)
}

pub fn write_model(model: &CoverageModel) -> String {
    let mut out = format!("n {}\n", model.n_vertices());
    for edge in model.edges() {
        let mut first = true;
        for v in edge.iter() {
            if !first {
                out.push(' ');
            }
            first = false;
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    out
}
