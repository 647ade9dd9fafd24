//! Line-oriented edge lists: `source<TAB>target`, one pair per line.
//!
//! Lines starting with `#` and blank lines are skipped. LF and CRLF endings
//! are both accepted. In lenient mode (the default) a single space, a run of
//! whitespace or a comma also work as the delimiter; such lines are counted
//! as delimiter fallbacks. The reader holds one line at a time; only the
//! collected pair buffer grows with the file.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

pub const DEFAULT_ERROR_CAP: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReadOptions {
    pub strict: bool,
    /// How many malformed lines are kept verbatim in the report.
    pub error_cap: usize,
}

impl Default for ReadOptions {
    fn default() -> Self {
        ReadOptions {
            strict: false,
            error_cap: DEFAULT_ERROR_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineError {
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadReport {
    pub lines: u64,
    pub edges: u64,
    pub comments: u64,
    pub blank: u64,
    pub delimiter_fallbacks: u64,
    pub malformed: u64,
    /// First `error_cap` malformed lines.
    pub errors: Vec<LineError>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeList {
    pub edges: Vec<(u64, u64)>,
    pub report: ReadReport,
}

enum Parsed {
    Skip,
    Edge(u64, u64, bool),
    Bad(String),
}

fn parse_line(raw: &str, strict: bool, report: &mut ReadReport) -> Parsed {
    let line = raw.strip_suffix('\r').unwrap_or(raw);
    if line.trim().is_empty() {
        report.blank += 1;
        return Parsed::Skip;
    }
    if line.starts_with('#') {
        report.comments += 1;
        return Parsed::Skip;
    }

    if let Some((a, b)) = line.split_once('\t') {
        let (a, b) = if strict { (a, b) } else { (a.trim(), b.trim()) };
        return match (parse_id(a), parse_id(b)) {
            (Ok(s), Ok(t)) => Parsed::Edge(s, t, false),
            (Err(e), _) | (_, Err(e)) => Parsed::Bad(e),
        };
    }
    if strict {
        return Parsed::Bad("expected two tab-separated unsigned integers".into());
    }

    let fields: Vec<&str> = if line.contains(',') {
        line.split(',').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    };
    if fields.len() != 2 {
        return Parsed::Bad(format!("expected 2 fields, found {}", fields.len()));
    }
    match (parse_id(fields[0]), parse_id(fields[1])) {
        (Ok(s), Ok(t)) => Parsed::Edge(s, t, true),
        (Err(e), _) | (_, Err(e)) => Parsed::Bad(e),
    }
}

fn parse_id(field: &str) -> std::result::Result<u64, String> {
    if field.is_empty() || !field.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("not an unsigned decimal integer: {field:?}"));
    }
    field
        .parse::<u64>()
        .map_err(|_| format!("id out of 64-bit range: {field:?}"))
}

/// Streaming reader over any buffered source. Each call to `next` reads
/// lines until it finds an edge.
pub struct EdgeReader<R> {
    input: R,
    path: PathBuf,
    options: ReadOptions,
    buf: String,
    report: ReadReport,
    failed: bool,
}

impl<R: BufRead> EdgeReader<R> {
    pub fn new(input: R, path: impl Into<PathBuf>, options: ReadOptions) -> Self {
        EdgeReader {
            input,
            path: path.into(),
            options,
            buf: String::new(),
            report: ReadReport::default(),
            failed: false,
        }
    }

    pub fn report(&self) -> &ReadReport {
        &self.report
    }

    pub fn into_report(self) -> ReadReport {
        self.report
    }
}

impl<R: BufRead> Iterator for EdgeReader<R> {
    type Item = Result<(u64, u64)>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            self.buf.clear();
            match self.input.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => {
                    self.failed = true;
                    return Some(Err(Error::io(&self.path, e)));
                }
            }
            self.report.lines += 1;
            let line_no = self.report.lines;
            let text = self.buf.strip_suffix('\n').unwrap_or(&self.buf);
            match parse_line(text, self.options.strict, &mut self.report) {
                Parsed::Skip => continue,
                Parsed::Edge(s, t, fallback) => {
                    self.report.edges += 1;
                    if fallback {
                        self.report.delimiter_fallbacks += 1;
                    }
                    return Some(Ok((s, t)));
                }
                Parsed::Bad(reason) => {
                    self.report.malformed += 1;
                    if self.options.strict {
                        self.failed = true;
                        return Some(Err(Error::Format {
                            path: self.path.clone(),
                            line: line_no,
                            reason,
                        }));
                    }
                    if self.report.errors.len() < self.options.error_cap {
                        self.report.errors.push(LineError {
                            line: line_no,
                            reason,
                        });
                    }
                }
            }
        }
    }
}

pub fn read_edge_list(path: impl AsRef<Path>, options: ReadOptions) -> Result<EdgeList> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_edges_from(BufReader::with_capacity(1 << 16, file), path, options)
}

pub fn read_edges_from<R: BufRead>(
    input: R,
    path: impl Into<PathBuf>,
    options: ReadOptions,
) -> Result<EdgeList> {
    let mut reader = EdgeReader::new(input, path, options);
    let mut edges = Vec::new();
    for item in reader.by_ref() {
        edges.push(item?);
    }
    Ok(EdgeList {
        edges,
        report: reader.into_report(),
    })
}

pub fn write_edges_to<W: Write>(g: &DirectedGraph, out: W) -> std::io::Result<()> {
    let mut out = BufWriter::with_capacity(1 << 16, out);
    for &(s, t) in g.edges() {
        writeln!(out, "{s}\t{t}")?;
    }
    out.flush()
}

/// Writes dense ids in edge storage order.
pub fn write_edge_list(g: &DirectedGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_edges_to(g, file).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    fn read_str(text: &str, strict: bool) -> Result<EdgeList> {
        read_edges_from(
            text.as_bytes(),
            "<mem>",
            ReadOptions {
                strict,
                ..Default::default()
            },
        )
    }

    #[test]
    fn skips_comments_and_blank_lines() {
        let list = read_str("1\t2\n# c\n3\t2\n", false).unwrap();
        assert_eq!(list.edges, vec![(1, 2), (3, 2)]);
        assert_eq!(list.report.malformed, 0);
        assert_eq!(list.report.comments, 1);

        let list = read_str("\n1\t2\n\n", true).unwrap();
        assert_eq!(list.edges, vec![(1, 2)]);
        assert_eq!(list.report.blank, 2);
    }

    #[test]
    fn lenient_mode_accepts_space_and_comma() {
        let list = read_str("1 2\n", false).unwrap();
        assert_eq!(list.edges, vec![(1, 2)]);
        assert_eq!(list.report.delimiter_fallbacks, 1);

        let list = read_str("4,5\n6   7\n", false).unwrap();
        assert_eq!(list.edges, vec![(4, 5), (6, 7)]);
        assert_eq!(list.report.delimiter_fallbacks, 2);
    }

    #[test]
    fn strict_mode_rejects_space_delimiter() {
        let err = read_str("1 2\n", true).unwrap_err();
        assert!(matches!(err, Error::Format { line: 1, .. }), "{err}");
    }

    #[test]
    fn strict_mode_names_malformed_line() {
        let err = read_str("a\tb\n", true).unwrap_err();
        match err {
            Error::Format { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected {other}"),
        }
        let err = read_str("1\t2\n# ok\n3\t\n", true).unwrap_err();
        assert!(matches!(err, Error::Format { line: 3, .. }));
    }

    #[test]
    fn lenient_mode_counts_and_caps_malformed_lines() {
        let mut text = String::new();
        for i in 0..50 {
            text.push_str(&format!("x{i}\t1\n"));
        }
        text.push_str("7\t8\n");
        let list = read_edges_from(
            text.as_bytes(),
            "<mem>",
            ReadOptions {
                strict: false,
                error_cap: 5,
            },
        )
        .unwrap();
        assert_eq!(list.edges, vec![(7, 8)]);
        assert_eq!(list.report.malformed, 50);
        assert_eq!(list.report.errors.len(), 5);
        assert_eq!(list.report.errors[0].line, 1);
        assert_eq!(list.report.errors[4].line, 5);
    }

    #[test]
    fn crlf_and_max_ids() {
        let list = read_str("18446744073709551615\t0\r\n", true).unwrap();
        assert_eq!(list.edges, vec![(u64::MAX, 0)]);
        let list = read_str("18446744073709551616\t0\n", false).unwrap();
        assert_eq!(list.report.malformed, 1);
        assert!(read_str("-1\t0\n", false).unwrap().edges.is_empty());
        assert_eq!(read_str("1\t2\t3\n", false).unwrap().report.malformed, 1);
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = read_edge_list("/nonexistent/edges.tsv", ReadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(err.to_string().contains("/nonexistent/edges.tsv"));
    }

    #[test]
    fn writes_one_line_per_edge() {
        let (g, _) = build_graph([(10, 20), (30, 20), (20, 30)]);
        let mut out = Vec::new();
        write_edges_to(&g, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0\t1\n2\t1\n1\t2\n");

        let (empty, _) = build_graph(std::iter::empty());
        let mut out = Vec::new();
        write_edges_to(&empty, &mut out).unwrap();
        assert!(out.is_empty());
    }
}
