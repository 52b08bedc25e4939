use std::fmt::Write as _;

use nalgebra::Point3;
use serde::Serialize;
use thiserror::Error;

use super::measure::triangle_normal;
use super::{MeshError, TriangleMesh};

const HEADER_LEN: usize = 80;
const BINARY_PREAMBLE: usize = HEADER_LEN + 4;
const FACET_LEN: usize = 50;
/// How much of a `solid`-prefixed file is checked for plain text before
/// trusting it as ASCII.
const TEXT_PROBE_LEN: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StlFormat {
    BinaryStl,
    AsciiStl,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StlError {
    #[error("input is empty")]
    Empty,
    #[error("{len} bytes is too short for a binary STL and the content is not ASCII STL")]
    TooShort { len: usize },
    #[error("binary STL declares {declared} facets but the body holds only {present} complete facets")]
    Truncated { declared: u64, present: u64 },
    #[error("binary STL declares {declared} facets but the file length implies {implied}")]
    FacetCountMismatch { declared: u64, implied: f64 },
    #[error("line {line}: expected {expected}, found `{found}`")]
    MalformedToken {
        line: usize,
        expected: &'static str,
        found: String,
    },
    #[error("line {line}: unexpected end of input, expected {expected}")]
    UnexpectedEof { line: usize, expected: &'static str },
    #[error("facet {facet} has a non-finite coordinate")]
    NonFiniteCoordinate { facet: usize },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Classifies raw STL content.
///
/// Content is ASCII only when it starts with the `solid` keyword *and* reads
/// like the ASCII grammar (plain text whose first statement after the name
/// line is `facet` or `endsolid`). Everything else must satisfy the binary
/// length rule `84 + 50·n`.
pub fn detect_format(bytes: &[u8]) -> Result<StlFormat, StlError> {
    if bytes.is_empty() {
        return Err(StlError::Empty);
    }
    let solid_prefixed = starts_with_solid(bytes);
    if solid_prefixed && looks_like_ascii_grammar(bytes) {
        return Ok(StlFormat::AsciiStl);
    }
    check_binary_length(bytes)?;
    Ok(StlFormat::BinaryStl)
}

fn starts_with_solid(bytes: &[u8]) -> bool {
    let trimmed = trim_start(bytes);
    trimmed.len() >= 5
        && trimmed[..5].eq_ignore_ascii_case(b"solid")
        && trimmed.get(5).is_none_or(|b| b.is_ascii_whitespace())
}

fn trim_start(bytes: &[u8]) -> &[u8] {
    let skip = bytes.iter().take_while(|b| b.is_ascii_whitespace()).count();
    &bytes[skip..]
}

fn looks_like_ascii_grammar(bytes: &[u8]) -> bool {
    let probe = &bytes[..bytes.len().min(TEXT_PROBE_LEN)];
    let textual = probe
        .iter()
        .all(|&b| b == b'\n' || b == b'\r' || b == b'\t' || (0x20..0x7f).contains(&b));
    if !textual {
        return false;
    }
    let text = String::from_utf8_lossy(probe);
    let mut lines = text.trim_start().lines();
    lines.next(); // `solid <name>`
    match lines.flat_map(str::split_whitespace).next() {
        Some(tok) => tok.eq_ignore_ascii_case("facet") || tok.eq_ignore_ascii_case("endsolid"),
        // A bare `solid name` line with nothing after it is still ASCII
        // (and will fail to parse for lack of `endsolid`).
        None => bytes.len() <= TEXT_PROBE_LEN,
    }
}

fn check_binary_length(bytes: &[u8]) -> Result<u64, StlError> {
    if bytes.len() < BINARY_PREAMBLE {
        return Err(StlError::TooShort { len: bytes.len() });
    }
    let declared = u32::from_le_bytes(bytes[HEADER_LEN..BINARY_PREAMBLE].try_into().unwrap()) as u64;
    let body = (bytes.len() - BINARY_PREAMBLE) as u64;
    let expected = declared * FACET_LEN as u64;
    if body < expected {
        return Err(StlError::Truncated {
            declared,
            present: body / FACET_LEN as u64,
        });
    }
    if body > expected {
        return Err(StlError::FacetCountMismatch {
            declared,
            implied: body as f64 / FACET_LEN as f64,
        });
    }
    Ok(declared)
}

/// Parses binary or ASCII STL into an unwelded mesh: one triangle per facet,
/// three vertex slots per triangle, in file order. Stored facet normals are
/// discarded.
pub fn parse_stl(bytes: &[u8]) -> Result<TriangleMesh, StlError> {
    match detect_format(bytes)? {
        StlFormat::BinaryStl => parse_binary(bytes),
        StlFormat::AsciiStl => parse_ascii(bytes),
    }
}

fn parse_binary(bytes: &[u8]) -> Result<TriangleMesh, StlError> {
    let count = check_binary_length(bytes)? as usize;
    let mut soup = Vec::with_capacity(count);
    for (facet, chunk) in bytes[BINARY_PREAMBLE..].chunks_exact(FACET_LEN).enumerate() {
        let f = |i: usize| {
            let at = 12 + 4 * i;
            f32::from_le_bytes(chunk[at..at + 4].try_into().unwrap()) as f64
        };
        let corners = [
            Point3::new(f(0), f(1), f(2)),
            Point3::new(f(3), f(4), f(5)),
            Point3::new(f(6), f(7), f(8)),
        ];
        if corners.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(StlError::NonFiniteCoordinate { facet });
        }
        soup.push(corners);
    }
    Ok(TriangleMesh::from_triangle_soup(&soup)?)
}

struct Tokens<'a> {
    iter: Box<dyn Iterator<Item = (usize, &'a str)> + 'a>,
    line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str, first_line: usize) -> Self {
        let iter: Box<dyn Iterator<Item = (usize, &'a str)>> = Box::new(
            text.lines()
                .enumerate()
                .flat_map(move |(n, l)| l.split_whitespace().map(move |t| (n + first_line, t))),
        );
        Self {
            iter,
            line: first_line,
        }
    }

    fn next(&mut self, expected: &'static str) -> Result<&'a str, StlError> {
        match self.iter.next() {
            Some((line, tok)) => {
                self.line = line;
                Ok(tok)
            }
            None => Err(StlError::UnexpectedEof {
                line: self.line,
                expected,
            }),
        }
    }

    fn keyword(&mut self, kw: &'static str) -> Result<(), StlError> {
        let tok = self.next(kw)?;
        if tok.eq_ignore_ascii_case(kw) {
            Ok(())
        } else {
            Err(self.malformed(kw, tok))
        }
    }

    fn number(&mut self) -> Result<f64, StlError> {
        let tok = self.next("a number")?;
        tok.parse::<f64>().map_err(|_| self.malformed("a number", tok))
    }

    fn malformed(&self, expected: &'static str, found: &str) -> StlError {
        StlError::MalformedToken {
            line: self.line,
            expected,
            found: found.to_owned(),
        }
    }
}

fn parse_ascii(bytes: &[u8]) -> Result<TriangleMesh, StlError> {
    let text = String::from_utf8_lossy(bytes);
    let text = text.trim_start();
    let (first_line, rest) = text.split_once('\n').unwrap_or((text, ""));
    let name = first_line.trim()[5..].trim();

    let mut tokens = Tokens::new(rest, 2);
    let mut soup = Vec::new();
    loop {
        let tok = tokens.next("`facet` or `endsolid`")?;
        if tok.eq_ignore_ascii_case("endsolid") {
            break;
        }
        if !tok.eq_ignore_ascii_case("facet") {
            return Err(tokens.malformed("`facet` or `endsolid`", tok));
        }
        tokens.keyword("normal")?;
        for _ in 0..3 {
            tokens.number()?;
        }
        tokens.keyword("outer")?;
        tokens.keyword("loop")?;
        let mut corners = [Point3::origin(); 3];
        for corner in &mut corners {
            tokens.keyword("vertex")?;
            *corner = Point3::new(tokens.number()?, tokens.number()?, tokens.number()?);
        }
        if corners.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(StlError::NonFiniteCoordinate { facet: soup.len() });
        }
        tokens.keyword("endloop")?;
        tokens.keyword("endfacet")?;
        soup.push(corners);
    }
    let mesh = TriangleMesh::from_triangle_soup(&soup)?;
    Ok(if name.is_empty() { mesh } else { mesh.with_name(name) })
}

/// Serialises a mesh as STL. Facet normals are recomputed from the winding;
/// the binary header is zero-filled and attribute byte counts are 0.
pub fn write_stl(mesh: &TriangleMesh, format: StlFormat) -> Vec<u8> {
    match format {
        StlFormat::BinaryStl => write_binary(mesh),
        StlFormat::AsciiStl => write_ascii(mesh).into_bytes(),
    }
}

fn write_binary(mesh: &TriangleMesh) -> Vec<u8> {
    let mut out = Vec::with_capacity(BINARY_PREAMBLE + FACET_LEN * mesh.triangle_count());
    out.extend_from_slice(&[0u8; HEADER_LEN]);
    out.extend_from_slice(&(mesh.triangle_count() as u32).to_le_bytes());
    for t in 0..mesh.triangle_count() {
        let corners = mesh.corners(t);
        let n = triangle_normal(&corners).unwrap_or_else(nalgebra::Vector3::zeros);
        for c in n.iter() {
            out.extend_from_slice(&(*c as f32).to_le_bytes());
        }
        for p in &corners {
            for c in p.iter() {
                out.extend_from_slice(&(*c as f32).to_le_bytes());
            }
        }
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    out
}

fn write_ascii(mesh: &TriangleMesh) -> String {
    let name = mesh.name().unwrap_or("mesh");
    let mut out = String::new();
    let _ = writeln!(out, "solid {name}");
    for t in 0..mesh.triangle_count() {
        let corners = mesh.corners(t);
        let n = triangle_normal(&corners).unwrap_or_else(nalgebra::Vector3::zeros);
        let _ = writeln!(out, "  facet normal {:.9e} {:.9e} {:.9e}", n.x, n.y, n.z);
        out.push_str("    outer loop\n");
        for p in &corners {
            let _ = writeln!(out, "      vertex {:.9e} {:.9e} {:.9e}", p.x, p.y, p.z);
        }
        out.push_str("    endloop\n  endfacet\n");
    }
    let _ = writeln!(out, "endsolid {name}");
    out
}
