//! Plain-text input formats. Blank lines and `#` comments are ignored
//! except where blank lines separate polytope blocks.

use std::path::{Path, PathBuf};

use mirrorkit_core::arith::Rational;
use mirrorkit_core::lattice::{IntegerLattice, SublatticeEmbedding};
use mirrorkit_core::monodromy::SL2Matrix;
use mirrorkit_core::polytope::{AffinePiece, LatticePolytope, PLFunction};
use mirrorkit_core::quantize::SampledSection;
use mirrorkit_core::theta::Complex;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, FormatError>;

/// A loaded input file: its bytes feed the report digest.
pub struct Source {
    pub path: PathBuf,
    pub text: String,
}

impl Source {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.to_path_buf(), source })?;
        Ok(Source { path: path.to_path_buf(), text })
    }

    pub fn from_text(path: &str, text: &str) -> Self {
        Source { path: PathBuf::from(path), text: text.to_string() }
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> FormatError {
        FormatError::Parse { path: self.path.clone(), line, msg: msg.into() }
    }

    /// Non-empty lines with comments stripped, numbered from 1.
    fn lines(&self) -> Vec<(usize, &str)> {
        self.text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect()
    }
}

fn ints(src: &Source, line: usize, text: &str) -> Result<Vec<i64>> {
    text.split_whitespace()
        .map(|t| t.parse::<i64>().map_err(|_| src.err(line, format!("not an integer: {t:?}"))))
        .collect()
}

fn header(src: &Source, lines: &[(usize, &str)], keyword: &str, count: usize) -> Result<Vec<usize>> {
    let Some(&(ln, text)) = lines.first() else {
        return Err(src.err(1, format!("missing \"{keyword}\" header")));
    };
    let mut parts = text.split_whitespace();
    if parts.next() != Some(keyword) {
        return Err(src.err(ln, format!("expected \"{keyword}\" header")));
    }
    let nums: Vec<usize> = parts
        .map(|t| t.parse::<usize>().map_err(|_| src.err(ln, format!("bad header value {t:?}"))))
        .collect::<Result<_>>()?;
    if nums.len() != count {
        return Err(src.err(ln, format!("\"{keyword}\" takes {count} value(s)")));
    }
    Ok(nums)
}

fn rows(src: &Source, lines: &[(usize, &str)], count: usize, width: usize) -> Result<Vec<Vec<i64>>> {
    if lines.len() != count {
        let ln = lines.last().map_or(1, |l| l.0);
        return Err(src.err(ln, format!("expected {count} rows, found {}", lines.len())));
    }
    lines
        .iter()
        .map(|&(ln, text)| {
            let r = ints(src, ln, text)?;
            if r.len() != width {
                return Err(src.err(ln, format!("expected {width} entries, found {}", r.len())));
            }
            Ok(r)
        })
        .collect()
}

/// Square integer matrix: `rank n` or `matrix n`, then `n` rows.
pub fn parse_square(src: &Source) -> Result<Vec<Vec<i64>>> {
    let lines = src.lines();
    let keyword = lines.first().and_then(|l| l.1.split_whitespace().next()).unwrap_or("rank");
    let keyword = if keyword == "matrix" { "matrix" } else { "rank" };
    let n = header(src, &lines, keyword, 1)?[0];
    rows(src, &lines[1..], n, n)
}

/// Gram matrix file: `rank n`, then `n` rows of `n` integers.
pub fn parse_gram(src: &Source) -> Result<IntegerLattice> {
    let lines = src.lines();
    let n = header(src, &lines, "rank", 1)?[0];
    let g = rows(src, &lines[1..], n, n)?;
    IntegerLattice::new(g).map_err(|e| src.err(lines[0].0, e.to_string()))
}

/// Embedding file: `sub r amb n`, then `r` rows of `n` integers in the
/// coordinates of the K3 lattice.
pub fn parse_embedding(src: &Source) -> Result<SublatticeEmbedding> {
    let lines = src.lines();
    let Some(&(ln, text)) = lines.first() else {
        return Err(src.err(1, "missing \"sub r amb n\" header"));
    };
    let parts: Vec<&str> = text.split_whitespace().collect();
    let (r, n) = match parts.as_slice() {
        ["sub", r, "amb", n] => (
            r.parse::<usize>().map_err(|_| src.err(ln, "bad rank"))?,
            n.parse::<usize>().map_err(|_| src.err(ln, "bad ambient rank"))?,
        ),
        _ => return Err(src.err(ln, "expected \"sub r amb n\" header")),
    };
    let k3 = IntegerLattice::k3();
    if n != k3.rank() {
        return Err(src.err(ln, format!("ambient rank must be {}", k3.rank())));
    }
    let basis = rows(src, &lines[1..], r, n)?;
    SublatticeEmbedding::new(k3, basis).map_err(|e| src.err(ln, e.to_string()))
}

/// True when the first meaningful line is a `sub` header.
pub fn is_embedding(src: &Source) -> bool {
    src.lines().first().is_some_and(|l| l.1.starts_with("sub"))
}

fn parse_polytope_lines(src: &Source, lines: &[(usize, &str)]) -> Result<LatticePolytope> {
    let n = header(src, lines, "dim", 1)?[0];
    let body = &lines[1..];
    if body.is_empty() {
        return Err(src.err(lines[0].0, "no vertices"));
    }
    let pts = rows(src, body, body.len(), n)?;
    LatticePolytope::from_points(n, &pts).map_err(|e| src.err(lines[0].0, e.to_string()))
}

/// Polytope file: `dim n`, then one vertex per line.
pub fn parse_polytope(src: &Source) -> Result<LatticePolytope> {
    parse_polytope_lines(src, &src.lines())
}

/// Subdivision file: optional `torus d1 .. dn` line, then polytope blocks
/// separated by blank lines.
pub fn parse_subdivision(src: &Source) -> Result<(Option<Vec<i64>>, Vec<LatticePolytope>)> {
    let mut torus = None;
    let mut blocks: Vec<Vec<(usize, &str)>> = vec![Vec::new()];
    for (i, raw) in src.text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            if !blocks.last().is_some_and(|b| b.is_empty()) {
                blocks.push(Vec::new());
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("torus") {
            if torus.is_some() || blocks.iter().any(|b| !b.is_empty()) {
                return Err(src.err(i + 1, "\"torus\" line must come first"));
            }
            torus = Some(ints(src, i + 1, rest)?);
            continue;
        }
        blocks.last_mut().expect("nonempty").push((i + 1, line));
    }
    let cells = blocks
        .iter()
        .filter(|b| !b.is_empty())
        .map(|b| parse_polytope_lines(src, b))
        .collect::<Result<Vec<_>>>()?;
    if cells.is_empty() {
        return Err(src.err(1, "no cells"));
    }
    Ok((torus, cells))
}

fn parse_rational(src: &Source, line: usize, t: &str) -> Result<Rational> {
    let bad = || src.err(line, format!("not a rational: {t:?}"));
    match t.split_once('/') {
        Some((p, q)) => {
            let p = p.parse::<i128>().map_err(|_| bad())?;
            let q = q.parse::<i128>().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(t.parse::<i128>().map_err(|_| bad())?)),
    }
}

/// Piecewise-linear function file: `pl n`, then one affine piece per line
/// as `n` integer slopes followed by a rational constant (`p` or `p/q`).
pub fn parse_pl(src: &Source) -> Result<PLFunction> {
    let lines = src.lines();
    let n = header(src, &lines, "pl", 1)?[0];
    let mut pieces = Vec::new();
    for &(ln, text) in &lines[1..] {
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() != n + 1 {
            return Err(src.err(ln, format!("expected {} slopes and a constant", n)));
        }
        let slope = ints(src, ln, &toks[..n].join(" "))?;
        let constant = parse_rational(src, ln, toks[n])?;
        pieces.push(AffinePiece { slope, constant });
    }
    PLFunction::new(pieces).map_err(|e| src.err(lines[0].0, e.to_string()))
}

/// One `a b c d` matrix per line.
pub fn parse_factorization(src: &Source) -> Result<Vec<SL2Matrix>> {
    src.lines()
        .into_iter()
        .map(|(ln, text)| {
            let v = ints(src, ln, text)?;
            if v.len() != 4 {
                return Err(src.err(ln, "expected \"a b c d\""));
            }
            SL2Matrix::new(v[0], v[1], v[2], v[3]).map_err(|e| src.err(ln, e.to_string()))
        })
        .collect()
}

/// Sample file: `grid n h`, then rows `x1 .. xn s1 .. sn`.
pub fn parse_samples(src: &Source) -> Result<SampledSection> {
    let lines = src.lines();
    let Some(&(ln, text)) = lines.first() else {
        return Err(src.err(1, "missing \"grid n h\" header"));
    };
    let parts: Vec<&str> = text.split_whitespace().collect();
    let (n, h) = match parts.as_slice() {
        ["grid", n, h] => (
            n.parse::<usize>().map_err(|_| src.err(ln, "bad dimension"))?,
            h.parse::<f64>().map_err(|_| src.err(ln, "bad spacing"))?,
        ),
        _ => return Err(src.err(ln, "expected \"grid n h\" header")),
    };
    let mut data = Vec::with_capacity(lines.len() - 1);
    for &(ln, text) in &lines[1..] {
        let v: Vec<f64> = text
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| src.err(ln, format!("not a number: {t:?}"))))
            .collect::<Result<_>>()?;
        if v.len() != 2 * n {
            return Err(src.err(ln, format!("expected {} numbers", 2 * n)));
        }
        data.push((v[..n].to_vec(), v[n..].to_vec()));
    }
    SampledSection::from_rows(n, h, &data).map_err(|e| src.err(ln, e.to_string()))
}

/// `re,im`.
pub fn parse_complex(s: &str) -> std::result::Result<Complex, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected \"re,im\", got {s:?}"))?;
    let re = re.trim().parse::<f64>().map_err(|_| format!("bad real part {re:?}"))?;
    let im = im.trim().parse::<f64>().map_err(|_| format!("bad imaginary part {im:?}"))?;
    Ok(Complex::new(re, im))
}

/// Integers separated by commas or whitespace.
pub fn parse_vector(s: &str) -> std::result::Result<Vec<i64>, String> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|_| format!("not an integer: {t:?}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_roundtrip() {
        let g = parse_gram(&Source::from_text("u.gram", "rank 2\n0 1\n1 0\n")).unwrap();
        assert_eq!(g, IntegerLattice::hyperbolic_plane());
        let err = parse_gram(&Source::from_text("bad.gram", "rank 2\n0 1\n")).unwrap_err();
        assert!(err.to_string().contains("expected 2 rows"));
        assert!(parse_gram(&Source::from_text("asym.gram", "rank 2\n0 1\n2 0\n")).is_err());
    }

    #[test]
    fn subdivision_blocks() {
        let text = "torus 1 1\n\ndim 2\n0 0\n1 0\n1 1\n\ndim 2\n0 0\n0 1\n1 1\n";
        let (torus, cells) = parse_subdivision(&Source::from_text("s", text)).unwrap();
        assert_eq!(torus, Some(vec![1, 1]));
        assert_eq!(cells.len(), 2);
    }

    #[test]
    fn pl_with_rational_constant() {
        let f = parse_pl(&Source::from_text("f", "pl 1\n1 0\n-1 3/2\n")).unwrap();
        assert_eq!(f.pieces()[1].constant, Rational::new(3, 2));
    }

    #[test]
    fn complex_and_vector() {
        assert_eq!(parse_complex("-0.1,0.7").unwrap(), Complex::new(-0.1, 0.7));
        assert!(parse_complex("0.3").is_err());
        assert_eq!(parse_vector("1, -2 3").unwrap(), vec![1, -2, 3]);
    }

    #[test]
    fn factorization_rejects_bad_det() {
        assert!(parse_factorization(&Source::from_text("f", "1 1 0 1\n2 0 0 1\n")).is_err());
    }
}
