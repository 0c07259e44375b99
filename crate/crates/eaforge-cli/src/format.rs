//! The line-oriented function file format.
//!
//! Two record kinds, one function per line, `#` starting a comment:
//!
//! ```text
//! T <n> <m> <h0> <h1> ... <h_(2^n - 1)>
//! U <n> <mod-hex> <coef>:<exp>[,<coef>:<exp>...]
//! ```
//!
//! A `T` record lists the truth table outputs in hex for inputs
//! `x = 0 .. 2^n - 1` under the shared bit encoding. A `U` record names a
//! univariate polynomial over `GF(2^n)` built on the given irreducible
//! modulus (hex, degree-n); coefficients are `a^k` (powers of the residue
//! class of X), `a`, `1`, `0`, or raw hex like `0x1b`; exponents are
//! decimal. A `U` record implies `m = n`.

use std::fs;
use std::path::Path;

use eaforge_core::field::{vbf_from_univariate, FieldSpec, UnivariateSpec};
use eaforge_core::vbf::Vbf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    Record { line: usize, reason: String },
    #[error("could not read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// One parsed function together with its source line for error reports.
#[derive(Debug, Clone)]
pub struct Entry {
    pub vbf: Vbf,
    pub line: usize,
}

/// An ordered list of parsed function records.
#[derive(Debug, Clone)]
pub struct FunctionFile {
    pub entries: Vec<Entry>,
}

impl FunctionFile {
    pub fn functions(&self) -> Vec<Vbf> {
        self.entries.iter().map(|e| e.vbf.clone()).collect()
    }
}

pub fn parse_function_file(path: &Path) -> Result<FunctionFile, ParseError> {
    let text = fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_function_text(&text)
}

pub fn parse_function_text(text: &str) -> Result<FunctionFile, ParseError> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let vbf = parse_record(content).map_err(|reason| ParseError::Record { line, reason })?;
        entries.push(Entry { vbf, line });
    }
    Ok(FunctionFile { entries })
}

fn parse_record(content: &str) -> Result<Vbf, String> {
    let mut tokens = content.split_whitespace();
    match tokens.next() {
        Some("T") => parse_truth_table(tokens),
        Some("U") => parse_univariate(tokens),
        Some(other) => Err(format!("unknown record kind {other:?}")),
        None => Err("empty record".into()),
    }
}

fn parse_truth_table<'a>(mut tokens: impl Iterator<Item = &'a str>) -> Result<Vbf, String> {
    let n: usize = tokens
        .next()
        .ok_or("missing n")?
        .parse()
        .map_err(|_| "bad n")?;
    let m: usize = tokens
        .next()
        .ok_or("missing m")?
        .parse()
        .map_err(|_| "bad m")?;
    if n == 0 || n > 16 || m == 0 || m > 16 {
        return Err(format!("dimensions {n} -> {m} out of the supported range 1..=16"));
    }
    let mut table = Vec::with_capacity(1 << n);
    for token in tokens {
        let value = u32::from_str_radix(token, 16)
            .map_err(|_| format!("bad hex output {token:?}"))?;
        table.push(value);
    }
    if table.len() != 1 << n {
        return Err(format!(
            "expected {} outputs, found {}",
            1u32 << n,
            table.len()
        ));
    }
    if let Some(bad) = table.iter().find(|&&y| y >> m != 0) {
        return Err(format!("output {bad:#x} does not fit in {m} bits"));
    }
    Vbf::from_table(n, m, table).map_err(|e| e.to_string())
}

fn parse_univariate<'a>(mut tokens: impl Iterator<Item = &'a str>) -> Result<Vbf, String> {
    let n: usize = tokens
        .next()
        .ok_or("missing n")?
        .parse()
        .map_err(|_| "bad n")?;
    let modulus = tokens
        .next()
        .ok_or("missing modulus")
        .and_then(|t| u32::from_str_radix(t, 16).map_err(|_| "bad modulus hex"))?;
    let field = FieldSpec::new(n, modulus).map_err(|e| e.to_string())?;
    let terms_token = tokens.next().ok_or("missing polynomial terms")?;
    if tokens.next().is_some() {
        return Err("unexpected trailing tokens".into());
    }
    let mut terms = Vec::new();
    for part in terms_token.split(',') {
        let (coef, exp) = part
            .split_once(':')
            .ok_or_else(|| format!("term {part:?} is not <coef>:<exp>"))?;
        let coefficient = parse_coefficient(coef, &field)?;
        let exponent: u64 = exp.parse().map_err(|_| format!("bad exponent {exp:?}"))?;
        terms.push((coefficient, exponent));
    }
    let spec = UnivariateSpec::new(field, terms).map_err(|e| e.to_string())?;
    Ok(vbf_from_univariate(&spec))
}

fn parse_coefficient(token: &str, field: &FieldSpec) -> Result<u32, String> {
    let value = match token {
        "0" => 0,
        "1" => 1,
        "a" => field.generator_x(),
        _ => {
            if let Some(k) = token.strip_prefix("a^") {
                let k: u64 = k.parse().map_err(|_| format!("bad power {token:?}"))?;
                field.pow(field.generator_x(), k)
            } else if let Some(hex) = token.strip_prefix("0x") {
                u32::from_str_radix(hex, 16).map_err(|_| format!("bad hex {token:?}"))?
            } else {
                return Err(format!("bad coefficient {token:?}"));
            }
        }
    };
    if value >> field.degree() != 0 {
        return Err(format!("coefficient {token:?} is not a field element"));
    }
    Ok(value)
}

/// Renders a function as a `T` record, the inverse of the parser.
pub fn t_record(f: &Vbf) -> String {
    let mut out = format!("T {} {}", f.input_dim(), f.output_dim());
    for &y in f.table() {
        out.push_str(&format!(" {y:x}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_gate_truth_table() {
        let file = parse_function_text("T 2 1 0 0 0 1\n").unwrap();
        assert_eq!(file.entries.len(), 1);
        let f = &file.entries[0].vbf;
        assert_eq!((f.input_dim(), f.output_dim()), (2, 1));
        assert_eq!(f.table(), &[0, 0, 0, 1]);
    }

    #[test]
    fn parses_cube_univariate() {
        let file = parse_function_text("U 6 5B 1:3\n").unwrap();
        let f = &file.entries[0].vbf;
        assert_eq!((f.input_dim(), f.output_dim()), (6, 6));
        assert!(f.is_apn().unwrap());
        assert_eq!(f.degree(), 2);
        assert_eq!(f.linearity(), 16);
    }

    #[test]
    fn parses_kim_mapping() {
        let file = parse_function_text("U 6 5B 1:3,1:10,a^1:24\n").unwrap();
        let f = &file.entries[0].vbf;
        assert!(f.is_apn().unwrap());
        assert!(!f.is_permutation());
        assert_eq!(f.degree(), 2);
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = "# header\n\nT 2 2 0 1 2 3   # identity\n  # done\n";
        let file = parse_function_text(text).unwrap();
        assert_eq!(file.entries.len(), 1);
        assert_eq!(file.entries[0].line, 3);
    }

    #[test]
    fn reports_line_numbers_on_errors() {
        let err = parse_function_text("T 2 1 0 0 0 1\nT 2 1 0 0\n").unwrap_err();
        assert!(matches!(err, ParseError::Record { line: 2, .. }));
        let err = parse_function_text("X 1 2 3\n").unwrap_err();
        assert!(err.to_string().contains("line 1"));
    }

    #[test]
    fn rejects_bad_data() {
        assert!(parse_function_text("T 2 1 0 0 0 5\n").is_err()); // output too wide
        assert!(parse_function_text("U 6 5A 1:3\n").is_err()); // reducible modulus
        assert!(parse_function_text("U 6 5B 1:3,1:3\n").is_err()); // duplicate exponent
        assert!(parse_function_text("U 6 5B b:3\n").is_err()); // bad coefficient
    }

    #[test]
    fn coefficient_forms() {
        let a1 = parse_function_text("U 6 5B a:1\n").unwrap();
        let a2 = parse_function_text("U 6 5B a^1:1\n").unwrap();
        let a3 = parse_function_text("U 6 5B 0x02:1\n").unwrap();
        assert_eq!(a1.entries[0].vbf.table(), a2.entries[0].vbf.table());
        assert_eq!(a1.entries[0].vbf.table(), a3.entries[0].vbf.table());
        let zero = parse_function_text("U 4 13 0:1\n").unwrap();
        assert!(zero.entries[0].vbf.table().iter().all(|&y| y == 0));
    }

    #[test]
    fn t_record_round_trip() {
        let file = parse_function_text("U 6 5B 1:3,1:10,a^1:24\n").unwrap();
        let f = &file.entries[0].vbf;
        let record = t_record(f);
        let reparsed = parse_function_text(&record).unwrap();
        assert_eq!(&reparsed.entries[0].vbf, f);
    }
}
