//! Rational parsing/printing, input hashing, and envelope output shared by
//! the subcommands.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use fpm_core::{Matching, Rat, SolveReport};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Bound on numerators/denominators accepted from the command line; keeps
/// every downstream cross-multiplication far away from overflow.
const MAX_PART: i64 = 1_000_000_000;

/// Parses "p/q", a decimal like "0.25" (read digit-for-digit, so it stays
/// exact), or a plain integer.
pub fn parse_rational(text: &str) -> Result<Rat> {
    let text = text.trim();
    let value = if let Some((p, q)) = text.split_once('/') {
        let p: i64 = p.trim().parse().context("bad numerator")?;
        let q: i64 = q.trim().parse().context("bad denominator")?;
        if q == 0 {
            bail!("denominator must not be zero");
        }
        if p.abs() > MAX_PART || q.abs() > MAX_PART {
            bail!("rational parts must not exceed {MAX_PART}");
        }
        Rat::new(p, q)
    } else if let Some((int, frac)) = text.split_once('.') {
        if frac.len() > 9 || !frac.chars().all(|c| c.is_ascii_digit()) {
            bail!("decimals support at most 9 fractional digits");
        }
        let negative = int.trim_start().starts_with('-');
        let int: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().context("bad integer part")?
        };
        if int.abs() > MAX_PART {
            bail!("rational parts must not exceed {MAX_PART}");
        }
        let scale = 10i64.pow(frac.len() as u32);
        let frac: i64 = if frac.is_empty() {
            0
        } else {
            frac.parse().context("bad fractional part")?
        };
        let magnitude = Rat::new(int.abs() * scale + frac, scale);
        if negative || int < 0 {
            -magnitude
        } else {
            magnitude
        }
    } else {
        let p: i64 = text.parse().context("expected `p/q`, a decimal, or an integer")?;
        if p.abs() > MAX_PART {
            bail!("rational parts must not exceed {MAX_PART}");
        }
        Rat::from_integer(p)
    };
    Ok(value)
}

/// Canonical "p/q" rendering (reduced, denominator always shown).
pub fn format_rational(r: Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn read_input(path: &Path) -> Result<(String, String)> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let text = String::from_utf8(bytes.clone()).context("input is not UTF-8")?;
    Ok((text, sha256_hex(&bytes)))
}

/// Edges of a matching as 1-based `[u, v, color]` triples, in index order.
pub fn edges_value(g: &fpm_core::ColoredGraph, m: &Matching) -> Value {
    Value::Array(
        m.edge_indices()
            .iter()
            .map(|&i| {
                let e = g.edge(i);
                json!([e.u + 1, e.v + 1, e.color + 1])
            })
            .collect(),
    )
}

/// Per-color shares as an object keyed by 1-based color id.
pub fn fractions_value(fractions: &[Rat]) -> Value {
    let map: BTreeMap<String, Value> = fractions
        .iter()
        .enumerate()
        .map(|(c, f)| ((c + 1).to_string(), Value::String(format_rational(*f))))
        .collect();
    json!(map)
}

pub fn report_value(g: &fpm_core::ColoredGraph, report: &SolveReport) -> Value {
    json!({
        "size": report.size,
        "edges": edges_value(g, &report.matching),
        "fractions": fractions_value(&report.fractions),
        "certified_lower": format_rational(report.certified_lower),
        "certified_upper": format_rational(report.certified_upper),
        "probed_T": report.probed_t,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Text,
}

/// The uniform machine-readable envelope. `extra` lands next to `result`.
pub fn envelope(tool: &str, input_hash: &str, result: Value, extra: &[(&str, Value)]) -> Value {
    let mut doc = json!({
        "tool": format!("fpm {tool}"),
        "version": env!("CARGO_PKG_VERSION"),
        "input_hash": input_hash,
        "result": result,
    });
    for (key, value) in extra {
        doc[*key] = value.clone();
    }
    doc
}

/// Prints the envelope (or the plain-text rendering) to stdout and mirrors
/// the JSON document to `out` when given.
pub fn emit(doc: &Value, text: String, format: OutputFormat, out: Option<&Path>) -> Result<()> {
    let json_line = serde_json::to_string(doc).expect("JSON values serialize");
    match format {
        OutputFormat::Json => println!("{json_line}"),
        OutputFormat::Text => println!("{text}"),
    }
    if let Some(path) = out {
        fs::write(path, json_line + "\n")
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

/// Parses a matching file: whitespace-separated 1-based edge indices,
/// `c`-prefixed comment lines allowed.
pub fn parse_matching_file(text: &str) -> Result<Vec<usize>> {
    let mut indices = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        match tokens.first() {
            None => continue,
            Some(t) if t.starts_with('c') => continue,
            Some(_) => {
                for token in tokens {
                    let index: usize = token
                        .parse()
                        .map_err(|_| anyhow!("line {}: bad edge index `{token}`", i + 1))?;
                    if index == 0 {
                        bail!("line {}: edge indices are 1-based", i + 1);
                    }
                    indices.push(index - 1);
                }
            }
        }
    }
    Ok(indices)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_decimals_and_integers() {
        assert_eq!(parse_rational("1/4").unwrap(), Rat::new(1, 4));
        assert_eq!(parse_rational("0.25").unwrap(), Rat::new(1, 4));
        assert_eq!(parse_rational("1").unwrap(), Rat::from_integer(1));
        assert_eq!(parse_rational("0").unwrap(), Rat::from_integer(0));
        assert_eq!(parse_rational("0.1").unwrap(), Rat::new(1, 10));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn rational_rendering_is_canonical() {
        assert_eq!(format_rational(Rat::new(2, 8)), "1/4");
        assert_eq!(format_rational(Rat::from_integer(0)), "0/1");
        assert_eq!(format_rational(Rat::from_integer(1)), "1/1");
    }

    #[test]
    fn matching_files_are_one_based() {
        assert_eq!(parse_matching_file("c hi\n1 3\n2\n").unwrap(), vec![0, 2, 1]);
        assert!(parse_matching_file("0\n").is_err());
    }
}
