//! Line-oriented text formats: network descriptions, polynomials, generator
//! matrices and error-pattern sets.
//!
//! Network file (`#` starts a comment, indices are one-based):
//!
//! ```text
//! field 2 1
//! inputs 2
//! source s
//! sinks T1 T2
//! edge 1 s a
//! ...
//! alpha <input> <edge> <value>
//! beta <edge_i> <edge_j> <value>
//! eps <sink> <edge> <column> <value>
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::galois::{Elem, Field};
use crate::nec::ErrorPatternSet;
use crate::network::{Edge, NetworkSpec};
use crate::polymat::{Poly, PolyMatrix};

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("expected {what}, found `{tok}`")))
}

fn parse_field_line(args: &[&str], line: usize) -> Result<Field> {
    match args {
        [p] => Field::new(num(p, line, "prime")?, 1),
        [p, m] => Field::new(num(p, line, "prime")?, num(m, line, "degree")?),
        _ => Err(Error::parse(line, "usage: field <p> [m]")),
    }
    .map_err(|e| match e {
        Error::Parse { .. } => e,
        other => Error::parse(line, other.to_string()),
    })
}

enum Kernel {
    Alpha(usize, usize, Elem),
    Beta(usize, usize, Elem),
    Eps(String, usize, usize, Elem),
}

/// Parses a network description. `field_override` replaces the file's
/// `field` line when given.
pub fn parse_network(text: &str, field_override: Option<&Field>) -> Result<NetworkSpec> {
    let mut field = field_override.cloned();
    let mut inputs = None;
    let mut source = None;
    let mut sinks: Option<Vec<String>> = None;
    let mut edges = Vec::new();
    let mut kernels = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks: Vec<&str> = strip_comment(raw).split_whitespace().collect();
        let Some((&kw, args)) = toks.split_first() else {
            continue;
        };
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::parse(line, format!("`{kw}` takes {n} arguments")))
            }
        };
        match kw {
            "field" => {
                let f = parse_field_line(args, line)?;
                if field_override.is_none() {
                    field = Some(f);
                }
            }
            "inputs" => {
                arity(1)?;
                inputs = Some(num::<usize>(args[0], line, "input count")?);
            }
            "source" => {
                arity(1)?;
                source = Some(args[0].to_string());
            }
            "sinks" => {
                if args.is_empty() {
                    return Err(Error::parse(line, "`sinks` needs at least one vertex"));
                }
                sinks = Some(args.iter().map(|s| s.to_string()).collect());
            }
            "edge" => {
                arity(3)?;
                let i: usize = num(args[0], line, "edge index")?;
                if i != edges.len() + 1 {
                    return Err(Error::parse(
                        line,
                        format!("edge index {i} out of sequence, expected {}", edges.len() + 1),
                    ));
                }
                edges.push(Edge {
                    tail: args[1].to_string(),
                    head: args[2].to_string(),
                });
            }
            "alpha" | "beta" => {
                arity(3)?;
                let a: usize = num(args[0], line, "index")?;
                let b: usize = num(args[1], line, "edge index")?;
                let v: Elem = num(args[2], line, "field element")?;
                if a == 0 || b == 0 {
                    return Err(Error::parse(line, "indices are one-based"));
                }
                let k = if kw == "alpha" {
                    Kernel::Alpha(a - 1, b - 1, v)
                } else {
                    Kernel::Beta(a - 1, b - 1, v)
                };
                kernels.push((line, k));
            }
            "eps" => {
                arity(4)?;
                let e: usize = num(args[1], line, "edge index")?;
                let c: usize = num(args[2], line, "column")?;
                let v: Elem = num(args[3], line, "field element")?;
                if e == 0 || c == 0 {
                    return Err(Error::parse(line, "indices are one-based"));
                }
                kernels.push((line, Kernel::Eps(args[0].to_string(), e - 1, c - 1, v)));
            }
            other => return Err(Error::parse(line, format!("unknown keyword `{other}`"))),
        }
    }

    let last = text.lines().count().max(1);
    let field = field.ok_or_else(|| Error::parse(last, "missing `field` line"))?;
    let num_inputs = inputs.ok_or_else(|| Error::parse(last, "missing `inputs` line"))?;
    let source = source.ok_or_else(|| Error::parse(last, "missing `source` line"))?;
    let sinks = sinks.ok_or_else(|| Error::parse(last, "missing `sinks` line"))?;

    let mut spec = NetworkSpec {
        field: field.clone(),
        num_inputs,
        source,
        sinks,
        edges,
        source_kernels: BTreeMap::new(),
        node_kernels: BTreeMap::new(),
        sink_kernels: BTreeMap::new(),
    };
    for (line, k) in kernels {
        let in_range = |e: usize| {
            if e < spec.edges.len() {
                Ok(())
            } else {
                Err(Error::parse(line, format!("unknown edge {}", e + 1)))
            }
        };
        let value = |v: Elem| field.check(v).map_err(|e| Error::parse(line, e.to_string()));
        match k {
            Kernel::Alpha(i, e, v) => {
                in_range(e)?;
                if i >= num_inputs {
                    return Err(Error::parse(line, format!("input {} out of range", i + 1)));
                }
                spec.source_kernels.insert((i, e), value(v)?);
            }
            Kernel::Beta(i, j, v) => {
                in_range(i)?;
                in_range(j)?;
                spec.node_kernels.insert((i, j), value(v)?);
            }
            Kernel::Eps(sink, e, c, v) => {
                in_range(e)?;
                let t = spec
                    .sinks
                    .iter()
                    .position(|s| *s == sink)
                    .ok_or_else(|| Error::parse(line, format!("`{sink}` is not a sink")))?;
                if c >= num_inputs {
                    return Err(Error::parse(line, format!("column {} out of range", c + 1)));
                }
                spec.sink_kernels.insert((t, e, c), value(v)?);
            }
        }
    }
    Ok(spec)
}

/// Canonical rendering; [`parse_network`] reads it back to an equal value.
pub fn write_network(spec: &NetworkSpec) -> String {
    let mut s = String::new();
    let f = &spec.field;
    let _ = writeln!(s, "field {} {}", f.characteristic(), f.degree());
    let _ = writeln!(s, "inputs {}", spec.num_inputs);
    let _ = writeln!(s, "source {}", spec.source);
    let _ = writeln!(s, "sinks {}", spec.sinks.join(" "));
    for (i, e) in spec.edges.iter().enumerate() {
        let _ = writeln!(s, "edge {} {} {}", i + 1, e.tail, e.head);
    }
    for (&(i, e), v) in &spec.source_kernels {
        let _ = writeln!(s, "alpha {} {} {v}", i + 1, e + 1);
    }
    for (&(i, j), v) in &spec.node_kernels {
        let _ = writeln!(s, "beta {} {} {v}", i + 1, j + 1);
    }
    for (&(t, e, c), v) in &spec.sink_kernels {
        let _ = writeln!(s, "eps {} {} {} {v}", spec.sinks[t], e + 1, c + 1);
    }
    s
}

/// Parses `c`, `z`, `cz`, `z^k`, `cz^k` terms joined by `+`. Whitespace is
/// ignored and repeated powers accumulate.
pub fn parse_poly(field: &Field, text: &str) -> std::result::Result<Poly, String> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty polynomial".into());
    }
    let mut coeffs: Vec<Elem> = Vec::new();
    for term in compact.split('+') {
        if term.is_empty() {
            return Err(format!("empty term in `{text}`"));
        }
        let (coef_str, power) = match term.find('z') {
            None => (term, 0usize),
            Some(pos) => {
                let rest = &term[pos + 1..];
                let power = if rest.is_empty() {
                    1
                } else if let Some(exp) = rest.strip_prefix('^') {
                    exp.parse().map_err(|_| format!("bad exponent in `{term}`"))?
                } else {
                    return Err(format!("unexpected `{rest}` in `{term}`"));
                };
                (&term[..pos], power)
            }
        };
        let c: Elem = if coef_str.is_empty() {
            1
        } else {
            coef_str
                .parse()
                .map_err(|_| format!("bad coefficient `{coef_str}`"))?
        };
        if !field.contains(c) {
            return Err(format!("coefficient {c} is not in {field}"));
        }
        if coeffs.len() <= power {
            coeffs.resize(power + 1, 0);
        }
        coeffs[power] = field.add(coeffs[power], c);
    }
    Poly::new(field, coeffs).map_err(|e| e.to_string())
}

/// A generator matrix file, optionally naming its own field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorFile {
    pub field: Field,
    pub generator: PolyMatrix,
}

/// Parses generator rows: comma-separated polynomials, one row per line or
/// rows separated by `;`, optionally wrapped in brackets. A `field p [m]`
/// line sets the field unless `field_override` is given.
pub fn parse_generator(text: &str, field_override: Option<&Field>) -> Result<GeneratorFile> {
    let mut field = field_override.cloned();
    let mut raw_rows: Vec<(usize, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks[0] == "field" {
            let f = parse_field_line(&toks[1..], line)?;
            if field_override.is_none() {
                field = Some(f);
            }
            continue;
        }
        let body = body.trim_start_matches('[').trim_end_matches(']');
        for row in body.split(';') {
            let row = row.trim().trim_start_matches('[').trim_end_matches(']').trim();
            if !row.is_empty() {
                raw_rows.push((line, row.to_string()));
            }
        }
    }
    let field = field.ok_or_else(|| Error::parse(1, "no field given for the generator matrix"))?;
    if raw_rows.is_empty() {
        return Err(Error::parse(1, "no generator rows"));
    }
    let mut rows = Vec::new();
    for (line, row) in raw_rows {
        let polys = row
            .split(',')
            .map(|t| parse_poly(&field, t).map_err(|m| Error::parse(line, m)))
            .collect::<Result<Vec<_>>>()?;
        rows.push(polys);
    }
    let generator = PolyMatrix::from_rows(&field, rows).map_err(|e| Error::parse(1, e.to_string()))?;
    Ok(GeneratorFile { field, generator })
}

/// Generator file text that [`parse_generator`] reads back unchanged.
pub fn write_generator(g: &PolyMatrix) -> String {
    let f = g.field();
    let mut s = format!("field {} {}\n", f.characteristic(), f.degree());
    for r in 0..g.rows() {
        let row: Vec<String> = g.row(r).iter().map(|p| p.to_string()).collect();
        let _ = writeln!(s, "{}", row.join(", "));
    }
    s
}

/// Error-pattern set syntax: `single-edges`, `upto-<k>-edges`, or an explicit
/// list of one-based edge sets such as `{1,2};{3};{4 5}`.
pub fn parse_patterns(text: &str, num_edges: usize) -> Result<ErrorPatternSet> {
    let t = text.trim();
    if t == "single-edges" {
        return Ok(ErrorPatternSet::up_to_k_edges(num_edges, 1));
    }
    if let Some(k) = t.strip_prefix("upto-").and_then(|r| r.strip_suffix("-edges")) {
        let k: usize = num(k, 1, "edge count")?;
        return Ok(ErrorPatternSet::up_to_k_edges(num_edges, k));
    }
    let mut patterns = Vec::new();
    for part in t.split(';') {
        let part = part.trim().trim_start_matches('{').trim_end_matches('}');
        if part.trim().is_empty() {
            continue;
        }
        let mut rho = Vec::new();
        for tok in part.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
            let e: usize = num(tok, 1, "edge index")?;
            if e == 0 || e > num_edges {
                return Err(Error::parse(1, format!("edge {e} out of range 1..={num_edges}")));
            }
            rho.push(e - 1);
        }
        patterns.push(rho);
    }
    ErrorPatternSet::new(num_edges, patterns).map_err(|e| Error::parse(1, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    #[test]
    fn poly_grammar() {
        let f = Field::new(3, 1).unwrap();
        for s in ["1+z^2", "2z", "0", "2+z+2z^2", "z", "z^3"] {
            assert_eq!(parse_poly(&f, s).unwrap().to_string(), s);
        }
        assert_eq!(parse_poly(&f, " 1 + z ^ 2 ").unwrap().to_string(), "1+z^2");
        assert_eq!(parse_poly(&f, "z+2z").unwrap().to_string(), "0");
        assert!(parse_poly(&f, "3z").is_err());
        assert!(parse_poly(&f, "1++z").is_err());
        assert!(parse_poly(&f, "zz").is_err());
    }

    #[test]
    fn generator_forms() {
        let f = Field::new(2, 1).unwrap();
        let a = parse_generator("[1+z^2, 1+z+z^2]", Some(&f)).unwrap();
        let b = parse_generator("field 2\n1+z^2 , 1+z+z^2\n", None).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.generator.to_string(), "[1+z^2, 1+z+z^2]");
        let two = parse_generator("field 2 1\n[1, z, 0; 0, 1, z]", None).unwrap();
        assert_eq!(two.generator.rows(), 2);
        assert_eq!(parse_generator(&write_generator(&two.generator), None).unwrap(), two);
        assert!(parse_generator("1+z", None).is_err());
        assert!(matches!(
            parse_generator("field 2\n1+z, 1\n1", None),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn network_round_trip() {
        for spec in [reference::butterfly(2), reference::butterfly(3), reference::combination_4c2()] {
            let text = write_network(&spec);
            assert_eq!(parse_network(&text, None).unwrap(), spec);
        }
    }

    #[test]
    fn network_errors_name_the_line() {
        let text = "field 2 1\ninputs 1\nsource s\nsinks t\nedge 1 s t\nedge 3 s t\n";
        assert_eq!(
            parse_network(text, None).unwrap_err(),
            Error::Parse {
                line: 6,
                message: "edge index 3 out of sequence, expected 2".into()
            }
        );
        let text = "field 2 1\ninputs 1\nsource s\nsinks t\nedge 1 s t\nalpha 1 4 1\n";
        assert!(matches!(parse_network(text, None), Err(Error::Parse { line: 6, .. })));
        let text = "field 4 1\n";
        assert!(matches!(parse_network(text, None), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_network("bogus 1", None), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn field_override() {
        let f3 = Field::new(3, 1).unwrap();
        let spec = parse_network(reference::BUTTERFLY_F2, Some(&f3)).unwrap();
        assert_eq!(spec, reference::butterfly(3));
    }

    #[test]
    fn pattern_specs() {
        assert_eq!(parse_patterns("single-edges", 9).unwrap().len(), 9);
        assert_eq!(parse_patterns("upto-2-edges", 16).unwrap().len(), 16 + 120);
        let p = parse_patterns("{1,2};{3}; {2 1}", 9).unwrap();
        assert_eq!(p.len(), 2);
        assert!(parse_patterns("{10}", 9).is_err());
        assert!(parse_patterns("{0}", 9).is_err());
    }
}
