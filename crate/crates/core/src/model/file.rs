//! Plain-text model files.
//!
//! ```text
//! # comment
//! domain continuous
//! Ts 0.02
//! N 10
//! A 2 2
//! 0 1
//! 0 0
//! B 2 1
//! 0
//! 1
//! ...
//! c 2
//! 10 10
//! ```
//!
//! Matrix sections are `<NAME> <rows> <cols>` with `NAME` one of
//! `A B Q R P Eu Ex`, followed by `rows` lines of `cols` numbers. Sections may
//! appear in any order; repeating one is an error.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matkit::Mat;
use crate::model::{ClqrSpec, LtiModel, System, TerminalCost, TimeDomain};
use crate::scalar::Scalar;

const MATRIX_SECTIONS: [&str; 7] = ["A", "B", "Q", "R", "P", "Eu", "Ex"];

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn number<T: Scalar>(tok: &str, line: usize, column: usize) -> Result<T> {
    tok.parse::<T>()
        .map_err(|_| parse_err(line, column, format!("`{tok}` is not a number")))
}

fn count(tok: Option<&(usize, &str)>, line: usize, what: &str) -> Result<usize> {
    let &(col, tok) = tok.ok_or_else(|| parse_err(line, 1, format!("missing {what}")))?;
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, col, format!("`{tok}` is not a valid {what}")))
}

#[derive(Default)]
struct Sections<T: Scalar> {
    matrices: HashMap<&'static str, Mat<T>>,
    c: Option<Vec<T>>,
    horizon: Option<usize>,
    ts: Option<T>,
    domain: Option<TimeDomain>,
}

/// Parses model text. `name` becomes the system name.
pub fn parse_model<T: Scalar>(text: &str, name: &str) -> Result<System<T>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });
    let mut s = Sections::<T>::default();
    let mut seen: HashMap<String, usize> = HashMap::new();

    while let Some((ln, line)) = lines.next() {
        let toks = tokens(line);
        let (_, head) = toks[0];
        if let Some(prev) = seen.insert(head.to_string(), ln) {
            return Err(parse_err(
                ln,
                1,
                format!("duplicate section `{head}` (first at line {prev})"),
            ));
        }
        let expect_args = |k: usize| -> Result<()> {
            if toks.len() != k + 1 {
                Err(parse_err(
                    ln,
                    1,
                    format!("section `{head}` takes {k} argument(s), found {}", toks.len() - 1),
                ))
            } else {
                Ok(())
            }
        };
        if let Some(&key) = MATRIX_SECTIONS.iter().find(|&&k| k == head) {
            expect_args(2)?;
            let rows = count(toks.get(1), ln, "row count")?;
            let cols = count(toks.get(2), ln, "column count")?;
            let mut data = Vec::with_capacity(rows * cols);
            for r in 0..rows {
                let (rl, row) = lines.next().ok_or_else(|| {
                    parse_err(ln, 1, format!("section `{key}` ends after {r} of {rows} rows"))
                })?;
                let rt = tokens(row);
                if rt.len() != cols {
                    return Err(parse_err(
                        rl,
                        1,
                        format!("section `{key}` row has {} entries, expected {cols}", rt.len()),
                    ));
                }
                for (col, tok) in rt {
                    data.push(number(tok, rl, col)?);
                }
            }
            s.matrices.insert(key, Mat::from_vec(rows, cols, data)?);
            continue;
        }
        match head {
            "c" => {
                expect_args(1)?;
                let len = count(toks.get(1), ln, "vector length")?;
                let values = if len == 0 {
                    Vec::new()
                } else {
                    let (rl, row) = lines
                        .next()
                        .ok_or_else(|| parse_err(ln, 1, "section `c` is missing its values"))?;
                    let rt = tokens(row);
                    if rt.len() != len {
                        return Err(parse_err(
                            rl,
                            1,
                            format!("section `c` has {} entries, expected {len}", rt.len()),
                        ));
                    }
                    rt.into_iter()
                        .map(|(col, tok)| number(tok, rl, col))
                        .collect::<Result<Vec<T>>>()?
                };
                s.c = Some(values);
            }
            "N" => {
                expect_args(1)?;
                s.horizon = Some(count(toks.get(1), ln, "horizon")?);
            }
            "Ts" => {
                expect_args(1)?;
                let (col, tok) = toks[1];
                s.ts = Some(number(tok, ln, col)?);
            }
            "domain" => {
                expect_args(1)?;
                let (col, tok) = toks[1];
                s.domain = Some(match tok {
                    "discrete" => TimeDomain::Discrete,
                    "continuous" => TimeDomain::Continuous,
                    other => {
                        return Err(parse_err(
                            ln,
                            col,
                            format!("domain must be `discrete` or `continuous`, found `{other}`"),
                        ))
                    }
                });
            }
            other => return Err(parse_err(ln, 1, format!("unknown section `{other}`"))),
        }
    }
    assemble(s, name)
}

fn assemble<T: Scalar>(mut s: Sections<T>, name: &str) -> Result<System<T>> {
    let mut take = |key: &'static str| {
        s.matrices
            .remove(key)
            .ok_or_else(|| parse_err(0, 0, format!("missing required section `{key}`")))
    };
    let a = take("A")?;
    let b = take("B")?;
    let q = take("Q")?;
    let r = take("R")?;
    let horizon = s
        .horizon
        .ok_or_else(|| parse_err(0, 0, "missing required section `N`"))?;
    let domain = s.domain.unwrap_or(TimeDomain::Discrete);
    if domain == TimeDomain::Continuous && s.ts.is_none() {
        return Err(parse_err(0, 0, "continuous model needs a `Ts` section"));
    }
    let mut model = LtiModel::new(a, b, domain)?;
    let (n, m) = (model.n(), model.m());
    if domain == TimeDomain::Discrete {
        model.sample_time = s.ts;
    }
    let terminal = match s.matrices.remove("P") {
        Some(p) => TerminalCost::Explicit(p),
        None => TerminalCost::SameAsQ,
    };
    let e_u = s.matrices.remove("Eu");
    let e_x = s.matrices.remove("Ex");
    let c = match (s.c, &e_u, &e_x) {
        (Some(c), _, _) => c,
        (None, None, None) => Vec::new(),
        _ => return Err(parse_err(0, 0, "constraint matrices given without section `c`")),
    };
    let l = c.len();
    let spec = ClqrSpec::new(
        n,
        m,
        q,
        r,
        terminal,
        e_u.unwrap_or_else(|| Mat::zeros(l, m)),
        e_x.unwrap_or_else(|| Mat::zeros(l, n)),
        c,
        horizon,
    )?;
    Ok(System {
        name: name.to_string(),
        model,
        spec,
        sample_time: if domain == TimeDomain::Continuous { s.ts } else { None },
        state_radius: T::one(),
    })
}

/// Reads a model file; the system is named after the file stem.
pub fn load_model<T: Scalar>(path: impl AsRef<Path>) -> Result<System<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "model".into());
    parse_model(&text, &name)
}

fn write_matrix<T: Scalar>(out: &mut String, key: &str, m: &Mat<T>) {
    let _ = writeln!(out, "{key} {} {}", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

/// Serialises a system; numbers use the shortest round-tripping decimal form.
pub fn to_model_text<T: Scalar>(system: &System<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {}", system.name);
    let domain = match system.model.domain {
        TimeDomain::Discrete => "discrete",
        TimeDomain::Continuous => "continuous",
    };
    let _ = writeln!(out, "domain {domain}");
    if let Some(ts) = system.sample_time.or(system.model.sample_time) {
        let _ = writeln!(out, "Ts {ts}");
    }
    let _ = writeln!(out, "N {}", system.spec.horizon);
    write_matrix(&mut out, "A", &system.model.a);
    write_matrix(&mut out, "B", &system.model.b);
    write_matrix(&mut out, "Q", &system.spec.q);
    write_matrix(&mut out, "R", &system.spec.r);
    if let TerminalCost::Explicit(p) = &system.spec.terminal {
        write_matrix(&mut out, "P", p);
    }
    write_matrix(&mut out, "Eu", &system.spec.e_u);
    write_matrix(&mut out, "Ex", &system.spec.e_x);
    let _ = writeln!(out, "c {}", system.spec.c.len());
    if !system.spec.c.is_empty() {
        let row: Vec<String> = system.spec.c.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn save_model<T: Scalar>(system: &System<T>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_model_text(system))?;
    Ok(())
}
