use serde_json::Value;

use crate::error::{Error, Result};
use crate::qap::QapInstance;
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Read `D` before `F`.
    pub swap_matrices: bool,
    /// Accept decimal literals and convert them exactly.
    pub allow_float: bool,
}

struct Token<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

fn tokens(s: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    for (ln, line) in s.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        let mut start = None;
        for (i, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(i),
                (true, Some(b)) => {
                    out.push(Token { text: &body[b..i], line: ln + 1, col: b + 1 });
                    start = None;
                }
                _ => {}
            }
        }
    }
    out
}

/// Text or JSON instance; JSON when the first non-blank character is `{`.
pub fn parse_instance(s: &str, opts: ParseOptions) -> Result<QapInstance> {
    let inst = if s.trim_start().starts_with('{') { parse_json(s, opts)? } else { parse_text(s, opts)? };
    let inst = if opts.swap_matrices { inst.swapped() } else { inst };
    inst.validate()?;
    Ok(inst)
}

fn parse_text(s: &str, opts: ParseOptions) -> Result<QapInstance> {
    let toks = tokens(s);
    let end = |toks: &[Token]| {
        let (line, col) = toks.last().map_or((1, 1), |t| (t.line, t.col + t.text.len()));
        Error::Parse { line, col, msg: "unexpected end of input".into() }
    };
    let first = toks.first().ok_or_else(|| end(&toks))?;
    let n: usize = first
        .text
        .parse()
        .map_err(|_| Error::Parse { line: first.line, col: first.col, msg: format!("expected size n, got {:?}", first.text) })?;
    if n == 0 {
        return Err(Error::Parse { line: first.line, col: first.col, msg: "n must be at least 1".into() });
    }
    let need = 1 + 2 * n * n;
    if toks.len() < need {
        return Err(end(&toks));
    }
    if toks.len() > need {
        let t = &toks[need];
        return Err(Error::Parse { line: t.line, col: t.col, msg: format!("unexpected trailing token {:?}", t.text) });
    }
    let vals: Vec<Rational> = toks[1..]
        .iter()
        .map(|t| rational::parse_rational(t.text, opts.allow_float).map_err(|m| Error::Parse { line: t.line, col: t.col, msg: m }))
        .collect::<Result<_>>()?;
    let mat = |k: usize| -> Vec<Vec<Rational>> { (0..n).map(|r| vals[k * n * n + r * n..k * n * n + (r + 1) * n].to_vec()).collect() };
    Ok(QapInstance { n, f: mat(0), d: mat(1) })
}

fn json_number(v: &Value, allow_float: bool, at: &str) -> Result<Rational> {
    let err = |msg: String| Error::Parse { line: 0, col: 0, msg: format!("{at}: {msg}") };
    match v {
        Value::String(s) => rational::parse_rational(s, allow_float).map_err(err),
        Value::Number(x) if x.is_i64() => Ok(rational::int(x.as_i64().unwrap())),
        Value::Number(x) => rational::parse_rational(&x.to_string(), allow_float).map_err(err),
        other => Err(err(format!("expected a number, got {other}"))),
    }
}

fn parse_json(s: &str, opts: ParseOptions) -> Result<QapInstance> {
    let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse { line: e.line(), col: e.column(), msg: e.to_string() })?;
    let mat = |key: &str| -> Result<Vec<Vec<Rational>>> {
        let rows = v
            .get(key)
            .or_else(|| v.get(key.to_lowercase()))
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse { line: 0, col: 0, msg: format!("missing matrix {key}") })?;
        rows.iter()
            .enumerate()
            .map(|(r, row)| {
                let row = row
                    .as_array()
                    .ok_or_else(|| Error::Parse { line: 0, col: 0, msg: format!("{key}[{r}] is not an array") })?;
                row.iter().enumerate().map(|(c, x)| json_number(x, opts.allow_float, &format!("{key}[{r}][{c}]"))).collect()
            })
            .collect()
    };
    let f = mat("F")?;
    let d = mat("D")?;
    if let Some(n) = v.get("n").and_then(Value::as_u64) {
        if n as usize != f.len() {
            return Err(Error::Parse { line: 0, col: 0, msg: format!("n = {n} but F has {} rows", f.len()) });
        }
    }
    Ok(QapInstance { n: f.len(), f, d })
}

pub fn instance_to_text(inst: &QapInstance) -> String {
    let mut s = format!("{}\n\n", inst.n);
    for m in [&inst.f, &inst.d] {
        for row in m {
            let r: Vec<String> = row.iter().map(rational::fmt_rational).collect();
            s.push_str(&r.join(" "));
            s.push('\n');
        }
        s.push('\n');
    }
    s
}
