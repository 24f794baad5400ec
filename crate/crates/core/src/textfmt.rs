//! Line-oriented text format for forms, slots and bar chains.
//!
//! Blank lines and lines starting with `#` are ignored. A scalar form is
//!
//! ```text
//! form n=2 cutoff=4
//! 1,2 0,1 0.5 -0.25
//! - 0,0 1 0
//! end
//! ```
//!
//! where each term line holds the increasing 1-based index set of `dx^I`
//! (`-` for functions), the Fourier mode (n comma-separated integers) and the
//! real and imaginary parts of the coefficient. A slot `theta' + dt ^ theta''`
//! is
//!
//! ```text
//! tform n=2 cutoff=4 degree=2
//! prime 1,2 0,0 1 0
//! dprime 1 1,0 0.5 0
//! end
//! ```
//!
//! and a chain lists words, each a coefficient followed by its slots:
//!
//! ```text
//! chain cyclic=false
//! word 1 0
//! tform n=2 cutoff=4 degree=1
//! prime 1 0,0 1 0
//! end
//! endword
//! end
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::bar::BarChain;
use crate::error::{parse_err, Result};
use crate::forms::{mode, ScalarForm, TForm};
use crate::C64;

/// Largest accepted Fourier cutoff; keeps hostile input from allocating.
pub const MAX_CUTOFF: i32 = 64;
/// Largest accepted word length in a chain.
pub const MAX_WORD_LEN: usize = 16;

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(s: &'a str) -> Self {
        Self { inner: s.lines().enumerate(), last: 0 }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            self.last = i + 1;
            let t = l.trim();
            if !t.is_empty() && !t.starts_with('#') {
                return Some((i + 1, t));
            }
        }
        None
    }

    fn expect(&mut self) -> Result<(usize, &'a str)> {
        let last = self.last;
        self.next().map_or_else(|| parse_err(last + 1, "unexpected end of input"), Ok)
    }

    fn finish(&mut self) -> Result<()> {
        match self.next() {
            None => Ok(()),
            Some((l, _)) => parse_err(l, "trailing content"),
        }
    }
}

fn header<'a>(line: usize, text: &'a str, keyword: &str) -> Result<BTreeMap<&'a str, &'a str>> {
    let mut toks = text.split_whitespace();
    if toks.next() != Some(keyword) {
        return parse_err(line, format!("expected `{keyword}`"));
    }
    let mut out = BTreeMap::new();
    for t in toks {
        let Some((k, v)) = t.split_once('=') else {
            return parse_err(line, format!("expected key=value, found `{t}`"));
        };
        if out.insert(k, v).is_some() {
            return parse_err(line, format!("duplicate key `{k}`"));
        }
    }
    Ok(out)
}

fn take<T: std::str::FromStr>(line: usize, h: &BTreeMap<&str, &str>, key: &str) -> Result<T> {
    match h.get(key) {
        None => parse_err(line, format!("missing key `{key}`")),
        Some(v) => v.parse().or_else(|_| parse_err(line, format!("bad value for `{key}`: `{v}`"))),
    }
}

fn num(line: usize, s: &str) -> Result<f64> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => parse_err(line, format!("bad number `{s}`")),
    }
}

fn dims(line: usize, h: &BTreeMap<&str, &str>) -> Result<(usize, i32)> {
    let n: usize = take(line, h, "n")?;
    let cutoff: i32 = take(line, h, "cutoff")?;
    if !(1..=4).contains(&n) {
        return parse_err(line, format!("dimension {n} outside 1..=4"));
    }
    if !(0..=MAX_CUTOFF).contains(&cutoff) {
        return parse_err(line, format!("cutoff {cutoff} outside 0..={MAX_CUTOFF}"));
    }
    Ok((n, cutoff))
}

/// Parses `<indices> <mode> <re> <im>` and adds the term to `f`.
fn term_into(line: usize, toks: &[&str], f: &mut ScalarForm) -> Result<()> {
    let [idx, modes, re, im] = toks else {
        return parse_err(line, "term needs indices, mode, re, im");
    };
    let mut indices = Vec::new();
    if *idx != "-" {
        for t in idx.split(',') {
            match t.parse::<usize>() {
                Ok(i) if (1..=f.n).contains(&i) => indices.push(i - 1),
                _ => return parse_err(line, format!("bad index `{t}`")),
            }
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return parse_err(line, "indices must be strictly increasing");
        }
    }
    let k: Vec<i32> = modes
        .split(',')
        .map(|t| t.parse::<i32>().or_else(|_| parse_err(line, format!("bad mode `{t}`"))))
        .collect::<Result<_>>()?;
    if k.len() != f.n {
        return parse_err(line, format!("mode has {} entries, expected {}", k.len(), f.n));
    }
    if k.iter().any(|x| x.abs() > f.cutoff) {
        return parse_err(line, "mode exceeds cutoff");
    }
    let c = C64::new(num(line, re)?, num(line, im)?);
    let (mask, _) = crate::clifford::mask_from_indices(&indices);
    let mask = mask.expect("strictly increasing indices");
    f.add_term(mask, mode(&k), c);
    Ok(())
}

fn form_body(lines: &mut Lines, n: usize, cutoff: i32) -> Result<ScalarForm> {
    let mut f = ScalarForm::zero(n, cutoff);
    loop {
        let (l, t) = lines.expect()?;
        if t == "end" {
            return Ok(f);
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        term_into(l, &toks, &mut f)?;
    }
}

fn tform_body(lines: &mut Lines, l0: usize, text: &str) -> Result<TForm> {
    let h = header(l0, text, "tform")?;
    let (n, cutoff) = dims(l0, &h)?;
    let degree: usize = take(l0, &h, "degree")?;
    if degree > n + 1 {
        return parse_err(l0, format!("degree {degree} exceeds {}", n + 1));
    }
    let mut prime = ScalarForm::zero(n, cutoff);
    let mut dprime = ScalarForm::zero(n, cutoff);
    loop {
        let (l, t) = lines.expect()?;
        if t == "end" {
            break;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        match toks.first() {
            Some(&"prime") => term_into(l, &toks[1..], &mut prime)?,
            Some(&"dprime") => term_into(l, &toks[1..], &mut dprime)?,
            _ => return parse_err(l, "expected `prime`, `dprime` or `end`"),
        }
    }
    TForm::with_degree(prime, dprime, degree).or_else(|e| parse_err(l0, e.to_string()))
}

/// Parses a single scalar form.
pub fn parse_form(s: &str) -> Result<ScalarForm> {
    let mut lines = Lines::new(s);
    let (l, t) = lines.expect()?;
    let h = header(l, t, "form")?;
    let (n, cutoff) = dims(l, &h)?;
    let f = form_body(&mut lines, n, cutoff)?;
    lines.finish()?;
    Ok(f)
}

/// Parses a single slot.
pub fn parse_tform(s: &str) -> Result<TForm> {
    let mut lines = Lines::new(s);
    let (l, t) = lines.expect()?;
    let f = tform_body(&mut lines, l, t)?;
    lines.finish()?;
    Ok(f)
}

/// Parses a bar chain.
pub fn parse_chain(s: &str) -> Result<BarChain> {
    let mut lines = Lines::new(s);
    let (l0, t) = lines.expect()?;
    let h = header(l0, t, "chain")?;
    let cyclic: bool = take(l0, &h, "cyclic")?;
    let mut chain = BarChain::zero();
    chain.cyclic = cyclic;
    let mut base: Option<usize> = None;
    loop {
        let (l, t) = lines.expect()?;
        if t == "end" {
            break;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        let [kw, re, im] = toks.as_slice() else {
            return parse_err(l, "expected `word <re> <im>` or `end`");
        };
        if *kw != "word" {
            return parse_err(l, "expected `word`");
        }
        let c = C64::new(num(l, re)?, num(l, im)?);
        let mut word = Vec::new();
        loop {
            let (l, t) = lines.expect()?;
            if t == "endword" {
                break;
            }
            if word.len() == MAX_WORD_LEN {
                return parse_err(l, format!("word longer than {MAX_WORD_LEN}"));
            }
            let slot = tform_body(&mut lines, l, t)?;
            if *base.get_or_insert(slot.n()) != slot.n() {
                return parse_err(l, "slots live on different tori");
            }
            word.push(slot);
        }
        chain.push(c, word);
    }
    lines.finish()?;
    Ok(chain)
}

fn write_terms(out: &mut String, prefix: &str, f: &ScalarForm) {
    for (&(mask, k), c) in &f.terms {
        let idx: Vec<String> = (0..f.n).filter(|i| mask & (1 << i) != 0).map(|i| (i + 1).to_string()).collect();
        let idx = if idx.is_empty() { "-".to_string() } else { idx.join(",") };
        let k: Vec<String> = k[..f.n].iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{prefix}{idx} {} {:?} {:?}", k.join(","), c.re, c.im);
    }
}

pub fn format_form(f: &ScalarForm) -> String {
    let mut out = format!("form n={} cutoff={}\n", f.n, f.cutoff);
    write_terms(&mut out, "", f);
    out.push_str("end\n");
    out
}

pub fn format_tform(t: &TForm) -> String {
    let cutoff = t.prime.cutoff.max(t.dprime.cutoff);
    let mut out = format!("tform n={} cutoff={} degree={}\n", t.n(), cutoff, t.degree);
    write_terms(&mut out, "prime ", &t.prime);
    write_terms(&mut out, "dprime ", &t.dprime);
    out.push_str("end\n");
    out
}

pub fn format_chain(c: &BarChain) -> String {
    let mut out = format!("chain cyclic={}\n", c.cyclic);
    for (coef, w) in &c.terms {
        let _ = writeln!(out, "word {:?} {:?}", coef.re, coef.im);
        for t in w {
            out.push_str(&format_tform(t));
        }
        out.push_str("endword\n");
    }
    out.push_str("end\n");
    out
}
