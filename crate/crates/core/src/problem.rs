//! Problem files.
//!
//! ```text
//! # the cusp
//! vars x y;
//! pair gens: x^2 + y^3; b: 2;
//! divisors: x[a=0, D];
//! points: (0, 0), (1, -1);
//! ```
//!
//! Statements end with `;` and `#` starts a comment. Instead of a pair, an
//! algebra may be given as `algebra gens: (x^2 + y^3, 2), (x*y, 1);`.

use crate::basicobj::MarkedObject;
use crate::blowup::{Chart, DivisorRecord};
use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::parse::{line_col, parse_poly_at, parse_rat};
use crate::poly::{fmt_rat, PointQ, Poly, Rat};
use crate::rees::{from_pair, Pair, ReesAlgebra};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProblemBody {
    Pair(Pair),
    Algebra(ReesAlgebra),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorDecl {
    pub var: usize,
    /// Declared exponent; checked against the algebra.
    pub a: Option<Rat>,
    pub in_d: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub names: Vec<String>,
    pub body: ProblemBody,
    pub divisors: Vec<DivisorDecl>,
    pub points: Vec<PointQ>,
}

/// A statement and the byte offset where it starts.
#[derive(Clone, Copy)]
struct Stmt<'a> {
    text: &'a str,
    at: usize,
}

impl<'a> Stmt<'a> {
    fn trimmed(self) -> Stmt<'a> {
        let lead = self.text.len() - self.text.trim_start().len();
        Stmt { text: self.text.trim(), at: self.at + lead }
    }

    /// The rest after a leading keyword, if present.
    fn strip(self, key: &str) -> Option<Stmt<'a>> {
        let rest = self.text.strip_prefix(key)?;
        Some(Stmt { text: rest, at: self.at + key.len() }.trimmed())
    }
}

fn err(whole: &str, at: usize, msg: impl Into<String>) -> Error {
    let (line, col) = line_col(whole, at);
    Error::Parse { line, col, msg: msg.into() }
}

/// Splits on `sep` outside parentheses and brackets.
fn split_top<'a>(s: &Stmt<'a>, sep: u8) -> Vec<Stmt<'a>> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, b) in s.text.bytes().enumerate() {
        match b {
            b'(' | b'[' => depth += 1,
            b')' | b']' => depth -= 1,
            _ if b == sep && depth == 0 => {
                out.push(Stmt { text: &s.text[start..i], at: s.at + start }.trimmed());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(Stmt { text: &s.text[start..], at: s.at + start }.trimmed());
    out
}

fn parenthesized<'a>(whole: &str, s: &Stmt<'a>) -> Result<Stmt<'a>> {
    let inner = s
        .text
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| err(whole, s.at, "expected a parenthesized tuple"))?;
    Ok(Stmt { text: inner, at: s.at + 1 }.trimmed())
}

impl Problem {
    pub fn parse(text: &str) -> Result<Problem> {
        // blank out comments, keeping offsets
        let clean: String = text
            .lines()
            .map(|l| match l.find('#') {
                Some(i) => format!("{}{}", &l[..i], " ".repeat(l.len() - i)),
                None => l.to_string(),
            })
            .collect::<Vec<_>>()
            .join("\n");
        let whole = clean.as_str();
        let mut names: Option<Vec<String>> = None;
        let mut pair_gens: Option<(Vec<Poly>, usize)> = None;
        let mut b: Option<u32> = None;
        let mut algebra: Option<ReesAlgebra> = None;
        let mut divisors = Vec::new();
        let mut points = Vec::new();
        let all = Stmt { text: whole, at: 0 };
        let stmts = split_top(&all, b';');
        let last = stmts.len() - 1;
        for (k, st) in stmts.into_iter().enumerate() {
            if st.text.is_empty() {
                continue;
            }
            if k == last {
                return Err(err(whole, st.at + st.text.len(), "missing ';'"));
            }
            let need_vars = |at: usize| names.clone().ok_or_else(|| err(whole, at, "'vars' must come first"));
            if let Some(rest) = st.strip("vars") {
                let list: Vec<String> =
                    rest.text.split(|c: char| c == ',' || c.is_whitespace()).filter(|w| !w.is_empty()).map(String::from).collect();
                if list.is_empty() {
                    return Err(err(whole, rest.at, "no variables declared"));
                }
                for (i, n) in list.iter().enumerate() {
                    if !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                        || !n.starts_with(|c: char| c.is_ascii_alphabetic())
                        || list[..i].contains(n)
                    {
                        return Err(err(whole, rest.at, format!("bad variable name '{n}'")));
                    }
                }
                names = Some(list);
            } else if let Some(rest) = st.strip("pair").and_then(|r| r.strip("gens")).and_then(|r| r.strip(":")) {
                let vars = need_vars(st.at)?;
                let gens = split_top(&rest, b',')
                    .iter()
                    .map(|g| parse_poly_at(g.text, &vars, whole, g.at))
                    .collect::<Result<Vec<_>>>()?;
                pair_gens = Some((gens, st.at));
            } else if let Some(rest) = st.strip("b").and_then(|r| r.strip(":")) {
                let v: u32 = rest.text.parse().map_err(|_| err(whole, rest.at, "b must be a positive integer"))?;
                if v == 0 {
                    return Err(err(whole, rest.at, "b must be a positive integer"));
                }
                b = Some(v);
            } else if let Some(rest) = st.strip("algebra").and_then(|r| r.strip("gens")).and_then(|r| r.strip(":")) {
                let vars = need_vars(st.at)?;
                let mut gens = Vec::new();
                for item in split_top(&rest, b',') {
                    let inner = parenthesized(whole, &item)?;
                    let parts = split_top(&inner, b',');
                    if parts.len() != 2 {
                        return Err(err(whole, item.at, "expected (polynomial, weight)"));
                    }
                    let f = parse_poly_at(parts[0].text, &vars, whole, parts[0].at)?;
                    let n: u32 = parts[1].text.parse().ok().filter(|&n| n > 0).ok_or_else(|| err(whole, parts[1].at, "weight must be a positive integer"))?;
                    gens.push((f, n));
                }
                algebra = Some(ReesAlgebra::new(vars.len(), gens).map_err(|e| err(whole, st.at, e.to_string()))?);
            } else if let Some(rest) = st.strip("divisors").and_then(|r| r.strip(":")) {
                let vars = need_vars(st.at)?;
                for item in split_top(&rest, b',') {
                    let (name, attrs) = match item.text.find('[') {
                        Some(i) => {
                            let body = item.text[i + 1..]
                                .strip_suffix(']')
                                .ok_or_else(|| err(whole, item.at + i, "unclosed '['"))?;
                            (item.text[..i].trim(), Some(Stmt { text: body, at: item.at + i + 1 }))
                        }
                        None => (item.text, None),
                    };
                    let var = vars
                        .iter()
                        .position(|v| v == name)
                        .ok_or_else(|| err(whole, item.at, format!("unknown variable '{name}'")))?;
                    if divisors.iter().any(|d: &DivisorDecl| d.var == var) {
                        return Err(err(whole, item.at, format!("divisor '{name}' declared twice")));
                    }
                    let mut decl = DivisorDecl { var, a: None, in_d: false };
                    for attr in attrs.iter().flat_map(|a| split_top(a, b',')) {
                        if attr.text == "D" {
                            decl.in_d = true;
                        } else if let Some(v) = attr.strip("a").and_then(|r| r.strip("=")) {
                            decl.a = Some(parse_rat(v.text).ok_or_else(|| err(whole, v.at, "bad rational"))?);
                        } else if !attr.text.is_empty() {
                            return Err(err(whole, attr.at, format!("unknown divisor attribute '{}'", attr.text)));
                        }
                    }
                    divisors.push(decl);
                }
            } else if let Some(rest) = st.strip("points").and_then(|r| r.strip(":")) {
                let vars = need_vars(st.at)?;
                for item in split_top(&rest, b',') {
                    let inner = parenthesized(whole, &item)?;
                    let p = split_top(&inner, b',')
                        .iter()
                        .map(|c| parse_rat(c.text).ok_or_else(|| err(whole, c.at, "bad rational coordinate")))
                        .collect::<Result<Vec<_>>>()?;
                    if p.len() != vars.len() {
                        return Err(err(whole, item.at, format!("point needs {} coordinates", vars.len())));
                    }
                    points.push(p);
                }
            } else {
                return Err(err(whole, st.at, "unknown statement"));
            }
        }
        let names = names.ok_or_else(|| err(whole, 0, "missing 'vars'"))?;
        let body = match (pair_gens, b, algebra) {
            (Some((gens, at)), Some(b), None) => {
                let ideal = Ideal::new(names.len(), gens).map_err(|e| err(whole, at, e.to_string()))?;
                if ideal.is_zero() {
                    return Err(err(whole, at, "a pair needs a nonzero ideal"));
                }
                ProblemBody::Pair(Pair { ideal, b })
            }
            (Some((_, at)), None, None) => return Err(err(whole, at, "pair without 'b'")),
            (None, None, Some(g)) => ProblemBody::Algebra(g),
            (None, Some(_), Some(_)) | (None, Some(_), None) => return Err(err(whole, 0, "'b' without a pair")),
            (None, None, None) => return Err(err(whole, whole.len(), "missing 'pair' or 'algebra'")),
            (Some((_, at)), _, Some(_)) => return Err(err(whole, at, "both a pair and an algebra")),
        };
        Ok(Problem { names, body, divisors, points })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn algebra(&self) -> Result<ReesAlgebra> {
        match &self.body {
            ProblemBody::Pair(p) => from_pair(p),
            ProblemBody::Algebra(g) => Ok(g.clone()),
        }
    }

    /// The marked object on the root chart. Declared exponents must agree
    /// with the ones the algebra determines.
    pub fn marked(&self) -> Result<MarkedObject> {
        let mut chart = Chart::root(self.names.clone());
        chart.divisors = self
            .divisors
            .iter()
            .enumerate()
            .map(|(label, d)| DivisorRecord { var: d.var, label, a: Rat::from_integer(0.into()), in_d: d.in_d })
            .collect();
        chart.divisors.sort_by_key(|h| h.var);
        let m = MarkedObject::new(self.algebra()?, chart)?;
        for d in &self.divisors {
            let got = &m.chart().divisor_on(d.var).expect("declared").a;
            if let Some(a) = &d.a {
                if a != got {
                    return Err(Error::Parse {
                        line: 0,
                        col: 0,
                        msg: format!("divisor {} declared a={} but the algebra gives {}", self.names[d.var], fmt_rat(a), fmt_rat(got)),
                    });
                }
            }
        }
        Ok(m)
    }

    /// The problem file of a chart: its algebra and divisors. Units of the
    /// chart are not representable and are dropped.
    pub fn from_marked(m: &MarkedObject) -> Problem {
        let chart = m.chart();
        Problem {
            names: chart.names.clone(),
            body: ProblemBody::Algebra(m.algebra().clone()),
            divisors: chart
                .divisors
                .iter()
                .map(|h| DivisorDecl { var: h.var, a: Some(h.a.clone()), in_d: h.in_d })
                .collect(),
            points: Vec::new(),
        }
    }

    /// Canonical text; parses back to an identical problem.
    pub fn dump(&self) -> String {
        let names = &self.names;
        let mut out = format!("vars {};\n", names.join(" "));
        match &self.body {
            ProblemBody::Pair(p) => {
                let gens: Vec<String> = p.ideal.gens().iter().map(|g| g.display_with(names).to_string()).collect();
                out += &format!("pair gens: {}; b: {};\n", gens.join(", "), p.b);
            }
            ProblemBody::Algebra(g) => {
                let gens: Vec<String> =
                    g.gens().iter().map(|(f, n)| format!("({}, {n})", f.display_with(names))).collect();
                out += &format!("algebra gens: {};\n", gens.join(", "));
            }
        }
        if !self.divisors.is_empty() {
            let ds: Vec<String> = self
                .divisors
                .iter()
                .map(|d| {
                    let mut attrs = Vec::new();
                    if let Some(a) = &d.a {
                        attrs.push(format!("a={}", fmt_rat(a)));
                    }
                    if d.in_d {
                        attrs.push("D".to_string());
                    }
                    format!("{}[{}]", names[d.var], attrs.join(", "))
                })
                .collect();
            out += &format!("divisors: {};\n", ds.join(", "));
        }
        if !self.points.is_empty() {
            let ps: Vec<String> = self
                .points
                .iter()
                .map(|p| format!("({})", p.iter().map(fmt_rat).collect::<Vec<_>>().join(", ")))
                .collect();
            out += &format!("points: {};\n", ps.join(", "));
        }
        out
    }
}
