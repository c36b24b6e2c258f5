//! Text syntax for field descriptors and element literals.
//!
//! Descriptors: `Fp:7`, `Fq:3^2/[2,2,1]`, `Q`, `RatFunc(Fp:5,u)`,
//! `QuadExt(Q,-1)`, `Ext(Q,[2,0,1])`, nested freely.
//!
//! Element literals are arithmetic expressions with `+ - * / ^`, integers,
//! parentheses, the generator names (`w` for `Fq`, the variable of a
//! rational function field, `x` for `Ext`), coefficient vectors `[..]` for
//! `Fq`/`Ext`, and pairs `(a,b)` meaning `a + b·√ε` for `QuadExt`.

use num_bigint::BigInt;

use super::poly::{self, Poly};
use super::{frac, Elem, Field};
use crate::error::{Error, Result};

pub fn format_field(k: &Field) -> String {
    match k {
        Field::Fp(p) => format!("Fp:{p}"),
        Field::Fq { p, k, modulus } => {
            let m: Vec<String> = modulus.iter().map(|c| c.to_string()).collect();
            format!("Fq:{p}^{k}/[{}]", m.join(","))
        }
        Field::Q => "Q".into(),
        Field::RatFunc { base, var } => format!("RatFunc({},{var})", format_field(base)),
        Field::QuadExt { base, eps } => {
            format!("QuadExt({},{})", format_field(base), format_elem(base, eps))
        }
        Field::AlgExt { base, modulus } => {
            let cs: Vec<String> = modulus.coeffs().iter().map(|c| format_elem(base, c)).collect();
            format!("Ext({},[{}])", format_field(base), cs.join(","))
        }
    }
}

/// Splits `s` at top-level commas.
pub(crate) fn split_top(s: &str) -> Vec<&str> {
    let mut depth = 0i32;
    let mut parts = Vec::new();
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn call_args<'a>(s: &'a str, head: &str) -> Option<Vec<&'a str>> {
    let rest = s.strip_prefix(head)?.strip_prefix('(')?.strip_suffix(')')?;
    Some(split_top(rest).into_iter().map(str::trim).collect())
}

fn parse_u64(s: &str, what: &str) -> Result<u64> {
    s.trim()
        .parse()
        .map_err(|_| Error::parse(format!("invalid {what}: {s:?}")))
}

pub fn parse_field(s: &str) -> Result<Field> {
    let s = s.trim();
    if s == "Q" {
        return Ok(Field::Q);
    }
    if let Some(p) = s.strip_prefix("Fp:") {
        return Field::fp(parse_u64(p, "prime")?);
    }
    if let Some(rest) = s.strip_prefix("Fq:") {
        let (pk, modulus) = match rest.split_once('/') {
            Some((a, b)) => (a, Some(b)),
            None => (rest, None),
        };
        let (p, k) = match pk.split_once('^') {
            Some((p, k)) => (parse_u64(p, "prime")?, parse_u64(k, "degree")? as usize),
            None => {
                let q = parse_u64(pk, "field size")?;
                super::integer::prime_power(q)
                    .map(|(p, k)| (p, k))
                    .ok_or_else(|| Error::parse(format!("{q} is not a prime power")))?
            }
        };
        return match modulus {
            None => Field::fq_default(p, k),
            Some(m) => {
                let inner = m
                    .trim()
                    .strip_prefix('[')
                    .and_then(|m| m.strip_suffix(']'))
                    .ok_or_else(|| Error::parse("Fq modulus must be a bracketed list"))?;
                let cs = inner
                    .split(',')
                    .map(|c| parse_u64(c, "modulus coefficient"))
                    .collect::<Result<Vec<_>>>()?;
                if cs.len() != k + 1 {
                    return Err(Error::parse(format!(
                        "Fq modulus has degree {} but the exponent is {k}",
                        cs.len().saturating_sub(1)
                    )));
                }
                Field::fq(p, cs)
            }
        };
    }
    if let Some(args) = call_args(s, "RatFunc") {
        if args.len() != 2 || !is_ident(args[1]) {
            return Err(Error::parse(format!("malformed RatFunc descriptor: {s}")));
        }
        return Ok(Field::rat_func(parse_field(args[0])?, args[1]));
    }
    if let Some(args) = call_args(s, "QuadExt") {
        if args.len() != 2 {
            return Err(Error::parse(format!("malformed QuadExt descriptor: {s}")));
        }
        let base = parse_field(args[0])?;
        let eps = parse_elem(&base, args[1])?;
        return Field::quad_ext(base, eps);
    }
    if let Some(args) = call_args(s, "Ext") {
        if args.len() != 2 {
            return Err(Error::parse(format!("malformed Ext descriptor: {s}")));
        }
        let base = parse_field(args[0])?;
        let inner = args[1]
            .strip_prefix('[')
            .and_then(|m| m.strip_suffix(']'))
            .ok_or_else(|| Error::parse("Ext modulus must be a bracketed list"))?;
        let cs = split_top(inner)
            .into_iter()
            .map(|c| parse_elem(&base, c))
            .collect::<Result<Vec<_>>>()?;
        return Field::alg_ext(base, Poly::new(cs));
    }
    Err(Error::parse(format!("unknown field descriptor: {s:?}")))
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Whether a rendered element has no top-level sum, so that it can be used
/// as a coefficient without parentheses.
fn is_atomic(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    let mut depth = 0i32;
    for ch in body.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            '+' | '-' if depth == 0 => return false,
            _ => {}
        }
    }
    !body.is_empty()
}

/// Renders a polynomial in the variable `var`.
pub fn format_poly(base: &Field, p: &Poly, var: &str) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mut cs = format_elem(base, c);
        let negative = cs.starts_with('-') && is_atomic(&cs);
        if negative {
            cs.remove(0);
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        let term = if i == 0 {
            cs
        } else if cs == "1" {
            mono
        } else if is_atomic(&cs) {
            format!("{cs}*{mono}")
        } else {
            format!("({cs})*{mono}")
        };
        if negative {
            out.push('-');
        } else if !out.is_empty() {
            out.push('+');
        }
        out.push_str(&term);
    }
    out
}

pub fn format_elem(k: &Field, a: &Elem) -> String {
    match (k, a) {
        (Field::Fp(_), Elem::Int(v)) => v.to_string(),
        (Field::Fq { .. }, Elem::Vec(v)) => {
            let fp = Field::Fp(k.characteristic());
            let p = Poly::new(v.iter().map(|c| Elem::Int(*c)).collect());
            format_poly(&fp, &p, "w")
        }
        (Field::Q, Elem::Rat(r)) => {
            if r.is_integer() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        }
        (Field::RatFunc { base, var }, Elem::Frac(n, d)) => {
            let ns = format_poly(base, n, var);
            if d.degree() == Some(0) {
                ns
            } else {
                format!("({ns})/({})", format_poly(base, d, var))
            }
        }
        (Field::QuadExt { base, .. }, Elem::Pair(x, y)) => {
            format!("({},{})", format_elem(base, x), format_elem(base, y))
        }
        (Field::AlgExt { base, modulus }, Elem::Res(r)) => {
            let d = modulus.degree().unwrap();
            let cs: Vec<String> = (0..d).map(|i| format_elem(base, &r.coeff(base, i))).collect();
            format!("[{}]", cs.join(","))
        }
        _ => format!("{a:?}"),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            out.push(Tok::Int(digits.parse().unwrap()));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()[],".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::parse(format!("unexpected character {c:?} in element literal")));
        }
    }
    Ok(out)
}

struct ElemParser {
    toks: Vec<Tok>,
    pos: usize,
}

impl ElemParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::parse(format!("expected {c:?} in element literal")))
        }
    }

    fn expr(&mut self, k: &Field) -> Result<Elem> {
        let mut acc = if self.eat('-') {
            k.neg(&self.term(k)?)
        } else {
            self.term(k)?
        };
        loop {
            if self.eat('+') {
                acc = k.add(&acc, &self.term(k)?);
            } else if self.eat('-') {
                acc = k.sub(&acc, &self.term(k)?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self, k: &Field) -> Result<Elem> {
        let mut acc = self.power(k)?;
        loop {
            if self.eat('*') {
                acc = k.mul(&acc, &self.power(k)?);
            } else if self.eat('/') {
                acc = k.div(&acc, &self.power(k)?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self, k: &Field) -> Result<Elem> {
        let b = self.atom(k)?;
        if self.eat('^') {
            let neg = self.eat('-');
            let e = match self.peek() {
                Some(Tok::Int(n)) => n.clone(),
                _ => return Err(Error::parse("exponent must be an integer")),
            };
            self.pos += 1;
            let e = e.to_biguint().unwrap();
            if neg {
                return Ok(k.pow(&k.inv(&b)?, &e));
            }
            return Ok(k.pow(&b, &e));
        }
        Ok(b)
    }

    fn atom(&mut self, k: &Field) -> Result<Elem> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(k.from_bigint(&n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                generator(k, &name)
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let save = self.pos;
                let first = self.expr(k);
                if first.is_ok() && self.eat(')') {
                    return first;
                }
                if let Some(Field::QuadExt { base, .. }) = quad_subfield(k) {
                    self.pos = save;
                    let x = self.expr(base)?;
                    self.expect(',')?;
                    let y = self.expr(base)?;
                    self.expect(')')?;
                    let pair = Elem::Pair(Box::new(x), Box::new(y));
                    return Ok(lift(k, quad_subfield(k).unwrap(), pair));
                }
                first?;
                Err(Error::parse("expected ')' in element literal"))
            }
            Some(Tok::Sym('[')) => {
                self.pos += 1;
                let mut items = Vec::new();
                if !self.eat(']') {
                    loop {
                        items.push(self.toks_coeff(k)?);
                        if self.eat(']') {
                            break;
                        }
                        self.expect(',')?;
                    }
                }
                coeff_vector(k, items)
            }
            _ => Err(Error::parse("unexpected end or symbol in element literal")),
        }
    }

    /// A coefficient inside `[..]`: an element of the coefficient field.
    fn toks_coeff(&mut self, k: &Field) -> Result<Elem> {
        match k {
            Field::Fq { p, .. } => self.expr(&Field::Fp(*p)),
            Field::AlgExt { base, .. } => self.expr(base),
            Field::RatFunc { base, .. } | Field::QuadExt { base, .. } => self.toks_coeff(base),
            _ => Err(Error::parse(format!("coefficient vectors are not elements of {k}"))),
        }
    }
}

/// The nearest quadratic extension among `k` and its coefficient fields.
fn quad_subfield(k: &Field) -> Option<&Field> {
    match k {
        Field::QuadExt { .. } => Some(k),
        Field::RatFunc { base, .. } | Field::AlgExt { base, .. } => quad_subfield(base),
        _ => None,
    }
}

/// Embeds an element of the subfield `sub` of `k` into `k`.
fn lift(k: &Field, sub: &Field, e: Elem) -> Elem {
    if k == sub {
        e
    } else {
        k.embed(&lift(k.base().unwrap(), sub, e))
    }
}

fn coeff_vector(k: &Field, items: Vec<Elem>) -> Result<Elem> {
    match k {
        Field::Fq { k: deg, .. } => {
            if items.len() > *deg {
                return Err(Error::parse("too many coefficients for Fq element"));
            }
            let mut v: Vec<u64> = items
                .iter()
                .map(|e| match e {
                    Elem::Int(x) => *x,
                    _ => unreachable!(),
                })
                .collect();
            v.resize(*deg, 0);
            Ok(Elem::Vec(v))
        }
        Field::AlgExt { base, modulus } => {
            let p = Poly::new(items);
            Ok(Elem::Res(poly::rem(base, &p, modulus)))
        }
        Field::RatFunc { base, .. } | Field::QuadExt { base, .. } => {
            Ok(k.embed(&coeff_vector(base, items)?))
        }
        _ => Err(Error::parse(format!("coefficient vectors are not elements of {k}"))),
    }
}

/// The element named `name` in `k`: a generator of `k` or of a subfield.
fn generator(k: &Field, name: &str) -> Result<Elem> {
    match k {
        Field::RatFunc { base, var } => {
            if name == var {
                frac(base, Poly::x(base), Poly::one(base))
            } else {
                Ok(k.embed(&generator(base, name)?))
            }
        }
        Field::Fq { k: deg, .. } if name == "w" => {
            let mut v = vec![0; *deg];
            v[1] = 1;
            Ok(Elem::Vec(v))
        }
        Field::AlgExt { base, modulus } => {
            if name == "x" {
                Ok(Elem::Res(poly::rem(base, &Poly::x(base), modulus)))
            } else {
                Ok(k.embed(&generator(base, name)?))
            }
        }
        Field::QuadExt { base, .. } => {
            if name == "sqrt" || name == "s" {
                Ok(Elem::Pair(Box::new(base.zero()), Box::new(base.one())))
            } else {
                Ok(k.embed(&generator(base, name)?))
            }
        }
        _ => Err(Error::parse(format!("unknown symbol {name:?} in {k}"))),
    }
}

pub fn parse_elem(k: &Field, s: &str) -> Result<Elem> {
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err(Error::parse("empty element literal"));
    }
    let mut p = ElemParser { toks, pos: 0 };
    let e = p.expr(k)?;
    if p.pos != p.toks.len() {
        return Err(Error::parse(format!("trailing input in element literal {s:?}")));
    }
    Ok(e)
}

/// Parses a comma-separated list of elements; commas nested in brackets do
/// not split.
pub fn parse_elem_list(k: &Field, s: &str) -> Result<Vec<Elem>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    split_top(s).into_iter().map(|p| parse_elem(k, p)).collect()
}

/// Parses a plain rational number such as `-3/4`.
pub fn parse_rational(s: &str) -> Result<num_rational::BigRational> {
    match parse_elem(&Field::Q, s)? {
        Elem::Rat(r) => Ok(r),
        _ => unreachable!(),
    }
}

/// Renders a rational number.
pub fn format_rational(r: &num_rational::BigRational) -> String {
    format_elem(&Field::Q, &Elem::Rat(r.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_round_trips() {
        for s in [
            "Fp:7",
            "Fq:3^2/[2,2,1]",
            "Q",
            "RatFunc(Fp:5,u)",
            "QuadExt(Q,-1)",
            "RatFunc(QuadExt(Fp:7,3),t)",
            "Ext(Q,[-2,0,0,1])",
        ] {
            let k = parse_field(s).unwrap();
            assert_eq!(format_field(&k), s);
        }
    }

    #[test]
    fn bad_descriptors() {
        assert!(parse_field("Fp:8").is_err());
        assert!(parse_field("Fq:3^2/[1,0,0,1]").is_err());
        assert!(parse_field("Frob").is_err());
        assert!(parse_field("QuadExt(Q,9)").is_err());
    }

    #[test]
    fn element_round_trips() {
        let cases = [
            ("Fp:7", "3"),
            ("Q", "-5/6"),
            ("Fq:2^2/[1,1,1]", "w+1"),
            ("RatFunc(Fp:5,u)", "u^2+4*u+1"),
            ("RatFunc(Fp:3,t)", "(t)/(t^2+2*t+1)"),
            ("RatFunc(Q,t)", "(-1/2*t^2+t-3)/(t+1/3)"),
            ("QuadExt(Q,-1)", "(-1/2,3)"),
            ("RatFunc(Fq:3^2/[1,0,1],t)", "(w+1)*t+w"),
            ("RatFunc(QuadExt(Fp:7,3),t)", "(1,2)*t+(0,1)"),
        ];
        for (f, e) in cases {
            let k = parse_field(f).unwrap();
            let a = parse_elem(&k, e).unwrap();
            assert_eq!(format_elem(&k, &a), e, "in {f}");
            assert_eq!(parse_elem(&k, &format_elem(&k, &a)).unwrap(), a);
        }
    }

    #[test]
    fn expressions_evaluate() {
        let k = parse_field("RatFunc(Fp:3,t)").unwrap();
        let a = parse_elem(&k, "t/(t+1)^2").unwrap();
        let b = parse_elem(&k, "t*(t+1)^-2").unwrap();
        assert_eq!(a, b);
        let q = parse_field("Fp:7").unwrap();
        assert_eq!(parse_elem(&q, "1/3").unwrap(), Elem::Int(5));
        assert!(parse_elem(&q, "1/0").is_err());
    }
}
