//! S-expression reader for terms and formulas.

use super::{Formula, SetRef, Term};
use crate::error::{Error, Result};

#[derive(Debug)]
enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    col: usize,
}

impl Sexp {
    fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }
}

fn err(pos: Pos, msg: impl Into<String>) -> Error {
    Error::Syntax {
        line: pos.line,
        col: pos.col,
        msg: msg.into(),
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Reader<'_> {
    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Sexp> {
        self.skip_ws();
        let start = self.pos();
        match self.chars.peek() {
            None => Err(err(start, "unexpected end of input")),
            Some(')') => Err(err(start, "unexpected ')'")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.chars.peek() {
                        None => return Err(err(start, "unclosed '('")),
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, start));
                        }
                        _ => items.push(self.read()?),
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Sexp::Atom(s, start))
            }
        }
    }
}

fn read_one(text: &str) -> Result<Sexp> {
    let mut r = Reader {
        chars: text.chars().peekable(),
        line: 1,
        col: 1,
    };
    let e = r.read()?;
    r.skip_ws();
    if r.chars.peek().is_some() {
        return Err(err(r.pos(), "trailing input after expression"));
    }
    Ok(e)
}

fn is_var_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

fn head(items: &[Sexp]) -> Option<&str> {
    match items.first() {
        Some(Sexp::Atom(h, _)) => Some(h.as_str()),
        _ => None,
    }
}

fn arity(items: &[Sexp], n: usize, pos: Pos, what: &str) -> Result<()> {
    if items.len() != n + 1 {
        return Err(err(
            pos,
            format!("{what} expects {n} argument(s), found {}", items.len() - 1),
        ));
    }
    Ok(())
}

fn to_term(e: &Sexp) -> Result<Term> {
    match e {
        Sexp::Atom(a, pos) => match a.as_str() {
            "0" => Ok(Term::Zero),
            "1" => Ok(Term::One),
            _ if is_var_name(a) => Ok(Term::Var(a.clone())),
            _ => Err(err(*pos, format!("invalid variable name {a:?}"))),
        },
        Sexp::List(items, pos) => {
            let h = head(items).ok_or_else(|| err(*pos, "expected a term operator"))?;
            match h {
                "+" | "*" => {
                    arity(items, 2, *pos, h)?;
                    let a = Box::new(to_term(&items[1])?);
                    let b = Box::new(to_term(&items[2])?);
                    Ok(if h == "+" { Term::Add(a, b) } else { Term::Mul(a, b) })
                }
                "-" => {
                    arity(items, 1, *pos, h)?;
                    Ok(Term::Neg(Box::new(to_term(&items[1])?)))
                }
                "=" | "and" | "or" | "not" | "imp" | "exists" | "forall" | "exists-rel"
                | "forall-rel" | "macro" => {
                    Err(err(*pos, format!("expected a term, found formula head {h:?}")))
                }
                _ => Err(err(*pos, format!("unknown term operator {h:?}"))),
            }
        }
    }
}

fn to_vars(e: &Sexp) -> Result<Vec<String>> {
    match e {
        Sexp::List(items, pos) => {
            if items.is_empty() {
                return Err(err(*pos, "empty variable list"));
            }
            items
                .iter()
                .map(|v| match v {
                    Sexp::Atom(a, p) if is_var_name(a) && a != "0" && a != "1" => Ok(a.clone()),
                    other => Err(err(other.pos(), "expected a variable name")),
                })
                .collect()
        }
        Sexp::Atom(_, pos) => Err(err(*pos, "expected a parenthesized variable list")),
    }
}

fn to_set(e: &Sexp) -> Result<SetRef> {
    match e {
        Sexp::List(items, pos) => {
            let h = head(items).ok_or_else(|| err(*pos, "expected a set tag"))?;
            arity(items, 1, *pos, h)?;
            match h {
                "sigma" => Ok(SetRef::Sigma(to_term(&items[1])?)),
                "udelta" => Ok(SetRef::Udelta(to_term(&items[1])?)),
                "ubullet" => Ok(SetRef::Ubullet(to_term(&items[1])?)),
                "delta-u0" => match &items[1] {
                    Sexp::Atom(d, _) => Ok(SetRef::DeltaU0(d.clone())),
                    other => Err(err(other.pos(), "delta-u0 expects a descriptor atom")),
                },
                _ => Err(err(*pos, format!("unknown set tag {h:?}"))),
            }
        }
        Sexp::Atom(a, pos) => Err(err(*pos, format!("expected a set, found {a:?}"))),
    }
}

fn to_formula(e: &Sexp) -> Result<Formula> {
    let (items, pos) = match e {
        Sexp::List(items, pos) => (items, *pos),
        Sexp::Atom(a, pos) => {
            return Err(err(*pos, format!("expected a formula, found term {a:?}")));
        }
    };
    let h = head(items).ok_or_else(|| err(pos, "expected a formula operator"))?;
    let sub = |i: usize| to_formula(&items[i]).map(Box::new);
    match h {
        "=" => {
            arity(items, 2, pos, h)?;
            Ok(Formula::Eq(to_term(&items[1])?, to_term(&items[2])?))
        }
        "and" | "or" | "imp" => {
            arity(items, 2, pos, h)?;
            let (a, b) = (sub(1)?, sub(2)?);
            Ok(match h {
                "and" => Formula::And(a, b),
                "or" => Formula::Or(a, b),
                _ => Formula::Imp(a, b),
            })
        }
        "not" => {
            arity(items, 1, pos, h)?;
            Ok(Formula::Not(sub(1)?))
        }
        "exists" | "forall" => {
            arity(items, 2, pos, h)?;
            let vars = to_vars(&items[1])?;
            let body = sub(2)?;
            Ok(if h == "exists" {
                Formula::Exists(vars, body)
            } else {
                Formula::Forall(vars, body)
            })
        }
        "exists-rel" | "forall-rel" => {
            arity(items, 3, pos, h)?;
            let set = to_set(&items[1])?;
            let vars = to_vars(&items[2])?;
            if vars.len() != set.arity() {
                return Err(err(
                    items[2].pos(),
                    format!("set binds {} variable(s), found {}", set.arity(), vars.len()),
                ));
            }
            let body = sub(3)?;
            Ok(if h == "exists-rel" {
                Formula::ExistsRel(set, vars, body)
            } else {
                Formula::ForallRel(set, vars, body)
            })
        }
        "macro" => {
            let name = match items.get(1) {
                Some(Sexp::Atom(n, _)) if is_var_name(n) => n.clone(),
                _ => return Err(err(pos, "macro expects a name")),
            };
            let args = items[2..].iter().map(to_term).collect::<Result<Vec<_>>>()?;
            Ok(Formula::Macro(name, args))
        }
        "+" | "*" | "-" => Err(err(pos, format!("expected a formula, found term head {h:?}"))),
        _ => Err(err(pos, format!("unknown formula head {h:?}"))),
    }
}

/// Parses a formula in S-expression syntax.
pub fn parse_formula(text: &str) -> Result<Formula> {
    to_formula(&read_one(text)?)
}

/// Parses a term in S-expression syntax.
pub fn parse_term(text: &str) -> Result<Term> {
    to_term(&read_one(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::*;

    #[test]
    fn parses_existential() {
        let f = parse_formula("(exists (x) (= (* x x) (- 1)))").unwrap();
        assert_eq!(f, exists(&["x"], eq(mul(var("x"), var("x")), neg(one()))));
    }

    #[test]
    fn rejects_terms_as_formulas() {
        let e = parse_formula("(and 0 1)").unwrap_err();
        assert!(matches!(e, Error::Syntax { line: 1, col: 6, .. }), "{e:?}");
    }

    #[test]
    fn relativized_quantifier() {
        let f = parse_formula("(forall-rel (sigma d) (a) (= a a))").unwrap();
        assert_eq!(
            f,
            Formula::ForallRel(
                SetRef::Sigma(var("d")),
                vec!["a".into()],
                Box::new(eq(var("a"), var("a")))
            )
        );
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_formula("(and\n  (= x x)\n  (bogus))").unwrap_err();
        assert_eq!(
            e,
            Error::Syntax {
                line: 3,
                col: 3,
                msg: "unknown formula head \"bogus\"".into()
            }
        );
        assert!(parse_formula("(exists-rel (frob d) (a) (= a a))").is_err());
        assert!(parse_formula("(exists-rel (ubullet d) (a) (= a a))").is_err());
        assert!(parse_formula("(not (= x x) (= x x))").is_err());
        assert!(parse_formula("(= x x").is_err());
        assert!(parse_formula("(= x x))").is_err());
    }
}
