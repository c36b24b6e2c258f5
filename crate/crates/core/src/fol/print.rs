//! Canonical S-expression and human-readable renderings.

use std::fmt::Write;

use super::{Formula, SetRef, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrintFormat {
    Sexpr,
    Unicode,
}

pub fn print_formula(f: &Formula, format: PrintFormat) -> String {
    let mut out = String::new();
    match format {
        PrintFormat::Sexpr => sexpr_formula(f, &mut out),
        PrintFormat::Unicode => unicode_formula(f, &mut out),
    }
    out
}

pub fn print_term(t: &Term, format: PrintFormat) -> String {
    let mut out = String::new();
    match format {
        PrintFormat::Sexpr => sexpr_term(t, &mut out),
        PrintFormat::Unicode => unicode_term(t, 0, &mut out),
    }
    out
}

fn sexpr_term(t: &Term, out: &mut String) {
    match t {
        Term::Var(v) => out.push_str(v),
        Term::Zero => out.push('0'),
        Term::One => out.push('1'),
        Term::Add(a, b) | Term::Mul(a, b) => {
            out.push_str(if matches!(t, Term::Add(..)) { "(+ " } else { "(* " });
            sexpr_term(a, out);
            out.push(' ');
            sexpr_term(b, out);
            out.push(')');
        }
        Term::Neg(a) => {
            out.push_str("(- ");
            sexpr_term(a, out);
            out.push(')');
        }
    }
}

fn sexpr_set(s: &SetRef, out: &mut String) {
    let (tag, t) = match s {
        SetRef::Sigma(t) => ("sigma", t),
        SetRef::Udelta(t) => ("udelta", t),
        SetRef::Ubullet(t) => ("ubullet", t),
        SetRef::DeltaU0(d) => {
            let _ = write!(out, "(delta-u0 {d})");
            return;
        }
    };
    let _ = write!(out, "({tag} ");
    sexpr_term(t, out);
    out.push(')');
}

fn sexpr_formula(f: &Formula, out: &mut String) {
    match f {
        Formula::Eq(a, b) => {
            out.push_str("(= ");
            sexpr_term(a, out);
            out.push(' ');
            sexpr_term(b, out);
            out.push(')');
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            out.push_str(match f {
                Formula::And(..) => "(and ",
                Formula::Or(..) => "(or ",
                _ => "(imp ",
            });
            sexpr_formula(a, out);
            out.push(' ');
            sexpr_formula(b, out);
            out.push(')');
        }
        Formula::Not(a) => {
            out.push_str("(not ");
            sexpr_formula(a, out);
            out.push(')');
        }
        Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
            let h = if matches!(f, Formula::Exists(..)) { "exists" } else { "forall" };
            let _ = write!(out, "({h} ({}) ", vs.join(" "));
            sexpr_formula(body, out);
            out.push(')');
        }
        Formula::ExistsRel(s, vs, body) | Formula::ForallRel(s, vs, body) => {
            let h = if matches!(f, Formula::ExistsRel(..)) {
                "exists-rel"
            } else {
                "forall-rel"
            };
            let _ = write!(out, "({h} ");
            sexpr_set(s, out);
            let _ = write!(out, " ({}) ", vs.join(" "));
            sexpr_formula(body, out);
            out.push(')');
        }
        Formula::Macro(name, args) => {
            let _ = write!(out, "(macro {name}");
            for a in args {
                out.push(' ');
                sexpr_term(a, out);
            }
            out.push(')');
        }
    }
}

/// Precedence levels: 0 sum, 1 product, 2 unary/atomic.
fn unicode_term(t: &Term, ctx: u8, out: &mut String) {
    match t {
        Term::Var(v) => out.push_str(v),
        Term::Zero => out.push('0'),
        Term::One => out.push('1'),
        Term::Add(a, b) => {
            if ctx > 0 {
                out.push('(');
            }
            unicode_term(a, 0, out);
            if let Term::Neg(inner) = b.as_ref() {
                out.push_str(" − ");
                unicode_term(inner, 1, out);
            } else {
                out.push_str(" + ");
                unicode_term(b, 1, out);
            }
            if ctx > 0 {
                out.push(')');
            }
        }
        Term::Mul(a, b) => {
            if ctx > 1 {
                out.push('(');
            }
            unicode_term(a, 1, out);
            out.push('·');
            unicode_term(b, 2, out);
            if ctx > 1 {
                out.push(')');
            }
        }
        Term::Neg(a) => {
            if ctx > 1 {
                out.push('(');
            }
            out.push('−');
            unicode_term(a, 2, out);
            if ctx > 1 {
                out.push(')');
            }
        }
    }
}

fn unicode_set(s: &SetRef, out: &mut String) {
    let (tag, t) = match s {
        SetRef::Sigma(t) => ("Σ", t),
        SetRef::Udelta(t) => ("U", t),
        SetRef::Ubullet(t) => ("U•", t),
        SetRef::DeltaU0(d) => {
            let _ = write!(out, "Δ[{d}]");
            return;
        }
    };
    let _ = write!(out, "{tag}[");
    unicode_term(t, 0, out);
    out.push(']');
}

fn is_atomic_formula(f: &Formula) -> bool {
    matches!(f, Formula::Eq(..) | Formula::Not(..) | Formula::Macro(..))
}

fn unicode_sub(f: &Formula, out: &mut String) {
    if is_atomic_formula(f) {
        unicode_formula(f, out);
    } else {
        out.push('(');
        unicode_formula(f, out);
        out.push(')');
    }
}

fn unicode_formula(f: &Formula, out: &mut String) {
    match f {
        Formula::Eq(a, b) => {
            unicode_term(a, 0, out);
            out.push_str(" = ");
            unicode_term(b, 0, out);
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            let op = match f {
                Formula::And(..) => " ∧ ",
                Formula::Or(..) => " ∨ ",
                _ => " → ",
            };
            unicode_sub(a, out);
            out.push_str(op);
            unicode_sub(b, out);
        }
        Formula::Not(a) => {
            out.push('¬');
            unicode_sub(a, out);
        }
        Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
            out.push(if matches!(f, Formula::Exists(..)) { '∃' } else { '∀' });
            let _ = write!(out, "{}. ", vs.join(" "));
            unicode_formula(body, out);
        }
        Formula::ExistsRel(s, vs, body) | Formula::ForallRel(s, vs, body) => {
            out.push(if matches!(f, Formula::ExistsRel(..)) { '∃' } else { '∀' });
            if vs.len() == 1 {
                out.push_str(&vs[0]);
            } else {
                let _ = write!(out, "({})", vs.join(","));
            }
            out.push_str(" ∈ ");
            unicode_set(s, out);
            out.push_str(". ");
            unicode_formula(body, out);
        }
        Formula::Macro(name, args) => {
            let _ = write!(out, "{name}(");
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                unicode_term(a, 0, out);
            }
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::*;

    #[test]
    fn canonical_sexpr() {
        let f = exists(&["x"], eq(mul(var("x"), var("x")), neg(one())));
        assert_eq!(print_formula(&f, PrintFormat::Sexpr), "(exists (x) (= (* x x) (- 1)))");
        assert_eq!(print_formula(&f, PrintFormat::Unicode), "∃x. x·x = −1");
    }

    #[test]
    fn macro_rendering() {
        let f = Formula::Macro("rumely_iso".into(), vec![var("a"), one()]);
        assert_eq!(print_formula(&f, PrintFormat::Sexpr), "(macro rumely_iso a 1)");
        let g = Formula::Macro("rumely_closed".into(), vec![]);
        assert_eq!(print_formula(&g, PrintFormat::Sexpr), "(macro rumely_closed)");
    }

    #[test]
    fn unicode_precedence() {
        let t = mul(add(var("a"), one()), neg(var("b")));
        assert_eq!(print_term(&t, PrintFormat::Unicode), "(a + 1)·(−b)");
        let s = add(var("a"), neg(mul(var("b"), var("c"))));
        assert_eq!(print_term(&s, PrintFormat::Unicode), "a − b·c");
    }
}
