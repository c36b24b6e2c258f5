//! First-order formulas in the language of rings `{0, 1, +, ·, −}`.
//!
//! Besides the usual connectives and quantifiers the syntax has
//! relativized quantifiers over named parameter sets ([`SetRef`]) and opaque
//! named macros standing for formulas that are cited but not constructed.

mod eval;
mod parse;
mod print;
mod stats;
mod subst;

use std::collections::BTreeSet;

pub use eval::{eval_sentence, eval_sentence_with, EvalMode};
pub use parse::{parse_formula, parse_term};
pub use print::{print_formula, print_term, PrintFormat};
pub use stats::{stats, FormulaStats};
pub use subst::{fresh_name, normalize, rename_free, substitute};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Zero,
    One,
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Neg(Box<Term>),
}

/// Parameter sets that relativized quantifiers range over.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SetRef {
    /// Non-δ-units: elements with nonzero order wherever δ has one.
    Sigma(Term),
    /// δ-units congruent to 1.
    Udelta(Term),
    /// Pairs `(u′, u)` with `u′ ∈ U_δ` and `u ≠ 0`.
    Ubullet(Term),
    /// Elements close to 1 at a named set of excluded places.
    DeltaU0(String),
}

impl SetRef {
    /// Number of variables a quantifier over this set binds.
    pub fn arity(&self) -> usize {
        match self {
            SetRef::Ubullet(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Eq(Term, Term),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Exists(Vec<String>, Box<Formula>),
    Forall(Vec<String>, Box<Formula>),
    ExistsRel(SetRef, Vec<String>, Box<Formula>),
    ForallRel(SetRef, Vec<String>, Box<Formula>),
    Macro(String, Vec<Term>),
}

pub fn var(name: impl Into<String>) -> Term {
    Term::Var(name.into())
}

pub fn zero() -> Term {
    Term::Zero
}

pub fn one() -> Term {
    Term::One
}

pub fn add(a: Term, b: Term) -> Term {
    Term::Add(Box::new(a), Box::new(b))
}

pub fn mul(a: Term, b: Term) -> Term {
    Term::Mul(Box::new(a), Box::new(b))
}

pub fn neg(a: Term) -> Term {
    Term::Neg(Box::new(a))
}

pub fn sub(a: Term, b: Term) -> Term {
    add(a, neg(b))
}

pub fn square(a: Term) -> Term {
    mul(a.clone(), a)
}

/// The integer `n` as a ring term, built by binary expansion over `1 + 1`.
pub fn num(n: i64) -> Term {
    if n < 0 {
        return neg(num(-n));
    }
    match n {
        0 => zero(),
        1 => one(),
        2 => add(one(), one()),
        _ => {
            let half = mul(num(2), num(n / 2));
            if n % 2 == 1 {
                add(half, one())
            } else {
                half
            }
        }
    }
}

/// Product of the terms, as a balanced tree (`1` for an empty list).
pub fn product(terms: Vec<Term>) -> Term {
    balanced(terms, one(), mul)
}

/// Sum of the terms, as a balanced tree (`0` for an empty list).
pub fn sum(terms: Vec<Term>) -> Term {
    balanced(terms, zero(), add)
}

fn balanced<T: Clone>(mut items: Vec<T>, empty: T, join: fn(T, T) -> T) -> T {
    match items.len() {
        0 => empty,
        1 => items.pop().unwrap(),
        n => {
            let right = items.split_off(n / 2);
            join(balanced(items, empty.clone(), join), balanced(right, empty, join))
        }
    }
}

pub fn eq(a: Term, b: Term) -> Formula {
    Formula::Eq(a, b)
}

pub fn and(a: Formula, b: Formula) -> Formula {
    Formula::And(Box::new(a), Box::new(b))
}

pub fn or(a: Formula, b: Formula) -> Formula {
    Formula::Or(Box::new(a), Box::new(b))
}

pub fn not(a: Formula) -> Formula {
    Formula::Not(Box::new(a))
}

pub fn imp(a: Formula, b: Formula) -> Formula {
    Formula::Imp(Box::new(a), Box::new(b))
}

pub fn exists(vars: &[&str], body: Formula) -> Formula {
    Formula::Exists(vars.iter().map(|v| v.to_string()).collect(), Box::new(body))
}

pub fn forall(vars: &[&str], body: Formula) -> Formula {
    Formula::Forall(vars.iter().map(|v| v.to_string()).collect(), Box::new(body))
}

pub fn exists_v(vars: Vec<String>, body: Formula) -> Formula {
    Formula::Exists(vars, Box::new(body))
}

pub fn forall_v(vars: Vec<String>, body: Formula) -> Formula {
    Formula::Forall(vars, Box::new(body))
}

/// Conjunction of all items, balanced; an empty list gives `0 = 0`.
pub fn and_all(items: Vec<Formula>) -> Formula {
    balanced(items, truth(), and)
}

/// Disjunction of all items, balanced; an empty list gives `¬(0 = 0)`.
pub fn or_all(items: Vec<Formula>) -> Formula {
    balanced(items, not(truth()), or)
}

/// The tautology `0 = 0`.
pub fn truth() -> Formula {
    eq(zero(), zero())
}

impl Term {
    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Zero | Term::One => {}
            Term::Add(a, b) | Term::Mul(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Term::Neg(a) => a.vars(out),
        }
    }

    pub fn var_set(&self) -> BTreeSet<String> {
        let mut s = BTreeSet::new();
        self.vars(&mut s);
        s
    }
}

impl SetRef {
    pub fn term(&self) -> Option<&Term> {
        match self {
            SetRef::Sigma(t) | SetRef::Udelta(t) | SetRef::Ubullet(t) => Some(t),
            SetRef::DeltaU0(_) => None,
        }
    }

    pub fn map_term(&self, f: impl FnOnce(&Term) -> Term) -> SetRef {
        match self {
            SetRef::Sigma(t) => SetRef::Sigma(f(t)),
            SetRef::Udelta(t) => SetRef::Udelta(f(t)),
            SetRef::Ubullet(t) => SetRef::Ubullet(f(t)),
            SetRef::DeltaU0(d) => SetRef::DeltaU0(d.clone()),
        }
    }
}

impl Formula {
    /// Free variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        free_vars_into(self, &mut Vec::new(), &mut out);
        out
    }

    /// True when the formula has no free variables.
    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Eq(a, b) => {
                a.vars(&mut out);
                b.vars(&mut out);
            }
            Formula::Exists(vs, _) | Formula::Forall(vs, _) => out.extend(vs.iter().cloned()),
            Formula::ExistsRel(s, vs, _) | Formula::ForallRel(s, vs, _) => {
                out.extend(vs.iter().cloned());
                if let Some(t) = s.term() {
                    t.vars(&mut out);
                }
            }
            Formula::Macro(_, args) => args.iter().for_each(|a| a.vars(&mut out)),
            _ => {}
        });
        out
    }

    /// Pre-order traversal over formula nodes.
    pub fn walk(&self, visit: &mut impl FnMut(&Formula)) {
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            visit(f);
            match f {
                Formula::Eq(..) | Formula::Macro(..) => {}
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
                Formula::Not(a)
                | Formula::Exists(_, a)
                | Formula::Forall(_, a)
                | Formula::ExistsRel(_, _, a)
                | Formula::ForallRel(_, _, a) => stack.push(a),
            }
        }
    }

    /// Names of all macros used.
    pub fn macro_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Macro(name, _) = f {
                out.insert(name.clone());
            }
        });
        out
    }

    /// True when no relativized quantifier and no macro occurs.
    pub fn is_pure(&self) -> bool {
        let mut pure = true;
        self.walk(&mut |f| {
            if matches!(f, Formula::Macro(..) | Formula::ExistsRel(..) | Formula::ForallRel(..)) {
                pure = false;
            }
        });
        pure
    }
}

fn free_vars_into(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    let term = |t: &Term, bound: &Vec<String>, out: &mut BTreeSet<String>| {
        for v in t.var_set() {
            if !bound.contains(&v) {
                out.insert(v);
            }
        }
    };
    match f {
        Formula::Eq(a, b) => {
            term(a, bound, out);
            term(b, bound, out);
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            free_vars_into(a, bound, out);
            free_vars_into(b, bound, out);
        }
        Formula::Not(a) => free_vars_into(a, bound, out),
        Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
            let n = bound.len();
            bound.extend(vs.iter().cloned());
            free_vars_into(body, bound, out);
            bound.truncate(n);
        }
        Formula::ExistsRel(s, vs, body) | Formula::ForallRel(s, vs, body) => {
            if let Some(t) = s.term() {
                term(t, bound, out);
            }
            let n = bound.len();
            bound.extend(vs.iter().cloned());
            free_vars_into(body, bound, out);
            bound.truncate(n);
        }
        Formula::Macro(_, args) => args.iter().for_each(|a| term(a, bound, out)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_variables() {
        let f = exists(&["x"], eq(mul(var("x"), var("y")), one()));
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec!["y"]);
        assert!(!f.is_sentence());
        let g = Formula::ForallRel(
            SetRef::Sigma(var("d")),
            vec!["a".into()],
            Box::new(eq(var("a"), var("a"))),
        );
        assert_eq!(g.free_vars().into_iter().collect::<Vec<_>>(), vec!["d"]);
    }

    #[test]
    fn numerals() {
        assert_eq!(num(2), add(one(), one()));
        assert_eq!(num(-1), neg(one()));
    }
}
