//! Capture-avoiding substitution and binder normalization.

use std::collections::BTreeSet;

use super::{Formula, SetRef, Term};

/// `base` followed by enough primes to avoid every name in `used`.
pub fn fresh_name(base: &str, used: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while used.contains(&name) {
        name.push('\'');
    }
    name
}

pub fn subst_term(t: &Term, var: &str, by: &Term) -> Term {
    match t {
        Term::Var(v) if v == var => by.clone(),
        Term::Var(_) | Term::Zero | Term::One => t.clone(),
        Term::Add(a, b) => Term::Add(Box::new(subst_term(a, var, by)), Box::new(subst_term(b, var, by))),
        Term::Mul(a, b) => Term::Mul(Box::new(subst_term(a, var, by)), Box::new(subst_term(b, var, by))),
        Term::Neg(a) => Term::Neg(Box::new(subst_term(a, var, by))),
    }
}

/// Replaces free occurrences of `var` by `by`, renaming bound variables
/// that would capture variables of `by`.
pub fn substitute(f: &Formula, var: &str, by: &Term) -> Formula {
    let by_vars = by.var_set();
    subst(f, var, by, &by_vars)
}

/// Renames free occurrences of `from` to `to`.
pub fn rename_free(f: &Formula, from: &str, to: &str) -> Formula {
    substitute(f, from, &Term::Var(to.to_string()))
}

fn subst_binder(
    vs: &[String],
    body: &Formula,
    var: &str,
    by: &Term,
    by_vars: &BTreeSet<String>,
) -> (Vec<String>, Formula) {
    if vs.iter().any(|v| v == var) {
        return (vs.to_vec(), body.clone());
    }
    if !body.free_vars().contains(var) {
        return (vs.to_vec(), body.clone());
    }
    let mut vs = vs.to_vec();
    let mut body = body.clone();
    for i in 0..vs.len() {
        if by_vars.contains(&vs[i]) {
            let mut used = body.all_vars();
            used.extend(by_vars.iter().cloned());
            used.extend(vs.iter().cloned());
            used.insert(var.to_string());
            let fresh = fresh_name(&vs[i], &used);
            body = rename_free(&body, &vs[i], &fresh);
            vs[i] = fresh;
        }
    }
    let body = subst(&body, var, by, by_vars);
    (vs, body)
}

fn subst(f: &Formula, var: &str, by: &Term, by_vars: &BTreeSet<String>) -> Formula {
    match f {
        Formula::Eq(a, b) => Formula::Eq(subst_term(a, var, by), subst_term(b, var, by)),
        Formula::And(a, b) => Formula::And(
            Box::new(subst(a, var, by, by_vars)),
            Box::new(subst(b, var, by, by_vars)),
        ),
        Formula::Or(a, b) => Formula::Or(
            Box::new(subst(a, var, by, by_vars)),
            Box::new(subst(b, var, by, by_vars)),
        ),
        Formula::Imp(a, b) => Formula::Imp(
            Box::new(subst(a, var, by, by_vars)),
            Box::new(subst(b, var, by, by_vars)),
        ),
        Formula::Not(a) => Formula::Not(Box::new(subst(a, var, by, by_vars))),
        Formula::Exists(vs, body) => {
            let (vs, body) = subst_binder(vs, body, var, by, by_vars);
            Formula::Exists(vs, Box::new(body))
        }
        Formula::Forall(vs, body) => {
            let (vs, body) = subst_binder(vs, body, var, by, by_vars);
            Formula::Forall(vs, Box::new(body))
        }
        Formula::ExistsRel(s, vs, body) => {
            let s = s.map_term(|t| subst_term(t, var, by));
            let (vs, body) = subst_binder(vs, body, var, by, by_vars);
            Formula::ExistsRel(s, vs, Box::new(body))
        }
        Formula::ForallRel(s, vs, body) => {
            let s = s.map_term(|t| subst_term(t, var, by));
            let (vs, body) = subst_binder(vs, body, var, by, by_vars);
            Formula::ForallRel(s, vs, Box::new(body))
        }
        Formula::Macro(name, args) => Formula::Macro(
            name.clone(),
            args.iter().map(|a| subst_term(a, var, by)).collect(),
        ),
    }
}

/// Expands variable lists of plain quantifiers into nested single binders
/// and renames binders that shadow an enclosing binder or a free variable.
pub fn normalize(f: &Formula) -> Formula {
    let mut used = f.all_vars();
    let mut scope: Vec<String> = f.free_vars().into_iter().collect();
    norm(f, &mut scope, &mut used)
}

fn rename_binders(
    vs: &[String],
    body: &Formula,
    scope: &[String],
    used: &mut BTreeSet<String>,
) -> (Vec<String>, Formula) {
    let mut vs = vs.to_vec();
    let mut body = body.clone();
    for i in 0..vs.len() {
        let clash = scope.contains(&vs[i]) || vs[..i].contains(&vs[i]);
        if clash {
            let fresh = fresh_name(&vs[i], used);
            used.insert(fresh.clone());
            if !vs[i + 1..].contains(&vs[i]) {
                body = rename_free(&body, &vs[i], &fresh);
            }
            vs[i] = fresh;
        }
    }
    (vs, body)
}

fn norm(f: &Formula, scope: &mut Vec<String>, used: &mut BTreeSet<String>) -> Formula {
    match f {
        Formula::Eq(..) | Formula::Macro(..) => f.clone(),
        Formula::And(a, b) => Formula::And(Box::new(norm(a, scope, used)), Box::new(norm(b, scope, used))),
        Formula::Or(a, b) => Formula::Or(Box::new(norm(a, scope, used)), Box::new(norm(b, scope, used))),
        Formula::Imp(a, b) => Formula::Imp(Box::new(norm(a, scope, used)), Box::new(norm(b, scope, used))),
        Formula::Not(a) => Formula::Not(Box::new(norm(a, scope, used))),
        Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
            let (vs, body) = rename_binders(vs, body, scope, used);
            let n = scope.len();
            scope.extend(vs.iter().cloned());
            let mut inner = norm(&body, scope, used);
            scope.truncate(n);
            for v in vs.into_iter().rev() {
                inner = match f {
                    Formula::Exists(..) => Formula::Exists(vec![v], Box::new(inner)),
                    _ => Formula::Forall(vec![v], Box::new(inner)),
                };
            }
            inner
        }
        Formula::ExistsRel(s, vs, body) | Formula::ForallRel(s, vs, body) => {
            let (vs, body) = rename_binders(vs, body, scope, used);
            let n = scope.len();
            scope.extend(vs.iter().cloned());
            let inner = norm(&body, scope, used);
            scope.truncate(n);
            let s: SetRef = s.clone();
            match f {
                Formula::ExistsRel(..) => Formula::ExistsRel(s, vs, Box::new(inner)),
                _ => Formula::ForallRel(s, vs, Box::new(inner)),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::*;

    #[test]
    fn substitution_examples() {
        let f = exists(&["x"], eq(var("x"), var("y")));
        assert_eq!(substitute(&f, "y", &one()), exists(&["x"], eq(var("x"), one())));
        assert_eq!(
            substitute(&f, "y", &var("x")),
            exists(&["x'"], eq(var("x'"), var("x")))
        );
        let g = eq(var("x"), var("x"));
        assert_eq!(substitute(&g, "x", &zero()), eq(zero(), zero()));
    }

    #[test]
    fn bound_occurrences_untouched() {
        let f = and(eq(var("x"), one()), exists(&["x"], eq(var("x"), zero())));
        let g = substitute(&f, "x", &zero());
        assert_eq!(g, and(eq(zero(), one()), exists(&["x"], eq(var("x"), zero()))));
    }

    #[test]
    fn normalization_splits_and_renames() {
        let f = exists(&["x", "y"], forall(&["x"], eq(var("x"), var("y"))));
        let n = normalize(&f);
        assert_eq!(
            n,
            exists(&["x"], exists(&["y"], forall(&["x'"], eq(var("x'"), var("y")))))
        );
    }
}
