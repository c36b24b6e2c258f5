//! Formula emitters: the dimension sentences `φ_d`, the symbol formula
//! `φ(f, t)`, the valuation-ring chain `Θ → Θ̄ → 𝔞 → R → R⁰`, degree formulas
//! and the isomorphism sentence, plus the interpretation of `K[√ε]` in `K`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fol::{
    add, and, and_all, eq, exists, exists_v, forall, forall_v, fresh_name, imp, mul, neg, not, num,
    one, or, or_all, product, square, sub, substitute, sum, var, zero, Formula, SetRef, Term,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CharCase {
    Char0,
    CharP(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EmitterConfig {
    pub d: usize,
    pub char_case: CharCase,
}

impl EmitterConfig {
    pub fn new(d: usize, char_case: CharCase) -> Result<Self> {
        if d < 2 {
            return Err(Error::pre(format!("dimension {d} is below 2")));
        }
        if let CharCase::CharP(p) = char_case {
            if p == 2 {
                return Err(Error::pre("characteristic 2 is excluded"));
            }
        }
        Ok(EmitterConfig { d, char_case })
    }

    /// Number of `t` parameters.
    pub fn e(&self) -> usize {
        self.d - 2
    }
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn vars(names: &[String]) -> Vec<Term> {
    names.iter().map(var).collect()
}

fn pick(base: &str, used: &BTreeSet<String>) -> String {
    if used.contains(base) {
        fresh_name(base, used)
    } else {
        base.to_string()
    }
}

/// `∃x₁…x_{2^r}` not all zero with `Σ_S (∏_{i∈S} −a_i)·x_S² = 0`, where `S`
/// runs over subsets of the coefficient positions in binary-counter order.
pub fn emit_pfister_eq(coeffs: &[Term]) -> Formula {
    let r = coeffs.len();
    let mut used = BTreeSet::new();
    coeffs.iter().for_each(|c| c.vars(&mut used));
    let n = 1usize << r;
    let mut prefix = "x".to_string();
    while (1..=n).any(|i| used.contains(&format!("{prefix}{i}"))) {
        prefix.push('\'');
    }
    let xs = names(&prefix, n);
    let terms = (0..n)
        .map(|s| {
            let mut fs: Vec<Term> = (0..r)
                .filter(|i| s >> i & 1 == 1)
                .map(|i| neg(coeffs[i].clone()))
                .collect();
            fs.push(square(var(&xs[s])));
            product(fs)
        })
        .collect();
    let nonzero = not(and_all(xs.iter().map(|x| eq(var(x), zero())).collect()));
    exists_v(xs, and(nonzero, eq(sum(terms), zero())))
}

// Pairs `(a, b)` standing for `a + b·√ε`; the constructors fold zeros and ones
// so base-field subterms stay unchanged.

fn is_zero(t: &Term) -> bool {
    matches!(t, Term::Zero)
}

fn s_add(a: Term, b: Term) -> Term {
    if is_zero(&a) {
        b
    } else if is_zero(&b) {
        a
    } else {
        add(a, b)
    }
}

fn s_mul(a: Term, b: Term) -> Term {
    if is_zero(&a) || is_zero(&b) {
        zero()
    } else if a == Term::One {
        b
    } else if b == Term::One {
        a
    } else {
        mul(a, b)
    }
}

fn s_neg(a: Term) -> Term {
    if is_zero(&a) {
        a
    } else {
        neg(a)
    }
}

struct Relativizer<'a> {
    eps: &'a Term,
    base: BTreeSet<String>,
    used: BTreeSet<String>,
    scope: Vec<(String, Option<(String, String)>)>,
}

impl Relativizer<'_> {
    fn components(&mut self, v: &str) -> (String, String) {
        let mut p = format!("{v}'");
        loop {
            let (a, b) = (format!("{p}1"), format!("{p}2"));
            if !self.used.contains(&a) && !self.used.contains(&b) {
                self.used.insert(a.clone());
                self.used.insert(b.clone());
                return (a, b);
            }
            p.push('\'');
        }
    }

    fn term(&self, t: &Term) -> (Term, Term) {
        match t {
            Term::Var(v) => match self.scope.iter().rev().find(|(n, _)| n == v) {
                Some((_, Some((a, b)))) => (var(a), var(b)),
                _ => (t.clone(), zero()),
            },
            Term::Zero | Term::One => (t.clone(), zero()),
            Term::Add(x, y) => {
                let (a, b) = self.term(x);
                let (c, d) = self.term(y);
                (s_add(a, c), s_add(b, d))
            }
            Term::Mul(x, y) => {
                let (a, b) = self.term(x);
                let (c, d) = self.term(y);
                let bd = s_mul(b.clone(), d.clone());
                let first = s_add(s_mul(a.clone(), c.clone()), s_mul(self.eps.clone(), bd));
                (first, s_add(s_mul(a, d), s_mul(b, c)))
            }
            Term::Neg(x) => {
                let (a, b) = self.term(x);
                (s_neg(a), s_neg(b))
            }
        }
    }

    fn binder(&mut self, vs: &[String], keep_base: bool) -> Vec<String> {
        let mut out = Vec::new();
        for v in vs {
            if keep_base || self.base.contains(v) {
                self.scope.push((v.clone(), None));
                out.push(v.clone());
            } else {
                let (a, b) = self.components(v);
                out.push(a.clone());
                out.push(b.clone());
                self.scope.push((v.clone(), Some((a, b))));
            }
        }
        out
    }

    fn formula(&mut self, f: &Formula) -> Formula {
        match f {
            Formula::Eq(x, y) => {
                let (a, b) = self.term(x);
                let (c, d) = self.term(y);
                and(eq(a, c), eq(b, d))
            }
            Formula::And(a, b) => and(self.formula(a), self.formula(b)),
            Formula::Or(a, b) => or(self.formula(a), self.formula(b)),
            Formula::Imp(a, b) => imp(self.formula(a), self.formula(b)),
            Formula::Not(a) => not(self.formula(a)),
            Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
                let n = self.scope.len();
                let out = self.binder(vs, false);
                let body = self.formula(body);
                self.scope.truncate(n);
                if matches!(f, Formula::Exists(..)) {
                    exists_v(out, body)
                } else {
                    forall_v(out, body)
                }
            }
            Formula::ExistsRel(s, vs, body) | Formula::ForallRel(s, vs, body) => {
                let s = s.map_term(|t| self.term(t).0);
                let n = self.scope.len();
                let out = self.binder(vs, true);
                let body = Box::new(self.formula(body));
                self.scope.truncate(n);
                if matches!(f, Formula::ExistsRel(..)) {
                    Formula::ExistsRel(s, out, body)
                } else {
                    Formula::ForallRel(s, out, body)
                }
            }
            Formula::Macro(name, args) => {
                let flat = args
                    .iter()
                    .flat_map(|a| {
                        let (x, y) = self.term(a);
                        [x, y]
                    })
                    .collect();
                Formula::Macro(name.clone(), flat)
            }
        }
    }
}

/// Rewrites `f` as a statement about `K` equivalent to `f` holding in
/// `K[√ε]` (for `ε` a non-square). Variables bound by relativized quantifiers
/// or occurring in set parameters range over the base field.
pub fn relativize_to_quadratic_ext(f: &Formula, eps: &Term) -> Formula {
    let mut base = BTreeSet::new();
    f.walk(&mut |g| {
        if let Formula::ExistsRel(s, vs, _) | Formula::ForallRel(s, vs, _) = g {
            base.extend(vs.iter().cloned());
            if let Some(t) = s.term() {
                t.vars(&mut base);
            }
        }
    });
    let mut used = f.all_vars();
    eps.vars(&mut used);
    let mut r = Relativizer {
        eps,
        base,
        used,
        scope: Vec::new(),
    };
    r.formula(f)
}

/// `σ` read in `K[√ε]`: directly when `ε` is a square, relativized otherwise.
fn over_root(sigma: &Formula, eps: &Term) -> Formula {
    let mut used = sigma.all_vars();
    eps.vars(&mut used);
    let s = pick("i", &used);
    let has_root = exists_v(vec![s.clone()], eq(square(var(&s)), eps.clone()));
    or(
        and(has_root.clone(), sigma.clone()),
        and(not(has_root), relativize_to_quadratic_ext(sigma, eps)),
    )
}

fn over_mu4(sigma: &Formula) -> Formula {
    over_root(sigma, &neg(one()))
}

/// `φ⁰_r`, evaluated in `K̃ = K[√−1]`.
pub fn emit_phi0(r: usize) -> Formula {
    let a = names("a", r);
    let anisotropic = not(emit_pfister_eq(&vars(&a)));
    let first = if r == 0 { anisotropic } else { exists_v(a, anisotropic) };
    let b = names("a", r + 1);
    let second = forall_v(b.clone(), emit_pfister_eq(&vars(&b)));
    over_mu4(&and(first, second))
}

/// `φ_d ≡ (φ⁰_d ∧ 2 = 0) ∨ (φ⁰_{d+1} ∧ 2 ≠ 0)`.
pub fn emit_phi_d(d: usize) -> Formula {
    let two_zero = eq(num(2), zero());
    or(
        and(two_zero.clone(), emit_phi0(d)),
        and(not(two_zero), emit_phi0(d + 1)),
    )
}

fn phi_ft_in(e: usize, f: &str, ts: &[String]) -> Formula {
    let mut coeffs = vec![var("u0'"), var("u0")];
    coeffs.extend((1..=e).map(|i| sub(var(&ts[i - 1]), var(format!("a{i}")))));
    coeffs.push(var(f));
    let inner = Formula::ExistsRel(
        SetRef::Ubullet(var("delta0")),
        vec!["u0'".into(), "u0".into()],
        Box::new(not(emit_pfister_eq(&coeffs))),
    );
    let mut body = forall(&["delta0"], inner);
    for i in (1..=e).rev() {
        let delta = format!("delta{i}");
        body = Formula::ForallRel(SetRef::Sigma(var(&delta)), vec![format!("a{i}")], Box::new(body));
        body = exists_v(vec![delta], body);
    }
    body
}

/// `φ(f, t)` with free variables `f, t1, …, te`.
pub fn emit_phi_ft(e: usize) -> Formula {
    phi_ft_in(e, "f", &names("t", e))
}

/// Simultaneous capture-avoiding substitution.
fn inst(f: &Formula, pairs: &[(&str, Term)]) -> Formula {
    let mut g = f.clone();
    let mut used = f.all_vars();
    for (_, t) in pairs {
        t.vars(&mut used);
    }
    let mut temps = Vec::new();
    for (p, _) in pairs {
        let tmp = fresh_name(&format!("{p}_"), &used);
        used.insert(tmp.clone());
        g = substitute(&g, p, &var(&tmp));
        temps.push(tmp);
    }
    for (tmp, (_, t)) in temps.iter().zip(pairs) {
        g = substitute(&g, tmp, t);
    }
    g
}

/// `∀w: (w = c₁ ∨ … ∨ w = c_k) → P(w)`: one copy of `P` for several points.
fn for_each_point(p: &Formula, param: &str, points: Vec<Term>) -> Formula {
    let mut used = p.all_vars();
    points.iter().for_each(|t| t.vars(&mut used));
    let w = pick("w", &used);
    let guard = or_all(points.into_iter().map(|t| eq(var(&w), t)).collect());
    forall_v(vec![w.clone()], imp(guard, inst(p, &[(param, var(&w))])))
}

/// The chain of predicates cutting out `R⁰_{f,t}`; each predicate has the
/// free parameters `f, t1, …, te` plus the one named in its doc line.
struct Chain {
    ts: Vec<String>,
    ring0: Formula,
}

impl Chain {
    fn new(e: usize) -> Chain {
        let ts = names("t", e);
        let theta = Self::theta(e, &ts);
        let theta_bar = Self::theta_bar(&theta);
        let ideal = Self::ideal(&theta_bar);
        let ring = Self::ring(&theta_bar, &ideal);
        let ring0 = Self::ring0(&ring);
        Chain { ts, ring0 }
    }

    /// `eps ∈ Θ`: `φ(f, t)` holds in `K[√eps][√−1]`.
    fn theta(e: usize, ts: &[String]) -> Formula {
        over_root(&over_mu4(&phi_ft_in(e, "f", ts)), &var("eps"))
    }

    /// `xi ∈ Θ̄`: `xi ≠ 0` and neither `1/xi` nor `1/xi − 1` lies in `Θ`.
    fn theta_bar(theta: &Formula) -> Formula {
        let body = and(
            eq(mul(var("y"), var("xi")), one()),
            for_each_point(&not(theta.clone()), "eps", vec![var("y"), sub(var("y"), one())]),
        );
        and(not(eq(var("xi"), zero())), exists(&["y"], body))
    }

    /// `z ∈ 𝔞 = Θ̄ − Θ̄`.
    fn ideal(theta_bar: &Formula) -> Formula {
        let body = and(
            eq(var("z"), sub(var("xi1"), var("xi2"))),
            for_each_point(theta_bar, "xi", vec![var("xi1"), var("xi2")]),
        );
        exists(&["xi1", "xi2"], body)
    }

    /// `r ∈ R`: `r·(ξ′ − ξ″) ∈ 𝔞` for all `ξ′, ξ″ ∈ Θ̄`.
    fn ring(theta_bar: &Formula, ideal: &Formula) -> Formula {
        let body = imp(
            for_each_point(theta_bar, "xi", vec![var("xi1"), var("xi2")]),
            inst(ideal, &[("z", mul(var("r"), sub(var("xi1"), var("xi2"))))]),
        );
        forall(&["xi1", "xi2"], body)
    }

    /// `r ∈ R⁰ = R_f · R_{f′}` with `f′·(f + 1) = f`.
    fn ring0(ring: &Formula) -> Formula {
        let f1 = add(var("f"), one());
        let guard = and(not(eq(f1.clone(), zero())), eq(mul(var("f'"), f1), var("f")));
        let cases = or(
            and(eq(var("g"), var("f")), eq(var("w"), var("r1"))),
            and(eq(var("g"), var("f'")), eq(var("w"), var("r2"))),
        );
        let each = forall(
            &["g", "w"],
            imp(cases, inst(ring, &[("f", var("g")), ("r", var("w"))])),
        );
        let body = and_all(vec![guard, eq(var("r"), mul(var("r1"), var("r2"))), each]);
        exists(&["f'", "r1", "r2"], body)
    }

    /// `r ∈ R⁰` for the parameter `g` in place of `f`.
    fn member(&self, g: Term, r: Term) -> Formula {
        inst(&self.ring0, &[("f", g), ("r", r)])
    }

    /// `R⁰` (with parameter `g`) is a proper valuation ring containing the
    /// constants.
    fn valuation_ring(&self, g: Term) -> Formula {
        let total = forall(
            &["y"],
            exists(
                &["z", "w"],
                and_all(vec![
                    or(
                        eq(var("w"), var("y")),
                        and(eq(mul(var("z"), var("y")), one()), eq(var("w"), var("z"))),
                    ),
                    imp(constant(var("y")), eq(var("w"), var("y"))),
                    self.member(g.clone(), var("w")),
                ]),
            ),
        );
        let proper = exists(&["y"], not(self.member(g, var("y"))));
        and(total, proper)
    }

    fn independence(&self, extra: Term) -> Formula {
        let mut args = vars(&self.ts);
        args.push(extra);
        Formula::Macro("poonen_psi".into(), args)
    }

    fn squares(&self) -> Vec<Formula> {
        self.ts
            .iter()
            .map(|t| exists(&["s"], eq(square(var("s")), var(t))))
            .collect()
    }
}

/// Membership in the maximal global subfield.
fn constant(t: Term) -> Formula {
    Formula::Macro("poonen_constants".into(), vec![t])
}

/// `val_d(x; f, t1, …, te)`: `x ∈ R⁰_{f,t}` where `R⁰_{f,t}` is a proper
/// valuation ring, for `e = d − 2`.
pub fn emit_val_d(d: usize) -> Result<Formula> {
    if d < 2 {
        return Err(Error::pre(format!("dimension {d} is below 2")));
    }
    let c = Chain::new(d - 2);
    let mut parts = vec![c.independence(var("f"))];
    parts.extend(c.squares());
    parts.push(c.valuation_ring(var("f")));
    parts.push(c.member(var("f"), var("x")));
    Ok(and_all(parts))
}

/// Predicates on places cut out by `R⁰_{g,t}`, used by the degree formula.
struct Places<'a> {
    c: &'a Chain,
}

impl Places<'_> {
    fn ring(&self, g: &str, y: Term) -> Formula {
        self.c.member(var(g), y)
    }

    /// `y` in the maximal ideal.
    fn maximal(&self, g: &str, y: Term) -> Formula {
        let inv = forall(&["z"], imp(eq(mul(var("z"), y.clone()), one()), not(self.ring(g, var("z")))));
        and(self.ring(g, y), inv)
    }

    /// `y ∈ 𝔪^k`.
    fn power(&self, g: &str, y: Term, k: usize) -> Formula {
        let m = var("m");
        let pow = product(vec![m.clone(); k]);
        let inv = forall(&["z"], imp(eq(mul(var("z"), m), one()), not(self.ring(g, var("z")))));
        let body = and_all(vec![
            eq(y, mul(var("o"), pow)),
            for_each_point(&self.ring(g, var("v")), "v", vec![var("m"), var("o")]),
            inv,
        ]);
        exists(&["m", "o"], body)
    }

    /// `y` has order exactly `k`.
    fn order(&self, g: &str, y: Term, k: usize) -> Formula {
        and(self.power(g, y.clone(), k), not(self.power(g, y, k + 1)))
    }

    /// The rings for `g` and `h` coincide.
    fn same(&self, g: &str, h: &str) -> Formula {
        let cases = or(
            and(eq(var("p"), var(g)), eq(var("q"), var(h))),
            and(eq(var("p"), var(h)), eq(var("q"), var(g))),
        );
        let body = imp(self.ring("p", var("y")), self.ring("q", var("y")));
        forall(&["y", "p", "q"], imp(cases, body))
    }

    /// The residue field has dimension at least `n` over the constants `k`.
    fn dim_at_least(&self, g: &str, n: usize) -> Formula {
        if n == 0 {
            return crate::fol::truth();
        }
        let ys = names("y", n);
        let cs = names("c", n);
        let in_k = and_all(
            cs.iter()
                .map(|c| {
                    let mut args = vec![var(c)];
                    args.extend(vars(&self.c.ts));
                    Formula::Macro("poonen_closure".into(), args)
                })
                .collect(),
        );
        let combo = sum(cs.iter().zip(&ys).map(|(c, y)| mul(var(c), var(y))).collect());
        let trivial = and_all(cs.iter().map(|c| eq(var(c), zero())).collect());
        let indep = forall_v(cs, imp(and(in_k, self.maximal(g, combo)), trivial));
        let members = for_each_point(&self.ring(g, var("v")), "v", vars(&ys));
        exists_v(ys, and(members, indep))
    }

    /// Pairwise distinct rings for the listed parameters.
    fn distinct(&self, gs: &[String]) -> Formula {
        if gs.len() < 2 {
            return crate::fol::truth();
        }
        let mut cases = Vec::new();
        for i in 0..gs.len() {
            for j in i + 1..gs.len() {
                cases.push(and(eq(var("g'"), var(&gs[i])), eq(var("h'"), var(&gs[j]))));
            }
        }
        forall(&["g'", "h'"], imp(or_all(cases), not(self.same("g'", "h'"))))
    }
}

/// Multisets of `(order, residue degree)` pairs with `Σ order·degree = n`.
fn shapes(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(rest: usize, min: (usize, usize), acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if rest == 0 {
            out.push(acc.clone());
            return;
        }
        for k in 1..=rest {
            for d in 1..=rest / k {
                if (k, d) < min {
                    continue;
                }
                acc.push((k, d));
                go(rest - k * d, (k, d), acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, (1, 1), &mut Vec::new(), &mut out);
    out
}

/// `deg_N(u)` over `K|k` with `k` the relative closure of `k₀(t1, …, te)`:
/// every zero of `u` has order at most `N`, at most `N` zeros share each
/// order, residue degrees are at most `N`, and the zero divisor has degree
/// exactly `N`.
pub fn emit_deg_n(n: usize, e: usize) -> Result<Formula> {
    if n == 0 {
        return Err(Error::pre("degree must be positive"));
    }
    let c = Chain::new(e);
    let pl = Places { c: &c };
    let u = var("u");
    let vr = c.valuation_ring(var("g"));
    let mut parts = vec![forall(
        &["g"],
        imp(vr.clone(), not(pl.power("g", u.clone(), n + 1))),
    )];
    let gs = names("g", n + 1);
    for k in 1..=n {
        let each = and(vr.clone(), pl.order("g", u.clone(), k));
        let body = and(for_each_point(&each, "g", vars(&gs)), pl.distinct(&gs));
        parts.push(not(exists_v(gs.clone(), body)));
    }
    parts.push(forall(
        &["g"],
        imp(
            and(vr.clone(), pl.maximal("g", u.clone())),
            not(pl.dim_at_least("g", n + 1)),
        ),
    ));
    let mut options = Vec::new();
    for shape in shapes(n) {
        let gs = names("g", shape.len());
        let mut groups: BTreeMap<(usize, usize), Vec<Term>> = BTreeMap::new();
        for (g, kd) in gs.iter().zip(&shape) {
            groups.entry(*kd).or_default().push(var(g));
        }
        let mut body = Vec::new();
        for ((k, d), members) in groups {
            let each = and_all(vec![
                vr.clone(),
                pl.order("g", u.clone(), k),
                pl.dim_at_least("g", d),
                not(pl.dim_at_least("g", d + 1)),
            ]);
            body.push(for_each_point(&each, "g", members));
        }
        body.push(pl.distinct(&gs));
        let covered = exists(
            &["p'"],
            and(
                or_all(gs.iter().map(|g| eq(var("p'"), var(g))).collect()),
                pl.same("h", "p'"),
            ),
        );
        body.push(forall(
            &["h"],
            imp(
                and(inst(&vr, &[("g", var("h"))]), pl.maximal("h", u.clone())),
                covered,
            ),
        ));
        options.push(exists_v(gs, and_all(body)));
    }
    parts.push(or_all(options));
    Ok(and_all(parts))
}

/// A term `coeff · t1^a1 ⋯ te^ae · t^b · u^c` of the defining polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monomial {
    pub t: Vec<u32>,
    pub s: u32,
    pub u: u32,
    pub coeff: String,
}

/// Data of a function field presented as `k₀(t1, …, te, t)[u]/(f_K)` with
/// `f_K` monic of degree `n` in `u`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoData {
    pub characteristic: u64,
    pub e: usize,
    pub n: usize,
    pub monomials: Vec<Monomial>,
}

impl IsoData {
    fn check(&self) -> Result<()> {
        if self.characteristic == 2 {
            return Err(Error::pre("characteristic 2 is excluded"));
        }
        if self.n == 0 {
            return Err(Error::pre("degree in u must be positive"));
        }
        for m in &self.monomials {
            if m.t.len() != self.e {
                return Err(Error::pre(format!("monomial has {} t-exponents, expected {}", m.t.len(), self.e)));
            }
            if m.coeff.trim() == "0" {
                return Err(Error::pre("zero coefficient"));
            }
            if m.u as usize > self.n {
                return Err(Error::pre(format!("u-degree {} exceeds {}", m.u, self.n)));
            }
        }
        let lead: Vec<_> = self.monomials.iter().filter(|m| m.u as usize == self.n).collect();
        let monic = lead.len() == 1
            && lead[0].coeff.trim() == "1"
            && lead[0].s == 0
            && lead[0].t.iter().all(|&a| a == 0);
        if !monic {
            return Err(Error::pre("polynomial is not monic in u"));
        }
        let mut seen = BTreeSet::new();
        for m in &self.monomials {
            if !seen.insert((m.t.clone(), m.s, m.u)) {
                return Err(Error::pre("repeated monomial"));
            }
        }
        if self.characteristic > 0 && self.monomials.iter().all(|m| m.u as u64 % self.characteristic == 0) {
            return Err(Error::pre("polynomial is inseparable in u"));
        }
        Ok(())
    }
}

fn power(t: Term, k: u32) -> Vec<Term> {
    vec![t; k as usize]
}

/// The sentence characterizing the function field described by `data` up
/// to isomorphism.
pub fn emit_iso_sentence(data: &IsoData) -> Result<Formula> {
    data.check()?;
    let e = data.e;
    let ts = names("t", e);
    let mut coeff_vars = Vec::new();
    let mut monomials = Vec::new();
    for m in &data.monomials {
        let mut fs = Vec::new();
        if m.u as usize != data.n {
            let c = format!("c{}", coeff_vars.len() + 1);
            fs.push(var(&c));
            coeff_vars.push(c);
        }
        for (t, &a) in ts.iter().zip(&m.t) {
            fs.extend(power(var(t), a));
        }
        fs.extend(power(var("t"), m.s));
        fs.extend(power(var("u"), m.u));
        monomials.push(product(fs));
    }
    let mut indep_args = vars(&ts);
    indep_args.push(var("t"));
    let mut parts = vec![Formula::Macro("poonen_psi".into(), indep_args)];
    parts.push(Formula::Macro("rumely_closed".into(), vars(&ts)));
    parts.extend(coeff_vars.iter().map(|c| constant(var(c))));
    parts.push(Formula::Macro("rumely_iso".into(), vars(&coeff_vars)));
    parts.push(eq(sum(monomials), zero()));
    parts.push(emit_deg_n(data.n, e)?);
    let mut bound = ts.clone();
    bound.push("t".into());
    bound.push("u".into());
    bound.extend(coeff_vars);
    let body = exists_v(bound, and_all(parts));
    let two = not(eq(num(2), zero()));
    let char_clause = match data.characteristic {
        0 => two,
        p => and(eq(num(p as i64), zero()), two),
    };
    Ok(and(char_clause, body))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;
    use crate::fol::{eval_sentence, parse_formula, print_formula, stats, PrintFormat};

    fn holds(f: &Formula, k: &Field) -> bool {
        eval_sentence(f, k, &BTreeMap::new()).unwrap()
    }

    fn round_trip(f: &Formula) {
        let text = print_formula(f, PrintFormat::Sexpr);
        assert_eq!(&parse_formula(&text).unwrap(), f);
    }

    #[test]
    fn pfister_shapes() {
        let f = emit_pfister_eq(&[]);
        assert_eq!(
            f,
            exists(&["x1"], and(not(eq(var("x1"), zero())), eq(square(var("x1")), zero())))
        );
        let g = emit_pfister_eq(&[var("x1"), var("b")]);
        assert_eq!(g.free_vars(), ["b", "x1"].iter().map(|s| s.to_string()).collect());
        assert!(!holds(&f, &Field::fp(5).unwrap()));
    }

    #[test]
    fn relativized_root_of_minus_one() {
        let f = parse_formula("(exists (x) (= (* x x) (- 1)))").unwrap();
        let k = Field::fp(3).unwrap();
        assert!(!holds(&f, &k));
        assert!(holds(&relativize_to_quadratic_ext(&f, &neg(one())), &k));
        let t = relativize_to_quadratic_ext(&crate::fol::truth(), &var("e"));
        assert_eq!(t, and(crate::fol::truth(), crate::fol::truth()));
    }

    #[test]
    fn phi_d_over_finite_fields() {
        for q in [3, 5, 7, 9] {
            let k = Field::finite(q).unwrap();
            assert!(holds(&emit_phi_d(0), &k), "q = {q}");
            assert!(!holds(&emit_phi_d(1), &k), "q = {q}");
        }
        let f = emit_phi_d(2);
        assert!(f.is_sentence() && f.is_pure());
        round_trip(&f);
    }

    #[test]
    fn phi_ft_structure() {
        let f0 = emit_phi_ft(0);
        assert_eq!(f0.free_vars(), ["f".to_string()].into_iter().collect());
        let f1 = emit_phi_ft(1);
        assert_eq!(f1.free_vars(), ["f", "t1"].iter().map(|s| s.to_string()).collect());
        assert_eq!(stats(&emit_phi_ft(2)).alternation_count, 5);
        round_trip(&f1);
    }

    #[test]
    fn val_d_structure() {
        assert!(emit_val_d(1).is_err());
        let v = emit_val_d(3).unwrap();
        assert_eq!(v.free_vars(), ["f", "t1", "x"].iter().map(|s| s.to_string()).collect());
        let macros: BTreeSet<String> = ["poonen_constants", "poonen_psi"].iter().map(|s| s.to_string()).collect();
        assert_eq!(v.macro_names(), macros);
        round_trip(&v);
        let sizes: Vec<usize> = (2..=4).map(|d| stats(&emit_val_d(d).unwrap()).node_count).collect();
        assert!(sizes.windows(2).all(|w| w[0] < w[1]), "{sizes:?}");
    }

    #[test]
    fn degree_and_iso() {
        let f = emit_deg_n(1, 0).unwrap();
        assert_eq!(f.free_vars(), ["u".to_string()].into_iter().collect());
        round_trip(&f);
        assert_eq!(shapes(2).len(), 3);
        let data = IsoData {
            characteristic: 0,
            e: 0,
            n: 2,
            monomials: vec![
                Monomial { t: vec![], s: 0, u: 2, coeff: "1".into() },
                Monomial { t: vec![], s: 3, u: 0, coeff: "-1".into() },
                Monomial { t: vec![], s: 0, u: 0, coeff: "1".into() },
            ],
        };
        let s = emit_iso_sentence(&data).unwrap();
        assert!(s.is_sentence());
        assert!(s.macro_names().contains("rumely_iso") && s.macro_names().contains("poonen_psi"));
        let mut bad = data.clone();
        bad.monomials[0].coeff = "2".into();
        assert!(emit_iso_sentence(&bad).is_err());
    }
}
