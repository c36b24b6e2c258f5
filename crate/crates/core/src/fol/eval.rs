//! Exhaustive evaluation of ring-language sentences over finite fields.
//!
//! Terms are compiled into a hash-consed DAG over element indices. Every
//! DAG node belongs to the innermost binder among the variables it depends
//! on and is recomputed only when that binder's variable changes, so the
//! cost of an inner loop iteration is proportional to the terms that
//! actually change.

use std::collections::{BTreeMap, HashMap};

use super::{subst::normalize, Formula, Term};
use crate::algebra::{Elem, Field};
use crate::error::{Error, Result};

/// Above this size operation tables are not precomputed.
const TABLE_LIMIT: u64 = 1024;
/// Above this size exhaustive evaluation is refused.
const EVAL_LIMIT: u64 = 1 << 16;

/// How outermost quantifiers are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    Sequential,
    /// Branches of outermost quantifiers are distributed over worker
    /// threads (sequential when built without the `parallel` feature).
    Parallel,
}

impl Default for EvalMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            EvalMode::Parallel
        } else {
            EvalMode::Sequential
        }
    }
}

enum Arith {
    Table {
        q: usize,
        add: Vec<u32>,
        mul: Vec<u32>,
        neg: Vec<u32>,
    },
    Direct {
        field: Field,
        elems: Vec<Elem>,
        index: HashMap<Elem, u32>,
    },
}

impl Arith {
    fn new(field: &Field, q: u64) -> Result<Arith> {
        let elems = field.canonical_enumeration()?;
        if q > TABLE_LIMIT {
            let index = elems
                .iter()
                .enumerate()
                .map(|(i, e)| (e.clone(), i as u32))
                .collect();
            return Ok(Arith::Direct {
                field: field.clone(),
                elems,
                index,
            });
        }
        let q = q as usize;
        let mut add = vec![0u32; q * q];
        let mut mul = vec![0u32; q * q];
        let mut neg = vec![0u32; q];
        let idx = |e: &Elem| field.index_of(e).map(|i| i as u32);
        for i in 0..q {
            neg[i] = idx(&field.neg(&elems[i]))?;
            for j in i..q {
                let s = idx(&field.add(&elems[i], &elems[j]))?;
                let m = idx(&field.mul(&elems[i], &elems[j]))?;
                add[i * q + j] = s;
                add[j * q + i] = s;
                mul[i * q + j] = m;
                mul[j * q + i] = m;
            }
        }
        Ok(Arith::Table { q, add, mul, neg })
    }

    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        match self {
            Arith::Table { q, add, .. } => add[a as usize * q + b as usize],
            Arith::Direct { field, elems, index } => {
                index[&field.add(&elems[a as usize], &elems[b as usize])]
            }
        }
    }

    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        match self {
            Arith::Table { q, mul, .. } => mul[a as usize * q + b as usize],
            Arith::Direct { field, elems, index } => {
                index[&field.mul(&elems[a as usize], &elems[b as usize])]
            }
        }
    }

    #[inline]
    fn neg(&self, a: u32) -> u32 {
        match self {
            Arith::Table { neg, .. } => neg[a as usize],
            Arith::Direct { field, elems, index } => index[&field.neg(&elems[a as usize])],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Node {
    Const(u32),
    Slot(u32),
    Add(u32, u32),
    Mul(u32, u32),
    Neg(u32),
}

enum Compiled {
    Lit(bool),
    Eq(u32, u32),
    And(Box<Compiled>, Box<Compiled>),
    Or(Box<Compiled>, Box<Compiled>),
    Not(Box<Compiled>),
    Quant {
        exists: bool,
        slot: u32,
        body: Box<Compiled>,
    },
}

struct Compiler<'a> {
    arith: &'a Arith,
    nodes: Vec<Node>,
    /// Binder owning each node, `None` for constants.
    owner: Vec<Option<u32>>,
    memo: HashMap<Node, u32>,
    slot_level: Vec<usize>,
    slot_node: Vec<u32>,
    slot_used: Vec<bool>,
    scope: Vec<(String, u32)>,
    free: HashMap<String, u32>,
}

impl Compiler<'_> {
    fn intern(&mut self, n: Node) -> u32 {
        if let Some(&id) = self.memo.get(&n) {
            return id;
        }
        let owner = match n {
            Node::Const(_) => None,
            Node::Slot(s) => Some(s),
            Node::Neg(a) => self.owner[a as usize],
            Node::Add(a, b) | Node::Mul(a, b) => {
                match (self.owner[a as usize], self.owner[b as usize]) {
                    (None, o) | (o, None) => o,
                    (Some(x), Some(y)) => Some(if self.slot_level[x as usize] >= self.slot_level[y as usize] {
                        x
                    } else {
                        y
                    }),
                }
            }
        };
        let id = self.nodes.len() as u32;
        self.nodes.push(n);
        self.owner.push(owner);
        self.memo.insert(n, id);
        id
    }

    fn constant(&self, id: u32) -> Option<u32> {
        match self.nodes[id as usize] {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    fn mark_used(&mut self, id: u32) {
        if let Node::Slot(s) = self.nodes[id as usize] {
            self.slot_used[s as usize] = true;
        }
    }

    fn term(&mut self, t: &Term) -> Result<u32> {
        Ok(match t {
            Term::Zero => self.intern(Node::Const(0)),
            Term::One => self.intern(Node::Const(1)),
            Term::Var(v) => {
                if let Some((_, slot)) = self.scope.iter().rev().find(|(n, _)| n == v) {
                    self.slot_node[*slot as usize]
                } else if let Some(&c) = self.free.get(v) {
                    self.intern(Node::Const(c))
                } else {
                    return Err(Error::pre(format!("unbound free variable {v}")));
                }
            }
            Term::Add(a, b) | Term::Mul(a, b) => {
                let (x, y) = (self.term(a)?, self.term(b)?);
                self.mark_used(x);
                self.mark_used(y);
                let is_add = matches!(t, Term::Add(..));
                if let (Some(cx), Some(cy)) = (self.constant(x), self.constant(y)) {
                    let c = if is_add {
                        self.arith.add(cx, cy)
                    } else {
                        self.arith.mul(cx, cy)
                    };
                    return Ok(self.intern(Node::Const(c)));
                }
                // commutative: order operands for better sharing
                let (x, y) = (x.min(y), x.max(y));
                self.intern(if is_add { Node::Add(x, y) } else { Node::Mul(x, y) })
            }
            Term::Neg(a) => {
                let x = self.term(a)?;
                self.mark_used(x);
                if let Some(c) = self.constant(x) {
                    let c = self.arith.neg(c);
                    return Ok(self.intern(Node::Const(c)));
                }
                self.intern(Node::Neg(x))
            }
        })
    }

    fn formula(&mut self, f: &Formula) -> Result<Compiled> {
        Ok(match f {
            Formula::Eq(a, b) => {
                let (x, y) = (self.term(a)?, self.term(b)?);
                self.mark_used(x);
                self.mark_used(y);
                match (self.constant(x), self.constant(y)) {
                    _ if x == y => Compiled::Lit(true),
                    (Some(cx), Some(cy)) => Compiled::Lit(cx == cy),
                    _ => Compiled::Eq(x, y),
                }
            }
            Formula::And(a, b) => Compiled::And(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            Formula::Or(a, b) => Compiled::Or(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            Formula::Imp(a, b) => Compiled::Or(
                Box::new(Compiled::Not(Box::new(self.formula(a)?))),
                Box::new(self.formula(b)?),
            ),
            Formula::Not(a) => Compiled::Not(Box::new(self.formula(a)?)),
            Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
                debug_assert_eq!(vs.len(), 1, "normalized binders");
                let slot = self.slot_level.len() as u32;
                self.slot_level.push(self.scope.len());
                self.slot_used.push(false);
                self.slot_node.push(0);
                let node = self.intern(Node::Slot(slot));
                self.slot_node[slot as usize] = node;
                self.scope.push((vs[0].clone(), slot));
                let body = self.formula(body)?;
                self.scope.pop();
                let exists = matches!(f, Formula::Exists(..));
                if !self.slot_used[slot as usize] {
                    // the domain is nonempty, so an unused binder is inert
                    body
                } else {
                    Compiled::Quant {
                        exists,
                        slot,
                        body: Box::new(body),
                    }
                }
            }
            Formula::ExistsRel(..) | Formula::ForallRel(..) => {
                return Err(Error::unsupported(
                    "relativized quantifiers cannot be evaluated over a finite field",
                ))
            }
            Formula::Macro(name, _) => {
                return Err(Error::unsupported(format!("macro {name} cannot be expanded")))
            }
        })
    }
}

struct Program {
    arith: Arith,
    q: u32,
    nodes: Vec<Node>,
    initial: Vec<u32>,
    /// Nodes to recompute when a binder's variable changes, in
    /// dependency order; the first entry is the slot node itself.
    owned: Vec<Vec<u32>>,
    root: Compiled,
}

impl Program {
    #[inline]
    fn assign(&self, slot: u32, v: u32, st: &mut [u32]) {
        let owned = &self.owned[slot as usize];
        st[owned[0] as usize] = v;
        for &n in &owned[1..] {
            st[n as usize] = match self.nodes[n as usize] {
                Node::Add(a, b) => self.arith.add(st[a as usize], st[b as usize]),
                Node::Mul(a, b) => self.arith.mul(st[a as usize], st[b as usize]),
                Node::Neg(a) => self.arith.neg(st[a as usize]),
                Node::Const(c) => c,
                Node::Slot(_) => unreachable!(),
            };
        }
    }

    fn eval(&self, c: &Compiled, st: &mut [u32], top: bool, mode: EvalMode) -> bool {
        match c {
            Compiled::Lit(b) => *b,
            Compiled::Eq(a, b) => st[*a as usize] == st[*b as usize],
            Compiled::And(a, b) => self.eval(a, st, top, mode) && self.eval(b, st, top, mode),
            Compiled::Or(a, b) => self.eval(a, st, top, mode) || self.eval(b, st, top, mode),
            Compiled::Not(a) => !self.eval(a, st, top, mode),
            Compiled::Quant { exists, slot, body } => {
                if top && mode == EvalMode::Parallel {
                    return self.eval_parallel(*exists, *slot, body, st);
                }
                for v in 0..self.q {
                    self.assign(*slot, v, st);
                    if self.eval(body, st, false, mode) == *exists {
                        return *exists;
                    }
                }
                !*exists
            }
        }
    }

    #[cfg(feature = "parallel")]
    fn eval_parallel(&self, exists: bool, slot: u32, body: &Compiled, st: &[u32]) -> bool {
        use rayon::prelude::*;
        let hit = (0..self.q).into_par_iter().map_init(
            || st.to_vec(),
            |local, v| {
                self.assign(slot, v, local);
                self.eval(body, local, false, EvalMode::Sequential) == exists
            },
        );
        let found = hit.any(|b| b);
        if found {
            exists
        } else {
            !exists
        }
    }

    #[cfg(not(feature = "parallel"))]
    fn eval_parallel(&self, exists: bool, slot: u32, body: &Compiled, st: &[u32]) -> bool {
        let mut local = st.to_vec();
        for v in 0..self.q {
            self.assign(slot, v, &mut local);
            if self.eval(body, &mut local, false, EvalMode::Sequential) == exists {
                return exists;
            }
        }
        !exists
    }
}

fn compile(f: &Formula, field: &Field, assignment: &BTreeMap<String, Elem>) -> Result<Program> {
    let q = field
        .size_u64()
        .ok_or_else(|| Error::pre(format!("{field} is not a finite field")))?;
    if q > EVAL_LIMIT {
        return Err(Error::pre(format!(
            "{field} has {q} elements; exhaustive evaluation is limited to {EVAL_LIMIT}"
        )));
    }
    let mut blocker = None;
    f.walk(&mut |g| match g {
        Formula::Macro(name, _) if blocker.is_none() => {
            blocker = Some(Error::unsupported(format!("macro {name} cannot be expanded")))
        }
        Formula::ExistsRel(..) | Formula::ForallRel(..) if blocker.is_none() => {
            blocker = Some(Error::unsupported(
                "relativized quantifiers cannot be evaluated over a finite field",
            ))
        }
        _ => {}
    });
    if let Some(e) = blocker {
        return Err(e);
    }
    let arith = Arith::new(field, q)?;
    let mut free = HashMap::new();
    for v in f.free_vars() {
        let e = assignment
            .get(&v)
            .ok_or_else(|| Error::pre(format!("unbound free variable {v}")))?;
        field.check(e)?;
        free.insert(v, field.index_of(e)? as u32);
    }
    let normalized = normalize(f);
    let mut c = Compiler {
        arith: &arith,
        nodes: Vec::new(),
        owner: Vec::new(),
        memo: HashMap::new(),
        slot_level: Vec::new(),
        slot_node: Vec::new(),
        slot_used: Vec::new(),
        scope: Vec::new(),
        free,
    };
    let root = c.formula(&normalized)?;
    let mut owned: Vec<Vec<u32>> = c.slot_node.iter().map(|&n| vec![n]).collect();
    let mut initial = vec![0u32; c.nodes.len()];
    for (id, node) in c.nodes.iter().enumerate() {
        match (node, c.owner[id]) {
            (Node::Const(v), _) => initial[id] = *v,
            (Node::Slot(_), _) => {}
            (_, Some(s)) => owned[s as usize].push(id as u32),
            (_, None) => unreachable!("non-constant node without owner"),
        }
    }
    let nodes = c.nodes;
    Ok(Program {
        arith,
        q: q as u32,
        nodes,
        initial,
        owned,
        root,
    })
}

/// Truth value of `f` over the finite field `field`, with free variables
/// read from `assignment`, using the default [`EvalMode`].
pub fn eval_sentence(f: &Formula, field: &Field, assignment: &BTreeMap<String, Elem>) -> Result<bool> {
    eval_sentence_with(f, field, assignment, EvalMode::default())
}

pub fn eval_sentence_with(
    f: &Formula,
    field: &Field,
    assignment: &BTreeMap<String, Elem>,
    mode: EvalMode,
) -> Result<bool> {
    let prog = compile(f, field, assignment)?;
    let mut st = prog.initial.clone();
    Ok(prog.eval(&prog.root, &mut st, true, mode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::*;

    fn holds(text: &str, field: &str) -> bool {
        let f = parse_formula(text).unwrap();
        let k: Field = field.parse().unwrap();
        eval_sentence(&f, &k, &BTreeMap::new()).unwrap()
    }

    #[test]
    fn minus_one_is_a_square_mod_5_not_mod_7() {
        assert!(holds("(exists (x) (= (* x x) (- 1)))", "Fp:5"));
        assert!(!holds("(exists (x) (= (* x x) (- 1)))", "Fp:7"));
    }

    #[test]
    fn frobenius_is_surjective_in_f2() {
        assert!(holds("(forall (x) (exists (y) (= (* y y) x)))", "Fp:2"));
        assert!(!holds("(forall (x) (exists (y) (= (* y y) x)))", "Fp:3"));
    }

    #[test]
    fn extension_fields_and_shadowing() {
        // F_4 has a primitive cube root of unity
        assert!(holds(
            "(exists (w) (and (not (= w 1)) (= (* w (* w w)) 1)))",
            "Fq:2^2/[1,1,1]"
        ));
        // inner x shadows outer x
        assert!(holds("(forall (x) (exists (x) (= x 0)))", "Fp:3"));
    }

    #[test]
    fn free_variables_and_errors() {
        let k = Field::fp(5).unwrap();
        let f = parse_formula("(exists (y) (= (* y y) a))").unwrap();
        let mut asg = BTreeMap::new();
        assert!(eval_sentence(&f, &k, &asg).is_err());
        asg.insert("a".to_string(), Elem::Int(4));
        assert!(eval_sentence(&f, &k, &asg).unwrap());
        asg.insert("a".to_string(), Elem::Int(2));
        assert!(!eval_sentence(&f, &k, &asg).unwrap());
        assert!(eval_sentence(&f, &Field::Q, &asg).is_err());
        let m = parse_formula("(macro poonen_psi x)").unwrap();
        assert!(matches!(eval_sentence(&m, &k, &asg), Err(Error::Unsupported(_))));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let f = parse_formula(
            "(forall (a b) (exists (x y) (= (+ (* a (* x x)) (* b (* y y))) (+ 1 1))))",
        )
        .unwrap();
        for q in [3u64, 5, 7, 9] {
            let k = Field::finite(q).unwrap();
            let s = eval_sentence_with(&f, &k, &BTreeMap::new(), EvalMode::Sequential).unwrap();
            let p = eval_sentence_with(&f, &k, &BTreeMap::new(), EvalMode::Parallel).unwrap();
            assert_eq!(s, p);
        }
    }
}
