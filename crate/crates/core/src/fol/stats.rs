//! Size and quantifier-structure statistics.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{Formula, Term};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormulaStats {
    /// Formula, term and set-reference nodes.
    pub node_count: usize,
    /// Largest number of bound variables on a root-to-leaf path.
    pub quantifier_depth: usize,
    /// Largest number of quantifier-kind changes on a path, after
    /// accounting for polarity and merging adjacent same-kind blocks.
    pub alternation_count: usize,
    pub macro_names: BTreeSet<String>,
}

fn term_nodes(t: &Term) -> usize {
    match t {
        Term::Var(_) | Term::Zero | Term::One => 1,
        Term::Add(a, b) | Term::Mul(a, b) => 1 + term_nodes(a) + term_nodes(b),
        Term::Neg(a) => 1 + term_nodes(a),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Exists,
    Forall,
}

struct Acc {
    nodes: usize,
    depth: usize,
    blocks: usize,
}

/// `positive` is the polarity of the current position; `last` the kind of
/// the innermost enclosing quantifier block.
fn walk(f: &Formula, positive: bool, last: Option<Kind>, depth: usize, blocks: usize, acc: &mut Acc) {
    acc.nodes += 1;
    acc.depth = acc.depth.max(depth);
    acc.blocks = acc.blocks.max(blocks);
    let quant = |exists: bool, n: usize, body: &Formula, acc: &mut Acc| {
        let kind = if exists == positive { Kind::Exists } else { Kind::Forall };
        let blocks = if last == Some(kind) { blocks } else { blocks + 1 };
        walk(body, positive, Some(kind), depth + n, blocks, acc);
    };
    match f {
        Formula::Eq(a, b) => acc.nodes += term_nodes(a) + term_nodes(b),
        Formula::Macro(_, args) => acc.nodes += args.iter().map(term_nodes).sum::<usize>(),
        Formula::And(a, b) | Formula::Or(a, b) => {
            walk(a, positive, last, depth, blocks, acc);
            walk(b, positive, last, depth, blocks, acc);
        }
        Formula::Imp(a, b) => {
            walk(a, !positive, last, depth, blocks, acc);
            walk(b, positive, last, depth, blocks, acc);
        }
        Formula::Not(a) => walk(a, !positive, last, depth, blocks, acc),
        Formula::Exists(vs, body) => quant(true, vs.len(), body, acc),
        Formula::Forall(vs, body) => quant(false, vs.len(), body, acc),
        Formula::ExistsRel(s, vs, body) | Formula::ForallRel(s, vs, body) => {
            acc.nodes += 1 + s.term().map_or(0, term_nodes);
            quant(matches!(f, Formula::ExistsRel(..)), vs.len(), body, acc);
        }
    }
}

pub fn stats(f: &Formula) -> FormulaStats {
    let mut acc = Acc {
        nodes: 0,
        depth: 0,
        blocks: 0,
    };
    walk(f, true, None, 0, 0, &mut acc);
    FormulaStats {
        node_count: acc.nodes,
        quantifier_depth: acc.depth,
        alternation_count: acc.blocks.saturating_sub(1),
        macro_names: f.macro_names(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::*;

    #[test]
    fn quantifier_free() {
        let s = stats(&eq(zero(), zero()));
        assert_eq!(s.node_count, 3);
        assert_eq!((s.quantifier_depth, s.alternation_count), (0, 0));
    }

    #[test]
    fn three_blocks_two_alternations() {
        let f = exists(&["x"], forall(&["y"], exists(&["z"], eq(var("x"), var("z")))));
        let s = stats(&f);
        assert_eq!((s.quantifier_depth, s.alternation_count), (3, 2));
    }

    #[test]
    fn negation_flips_polarity() {
        // ∃x ¬∃y φ is ∃x ∀y ¬φ
        let f = exists(&["x"], not(exists(&["y"], eq(var("x"), var("y")))));
        assert_eq!(stats(&f).alternation_count, 1);
        // ∃x ∃y φ merges into one block
        let g = exists(&["x"], exists(&["y"], eq(var("x"), var("y"))));
        assert_eq!(stats(&g).alternation_count, 0);
        // antecedent of an implication is negative
        let h = forall(&["x"], imp(forall(&["y"], eq(var("x"), var("y"))), truth()));
        assert_eq!(stats(&h).alternation_count, 1);
    }
}
