//! Mod-2 Milnor symbols: boundary maps, triviality in the decidable
//! regimes, local invariants over `Q` and Weil reciprocity.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::algebra::{Elem, Field};
use crate::error::{Error, Result};
use crate::quadform::{self, hilbert_symbol};
use crate::valuation::{self, Place};

/// A formal `Z/2`-combination of symbols `{a₁,…,a_r}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolSum {
    pub field: Field,
    pub r: usize,
    pub terms: Vec<Vec<Elem>>,
}

impl SymbolSum {
    pub fn new(field: Field, r: usize, terms: Vec<Vec<Elem>>) -> Result<Self> {
        for t in &terms {
            if t.len() != r {
                return Err(Error::pre(format!("symbol of length {} in a sum of arity {r}", t.len())));
            }
            for x in t {
                field.check(x)?;
                if x.is_zero() {
                    return Err(Error::pre("symbol entries must be nonzero"));
                }
            }
        }
        Ok(SymbolSum { field, r, terms })
    }

    pub fn single(field: Field, entries: Vec<Elem>) -> Result<Self> {
        let r = entries.len();
        SymbolSum::new(field, r, vec![entries])
    }

    pub fn zero(field: Field, r: usize) -> Self {
        SymbolSum { field, r, terms: Vec::new() }
    }

    pub fn plus(mut self, other: &SymbolSum) -> Result<Self> {
        if self.field != other.field || self.r != other.r {
            return Err(Error::Mismatch("adding symbols of different shape".into()));
        }
        self.terms.extend(other.terms.iter().cloned());
        Ok(self)
    }

    /// Drops symbols with a square entry and cancels equal pairs. Squareness
    /// is only tested where it is decidable.
    pub fn normalize(&self) -> Result<Self> {
        let mut counts: BTreeMap<Vec<Elem>, usize> = BTreeMap::new();
        'terms: for t in &self.terms {
            for x in t {
                if self.field.is_square(x).unwrap_or(false) {
                    continue 'terms;
                }
            }
            *counts.entry(t.clone()).or_default() += 1;
        }
        let terms = counts
            .into_iter()
            .filter(|(_, n)| n % 2 == 1)
            .map(|(t, _)| t)
            .collect();
        Ok(SymbolSum { terms, ..self.clone() })
    }

    pub fn show(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let es: Vec<String> = t.iter().map(|x| self.field.show(x)).collect();
                format!("{{{}}}", es.join(", "))
            })
            .collect();
        parts.join(" + ")
    }
}

/// Boundary `∂_v` into the symbols of `κ(v)`.
///
/// With `aᵢ = π^{nᵢ} uᵢ`, a symbol expands into terms where a set `S` of
/// positions carries `π`; `{π,…,π}` with `s` copies equals `{π, −1,…,−1}`,
/// so the term contributes `{−1 (s−1 times), ūⱼ (j ∉ S)}` when `∏_{i∈S} nᵢ`
/// is odd.
pub fn boundary(s: &SymbolSum, v: &Place) -> Result<SymbolSum> {
    let k = &s.field;
    if s.r == 0 {
        return Err(Error::pre("boundary needs symbols of arity ≥ 1"));
    }
    let kappa = valuation::residue_field(k, v)?;
    let pi = valuation::uniformizer(k, v)?;
    let minus_one = kappa.neg(&kappa.one());
    let mut out = Vec::new();
    for t in &s.terms {
        let mut orders = Vec::with_capacity(t.len());
        let mut units = Vec::with_capacity(t.len());
        for a in t {
            let n = valuation::order(k, v, a)?;
            let u = k.mul(a, &k.pow_i64(&pi, -n)?);
            orders.push(n);
            units.push(valuation::residue(k, v, &u)?);
        }
        for mask in 1u32..(1 << s.r) {
            let odd = (0..s.r).filter(|i| mask & (1 << i) != 0).all(|i| orders[i] % 2 != 0);
            if !odd {
                continue;
            }
            let count = mask.count_ones() as usize;
            let mut entry = vec![minus_one.clone(); count - 1];
            entry.extend((0..s.r).filter(|i| mask & (1 << i) == 0).map(|i| units[i].clone()));
            out.push(entry);
        }
    }
    SymbolSum::new(kappa, s.r - 1, out)?.normalize()
}

fn product(k: &Field, xs: impl Iterator<Item = Elem>) -> Elem {
    xs.fold(k.one(), |acc, x| k.mul(&acc, &x))
}

fn undecidable(s: &SymbolSum) -> Error {
    Error::Undecidable(format!("triviality of {}-fold symbols over {}", s.r, s.field))
}

/// Decides whether the sum vanishes in `K^M_r(K)/2`, where this is decidable.
pub fn is_trivial(s: &SymbolSum) -> Result<bool> {
    let k = &s.field;
    if s.r == 0 {
        return Ok(s.terms.len() % 2 == 0);
    }
    if s.r == 1 {
        let p = product(k, s.terms.iter().map(|t| t[0].clone()));
        return match k {
            _ if k.is_finite() => k.is_square(&p),
            Field::Q | Field::RatFunc { .. } => k.is_square(&p),
            _ => Err(undecidable(s)),
        };
    }
    if k.is_finite() {
        return Ok(true);
    }
    match k {
        Field::Q if s.r == 2 => {
            let rats: Vec<(BigRational, BigRational)> = s
                .terms
                .iter()
                .map(|t| (t[0].as_rat().unwrap().clone(), t[1].as_rat().unwrap().clone()))
                .collect();
            let mut ints: Vec<BigInt> = Vec::new();
            for (a, b) in &rats {
                ints.extend([a.numer() * a.denom(), b.numer() * b.denom()]);
            }
            for v in quadform::relevant_places(&ints) {
                let mut sign = 1;
                for (a, b) in &rats {
                    sign *= hilbert_symbol(a, b, &v)?;
                }
                if sign != 1 {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Field::Q if s.r == 3 => {
            let negative = |x: &Elem| x.as_rat().map_or(false, |r| r < &BigRational::from_integer(0.into()));
            let count = s.terms.iter().filter(|t| t.iter().all(negative)).count();
            Ok(count % 2 == 0)
        }
        Field::RatFunc { base, .. } if base.is_finite() => {
            if s.r >= 3 {
                return Ok(true);
            }
            if base.characteristic() == 2 {
                return Err(undecidable(s));
            }
            if let [t] = s.terms.as_slice() {
                return quadform::pfister2_trivial_ratfunc(k, &t[0], &t[1]);
            }
            let entries: Vec<Elem> = s.terms.iter().flatten().cloned().collect();
            for v in quadform::symbol_places(k, &entries)? {
                let kappa = valuation::residue_field(k, &v)?;
                let mut acc = kappa.one();
                for t in &s.terms {
                    acc = kappa.mul(&acc, &valuation::tame_symbol(k, &v, &t[0], &t[1])?);
                }
                if !kappa.is_square(&acc)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => Err(undecidable(s)),
    }
}

/// Nonzero local invariants `inv_v ∈ Z/2` of the quaternion algebra
/// `(a, b)` over `Q`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LocalInvariantMap {
    pub invariants: BTreeMap<String, u8>,
}

impl LocalInvariantMap {
    pub fn total(&self) -> u8 {
        self.invariants.values().fold(0, |a, b| (a + b) % 2)
    }
}

pub fn hbn_invariants(a: &BigRational, b: &BigRational) -> Result<LocalInvariantMap> {
    let ints = [a.numer() * a.denom(), b.numer() * b.denom()];
    let mut out = LocalInvariantMap::default();
    for v in quadform::relevant_places(&ints) {
        if hilbert_symbol(a, b, &v)? == -1 {
            out.invariants.insert(v.show(&Field::Q), 1);
        }
    }
    Ok(out)
}

/// Weil reciprocity modulo squares: the norms of all tame symbols of
/// `{f, g}` multiply to a square of the constant field.
pub fn reciprocity_check(k: &Field, f: &Elem, g: &Elem) -> Result<bool> {
    let base = match k {
        Field::RatFunc { base, .. } if base.is_finite() => base,
        _ => return Err(Error::pre(format!("{k} is not F_q(t)"))),
    };
    if base.characteristic() == 2 {
        return Err(Error::unsupported("characteristic 2"));
    }
    let mut acc = base.one();
    for v in quadform::symbol_places(k, &[f.clone(), g.clone()])? {
        let kappa = valuation::residue_field(k, &v)?;
        let t = valuation::tame_symbol(k, &v, f, g)?;
        acc = base.mul(&acc, &valuation::residue_norm(&kappa, base, &t)?);
    }
    base.is_square(&acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5t() -> Field {
        Field::rat_func(Field::fp(5).unwrap(), "t")
    }

    #[test]
    fn boundaries() {
        let k = f5t();
        let el = |s: &str| k.parse_elem(s).unwrap();
        let at0 = Place::parse(&k, "irr:[0,1]").unwrap();
        let at1 = Place::parse(&k, "irr:[4,1]").unwrap();
        let b = boundary(&SymbolSum::single(k.clone(), vec![el("t"), el("2")]).unwrap(), &at0).unwrap();
        assert_eq!(b.terms, vec![vec![Elem::Int(2)]]);
        assert!(!is_trivial(&b).unwrap());
        let st = boundary(&SymbolSum::single(k.clone(), vec![el("t"), el("1-t")]).unwrap(), &at0).unwrap();
        assert!(is_trivial(&st).unwrap());
        let c = boundary(&SymbolSum::single(k.clone(), vec![el("t"), el("3")]).unwrap(), &at1).unwrap();
        assert!(c.terms.is_empty());
        // {t, t} = {t, −1}; −1 is a square mod 5
        let tt = boundary(&SymbolSum::single(k.clone(), vec![el("t"), el("t")]).unwrap(), &at0).unwrap();
        assert!(tt.terms.is_empty());
    }

    #[test]
    fn triviality_table() {
        let f5 = Field::fp(5).unwrap();
        assert!(!is_trivial(&SymbolSum::single(f5.clone(), vec![Elem::Int(2)]).unwrap()).unwrap());
        assert!(is_trivial(&SymbolSum::single(f5, vec![Elem::Int(2), Elem::Int(2)]).unwrap()).unwrap());
        let m1 = Elem::rat(-1, 1);
        let q = Field::Q;
        assert!(!is_trivial(&SymbolSum::single(q.clone(), vec![m1.clone(), m1.clone()]).unwrap()).unwrap());
        assert!(!is_trivial(&SymbolSum::single(q.clone(), vec![m1.clone(); 3]).unwrap()).unwrap());
        assert!(is_trivial(&SymbolSum::single(q.clone(), vec![m1.clone(), m1.clone(), Elem::rat(2, 1)]).unwrap()).unwrap());
        assert!(matches!(
            is_trivial(&SymbolSum::single(q, vec![m1.clone(); 4]).unwrap()),
            Err(Error::Undecidable(_))
        ));
        let k3 = Field::rat_func(Field::fp(3).unwrap(), "t");
        let el = |s: &str| k3.parse_elem(s).unwrap();
        assert!(is_trivial(&SymbolSum::single(k3.clone(), vec![el("t"), el("t+1"), el("t+2")]).unwrap()).unwrap());
        let qt = Field::rat_func(Field::Q, "t");
        let x = qt.parse_elem("t").unwrap();
        assert!(is_trivial(&SymbolSum::single(qt, vec![x.clone(), x]).unwrap()).is_err());
    }

    #[test]
    fn invariants() {
        let r = |n: i64| BigRational::from_integer(n.into());
        let m = hbn_invariants(&r(-1), &r(-1)).unwrap();
        assert_eq!(m.invariants.keys().cloned().collect::<Vec<_>>(), vec!["inf", "p:2"]);
        assert_eq!(m.total(), 0);
        assert!(hbn_invariants(&r(1), &r(7)).unwrap().invariants.is_empty());
        assert!(hbn_invariants(&r(-1), &r(5)).unwrap().invariants.is_empty());
    }

    #[test]
    fn reciprocity() {
        let k = f5t();
        let el = |s: &str| k.parse_elem(s).unwrap();
        assert!(reciprocity_check(&k, &el("t"), &el("1-t")).unwrap());
        let k3 = Field::rat_func(Field::fp(3).unwrap(), "t");
        let e3 = |s: &str| k3.parse_elem(s).unwrap();
        assert!(reciprocity_check(&k3, &e3("t"), &e3("t+1")).unwrap());
        assert!(reciprocity_check(&k3, &e3("t^2+1"), &e3("t^3+2*t+1")).unwrap());
    }
}
