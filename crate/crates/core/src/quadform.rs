//! Diagonal quadratic forms, Pfister forms and isotropy deciders.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{integer, Elem, Field};
use crate::error::{Error, Result};
use crate::valuation::{self, Place};

/// `Σ cᵢ xᵢ²` over a field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalQuadraticForm {
    pub field: Field,
    pub coefficients: Vec<Elem>,
}

impl DiagonalQuadraticForm {
    pub fn new(field: Field, coefficients: Vec<Elem>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::pre("a form needs at least one coefficient"));
        }
        for c in &coefficients {
            field.check(c)?;
        }
        Ok(DiagonalQuadraticForm { field, coefficients })
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_degenerate(&self) -> bool {
        self.coefficients.iter().any(Elem::is_zero)
    }

    pub fn show(&self) -> String {
        let cs: Vec<String> = self.coefficients.iter().map(|c| self.field.show(c)).collect();
        format!("<{}>", cs.join(", "))
    }
}

/// `⟨⟨a₁,…,a_r⟩⟩ = ⊗ ⟨1, −aᵢ⟩`. Entry `i` of the result is the product of
/// `−aⱼ` over the set bits `j` of `i`.
pub fn pfister(field: &Field, a: &[Elem]) -> Result<DiagonalQuadraticForm> {
    for x in a {
        field.check(x)?;
        if x.is_zero() {
            return Err(Error::pre("Pfister form entries must be nonzero"));
        }
    }
    let mut coeffs = vec![field.one()];
    for x in a {
        let nx = field.neg(x);
        let scaled: Vec<Elem> = coeffs.iter().map(|c| field.mul(c, &nx)).collect();
        coeffs.extend(scaled);
    }
    DiagonalQuadraticForm::new(field.clone(), coeffs)
}

pub fn evaluate(q: &DiagonalQuadraticForm, x: &[Elem]) -> Result<Elem> {
    if x.len() != q.dim() {
        return Err(Error::pre(format!(
            "vector of length {} for a form of dimension {}",
            x.len(),
            q.dim()
        )));
    }
    let k = &q.field;
    let mut acc = k.zero();
    for (c, xi) in q.coefficients.iter().zip(x) {
        k.check(xi)?;
        acc = k.add(&acc, &k.mul(c, &k.mul(xi, xi)));
    }
    Ok(acc)
}

/// Isotropy over a finite field of odd or even characteristic.
pub fn isotropic_fq(q: &DiagonalQuadraticForm) -> Result<bool> {
    let k = &q.field;
    if !k.is_finite() {
        return Err(Error::pre(format!("{k} is not a finite field")));
    }
    if q.is_degenerate() {
        return Ok(true);
    }
    match q.dim() {
        1 => Ok(false),
        2 => {
            let c = &q.coefficients;
            k.is_square(&k.neg(&k.mul(&c[0], &c[1])))
        }
        _ => Ok(true),
    }
}

/// Integer in the square class of a nonzero rational.
fn square_class(r: &BigRational) -> BigInt {
    r.numer() * r.denom()
}

fn eps2(u: &BigInt) -> i32 {
    (u.mod_floor(&BigInt::from(4)).to_u32().unwrap() == 3) as i32
}

fn omega2(u: &BigInt) -> i32 {
    matches!(u.mod_floor(&BigInt::from(8)).to_u32().unwrap(), 3 | 5) as i32
}

/// Hilbert symbol `(a, b)_v` over `Q`.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, v: &Place) -> Result<i32> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::pre("Hilbert symbol of zero"));
    }
    let (a, b) = (square_class(a), square_class(b));
    match v {
        Place::QInfty => Ok(if a.is_negative() && b.is_negative() { -1 } else { 1 }),
        Place::QPrime(p) => {
            let (alpha, u) = integer::split_valuation(&a, p);
            let (beta, w) = integer::split_valuation(&b, p);
            if p == &BigInt::from(2) {
                let e = eps2(&u) * eps2(&w) + alpha as i32 * omega2(&w) + beta as i32 * omega2(&u);
                Ok(if e % 2 == 0 { 1 } else { -1 })
            } else {
                let ep = ((p - 1u32) / 2u32).is_odd() as i64;
                let mut s = if (alpha * beta * ep) % 2 == 0 { 1 } else { -1 };
                if beta % 2 != 0 {
                    s *= integer::legendre_big(&u, p);
                }
                if alpha % 2 != 0 {
                    s *= integer::legendre_big(&w, p);
                }
                Ok(s)
            }
        }
        _ => Err(Error::Mismatch("Hilbert symbols need a place of Q".into())),
    }
}

/// `∞`, `2` and the primes dividing any of the given integers.
pub fn relevant_places(xs: &[BigInt]) -> Vec<Place> {
    let mut primes: BTreeSet<BigInt> = BTreeSet::new();
    primes.insert(BigInt::from(2));
    for x in xs {
        for (p, _) in integer::factor(x) {
            primes.insert(p);
        }
    }
    let mut out = vec![Place::QInfty];
    out.extend(primes.into_iter().map(Place::QPrime));
    out
}

fn is_local_square(d: &BigInt, v: &Place) -> bool {
    match v {
        Place::QInfty => d.is_positive(),
        Place::QPrime(p) => {
            let (k, u) = integer::split_valuation(d, p);
            if k % 2 != 0 {
                return false;
            }
            if p == &BigInt::from(2) {
                u.mod_floor(&BigInt::from(8)).is_one()
            } else {
                integer::legendre_big(&u, p) == 1
            }
        }
        _ => false,
    }
}

fn rat(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

/// Isotropy over `Q` via local conditions.
pub fn isotropic_q(q: &DiagonalQuadraticForm) -> Result<bool> {
    if q.field != Field::Q {
        return Err(Error::Mismatch(format!("{} is not Q", q.field)));
    }
    if q.is_degenerate() {
        return Ok(true);
    }
    let c: Vec<BigInt> = q
        .coefficients
        .iter()
        .map(|x| square_class(x.as_rat().expect("checked")))
        .collect();
    match c.len() {
        1 => Ok(false),
        2 => Ok(integer::is_perfect_square(&-(&c[0] * &c[1]))),
        3 => {
            let s = -(&c[0] * &c[1]);
            let t = -(&c[0] * &c[2]);
            for v in relevant_places(&c) {
                if hilbert_symbol(&rat(&s), &rat(&t), &v)? != 1 {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        4 => {
            let d: BigInt = c.iter().product();
            let m1 = rat(&BigInt::from(-1));
            for v in relevant_places(&c) {
                if !is_local_square(&d, &v) {
                    continue;
                }
                let mut eps = 1;
                for i in 0..4 {
                    for j in i + 1..4 {
                        eps *= hilbert_symbol(&rat(&c[i]), &rat(&c[j]), &v)?;
                    }
                }
                if eps == -hilbert_symbol(&m1, &m1, &v)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => Ok(c.iter().any(|x| x.is_positive()) && c.iter().any(|x| x.is_negative())),
    }
}

/// Whether `⟨⟨a, b⟩⟩` is hyperbolic over `F_q(t)`, `q` odd, decided by the
/// tame residues at every place where `a` or `b` is not a unit.
pub fn pfister2_trivial_ratfunc(k: &Field, a: &Elem, b: &Elem) -> Result<bool> {
    let base = match k {
        Field::RatFunc { base, .. } if base.is_finite() => base,
        _ => return Err(Error::pre(format!("{k} is not a rational function field over a finite field"))),
    };
    if base.characteristic() == 2 {
        return Err(Error::unsupported("characteristic 2"));
    }
    if a.is_zero() || b.is_zero() {
        return Err(Error::pre("symbol entries must be nonzero"));
    }
    for v in symbol_places(k, &[a.clone(), b.clone()])? {
        let r = valuation::tame_symbol(k, &v, a, b)?;
        if !valuation::residue_field(k, &v)?.is_square(&r)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Places where some entry has nonzero order, plus the place at infinity.
pub fn symbol_places(k: &Field, xs: &[Elem]) -> Result<Vec<Place>> {
    let mut out: Vec<Place> = Vec::new();
    for x in xs {
        for (v, _) in valuation::support(k, x)? {
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    if !out.contains(&Place::FuncInfty) {
        out.push(Place::FuncInfty);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> Field {
        Field::fp(p).unwrap()
    }

    fn form(k: &Field, cs: &[i64]) -> DiagonalQuadraticForm {
        DiagonalQuadraticForm::new(k.clone(), cs.iter().map(|c| k.from_i64(*c)).collect()).unwrap()
    }

    #[test]
    fn pfister_expansion() {
        let q = Field::Q;
        let a = Elem::rat(3, 1);
        let b = Elem::rat(5, 1);
        assert_eq!(pfister(&q, &[a.clone()]).unwrap(), form(&q, &[1, -3]));
        assert_eq!(pfister(&q, &[a, b]).unwrap(), form(&q, &[1, -3, -5, 15]));
        assert_eq!(pfister(&q, &[]).unwrap(), form(&q, &[1]));
        assert!(pfister(&q, &[q.zero()]).is_err());
    }

    #[test]
    fn evaluation() {
        let f7 = fp(7);
        let q = form(&f7, &[1, 1, 1]);
        let x: Vec<Elem> = [1, 2, 3].iter().map(|c| f7.from_i64(*c)).collect();
        assert_eq!(evaluate(&q, &x).unwrap(), f7.zero());
        assert!(evaluate(&q, &x[..2]).is_err());
        let h = form(&Field::Q, &[1, -1]);
        assert!(evaluate(&h, &[Field::Q.one(), Field::Q.one()]).unwrap().is_zero());
    }

    #[test]
    fn finite_field_isotropy() {
        let f3 = fp(3);
        assert!(isotropic_fq(&form(&f3, &[1, -1])).unwrap());
        assert!(!isotropic_fq(&form(&f3, &[1, 1])).unwrap());
        assert!(isotropic_fq(&form(&fp(7), &[1, 1, 1])).unwrap());
        assert!(!isotropic_fq(&form(&f3, &[2])).unwrap());
        assert!(isotropic_fq(&form(&Field::Q, &[1])).is_err());
    }

    #[test]
    fn hilbert_examples() {
        let m1 = BigRational::from_integer((-1).into());
        let s = |v: Place| hilbert_symbol(&m1, &m1, &v).unwrap();
        assert_eq!(s(Place::QInfty), -1);
        assert_eq!(s(Place::QPrime(2.into())), -1);
        assert_eq!(s(Place::QPrime(5.into())), 1);
        let two = BigRational::from_integer(2.into());
        let five = BigRational::from_integer(5.into());
        // 2 is not a norm from Q_5(√5)
        assert_eq!(hilbert_symbol(&two, &five, &Place::QPrime(5.into())).unwrap(), -1);
    }

    #[test]
    fn rational_isotropy() {
        let q = Field::Q;
        assert!(!isotropic_q(&form(&q, &[1, 1, 1])).unwrap());
        assert!(isotropic_q(&form(&q, &[1, 1, -2])).unwrap());
        assert!(isotropic_q(&form(&q, &[1, 1, 1, 1, -7])).unwrap());
        assert!(!isotropic_q(&form(&q, &[1, 1, 1, -7])).unwrap());
        assert!(isotropic_q(&form(&q, &[1, 1, 1, -3])).unwrap());
        assert!(isotropic_q(&form(&q, &[1, -4])).unwrap());
        assert!(!isotropic_q(&form(&q, &[1, -2])).unwrap());
        assert!(isotropic_q(&form(&q, &[0, 1])).unwrap());
    }

    #[test]
    fn function_field_symbols() {
        let k = Field::rat_func(fp(5), "t");
        let el = |s: &str| k.parse_elem(s).unwrap();
        assert!(!pfister2_trivial_ratfunc(&k, &el("t"), &el("2")).unwrap());
        assert!(pfister2_trivial_ratfunc(&k, &el("t"), &el("1-t")).unwrap());
        assert!(pfister2_trivial_ratfunc(&k, &el("2"), &el("3")).unwrap());
        let k2 = Field::rat_func(fp(2), "t");
        assert!(pfister2_trivial_ratfunc(&k2, &k2.one(), &k2.one()).is_err());
    }
}
