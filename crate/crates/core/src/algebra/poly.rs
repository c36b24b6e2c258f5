//! Dense univariate polynomials over a [`Field`].

use num_bigint::BigUint;

use super::{Elem, Field};
use crate::error::{Error, Result};

/// Coefficients in ascending degree; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly(Vec<Elem>);

impl Poly {
    pub fn new(mut coeffs: Vec<Elem>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn zero() -> Poly {
        Poly(Vec::new())
    }

    pub fn one(base: &Field) -> Poly {
        Poly(vec![base.one()])
    }

    pub fn constant(_base: &Field, c: Elem) -> Poly {
        Poly::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x(base: &Field) -> Poly {
        Poly(vec![base.zero(), base.one()])
    }

    pub fn monomial(base: &Field, c: Elem, deg: usize) -> Poly {
        let mut v = vec![base.zero(); deg];
        v.push(c);
        Poly::new(v)
    }

    /// Builds a polynomial from small integer coefficients (ascending).
    pub fn from_i64s(base: &Field, cs: &[i64]) -> Poly {
        Poly::new(cs.iter().map(|c| base.from_i64(*c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    /// Leading coefficient; panics on the zero polynomial.
    pub fn lead(&self) -> &Elem {
        self.0.last().expect("leading coefficient of zero polynomial")
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.0
    }

    pub fn coeff(&self, base: &Field, i: usize) -> Elem {
        self.0.get(i).cloned().unwrap_or_else(|| base.zero())
    }

    pub fn is_monic(&self, base: &Field) -> bool {
        !self.is_zero() && *self.lead() == base.one()
    }
}

pub fn add(base: &Field, a: &Poly, b: &Poly) -> Poly {
    let n = a.0.len().max(b.0.len());
    let mut v = Vec::with_capacity(n);
    for i in 0..n {
        match (a.0.get(i), b.0.get(i)) {
            (Some(x), Some(y)) => v.push(base.add(x, y)),
            (Some(x), None) | (None, Some(x)) => v.push(x.clone()),
            (None, None) => unreachable!(),
        }
    }
    Poly::new(v)
}

pub fn neg(base: &Field, a: &Poly) -> Poly {
    Poly(a.0.iter().map(|c| base.neg(c)).collect())
}

pub fn sub(base: &Field, a: &Poly, b: &Poly) -> Poly {
    add(base, a, &neg(base, b))
}

pub fn scale(base: &Field, a: &Poly, c: &Elem) -> Poly {
    if c.is_zero() {
        return Poly::zero();
    }
    Poly::new(a.0.iter().map(|x| base.mul(x, c)).collect())
}

pub fn mul(base: &Field, a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() || b.is_zero() {
        return Poly::zero();
    }
    let mut v = vec![base.zero(); a.0.len() + b.0.len() - 1];
    for (i, x) in a.0.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.0.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            v[i + j] = base.add(&v[i + j], &base.mul(x, y));
        }
    }
    Poly::new(v)
}

pub fn pow(base: &Field, a: &Poly, e: u64) -> Poly {
    let mut result = Poly::one(base);
    let mut b = a.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = mul(base, &result, &b);
        }
        e >>= 1;
        if e > 0 {
            b = mul(base, &b, &b);
        }
    }
    result
}

/// Quotient and remainder; panics if `b` is zero.
pub fn divrem(base: &Field, a: &Poly, b: &Poly) -> (Poly, Poly) {
    let db = b.degree().expect("division by zero polynomial");
    let lead_inv = base.inv(b.lead()).expect("nonzero leading coefficient");
    let mut r = a.0.clone();
    if r.len() <= db {
        return (Poly::zero(), a.clone());
    }
    let mut q = vec![base.zero(); r.len() - db];
    for i in (db..r.len()).rev() {
        let c = &r[i];
        if c.is_zero() {
            continue;
        }
        let f = base.mul(c, &lead_inv);
        for (j, bj) in b.0.iter().enumerate() {
            let idx = i - db + j;
            r[idx] = base.sub(&r[idx], &base.mul(&f, bj));
        }
        q[i - db] = f;
    }
    r.truncate(db);
    (Poly::new(q), Poly::new(r))
}

pub fn rem(base: &Field, a: &Poly, b: &Poly) -> Poly {
    divrem(base, a, b).1
}

/// Quotient of an exact division.
pub fn exact_div(base: &Field, a: &Poly, b: &Poly) -> Poly {
    let (q, r) = divrem(base, a, b);
    debug_assert!(r.is_zero(), "inexact polynomial division");
    q
}

/// Leading coefficient and the monic associate.
pub fn monic(base: &Field, a: &Poly) -> Result<(Elem, Poly)> {
    if a.is_zero() {
        return Err(Error::pre("zero polynomial has no monic associate"));
    }
    let lc = a.lead().clone();
    let inv = base.inv(&lc)?;
    Ok((lc, scale(base, a, &inv)))
}

/// Monic gcd (zero if both inputs are zero).
pub fn gcd(base: &Field, a: &Poly, b: &Poly) -> Poly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_zero() {
        let r = rem(base, &x, &y);
        x = y;
        y = r;
    }
    if x.is_zero() {
        x
    } else {
        monic(base, &x).unwrap().1
    }
}

/// `(g, s, t)` with `s·a + t·b = g`, `g` the monic gcd.
pub fn ext_gcd(base: &Field, a: &Poly, b: &Poly) -> Result<(Poly, Poly, Poly)> {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Poly::one(base), Poly::zero());
    let (mut t0, mut t1) = (Poly::zero(), Poly::one(base));
    while !r1.is_zero() {
        let (q, r) = divrem(base, &r0, &r1);
        let s = sub(base, &s0, &mul(base, &q, &s1));
        let t = sub(base, &t0, &mul(base, &q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    if r0.is_zero() {
        return Err(Error::pre("gcd of two zero polynomials"));
    }
    let inv = base.inv(r0.lead())?;
    Ok((
        scale(base, &r0, &inv),
        scale(base, &s0, &inv),
        scale(base, &t0, &inv),
    ))
}

/// Horner evaluation at a point of a field containing the coefficients
/// via `embed`.
pub fn eval(base: &Field, a: &Poly, x: &Elem) -> Elem {
    let mut acc = base.zero();
    for c in a.0.iter().rev() {
        acc = base.add(&base.mul(&acc, x), c);
    }
    acc
}

/// Evaluates `a` (over `base`) at `x ∈ ext`, where `ext` embeds `base`.
pub fn eval_in(base: &Field, ext: &Field, a: &Poly, x: &Elem) -> Elem {
    let _ = base;
    let mut acc = ext.zero();
    for c in a.0.iter().rev() {
        acc = ext.add(&ext.mul(&acc, x), &ext.embed(c));
    }
    acc
}

pub fn derivative(base: &Field, a: &Poly) -> Poly {
    Poly::new(
        a.0.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| base.mul(c, &base.from_i64(i as i64)))
            .collect(),
    )
}

/// `a^e mod m`.
pub fn pow_mod(base: &Field, a: &Poly, e: &BigUint, m: &Poly) -> Poly {
    let mut result = Poly::one(base);
    let a = rem(base, a, m);
    for i in (0..e.bits()).rev() {
        result = rem(base, &mul(base, &result, &result), m);
        if e.bit(i) {
            result = rem(base, &mul(base, &result, &a), m);
        }
    }
    rem(base, &result, m)
}

/// Polynomial composition `a(b(x))`.
pub fn compose(base: &Field, a: &Poly, b: &Poly) -> Poly {
    let mut acc = Poly::zero();
    for c in a.0.iter().rev() {
        acc = add(base, &mul(base, &acc, b), &Poly::constant(base, c.clone()));
    }
    acc
}

/// A polynomial square root, if `a` is a square in `base[x]`.
pub fn sqrt(base: &Field, a: &Poly) -> Result<Option<Poly>> {
    if a.is_zero() {
        return Ok(Some(Poly::zero()));
    }
    let deg = a.degree().unwrap();
    if deg % 2 == 1 {
        return Ok(None);
    }
    let m = deg / 2;
    let candidate = if base.characteristic() == 2 {
        let mut cs = Vec::with_capacity(m + 1);
        for (i, c) in a.0.iter().enumerate() {
            if i % 2 == 1 {
                if !c.is_zero() {
                    return Ok(None);
                }
                continue;
            }
            match base.sqrt(c)? {
                Some(s) => cs.push(s),
                None => return Ok(None),
            }
        }
        Poly::new(cs)
    } else {
        let top = match base.sqrt(a.lead())? {
            Some(s) => s,
            None => return Ok(None),
        };
        let denom = base.inv(&base.mul(&base.from_i64(2), &top))?;
        let mut s = vec![base.zero(); m + 1];
        s[m] = top;
        for k in 1..=m {
            // coefficient of x^(2m−k) in s², excluding the 2·s_m·s_{m−k} term
            let target = 2 * m - k;
            let mut acc = a.coeff(base, target);
            for i in (m - k + 1)..=m {
                let j = target - i;
                if j > m || j <= m - k {
                    continue;
                }
                acc = base.sub(&acc, &base.mul(&s[i], &s[j]));
            }
            s[m - k] = base.mul(&acc, &denom);
        }
        Poly::new(s)
    };
    if mul(base, &candidate, &candidate) == *a {
        Ok(Some(candidate))
    } else {
        Ok(None)
    }
}

pub fn is_square(base: &Field, a: &Poly) -> Result<bool> {
    Ok(sqrt(base, a)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_identity() {
        let k = Field::fp(7).unwrap();
        let a = Poly::from_i64s(&k, &[3, 0, 5, 1, 2]);
        let b = Poly::from_i64s(&k, &[1, 2, 1]);
        let (q, r) = divrem(&k, &a, &b);
        assert_eq!(add(&k, &mul(&k, &q, &b), &r), a);
        assert!(r.degree().unwrap() < 2);
    }

    #[test]
    fn bezout_over_rationals() {
        let k = Field::Q;
        let a = Poly::from_i64s(&k, &[-1, 0, 1]);
        let b = Poly::from_i64s(&k, &[2, 1]);
        let (g, s, t) = ext_gcd(&k, &a, &b).unwrap();
        assert_eq!(g, Poly::one(&k));
        assert_eq!(add(&k, &mul(&k, &s, &a), &mul(&k, &t, &b)), g);
    }

    #[test]
    fn square_roots_of_squares() {
        let k = Field::Q;
        let a = Poly::from_i64s(&k, &[3, -2, 5]);
        let sq = mul(&k, &a, &a);
        let r = sqrt(&k, &sq).unwrap().unwrap();
        assert_eq!(mul(&k, &r, &r), sq);
        assert!(sqrt(&k, &add(&k, &sq, &Poly::one(&k))).unwrap().is_none());
    }
}
