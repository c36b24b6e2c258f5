//! Exact arithmetic backends.
//!
//! A [`Field`] is a descriptor: it carries no element data and every
//! arithmetic operation is a method on it taking [`Elem`] values. Elements
//! are kept in canonical form so that structural equality is field equality:
//! residues live in `[0, p)`, fractions are reduced with monic denominators,
//! polynomial residues are reduced modulo the defining polynomial.

pub mod factor;
pub mod integer;
pub mod poly;
pub mod text;
pub mod zpoly;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

pub use poly::Poly;

/// A field element in canonical representation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    /// Residue in `[0, p)`.
    Int(u64),
    /// Coefficient vector of length `k` over `F_p`, ascending.
    Vec(Vec<u64>),
    Rat(BigRational),
    /// Numerator and monic denominator, coprime.
    Frac(Poly, Poly),
    /// `x + y·√ε`.
    Pair(Box<Elem>, Box<Elem>),
    /// Residue class modulo the defining polynomial of an [`Field::AlgExt`].
    Res(Poly),
}

impl Elem {
    pub fn is_zero(&self) -> bool {
        match self {
            Elem::Int(v) => *v == 0,
            Elem::Vec(v) => v.iter().all(|c| *c == 0),
            Elem::Rat(r) => r.is_zero(),
            Elem::Frac(n, _) => n.is_zero(),
            Elem::Pair(a, b) => a.is_zero() && b.is_zero(),
            Elem::Res(p) => p.is_zero(),
        }
    }

    pub fn rat(n: i64, d: i64) -> Elem {
        Elem::Rat(BigRational::new(n.into(), d.into()))
    }

    pub fn as_rat(&self) -> Option<&BigRational> {
        match self {
            Elem::Rat(r) => Some(r),
            _ => None,
        }
    }

    /// Numerator and denominator of a rational-function element.
    pub fn as_frac(&self) -> Option<(&Poly, &Poly)> {
        match self {
            Elem::Frac(n, d) => Some((n, d)),
            _ => None,
        }
    }
}

/// Field descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Fp(u64),
    /// `F_p[w]/(modulus)`, modulus monic irreducible of degree `k ≥ 2`,
    /// coefficients ascending.
    Fq { p: u64, k: usize, modulus: Vec<u64> },
    Q,
    RatFunc { base: Box<Field>, var: String },
    /// `base[√ε]` for a non-square `ε`.
    QuadExt { base: Box<Field>, eps: Box<Elem> },
    /// `base[x]/(modulus)` for a monic irreducible modulus of degree ≥ 2.
    /// Used for residue fields of places that are neither prime fields nor
    /// quadratic.
    AlgExt { base: Box<Field>, modulus: Poly },
}

/// The operations exposed by [`Field::arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Neg,
    Inv,
    Eq,
}

/// Result of [`Field::arith`]: either an element or a truth value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArithValue {
    Elem(Elem),
    Bool(bool),
}

const MAX_PRIME: u64 = 1 << 32;

impl Field {
    pub fn fp(p: u64) -> Result<Field> {
        if p < 2 || p >= MAX_PRIME || !integer::is_prime_u64(p) {
            return Err(Error::pre(format!("{p} is not a supported prime")));
        }
        Ok(Field::Fp(p))
    }

    /// `F_{p^k}` with an explicit modulus (ascending, monic).
    pub fn fq(p: u64, modulus: Vec<u64>) -> Result<Field> {
        let base = Field::fp(p)?;
        if modulus.len() < 3 {
            return Err(Error::pre("Fq modulus must have degree at least 2"));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::pre("Fq modulus must be monic"));
        }
        if modulus.iter().any(|c| *c >= p) {
            return Err(Error::pre("Fq modulus coefficients must be residues mod p"));
        }
        let g = Poly::new(modulus.iter().map(|c| Elem::Int(*c)).collect());
        if !factor::is_irreducible(&base, &g)? {
            return Err(Error::pre("Fq modulus is not irreducible"));
        }
        Ok(Field::Fq {
            p,
            k: modulus.len() - 1,
            modulus,
        })
    }

    /// `F_{p^k}` with the lexicographically smallest monic irreducible modulus.
    pub fn fq_default(p: u64, k: usize) -> Result<Field> {
        let base = Field::fp(p)?;
        if k == 1 {
            return Ok(base);
        }
        let g = factor::first_irreducible(&base, k)?;
        let modulus = g
            .coeffs()
            .iter()
            .map(|c| match c {
                Elem::Int(v) => *v,
                _ => unreachable!(),
            })
            .collect();
        Ok(Field::Fq { p, k, modulus })
    }

    /// The finite field with `q` elements (prime power), default modulus.
    pub fn finite(q: u64) -> Result<Field> {
        let (p, k) = integer::prime_power(q)
            .ok_or_else(|| Error::pre(format!("{q} is not a prime power")))?;
        Field::fq_default(p, k)
    }

    pub fn rat_func(base: Field, var: impl Into<String>) -> Field {
        Field::RatFunc {
            base: Box::new(base),
            var: var.into(),
        }
    }

    /// `base[√ε]`; rejected when `ε` is zero or already a square.
    pub fn quad_ext(base: Field, eps: Elem) -> Result<Field> {
        base.check(&eps)?;
        if eps.is_zero() {
            return Err(Error::pre("QuadExt requires ε ≠ 0"));
        }
        if base.characteristic() == 2 {
            return Err(Error::unsupported("QuadExt in characteristic 2"));
        }
        if base.is_square(&eps)? {
            return Err(Error::pre(format!(
                "ε = {} is a square in {}; the extension is not a field",
                base.show(&eps),
                base
            )));
        }
        Ok(Field::QuadExt {
            base: Box::new(base),
            eps: Box::new(eps),
        })
    }

    /// `base[x]/(modulus)`; the modulus is made monic and must be irreducible
    /// when that is decidable over `base`.
    pub fn alg_ext(base: Field, modulus: Poly) -> Result<Field> {
        let deg = modulus
            .degree()
            .ok_or_else(|| Error::pre("zero modulus"))?;
        if deg < 2 {
            return Err(Error::pre("extension modulus must have degree ≥ 2"));
        }
        let (_, m) = poly::monic(&base, &modulus)?;
        if base.is_finite() || base == Field::Q {
            let fs = factor::factor(&base, &m)?;
            if fs.factors.len() != 1 || fs.factors[0].1 != 1 {
                return Err(Error::pre("extension modulus is not irreducible"));
            }
        }
        Ok(Field::AlgExt {
            base: Box::new(base),
            modulus: m,
        })
    }

    pub fn base(&self) -> Option<&Field> {
        match self {
            Field::RatFunc { base, .. }
            | Field::QuadExt { base, .. }
            | Field::AlgExt { base, .. } => Some(base),
            _ => None,
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Fp(p) | Field::Fq { p, .. } => *p,
            Field::Q => 0,
            Field::RatFunc { base, .. }
            | Field::QuadExt { base, .. }
            | Field::AlgExt { base, .. } => base.characteristic(),
        }
    }

    /// Number of elements, if finite.
    pub fn size(&self) -> Option<BigUint> {
        match self {
            Field::Fp(p) => Some(BigUint::from(*p)),
            Field::Fq { p, k, .. } => Some(BigUint::from(*p).pow(*k as u32)),
            Field::Q | Field::RatFunc { .. } => None,
            Field::QuadExt { base, .. } => base.size().map(|s| &s * &s),
            Field::AlgExt { base, modulus } => {
                let d = modulus.degree().unwrap_or(0) as u32;
                base.size().map(|s| s.pow(d))
            }
        }
    }

    /// Size as `u64`, when finite and small enough.
    pub fn size_u64(&self) -> Option<u64> {
        self.size().and_then(|s| s.to_u64())
    }

    pub fn is_finite(&self) -> bool {
        self.size().is_some()
    }

    /// Degree over the prime field, for finite fields.
    pub fn prime_degree(&self) -> Option<usize> {
        match self {
            Field::Fp(_) => Some(1),
            Field::Fq { k, .. } => Some(*k),
            Field::QuadExt { base, .. } => base.prime_degree().map(|d| 2 * d),
            Field::AlgExt { base, modulus } => base
                .prime_degree()
                .map(|d| d * modulus.degree().unwrap_or(0)),
            _ => None,
        }
    }

    /// Shallow check that `a` has the shape of an element of this field.
    pub fn check(&self, a: &Elem) -> Result<()> {
        let ok = match (self, a) {
            (Field::Fp(p), Elem::Int(v)) => v < p,
            (Field::Fq { p, k, .. }, Elem::Vec(v)) => v.len() == *k && v.iter().all(|c| c < p),
            (Field::Q, Elem::Rat(_)) => true,
            (Field::RatFunc { .. }, Elem::Frac(..)) => true,
            (Field::QuadExt { base, .. }, Elem::Pair(x, y)) => {
                base.check(x)?;
                base.check(y)?;
                true
            }
            (Field::AlgExt { modulus, .. }, Elem::Res(r)) => {
                r.degree().map_or(true, |d| d < modulus.degree().unwrap_or(0))
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Mismatch(format!("{a:?} is not an element of {self}")))
        }
    }

    pub fn zero(&self) -> Elem {
        match self {
            Field::Fp(_) => Elem::Int(0),
            Field::Fq { k, .. } => Elem::Vec(vec![0; *k]),
            Field::Q => Elem::Rat(BigRational::zero()),
            Field::RatFunc { base, .. } => Elem::Frac(Poly::zero(), Poly::one(base)),
            Field::QuadExt { base, .. } => Elem::Pair(Box::new(base.zero()), Box::new(base.zero())),
            Field::AlgExt { .. } => Elem::Res(Poly::zero()),
        }
    }

    pub fn one(&self) -> Elem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Elem {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Elem {
        match self {
            Field::Fp(p) => Elem::Int(integer::mod_u64(n, *p)),
            Field::Fq { p, k, .. } => {
                let mut v = vec![0; *k];
                v[0] = integer::mod_u64(n, *p);
                Elem::Vec(v)
            }
            Field::Q => Elem::Rat(BigRational::from_integer(n.clone())),
            Field::RatFunc { base, .. } => {
                Elem::Frac(Poly::constant(base, base.from_bigint(n)), Poly::one(base))
            }
            Field::QuadExt { base, .. } => {
                Elem::Pair(Box::new(base.from_bigint(n)), Box::new(base.zero()))
            }
            Field::AlgExt { base, .. } => Elem::Res(Poly::constant(base, base.from_bigint(n))),
        }
    }

    /// Image of a rational number; fails when the denominator vanishes.
    pub fn from_rational(&self, r: &BigRational) -> Result<Elem> {
        let n = self.from_bigint(r.numer());
        let d = self.from_bigint(r.denom());
        self.div(&n, &d)
    }

    /// Embeds an element of the base field (for extensions and `k(t)`).
    pub fn embed(&self, a: &Elem) -> Elem {
        match self {
            Field::RatFunc { base, .. } => Elem::Frac(Poly::constant(base, a.clone()), Poly::one(base)),
            Field::QuadExt { base, .. } => Elem::Pair(Box::new(a.clone()), Box::new(base.zero())),
            Field::AlgExt { base, .. } => Elem::Res(Poly::constant(base, a.clone())),
            Field::Fq { k, .. } => match a {
                Elem::Int(c) => {
                    let mut v = vec![0; *k];
                    v[0] = *c;
                    Elem::Vec(v)
                }
                _ => a.clone(),
            },
            _ => a.clone(),
        }
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (Field::Fp(p), Elem::Int(x), Elem::Int(y)) => Elem::Int((x + y) % p),
            (Field::Fq { p, .. }, Elem::Vec(x), Elem::Vec(y)) => {
                Elem::Vec(x.iter().zip(y).map(|(a, b)| (a + b) % p).collect())
            }
            (Field::Q, Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x + y),
            (Field::RatFunc { base, .. }, Elem::Frac(n1, d1), Elem::Frac(n2, d2)) => {
                if d1 == d2 {
                    return frac_normalize(base, poly::add(base, n1, n2), d1.clone());
                }
                let n = poly::add(base, &poly::mul(base, n1, d2), &poly::mul(base, n2, d1));
                frac_normalize(base, n, poly::mul(base, d1, d2))
            }
            (Field::QuadExt { base, .. }, Elem::Pair(x1, y1), Elem::Pair(x2, y2)) => Elem::Pair(
                Box::new(base.add(x1, x2)),
                Box::new(base.add(y1, y2)),
            ),
            (Field::AlgExt { base, .. }, Elem::Res(x), Elem::Res(y)) => {
                Elem::Res(poly::add(base, x, y))
            }
            _ => panic!("add: element does not belong to {self}"),
        }
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match (self, a) {
            (Field::Fp(p), Elem::Int(x)) => Elem::Int((p - x) % p),
            (Field::Fq { p, .. }, Elem::Vec(x)) => Elem::Vec(x.iter().map(|c| (p - c) % p).collect()),
            (Field::Q, Elem::Rat(x)) => Elem::Rat(-x),
            (Field::RatFunc { base, .. }, Elem::Frac(n, d)) => {
                Elem::Frac(poly::neg(base, n), d.clone())
            }
            (Field::QuadExt { base, .. }, Elem::Pair(x, y)) => {
                Elem::Pair(Box::new(base.neg(x)), Box::new(base.neg(y)))
            }
            (Field::AlgExt { base, .. }, Elem::Res(x)) => Elem::Res(poly::neg(base, x)),
            _ => panic!("neg: element does not belong to {self}"),
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (Field::Fp(p), Elem::Int(x), Elem::Int(y)) => {
                Elem::Int(((*x as u128 * *y as u128) % *p as u128) as u64)
            }
            (Field::Fq { p, k, modulus }, Elem::Vec(x), Elem::Vec(y)) => {
                Elem::Vec(fq_mul(*p, *k, modulus, x, y))
            }
            (Field::Q, Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x * y),
            (Field::RatFunc { base, .. }, Elem::Frac(n1, d1), Elem::Frac(n2, d2)) => {
                // cross-cancel before multiplying
                let g1 = poly::gcd(base, n1, d2);
                let g2 = poly::gcd(base, n2, d1);
                let n1 = poly::exact_div(base, n1, &g1);
                let d2 = poly::exact_div(base, d2, &g1);
                let n2 = poly::exact_div(base, n2, &g2);
                let d1 = poly::exact_div(base, d1, &g2);
                let n = poly::mul(base, &n1, &n2);
                let d = poly::mul(base, &d1, &d2);
                if n.is_zero() {
                    return self.zero();
                }
                // d is a product of monic polynomials, so already monic
                Elem::Frac(n, d)
            }
            (Field::QuadExt { base, eps }, Elem::Pair(x1, y1), Elem::Pair(x2, y2)) => {
                let xx = base.mul(x1, x2);
                let yy = base.mul(y1, y2);
                let xy = base.mul(x1, y2);
                let yx = base.mul(y1, x2);
                Elem::Pair(
                    Box::new(base.add(&xx, &base.mul(eps, &yy))),
                    Box::new(base.add(&xy, &yx)),
                )
            }
            (Field::AlgExt { base, modulus }, Elem::Res(x), Elem::Res(y)) => {
                Elem::Res(poly::rem(base, &poly::mul(base, x, y), modulus))
            }
            _ => panic!("mul: element does not belong to {self}"),
        }
    }

    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match (self, a) {
            (Field::Fp(p), Elem::Int(x)) => Elem::Int(integer::inv_mod_u64(*x, *p)),
            (Field::Fq { .. }, Elem::Vec(_)) => {
                let q = self.size().unwrap();
                self.pow(a, &(q - 2u32))
            }
            (Field::Q, Elem::Rat(x)) => Elem::Rat(x.recip()),
            (Field::RatFunc { base, .. }, Elem::Frac(n, d)) => frac_normalize(base, d.clone(), n.clone()),
            (Field::QuadExt { base, eps }, Elem::Pair(x, y)) => {
                let norm = base.sub(&base.mul(x, x), &base.mul(eps, &base.mul(y, y)));
                let ni = base.inv(&norm)?;
                Elem::Pair(Box::new(base.mul(x, &ni)), Box::new(base.neg(&base.mul(y, &ni))))
            }
            (Field::AlgExt { base, modulus }, Elem::Res(x)) => {
                let (g, s, _) = poly::ext_gcd(base, x, modulus)?;
                if g.degree() != Some(0) {
                    return Err(Error::pre("element is not invertible: modulus is reducible"));
                }
                Elem::Res(poly::rem(base, &s, modulus))
            }
            _ => return Err(Error::Mismatch(format!("{a:?} is not an element of {self}"))),
        })
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Elem, e: &BigUint) -> Elem {
        let mut result = self.one();
        let bits = e.bits();
        for i in (0..bits).rev() {
            result = self.mul(&result, &result);
            if e.bit(i) {
                result = self.mul(&result, a);
            }
        }
        result
    }

    pub fn pow_u64(&self, a: &Elem, e: u64) -> Elem {
        self.pow(a, &BigUint::from(e))
    }

    /// Integer power, negative exponents allowed for nonzero `a`.
    pub fn pow_i64(&self, a: &Elem, e: i64) -> Result<Elem> {
        if e >= 0 {
            Ok(self.pow_u64(a, e as u64))
        } else {
            Ok(self.pow_u64(&self.inv(a)?, e.unsigned_abs()))
        }
    }

    /// Checked field operation on elements of this field.
    pub fn arith(&self, op: ArithOp, a: &Elem, b: Option<&Elem>) -> Result<ArithValue> {
        self.check(a)?;
        let second = || -> Result<&Elem> {
            let b = b.ok_or_else(|| Error::pre("binary operation needs two operands"))?;
            self.check(b)?;
            Ok(b)
        };
        Ok(match op {
            ArithOp::Add => ArithValue::Elem(self.add(a, second()?)),
            ArithOp::Mul => ArithValue::Elem(self.mul(a, second()?)),
            ArithOp::Eq => ArithValue::Bool(a == second()?),
            ArithOp::Neg => ArithValue::Elem(self.neg(a)),
            ArithOp::Inv => ArithValue::Elem(self.inv(a)?),
        })
    }

    /// Element at position `idx` of the canonical enumeration.
    pub fn element_at(&self, idx: u64) -> Result<Elem> {
        match self {
            Field::Fp(p) => Ok(Elem::Int(idx % p)),
            Field::Fq { p, k, .. } => {
                let mut v = Vec::with_capacity(*k);
                let mut r = idx;
                for _ in 0..*k {
                    v.push(r % p);
                    r /= p;
                }
                Ok(Elem::Vec(v))
            }
            Field::QuadExt { base, .. } => {
                let q = base.size_u64().ok_or_else(|| Error::pre("infinite field"))?;
                Ok(Elem::Pair(
                    Box::new(base.element_at(idx % q)?),
                    Box::new(base.element_at(idx / q)?),
                ))
            }
            Field::AlgExt { base, modulus } => {
                let q = base.size_u64().ok_or_else(|| Error::pre("infinite field"))?;
                let mut r = idx;
                let mut cs = Vec::new();
                for _ in 0..modulus.degree().unwrap() {
                    cs.push(base.element_at(r % q)?);
                    r /= q;
                }
                Ok(Elem::Res(Poly::new(cs)))
            }
            _ => Err(Error::pre(format!("{self} is not a finite field"))),
        }
    }

    /// Position of `a` in the canonical enumeration (finite fields).
    pub fn index_of(&self, a: &Elem) -> Result<u64> {
        match (self, a) {
            (Field::Fp(_), Elem::Int(v)) => Ok(*v),
            (Field::Fq { p, .. }, Elem::Vec(v)) => Ok(v.iter().rev().fold(0, |acc, c| acc * p + c)),
            (Field::QuadExt { base, .. }, Elem::Pair(x, y)) => {
                let q = base.size_u64().ok_or_else(|| Error::pre("infinite field"))?;
                Ok(base.index_of(x)? + q * base.index_of(y)?)
            }
            (Field::AlgExt { base, modulus }, Elem::Res(r)) => {
                let q = base.size_u64().ok_or_else(|| Error::pre("infinite field"))?;
                let d = modulus.degree().unwrap();
                let mut acc = 0;
                for i in (0..d).rev() {
                    acc = acc * q + base.index_of(&r.coeff(base, i))?;
                }
                Ok(acc)
            }
            _ => Err(Error::pre(format!("{self} is not a finite field"))),
        }
    }

    /// All elements in canonical order: residues `0..p`, extension fields by
    /// coefficient vector read as a base-`p` numeral (lowest coefficient
    /// least significant).
    pub fn canonical_enumeration(&self) -> Result<Vec<Elem>> {
        let q = self
            .size_u64()
            .ok_or_else(|| Error::pre(format!("{self} is not a finite field")))?;
        (0..q).map(|i| self.element_at(i)).collect()
    }

    /// Square test.
    pub fn is_square(&self, a: &Elem) -> Result<bool> {
        self.check(a)?;
        if a.is_zero() {
            return Ok(true);
        }
        match self {
            Field::Q => {
                let r = a.as_rat().unwrap();
                Ok(r.is_positive()
                    && integer::is_perfect_square(r.numer())
                    && integer::is_perfect_square(r.denom()))
            }
            Field::RatFunc { base, .. } => {
                let (n, d) = a.as_frac().unwrap();
                let nd = poly::mul(base, n, d);
                poly::is_square(base, &nd)
            }
            _ if self.is_finite() => {
                if self.characteristic() == 2 {
                    return Ok(true);
                }
                let q = self.size().unwrap();
                let e = (q - 1u32) / 2u32;
                Ok(self.pow(a, &e) == self.one())
            }
            Field::QuadExt { .. } => Ok(self.sqrt(a)?.is_some()),
            _ => Err(Error::unsupported(format!("square test over {self}"))),
        }
    }

    /// A square root, if one exists.
    pub fn sqrt(&self, a: &Elem) -> Result<Option<Elem>> {
        self.check(a)?;
        if a.is_zero() {
            return Ok(Some(self.zero()));
        }
        match self {
            Field::Q => {
                let r = a.as_rat().unwrap();
                if r.is_negative() {
                    return Ok(None);
                }
                match (integer::sqrt_exact(r.numer()), integer::sqrt_exact(r.denom())) {
                    (Some(n), Some(d)) => Ok(Some(Elem::Rat(BigRational::new(n, d)))),
                    _ => Ok(None),
                }
            }
            Field::RatFunc { base, .. } => {
                let (n, d) = a.as_frac().unwrap();
                let nd = poly::mul(base, n, d);
                match poly::sqrt(base, &nd)? {
                    None => Ok(None),
                    Some(s) => {
                        // √(n/d) = √(n·d)/d
                        Ok(Some(frac_normalize(base, s, d.clone())))
                    }
                }
            }
            Field::QuadExt { base, eps } if !self.is_finite() => {
                let (x, y) = match a {
                    Elem::Pair(x, y) => (x.as_ref(), y.as_ref()),
                    _ => unreachable!(),
                };
                let two = base.from_i64(2);
                if y.is_zero() {
                    if let Some(s) = base.sqrt(x)? {
                        return Ok(Some(self.embed(&s)));
                    }
                    // x = ε·v² gives (v√ε)² = x
                    if let Some(v) = base.sqrt(&base.div(x, eps)?)? {
                        return Ok(Some(Elem::Pair(Box::new(base.zero()), Box::new(v))));
                    }
                    return Ok(None);
                }
                let norm = base.sub(&base.mul(x, x), &base.mul(eps, &base.mul(y, y)));
                let c = match base.sqrt(&norm)? {
                    Some(c) => c,
                    None => return Ok(None),
                };
                for cc in [c.clone(), base.neg(&c)] {
                    let u2 = base.div(&base.add(x, &cc), &two)?;
                    if let Some(u) = base.sqrt(&u2)? {
                        if u.is_zero() {
                            continue;
                        }
                        let v = base.div(y, &base.mul(&two, &u))?;
                        return Ok(Some(Elem::Pair(Box::new(u), Box::new(v))));
                    }
                }
                Ok(None)
            }
            _ if self.is_finite() => self.sqrt_finite(a),
            _ => Err(Error::unsupported(format!("square roots over {self}"))),
        }
    }

    fn sqrt_finite(&self, a: &Elem) -> Result<Option<Elem>> {
        let q = self.size().unwrap();
        if self.characteristic() == 2 {
            // Frobenius is bijective: a^(q/2) squares to a.
            return Ok(Some(self.pow(a, &(q / 2u32))));
        }
        if !self.is_square(a)? {
            return Ok(None);
        }
        // Tonelli–Shanks
        let qm1 = &q - 1u32;
        let s = qm1.trailing_zeros().unwrap_or(0);
        let m = &qm1 >> s;
        let mut z = None;
        let qsz = self.size_u64().unwrap_or(u64::MAX);
        for i in 2..qsz {
            let c = self.element_at(i)?;
            if !self.is_square(&c)? {
                z = Some(c);
                break;
            }
        }
        let z = z.ok_or_else(|| Error::pre("no quadratic non-residue found"))?;
        let mut mm = s;
        let mut c = self.pow(&z, &m);
        let mut t = self.pow(a, &m);
        let mut r = self.pow(a, &((&m + 1u32) / 2u32));
        let one = self.one();
        while t != one {
            let mut i = 0;
            let mut t2 = t.clone();
            while t2 != one {
                t2 = self.mul(&t2, &t2);
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..(mm - i - 1) {
                b = self.mul(&b, &b);
            }
            mm = i;
            c = self.mul(&b, &b);
            t = self.mul(&t, &c);
            r = self.mul(&r, &b);
        }
        Ok(Some(r))
    }

    /// Uniformly random element. For infinite fields `height` bounds the size
    /// of integers (and `degree` of polynomials) involved.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R, height: u64, degree: usize) -> Elem {
        match self {
            Field::Q => {
                let n: i64 = rng.gen_range(-(height as i64)..=height as i64);
                let d: i64 = rng.gen_range(1..=height.max(1) as i64);
                Elem::rat(n, d)
            }
            Field::RatFunc { base, .. } => {
                let dn = rng.gen_range(0..=degree);
                let dd = rng.gen_range(0..=degree);
                let n = Poly::new((0..=dn).map(|_| base.random(rng, height, degree)).collect());
                let mut d = Poly::new((0..=dd).map(|_| base.random(rng, height, degree)).collect());
                if d.is_zero() {
                    d = Poly::one(base);
                }
                frac_normalize(base, n, d)
            }
            _ => {
                let q = self.size_u64().expect("finite field");
                self.element_at(rng.gen_range(0..q)).expect("finite field")
            }
        }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R, height: u64, degree: usize) -> Elem {
        loop {
            let a = self.random(rng, height, degree);
            if !a.is_zero() {
                return a;
            }
        }
    }

    /// Human-readable element text in the element literal syntax.
    pub fn show(&self, a: &Elem) -> String {
        text::format_elem(self, a)
    }

    /// Parses an element literal of this field.
    pub fn parse_elem(&self, s: &str) -> Result<Elem> {
        text::parse_elem(self, s)
    }
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&text::format_field(self))
    }
}

impl std::str::FromStr for Field {
    type Err = Error;
    fn from_str(s: &str) -> Result<Field> {
        text::parse_field(s)
    }
}

/// Reduces `n/d` to canonical form: coprime with monic denominator.
pub(crate) fn frac_normalize(base: &Field, n: Poly, d: Poly) -> Elem {
    assert!(!d.is_zero(), "zero denominator");
    if n.is_zero() {
        return Elem::Frac(Poly::zero(), Poly::one(base));
    }
    let g = poly::gcd(base, &n, &d);
    let (n, d) = if g.degree() == Some(0) {
        (n, d)
    } else {
        (poly::exact_div(base, &n, &g), poly::exact_div(base, &d, &g))
    };
    let lc = d.lead().clone();
    if lc == base.one() {
        return Elem::Frac(n, d);
    }
    let li = base.inv(&lc).expect("nonzero leading coefficient");
    Elem::Frac(poly::scale(base, &n, &li), poly::scale(base, &d, &li))
}

/// Builds the rational function `n/d` over `base`.
pub fn frac(base: &Field, n: Poly, d: Poly) -> Result<Elem> {
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(frac_normalize(base, n, d))
}

fn fq_mul(p: u64, k: usize, modulus: &[u64], x: &[u64], y: &[u64]) -> Vec<u64> {
    let mut prod = vec![0u128; 2 * k - 1];
    for (i, a) in x.iter().enumerate() {
        if *a == 0 {
            continue;
        }
        for (j, b) in y.iter().enumerate() {
            prod[i + j] += (*a as u128) * (*b as u128) % p as u128;
        }
    }
    let mut prod: Vec<u64> = prod.into_iter().map(|c| (c % p as u128) as u64).collect();
    for i in (k..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        // w^k = -(m_0 + ... + m_{k-1} w^{k-1})
        for j in 0..k {
            let sub = (c as u128 * modulus[j] as u128 % p as u128) as u64;
            let idx = i - k + j;
            prod[idx] = (prod[idx] + p - sub) % p;
        }
    }
    prod.truncate(k);
    prod
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_in_f7() {
        let k = Field::fp(7).unwrap();
        assert_eq!(k.inv(&Elem::Int(3)).unwrap(), Elem::Int(5));
        assert_eq!(k.inv(&Elem::Int(0)), Err(Error::DivisionByZero));
    }

    #[test]
    fn rational_addition() {
        let q = Field::Q;
        assert_eq!(q.add(&Elem::rat(1, 2), &Elem::rat(1, 3)), Elem::rat(5, 6));
    }

    #[test]
    fn sqrt_minus_one_squared() {
        let k = Field::quad_ext(Field::Q, Elem::rat(-1, 1)).unwrap();
        let i = Elem::Pair(Box::new(Elem::rat(0, 1)), Box::new(Elem::rat(1, 1)));
        let expected = Elem::Pair(Box::new(Elem::rat(-1, 1)), Box::new(Elem::rat(0, 1)));
        assert_eq!(k.mul(&i, &i), expected);
    }

    #[test]
    fn quad_ext_over_square_is_rejected() {
        assert!(Field::quad_ext(Field::Q, Elem::rat(4, 1)).is_err());
        assert!(Field::quad_ext(Field::Q, Elem::rat(0, 1)).is_err());
        let f5 = Field::fp(5).unwrap();
        assert!(Field::quad_ext(f5.clone(), Elem::Int(4)).is_err());
        assert!(Field::quad_ext(f5, Elem::Int(2)).is_ok());
    }

    #[test]
    fn euler_criterion() {
        let f5 = Field::fp(5).unwrap();
        assert!(!f5.is_square(&Elem::Int(2)).unwrap());
        assert!(f5.is_square(&Elem::Int(4)).unwrap());
        assert!(Field::Q.is_square(&Elem::rat(4, 9)).unwrap());
        assert!(!Field::Q.is_square(&Elem::rat(-4, 9)).unwrap());
        assert!(!Field::Q.is_square(&Elem::rat(2, 1)).unwrap());
    }

    #[test]
    fn square_test_over_rational_functions() {
        let k: Field = "RatFunc(Fp:3,u)".parse().unwrap();
        let a = k.parse_elem("(u+1)^2*u").unwrap();
        assert!(!k.is_square(&a).unwrap());
        let b = k.parse_elem("(u+1)^2/u^4").unwrap();
        assert!(k.is_square(&b).unwrap());
    }

    #[test]
    fn enumeration_order() {
        let f3 = Field::fp(3).unwrap();
        assert_eq!(
            f3.canonical_enumeration().unwrap(),
            vec![Elem::Int(0), Elem::Int(1), Elem::Int(2)]
        );
        let f4 = Field::fq(2, vec![1, 1, 1]).unwrap();
        let els = f4.canonical_enumeration().unwrap();
        assert_eq!(
            els,
            vec![
                Elem::Vec(vec![0, 0]),
                Elem::Vec(vec![1, 0]),
                Elem::Vec(vec![0, 1]),
                Elem::Vec(vec![1, 1])
            ]
        );
        for (i, e) in els.iter().enumerate() {
            assert_eq!(f4.index_of(e).unwrap(), i as u64);
        }
        assert!(Field::Q.canonical_enumeration().is_err());
    }

    #[test]
    fn descriptor_mismatch_is_reported() {
        let f7 = Field::fp(7).unwrap();
        let r = f7.arith(ArithOp::Add, &Elem::rat(1, 2), Some(&Elem::Int(1)));
        assert!(matches!(r, Err(Error::Mismatch(_))));
    }

    #[test]
    fn tonelli_shanks_roots() {
        for q in [3u64, 5, 7, 9, 13, 17, 25, 27] {
            let k = Field::finite(q).unwrap();
            for a in k.canonical_enumeration().unwrap() {
                let sq = k.mul(&a, &a);
                let r = k.sqrt(&sq).unwrap().unwrap();
                assert_eq!(k.mul(&r, &r), sq);
            }
        }
    }

    #[test]
    fn sqrt_in_gaussian_rationals() {
        let k = Field::quad_ext(Field::Q, Elem::rat(-1, 1)).unwrap();
        // (1 + i)^2 = 2i
        let two_i = Elem::Pair(Box::new(Elem::rat(0, 1)), Box::new(Elem::rat(2, 1)));
        assert!(k.is_square(&two_i).unwrap());
        let three = k.embed(&Elem::rat(3, 1));
        assert!(!k.is_square(&three).unwrap());
        let minus_one = k.embed(&Elem::rat(-1, 1));
        assert!(k.is_square(&minus_one).unwrap());
    }
}
