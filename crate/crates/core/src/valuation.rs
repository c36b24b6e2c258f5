//! Places of `Q` and of rational function fields `k(t)`: orders, residues,
//! quadratic splitting, weak approximation and rank-two composite places.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::{factor, frac, integer, poly, text, Elem, Field, Poly};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    QPrime(BigInt),
    QInfty,
    /// Zero of a monic irreducible polynomial over the constant field.
    FuncIrred(Poly),
    FuncInfty,
}

impl Place {
    pub fn residue_degree(&self) -> usize {
        match self {
            Place::FuncIrred(g) => g.degree().unwrap_or(1),
            _ => 1,
        }
    }

    /// Checks that the place belongs to `k`.
    pub fn check(&self, k: &Field) -> Result<()> {
        match (self, k) {
            (Place::QPrime(p), Field::Q) => {
                if p > &BigInt::one() && integer::is_probable_prime(p) {
                    Ok(())
                } else {
                    Err(Error::pre(format!("{p} is not prime")))
                }
            }
            (Place::QInfty, Field::Q) => Ok(()),
            (Place::FuncInfty, Field::RatFunc { .. }) => Ok(()),
            (Place::FuncIrred(g), Field::RatFunc { base, .. }) => {
                if g.degree().unwrap_or(0) == 0 || !g.is_monic(base) {
                    return Err(Error::pre("place polynomial must be monic of positive degree"));
                }
                if (base.is_finite() || **base == Field::Q) && !factor::is_irreducible(base, g)? {
                    return Err(Error::pre("place polynomial is not irreducible"));
                }
                Ok(())
            }
            _ => Err(Error::Mismatch(format!("place {} does not belong to {k}", self.show(k)))),
        }
    }

    pub fn show(&self, k: &Field) -> String {
        match self {
            Place::QPrime(p) => format!("p:{p}"),
            Place::QInfty => "inf".into(),
            Place::FuncInfty => "finf".into(),
            Place::FuncIrred(g) => {
                let base = k.base().cloned().unwrap_or(Field::Q);
                let cs: Vec<String> = g.coeffs().iter().map(|c| text::format_elem(&base, c)).collect();
                format!("irr:[{}]", cs.join(","))
            }
        }
    }

    /// Parses `p:7`, `inf`, `irr:[c0,c1,..]` (ascending) or `finf`.
    pub fn parse(k: &Field, s: &str) -> Result<Place> {
        let s = s.trim();
        let place = if s == "inf" {
            Place::QInfty
        } else if s == "finf" {
            Place::FuncInfty
        } else if let Some(p) = s.strip_prefix("p:") {
            let p: BigInt = p
                .trim()
                .parse()
                .map_err(|_| Error::parse(format!("invalid prime in place {s:?}")))?;
            Place::QPrime(p)
        } else if let Some(rest) = s.strip_prefix("irr:") {
            let base = k
                .base()
                .filter(|_| matches!(k, Field::RatFunc { .. }))
                .ok_or_else(|| Error::Mismatch(format!("{k} has no polynomial places")))?;
            let inner = rest
                .trim()
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| Error::parse(format!("expected irr:[..], found {s:?}")))?;
            let cs = text::split_top(inner)
                .into_iter()
                .map(|c| base.parse_elem(c.trim()))
                .collect::<Result<Vec<_>>>()?;
            Place::FuncIrred(Poly::new(cs))
        } else {
            return Err(Error::parse(format!("unknown place {s:?}")));
        };
        place.check(k)?;
        Ok(place)
    }
}

fn ratfunc_base(k: &Field) -> Result<&Field> {
    match k {
        Field::RatFunc { base, .. } => Ok(base),
        _ => Err(Error::Mismatch(format!("{k} is not a rational function field"))),
    }
}

fn frac_parts<'a>(k: &Field, x: &'a Elem) -> Result<(&'a Poly, &'a Poly)> {
    k.check(x)?;
    x.as_frac()
        .ok_or_else(|| Error::Mismatch("expected a rational function".into()))
}

fn rat_of<'a>(x: &'a Elem) -> Result<&'a BigRational> {
    x.as_rat().ok_or_else(|| Error::Mismatch("expected a rational number".into()))
}

/// Multiplicity of `g` in the nonzero polynomial `f`.
fn multiplicity(base: &Field, f: &Poly, g: &Poly) -> i64 {
    let mut f = f.clone();
    let mut m = 0;
    loop {
        let (q, r) = poly::divrem(base, &f, g);
        if !r.is_zero() {
            return m;
        }
        f = q;
        m += 1;
    }
}

fn big_valuation(r: &BigRational, p: &BigInt) -> i64 {
    integer::split_valuation(r.numer(), p).0 - integer::split_valuation(r.denom(), p).0
}

/// Order of the nonzero element `x` at `v`.
pub fn order(k: &Field, v: &Place, x: &Elem) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::pre("order of zero is undefined"));
    }
    match v {
        Place::QPrime(p) => {
            k.check(x)?;
            Ok(big_valuation(rat_of(x)?, p))
        }
        Place::QInfty => Err(Error::unsupported("the real place has no discrete order")),
        Place::FuncIrred(g) => {
            let base = ratfunc_base(k)?;
            let (n, d) = frac_parts(k, x)?;
            Ok(multiplicity(base, n, g) - multiplicity(base, d, g))
        }
        Place::FuncInfty => {
            let (n, d) = frac_parts(k, x)?;
            Ok(d.degree().unwrap_or(0) as i64 - n.degree().unwrap_or(0) as i64)
        }
    }
}

/// The residue field `κ(v)`.
pub fn residue_field(k: &Field, v: &Place) -> Result<Field> {
    match v {
        Place::QPrime(p) => {
            let p = p
                .to_u64()
                .ok_or_else(|| Error::unsupported("residue fields of primes ≥ 2^64"))?;
            Field::fp(p)
        }
        Place::QInfty => Err(Error::unsupported("residue field of the real place")),
        Place::FuncInfty => Ok(ratfunc_base(k)?.clone()),
        Place::FuncIrred(g) => {
            let base = ratfunc_base(k)?;
            let deg = g.degree().unwrap_or(0);
            if deg == 1 {
                return Ok(base.clone());
            }
            if let Field::Fp(p) = base {
                let modulus = g
                    .coeffs()
                    .iter()
                    .map(|c| match c {
                        Elem::Int(c) => *c,
                        _ => unreachable!(),
                    })
                    .collect();
                return Field::fq(*p, modulus);
            }
            if deg == 2 && base.characteristic() != 2 {
                let b = g.coeff(base, 1);
                let c = g.coeff(base, 0);
                let four = base.from_i64(4);
                let eps = base.sub(&base.div(&base.mul(&b, &b), &four)?, &c);
                return Field::quad_ext(base.clone(), eps);
            }
            Field::alg_ext(base.clone(), g.clone())
        }
    }
}

/// The image of `t` in `κ(v)` for a polynomial place.
fn generator(base: &Field, g: &Poly, kappa: &Field) -> Result<Elem> {
    let deg = g.degree().unwrap_or(0);
    if deg == 1 {
        return Ok(base.neg(&g.coeff(base, 0)));
    }
    Ok(match kappa {
        Field::Fq { k, .. } => {
            let mut w = vec![0; *k];
            w[1] = 1;
            Elem::Vec(w)
        }
        Field::QuadExt { .. } => {
            let half_b = base.div(&g.coeff(base, 1), &base.from_i64(2))?;
            Elem::Pair(Box::new(base.neg(&half_b)), Box::new(base.one()))
        }
        Field::AlgExt { .. } => Elem::Res(Poly::x(base)),
        _ => unreachable!("unexpected residue field"),
    })
}

/// Image of `x` (with order ≥ 0) in the residue field.
pub fn residue(k: &Field, v: &Place, x: &Elem) -> Result<Elem> {
    let kappa = residue_field(k, v)?;
    if !x.is_zero() && order(k, v, x)? < 0 {
        return Err(Error::pre(format!("{} has negative order at {}", k.show(x), v.show(k))));
    }
    match v {
        Place::QPrime(_) => {
            let r = rat_of(x)?;
            let n = kappa.from_bigint(r.numer());
            let d = kappa.from_bigint(r.denom());
            kappa.div(&n, &d)
        }
        Place::QInfty => unreachable!(),
        Place::FuncInfty => {
            let base = ratfunc_base(k)?;
            let (n, d) = frac_parts(k, x)?;
            if n.is_zero() || n.degree() < d.degree() {
                Ok(base.zero())
            } else {
                base.div(n.lead(), d.lead())
            }
        }
        Place::FuncIrred(g) => {
            let base = ratfunc_base(k)?;
            let (n, d) = frac_parts(k, x)?;
            let theta = generator(base, g, &kappa)?;
            if g.degree() == Some(1) {
                return base.div(&poly::eval(base, n, &theta), &poly::eval(base, d, &theta));
            }
            let nv = poly::eval_in(base, &kappa, n, &theta);
            let dv = poly::eval_in(base, &kappa, d, &theta);
            kappa.div(&nv, &dv)
        }
    }
}

/// A generator of the maximal ideal at `v`.
pub fn uniformizer(k: &Field, v: &Place) -> Result<Elem> {
    match v {
        Place::QPrime(p) => Ok(Elem::Rat(BigRational::from_integer(p.clone()))),
        Place::QInfty => Err(Error::unsupported("the real place has no uniformizer")),
        Place::FuncIrred(g) => {
            let base = ratfunc_base(k)?;
            frac(base, g.clone(), Poly::one(base))
        }
        Place::FuncInfty => {
            let base = ratfunc_base(k)?;
            frac(base, Poly::one(base), Poly::x(base))
        }
    }
}

/// Places where `f` has nonzero order, with the orders. Polynomial places
/// come first, sorted by degree, followed by the place at infinity.
pub fn support(k: &Field, f: &Elem) -> Result<Vec<(Place, i64)>> {
    if f.is_zero() {
        return Err(Error::pre("support of zero is undefined"));
    }
    match k {
        Field::Q => {
            let r = rat_of(f)?;
            Ok(integer::rat_primes(r)
                .into_iter()
                .map(|p| {
                    let m = big_valuation(r, &p);
                    (Place::QPrime(p), m)
                })
                .collect())
        }
        Field::RatFunc { base, .. } => {
            let (n, d) = frac_parts(k, f)?;
            let mut out: Vec<(Place, i64)> = Vec::new();
            for (g, m) in factor::factor(base, n)?.factors {
                out.push((Place::FuncIrred(g), m as i64));
            }
            for (g, m) in factor::factor(base, d)?.factors {
                out.push((Place::FuncIrred(g), -(m as i64)));
            }
            out.sort_by(|(a, _), (b, _)| {
                (a.residue_degree(), a).cmp(&(b.residue_degree(), b))
            });
            let inf = d.degree().unwrap_or(0) as i64 - n.degree().unwrap_or(0) as i64;
            if inf != 0 {
                out.push((Place::FuncInfty, inf));
            }
            Ok(out)
        }
        _ => Err(Error::Mismatch(format!("{k} has no places"))),
    }
}

/// Ramification and residue degrees of the places of `K[√ε]` over a place.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadExtSplitting {
    pub prolongations: Vec<(u32, u32)>,
}

impl QuadExtSplitting {
    pub fn degree_sum(&self) -> u32 {
        self.prolongations.iter().map(|(e, f)| e * f).sum()
    }
}

pub fn extend_to_sqrt(k: &Field, v: &Place, eps: &Elem) -> Result<QuadExtSplitting> {
    v.check(k)?;
    let residue_char = match v {
        Place::QPrime(p) => p.to_u64().unwrap_or(u64::MAX),
        Place::QInfty => return Err(Error::unsupported("splitting at the real place")),
        _ => k.characteristic(),
    };
    if residue_char == 2 {
        return Err(Error::unsupported("residue characteristic 2"));
    }
    if eps.is_zero() || k.is_square(eps)? {
        return Err(Error::pre("ε must be a nonsquare"));
    }
    let m = order(k, v, eps)?;
    let prolongations = if m.rem_euclid(2) == 1 {
        vec![(2, 1)]
    } else {
        let pi = uniformizer(k, v)?;
        let unit = k.mul(eps, &k.pow_i64(&pi, -m)?);
        let r = residue(k, v, &unit)?;
        if residue_field(k, v)?.is_square(&r)? {
            vec![(1, 1), (1, 1)]
        } else {
            vec![(1, 2)]
        }
    };
    Ok(QuadExtSplitting { prolongations })
}

/// Tame symbol `(−1)^{v(a)v(b)} a^{v(b)} / b^{v(a)}` reduced into `κ(v)`.
pub fn tame_symbol(k: &Field, v: &Place, a: &Elem, b: &Elem) -> Result<Elem> {
    let alpha = order(k, v, a)?;
    let beta = order(k, v, b)?;
    let mut c = k.mul(&k.pow_i64(a, beta)?, &k.pow_i64(b, -alpha)?);
    if (alpha * beta).rem_euclid(2) == 1 {
        c = k.neg(&c);
    }
    residue(k, v, &c)
}

/// Norm from the residue field of a polynomial place down to its constant
/// field.
pub fn residue_norm(kappa: &Field, constants: &Field, x: &Elem) -> Result<Elem> {
    if kappa == constants {
        return Ok(x.clone());
    }
    match kappa {
        Field::Fq { p, k, .. } => {
            let e = (BigUint::from(*p).pow(*k as u32) - 1u32) / (p - 1);
            match kappa.pow(x, &e) {
                Elem::Vec(v) => Ok(Elem::Int(v[0])),
                other => Ok(other),
            }
        }
        Field::QuadExt { base, eps } => match x {
            Elem::Pair(a, b) => Ok(base.sub(&base.mul(a, a), &base.mul(eps, &base.mul(b, b)))),
            _ => Err(Error::Mismatch("expected a pair".into())),
        },
        Field::AlgExt { base, modulus } if base.is_finite() => {
            let q = base.size().expect("finite");
            let d = modulus.degree().unwrap_or(1) as u32;
            let e = (q.pow(d) - 1u32) / (q - 1u32);
            match kappa.pow(x, &e) {
                Elem::Res(r) => Ok(r.coeff(base, 0)),
                other => Ok(other),
            }
        }
        _ => Err(Error::unsupported(format!("norm from {kappa} to {constants}"))),
    }
}

/// Some element with exactly the prescribed orders at the listed places.
pub fn weak_approx(k: &Field, targets: &[(Place, i64)]) -> Result<Elem> {
    let distinct: BTreeSet<&Place> = targets.iter().map(|(p, _)| p).collect();
    if distinct.len() != targets.len() {
        return Err(Error::pre("weak approximation targets must be distinct places"));
    }
    for (v, _) in targets {
        v.check(k)?;
    }
    let xi = match k {
        Field::Q => {
            let mut r = k.one();
            for (v, n) in targets {
                match v {
                    Place::QPrime(p) => {
                        let pp = Elem::Rat(BigRational::from_integer(p.clone()));
                        r = k.mul(&r, &k.pow_i64(&pp, *n)?);
                    }
                    _ => return Err(Error::unsupported("approximation at the real place")),
                }
            }
            r
        }
        Field::RatFunc { base, .. } => approx_ratfunc(k, base, targets)?,
        _ => return Err(Error::Mismatch(format!("{k} has no places"))),
    };
    for (v, n) in targets {
        let got = order(k, v, &xi)?;
        if got != *n {
            return Err(Error::pre(format!(
                "approximation failed at {}: order {got}, wanted {n}",
                v.show(k)
            )));
        }
    }
    Ok(xi)
}

fn approx_ratfunc(k: &Field, base: &Field, targets: &[(Place, i64)]) -> Result<Elem> {
    let listed: BTreeSet<&Poly> = targets
        .iter()
        .filter_map(|(v, _)| match v {
            Place::FuncIrred(g) => Some(g),
            _ => None,
        })
        .collect();
    let mut xi = k.one();
    let mut inf_order = 0i64;
    for (v, n) in targets {
        if let Place::FuncIrred(g) = v {
            let gi = frac(base, g.clone(), Poly::one(base))?;
            xi = k.mul(&xi, &k.pow_i64(&gi, *n)?);
            inf_order -= n * g.degree().unwrap_or(0) as i64;
        }
    }
    let Some(want) = targets.iter().find(|(v, _)| *v == Place::FuncInfty).map(|(_, n)| *n) else {
        return Ok(xi);
    };
    let shift = want - inf_order;
    if shift == 0 {
        return Ok(xi);
    }
    let as_elem = |g: Poly| frac(base, g, Poly::one(base));
    if let Some(h) = unlisted_irreducible(base, 1, &listed)? {
        return Ok(k.mul(&xi, &k.pow_i64(&as_elem(h)?, -shift)?));
    }
    // Every linear place is listed: combine unlisted places of degree 2 and 3.
    let h2 = unlisted_irreducible(base, 2, &listed)?.expect("irreducible quadratics exist");
    let h3 = unlisted_irreducible(base, 3, &listed)?.expect("irreducible cubics exist");
    let s3 = (-shift).rem_euclid(2);
    let s2 = (-shift - 3 * s3) / 2;
    let xi = k.mul(&xi, &k.pow_i64(&as_elem(h2)?, s2)?);
    Ok(k.mul(&xi, &k.pow_i64(&as_elem(h3)?, s3)?))
}

/// First monic irreducible of degree `d` (in enumeration order) not in `listed`.
fn unlisted_irreducible(base: &Field, d: usize, listed: &BTreeSet<&Poly>) -> Result<Option<Poly>> {
    let small = |i: u64| -> Result<Elem> {
        if base.is_finite() {
            base.element_at(i)
        } else {
            let n = i as i64;
            Ok(base.from_i64(if n % 2 == 1 { (n + 1) / 2 } else { -n / 2 }))
        }
    };
    let limit: u64 = match base.size_u64() {
        Some(q) => q.checked_pow(d as u32).unwrap_or(u64::MAX),
        None => 4096,
    };
    for idx in 0..limit {
        let mut cs = Vec::with_capacity(d + 1);
        let mut rest = idx;
        for _ in 0..d {
            let (digit, next) = match base.size_u64() {
                Some(q) => (rest % q, rest / q),
                None => (rest, 0),
            };
            cs.push(small(digit)?);
            rest = next;
        }
        cs.push(base.one());
        let g = Poly::new(cs);
        if listed.contains(&g) {
            continue;
        }
        if d == 1 || factor::is_irreducible(base, &g)? {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// How a rational prime decomposes in `Q(√d)`, `d` squarefree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimeSplitting {
    Split,
    Inert,
    Ramified,
}

pub fn prime_splitting(d: &BigInt, p: &BigInt) -> PrimeSplitting {
    if p == &BigInt::from(2) {
        match d.mod_floor(&BigInt::from(8)).to_u32().unwrap() {
            1 => PrimeSplitting::Split,
            5 => PrimeSplitting::Inert,
            _ => PrimeSplitting::Ramified,
        }
    } else {
        match integer::legendre_big(d, p) {
            0 => PrimeSplitting::Ramified,
            1 => PrimeSplitting::Split,
            _ => PrimeSplitting::Inert,
        }
    }
}

/// A place of `Q(t)` followed by a `p`-adic place of its residue field.
///
/// When `p` splits in a quadratic residue field, `root` selects the place
/// at which the image of `t` is congruent to `root` modulo `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompositePlace {
    pub outer: Place,
    pub prime: BigInt,
    pub root: Option<BigInt>,
}

impl CompositePlace {
    pub fn show(&self, k: &Field) -> String {
        match &self.root {
            Some(r) => format!("comp({}, p:{}@{})", self.outer.show(k), self.prime, r),
            None => format!("comp({}, p:{})", self.outer.show(k), self.prime),
        }
    }

    /// Parses `comp(irr:[..], p:2)` or `comp(irr:[..], p:5@2)`.
    pub fn parse(k: &Field, s: &str) -> Result<CompositePlace> {
        let inner = s
            .trim()
            .strip_prefix("comp(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::parse(format!("expected comp(..), found {s:?}")))?;
        let parts = text::split_top(inner);
        if parts.len() != 2 {
            return Err(Error::parse("comp(..) expects two places"));
        }
        let outer = Place::parse(k, parts[0])?;
        let spec = parts[1]
            .trim()
            .strip_prefix("p:")
            .ok_or_else(|| Error::parse("inner place must be p:<prime>"))?;
        let (p, root) = match spec.split_once('@') {
            Some((p, r)) => (p, Some(r)),
            None => (spec, None),
        };
        let bad = |what: &str| Error::parse(format!("invalid {what} in {s:?}"));
        let prime: BigInt = p.trim().parse().map_err(|_| bad("prime"))?;
        let root = root
            .map(|r| r.trim().parse::<BigInt>().map_err(|_| bad("root")))
            .transpose()?;
        let c = CompositePlace { outer, prime, root };
        c.check(k)?;
        Ok(c)
    }

    pub fn check(&self, k: &Field) -> Result<()> {
        if ratfunc_base(k)? != &Field::Q {
            return Err(Error::unsupported("composite places are implemented over Q(t) only"));
        }
        self.outer.check(k)?;
        let g = match &self.outer {
            Place::FuncIrred(g) => g,
            _ => return Err(Error::unsupported("outer place must be a polynomial place")),
        };
        if g.degree().unwrap_or(0) > 2 {
            return Err(Error::unsupported("residue fields of degree > 2 over Q"));
        }
        if !integer::is_probable_prime(&self.prime) || self.prime < BigInt::from(2) {
            return Err(Error::pre(format!("{} is not prime", self.prime)));
        }
        if g.degree() == Some(2) {
            let (d, _) = quadratic_data(g)?;
            let split = prime_splitting(&d, &self.prime) == PrimeSplitting::Split;
            match (&self.root, split) {
                (None, true) => {
                    return Err(Error::pre(format!(
                        "{} splits; choose a place with @root",
                        self.prime
                    )))
                }
                (Some(_), false) => {
                    return Err(Error::pre(format!("{} does not split", self.prime)))
                }
                (Some(r), true) => {
                    let gz = integral_coeffs(g)?;
                    let p = &self.prime;
                    let ev = (&gz[0] + &gz[1] * r + &gz[2] * r * r).mod_floor(p);
                    let dv = (&gz[1] + BigInt::from(2) * r).mod_floor(p);
                    if !ev.is_zero() || dv.is_zero() {
                        return Err(Error::unsupported(format!(
                            "{r} is not a simple root of the place polynomial modulo {p}"
                        )));
                    }
                }
                (None, false) => {}
            }
        } else if self.root.is_some() {
            return Err(Error::pre("a root is only meaningful for quadratic residue fields"));
        }
        Ok(())
    }
}

fn integral_coeffs(g: &Poly) -> Result<Vec<BigInt>> {
    g.coeffs()
        .iter()
        .map(|c| {
            let r = rat_of(c)?;
            if r.is_integer() {
                Ok(r.to_integer())
            } else {
                Err(Error::unsupported("place polynomial must have integer coefficients"))
            }
        })
        .collect()
}

/// For `g = t² + bt + c`: squarefree `d` with `Q(√ε) = Q(√d)` where
/// `ε = b²/4 − c`, and `s` with `ε = d·s²`.
fn quadratic_data(g: &Poly) -> Result<(BigInt, BigRational)> {
    let b = rat_of(&g.coeffs()[1])?.clone();
    let c = rat_of(&g.coeffs()[0])?.clone();
    let eps = &b * &b / BigRational::from_integer(4.into()) - c;
    let d = integer::squarefree_part(&(eps.numer() * eps.denom()));
    let s2 = &eps / BigRational::from_integer(d.clone());
    let s = BigRational::new(
        integer::sqrt_exact(s2.numer()).expect("square"),
        integer::sqrt_exact(s2.denom()).expect("square"),
    );
    Ok((d, s))
}

/// Lifts a simple root of `g` modulo `p` to a root modulo `p^m`.
fn hensel_root(gz: &[BigInt], r: &BigInt, p: &BigInt, m: u32) -> BigInt {
    let modulus = p.pow(m);
    let mut x = r.clone();
    let mut prec = 1u32;
    while prec < m {
        prec = (2 * prec).min(m);
        let pk = p.pow(prec);
        let fx = (&gz[0] + &gz[1] * &x + &gz[2] * &x * &x).mod_floor(&pk);
        let dfx = (&gz[1] + BigInt::from(2) * &x).mod_floor(&pk);
        let inv = dfx
            .extended_gcd(&pk)
            .x
            .mod_floor(&pk);
        x = (&x - fx * inv).mod_floor(&pk);
    }
    x.mod_floor(&modulus)
}

/// `(order at P, inner order of the leading residue)`; compare
/// lexicographically.
pub fn composite_order(k: &Field, c: &CompositePlace, f: &Elem) -> Result<(i64, i64)> {
    c.check(k)?;
    let g = match &c.outer {
        Place::FuncIrred(g) => g,
        _ => unreachable!(),
    };
    let m = order(k, &c.outer, f)?;
    let pi = uniformizer(k, &c.outer)?;
    let unit = k.mul(f, &k.pow_i64(&pi, -m)?);
    let r = residue(k, &c.outer, &unit)?;
    let p = &c.prime;
    if g.degree() == Some(1) {
        return Ok((m, big_valuation(rat_of(&r)?, p)));
    }
    let (x, y) = match &r {
        Elem::Pair(x, y) => (rat_of(x)?.clone(), rat_of(y)?.clone()),
        _ => unreachable!(),
    };
    let (d, s) = quadratic_data(g)?;
    let eps = BigRational::from_integer(d.clone()) * &s * &s;
    let norm = &x * &x - &eps * &y * &y;
    let inner = match prime_splitting(&d, p) {
        PrimeSplitting::Inert => {
            let n = big_valuation(&norm, p);
            debug_assert!(n % 2 == 0);
            n / 2
        }
        PrimeSplitting::Ramified => big_valuation(&norm, p),
        PrimeSplitting::Split => {
            // x + y√ε = X + Yθ with θ the image of t and √ε = θ + b/2.
            let b = rat_of(&g.coeffs()[1])?.clone();
            let half_b = b / BigRational::from_integer(2.into());
            let big_x = &x + &y * half_b;
            let big_y = y;
            let den = big_x.denom().lcm(big_y.denom());
            let dr = BigRational::from_integer(den.clone());
            let xi = (&big_x * &dr).to_integer();
            let yi = (&big_y * &dr).to_integer();
            let gz = integral_coeffs(g)?;
            let nz = &xi * &xi - &gz[1] * &xi * &yi + &gz[0] * &yi * &yi;
            let bound = integer::split_valuation(&nz, p).0 as u32 + 1;
            let theta = hensel_root(&gz, c.root.as_ref().expect("checked"), p, bound);
            let modulus = p.pow(bound);
            let val = (&xi + &yi * theta).mod_floor(&modulus);
            let w = if val.is_zero() {
                bound as i64
            } else {
                integer::split_valuation(&val, p).0
            };
            w - integer::split_valuation(&den, p).0
        }
    };
    Ok((m, inner))
}

/// The composite places used for integrality checks of `Z[t]`: monic
/// integral places of degree ≤ 2 followed by primes 2, 3, 5, 7.
pub fn composite_catalogue() -> Vec<CompositePlace> {
    let q = Field::Q;
    let mut outers: Vec<Poly> = (-2..=2).map(|c| Poly::from_i64s(&q, &[-c, 1])).collect();
    for cs in [[1, 0, 1], [-2, 0, 1], [1, 1, 1], [2, 0, 1], [-3, 0, 1], [-1, 1, 1], [2, 1, 1]] {
        outers.push(Poly::from_i64s(&q, &cs));
    }
    let mut out = Vec::new();
    for g in outers {
        for p in [2i64, 3, 5, 7] {
            let p = BigInt::from(p);
            let outer = Place::FuncIrred(g.clone());
            if g.degree() == Some(2) {
                let (d, _) = quadratic_data(&g).expect("rational coefficients");
                if prime_splitting(&d, &p) == PrimeSplitting::Split {
                    let gz = integral_coeffs(&g).expect("integral");
                    let mut roots = 0;
                    let pu = p.to_i64().unwrap();
                    for r in 0..pu {
                        let r = BigInt::from(r);
                        let ev = (&gz[0] + &gz[1] * &r + &gz[2] * &r * &r).mod_floor(&p);
                        let dv = (&gz[1] + BigInt::from(2) * &r).mod_floor(&p);
                        if ev.is_zero() && !dv.is_zero() {
                            out.push(CompositePlace { outer: outer.clone(), prime: p.clone(), root: Some(r) });
                            roots += 1;
                        }
                    }
                    debug_assert!(roots == 0 || roots == 2);
                    continue;
                }
            }
            out.push(CompositePlace { outer, prime: p, root: None });
        }
    }
    out
}

/// Lexicographic nonnegativity of a composite order.
pub fn composite_nonnegative(o: (i64, i64)) -> bool {
    o >= (0, 0)
}

impl fmt::Display for PrimeSplitting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrimeSplitting::Split => "split",
            PrimeSplitting::Inert => "inert",
            PrimeSplitting::Ramified => "ramified",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3t() -> Field {
        Field::rat_func(Field::fp(3).unwrap(), "t")
    }

    fn el(k: &Field, s: &str) -> Elem {
        k.parse_elem(s).unwrap()
    }

    #[test]
    fn orders() {
        let q = Field::Q;
        assert_eq!(order(&q, &Place::QPrime(3.into()), &Elem::rat(9, 2)).unwrap(), 2);
        let k = f3t();
        let v = Place::parse(&k, "irr:[2,1]").unwrap();
        assert_eq!(order(&k, &v, &el(&k, "(t-1)^2/t")).unwrap(), 2);
        assert_eq!(order(&k, &Place::FuncInfty, &el(&k, "t")).unwrap(), -1);
        assert!(order(&k, &Place::FuncInfty, &k.zero()).is_err());
    }

    #[test]
    fn residues() {
        let q = Field::Q;
        assert_eq!(residue(&q, &Place::QPrime(5.into()), &Elem::rat(7, 3)).unwrap(), Elem::Int(4));
        let k = f3t();
        let v = Place::parse(&k, "irr:[0,1]").unwrap();
        assert_eq!(residue(&k, &v, &el(&k, "t+2")).unwrap(), Elem::Int(2));
        let qt = Field::rat_func(Field::Q, "t");
        let v = Place::parse(&qt, "irr:[1,0,1]").unwrap();
        let i = residue(&qt, &v, &el(&qt, "t")).unwrap();
        let kappa = residue_field(&qt, &v).unwrap();
        assert_eq!(kappa.mul(&i, &i), kappa.from_i64(-1));
        assert!(residue(&qt, &v, &el(&qt, "1/(t^2+1)")).is_err());
    }

    #[test]
    fn supports() {
        let k = f3t();
        let s = support(&k, &el(&k, "t/(t+1)^2")).unwrap();
        let shown: Vec<(String, i64)> = s.iter().map(|(v, m)| (v.show(&k), *m)).collect();
        assert_eq!(
            shown,
            vec![("irr:[0,1]".into(), 1), ("irr:[1,1]".into(), -2), ("finf".into(), 1)]
        );
        assert!(support(&k, &k.one()).unwrap().is_empty());
        let k5 = Field::rat_func(Field::fp(5).unwrap(), "u");
        let s = support(&k5, &el(&k5, "u^2+1")).unwrap();
        let shown: Vec<(String, i64)> = s.iter().map(|(v, m)| (v.show(&k5), *m)).collect();
        assert_eq!(
            shown,
            vec![("irr:[2,1]".into(), 1), ("irr:[3,1]".into(), 1), ("finf".into(), -2)]
        );
    }

    #[test]
    fn sqrt_splitting() {
        let k = Field::rat_func(Field::fp(5).unwrap(), "t");
        let at0 = Place::parse(&k, "irr:[0,1]").unwrap();
        let at1 = Place::parse(&k, "irr:[4,1]").unwrap();
        let split = |v: &Place, e: &str| extend_to_sqrt(&k, v, &el(&k, e)).unwrap().prolongations;
        assert_eq!(split(&at0, "t"), vec![(2, 1)]);
        assert_eq!(split(&at1, "2"), vec![(1, 2)]);
        assert_eq!(split(&at1, "4*t"), vec![(1, 1), (1, 1)]);
        assert!(extend_to_sqrt(&k, &at1, &el(&k, "t^2")).is_err());
    }

    #[test]
    fn composite_examples() {
        let qt = Field::rat_func(Field::Q, "t");
        let f = el(&qt, "t/2");
        let c = CompositePlace::parse(&qt, "comp(irr:[0,1], p:2)").unwrap();
        assert_eq!(composite_order(&qt, &c, &f).unwrap().0, 1);
        let c = CompositePlace::parse(&qt, "comp(irr:[-1,1], p:2)").unwrap();
        assert_eq!(composite_order(&qt, &c, &f).unwrap(), (0, -1));
        let c = CompositePlace::parse(&qt, "comp(irr:[1,0,1], p:2)").unwrap();
        assert_eq!(composite_order(&qt, &c, &el(&qt, "t*(t-1)/2")).unwrap(), (0, -1));
        assert!(CompositePlace::parse(&qt, "comp(irr:[1,0,1], p:5)").is_err());
        let c = CompositePlace::parse(&qt, "comp(irr:[1,0,1], p:5@2)").unwrap();
        // t − 2 vanishes at the place where t ≡ 2 mod 5
        assert_eq!(composite_order(&qt, &c, &el(&qt, "t-2")).unwrap(), (0, 1));
        let c = CompositePlace::parse(&qt, "comp(irr:[1,0,1], p:5@3)").unwrap();
        assert_eq!(composite_order(&qt, &c, &el(&qt, "t-2")).unwrap(), (0, 0));
        assert_eq!(c.show(&qt), "comp(irr:[1,0,1], p:5@3)");
    }

    #[test]
    fn approximation() {
        let k = f3t();
        let t0 = Place::parse(&k, "irr:[0,1]").unwrap();
        let t1 = Place::parse(&k, "irr:[1,1]").unwrap();
        let xi = weak_approx(&k, &[(t0.clone(), 1), (t1, 1)]).unwrap();
        assert_eq!(xi, el(&k, "t^2+t"));
        let xi = weak_approx(&k, &[(t0.clone(), 1), (Place::FuncInfty, 1)]).unwrap();
        assert_eq!(order(&k, &Place::FuncInfty, &xi).unwrap(), 1);
        assert_eq!(weak_approx(&k, &[]).unwrap(), k.one());
        // all linear places of F_3(t) listed
        let all: Vec<(Place, i64)> = (0..3)
            .map(|c| (Place::parse(&k, &format!("irr:[{c},1]")).unwrap(), 1))
            .chain([(Place::FuncInfty, 2)])
            .collect();
        weak_approx(&k, &all).unwrap();
    }

    #[test]
    fn residue_fields() {
        let k = Field::rat_func(Field::fp(3).unwrap(), "t");
        let v = Place::parse(&k, "irr:[1,0,1]").unwrap();
        assert_eq!(residue_field(&k, &v).unwrap().size_u64(), Some(9));
        let k9 = Field::rat_func(Field::finite(9).unwrap(), "t");
        let v = Place::FuncIrred(factor::first_irreducible(&Field::finite(9).unwrap(), 2).unwrap());
        assert_eq!(residue_field(&k9, &v).unwrap().size_u64(), Some(81));
    }
}
