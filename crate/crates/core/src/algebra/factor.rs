//! Polynomial factorization: Cantor–Zassenhaus over finite fields and
//! Zassenhaus with Hensel lifting over the rationals.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::{self, Poly};
use super::{zpoly, Elem, Field};
use crate::error::{Error, Result};

/// Seed for the randomized equal-degree splitting; fixed so results are
/// reproducible.
const SPLIT_SEED: u64 = 0x5eed_0f_f1e1d;

/// `f = unit · ∏ gᵢ^{mᵢ}` with monic irreducible `gᵢ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Elem,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    /// Multiplies the factorization back out.
    pub fn expand(&self, base: &Field) -> Poly {
        let mut acc = Poly::constant(base, self.unit.clone());
        for (g, m) in &self.factors {
            acc = poly::mul(base, &acc, &poly::pow(base, g, *m as u64));
        }
        acc
    }
}

/// Factors a nonzero polynomial over a finite field or over `Q`.
pub fn factor(base: &Field, f: &Poly) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::pre("cannot factor the zero polynomial"));
    }
    let result = if base.is_finite() {
        factor_finite(base, f)?
    } else if *base == Field::Q {
        zpoly::factor_q(f)?
    } else {
        return Err(Error::unsupported(format!("factorization over {base}")));
    };
    debug_assert_eq!(&result.expand(base), f, "factorization does not multiply back");
    Ok(result)
}

/// Irreducibility over a finite field or `Q` (degree ≥ 1).
pub fn is_irreducible(base: &Field, f: &Poly) -> Result<bool> {
    match f.degree() {
        None | Some(0) => Ok(false),
        Some(1) => Ok(true),
        Some(_) => {
            let fs = factor(base, f)?;
            Ok(fs.factors.len() == 1 && fs.factors[0].1 == 1)
        }
    }
}

/// Smallest monic irreducible polynomial of degree `k` over a finite field,
/// in the enumeration order of coefficient vectors (constant term least
/// significant).
pub fn first_irreducible(base: &Field, k: usize) -> Result<Poly> {
    let q = base
        .size_u64()
        .ok_or_else(|| Error::pre("first_irreducible needs a finite field"))?;
    let total = q
        .checked_pow(k as u32)
        .ok_or_else(|| Error::pre("extension degree too large"))?;
    for idx in 0..total {
        let mut cs = Vec::with_capacity(k + 1);
        let mut r = idx;
        for _ in 0..k {
            cs.push(base.element_at(r % q)?);
            r /= q;
        }
        cs.push(base.one());
        let g = Poly::new(cs);
        if is_irreducible(base, &g)? {
            return Ok(g);
        }
    }
    Err(Error::pre("no irreducible polynomial found"))
}

fn merge(base: &Field, unit: Elem, mut factors: Vec<(Poly, u32)>) -> Factorization {
    let _ = base;
    factors.sort_by(|a, b| (a.0.degree(), &a.0).cmp(&(b.0.degree(), &b.0)));
    let mut merged: Vec<(Poly, u32)> = Vec::new();
    for (g, m) in factors {
        match merged.last_mut() {
            Some((h, k)) if *h == g => *k += m,
            _ => merged.push((g, m)),
        }
    }
    Factorization {
        unit,
        factors: merged,
    }
}

fn factor_finite(base: &Field, f: &Poly) -> Result<Factorization> {
    let (unit, f) = poly::monic(base, f)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
    let mut out = Vec::new();
    for (g, m) in squarefree_finite(base, &f)? {
        for (h, d) in distinct_degree(base, &g)? {
            for piece in equal_degree(base, &h, d, &mut rng)? {
                out.push((piece, m));
            }
        }
    }
    Ok(merge(base, unit, out))
}

/// Squarefree decomposition of a monic polynomial over a finite field.
fn squarefree_finite(base: &Field, f: &Poly) -> Result<Vec<(Poly, u32)>> {
    let p = base.characteristic();
    let one = Poly::one(base);
    let mut out = Vec::new();
    if f.degree() == Some(0) {
        return Ok(out);
    }
    let df = poly::derivative(base, f);
    let mut c = poly::gcd(base, f, &df);
    let mut w = poly::exact_div(base, f, &c);
    let mut i = 1u32;
    while w != one {
        let y = poly::gcd(base, &w, &c);
        let fac = poly::exact_div(base, &w, &y);
        if fac != one {
            out.push((fac, i));
        }
        c = poly::exact_div(base, &c, &y);
        w = y;
        i += 1;
    }
    if c != one {
        let root = pth_root(base, &c)?;
        for (g, m) in squarefree_finite(base, &root)? {
            out.push((g, m * p as u32));
        }
    }
    Ok(out)
}

/// `c^{1/p}` for a polynomial whose exponents are all multiples of `p`.
fn pth_root(base: &Field, c: &Poly) -> Result<Poly> {
    let p = base.characteristic() as usize;
    let q = base.size().unwrap();
    // inverse Frobenius on the coefficients: a ↦ a^{q/p}
    let e = q / BigUint::from(p);
    let mut cs = Vec::new();
    for (i, a) in c.coeffs().iter().enumerate() {
        if i % p == 0 {
            cs.push(base.pow(a, &e));
        } else if !a.is_zero() {
            return Err(Error::pre("polynomial is not a p-th power"));
        }
    }
    Ok(Poly::new(cs))
}

/// Splits a squarefree monic polynomial into products of irreducibles of
/// equal degree.
fn distinct_degree(base: &Field, f: &Poly) -> Result<Vec<(Poly, usize)>> {
    let q = base.size().unwrap();
    let x = Poly::x(base);
    let one = Poly::one(base);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = poly::rem(base, &x, &rest);
    let mut i = 1;
    while rest.degree().unwrap_or(0) >= 2 * i {
        h = poly::pow_mod(base, &h, &q, &rest);
        let g = poly::gcd(base, &rest, &poly::sub(base, &h, &x));
        if g != one {
            rest = poly::exact_div(base, &rest, &g);
            h = poly::rem(base, &h, &rest);
            out.push((g, i));
        }
        i += 1;
    }
    if rest != one {
        let d = rest.degree().unwrap();
        out.push((rest, d));
    }
    Ok(out)
}

fn random_poly(base: &Field, deg_bound: usize, rng: &mut ChaCha8Rng) -> Result<Poly> {
    let q = base.size_u64().unwrap_or(u64::MAX);
    let mut cs = Vec::with_capacity(deg_bound);
    for _ in 0..deg_bound {
        cs.push(base.element_at(rng.gen_range(0..q))?);
    }
    Ok(Poly::new(cs))
}

/// Cantor–Zassenhaus splitting of a product of distinct irreducibles of
/// degree `d`.
fn equal_degree(base: &Field, f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Poly>> {
    let n = f.degree().unwrap();
    if n == d {
        return Ok(vec![f.clone()]);
    }
    let q = base.size().unwrap();
    let one = Poly::one(base);
    loop {
        let a = random_poly(base, n, rng)?;
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let b = if base.characteristic() == 2 {
            // trace map a + a^2 + … + a^{2^{kd−1}}
            let k = base.prime_degree().unwrap() * d;
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..k {
                t = poly::rem(base, &poly::mul(base, &t, &t), f);
                acc = poly::add(base, &acc, &t);
            }
            acc
        } else {
            let e = (q.pow(d as u32) - 1u32) / 2u32;
            poly::sub(base, &poly::pow_mod(base, &a, &e, f), &one)
        };
        let g = poly::gcd(base, f, &b);
        if g != one && g != *f && !g.is_zero() {
            let h = poly::exact_div(base, f, &g);
            let mut out = equal_degree(base, &g, d, rng)?;
            out.extend(equal_degree(base, &h, d, rng)?);
            return Ok(out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> Field {
        Field::fp(p).unwrap()
    }

    #[test]
    fn x_squared_plus_one_mod_5_splits() {
        let k = fp(5);
        let f = Poly::from_i64s(&k, &[1, 0, 1]);
        let fs = factor(&k, &f).unwrap();
        assert_eq!(
            fs.factors,
            vec![
                (Poly::from_i64s(&k, &[2, 1]), 1),
                (Poly::from_i64s(&k, &[3, 1]), 1)
            ]
        );
    }

    #[test]
    fn x_squared_plus_one_mod_3_is_irreducible() {
        let k = fp(3);
        assert!(is_irreducible(&k, &Poly::from_i64s(&k, &[1, 0, 1])).unwrap());
    }

    #[test]
    fn cube_in_characteristic_two() {
        let k = fp(2);
        let f = Poly::from_i64s(&k, &[0, 0, 0, 1]);
        let fs = factor(&k, &f).unwrap();
        assert_eq!(fs.factors, vec![(Poly::x(&k), 3)]);
    }

    #[test]
    fn pth_powers_are_detected() {
        let k = fp(3);
        // (x+1)^3 (x^2+1)^4
        let a = Poly::from_i64s(&k, &[1, 1]);
        let b = Poly::from_i64s(&k, &[1, 0, 1]);
        let f = poly::mul(&k, &poly::pow(&k, &a, 3), &poly::pow(&k, &b, 4));
        let fs = factor(&k, &f).unwrap();
        assert_eq!(fs.factors, vec![(a, 3), (b, 4)]);
    }

    #[test]
    fn factors_over_extension_fields() {
        let f4 = Field::fq(2, vec![1, 1, 1]).unwrap();
        // x^2 + x + 1 splits over F_4
        let f = Poly::from_i64s(&f4, &[1, 1, 1]);
        let fs = factor(&f4, &f).unwrap();
        assert_eq!(fs.factors.len(), 2);
        let f9 = Field::finite(9).unwrap();
        let g = Poly::from_i64s(&f9, &[1, 0, 0, 0, 1]);
        let gs = factor(&f9, &g).unwrap();
        assert!(gs.factors.iter().all(|(h, _)| h.degree() == Some(1)));
    }

    #[test]
    fn default_modulus_of_f9() {
        let f9 = Field::finite(9).unwrap();
        assert_eq!(
            f9,
            Field::Fq {
                p: 3,
                k: 2,
                modulus: vec![1, 0, 1]
            }
        );
    }

    #[test]
    fn random_products_multiply_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [2u64, 3, 5, 7, 11] {
            let k = fp(p);
            for _ in 0..20 {
                let deg = rng.gen_range(1..10);
                let mut cs: Vec<i64> = (0..deg).map(|_| rng.gen_range(0..p as i64)).collect();
                cs.push(rng.gen_range(1..p as i64));
                let f = Poly::from_i64s(&k, &cs);
                let fs = factor(&k, &f).unwrap();
                assert_eq!(fs.expand(&k), f);
                for (g, _) in &fs.factors {
                    assert!(g.is_monic(&k));
                }
            }
        }
    }
}
