//! Factorization over `Q` via integer polynomials: Yun's squarefree
//! decomposition, factorization modulo a prime, Hensel lifting and
//! recombination of modular factors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::factor::{self, Factorization};
use super::poly::{self, Poly};
use super::{integer, Elem, Field};
use crate::error::Result;

/// Integer polynomial, ascending, no trailing zeros.
type ZPoly = Vec<BigInt>;

fn trim(mut v: ZPoly) -> ZPoly {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn zmul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut v = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            v[i + j] += x * y;
        }
    }
    trim(v)
}

fn zsub(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let n = a.len().max(b.len());
    let zero = BigInt::zero();
    trim((0..n)
        .map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero))
        .collect())
}

fn zmod(a: &ZPoly, m: &BigInt) -> ZPoly {
    trim(a.iter().map(|c| c.mod_floor(m)).collect())
}

/// Coefficients reduced into the symmetric range `(-m/2, m/2]`.
fn zmod_sym(a: &ZPoly, m: &BigInt) -> ZPoly {
    let half: BigInt = m / 2;
    trim(a
        .iter()
        .map(|c| {
            let r = c.mod_floor(m);
            if r > half {
                r - m
            } else {
                r
            }
        })
        .collect())
}

/// Remainder of `a` modulo a monic `g`, coefficients mod `m`.
fn zrem_monic(a: &ZPoly, g: &ZPoly, m: &BigInt) -> ZPoly {
    let dg = g.len() - 1;
    let mut r = zmod(a, m);
    while r.len() > dg {
        let c = r.last().unwrap().clone();
        let shift = r.len() - 1 - dg;
        for (j, gj) in g.iter().enumerate() {
            r[shift + j] = (&r[shift + j] - &c * gj).mod_floor(m);
        }
        r = trim(r);
    }
    r
}

fn to_fp(a: &ZPoly, field: &Field) -> Poly {
    Poly::new(a.iter().map(|c| field.from_bigint(c)).collect())
}

fn from_fp(a: &Poly) -> ZPoly {
    a.coeffs()
        .iter()
        .map(|c| match c {
            Elem::Int(v) => BigInt::from(*v),
            _ => unreachable!("prime field coefficient expected"),
        })
        .collect()
}

fn content(a: &ZPoly) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Primitive integer polynomial with positive leading coefficient
/// proportional to the rational polynomial `f`.
fn primitive_from_q(f: &Poly) -> ZPoly {
    let rats: Vec<&BigRational> = f.coeffs().iter().map(|c| c.as_rat().unwrap()).collect();
    let l = rats.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let mut z: ZPoly = rats.iter().map(|r| (*r * &l).to_integer()).collect();
    let c = content(&z);
    for x in z.iter_mut() {
        *x /= &c;
    }
    if z.last().unwrap().is_negative() {
        for x in z.iter_mut() {
            *x = -&*x;
        }
    }
    z
}

fn to_q(a: &ZPoly) -> Poly {
    Poly::new(
        a.iter()
            .map(|c| Elem::Rat(BigRational::from_integer(c.clone())))
            .collect(),
    )
}

/// Yun's squarefree decomposition of a monic rational polynomial.
fn squarefree_q(f: &Poly) -> Vec<(Poly, u32)> {
    let q = Field::Q;
    let one = Poly::one(&q);
    let mut out = Vec::new();
    if f.degree() == Some(0) {
        return out;
    }
    let df = poly::derivative(&q, f);
    let b = poly::gcd(&q, f, &df);
    let mut c = poly::exact_div(&q, f, &b);
    let mut d = poly::sub(&q, &poly::exact_div(&q, &df, &b), &poly::derivative(&q, &c));
    let mut i = 1;
    while c != one {
        let a = poly::gcd(&q, &c, &d);
        c = poly::exact_div(&q, &c, &a);
        d = poly::sub(&q, &poly::exact_div(&q, &d, &a), &poly::derivative(&q, &c));
        if a != one {
            out.push((a, i));
        }
        i += 1;
    }
    out
}

pub(crate) fn factor_q(f: &Poly) -> Result<Factorization> {
    let q = Field::Q;
    let (unit, m) = poly::monic(&q, f)?;
    let mut factors = Vec::new();
    for (g, mult) in squarefree_q(&m) {
        for h in factor_squarefree_primitive(&primitive_from_q(&g))? {
            factors.push((poly::monic(&q, &to_q(&h))?.1, mult));
        }
    }
    factors.sort_by(|a, b| (a.0.degree(), &a.0).cmp(&(b.0.degree(), &b.0)));
    Ok(Factorization { unit, factors })
}

/// Irreducible factors of a squarefree primitive integer polynomial.
fn factor_squarefree_primitive(f: &ZPoly) -> Result<Vec<ZPoly>> {
    let n = f.len() - 1;
    if n <= 1 {
        return Ok(vec![f.clone()]);
    }
    let lc = f.last().unwrap().clone();

    // a prime not dividing lc with f squarefree mod p
    let mut p = 3u64;
    let (field, modular) = loop {
        if integer::is_prime_u64(p) && !(&lc % p).is_zero() {
            let field = Field::Fp(p);
            let fp = to_fp(f, &field);
            let g = poly::gcd(&field, &fp, &poly::derivative(&field, &fp));
            if g.degree() == Some(0) {
                let fs = factor::factor(&field, &fp)?;
                break (field, fs.factors);
            }
        }
        p += 2;
    };
    if modular.len() == 1 {
        return Ok(vec![f.clone()]);
    }

    // Mignotte-style bound on coefficients of lc·(factor)
    let norm = f.iter().map(|c| c.abs()).max().unwrap();
    let bound = BigInt::from(2u32).pow(n as u32) * (norm * BigInt::from(n + 1)) * lc.abs();
    let pb = BigInt::from(p);
    let mut modulus = pb.clone();
    let mut k = 1u32;
    while modulus <= &bound * 2 {
        modulus *= &pb;
        k += 1;
    }

    // monic image of f modulo p^k
    let lc_inv = lc
        .mod_floor(&modulus)
        .modpow(&(&modulus / &pb * (&pb - 1u32) - 1u32), &modulus)
        .mod_floor(&modulus);
    let f_monic = zmod(&f.iter().map(|c| c * &lc_inv).collect(), &modulus);

    let gs: Vec<Poly> = modular.into_iter().map(|(g, _)| g).collect();
    let mut lifted = Vec::with_capacity(gs.len());
    for (i, g) in gs.iter().enumerate() {
        let mut h = Poly::one(&field);
        for (j, other) in gs.iter().enumerate() {
            if j != i {
                h = poly::mul(&field, &h, other);
            }
        }
        lifted.push(hensel_lift(&field, &f_monic, g, &h, &pb, k)?);
    }

    // recombination
    let mut remaining: Vec<usize> = (0..lifted.len()).collect();
    let mut current = f.clone();
    let mut out = Vec::new();
    let mut size = 1;
    while 2 * size <= remaining.len() {
        let mut found = None;
        for subset in subsets(remaining.len(), size) {
            let cur_lc = current.last().unwrap().clone();
            let mut g: ZPoly = vec![cur_lc];
            for &s in &subset {
                g = zmod(&zmul(&g, &lifted[remaining[s]]), &modulus);
            }
            let g = zmod_sym(&g, &modulus);
            let c = content(&g);
            let g: ZPoly = g.iter().map(|x| x / &c).collect();
            if let Some(quot) = exact_divide_z(&current, &g) {
                found = Some((subset, g, quot));
                break;
            }
        }
        match found {
            Some((subset, g, quot)) => {
                out.push(g);
                current = quot;
                let chosen: Vec<usize> = subset.iter().map(|&s| remaining[s]).collect();
                remaining.retain(|r| !chosen.contains(r));
            }
            None => size += 1,
        }
    }
    if current.len() > 1 {
        out.push(current);
    }
    for g in out.iter_mut() {
        if g.last().unwrap().is_negative() {
            for x in g.iter_mut() {
                *x = -&*x;
            }
        }
    }
    Ok(out)
}

/// Exact quotient `a / b` in `Z[x]`, if it exists.
fn exact_divide_z(a: &ZPoly, b: &ZPoly) -> Option<ZPoly> {
    let q = Field::Q;
    let (quot, r) = poly::divrem(&q, &to_q(a), &to_q(b));
    if !r.is_zero() {
        return None;
    }
    let mut out = Vec::new();
    for c in quot.coeffs() {
        let c = c.as_rat().unwrap();
        if !c.is_integer() {
            return None;
        }
        out.push(c.to_integer());
    }
    Some(out)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Lifts the monic factor `g` of `F ≡ g·h (mod p)` to a monic factor of
/// `F` modulo `p^k`, where `F` is monic modulo `p^k`.
fn hensel_lift(field: &Field, big_f: &ZPoly, g: &Poly, h: &Poly, p: &BigInt, k: u32) -> Result<ZPoly> {
    let (_, s, t) = poly::ext_gcd(field, g, h)?;
    let mut gz = from_fp(g);
    let mut hz = from_fp(h);
    let modulus = p.pow(k);
    let mut pj = p.clone();
    for _ in 1..k {
        let diff = zmod(&zsub(big_f, &zmul(&gz, &hz)), &modulus);
        let e: ZPoly = diff.iter().map(|c| (c / &pj).mod_floor(p)).collect();
        let e = to_fp(&trim(e), field);
        let (quo, r) = poly::divrem(field, &poly::mul(field, &e, &t), g);
        let dg = r;
        let dh = poly::add(field, &poly::mul(field, &e, &s), &poly::mul(field, &quo, h));
        let dgz: ZPoly = from_fp(&dg).into_iter().map(|c| c * &pj).collect();
        let dhz: ZPoly = from_fp(&dh).into_iter().map(|c| c * &pj).collect();
        gz = zmod(&zsub(&gz, &dgz.iter().map(|c| -c).collect()), &modulus);
        hz = zmod(&zsub(&hz, &dhz.iter().map(|c| -c).collect()), &modulus);
        pj *= p;
    }
    debug_assert!(zrem_monic(big_f, &gz, &modulus).is_empty());
    Ok(gz)
}

/// Rational roots of a rational polynomial.
pub fn rational_roots(f: &Poly) -> Result<Vec<BigRational>> {
    let fs = factor::factor(&Field::Q, f)?;
    let mut roots: Vec<BigRational> = fs
        .factors
        .iter()
        .filter(|(g, _)| g.degree() == Some(1))
        .map(|(g, _)| -(g.coeffs()[0].as_rat().unwrap().clone()))
        .collect();
    roots.sort();
    Ok(roots)
}

#[allow(dead_code)]
fn as_i64(a: &ZPoly) -> Vec<i64> {
    a.iter().map(|c| c.to_i64().unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qpoly(cs: &[i64]) -> Poly {
        Poly::from_i64s(&Field::Q, cs)
    }

    fn degrees(f: &Poly) -> Vec<(usize, u32)> {
        factor::factor(&Field::Q, f)
            .unwrap()
            .factors
            .iter()
            .map(|(g, m)| (g.degree().unwrap(), *m))
            .collect()
    }

    #[test]
    fn swinnerton_dyer_style_irreducible() {
        // x^4 - 10x^2 + 1 is irreducible over Q but splits mod every prime
        assert_eq!(degrees(&qpoly(&[1, 0, -10, 0, 1])), vec![(4, 1)]);
    }

    #[test]
    fn mixed_factorization() {
        // (2x - 1)^2 (x^2 + 1)(x^3 - 2)
        let a = qpoly(&[-1, 2]);
        let b = qpoly(&[1, 0, 1]);
        let c = qpoly(&[-2, 0, 0, 1]);
        let q = Field::Q;
        let f = poly::mul(&q, &poly::mul(&q, &poly::pow(&q, &a, 2), &b), &c);
        assert_eq!(degrees(&f), vec![(1, 2), (2, 1), (3, 1)]);
        let fs = factor::factor(&q, &f).unwrap();
        assert_eq!(fs.expand(&q), f);
    }

    #[test]
    fn cyclotomic_split() {
        // x^6 - 1 = (x-1)(x+1)(x^2+x+1)(x^2-x+1)
        assert_eq!(
            degrees(&qpoly(&[-1, 0, 0, 0, 0, 0, 1])),
            vec![(1, 1), (1, 1), (2, 1), (2, 1)]
        );
    }

    #[test]
    fn roots_of_a_cubic() {
        let roots = rational_roots(&qpoly(&[-6, 11, -6, 1])).unwrap();
        let ints: Vec<i64> = roots.iter().map(|r| r.to_integer().to_i64().unwrap()).collect();
        assert_eq!(ints, vec![1, 2, 3]);
    }
}
