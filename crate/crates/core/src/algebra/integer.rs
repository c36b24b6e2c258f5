//! Integer arithmetic helpers: primality, factorization, valuations,
//! residue symbols.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `(p, k)` with `q = p^k`, if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, usize)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            break;
        }
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let (mut r, mut k) = (q, 0);
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1 && is_prime_u64(p)).then_some((p, k))
}

pub fn mod_u64(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

pub fn inv_mod_u64(x: u64, p: u64) -> u64 {
    let (mut a, mut b) = (x as i128, p as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while b != 0 {
        let q = a / b;
        (a, b) = (b, a - q * b);
        (s0, s1) = (s1, s0 - q * s1);
    }
    assert_eq!(a, 1, "{x} is not invertible mod {p}");
    s0.rem_euclid(p as i128) as u64
}

pub fn sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    sqrt_exact(n).is_some()
}

/// `v_p(n)` and the cofactor, for `n ≠ 0`.
pub fn split_valuation(n: &BigInt, p: &BigInt) -> (i64, BigInt) {
    assert!(!n.is_zero());
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            break;
        }
        m = q;
        v += 1;
    }
    (v, m)
}

pub fn val_int(n: &BigInt, p: u64) -> i64 {
    split_valuation(n, &BigInt::from(p)).0
}

/// `v_p` of a nonzero rational.
pub fn val_rat(r: &BigRational, p: u64) -> i64 {
    let p = BigInt::from(p);
    split_valuation(r.numer(), &p).0 - split_valuation(r.denom(), &p).0
}

pub fn is_probable_prime(n: &BigInt) -> bool {
    if n.sign() != Sign::Plus {
        return false;
    }
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    let n_u = n.magnitude();
    let one = BigUint::one();
    let nm1 = n_u - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, n_u);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigUint::from(2u32), n_u);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &BigInt) -> BigInt {
    let n_u = n.magnitude().clone();
    for c in 1u32.. {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % &n_u;
        let (mut x, mut y) = (BigUint::from(2u32), BigUint::from(2u32));
        loop {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            let g = diff.gcd(&n_u);
            if g == n_u {
                break;
            }
            if !g.is_one() {
                return BigInt::from(g);
            }
        }
    }
    unreachable!()
}

/// Prime factorization of `|n|`, primes ascending, for `n ≠ 0`.
pub fn factor(n: &BigInt) -> Vec<(BigInt, u32)> {
    assert!(!n.is_zero(), "factor of zero");
    let mut m = n.abs();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    let mut p = 2u64;
    while p < 1000 {
        let bp = BigInt::from(p);
        if &bp * &bp > m {
            break;
        }
        let mut k = 0;
        while (&m % &bp).is_zero() {
            m /= &bp;
            k += 1;
        }
        if k > 0 {
            out.push((bp, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut stack = vec![m];
    let mut big = Vec::new();
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            big.push(m);
            continue;
        }
        if let Some(r) = sqrt_exact(&m) {
            stack.push(r.clone());
            stack.push(r);
            continue;
        }
        let d = pollard_rho(&m);
        stack.push(&m / &d);
        stack.push(d);
    }
    big.sort();
    for q in big {
        match out.last_mut() {
            Some((last, k)) if *last == q => *k += 1,
            _ => out.push((q, 1)),
        }
    }
    out.sort();
    out
}

/// Distinct primes dividing the numerator or denominator of `r ≠ 0`.
pub fn rat_primes(r: &BigRational) -> Vec<BigInt> {
    let mut ps: Vec<BigInt> = factor(r.numer())
        .into_iter()
        .chain(factor(r.denom()))
        .map(|(p, _)| p)
        .collect();
    ps.sort();
    ps.dedup();
    ps
}

/// Legendre symbol `(a/p)` for odd prime `p`; 0 when `p | a`.
pub fn legendre(a: &BigInt, p: u64) -> i32 {
    let r = mod_u64(a, p);
    if r == 0 {
        return 0;
    }
    if pow_mod_u64(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Legendre symbol for a big odd prime.
pub fn legendre_big(a: &BigInt, p: &BigInt) -> i32 {
    if let Some(ps) = p.to_u64() {
        return legendre(a, ps);
    }
    let r = a.mod_floor(p);
    if r.is_zero() {
        return 0;
    }
    let e = (p - 1u32) / 2u32;
    if r.modpow(&e, p).is_one() {
        1
    } else {
        -1
    }
}

/// Square root of `a` modulo an odd prime `p` (Tonelli–Shanks), if any.
pub fn sqrt_mod_prime(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Some(BigInt::zero());
    }
    if legendre_big(&a, p) != 1 {
        return None;
    }
    let one = BigInt::one();
    let pm1: BigInt = p - &one;
    let mut s = 0u32;
    let mut q = pm1.clone();
    while q.is_even() {
        q >>= 1;
        s += 1;
    }
    let mut z = BigInt::from(2);
    while legendre_big(&z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + 1u32) / 2u32), p);
    while !t.is_one() {
        let mut i = 0;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = (&t2 * &t2).mod_floor(p);
            i += 1;
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = (&b * &b).mod_floor(p);
        }
        m = i;
        c = (&b * &b).mod_floor(p);
        t = (&t * &c).mod_floor(p);
        r = (&r * &b).mod_floor(p);
    }
    Some(r)
}

/// Squarefree integer `d` with `n = d·s²` for some rational `s`, `n ≠ 0`.
pub fn squarefree_part(n: &BigInt) -> BigInt {
    let mut d = if n.is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    for (p, k) in factor(n) {
        if k % 2 == 1 {
            d *= p;
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_round_trip() {
        for n in [1i64, 2, 12, 97, 360, -1001, 600851475143, 2147483647 * 3] {
            let n = BigInt::from(n);
            let f = factor(&n);
            let prod: BigInt = f.iter().map(|(p, k)| p.pow(*k)).product();
            assert_eq!(prod, n.abs());
            assert!(f.iter().all(|(p, _)| is_probable_prime(p)));
        }
    }

    #[test]
    fn modular_square_roots() {
        for p in [3i64, 5, 13, 17, 41, 97] {
            let p = BigInt::from(p);
            for a in 0..30 {
                let a = BigInt::from(a);
                if let Some(r) = sqrt_mod_prime(&a, &p) {
                    assert_eq!((&r * &r).mod_floor(&p), a.mod_floor(&p));
                } else {
                    assert_eq!(legendre_big(&a, &p), -1);
                }
            }
        }
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}
