//! Valuation-theoretic oracles over `K = k(t)` for the divisor set `D_f`,
//! the sets Θ, Θ̄, the ideal 𝔞, the rings `R` and `R⁰`, parameter sets and
//! degree conditions.

use serde::Serialize;

use crate::algebra::{Elem, Field};
use crate::error::{Error, Result};
use crate::valuation::{self, Place};

/// Places where `f` has odd order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorSet {
    pub field: Field,
    pub f: Elem,
    pub places: Vec<Place>,
}

impl DivisorSet {
    pub fn is_empty(&self) -> bool {
        self.places.is_empty()
    }

    pub fn show(&self) -> Vec<String> {
        self.places.iter().map(|v| v.show(&self.field)).collect()
    }

    fn require_nonempty(&self) -> Result<()> {
        if self.places.is_empty() {
            return Err(Error::pre(format!(
                "D_f is empty for f = {}",
                self.field.show(&self.f)
            )));
        }
        Ok(())
    }
}

fn check_field(k: &Field) -> Result<()> {
    match k {
        Field::RatFunc { base, .. } if (base.is_finite() || **base == Field::Q) && base.characteristic() != 2 => Ok(()),
        _ => Err(Error::pre(format!("{k} is not k(t) with k = Q or F_q, q odd"))),
    }
}

fn is_constant(x: &Elem) -> bool {
    match x.as_frac() {
        Some((n, d)) => n.degree().unwrap_or(0) == 0 && d.degree().unwrap_or(0) == 0,
        None => true,
    }
}

pub fn d_f(k: &Field, f: &Elem) -> Result<DivisorSet> {
    check_field(k)?;
    k.check(f)?;
    if is_constant(f) {
        return Err(Error::pre("f must be non-constant"));
    }
    let places = valuation::support(k, f)?
        .into_iter()
        .filter(|(_, m)| m % 2 != 0)
        .map(|(v, _)| v)
        .collect();
    Ok(DivisorSet {
        field: k.clone(),
        f: f.clone(),
        places,
    })
}

/// `D_f⁰`: the places of `D_f` where `f` has positive order.
pub fn d_f0(k: &Field, f: &Elem) -> Result<DivisorSet> {
    let mut d = d_f(k, f)?;
    let mut keep = Vec::new();
    for v in d.places {
        if valuation::order(k, &v, f)? > 0 {
            keep.push(v);
        }
    }
    d.places = keep;
    Ok(d)
}

fn orders(k: &Field, places: &[Place], x: &Elem) -> Result<Vec<i64>> {
    places.iter().map(|v| valuation::order(k, v, x)).collect()
}

/// Θ: some place of `D_f` where `ε` has even order.
pub fn theta_member(k: &Field, eps: &Elem, f: &Elem) -> Result<bool> {
    let d = d_f(k, f)?;
    if eps.is_zero() {
        return Ok(false);
    }
    Ok(orders(k, &d.places, eps)?.iter().any(|m| m % 2 == 0))
}

/// Θ̄: positive odd order at every place of `D_f`.
pub fn theta_bar_member(k: &Field, xi: &Elem, f: &Elem) -> Result<bool> {
    let d = d_f(k, f)?;
    d.require_nonempty()?;
    if xi.is_zero() {
        return Ok(false);
    }
    Ok(orders(k, &d.places, xi)?.iter().all(|m| *m > 0 && m % 2 != 0))
}

/// 𝔞: positive order at every place of `D_f`.
pub fn ideal_a_member(k: &Field, xi: &Elem, f: &Elem) -> Result<bool> {
    let d = d_f(k, f)?;
    d.require_nonempty()?;
    if xi.is_zero() {
        return Ok(true);
    }
    Ok(orders(k, &d.places, xi)?.iter().all(|m| *m > 0))
}

/// Writes `ξ ∈ 𝔞` as `ξ′ − ξ″` with both terms in Θ̄.
///
/// With `η` of order 2 where `ξ` has order 1 and order 1 elsewhere on
/// `D_f`, the choice `ξ′ = 2ξ + η`, `ξ″ = ξ + η` has order exactly 1 on
/// `D_f`.
pub fn decompose_theta_bar(k: &Field, xi: &Elem, f: &Elem) -> Result<(Elem, Elem)> {
    let d = d_f(k, f)?;
    d.require_nonempty()?;
    if !ideal_a_member(k, xi, f)? {
        return Err(Error::pre(format!("{} is not in the ideal 𝔞", k.show(xi))));
    }
    let targets: Vec<(Place, i64)> = if xi.is_zero() {
        d.places.iter().map(|v| (v.clone(), 1)).collect()
    } else {
        d.places
            .iter()
            .map(|v| Ok((v.clone(), if valuation::order(k, v, xi)? == 1 { 2 } else { 1 })))
            .collect::<Result<_>>()?
    };
    let eta = valuation::weak_approx(k, &targets)?;
    let (x1, x2) = if xi.is_zero() {
        (eta.clone(), eta)
    } else {
        let two = k.from_i64(2);
        (k.add(&k.mul(&two, xi), &eta), k.add(xi, &eta))
    };
    debug_assert_eq!(k.sub(&x1, &x2), *xi);
    if !theta_bar_member(k, &x1, f)? || !theta_bar_member(k, &x2, f)? {
        return Err(Error::pre("decomposition left Θ̄"));
    }
    Ok((x1, x2))
}

/// `R_{f,t}`: nonnegative order at every place of `D_f`.
pub fn ring_r_member(k: &Field, r: &Elem, f: &Elem) -> Result<bool> {
    let d = d_f(k, f)?;
    d.require_nonempty()?;
    if r.is_zero() {
        return Ok(true);
    }
    Ok(orders(k, &d.places, r)?.iter().all(|m| *m >= 0))
}

/// `R⁰_{f,t}`: nonnegative order at every place of `D_f⁰`.
pub fn ring_r0_member(k: &Field, r: &Elem, f: &Elem) -> Result<bool> {
    let d = d_f0(k, f)?;
    d.require_nonempty()?;
    if r.is_zero() {
        return Ok(true);
    }
    Ok(orders(k, &d.places, r)?.iter().all(|m| *m >= 0))
}

/// `f/(f+1)`.
pub fn f_prime(k: &Field, f: &Elem) -> Result<Elem> {
    k.div(f, &k.add(f, &k.one()))
}

/// Writes `r ∈ R⁰` as `r₁·r₂` with `r₁ ∈ R_{f,t}` and `r₂ ∈ R_{f′,t}`.
pub fn factor_r0(k: &Field, r: &Elem, f: &Elem) -> Result<(Elem, Elem)> {
    if !ring_r0_member(k, r, f)? {
        return Err(Error::pre(format!("{} is not in R⁰", k.show(r))));
    }
    if r.is_zero() {
        return Ok((k.zero(), k.one()));
    }
    let fp = f_prime(k, f)?;
    let df = d_f(k, f)?;
    let dfp = d_f(k, &fp)?;
    let mut targets = Vec::new();
    for v in &df.places {
        targets.push((v.clone(), 0));
    }
    for v in &dfp.places {
        if !df.places.contains(v) {
            targets.push((v.clone(), valuation::order(k, v, r)?));
        }
    }
    let r1 = valuation::weak_approx(k, &targets)?;
    let r2 = k.div(r, &r1)?;
    if !ring_r_member(k, &r1, f)? || (!dfp.is_empty() && !ring_r_member(k, &r2, &fp)?) {
        return Err(Error::pre("factorization left the rings"));
    }
    Ok((r1, r2))
}

/// Whether `R⁰` is a proper valuation ring, with a witness `y` such that
/// neither `y` nor `1/y` lies in `R⁰` when it is not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuationRingTest {
    pub is_valuation_ring: bool,
    pub witness: Option<Elem>,
}

pub fn r0_valuation_ring(k: &Field, f: &Elem) -> Result<ValuationRingTest> {
    let d = d_f0(k, f)?;
    match d.places.len() {
        0 => Ok(ValuationRingTest {
            is_valuation_ring: false,
            witness: None,
        }),
        1 => Ok(ValuationRingTest {
            is_valuation_ring: true,
            witness: None,
        }),
        _ => {
            let y = valuation::weak_approx(k, &[(d.places[0].clone(), 1), (d.places[1].clone(), -1)])?;
            debug_assert!(!ring_r0_member(k, &y, f)? && !ring_r0_member(k, &k.inv(&y)?, f)?);
            Ok(ValuationRingTest {
                is_valuation_ring: false,
                witness: Some(y),
            })
        }
    }
}

/// Parameter sets over `k₀ = Q` or `F_q(u)`, for exponent 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamSet {
    /// `a ≡ 1` to high order at 2 and at the places dividing `δ`.
    Udelta(Elem),
    /// `a` is a non-unit wherever `δ` is.
    Sigma(Elem),
    /// Pairs `(u′, u) ∈ U_δ × k₀^×`.
    Ubullet(Elem),
    /// `a ≡ 1` to high order at the listed places.
    DeltaU0(Vec<Place>),
}

impl ParamSet {
    pub fn arity(&self) -> usize {
        match self {
            ParamSet::Ubullet(_) => 2,
            _ => 1,
        }
    }
}

/// `2·v(2)`: 2 at the 2-adic place of `Q`, 0 elsewhere.
fn two_v2(v: &Place) -> i64 {
    match v {
        Place::QPrime(p) if *p == 2.into() => 2,
        _ => 0,
    }
}

fn close_to_one(k: &Field, a: &Elem, places: &[Place]) -> Result<bool> {
    let am1 = k.sub(a, &k.one());
    if am1.is_zero() {
        return Ok(true);
    }
    for v in places {
        if valuation::order(k, v, &am1)? <= two_v2(v) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn delta_places(k: &Field, delta: &Elem) -> Result<Vec<Place>> {
    if delta.is_zero() {
        return Err(Error::pre("δ must be nonzero"));
    }
    let mut ps: Vec<Place> = valuation::support(k, delta)?.into_iter().map(|(v, _)| v).collect();
    if *k == Field::Q {
        let two = Place::QPrime(2.into());
        if !ps.contains(&two) {
            ps.insert(0, two);
        }
    }
    Ok(ps)
}

pub fn param_member(k: &Field, set: &ParamSet, xs: &[Elem]) -> Result<bool> {
    match k {
        Field::Q => {}
        Field::RatFunc { base, .. } if base.is_finite() && base.characteristic() != 2 => {}
        _ => return Err(Error::pre(format!("{k} is neither Q nor F_q(u) with q odd"))),
    }
    if xs.len() != set.arity() {
        return Err(Error::pre(format!("expected {} element(s)", set.arity())));
    }
    for x in xs {
        k.check(x)?;
        if x.is_zero() {
            return Err(Error::pre("parameter set members must be nonzero"));
        }
    }
    let a = &xs[0];
    match set {
        ParamSet::Udelta(delta) => close_to_one(k, a, &delta_places(k, delta)?),
        ParamSet::Ubullet(delta) => close_to_one(k, a, &delta_places(k, delta)?),
        ParamSet::Sigma(delta) => {
            if delta.is_zero() {
                return Err(Error::pre("δ must be nonzero"));
            }
            for (v, _) in valuation::support(k, delta)? {
                if valuation::order(k, &v, a)? == 0 {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        ParamSet::DeltaU0(places) => {
            for v in places {
                v.check(k)?;
            }
            close_to_one(k, a, places)
        }
    }
}

/// `Σ_{t,e}`: places where `t` has order exactly `e > 0`.
pub fn sigma_te(k: &Field, t: &Elem, e: u32) -> Result<Vec<Place>> {
    check_field(k)?;
    if is_constant(t) {
        return Err(Error::pre("t must be non-constant"));
    }
    if e == 0 {
        return Err(Error::pre("e must be positive"));
    }
    Ok(valuation::support(k, t)?
        .into_iter()
        .filter(|(_, m)| *m == e as i64)
        .map(|(v, _)| v)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeCheck {
    /// No zero of `t` has order above `N`.
    pub orders_bounded: bool,
    /// `|Σ_{t,e}| ≤ N` for `0 < e ≤ N`.
    pub counts_bounded: bool,
    /// `Σ_e Σ_{P ∈ Σ_{t,e}} e·deg P`.
    pub weighted_degree: u64,
    pub holds: bool,
}

/// Whether `t` has degree `N`, i.e. `[k(u):k(t)] = N`, tested through the
/// zeros of `t`.
pub fn degree_check(k: &Field, t: &Elem, n: u64) -> Result<DegreeCheck> {
    check_field(k)?;
    if is_constant(t) {
        return Err(Error::pre("t must be non-constant"));
    }
    let zeros: Vec<(Place, i64)> = valuation::support(k, t)?
        .into_iter()
        .filter(|(_, m)| *m > 0)
        .collect();
    let orders_bounded = zeros.iter().all(|(_, m)| *m as u64 <= n);
    let counts_bounded = (1..=n).all(|e| zeros.iter().filter(|(_, m)| *m as u64 == e).count() as u64 <= n);
    let weighted_degree = zeros
        .iter()
        .filter(|(_, m)| *m as u64 <= n)
        .map(|(v, m)| *m as u64 * v.residue_degree() as u64)
        .sum();
    Ok(DegreeCheck {
        orders_bounded,
        counts_bounded,
        weighted_degree,
        holds: orders_bounded && counts_bounded && weighted_degree == n,
    })
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
    fn divisor_sets() {
        let k = f3t();
        assert_eq!(d_f(&k, &el(&k, "t")).unwrap().show(), vec!["irr:[0,1]", "finf"]);
        assert_eq!(d_f(&k, &el(&k, "t/(t+1)^2")).unwrap().show(), vec!["irr:[0,1]", "finf"]);
        assert!(d_f(&k, &el(&k, "t^2")).unwrap().is_empty());
        assert!(d_f(&k, &el(&k, "2")).is_err());
    }

    #[test]
    fn theta_sets() {
        let k = f3t();
        let t = el(&k, "t");
        assert!(theta_member(&k, &el(&k, "t^2"), &t).unwrap());
        assert!(!theta_member(&k, &t, &t).unwrap());
        assert!(!theta_member(&k, &k.zero(), &t).unwrap());
        assert!(!theta_bar_member(&k, &el(&k, "t/(t+1)"), &t).unwrap());
        let f = el(&k, "t*(t+1)");
        assert!(theta_bar_member(&k, &f, &f).unwrap());
        assert!(!theta_bar_member(&k, &t, &f).unwrap());
        assert!(!theta_bar_member(&k, &k.one(), &f).unwrap());
    }

    #[test]
    fn ideal_and_decomposition() {
        let k = f3t();
        let t = el(&k, "t");
        let xi = el(&k, "t/(t^2+1)");
        assert!(ideal_a_member(&k, &xi, &t).unwrap());
        let (a, b) = decompose_theta_bar(&k, &xi, &t).unwrap();
        assert_eq!(k.sub(&a, &b), xi);
        assert!(!ideal_a_member(&k, &k.one(), &t).unwrap());
        assert!(decompose_theta_bar(&k, &k.one(), &t).is_err());
        let (a, b) = decompose_theta_bar(&k, &k.zero(), &t).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rings() {
        let k = f3t();
        let t = el(&k, "t");
        assert!(ring_r_member(&k, &el(&k, "1/(t+1)"), &t).unwrap());
        assert!(!ring_r0_member(&k, &el(&k, "1/t"), &t).unwrap());
        assert!(ring_r0_member(&k, &el(&k, "t+1"), &t).unwrap());
        let r = el(&k, "(t+1)/(t+2)");
        let (r1, r2) = factor_r0(&k, &r, &t).unwrap();
        assert_eq!(k.mul(&r1, &r2), r);
        assert!(factor_r0(&k, &el(&k, "1/t"), &t).is_err());
        assert!(r0_valuation_ring(&k, &t).unwrap().is_valuation_ring);
        let two = r0_valuation_ring(&k, &el(&k, "t*(t+1)")).unwrap();
        assert!(!two.is_valuation_ring && two.witness.is_some());
    }

    #[test]
    fn parameter_sets() {
        let q = Field::Q;
        let three = Elem::rat(3, 1);
        assert!(param_member(&q, &ParamSet::Udelta(three.clone()), &[Elem::rat(25, 1)]).unwrap());
        assert!(!param_member(&q, &ParamSet::Udelta(three.clone()), &[Elem::rat(9, 1)]).unwrap());
        assert!(!param_member(&q, &ParamSet::Sigma(three.clone()), &[Elem::rat(5, 1)]).unwrap());
        assert!(param_member(&q, &ParamSet::Sigma(three.clone()), &[Elem::rat(6, 1)]).unwrap());
        assert!(param_member(&q, &ParamSet::Sigma(three), &[q.zero()]).is_err());
        let at2 = ParamSet::DeltaU0(vec![Place::QPrime(2.into())]);
        assert!(param_member(&q, &at2, &[Elem::rat(9, 1)]).unwrap());
        assert!(!param_member(&q, &at2, &[Elem::rat(5, 1)]).unwrap());
    }

    #[test]
    fn degrees() {
        let k = Field::rat_func(Field::fp(5).unwrap(), "u");
        let t = el(&k, "u^3");
        assert_eq!(sigma_te(&k, &t, 3).unwrap(), vec![Place::parse(&k, "irr:[0,1]").unwrap()]);
        assert!(degree_check(&k, &t, 3).unwrap().holds);
        assert!(!degree_check(&k, &t, 2).unwrap().holds);
        let s = el(&k, "u^3+u");
        assert_eq!(sigma_te(&k, &s, 1).unwrap().len(), 3);
        assert!(degree_check(&k, &s, 3).unwrap().holds);
        // a zero of order above N must not be ignored
        assert!(!degree_check(&k, &el(&k, "u^3*(u+1)"), 1).unwrap().holds);
    }
}
