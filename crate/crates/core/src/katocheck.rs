//! Sampled checks of the residue complex on `P¹` over `F_q` and of the
//! local-global sequence for quaternion algebras over `Q`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{integer, Elem, Field};
use crate::error::{Error, Result};
use crate::milnor::{self, SymbolSum};
use crate::quadform;
use crate::valuation::{self, Place};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// The projective line over `F_q`, `q` odd.
    P1OverFq(u64),
    /// `Spec Z`, with the real place as augmentation.
    SpecZ,
}

impl Scheme {
    pub fn parse(s: &str) -> Result<Scheme> {
        let s = s.trim();
        if s == "Spec_of_Q_integers" {
            return Ok(Scheme::SpecZ);
        }
        let q = s
            .strip_prefix("P1_over_Fq(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::parse(format!("unknown scheme {s:?}")))?;
        let q = q
            .trim()
            .parse()
            .map_err(|_| Error::parse(format!("invalid field size in {s:?}")))?;
        Ok(Scheme::P1OverFq(q))
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::P1OverFq(q) => write!(f, "P1_over_Fq({q})"),
            Scheme::SpecZ => f.write_str("Spec_of_Q_integers"),
        }
    }
}

/// The generic-point field together with the wiring of the residue maps.
#[derive(Clone, Debug)]
pub struct KatoComplexInstance {
    pub scheme: Scheme,
    /// `F_q(t)` or `Q`.
    pub field: Field,
}

pub fn build_kc(scheme: Scheme) -> Result<KatoComplexInstance> {
    let field = match &scheme {
        Scheme::P1OverFq(q) => {
            let fq = Field::finite(*q)?;
            if fq.characteristic() == 2 {
                return Err(Error::unsupported("characteristic 2"));
            }
            Field::rat_func(fq, "t")
        }
        Scheme::SpecZ => Field::Q,
    };
    Ok(KatoComplexInstance { scheme, field })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub place: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleReport {
    pub instance: String,
    pub sample: usize,
    pub symbol: Vec<String>,
    pub trace: Vec<TraceEntry>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub instance: String,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
    pub samples: Vec<SampleReport>,
}

impl Report {
    fn merge(instance: String, mut samples: Vec<SampleReport>) -> Report {
        samples.sort_by_key(|s| s.sample);
        let count = |v: Verdict| samples.iter().filter(|s| s.verdict == v).count();
        Report {
            instance,
            passed: count(Verdict::Pass),
            failed: count(Verdict::Fail),
            inconclusive: count(Verdict::Inconclusive),
            samples,
        }
    }

    pub fn verdict(&self) -> Verdict {
        if self.failed > 0 {
            Verdict::Fail
        } else if self.inconclusive > 0 {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        }
    }
}

/// Runs `check` on every sample, in parallel when enabled.
fn run_samples<T, F>(items: &[T], parallel: bool, check: F) -> Result<Vec<SampleReport>>
where
    T: Sync,
    F: Fn(usize, &T) -> Result<SampleReport> + Sync,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return items.par_iter().enumerate().map(|(i, x)| check(i, x)).collect();
    }
    let _ = parallel;
    items.iter().enumerate().map(|(i, x)| check(i, x)).collect()
}

/// Random 2-fold symbols with nonzero entries: rational functions of
/// degree ≤ 3 over `F_q`, or rationals of height ≤ 50.
pub fn random_symbols(inst: &KatoComplexInstance, n: usize, seed: u64) -> Vec<(Elem, Elem)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = &inst.field;
    (0..n)
        .map(|_| (k.random_nonzero(&mut rng, 50, 3), k.random_nonzero(&mut rng, 50, 3)))
        .collect()
}

fn show_pair(k: &Field, s: &(Elem, Elem)) -> Vec<String> {
    vec![k.show(&s.0), k.show(&s.1)]
}

/// Residues `∂_v{f, g}` at every place where they can be nontrivial, as
/// `(place, residue field, residue)`.
fn residues(k: &Field, f: &Elem, g: &Elem) -> Result<Vec<(Place, Field, Elem)>> {
    quadform::symbol_places(k, &[f.clone(), g.clone()])?
        .into_iter()
        .map(|v| {
            let kappa = valuation::residue_field(k, &v)?;
            let r = valuation::tame_symbol(k, &v, f, g)?;
            Ok((v, kappa, r))
        })
        .collect()
}

fn check_entries(k: &Field, s: &(Elem, Elem)) -> Result<()> {
    k.check(&s.0)?;
    k.check(&s.1)?;
    if s.0.is_zero() || s.1.is_zero() {
        return Err(Error::pre("symbol entries must be nonzero"));
    }
    Ok(())
}

/// Verifies that residues followed by the augmentation vanish for every
/// sample.
pub fn check_complex(inst: &KatoComplexInstance, samples: &[(Elem, Elem)], parallel: bool) -> Result<Report> {
    let k = &inst.field;
    let name = inst.scheme.to_string();
    let reports = run_samples(samples, parallel, |i, s| {
        check_entries(k, s)?;
        let mut trace = Vec::new();
        let ok = match &inst.scheme {
            Scheme::P1OverFq(_) => {
                let base = k.base().expect("rational function field");
                let mut acc = base.one();
                for (v, kappa, r) in residues(k, &s.0, &s.1)? {
                    let n = valuation::residue_norm(&kappa, base, &r)?;
                    trace.push(TraceEntry {
                        place: v.show(k),
                        value: kappa.show(&r),
                    });
                    acc = base.mul(&acc, &n);
                }
                trace.push(TraceEntry {
                    place: "norm".into(),
                    value: base.show(&acc),
                });
                base.is_square(&acc)?
            }
            Scheme::SpecZ => {
                let (a, b) = (rat(&s.0)?, rat(&s.1)?);
                let inv = milnor::hbn_invariants(a, b)?;
                for (v, x) in &inv.invariants {
                    trace.push(TraceEntry {
                        place: v.clone(),
                        value: x.to_string(),
                    });
                }
                inv.total() == 0
            }
        };
        Ok(SampleReport {
            instance: name.clone(),
            sample: i,
            symbol: show_pair(k, s),
            trace,
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            note: None,
        })
    })?;
    Ok(Report::merge(name, reports))
}

fn rat(x: &Elem) -> Result<&BigRational> {
    x.as_rat().ok_or_else(|| Error::Mismatch("expected a rational".into()))
}

/// Checks that a symbol whose local residues (or invariants) all vanish is
/// decided trivial, and that a symbol with a nonvanishing one is not.
pub fn check_exactness(inst: &KatoComplexInstance, samples: &[(Elem, Elem)], parallel: bool) -> Result<Report> {
    let k = &inst.field;
    let name = inst.scheme.to_string();
    let reports = run_samples(samples, parallel, |i, s| {
        check_entries(k, s)?;
        let mut trace = Vec::new();
        let locally_trivial = match &inst.scheme {
            Scheme::P1OverFq(_) => {
                let mut all = true;
                for (v, kappa, r) in residues(k, &s.0, &s.1)? {
                    let sq = kappa.is_square(&r)?;
                    all &= sq;
                    trace.push(TraceEntry {
                        place: v.show(k),
                        value: format!("{}{}", kappa.show(&r), if sq { "" } else { " (nonsquare)" }),
                    });
                }
                all
            }
            Scheme::SpecZ => {
                let inv = milnor::hbn_invariants(rat(&s.0)?, rat(&s.1)?)?;
                for (v, x) in &inv.invariants {
                    trace.push(TraceEntry {
                        place: v.clone(),
                        value: x.to_string(),
                    });
                }
                inv.invariants.is_empty()
            }
        };
        let sym = SymbolSum::single(k.clone(), vec![s.0.clone(), s.1.clone()])?;
        let trivial = milnor::is_trivial(&sym)?;
        Ok(SampleReport {
            instance: name.clone(),
            sample: i,
            symbol: show_pair(k, s),
            trace,
            verdict: if trivial == locally_trivial { Verdict::Pass } else { Verdict::Fail },
            note: Some(if trivial { "trivial" } else { "nontrivial" }.into()),
        })
    })?;
    Ok(Report::merge(name, reports))
}

/// Searches `(a, b)` with `|a|, |b| ≤ budget` whose quaternion algebra has
/// exactly the given ramification set. Odd sets are unrealizable.
pub fn realize_pattern(pattern: &BTreeSet<Place>, budget: i64) -> Result<(Verdict, Option<(BigInt, BigInt)>)> {
    for v in pattern {
        v.check(&Field::Q)?;
    }
    if pattern.len() % 2 == 1 {
        return Ok((Verdict::Pass, None));
    }
    let want: BTreeSet<String> = pattern.iter().map(|v| v.show(&Field::Q)).collect();
    let candidates: Vec<i64> = (1..=budget)
        .filter(|n| integer::squarefree_part(&BigInt::from(*n)) == BigInt::from(*n))
        .flat_map(|n| [n, -n])
        .collect();
    for &a in &candidates {
        for &b in &candidates {
            let (ra, rb) = (BigRational::from_integer(a.into()), BigRational::from_integer(b.into()));
            let inv = milnor::hbn_invariants(&ra, &rb)?;
            if inv.invariants.keys().cloned().collect::<BTreeSet<_>>() == want {
                return Ok((Verdict::Pass, Some((a.into(), b.into()))));
            }
        }
    }
    Ok((Verdict::Inconclusive, None))
}

/// Random ramification patterns supported on `∞, 2, 3, 5, 7`.
pub fn random_patterns(n: usize, seed: u64) -> Vec<BTreeSet<Place>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let places: Vec<Place> = std::iter::once(Place::QInfty)
        .chain([2, 3, 5, 7].map(|p| Place::QPrime(p.into())))
        .collect();
    (0..n)
        .map(|_| places.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect())
        .collect()
}

/// Realization reports for ramification patterns over `Q`.
pub fn check_realization(patterns: &[BTreeSet<Place>], budget: i64, parallel: bool) -> Result<Report> {
    let name = Scheme::SpecZ.to_string();
    let reports = run_samples(patterns, parallel, |i, pat| {
        let (verdict, witness) = realize_pattern(pat, budget)?;
        let note = if pat.len() % 2 == 1 {
            "odd weight: unrealizable".to_string()
        } else {
            match &witness {
                Some((a, b)) => format!("realized by ({a}, {b})"),
                None => "search budget exhausted".into(),
            }
        };
        Ok(SampleReport {
            instance: name.clone(),
            sample: i,
            symbol: pat.iter().map(|v| v.show(&Field::Q)).collect(),
            trace: Vec::new(),
            verdict,
            note: Some(note),
        })
    })?;
    Ok(Report::merge(name, reports))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction() {
        let inst = build_kc(Scheme::P1OverFq(3)).unwrap();
        assert_eq!(inst.field.to_string(), "RatFunc(Fp:3,t)");
        assert!(build_kc(Scheme::P1OverFq(4)).is_err());
        assert_eq!(build_kc(Scheme::SpecZ).unwrap().field, Field::Q);
        assert_eq!(Scheme::parse("P1_over_Fq(9)").unwrap(), Scheme::P1OverFq(9));
    }

    #[test]
    fn steinberg_sample() {
        let inst = build_kc(Scheme::P1OverFq(5)).unwrap();
        let k = &inst.field;
        let s = (k.parse_elem("t").unwrap(), k.parse_elem("1-t").unwrap());
        let r = check_complex(&inst, &[s], false).unwrap();
        assert_eq!(r.verdict(), Verdict::Pass);
    }

    #[test]
    fn random_samples_pass_both_ways() {
        for q in [3, 9] {
            let inst = build_kc(Scheme::P1OverFq(q)).unwrap();
            let samples = random_symbols(&inst, 20, 7);
            let seq = check_complex(&inst, &samples, false).unwrap();
            let par = check_complex(&inst, &samples, true).unwrap();
            assert_eq!(seq, par);
            assert_eq!(seq.failed, 0);
            assert_eq!(check_exactness(&inst, &samples, true).unwrap().failed, 0);
        }
        let q = build_kc(Scheme::SpecZ).unwrap();
        let m1 = Elem::rat(-1, 1);
        assert_eq!(check_complex(&q, &[(m1.clone(), m1)], false).unwrap().failed, 0);
    }

    #[test]
    fn realization() {
        let pat: BTreeSet<Place> = [Place::QPrime(2.into()), Place::QInfty].into_iter().collect();
        let (v, w) = realize_pattern(&pat, 5).unwrap();
        assert_eq!(v, Verdict::Pass);
        assert!(w.is_some());
        let odd: BTreeSet<Place> = [Place::QPrime(2.into())].into_iter().collect();
        assert_eq!(realize_pattern(&odd, 5).unwrap(), (Verdict::Pass, None));
    }
}
