//! Balanced sequences as colourings of Sturmian sequences, their exact
//! asymptotic critical exponent, and a brute-force runs oracle.
//!
//! For a colouring with periods `(P, P')` and slope `theta` the exponent is
//! `E* = 1 + limsup Phi_N`, where `Phi_N` maximises
//! `f(x_N) = (1 + m + x_N) / (k + l m + l x_N)` over `0 <= m < a_{N+1}` and
//! `(l, k)` solving the modular condition (S1) and the Parikh condition
//! (S2). For eventually periodic `theta` the pair (class of `A_N`, position
//! in the period) is eventually periodic too, and along each residue
//! `x_N` converges to a reversed periodic continued fraction, so the
//! limsup is a finite maximum of exact quadratic numbers.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cfrac::ContinuedFraction;
use crate::cgap::ConstantGapSequence;
use crate::matcls::{ClassContext, MatrixClass, PeriodPair};
use crate::numeric::{rat_int, QuadraticNumber, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BalancedError {
    #[error("no (l, k) satisfies S1 and S2 at N = {n}, m = {m} within the search bound")]
    EmptySolutionSet { n: usize, m: u64 },
    #[error("runs window [{0}, {1}] is empty or exceeds the prefix")]
    BadWindow(usize, usize),
}

/// Replace the `a`s of `u` by successive letters of `y^omega` and the `b`s by
/// successive letters of `y'^omega`, shifted past the alphabet of `y`.
pub fn colour(u: &[u8], y: &ConstantGapSequence, y2: &ConstantGapSequence) -> Vec<u32> {
    let shift = y.word().iter().max().map_or(0, |m| m + 1);
    let y2: Vec<u32> = y2.word().iter().map(|x| x + shift).collect();
    colour_literal(u, y.word(), &y2)
}

/// As [`colour`] with the letters of both periods taken as given.
pub fn colour_literal(u: &[u8], y: &[u32], y2: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0usize, 0usize);
    u.iter()
        .map(|&c| {
            if c == b'a' {
                i += 1;
                y[(i - 1) % y.len()]
            } else {
                j += 1;
                y2[(j - 1) % y2.len()]
            }
        })
        .collect()
}

/// Condition S2: `|l (delta - m) - k| < delta - m + 1` and `k + l > 0`.
pub fn s2_member(m: u64, k: u64, l: u64, delta: &QuadraticNumber) -> bool {
    if k + l == 0 {
        return false;
    }
    let e = delta.add_rational(&-rat_int(m as i64));
    let lhs = e.mul_rational(&rat_int(l as i64)).add_rational(&-rat_int(k as i64));
    let bound = e.add_rational(&rat_int(1));
    let abs = if lhs.signum().is_lt() { -lhs } else { lhs };
    abs < bound
}

/// The maximiser of `f` at one index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhiWitness {
    pub n: usize,
    pub m: u64,
    pub k: u64,
    pub l: u64,
}

#[derive(Clone, Debug)]
pub struct EstarReport {
    /// `E* = 1 + max Phi` over the eventual cycle.
    pub value: QuadraticNumber,
    pub phi: QuadraticNumber,
    pub witness: PhiWitness,
    /// First index of the eventual cycle of (class, period position).
    pub cycle_start: usize,
    pub cycle_len: usize,
    /// Classes `[A_N]` along the cycle.
    pub classes: Vec<MatrixClass>,
}

/// Search bound on `l`, as a multiple of the lattice step, before an empty
/// solution set is reported.
const L_SEARCH_CAP: u64 = 1 << 20;

/// `max f(x)` at one index with class `c`, tail `delta = delta_N`,
/// `x = x_N` and `a_next = a_{N+1}`. Returns `(Phi, m, k, l)`.
pub fn phi_at(
    ctx: &ClassContext,
    c: &MatrixClass,
    delta: &QuadraticNumber,
    x: &QuadraticNumber,
    a_next: u64,
    n: usize,
) -> Result<(QuadraticNumber, u64, u64, u64), BalancedError> {
    let mut best: Option<(QuadraticNumber, u64, u64, u64)> = None;
    for m in 0..a_next {
        let lat = ctx.solution_lattice(c, m);
        let mr = rat_int(m as i64);
        let e = delta.add_rational(&-mr.clone());
        let mx = x.add_rational(&mr);
        let num = mx.add_rational(&rat_int(1));
        let mut best_den: Option<(QuadraticNumber, u64, u64)> = None;
        let mut ell = 0u64;
        loop {
            let ell_q = rat_int(ell as i64);
            let ell_part = mx.mul_rational(&ell_q);
            if let Some((bd, _, _)) = &best_den {
                if ell > 0 && &ell_part >= bd {
                    break;
                }
            }
            // Largest useful denominator is also bounded by the global best f.
            if let Some((bf, _, _, _)) = &best {
                if ell > 0 && num.try_div(&ell_part).expect("same field") <= *bf {
                    break;
                }
            }
            if ell / lat.ell_step > L_SEARCH_CAP {
                return Err(BalancedError::EmptySolutionSet { n, m });
            }
            // (l - 1) e - 1 < k < (l + 1) e + 1
            let lo = e.mul_rational(&rat_int(ell as i64 - 1)).add_rational(&rat_int(-1));
            let hi = e.mul_rational(&rat_int(ell as i64 + 1)).add_rational(&rat_int(1));
            let mut k_min = lo.floor() + 1;
            if k_min < BigInt::zero() {
                k_min = BigInt::zero();
            }
            let mut k_min = k_min.to_u64().expect("k fits in u64");
            if ell == 0 {
                k_min = k_min.max(1);
            }
            if let Some(k) = lat.first_k_at_least(ell, k_min) {
                if QuadraticNumber::from_int(k as i64) < hi {
                    let den = ell_part.add_rational(&rat_int(k as i64));
                    if best_den.as_ref().is_none_or(|(bd, _, _)| &den < bd) {
                        best_den = Some((den, k, ell));
                    }
                }
            }
            ell += lat.ell_step;
        }
        if let Some((den, k, l)) = best_den {
            let f = num.try_div(&den).expect("same field");
            if best.as_ref().is_none_or(|(bf, _, _, _)| &f > bf) {
                best = Some((f, m, k, l));
            }
        }
    }
    best.ok_or(BalancedError::EmptySolutionSet { n, m: 0 })
}

/// Exact `E*` of the colouring of the Sturmian sequence with slope `cf` by
/// any constant gap sequences with periods `pair`.
pub fn estar_exact(cf: &ContinuedFraction, pair: PeriodPair) -> Result<EstarReport, BalancedError> {
    Ok(estar_bounded(cf, pair, None)?.expect("no bound given"))
}

/// As [`estar_exact`], giving up with `None` once some index shows
/// `E* > limit`.
pub fn estar_bounded(
    cf: &ContinuedFraction,
    pair: PeriodPair,
    limit: Option<&QuadraticNumber>,
) -> Result<Option<EstarReport>, BalancedError> {
    let phi_limit = limit.map(|l| l.add_rational(&rat_int(-1)));
    let ctx = ClassContext::new(pair);
    let s = cf.preperiod().len();
    let p = cf.period().len();
    let mut cls = ctx.identity();
    for n in 0..s {
        cls = ctx.step(&cls, cf.quotient(n + 1));
    }
    let mut seen: HashMap<(MatrixClass, usize), usize> = HashMap::new();
    let mut path = Vec::new();
    let mut n = s;
    let (start, len) = loop {
        let key = (cls, (n - s) % p);
        if let Some(&n1) = seen.get(&key) {
            break (n1, n - n1);
        }
        seen.insert(key, n);
        path.push(cls);
        cls = ctx.step(&cls, cf.quotient(n + 1));
        n += 1;
    };
    let classes: Vec<MatrixClass> = path[start - s..].to_vec();
    let mut best: Option<(QuadraticNumber, PhiWitness)> = None;
    for (i, c) in classes.iter().enumerate() {
        let n = start + i;
        let delta = cf.tail_value(n);
        let x = cf.reversed_limit(n);
        let (f, m, k, l) = phi_at(&ctx, c, &delta, &x, cf.quotient(n + 1), n)?;
        if phi_limit.as_ref().is_some_and(|pl| &f > pl) {
            return Ok(None);
        }
        if best.as_ref().is_none_or(|(bf, _)| &f > bf) {
            best = Some((f, PhiWitness { n, m, k, l }));
        }
    }
    let (phi, witness) = best.expect("cycle is non-empty");
    Ok(Some(EstarReport {
        value: phi.add_rational(&rat_int(1)),
        phi,
        witness,
        cycle_start: start,
        cycle_len: len,
        classes,
    }))
}

/// Result of the runs oracle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunWitness {
    pub position: usize,
    pub period: usize,
    pub length: usize,
}

impl RunWitness {
    pub fn exponent(&self) -> Rational {
        Rational::new(BigInt::from(self.length), BigInt::from(self.period))
    }
}

/// Maximal exponent `length / period` over all repetitions in `word` whose
/// period lies in `[p_lo, p_hi]`.
pub fn oracle_estimate<T: Eq + Sync>(word: &[T], p_lo: usize, p_hi: usize) -> Result<RunWitness, BalancedError> {
    if p_lo == 0 || p_lo > p_hi || p_hi >= word.len() {
        return Err(BalancedError::BadWindow(p_lo, p_hi));
    }
    let best = (p_lo..=p_hi)
        .into_par_iter()
        .map(|p| longest_run_with_period(word, p))
        .max_by(|a, b| {
            // Compare length/period exactly, then prefer the earlier position.
            (a.length * b.period)
                .cmp(&(b.length * a.period))
                .then(b.position.cmp(&a.position))
        })
        .expect("window is non-empty");
    Ok(best)
}

/// Longest factor of `word` having period `p`.
pub fn longest_run_with_period<T: Eq>(word: &[T], p: usize) -> RunWitness {
    let mut best = RunWitness { position: 0, period: p, length: p };
    let mut streak = 0usize;
    for i in 0..word.len() - p {
        if word[i] == word[i + p] {
            streak += 1;
            if streak + p > best.length {
                best = RunWitness { position: i + 1 - streak, period: p, length: streak + p };
            }
        } else {
            streak = 0;
        }
    }
    best
}

/// `Phi_N` at finite `N`, with the actual ratio `x_N = Q_{N-1}/Q_N`.
/// Useful for watching the convergence towards the limit.
pub fn phi_finite(cf: &ContinuedFraction, pair: PeriodPair, n: usize) -> Result<QuadraticNumber, BalancedError> {
    let ctx = ClassContext::new(pair);
    let mut st = crate::cfrac::ConvergentState::new();
    let mut cls = ctx.identity();
    for k in 1..=n {
        st.advance(cf.quotient(k));
        cls = ctx.step(&cls, cf.quotient(k));
    }
    let x = QuadraticNumber::from_rational(Rational::new(st.big_q_prev(), st.big_q()));
    let delta = cf.tail_value(n);
    phi_at(&ctx, &cls, &delta, &x, cf.quotient(n + 1), n).map(|r| r.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sturmian::generate_prefix;

    fn cf(s: &str) -> ContinuedFraction {
        s.parse().unwrap()
    }

    fn q(s: &str) -> QuadraticNumber {
        QuadraticNumber::parse(s).unwrap()
    }

    fn pp(p: u64, pp: u64) -> PeriodPair {
        PeriodPair::new(p, pp).unwrap()
    }

    #[test]
    fn fibonacci_sturmian() {
        let r = estar_exact(&cf("0;(1)"), pp(1, 1)).unwrap();
        assert_eq!(r.value, q("2+(1+sqrt(5))/2"));
    }

    #[test]
    fn small_worked_values() {
        let r = estar_exact(&cf("0;1,(2)"), pp(1, 2)).unwrap();
        assert_eq!(r.value, q("2+1/sqrt(2)"));
        assert_eq!((r.witness.m, r.witness.k, r.witness.l), (1, 0, 1));
        let r = estar_exact(&cf("0;1,(2)"), pp(2, 4)).unwrap();
        assert_eq!(r.value, q("3/2"));
        assert_eq!((r.witness.m, r.witness.k, r.witness.l), (0, 2, 2));
        assert_eq!(estar_exact(&cf("0;(1)"), pp(2, 2)).unwrap().value, q("1+(sqrt(5)+1)/4"));
        assert_eq!(estar_exact(&cf("0;3,(1,1,1,2)"), pp(3, 4)).unwrap().value, q("4/3"));
    }

    #[test]
    fn s2_examples() {
        let d = q("1+sqrt(2)");
        assert!(s2_member(0, 1, 0, &d));
        assert!(!s2_member(0, 0, 0, &d));
        assert!(s2_member(1, 0, 1, &d));
        assert!(!s2_member(0, 10, 1, &d));
    }

    #[test]
    fn colouring_uses_both_sequences() {
        let u = b"babbab";
        let y = ConstantGapSequence::single();
        let y2 = ConstantGapSequence::ruler(2);
        assert_eq!(colour(u, &y, &y2), vec![1, 0, 2, 1, 0, 2]);
    }

    #[test]
    fn runs_oracle_on_fibonacci() {
        let u = generate_prefix(&cf("0;(1)"), 20_000);
        let w = oracle_estimate(&u, 100, 1000).unwrap();
        let e = w.exponent().to_f64().unwrap();
        assert!((e - 3.618034).abs() < 0.01, "{e}");
        assert!(oracle_estimate(&u, 0, 10).is_err());
    }

    #[test]
    fn finite_phi_approaches_limit() {
        let c = cf("0;1,(2)");
        let lim = estar_exact(&c, pp(1, 2)).unwrap().phi.to_f64();
        let best = (20..24).map(|n| phi_finite(&c, pp(1, 2), n).unwrap().to_f64()).fold(0.0, f64::max);
        assert!((best - lim).abs() < 1e-6);
    }

    #[test]
    fn matches_runs_oracle_on_assorted_colourings() {
        let cases = [
            ("0;(2)", 1, 2, 1, 2),
            ("0;(1,2)", 2, 3, 2, 3),
            ("0;(1)", 3, 4, 3, 3),
            ("0;(3)", 2, 2, 2, 2),
            ("0;(1,1,2)", 1, 4, 1, 3),
            ("0;(2,1)", 1, 3, 1, 3),
        ];
        for (s, p, p2, da, db) in cases {
            let c = cf(s);
            let exact = estar_exact(&c, pp(p, p2)).unwrap().value.to_f64();
            let y = crate::cgap::catalogue(da)[&p].clone();
            let y2 = crate::cgap::catalogue(db)[&p2].clone();
            let u = generate_prefix(&c, 40_000);
            let v = colour(&u, &y, &y2);
            let est = oracle_estimate(&v, 100, 3000).unwrap().exponent().to_f64().unwrap();
            assert!((exact - est).abs() < 0.02, "{s} {p},{p2}: exact {exact} runs {est}");
        }
    }
}
