//! Standard Sturmian sequences over `{a, b}`, their return words and the
//! classical exponent formulas, plus the Zeckendorf-coded witness for the
//! repetition threshold of rich sequences.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::balanced::{colour, estar_exact, longest_run_with_period, BalancedError};
use crate::cfrac::{ContinuedFraction, ConvergentState};
use crate::cgap::ConstantGapSequence;
use crate::matcls::PeriodPair;
use crate::numeric::{rat_int, QuadraticNumber, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SturmianError {
    #[error("m = {m} is out of range for a_(N+1) = {a}")]
    MOutOfRange { m: u64, a: u64 },
    #[error("the witness needs k >= 6, got {0}")]
    SmallK(u32),
    #[error("{0} does not fit in {1} Zeckendorf digits")]
    ZeckendorfRange(u64, u32),
    #[error(transparent)]
    Balanced(#[from] BalancedError),
}

fn apply(word: &[u8], g: bool, cap: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(cap.min(word.len() * 2 + 1));
    for &c in word {
        match (g, c) {
            (true, b'a') => out.push(b'a'),
            (true, _) => out.extend_from_slice(b"ab"),
            (false, b'a') => out.extend_from_slice(b"ba"),
            (false, _) => out.push(b'b'),
        }
        if out.len() >= cap {
            out.truncate(cap);
            break;
        }
    }
    out
}

/// Prefix of length `len` of the standard Sturmian sequence with directive
/// sequence `D^{a1} G^{a2} D^{a3} ...`, where `G: a->a, b->ab` and
/// `D: a->ba, b->b`. The letter frequencies satisfy `rho_a / rho_b = theta`.
pub fn generate_prefix(cf: &ContinuedFraction, len: usize) -> Vec<u8> {
    let mut blocks = 4usize;
    loop {
        // Blocks alternate D, G, D, ...; block i uses a_{i+1} copies.
        let qs = cf.quotients(blocks);
        // The inner sequence starts with b when the next block is D.
        let mut w: Vec<u8> = vec![if blocks.is_multiple_of(2) { b'b' } else { b'a' }];
        for (i, &a) in qs.iter().enumerate().rev() {
            for _ in 0..a {
                w = apply(&w, i % 2 == 1, len);
            }
        }
        if w.len() >= len {
            return w;
        }
        blocks *= 2;
    }
}

/// Parikh vectors `(|.|_a, |.|_b)` of the return words `r`, `s` and of the
/// bispecial factor `z` attached to `(N, m)`, `0 <= m < a_{N+1}`.
pub fn return_word_parikh(
    st: &ConvergentState,
    a_next: u64,
    m: u64,
) -> Result<[(BigInt, BigInt); 3], SturmianError> {
    if m >= a_next {
        return Err(SturmianError::MOutOfRange { m, a: a_next });
    }
    let m = BigInt::from(m);
    let r = (st.p.clone(), st.q.clone());
    let s = (&m * &st.p + &st.p_prev, &m * &st.q + &st.q_prev);
    let z = (&r.0 + &s.0 - 1, &r.1 + &s.1 - 1);
    Ok([r, s, z])
}

/// Whether some factor has `l` letters `a` and `k` letters `b`, for a
/// Sturmian sequence with `rho_b / rho_a = delta`.
pub fn parikh_admissible(l: u64, k: u64, delta: &QuadraticNumber) -> bool {
    let v = delta.mul_rational(&rat_int(l as i64)).add_rational(&-rat_int(k as i64));
    let abs = if v.signum().is_lt() { -v } else { v };
    abs < delta.add_rational(&rat_int(1))
}

/// `E*` of the Sturmian sequence, as the colouring with periods `(1, 1)`.
pub fn estar_sturmian(cf: &ContinuedFraction) -> Result<QuadraticNumber, SturmianError> {
    Ok(estar_exact(cf, PeriodPair { p: 1, pp: 1 })?.value)
}

/// Closed form `2 + limsup (a_{N+1} + Q_{N-1}/Q_N)`, used to cross-check
/// [`estar_sturmian`].
pub fn estar_sturmian_formula(cf: &ContinuedFraction) -> QuadraticNumber {
    let s = cf.preperiod().len();
    (s..s + cf.period().len())
        .map(|n| cf.reversed_limit(n).add_rational(&rat_int(cf.quotient(n + 1) as i64 + 2)))
        .max()
        .expect("period is non-empty")
}

/// Critical exponent `E = 2 + sup_N (a_{N+1} + (Q_{N-1} - 2)/Q_N)`.
///
/// Finite terms are evaluated until at least three periods have passed and
/// `Q_N > 2^40`; the tail is covered by the limits along each residue.
pub fn e_sturmian(cf: &ContinuedFraction) -> QuadraticNumber {
    let s = cf.preperiod().len();
    let p = cf.period().len();
    let mut best = estar_sturmian_formula(cf);
    let mut st = ConvergentState::new();
    let limit = BigInt::from(1u64 << 40);
    let mut n = 0usize;
    loop {
        let a = cf.quotient(n + 1);
        let term = Rational::new(st.big_q_prev() - 2, st.big_q()) + rat_int(a as i64 + 2);
        let term = QuadraticNumber::from_rational(term);
        if term > best {
            best = term;
        }
        if n >= s + 3 * p && st.big_q() > limit {
            break;
        }
        st.advance(a);
        n += 1;
    }
    best
}

/// Zeckendorf digits `c_{k-1} ... c_2` of `i` over `F_2, ..., F_{k-1}`
/// (with `F_0 = 0, F_1 = 1`), most significant first.
pub fn zeckendorf(i: u64, k: u32) -> Result<Vec<u8>, SturmianError> {
    let mut fib = vec![0u64, 1];
    while fib.len() <= k as usize {
        let n = fib.len();
        fib.push(fib[n - 1] + fib[n - 2]);
    }
    if i >= fib[k as usize] {
        return Err(SturmianError::ZeckendorfRange(i, k - 2));
    }
    let mut rest = i;
    let mut out = Vec::with_capacity(k as usize - 2);
    for j in (2..k as usize).rev() {
        if fib[j] <= rest {
            rest -= fib[j];
            out.push(1);
        } else {
            out.push(0);
        }
    }
    if rest != 0 {
        return Err(SturmianError::ZeckendorfRange(i, k - 2));
    }
    Ok(out)
}

/// `psi(i) = 110 (i)_Fib`, a binary block of length `k + 1`.
pub fn psi_block(i: u64, k: u32) -> Result<Vec<u8>, SturmianError> {
    let mut v = vec![1, 1, 0];
    v.extend(zeckendorf(i, k)?);
    Ok(v)
}

fn fibonacci(n: u32) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

/// Outcome of [`rt_star_witness`].
#[derive(Clone, Debug, Serialize)]
pub struct RtWitnessReport {
    pub k: u32,
    pub d: u64,
    pub bound: String,
    pub bound_value: f64,
    /// Largest `length / period` over repetitions whose overlap
    /// `length - period` is at least `3 (k + 1)`.
    pub measured: f64,
    pub position: usize,
    pub period: usize,
    pub length: usize,
    pub coder: String,
}

/// Inner balanced sequence over `d` letters (`d` even) for the witness:
/// the Sturmian sequence of slope `[0; 1, (2)]` with both letters coloured
/// by the cyclic word `0 1 ... d/2 - 1`. For `d = 12` its `E*` is
/// `4/3 - sqrt(2)/6`.
pub fn witness_inner(d: u64, len: usize) -> Vec<u32> {
    let slope = ContinuedFraction::new(vec![1], vec![2]).expect("valid");
    let u = generate_prefix(&slope, len);
    let half = ConstantGapSequence::new((0..(d / 2) as u32).collect()).expect("cyclic words have constant gap");
    colour(&u, &half, &half)
}

/// Binary image `psi(v)` of a `d`-ary sequence, `d = 2 floor(F_k / 2)`,
/// with its largest exponent over long overlaps measured on a prefix of
/// `prefix_len` letters.
pub fn rt_star_witness(k: u32, prefix_len: usize) -> Result<RtWitnessReport, SturmianError> {
    if k < 6 {
        return Err(SturmianError::SmallK(k));
    }
    let fk = fibonacci(k);
    let d = 2 * (fk / 2);
    let block = (k + 1) as usize;
    let v = witness_inner(d, prefix_len / block + 1);
    let mut u = Vec::with_capacity(prefix_len + block);
    for &x in &v {
        u.extend(psi_block(x as u64, k)?);
    }
    u.truncate(prefix_len);
    let min_overlap = 3 * block;
    let best = (1..=prefix_len / 4)
        .map(|p| longest_run_with_period(&u, p))
        .filter(|w| w.length >= w.period + min_overlap)
        .max_by(|a, b| (a.length * b.period).cmp(&(b.length * a.period)));
    let (measured, position, period, length) = match best {
        Some(w) => (w.length as f64 / w.period as f64, w.position, w.period, w.length),
        None => (1.0, 0, 0, 0),
    };
    let bound = Rational::new(BigInt::from(2), BigInt::from(fk - 3)) + rat_int(1);
    Ok(RtWitnessReport {
        k,
        d,
        bound: bound.to_string(),
        bound_value: bound.numer().to_f64().unwrap_or(0.0) / bound.denom().to_f64().unwrap_or(1.0),
        measured,
        position,
        period,
        length,
        coder: "110 followed by Zeckendorf digits".to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cf(s: &str) -> ContinuedFraction {
        s.parse().unwrap()
    }

    fn q(s: &str) -> QuadraticNumber {
        QuadraticNumber::parse(s).unwrap()
    }

    /// Characteristic word: letter n (from 1) is `a` iff
    /// `floor((n+1) alpha) - floor(n alpha) = 1`, `alpha = theta / (1 + theta)`.
    fn mechanical(c: &ContinuedFraction, len: usize) -> Vec<u8> {
        let t = c.value();
        let alpha = &t / &t.add_rational(&rat_int(1));
        (1..=len as i64)
            .map(|n| {
                let hi = alpha.mul_rational(&rat_int(n + 1)).floor();
                let lo = alpha.mul_rational(&rat_int(n)).floor();
                if hi - lo == BigInt::from(1) { b'a' } else { b'b' }
            })
            .collect()
    }

    #[test]
    fn fibonacci_prefix() {
        let u = generate_prefix(&cf("0;(1)"), 22);
        assert_eq!(u, b"babbababbabbababbababb");
    }

    #[test]
    fn return_words_at_start() {
        let st = ConvergentState::new();
        let [r, s, z] = return_word_parikh(&st, 3, 0).unwrap();
        assert_eq!(r, (BigInt::from(0), BigInt::from(1)));
        assert_eq!(s, (BigInt::from(1), BigInt::from(0)));
        assert_eq!(z, (BigInt::from(0), BigInt::from(0)));
        assert!(return_word_parikh(&st, 3, 3).is_err());
    }

    #[test]
    fn fibonacci_exponents() {
        let golden = q("2+(1+sqrt(5))/2");
        let c = cf("0;(1)");
        assert_eq!(estar_sturmian(&c).unwrap(), golden);
        assert_eq!(estar_sturmian_formula(&c), golden);
        assert_eq!(e_sturmian(&c), golden);
    }

    #[test]
    fn printed_ratio_orientation_misses_fibonacci() {
        // With Q_{N-1}/Q_{N-2} the Fibonacci limit would be 2 + 1 + phi.
        let c = cf("0;(1)");
        let inverted = c.reversed_limit(5).try_recip().unwrap().add_rational(&rat_int(3));
        assert_eq!(inverted, q("3+(1+sqrt(5))/2"));
        assert_ne!(inverted, estar_sturmian(&c).unwrap());
    }

    #[test]
    fn attained_critical_exponent() {
        // b-runs of length 6 give E = 6, above the asymptotic 2 + phi.
        let c = cf("0;5,(1)");
        assert_eq!(e_sturmian(&c), QuadraticNumber::from_int(6));
        assert_eq!(estar_sturmian(&c).unwrap(), q("2+(1+sqrt(5))/2"));
        let u = generate_prefix(&c, 5000);
        let best = (1..200).map(|p| longest_run_with_period(&u, p)).map(|w| w.length as f64 / w.period as f64);
        assert_eq!(best.fold(0.0, f64::max), 6.0);
    }

    #[test]
    fn zeckendorf_digits() {
        assert_eq!(zeckendorf(7, 6).unwrap(), vec![1, 0, 1, 0]);
        assert_eq!(psi_block(0, 7).unwrap(), vec![1, 1, 0, 0, 0, 0, 0, 0]);
        assert!(zeckendorf(13, 7).is_err());
    }

    proptest! {
        #[test]
        fn prefix_is_mechanical(pre in prop::collection::vec(1u64..4, 0..3),
                                per in prop::collection::vec(1u64..4, 1..3)) {
            let c = ContinuedFraction::new(pre, per).unwrap();
            prop_assert_eq!(generate_prefix(&c, 300), mechanical(&c, 300));
        }

        #[test]
        fn return_words_share_determinant(qs in prop::collection::vec(1u64..6, 1..12), m_seed in 0u64..100) {
            let mut st = ConvergentState::new();
            for &a in &qs[..qs.len() - 1] {
                st.advance(a);
            }
            let a_next = *qs.last().unwrap();
            let m = m_seed % a_next;
            let [r, s, z] = return_word_parikh(&st, a_next, m).unwrap();
            let det = &r.0 * &s.1 - &r.1 * &s.0;
            prop_assert!(det == BigInt::from(1) || det == BigInt::from(-1));
            prop_assert_eq!(&z.0 + &z.1 + 2, &r.0 + &r.1 + &s.0 + &s.1);
        }

        #[test]
        fn admissible_parikh_vectors_occur(pre in prop::collection::vec(1u64..4, 0..2),
                                           per in prop::collection::vec(1u64..4, 1..3),
                                           len in 1usize..12) {
            let c = ContinuedFraction::new(pre, per).unwrap();
            let u = generate_prefix(&c, 3000);
            let delta = c.value().try_recip().unwrap();
            let mut present = std::collections::BTreeSet::new();
            for w in u.windows(len) {
                let l = w.iter().filter(|&&x| x == b'a').count() as u64;
                present.insert((l, len as u64 - l));
            }
            for l in 0..=len as u64 {
                let k = len as u64 - l;
                prop_assert_eq!(parikh_admissible(l, k, &delta), present.contains(&(l, k)), "l={} k={}", l, k);
            }
        }

        #[test]
        fn formula_matches_engine(pre in prop::collection::vec(1u64..5, 0..3),
                                  per in prop::collection::vec(1u64..5, 1..4)) {
            let c = ContinuedFraction::new(pre, per).unwrap();
            prop_assert_eq!(estar_sturmian(&c).unwrap(), estar_sturmian_formula(&c));
            prop_assert!(e_sturmian(&c) >= estar_sturmian_formula(&c));
        }
    }
}
