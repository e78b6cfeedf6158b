//! Eventually periodic continued fractions `[0; a1, ..., as, (b1, ..., bp)]`
//! and the convergent bookkeeping used throughout.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::numeric::{QuadraticNumber, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CfError {
    #[error("malformed continued fraction `{input}` at position {pos}: {what}")]
    Malformed { input: String, pos: usize, what: &'static str },
    #[error("partial quotients must be positive integers")]
    NonPositive,
    #[error("the period must be non-empty")]
    EmptyPeriod,
}

/// `theta = [0; a1, a2, ...]` with a finite preperiod and a non-empty period.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ContinuedFraction {
    pre: Vec<u64>,
    period: Vec<u64>,
}

impl ContinuedFraction {
    pub fn new(pre: Vec<u64>, period: Vec<u64>) -> Result<Self, CfError> {
        if period.is_empty() {
            return Err(CfError::EmptyPeriod);
        }
        if pre.iter().chain(period.iter()).any(|&a| a == 0) {
            return Err(CfError::NonPositive);
        }
        Ok(Self { pre, period })
    }

    pub fn preperiod(&self) -> &[u64] {
        &self.pre
    }

    pub fn period(&self) -> &[u64] {
        &self.period
    }

    /// The partial quotient `a_n`, `n >= 1`.
    pub fn quotient(&self, n: usize) -> u64 {
        assert!(n >= 1, "partial quotients are indexed from 1");
        let s = self.pre.len();
        if n <= s {
            self.pre[n - 1]
        } else {
            self.period[(n - s - 1) % self.period.len()]
        }
    }

    /// `[0; P, a1, a2, ...]`, the slope obtained by swapping the letters.
    pub fn with_leading(&self, first: u64) -> Self {
        let mut pre = vec![first];
        pre.extend_from_slice(&self.pre);
        Self { pre, period: self.period.clone() }
    }

    /// Value of the purely periodic `[c0; c1, ..., c_{p-1}, c0, ...]`, which exceeds 1.
    fn purely_periodic(c: &[u64]) -> QuadraticNumber {
        let mut m = [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]];
        for &a in c {
            let a = BigInt::from(a);
            m = [
                [&m[0][0] * &a + &m[0][1], m[0][0].clone()],
                [&m[1][0] * &a + &m[1][1], m[1][0].clone()],
            ];
        }
        // t = (m00 t + m01) / (m10 t + m11)
        let diff = &m[0][0] - &m[1][1];
        let disc = &diff * &diff + BigInt::from(4) * &m[0][1] * &m[1][0];
        let root = QuadraticNumber::sqrt_int(&disc).expect("discriminant factors");
        let den = Rational::from_integer(BigInt::from(2) * &m[1][0]);
        root.add_rational(&Rational::from_integer(diff)).mul_rational(&den.recip())
    }

    fn rotation(&self, k: usize) -> Vec<u64> {
        let p = self.period.len();
        (0..p).map(|i| self.period[(k + i) % p]).collect()
    }

    /// `delta_N = [a_{N+1}; a_{N+2}, ...]`.
    pub fn tail_value(&self, n: usize) -> QuadraticNumber {
        let s = self.pre.len();
        if n >= s {
            return Self::purely_periodic(&self.rotation((n - s) % self.period.len()));
        }
        let mut x = Self::purely_periodic(&self.period);
        for &a in self.pre[n..].iter().rev() {
            x = x.try_recip().expect("tail is positive").add_rational(&Rational::from_integer(a.into()));
        }
        x
    }

    /// `theta = [0; a1, a2, ...]`.
    pub fn value(&self) -> QuadraticNumber {
        self.tail_value(0).try_recip().expect("tail is positive")
    }

    /// Limit of `Q_{N-1}/Q_N` along `N, N+p, N+2p, ...`, i.e. the purely
    /// periodic `[0; a_N, a_{N-1}, ...]` read backwards through the period.
    pub fn reversed_limit(&self, n: usize) -> QuadraticNumber {
        let s = self.pre.len();
        let p = self.period.len();
        let r = (n + p * (s + 1) - s - 1) % p; // index of a_N inside the period
        let c: Vec<u64> = (0..p).map(|i| self.period[(r + p - i % p) % p]).collect();
        Self::purely_periodic(&c).try_recip().expect("positive")
    }

    /// The first `count` partial quotients.
    pub fn quotients(&self, count: usize) -> Vec<u64> {
        (1..=count).map(|n| self.quotient(n)).collect()
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        write!(f, "0;")?;
        if !self.pre.is_empty() {
            write!(f, "{},", join(&self.pre))?;
        }
        write!(f, "({})", join(&self.period))
    }
}

impl FromStr for ContinuedFraction {
    type Err = CfError;

    /// Accepts `0;1,(2)` and `[0,1,(2)]` style input. Error positions
    /// count characters of the input with whitespace removed.
    fn from_str(s: &str) -> Result<Self, CfError> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |pos: usize, what| CfError::Malformed { input: s.to_string(), pos, what };
        let (body, base) = match t.strip_prefix('[') {
            Some(x) => (x.strip_suffix(']').ok_or_else(|| bad(t.len(), "missing `]`"))?, 1),
            None => (t.as_str(), 0),
        };
        let rest = body
            .strip_prefix("0;")
            .or_else(|| body.strip_prefix("0,"))
            .ok_or_else(|| bad(base, "expected leading `0;`"))?;
        let base = base + 2;
        let open = rest.find('(').ok_or_else(|| bad(base + rest.len(), "missing `(` before the period"))?;
        let close = rest.rfind(')').ok_or_else(|| bad(base + rest.len(), "missing `)` after the period"))?;
        if close < open {
            return Err(bad(base + close, "`)` before `(`"));
        }
        if close != rest.len() - 1 {
            return Err(bad(base + close + 1, "text after the period"));
        }
        let parse_list = |x: &str, at: usize| -> Result<Vec<u64>, CfError> {
            let mut out = Vec::new();
            if x.is_empty() {
                return Ok(out);
            }
            let mut pos = at;
            for w in x.split(',') {
                let v: i64 = w.parse().map_err(|_| bad(pos, "expected an integer"))?;
                if v <= 0 {
                    return Err(CfError::NonPositive);
                }
                out.push(v as u64);
                pos += w.len() + 1;
            }
            Ok(out)
        };
        let head = &rest[..open];
        if !head.is_empty() && !head.ends_with(',') {
            return Err(bad(base + open, "expected `,` before `(`"));
        }
        let pre = parse_list(head.strip_suffix(',').unwrap_or(head), base)?;
        let period = parse_list(&rest[open + 1..close], base + open + 1)?;
        Self::new(pre, period)
    }
}

/// Convergents `p_N/q_N` of `theta` together with `Q_N = p_N + q_N`.
/// Starts at `N = 0` with `p_{-1} = 1, p_0 = 0, q_{-1} = 0, q_0 = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentState {
    pub n: usize,
    pub p_prev: BigInt,
    pub p: BigInt,
    pub q_prev: BigInt,
    pub q: BigInt,
}

impl Default for ConvergentState {
    fn default() -> Self {
        Self::new()
    }
}

impl ConvergentState {
    pub fn new() -> Self {
        Self {
            n: 0,
            p_prev: BigInt::one(),
            p: BigInt::zero(),
            q_prev: BigInt::zero(),
            q: BigInt::one(),
        }
    }

    /// Move from `N` to `N + 1` using `a = a_{N+1}`.
    pub fn advance(&mut self, a: u64) {
        let a = BigInt::from(a);
        let p = &a * &self.p + &self.p_prev;
        let q = &a * &self.q + &self.q_prev;
        self.p_prev = std::mem::replace(&mut self.p, p);
        self.q_prev = std::mem::replace(&mut self.q, q);
        self.n += 1;
    }

    pub fn big_q(&self) -> BigInt {
        &self.p + &self.q
    }

    pub fn big_q_prev(&self) -> BigInt {
        &self.p_prev + &self.q_prev
    }

    /// `A_N = (p_{N-1} p_N; q_{N-1} q_N)`.
    pub fn matrix(&self) -> [[BigInt; 2]; 2] {
        [[self.p_prev.clone(), self.p.clone()], [self.q_prev.clone(), self.q.clone()]]
    }
}
