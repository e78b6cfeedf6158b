//! Exact arithmetic: rationals, real quadratic irrationals `a + b*sqrt(d)`,
//! and finite unions of open intervals with rational endpoints.
//!
//! Every comparison here is exact. Floating point appears only in
//! [`QuadraticNumber::to_f64`], which is for display and diagnostics.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("quadratic fields differ: sqrt({0}) vs sqrt({1})")]
    IncompatibleFields(u64, u64),
    #[error("square root of a negative number")]
    NegativeRadicand,
    #[error("radicand too large to factor: {0}")]
    RadicandTooLarge(String),
    #[error("cannot parse number: {0}")]
    Parse(String),
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Split `n` as `s^2 * f` with `f` squarefree. Gives up beyond 10^7 trial divisors.
pub fn squarefree_decompose(n: &BigUint) -> Result<(BigUint, BigUint), NumericError> {
    let mut rest = n.clone();
    let mut square = BigUint::one();
    let mut free = BigUint::one();
    if rest.is_zero() {
        return Ok((BigUint::zero(), BigUint::zero()));
    }
    let mut p: u64 = 2;
    loop {
        let pb = BigUint::from(p);
        if &pb * &pb * &pb > rest {
            break;
        }
        if p > 10_000_000 {
            return Err(NumericError::RadicandTooLarge(n.to_string()));
        }
        let mut e = 0u32;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            e += 1;
        }
        for _ in 0..e / 2 {
            square *= &pb;
        }
        if e % 2 == 1 {
            free *= &pb;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    // What remains has at most two prime factors, all larger than p.
    let r = rest.sqrt();
    if &r * &r == rest && !rest.is_one() {
        square *= r;
    } else {
        free *= rest;
    }
    Ok((square, free))
}

/// A real number `a + b*sqrt(d)` with rational `a`, `b` and squarefree `d >= 2`.
/// Rationals are stored with `b = 0` and `d = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticNumber {
    a: Rational,
    b: Rational,
    d: u64,
}

impl QuadraticNumber {
    pub fn new(a: Rational, b: Rational, d: u64) -> Result<Self, NumericError> {
        if b.is_zero() || d == 0 {
            return Ok(Self::from_rational(a));
        }
        let (s, f) = squarefree_decompose(&BigUint::from(d))?;
        let f = f.to_u64().expect("squarefree part fits");
        let b = b * Rational::from_integer(BigInt::from(s));
        if f == 1 {
            return Ok(Self::from_rational(a + b));
        }
        Ok(Self { a, b, d: f })
    }

    pub fn from_rational(a: Rational) -> Self {
        Self { a, b: Rational::zero(), d: 1 }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    /// `sqrt(n)` for an integer `n >= 0`.
    pub fn sqrt_int(n: &BigInt) -> Result<Self, NumericError> {
        if n.is_negative() {
            return Err(NumericError::NegativeRadicand);
        }
        let (s, f) = squarefree_decompose(n.magnitude())?;
        let s = Rational::from_integer(BigInt::from(s));
        if f.is_one() || f.is_zero() {
            let v = if f.is_zero() { Rational::zero() } else { s };
            return Ok(Self::from_rational(v));
        }
        let d = f
            .to_u64()
            .ok_or_else(|| NumericError::RadicandTooLarge(n.to_string()))?;
        Ok(Self { a: Rational::zero(), b: s, d })
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    /// Squarefree radicand, or 1 for a rational.
    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn field_with(&self, other: &Self) -> Result<u64, NumericError> {
        match (self.d, other.d) {
            (1, e) | (e, 1) => Ok(e),
            (x, y) if x == y => Ok(x),
            (x, y) => Err(NumericError::IncompatibleFields(x, y)),
        }
    }

    fn make(a: Rational, b: Rational, d: u64) -> Self {
        if b.is_zero() {
            Self::from_rational(a)
        } else {
            Self { a, b, d }
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, NumericError> {
        let d = self.field_with(o)?;
        Ok(Self::make(&self.a + &o.a, &self.b + &o.b, d))
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self, NumericError> {
        let d = self.field_with(o)?;
        Ok(Self::make(&self.a - &o.a, &self.b - &o.b, d))
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self, NumericError> {
        let d = self.field_with(o)?;
        let dr = Rational::from_integer(BigInt::from(d));
        let a = &self.a * &o.a + &self.b * &o.b * dr;
        let b = &self.a * &o.b + &self.b * &o.a;
        Ok(Self::make(a, b, d))
    }

    pub fn try_recip(&self) -> Result<Self, NumericError> {
        if self.is_zero() {
            return Err(NumericError::DivisionByZero);
        }
        if self.is_rational() {
            return Ok(Self::from_rational(self.a.recip()));
        }
        let dr = Rational::from_integer(BigInt::from(self.d));
        let norm = &self.a * &self.a - &self.b * &self.b * dr;
        Ok(Self::make(&self.a / &norm, -&self.b / &norm, self.d))
    }

    pub fn try_div(&self, o: &Self) -> Result<Self, NumericError> {
        self.try_mul(&o.try_recip()?)
    }

    pub fn add_rational(&self, r: &Rational) -> Self {
        Self::make(&self.a + r, self.b.clone(), self.d)
    }

    pub fn mul_rational(&self, r: &Rational) -> Self {
        Self::make(&self.a * r, &self.b * r, self.d)
    }

    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // Opposite signs: compare a^2 with b^2 d.
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * Rational::from_integer(BigInt::from(self.d));
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    /// Exact comparison within one field (rationals fit every field).
    pub fn try_cmp(&self, o: &Self) -> Result<Ordering, NumericError> {
        Ok(self.try_sub(o)?.signum())
    }

    /// Comparison across fields by refining rational enclosures. Two numbers
    /// in different real quadratic fields are never equal unless both are
    /// rational, so the refinement terminates.
    pub fn cmp_mixed(&self, o: &Self) -> Ordering {
        if let Ok(c) = self.try_cmp(o) {
            return c;
        }
        let mut bits = 32;
        loop {
            let (l1, h1) = self.enclose(bits);
            let (l2, h2) = o.enclose(bits);
            if h1 < l2 {
                return Ordering::Less;
            }
            if h2 < l1 {
                return Ordering::Greater;
            }
            bits *= 2;
        }
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        self.add_rational(&-r).signum()
    }

    /// Rational bounds `lo <= self <= hi` with `hi - lo` at most about `2^-bits`
    /// times the denominator of `b`.
    pub fn enclose(&self, bits: u32) -> (Rational, Rational) {
        if self.is_rational() {
            return (self.a.clone(), self.a.clone());
        }
        let bn = self.b.numer().abs();
        let bd = self.b.denom().clone();
        let scale = BigInt::one() << bits;
        let radicand = &bn * &bn * BigInt::from(self.d) * &scale * &scale;
        let r = radicand.sqrt();
        let den = &bd * &scale;
        let lo = Rational::new(r.clone(), den.clone());
        let hi = Rational::new(r + 1, den);
        if self.b.is_positive() {
            (&self.a + lo, &self.a + hi)
        } else {
            (&self.a - hi, &self.a - lo)
        }
    }

    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.a.floor().to_integer();
        }
        let mut bits = 16;
        loop {
            let (lo, hi) = self.enclose(bits);
            let fl = lo.floor();
            if fl == hi.floor() {
                return fl.to_integer();
            }
            bits *= 2;
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.enclose(64);
        let mid: Rational = (lo + hi) / rat_int(2);
        mid.numer().to_f64().unwrap_or(f64::NAN) / mid.denom().to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal expansion truncated toward minus infinity, `digits` places.
    pub fn decimal(&self, digits: usize) -> String {
        let ten = BigInt::from(10).pow(digits as u32);
        let scaled = self.mul_rational(&Rational::from_integer(ten.clone()));
        let n = scaled.floor();
        let (q, r) = n.div_mod_floor(&ten);
        if digits == 0 {
            return q.to_string();
        }
        format!("{}.{:0>width$}", q, r.to_string(), width = digits)
    }

    /// Parse an expression built from integers, `+ - * /`, parentheses and
    /// `sqrt(n)`, e.g. `(3*sqrt(65)-5)/80` or `1/2`.
    pub fn parse(s: &str) -> Result<Self, NumericError> {
        let toks: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = ExprParser { t: &toks, i: 0, src: s };
        let v = p.expr()?;
        if p.i != toks.len() {
            return Err(p.err());
        }
        Ok(v)
    }
}

struct ExprParser<'a> {
    t: &'a [char],
    i: usize,
    src: &'a str,
}

impl ExprParser<'_> {
    fn err(&self) -> NumericError {
        NumericError::Parse(self.src.to_string())
    }

    fn peek(&self) -> Option<char> {
        self.t.get(self.i).copied()
    }

    fn expr(&mut self) -> Result<QuadraticNumber, NumericError> {
        let mut v = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.i += 1;
            let r = self.term()?;
            v = if c == '+' { v.try_add(&r)? } else { v.try_sub(&r)? };
        }
        Ok(v)
    }

    fn term(&mut self) -> Result<QuadraticNumber, NumericError> {
        let mut v = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek() {
            self.i += 1;
            let r = self.unary()?;
            v = if c == '*' { v.try_mul(&r)? } else { v.try_div(&r)? };
        }
        Ok(v)
    }

    fn unary(&mut self) -> Result<QuadraticNumber, NumericError> {
        match self.peek() {
            Some('-') => {
                self.i += 1;
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.i += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<QuadraticNumber, NumericError> {
        match self.peek() {
            Some('(') => {
                self.i += 1;
                let v = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err());
                }
                self.i += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.i;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.i += 1;
                }
                let s: String = self.t[start..self.i].iter().collect();
                let n: BigInt = s.parse().map_err(|_| self.err())?;
                Ok(QuadraticNumber::from_rational(Rational::from_integer(n)))
            }
            Some('s') => {
                let word: String = self.t[self.i..].iter().take(5).collect();
                if word != "sqrt(" {
                    return Err(self.err());
                }
                self.i += 4;
                let inner = self.atom()?;
                let r = inner.as_rational().ok_or_else(|| self.err())?;
                if !r.is_integer() {
                    return Err(self.err());
                }
                QuadraticNumber::sqrt_int(&r.to_integer())
            }
            _ => Err(self.err()),
        }
    }
}

impl Neg for QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> Self {
        Self::make(-self.a, -self.b, self.d)
    }
}

impl Neg for &QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> QuadraticNumber {
        QuadraticNumber::make(-&self.a, -&self.b, self.d)
    }
}

// Operator forms panic on mixed fields; use the `try_*` methods when the
// operands may come from different fields.
macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&QuadraticNumber> for &QuadraticNumber {
            type Output = QuadraticNumber;
            fn $m(self, o: &QuadraticNumber) -> QuadraticNumber {
                self.$f(o).expect("quadratic arithmetic")
            }
        }
        impl $tr<QuadraticNumber> for QuadraticNumber {
            type Output = QuadraticNumber;
            fn $m(self, o: QuadraticNumber) -> QuadraticNumber {
                (&self).$f(&o).expect("quadratic arithmetic")
            }
        }
    };
}
binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);
binop!(Div, div, try_div);

impl PartialOrd for QuadraticNumber {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for QuadraticNumber {
    fn cmp(&self, o: &Self) -> Ordering {
        self.cmp_mixed(o)
    }
}

impl From<Rational> for QuadraticNumber {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a);
        }
        let sqrt = if self.b.abs().is_one() {
            format!("sqrt({})", self.d)
        } else {
            format!("{}*sqrt({})", self.b.abs(), self.d)
        };
        let sign = if self.b.is_negative() { "-" } else { "+" };
        if self.a.is_zero() {
            let lead = if self.b.is_negative() { "-" } else { "" };
            write!(f, "{lead}{sqrt}")
        } else {
            write!(f, "{} {} {}", self.a, sign, sqrt)
        }
    }
}

/// Decimal rendering of a rational, truncated toward minus infinity.
pub fn rational_decimal(r: &Rational, digits: usize) -> String {
    QuadraticNumber::from_rational(r.clone()).decimal(digits)
}

/// Round `r` to a dyadic rational with `bits` fractional bits, toward
/// minus infinity (`up == false`) or plus infinity.
pub fn round_dyadic(r: &Rational, bits: u32, up: bool) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = r * Rational::from_integer(scale.clone());
    let n = if up { scaled.ceil() } else { scaled.floor() };
    Rational::new(n.to_integer(), scale)
}

/// Keep `r` exact while its denominator fits in `bits` bits, otherwise round
/// it outward to a dyadic rational.
pub fn outward(r: &Rational, bits: u32, up: bool) -> Rational {
    if r.denom().bits() <= bits as u64 {
        r.clone()
    } else {
        round_dyadic(r, bits, up)
    }
}

/// An open interval `(lo, hi)` with `lo < hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl OpenInterval {
    pub fn new(lo: Rational, hi: Rational) -> Option<Self> {
        (lo < hi).then_some(Self { lo, hi })
    }
}

/// A finite union of pairwise disjoint open intervals, sorted. Intervals that
/// only touch at an endpoint stay separate because the endpoint is excluded.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntervalSet {
    parts: Vec<OpenInterval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn interval(lo: Rational, hi: Rational) -> Self {
        Self::from_intervals(OpenInterval::new(lo, hi))
    }

    pub fn from_intervals<I: IntoIterator<Item = OpenInterval>>(it: I) -> Self {
        let mut v: Vec<OpenInterval> = it.into_iter().collect();
        v.sort_by(|x, y| x.lo.cmp(&y.lo));
        let mut parts: Vec<OpenInterval> = Vec::with_capacity(v.len());
        for iv in v {
            match parts.last_mut() {
                Some(last) if iv.lo < last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => parts.push(iv),
            }
        }
        Self { parts }
    }

    pub fn parts(&self) -> &[OpenInterval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn union(&self, o: &Self) -> Self {
        Self::from_intervals(self.parts.iter().chain(o.parts.iter()).cloned())
    }

    pub fn intersect(&self, o: &Self) -> Self {
        let mut out = Vec::new();
        for x in &self.parts {
            for y in &o.parts {
                let lo = (&x.lo).max(&y.lo).clone();
                let hi = (&x.hi).min(&y.hi).clone();
                if let Some(iv) = OpenInterval::new(lo, hi) {
                    out.push(iv);
                }
            }
        }
        Self::from_intervals(out)
    }

    /// `self` minus the closure of `removed`.
    pub fn subtract_closure(&self, removed: &Self) -> Self {
        let mut cur = self.parts.clone();
        for r in &removed.parts {
            cur = subtract_closed(cur, &r.lo, &r.hi);
        }
        Self { parts: cur }
    }

    /// `self` minus the closed interval `[lo, hi]`.
    pub fn subtract_closed(&self, lo: &Rational, hi: &Rational) -> Self {
        Self { parts: subtract_closed(self.parts.clone(), lo, hi) }
    }

    pub fn contains_rational(&self, x: &Rational) -> bool {
        self.parts.iter().any(|p| &p.lo < x && x < &p.hi)
    }

    pub fn contains(&self, x: &QuadraticNumber) -> bool {
        self.parts
            .iter()
            .any(|p| x.cmp_rational(&p.lo) == Ordering::Greater && x.cmp_rational(&p.hi) == Ordering::Less)
    }

    /// Whether the set meets the closed interval `[lo, hi]`.
    pub fn meets_closed(&self, lo: &Rational, hi: &Rational) -> bool {
        lo <= hi && self.parts.iter().any(|p| &p.lo < hi && lo < &p.hi)
    }

    /// Whether the set meets the open interval `(lo, hi)`.
    pub fn meets_open(&self, lo: &Rational, hi: &Rational) -> bool {
        self.parts.iter().any(|p| (&p.lo).max(lo) < (&p.hi).min(hi))
    }

    /// Smallest closed interval containing the set.
    pub fn hull(&self) -> Option<(Rational, Rational)> {
        Some((self.parts.first()?.lo.clone(), self.parts.last()?.hi.clone()))
    }
}

fn subtract_closed(parts: Vec<OpenInterval>, lo: &Rational, hi: &Rational) -> Vec<OpenInterval> {
    let mut out = Vec::with_capacity(parts.len() + 1);
    for p in parts {
        if &p.hi <= lo || hi <= &p.lo {
            out.push(p);
            continue;
        }
        if let Some(l) = OpenInterval::new(p.lo.clone(), lo.clone()) {
            out.push(l);
        }
        if let Some(r) = OpenInterval::new(hi.clone(), p.hi.clone()) {
            out.push(r);
        }
    }
    out
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        let s: Vec<String> = self.parts.iter().map(|p| format!("({},{})", p.lo, p.hi)).collect();
        write!(f, "{}", s.join("∪"))
    }
}

/// Sign of `n` as an [`Ordering`] against zero.
pub fn sign_of(n: &BigInt) -> Ordering {
    match n.sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> QuadraticNumber {
        QuadraticNumber::parse(s).unwrap()
    }

    #[test]
    fn golden_ratio_basics() {
        let phi = q("(1+sqrt(5))/2");
        assert_eq!(phi.floor(), BigInt::from(1));
        assert_eq!(&phi * &phi, phi.add_rational(&rat_int(1)));
        assert_eq!(phi.decimal(12), "1.618033988749");
        assert_eq!(phi.to_string(), "1/2 + 1/2*sqrt(5)");
    }

    #[test]
    fn radicand_is_reduced() {
        let x = q("sqrt(20)");
        assert_eq!(x.radicand(), 5);
        assert_eq!(x.b(), &rat_int(2));
        assert_eq!(q("sqrt(49)"), QuadraticNumber::from_int(7));
        assert_eq!(q("(21-sqrt(20))/16"), q("21/16-sqrt(5)/8"));
    }

    #[test]
    fn sign_near_zero() {
        // 99/70 is a convergent of sqrt(2), just above it.
        assert_eq!(q("sqrt(2)-99/70").signum(), Ordering::Less);
        assert_eq!(q("sqrt(2)-140/99").signum(), Ordering::Greater);
    }

    #[test]
    fn mixed_fields() {
        let a = q("sqrt(2)");
        let b = q("sqrt(3)");
        assert!(a.try_cmp(&b).is_err());
        assert_eq!(a.cmp_mixed(&b), Ordering::Less);
        assert!(a.try_add(&b).is_err());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(QuadraticNumber::parse("1/").is_err());
        assert!(QuadraticNumber::parse("sqrt(1/2)").is_err());
        assert!(QuadraticNumber::parse("abc").is_err());
    }

    #[test]
    fn interval_set_touching_parts_stay_apart() {
        let s = IntervalSet::from_intervals([
            OpenInterval::new(rat_int(1), rat_int(2)).unwrap(),
            OpenInterval::new(rat_int(2), rat_int(3)).unwrap(),
        ]);
        assert_eq!(s.parts().len(), 2);
        assert!(!s.contains_rational(&rat_int(2)));
        let t = IntervalSet::interval(rat_int(1), rat_int(4)).subtract_closed(&rat(3, 1), &rat(7, 2));
        assert_eq!(t.to_string(), "(1,3)∪(7/2,4)");
    }

    #[test]
    fn squarefree_parts() {
        let (s, f) = squarefree_decompose(&BigUint::from(2u32 * 2 * 3 * 7 * 7 * 11)).unwrap();
        assert_eq!(s, BigUint::from(14u32));
        assert_eq!(f, BigUint::from(33u32));
        let big = BigUint::from(1_000_003u64) * BigUint::from(1_000_003u64) * BigUint::from(5u32);
        let (s, f) = squarefree_decompose(&big).unwrap();
        assert_eq!((s, f), (BigUint::from(1_000_003u64), BigUint::from(5u32)));
    }

    fn small_quad() -> impl Strategy<Value = QuadraticNumber> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20, prop::sample::select(vec![2u64, 3, 5, 7]))
            .prop_map(|(an, ad, bn, bd, d)| QuadraticNumber::new(rat(an, ad), rat(bn, bd), d).unwrap())
    }

    proptest! {
        #[test]
        fn sign_agrees_with_float(x in small_quad()) {
            let f = x.a().to_f64().unwrap() + x.b().to_f64().unwrap() * (x.radicand() as f64).sqrt();
            if f.abs() > 1e-9 {
                prop_assert_eq!(x.signum(), if f > 0.0 { Ordering::Greater } else { Ordering::Less });
            }
        }

        #[test]
        fn floor_brackets(x in small_quad()) {
            let fl = QuadraticNumber::from_rational(Rational::from_integer(x.floor()));
            prop_assert!(fl <= x);
            prop_assert!(x < fl.add_rational(&rat_int(1)));
        }

        #[test]
        fn field_axioms(x in small_quad(), y in small_quad()) {
            if x.radicand() == y.radicand() || x.is_rational() || y.is_rational() {
                prop_assert_eq!(&(&x + &y) - &y, x.clone());
                if !y.is_zero() {
                    prop_assert_eq!(&(&x * &y) / &y, x.clone());
                }
            }
        }

        #[test]
        fn subtract_closure_excludes_removed(a in 0i64..20, w in 1i64..20, c in 0i64..30, e in 0i64..10, t in 0i64..60) {
            let base = IntervalSet::interval(rat_int(a), rat_int(a + w));
            let removed = IntervalSet::interval(rat_int(c), rat_int(c + e + 1));
            let out = base.subtract_closure(&removed);
            let x = rat(t, 2);
            let expect = base.contains_rational(&x) && !(rat_int(c) <= x && x <= rat_int(c + e + 1));
            prop_assert_eq!(out.contains_rational(&x), expect);
        }
    }
}
