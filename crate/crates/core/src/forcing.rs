//! Forcing triplets and the admissible sets `D(beta, A)`.
//!
//! A triplet `(m, k, l)` forces `E* > 1 + beta` at every index where the
//! class is `A` and `delta_N` lies in its P2 interval. Removing the
//! closures of all such intervals from `(1, ceil(L (1 + beta)) - 2)` leaves
//! the values of `delta_N` still compatible with `E* <= 1 + beta`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::matcls::{ClassContext, MatrixClass, SolutionLattice};
use crate::numeric::{rat_int, IntervalSet, OpenInterval, QuadraticNumber, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Triplet {
    pub m: u64,
    pub k: u64,
    pub l: u64,
}

impl fmt::Display for Triplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.m, self.k, self.l)
    }
}

/// P3: `1/k > beta` if `k = l`, `(1+m)/(k+ml) >= beta` if `k > l`, and
/// `(2+m)/(k+(m+1)l) >= beta` if `k < l`.
pub fn p3_holds(t: Triplet, beta: &QuadraticNumber) -> bool {
    let Triplet { m, k, l } = t;
    if k + l == 0 {
        return false;
    }
    let q = |n: u64, d: u64| QuadraticNumber::from_rational(Rational::new(n.into(), d.into()));
    match k.cmp(&l) {
        std::cmp::Ordering::Equal => q(1, k) > *beta,
        std::cmp::Ordering::Greater => q(1 + m, k + m * l) >= *beta,
        std::cmp::Ordering::Less => q(2 + m, k + (m + 1) * l) >= *beta,
    }
}

/// The open P2 interval of `delta`; `hi = None` means unbounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P2Interval {
    pub lo: Rational,
    pub hi: Option<Rational>,
}

/// P2: `m + 1 < delta` and `|l (delta - m) - k| < delta - m + 1`.
pub fn p2_interval(t: Triplet) -> P2Interval {
    let Triplet { m, k, l } = t;
    let (m, k, l) = (m as i64, k as i64, l as i64);
    let floor = rat_int(m + 1);
    match l {
        0 => P2Interval { lo: rat_int(m + k - 1).max(floor), hi: None },
        1 => P2Interval { lo: (rat_int(m) + Rational::new((k - 1).into(), 2.into())).max(floor), hi: None },
        _ => P2Interval {
            lo: (rat_int(m) + Rational::new((k - 1).into(), (l + 1).into())).max(floor),
            hi: Some(rat_int(m) + Rational::new((k + 1).into(), (l - 1).into())),
        },
    }
}

/// Upper end `ceil(L (1 + beta)) - 2` of the ambient interval.
pub fn ambient_upper(ctx: &ClassContext, beta: &QuadraticNumber) -> u64 {
    let l = rat_int(ctx.pair.l() as i64);
    let v = beta.add_rational(&rat_int(1)).mul_rational(&l);
    (v.ceil() - BigInt::from(2)).to_u64().expect("ambient bound fits")
}

fn floor_u64(x: &QuadraticNumber) -> Option<u64> {
    let f = x.floor();
    if f.is_negative() {
        None
    } else {
        Some(f.to_u64().unwrap_or(u64::MAX))
    }
}

/// Largest `k` allowed for a given `(m, l)` and sign of `k - l`.
trait KBound {
    fn gt(&self, m: u64, l: u64) -> Option<u64>;
    fn eq(&self, m: u64) -> Option<u64>;
    fn lt(&self, m: u64, l: u64) -> bool;
}

/// P3 bounds: `k + ml <= floor((1+m)/beta)`, `k + (m+1)l <= floor((2+m)/beta)`
/// and `k <= ceil(1/beta) - 1`.
struct P3Bound {
    f1: Vec<Option<u64>>,
    f2: Vec<Option<u64>>,
    k0: Option<u64>,
}

impl P3Bound {
    fn new(beta: &QuadraticNumber, m_end: u64) -> Self {
        let inv = beta.try_recip().expect("beta is positive");
        let f1 = (0..m_end).map(|m| floor_u64(&inv.mul_rational(&rat_int(1 + m as i64)))).collect();
        let f2 = (0..m_end).map(|m| floor_u64(&inv.mul_rational(&rat_int(2 + m as i64)))).collect();
        let c = inv.ceil() - BigInt::from(1);
        let k0 = if c.is_positive() { c.to_u64() } else { None };
        Self { f1, f2, k0 }
    }
}

impl KBound for P3Bound {
    fn gt(&self, m: u64, l: u64) -> Option<u64> {
        self.f1[m as usize]?.checked_sub(m * l)
    }
    fn eq(&self, _m: u64) -> Option<u64> {
        self.k0
    }
    fn lt(&self, m: u64, l: u64) -> bool {
        // Only k = l - 1 survives the P2 filter.
        self.f2[m as usize].is_some_and(|f| l >= 1 && (l - 1) + (m + 1) * l <= f)
    }
}

/// Bounds from `min_{x in [x0, x1]} f(x) > beta`, the increasing case being
/// governed by `x0` and the decreasing one by `x1`.
struct RangeBound<'a> {
    inv: QuadraticNumber,
    x0: &'a Rational,
    x1: &'a Rational,
    k0: Option<u64>,
}

impl KBound for RangeBound<'_> {
    fn gt(&self, m: u64, l: u64) -> Option<u64> {
        // k < (1 + m + x0)/beta - l (m + x0)
        let mx = rat_int(m as i64) + self.x0;
        let b = self.inv.mul_rational(&(&mx + rat_int(1))).add_rational(&-(&mx * rat_int(l as i64)));
        let c = b.ceil() - BigInt::from(1);
        if c.is_negative() {
            None
        } else {
            c.to_u64()
        }
    }
    fn eq(&self, _m: u64) -> Option<u64> {
        self.k0
    }
    fn lt(&self, m: u64, l: u64) -> bool {
        if l == 0 {
            return false;
        }
        let mx = rat_int(m as i64) + self.x1;
        let b = self.inv.mul_rational(&(&mx + rat_int(1))).add_rational(&-(&mx * rat_int(l as i64)));
        b.cmp_rational(&rat_int(l as i64 - 1)).is_gt()
    }
}

fn proportional_to_member(lat: &SolutionLattice, k: u64, l: u64) -> bool {
    let g = k.gcd(&l);
    (2..=g).any(|t| g.is_multiple_of(t) && lat.contains(l / t, k / t))
}

/// Visit every triplet with `m < m_end` that solves S1 for `c`, meets the
/// bound `kb`, and whose P2 interval can meet `(m + 1, upper)`. For `l <= 1`
/// the intervals are nested in `k`, so only the least `k` is visited.
fn for_each_triplet<B: KBound>(
    ctx: &ClassContext,
    c: &MatrixClass,
    m_end: u64,
    upper: u64,
    kb: &B,
    skip_multiples: bool,
    visit: &mut dyn FnMut(Triplet),
) {
    for m in 0..m_end {
        if m + 1 >= upper {
            break;
        }
        let lat = ctx.solution_lattice(c, m);
        // k > l
        let mut l = 0u64;
        while let Some(kmax) = kb.gt(m, l) {
            if kmax <= l {
                break;
            }
            // Lower end of the interval must stay below `upper`.
            let kcap = match l {
                0 => upper - m,
                1 => 2 * (upper - m),
                _ => (upper - m) * (l + 1),
            };
            let kmax = kmax.min(kcap);
            let mut k = lat.first_k_at_least(l, l + 1).unwrap_or(u64::MAX);
            while k <= kmax {
                if !(skip_multiples && l >= 2 && proportional_to_member(&lat, k, l)) {
                    visit(Triplet { m, k, l });
                }
                if l <= 1 {
                    break;
                }
                k += lat.k_step;
            }
            l += lat.ell_step;
        }
        // k = l
        if let Some(kmax) = kb.eq(m) {
            let mut l = lat.ell_step;
            while l <= kmax {
                if lat.contains(l, l) && !(skip_multiples && l >= 2 && proportional_to_member(&lat, l, l)) {
                    visit(Triplet { m, k: l, l });
                }
                l += lat.ell_step;
            }
        }
        // k = l - 1
        let mut l = lat.ell_step;
        while kb.lt(m, l) {
            let k = l - 1;
            if lat.contains(l, k) && !(skip_multiples && l >= 2 && proportional_to_member(&lat, k, l)) {
                visit(Triplet { m, k, l });
            }
            l += lat.ell_step;
        }
    }
}

fn clip(iv: &P2Interval, upper: &Rational) -> Option<OpenInterval> {
    let hi = match &iv.hi {
        Some(h) if h < upper => h.clone(),
        _ => upper.clone(),
    };
    OpenInterval::new(iv.lo.clone(), hi)
}

/// `D(beta, A)` together with the triplets whose intervals were removed.
#[derive(Clone, Debug)]
pub struct Admissible {
    pub set: IntervalSet,
    pub upper: u64,
    pub triplets: Vec<Triplet>,
}

/// `D(beta, A) = (1, U) \ closure(F)` with `U = ceil(L(1+beta)) - 2`.
pub fn admissible_set(ctx: &ClassContext, c: &MatrixClass, beta: &QuadraticNumber) -> Admissible {
    admissible_set_with(ctx, c, beta, true)
}

pub fn admissible_set_with(
    ctx: &ClassContext,
    c: &MatrixClass,
    beta: &QuadraticNumber,
    skip_multiples: bool,
) -> Admissible {
    let upper = ambient_upper(ctx, beta);
    let ambient = IntervalSet::interval(rat_int(1), rat_int(upper as i64));
    if upper <= 1 {
        return Admissible { set: IntervalSet::empty(), upper, triplets: vec![] };
    }
    let ur = rat_int(upper as i64);
    let kb = P3Bound::new(beta, upper);
    let mut removed = Vec::new();
    let mut triplets = Vec::new();
    for_each_triplet(ctx, c, upper, upper, &kb, skip_multiples, &mut |t| {
        if let Some(iv) = clip(&p2_interval(t), &ur) {
            removed.push(iv);
            triplets.push(t);
        }
    });
    let set = ambient.subtract_closure(&IntervalSet::from_intervals(removed));
    Admissible { set, upper, triplets }
}

/// Intervals of `delta` forced out when `x_N` is known to lie in `[x0, x1]`
/// (backward reduction). Only intervals meeting `within` are returned.
pub fn forced_by_xrange(
    ctx: &ClassContext,
    c: &MatrixClass,
    beta: &QuadraticNumber,
    x0: &Rational,
    x1: &Rational,
    within: &IntervalSet,
) -> (IntervalSet, Vec<Triplet>) {
    let Some((_, hi)) = within.hull() else {
        return (IntervalSet::empty(), vec![]);
    };
    let upper = hi.ceil().to_integer().to_u64().expect("bound fits");
    let inv = beta.try_recip().expect("beta is positive");
    let c0 = inv.ceil() - BigInt::from(1);
    let k0 = if c0.is_positive() { c0.to_u64() } else { None };
    let kb = RangeBound { inv, x0, x1, k0 };
    let ur = rat_int(upper as i64);
    let mut removed = Vec::new();
    let mut triplets = Vec::new();
    for_each_triplet(ctx, c, upper, upper, &kb, true, &mut |t| {
        if let Some(iv) = clip(&p2_interval(t), &ur) {
            if within.meets_closed(&iv.lo, &iv.hi) {
                removed.push(iv);
                triplets.push(t);
            }
        }
    });
    (IntervalSet::from_intervals(removed), triplets)
}

/// `f(x) = (1 + m + x) / (k + l m + l x)`.
pub fn f_value(t: Triplet, x: &Rational) -> Rational {
    let (m, k, l) = (rat_int(t.m as i64), rat_int(t.k as i64), rat_int(t.l as i64));
    (rat_int(1) + &m + x) / (&k + &l * &m + &l * x)
}

/// Integer `floor` helper re-exported for callers that bound labels.
pub fn floor_int(x: &QuadraticNumber) -> BigInt {
    x.floor()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcls::PeriodPair;
    use crate::numeric::rat;
    use proptest::prelude::*;

    fn q(s: &str) -> QuadraticNumber {
        QuadraticNumber::parse(s).unwrap()
    }

    fn ctx(p: u64, pp: u64) -> ClassContext {
        ClassContext::new(PeriodPair::new(p, pp).unwrap())
    }

    fn d_of(c: &ClassContext, name: &str, beta: &QuadraticNumber) -> String {
        let m = MatrixClass::parse_short(name).unwrap();
        admissible_set(c, &m, beta).set.to_string()
    }

    #[test]
    fn p2_shapes() {
        let t = Triplet { m: 1, k: 4, l: 0 };
        assert_eq!(p2_interval(t), P2Interval { lo: rat_int(4), hi: None });
        let t = Triplet { m: 0, k: 2, l: 3 };
        assert_eq!(p2_interval(t), P2Interval { lo: rat_int(1), hi: Some(rat(3, 2)) });
        let t = Triplet { m: 2, k: 7, l: 1 };
        assert_eq!(p2_interval(t), P2Interval { lo: rat_int(5), hi: None });
    }

    #[test]
    fn p3_cases() {
        let b = q("1/3");
        assert!(p3_holds(Triplet { m: 0, k: 2, l: 2 }, &b));
        assert!(!p3_holds(Triplet { m: 0, k: 3, l: 3 }, &b));
        assert!(p3_holds(Triplet { m: 0, k: 3, l: 0 }, &b));
        assert!(!p3_holds(Triplet { m: 0, k: 4, l: 0 }, &b));
        assert!(p3_holds(Triplet { m: 1, k: 5, l: 6 }, &q("1/13")));
    }

    #[test]
    fn two_four_at_half() {
        let c = ctx(2, 4);
        let b = q("1/2");
        assert_eq!(d_of(&c, "(0 0;1 0)", &b), "∅");
        assert_eq!(d_of(&c, "(0 0;0 1)", &b), "(1,4)");
        assert_eq!(d_of(&c, "(0 0;1 1)", &b), "(1,4)");
    }

    #[test]
    fn one_four_at_golden() {
        let c = ctx(1, 4);
        let b = q("(sqrt(5)+1)/4");
        let want = [
            ("(0 0;1 0)", "∅"),
            ("(0 0;0 1)", "∅"),
            ("(0 0;1 1)", "(1,3)"),
            ("(0 0;2 1)", "(1,2)"),
            ("(0 0;1 2)", "(1,2)"),
            ("(0 0;1 3)", "∅"),
        ];
        for (name, d) in want {
            assert_eq!(d_of(&c, name, &b), d, "{name}");
        }
    }

    #[test]
    fn one_two_at_silver() {
        let c = ctx(1, 2);
        let b = q("1+1/sqrt(2)");
        assert_eq!(d_of(&c, "(0 0;1 0)", &b), "(1,2)");
        assert_eq!(d_of(&c, "(0 0;0 1)", &b), "∅");
        assert_eq!(d_of(&c, "(0 0;1 1)", &b), "(1,4)");
    }

    #[test]
    fn ambient_bound() {
        let c = ctx(2, 4);
        assert_eq!(ambient_upper(&c, &q("1/2")), 4);
        assert_eq!(ambient_upper(&ctx(3, 4), &q("1/3")), 14);
    }

    /// Slow route: every triplet in a generous box, filtered by the
    /// definitions of S1, P2 and P3 alone.
    fn brute_d(c: &ClassContext, cls: &MatrixClass, beta: &QuadraticNumber) -> IntervalSet {
        let upper = ambient_upper(c, beta);
        let ur = rat_int(upper as i64);
        let mut removed = Vec::new();
        let kmax = ((beta.try_recip().unwrap().to_f64() + 1.0) * (upper as f64 + 2.0)) as u64 + 2;
        for m in 0..upper {
            let lat = c.solution_lattice(cls, m);
            for l in 0..=kmax {
                for k in 0..=kmax {
                    let t = Triplet { m, k, l };
                    if k + l == 0 || !lat.contains(l, k) || !p3_holds(t, beta) {
                        continue;
                    }
                    if let Some(iv) = clip(&p2_interval(t), &ur) {
                        removed.push(iv);
                    }
                }
            }
        }
        IntervalSet::interval(rat_int(1), ur).subtract_closure(&IntervalSet::from_intervals(removed))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn fast_enumeration_matches_brute_force(
            pair in prop::sample::select(vec![(2u64, 4u64), (1, 4), (3, 4), (1, 3), (2, 3), (1, 6)]),
            bn in 1i64..6, bd in 2i64..9, pick in 0usize..100) {
            let c = ctx(pair.0, pair.1);
            let classes = c.all_reachable();
            let cls = classes[pick % classes.len()];
            let beta = QuadraticNumber::from_rational(rat(bn, bd));
            prop_assert_eq!(admissible_set(&c, &cls, &beta).set, brute_d(&c, &cls, &beta));
        }

        #[test]
        fn skipping_multiples_changes_nothing(
            pair in prop::sample::select(vec![(2u64, 4u64), (3, 4), (1, 8), (2, 6)]),
            bn in 1i64..4, bd in 3i64..12, pick in 0usize..100) {
            let c = ctx(pair.0, pair.1);
            let classes = c.all_reachable();
            let cls = classes[pick % classes.len()];
            let beta = QuadraticNumber::from_rational(rat(bn, bd));
            prop_assert_eq!(admissible_set_with(&c, &cls, &beta, true).set,
                            admissible_set_with(&c, &cls, &beta, false).set);
        }

        #[test]
        fn d_inside_ambient_and_monotone(pair in prop::sample::select(vec![(2u64, 4u64), (3, 4), (1, 4)]),
                                         bn in 1i64..4, bd in 3i64..10, pick in 0usize..100) {
            let c = ctx(pair.0, pair.1);
            let classes = c.all_reachable();
            let cls = classes[pick % classes.len()];
            let hi = QuadraticNumber::from_rational(rat(bn, bd));
            let lo = QuadraticNumber::from_rational(rat(bn, bd + 1));
            let d_hi = admissible_set(&c, &cls, &hi);
            let d_lo = admissible_set(&c, &cls, &lo);
            if let Some((a, b)) = d_hi.set.hull() {
                prop_assert!(a >= rat_int(1) && b <= rat_int(d_hi.upper as i64));
            }
            // A smaller beta forces more, so its D is contained in the larger one.
            prop_assert_eq!(d_lo.set.subtract_closure(&IntervalSet::empty()).intersect(&d_hi.set), d_lo.set);
        }
    }
}
