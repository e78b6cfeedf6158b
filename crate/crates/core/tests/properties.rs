//! Invariants checked on random inputs.

use proptest::prelude::*;

use balseq::balanced::{colour, estar_exact};
use balseq::cfrac::ContinuedFraction;
use balseq::cgap::catalogue;
use balseq::matcls::PeriodPair;
use balseq::numeric::{rat, QuadraticNumber};
use balseq::sturmian::{estar_sturmian, generate_prefix};
use balseq::tails_graph::{build_graph_any, ReduceOptions};

fn slope() -> impl Strategy<Value = ContinuedFraction> {
    (prop::collection::vec(1u64..6, 0..3), prop::collection::vec(1u64..6, 1..5))
        .prop_map(|(pre, per)| ContinuedFraction::new(pre, per).unwrap())
}

fn small_pair() -> impl Strategy<Value = PeriodPair> {
    prop::sample::select(vec![(1u64, 2u64), (2, 2), (1, 3), (2, 3), (2, 4), (1, 4), (3, 4)])
        .prop_map(|(p, pp)| PeriodPair::new(p, pp).unwrap())
}

fn graph_pair() -> impl Strategy<Value = PeriodPair> {
    prop::sample::select(vec![(2u64, 4u64), (3, 4), (2, 3), (1, 4), (4, 6), (1, 8)])
        .prop_map(|(p, pp)| PeriodPair::new(p, pp).unwrap())
}

fn quad(r: u64) -> impl Strategy<Value = QuadraticNumber> {
    (-20i64..20, 1i64..9, -20i64..20, 1i64..9)
        .prop_map(move |(a, b, c, d)| QuadraticNumber::new(rat(a, b), rat(c, d), r).unwrap())
}

fn quad_pair() -> impl Strategy<Value = (QuadraticNumber, QuadraticNumber)> {
    prop::sample::select(vec![2u64, 3, 5, 7]).prop_flat_map(|r| (quad(r), quad(r)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn order_agrees_with_floats((x, y) in quad_pair()) {
        let (fx, fy) = (x.to_f64(), y.to_f64());
        if (fx - fy).abs() > 1e-9 {
            prop_assert_eq!(x < y, fx < fy);
        }
        prop_assert_eq!(x.try_sub(&y).unwrap().try_add(&y).unwrap(), x);
    }

    #[test]
    fn tails_satisfy_recurrence(c in slope(), n in 0usize..8) {
        let a = rat(c.quotient(n + 1) as i64, 1);
        let next = c.tail_value(n + 1).try_recip().unwrap().add_rational(&a);
        prop_assert_eq!(c.tail_value(n), next);
    }

    #[test]
    fn lower_bound_holds(c in slope(), p in small_pair()) {
        let e = estar_exact(&c, p).unwrap().value;
        prop_assert!(e >= QuadraticNumber::from_rational(rat(1, 1) + rat(1, (p.p * p.pp) as i64)));
    }

    #[test]
    fn one_one_is_sturmian(c in slope()) {
        let p = PeriodPair::new(1, 1).unwrap();
        prop_assert_eq!(estar_exact(&c, p).unwrap().value, estar_sturmian(&c).unwrap());
    }

    #[test]
    fn swapping_letters_keeps_value(c in slope(), p in small_pair()) {
        let e = estar_exact(&c, p).unwrap().value;
        let swapped = estar_exact(&c.with_leading(p.p), p.swapped()).unwrap().value;
        prop_assert_eq!(e, swapped);
    }

    #[test]
    fn refining_periods_never_raises(c in slope()) {
        let coarse = estar_exact(&c, PeriodPair::new(1, 2).unwrap()).unwrap().value;
        let fine = estar_exact(&c, PeriodPair::new(2, 4).unwrap()).unwrap().value;
        prop_assert!(coarse >= fine);
    }

    #[test]
    fn colourings_are_balanced(c in slope(), da in 1usize..4, db in 1usize..4, i in 0usize..10, j in 0usize..10) {
        let ya: Vec<_> = catalogue(da).into_values().collect();
        let yb: Vec<_> = catalogue(db).into_values().collect();
        let v = colour(&generate_prefix(&c, 600), &ya[i % ya.len()], &yb[j % yb.len()]);
        let letters = (da + db) as u32;
        for x in 0..letters {
            let pre: Vec<i64> = std::iter::once(0)
                .chain(v.iter().scan(0i64, |s, &c| { *s += i64::from(c == x); Some(*s) }))
                .collect();
            for n in 1..v.len() {
                let counts = (0..=v.len() - n).map(|k| pre[k + n] - pre[k]);
                let (lo, hi) = counts.fold((i64::MAX, i64::MIN), |(lo, hi), c| (lo.min(c), hi.max(c)));
                prop_assert!(hi - lo <= 1, "letter {} length {}", x, n);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// A slope whose exponent is at most `1 + beta` keeps its path through
    /// every reduction of the graph at that `beta`.
    #[test]
    fn reductions_keep_optimal_slopes(c in slope(), p in graph_pair(), depth in 0usize..3) {
        let beta = estar_exact(&c, p).unwrap().value.add_rational(&rat(-1, 1));
        // Large beta gives a wide ambient interval and slow graphs.
        prop_assume!(beta <= QuadraticNumber::from_rational(rat(1, 2)));
        let mut g = build_graph_any(p, &beta).unwrap();
        prop_assert!(g.contains_tail(&c));
        g.reduce(ReduceOptions { max_depth: depth, ..ReduceOptions::default() });
        prop_assert!(g.contains_tail(&c), "lost {} for {:?} at depth {}", c, p, g.depth);
    }
}
