//! Constant gap sequences and the period pairs they allow.
//!
//! A periodic sequence has constant gap when every letter recurs at one
//! fixed distance. Interlacing `k >= 2` constant gap sequences over disjoint
//! alphabets, `y_{kn+j} = y^{(j)}_n`, gives another one of period
//! `k * lcm` of the parts. Starting from single letters this produces the
//! catalogue of periods per alphabet size.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use serde::Serialize;

use crate::matcls::PeriodPair;
use crate::numeric::{QuadraticNumber, Rational};

/// One period of a constant gap sequence over letters `0..size`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstantGapSequence {
    word: Vec<u32>,
}

impl ConstantGapSequence {
    /// Wrap one period; fails unless the periodic extension has constant gaps.
    pub fn new(word: Vec<u32>) -> Option<Self> {
        (!word.is_empty() && is_constant_gap(&word)).then_some(Self { word })
    }

    pub fn single() -> Self {
        Self { word: vec![0] }
    }

    pub fn word(&self) -> &[u32] {
        &self.word
    }

    pub fn period(&self) -> usize {
        self.word.len()
    }

    pub fn alphabet_size(&self) -> usize {
        self.word.iter().collect::<BTreeSet<_>>().len()
    }

    pub fn at(&self, n: usize) -> u32 {
        self.word[n % self.word.len()]
    }

    /// Shift letters by `offset`, for use as the second colour.
    pub fn offset(&self, offset: u32) -> Self {
        Self { word: self.word.iter().map(|x| x + offset).collect() }
    }

    /// Binary ruler sequence over `d` letters, period `2^(d-1)`.
    pub fn ruler(d: u32) -> Self {
        assert!(d >= 1);
        let p = 1usize << (d - 1);
        let word = (1..=p)
            .map(|n| n.trailing_zeros().min(d - 1))
            .collect();
        Self { word }
    }
}

/// Whether the periodic sequence `word^omega` has constant gaps.
pub fn is_constant_gap(word: &[u32]) -> bool {
    failing_letter(word).is_none()
}

/// Smallest letter of `word^omega` whose occurrences are not evenly spaced.
pub fn failing_letter(word: &[u32]) -> Option<u32> {
    let n = word.len();
    let letters: BTreeSet<u32> = word.iter().copied().collect();
    letters.into_iter().find(|&x| {
        let pos: Vec<usize> = (0..n).filter(|&i| word[i] == x).collect();
        let g = n / pos.len();
        !n.is_multiple_of(pos.len()) || pos.iter().any(|&i| word[(i + g) % n] != x)
    })
}

/// `y_{kn+j} = y^{(j)}_n`, with the alphabets made disjoint.
pub fn interlace(parts: &[ConstantGapSequence]) -> ConstantGapSequence {
    assert!(parts.len() >= 2, "interlacing needs at least two sequences");
    let k = parts.len();
    let l = parts.iter().fold(1usize, |acc, s| acc.lcm(&s.period()));
    let mut offsets = Vec::with_capacity(k);
    let mut acc = 0u32;
    for s in parts {
        offsets.push(acc);
        acc += s.word.iter().max().map_or(0, |m| m + 1);
    }
    let word = (0..k * l).map(|i| parts[i % k].at(i / k) + offsets[i % k]).collect();
    ConstantGapSequence { word }
}

fn partitions(n: usize, max: usize, out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>) {
    if n == 0 {
        out.push(cur.clone());
        return;
    }
    for part in (1..=n.min(max)).rev() {
        cur.push(part);
        partitions(n - part, part, out, cur);
        cur.pop();
    }
}

/// Periods of constant gap sequences over exactly `d` letters, each with a
/// witness built by interlacing.
pub fn catalogue(d: usize) -> BTreeMap<u64, ConstantGapSequence> {
    let mut memo: Vec<BTreeMap<u64, ConstantGapSequence>> = vec![BTreeMap::new()];
    memo.push(BTreeMap::from([(1, ConstantGapSequence::single())]));
    for n in 2..=d {
        let mut parts_list = Vec::new();
        partitions(n, n - 1, &mut parts_list, &mut Vec::new());
        let mut found: BTreeMap<u64, ConstantGapSequence> = BTreeMap::new();
        for parts in parts_list {
            // Every combination of one catalogued witness per part.
            let mut combos: Vec<Vec<ConstantGapSequence>> = vec![vec![]];
            for &size in &parts {
                combos = combos
                    .into_iter()
                    .flat_map(|c| {
                        memo[size].values().map(move |w| {
                            let mut c2 = c.clone();
                            c2.push(w.clone());
                            c2
                        })
                    })
                    .collect();
            }
            for c in combos {
                let k = c.len() as u64;
                let l = c.iter().fold(1u64, |acc, s| acc.lcm(&(s.period() as u64)));
                found.entry(k * l).or_insert_with(|| interlace(&c));
            }
        }
        memo.push(found);
    }
    memo.swap_remove(d)
}

pub fn achievable_periods(d: usize) -> BTreeSet<u64> {
    catalogue(d).into_keys().collect()
}

/// A period pair together with the split `d = d_a + d_b` that realises it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct PairCandidate {
    pub pair: PeriodPair,
    pub d_a: usize,
    pub d_b: usize,
}

fn divides_pair(a: &PeriodPair, b: &PeriodPair) -> bool {
    (b.p.is_multiple_of(a.p) && b.pp.is_multiple_of(a.pp)) || (b.pp.is_multiple_of(a.p) && b.p.is_multiple_of(a.pp))
}

/// Period pairs worth searching for alphabet size `d`, with `P <= P'`.
/// A pair dividing another listed pair is dropped, as is any pair whose
/// lower bound `1 + 1/(P P')` exceeds `1 + beta_cap`.
pub fn enumerate_pairs(d: usize, beta_cap: Option<&QuadraticNumber>) -> Vec<PairCandidate> {
    let mut all: BTreeMap<PeriodPair, PairCandidate> = BTreeMap::new();
    for d_a in 1..d {
        let d_b = d - d_a;
        for &p in catalogue(d_a).keys() {
            for &pp in catalogue(d_b).keys() {
                let (lo, hi, da, db) = if p <= pp { (p, pp, d_a, d_b) } else { (pp, p, d_b, d_a) };
                let pair = PeriodPair { p: lo, pp: hi };
                all.entry(pair).or_insert(PairCandidate { pair, d_a: da, d_b: db });
            }
        }
    }
    let pairs: Vec<PeriodPair> = all.keys().copied().collect();
    all.into_values()
        .filter(|c| !pairs.iter().any(|o| o != &c.pair && divides_pair(&c.pair, o)))
        .filter(|c| match beta_cap {
            None => true,
            Some(b) => {
                let lb = QuadraticNumber::from_rational(Rational::new(1.into(), (c.pair.p * c.pair.pp).into()));
                lb <= *b
            }
        })
        .collect()
}
