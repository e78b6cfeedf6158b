//! Search for the asymptotic repetitive threshold over `d` letters.
//!
//! Every period pair allowed by the constant gap catalogue gets a graph of
//! admissible tails at the current `beta`. Surviving closed walks become
//! slopes, each evaluated exactly. When the best value beats `1 + beta`,
//! `beta` drops to `best - 1` and all pairs are redone, until a round brings
//! no strict improvement.

use rayon::prelude::*;
use serde::Serialize;

use crate::balanced::estar_bounded;
use crate::cfrac::ContinuedFraction;
use crate::cgap::enumerate_pairs;
use crate::matcls::PeriodPair;
use crate::numeric::{rat, QuadraticNumber};
use crate::tails_graph::{build_graph_any, ReduceOptions};

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Starting `beta`; `None` uses [`default_beta`].
    pub beta: Option<QuadraticNumber>,
    pub walk_cap: usize,
    /// Candidate limit per pair and round.
    pub max_candidates: usize,
    /// History depth allowed when refining a graph.
    pub max_depth: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { beta: None, walk_cap: 12, max_candidates: 20_000, max_depth: 3 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PairStatus {
    PrunedByBound,
    NoComponent,
    Evaluated {
        candidates: usize,
        /// Components are all simple cycles within the walk cap.
        complete: bool,
        best: Option<String>,
    },
}

impl std::fmt::Display for PairStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::PrunedByBound => f.write_str("pruned by 1 + 1/(P P')"),
            Self::NoComponent => f.write_str("no component"),
            Self::Evaluated { candidates, complete, best } => {
                write!(f, "{candidates} candidates")?;
                if let Some(b) = best {
                    write!(f, ", best {b}")?;
                }
                if !complete {
                    f.write_str(", incomplete")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairLog {
    pub pair: PeriodPair,
    pub d_a: usize,
    pub d_b: usize,
    pub beta: String,
    #[serde(flatten)]
    pub status: PairStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub d: usize,
    #[serde(serialize_with = "ser_opt_display")]
    pub best: Option<QuadraticNumber>,
    pub best_decimal: Option<String>,
    pub pair: Option<PeriodPair>,
    #[serde(serialize_with = "ser_opt_display")]
    pub theta: Option<ContinuedFraction>,
    /// `beta` used in each round.
    pub betas: Vec<String>,
    /// Pair logs of the final round.
    pub log: Vec<PairLog>,
    pub walk_cap: usize,
    /// False when some surviving component could hold tails the walk cap
    /// did not reach.
    pub complete: bool,
}

fn ser_opt_display<T: std::fmt::Display, S: serde::Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_str(&x.to_string()),
        None => s.serialize_none(),
    }
}

/// `RTB(d) - 1`, the known minimal critical exponent threshold, which bounds
/// the asymptotic one from above. For `d >= 11` the value `1/(d-2)` is used.
pub fn default_beta(d: usize) -> QuadraticNumber {
    let q = |s: &str| QuadraticNumber::parse(s).expect("built-in constant");
    match d {
        0 | 1 => panic!("alphabet size must be at least 2"),
        2 => q("(3+sqrt(5))/2"),
        3 => q("1+sqrt(2)/2"),
        4 => q("(sqrt(5)+1)/4"),
        5..=10 => QuadraticNumber::from_rational(rat(1, d as i64 - 3)),
        _ => QuadraticNumber::from_rational(rat(1, d as i64 - 2)),
    }
}

const INITIAL_WALK_CAP: usize = 2;

struct PairOutcome {
    log: PairLog,
    best: Option<(QuadraticNumber, ContinuedFraction)>,
}

fn run_pair(
    pair: PeriodPair,
    d_a: usize,
    d_b: usize,
    beta: &QuadraticNumber,
    walk_cap: usize,
    max_depth: usize,
    opts: &SearchOptions,
) -> PairOutcome {
    let log = |status| PairLog { pair, d_a, d_b, beta: beta.to_string(), status };
    let lower = QuadraticNumber::from_rational(rat(1, (pair.p * pair.pp) as i64));
    if lower > *beta {
        return PairOutcome { log: log(PairStatus::PrunedByBound), best: None };
    }
    let mut g = build_graph_any(pair, beta).expect("beta is positive");
    g.reduce(ReduceOptions { max_depth, ..ReduceOptions::default() });
    if g.components().is_empty() {
        return PairOutcome { log: log(PairStatus::NoComponent), best: None };
    }
    let (cands, complete) = g.extract_candidates(walk_cap, opts.max_candidates);
    // In list order, each candidate only has to beat the best so far; the
    // first minimum wins.
    let mut limit = beta.add_rational(&rat(1, 1));
    let mut best: Option<(QuadraticNumber, ContinuedFraction)> = None;
    for cf in &cands {
        let report = estar_bounded(cf, pair, Some(&limit)).expect("graph slopes have solutions");
        if let Some(r) = report {
            if best.as_ref().is_none_or(|(b, _)| r.value < *b) {
                limit = r.value.clone();
                best = Some((r.value, cf.clone()));
            }
        }
    }
    let status = PairStatus::Evaluated {
        candidates: cands.len(),
        complete,
        best: best.as_ref().map(|(v, _)| v.to_string()),
    };
    PairOutcome { log: log(status), best }
}

/// Run the search for alphabet size `d`.
pub fn rtb_star(d: usize, opts: &SearchOptions) -> SearchResult {
    assert!(d >= 2, "alphabet size must be at least 2");
    let mut beta = opts.beta.clone().unwrap_or_else(|| default_beta(d));
    let pairs = if d == 2 {
        // Both sides are a single letter.
        vec![(PeriodPair { p: 1, pp: 1 }, 1, 1)]
    } else {
        enumerate_pairs(d, None).into_iter().map(|c| (c.pair, c.d_a, c.d_b)).collect()
    };
    let mut best: Option<(QuadraticNumber, PeriodPair, ContinuedFraction)> = None;
    let mut betas = Vec::new();
    // Short walks first: they find good slopes cheaply and lower beta. Only
    // a round at the full cap may end the search.
    let mut walk_cap = opts.walk_cap.min(INITIAL_WALK_CAP);
    loop {
        log::info!("d={d}: round with beta = {beta}, walk cap {walk_cap}");
        betas.push(beta.to_string());
        // Refinement only sharpens the final answer; skip it while beta is
        // still above the best value found.
        let max_depth = if best.is_some() { opts.max_depth } else { 0 };
        let outcomes: Vec<PairOutcome> = pairs
            .par_iter()
            .map(|&(pair, d_a, d_b)| run_pair(pair, d_a, d_b, &beta, walk_cap, max_depth, opts))
            .collect();
        let mut round_best: Option<(QuadraticNumber, PeriodPair, ContinuedFraction)> = None;
        for o in &outcomes {
            if let Some((v, cf)) = &o.best {
                if round_best.as_ref().is_none_or(|(b, _, _)| v < b) {
                    round_best = Some((v.clone(), o.log.pair, cf.clone()));
                }
            }
        }
        let log: Vec<PairLog> = outcomes.into_iter().map(|o| o.log).collect();
        let improved = match (&round_best, &best) {
            (Some((v, _, _)), Some((b, _, _))) => v < b,
            (Some(_), None) => true,
            _ => false,
        };
        if improved {
            best = round_best;
            let v = &best.as_ref().expect("just set").0;
            let next = v.add_rational(&rat(-1, 1));
            if next != beta {
                beta = next;
                continue;
            }
        }
        if walk_cap < opts.walk_cap {
            walk_cap = (walk_cap * 2).min(opts.walk_cap);
            continue;
        }
        let complete = best.is_some()
            && log.iter().all(|l| !matches!(l.status, PairStatus::Evaluated { complete: false, .. }));
        return SearchResult {
            d,
            best_decimal: best.as_ref().map(|(v, _, _)| v.decimal(10)),
            best: best.as_ref().map(|(v, _, _)| v.clone()),
            pair: best.as_ref().map(|(_, p, _)| *p),
            theta: best.map(|(_, _, cf)| cf),
            betas,
            log,
            walk_cap: opts.walk_cap,
            complete,
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_alphabets() {
        let q = |s: &str| QuadraticNumber::parse(s).unwrap();
        let r = rtb_star(3, &SearchOptions::default());
        assert_eq!(r.best, Some(q("2+sqrt(2)/2")));
        assert_eq!(r.pair, Some(PeriodPair { p: 1, pp: 2 }));
        assert!(r.complete);
    }
}
