//! Classes of convergent matrices modulo a period pair.
//!
//! For periods `(P, P')` with `H = gcd(P, P')`, `Y = P/H`, `Y' = P'/H`, a
//! unimodular `A` is named by its first row mod `Y` and second row mod `Y'`.
//! Two names are equivalent when they differ by a unit factor on each row.
//! A class determines which `(l, k)` solve `A (1 0; m 1) (l, k)^T = 0`
//! mod `(P, P')`, and it evolves with the partial quotients.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatclsError {
    #[error("periods must be positive")]
    ZeroPeriod,
    #[error("lcm(P, P') must exceed 1")]
    TrivialPair,
    #[error("matrix is not unimodular")]
    NotUnimodular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PeriodPair {
    pub p: u64,
    pub pp: u64,
}

impl PeriodPair {
    pub fn new(p: u64, pp: u64) -> Result<Self, MatclsError> {
        if p == 0 || pp == 0 {
            return Err(MatclsError::ZeroPeriod);
        }
        Ok(Self { p, pp })
    }

    pub fn h(&self) -> u64 {
        self.p.gcd(&self.pp)
    }
    pub fn y(&self) -> u64 {
        self.p / self.h()
    }
    pub fn yp(&self) -> u64 {
        self.pp / self.h()
    }
    pub fn l(&self) -> u64 {
        self.p.lcm(&self.pp)
    }

    pub fn swapped(&self) -> Self {
        Self { p: self.pp, pp: self.p }
    }
}

impl fmt::Display for PeriodPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.pp)
    }
}

impl std::str::FromStr for PeriodPair {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let mut it = t.split(',').map(|x| x.trim().parse::<u64>());
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(a)), Some(Ok(b)), None) => Self::new(a, b).map_err(|e| e.to_string()),
            _ => Err(format!("expected P,P' but got `{s}`")),
        }
    }
}

/// Canonical name of an equivalence class: each row is the lexicographically
/// least among its unit multiples. A row taken mod 1 is `(0, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MatrixClass {
    pub row1: [u64; 2],
    pub row2: [u64; 2],
}

impl MatrixClass {
    /// Paper-style short form `(r11 r12;r21 r22)`.
    pub fn short(&self) -> String {
        format!("({} {};{} {})", self.row1[0], self.row1[1], self.row2[0], self.row2[1])
    }

    /// Full form `((r11,r12) mod Y ; (r21,r22) mod Y')`.
    pub fn long(&self, pp: &PeriodPair) -> String {
        format!(
            "(({},{}) mod {} ; ({},{}) mod {})",
            self.row1[0],
            self.row1[1],
            pp.y(),
            self.row2[0],
            self.row2[1],
            pp.yp()
        )
    }

    /// Parse the short form `(a b;c d)`.
    pub fn parse_short(s: &str) -> Option<Self> {
        let t = s.trim().strip_prefix('(')?.strip_suffix(')')?;
        let (r1, r2) = t.split_once(';')?;
        let row = |r: &str| -> Option<[u64; 2]> {
            let v: Vec<u64> = r.split_whitespace().map(|x| x.parse().ok()).collect::<Option<_>>()?;
            (v.len() == 2).then(|| [v[0], v[1]])
        };
        Some(Self { row1: row(r1)?, row2: row(r2)? })
    }
}

impl fmt::Display for MatrixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.short())
    }
}

/// Modular context for a period pair: unit groups and canonicalisation.
#[derive(Clone, Debug)]
pub struct ClassContext {
    pub pair: PeriodPair,
    units_y: Vec<u64>,
    units_yp: Vec<u64>,
}

fn units(m: u64) -> Vec<u64> {
    if m == 1 {
        return vec![0];
    }
    (1..m).filter(|c| c.gcd(&m) == 1).collect()
}

fn canon_row(row: [u64; 2], m: u64, us: &[u64]) -> [u64; 2] {
    if m == 1 {
        return [0, 0];
    }
    let m128 = m as u128;
    us.iter()
        .map(|&c| {
            let c = c as u128;
            [((c * row[0] as u128) % m128) as u64, ((c * row[1] as u128) % m128) as u64]
        })
        .min()
        .expect("unit group is non-empty")
}

fn rem(x: &BigInt, m: u64) -> u64 {
    x.mod_floor(&BigInt::from(m)).to_u64().expect("residue fits")
}

impl ClassContext {
    pub fn new(pair: PeriodPair) -> Self {
        Self { pair, units_y: units(pair.y()), units_yp: units(pair.yp()) }
    }

    pub fn canonical(&self, row1: [u64; 2], row2: [u64; 2]) -> MatrixClass {
        let (y, yp) = (self.pair.y(), self.pair.yp());
        MatrixClass {
            row1: canon_row([row1[0] % y, row1[1] % y], y, &self.units_y),
            row2: canon_row([row2[0] % yp, row2[1] % yp], yp, &self.units_yp),
        }
    }

    /// Class of an integer unimodular matrix.
    pub fn class_of(&self, a: &[[BigInt; 2]; 2]) -> Result<MatrixClass, MatclsError> {
        let det = &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0];
        if det != BigInt::from(1) && det != BigInt::from(-1) {
            return Err(MatclsError::NotUnimodular);
        }
        let (y, yp) = (self.pair.y(), self.pair.yp());
        Ok(self.canonical([rem(&a[0][0], y), rem(&a[0][1], y)], [rem(&a[1][0], yp), rem(&a[1][1], yp)]))
    }

    pub fn class_of_i64(&self, a: [[i64; 2]; 2]) -> Result<MatrixClass, MatclsError> {
        let b = a.map(|r| r.map(BigInt::from));
        self.class_of(&b)
    }

    pub fn identity(&self) -> MatrixClass {
        self.canonical([1, 0], [0, 1])
    }

    /// `[A] -> [A (0 1; 1 a)]`.
    pub fn step(&self, c: &MatrixClass, a: u64) -> MatrixClass {
        let (y, yp) = (self.pair.y() as u128, self.pair.yp() as u128);
        let a = a as u128;
        let mv = |r: [u64; 2], m: u128| -> [u64; 2] {
            [r[1], ((r[0] as u128 + a * r[1] as u128) % m) as u64]
        };
        self.canonical(mv(c.row1, y), mv(c.row2, yp))
    }

    /// Solutions `(l, k)` of `A (1 0; m 1) (l, k)^T = 0 mod (P, P')`.
    pub fn solution_lattice(&self, c: &MatrixClass, m: u64) -> SolutionLattice {
        let pr = self.pair;
        let (y, yp, h) = (pr.y(), pr.yp(), pr.h());
        // Rows of the name times (1 0; m 1).
        let r1 = [(c.row1[0] as u128 + m as u128 * c.row1[1] as u128) % y as u128, c.row1[1] as u128];
        let r2 = [(c.row2[0] as u128 + m as u128 * c.row2[1] as u128) % yp as u128, c.row2[1] as u128];
        let ok = |lam: u128, kap: u128| {
            (r1[0] * lam + r1[1] * kap).is_multiple_of(y as u128) && (r2[0] * lam + r2[1] * kap).is_multiple_of(yp as u128)
        };
        let n1 = y / (r1[1] as u64).gcd(&y);
        let n2 = yp / (r2[1] as u64).gcd(&yp);
        let n = n1.lcm(&n2);
        let g = y * yp / n;
        let t = (0..n as u128)
            .find(|&k| ok(g as u128, k))
            .expect("lattice has index Y*Y'") as u64;
        debug_assert!(ok(0, n as u128));
        SolutionLattice { ell_step: h * g, k_step: h * n, k_shift: h * t }
    }

    /// Classes reachable from the identity using partial quotients `1..=a_max`.
    pub fn reachable(&self, a_max: u64) -> Vec<MatrixClass> {
        let start = self.identity();
        let mut seen: HashMap<MatrixClass, ()> = HashMap::new();
        let mut order = vec![start];
        seen.insert(start, ());
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            for a in 1..=a_max {
                let nc = self.step(&c, a);
                if seen.insert(nc, ()).is_none() {
                    order.push(nc);
                    queue.push_back(nc);
                }
            }
        }
        order
    }

    /// Every class that some convergent matrix can reach. Transitions only
    /// depend on `a mod Y*Y'`, so labels up to `Y*Y'` suffice.
    pub fn all_reachable(&self) -> Vec<MatrixClass> {
        self.reachable((self.pair.y() * self.pair.yp()).max(1))
    }
}

/// The lattice `{(l, k)}` as: `l = ell_step * i` and
/// `k = k_shift * i + k_step * j` for integers `i, j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolutionLattice {
    pub ell_step: u64,
    pub k_step: u64,
    pub k_shift: u64,
}

impl SolutionLattice {
    /// Residue of `k` mod `k_step` forced by `l`, if `l` is admissible.
    pub fn k_residue(&self, ell: u64) -> Option<u64> {
        if !ell.is_multiple_of(self.ell_step) {
            return None;
        }
        let i = (ell / self.ell_step) as u128;
        Some(((self.k_shift as u128 * i) % self.k_step as u128) as u64)
    }

    pub fn contains(&self, ell: u64, k: u64) -> bool {
        self.k_residue(ell).is_some_and(|r| k % self.k_step == r)
    }

    /// Least `k >= lo` with `(ell, k)` in the lattice.
    pub fn first_k_at_least(&self, ell: u64, lo: u64) -> Option<u64> {
        let r = self.k_residue(ell)?;
        let s = self.k_step;
        let base = lo - lo % s + r;
        Some(if base >= lo { base } else { base + s })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn ctx(p: u64, pp: u64) -> ClassContext {
        ClassContext::new(PeriodPair::new(p, pp).unwrap())
    }

    #[test]
    fn class_counts() {
        assert_eq!(ctx(2, 4).all_reachable().len(), 3);
        assert_eq!(ctx(1, 4).all_reachable().len(), 6);
        assert_eq!(ctx(1, 2).all_reachable().len(), 3);
        assert_eq!(ctx(3, 4).all_reachable().len(), 24);
        assert_eq!(ctx(1, 3).all_reachable().len(), 4);
        for d in 3..=9u32 {
            let c = ctx(1, 1 << (d - 2));
            assert_eq!(c.all_reachable().len(), 3 << (d - 3), "d = {d}");
        }
    }

    #[test]
    fn names_for_one_four() {
        let got: HashSet<String> = ctx(1, 4).all_reachable().iter().map(|c| c.short()).collect();
        let want: HashSet<String> = ["(0 0;1 0)", "(0 0;0 1)", "(0 0;1 1)", "(0 0;2 1)", "(0 0;1 2)", "(0 0;1 3)"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn long_and_short_forms() {
        let c = ctx(3, 4);
        let m = c.class_of_i64([[1, 2], [1, 3]]).unwrap();
        assert_eq!(m.short(), "(1 2;1 3)");
        assert_eq!(m.long(&c.pair), "((1,2) mod 3 ; (1,3) mod 4)");
        assert_eq!(MatrixClass::parse_short("(1 2;1 3)"), Some(m));
        assert!(c.class_of_i64([[2, 0], [0, 1]]).is_err());
    }

    #[test]
    fn lattice_example() {
        // (1,4), class (0 0;1 1): the identity class shifted once by 1.
        let c = ctx(2, 4);
        let m = c.class_of_i64([[0, 1], [1, 1]]).unwrap();
        let lat = c.solution_lattice(&m, 0);
        // (l, k) = (2, 2) must solve: A (2,2)^T = (2, 4).
        assert!(lat.contains(2, 2));
        assert!(!lat.contains(1, 0));
    }

    fn orbit(row: [u64; 2], m: u64) -> Vec<[u64; 2]> {
        let mut v: Vec<[u64; 2]> = (0..m.max(1))
            .filter(|&c| m == 1 || c.gcd(&m) == 1)
            .map(|c| [(c * row[0]) % m, (c * row[1]) % m])
            .collect();
        v.sort();
        v
    }

    fn random_product(qs: &[u64]) -> [[i64; 2]; 2] {
        let mut a = [[1i64, 0], [0, 1]];
        for &q in qs {
            let q = q as i64;
            a = [[a[0][1], a[0][0] + q * a[0][1]], [a[1][1], a[1][0] + q * a[1][1]]];
        }
        a
    }

    proptest! {
        #[test]
        fn step_commutes_with_class(qs in prop::collection::vec(1u64..7, 0..12),
                                    pair in prop::sample::select(vec![(2u64,4u64),(3,4),(1,16),(6,4),(8,16)])) {
            let c = ctx(pair.0, pair.1);
            let a = random_product(&qs);
            let direct = c.class_of_i64(a).unwrap();
            let mut walked = c.identity();
            for &q in &qs {
                walked = c.step(&walked, q);
            }
            prop_assert_eq!(direct, walked);
        }

        #[test]
        fn equivalent_names_share_orbits(qs in prop::collection::vec(1u64..7, 0..12),
                                         pair in prop::sample::select(vec![(3u64,4u64),(1,16),(9,8)])) {
            let c = ctx(pair.0, pair.1);
            let a = random_product(&qs);
            let (y, yp) = (c.pair.y(), c.pair.yp());
            let raw1 = [a[0][0].rem_euclid(y as i64) as u64, a[0][1].rem_euclid(y as i64) as u64];
            let raw2 = [a[1][0].rem_euclid(yp as i64) as u64, a[1][1].rem_euclid(yp as i64) as u64];
            let cl = c.class_of_i64(a).unwrap();
            prop_assert_eq!(orbit(raw1, y), orbit(cl.row1, y));
            prop_assert_eq!(orbit(raw2, yp), orbit(cl.row2, yp));
        }

        #[test]
        fn lattice_matches_brute_force(qs in prop::collection::vec(1u64..7, 0..10), m in 0u64..5,
                                       pair in prop::sample::select(vec![(2u64,4u64),(3,4),(1,8),(6,4),(4,6),(2,2)])) {
            let c = ctx(pair.0, pair.1);
            let a = random_product(&qs);
            let lat = c.solution_lattice(&c.class_of_i64(a).unwrap(), m);
            let (p, pp) = (pair.0 as i64, pair.1 as i64);
            let m = m as i64;
            let b = [[a[0][0] + m * a[0][1], a[0][1]], [a[1][0] + m * a[1][1], a[1][1]]];
            for ell in 0..30i64 {
                for k in 0..30i64 {
                    let top = (b[0][0] * ell + b[0][1] * k).rem_euclid(p) == 0;
                    let bot = (b[1][0] * ell + b[1][1] * k).rem_euclid(pp) == 0;
                    prop_assert_eq!(lat.contains(ell as u64, k as u64), top && bot, "l={} k={}", ell, k);
                }
            }
        }
    }
}
