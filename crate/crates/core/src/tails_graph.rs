//! The labelled graph of admissible tails and its reductions.
//!
//! Vertices are matrix classes. An edge `[A] --a--> [A (0 1; 1 a)]` exists
//! when some `delta` in `D(beta, A)` has integer part `a`. An infinite path
//! read from some index on spells the tail of every slope whose colouring
//! has `E* <= 1 + beta`; only strongly connected components matter.
//!
//! Two reductions shrink the graph. Forward: a vertex's `delta` must be
//! `a + 1/delta'` with `delta'` from the target, so edges whose window
//! misses `D` go. Backward: `x_N` is `1/(a + x_{N-1})` along in-edges, and a
//! triplet whose `f` exceeds `beta` on the whole range of `x` forces more of
//! `D` out. Ranges are closed rational intervals, rounded outward when
//! their denominators outgrow 64 bits.
//!
//! When the reductions stall, the graph can be refined: a vertex of depth
//! `h` is a class together with the last `h` labels read. Every path of the
//! coarse graph lifts, so reductions on the refined graph stay sound while
//! each vertex sees a narrower range of `x`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cfrac::ContinuedFraction;
use crate::forcing::{admissible_set, ambient_upper, forced_by_xrange, Triplet};
use crate::matcls::{ClassContext, MatrixClass, PeriodPair};
use crate::numeric::{outward, rat_int, IntervalSet, QuadraticNumber, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("lcm(P, P') must exceed 1 for the graph method")]
    TrivialPair,
    #[error("beta must be positive")]
    NonPositiveBeta,
}

/// Bits kept in range endpoints before outward rounding.
const RANGE_BITS: u32 = 64;
/// Range moves below `2^-SETTLE_BITS` end the propagation passes.
const SETTLE_BITS: usize = 32;

pub type Edge = (usize, u64, usize);

type Range = Option<(Rational, Rational)>;

#[derive(Clone, Debug)]
pub struct TailGraph {
    pub ctx: ClassContext,
    pub beta: QuadraticNumber,
    /// Every class reachable from the identity.
    pub classes: Vec<MatrixClass>,
    pub class_index: HashMap<MatrixClass, usize>,
    /// Labels of history kept per vertex.
    pub depth: usize,
    /// Class of each vertex.
    pub vertices: Vec<MatrixClass>,
    /// Last `depth` labels read before each vertex.
    pub history: Vec<Vec<u64>>,
    /// Current admissible set per vertex.
    pub d: Vec<IntervalSet>,
    pub edges: BTreeSet<Edge>,
    pub upper: u64,
    /// Backward-reduction removals: vertex, x-range and triplets used.
    pub backward_log: Vec<BackwardStep>,
    /// Edges deleted by forward reduction, in order.
    pub forward_log: Vec<Edge>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BackwardStep {
    pub vertex: String,
    pub x_lo: String,
    pub x_hi: String,
    pub triplets: Vec<Triplet>,
    pub new_d: String,
}

/// Options for [`TailGraph::reduce`].
#[derive(Clone, Copy, Debug)]
pub struct ReduceOptions {
    pub forward: bool,
    pub backward: bool,
    /// Passes per range fixpoint.
    pub max_passes: usize,
    /// Refine up to this history depth while some component is not a
    /// simple cycle.
    pub max_depth: usize,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        Self { forward: true, backward: true, max_passes: 64, max_depth: 0 }
    }
}

/// `Gamma_beta` for a period pair with `lcm(P, P') > 1`.
pub fn build_graph(pair: PeriodPair, beta: &QuadraticNumber) -> Result<TailGraph, GraphError> {
    if pair.l() <= 1 {
        return Err(GraphError::TrivialPair);
    }
    build_graph_any(pair, beta)
}

/// As [`build_graph`], also for `P = P' = 1`, where the single class makes
/// every `(l, k)` a solution.
pub fn build_graph_any(pair: PeriodPair, beta: &QuadraticNumber) -> Result<TailGraph, GraphError> {
    if beta.signum().is_le() {
        return Err(GraphError::NonPositiveBeta);
    }
    let ctx = ClassContext::new(pair);
    let upper = ambient_upper(&ctx, beta);
    let a_max = upper.saturating_sub(1);
    let classes = ctx.all_reachable();
    let class_index: HashMap<MatrixClass, usize> = classes.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let d: Vec<IntervalSet> = classes.iter().map(|c| admissible_set(&ctx, c, beta).set).collect();
    let mut edges = BTreeSet::new();
    for (v, c) in classes.iter().enumerate() {
        for a in 1..=a_max {
            if d[v].meets_open(&rat_int(a as i64), &rat_int(a as i64 + 1)) {
                edges.insert((v, a, class_index[&ctx.step(c, a)]));
            }
        }
    }
    Ok(TailGraph {
        ctx,
        beta: beta.clone(),
        history: vec![vec![]; classes.len()],
        vertices: classes.clone(),
        classes,
        class_index,
        depth: 0,
        d,
        edges,
        upper,
        backward_log: vec![],
        forward_log: vec![],
    })
}

/// Strongly connected components that carry a cycle, by Tarjan's algorithm.
pub fn scc(n: usize, edges: &BTreeSet<Edge>) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    let mut self_loop = vec![false; n];
    for &(u, _, v) in edges {
        adj[u].push(v);
        if u == v {
            self_loop[u] = true;
        }
    }
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next = 0usize;
    let mut out = Vec::new();
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        // Iterative DFS: (vertex, next child position).
        let mut call = vec![(root, 0usize)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("stack holds the component");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    if comp.len() > 1 || self_loop[v] {
                        comp.sort_unstable();
                        out.push(comp);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

fn hull(parts: impl IntoIterator<Item = (Rational, Rational)>) -> Range {
    parts.into_iter().fold(None, |acc, (lo, hi)| match acc {
        None => Some((lo, hi)),
        Some((a, b)) => Some((a.min(lo), b.max(hi))),
    })
}

fn round_range(r: (Rational, Rational)) -> (Rational, Rational) {
    (outward(&r.0, RANGE_BITS, false), outward(&r.1, RANGE_BITS, true))
}

/// Whether `new` differs from `old` by more than [`SETTLE`] at either end.
/// Smaller moves are kept but do not schedule another pass.
fn moved(old: &Range, new: &Range) -> bool {
    match (old, new) {
        (Some((a0, a1)), Some((b0, b1))) => {
            let eps = Rational::new(1.into(), BigInt::one() << SETTLE_BITS);
            (a0 - b0).abs() > eps || (a1 - b1).abs() > eps
        }
        (None, None) => false,
        _ => true,
    }
}

fn meet(a: &Range, b: &Range) -> Range {
    match (a, b) {
        (Some((a0, a1)), Some((b0, b1))) => {
            let lo = a0.max(b0).clone();
            let hi = a1.min(b1).clone();
            (lo <= hi).then_some((lo, hi))
        }
        _ => None,
    }
}

/// Closure of `D ∩ [lo, hi]` as a hull, if `D` meets `[lo, hi]`.
fn clipped_hull(d: &IntervalSet, lo: &Rational, hi: &Rational) -> Range {
    hull(d.parts().iter().filter_map(|p| {
        let a = (&p.lo).max(lo).clone();
        let b = (&p.hi).min(hi).clone();
        // Open part meets the closed window.
        (lo <= hi && &p.lo < hi && lo < &p.hi).then_some((a, b))
    }))
}

impl TailGraph {
    pub fn pair(&self) -> PeriodPair {
        self.ctx.pair
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        scc(self.vertices.len(), &self.edges)
    }

    /// Drop edges that lie on no cycle.
    pub fn prune_to_components(&mut self) -> bool {
        let comps = self.components();
        let mut comp_of = vec![usize::MAX; self.vertices.len()];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                comp_of[v] = i;
            }
        }
        let before = self.edges.len();
        self.edges.retain(|&(u, _, v)| comp_of[u] != usize::MAX && comp_of[u] == comp_of[v]);
        self.edges.len() != before
    }

    fn window(a: u64, r: &(Rational, Rational)) -> (Rational, Rational) {
        let a = rat_int(a as i64);
        (&a + r.1.recip(), &a + r.0.recip())
    }

    /// Forward reduction to a fixpoint (or `max_passes`). Returns whether an
    /// edge was deleted.
    ///
    /// The relation `delta_N = a + 1/delta_{N+1}` is used both ways: a
    /// vertex's range is cut to what its out-edges can produce, and to what
    /// its in-edges can hand over, `1/(delta_N - a)`.
    pub fn forward_reduce(&mut self, max_passes: usize) -> bool {
        let n = self.vertices.len();
        let mut range: Vec<Range> = (0..n).map(|v| self.d[v].hull()).collect();
        let mut deleted_any = false;
        for _ in 0..max_passes {
            let mut changed = false;
            // Predecessor side.
            let mut incoming: Vec<Option<Range>> = vec![None; n];
            for &(u, a, v) in &self.edges {
                let term = range[u].as_ref().and_then(|(lo, hi)| {
                    let a_q = rat_int(a as i64);
                    let lo = lo.max(&a_q).clone();
                    let hi = hi.min(&(&a_q + Rational::one())).clone();
                    (lo <= hi).then(|| {
                        let top = if lo == a_q { self.upper_bound() } else { (&lo - &a_q).recip() };
                        ((&hi - &a_q).recip(), top)
                    })
                });
                let slot = incoming[v].get_or_insert(None);
                *slot = hull(slot.take().into_iter().chain(term));
            }
            for v in 0..n {
                if let Some(inc) = incoming[v].take() {
                    let r = meet(&inc.map(round_range), &range[v]);
                    changed |= moved(&range[v], &r);
                    range[v] = r;
                }
            }
            // Successor side.
            let mut keep = BTreeSet::new();
            let mut new_range: Vec<Range> = vec![None; n];
            for &(v, a, w) in &self.edges {
                let term = range[w].as_ref().and_then(|r| {
                    let (lo, hi) = Self::window(a, r);
                    let (lo, hi) = meet(&Some((lo, hi)), &range[v])?;
                    clipped_hull(&self.d[v], &lo, &hi)
                });
                match term {
                    Some(t) => {
                        keep.insert((v, a, w));
                        new_range[v] = hull(new_range[v].take().into_iter().chain([t]));
                    }
                    None => {
                        self.forward_log.push((v, a, w));
                        changed = true;
                        deleted_any = true;
                    }
                }
            }
            self.edges = keep;
            for v in 0..n {
                let r = meet(&new_range[v].take().map(round_range), &range[v]);
                changed |= moved(&range[v], &r);
                range[v] = r;
            }
            if !changed {
                break;
            }
        }
        deleted_any
    }

    /// Every `delta` in the graph is below the ambient bound.
    fn upper_bound(&self) -> Rational {
        rat_int(self.upper as i64)
    }

    /// Range of `x_N` per vertex, from `[0, 1]` through in-edges and back
    /// through out-edges.
    pub fn x_ranges(&self, max_passes: usize) -> Vec<Range> {
        let n = self.vertices.len();
        let mut xr: Vec<Range> = vec![Some((Rational::zero(), Rational::one())); n];
        for _ in 0..max_passes {
            let mut next: Vec<Range> = vec![None; n];
            for &(u, a, w) in &self.edges {
                if let Some((x0, x1)) = &xr[u] {
                    let a = rat_int(a as i64);
                    let t = ((&a + x1).recip(), (&a + x0).recip());
                    next[w] = hull(next[w].take().into_iter().chain([t]));
                }
            }
            let mut changed = false;
            for v in 0..n {
                let r = meet(&next[v].take().map(round_range), &xr[v]);
                changed |= moved(&xr[v], &r);
                xr[v] = r;
            }
            // Read backwards, x_N = 1/x_{N+1} - a_{N+1}.
            let mut prev: Vec<Option<Range>> = vec![None; n];
            for &(u, a, w) in &self.edges {
                let term = xr[w].as_ref().and_then(|(y0, y1)| {
                    let a = rat_int(a as i64);
                    let lo = (y1.recip() - &a).max(Rational::zero());
                    let hi = if y0.is_zero() { Rational::one() } else { (y0.recip() - &a).min(Rational::one()) };
                    (lo <= hi).then_some((lo, hi))
                });
                let slot = prev[u].get_or_insert(None);
                *slot = hull(slot.take().into_iter().chain(term));
            }
            for v in 0..n {
                if let Some(p) = prev[v].take() {
                    let r = meet(&p.map(round_range), &xr[v]);
                    changed |= moved(&xr[v], &r);
                    xr[v] = r;
                }
            }
            if !changed {
                break;
            }
        }
        xr
    }

    /// Backward reduction: shrink `D` using the ranges of `x_N`, then drop
    /// edges whose label no longer fits `D`. Returns whether `D` changed.
    pub fn backward_reduce(&mut self, max_passes: usize) -> bool {
        let xr = self.x_ranges(max_passes);
        let mut has_in = vec![false; self.vertices.len()];
        for &(_, _, w) in &self.edges {
            has_in[w] = true;
        }
        let mut changed = false;
        for v in 0..self.vertices.len() {
            if !has_in[v] || self.d[v].is_empty() {
                continue;
            }
            let Some((x0, x1)) = &xr[v] else { continue };
            let (forced, triplets) = forced_by_xrange(&self.ctx, &self.vertices[v], &self.beta, x0, x1, &self.d[v]);
            if forced.is_empty() {
                continue;
            }
            let nd = self.d[v].subtract_closure(&forced);
            if nd != self.d[v] {
                self.backward_log.push(BackwardStep {
                    vertex: self.vertex_name(v),
                    x_lo: x0.to_string(),
                    x_hi: x1.to_string(),
                    triplets,
                    new_d: nd.to_string(),
                });
                self.d[v] = nd;
                changed = true;
            }
        }
        if changed {
            let d = &self.d;
            self.edges
                .retain(|&(v, a, _)| d[v].meets_open(&rat_int(a as i64), &rat_int(a as i64 + 1)));
        }
        changed
    }

    /// Alternate component pruning, forward and backward reduction until
    /// nothing changes.
    pub fn reduce(&mut self, opts: ReduceOptions) {
        loop {
            self.reduce_flat(opts);
            if self.depth >= opts.max_depth || self.components_are_cycles() {
                break;
            }
            *self = self.refine();
        }
    }

    fn reduce_flat(&mut self, opts: ReduceOptions) {
        loop {
            let mut changed = self.prune_to_components();
            if opts.forward {
                changed |= self.forward_reduce(opts.max_passes);
            }
            if opts.backward {
                changed |= self.backward_reduce(opts.max_passes);
            }
            if !changed {
                break;
            }
        }
    }

    /// The graph one history label deeper: each edge becomes a vertex, and
    /// consecutive edges become edges.
    pub fn refine(&self) -> TailGraph {
        let old: Vec<Edge> = self.edges.iter().copied().collect();
        let id: HashMap<Edge, usize> = old.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut out_of: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, &(u, _, _)) in old.iter().enumerate() {
            out_of.entry(u).or_default().push(i);
        }
        let mut edges = BTreeSet::new();
        for (i, &(_, _, w)) in old.iter().enumerate() {
            for &j in out_of.get(&w).map(Vec::as_slice).unwrap_or(&[]) {
                edges.insert((i, old[j].1, j));
            }
        }
        debug_assert_eq!(id.len(), old.len());
        TailGraph {
            ctx: self.ctx.clone(),
            beta: self.beta.clone(),
            classes: self.classes.clone(),
            class_index: self.class_index.clone(),
            depth: self.depth + 1,
            vertices: old.iter().map(|&(_, _, w)| self.vertices[w]).collect(),
            history: old
                .iter()
                .map(|&(u, a, _)| {
                    let mut h = self.history[u].clone();
                    h.push(a);
                    h
                })
                .collect(),
            d: old.iter().map(|&(_, _, w)| self.d[w].clone()).collect(),
            edges,
            upper: self.upper,
            backward_log: self.backward_log.clone(),
            forward_log: vec![],
        }
    }

    /// Display name of a vertex: its class, then its history if any.
    pub fn vertex_name(&self, v: usize) -> String {
        let c = self.vertices[v].short();
        if self.history[v].is_empty() {
            c
        } else {
            let h: Vec<String> = self.history[v].iter().map(u64::to_string).collect();
            format!("{c}[{}]", h.join(","))
        }
    }

    /// Whether every component is a single simple cycle, so that each
    /// carries exactly one infinite path up to shifts.
    pub fn components_are_cycles(&self) -> bool {
        let comps = self.components();
        let mut comp_of = vec![usize::MAX; self.vertices.len()];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                comp_of[v] = i;
            }
        }
        // Edges leaving a component do not lie on any closed walk.
        let mut out_deg = vec![0usize; self.vertices.len()];
        for &(u, _, w) in &self.edges {
            if comp_of[u] != usize::MAX && comp_of[u] == comp_of[w] {
                out_deg[u] += 1;
            }
        }
        comps.iter().all(|c| c.iter().all(|&v| out_deg[v] == 1))
    }

    pub fn edge_labels(&self) -> BTreeSet<(String, u64, String)> {
        self.edges
            .iter()
            .map(|&(u, a, v)| (self.vertices[u].short(), a, self.vertices[v].short()))
            .collect()
    }

    /// Whether the tail of `cf` is an infinite path of the graph.
    pub fn contains_tail(&self, cf: &ContinuedFraction) -> bool {
        let lookup: HashMap<(MatrixClass, &[u64]), usize> =
            (0..self.vertices.len()).map(|v| ((self.vertices[v], self.history[v].as_slice()), v)).collect();
        let s = cf.preperiod().len();
        let p = cf.period().len();
        let mut cls = self.ctx.identity();
        let mut labels = Vec::new();
        let mut states = Vec::new();
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        for n in 0.. {
            if n >= s + self.depth {
                let hist = &labels[labels.len() - self.depth..];
                let Some(&v) = lookup.get(&(cls, hist)) else { return false };
                if let Some(&first) = seen.get(&(v, (n - s) % p)) {
                    // The loop from `first` repeats forever.
                    return (first..states.len()).all(|i| {
                        let next = if i + 1 < states.len() { states[i + 1] } else { v };
                        self.edges.contains(&(states[i], cf.quotient(n - states.len() + i + 1), next))
                    });
                }
                seen.insert((v, (n - s) % p), states.len());
                states.push(v);
            }
            let a = cf.quotient(n + 1);
            labels.push(a);
            cls = self.ctx.step(&cls, a);
        }
        unreachable!()
    }

    /// Shortest label path from the identity class to the class of vertex
    /// `target`, using any partial quotients.
    pub fn path_from_identity(&self, target: usize) -> Vec<u64> {
        let start = self.class_index[&self.ctx.identity()];
        let goal = self.class_index[&self.vertices[target]];
        let labels = (self.ctx.pair.y() * self.ctx.pair.yp()).max(1);
        let mut prev: HashMap<usize, (usize, u64)> = HashMap::new();
        let mut queue = VecDeque::from([start]);
        let mut seen = HashSet::from([start]);
        while let Some(v) = queue.pop_front() {
            if v == goal {
                break;
            }
            for a in 1..=labels {
                let w = self.class_index[&self.ctx.step(&self.classes[v], a)];
                if seen.insert(w) {
                    prev.insert(w, (v, a));
                    queue.push_back(w);
                }
            }
        }
        let mut path = Vec::new();
        let mut v = goal;
        while v != start {
            let (p, a) = prev[&v];
            path.push(a);
            v = p;
        }
        path.reverse();
        path
    }

    /// Closed walks of length at most `max_len` inside the components, up
    /// to rotation and without repeated blocks, shortest first, each turned
    /// into a slope by prefixing a path from the identity. Stops after
    /// `max_count` walks. The flag is true only when the list covers every
    /// infinite path, that is when each component is a simple cycle within
    /// the length cap.
    pub fn extract_candidates(&self, max_len: usize, max_count: usize) -> (Vec<ContinuedFraction>, bool) {
        let mut out_adj: BTreeMap<usize, Vec<(u64, usize)>> = BTreeMap::new();
        for &(u, a, v) in &self.edges {
            out_adj.entry(u).or_default().push((a, v));
        }
        let comps = self.components();
        let mut seen: HashSet<Vec<(usize, u64)>> = HashSet::new();
        let mut prefix: HashMap<usize, Vec<u64>> = HashMap::new();
        let mut result = Vec::new();
        let mut walks = Vec::new();
        let mut complete = true;
        'outer: for len in 1..=max_len {
            for comp in &comps {
                for &s in comp {
                    // Walks whose least vertex is `s`, starting at `s`.
                    walks.clear();
                    closed_walks(&out_adj, s, s, len, &mut Vec::new(), &mut walks);
                    for w in walks.drain(..) {
                        let canon = canonical_rotation(&w);
                        if !is_primitive(&canon) || !seen.insert(canon) {
                            continue;
                        }
                        let labels: Vec<u64> = w.iter().map(|&(_, a)| a).collect();
                        let pre = prefix.entry(s).or_insert_with(|| self.path_from_identity(s)).clone();
                        result.push(ContinuedFraction::new(pre, labels).expect("labels are positive"));
                        if result.len() >= max_count {
                            complete = false;
                            break 'outer;
                        }
                    }
                }
            }
        }
        // Other components carry closed walks of every large length.
        if !self.components_are_cycles() || comps.iter().any(|c| c.len() > max_len) {
            complete = false;
        }
        (result, complete)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::new();
        let p = self.ctx.pair;
        let _ = writeln!(s, "digraph tails_{}_{} {{", p.p, p.pp);
        let _ = writeln!(s, "  label=\"P={} P'={} beta={}\";", p.p, p.pp, self.beta);
        let mut used = BTreeSet::new();
        for &(u, _, v) in &self.edges {
            used.insert(u);
            used.insert(v);
        }
        for &v in &used {
            let _ = writeln!(s, "  v{} [label=\"{}\\nD={}\"];", v, self.vertex_name(v), self.d[v]);
        }
        for &(u, a, v) in &self.edges {
            let _ = writeln!(s, "  v{u} -> v{v} [label=\"{a}\"];");
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            p: self.ctx.pair.p,
            pp: self.ctx.pair.pp,
            beta: self.beta.to_string(),
            vertices: self
                .vertices
                .iter()
                .enumerate()
                .map(|(i, c)| VertexJson {
                    id: i,
                    name: self.vertex_name(i),
                    long_name: c.long(&self.ctx.pair),
                    d: self.d[i].to_string(),
                })
                .collect(),
            edges: self.edges.iter().map(|&(u, a, v)| EdgeJson { from: u, label: a, to: v }).collect(),
            components: self.components(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexJson {
    pub id: usize,
    pub name: String,
    pub long_name: String,
    pub d: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeJson {
    pub from: usize,
    pub label: u64,
    pub to: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphJson {
    pub p: u64,
    pub pp: u64,
    pub beta: String,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
    pub components: Vec<Vec<usize>>,
}

/// Walks of exactly `left` more steps from `v` back to `s`, avoiding
/// vertices below `s`.
fn closed_walks(
    adj: &BTreeMap<usize, Vec<(u64, usize)>>,
    s: usize,
    v: usize,
    left: usize,
    cur: &mut Vec<(usize, u64)>,
    out: &mut Vec<Vec<(usize, u64)>>,
) {
    for &(a, w) in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
        if w < s || (left == 1 && w != s) {
            continue;
        }
        cur.push((v, a));
        if left == 1 {
            out.push(cur.clone());
        } else {
            closed_walks(adj, s, w, left - 1, cur, out);
        }
        cur.pop();
    }
}

fn canonical_rotation(w: &[(usize, u64)]) -> Vec<(usize, u64)> {
    (0..w.len())
        .map(|i| w[i..].iter().chain(w[..i].iter()).copied().collect::<Vec<_>>())
        .min()
        .expect("walk is non-empty")
}

fn is_primitive(w: &[(usize, u64)]) -> bool {
    let n = w.len();
    (1..n).all(|p| !n.is_multiple_of(p) || (0..n).any(|i| w[i] != w[(i + p) % n]))
}

/// Helper for tests and reports: `f64` view of a rational.
pub fn rational_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QuadraticNumber {
        QuadraticNumber::parse(s).unwrap()
    }

    fn pp(p: u64, pp: u64) -> PeriodPair {
        PeriodPair::new(p, pp).unwrap()
    }

    fn labels(g: &TailGraph) -> BTreeSet<(String, u64, String)> {
        g.edge_labels()
    }

    fn e(a: &str, l: u64, b: &str) -> (String, u64, String) {
        (a.to_string(), l, b.to_string())
    }

    #[test]
    fn trivial_pair_rejected() {
        assert_eq!(build_graph(pp(1, 1), &q("1")).unwrap_err(), GraphError::TrivialPair);
        assert!(build_graph(pp(2, 4), &q("0")).is_err());
    }

    #[test]
    fn figure_one_edges() {
        let g = build_graph(pp(2, 4), &q("1/2")).unwrap();
        let want: BTreeSet<_> = [
            e("(0 0;1 1)", 1, "(0 0;1 0)"),
            e("(0 0;1 1)", 3, "(0 0;1 0)"),
            e("(0 0;0 1)", 2, "(0 0;1 0)"),
            e("(0 0;0 1)", 1, "(0 0;1 1)"),
            e("(0 0;0 1)", 3, "(0 0;1 1)"),
            e("(0 0;1 1)", 2, "(0 0;1 1)"),
        ]
        .into_iter()
        .collect();
        assert_eq!(labels(&g), want);
        assert_eq!(g.components().len(), 1);
    }

    #[test]
    fn figure_two_has_no_cycle() {
        let g = build_graph(pp(1, 4), &q("(sqrt(5)+1)/4")).unwrap();
        let want: BTreeSet<_> = [
            e("(0 0;1 1)", 1, "(0 0;1 2)"),
            e("(0 0;1 1)", 2, "(0 0;1 3)"),
            e("(0 0;2 1)", 1, "(0 0;1 3)"),
            e("(0 0;1 2)", 1, "(0 0;2 1)"),
        ]
        .into_iter()
        .collect();
        assert_eq!(labels(&g), want);
        assert!(g.components().is_empty());
    }

    #[test]
    fn scc_basics() {
        let edges: BTreeSet<Edge> = [(0, 1, 1), (1, 1, 0), (1, 2, 2), (3, 1, 3)].into_iter().collect();
        assert_eq!(scc(5, &edges), vec![vec![0, 1], vec![3]]);
    }

    #[test]
    fn three_four_reduces_to_one_cycle() {
        let mut g = build_graph(pp(3, 4), &q("1/3")).unwrap();
        g.reduce(ReduceOptions::default());
        assert!(g.components_are_cycles());
        let comps = g.components();
        assert_eq!(comps.len(), 1);
        let (cands, complete) = g.extract_candidates(12, 100);
        assert!(complete);
        assert_eq!(cands.len(), 1);
        let mut per = cands[0].period().to_vec();
        // Compare up to rotation with (1,1,1,2).
        let target = vec![1, 1, 1, 2];
        let found = (0..per.len()).any(|_| {
            per.rotate_left(1);
            per == target
        });
        assert!(found, "{:?}", cands[0]);
    }
}
