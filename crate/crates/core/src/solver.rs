//! Capacity-scaling augmenting-path driver.
//!
//! The flow lives on the network `s → i → t` with one hyperedge per term.
//! Each phase first projects every term flow into the phase's base
//! polyhedron and rebalances nodes through the (unbounded) reverse arcs,
//! then augments `⌈Δ⌉` units along shortest paths until `t` is unreachable.
//! After the `Δ = 1/2` phase the nodes reachable from `s` form a minimizer.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instance::{Instance, TermKind};
use crate::phase::Phase;
use crate::term::{TermCounters, TermOps, TermState};
use crate::weight::Weight;

/// Terms up to this size are checked by subset enumeration during audits.
pub const AUDIT_ENUMERATION_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// Check every reachable flow state: capacities, conservation and the
    /// base-polyhedron constraints of each term. Slow.
    pub audit: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hop {
    Source(usize),
    /// Flow from node `from` to node `to` through term `term`; `from_pos`
    /// and `to_pos` are member positions inside the term.
    Term { term: usize, from: usize, to: usize, from_pos: usize, to_pos: usize },
    Sink(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentingPath {
    pub hops: Vec<Hop>,
}

impl AugmentingPath {
    /// Nodes visited, in order.
    pub fn nodes(&self) -> Vec<usize> {
        let mut nodes = Vec::with_capacity(self.hops.len());
        for hop in &self.hops {
            match *hop {
                Hop::Source(i) => nodes.push(i),
                Hop::Term { to, .. } => nodes.push(to),
                Hop::Sink(_) => {}
            }
        }
        nodes
    }

    pub fn term_hops(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.hops.iter().filter_map(|h| match *h {
            Hop::Term { term, from_pos, to_pos, .. } => Some((term, from_pos, to_pos)),
            _ => None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaseStats<W> {
    pub two_delta: W,
    pub augmentations: u64,
    pub bfs_count: u64,
    /// `2n + Σ_Q α_Q`, the allowance on augmentations in one phase.
    pub bound: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult<W> {
    /// `min f`, including the instance offset.
    pub minimum: W,
    /// The nodes reachable from the source once no augmenting path is left.
    pub minimizer: Vec<usize>,
    pub flow_value: W,
    pub offset: W,
    pub phases: Vec<PhaseStats<W>>,
    pub counters: BTreeMap<TermKind, TermCounters>,
    /// Empty unless auditing found a problem.
    pub audit_violations: Vec<String>,
}

#[derive(Clone, Copy, Debug)]
enum Parent {
    Source,
    Via { term: u32, from: u32, from_pos: u32, to_pos: u32 },
}

pub struct Solver<'a, W: Weight> {
    instance: &'a Instance<W>,
    options: SolveOptions,
    terms: Vec<TermState<W>>,
    members: Vec<Vec<usize>>,
    incidence_start: Vec<usize>,
    incidence: Vec<(u32, u32)>,
    phi_s: Vec<W>,
    phi_t: Vec<W>,
    term_flow: Vec<W>,
    phase: Phase<W>,
    epoch: u32,
    visited: Vec<u32>,
    parent: Vec<Parent>,
    queue: Vec<usize>,
    scratch: Vec<usize>,
    stats: Vec<PhaseStats<W>>,
    violations: Vec<String>,
}

/// Solves with default options.
pub fn solve<W: Weight>(instance: &Instance<W>) -> Result<SolveResult<W>> {
    Solver::new(instance, SolveOptions::default()).solve()
}

pub fn solve_with<W: Weight>(instance: &Instance<W>, options: SolveOptions) -> Result<SolveResult<W>> {
    Solver::new(instance, options).solve()
}

impl<'a, W: Weight> Solver<'a, W> {
    pub fn new(instance: &'a Instance<W>, options: SolveOptions) -> Self {
        let n = instance.n();
        let terms: Vec<TermState<W>> = instance.terms().iter().map(TermState::new).collect();
        let members: Vec<Vec<usize>> = instance.terms().iter().map(|t| t.members()).collect();
        let mut degree = vec![0usize; n + 1];
        for ms in &members {
            for &v in ms {
                degree[v + 1] += 1;
            }
        }
        for i in 0..n {
            degree[i + 1] += degree[i];
        }
        let incidence_start = degree.clone();
        let mut fill = degree;
        let mut incidence = vec![(0u32, 0u32); incidence_start[n]];
        for (t, ms) in members.iter().enumerate() {
            for (p, &v) in ms.iter().enumerate() {
                incidence[fill[v]] = (t as u32, p as u32);
                fill[v] += 1;
            }
        }
        Solver {
            instance,
            options,
            terms,
            members,
            incidence_start,
            incidence,
            phi_s: vec![W::zero(); n],
            phi_t: vec![W::zero(); n],
            term_flow: vec![W::zero(); n],
            phase: Phase::initial(instance.bound()),
            epoch: 0,
            visited: vec![0; n],
            parent: vec![Parent::Source; n],
            queue: Vec::with_capacity(n),
            scratch: Vec::new(),
            stats: Vec::new(),
            violations: Vec::new(),
        }
    }

    pub fn phase(&self) -> Phase<W> {
        self.phase
    }

    pub fn terms(&self) -> &[TermState<W>] {
        &self.terms
    }

    /// Members of term `t` as node ids, by position.
    pub fn term_members(&self, t: usize) -> &[usize] {
        &self.members[t]
    }

    /// `φ_si` per node.
    pub fn source_flow(&self) -> &[W] {
        &self.phi_s
    }

    /// `φ_it` per node.
    pub fn sink_flow(&self) -> &[W] {
        &self.phi_t
    }

    /// `value(φ) = Σ_i φ_si`.
    pub fn flow_value(&self) -> W {
        self.phi_s.iter().fold(W::zero(), |a, &b| a + b)
    }

    pub fn stats(&self) -> &[PhaseStats<W>] {
        &self.stats
    }

    /// Per-phase allowance `2n + Σ_Q α_Q`.
    pub fn augmentation_bound(&self) -> u64 {
        2 * self.instance.n() as u64 + self.terms.iter().map(|t| t.alpha_bound()).sum::<u64>()
    }

    #[inline]
    fn source_slack(&self, i: usize) -> W {
        self.instance.source_caps()[i] - self.phi_s[i]
    }

    #[inline]
    fn sink_slack(&self, i: usize) -> W {
        self.instance.sink_caps()[i] - self.phi_t[i]
    }

    /// Step S0: adjusts every term flow to `phase` and restores conservation
    /// by sending the excess back through the reverse source or sink arcs.
    pub fn start_phase(&mut self, phase: Phase<W>) {
        self.phase = phase;
        for (t, term) in self.terms.iter_mut().enumerate() {
            let delta = term.adjust_flow(phase);
            for (p, d) in delta.into_iter().enumerate() {
                let v = self.members[t][p];
                self.term_flow[v] = self.term_flow[v] + d;
            }
        }
        for i in 0..self.instance.n() {
            let excess = self.phi_s[i] - self.phi_t[i] - self.term_flow[i];
            if excess > W::zero() {
                self.phi_s[i] = self.phi_s[i] - excess;
            } else {
                self.phi_t[i] = self.phi_t[i] + excess;
            }
        }
        self.stats.push(PhaseStats {
            two_delta: phase.two_delta(),
            augmentations: 0,
            bfs_count: 0,
            bound: self.augmentation_bound(),
        });
        self.audit_now("phase start");
    }

    /// Augments along every path `s → i → t`, lowest node first. These are
    /// the paths a search would return first; slacks only shrink within a
    /// phase, so none appear later. Returns the number of augmentations.
    pub fn saturate_direct_paths(&mut self) -> u64 {
        let c = self.phase.ceil_delta();
        let mut count = 0u64;
        for i in 0..self.instance.n() {
            let k = self.source_slack(i).min(self.sink_slack(i)) / c;
            if k > W::zero() {
                let amount = k * c;
                self.phi_s[i] = self.phi_s[i] + amount;
                self.phi_t[i] = self.phi_t[i] + amount;
                count += k.to_u64().expect("positive count");
            }
        }
        if let Some(s) = self.stats.last_mut() {
            s.augmentations += count;
        }
        if count > 0 {
            self.audit_now("direct paths");
        }
        count
    }

    /// Breadth-first search over `{s} ∪ V ∪ {t}`. Nodes with source slack
    /// form the first level and are scanned in index order; the first node
    /// found with sink slack ends the search.
    fn search(&mut self, stop_at_sink: bool) -> Option<usize> {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.visited.fill(0);
            self.epoch = 1;
        }
        let e = self.epoch;
        let c = self.phase.ceil_delta();
        let n = self.instance.n();
        self.queue.clear();
        let mut head = 0;
        let mut cursor = 0;
        let mut scratch = std::mem::take(&mut self.scratch);
        let found = 'outer: loop {
            let i = if cursor < n {
                let i = cursor;
                cursor += 1;
                if self.source_slack(i) < c {
                    continue;
                }
                self.visited[i] = e;
                self.parent[i] = Parent::Source;
                if stop_at_sink && self.sink_slack(i) >= c {
                    break Some(i);
                }
                i
            } else if head < self.queue.len() {
                head += 1;
                self.queue[head - 1]
            } else {
                break None;
            };
            for k in self.incidence_start[i]..self.incidence_start[i + 1] {
                let (t, pos) = self.incidence[k];
                let term = &mut self.terms[t as usize];
                if term.is_reached(pos as usize, e) {
                    continue;
                }
                scratch.clear();
                term.get_neighbors(pos as usize, self.phase, e, &mut scratch);
                for &q in &scratch {
                    let j = self.members[t as usize][q];
                    if self.visited[j] == e || self.source_slack(j) >= c {
                        continue;
                    }
                    self.visited[j] = e;
                    self.parent[j] = Parent::Via { term: t, from: i as u32, from_pos: pos, to_pos: q as u32 };
                    if stop_at_sink && self.sink_slack(j) >= c {
                        break 'outer Some(j);
                    }
                    self.queue.push(j);
                }
            }
        };
        self.scratch = scratch;
        found
    }

    /// A shortest augmenting path in the current phase, if any.
    pub fn find_augmenting_path(&mut self) -> Option<AugmentingPath> {
        if let Some(s) = self.stats.last_mut() {
            s.bfs_count += 1;
        }
        let end = self.search(true)?;
        let mut hops = vec![Hop::Sink(end)];
        let mut cur = end;
        while let Parent::Via { term, from, from_pos, to_pos } = self.parent[cur] {
            hops.push(Hop::Term {
                term: term as usize,
                from: from as usize,
                to: cur,
                from_pos: from_pos as usize,
                to_pos: to_pos as usize,
            });
            cur = from as usize;
        }
        hops.push(Hop::Source(cur));
        hops.reverse();
        Some(AugmentingPath { hops })
    }

    /// Sends `⌈Δ⌉` units along `path`.
    pub fn augment(&mut self, path: &AugmentingPath) {
        let c = self.phase.ceil_delta();
        for hop in &path.hops {
            match *hop {
                Hop::Source(i) => self.phi_s[i] = self.phi_s[i] + c,
                Hop::Term { term, from, to, from_pos, to_pos } => {
                    self.terms[term].send_flow(from_pos, to_pos, self.phase);
                    self.term_flow[from] = self.term_flow[from] + c;
                    self.term_flow[to] = self.term_flow[to] - c;
                }
                Hop::Sink(i) => self.phi_t[i] = self.phi_t[i] + c,
            }
        }
        if let Some(s) = self.stats.last_mut() {
            s.augmentations += 1;
        }
        self.audit_now("augmentation");
    }

    /// Runs one full phase (steps S0 to S3).
    pub fn run_phase(&mut self, phase: Phase<W>) -> Result<()> {
        self.start_phase(phase);
        self.saturate_direct_paths();
        let bound = self.augmentation_bound();
        let guard = bound.saturating_mul(4).saturating_add(64);
        while let Some(path) = self.find_augmenting_path() {
            self.augment(&path);
            let done = self.stats.last().map_or(0, |s| s.augmentations);
            if done > guard {
                return Err(Error::Internal(format!(
                    "phase 2Δ = {} exceeded {guard} augmentations",
                    phase.two_delta()
                )));
            }
        }
        Ok(())
    }

    /// Nodes reachable from `s` in the residual graph of the current phase.
    pub fn extract_cut(&mut self) -> Vec<usize> {
        let found = self.search(false);
        debug_assert!(found.is_none());
        let e = self.epoch;
        (0..self.instance.n()).filter(|&i| self.visited[i] == e).collect()
    }

    /// Runs all phases and reads off the minimizer.
    pub fn solve(mut self) -> Result<SolveResult<W>> {
        let mut phase = Phase::initial(self.instance.bound());
        loop {
            self.run_phase(phase)?;
            match phase.next() {
                Some(p) => phase = p,
                None => break,
            }
        }
        let minimizer = self.extract_cut();
        let flow_value = self.flow_value();
        let offset = self.instance.offset();
        let minimum = flow_value + offset;
        let at_cut = self.instance.evaluate(&minimizer)?;
        if at_cut != minimum {
            return Err(Error::Internal(format!(
                "flow value {flow_value} + offset {offset} differs from f(S) = {at_cut}"
            )));
        }
        let mut counters: BTreeMap<TermKind, TermCounters> = BTreeMap::new();
        for t in &self.terms {
            *counters.entry(t.kind()).or_default() += t.counters();
        }
        Ok(SolveResult {
            minimum,
            minimizer,
            flow_value,
            offset,
            phases: self.stats,
            counters,
            audit_violations: self.violations,
        })
    }

    fn audit_now(&mut self, when: &str) {
        if self.options.audit {
            let found = self.audit();
            let two_delta = self.phase.two_delta();
            self.violations
                .extend(found.into_iter().map(|v| format!("2Δ = {two_delta}, {when}: {v}")));
        }
    }

    /// Checks capacities, conservation, ⌈Δ⌉-granularity and per-term
    /// feasibility of the current flow. Returns the violations found.
    pub fn audit(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.instance.n();
        let c = self.phase.ceil_delta();
        let mut through = vec![W::zero(); n];
        for (t, term) in self.terms.iter().enumerate() {
            let flows = term.flows();
            for (p, &f) in flows.iter().enumerate() {
                through[self.members[t][p]] = through[self.members[t][p]] + f;
                if f % c != W::zero() {
                    out.push(format!("term {t} member {p}: flow {f} not a multiple of {c}"));
                }
            }
            if let Err(e) = term.check_structures(self.phase) {
                out.push(format!("term {t}: {e}"));
            }
            let m = term.size();
            if m <= AUDIT_ENUMERATION_LIMIT {
                for bits in 0u32..1 << m {
                    let r = term.residual_value(&|p| bits >> p & 1 == 1, self.phase);
                    let boundary = bits == 0 || bits == (1 << m) - 1;
                    if r < W::zero() || (boundary && r != W::zero()) {
                        out.push(format!("term {t}: residual {r} on member set {bits:#b}"));
                    }
                }
            } else if flows.iter().fold(W::zero(), |a, &b| a + b) != W::zero() {
                out.push(format!("term {t}: flows do not sum to zero"));
            }
        }
        for i in 0..n {
            if self.source_slack(i) < W::zero() {
                out.push(format!("node {i}: source flow {} above capacity", self.phi_s[i]));
            }
            if self.sink_slack(i) < W::zero() {
                out.push(format!("node {i}: sink flow {} above capacity", self.phi_t[i]));
            }
            if self.phi_s[i] - self.phi_t[i] - through[i] != W::zero() {
                out.push(format!("node {i}: conservation fails"));
            }
            if self.phi_s[i] % c != W::zero() || self.phi_t[i] % c != W::zero() {
                out.push(format!("node {i}: unary flow not a multiple of {c}"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Term;

    #[test]
    fn pairwise_example() {
        let inst = Instance::<i64>::builder(2)
            .unary(0, 3, 0)
            .unary(1, 0, 2)
            .term(Term::pairwise(0, 1, 1, 1))
            .build()
            .unwrap();
        let r = solve(&inst).unwrap();
        assert_eq!(r.minimum, 1);
        assert_eq!(r.minimizer, vec![0]);
    }

    #[test]
    fn cardinality_example() {
        let inst = Instance::<i64>::builder(3)
            .unaries(&[(4, 1), (4, 1), (0, 5)])
            .term(Term::cardinality(vec![0, 1, 2], vec![0, 2, 2, 0]))
            .build()
            .unwrap();
        let r = solve_with(&inst, SolveOptions { audit: true }).unwrap();
        assert_eq!(r.minimum, 4);
        assert_eq!(r.minimizer, vec![0, 1]);
        assert!(r.audit_violations.is_empty(), "{:?}", r.audit_violations);
    }

    #[test]
    fn zero_instance() {
        let inst = Instance::<i64>::builder(3).offset(7).build().unwrap();
        let r = solve(&inst).unwrap();
        assert_eq!(r.minimum, 7);
        assert!(r.minimizer.is_empty());
    }

    #[test]
    fn single_node_scalar_cut() {
        let inst = Instance::<i64>::builder(1).unary(0, 5, 3).build().unwrap();
        let r = solve(&inst).unwrap();
        assert_eq!(r.flow_value, 3);
        assert_eq!(r.minimum, 3);
    }

    #[test]
    fn chain_path_has_one_term_hop() {
        let inst = Instance::<i64>::builder(2)
            .unary(0, 3, 0)
            .unary(1, 0, 2)
            .term(Term::pairwise(0, 1, 1, 1))
            .build()
            .unwrap();
        let mut s = Solver::new(&inst, SolveOptions::default());
        s.start_phase(Phase::last());
        assert_eq!(s.saturate_direct_paths(), 0);
        let path = s.find_augmenting_path().unwrap();
        assert_eq!(path.nodes(), vec![0, 1]);
        assert_eq!(path.term_hops().count(), 1);
        s.augment(&path);
        assert!(s.find_augmenting_path().is_none());
        assert_eq!(s.extract_cut(), vec![0]);
        assert!(s.audit().is_empty());
    }
}
