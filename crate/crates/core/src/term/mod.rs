//! Per-term flow state and residual arc structures.
//!
//! Every term kind keeps its own flow vector `φ_Q` (indexed by member
//! position) together with whatever it needs to answer neighbor queries in
//! the residual graph. The solver talks to terms only through [`TermOps`].
//!
//! Reached flags are stamped with a search id handed in by the caller, so a
//! new breadth-first search needs no per-term reset.

mod bicardinality;
mod cardinality;
mod general;
mod pairwise;
pub(crate) mod sorted;

pub use bicardinality::BiCardinalityState;
pub use cardinality::CardinalityState;
pub use general::GeneralState;
pub use pairwise::PairwiseState;

use std::ops::AddAssign;

use crate::instance::{Term, TermKind};
use crate::phase::Phase;
use crate::weight::Weight;

/// Operation counts, for benchmarking only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TermCounters {
    pub get_neighbors: u64,
    pub send_flow: u64,
    pub adjust_flow: u64,
    /// Table lookups made while enumerating subsets.
    pub oracle_evaluations: u64,
    /// Matrix entries evaluated by row-minima searches.
    pub matrix_entries: u64,
}

impl AddAssign for TermCounters {
    fn add_assign(&mut self, o: Self) {
        self.get_neighbors += o.get_neighbors;
        self.send_flow += o.send_flow;
        self.adjust_flow += o.adjust_flow;
        self.oracle_evaluations += o.oracle_evaluations;
        self.matrix_entries += o.matrix_entries;
    }
}

pub trait TermOps<W: Weight> {
    fn kind(&self) -> TermKind;

    fn size(&self) -> usize;

    /// Current `φ_Q` by member position.
    fn flows(&self) -> Vec<W>;

    /// Moves `φ_Q` into the base polyhedron of this phase's function and
    /// returns the change per member.
    fn adjust_flow(&mut self, phase: Phase<W>) -> Vec<W>;

    fn is_reached(&self, pos: usize, epoch: u32) -> bool;

    /// Appends to `out` every member `j` with an arc `pos → j` that is not yet
    /// reached in search `epoch`, and marks `pos` and those members reached.
    fn get_neighbors(&mut self, pos: usize, phase: Phase<W>, epoch: u32, out: &mut Vec<usize>);

    /// `φ_Q[from] += ⌈Δ⌉`, `φ_Q[to] −= ⌈Δ⌉`.
    fn send_flow(&mut self, from: usize, to: usize, phase: Phase<W>);

    /// `f^Δ_Q(S) − φ_Q(S)` for `S` given by member positions.
    fn residual_value(&self, contains: &dyn Fn(usize) -> bool, phase: Phase<W>) -> W;

    /// Per-phase augmentation allowance of this term.
    fn alpha_bound(&self) -> u64;

    fn counters(&self) -> TermCounters;

    /// Compares incrementally maintained data with a from-scratch rebuild.
    fn check_structures(&self, phase: Phase<W>) -> Result<(), String>;
}

#[derive(Clone, Debug)]
pub enum TermState<W> {
    Pairwise(PairwiseState<W>),
    Cardinality(CardinalityState<W>),
    BiCardinality(BiCardinalityState<W>),
    General(GeneralState<W>),
}

macro_rules! dispatch {
    ($self:expr, $s:ident => $body:expr) => {
        match $self {
            TermState::Pairwise($s) => $body,
            TermState::Cardinality($s) => $body,
            TermState::BiCardinality($s) => $body,
            TermState::General($s) => $body,
        }
    };
}

impl<W: Weight> TermState<W> {
    /// State with zero flow.
    pub fn new(term: &Term<W>) -> Self {
        let zero = vec![W::zero(); term.size()];
        Self::with_flow(term, &zero, Phase::last())
    }

    /// State with the given flow, structures built from scratch for `phase`.
    pub fn with_flow(term: &Term<W>, flow: &[W], phase: Phase<W>) -> Self {
        assert_eq!(flow.len(), term.size(), "flow length must match term size");
        match term {
            Term::Pairwise(t) => TermState::Pairwise(PairwiseState::new(t.a, t.b, flow[0])),
            Term::Cardinality(t) => TermState::Cardinality(CardinalityState::new(t.g.clone(), flow.to_vec())),
            Term::BiCardinality(t) => TermState::BiCardinality(BiCardinalityState::new(
                t.g.clone(),
                flow[..t.first.len()].to_vec(),
                flow[t.first.len()..].to_vec(),
                phase,
            )),
            Term::General(t) => TermState::General(GeneralState::new(t.table.clone(), flow.to_vec())),
        }
    }
}

impl<W: Weight> TermOps<W> for TermState<W> {
    fn kind(&self) -> TermKind {
        dispatch!(self, s => s.kind())
    }
    fn size(&self) -> usize {
        dispatch!(self, s => s.size())
    }
    fn flows(&self) -> Vec<W> {
        dispatch!(self, s => s.flows())
    }
    fn adjust_flow(&mut self, phase: Phase<W>) -> Vec<W> {
        dispatch!(self, s => s.adjust_flow(phase))
    }
    #[inline]
    fn is_reached(&self, pos: usize, epoch: u32) -> bool {
        dispatch!(self, s => s.is_reached(pos, epoch))
    }
    #[inline]
    fn get_neighbors(&mut self, pos: usize, phase: Phase<W>, epoch: u32, out: &mut Vec<usize>) {
        dispatch!(self, s => s.get_neighbors(pos, phase, epoch, out))
    }
    fn send_flow(&mut self, from: usize, to: usize, phase: Phase<W>) {
        dispatch!(self, s => s.send_flow(from, to, phase))
    }
    fn residual_value(&self, contains: &dyn Fn(usize) -> bool, phase: Phase<W>) -> W {
        dispatch!(self, s => s.residual_value(contains, phase))
    }
    fn alpha_bound(&self) -> u64 {
        dispatch!(self, s => s.alpha_bound())
    }
    fn counters(&self) -> TermCounters {
        dispatch!(self, s => s.counters())
    }
    fn check_structures(&self, phase: Phase<W>) -> Result<(), String> {
        dispatch!(self, s => s.check_structures(phase))
    }
}

/// `φ(S)` for `S` given by member positions.
pub(crate) fn flow_sum<W: Weight>(flow: &[W], contains: &dyn Fn(usize) -> bool) -> W {
    flow.iter()
        .enumerate()
        .filter(|&(p, _)| contains(p))
        .fold(W::zero(), |acc, (_, &v)| acc + v)
}
