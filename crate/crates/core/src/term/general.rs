use super::sorted::Stamps;
use super::{flow_sum, TermCounters, TermOps};
use crate::instance::TermKind;
use crate::phase::Phase;
use crate::weight::Weight;

/// Arbitrary submodular term given by its full table, run under the rounded
/// phase function. Neighbor queries use the minimal zero set of each member,
/// computed for all members in one pass over the table.
#[derive(Clone, Debug)]
pub struct GeneralState<W> {
    table: Vec<W>,
    phi: Vec<W>,
    zero_sets: Option<(Phase<W>, Vec<u32>)>,
    reached: Stamps,
    counters: TermCounters,
}

impl<W: Weight> GeneralState<W> {
    pub fn new(table: Vec<W>, phi: Vec<W>) -> Self {
        assert_eq!(table.len(), 1 << phi.len());
        let m = phi.len();
        GeneralState { table, phi, zero_sets: None, reached: Stamps::new(m), counters: TermCounters::default() }
    }

    fn m(&self) -> usize {
        self.phi.len()
    }

    /// `f^Δ(S) − φ(S)` for every bitmask `S`.
    fn residuals(&self, phase: Phase<W>) -> Vec<W> {
        let m = self.m();
        let mut sums = vec![W::zero(); self.table.len()];
        for mask in 1..self.table.len() {
            let low = mask.trailing_zeros() as usize;
            sums[mask] = sums[mask & (mask - 1)] + self.phi[low];
        }
        self.table
            .iter()
            .zip(&sums)
            .enumerate()
            .map(|(mask, (&f, &s))| phase.round(f, mask.count_ones() as usize, m) - s)
            .collect()
    }

    fn compute_zero_sets(&self, phase: Phase<W>) -> Vec<u32> {
        let m = self.m();
        let full = (1u32 << m) - 1;
        let mut sets = vec![full; m];
        for (mask, r) in self.residuals(phase).into_iter().enumerate() {
            if r == W::zero() {
                let mut bits = mask as u32;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    sets[i] &= mask as u32;
                    bits &= bits - 1;
                }
            }
        }
        sets
    }

    fn prepare(&mut self, phase: Phase<W>) {
        if self.zero_sets.as_ref().is_some_and(|(p, _)| *p == phase) {
            return;
        }
        self.counters.oracle_evaluations += self.table.len() as u64;
        self.zero_sets = Some((phase, self.compute_zero_sets(phase)));
    }

    /// The smallest set containing `pos` with zero residual value, as a bitmask.
    pub fn minimal_zero_set(&self, pos: usize, phase: Phase<W>) -> u32 {
        match &self.zero_sets {
            Some((p, sets)) if *p == phase => sets[pos],
            _ => self.compute_zero_sets(phase)[pos],
        }
    }

    /// `min { f^Δ(S) − φ(S) : from ∈ S, to ∉ S }`.
    pub fn exchange_capacity(&self, from: usize, to: usize, phase: Phase<W>) -> W {
        self.residuals(phase)
            .into_iter()
            .enumerate()
            .filter(|&(mask, _)| mask >> from & 1 == 1 && mask >> to & 1 == 0)
            .map(|(_, r)| r)
            .min()
            .expect("some set separates two distinct members")
    }
}

impl<W: Weight> TermOps<W> for GeneralState<W> {
    fn kind(&self) -> TermKind {
        TermKind::General
    }

    fn size(&self) -> usize {
        self.m()
    }

    fn flows(&self) -> Vec<W> {
        self.phi.clone()
    }

    fn adjust_flow(&mut self, phase: Phase<W>) -> Vec<W> {
        self.counters.adjust_flow += 1;
        let m = self.m();
        let before = self.phi.clone();
        let lower = W::of(m) * phase.ceil_delta();
        for v in &mut self.phi {
            *v = *v - lower;
        }
        let mut residual = self.residuals(phase);
        for i in 0..m {
            let bit = 1usize << i;
            let sat = residual
                .iter()
                .enumerate()
                .filter(|&(mask, _)| mask & bit != 0)
                .map(|(_, &r)| r)
                .min()
                .expect("nonempty term");
            debug_assert!(sat >= W::zero(), "shifted flow left the submodular polyhedron");
            self.phi[i] = self.phi[i] + sat;
            for (mask, r) in residual.iter_mut().enumerate() {
                if mask & bit != 0 {
                    *r = *r - sat;
                }
            }
        }
        self.counters.oracle_evaluations += ((m + 1) * self.table.len()) as u64;
        self.zero_sets = None;
        let delta: Vec<W> = self.phi.iter().zip(&before).map(|(&a, &b)| a - b).collect();
        debug_assert!(
            delta.iter().fold(W::zero(), |acc, d| acc + d.abs())
                <= W::of(2 * m * m) * phase.ceil_delta()
        );
        delta
    }

    #[inline]
    fn is_reached(&self, pos: usize, epoch: u32) -> bool {
        self.reached.get(pos, epoch)
    }

    fn get_neighbors(&mut self, pos: usize, phase: Phase<W>, epoch: u32, out: &mut Vec<usize>) {
        assert!(!self.reached.get(pos, epoch), "member {pos} already reached");
        self.counters.get_neighbors += 1;
        self.prepare(phase);
        self.reached.set(pos, epoch);
        let sets = &self.zero_sets.as_ref().expect("prepared above").1;
        let mut bits = sets[pos] & !(1 << pos);
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if !self.reached.get(j, epoch) {
                self.reached.set(j, epoch);
                out.push(j);
            }
        }
    }

    fn send_flow(&mut self, from: usize, to: usize, phase: Phase<W>) {
        self.counters.send_flow += 1;
        let c = phase.ceil_delta();
        self.phi[from] = self.phi[from] + c;
        self.phi[to] = self.phi[to] - c;
        self.zero_sets = None;
    }

    fn residual_value(&self, contains: &dyn Fn(usize) -> bool, phase: Phase<W>) -> W {
        let m = self.m();
        let mask = (0..m).filter(|&p| contains(p)).fold(0usize, |acc, p| acc | 1 << p);
        phase.round(self.table[mask], mask.count_ones() as usize, m) - flow_sum(&self.phi, contains)
    }

    fn alpha_bound(&self) -> u64 {
        let m = self.m() as u64;
        5 * m * m
    }

    fn counters(&self) -> TermCounters {
        self.counters
    }

    fn check_structures(&self, _phase: Phase<W>) -> Result<(), String> {
        if let Some((p, sets)) = &self.zero_sets {
            if *sets != self.compute_zero_sets(*p) {
                return Err("cached zero sets differ from recomputation".into());
            }
        }
        Ok(())
    }
}
