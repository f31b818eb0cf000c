use super::{TermCounters, TermOps};
use crate::instance::TermKind;
use crate::phase::Phase;
use crate::weight::Weight;

/// Two-member term. Only `φ_Qi` is stored; `φ_Qj = −φ_Qi`.
#[derive(Clone, Debug)]
pub struct PairwiseState<W> {
    a: W,
    b: W,
    phi: W,
    reached: [u32; 2],
    counters: TermCounters,
}

impl<W: Weight> PairwiseState<W> {
    pub fn new(a: W, b: W, phi: W) -> Self {
        PairwiseState { a, b, phi, reached: [0; 2], counters: TermCounters::default() }
    }

    pub fn phi(&self) -> W {
        self.phi
    }

    /// Residual capacity of the arc leaving `pos`.
    #[inline]
    fn slack(&self, pos: usize) -> W {
        if pos == 0 {
            self.a - self.phi
        } else {
            self.b + self.phi
        }
    }
}

impl<W: Weight> TermOps<W> for PairwiseState<W> {
    fn kind(&self) -> TermKind {
        TermKind::Pairwise
    }

    fn size(&self) -> usize {
        2
    }

    fn flows(&self) -> Vec<W> {
        vec![self.phi, -self.phi]
    }

    fn adjust_flow(&mut self, _phase: Phase<W>) -> Vec<W> {
        self.counters.adjust_flow += 1;
        vec![W::zero(); 2]
    }

    #[inline]
    fn is_reached(&self, pos: usize, epoch: u32) -> bool {
        self.reached[pos] == epoch
    }

    #[inline]
    fn get_neighbors(&mut self, pos: usize, phase: Phase<W>, epoch: u32, out: &mut Vec<usize>) {
        assert!(self.reached[pos] != epoch, "member {pos} already reached");
        self.counters.get_neighbors += 1;
        self.reached[pos] = epoch;
        let other = 1 - pos;
        if self.reached[other] != epoch && self.slack(pos) >= phase.ceil_delta() {
            self.reached[other] = epoch;
            out.push(other);
        }
    }

    fn send_flow(&mut self, from: usize, to: usize, phase: Phase<W>) {
        debug_assert_ne!(from, to);
        self.counters.send_flow += 1;
        let c = phase.ceil_delta();
        self.phi = if from == 0 { self.phi + c } else { self.phi - c };
    }

    fn residual_value(&self, contains: &dyn Fn(usize) -> bool, _phase: Phase<W>) -> W {
        match (contains(0), contains(1)) {
            (true, false) => self.slack(0),
            (false, true) => self.slack(1),
            _ => W::zero(),
        }
    }

    fn alpha_bound(&self) -> u64 {
        2
    }

    fn counters(&self) -> TermCounters {
        self.counters
    }

    fn check_structures(&self, _phase: Phase<W>) -> Result<(), String> {
        if -self.b <= self.phi && self.phi <= self.a {
            Ok(())
        } else {
            Err(format!("phi {} outside [{}, {}]", self.phi, -self.b, self.a))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn neighbors(s: &mut PairwiseState<i64>, pos: usize, two_delta: i64, epoch: u32) -> Vec<usize> {
        let mut out = Vec::new();
        s.get_neighbors(pos, Phase::from_two_delta(two_delta), epoch, &mut out);
        out
    }

    #[test]
    fn arcs_follow_slack() {
        let mut s = PairwiseState::new(3i64, 2, 0);
        assert_eq!(neighbors(&mut s, 0, 4, 1), vec![1]);
        assert_eq!(neighbors(&mut s, 1, 4, 2), vec![0]);

        let mut s = PairwiseState::new(3i64, 2, 3);
        assert!(neighbors(&mut s, 0, 2, 1).is_empty());
        assert_eq!(neighbors(&mut s, 1, 2, 2), vec![0]);

        let mut s = PairwiseState::new(0i64, 0, 0);
        for t in [1, 2, 8] {
            assert!(neighbors(&mut s, 0, t, t as u32).is_empty());
            assert!(neighbors(&mut s, 1, t, 100 + t as u32).is_empty());
        }
    }

    #[test]
    fn reached_neighbor_is_skipped() {
        let mut s = PairwiseState::new(3i64, 2, 0);
        assert_eq!(neighbors(&mut s, 0, 2, 5), vec![1]);
        assert!(s.is_reached(1, 5));
        assert!(!s.is_reached(1, 6));
    }

    #[test]
    fn adjust_is_identity() {
        let mut s = PairwiseState::new(3i64, 2, 2);
        assert_eq!(s.adjust_flow(Phase::from_two_delta(4)), vec![0, 0]);
        assert_eq!(s.phi(), 2);
    }

    #[test]
    fn pushes() {
        let mut s = PairwiseState::new(3i64, 2, 0);
        s.send_flow(0, 1, Phase::from_two_delta(4));
        assert_eq!(s.phi(), 2);
        s.check_structures(Phase::last()).unwrap();
        s.send_flow(1, 0, Phase::from_two_delta(4));
        assert_eq!(s.phi(), 0);

        let mut s = PairwiseState::new(1i64, 1, 1);
        s.send_flow(1, 0, Phase::last());
        assert_eq!(s.phi(), 0);
    }
}
