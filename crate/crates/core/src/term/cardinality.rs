use super::sorted::{threshold_walk, SortedGroups, Stamps};
use super::{flow_sum, TermCounters, TermOps};
use crate::instance::TermKind;
use crate::phase::Phase;
use crate::weight::Weight;

/// `f(S) = g(|S|)` with concave `g`.
///
/// Keeps the member flows `z` sorted in supernodes and the array
/// `ḡ(k) = g(k) − (sum of the k largest z)`; the flow is feasible iff
/// `ḡ ≥ 0` and `z(Q) = 0`.
#[derive(Clone, Debug)]
pub struct CardinalityState<W> {
    g: Vec<W>,
    sorted: SortedGroups<W>,
    gbar: Vec<W>,
    reached: Stamps,
    processed: Stamps,
    counters: TermCounters,
}

fn levels<W: Weight>(g: &[W], sorted: &SortedGroups<W>) -> Vec<W> {
    (0..g.len()).map(|k| g[k] - sorted.prefix(k)).collect()
}

impl<W: Weight> CardinalityState<W> {
    pub fn new(g: Vec<W>, z: Vec<W>) -> Self {
        assert_eq!(g.len(), z.len() + 1);
        let m = z.len();
        let sorted = SortedGroups::new(z);
        let gbar = levels(&g, &sorted);
        let groups = sorted.groups().len();
        CardinalityState {
            g,
            sorted,
            gbar,
            reached: Stamps::new(m),
            processed: Stamps::new(groups),
            counters: TermCounters::default(),
        }
    }

    /// `ḡ(0..=m)`.
    pub fn gbar(&self) -> &[W] {
        &self.gbar
    }

    /// `(L, R)` of every member, 1-based sorted positions.
    pub fn bounds(&self, pos: usize) -> (usize, usize) {
        (self.sorted.left(pos), self.sorted.right(pos))
    }

    pub fn supernode_count(&self) -> usize {
        self.sorted.groups().len()
    }
}

impl<W: Weight> TermOps<W> for CardinalityState<W> {
    fn kind(&self) -> TermKind {
        TermKind::Cardinality
    }

    fn size(&self) -> usize {
        self.sorted.len()
    }

    fn flows(&self) -> Vec<W> {
        self.sorted.values().to_vec()
    }

    fn adjust_flow(&mut self, _phase: Phase<W>) -> Vec<W> {
        self.counters.adjust_flow += 1;
        vec![W::zero(); self.size()]
    }

    #[inline]
    fn is_reached(&self, pos: usize, epoch: u32) -> bool {
        self.reached.get(pos, epoch)
    }

    fn get_neighbors(&mut self, pos: usize, phase: Phase<W>, epoch: u32, out: &mut Vec<usize>) {
        assert!(!self.reached.get(pos, epoch), "member {pos} already reached");
        self.counters.get_neighbors += 1;
        self.reached.set(pos, epoch);
        let gbar = &self.gbar;
        threshold_walk(
            &self.sorted,
            |k| gbar[k],
            |x| phase.meets_three_halves(x),
            pos,
            epoch,
            &mut self.processed,
            &mut self.reached,
            0,
            out,
        );
    }

    fn send_flow(&mut self, from: usize, to: usize, phase: Phase<W>) {
        self.counters.send_flow += 1;
        let c = phase.ceil_delta();
        let (zi, zj) = (self.sorted.value(from), self.sorted.value(to));
        let (li, rj) = (self.sorted.left(from), self.sorted.right(to));
        let exact = if zi + c + c <= zj {
            for k in rj..li {
                self.gbar[k] = self.gbar[k] + c;
            }
            true
        } else if zi + c == zj {
            true
        } else if zi >= zj {
            for k in li..rj {
                self.gbar[k] = self.gbar[k] - c;
            }
            true
        } else {
            // Values off the ⌈Δ⌉ grid; only reachable through hand-built states.
            false
        };
        self.sorted.add_pair(from, c, to, -c);
        if !exact {
            self.gbar = levels(&self.g, &self.sorted);
        }
        self.processed.resize(self.sorted.groups().len());
    }

    fn residual_value(&self, contains: &dyn Fn(usize) -> bool, _phase: Phase<W>) -> W {
        let z = self.sorted.values();
        let k = (0..z.len()).filter(|&p| contains(p)).count();
        self.g[k] - flow_sum(z, contains)
    }

    fn alpha_bound(&self) -> u64 {
        3 * (self.size() as u64 - 1)
    }

    fn counters(&self) -> TermCounters {
        self.counters
    }

    fn check_structures(&self, _phase: Phase<W>) -> Result<(), String> {
        self.sorted.check()?;
        let fresh = levels(&self.g, &self.sorted);
        if fresh != self.gbar {
            return Err(format!("gbar {:?}, expected {:?}", self.gbar, fresh));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closure(s: &mut CardinalityState<i64>, pos: usize, two_delta: i64, epoch: u32) -> Vec<usize> {
        let mut out = Vec::new();
        s.get_neighbors(pos, Phase::from_two_delta(two_delta), epoch, &mut out);
        out.sort_unstable();
        out
    }

    #[test]
    fn rebuild_examples() {
        let s = CardinalityState::new(vec![0i64, 2, 2, 0], vec![0, 0, 0]);
        assert_eq!(s.supernode_count(), 1);
        assert_eq!(s.bounds(1), (1, 3));
        assert_eq!(s.gbar(), &[0, 2, 2, 0]);

        let s = CardinalityState::new(vec![0i64, 2, 2, 0], vec![1, -1, 0]);
        assert_eq!(s.supernode_count(), 3);
        assert_eq!(s.gbar(), &[0, 1, 1, 0]);
    }

    #[test]
    fn neighbor_examples() {
        let mut s = CardinalityState::new(vec![0i64, 2, 2, 0], vec![0, 0, 0]);
        for (e, i) in (0..3).enumerate() {
            let expect: Vec<usize> = (0..3).filter(|&j| j != i).collect();
            assert_eq!(closure(&mut s, i, 2, e as u32 + 1), expect);
        }

        let mut s = CardinalityState::new(vec![0i64, 2, 2, 0], vec![1, -1, 0]);
        assert!(closure(&mut s, 0, 2, 1).is_empty());
        assert_eq!(closure(&mut s, 1, 2, 2), vec![0, 2]);
        // At Δ = 1/2 the threshold is ḡ ≥ 1, which the levels (1, 1) meet.
        assert_eq!(closure(&mut s, 0, 1, 3), vec![1, 2]);
    }

    #[test]
    fn send_flow_cases() {
        let mut s = CardinalityState::new(vec![0i64, 2, 2, 0], vec![0, 0, 0]);
        s.send_flow(0, 1, Phase::last());
        assert_eq!(s.flows(), vec![1, -1, 0]);
        assert_eq!(s.gbar(), &[0, 1, 1, 0]);
        s.check_structures(Phase::last()).unwrap();

        // Values one step apart swap; the sorted sequence is unchanged.
        let mut s = CardinalityState::new(vec![0i64, 3, 3, 0], vec![-1, 0, 1]);
        assert_eq!(s.gbar(), &[0, 2, 2, 0]);
        s.send_flow(0, 1, Phase::last());
        assert_eq!(s.flows(), vec![0, -1, 1]);
        assert_eq!(s.gbar(), &[0, 2, 2, 0]);
        s.check_structures(Phase::last()).unwrap();

        // Two steps apart is the widening case.
        let mut s = CardinalityState::new(vec![0i64, 3, 0], vec![-1, 1]);
        s.send_flow(0, 1, Phase::last());
        assert_eq!(s.gbar(), &[0, 3, 0]);
        s.check_structures(Phase::last()).unwrap();

        let mut s = CardinalityState::new(vec![0i64, 4, 0], vec![-2, 2]);
        assert_eq!(s.gbar(), &[0, 2, 0]);
        s.send_flow(0, 1, Phase::last());
        assert_eq!(s.gbar(), &[0, 3, 0]);
        s.check_structures(Phase::last()).unwrap();
    }

    #[test]
    fn processed_groups_are_not_revisited() {
        let mut s = CardinalityState::new(vec![0i64, 5, 8, 9, 8, 5, 0], vec![3, 3, 1, 0, -3, -4]);
        let mut seen = Vec::new();
        for pos in [5, 4, 3, 2, 1, 0] {
            if !s.is_reached(pos, 7) {
                s.get_neighbors(pos, Phase::last(), 7, &mut seen);
            }
        }
        let mut sorted = seen.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), seen.len());
    }
}
