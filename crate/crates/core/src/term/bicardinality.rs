use super::sorted::{prefix_walk, threshold_walk, SortedGroups, Stamps};
use super::{flow_sum, TermCounters, TermOps};
use crate::instance::TermKind;
use crate::phase::Phase;
use crate::smawk::{column_minima, row_minima, Counting, FnMatrix};
use crate::weight::Weight;

/// `f(S) = g(|S ∩ Q'|, |S ∩ Q''|)`, run under the rounded phase function.
///
/// Member positions `0..m'` are `Q'` (flows `y`), `m'..m` are `Q''`
/// (flows `z`). The residual grid is
/// `ḡ(k', k'') = g^Δ(k', k'') − Y(k') − Z(k'')` where `Y`, `Z` are prefix
/// sums of the sorted flows; it is Monge, so its row and column minima come
/// from SMAWK.
#[derive(Clone, Debug)]
pub struct BiCardinalityState<W> {
    g: Vec<Vec<W>>,
    y: SortedGroups<W>,
    z: SortedGroups<W>,
    phase: Phase<W>,
    cache: Option<BfsCache<W>>,
    reached: Stamps,
    within_y: Stamps,
    within_z: Stamps,
    to_z: Stamps,
    to_y: Stamps,
    counters: TermCounters,
}

/// Data derived from the flow once per breadth-first search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BfsCache<W> {
    pub phase: Phase<W>,
    /// `k''(k')`: leftmost minimum column of each row.
    pub row_min: Vec<usize>,
    /// `k'(k'')`: topmost minimum row of each column.
    pub col_min: Vec<usize>,
    /// `ḡ(k', k''(k'))`.
    pub row_level: Vec<W>,
    /// `ḡ(k'(k''), k'')`.
    pub col_level: Vec<W>,
    /// `b(a)` for `a ∈ 1..=m'`; index 0 unused.
    pub reach_second: Vec<usize>,
    /// `b'(a)` for `a ∈ 1..=m''`; index 0 unused.
    pub reach_first: Vec<usize>,
}

impl<W: Weight> BiCardinalityState<W> {
    pub fn new(g: Vec<Vec<W>>, y: Vec<W>, z: Vec<W>, phase: Phase<W>) -> Self {
        assert_eq!(g.len(), y.len() + 1);
        assert!(g.iter().all(|row| row.len() == z.len() + 1));
        let m = y.len() + z.len();
        let y = SortedGroups::new(y);
        let z = SortedGroups::new(z);
        let (gy, gz) = (y.groups().len(), z.groups().len());
        BiCardinalityState {
            g,
            y,
            z,
            phase,
            cache: None,
            reached: Stamps::new(m),
            within_y: Stamps::new(gy),
            within_z: Stamps::new(gz),
            to_z: Stamps::new(gz),
            to_y: Stamps::new(gy),
            counters: TermCounters::default(),
        }
    }

    fn m1(&self) -> usize {
        self.y.len()
    }

    fn m2(&self) -> usize {
        self.z.len()
    }

    /// `g^Δ(k', k'')`.
    pub fn rounded(&self, k1: usize, k2: usize, phase: Phase<W>) -> W {
        phase.round(self.g[k1][k2], k1 + k2, self.m1() + self.m2())
    }

    /// `ḡ(k', k'')` under `phase`.
    pub fn level(&self, k1: usize, k2: usize, phase: Phase<W>) -> W {
        self.rounded(k1, k2, phase) - self.y.prefix(k1) - self.z.prefix(k2)
    }

    pub fn cache(&self) -> Option<&BfsCache<W>> {
        self.cache.as_ref()
    }

    fn compute_cache(&self, phase: Phase<W>) -> (BfsCache<W>, u64) {
        let (m1, m2) = (self.m1(), self.m2());
        let grid = FnMatrix::new(m1 + 1, m2 + 1, |r, c| self.level(r, c, phase));
        let counted = Counting::new(&grid);
        let row_min = row_minima(&counted);
        let col_min = column_minima(&counted);
        let entries = counted.count();
        let row_level: Vec<W> = (0..=m1).map(|r| self.level(r, row_min[r], phase)).collect();
        let col_level: Vec<W> = (0..=m2).map(|c| self.level(col_min[c], c, phase)).collect();
        let reach = |minima: &[usize], levels: &[W], len: usize| {
            let mut b = vec![0; len + 1];
            b[len] = minima[len];
            for a in (1..len).rev() {
                b[a] = if levels[a] > W::zero() { b[a + 1] } else { b[a + 1].min(minima[a]) };
            }
            b
        };
        let reach_second = reach(&row_min, &row_level, m1);
        let reach_first = reach(&col_min, &col_level, m2);
        let cache = BfsCache { phase, row_min, col_min, row_level, col_level, reach_second, reach_first };
        (cache, entries)
    }

    /// Computes row/column minima and reach bounds for a new search.
    pub fn prepare_bfs(&mut self, phase: Phase<W>) {
        if self.cache.as_ref().is_some_and(|c| c.phase == phase) {
            return;
        }
        let (cache, entries) = self.compute_cache(phase);
        self.counters.matrix_entries += entries;
        self.cache = Some(cache);
    }

    fn invalidate(&mut self) {
        self.cache = None;
        self.within_y.resize(self.y.groups().len());
        self.to_y.resize(self.y.groups().len());
        self.within_z.resize(self.z.groups().len());
        self.to_z.resize(self.z.groups().len());
    }

    /// Largest amount member `pos` can be raised by without leaving the
    /// submodular polyhedron of `g^Δ`.
    fn saturation(&self, pos: usize, phase: Phase<W>) -> W {
        let (m1, m2) = (self.m1(), self.m2());
        let mut best: Option<W> = None;
        if pos < m1 {
            let (l, v) = (self.y.left(pos), self.y.value(pos));
            for k1 in 1..=m1 {
                let ys = if l <= k1 { self.y.prefix(k1) } else { v + self.y.prefix(k1 - 1) };
                for k2 in 0..=m2 {
                    let r = self.rounded(k1, k2, phase) - ys - self.z.prefix(k2);
                    best = Some(best.map_or(r, |b| b.min(r)));
                }
            }
        } else {
            let p = pos - m1;
            let (l, v) = (self.z.left(p), self.z.value(p));
            for k2 in 1..=m2 {
                let zs = if l <= k2 { self.z.prefix(k2) } else { v + self.z.prefix(k2 - 1) };
                for k1 in 0..=m1 {
                    let r = self.rounded(k1, k2, phase) - self.y.prefix(k1) - zs;
                    best = Some(best.map_or(r, |b| b.min(r)));
                }
            }
        }
        best.expect("both member groups are nonempty")
    }
}

impl<W: Weight> TermOps<W> for BiCardinalityState<W> {
    fn kind(&self) -> TermKind {
        TermKind::BiCardinality
    }

    fn size(&self) -> usize {
        self.m1() + self.m2()
    }

    fn flows(&self) -> Vec<W> {
        self.y.values().iter().chain(self.z.values()).copied().collect()
    }

    fn adjust_flow(&mut self, phase: Phase<W>) -> Vec<W> {
        self.counters.adjust_flow += 1;
        let before = self.flows();
        let (m1, m2) = (self.m1(), self.m2());
        let m = m1 + m2;
        let lower = W::of(m) * phase.ceil_delta();
        self.y.shift_all(-lower);
        self.z.shift_all(-lower);
        self.phase = phase;
        for pos in 0..m {
            let sat = self.saturation(pos, phase);
            debug_assert!(sat >= W::zero(), "shifted flow left the submodular polyhedron");
            if pos < m1 {
                self.y.add(pos, sat);
            } else {
                self.z.add(pos - m1, sat);
            }
        }
        self.counters.oracle_evaluations += (m * (m1 + 1) * (m2 + 1)) as u64;
        self.invalidate();
        self.flows().iter().zip(&before).map(|(&a, &b)| a - b).collect()
    }

    #[inline]
    fn is_reached(&self, pos: usize, epoch: u32) -> bool {
        self.reached.get(pos, epoch)
    }

    fn get_neighbors(&mut self, pos: usize, phase: Phase<W>, epoch: u32, out: &mut Vec<usize>) {
        assert!(!self.reached.get(pos, epoch), "member {pos} already reached");
        self.counters.get_neighbors += 1;
        self.prepare_bfs(phase);
        self.reached.set(pos, epoch);
        let m1 = self.m1();
        let cache = self.cache.as_ref().expect("prepared above");
        let positive = |x: W| x > W::zero();
        if pos < m1 {
            let levels = &cache.row_level;
            threshold_walk(
                &self.y,
                |k| levels[k],
                positive,
                pos,
                epoch,
                &mut self.within_y,
                &mut self.reached,
                0,
                out,
            );
            let bound = cache.reach_second[self.y.left(pos)];
            prefix_walk(&self.z, bound, epoch, &mut self.to_z, &mut self.reached, m1, out);
        } else {
            let p = pos - m1;
            let levels = &cache.col_level;
            threshold_walk(
                &self.z,
                |k| levels[k],
                positive,
                p,
                epoch,
                &mut self.within_z,
                &mut self.reached,
                m1,
                out,
            );
            let bound = cache.reach_first[self.z.left(p)];
            prefix_walk(&self.y, bound, epoch, &mut self.to_y, &mut self.reached, 0, out);
        }
    }

    fn send_flow(&mut self, from: usize, to: usize, phase: Phase<W>) {
        self.counters.send_flow += 1;
        let c = phase.ceil_delta();
        let m1 = self.m1();
        match (from < m1, to < m1) {
            (true, true) => self.y.add_pair(from, c, to, -c),
            (false, false) => self.z.add_pair(from - m1, c, to - m1, -c),
            (true, false) => {
                self.y.add(from, c);
                self.z.add(to - m1, -c);
            }
            (false, true) => {
                self.z.add(from - m1, c);
                self.y.add(to, -c);
            }
        }
        self.invalidate();
    }

    fn residual_value(&self, contains: &dyn Fn(usize) -> bool, phase: Phase<W>) -> W {
        let (m1, m) = (self.m1(), self.size());
        let k1 = (0..m1).filter(|&p| contains(p)).count();
        let k2 = (m1..m).filter(|&p| contains(p)).count();
        self.rounded(k1, k2, phase) - flow_sum(&self.flows(), contains)
    }

    fn alpha_bound(&self) -> u64 {
        let m = self.size() as u64;
        5 * m * m
    }

    fn counters(&self) -> TermCounters {
        self.counters
    }

    fn check_structures(&self, _phase: Phase<W>) -> Result<(), String> {
        self.y.check().map_err(|e| format!("Q' order: {e}"))?;
        self.z.check().map_err(|e| format!("Q'' order: {e}"))?;
        if let Some(cache) = &self.cache {
            let (fresh, _) = self.compute_cache(cache.phase);
            if &fresh != cache {
                return Err("per-search minima differ from recomputation".into());
            }
            let (m1, m2) = (self.m1(), self.m2());
            for r in 0..=m1 {
                let scan = (0..=m2).min_by_key(|&c| (self.level(r, c, cache.phase), c)).unwrap();
                if scan != cache.row_min[r] {
                    return Err(format!("row {r}: minimum at {}, scan gives {scan}", cache.row_min[r]));
                }
            }
            for c in 0..=m2 {
                let scan = (0..=m1).min_by_key(|&r| (self.level(r, c, cache.phase), r)).unwrap();
                if scan != cache.col_min[c] {
                    return Err(format!("column {c}: minimum at {}, scan gives {scan}", cache.col_min[c]));
                }
            }
        }
        Ok(())
    }
}
