//! Members sorted by flow value, grouped into supernodes of equal value.
//!
//! Sorted positions are 1-based when talking about `L` and `R`: a group
//! occupying `order[start..end]` has `L = start + 1` and `R = end`.

use crate::weight::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Group<W> {
    pub start: usize,
    pub end: usize,
    pub value: W,
}

#[derive(Clone, Debug)]
pub(crate) struct SortedGroups<W> {
    values: Vec<W>,
    order: Vec<usize>,
    rank: Vec<usize>,
    groups: Vec<Group<W>>,
    group_of: Vec<usize>,
    prefix: Vec<W>,
}

fn before<W: Weight>(values: &[W], a: usize, b: usize) -> bool {
    values[a] > values[b] || (values[a] == values[b] && a < b)
}

impl<W: Weight> SortedGroups<W> {
    pub fn new(values: Vec<W>) -> Self {
        let m = values.len();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| values[b].cmp(&values[a]).then(a.cmp(&b)));
        let mut s = SortedGroups {
            values,
            order,
            rank: vec![0; m],
            groups: Vec::new(),
            group_of: vec![0; m],
            prefix: vec![W::zero(); m + 1],
        };
        s.regroup();
        s
    }

    fn regroup(&mut self) {
        self.groups.clear();
        for (k, &p) in self.order.iter().enumerate() {
            self.rank[p] = k;
            let v = self.values[p];
            match self.groups.last_mut() {
                Some(g) if g.value == v => g.end = k + 1,
                _ => self.groups.push(Group { start: k, end: k + 1, value: v }),
            }
            self.group_of[p] = self.groups.len() - 1;
            self.prefix[k + 1] = self.prefix[k] + v;
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, pos: usize) -> W {
        self.values[pos]
    }

    pub fn values(&self) -> &[W] {
        &self.values
    }

    /// Sum of the `k` largest values.
    pub fn prefix(&self, k: usize) -> W {
        self.prefix[k]
    }

    pub fn groups(&self) -> &[Group<W>] {
        &self.groups
    }

    pub fn group_of(&self, pos: usize) -> usize {
        self.group_of[pos]
    }

    pub fn members(&self, group: usize) -> &[usize] {
        let g = &self.groups[group];
        &self.order[g.start..g.end]
    }

    /// `L(pos)`: first 1-based sorted position holding this value.
    pub fn left(&self, pos: usize) -> usize {
        self.groups[self.group_of[pos]].start + 1
    }

    /// `R(pos)`: last 1-based sorted position holding this value.
    pub fn right(&self, pos: usize) -> usize {
        self.groups[self.group_of[pos]].end
    }

    /// Adds `delta` to one value and restores the order by local moves.
    pub fn add(&mut self, pos: usize, delta: W) {
        self.move_value(pos, delta);
        self.regroup();
    }

    /// Two updates followed by a single regrouping.
    pub fn add_pair(&mut self, a: usize, da: W, b: usize, db: W) {
        self.move_value(a, da);
        self.move_value(b, db);
        self.regroup();
    }

    /// Adds `delta` to every value; the order is unchanged.
    pub fn shift_all(&mut self, delta: W) {
        for v in &mut self.values {
            *v = *v + delta;
        }
        for g in &mut self.groups {
            g.value = g.value + delta;
        }
        for k in 0..self.order.len() {
            self.prefix[k + 1] = self.prefix[k] + self.values[self.order[k]];
        }
    }

    fn move_value(&mut self, pos: usize, delta: W) {
        self.values[pos] = self.values[pos] + delta;
        let mut k = self.rank[pos];
        while k > 0 && before(&self.values, pos, self.order[k - 1]) {
            self.order[k] = self.order[k - 1];
            self.rank[self.order[k]] = k;
            k -= 1;
        }
        while k + 1 < self.order.len() && before(&self.values, self.order[k + 1], pos) {
            self.order[k] = self.order[k + 1];
            self.rank[self.order[k]] = k;
            k += 1;
        }
        self.order[k] = pos;
        self.rank[pos] = k;
    }

    /// Compares against a from-scratch rebuild.
    pub fn check(&self) -> Result<(), String> {
        let fresh = SortedGroups::new(self.values.clone());
        if fresh.order != self.order {
            return Err(format!("order {:?}, expected {:?}", self.order, fresh.order));
        }
        if fresh.groups != self.groups {
            return Err("supernode boundaries differ from rebuild".into());
        }
        if fresh.prefix != self.prefix {
            return Err(format!("prefix sums {:?}, expected {:?}", self.prefix, fresh.prefix));
        }
        if fresh.rank != self.rank || fresh.group_of != self.group_of {
            return Err("position index differs from rebuild".into());
        }
        Ok(())
    }
}

/// Flags stamped with the id of the search that set them, so clearing all
/// flags is a counter increment.
#[derive(Clone, Debug, Default)]
pub(crate) struct Stamps(Vec<u32>);

impl Stamps {
    pub fn new(len: usize) -> Self {
        Stamps(vec![0; len])
    }

    pub fn resize(&mut self, len: usize) {
        self.0.clear();
        self.0.resize(len, 0);
    }

    #[inline]
    pub fn get(&self, k: usize, epoch: u32) -> bool {
        self.0[k] == epoch
    }

    #[inline]
    pub fn set(&mut self, k: usize, epoch: u32) {
        self.0[k] = epoch;
    }
}

/// Adds every not yet reached member of `group` to `out`.
fn add_group<W: Weight>(
    sorted: &SortedGroups<W>,
    group: usize,
    epoch: u32,
    processed: &mut Stamps,
    reached: &mut Stamps,
    base: usize,
    out: &mut Vec<usize>,
) {
    processed.set(group, epoch);
    for &p in sorted.members(group) {
        if !reached.get(base + p, epoch) {
            reached.set(base + p, epoch);
            out.push(base + p);
        }
    }
}

/// Neighbors of `pos` under the rule "`j` has a larger value, or every level
/// `k ∈ [L(pos), R(j) − 1]` passes `meets`". Groups to the left always
/// qualify; to the right the running minimum decides.
#[allow(clippy::too_many_arguments)]
pub(crate) fn threshold_walk<W: Weight>(
    sorted: &SortedGroups<W>,
    level: impl Fn(usize) -> W,
    meets: impl Fn(W) -> bool,
    pos: usize,
    epoch: u32,
    processed: &mut Stamps,
    reached: &mut Stamps,
    base: usize,
    out: &mut Vec<usize>,
) {
    let u = sorted.group_of(pos);
    for v in (0..u).rev() {
        if processed.get(v, epoch) {
            break;
        }
        add_group(sorted, v, epoch, processed, reached, base, out);
    }
    let groups = sorted.groups();
    let own = &groups[u];
    let mut run: Option<W> = (own.start + 1..own.end).map(&level).min();
    if !run.is_none_or(&meets) {
        return;
    }
    if !processed.get(u, epoch) {
        add_group(sorted, u, epoch, processed, reached, base, out);
    }
    for w in u + 1..groups.len() {
        let chunk = (groups[w].start..groups[w].end).map(&level).min();
        run = match (run, chunk) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        if !run.is_none_or(&meets) {
            break;
        }
        if !processed.get(w, epoch) {
            add_group(sorted, w, epoch, processed, reached, base, out);
        }
    }
}

/// Adds every group ending at or before sorted position `bound`, walking
/// left from the rightmost one until an already processed group.
#[allow(clippy::too_many_arguments)]
pub(crate) fn prefix_walk<W: Weight>(
    sorted: &SortedGroups<W>,
    bound: usize,
    epoch: u32,
    processed: &mut Stamps,
    reached: &mut Stamps,
    base: usize,
    out: &mut Vec<usize>,
) {
    let last = sorted.groups().partition_point(|g| g.end <= bound);
    for v in (0..last).rev() {
        if processed.get(v, epoch) {
            break;
        }
        add_group(sorted, v, epoch, processed, reached, base, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_and_bounds() {
        let s = SortedGroups::new(vec![0i64, 3, 0, -1, 3]);
        assert_eq!(s.order, vec![1, 4, 0, 2, 3]);
        assert_eq!((s.left(1), s.right(1)), (1, 2));
        assert_eq!((s.left(2), s.right(2)), (3, 4));
        assert_eq!((s.left(3), s.right(3)), (5, 5));
        assert_eq!(s.prefix, vec![0, 3, 6, 6, 6, 5]);
    }

    #[test]
    fn incremental_moves_match_rebuild() {
        let mut s = SortedGroups::new(vec![2i64, 0, -2, 0, 0]);
        s.add_pair(2, 4, 0, -4);
        s.check().unwrap();
        s.add(3, 1);
        s.check().unwrap();
        s.shift_all(-3);
        s.check().unwrap();
        assert_eq!(s.values(), &[-5, -3, -1, -2, -3]);
    }
}
