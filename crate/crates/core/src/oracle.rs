//! Brute-force references. Nothing here touches the solver or the term
//! state machinery; terms are only read through their values.

use crate::error::{Error, Result};
use crate::instance::{Instance, Term};
use crate::phase::Phase;
use crate::smawk::MatrixView;
use crate::weight::Weight;

/// Largest node count accepted by [`brute_min`].
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport<W> {
    pub minimum: W,
    /// Every minimizer as a node bitmask, ascending.
    pub minimizers: Vec<u32>,
    pub evaluations: u64,
}

impl<W> OracleReport<W> {
    /// The lexicographically smallest minimizer as a sorted node list.
    pub fn smallest_minimizer(&self) -> Vec<usize> {
        let as_list = |mask: u32| (0..32).filter(|&i| mask >> i & 1 == 1).collect::<Vec<usize>>();
        self.minimizers.iter().map(|&m| as_list(m)).min().unwrap_or_default()
    }
}

/// Minimum of `f` over all `2^n` subsets.
pub fn brute_min<W: Weight>(instance: &Instance<W>) -> Result<OracleReport<W>> {
    let n = instance.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooManyNodes { n, limit: BRUTE_FORCE_LIMIT });
    }
    let mut minimum = None;
    let mut minimizers = Vec::new();
    let mut inside = vec![false; n];
    for mask in 0u32..1 << n {
        for (i, b) in inside.iter_mut().enumerate() {
            *b = mask >> i & 1 == 1;
        }
        let v = instance.evaluate_indicator(&inside);
        match minimum {
            Some(best) if v > best => {}
            Some(best) if v == best => minimizers.push(mask),
            _ => {
                minimum = Some(v);
                minimizers.clear();
                minimizers.push(mask);
            }
        }
    }
    Ok(OracleReport { minimum: minimum.expect("at least one subset"), minimizers, evaluations: 1 << n })
}

/// `f^Δ_Q` at a member bitmask, from the plain term value.
fn phase_value<W: Weight>(term: &Term<W>, mask: u64, phase: Phase<W>) -> i128 {
    let v = term.value_bits(mask).wide();
    let rounded = matches!(term, Term::BiCardinality(_) | Term::General(_));
    let two_delta = phase.two_delta().wide();
    if !rounded || two_delta == 1 {
        return v;
    }
    let delta = two_delta / 2;
    let s = mask.count_ones() as i128;
    let m = term.size() as i128;
    delta * v.div_euclid(delta) + delta * s * (m - s)
}

/// `min { f^Δ_Q(S) − φ(S) : i ∈ S ⊆ Q − {j} }` by enumeration.
pub fn naive_exchange_capacity<W: Weight>(term: &Term<W>, flow: &[W], phase: Phase<W>, i: usize, j: usize) -> W {
    let m = term.size();
    assert!(i != j && i < m && j < m);
    let mut best: Option<i128> = None;
    for mask in 0u64..1 << m {
        if mask >> i & 1 == 0 || mask >> j & 1 == 1 {
            continue;
        }
        let phi: i128 = (0..m).filter(|&p| mask >> p & 1 == 1).map(|p| flow[p].wide()).sum();
        let r = phase_value(term, mask, phase) - phi;
        best = Some(best.map_or(r, |b| b.min(r)));
    }
    num_traits::NumCast::from(best.expect("i in S, j outside")).expect("capacity fits the weight type")
}

/// All arcs `(i, j)` of the residual arc set of one term, by member position.
///
/// Cardinality terms use their interval rule directly, with the `3Δ/2`
/// threshold; every other kind thresholds the exchange capacity at `⌈Δ⌉`.
pub fn naive_arc_set<W: Weight>(term: &Term<W>, flow: &[W], phase: Phase<W>) -> Vec<(usize, usize)> {
    let m = term.size();
    let mut arcs = Vec::new();
    if let Term::Cardinality(t) = term {
        let z: Vec<i128> = flow.iter().map(|v| v.wide()).collect();
        let mut sorted = z.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let mut level = vec![0i128; m + 1];
        let mut prefix = 0i128;
        for k in 0..=m {
            if k > 0 {
                prefix += sorted[k - 1];
            }
            level[k] = t.g[k].wide() - prefix;
        }
        let left = |i: usize| 1 + z.iter().filter(|&&v| v > z[i]).count();
        let right = |i: usize| z.iter().filter(|&&v| v >= z[i]).count();
        let two_delta = phase.two_delta().wide();
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                let ok = z[i] < z[j] || (left(i)..right(j)).all(|k| 4 * level[k] >= 3 * two_delta);
                if ok {
                    arcs.push((i, j));
                }
            }
        }
        return arcs;
    }
    let c = phase.ceil_delta();
    for i in 0..m {
        for j in 0..m {
            if i != j && naive_exchange_capacity(term, flow, phase, i, j) >= c {
                arcs.push((i, j));
            }
        }
    }
    arcs
}

/// Leftmost minimum of every row by a full scan.
pub fn naive_row_minima<M: MatrixView>(view: &M) -> Vec<usize> {
    (0..view.rows())
        .map(|r| {
            let mut best = 0;
            for c in 1..view.cols() {
                if view.entry(r, c) < view.entry(r, best) {
                    best = c;
                }
            }
            best
        })
        .collect()
}
