//! Problem representation.
//!
//! An instance describes the set function
//!
//! ```text
//! f(S) = offset + Σ_{i∈S} c_it + Σ_{i∉S} c_si + Σ_Q f_Q(S ∩ Q)
//! ```
//!
//! over nodes `0..n`. Each term `f_Q` is one of four declared kinds. Terms are
//! expected in normalized form (`min f_Q = f_Q(∅) = f_Q(Q) = 0`); the
//! `normalize_*` functions move the modular part of an arbitrary submodular
//! term into the unary capacities and the offset.

use std::fmt;

use crate::error::{Error, Result};
use crate::phase::Phase;
use crate::weight::Weight;

/// Default cap on the member count of a general (table) term.
pub const DEFAULT_GENERAL_CAP: usize = 16;
/// Hard cap on the member count of a general term.
pub const MAX_GENERAL_CAP: usize = 20;
/// Terms up to this size are checked for submodularity by enumeration.
pub const EXHAUSTIVE_CHECK_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermKind {
    Pairwise,
    Cardinality,
    BiCardinality,
    General,
}

impl TermKind {
    pub const ALL: [TermKind; 4] = [
        TermKind::Pairwise,
        TermKind::Cardinality,
        TermKind::BiCardinality,
        TermKind::General,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TermKind::Pairwise => "pairwise",
            TermKind::Cardinality => "cardinality",
            TermKind::BiCardinality => "bicardinality",
            TermKind::General => "general",
        }
    }
}

impl fmt::Display for TermKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `f({i}) = a`, `f({j}) = b`, zero on `∅` and `{i, j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairwiseTerm<W> {
    pub members: [usize; 2],
    pub a: W,
    pub b: W,
}

/// `f(S) = g(|S|)` with `g` indexed `0..=m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CardinalityTerm<W> {
    pub members: Vec<usize>,
    pub g: Vec<W>,
}

/// `f(S) = g(|S ∩ Q'|, |S ∩ Q''|)`; `g[k'][k'']` for `k' ∈ 0..=m'`, `k'' ∈ 0..=m''`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiCardinalityTerm<W> {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub g: Vec<Vec<W>>,
}

/// Full value table; bit `k` of the index stands for `members[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralTerm<W> {
    pub members: Vec<usize>,
    pub table: Vec<W>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term<W> {
    Pairwise(PairwiseTerm<W>),
    Cardinality(CardinalityTerm<W>),
    BiCardinality(BiCardinalityTerm<W>),
    General(GeneralTerm<W>),
}

impl<W: Weight> Term<W> {
    /// Pairwise term; members are stored in ascending order.
    pub fn pairwise(i: usize, j: usize, a: W, b: W) -> Self {
        if i <= j {
            Term::Pairwise(PairwiseTerm { members: [i, j], a, b })
        } else {
            Term::Pairwise(PairwiseTerm { members: [j, i], a: b, b: a })
        }
    }

    pub fn cardinality(mut members: Vec<usize>, g: Vec<W>) -> Self {
        members.sort_unstable();
        Term::Cardinality(CardinalityTerm { members, g })
    }

    pub fn bicardinality(mut first: Vec<usize>, mut second: Vec<usize>, g: Vec<Vec<W>>) -> Self {
        first.sort_unstable();
        second.sort_unstable();
        Term::BiCardinality(BiCardinalityTerm { first, second, g })
    }

    /// General term. The table is indexed with the lowest member as bit 0,
    /// so sorting the members leaves the table untouched.
    pub fn general(mut members: Vec<usize>, table: Vec<W>) -> Self {
        members.sort_unstable();
        Term::General(GeneralTerm { members, table })
    }

    pub fn kind(&self) -> TermKind {
        match self {
            Term::Pairwise(_) => TermKind::Pairwise,
            Term::Cardinality(_) => TermKind::Cardinality,
            Term::BiCardinality(_) => TermKind::BiCardinality,
            Term::General(_) => TermKind::General,
        }
    }

    /// Members in position order. For bi-cardinality terms `Q'` comes first.
    pub fn members(&self) -> Vec<usize> {
        match self {
            Term::Pairwise(t) => t.members.to_vec(),
            Term::Cardinality(t) => t.members.clone(),
            Term::BiCardinality(t) => t.first.iter().chain(&t.second).copied().collect(),
            Term::General(t) => t.members.clone(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Pairwise(_) => 2,
            Term::Cardinality(t) => t.members.len(),
            Term::BiCardinality(t) => t.first.len() + t.second.len(),
            Term::General(t) => t.members.len(),
        }
    }

    /// `f_Q(S)` where `contains(k)` says whether the member at position `k` is in `S`.
    pub fn value_with(&self, contains: impl Fn(usize) -> bool) -> W {
        match self {
            Term::Pairwise(t) => match (contains(0), contains(1)) {
                (true, false) => t.a,
                (false, true) => t.b,
                _ => W::zero(),
            },
            Term::Cardinality(t) => {
                let k = (0..t.members.len()).filter(|&p| contains(p)).count();
                t.g[k]
            }
            Term::BiCardinality(t) => {
                let m1 = t.first.len();
                let k1 = (0..m1).filter(|&p| contains(p)).count();
                let k2 = (m1..m1 + t.second.len()).filter(|&p| contains(p)).count();
                t.g[k1][k2]
            }
            Term::General(t) => {
                let mask = (0..t.members.len())
                    .filter(|&p| contains(p))
                    .fold(0usize, |acc, p| acc | (1 << p));
                t.table[mask]
            }
        }
    }

    /// Value by member-position bitmask (terms with fewer than 64 members).
    pub fn value_bits(&self, bits: u64) -> W {
        self.value_with(|p| bits >> p & 1 == 1)
    }

    /// The phase function `f^Δ_Q`: pairwise and cardinality terms are used
    /// as they are, bi-cardinality and general terms are rounded.
    pub fn phase_value_with(&self, phase: Phase<W>, contains: impl Fn(usize) -> bool + Copy) -> W {
        let raw = self.value_with(contains);
        if !self.is_rounded() {
            return raw;
        }
        let m = self.size();
        let size = (0..m).filter(|&p| contains(p)).count();
        phase.round(raw, size, m)
    }

    /// Whether the solver runs this term under the rounded phase function.
    pub fn is_rounded(&self) -> bool {
        matches!(self, Term::BiCardinality(_) | Term::General(_))
    }

    /// Largest absolute value the term takes.
    pub fn max_abs(&self) -> W {
        let abs_max = |it: &mut dyn Iterator<Item = W>| it.map(|v| v.abs()).fold(W::zero(), W::max);
        match self {
            Term::Pairwise(t) => t.a.abs().max(t.b.abs()),
            Term::Cardinality(t) => abs_max(&mut t.g.iter().copied()),
            Term::BiCardinality(t) => abs_max(&mut t.g.iter().flatten().copied()),
            Term::General(t) => abs_max(&mut t.table.iter().copied()),
        }
    }

    /// `f_Q(∅) = f_Q(Q) = min f_Q = 0`, judged from the stored values.
    pub fn is_normalized(&self) -> bool {
        match self {
            Term::Pairwise(t) => t.a >= W::zero() && t.b >= W::zero(),
            Term::Cardinality(t) => {
                t.g[0] == W::zero()
                    && t.g[t.g.len() - 1] == W::zero()
                    && t.g.iter().all(|&v| v >= W::zero())
            }
            Term::BiCardinality(t) => {
                let last = &t.g[t.g.len() - 1];
                t.g[0][0] == W::zero()
                    && last[last.len() - 1] == W::zero()
                    && t.g.iter().flatten().all(|&v| v >= W::zero())
            }
            Term::General(t) => {
                t.table[0] == W::zero()
                    && t.table[t.table.len() - 1] == W::zero()
                    && t.table.iter().all(|&v| v >= W::zero())
            }
        }
    }
}

/// Amount added to one node's unary capacities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnaryShift<W> {
    pub node: usize,
    pub source: W,
    pub sink: W,
}

/// A term split into a normalized remainder, unary shifts and a constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized<W> {
    pub term: Term<W>,
    pub unary: Vec<UnaryShift<W>>,
    pub offset: W,
}

/// Unary shift for a modular coefficient `coef` on `node`.
/// Positive coefficients become sink capacity; negative ones become source
/// capacity plus a constant, since `coef·[i∈S] = coef + (−coef)·[i∉S]`.
fn modular_shift<W: Weight>(node: usize, coef: W, offset: &mut W) -> UnaryShift<W> {
    if coef >= W::zero() {
        UnaryShift { node, source: W::zero(), sink: coef }
    } else {
        *offset = *offset + coef;
        UnaryShift { node, source: -coef, sink: W::zero() }
    }
}

/// Checks `f(S+i) + f(S+j) ≥ f(S+i+j) + f(S)` for all `S` and `i, j ∉ S`.
/// Returns the first violating `(S, i, j)`.
pub(crate) fn find_submodularity_violation<W: Weight>(table: &[W], m: usize) -> Option<(usize, usize, usize)> {
    for s in 0..table.len() {
        for i in 0..m {
            if s >> i & 1 == 1 {
                continue;
            }
            for j in i + 1..m {
                if s >> j & 1 == 1 {
                    continue;
                }
                let si = s | 1 << i;
                let sj = s | 1 << j;
                if table[si] + table[sj] < table[si | sj] + table[s] {
                    return Some((s, i, j));
                }
            }
        }
    }
    None
}

/// Concavity of a sequence: first differences non-increasing.
fn concavity_violation<W: Weight>(g: &[W]) -> Option<usize> {
    (1..g.len().saturating_sub(1)).find(|&k| g[k] - g[k - 1] < g[k + 1] - g[k])
}

/// Axis concavity plus the adjacent Monge inequality; together these are
/// exactly submodularity of `S ↦ g(|S∩Q'|, |S∩Q''|)`.
fn grid_violation<W: Weight>(g: &[Vec<W>]) -> Option<String> {
    let rows = g.len();
    let cols = g[0].len();
    for c in 0..cols {
        let column: Vec<W> = (0..rows).map(|r| g[r][c]).collect();
        if let Some(r) = concavity_violation(&column) {
            return Some(format!("not concave along Q' at ({r}, {c})"));
        }
    }
    for (r, row) in g.iter().enumerate() {
        if let Some(c) = concavity_violation(row) {
            return Some(format!("not concave along Q'' at ({r}, {c})"));
        }
    }
    for r in 0..rows - 1 {
        for c in 0..cols - 1 {
            if g[r][c] + g[r + 1][c + 1] > g[r][c + 1] + g[r + 1][c] {
                return Some(format!("Monge inequality fails at ({r}, {c})"));
            }
        }
    }
    None
}

/// Normalized input is returned unchanged, with zero shifts.
fn unchanged<W: Weight>(term: Term<W>) -> Normalized<W> {
    let unary = term
        .members()
        .into_iter()
        .map(|node| UnaryShift { node, source: W::zero(), sink: W::zero() })
        .collect();
    Normalized { term, unary, offset: W::zero() }
}

/// Normalizes a submodular table by Edmonds' greedy vector in ascending
/// member order.
pub fn normalize_general<W: Weight>(members: &[usize], table: &[W]) -> Result<Normalized<W>> {
    let m = members.len();
    if table.len() != 1 << m {
        return Err(Error::MalformedTerm {
            term: 0,
            reason: format!("table has {} entries, expected {}", table.len(), 1usize << m),
        });
    }
    if let Some((s, i, j)) = find_submodularity_violation(table, m) {
        return Err(Error::NotSubmodular(format!(
            "set {s:#b} with positions {i} and {j}"
        )));
    }
    let term = Term::General(GeneralTerm { members: members.to_vec(), table: table.to_vec() });
    if term.is_normalized() {
        return Ok(unchanged(term));
    }
    let base = table[0];
    let greedy: Vec<W> = (0..m)
        .map(|k| table[(1 << (k + 1)) - 1] - table[(1 << k) - 1])
        .collect();
    let normalized: Vec<W> = table
        .iter()
        .enumerate()
        .map(|(mask, &v)| {
            let modular = (0..m)
                .filter(|&k| mask >> k & 1 == 1)
                .fold(W::zero(), |acc, k| acc + greedy[k]);
            v - base - modular
        })
        .collect();
    let mut offset = base;
    let unary = members
        .iter()
        .zip(&greedy)
        .map(|(&node, &coef)| modular_shift(node, coef, &mut offset))
        .collect();
    Ok(Normalized {
        term: Term::General(GeneralTerm { members: members.to_vec(), table: normalized }),
        unary,
        offset,
    })
}

/// Normalizes a concave cardinality function by subtracting `g(0)` and a
/// constant slope, keeping the term a cardinality term.
pub fn normalize_cardinality<W: Weight>(members: &[usize], g: &[W]) -> Result<Normalized<W>> {
    let m = members.len();
    if g.len() != m + 1 {
        return Err(Error::MalformedTerm {
            term: 0,
            reason: format!("g has {} entries, expected {}", g.len(), m + 1),
        });
    }
    if let Some(k) = concavity_violation(g) {
        return Err(Error::NotSubmodular(format!("g not concave at {k}")));
    }
    let term = Term::Cardinality(CardinalityTerm { members: members.to_vec(), g: g.to_vec() });
    if term.is_normalized() {
        return Ok(unchanged(term));
    }
    let rise = g[m] - g[0];
    let mw = W::of(m);
    if rise % mw != W::zero() {
        return Err(Error::NonIntegralSlope(format!("slope {rise}/{m}")));
    }
    let slope = rise / mw;
    let normalized: Vec<W> = g
        .iter()
        .enumerate()
        .map(|(k, &v)| v - g[0] - slope * W::of(k))
        .collect();
    let mut offset = g[0];
    let unary = members
        .iter()
        .map(|&node| modular_shift(node, slope, &mut offset))
        .collect();
    Ok(Normalized {
        term: Term::Cardinality(CardinalityTerm { members: members.to_vec(), g: normalized }),
        unary,
        offset,
    })
}

fn floor_div(x: i128, y: i128) -> i128 {
    if y > 0 {
        x.div_euclid(y)
    } else {
        (-x).div_euclid(-y)
    }
}

fn ceil_div(x: i128, y: i128) -> i128 {
    -floor_div(-x, y)
}

/// Normalizes a bi-cardinality grid with one slope `a` on `Q'` and one slope
/// `b` on `Q''`. Among feasible integer pairs the smallest `a` is taken.
pub fn normalize_bicardinality<W: Weight>(
    first: &[usize],
    second: &[usize],
    g: &[Vec<W>],
) -> Result<Normalized<W>> {
    let (m1, m2) = (first.len(), second.len());
    if m1 == 0 || m2 == 0 {
        return Err(Error::MalformedTerm {
            term: 0,
            reason: "both member groups must be nonempty".into(),
        });
    }
    if g.len() != m1 + 1 || g.iter().any(|row| row.len() != m2 + 1) {
        return Err(Error::MalformedTerm {
            term: 0,
            reason: format!("grid must be {}x{}", m1 + 1, m2 + 1),
        });
    }
    if let Some(why) = grid_violation(g) {
        return Err(Error::NotSubmodular(why));
    }
    let term = Term::BiCardinality(BiCardinalityTerm {
        first: first.to_vec(),
        second: second.to_vec(),
        g: g.to_vec(),
    });
    if term.is_normalized() {
        return Ok(unchanged(term));
    }
    let base = g[0][0];
    let shifted = |r: usize, c: usize| (g[r][c] - base).wide();
    let total = shifted(m1, m2);
    let (w1, w2) = (m1 as i128, m2 as i128);

    // With b = (total − a·m')/m'', each cell gives a linear bound on a:
    // a·(m'k'' − m''k') ≥ total·k'' − m''·G(k', k'').
    let mut lo = i128::MIN;
    let mut hi = i128::MAX;
    for r in 0..=m1 {
        for c in 0..=m2 {
            let coef = w1 * c as i128 - w2 * r as i128;
            let rhs = total * c as i128 - w2 * shifted(r, c);
            match coef.signum() {
                1 => lo = lo.max(ceil_div(rhs, coef)),
                -1 => hi = hi.min(floor_div(rhs, coef)),
                _ => {
                    if rhs > 0 {
                        return Err(Error::NoSlopePair(format!(
                            "cell ({r}, {c}) cannot be made nonnegative"
                        )));
                    }
                }
            }
        }
    }
    let slope_a = (lo..=hi.min(lo.saturating_add(w2)))
        .find(|a| (total - a * w1).rem_euclid(w2) == 0)
        .ok_or_else(|| Error::NoSlopePair(format!("no integer solution of {m1}a + {m2}b = {total}")))?;
    let slope_b = (total - slope_a * w1) / w2;

    let to_w = |v: i128| -> Result<W> {
        num_traits::NumCast::from(v).ok_or_else(|| Error::Overflow(format!("slope {v}")))
    };
    let (a, b) = (to_w(slope_a)?, to_w(slope_b)?);
    let grid: Vec<Vec<W>> = (0..=m1)
        .map(|r| {
            (0..=m2)
                .map(|c| g[r][c] - base - a * W::of(r) - b * W::of(c))
                .collect()
        })
        .collect();
    if grid.iter().flatten().any(|&v| v < W::zero()) {
        return Err(Error::Internal("slope search produced a negative cell".into()));
    }
    let mut offset = base;
    let mut unary: Vec<UnaryShift<W>> = first.iter().map(|&node| modular_shift(node, a, &mut offset)).collect();
    unary.extend(second.iter().map(|&node| modular_shift(node, b, &mut offset)));
    Ok(Normalized {
        term: Term::BiCardinality(BiCardinalityTerm {
            first: first.to_vec(),
            second: second.to_vec(),
            g: grid,
        }),
        unary,
        offset,
    })
}

/// Normalizes any term kind, keeping its declared structure.
pub fn normalize_term<W: Weight>(term: &Term<W>) -> Result<Normalized<W>> {
    match term {
        Term::Pairwise(t) => {
            let table = [W::zero(), t.a, t.b, W::zero()];
            let general = normalize_general(&t.members, &table)?;
            let Term::General(g) = general.term else { unreachable!() };
            Ok(Normalized {
                term: Term::Pairwise(PairwiseTerm { members: t.members, a: g.table[1], b: g.table[2] }),
                unary: general.unary,
                offset: general.offset,
            })
        }
        Term::Cardinality(t) => normalize_cardinality(&t.members, &t.g),
        Term::BiCardinality(t) => normalize_bicardinality(&t.first, &t.second, &t.g),
        Term::General(t) => normalize_general(&t.members, &t.table),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub term: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Some(t) => write!(f, "term {t}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, term: Option<usize>, message: impl Into<String>) {
        self.violations.push(Violation { term, message: message.into() });
    }

    /// Whether some violation message contains `needle`.
    pub fn mentions(&self, needle: &str) -> bool {
        self.violations.iter().any(|v| v.message.contains(needle))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            f.write_str("valid")?;
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{v}")?;
        }
        for w in &self.warnings {
            write!(f, "\nwarning: {w}")?;
        }
        Ok(())
    }
}

/// A validated-structure problem instance. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance<W> {
    n: usize,
    source: Vec<W>,
    sink: Vec<W>,
    terms: Vec<Term<W>>,
    offset: W,
    bound: W,
    general_cap: usize,
}

/// Collects nodes, capacities and terms; [`InstanceBuilder::build`] checks
/// structure, folds singleton terms into unaries and computes the value bound.
#[derive(Clone, Debug)]
pub struct InstanceBuilder<W> {
    n: usize,
    source: Vec<W>,
    sink: Vec<W>,
    terms: Vec<Term<W>>,
    offset: W,
    general_cap: usize,
}

impl<W: Weight> InstanceBuilder<W> {
    pub fn new(n: usize) -> Self {
        InstanceBuilder {
            n,
            source: vec![W::zero(); n],
            sink: vec![W::zero(); n],
            terms: Vec::new(),
            offset: W::zero(),
            general_cap: DEFAULT_GENERAL_CAP,
        }
    }

    /// Sets `c_si` and `c_it` of node `i`.
    pub fn unary(mut self, i: usize, source: W, sink: W) -> Self {
        self.source[i] = source;
        self.sink[i] = sink;
        self
    }

    pub fn unaries(mut self, caps: &[(W, W)]) -> Self {
        for (i, &(s, t)) in caps.iter().enumerate().take(self.n) {
            self.source[i] = s;
            self.sink[i] = t;
        }
        self
    }

    pub fn term(mut self, term: Term<W>) -> Self {
        self.terms.push(term);
        self
    }

    pub fn terms(mut self, terms: impl IntoIterator<Item = Term<W>>) -> Self {
        self.terms.extend(terms);
        self
    }

    pub fn offset(mut self, offset: W) -> Self {
        self.offset = offset;
        self
    }

    /// Member cap for general terms, at most [`MAX_GENERAL_CAP`].
    pub fn general_cap(mut self, cap: usize) -> Self {
        self.general_cap = cap.min(MAX_GENERAL_CAP);
        self
    }

    pub fn build(self) -> Result<Instance<W>> {
        let InstanceBuilder { n, mut source, mut sink, terms, mut offset, general_cap } = self;
        let mut kept = Vec::with_capacity(terms.len());
        for (index, term) in terms.into_iter().enumerate() {
            check_structure(index, &term, n, general_cap)?;
            if term.size() == 1 {
                let node = term.members()[0];
                let empty = term.value_bits(0);
                let full = term.value_bits(1);
                offset = offset + empty;
                let shift = modular_shift(node, full - empty, &mut offset);
                source[node] = source[node] + shift.source;
                sink[node] = sink[node] + shift.sink;
            } else {
                kept.push(term);
            }
        }
        let bound = value_bound(n, &source, &sink, &kept, offset)?;
        Ok(Instance { n, source, sink, terms: kept, offset, bound, general_cap })
    }
}

fn check_structure<W: Weight>(index: usize, term: &Term<W>, n: usize, cap: usize) -> Result<()> {
    let malformed = |reason: String| Error::MalformedTerm { term: index, reason };
    let members = term.members();
    if members.is_empty() {
        return Err(malformed("term has no members".into()));
    }
    let mut seen = members.clone();
    seen.sort_unstable();
    for w in seen.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateMember { term: index, node: w[0] });
        }
    }
    if let Some(&node) = seen.iter().find(|&&v| v >= n) {
        return Err(Error::NodeOutOfRange { node, n });
    }
    match term {
        Term::Pairwise(_) => {}
        Term::Cardinality(t) => {
            if t.g.len() != t.members.len() + 1 {
                return Err(malformed(format!(
                    "g has {} entries for {} members",
                    t.g.len(),
                    t.members.len()
                )));
            }
        }
        Term::BiCardinality(t) => {
            if t.first.is_empty() || t.second.is_empty() {
                return Err(malformed("both member groups must be nonempty".into()));
            }
            if t.g.len() != t.first.len() + 1 || t.g.iter().any(|r| r.len() != t.second.len() + 1) {
                return Err(malformed(format!(
                    "grid must be {}x{}",
                    t.first.len() + 1,
                    t.second.len() + 1
                )));
            }
        }
        Term::General(t) => {
            if t.members.len() > cap {
                return Err(Error::TermTooLarge { size: t.members.len(), cap });
            }
            if t.table.len() != 1 << t.members.len() {
                return Err(malformed(format!(
                    "table has {} entries for {} members",
                    t.table.len(),
                    t.members.len()
                )));
            }
        }
    }
    Ok(())
}

/// `U = max(1, |c_si|, |c_it|, |f_Q(S)|)`, after checking that the largest
/// intermediate magnitudes stay within half the weight type's range.
fn value_bound<W: Weight>(n: usize, source: &[W], sink: &[W], terms: &[Term<W>], offset: W) -> Result<W> {
    let caps = source.iter().chain(sink).map(|c| c.abs()).fold(W::one(), W::max);
    let bound = terms.iter().map(Term::max_abs).fold(caps, W::max);
    let u = bound.wide();
    let limit = W::headroom();
    let max_size = terms.iter().map(Term::size).max().unwrap_or(0) as i128;
    let term_sum: i128 = terms.iter().map(|t| t.max_abs().wide()).sum();
    let checks = [
        ("n·U", (n as i128).saturating_mul(u)),
        ("Σ_Q max|f_Q|", term_sum),
        ("2U·(max |Q|)²", u.saturating_mul(2 * max_size * max_size)),
        (
            "|offset| + 2n·U + Σ_Q max|f_Q|",
            offset.wide().abs() + (2 * n as i128).saturating_mul(u) + term_sum,
        ),
    ];
    for (what, value) in checks {
        if value > limit {
            return Err(Error::Overflow(format!("{what} = {value} exceeds {limit}")));
        }
    }
    Ok(bound)
}

impl<W: Weight> Instance<W> {
    pub fn builder(n: usize) -> InstanceBuilder<W> {
        InstanceBuilder::new(n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Source capacities `c_si`.
    pub fn source_caps(&self) -> &[W] {
        &self.source
    }

    /// Sink capacities `c_it`.
    pub fn sink_caps(&self) -> &[W] {
        &self.sink
    }

    pub fn terms(&self) -> &[Term<W>] {
        &self.terms
    }

    pub fn offset(&self) -> W {
        self.offset
    }

    /// The value bound `U`.
    pub fn bound(&self) -> W {
        self.bound
    }

    pub fn general_cap(&self) -> usize {
        self.general_cap
    }

    /// `f(S)` for `S` given as a list of nodes.
    pub fn evaluate(&self, set: &[usize]) -> Result<W> {
        let mut inside = vec![false; self.n];
        for &v in set {
            if v >= self.n {
                return Err(Error::NodeOutOfRange { node: v, n: self.n });
            }
            inside[v] = true;
        }
        Ok(self.evaluate_indicator(&inside))
    }

    /// `f(S)` for `S` given as an indicator over all nodes.
    pub fn evaluate_indicator(&self, inside: &[bool]) -> W {
        let unary = (0..self.n).fold(self.offset, |acc, i| {
            acc + if inside[i] { self.sink[i] } else { self.source[i] }
        });
        self.terms.iter().fold(unary, |acc, term| {
            let members = term.members();
            acc + term.value_with(|p| inside[members[p]])
        })
    }

    /// Checks capacities, per-kind normalization and submodularity.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for i in 0..self.n {
            if self.source[i] < W::zero() {
                report.push(None, format!("node {i}: negative source capacity {}", self.source[i]));
            }
            if self.sink[i] < W::zero() {
                report.push(None, format!("node {i}: negative sink capacity {}", self.sink[i]));
            }
        }
        for (index, term) in self.terms.iter().enumerate() {
            if let Err(e) = check_structure(index, term, self.n, self.general_cap) {
                report.push(Some(index), e.to_string());
                continue;
            }
            validate_term(index, term, &mut report);
        }
        report
    }

    /// Copy with every non-normalized term replaced by its normalized form,
    /// the modular parts folded into the unaries and the offset.
    pub fn normalized(&self) -> Result<Instance<W>> {
        let mut source = self.source.clone();
        let mut sink = self.sink.clone();
        let mut offset = self.offset;
        let mut terms = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            if term.is_normalized() {
                terms.push(term.clone());
                continue;
            }
            let parts = normalize_term(term)?;
            for shift in &parts.unary {
                source[shift.node] = source[shift.node] + shift.source;
                sink[shift.node] = sink[shift.node] + shift.sink;
            }
            offset = offset + parts.offset;
            terms.push(parts.term);
        }
        let caps: Vec<(W, W)> = source.into_iter().zip(sink).collect();
        InstanceBuilder::new(self.n)
            .unaries(&caps)
            .terms(terms)
            .offset(offset)
            .general_cap(self.general_cap)
            .build()
    }
}

fn validate_term<W: Weight>(index: usize, term: &Term<W>, report: &mut ValidationReport) {
    let at = Some(index);
    let zero = W::zero();
    match term {
        Term::Pairwise(t) => {
            if t.a < zero || t.b < zero {
                report.push(at, "term value negative (normalized terms are nonnegative)");
            }
        }
        Term::Cardinality(t) => {
            let m = t.members.len();
            if t.g[0] != zero {
                report.push(at, "g(0) ≠ 0");
            }
            if t.g[m] != zero {
                report.push(at, "g(m) ≠ 0");
            }
            if t.g.iter().any(|&v| v < zero) {
                report.push(at, "term value negative (normalized terms are nonnegative)");
            }
            if let Some(k) = concavity_violation(&t.g) {
                report.push(at, format!("not submodular: g not concave at {k}"));
            }
        }
        Term::BiCardinality(t) => {
            let (m1, m2) = (t.first.len(), t.second.len());
            if t.g[0][0] != zero {
                report.push(at, "g(0, 0) ≠ 0");
            }
            if t.g[m1][m2] != zero {
                report.push(at, "g(m', m'') ≠ 0");
            }
            if t.g.iter().flatten().any(|&v| v < zero) {
                report.push(at, "term value negative (normalized terms are nonnegative)");
            }
            if let Some(why) = grid_violation(&t.g) {
                report.push(at, format!("not submodular: {why}"));
            }
        }
        Term::General(t) => {
            let m = t.members.len();
            if t.table[0] != zero {
                report.push(at, "f(∅) ≠ 0");
            }
            if t.table[(1 << m) - 1] != zero {
                report.push(at, "f(Q) ≠ 0");
            }
            if t.table.iter().any(|&v| v < zero) {
                report.push(at, "term value negative (normalized terms are nonnegative)");
            }
            if m <= EXHAUSTIVE_CHECK_LIMIT {
                if let Some((s, i, j)) = find_submodularity_violation(&t.table, m) {
                    report.push(
                        at,
                        format!("not submodular: set {s:#b}, positions {i} and {j}"),
                    );
                }
            } else {
                report
                    .warnings
                    .push(format!("term {index}: submodularity of {m}-member table not verified"));
            }
        }
    }
}
