//! Seeded random instances. Every generated term is normalized.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use submin::instance::DEFAULT_GENERAL_CAP;

use crate::format::{InstanceFile, TermFile, FORMAT_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    Pairwise,
    Cardinality,
    Bicardinality,
    General,
    /// Each term picks one of the four kinds, and a size up to the given one.
    Mixed,
}

impl GenKind {
    fn default_size(self) -> usize {
        match self {
            GenKind::Pairwise => 2,
            _ => 4,
        }
    }
}

/// `kind:count[:size]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TermSpec {
    pub kind: GenKind,
    pub count: usize,
    pub size: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecError(pub String);

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SpecError {}

impl FromStr for TermSpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        let err = |m: &str| SpecError(format!("bad term spec {s:?}: {m}"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        if !(2..=3).contains(&parts.len()) {
            return Err(err("expected kind:count[:size]"));
        }
        let kind = match parts[0] {
            "pairwise" => GenKind::Pairwise,
            "cardinality" => GenKind::Cardinality,
            "bicardinality" => GenKind::Bicardinality,
            "general" => GenKind::General,
            "mixed" => GenKind::Mixed,
            _ => return Err(err("unknown kind")),
        };
        let count = parts[1].parse().map_err(|_| err("count is not a number"))?;
        let size = match parts.get(2) {
            Some(v) => Some(v.parse().map_err(|_| err("size is not a number"))?),
            None => None,
        };
        match (kind, size) {
            (GenKind::Pairwise, Some(k)) if k != 2 => return Err(err("pairwise terms have size 2")),
            (_, Some(k)) if k < 2 => return Err(err("size must be at least 2")),
            (GenKind::General, Some(k)) if k > DEFAULT_GENERAL_CAP => {
                return Err(err(&format!("general terms are capped at {DEFAULT_GENERAL_CAP} members")))
            }
            _ => {}
        }
        Ok(TermSpec { kind, count, size })
    }
}

/// Comma-separated list of term specs.
pub fn parse_terms(s: &str) -> Result<Vec<TermSpec>, SpecError> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect()
}

#[derive(Clone, Debug)]
pub struct GenerateConfig {
    pub nodes: usize,
    pub terms: Vec<TermSpec>,
    pub max_value: i64,
    pub seed: u64,
}

pub fn generate(config: &GenerateConfig) -> Result<InstanceFile, SpecError> {
    let n = config.nodes;
    let u = config.max_value;
    if n == 0 {
        return Err(SpecError("need at least one node".into()));
    }
    if u < 0 {
        return Err(SpecError("max value must be nonnegative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let unary = (0..n).map(|_| [rng.gen_range(0..=u), rng.gen_range(0..=u)]).collect();
    let mut terms = Vec::new();
    for spec in &config.terms {
        if spec.count > 0 && n < 2 {
            return Err(SpecError("terms need at least two nodes".into()));
        }
        for _ in 0..spec.count {
            let (kind, size) = match spec.kind {
                GenKind::Mixed => {
                    let kind = [GenKind::Pairwise, GenKind::Cardinality, GenKind::Bicardinality, GenKind::General]
                        .choose(&mut rng)
                        .copied()
                        .expect("nonempty");
                    let top = spec.size.unwrap_or(GenKind::Mixed.default_size()).min(DEFAULT_GENERAL_CAP);
                    let size = if kind == GenKind::Pairwise { 2 } else { rng.gen_range(2..=top.max(2)) };
                    (kind, size)
                }
                kind => (kind, spec.size.unwrap_or(kind.default_size())),
            };
            terms.push(random_term(&mut rng, kind, size.min(n), n, u));
        }
    }
    Ok(InstanceFile { version: FORMAT_VERSION, nodes: n, unary, terms, offset: 0 })
}

fn random_term(rng: &mut ChaCha8Rng, kind: GenKind, size: usize, n: usize, u: i64) -> TermFile {
    let mut members: Vec<usize> = rand::seq::index::sample(rng, n, size).into_vec();
    members.sort_unstable();
    match kind {
        GenKind::Pairwise => TermFile::Pairwise {
            members: [members[0], members[1]],
            a: rng.gen_range(0..=u),
            b: rng.gen_range(0..=u),
        },
        GenKind::Cardinality => TermFile::Cardinality { g: concave(rng, size, u), members },
        GenKind::Bicardinality => {
            members.shuffle(rng);
            let split = rng.gen_range(1..size);
            let mut qprime = members[..split].to_vec();
            let mut qsecond = members[split..].to_vec();
            qprime.sort_unstable();
            qsecond.sort_unstable();
            TermFile::Bicardinality { g: monge_grid(rng, split, size - split, u), qprime, qsecond }
        }
        GenKind::General | GenKind::Mixed => TermFile::General { table: threshold_table(rng, size, u), members },
    }
}

/// Concave `g` on `0..=m` with zero ends and values at most `u`: `m` random
/// increments sorted non-increasing, then the largest or smallest one is
/// moved so that they sum to zero (which keeps them sorted).
pub fn concave(rng: &mut ChaCha8Rng, m: usize, u: i64) -> Vec<i64> {
    let r = u / (2 * m as i64);
    let mut d: Vec<i64> = (0..m).map(|_| rng.gen_range(-r..=r)).collect();
    d.sort_unstable_by(|a, b| b.cmp(a));
    let sum: i64 = d.iter().sum();
    if sum > 0 {
        d[m - 1] -= sum;
    } else {
        d[0] -= sum;
    }
    let mut g = Vec::with_capacity(m + 1);
    g.push(0);
    for step in d {
        g.push(g[g.len() - 1] + step);
    }
    g
}

/// Normalized bi-cardinality grid: a concave function of `k' + k''` plus
/// `K(k', k'') = Σ_{r < k', c ≥ k''} x_r·y_c`, the cumulative sum of the
/// nonnegative increments `x_r·y_c` with `x` non-increasing and `y`
/// non-decreasing. `K` vanishes at both corners, is Monge, and is concave
/// along each axis.
pub fn monge_grid(rng: &mut ChaCha8Rng, m1: usize, m2: usize, u: i64) -> Vec<Vec<i64>> {
    let h = concave(rng, m1 + m2, u / 2);
    let w = (((u / 2) as f64 / (m1 * m2) as f64).sqrt() as i64).max(0);
    let mut x: Vec<i64> = (0..m1).map(|_| rng.gen_range(0..=w)).collect();
    let mut y: Vec<i64> = (0..m2).map(|_| rng.gen_range(0..=w)).collect();
    x.sort_unstable_by(|a, b| b.cmp(a));
    y.sort_unstable();
    let mut g = vec![vec![0i64; m2 + 1]; m1 + 1];
    for r in 0..=m1 {
        for c in 0..=m2 {
            let xs: i64 = x[..r].iter().sum();
            let ys: i64 = y[c..].iter().sum();
            g[r][c] = h[r + c] + xs * ys;
        }
    }
    g
}

/// Sum of two pieces `min(w(S), w(Q − S), θ)` with nonnegative weights:
/// each is a concave function of a modular one, hence submodular, and is
/// zero on `∅` and `Q`.
pub fn threshold_table(rng: &mut ChaCha8Rng, m: usize, u: i64) -> Vec<i64> {
    let mut table = vec![0i64; 1 << m];
    for _ in 0..2 {
        let w: Vec<i64> = (0..m).map(|_| rng.gen_range(0..=u / 2)).collect();
        let total: i64 = w.iter().sum();
        let theta = rng.gen_range(0..=u / 2);
        for (mask, v) in table.iter_mut().enumerate() {
            let inside: i64 = (0..m).filter(|&k| mask >> k & 1 == 1).map(|k| w[k]).sum();
            *v += inside.min(total - inside).min(theta);
        }
    }
    table
}
