//! JSON instance and result files.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use submin::instance::Term;
use submin::{Error, Instance, SolveResult, TermCounters};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    pub nodes: usize,
    /// `[c_si, c_it]` per node.
    pub unary: Vec<[i64; 2]>,
    pub terms: Vec<TermFile>,
    #[serde(default)]
    pub offset: i64,
}

/// One term. General tables are indexed by member bitmask with the lowest
/// member as bit 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum TermFile {
    Pairwise { members: [usize; 2], a: i64, b: i64 },
    Cardinality { members: Vec<usize>, g: Vec<i64> },
    Bicardinality { qprime: Vec<usize>, qsecond: Vec<usize>, g: Vec<Vec<i64>> },
    General { members: Vec<usize>, table: Vec<i64> },
}

impl TermFile {
    pub fn to_term(&self) -> Term<i64> {
        match self {
            TermFile::Pairwise { members, a, b } => Term::pairwise(members[0], members[1], *a, *b),
            TermFile::Cardinality { members, g } => Term::cardinality(members.clone(), g.clone()),
            TermFile::Bicardinality { qprime, qsecond, g } => {
                Term::bicardinality(qprime.clone(), qsecond.clone(), g.clone())
            }
            TermFile::General { members, table } => general_term(members, table),
        }
    }

    pub fn from_term(term: &Term<i64>) -> Self {
        match term {
            Term::Pairwise(t) => TermFile::Pairwise { members: t.members, a: t.a, b: t.b },
            Term::Cardinality(t) => TermFile::Cardinality { members: t.members.clone(), g: t.g.clone() },
            Term::BiCardinality(t) => TermFile::Bicardinality {
                qprime: t.first.clone(),
                qsecond: t.second.clone(),
                g: t.g.clone(),
            },
            Term::General(t) => TermFile::General { members: t.members.clone(), table: t.table.clone() },
        }
    }
}

/// The file lists members in any order; the term stores them sorted, so
/// the table is re-indexed to match.
fn general_term(members: &[usize], table: &[i64]) -> Term<i64> {
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by_key(|&p| members[p]);
    if order.iter().enumerate().all(|(k, &p)| k == p) || table.len() != 1 << members.len() {
        return Term::general(members.to_vec(), table.to_vec());
    }
    let remapped = (0..table.len())
        .map(|sorted_mask| {
            let mask = order
                .iter()
                .enumerate()
                .filter(|&(k, _)| sorted_mask >> k & 1 == 1)
                .fold(0usize, |acc, (_, &p)| acc | 1 << p);
            table[mask]
        })
        .collect();
    Term::general(members.to_vec(), remapped)
}

impl InstanceFile {
    pub fn to_instance(&self) -> Result<Instance, Error> {
        if self.unary.len() != self.nodes {
            return Err(Error::UnaryLength { expected: self.nodes, got: self.unary.len() });
        }
        let unary: Vec<(i64, i64)> = self.unary.iter().map(|&[s, t]| (s, t)).collect();
        Instance::builder(self.nodes)
            .unaries(&unary)
            .terms(self.terms.iter().map(TermFile::to_term))
            .offset(self.offset)
            .build()
    }

    pub fn from_instance(instance: &Instance) -> Self {
        InstanceFile {
            version: FORMAT_VERSION,
            nodes: instance.n(),
            unary: instance
                .source_caps()
                .iter()
                .zip(instance.sink_caps())
                .map(|(&s, &t)| [s, t])
                .collect(),
            terms: instance.terms().iter().map(TermFile::from_term).collect(),
            offset: instance.offset(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseFile {
    #[serde(rename = "twoDelta")]
    pub two_delta: i64,
    pub augmentations: u64,
    pub bfs_count: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountersFile {
    pub get_neighbors: u64,
    pub send_flow: u64,
    pub adjust_flow: u64,
    pub oracle_evaluations: u64,
    pub matrix_entries: u64,
}

impl From<TermCounters> for CountersFile {
    fn from(c: TermCounters) -> Self {
        CountersFile {
            get_neighbors: c.get_neighbors,
            send_flow: c.send_flow,
            adjust_flow: c.adjust_flow,
            oracle_evaluations: c.oracle_evaluations,
            matrix_entries: c.matrix_entries,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub minimum: i64,
    pub minimizer: Vec<usize>,
    pub flow_value: i64,
    pub offset: i64,
    pub phases: Vec<PhaseFile>,
    /// Keyed by term kind name.
    pub counters: BTreeMap<String, CountersFile>,
    /// Present only with `--audit`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit_violations: Option<Vec<String>>,
    /// Present only with `--stats`; it is the one nondeterministic field.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl ResultFile {
    pub fn new(result: &SolveResult, audit: bool) -> Self {
        ResultFile {
            minimum: result.minimum,
            minimizer: result.minimizer.clone(),
            flow_value: result.flow_value,
            offset: result.offset,
            phases: result
                .phases
                .iter()
                .map(|p| PhaseFile { two_delta: p.two_delta, augmentations: p.augmentations, bfs_count: p.bfs_count })
                .collect(),
            counters: result.counters.iter().map(|(k, &c)| (k.name().to_string(), c.into())).collect(),
            audit_violations: audit.then(|| result.audit_violations.clone()),
            wall_time_ms: None,
        }
    }

    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let nodes: Vec<String> = self.minimizer.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(s, "minimum     {}", self.minimum);
        let _ = writeln!(s, "minimizer   {{{}}}", nodes.join(", "));
        let _ = writeln!(s, "flow value  {} (offset {})", self.flow_value, self.offset);
        let _ = writeln!(s, "phases      {}", self.phases.len());
        for p in &self.phases {
            let _ = writeln!(s, "  2Δ = {:<12} augmentations {:<8} searches {}", p.two_delta, p.augmentations, p.bfs_count);
        }
        for (kind, c) in &self.counters {
            let _ = writeln!(
                s,
                "{kind}: neighbors {} sends {} adjusts {} table reads {} matrix entries {}",
                c.get_neighbors, c.send_flow, c.adjust_flow, c.oracle_evaluations, c.matrix_entries
            );
        }
        if let Some(v) = &self.audit_violations {
            let _ = writeln!(s, "audit       {} violation(s)", v.len());
            for line in v {
                let _ = writeln!(s, "  {line}");
            }
        }
        if let Some(ms) = self.wall_time_ms {
            let _ = writeln!(s, "wall time   {ms:.3} ms");
        }
        s
    }
}
