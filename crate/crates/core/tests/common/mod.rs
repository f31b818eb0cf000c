#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use submin::instance::{Instance, InstanceBuilder, Term};
use submin::phase::Phase;
use submin::term::{TermOps, TermState};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Concave `g` on `0..=m` with `g(0) = g(m) = 0`: a sum of clipped tents.
pub fn concave(rng: &mut ChaCha8Rng, m: usize, max: i64) -> Vec<i64> {
    let mut g = vec![0i64; m + 1];
    for _ in 0..rng.gen_range(1..=2) {
        let a = rng.gen_range(0..=max);
        let b = rng.gen_range(0..=max);
        let cap = rng.gen_range(0..=max);
        for (k, v) in g.iter_mut().enumerate() {
            *v += (a * k as i64).min(b * (m - k) as i64).min(cap);
        }
    }
    g
}

/// Normalized bi-cardinality grid built from Monge pieces.
pub fn monge_grid(rng: &mut ChaCha8Rng, m1: usize, m2: usize, max: i64) -> Vec<Vec<i64>> {
    let a = concave(rng, m1, max);
    let b = concave(rng, m2, max);
    let h = concave(rng, m1 + m2, max);
    let p = rng.gen_range(0..=max.min(3));
    let q = rng.gen_range(0..=max.min(3));
    (0..=m1)
        .map(|r| {
            (0..=m2)
                .map(|c| {
                    let (ri, ci) = (r as i64, c as i64);
                    a[r] + b[c] + h[r + c] + p * ri * (m2 as i64 - ci) + q * (m1 as i64 - ri) * ci
                })
                .collect()
        })
        .collect()
}

/// Normalized submodular table: concave functions of nonnegative weights
/// plus directed cut pieces.
pub fn submodular_table(rng: &mut ChaCha8Rng, m: usize, max: i64) -> Vec<i64> {
    let mut table = vec![0i64; 1 << m];
    let w: Vec<i64> = (0..m).map(|_| rng.gen_range(0..=max.min(8))).collect();
    let total: i64 = w.iter().sum();
    let cap = rng.gen_range(0..=max);
    for _ in 0..rng.gen_range(0..=2) {
        let i = rng.gen_range(0..m);
        let j = rng.gen_range(0..m);
        let c = rng.gen_range(0..=max / 2);
        if i != j {
            for (mask, v) in table.iter_mut().enumerate() {
                if mask >> i & 1 == 1 && mask >> j & 1 == 0 {
                    *v += c;
                }
            }
        }
    }
    for (mask, v) in table.iter_mut().enumerate() {
        let x: i64 = (0..m).filter(|&k| mask >> k & 1 == 1).map(|k| w[k]).sum();
        *v += x.min(total - x).min(cap);
    }
    table
}

fn distinct(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<usize> {
    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.shuffle(rng);
    nodes.truncate(m);
    nodes
}

pub fn random_term(rng: &mut ChaCha8Rng, kind: usize, n: usize, max_size: usize, max: i64) -> Term<i64> {
    let size = rng.gen_range(2..=max_size.min(n).max(2));
    let members = distinct(rng, n, size);
    match kind {
        0 => Term::pairwise(members[0], members[1], rng.gen_range(0..=max), rng.gen_range(0..=max)),
        1 => Term::cardinality(members.clone(), concave(rng, size, max)),
        2 => {
            let size = size.max(2);
            let split = rng.gen_range(1..size);
            let (first, second) = members.split_at(split);
            Term::bicardinality(first.to_vec(), second.to_vec(), monge_grid(rng, split, size - split, max))
        }
        _ => Term::general(members.clone(), submodular_table(rng, size, max)),
    }
}

/// Random valid instance mixing all four term kinds.
pub fn random_instance(seed: u64, max_n: usize, max_terms: usize, max_size: usize, max: i64) -> Instance<i64> {
    let mut rng = rng(seed);
    let n = rng.gen_range(2..=max_n);
    let mut b: InstanceBuilder<i64> = Instance::builder(n);
    for i in 0..n {
        b = b.unary(i, rng.gen_range(0..=max), rng.gen_range(0..=max));
    }
    for _ in 0..rng.gen_range(0..=max_terms) {
        let kind = rng.gen_range(0..4);
        b = b.term(random_term(&mut rng, kind, n, max_size, max));
    }
    b.offset(rng.gen_range(-max..=max)).build().expect("generated instance is valid")
}

/// A term state walked through a few phases by random single-arc pushes.
/// Returns the state and the phase it is in.
pub fn random_state(rng: &mut ChaCha8Rng, term: &Term<i64>, steps: usize) -> (TermState<i64>, Phase<i64>) {
    let mut state = TermState::new(term);
    let bound = term.max_abs().max(1);
    let mut phase = Phase::initial(bound);
    state.adjust_flow(phase);
    let m = term.size();
    let mut epoch = 1u32;
    for _ in 0..steps {
        if !phase.is_last() && rng.gen_bool(0.25) {
            phase = phase.next().unwrap();
            state.adjust_flow(phase);
            continue;
        }
        epoch += 1;
        let i = rng.gen_range(0..m);
        let mut out = Vec::new();
        state.get_neighbors(i, phase, epoch, &mut out);
        if let Some(&j) = out.choose(rng) {
            state.send_flow(i, j, phase);
        }
    }
    (state, phase)
}

/// Direct arcs of every member, one fresh search per member.
pub fn arcs_from_states(state: &mut TermState<i64>, phase: Phase<i64>, epoch: &mut u32) -> Vec<(usize, usize)> {
    let mut arcs = Vec::new();
    for i in 0..state.size() {
        *epoch += 1;
        let mut out = Vec::new();
        state.get_neighbors(i, phase, *epoch, &mut out);
        arcs.extend(out.into_iter().map(|j| (i, j)));
    }
    arcs.sort_unstable();
    arcs
}

pub fn all_subsets_nonnegative(state: &TermState<i64>, phase: Phase<i64>) -> Result<(), String> {
    let m = state.size();
    for bits in 0u32..1 << m {
        let r = state.residual_value(&|p| bits >> p & 1 == 1, phase);
        let boundary = bits == 0 || bits == (1 << m) - 1;
        if r < 0 || (boundary && r != 0) {
            return Err(format!("residual {r} on {bits:#b}"));
        }
    }
    Ok(())
}
