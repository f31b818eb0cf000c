mod common;

use std::collections::VecDeque;

use proptest::prelude::*;

use common::*;
use submin::instance::Instance;
use submin::oracle::{brute_min, naive_arc_set};
use submin::solver::{solve, solve_with, Hop, SolveOptions, Solver};
use submin::TermOps;

fn check_against_oracle(inst: &Instance<i64>) -> Result<(), TestCaseError> {
    let expect = brute_min(inst).unwrap();
    let got = solve_with(inst, SolveOptions { audit: true }).unwrap();
    prop_assert_eq!(got.minimum, expect.minimum);
    prop_assert_eq!(inst.evaluate(&got.minimizer).unwrap(), expect.minimum);
    prop_assert_eq!(got.flow_value + got.offset, got.minimum);
    prop_assert!(got.audit_violations.is_empty(), "{:?}", got.audit_violations);
    for p in &got.phases {
        prop_assert!(p.augmentations <= p.bound, "phase {}: {} > {}", p.two_delta, p.augmentations, p.bound);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn matches_brute_force(seed in any::<u64>()) {
        let inst = random_instance(seed, 10, 6, 6, 50);
        check_against_oracle(&inst)?;
    }

    #[test]
    fn weak_duality_on_every_subset(seed in any::<u64>()) {
        let inst = random_instance(seed, 8, 5, 5, 30);
        let got = solve(&inst).unwrap();
        for mask in 0u32..1 << inst.n() {
            let s: Vec<usize> = (0..inst.n()).filter(|&i| mask >> i & 1 == 1).collect();
            prop_assert!(got.flow_value + got.offset <= inst.evaluate(&s).unwrap());
        }
    }
}

#[test]
fn large_weights_with_many_phases() {
    for seed in 0..40 {
        let inst = random_instance(seed, 9, 5, 6, 1_000_000);
        check_against_oracle(&inst).unwrap();
    }
}

/// Shortest `s`–`t` distance in the residual graph built from scratch.
fn naive_distance(solver: &Solver<'_, i64>, inst: &Instance<i64>) -> Option<usize> {
    let n = inst.n();
    let c = solver.phase().ceil_delta();
    let mut adj = vec![Vec::new(); n];
    for (t, term) in solver.terms().iter().enumerate() {
        let members = solver.term_members(t);
        let def = &inst.terms()[t];
        for (a, b) in naive_arc_set(def, &term.flows(), solver.phase()) {
            adj[members[a]].push(members[b]);
        }
    }
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for i in 0..n {
        if inst.source_caps()[i] - solver.source_flow()[i] >= c {
            dist[i] = 1;
            queue.push_back(i);
        }
    }
    while let Some(v) = queue.pop_front() {
        if inst.sink_caps()[v] - solver.sink_flow()[v] >= c {
            return Some(dist[v] + 1);
        }
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    None
}

#[test]
fn every_path_is_shortest_and_uses_residual_arcs() {
    for seed in 0..150 {
        let inst = random_instance(seed, 9, 5, 6, 40);
        let mut solver = Solver::new(&inst, SolveOptions::default());
        let mut phase = submin::phase::Phase::initial(inst.bound());
        loop {
            solver.start_phase(phase);
            solver.saturate_direct_paths();
            loop {
                let expect = naive_distance(&solver, &inst);
                let path = solver.find_augmenting_path();
                match (&path, expect) {
                    (None, None) => break,
                    (Some(p), Some(d)) => assert_eq!(p.hops.len(), d, "seed {seed}: {p:?}"),
                    _ => panic!("seed {seed}: search found {path:?}, expected length {expect:?}"),
                }
                let path = path.unwrap();
                for hop in &path.hops {
                    if let Hop::Term { term, from_pos, to_pos, .. } = *hop {
                        let arcs = naive_arc_set(&inst.terms()[term], &solver.terms()[term].flows(), phase);
                        assert!(arcs.contains(&(from_pos, to_pos)), "seed {seed}: hop {hop:?} not residual");
                    }
                }
                solver.augment(&path);
                let v = solver.audit();
                assert!(v.is_empty(), "seed {seed}: {v:?}");
            }
            match phase.next() {
                Some(p) => phase = p,
                None => break,
            }
        }
        let cut = solver.extract_cut();
        let minimum = brute_min(&inst).unwrap().minimum;
        assert_eq!(solver.flow_value() + inst.offset(), minimum, "seed {seed}");
        assert_eq!(inst.evaluate(&cut).unwrap(), minimum, "seed {seed}");
    }
}
