mod common;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use sbmc_core::checker::{check, CheckOptions};
use sbmc_core::lts::Lts;
use sbmc_core::mucalc::{Formula, Regular};

use common::*;

#[test]
fn solver_agrees_with_naive_evaluation() {
    let mut rng = StdRng::seed_from_u64(7);
    for i in 0..200 {
        if let Err(e) = oracle_instance(&mut rng) {
            panic!("instance {i}: {e}");
        }
    }
}

#[test]
fn expansion_agrees_with_automaton_reference() {
    let mut rng = StdRng::seed_from_u64(11);
    for i in 0..100 {
        if let Err(e) = regular_instance(&mut rng) {
            panic!("instance {i}: {e}");
        }
    }
}

#[test]
fn box_false_is_dual_to_diamond_true() {
    let mut rng = StdRng::seed_from_u64(13);
    let sig = signature();
    for _ in 0..200 {
        let l = random_lts(&mut rng, 20);
        let r: Regular = random_regular(&mut rng, 4);
        let boxed = check(&l, &Formula::boxed(r.clone(), Formula::False), &sig, CheckOptions::default()).unwrap();
        let diamond = check(&l, &Formula::diamond(r.clone(), Formula::True), &sig, CheckOptions::default()).unwrap();
        assert_ne!(boxed.holds, diamond.holds, "{r}");
    }
}

#[test]
fn reference_evaluator_examples() {
    // a-cycle between 0 and 1, b from 1 to the deadlock 2.
    let l = lts_from_edges(3, &[(0, "a", 1), (1, "a", 0), (1, "b", 2)]);
    let sig = signature();
    let f = |s: &str| sbmc_core::mucalc::parse_formula(s, &sig).unwrap().1;
    assert_eq!(reference_eval(&l, &f("<a*.b>true"), &sig), [true, true, false]);
    assert_eq!(reference_eval(&l, &f("[a*]<true>true"), &sig), [true, true, false]);
    assert_eq!(reference_eval(&l, &f("[(a.a)*.b]false"), &sig), [true, false, true]);
    assert_eq!(reference_eval(&l, &f("nu X. <a>X"), &sig), [true, true, false]);
}

/// Executable words of length `k` in lexicographic order.
fn words(l: &Lts, k: usize) -> Vec<Vec<&'static str>> {
    let mut out = vec![(vec![], vec![l.initial])];
    for _ in 0..k {
        let mut next = Vec::new();
        for (w, states) in &out {
            for a in ACTIONS {
                let mut succ: Vec<u32> = l
                    .transitions
                    .iter()
                    .filter(|t| states.contains(&t.src) && &*l.label(t).action == a)
                    .map(|t| t.dst)
                    .collect();
                succ.sort();
                succ.dedup();
                if !succ.is_empty() {
                    let mut w2: Vec<&'static str> = w.clone();
                    w2.push(a);
                    next.push((w2, succ));
                }
            }
        }
        out = next;
    }
    out.into_iter().map(|(w, _)| w).collect()
}

fn random_safety_formula(rng: &mut StdRng, depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.8) { Formula::False } else { Formula::True };
    }
    if rng.gen_bool(0.3) {
        Formula::and(random_safety_formula(rng, depth - 1), random_safety_formula(rng, depth - 1))
    } else {
        Formula::boxed(random_regular(rng, 4), random_safety_formula(rng, depth - 1))
    }
}

#[test]
fn counterexample_is_smallest_shortest_word() {
    let mut rng = StdRng::seed_from_u64(17);
    let sig = signature();
    let mut checked = 0;
    while checked < 200 {
        let l = random_lts(&mut rng, 8);
        let f = random_safety_formula(&mut rng, 3);
        let r = check(&l, &f, &sig, CheckOptions::default()).unwrap();
        if r.holds {
            continue;
        }
        checked += 1;
        let cx = r.counterexample.expect("safety fragment");
        // The first word, by length then alphabet, whose path alone
        // refutes the formula.
        let expected = (0..=l.num_states as usize * 4)
            .find_map(|k| {
                words(&l, k).into_iter().find(|w| {
                    let edges: Vec<(u32, &str, u32)> =
                        w.iter().enumerate().map(|(i, a)| (i as u32, *a, i as u32 + 1)).collect();
                    !reference_eval(&lts_from_edges(w.len() as u32 + 1, &edges), &f, &sig)[0]
                })
            })
            .expect("a refuting word exists");
        let got: Vec<&str> = cx.labels.iter().map(|x| &*x.action).collect();
        assert_eq!(got, expected, "{f}");
        assert_eq!(cx.states[0], l.initial);
        for (i, lab) in cx.labels.iter().enumerate() {
            assert!(l.transitions.iter().any(|t| t.src == cx.states[i] && t.dst == cx.states[i + 1] && l.label(t) == lab));
        }
    }
}
