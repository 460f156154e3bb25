use super::*;
use crate::lts::{explore, ExploreLimits, Label, Lts, Transition};
use crate::model::{parse_model, typecheck};
use crate::mucalc::{parse_formula, Sign};

const TRAFFIC_LIGHT: &str = "
sort Colour = struct red | green;
act red_button, green_button, set_red, set_green;
proc P(col: Colour) =
    red_button.(col == green) -> set_red.P(red) <> P(col)
  + green_button.(col == red) -> set_green.P(green) <> P(col);
init P(red);
";

const MUTANT: &str = "
sort Colour = struct red | green;
act red_button, green_button, set_red, set_green;
proc P(col: Colour) =
    red_button.set_red.P(red)
  + green_button.(col == red) -> set_green.P(green) <> P(col);
init P(red);
";

const SAFETY: &str = "[true*.set_red.(!set_green)*.set_red]false";
const LIVENESS: &str = "<true*.set_red>true";

fn lts_of(src: &str) -> Lts {
    let tm = typecheck(&parse_model(src).unwrap()).unwrap();
    explore(&tm, ExploreLimits::default(), 1).unwrap()
}

fn core(l: &Lts, src: &str) -> CoreFormula {
    let sig = Signature::from_lts(l);
    let (_, f) = parse_formula(src, &sig).unwrap();
    compile(&f, &sig).unwrap()
}

fn run(l: &Lts, src: &str) -> VerificationResult {
    let sig = Signature::from_lts(l);
    let (_, f) = parse_formula(src, &sig).unwrap();
    check(l, &f, &sig, CheckOptions::default()).unwrap()
}

fn hand_lts(n: u32, edges: &[(u32, &str, u32)]) -> Lts {
    let mut labels: Vec<Label> = Vec::new();
    let mut transitions = Vec::new();
    for (src, a, dst) in edges {
        let idx = labels.iter().position(|l| &*l.action == *a).unwrap_or_else(|| {
            labels.push(Label::new(a, vec![]));
            labels.len() - 1
        });
        transitions.push(Transition { src: *src, label: idx as u32, dst: *dst });
    }
    Lts { initial: 0, num_states: n, labels, transitions }
}

fn members(set: &fixedbitset::FixedBitSet) -> Vec<usize> {
    set.ones().collect()
}

#[test]
fn naive_evaluator_examples() {
    let l = lts_of(TRAFFIC_LIGHT);
    assert_eq!(members(&check_naive(&l, &core(&l, SAFETY))), [0, 1, 2, 3]);
    assert_eq!(members(&check_naive(&l, &core(&l, "<true>true"))), [0, 1, 2, 3]);
    let single = hand_lts(1, &[]);
    assert_eq!(members(&check_naive(&single, &core(&single, "[true]false"))), [0]);
}

#[test]
fn equation_counts_and_blocks() {
    let l = lts_of(TRAFFIC_LIGHT);
    let bes = generate_bes(&l, &core(&l, "nu X. [true]X"), &[l.initial], DEFAULT_MAX_EQUATIONS).unwrap();
    assert_eq!(bes.equations.len(), 4);
    assert_eq!(bes.blocks.len(), 1);
    assert_eq!(bes.blocks[0].sign, Sign::Nu);

    // Golden counts, frozen from the first verified build.
    let safety = core(&l, SAFETY);
    let bes = generate_bes(&l, &safety, &[l.initial], DEFAULT_MAX_EQUATIONS).unwrap();
    assert_eq!(bes.equations.len(), SAFETY_EQUATIONS);
    let all: Vec<u32> = (0..l.num_states).collect();
    let bes = generate_bes(&l, &safety, &all, DEFAULT_MAX_EQUATIONS).unwrap();
    assert_eq!(bes.equations.len(), SAFETY_EQUATIONS);

    let cycle = hand_lts(2, &[(0, "a", 1), (1, "b", 0)]);
    let f = core(&cycle, "nu X. mu Y. (<a>Y || <b>X)");
    let bes = generate_bes(&cycle, &f, &[0], DEFAULT_MAX_EQUATIONS).unwrap();
    assert_eq!(bes.blocks.iter().map(|b| b.sign).collect::<Vec<_>>(), [Sign::Nu, Sign::Mu]);
    assert!(solve_bes(&bes).value(bes.roots[0]));
}

/// Equations for the safety formula on the traffic light.
const SAFETY_EQUATIONS: usize = 18;

#[test]
fn capacity_is_enforced() {
    let l = lts_of(TRAFFIC_LIGHT);
    let err = generate_bes(&l, &core(&l, "nu X. [true]X"), &[l.initial], 3).unwrap_err();
    assert_eq!(err, CheckError::CapacityExceeded { cap: 3 });
}

#[test]
fn self_referencing_equations() {
    let x_is_x = vec![Equation { op: Op::And, args: vec![0] }];
    let nu = Bes::from_blocks(vec![(Sign::Nu, x_is_x.clone())], vec![Ref::Var(0)]);
    assert!(solve_bes(&nu).value(Ref::Var(0)));
    let mu = Bes::from_blocks(vec![(Sign::Mu, x_is_x)], vec![Ref::Var(0)]);
    assert!(!solve_bes(&mu).value(Ref::Var(0)));
}

#[test]
fn mixed_component_uses_outer_sign() {
    // nu X = Y, mu Y = X: the cycle's outermost block is nu.
    let bes = Bes::from_blocks(
        vec![
            (Sign::Nu, vec![Equation { op: Op::Or, args: vec![1] }]),
            (Sign::Mu, vec![Equation { op: Op::Or, args: vec![0] }]),
        ],
        vec![Ref::Var(0)],
    );
    assert_eq!(solve_bes(&bes).values, [true, true]);
    let bes = Bes::from_blocks(
        vec![
            (Sign::Mu, vec![Equation { op: Op::Or, args: vec![1] }]),
            (Sign::Nu, vec![Equation { op: Op::Or, args: vec![0] }]),
        ],
        vec![Ref::Var(0)],
    );
    assert_eq!(solve_bes(&bes).values, [false, false]);
}

#[test]
fn traffic_light_verdicts() {
    let l = lts_of(TRAFFIC_LIGHT);
    let safety = run(&l, SAFETY);
    assert!(safety.holds && safety.safety_fragment && safety.counterexample.is_none());
    let liveness = run(&l, LIVENESS);
    assert!(liveness.holds && !liveness.safety_fragment);
}

/// Length of the shortest path whose labels match
/// `true*.set_red.(!set_green)*.set_red`, by search over the product of the
/// LTS with the pattern's three-phase automaton.
fn shortest_violation(l: &Lts) -> Option<usize> {
    let adj = l.adjacency();
    let mut seen = std::collections::HashSet::new();
    let mut frontier = vec![(l.initial, 0u8)];
    seen.insert((l.initial, 0u8));
    let mut depth = 0;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (s, phase) in frontier {
            for &(lab, t) in adj.out(s) {
                let a = &*l.labels[lab as usize].action;
                let phases: Vec<u8> = match (phase, a) {
                    (0, "set_red") => vec![0, 1],
                    (0, _) => vec![0],
                    (1, "set_red") => return Some(depth + 1),
                    (1, "set_green") => vec![],
                    (1, _) => vec![1],
                    _ => unreachable!(),
                };
                for p in phases {
                    if seen.insert((t, p)) {
                        next.push((t, p));
                    }
                }
            }
        }
        frontier = next;
        depth += 1;
    }
    None
}

#[test]
fn mutant_counterexample_is_shortest_and_replayable() {
    let l = lts_of(MUTANT);
    let r = run(&l, SAFETY);
    assert!(!r.holds);
    let cx = r.counterexample.expect("safety fragment");
    assert_eq!(Some(cx.labels.len()), shortest_violation(&l));
    // Replay: each step is a transition of the LTS.
    assert_eq!(cx.states[0], l.initial);
    for (i, lab) in cx.labels.iter().enumerate() {
        assert!(l.transitions.iter().any(|t| t.src == cx.states[i] && t.dst == cx.states[i + 1] && l.label(t) == lab));
    }
    let names: Vec<&str> = cx.labels.iter().map(|x| &*x.action).collect();
    let reds: Vec<usize> = names.iter().enumerate().filter(|(_, a)| **a == "set_red").map(|(i, _)| i).collect();
    assert_eq!(reds.len(), 2);
    assert_eq!(*names.last().unwrap(), "set_red");
    assert!(!names[reds[0]..].contains(&"set_green"));
    // The path alone, as an LTS, already violates the formula.
    let path = hand_lts(
        cx.labels.len() as u32 + 1,
        &cx.labels.iter().enumerate().map(|(i, x)| (i as u32, &*x.action, i as u32 + 1)).collect::<Vec<_>>(),
    );
    assert!(!check_naive(&path, &core(&l, SAFETY)).contains(0));
}

#[test]
fn counterexample_edge_cases() {
    let l = lts_of(MUTANT);
    let f = core(&l, "[true*]<true*.set_green>true");
    let bes = generate_bes(&l, &f, &[l.initial], DEFAULT_MAX_EQUATIONS).unwrap();
    let sol = solve_bes(&bes);
    assert_eq!(extract_counterexample(&l, &f, &bes, &sol), Err(CheckError::NotSafetyFragment));

    let r = run(&l, "val(1 > 2)");
    let cx = r.counterexample.unwrap();
    assert!(cx.labels.is_empty());
    assert_eq!(cx.states, [l.initial]);
}

#[test]
fn per_state_results_match_naive() {
    let l = lts_of(MUTANT);
    for src in [SAFETY, LIVENESS, "nu X. mu Y. (<set_red>Y || <set_green>X)", "[true*]<true*.set_green>true"] {
        let f = core(&l, src);
        let r = check_core(&l, &f, CheckOptions { per_state: true, ..CheckOptions::default() }).unwrap();
        let expect: Vec<u32> = check_naive(&l, &f).ones().map(|s| s as u32).collect();
        assert_eq!(r.satisfying.unwrap(), expect, "{src}");
    }
}

