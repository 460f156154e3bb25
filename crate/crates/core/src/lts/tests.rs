use super::*;
use crate::model::{parse_model, typecheck};

const TRAFFIC_LIGHT: &str = "
sort Colour = struct red | green;
act red_button, green_button, set_red, set_green;
proc P(col: Colour) =
    red_button.(col == green) -> set_red.P(red) <> P(col)
  + green_button.(col == red) -> set_green.P(green) <> P(col);
init P(red);
";

fn lts_of(src: &str, workers: usize) -> Lts {
    let tm = typecheck(&parse_model(src).unwrap()).unwrap();
    explore(&tm, ExploreLimits::default(), workers).unwrap()
}

#[test]
fn traffic_light_has_four_states_and_six_transitions() {
    let lts = lts_of(TRAFFIC_LIGHT, 1);
    assert_eq!((lts.num_states, lts.transitions.len()), (4, 6));
    assert!(lts.deadlocks().is_empty());
    let init_labels: Vec<String> = lts
        .transitions
        .iter()
        .filter(|t| t.src == lts.initial)
        .map(|t| lts.label(t).to_string())
        .collect();
    assert_eq!(init_labels, ["red_button", "green_button"]);
}

#[test]
fn single_skip_terminates() {
    let lts = lts_of("proc P = skip; init P;", 1);
    assert_eq!((lts.num_states, lts.transitions.len()), (2, 1));
    assert_eq!(lts.deadlocks(), vec![1]);
}

#[test]
fn worker_count_does_not_change_numbering() {
    let src = "
        act tick: Nat(7); glob n: Nat(7) = 0;
        proc C = sum i: Nat(2) . (n + i <= 7) -> n := (n + i) . tick(n) . C;
        init C;";
    let one = lts_of(src, 1);
    for w in [2, 4, 8] {
        assert_eq!(lts_of(src, w), one);
    }
}

#[test]
fn limits_return_partial_result() {
    let src = "act tick: Nat(99); glob n: Nat(99) = 0; proc C = (n < 99) -> n := (n + 1) . tick(n) . C; init C;";
    let tm = typecheck(&parse_model(src).unwrap()).unwrap();
    let limits = ExploreLimits { max_states: 10, ..ExploreLimits::default() };
    match explore(&tm, limits, 1) {
        Err(ExploreError::LimitExceeded { partial, .. }) => assert_eq!(partial.num_states, 10),
        other => panic!("{other:?}"),
    }
}

#[test]
fn out_of_sort_assignment_is_reported() {
    let src = "act tick; glob n: Nat(2) = 0; proc C = n := (n + 1) . tick . C; init C;";
    let tm = typecheck(&parse_model(src).unwrap()).unwrap();
    let err = explore(&tm, ExploreLimits::default(), 1).unwrap_err();
    assert!(err.to_string().contains("not a member"), "{err}");
}

#[test]
fn text_format_round_trips() {
    let src = "
        sort M = struct on | off;
        act out: List(Bool, 2) # Rat # M;
        proc P = out([true, false], -240/100, on) . out([false, false], 35/10, off) . P;
        init P;";
    let lts = lts_of(src, 1);
    let mut buf = Vec::new();
    write_lts(&lts, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.contains("\"out([true, false], -240/100, on)\""), "{text}");
    let back = read_lts(&mut buf.as_slice()).unwrap();
    assert_eq!(back, lts);
}

#[test]
fn malformed_text_reports_line() {
    let bad = "lts 0 2 2\n0 \"a\" 1\n1 a 0\n";
    match read_lts(&mut bad.as_bytes()) {
        Err(FormatError::Syntax { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
}
