use super::*;
use crate::data::{Sort, Value};
use crate::lts::Label;

fn sig(actions: &[(&str, Vec<Sort>)]) -> Signature {
    let mut s = Signature::default();
    for (a, ps) in actions {
        s.actions.insert(a.to_string(), Some(ps.clone()));
    }
    s
}

fn traffic_sig() -> Signature {
    sig(&[("red_button", vec![]), ("green_button", vec![]), ("set_red", vec![]), ("set_green", vec![])])
}

#[test]
fn safety_formula_is_box_over_four_element_concat() {
    let f = parse_formula_text("[true*.set_red.(!set_green)*.set_red]false").unwrap();
    let Formula::Box(r, body) = &f else { panic!("{f:?}") };
    assert_eq!(**body, Formula::False);
    fn flatten(r: &Regular, out: &mut Vec<String>) {
        match r {
            Regular::Concat(a, b) => {
                flatten(a, out);
                flatten(b, out);
            }
            other => out.push(other.to_string()),
        }
    }
    let mut parts = Vec::new();
    flatten(r, &mut parts);
    assert_eq!(parts, ["true*", "set_red", "(!set_green)*", "set_red"]);
    // `!` binds tighter than `*`.
    assert_eq!(parse_formula_text("[true*.set_red.!set_green*.set_red]false").unwrap(), f);
}

#[test]
fn liveness_formula_is_diamond() {
    let f = parse_formula_text("<true*.set_red>true").unwrap();
    assert!(matches!(f, Formula::Diamond(..)));
}

#[test]
fn negative_fixpoint_occurrence_is_rejected() {
    let p = parse_property("mu X. !X").unwrap();
    assert_eq!(resolve(&p, &Signature::default()), Err(MuError::NonMonotone("X".into())));
    let p = parse_property("nu X. (X => false)").unwrap();
    assert_eq!(resolve(&p, &Signature::default()), Err(MuError::NonMonotone("X".into())));
}

#[test]
fn unknown_actions_and_arity_are_reported() {
    let s = traffic_sig();
    assert_eq!(parse_formula("[blink]false", &s).unwrap_err(), MuError::UnknownAction("blink".into()));
    let s = sig(&[("f", vec![Sort::Nat { max: None }])]);
    assert!(matches!(parse_formula("[f(1, 2)]false", &s).unwrap_err(), MuError::Arity { .. }));
    assert!(matches!(parse_formula("[f(true)]false", &s).unwrap_err(), MuError::Type(_)));
    assert!(matches!(parse_formula("val(1 + true)", &s).unwrap_err(), MuError::Type(_)));
}

#[test]
fn regular_expansion_matches_defining_equations() {
    let f = |s: &str| expand_regular(&parse_formula_text(s).unwrap()).to_string();
    assert_eq!(f("[a*]val(p)"), "nu X1. val(p) && [a]X1");
    assert_eq!(f("<true*.set_red>true"), "mu X1. <set_red>true || <true>X1");
    assert_eq!(f("[a.b]val(p)"), "[a][b]val(p)");
    assert_eq!(f("[a + b]false"), "[a]false && [b]false");
}

#[test]
fn quantifiers_expand_over_guarded_domains() {
    let s = sig(&[("f", vec![Sort::Nat { max: None }])]);
    let core = |src: &str| {
        let (_, f) = parse_formula(src, &s).unwrap();
        compile(&f, &s)
    };
    assert_eq!(core("forall b: Bool. val(b || !b)").unwrap().to_string(), "true");
    assert_eq!(core("forall i: Nat. val(i < 3) => [f(i)]false").unwrap().to_string(), "([f(0)]false && [f(1)]false && [f(2)]false)");
    assert_eq!(core("exists i: Nat. [f(i)]false").unwrap_err(), MuError::UnboundedQuantifier("i".into()));
    assert!(matches!(core("forall xs: List(Bool, 20). val(true)"), Err(MuError::SortTooLarge { .. })));
}

#[test]
fn nested_list_guards_bound_the_domain() {
    let s = sig(&[("input_dockDoorOpened", vec![Sort::list(Sort::list(Sort::Bool))])]);
    let src = "forall d: List(List(Bool)). val(#d == 3 && (forall i: Nat. i < 3 => #(d.i) == 2)) => [input_dockDoorOpened(d)]false";
    let (_, f) = parse_formula(src, &s).unwrap();
    let c = compile(&f, &s).unwrap();
    let CoreNode::And(parts) = c.node(c.root) else { panic!() };
    assert_eq!(parts.len(), 64);
}

#[test]
fn macros_are_inlined() {
    let mut s = sig(&[]);
    s.consts.push(("lv".into(), Sort::list(Sort::Rat { values: None }), Value::list(vec![Value::Rat(-240), Value::Rat(-235)])));
    let src = "pred eq(a: Rat, b: Rat) = a - b <= 10/100 && b - a <= 10/100;\n val(eq(lv.0, lv.1))";
    let (p, f) = parse_formula(src, &s).unwrap();
    assert_eq!(compile(&f, &s).unwrap().to_string(), "true");
    assert_eq!(parse_property(&p.to_string()).unwrap(), p);
}

#[test]
fn label_matching() {
    let named = |n: &str, args: Option<Vec<Value>>| GroundNamed {
        name: n.into(),
        args: args.map(|a| a.into_iter().map(GroundArg::Is).collect()),
    };
    let not_end = GroundPattern::Not(vec![named("internal_controlEnd", None)]);
    assert!(match_label(&not_end, &Label::new("input_dockLevel", vec![Value::Rat(0)])));
    assert!(!match_label(&not_end, &Label::new("internal_controlEnd", vec![])));
    let args = vec![Value::ctor("operational"), Value::ctor("processOpenDoor"), Value::ctor("active")];
    let start = GroundPattern::Named(named("internal_controlStart", Some(args.clone())));
    assert!(match_label(&start, &Label::new("internal_controlStart", args)));
    assert!(!match_label(&GroundPattern::Named(named("set_red", None)), &Label::new("set_green", vec![])));
}

#[test]
fn alternation_depth() {
    let s = sig(&[("a", vec![]), ("b", vec![])]);
    let ad = |src: &str| compile(&parse_formula(src, &s).unwrap().1, &s).unwrap().alternation_depth();
    assert_eq!(ad("nu X. mu Y. (<a>Y || <b>X)"), 2);
    assert_eq!(ad("nu X. ([a]X && mu Y. (<b>Y || <a>true))"), 1);
    assert_eq!(ad("[true*.a.(!b)*.a]false"), 1);
    assert_eq!(ad("true"), 0);
}

#[test]
fn printed_formulas_reparse() {
    let cases = [
        "[true*.set_red.(!set_green)*.set_red]false",
        "[true*.red_button.!set_red*]<true*.set_red>true",
        "forall x: Bool, y: Nat(3). val(x) => [a(y) + (b || c)*]exists z: Bool. val(z) && <true>true",
        "nu X. mu Y. (<a>Y || <b>X) && !val(1 < 2)",
        "[!(a || b(1, _))]val(forall i: Nat. i < 3 => xs.i.0)",
    ];
    for src in cases {
        let f = parse_formula_text(src).unwrap();
        let printed = f.to_string();
        assert_eq!(parse_formula_text(&printed).unwrap(), f, "{printed}");
    }
}
