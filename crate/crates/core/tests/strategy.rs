use lorenzen::strategy::{export_strategy, find_applications, DefectKind, ExportFormat};
use lorenzen::*;

fn f(s: &str) -> Formula {
    s.parse().unwrap()
}

fn rs(name: &str) -> Ruleset {
    named_ruleset(name).unwrap()
}

fn run(formula: &str, ruleset: &str) -> SearchResult {
    search(&f(formula), &rs(ruleset), &SearchBudget::default())
}

fn assert_verified_win(formula: &str, ruleset: &str) -> StrategyTree {
    let r = run(formula, ruleset);
    let t = r.tree().unwrap_or_else(|| panic!("{formula} under {ruleset}: {r:?}")).clone();
    verify_strategy(&t, &rs(ruleset)).unwrap();
    t
}

#[test]
fn search_examples() {
    assert_verified_win("p -> (q -> p)", "E");
    assert_eq!(run("p | ~p", "E"), SearchResult::NoStrategy);
    assert_verified_win("p | ~p", "CL");
    assert_eq!(run("~p | ~~p", "E"), SearchResult::NoStrategy);
    assert_verified_win("~p -> p", "E*");
    assert_verified_win("~p | ~~p", "E*");
    assert_verified_win("p -> ~~p", "N");
    assert_eq!(run("(p & p) -> ~~(p & p)", "N"), SearchResult::NoStrategy);
    assert_verified_win("~~p -> p", "E'");
    assert_eq!(run("~~p -> p", "E"), SearchResult::NoStrategy);
}

#[test]
fn atom_thesis_is_invalid() {
    for name in PRESET_NAMES {
        assert_eq!(run("p", name), SearchResult::NoStrategy, "{name}");
    }
}

#[test]
fn constrained_examples() {
    let b = SearchBudget::default();
    let c = |s: &str, r: &str, k| search_constrained(&f(s), &rs(r), &b, k);
    let t = c("p | ~p", "CL", Constraint::AttackFirst);
    verify_strategy(t.tree().unwrap(), &rs("CL")).unwrap();
    let t = c("p -> (q -> p)", "CL", Constraint::AttackFirstDefendMostRecent);
    verify_strategy(t.tree().unwrap(), &rs("CL")).unwrap();
    assert_eq!(c("p | ~p", "E", Constraint::AttackFirst), SearchResult::NoStrategy);
}

#[test]
fn search_is_deterministic() {
    for (s, r) in [("p | ~p", "CL"), ("(p -> q) -> (~q -> ~p)", "D"), ("~~p -> p", "E'")] {
        assert_eq!(run(s, r), run(s, r));
    }
}

#[test]
fn verify_detects_uncovered_option() {
    let mut t = assert_verified_win("(p & q) -> (q & p)", "E");
    // drop one O option where O has a choice
    fn prune(n: &mut StrategyNode) -> bool {
        if n.children.len() > 1 && n.mv.player == Player::P {
            n.children.pop();
            return true;
        }
        n.children.iter_mut().any(prune)
    }
    assert!(prune(&mut t.root));
    let err = verify_strategy(&t, &rs("E")).unwrap_err();
    assert!(matches!(err.kind, DefectKind::UncoveredOption { .. }), "{err}");
}

#[test]
fn classical_excluded_middle_play_fails_under_e_at_move_4() {
    let moves: Vec<Move> = [
        Move::initial(f("p | ~p")),
        Move::attack(Player::O, "?".parse().unwrap(), 0),
        Move::defense(Player::P, f("~p"), 1),
        Move::attack(Player::O, f("p").into(), 2),
        Move::defense(Player::P, f("p"), 1),
    ]
    .into();
    let t = StrategyTree::from_play(f("p | ~p"), rs("E"), &moves);
    let err = verify_strategy(&t, &rs("E")).unwrap_err();
    assert_eq!(err.depth, 4);
    assert!(matches!(err.kind, DefectKind::IllegalEdge { .. }), "{err}");
    verify_strategy(&StrategyTree { ruleset: rs("CL"), ..t.clone() }, &rs("CL")).unwrap();
}

#[test]
fn export_dot_and_json() {
    let t = assert_verified_win("p -> (q -> p)", "E");
    let dot = String::from_utf8(export_strategy(&t, ExportFormat::Dot)).unwrap();
    let nodes = dot.lines().filter(|l| l.trim_start().starts_with('n') && l.contains(" [label=")).count();
    let edges = dot.lines().filter(|l| l.contains("[style=")).count();
    assert_eq!((nodes, edges), (5, 4));
    assert!(dot.contains("doublecircle"));
    let json = export_strategy(&t, ExportFormat::Json);
    let back = StrategyDocument::from_json(std::str::from_utf8(&json).unwrap()).unwrap();
    assert_eq!(back.to_tree().unwrap(), t);
}

#[test]
fn dot_out_degree_matches_legal_moves() {
    let t = assert_verified_win("p -> (q -> p)", "CL");
    fn walk(n: &StrategyNode, d: &Dialogue) {
        if d.to_move() == Player::O {
            assert_eq!(n.children.len(), d.legal_moves().len());
        }
        for c in &n.children {
            walk(c, &d.apply_move(&c.mv).unwrap());
        }
    }
    walk(&t.root, &Dialogue::new(t.formula.clone(), t.ruleset.clone()).unwrap());
}

#[test]
fn stability_rewrite_examples() {
    for s in ["~~p -> p", "q -> (~~p -> p)"] {
        let t = assert_verified_win(s, "E'");
        assert_eq!(find_applications(&t), vec!["p".to_string()]);
        let (g, t2) = eliminate_stability_applications(&t).unwrap();
        assert_eq!(g, Formula::implies(f("~~p -> p"), f(s)));
        verify_strategy(&t2, &rs("E")).unwrap_or_else(|e| panic!("{s}: {e}"));
        assert!(run(&g.to_string(), "E").is_win());
    }
}

#[test]
fn stability_rewrite_without_applications_is_identity() {
    let t = assert_verified_win("p -> p", "E'");
    let (g, t2) = eliminate_stability_applications(&t).unwrap();
    assert_eq!(g, f("p -> p"));
    assert_eq!(t2.root, t.root);
    verify_strategy(&t2, &rs("E")).unwrap();
}

#[test]
fn budget_parsing() {
    assert_eq!(SearchBudget::parse("10,20").unwrap().escalation, vec![10, 20]);
    assert!(SearchBudget::parse("20,10").is_err());
    assert!(SearchBudget::parse("0").is_err());
    assert!(SearchBudget::parse("x").is_err());
}
