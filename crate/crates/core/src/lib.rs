//! Lorenzen dialogue games for propositional logic.
//!
//! The crate decides dialogical validity under composable structural
//! rulesets, produces and checks winning strategies, compares verdicts with
//! independent logic oracles, and runs experiment scans over enumerated
//! formulas.

pub mod dialogue;
pub mod experiments;
pub mod formula;
pub mod interchange;
pub mod oracles;
pub mod rules;
pub mod strategy;

pub use dialogue::{
    attacks_against, defenses_against, replay, Dialogue, DialogueError, Move, Player, Stance,
    Statement, SymbolicAttack, Violation,
};
pub use formula::{enumerate_formulas, parse, Formula, ParseError};
pub use rules::{
    compose_ruleset, named_ruleset, parse_ruleset, presets, rule_permits, Ruleset, RulesetError, PRESET_NAMES,
    StructuralRuleId,
};
pub use interchange::{CheckDocument, DialogueDocument, InterchangeError, StrategyDocument};
pub use oracles::{
    classical_valid, intuitionistic_valid, stability_antecedent, stable_valid, Oracle,
    OracleVerdict,
};
pub use strategy::{
    eliminate_stability_applications, evaluate_dialogue, search, search_constrained, search_report, verify_strategy,
    export_strategy, BudgetError, Constraint, ExportFormat, SearchBudget, SearchReport, SearchResult, StrategyNode, StrategyTree, UnknownConstraint, Verdict,
};
