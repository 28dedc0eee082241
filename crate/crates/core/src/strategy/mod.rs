//! Winning-strategy search, verification, transformation and export.

mod export;
mod graph;
pub(crate) mod position;
mod solver;
mod stability;
mod verify;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dialogue::{Dialogue, Move};
use crate::formula::Formula;
use crate::rules::Ruleset;

pub use export::{export_strategy, ExportError, ExportFormat};
pub use stability::{eliminate_stability_applications, find_applications, RewriteFailure};
pub use verify::{verify_strategy, DefectKind, StrategyDefect};

use position::{position_of, Arena, Modes, Position};
use solver::{Outcome, Solver};

/// Environment variable holding a comma-separated depth escalation.
pub const BUDGET_ENV: &str = "LORENZEN_BUDGET";

/// Limits for one search call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Maximum dialogue length explored in the first attempt.
    pub max_depth: usize,
    /// Node limit per attempt.
    pub max_nodes: u64,
    /// Depth limits tried in order until one gives a definite answer.
    pub escalation: Vec<usize>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_depth: 30,
            max_nodes: 2_000_000,
            escalation: vec![30, 40, 50],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid budget `{0}`: expected a nondecreasing list of positive depths such as 30,40,50")]
pub struct BudgetError(pub String);

impl SearchBudget {
    /// Budget with the given depth escalation and the default node limit.
    pub fn with_escalation(depths: Vec<usize>) -> Result<SearchBudget, BudgetError> {
        let text = depths
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(",");
        if depths.is_empty() || depths.contains(&0) || depths.windows(2).any(|w| w[0] > w[1]) {
            return Err(BudgetError(text));
        }
        Ok(SearchBudget {
            max_depth: depths[0],
            escalation: depths,
            ..SearchBudget::default()
        })
    }

    /// Parses `d1,d2,...`.
    pub fn parse(text: &str) -> Result<SearchBudget, BudgetError> {
        let depths: Result<Vec<usize>, _> = text.split(',').map(|s| s.trim().parse()).collect();
        match depths {
            Ok(d) => SearchBudget::with_escalation(d),
            Err(_) => Err(BudgetError(text.to_string())),
        }
    }

    /// Default budget, overridden by `LORENZEN_BUDGET` when it is set.
    pub fn from_env() -> Result<SearchBudget, BudgetError> {
        match std::env::var(BUDGET_ENV) {
            Ok(text) if !text.trim().is_empty() => SearchBudget::parse(&text),
            _ => Ok(SearchBudget::default()),
        }
    }

    fn depths(&self) -> Vec<usize> {
        let mut out = vec![self.max_depth];
        out.extend(self.escalation.iter().copied().filter(|&d| d > self.max_depth));
        out.dedup();
        out
    }
}

/// Normal-form restriction on P's choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    None,
    /// P defends only when every legal attack repeats one already made.
    AttackFirst,
    /// As `AttackFirst`; defenses answer the most recent attack that has a
    /// legal defense not given before.
    AttackFirstDefendMostRecent,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown constraint `{0}` (expected none, attack-first or afdmr)")]
pub struct UnknownConstraint(pub String);

impl std::str::FromStr for Constraint {
    type Err = UnknownConstraint;

    fn from_str(s: &str) -> Result<Constraint, UnknownConstraint> {
        match s {
            "none" => Ok(Constraint::None),
            "attack-first" => Ok(Constraint::AttackFirst),
            "afdmr" | "attack-first-defend-most-recent" => Ok(Constraint::AttackFirstDefendMostRecent),
            other => Err(UnknownConstraint(other.to_string())),
        }
    }
}

/// One move of a strategy with the continuations it prescribes or covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyNode {
    pub mv: Move,
    pub children: Vec<StrategyNode>,
}

impl StrategyNode {
    pub fn count(&self) -> usize {
        1 + self.children.iter().map(|c| c.count()).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.children.iter().map(|c| c.height()).max().unwrap_or(0)
    }
}

/// A Proponent strategy: the root holds the initial assertion; nodes where
/// P is to move have one child, nodes where O is to move have one child per
/// legal O move, and leaves are positions where O is stuck.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyTree {
    pub formula: Formula,
    pub ruleset: Ruleset,
    pub root: StrategyNode,
}

impl StrategyTree {
    /// All root-to-leaf plays.
    pub fn plays(&self) -> Vec<Vec<Move>> {
        fn walk(n: &StrategyNode, prefix: &mut Vec<Move>, out: &mut Vec<Vec<Move>>) {
            prefix.push(n.mv.clone());
            if n.children.is_empty() {
                out.push(prefix.clone());
            }
            for c in &n.children {
                walk(c, prefix, out);
            }
            prefix.pop();
        }
        let mut out = Vec::new();
        walk(&self.root, &mut Vec::new(), &mut out);
        out
    }

    /// Builds a single-line tree from a play.
    pub fn from_play(formula: Formula, ruleset: Ruleset, moves: &[Move]) -> StrategyTree {
        let mut node: Option<StrategyNode> = None;
        for m in moves.iter().rev() {
            node = Some(StrategyNode {
                mv: m.clone(),
                children: node.into_iter().collect(),
            });
        }
        StrategyTree {
            formula,
            ruleset,
            root: node.expect("a play has at least the initial move"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchResult {
    ProponentWins(StrategyTree),
    NoStrategy,
    /// No definite answer within budget; carries the deepest depth tried.
    Exhausted(usize),
}

/// Verdict without the tree, for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Valid,
    Invalid,
    Unknown,
}

impl SearchResult {
    pub fn verdict(&self) -> Verdict {
        match self {
            SearchResult::ProponentWins(_) => Verdict::Valid,
            SearchResult::NoStrategy => Verdict::Invalid,
            SearchResult::Exhausted(_) => Verdict::Unknown,
        }
    }

    pub fn is_win(&self) -> bool {
        matches!(self, SearchResult::ProponentWins(_))
    }

    pub fn tree(&self) -> Option<&StrategyTree> {
        match self {
            SearchResult::ProponentWins(t) => Some(t),
            _ => None,
        }
    }
}

/// Search outcome with effort statistics.
#[derive(Debug, Clone)]
pub struct SearchReport {
    pub result: SearchResult,
    /// Depth limit at which the answer was obtained (or the last one tried).
    pub depth: usize,
    /// Positions expanded over all attempts.
    pub nodes: u64,
    pub elapsed_ms: f64,
}

/// Looks for a Proponent winning strategy for `f` under `rs`.
pub fn search(f: &Formula, rs: &Ruleset, b: &SearchBudget) -> SearchResult {
    search_report(f, rs, b, Constraint::None, true).result
}

/// As [`search`], restricting P to the given normal form.
pub fn search_constrained(f: &Formula, rs: &Ruleset, b: &SearchBudget, c: Constraint) -> SearchResult {
    search_report(f, rs, b, c, true).result
}

/// Full search entry point. With `build_tree` false a win is reported with
/// a tree holding only the initial move.
pub fn search_report(
    f: &Formula,
    rs: &Ruleset,
    b: &SearchBudget,
    c: Constraint,
    build_tree: bool,
) -> SearchReport {
    let started = Instant::now();
    let done = |result, depth, nodes| SearchReport {
        result,
        depth,
        nodes,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    let mut dialogue = match Dialogue::new(f.clone(), rs.clone()) {
        Ok(d) => d,
        Err(_) => return done(SearchResult::NoStrategy, 0, 0),
    };
    let arena = match Arena::new(f, rs) {
        Some(a) => a,
        None => return done(SearchResult::Exhausted(0), 0, 0),
    };
    let modes = Modes::new(rs, c);
    let mut total_nodes = 0u64;
    // a cheap refutation first: exact search cannot settle such games
    if refute(&arena, &modes, f, &REFUTATION_CAPS[..1], b.max_nodes / 20, &mut total_nodes) {
        return done(SearchResult::NoStrategy, 0, total_nodes);
    }
    let root = Position::initial(&arena, &modes, arena.id(f));
    let mut solver = Solver::new(&arena, modes, b.max_nodes);
    let mut last_depth = 0;
    // lengths count the initial move, so `depth` moves leave `depth - 1`
    for depth in b.depths() {
        solver.nodes = 0;
        solver.aborted = false;
        last_depth = depth;
        let mut outcome = Outcome::Unknown;
        for r in 1..depth {
            outcome = solver.solve_root(&root, r as u16);
            if outcome != Outcome::Unknown || solver.aborted {
                break;
            }
        }
        total_nodes += solver.nodes;
        match outcome {
            Outcome::Win(h) => {
                let children = if build_tree {
                    // extraction re-solves children; the answer is already known
                    solver.max_nodes = u64::MAX;
                    solver.aborted = false;
                    solver.extract(&mut dialogue, &root, h)
                } else {
                    Vec::new()
                };
                let tree = StrategyTree {
                    formula: f.clone(),
                    ruleset: rs.clone(),
                    root: StrategyNode {
                        mv: Move::initial(f.clone()),
                        children,
                    },
                };
                return done(SearchResult::ProponentWins(tree), depth, total_nodes);
            }
            Outcome::Lose => return done(SearchResult::NoStrategy, depth, total_nodes),
            Outcome::Unknown => {}
        }
    }
    // cycles defeat depth-bounded search; a finite game graph settles them
    if modes.is_finite() && graph::solve_finite(&arena, &modes, &root, b.max_nodes, &mut total_nodes) == Some(false) {
        return done(SearchResult::NoStrategy, last_depth, total_nodes);
    }
    if refute(&arena, &modes, f, &REFUTATION_CAPS, b.max_nodes, &mut total_nodes) {
        return done(SearchResult::NoStrategy, last_depth, total_nodes);
    }
    done(SearchResult::Exhausted(last_depth), last_depth, total_nodes)
}

/// Can P force a win from the current state of `d`? Used to pick moves
/// mid-game; the thesis search above is the special case of a one-move
/// dialogue.
pub fn evaluate_dialogue(d: &Dialogue, b: &SearchBudget) -> Verdict {
    let Some(arena) = Arena::new(d.thesis(), d.ruleset()) else {
        return Verdict::Unknown;
    };
    let modes = Modes::new(d.ruleset(), Constraint::None);
    let root = position_of(&arena, &modes, d.moves());
    let mut solver = Solver::new(&arena, modes, b.max_nodes);
    for depth in b.depths() {
        solver.nodes = 0;
        solver.aborted = false;
        for r in 0..depth.saturating_sub(d.len()).max(1) {
            match solver.solve_root(&root, r as u16) {
                Outcome::Win(_) => return Verdict::Valid,
                Outcome::Lose => return Verdict::Invalid,
                Outcome::Unknown if solver.aborted => break,
                Outcome::Unknown => {}
            }
        }
    }
    let mut nodes = 0;
    // relaxations are not replayed here: O moves of the exact game may be
    // missing from them
    match graph::solve_finite(&arena, &modes, &root, b.max_nodes, &mut nodes) {
        Some(true) => Verdict::Valid,
        Some(false) => Verdict::Invalid,
        None => Verdict::Unknown,
    }
}

/// Stacks that grow without bound keep some games infinite, so exact search
/// can never show that P has no strategy. A loss in a finite relaxation
/// that only helps P settles them.
fn refute(arena: &Arena, modes: &Modes, f: &Formula, caps: &[usize], max_nodes: u64, nodes: &mut u64) -> bool {
    for &cap in caps {
        let Some(relaxed) = modes.relaxed(cap) else {
            return false;
        };
        let root = Position::initial(arena, &relaxed, arena.id(f));
        let mut solver = Solver::new(arena, relaxed.clone(), max_nodes);
        let outcome = solver.solve_root(&root, REFUTATION_HORIZON);
        *nodes += solver.nodes;
        match outcome {
            Outcome::Lose => return true,
            Outcome::Win(_) => continue,
            // depth-first search stalls on cycles; the whole graph does not
            Outcome::Unknown => {
                if graph::solve_finite(arena, &relaxed, &root, max_nodes, nodes) == Some(false) {
                    return true;
                }
            }
        }
    }
    false
}

/// Stack sizes tried by the refutation pass.
const REFUTATION_CAPS: [usize; 3] = [2, 3, 4];
/// Move bound for the refutation pass; the relaxed game is finite, so in
/// practice repetition ends every branch long before this.
const REFUTATION_HORIZON: u16 = 400;
