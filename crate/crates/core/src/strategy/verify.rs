use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use crate::dialogue::{Dialogue, Move, Player, Violation};
use crate::rules::Ruleset;

use super::StrategyTree;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DefectKind {
    /// The thesis cannot be asserted under the ruleset.
    InitialMoveIllegal { violation: String },
    /// An edge is not a legal move at its node.
    IllegalEdge { mv: String, violation: String },
    /// A legal O move has no child.
    UncoveredOption { mv: String },
    /// A leaf that is not a win for P.
    LosingLeaf,
    /// A node where P is to move does not prescribe exactly one move.
    Branching { children: usize },
    /// The same O move appears twice.
    DuplicateOption { mv: String },
}

/// First defect found in breadth-first order, hence at minimal depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrategyDefect {
    /// Moves from the root to the node where the defect sits.
    pub path: Vec<String>,
    pub depth: usize,
    #[serde(flatten)]
    pub kind: DefectKind,
}

impl fmt::Display for StrategyDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at depth {} ({}): ", self.depth, self.path.join("; "))?;
        match &self.kind {
            DefectKind::InitialMoveIllegal { violation } => {
                write!(f, "initial move illegal ({violation})")
            }
            DefectKind::IllegalEdge { mv, violation } => {
                write!(f, "illegal edge `{mv}` ({violation})")
            }
            DefectKind::UncoveredOption { mv } => write!(f, "O option `{mv}` not covered"),
            DefectKind::LosingLeaf => write!(f, "leaf is not a win for P"),
            DefectKind::Branching { children } => {
                write!(f, "P node with {children} children instead of one")
            }
            DefectKind::DuplicateOption { mv } => write!(f, "O option `{mv}` listed twice"),
        }
    }
}

fn render(moves: &[Move]) -> Vec<String> {
    moves.iter().map(|m| m.to_string()).collect()
}

/// Checks that `t` is a winning strategy under `rs`.
pub fn verify_strategy(t: &StrategyTree, rs: &Ruleset) -> Result<(), StrategyDefect> {
    let defect = |moves: &[Move], kind| StrategyDefect {
        path: render(moves),
        depth: moves.len(),
        kind,
    };
    if t.root.mv != Move::initial(t.formula.clone()) {
        return Err(defect(
            &[],
            DefectKind::IllegalEdge {
                mv: t.root.mv.to_string(),
                violation: "root must be the initial assertion of the formula".into(),
            },
        ));
    }
    let d0 = Dialogue::new(t.formula.clone(), rs.clone()).map_err(|e| {
        defect(
            &[],
            DefectKind::InitialMoveIllegal {
                violation: e.violation().to_string(),
            },
        )
    })?;
    let mut queue = VecDeque::from([(d0, &t.root)]);
    while let Some((d, node)) = queue.pop_front() {
        let legal = d.legal_moves();
        for c in &node.children {
            if let Err(v) = d.check(&c.mv) {
                return Err(defect(d.moves(), illegal(&c.mv, v)));
            }
        }
        match d.to_move() {
            Player::P => {
                if node.children.len() != 1 {
                    if node.children.is_empty() {
                        return Err(defect(d.moves(), DefectKind::LosingLeaf));
                    }
                    return Err(defect(
                        d.moves(),
                        DefectKind::Branching {
                            children: node.children.len(),
                        },
                    ));
                }
            }
            Player::O => {
                for m in &legal {
                    let n = node.children.iter().filter(|c| &c.mv == m).count();
                    if n == 0 {
                        return Err(defect(d.moves(), DefectKind::UncoveredOption { mv: m.to_string() }));
                    }
                    if n > 1 {
                        return Err(defect(d.moves(), DefectKind::DuplicateOption { mv: m.to_string() }));
                    }
                }
                if node.children.is_empty() && !d.proponent_wins() {
                    return Err(defect(d.moves(), DefectKind::LosingLeaf));
                }
            }
        }
        for c in &node.children {
            let next = d.apply_move(&c.mv).expect("checked above");
            queue.push_back((next, c));
        }
    }
    Ok(())
}

fn illegal(m: &Move, v: Violation) -> DefectKind {
    DefectKind::IllegalEdge {
        mv: m.to_string(),
        violation: v.to_string(),
    }
}
