//! Depth-bounded proof search over abstract positions.
//!
//! Values are three-valued: a win within some number of moves, a loss (no
//! win at any depth), or unknown (cut off by the depth bound). A position
//! that is dominated by one of its ancestors counts as lost: along a
//! shortest win the remaining height strictly decreases, and a dominated
//! position needs at least the height of its ancestor, so no shortest win
//! passes through it. Results that relied on such a cut above the current
//! node are path dependent and are not cached, except wins, which are
//! always genuine.

use std::collections::HashMap;

use crate::dialogue::{Dialogue, Move, Player, Stance};

use super::position::{abstract_move, AMove, Arena, Modes, Position};
use super::{Constraint, StrategyNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Win(u16),
    Lose,
    Unknown,
}

#[derive(Debug, Clone, Copy, Default)]
struct Entry {
    /// Smallest height at which a win was found.
    win: Option<u16>,
    /// No win exists at any height.
    lose: bool,
    /// No win exists within this many moves.
    no_win_within: u16,
}

pub(crate) struct Solver<'a> {
    pub arena: &'a Arena,
    pub modes: Modes,
    cache: HashMap<Position, Entry>,
    path: Vec<Position>,
    pub nodes: u64,
    pub max_nodes: u64,
    pub aborted: bool,
    pub depth_cut: bool,
}

impl<'a> Solver<'a> {
    pub fn new(arena: &'a Arena, modes: Modes, max_nodes: u64) -> Solver<'a> {
        Solver {
            arena,
            modes,
            cache: HashMap::new(),
            path: Vec::new(),
            nodes: 0,
            max_nodes,
            aborted: false,
            depth_cut: false,
        }
    }

    /// Solves `pos` with `r` moves left, independent of any path.
    pub fn solve_root(&mut self, pos: &Position, r: u16) -> Outcome {
        self.path.clear();
        self.depth_cut = false;
        self.solve(pos, r).0
    }

    fn lookup(&self, pos: &Position, r: u16) -> Option<Outcome> {
        let e = self.cache.get(pos)?;
        if e.lose {
            return Some(Outcome::Lose);
        }
        if let Some(h) = e.win {
            if h <= r {
                return Some(Outcome::Win(h));
            }
        }
        if r <= e.no_win_within {
            return Some(Outcome::Unknown);
        }
        None
    }

    /// Returns the outcome and the shallowest path index that a cut in the
    /// subtree relied on (`usize::MAX` if none).
    fn solve(&mut self, pos: &Position, r: u16) -> (Outcome, usize) {
        let cached = self.lookup(pos, r);
        if let Some(o @ (Outcome::Win(_) | Outcome::Lose)) = cached {
            return (o, usize::MAX);
        }
        // a repetition beats a cached depth cut: it settles the branch
        for (i, anc) in self.path.iter().enumerate() {
            if pos.dominated_by(anc, &self.modes) {
                return (Outcome::Lose, i);
            }
        }
        if cached == Some(Outcome::Unknown) {
            self.depth_cut = true;
            return (Outcome::Unknown, usize::MAX);
        }
        if self.aborted {
            return (Outcome::Unknown, usize::MAX);
        }
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            self.aborted = true;
            return (Outcome::Unknown, usize::MAX);
        }

        let mut children: Vec<Position> = pos
            .moves(self.arena, &self.modes)
            .into_iter()
            .map(|m| pos.apply(self.arena, &self.modes, m))
            .collect();
        dedup_keep_order(&mut children);

        let outcome;
        let mut anc_min = usize::MAX;
        if children.is_empty() {
            outcome = if pos.p_to_move {
                Outcome::Lose
            } else {
                Outcome::Win(0)
            };
        } else if r == 0 {
            self.depth_cut = true;
            outcome = Outcome::Unknown;
        } else {
            // cheap pass over known results first
            for c in &children {
                match (pos.p_to_move, self.lookup(c, r - 1)) {
                    (true, Some(Outcome::Win(h))) => {
                        return (self.record(pos, r, Outcome::Win(h + 1), usize::MAX), usize::MAX)
                    }
                    (false, Some(Outcome::Lose)) => {
                        return (self.record(pos, r, Outcome::Lose, usize::MAX), usize::MAX)
                    }
                    _ => {}
                }
            }
            self.path.push(pos.clone());
            let mut unknown = false;
            let mut best: Option<Outcome> = None;
            let mut max_h = 0u16;
            for c in &children {
                let (o, a) = self.solve(c, r - 1);
                anc_min = anc_min.min(a);
                match (pos.p_to_move, o) {
                    (true, Outcome::Win(h)) => {
                        best = Some(Outcome::Win(h + 1));
                        break;
                    }
                    (false, Outcome::Lose) => {
                        best = Some(Outcome::Lose);
                        break;
                    }
                    (_, Outcome::Unknown) => unknown = true,
                    (false, Outcome::Win(h)) => max_h = max_h.max(h),
                    (true, Outcome::Lose) => {}
                }
            }
            self.path.pop();
            outcome = match best {
                Some(o) => o,
                None if unknown => Outcome::Unknown,
                None if pos.p_to_move => Outcome::Lose,
                None => Outcome::Win(max_h + 1),
            };
            return (self.record(pos, r, outcome, anc_min), anc_min);
        }
        (self.record(pos, r, outcome, anc_min), anc_min)
    }

    fn record(&mut self, pos: &Position, r: u16, o: Outcome, anc_min: usize) -> Outcome {
        let own_depth = self.path.len();
        let path_free = anc_min >= own_depth;
        match o {
            Outcome::Win(h) => {
                let e = self.cache.entry(pos.clone()).or_default();
                e.win = Some(e.win.map_or(h, |w| w.min(h)));
            }
            Outcome::Lose if path_free && !self.aborted => {
                self.cache.entry(pos.clone()).or_default().lose = true;
            }
            Outcome::Unknown if path_free && !self.aborted => {
                let e = self.cache.entry(pos.clone()).or_default();
                e.no_win_within = e.no_win_within.max(r);
            }
            _ => {}
        }
        o
    }

    /// Win height recorded for `pos`, searching if needed.
    fn win_within(&mut self, pos: &Position, r: u16) -> Option<u16> {
        match self.solve_root(pos, r) {
            Outcome::Win(h) => Some(h),
            _ => None,
        }
    }

    /// Builds the concrete strategy below dialogue `d`, whose position is
    /// known to be won within `h` moves.
    pub fn extract(&mut self, d: &mut Dialogue, pos: &Position, h: u16) -> Vec<StrategyNode> {
        let legal = d.legal_moves();
        if d.to_move() == Player::P {
            let legal = constrain(d.moves(), legal, self.modes.constraint);
            for m in legal {
                let am = abstract_move(self.arena, &self.modes, d.moves(), &m);
                let child = pos.apply(self.arena, &self.modes, am);
                if let Some(hc) = self.win_within(&child, h.saturating_sub(1)) {
                    return vec![self.extract_child(d, m, &child, hc)];
                }
            }
            panic!("won position without a winning P move");
        }
        let mut out = Vec::with_capacity(legal.len());
        for m in legal {
            let am: AMove = abstract_move(self.arena, &self.modes, d.moves(), &m);
            let child = pos.apply(self.arena, &self.modes, am);
            let hc = self
                .win_within(&child, h.saturating_sub(1))
                .expect("every O reply of a won position is won");
            out.push(self.extract_child(d, m, &child, hc));
        }
        out
    }

    fn extract_child(&mut self, d: &mut Dialogue, m: Move, child: &Position, h: u16) -> StrategyNode {
        let len = d.len();
        d.push(m.clone()).expect("abstract moves mirror legal moves");
        let children = self.extract(d, child, h);
        d.truncate(len);
        StrategyNode { mv: m, children }
    }
}

/// Restricts P's legal moves after `prefix` according to a normal-form
/// preference. Only attacks P has not made before take precedence over
/// defenses: under E and CL an attack can be repeated forever, and a
/// repetition gains P no concession.
pub(crate) fn constrain(prefix: &[Move], moves: Vec<Move>, c: Constraint) -> Vec<Move> {
    if c == Constraint::None {
        return moves;
    }
    let fresh = |m: &Move| m.stance == Stance::Attack && !repeats(prefix, m);
    if moves.iter().any(fresh) {
        return moves.into_iter().filter(fresh).collect();
    }
    if c == Constraint::AttackFirstDefendMostRecent {
        let fresh = |m: &Move| m.stance == Stance::Defense && !repeats(prefix, m);
        let newest = moves.iter().filter(|m| fresh(m)).filter_map(|m| m.reference).max();
        if newest.is_some() {
            return moves.into_iter().filter(|m| fresh(m) && m.reference == newest).collect();
        }
    }
    moves
}

/// Whether P already made the same move: the same attack on the same
/// formula, or the same defense against an attack of the same content.
fn repeats(prefix: &[Move], m: &Move) -> bool {
    let target = |x: &Move| x.reference.map(|r| &prefix[r].statement);
    let content = |x: &Move| match x.stance {
        Stance::Defense => x.reference.map(|r| (&prefix[r].statement, target(&prefix[r]))),
        _ => None,
    };
    prefix.iter().any(|x| {
        x.player == Player::P
            && x.stance == m.stance
            && x.statement == m.statement
            && target(x) == target(m)
            && (m.stance == Stance::Attack || content(x) == content(m))
    })
}

fn dedup_keep_order(v: &mut Vec<Position>) {
    if v.len() < 2 {
        return;
    }
    let mut seen: Vec<Position> = Vec::with_capacity(v.len());
    v.retain(|p| {
        if seen.contains(p) {
            false
        } else {
            seen.push(p.clone());
            true
        }
    });
}
