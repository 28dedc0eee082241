//! Turning an E' strategy into an E strategy for a stability-guarded thesis.
//!
//! An *application* is a P move asserting an atom `p` that plain D10 would
//! forbid: O has conceded `~~p` but not `p`. The rewrite asserts
//! `G -> phi`, where `G` conjoins `~~p -> p` for every exploited atom,
//! lets O concede `G`, extracts its conjuncts, and then plays the original
//! strategy. At each application P first attacks O's conceded `~~p -> p`
//! by asserting `~~p`. If O defends with `p`, the original move becomes
//! D10-legal and play continues as before. If O instead attacks with `~p`,
//! P attacks O's earlier `~~p` by asserting `~p`, O can only answer with
//! `p`, and P attacks O's `~p` with `p`, after which O has no move.

use std::collections::HashMap;
use std::fmt;

use crate::dialogue::{Dialogue, Move, Player, Stance, Statement};
use crate::formula::Formula;
use crate::oracles::stability_antecedent;
use crate::rules::{named_ruleset, rule_permits, StructuralRuleId};

use super::{StrategyNode, StrategyTree};

/// A node where the rewritten strategy could not be made legal under E.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct RewriteFailure {
    /// Moves of the rewritten dialogue leading to the node.
    pub path: Vec<String>,
    pub reason: String,
}

impl fmt::Display for RewriteFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rewrite failed after [{}]: {}", self.path.join("; "), self.reason)
    }
}

fn asserted_atom(m: &Move) -> Option<&str> {
    match &m.statement {
        Statement::Formula(f) => f.atom_name(),
        Statement::Symbolic(_) => None,
    }
}

fn is_application(prefix: &[Move], m: &Move) -> bool {
    m.player == Player::P
        && m.stance != Stance::Initial
        && asserted_atom(m).is_some()
        && !rule_permits(StructuralRuleId::D10, prefix, m)
}

/// Atoms exploited by applications in `t`, in preorder of first use.
pub fn find_applications(t: &StrategyTree) -> Vec<String> {
    fn walk(n: &StrategyNode, prefix: &mut Vec<Move>, out: &mut Vec<String>) {
        if is_application(prefix, &n.mv) {
            let a = asserted_atom(&n.mv).unwrap().to_string();
            if !out.contains(&a) {
                out.push(a);
            }
        }
        prefix.push(n.mv.clone());
        for c in &n.children {
            walk(c, prefix, out);
        }
        prefix.pop();
    }
    let mut out = Vec::new();
    walk(&t.root, &mut Vec::new(), &mut out);
    out
}

/// Rewrites an E' strategy for `phi` into an E strategy for `G -> phi`.
/// Returns the guarded formula and the new tree; with no applications the
/// formula and moves are returned unchanged.
pub fn eliminate_stability_applications(
    t: &StrategyTree,
) -> Result<(Formula, StrategyTree), RewriteFailure> {
    let e = named_ruleset("E").expect("preset");
    let atoms = find_applications(t);
    if atoms.is_empty() {
        let mut same = t.clone();
        same.ruleset = e;
        return Ok((t.formula.clone(), same));
    }
    let guard = stability_antecedent(&atoms).expect("nonempty atom list");
    let phi = t.formula.clone();
    let thesis = Formula::implies(guard.clone(), phi.clone());
    let mut nd = Dialogue::new(thesis.clone(), e.clone()).map_err(|err| RewriteFailure {
        path: vec![],
        reason: err.to_string(),
    })?;

    // opening: O concedes the guard, P extracts each conjunct
    let mut chain: Vec<Move> = Vec::new();
    let play = |nd: &mut Dialogue, m: Move, chain: &mut Vec<Move>| -> Result<usize, RewriteFailure> {
        push(nd, m.clone())?;
        chain.push(m);
        Ok(nd.len() - 1)
    };
    let mut rest_pos = play(&mut nd, Move::attack(Player::O, guard.clone().into(), 0), &mut chain)?;
    let mut rest = guard;
    let mut guard_pos: HashMap<String, usize> = HashMap::new();
    for a in &atoms[..atoms.len() - 1] {
        let (left, right) = match &rest {
            Formula::And(l, r) => ((**l).clone(), (**r).clone()),
            _ => unreachable!("guard is a right-nested conjunction"),
        };
        let at = play(&mut nd, Move::attack(Player::P, "&L".parse().unwrap(), rest_pos), &mut chain)?;
        let pos = play(&mut nd, Move::defense(Player::O, left, at), &mut chain)?;
        guard_pos.insert(a.clone(), pos);
        let at = play(&mut nd, Move::attack(Player::P, "&R".parse().unwrap(), rest_pos), &mut chain)?;
        rest_pos = play(&mut nd, Move::defense(Player::O, right.clone(), at), &mut chain)?;
        rest = right;
    }
    guard_pos.insert(atoms.last().unwrap().clone(), rest_pos);
    let start = play(&mut nd, Move::defense(Player::P, phi.clone(), 1), &mut chain)?;

    let rw = Rewriter { guard_pos };
    let mut map = vec![start];
    let after = rw.o_children(&t.root, &mut nd, &mut map)?;

    let mut node: Option<StrategyNode> = None;
    let mut tail = Some(after);
    for m in chain.into_iter().rev() {
        let children = match node.take() {
            Some(n) => vec![n],
            None => tail.take().unwrap(),
        };
        node = Some(StrategyNode { mv: m, children });
    }
    let root = StrategyNode {
        mv: Move::initial(thesis.clone()),
        children: vec![node.expect("opening is nonempty")],
    };
    Ok((
        thesis.clone(),
        StrategyTree {
            formula: thesis,
            ruleset: e,
            root,
        },
    ))
}

fn push(nd: &mut Dialogue, m: Move) -> Result<(), RewriteFailure> {
    nd.push(m.clone()).map_err(|err| RewriteFailure {
        path: nd.moves().iter().map(|x| x.to_string()).collect(),
        reason: format!("`{m}` is illegal under E: {err}"),
    })
}

fn relabel(m: &Move, map: &[usize]) -> Move {
    let mut out = m.clone();
    out.reference = m.reference.map(|r| map[r]);
    out
}

struct Rewriter {
    guard_pos: HashMap<String, usize>,
}

impl Rewriter {
    /// Rewrites the O replies below `orig`, a node holding a P move.
    fn o_children(
        &self,
        orig: &StrategyNode,
        nd: &mut Dialogue,
        map: &mut Vec<usize>,
    ) -> Result<Vec<StrategyNode>, RewriteFailure> {
        let mut out = Vec::with_capacity(orig.children.len());
        for c in &orig.children {
            let m = relabel(&c.mv, map);
            let len = nd.len();
            push(nd, m.clone())?;
            map.push(len);
            let children = self.p_children(c, nd, map);
            map.pop();
            nd.truncate(len);
            out.push(StrategyNode { mv: m, children: children? });
        }
        Ok(out)
    }

    /// Rewrites P's answer below `orig`, a node holding an O move.
    fn p_children(
        &self,
        orig: &StrategyNode,
        nd: &mut Dialogue,
        map: &mut Vec<usize>,
    ) -> Result<Vec<StrategyNode>, RewriteFailure> {
        let Some(pc) = orig.children.first() else {
            return Ok(vec![]);
        };
        let m = relabel(&pc.mv, map);
        if is_application(nd.moves(), &m) {
            return Ok(vec![self.guarded(pc, m, nd, map)?]);
        }
        Ok(vec![self.play_original(pc, m, nd, map)?])
    }

    fn play_original(
        &self,
        pc: &StrategyNode,
        m: Move,
        nd: &mut Dialogue,
        map: &mut Vec<usize>,
    ) -> Result<StrategyNode, RewriteFailure> {
        let len = nd.len();
        push(nd, m.clone())?;
        map.push(len);
        let children = self.o_children(pc, nd, map);
        map.pop();
        nd.truncate(len);
        Ok(StrategyNode { mv: m, children: children? })
    }

    fn guarded(
        &self,
        pc: &StrategyNode,
        m: Move,
        nd: &mut Dialogue,
        map: &mut Vec<usize>,
    ) -> Result<StrategyNode, RewriteFailure> {
        let name = asserted_atom(&m).unwrap().to_string();
        let p = Formula::atom(&name);
        let np = Formula::not(p.clone());
        let nnp = Formula::not(np.clone());
        let fail = |nd: &Dialogue, reason: String| RewriteFailure {
            path: nd.moves().iter().map(|x| x.to_string()).collect(),
            reason,
        };
        let g = *self
            .guard_pos
            .get(&name)
            .ok_or_else(|| fail(nd, format!("no guard for atom {name}")))?;
        let licence = nd
            .moves()
            .iter()
            .rposition(|x| x.player == Player::O && x.statement == Statement::Formula(nnp.clone()))
            .ok_or_else(|| fail(nd, format!("O never conceded {nnp}")))?;

        let base = nd.len();
        let use_guard = Move::attack(Player::P, nnp.clone().into(), g);
        push(nd, use_guard.clone())?;
        let concede = Move::defense(Player::O, p.clone(), base);
        let counter = Move::attack(Player::O, np.clone().into(), base);
        let legal = nd.legal_moves();
        let mut children = Vec::new();
        let mut result = Ok(());
        for o in legal {
            let len = nd.len();
            if o == concede {
                push(nd, o.clone())?;
                let r = self.play_original(pc, m.clone(), nd, map);
                nd.truncate(len);
                children.push(StrategyNode { mv: o, children: vec![r?] });
            } else if o == counter {
                push(nd, o.clone())?;
                let r = refute(nd, &np, &p, licence, base + 1);
                nd.truncate(len);
                children.push(StrategyNode { mv: o, children: vec![r?] });
            } else {
                result = Err(fail(nd, format!("unexpected O reply `{o}` to the guard attack")));
                break;
            }
        }
        nd.truncate(base);
        result?;
        Ok(StrategyNode {
            mv: use_guard,
            children,
        })
    }
}

/// P's win after O rejects `~~p` with `~p` at `counter`: attack O's `~~p`
/// at `licence` with `~p`, then O's `~p` with the conceded `p`.
fn refute(
    nd: &mut Dialogue,
    np: &Formula,
    p: &Formula,
    licence: usize,
    counter: usize,
) -> Result<StrategyNode, RewriteFailure> {
    let base = nd.len();
    let first = Move::attack(Player::P, np.clone().into(), licence);
    push(nd, first.clone())?;
    let forced = Move::attack(Player::O, p.clone().into(), base);
    let legal = nd.legal_moves();
    if legal != [forced.clone()] {
        let path = nd.moves().iter().map(|x| x.to_string()).collect();
        nd.truncate(base);
        return Err(RewriteFailure {
            path,
            reason: format!("expected O's only reply to be `{forced}`"),
        });
    }
    push(nd, forced.clone())?;
    let last = Move::attack(Player::P, p.clone().into(), counter);
    push(nd, last.clone())?;
    let stuck = nd.legal_moves().is_empty();
    let path: Vec<String> = nd.moves().iter().map(|x| x.to_string()).collect();
    nd.truncate(base);
    if !stuck {
        return Err(RewriteFailure {
            path,
            reason: "O still has a reply after the refutation".into(),
        });
    }
    Ok(StrategyNode {
        mv: first,
        children: vec![StrategyNode {
            mv: forced,
            children: vec![StrategyNode {
                mv: last,
                children: vec![],
            }],
        }],
    })
}
