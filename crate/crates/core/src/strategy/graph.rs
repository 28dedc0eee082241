//! Exact solution of games whose reachable abstract graph is finite.
//!
//! Depth-bounded search proves wins quickly but struggles to prove losses
//! when plays can cycle. Here the whole reachable graph is built and P's
//! attractor to the positions where O is stuck is computed backwards.
//! Infinite plays are never wins for P, so anything outside the attractor
//! is lost.

use std::collections::HashMap;

use super::position::{Arena, Modes, Position};

/// `Some(true)` if P can force a win from `root`, `Some(false)` if not,
/// `None` if more than `limit` positions are reachable.
pub(crate) fn solve_finite(arena: &Arena, modes: &Modes, root: &Position, limit: u64, nodes: &mut u64) -> Option<bool> {
    let mut index: HashMap<Position, u32> = HashMap::new();
    let mut states: Vec<Position> = Vec::new();
    let mut succ: Vec<Vec<u32>> = Vec::new();
    index.insert(root.clone(), 0);
    states.push(root.clone());
    let mut next = 0;
    while next < states.len() {
        *nodes += 1;
        if states.len() as u64 > limit {
            return None;
        }
        let pos = states[next].clone();
        let mut out = Vec::new();
        for m in pos.moves(arena, modes) {
            let c = pos.apply(arena, modes, m);
            let id = match index.get(&c) {
                Some(&id) => id,
                None => {
                    let id = states.len() as u32;
                    index.insert(c.clone(), id);
                    states.push(c);
                    id
                }
            };
            if !out.contains(&id) {
                out.push(id);
            }
        }
        succ.push(out);
        next += 1;
    }
    drop(index);

    let n = states.len();
    let mut pred: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (s, out) in succ.iter().enumerate() {
        for &t in out {
            pred[t as usize].push(s as u32);
        }
    }
    // O positions wait until every option is won; P positions need one
    let mut pending: Vec<usize> = succ.iter().map(|o| o.len()).collect();
    let mut won = vec![false; n];
    let mut queue: Vec<u32> = Vec::new();
    for s in 0..n {
        if !states[s].p_to_move && succ[s].is_empty() {
            won[s] = true;
            queue.push(s as u32);
        }
    }
    while let Some(t) = queue.pop() {
        for &s in &pred[t as usize] {
            let s = s as usize;
            if won[s] {
                continue;
            }
            if states[s].p_to_move {
                won[s] = true;
                queue.push(s as u32);
            } else {
                pending[s] -= 1;
                if pending[s] == 0 {
                    won[s] = true;
                    queue.push(s as u32);
                }
            }
        }
    }
    Some(won[0])
}
