//! Game sessions and the engine that plays the non-human side.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use lorenzen::{
    evaluate_dialogue, search, verify_strategy, Dialogue, Formula, Move, Player, Ruleset, SearchBudget,
    SearchResult, StrategyNode, StrategyTree, Verdict,
};
use serde::{Deserialize, Serialize};
use tokio::sync::RwLock;

use crate::error::ApiError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnginePolicy {
    /// Follow a verified winning strategy computed when the game started.
    StrategyGuided,
    /// Search before every move for one that keeps a win, if any.
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Status {
    InProgress,
    ProponentWon,
    StuckFor { player: Player },
}

impl Status {
    pub fn of(d: &Dialogue) -> Status {
        if !d.legal_moves().is_empty() {
            return Status::InProgress;
        }
        match d.to_move() {
            Player::O => Status::ProponentWon,
            Player::P => Status::StuckFor { player: Player::P },
        }
    }
}

pub struct GameSession {
    pub id: String,
    pub dialogue: Dialogue,
    pub human: Player,
    pub policy: EnginePolicy,
    strategy: Option<StrategyTree>,
    budget: SearchBudget,
}

impl GameSession {
    /// Starts a game at move 0. When the engine plays P, the opening search
    /// runs here, so this blocks for as long as the search does.
    pub fn start(f: Formula, rs: Ruleset, human: Player, budget: SearchBudget) -> Result<GameSession, ApiError> {
        let dialogue = Dialogue::new(f.clone(), rs.clone())?;
        let mut strategy = None;
        if human == Player::O {
            if let SearchResult::ProponentWins(t) = search(&f, &rs, &budget) {
                verify_strategy(&t, &rs).map_err(|d| ApiError::Internal(format!("unverified strategy: {d}")))?;
                strategy = Some(t);
            }
        }
        Ok(GameSession {
            id: uuid::Uuid::new_v4().to_string(),
            dialogue,
            human,
            policy: if strategy.is_some() {
                EnginePolicy::StrategyGuided
            } else {
                EnginePolicy::Greedy
            },
            strategy,
            budget,
        })
    }

    pub fn engine(&self) -> Player {
        self.human.other()
    }

    pub fn status(&self) -> Status {
        Status::of(&self.dialogue)
    }

    pub fn submit(&mut self, m: Move) -> Result<(), ApiError> {
        if self.dialogue.to_move() != self.human {
            return Err(ApiError::OutOfTurn("engine's"));
        }
        self.dialogue.push(m)?;
        Ok(())
    }

    /// The engine's next move, or `None` when it has no legal move.
    pub fn engine_move(&self) -> Result<Option<Move>, ApiError> {
        if self.dialogue.to_move() != self.engine() {
            return Err(ApiError::OutOfTurn("human player's"));
        }
        if let Some(m) = self.strategy.as_ref().and_then(|t| prescribed(t, self.dialogue.moves())) {
            return Ok(Some(m));
        }
        Ok(greedy(&self.dialogue, self.engine(), &self.budget))
    }
}

/// P's move prescribed by `t` after `moves`, if the play stays inside it.
fn prescribed(t: &StrategyTree, moves: &[Move]) -> Option<Move> {
    let (first, rest) = moves.split_first()?;
    if &t.root.mv != first {
        return None;
    }
    let mut node: &StrategyNode = &t.root;
    for m in rest {
        node = node.children.iter().find(|c| &c.mv == m)?;
    }
    node.children.first().map(|c| c.mv.clone())
}

/// First legal move after which the engine's side is not worse off: a
/// forced win for P, or no forced win for P when the engine plays O.
fn greedy(d: &Dialogue, engine: Player, b: &SearchBudget) -> Option<Move> {
    let legal = d.legal_moves();
    let wanted = match engine {
        Player::P => Verdict::Valid,
        Player::O => Verdict::Invalid,
    };
    for m in &legal {
        let next = d.apply_move(m).expect("legal move");
        if evaluate_dialogue(&next, b) == wanted {
            return Some(m.clone());
        }
    }
    legal.into_iter().next()
}

struct Slot {
    touched: Mutex<Instant>,
    game: Arc<RwLock<GameSession>>,
}

/// In-memory sessions, evicted after `ttl` without use.
pub struct SessionStore {
    ttl: Duration,
    slots: RwLock<HashMap<String, Slot>>,
}

impl SessionStore {
    pub fn new(ttl: Duration) -> SessionStore {
        SessionStore {
            ttl,
            slots: RwLock::new(HashMap::new()),
        }
    }

    pub async fn insert(&self, game: GameSession) -> Arc<RwLock<GameSession>> {
        let id = game.id.clone();
        let game = Arc::new(RwLock::new(game));
        let slot = Slot {
            touched: Mutex::new(Instant::now()),
            game: game.clone(),
        };
        self.slots.write().await.insert(id, slot);
        game
    }

    pub async fn get(&self, id: &str) -> Result<Arc<RwLock<GameSession>>, ApiError> {
        let slots = self.slots.read().await;
        let slot = slots.get(id).ok_or_else(|| ApiError::NotFound(id.to_string()))?;
        let mut touched = slot.touched.lock().expect("timestamp lock");
        if touched.elapsed() > self.ttl {
            return Err(ApiError::NotFound(id.to_string()));
        }
        *touched = Instant::now();
        Ok(slot.game.clone())
    }

    /// Drops expired sessions; returns how many were removed.
    pub async fn sweep(&self) -> usize {
        let mut slots = self.slots.write().await;
        let before = slots.len();
        slots.retain(|_, s| s.touched.lock().expect("timestamp lock").elapsed() <= self.ttl);
        before - slots.len()
    }

    pub async fn len(&self) -> usize {
        self.slots.read().await.len()
    }

    pub async fn is_empty(&self) -> bool {
        self.len().await == 0
    }
}
