//! HTTP facade for playing dialogue games against the engine.
//!
//! Routes:
//! - `POST /games` `{formula, ruleset, humanRole}` starts a game at move 0
//! - `GET /games/{id}` returns moves, player to move, legal moves and status
//! - `POST /games/{id}/moves` `{stance, statement, ref}` plays a human move
//! - `POST /games/{id}/engine-reply` lets the engine play one move
//! - `GET /rulesets` lists the presets
//! - `POST /check` `{formula, ruleset, budget?, constraint?}` runs a search
//!
//! Errors are `{code, rule?, message}`.

mod error;
mod session;

use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::routing::{get, post};
use axum::{Json, Router};
use lorenzen::{
    parse, parse_ruleset, presets, search_report, CheckDocument, Constraint, Move, Player, SearchBudget, Stance,
    Statement,
};
use serde::{Deserialize, Serialize};

pub use error::{ApiError, ErrorBody};
pub use session::{EnginePolicy, GameSession, SessionStore, Status};

/// Environment variable consulted for the port when none is given.
pub const PORT_ENV: &str = "LORENZEN_PORT";
pub const DEFAULT_PORT: u16 = 8080;

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub session_ttl: Duration,
    /// Budget for opening searches and greedy engine moves.
    pub engine_budget: SearchBudget,
    /// Budget for `/check` requests that do not name one.
    pub check_budget: SearchBudget,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            session_ttl: Duration::from_secs(3600),
            engine_budget: SearchBudget {
                max_nodes: 200_000,
                ..SearchBudget::default()
            },
            check_budget: SearchBudget::default(),
        }
    }
}

pub struct AppState {
    pub config: ServerConfig,
    pub sessions: SessionStore,
}

impl AppState {
    pub fn new(config: ServerConfig) -> Arc<AppState> {
        Arc::new(AppState {
            sessions: SessionStore::new(config.session_ttl),
            config,
        })
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/games", post(create_game))
        .route("/games/{id}", get(game_state))
        .route("/games/{id}/moves", post(submit_move))
        .route("/games/{id}/engine-reply", post(engine_reply))
        .route("/rulesets", get(rulesets))
        .route("/check", post(check))
        .with_state(state)
}

/// Port from `PORT_ENV`, else the default.
pub fn port_from_env() -> u16 {
    std::env::var(PORT_ENV)
        .ok()
        .and_then(|p| p.trim().parse().ok())
        .unwrap_or(DEFAULT_PORT)
}

/// Serves until the process is stopped, sweeping expired sessions once a
/// minute.
pub async fn serve(port: u16, config: ServerConfig) -> std::io::Result<()> {
    let state = AppState::new(config);
    let sweeper = state.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.sessions.sweep().await;
        }
    });
    let addr = SocketAddr::from(([0, 0, 0, 0], port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CreateGame {
    pub formula: String,
    pub ruleset: String,
    pub human_role: Player,
}

#[derive(Debug, Clone, Deserialize)]
pub struct MoveRequest {
    pub stance: Stance,
    pub statement: Statement,
    #[serde(rename = "ref")]
    pub reference: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CheckRequest {
    pub formula: String,
    pub ruleset: String,
    /// Depth escalation such as `30,40,50`.
    pub budget: Option<String>,
    pub constraint: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GameView {
    pub id: String,
    pub formula: String,
    pub ruleset: String,
    pub human_role: Player,
    pub engine_policy: EnginePolicy,
    pub to_move: Player,
    pub moves: Vec<Move>,
    pub legal_moves: Vec<Move>,
    pub status: Status,
}

impl GameView {
    fn of(g: &GameSession) -> GameView {
        let d = &g.dialogue;
        GameView {
            id: g.id.clone(),
            formula: d.thesis().render(),
            ruleset: d.ruleset().spec_text(),
            human_role: g.human,
            engine_policy: g.policy,
            to_move: d.to_move(),
            moves: d.moves().to_vec(),
            legal_moves: d.legal_moves(),
            status: g.status(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleInfo {
    pub id: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RulesetInfo {
    pub name: String,
    pub rules: Vec<RuleInfo>,
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload.map(|Json(t)| t).map_err(|e| ApiError::BadRequest(e.body_text()))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))
}

async fn create_game(
    State(state): State<Arc<AppState>>,
    payload: Result<Json<CreateGame>, JsonRejection>,
) -> Result<Json<GameView>, ApiError> {
    let req = body(payload)?;
    let f = parse(&req.formula)?;
    let rs = parse_ruleset(&req.ruleset)?;
    let budget = state.config.engine_budget.clone();
    let game = blocking(move || GameSession::start(f, rs, req.human_role, budget)).await??;
    let view = GameView::of(&game);
    state.sessions.insert(game).await;
    Ok(Json(view))
}

async fn game_state(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<GameView>, ApiError> {
    let game = state.sessions.get(&id).await?;
    let g = game.read().await;
    Ok(Json(GameView::of(&g)))
}

async fn submit_move(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    payload: Result<Json<MoveRequest>, JsonRejection>,
) -> Result<Json<GameView>, ApiError> {
    let game = state.sessions.get(&id).await?;
    let req = body(payload)?;
    let mut g = game.write().await;
    let m = Move {
        player: g.human,
        stance: req.stance,
        statement: req.statement,
        reference: req.reference,
    };
    g.submit(m)?;
    Ok(Json(GameView::of(&g)))
}

async fn engine_reply(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<GameView>, ApiError> {
    let game = state.sessions.get(&id).await?;
    // held across the search: one writer per session
    let mut g = game.clone().write_owned().await;
    let g = blocking(move || {
        if let Some(m) = g.engine_move()? {
            g.dialogue.push(m)?;
        }
        Ok::<_, ApiError>(g)
    })
    .await??;
    Ok(Json(GameView::of(&g)))
}

async fn rulesets() -> Json<Vec<RulesetInfo>> {
    Json(
        presets()
            .into_iter()
            .map(|rs| RulesetInfo {
                name: rs.name().to_string(),
                rules: rs
                    .rules()
                    .map(|r| RuleInfo {
                        id: r.label().to_string(),
                        description: r.description().to_string(),
                    })
                    .collect(),
            })
            .collect(),
    )
}

async fn check(
    State(state): State<Arc<AppState>>,
    payload: Result<Json<CheckRequest>, JsonRejection>,
) -> Result<Json<CheckDocument>, ApiError> {
    let req = body(payload)?;
    let f = parse(&req.formula)?;
    let rs = parse_ruleset(&req.ruleset)?;
    let budget = match &req.budget {
        Some(text) => SearchBudget::parse(text).map_err(|e| ApiError::BadRequest(e.to_string()))?,
        None => state.config.check_budget.clone(),
    };
    let c = match &req.constraint {
        Some(text) => text
            .parse::<Constraint>()
            .map_err(|e| ApiError::BadRequest(e.to_string()))?,
        None => Constraint::None,
    };
    let doc = blocking(move || {
        let r = search_report(&f, &rs, &budget, c, true);
        CheckDocument::from_report(&f, &rs, c, &r)
    })
    .await?;
    Ok(Json(doc))
}

/// Runs [`serve`] on a fresh multi-threaded runtime.
pub fn serve_blocking(port: u16, config: ServerConfig) -> std::io::Result<()> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?
        .block_on(serve(port, config))
}
