use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use lorenzen::DialogueDocument;
use lorenzen_server::{router, AppState, ServerConfig};
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> Router {
    router(AppState::new(ServerConfig::default()))
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()))
    };
    (status, v)
}

async fn create(app: &Router, formula: &str, ruleset: &str, human: &str) -> (StatusCode, Value) {
    call(
        app,
        Method::POST,
        "/games",
        Some(json!({"formula": formula, "ruleset": ruleset, "humanRole": human})),
    )
    .await
}

async fn play(app: &Router, id: &str, stance: &str, statement: &str, r: usize) -> (StatusCode, Value) {
    call(
        app,
        Method::POST,
        &format!("/games/{id}/moves"),
        Some(json!({"stance": stance, "statement": statement, "ref": r})),
    )
    .await
}

async fn engine(app: &Router, id: &str) -> (StatusCode, Value) {
    call(app, Method::POST, &format!("/games/{id}/engine-reply"), None).await
}

fn id_of(v: &Value) -> String {
    v["id"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn scripted_k_formula_game_reproduces_fixture() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/k_formula_e.json")).unwrap();
    let fixture = DialogueDocument::from_json(&text).unwrap();
    let app = app();
    let (s, v) = create(&app, &fixture.formula, &fixture.ruleset, "O").await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["enginePolicy"], "strategy-guided");
    let id = id_of(&v);
    let mut last = v;
    for m in &fixture.moves[1..] {
        let (s, v) = match m.player {
            lorenzen::Player::O => {
                play(&app, &id, m.stance.letter(), &m.statement.render(), m.reference.unwrap()).await
            }
            lorenzen::Player::P => engine(&app, &id).await,
        };
        assert_eq!(s, StatusCode::OK, "{v}");
        last = v;
    }
    let moves: Vec<lorenzen::Move> = serde_json::from_value(last["moves"].clone()).unwrap();
    assert_eq!(moves, fixture.moves);
    assert_eq!(last["status"]["kind"], "proponent_won");
    assert_eq!(last["legalMoves"], json!([]));
}

#[tokio::test]
async fn new_game_lists_the_single_opening_attack() {
    let app = app();
    let (s, v) = create(&app, "p | ~p", "E", "O").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["toMove"], "O");
    assert_eq!(v["status"]["kind"], "in_progress");
    assert_eq!(
        v["legalMoves"],
        json!([{"player": "O", "stance": "A", "statement": "?", "ref": 0}])
    );
    // the state endpoint reports the same
    let (s, w) = call(&app, Method::GET, &format!("/games/{}", id_of(&v)), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v, w);
}

#[tokio::test]
async fn legal_moves_match_the_dialogue_core() {
    let app = app();
    let (_, v) = create(&app, "(p & q) -> (q & p)", "D", "O").await;
    let id = id_of(&v);
    play(&app, &id, "A", "p & q", 0).await;
    let (_, v) = engine(&app, &id).await;
    let doc: DialogueDocument = serde_json::from_value(json!({
        "formula": v["formula"], "ruleset": v["ruleset"], "moves": v["moves"]
    }))
    .unwrap();
    let d = doc.replay().unwrap();
    let core = serde_json::to_value(d.legal_moves()).unwrap();
    assert_eq!(v["legalMoves"], core);
}

#[tokio::test]
async fn unknown_game_is_not_found() {
    let app = app();
    let (s, v) = call(&app, Method::GET, "/games/no-such-game", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["code"], "not_found");
    let (s, _) = engine(&app, "no-such-game").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn moves_out_of_turn_are_rejected() {
    let app = app();
    let (s, v) = create(&app, "p | ~p", "CL", "P").await;
    assert_eq!(s, StatusCode::OK);
    let id = id_of(&v);
    // O, the engine, is to move
    let (s, v) = play(&app, &id, "D", "p", 0).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(v["code"], "out_of_turn");

    let (_, v) = create(&app, "p -> p", "E", "O").await;
    let (s, v) = engine(&app, &id_of(&v)).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(v["code"], "out_of_turn");
}

#[tokio::test]
async fn atom_thesis_under_cl_is_rejected() {
    let app = app();
    let (s, v) = create(&app, "p", "CL", "O").await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["code"], "initial_move_illegal");
    assert_eq!(v["rule"], "D10");
}

#[tokio::test]
async fn bad_requests_carry_error_codes() {
    let app = app();
    let (s, v) = create(&app, "p ->", "E", "O").await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], "parse_error");
    let (s, v) = create(&app, "p -> p", "Z", "O").await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], "unknown_ruleset");
    let (s, v) = call(&app, Method::POST, "/games", Some(json!({"formula": "p"}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], "bad_request");
}

#[tokio::test]
async fn reacting_to_an_older_move_breaks_rule_e() {
    let app = app();
    let (_, v) = create(&app, "((q -> q) -> p) -> p", "E", "O").await;
    let id = id_of(&v);
    let (s, _) = play(&app, &id, "A", "(q -> q) -> p", 0).await;
    assert_eq!(s, StatusCode::OK);
    let (_, v) = engine(&app, &id).await;
    assert_eq!(v["moves"][2], json!({"player": "P", "stance": "A", "statement": "q -> q", "ref": 1}));
    let (s, _) = play(&app, &id, "D", "p", 2).await;
    assert_eq!(s, StatusCode::OK);
    let (_, v) = engine(&app, &id).await;
    assert_eq!(v["moves"].as_array().unwrap().len(), 5);
    // attacking P's `q -> q` is fine except that it is no longer the latest P move
    let (s, v) = play(&app, &id, "A", "q", 2).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY, "{v}");
    assert_eq!(v["code"], "illegal_move");
    assert_eq!(v["rule"], "E");
}

#[tokio::test]
async fn engine_proponent_gets_stuck_on_excluded_middle_under_e() {
    let app = app();
    let (_, v) = create(&app, "p | ~p", "E", "O").await;
    assert_eq!(v["enginePolicy"], "greedy");
    let id = id_of(&v);
    let mut v = v;
    for _ in 0..20 {
        if v["status"]["kind"] != "in_progress" {
            break;
        }
        v = if v["toMove"] == "O" {
            let m = &v["legalMoves"][0];
            play(&app, &id, m["stance"].as_str().unwrap(), m["statement"].as_str().unwrap(), m["ref"].as_u64().unwrap() as usize)
                .await
                .1
        } else {
            engine(&app, &id).await.1
        };
    }
    assert_eq!(v["status"], json!({"kind": "stuck_for", "player": "P"}));
    // asking again reports the same state
    let (s, w) = engine(&app, &id).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v, w);
}

#[tokio::test]
async fn engine_proponent_wins_every_opponent_line() {
    // every O line of a valid formula ends with O stuck
    let app = app();
    for choice in 0..3 {
        let (_, mut v) = create(&app, "(p & q) -> (q & p)", "E", "O").await;
        let id = id_of(&v);
        for _ in 0..30 {
            if v["status"]["kind"] != "in_progress" {
                break;
            }
            v = if v["toMove"] == "O" {
                let legal = v["legalMoves"].as_array().unwrap();
                let m = &legal[choice % legal.len()];
                play(&app, &id, m["stance"].as_str().unwrap(), m["statement"].as_str().unwrap(), m["ref"].as_u64().unwrap() as usize)
                    .await
                    .1
            } else {
                engine(&app, &id).await.1
            };
        }
        assert_eq!(v["status"]["kind"], "proponent_won", "{v}");
    }
}

#[tokio::test]
async fn engine_opponent_without_moves_means_proponent_won() {
    let app = app();
    let (_, v) = create(&app, "p -> p", "E", "P").await;
    let id = id_of(&v);
    let (s, v) = engine(&app, &id).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["moves"][1], json!({"player": "O", "stance": "A", "statement": "p", "ref": 0}));
    let (_, v) = play(&app, &id, "D", "p", 1).await;
    assert_eq!(v["status"]["kind"], "proponent_won");
    let (s, w) = engine(&app, &id).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(w["moves"], v["moves"]);
}

#[tokio::test]
async fn engine_opponent_avoids_lines_that_lose() {
    // under CL, P wins p | ~p; O's attack is forced and the engine must play it
    let app = app();
    let (_, v) = create(&app, "p | ~p", "CL", "P").await;
    assert_eq!(v["enginePolicy"], "greedy");
    let (_, v) = engine(&app, &id_of(&v)).await;
    assert_eq!(v["moves"][1]["statement"], "?");
}

#[tokio::test]
async fn check_endpoint_mirrors_the_cli() {
    let app = app();
    let (s, v) = call(&app, Method::POST, "/check", Some(json!({"formula": "p -> (q -> p)", "ruleset": "E"}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["verdict"], "valid");
    assert_eq!(v["text"], "valid");
    assert!(v["strategy"]["moves"].is_array());

    let (_, v) = call(
        &app,
        Method::POST,
        "/check",
        Some(json!({"formula": "(p & p) -> ~~(p & p)", "ruleset": "N", "budget": "30,40"})),
    )
    .await;
    assert_eq!(v["text"], "invalid");
    assert!(v.get("strategy").is_none());

    let (_, v) = call(&app, Method::POST, "/check", Some(json!({"formula": "p | ~p", "ruleset": "E"}))).await;
    assert_eq!(v["text"], "invalid");

    let (s, v) = call(
        &app,
        Method::POST,
        "/check",
        Some(json!({"formula": "p", "ruleset": "E", "budget": "0"})),
    )
    .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], "bad_request");
}

#[tokio::test]
async fn rulesets_lists_presets_with_descriptions() {
    let app = app();
    let (s, v) = call(&app, Method::GET, "/rulesets", None).await;
    assert_eq!(s, StatusCode::OK);
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["D", "E", "CL", "N", "E*", "E'"]);
    let cl = &v[2]["rules"];
    let ids: Vec<&str> = cl.as_array().unwrap().iter().map(|r| r["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["D10", "D13", "E"]);
    assert!(!cl[0]["description"].as_str().unwrap().is_empty());
}

#[tokio::test]
async fn sessions_are_independent_and_expire() {
    let state = AppState::new(ServerConfig {
        session_ttl: std::time::Duration::from_millis(50),
        ..ServerConfig::default()
    });
    let app = router(Arc::clone(&state));
    let (_, a) = create(&app, "p -> p", "E", "O").await;
    let (_, b) = create(&app, "p -> p", "E", "O").await;
    assert_ne!(a["id"], b["id"]);
    play(&app, &id_of(&a), "A", "p", 0).await;
    let (_, b2) = call(&app, Method::GET, &format!("/games/{}", id_of(&b)), None).await;
    assert_eq!(b2["moves"].as_array().unwrap().len(), 1);
    tokio::time::sleep(std::time::Duration::from_millis(80)).await;
    let (s, _) = call(&app, Method::GET, &format!("/games/{}", id_of(&a)), None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(state.sessions.sweep().await, 2);
    assert!(state.sessions.is_empty().await);
}
