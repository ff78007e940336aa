use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use vigil_cli::service::{router, Session};
use vigil_core::fixtures;
use vigil_core::runtime::{simulate, trace_record, Adversary, AdversaryPolicy, Composition, CompositionMode};
use vigil_core::solver::solve_subgame;
use vigil_core::{Loc, TriggerMode};

fn comp() -> Composition {
    let w = fixtures::fig3world();
    let s = (0..2).map(|i| Some(solve_subgame(&w, i, TriggerMode::Literal, 100_000).unwrap())).collect();
    Composition::new(w, s, CompositionMode::Autonomous, false).unwrap()
}

fn app() -> Router {
    router(Session::new(comp(), 0), None)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = match body {
        Some(b) => req.body(Body::from(b.to_string())).unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

#[tokio::test]
async fn initial_state() {
    let app = app();
    let (status, s) = call(&app, "GET", "/api/state", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(s["step"], 0);
    assert_eq!(s["target"], 14);
    assert_eq!(s["sensors"], json!([20, 4]));
    assert_eq!(s["local_beliefs"], json!([[14], [-1]]));
    assert_eq!(s["global_belief"], json!([14]));
    assert_eq!(s["adversary"], "interactive");
    assert_eq!(s["mode"], "autonomous");
    assert_eq!(s["legal_moves"], json!([9, 19]));
}

#[tokio::test]
async fn world_document() {
    let (status, w) = call(&app(), "GET", "/api/world", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(w["grid"], json!({"width": 5, "height": 5}));
    assert_eq!(w["obstacles"], json!([11, 12, 13]));
    let reparsed = vigil_core::parse_world(&w.to_string()).unwrap();
    assert_eq!(reparsed, fixtures::fig3world());
}

#[tokio::test]
async fn move_matches_compose_step() {
    let app = app();
    let (status, s) = call(&app, "POST", "/api/move", Some(json!({"to": 9}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(s["step"], 1);
    assert_eq!(s["local_beliefs"], json!([[-1, 19], [9]]));
    assert_eq!(s["global_belief"], json!([9]));
    let (_, again) = call(&app, "GET", "/api/state", None).await;
    assert_eq!(again, s);
    let (_, moves) = call(&app, "GET", "/api/legal-moves", None).await;
    assert_eq!(moves["moves"], s["legal_moves"]);
}

#[tokio::test]
async fn illegal_move_is_409() {
    let app = app();
    let (status, e) = call(&app, "POST", "/api/move", Some(json!({"to": 0}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(e["code"], "illegal_move");
    assert!(e["message"].as_str().unwrap().contains("[9, 19]"), "{e}");
    let (status, _) = call(&app, "POST", "/api/move", Some(json!({"to": -7}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (_, s) = call(&app, "GET", "/api/state", None).await;
    assert_eq!(s["step"], 0);
}

#[tokio::test]
async fn bad_bodies_are_400() {
    let app = app();
    let (status, e) = call(&app, "POST", "/api/move", Some(json!({"too": 9}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(e["code"], "bad_request");
    let (status, _) = call(&app, "POST", "/api/move", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST, "interactive needs `to`");
    let (status, e) = call(&app, "POST", "/api/mode", Some(json!({"adversary": "sneaky"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(e["message"].as_str().unwrap().contains("sneaky"));
    let (status, e) = call(&app, "GET", "/api/nothing", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(e["code"], "not_found");
}

#[tokio::test]
async fn adversary_mode_and_reset() {
    let app = app();
    let (status, s) = call(&app, "POST", "/api/mode", Some(json!({"adversary": "greedy"}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(s["adversary"], "greedy");
    let (status, s) = call(&app, "POST", "/api/move", Some(json!({}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(s["step"], 1);
    // 9 is seen by sensor 2; 19 stays hidden from sensor 1
    assert_eq!(s["target"], 19);
    assert_eq!(s["predicates"]["invisible"], 1);
    let (_, s) = call(&app, "POST", "/api/reset", None).await;
    assert_eq!(s["step"], 0);
    assert_eq!(s["adversary"], "greedy");
}

#[tokio::test]
async fn random_moves_match_simulation() {
    let app = app();
    call(&app, "POST", "/api/mode", Some(json!({"adversary": "random"}))).await;
    let mut served = Vec::new();
    for _ in 0..20 {
        let (status, s) = call(&app, "POST", "/api/move", None).await;
        assert_eq!(status, StatusCode::OK);
        served.push(s);
    }
    let c = comp();
    let trace = simulate(&c, &mut Adversary::new(AdversaryPolicy::Random, 0), 20, &[]).unwrap();
    for (s, sim) in served.iter().zip(&trace[1..]) {
        let record = serde_json::to_value(trace_record(c.world(), sim)).unwrap();
        for key in ["step", "target", "sensors", "local_beliefs", "global_belief", "triggers", "predicates"] {
            assert_eq!(s[key], record[key], "{key}");
        }
    }
}

#[tokio::test]
async fn scripted_moves_match_cli_trace() {
    let app = app();
    let moves = [9, 4, 3, 2];
    let mut served = Vec::new();
    for to in moves {
        let (status, s) = call(&app, "POST", "/api/move", Some(json!({ "to": to }))).await;
        assert_eq!(status, StatusCode::OK, "{s}");
        served.push(s);
    }
    let c = comp();
    let script: Vec<Loc> = moves.iter().map(|&m| Loc::from_raw(m).unwrap()).collect();
    let trace = simulate(&c, &mut Adversary::new(AdversaryPolicy::Interactive, 0), 10, &script).unwrap();
    assert_eq!(trace.len(), 5);
    for (s, sim) in served.iter().zip(&trace[1..]) {
        assert_eq!(s["global_belief"], json!(sim.global_belief.to_raw()));
    }
}

#[tokio::test]
async fn assets_are_served() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<html>console</html>").unwrap();
    let app = router(Session::new(comp(), 0), Some(dir.path().to_path_buf()));
    let req = Request::builder().uri("/index.html").body(Body::empty()).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    assert_eq!(&bytes[..], b"<html>console</html>");
    let (status, _) = call(&app, "GET", "/api/state", None).await;
    assert_eq!(status, StatusCode::OK);
}
