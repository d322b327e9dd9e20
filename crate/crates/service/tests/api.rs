use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use cjrank_core::corpus;
use cjrank_core::store::{load_log, Store};
use cjrank_service::{router, AppState};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

struct Harness {
    _dir: tempfile::TempDir,
    app: Router,
    state: Arc<AppState>,
}

impl Harness {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let state = AppState::new(Store::open(dir.path()).unwrap());
        Self {
            app: router(state.clone()),
            state,
            _dir: dir,
        }
    }

    async fn raw(&self, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, String) {
        let req = Request::builder().method(method).uri(uri);
        let req = match body {
            Some(b) => req
                .header("content-type", "application/json")
                .body(Body::from(b.to_string()))
                .unwrap(),
            None => req.body(Body::empty()).unwrap(),
        };
        let resp = self.app.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        (status, String::from_utf8(bytes.to_vec()).unwrap())
    }

    async fn call(&self, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let (status, text) = self.raw(method, uri, body).await;
        (status, serde_json::from_str(&text).unwrap_or(Value::String(text)))
    }

    async fn create(&self, items: Value) -> String {
        let (status, body) = self
            .call("POST", "/experiments", Some(json!({ "items": items, "seed": 3 })))
            .await;
        assert_eq!(status, StatusCode::CREATED, "{body}");
        body["experiment_id"].as_str().unwrap().to_string()
    }

    async fn open(&self, exp: &str, judge: &str) -> Value {
        let (status, body) = self
            .call("POST", &format!("/experiments/{exp}/sessions"), Some(json!({ "judge_id": judge })))
            .await;
        assert_eq!(status, StatusCode::CREATED, "{body}");
        body
    }
}

fn table_items() -> Value {
    serde_json::to_value(corpus::sample_items()).unwrap()
}

fn small_items(n: u32) -> Value {
    Value::Array(
        (1..=n)
            .map(|i| json!({ "item_id": i, "content": format!("item {i}") }))
            .collect(),
    )
}

#[tokio::test]
async fn health() {
    let h = Harness::new();
    let (status, body) = h.call("GET", "/health", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "ok");
}

#[tokio::test]
async fn create_experiment_validation() {
    let h = Harness::new();
    let (status, body) = h.call("POST", "/experiments", Some(json!({ "items": table_items() }))).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(body["items"], 10);
    assert_eq!(body["pairs_per_session"], 5);

    let (status, body) = h.call("POST", "/experiments", Some(json!({ "items": small_items(1) }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "invalid_experiment");

    let dup = json!([{ "item_id": 4, "content": "a" }, { "item_id": 4, "content": "b" }]);
    let (status, body) = h.call("POST", "/experiments", Some(json!({ "items": dup }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(body["message"].as_str().unwrap().contains("duplicate item_id 4"), "{body}");

    let bad_k = json!({ "items": small_items(3), "config": { "elo": { "k_factor": -1.0 } } });
    let (status, body) = h.call("POST", "/experiments", Some(bad_k)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "invalid_parameter");

    let (status, body) = h.call("POST", "/experiments", Some(json!({ "nope": 1 }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "bad_request");
}

#[tokio::test]
async fn full_session_flow() {
    let h = Harness::new();
    let exp = h.create(table_items()).await;
    let session = h.open(&exp, "judge-a").await;
    assert_eq!(session["total_pairs"], 5);
    assert_eq!(session["judged"], 0);
    let sid = session["session_id"].as_str().unwrap().to_string();

    let mut seen = Vec::new();
    let mut current = session;
    for k in 0..5 {
        let next = current["next"].clone();
        assert_eq!(next["pair_index"], k);
        let (l, r) = (next["left"]["item_id"].as_u64().unwrap(), next["right"]["item_id"].as_u64().unwrap());
        seen.extend([l, r]);
        let (status, body) = h
            .call(
                "POST",
                &format!("/sessions/{sid}/judgements"),
                Some(json!({ "pair_index": k, "winner": l, "feedback": "très drôle 😂" })),
            )
            .await;
        assert_eq!(status, StatusCode::OK, "{body}");
        assert_eq!(body["seq"], k + 1);
        current = body["session"].clone();
    }
    assert_eq!(current["complete"], true);
    assert!(current["next"].is_null());
    seen.sort();
    seen.dedup();
    assert_eq!(seen.len(), 10, "an item was shown twice");

    let (_, next) = h.call("GET", &format!("/sessions/{sid}/next"), None).await;
    assert_eq!(next["complete"], true);

    let exp_handle = h.state.store.experiment(&exp).unwrap();
    let log = load_log(&exp_handle.log_path()).unwrap();
    assert_eq!(log.len(), 5);
    assert!(log.iter().all(|r| r.feedback.as_deref() == Some("très drôle 😂")));
}

#[tokio::test]
async fn judgement_errors() {
    let h = Harness::new();
    let exp = h.create(small_items(4)).await;
    let session = h.open(&exp, "j").await;
    let sid = session["session_id"].as_str().unwrap();
    let next = &session["next"];
    let left = next["left"]["item_id"].as_u64().unwrap();
    let url = format!("/sessions/{sid}/judgements");

    let outsider = (1..=4).find(|i| {
        *i != left && *i != next["right"]["item_id"].as_u64().unwrap()
    }).unwrap();
    let (status, body) = h.call("POST", &url, Some(json!({ "pair_index": 0, "winner": outsider }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "winner_not_in_pair");

    let (status, _) = h.call("POST", &url, Some(json!({ "pair_index": 0, "winner": left }))).await;
    assert_eq!(status, StatusCode::OK);
    let (status, body) = h.call("POST", &url, Some(json!({ "pair_index": 0, "winner": left }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "duplicate_judgement");

    let (status, body) = h.call("POST", "/sessions/nope-s1/judgements", Some(json!({ "pair_index": 0, "winner": 1 }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "unknown_session");

    let huge = "x".repeat(cjrank_service::MAX_FEEDBACK_BYTES + 1);
    let (status, _) = h.call("POST", &url, Some(json!({ "pair_index": 1, "winner": 1, "feedback": huge }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let (status, _) = h.call("POST", "/experiments/missing/sessions", Some(json!({ "judge_id": "j" }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn two_item_session_and_leaderboard() {
    let h = Harness::new();
    let exp = h.create(small_items(2)).await;

    let (status, empty) = h.call("GET", &format!("/experiments/{exp}/leaderboard"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(empty["empty"], true);
    assert!(empty["rows"].as_array().unwrap().iter().all(|r| r["elo_score"] == 1000.0 && r["cj_score"].is_null()));

    let session = h.open(&exp, "j").await;
    assert_eq!(session["total_pairs"], 1);
    let sid = session["session_id"].as_str().unwrap();
    let winner = session["next"]["right"]["item_id"].as_u64().unwrap();
    let (_, body) = h
        .call("POST", &format!("/sessions/{sid}/judgements"), Some(json!({ "pair_index": 0, "winner": winner })))
        .await;
    assert_eq!(body["session"]["complete"], true);

    let (_, text) = h.raw("GET", &format!("/experiments/{exp}/leaderboard"), None).await;
    assert!(text.contains("\"elo_score\":1016.00"), "{text}");
    let board: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(board["rows"][0]["item_id"], winner);
    assert_eq!(board["rows"][0]["elo_rank"], 1);
    assert_eq!(board["rows"][0]["cj_rank"], 1);
    assert_eq!(board["regularized"], true);
    assert_eq!(board["correlation"]["p_value_method"], "exact");

    // identical log, identical bytes
    let (_, again) = h.raw("GET", &format!("/experiments/{exp}/leaderboard"), None).await;
    assert_eq!(text, again);
}

#[tokio::test]
async fn coverage_grids() {
    let h = Harness::new();
    let exp = h.create(table_items()).await;
    let (_, fresh) = h.call("GET", &format!("/experiments/{exp}/coverage"), None).await;
    let all_zero = |grid: &Value| grid.as_array().unwrap().iter().flat_map(|r| r.as_array().unwrap()).all(|c| c == 0);
    assert!(all_zero(&fresh["coverage"]));
    assert!(all_zero(&fresh["wins"]));

    h.open(&exp, "j").await;
    let (_, cov) = h.call("GET", &format!("/experiments/{exp}/coverage"), None).await;
    let grid = cov["coverage"].as_array().unwrap();
    let upper_nonzero = (0..10)
        .flat_map(|i| (i + 1..10).map(move |j| (i, j)))
        .filter(|&(i, j)| grid[i][j] != 0)
        .count();
    assert_eq!(upper_nonzero, 5);
    assert!(cov["percentages"][0][1].is_null());
}

#[tokio::test]
async fn concurrent_submissions_get_distinct_sequence_numbers() {
    let h = Harness::new();
    let exp = h.create(table_items()).await;
    let a = h.open(&exp, "a").await;
    let b = h.open(&exp, "b").await;
    let submit = |s: Value| {
        let app = h.app.clone();
        async move {
            let sid = s["session_id"].as_str().unwrap().to_string();
            let winner = s["next"]["left"]["item_id"].as_u64().unwrap();
            let req = Request::builder()
                .method("POST")
                .uri(format!("/sessions/{sid}/judgements"))
                .header("content-type", "application/json")
                .body(Body::from(json!({ "pair_index": 0, "winner": winner }).to_string()))
                .unwrap();
            let resp = app.oneshot(req).await.unwrap();
            assert_eq!(resp.status(), StatusCode::OK);
            let bytes = resp.into_body().collect().await.unwrap().to_bytes();
            serde_json::from_slice::<Value>(&bytes).unwrap()["seq"].as_u64().unwrap()
        }
    };
    let (x, y) = tokio::join!(tokio::spawn(submit(a)), tokio::spawn(submit(b)));
    let mut seqs = vec![x.unwrap(), y.unwrap()];
    seqs.sort();
    assert_eq!(seqs, vec![1, 2]);
}

#[tokio::test]
async fn same_judge_gets_independent_sessions() {
    let h = Harness::new();
    let exp = h.create(table_items()).await;
    let a = h.open(&exp, "same").await;
    let b = h.open(&exp, "same").await;
    assert_ne!(a["session_id"], b["session_id"]);
}

#[test]
fn leaderboard_echoes_method_comparison() {
    use cjrank_core::analytics::method_comparison;
    use cjrank_core::rating::RatingConfig;
    use cjrank_core::simulator::{simulate_experiment, LatentModel};
    use cjrank_service::build_leaderboard;

    let sim = simulate_experiment(&LatentModel::reference(), 10, 40, 21, RatingConfig::default()).unwrap();
    let index = sim.manifest.index().unwrap();
    let cmp = method_comparison(&index, &sim.log, &sim.manifest.config).unwrap();
    let board = build_leaderboard(&sim.manifest, &sim.log).unwrap();
    assert_eq!(board.comparison.as_ref(), Some(&cmp));

    let body = serde_json::to_value(&board.body).unwrap();
    for (row, want) in body["rows"].as_array().unwrap().iter().zip(&cmp.rows) {
        assert_eq!(row["item_id"], want.item_id.0);
        assert_eq!(row["elo_rank"], want.elo_rank);
        assert_eq!(row["cj_rank"], want.cj_rank);
        assert!((row["elo_score"].as_f64().unwrap() - want.elo_score).abs() <= 0.005);
        assert!((row["cj_score"].as_f64().unwrap() - want.cj_score).abs() <= 0.005);
    }
    let c = &body["correlation"];
    assert_eq!(c["kendall_tau"].as_f64(), Some(cmp.correlation.kendall_tau));
    assert_eq!(c["kendall_p_value"].as_f64(), Some(cmp.correlation.kendall_p_value));
    assert_eq!(c["pearson_r"].as_f64(), cmp.correlation.pearson_r);

    // a second, independent build serialises to the same bytes
    let again = build_leaderboard(&sim.manifest, &sim.log).unwrap();
    assert_eq!(
        serde_json::to_string(&board.body).unwrap(),
        serde_json::to_string(&again.body).unwrap()
    );
    assert_eq!(board.csv, again.csv);
}
