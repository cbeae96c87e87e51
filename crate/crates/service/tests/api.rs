use archevol_core::fixtures;
use archevol_core::patterns::{client_server_pattern, run_pattern, DecisionScript};
use axum::body::Body;
use axum::http::{header, HeaderValue, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use archevol_service::{app, router, AppState};

async fn call(r: &Router, method: Method, uri: &str, body: impl Into<Body>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header(header::CONTENT_TYPE, "application/json")
        .body(body.into())
        .unwrap();
    let resp = r.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn json_call(r: &Router, method: Method, uri: &str, body: Value) -> (StatusCode, Value) {
    let body = if body.is_null() { Body::empty() } else { Body::from(body.to_string()) };
    let (s, bytes) = call(r, method, uri, body).await;
    let v = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (s, v)
}

async fn get(r: &Router, uri: &str) -> (StatusCode, Value) {
    json_call(r, Method::GET, uri, Value::Null).await
}

async fn post(r: &Router, uri: &str, body: Value) -> (StatusCode, Value) {
    json_call(r, Method::POST, uri, body).await
}

async fn session(r: &Router, doc: &str) -> String {
    let (s, v) = call(r, Method::POST, "/sessions", doc.to_owned()).await;
    assert_eq!(s, StatusCode::CREATED);
    serde_json::from_slice::<Value>(&v).unwrap()["sessionId"].as_str().unwrap().to_owned()
}

fn service() -> Router {
    router(AppState::default())
}

fn op(expected: u64, operation: Value) -> Value {
    json!({"expectedRevision": expected, "operation": operation})
}

#[tokio::test]
async fn architecture_snapshot_and_export() {
    let r = service();
    let id = session(&r, fixtures::ESHOP).await;
    let (s, v) = get(&r, &format!("/sessions/{id}/architecture")).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["revision"], 0);
    assert_eq!(v["document"]["format"], "archevol/architecture@1");
    let links = v["connectsTo"].as_array().unwrap();
    assert_eq!(links.len(), 2);
    assert!(links.contains(&json!({"from": "Order", "to": "Product"})));
    let (s, text) = call(&r, Method::GET, &format!("/sessions/{id}/architecture/document"), Body::empty()).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(String::from_utf8(text).unwrap(), fixtures::ESHOP);
}

#[tokio::test]
async fn session_creation_errors() {
    let r = service();
    let (s, v) = call(&r, Method::POST, "/sessions", "{not json").await;
    assert_eq!(s, StatusCode::BAD_REQUEST, "{}", String::from_utf8_lossy(&v));
    let (s, _) = call(&r, Method::POST, "/sessions", r#"{"format":"archevol/rules@1"}"#).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, v) = get(&r, "/sessions/nope/architecture").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["error"], "not-found");
}

#[tokio::test]
async fn operations_use_revisions() {
    let r = service();
    let id = session(&r, fixtures::ESHOP).await;
    let uri = format!("/sessions/{id}/ops");
    let split = json!({"name": "splitComponent", "context": "Product", "params": {"ports": ["OpenOrder"]}});
    let (s, v) = post(&r, &uri, op(0, split.clone())).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["revision"], 1);
    assert_eq!(v["relocated"]["Product#OpenOrder"], "Product_2#OpenOrder");

    let (s, v) = post(&r, &uri, op(0, split)).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(v["details"]["revision"], 1);

    let (s, v) = post(&r, &uri, op(1, json!({"name": "moveOut", "context": "Order"}))).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY, "{v}");
    let (s, _) = post(&r, &uri, op(1, json!({"name": "moveIn", "context": "Order"}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = post(&r, &uri, json!({"operation": {"name": "delete", "context": "Order"}})).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);

    let (_, v) = get(&r, &format!("/sessions/{id}/architecture")).await;
    assert_eq!(v["revision"], 1);
}

#[tokio::test]
async fn concurrent_writers_on_one_revision_admit_one() {
    let r = service();
    let id = session(&r, fixtures::ESHOP).await;
    let uri = format!("/sessions/{id}/ops");
    let mut tasks = Vec::new();
    for i in 0..8 {
        let (r, uri) = (r.clone(), uri.clone());
        tasks.push(tokio::spawn(async move {
            let create = json!({"name": "create", "params": {"name": format!("N{i}")}});
            post(&r, &uri, op(0, create)).await.0
        }));
    }
    let mut ok = 0;
    for t in tasks {
        match t.await.unwrap() {
            StatusCode::OK => ok += 1,
            s => assert_eq!(s, StatusCode::CONFLICT),
        }
    }
    assert_eq!(ok, 1);
}

#[tokio::test]
async fn interactive_pattern_run() {
    let r = service();
    let id = session(&r, fixtures::ESHOP).await;
    let (s, v) = post(&r, &format!("/sessions/{id}/pattern/nosuch/start"), Value::Null).await;
    assert_eq!(s, StatusCode::NOT_FOUND);

    let (s, v0) = post(&r, &format!("/sessions/{id}/pattern/client-server/start"), Value::Null).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v0["state"], "awaiting-decision");
    assert_eq!(v0["pending"]["step"], "names");

    let decide = format!("/sessions/{id}/pattern/decision");
    let (s, _) = post(&r, &decide, json!({"step": "names", "answer": {"server": "Server", "clients": []}})).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    let (_, still) = get(&r, &format!("/sessions/{id}/pattern/state")).await;
    assert_eq!(still, v0);

    let names = json!({"step": "names", "answer": {"server": "Server", "clients": ["Client"]}});
    let (s, v) = post(&r, &decide, names.clone()).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["state"], "awaiting-decision");
    assert_eq!(v["step"], "assignment");
    assert_eq!(v["pending"]["components"], json!(["Product", "Customer", "Order"]));
    assert_eq!(v["pending"]["targets"], json!(["Server", "Client"]));

    let (s, report) = get(&r, &format!("/sessions/{id}/check?style=client-server")).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(report["ok"], false);

    let (s, _) = post(&r, &decide, names).await;
    assert_eq!(s, StatusCode::CONFLICT);
    let (_, after) = get(&r, &format!("/sessions/{id}/pattern/state")).await;
    assert_eq!(after, v);

    let (s, _) = post(&r, &decide, json!({"step": "nosuch", "answer": []})).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = post(&r, &decide, json!({"step": "extra", "answer": []})).await;
    assert_eq!(s, StatusCode::CONFLICT);
    let create = json!({"name": "create", "params": {"name": "X"}});
    let (s, _) = post(&r, &format!("/sessions/{id}/ops"), op(v["revision"].as_u64().unwrap(), create)).await;
    assert_eq!(s, StatusCode::CONFLICT);
}

#[tokio::test]
async fn api_replay_equals_headless_run() {
    let script = DecisionScript::from_document(fixtures::ESHOP_DECISIONS).unwrap();
    let headless = run_pattern(&client_server_pattern(), &fixtures::eshop(), &mut script.clone());

    let r = service();
    let id = session(&r, fixtures::ESHOP).await;
    post(&r, &format!("/sessions/{id}/pattern/client-server/start"), Value::Null).await;
    let mut last = Value::Null;
    for d in &script.decisions {
        let (s, v) = post(
            &r,
            &format!("/sessions/{id}/pattern/decision"),
            json!({"step": d.step, "answer": d.answer}),
        )
        .await;
        assert_eq!(s, StatusCode::OK, "{v}");
        last = v;
    }
    assert_eq!(last["state"], "finished");
    assert_eq!(last["finalReport"]["ok"], true);
    let (_, text) = call(&r, Method::GET, &format!("/sessions/{id}/architecture/document"), Body::empty()).await;
    let text = String::from_utf8(text).unwrap();
    assert_eq!(text, headless.architecture.to_canonical());
    assert_eq!(text, fixtures::ESHOP_CLIENT_SERVER);
    let (_, report) = get(&r, &format!("/sessions/{id}/check?style=client-server")).await;
    assert_eq!(report, json!({"ok": true, "violations": []}));
}

#[tokio::test]
async fn check_requires_a_known_style() {
    let r = service();
    let id = session(&r, fixtures::ESHOP).await;
    let (s, _) = get(&r, &format!("/sessions/{id}/check")).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = get(&r, &format!("/sessions/{id}/check?style=nosuch")).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, v) = get(&r, &format!("/sessions/{id}/check?style=client-server")).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["ok"], false);
    assert!(v["violations"]
        .as_array()
        .unwrap()
        .iter()
        .any(|x| x["code"] == "node-count" && x["message"].as_str().unwrap().contains("Server")));
}

#[tokio::test]
async fn registries() {
    let r = service();
    let (_, styles) = get(&r, "/styles").await;
    assert_eq!(styles[0]["format"], "archevol/style@1");
    assert_eq!(styles[0]["name"], "client-server");
    let (_, patterns) = get(&r, "/patterns").await;
    assert_eq!(patterns[0]["name"], "client-server");
    assert_eq!(patterns[0]["steps"].as_array().unwrap().len(), 7);
    let (_, ops) = get(&r, "/operations").await;
    assert_eq!(ops.as_array().unwrap().len(), 8);
}

#[tokio::test]
async fn cors_allows_the_configured_origin() {
    let r = app(Some(HeaderValue::from_static("http://localhost:5173")));
    let req = Request::builder()
        .uri("/styles")
        .header(header::ORIGIN, "http://localhost:5173")
        .body(Body::empty())
        .unwrap();
    let resp = r.oneshot(req).await.unwrap();
    assert_eq!(
        resp.headers().get(header::ACCESS_CONTROL_ALLOW_ORIGIN).unwrap(),
        "http://localhost:5173"
    );
}
