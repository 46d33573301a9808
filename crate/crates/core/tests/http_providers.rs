//! HTTP clients against a tiny in-process server.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use groundedkg::providers::{
    ChatConfig, CompletionClient, EmbedError, Embedder, HttpChatClient, HttpEmbedder, HttpEmbedderConfig, LlmError,
};
use groundedkg::ragen::{answer_batch, PromptSpec};
use serde_json::{json, Value};

struct Request {
    path: String,
    headers: Vec<(String, String)>,
    body: Value,
}

type Handler = dyn Fn(usize, &Request) -> (u16, String) + Send + Sync;

struct Server {
    base: String,
    hits: Arc<AtomicUsize>,
    peak: Arc<AtomicUsize>,
}

/// Serves `handler(request_number, request)` on a fresh port, one thread per
/// connection, `Connection: close` on every response.
fn serve(handler: impl Fn(usize, &Request) -> (u16, String) + Send + Sync + 'static) -> Server {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    let hits = Arc::new(AtomicUsize::new(0));
    let live = Arc::new(AtomicUsize::new(0));
    let peak = Arc::new(AtomicUsize::new(0));
    let handler: Arc<Handler> = Arc::new(handler);
    let (h2, p2) = (hits.clone(), peak.clone());
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let (handler, hits, live, peak) = (handler.clone(), h2.clone(), live.clone(), p2.clone());
            thread::spawn(move || {
                let now = live.fetch_add(1, Ordering::SeqCst) + 1;
                peak.fetch_max(now, Ordering::SeqCst);
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                let path = line.split_whitespace().nth(1).unwrap_or("").to_string();
                let mut headers = Vec::new();
                let mut len = 0;
                loop {
                    let mut h = String::new();
                    reader.read_line(&mut h).unwrap();
                    let h = h.trim_end();
                    if h.is_empty() {
                        break;
                    }
                    if let Some((k, v)) = h.split_once(':') {
                        let (k, v) = (k.trim().to_ascii_lowercase(), v.trim().to_string());
                        if k == "content-length" {
                            len = v.parse().unwrap();
                        }
                        headers.push((k, v));
                    }
                }
                let mut body = vec![0; len];
                reader.read_exact(&mut body).unwrap();
                let req = Request { path, headers, body: serde_json::from_slice(&body).unwrap_or(Value::Null) };
                let n = hits.fetch_add(1, Ordering::SeqCst);
                let (status, body) = handler(n, &req);
                let resp = format!(
                    "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                    body.len()
                );
                let _ = stream.write_all(resp.as_bytes());
                live.fetch_sub(1, Ordering::SeqCst);
            });
        }
    });
    Server { base, hits, peak }
}

fn chat_reply(text: &str) -> String {
    json!({
        "choices": [{"message": {"role": "assistant", "content": text}}],
        "usage": {"prompt_tokens": 7, "completion_tokens": 2, "total_tokens": 9}
    })
    .to_string()
}

fn chat(base: &str, retries: u32) -> HttpChatClient {
    HttpChatClient::new(ChatConfig {
        base_url: base.to_string(),
        api_key: Some("sk-test".into()),
        max_retries: retries,
        backoff_base_ms: 1,
        backoff_cap_ms: 5,
        timeout_secs: 5,
        ..ChatConfig::default()
    })
    .unwrap()
}

#[test]
fn chat_sends_openai_shape_and_parses_reply() {
    let server = serve(|_, req| {
        assert_eq!(req.path, "/v1/chat/completions");
        assert!(req.headers.iter().any(|(k, v)| k == "authorization" && v == "Bearer sk-test"));
        assert_eq!(req.body["model"], "gpt-4o-mini");
        assert_eq!(req.body["messages"][0]["role"], "user");
        (200, chat_reply("  camomile tea \n"))
    });
    let c = chat(&format!("{}/v1", server.base), 0);
    let out = c.complete("Question: what?").unwrap();
    assert_eq!(out.text, "camomile tea");
    assert_eq!(out.usage.total_tokens, 9);
}

#[test]
fn chat_retries_transient_failures() {
    let server = serve(|n, _| match n {
        0 => (429, "{}".into()),
        1 => (503, "busy".into()),
        _ => (200, chat_reply("ok")),
    });
    let c = chat(&server.base, 4);
    assert_eq!(c.complete("p").unwrap().text, "ok");
    assert_eq!(server.hits.load(Ordering::SeqCst), 3);
}

#[test]
fn chat_gives_up_after_max_retries() {
    let server = serve(|_, _| (429, "{}".into()));
    let c = chat(&server.base, 2);
    assert_eq!(c.complete("p"), Err(LlmError::RateLimited { attempts: 3 }));
    assert_eq!(server.hits.load(Ordering::SeqCst), 3);
}

#[test]
fn chat_auth_and_client_errors_are_not_retried() {
    let server = serve(|_, _| (401, "{\"error\":\"bad key\"}".into()));
    let c = chat(&server.base, 4);
    assert!(matches!(c.complete("p"), Err(LlmError::Auth { status: 401, .. })));
    assert_eq!(server.hits.load(Ordering::SeqCst), 1);

    let server = serve(|_, _| (400, "nope".into()));
    let c = chat(&server.base, 4);
    assert!(matches!(c.complete("p"), Err(LlmError::Server { status: 400, .. })));
    assert_eq!(server.hits.load(Ordering::SeqCst), 1);
}

#[test]
fn chat_connection_refused_is_transport_error() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let c = chat(&format!("http://127.0.0.1:{port}"), 1);
    assert!(matches!(c.complete("p"), Err(LlmError::Transport { attempts: 2, .. })));
}

#[test]
fn chat_malformed_url_fails_before_any_request() {
    for bad in ["", "not a url", "ftp://host/v1", "http://"] {
        let cfg = ChatConfig { base_url: bad.into(), ..ChatConfig::default() };
        assert!(matches!(HttpChatClient::new(cfg), Err(LlmError::Config(_))), "{bad:?}");
    }
}

#[test]
fn batch_of_thirty_over_http_with_one_failure() {
    let server = serve(|_, req| {
        let prompt = req.body["messages"][0]["content"].as_str().unwrap().to_string();
        thread::sleep(Duration::from_millis(10));
        if prompt.contains("question 5?") {
            (400, "scripted failure".into())
        } else {
            let q = prompt.lines().find(|l| l.starts_with("Question:")).unwrap().to_string();
            (200, chat_reply(&q))
        }
    });
    let c = chat(&server.base, 0);
    let specs: Vec<PromptSpec> = (0..30).map(|i| PromptSpec::with_content("ctx", format!("question {i}?"))).collect();
    let out = answer_batch(&specs, &c, 3);
    assert_eq!(out.len(), 30);
    for (i, r) in out.iter().enumerate() {
        if i == 5 {
            assert!(r.is_err());
        } else {
            assert_eq!(r.as_ref().unwrap().answer, format!("Question: question {i}?"));
        }
    }
    assert!(server.peak.load(Ordering::SeqCst) <= 3);
    assert_eq!(server.hits.load(Ordering::SeqCst), 30);
}

#[derive(serde::Deserialize)]
struct VectorFixture {
    text: String,
    dim: usize,
    vector: Vec<f32>,
}

fn embed_client(base: &str, dim: usize, batch: usize) -> HttpEmbedder {
    HttpEmbedder::new(HttpEmbedderConfig {
        base_url: base.into(),
        dim,
        batch_size: batch,
        max_in_flight: 2,
        timeout_secs: 5,
    })
    .unwrap()
}

#[test]
fn embed_returns_fixture_vector() {
    let path = format!("{}/../../fixtures/embed/camomile_tea.json", env!("CARGO_MANIFEST_DIR"));
    let fx: VectorFixture = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let served = fx.vector.clone();
    let (dim, want_text) = (fx.dim, fx.text.clone());
    let server = serve(move |_, req| {
        assert_eq!(req.path, "/embed");
        assert_eq!(req.body["texts"], json!([want_text]));
        (200, json!({"dim": dim, "vectors": [served]}).to_string())
    });
    let e = embed_client(&server.base, fx.dim, 8);
    let v = e.embed_one(&fx.text).unwrap();
    let norm = v.iter().map(|&x| (x as f64).powi(2)).sum::<f64>().sqrt();
    assert!((norm - 1.0).abs() < 1e-6);
    for (a, b) in v.iter().zip(&fx.vector) {
        assert!((a - b).abs() < 1e-6);
    }
}

#[test]
fn embed_batches_and_preserves_order() {
    // one-hot vector per text, keyed by the number in the text
    let server = serve(|_, req| {
        let vectors: Vec<Vec<f32>> = req.body["texts"]
            .as_array()
            .unwrap()
            .iter()
            .map(|t| {
                let i: usize = t.as_str().unwrap().trim_start_matches("text ").parse().unwrap();
                (0..16).map(|j| if j == i { 2.0 } else { 0.0 }).collect()
            })
            .collect();
        (200, json!({"dim": 16, "vectors": vectors}).to_string())
    });
    let e = embed_client(&server.base, 16, 3);
    let texts: Vec<String> = (0..16).map(|i| format!("text {i}")).collect();
    let out = e.embed_texts(&texts).unwrap();
    for (i, v) in out.iter().enumerate() {
        assert_eq!(v[i], 1.0);
    }
    assert_eq!(server.hits.load(Ordering::SeqCst), 6);
    assert!(server.peak.load(Ordering::SeqCst) <= 2);
}

#[test]
fn embed_rejects_wrong_dim_and_server_errors() {
    let server = serve(|_, _| (200, json!({"dim": 4, "vectors": [[1.0, 0.0, 0.0, 0.0]]}).to_string()));
    let e = embed_client(&server.base, 8, 8);
    assert!(matches!(e.embed_one("a"), Err(EmbedError::DimMismatch { expected: 8, found: 4 })));

    let server = serve(|_, _| (500, "boom".into()));
    let e = embed_client(&server.base, 8, 8);
    assert!(matches!(e.embed_one("a"), Err(EmbedError::Server { status: 500, .. })));

    let server = serve(|_, _| (200, json!({"dim": 2, "vectors": [[0.0, 0.0]]}).to_string()));
    let e = embed_client(&server.base, 2, 8);
    assert!(matches!(e.embed_one("a"), Err(EmbedError::Degenerate { index: 0 })));
}
