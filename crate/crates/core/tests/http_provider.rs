//! The OpenAI-compatible client against a scripted local HTTP server.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

use vsl_core::parser::{serialize, TemplateConfig};
use vsl_core::planner::http::{AudioTransport, OpenAiCompatible};
use vsl_core::planner::{plan, ChatMessage, ChatProvider, ChatRequest, PlanConfig, ProviderError, Role, SystemInstruction};
use vsl_core::retrieval::{CandidateDatabase, EmbeddingVector, ExampleConversation};
use vsl_core::VideoSceneLayout;

struct Captured {
    request_line: String,
    headers: Vec<(String, String)>,
    body: String,
}

impl Captured {
    fn header(&self, name: &str) -> Option<&str> {
        self.headers.iter().find(|(k, _)| k.eq_ignore_ascii_case(name)).map(|(_, v)| v.as_str())
    }
}

type Reply = (u16, Vec<(&'static str, String)>, String);

/// Serves one scripted response per connection, in order.
fn serve(responses: Vec<Reply>) -> (String, Arc<Mutex<Vec<Captured>>>, JoinHandle<()>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1", listener.local_addr().unwrap());
    let captured = Arc::new(Mutex::new(Vec::new()));
    let sink = captured.clone();
    let handle = std::thread::spawn(move || {
        for (status, headers, body) in responses {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            reader.read_line(&mut request_line).unwrap();
            let mut req_headers = Vec::new();
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                let line = line.trim_end();
                if line.is_empty() {
                    break;
                }
                let (k, v) = line.split_once(':').unwrap();
                req_headers.push((k.trim().to_string(), v.trim().to_string()));
            }
            let len: usize = req_headers
                .iter()
                .find(|(k, _)| k.eq_ignore_ascii_case("content-length"))
                .map(|(_, v)| v.parse().unwrap())
                .unwrap_or(0);
            let mut req_body = vec![0u8; len];
            reader.read_exact(&mut req_body).unwrap();
            sink.lock().unwrap().push(Captured {
                request_line: request_line.trim_end().to_string(),
                headers: req_headers,
                body: String::from_utf8(req_body).unwrap(),
            });
            let mut out = stream;
            let mut head = format!(
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n",
                body.len()
            );
            for (k, v) in headers {
                head.push_str(&format!("{k}: {v}\r\n"));
            }
            head.push_str("\r\n");
            out.write_all(head.as_bytes()).unwrap();
            out.write_all(body.as_bytes()).unwrap();
            out.flush().unwrap();
        }
    });
    (url, captured, handle)
}

fn completion(text: &str) -> String {
    serde_json::json!({
        "model": "gemini-2.0-flash",
        "choices": [{"index": 0, "message": {"role": "assistant", "content": text}}],
        "usage": {"prompt_tokens": 10, "completion_tokens": 5}
    })
    .to_string()
}

fn sample_vsl() -> VideoSceneLayout {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/sample_vsl.json");
    VideoSceneLayout::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn simple_request() -> ChatRequest {
    ChatRequest {
        model: "m".into(),
        temperature: 0.5,
        messages: vec![ChatMessage::audio(Role::User, "plan", "q.wav")],
    }
}

#[test]
fn rate_limit_then_success_through_the_planner() {
    let gt = sample_vsl();
    let reply = serialize(&gt, &TemplateConfig::default());
    let (url, captured, server) = serve(vec![
        (429, vec![("Retry-After", "0".into())], r#"{"error":{"code":429}}"#.into()),
        (200, vec![], completion(&reply)),
    ]);
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("q.wav"), b"RIFF0000WAVE").unwrap();
    std::fs::write(dir.path().join("ex.wav"), b"RIFF1111WAVE").unwrap();
    let provider = OpenAiCompatible::new(&url, Some("sk-test".into()), AudioTransport::Inline, Duration::from_secs(10))
        .unwrap()
        .with_audio_root(dir.path());
    let db = CandidateDatabase::new(vec![ExampleConversation {
        id: "ex".into(),
        audio_ref: "ex.wav".into(),
        embedding: EmbeddingVector(vec![1.0, 0.0]),
        reasoning: "the car moves right".into(),
        vsl: gt.clone(),
    }])
    .unwrap();
    let cfg = PlanConfig { k: 1, backoff_ms: 5000, ..Default::default() };
    let out = plan("q.wav", &EmbeddingVector(vec![1.0, 0.0]), &db, &cfg, &provider, &SystemInstruction::default()).unwrap();
    server.join().unwrap();
    assert_eq!(out.attempts, 2);
    assert_eq!(out.parsed.vsl, gt);

    let captured = captured.lock().unwrap();
    assert_eq!(captured.len(), 2);
    let req = &captured[1];
    assert_eq!(req.request_line, "POST /v1/chat/completions HTTP/1.1");
    assert_eq!(req.header("authorization"), Some("Bearer sk-test"));
    assert_eq!(req.header("content-type"), Some("application/json"));
    let body: serde_json::Value = serde_json::from_str(&req.body).unwrap();
    assert_eq!(body["model"], "gemini-2.0-flash");
    assert_eq!(body["temperature"], 0.5);
    let messages = body["messages"].as_array().unwrap();
    assert_eq!(messages.len(), 4);
    assert_eq!(messages[0]["role"], "system");
    // base64 of "RIFF0000WAVE"
    assert_eq!(messages[3]["content"][1]["input_audio"]["data"], "UklGRjAwMDBXQVZF");
    assert_eq!(captured[0].body, captured[1].body);
}

#[test]
fn status_codes_map_to_errors() {
    let (url, _, server) = serve(vec![
        (401, vec![], r#"{"error":"bad key"}"#.into()),
        (429, vec![("Retry-After", "7".into())], "{}".into()),
        (503, vec![], "overloaded".into()),
        (200, vec![], "not json".into()),
    ]);
    let p = OpenAiCompatible::new(&url, None, AudioTransport::Uri, Duration::from_secs(10)).unwrap();
    let req = simple_request();
    assert!(matches!(p.send(&req), Err(ProviderError::Auth(_))));
    assert_eq!(p.send(&req).unwrap_err(), ProviderError::RateLimited { retry_after: Some(Duration::from_secs(7)) });
    let e = p.send(&req).unwrap_err();
    assert!(e.is_retryable());
    assert!(matches!(e, ProviderError::Status { status: 503, .. }));
    assert!(matches!(p.send(&req), Err(ProviderError::Malformed(_))));
    server.join().unwrap();
}

#[test]
fn unreachable_server_is_a_transport_error() {
    let addr = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap();
    let p = OpenAiCompatible::new(&format!("http://{addr}"), None, AudioTransport::Uri, Duration::from_secs(2)).unwrap();
    let e = p.send(&simple_request()).unwrap_err();
    assert!(matches!(e, ProviderError::Transport(_)), "{e:?}");
    assert!(e.is_retryable());
}

#[test]
fn missing_audio_file_is_reported_before_sending() {
    let p = OpenAiCompatible::new("http://127.0.0.1:9", None, AudioTransport::Inline, Duration::from_secs(1)).unwrap();
    let e = p.send(&simple_request()).unwrap_err();
    assert!(matches!(e, ProviderError::Config(_)), "{e:?}");
}
