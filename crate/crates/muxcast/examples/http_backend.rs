//! The completion-endpoint wire format, exercised against a local stub.
//!
//! The stub accepts `{model, prompt, max_tokens, temperature, top_p,
//! stop, logit_bias?}` and answers `{"choices": [{"text": ...}]}` - the
//! same shape a generic completion API serves. It continues any digit
//! prompt by echoing its final comma-separated chunk.
//!
//! Run with: cargo run -p muxcast --example http_backend

use std::io::{Read, Write};
use std::net::TcpListener;
use std::time::Duration;

use muxcast::backend::{BackendKind, BackendSelector, HttpBackend};
use muxcast::{forecast, ForecastRequest, MultiSeries, PipelineConfig, SamplingParams};

fn spawn_stub_server() -> std::io::Result<String> {
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let addr = listener.local_addr()?;
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let mut raw = Vec::new();
            let mut buf = [0u8; 4096];
            // read headers + body (single small request per connection)
            loop {
                match stream.read(&mut buf) {
                    Ok(0) => break,
                    Ok(read) => {
                        raw.extend_from_slice(&buf[..read]);
                        if request_complete(&raw) {
                            break;
                        }
                    }
                    Err(_) => break,
                }
            }
            let text = String::from_utf8_lossy(&raw);
            let body_start = text.find("\r\n\r\n").map(|i| i + 4).unwrap_or(0);
            let request: serde_json::Value =
                serde_json::from_str(&text[body_start..]).unwrap_or_default();
            let prompt = request["prompt"].as_str().unwrap_or_default();
            let max_tokens = request["max_tokens"].as_u64().unwrap_or(64) as usize;

            // repeat the last complete comma-separated chunk of the prompt
            let chunk = prompt
                .rsplit(',')
                .find(|part| !part.is_empty())
                .unwrap_or("0");
            let mut continuation = String::new();
            while continuation.len() + chunk.len() < max_tokens {
                continuation.push_str(chunk);
                continuation.push(',');
            }
            let body =
                serde_json::json!({ "choices": [{ "text": continuation }] }).to_string();
            let response = format!(
                "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{}",
                body.len(),
                body
            );
            let _ = stream.write_all(response.as_bytes());
        }
    });
    Ok(format!("http://{addr}/v1/completions"))
}

fn request_complete(raw: &[u8]) -> bool {
    let text = String::from_utf8_lossy(raw);
    let Some(header_end) = text.find("\r\n\r\n") else {
        return false;
    };
    let content_length = text
        .lines()
        .find_map(|line| {
            let (name, value) = line.split_once(':')?;
            name.eq_ignore_ascii_case("content-length")
                .then(|| value.trim().parse::<usize>().ok())?
        })
        .unwrap_or(0);
    raw.len() >= header_end + 4 + content_length
}

fn main() -> muxcast::Result<()> {
    let endpoint = spawn_stub_server()?;
    println!("stub completion server at {endpoint}\n");

    let selector = BackendSelector {
        kind: BackendKind::Http,
        endpoint: Some(endpoint),
        model_id: Some("stub-model".into()),
        timeout: Duration::from_secs(5),
        auth_token_env: None,
    };
    let backend = HttpBackend::new(&selector)?;

    // a raw completion call under the digit vocabulary
    let vocab = muxcast::multiplex::TokenVocabulary::digits();
    let constraint = muxcast::backend::GenerationConstraint::new(&vocab, 32, 4);
    let params = SamplingParams::default();
    let continuation = backend.http_complete("107,108,109,", &constraint, &params)?;
    println!("continuation of \"107,108,109,\": {continuation}\n");

    // the same backend drives the full pipeline
    let history = MultiSeries::from_columns(
        vec!["load".into()],
        vec![(0..48).map(|t| 100.0 + (t % 6) as f64).collect()],
    )?;
    let request = ForecastRequest {
        history,
        horizon: 6,
        config: PipelineConfig {
            num_samples: 3,
            ..PipelineConfig::default()
        },
    };
    let result = forecast(&request, &backend)?;
    println!(
        "pipeline forecast over http: {:?}",
        result.forecast.column(0)
    );
    Ok(())
}
