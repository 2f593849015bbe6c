//! Candidate solution sources: the oracle's own outputs (harness identity
//! test), pre-generated texts from a JSONL file, or a remote chat-completion
//! endpoint with retries and a replay log.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dataset::DatasetRecord;
use crate::error::EvalError;

use super::EvalConfig;

/// Remote sampling endpoint. The request is a generic JSON chat-completion
/// shape; `response_path` is a dot-separated path (with numeric indices) to
/// the completion text inside the response body, so different providers can
/// be adapted by configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HttpSource {
    pub url: String,
    pub model: String,
    pub temperature: f64,
    /// Prompt template; `{instruction}` and `{input}` are substituted.
    pub prompt_template: String,
    pub response_path: String,
    pub max_retries: usize,
    /// JSONL log of every request/response, for byte-reproducible replay.
    pub replay_log: Option<PathBuf>,
}

impl Default for HttpSource {
    fn default() -> Self {
        HttpSource {
            url: String::new(),
            model: "default".to_string(),
            temperature: 0.7,
            prompt_template: "{instruction}\n\n{input}".to_string(),
            response_path: "choices.0.message.content".to_string(),
            max_retries: 3,
            replay_log: None,
        }
    }
}

pub enum CandidateSource {
    /// Every candidate is the oracle's rendered output in the configured
    /// format: gap 0, feasibility 100% by construction.
    OracleEcho,
    /// JSONL file of {"id": ..., "text": ...} entries keyed by instance id.
    File { texts: HashMap<String, Vec<String>> },
    Http(HttpSource),
}

impl CandidateSource {
    /// Loads a JSONL candidate file. Lines must be objects with string
    /// fields `id` and `text`; repeated ids accumulate.
    pub fn from_file(path: &Path) -> Result<Self, EvalError> {
        #[derive(Deserialize)]
        struct Entry {
            id: String,
            text: String,
        }
        let content = std::fs::read_to_string(path)?;
        let mut texts: HashMap<String, Vec<String>> = HashMap::new();
        for (lineno, line) in content.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: Entry = serde_json::from_str(line).map_err(|e| EvalError::Malformed {
                line: lineno + 1,
                detail: e.to_string(),
            })?;
            texts.entry(entry.id).or_default().push(entry.text);
        }
        Ok(CandidateSource::File { texts })
    }
}

pub fn fetch_candidates(
    source: &CandidateSource,
    record: &DatasetRecord,
    config: &EvalConfig,
) -> Result<Vec<String>, EvalError> {
    let n = config.samples;
    match source {
        CandidateSource::OracleEcho => {
            let text = match config.format {
                crate::codec::SolutionFormat::Accord => &record.output_accord,
                crate::codec::SolutionFormat::List => &record.output_list,
            };
            Ok(vec![text.clone(); n])
        }
        CandidateSource::File { texts } => Ok(texts
            .get(&record.id)
            .map(|stored| stored.iter().take(n).cloned().collect())
            .unwrap_or_default()),
        CandidateSource::Http(http) => http_fetch(http, record, n, config.timeout_secs),
    }
}

fn walk_path<'a>(value: &'a Value, path: &str) -> Option<&'a Value> {
    let mut cur = value;
    for part in path.split('.') {
        cur = match part.parse::<usize>() {
            Ok(idx) => cur.get(idx)?,
            Err(_) => cur.get(part)?,
        };
    }
    Some(cur)
}

fn http_fetch(
    http: &HttpSource,
    record: &DatasetRecord,
    n: usize,
    timeout_secs: u64,
) -> Result<Vec<String>, EvalError> {
    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(timeout_secs))
        .build()
        .map_err(|e| EvalError::SourceUnavailable(e.to_string()))?;
    let prompt = http
        .prompt_template
        .replace("{instruction}", &record.instruction)
        .replace("{input}", &record.input);
    let body = json!({
        "model": http.model,
        "temperature": http.temperature,
        "messages": [{"role": "user", "content": prompt}],
    });
    let replay = match &http.replay_log {
        Some(p) => Some(Mutex::new(
            std::fs::OpenOptions::new().create(true).append(true).open(p)?,
        )),
        None => None,
    };
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let response = request_with_retries(&client, http, &body, timeout_secs)?;
        if let Some(lock) = &replay {
            if let Ok(mut file) = lock.lock() {
                use std::io::Write as _;
                let line = json!({
                    "timestamp": std::time::SystemTime::now()
                        .duration_since(std::time::UNIX_EPOCH)
                        .map(|d| d.as_secs_f64())
                        .unwrap_or(0.0),
                    "request": body,
                    "response": response,
                });
                let _ = writeln!(*file, "{line}");
            }
        }
        let text = walk_path(&response, &http.response_path)
            .and_then(Value::as_str)
            .ok_or_else(|| {
                EvalError::SourceUnavailable(format!(
                    "response has no string at `{}`",
                    http.response_path
                ))
            })?;
        out.push(text.to_string());
    }
    Ok(out)
}

fn request_with_retries(
    client: &reqwest::blocking::Client,
    http: &HttpSource,
    body: &Value,
    timeout_secs: u64,
) -> Result<Value, EvalError> {
    let mut delay = Duration::from_millis(200);
    let mut last_err = String::new();
    for attempt in 0..=http.max_retries {
        if attempt > 0 {
            std::thread::sleep(delay);
            delay *= 2;
        }
        match client.post(&http.url).json(body).send() {
            Ok(resp) if resp.status().is_success() => {
                return resp
                    .json::<Value>()
                    .map_err(|e| EvalError::SourceUnavailable(e.to_string()));
            }
            Ok(resp) => last_err = format!("HTTP {}", resp.status()),
            Err(e) if e.is_timeout() => {
                return Err(EvalError::Timeout(format!("{timeout_secs}s exceeded: {e}")));
            }
            Err(e) => last_err = e.to_string(),
        }
    }
    Err(EvalError::SourceUnavailable(format!(
        "{} after {} retries: {last_err}",
        http.url, http.max_retries
    )))
}
