//! Blocking client for the repository service.

use std::time::Duration;

use microar_core::package::MEDIA_TYPE;
use microar_core::StoryId;
use reqwest::blocking::{Client as Http, Response};
use reqwest::StatusCode;
use serde_json::{json, Value};

use crate::error::{CliError, ErrorKind};

pub const DEFAULT_SERVER: &str = "http://127.0.0.1:8080";

/// Outcome of `POST /stories`.
#[derive(Debug, Clone)]
pub struct Published {
    pub story_id: StoryId,
    pub created: bool,
    pub body: Value,
}

pub struct Client {
    base: String,
    http: Http,
}

fn network(e: reqwest::Error) -> CliError {
    CliError::io("network", e.to_string())
}

/// Turns an error response into a `CliError` carrying the server's body.
fn check(resp: Response) -> Result<Response, CliError> {
    let status = resp.status();
    if status.is_success() {
        return Ok(resp);
    }
    let text = resp.text().unwrap_or_default();
    let body: Value = serde_json::from_str(&text).unwrap_or_else(|_| json!(text));
    let kind = match status {
        StatusCode::NOT_FOUND => ErrorKind::NotFound,
        s if s.is_client_error() => ErrorKind::Validation,
        _ => ErrorKind::Io,
    };
    let code = body["error"]["code"]
        .as_str()
        .map_or_else(|| format!("http_{}", status.as_u16()), str::to_owned);
    let message = body["error"]["message"]
        .as_str()
        .map_or_else(|| format!("server answered {status}"), str::to_owned);
    Err(CliError::new(kind, code, message)
        .with_details(json!({"status": status.as_u16(), "server": body})))
}

fn json_body(resp: Response) -> Result<Value, CliError> {
    check(resp)?
        .json()
        .map_err(|e| CliError::io("bad_response", e.to_string()))
}

impl Client {
    pub fn new(base: &str) -> Result<Self, CliError> {
        let http = Http::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .map_err(network)?;
        Ok(Self {
            base: base.trim_end_matches('/').to_owned(),
            http,
        })
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    fn get_json(&self, path: &str, query: &[(&str, String)]) -> Result<Value, CliError> {
        json_body(
            self.http
                .get(self.url(path))
                .query(query)
                .send()
                .map_err(network)?,
        )
    }

    pub fn publish(&self, package: Vec<u8>, creator: &str) -> Result<Published, CliError> {
        if !creator
            .bytes()
            .all(|b| b == b'\t' || (0x20..0x7f).contains(&b))
        {
            return Err(CliError::validation(
                "invalid_creator",
                format!("creator {creator:?} cannot be sent as an HTTP header"),
            ));
        }
        let resp = self
            .http
            .post(self.url("/stories"))
            .header("creator", creator)
            .header("content-type", MEDIA_TYPE)
            .body(package)
            .send()
            .map_err(network)?;
        let body = json_body(resp)?;
        let story_id = body["story_id"]
            .as_str()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| CliError::io("bad_response", "publish response has no story_id"))?;
        let created = body["created"].as_bool().unwrap_or(false);
        Ok(Published {
            story_id,
            created,
            body,
        })
    }

    /// Package bytes; counts as one view.
    pub fn fetch(&self, id: &StoryId) -> Result<Vec<u8>, CliError> {
        let resp = self
            .http
            .get(self.url(&format!("/stories/{id}")))
            .header("accept", MEDIA_TYPE)
            .send()
            .map_err(network)?;
        Ok(check(resp)?.bytes().map_err(network)?.to_vec())
    }

    pub fn meta(&self, id: &StoryId) -> Result<Value, CliError> {
        self.get_json(&format!("/stories/{id}/meta"), &[])
    }

    pub fn list(
        &self,
        page: usize,
        page_size: Option<usize>,
        creator: Option<&str>,
    ) -> Result<Value, CliError> {
        let mut q = vec![("page", page.to_string())];
        if let Some(s) = page_size {
            q.push(("page_size", s.to_string()));
        }
        if let Some(c) = creator {
            q.push(("creator", c.to_owned()));
        }
        self.get_json("/stories", &q)
    }

    pub fn lineage(&self, id: &StoryId) -> Result<Value, CliError> {
        self.get_json(&format!("/stories/{id}/lineage"), &[])
    }

    pub fn stats(&self) -> Result<Value, CliError> {
        self.get_json("/stats", &[])
    }

    pub fn search_assets(&self, query: &str, limit: usize) -> Result<Value, CliError> {
        self.get_json(
            "/assets",
            &[("q", query.to_owned()), ("limit", limit.to_string())],
        )
    }
}
