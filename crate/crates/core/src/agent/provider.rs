//! Chat providers: a replayed script for reproducible runs and an
//! OpenAI-compatible HTTP client. See `docs/provider-wire.md` for the wire
//! shape.

use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};
use thiserror::Error;

pub const SCRIPT_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_API_KEY_ENV: &str = "VERIACT_API_KEY";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
    Tool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ToolCall {
    pub name: String,
    /// Expected to be a JSON object; anything else is a malformed call.
    #[serde(default)]
    pub arguments: Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Message {
    pub role: Role,
    pub content: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tool_calls: Vec<ToolCall>,
    /// Links a tool message, or an assistant call, to its call id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub call_id: Option<String>,
}

impl Message {
    pub fn new(role: Role, content: impl Into<String>) -> Message {
        Message { role, content: content.into(), tool_calls: vec![], call_id: None }
    }
}

/// One model turn: free text (the thought) plus zero or more tool calls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AssistantReply {
    #[serde(default)]
    pub content: String,
    #[serde(default)]
    pub tool_calls: Vec<ToolCall>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToolSchema {
    pub name: &'static str,
    pub description: &'static str,
    pub parameters: Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProviderError {
    #[error("provider transport: {0}")]
    Transport(String),
    #[error("provider response: {0}")]
    Protocol(String),
    #[error("response script exhausted after {0} replies")]
    Exhausted(usize),
    #[error("API key variable `{0}` is not set")]
    MissingKey(String),
    #[error("{0}")]
    Config(String),
}

pub trait ChatProvider: Send {
    fn identity(&self) -> String;
    /// Same history in, same reply out.
    fn deterministic(&self) -> bool;
    fn complete(&mut self, messages: &[Message], tools: &[ToolSchema]) -> Result<AssistantReply, ProviderError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ResponseScript {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    pub responses: Vec<AssistantReply>,
    /// Keep replaying the final response once the list runs out.
    #[serde(default)]
    pub repeat: bool,
}

/// Replays a fixed reply sequence, ignoring the history.
#[derive(Debug, Clone)]
pub struct ScriptedProvider {
    script: ResponseScript,
    cursor: usize,
}

impl ScriptedProvider {
    pub fn new(script: ResponseScript) -> Result<ScriptedProvider, ProviderError> {
        if script.schema_version != SCRIPT_SCHEMA_VERSION {
            return Err(ProviderError::Config(format!("unsupported script schemaVersion {}", script.schema_version)));
        }
        if script.repeat && script.responses.is_empty() {
            return Err(ProviderError::Config("a repeating script needs at least one response".into()));
        }
        Ok(ScriptedProvider { script, cursor: 0 })
    }

    pub fn from_json_str(text: &str) -> Result<ScriptedProvider, ProviderError> {
        ScriptedProvider::new(serde_json::from_str(text).map_err(|e| ProviderError::Config(e.to_string()))?)
    }

    pub fn load(path: &Path) -> Result<ScriptedProvider, ProviderError> {
        let text = std::fs::read_to_string(path).map_err(|e| ProviderError::Config(format!("{}: {e}", path.display())))?;
        ScriptedProvider::from_json_str(&text)
    }
}

impl ChatProvider for ScriptedProvider {
    fn identity(&self) -> String {
        if self.script.name.is_empty() { "scripted".into() } else { format!("scripted:{}", self.script.name) }
    }

    fn deterministic(&self) -> bool {
        true
    }

    fn complete(&mut self, _messages: &[Message], _tools: &[ToolSchema]) -> Result<AssistantReply, ProviderError> {
        let n = self.script.responses.len();
        let reply = match self.script.responses.get(self.cursor) {
            Some(r) => r.clone(),
            None if self.script.repeat => self.script.responses[n - 1].clone(),
            None => return Err(ProviderError::Exhausted(n)),
        };
        self.cursor += 1;
        Ok(reply)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", default, deny_unknown_fields)]
pub struct HttpProviderConfig {
    /// Full URL of the chat-completions endpoint.
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the bearer token.
    pub api_key_env: String,
    pub timeout_secs: u64,
    pub temperature: f64,
}

impl Default for HttpProviderConfig {
    fn default() -> Self {
        HttpProviderConfig {
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            model: String::new(),
            api_key_env: DEFAULT_API_KEY_ENV.into(),
            timeout_secs: 120,
            temperature: 0.0,
        }
    }
}

pub struct HttpProvider {
    cfg: HttpProviderConfig,
    api_key: String,
    agent: ureq::Agent,
}

impl HttpProvider {
    /// Reads the key from the configured variable; fails if it is unset.
    pub fn new(cfg: HttpProviderConfig) -> Result<HttpProvider, ProviderError> {
        if cfg.model.is_empty() {
            return Err(ProviderError::Config("http provider needs a model name".into()));
        }
        let api_key = std::env::var(&cfg.api_key_env).map_err(|_| ProviderError::MissingKey(cfg.api_key_env.clone()))?;
        let agent: ureq::Agent =
            ureq::Agent::config_builder().timeout_global(Some(Duration::from_secs(cfg.timeout_secs))).build().into();
        Ok(HttpProvider { cfg, api_key, agent })
    }
}

/// Request body for the chat-completions endpoint.
pub fn wire_request(model: &str, temperature: f64, messages: &[Message], tools: &[ToolSchema]) -> Json {
    let messages: Vec<Json> = messages
        .iter()
        .map(|m| match m.role {
            Role::Assistant if !m.tool_calls.is_empty() => json!({
                "role": "assistant",
                "content": m.content,
                "tool_calls": m.tool_calls.iter().enumerate().map(|(i, c)| json!({
                    "id": call_id(m, i),
                    "type": "function",
                    "function": {"name": c.name, "arguments": c.arguments.to_string()},
                })).collect::<Vec<_>>(),
            }),
            Role::Tool => json!({"role": "tool", "tool_call_id": m.call_id.clone().unwrap_or_default(), "content": m.content}),
            role => json!({"role": role, "content": m.content}),
        })
        .collect();
    let tools: Vec<Json> = tools
        .iter()
        .map(|t| json!({"type": "function", "function": {"name": t.name, "description": t.description, "parameters": t.parameters}}))
        .collect();
    json!({"model": model, "temperature": temperature, "messages": messages, "tools": tools, "tool_choice": "required"})
}

fn call_id(m: &Message, i: usize) -> String {
    let base = m.call_id.clone().unwrap_or_else(|| "call".into());
    if i == 0 { base } else { format!("{base}_{i}") }
}

/// First choice of a chat-completions response. Arguments that are not valid
/// JSON are kept as a string so the loop can reject the call.
pub fn parse_wire_response(body: &Json) -> Result<AssistantReply, ProviderError> {
    let msg = body
        .pointer("/choices/0/message")
        .ok_or_else(|| ProviderError::Protocol("response has no choices[0].message".into()))?;
    let content = msg.get("content").and_then(Json::as_str).unwrap_or_default().to_string();
    let tool_calls = msg
        .get("tool_calls")
        .and_then(Json::as_array)
        .map(|calls| {
            calls
                .iter()
                .map(|c| {
                    let name = c.pointer("/function/name").and_then(Json::as_str).unwrap_or_default().to_string();
                    let raw = c.pointer("/function/arguments").and_then(Json::as_str).unwrap_or("{}");
                    let arguments = serde_json::from_str(raw).unwrap_or_else(|_| Json::String(raw.to_string()));
                    ToolCall { name, arguments }
                })
                .collect()
        })
        .unwrap_or_default();
    Ok(AssistantReply { content, tool_calls })
}

impl ChatProvider for HttpProvider {
    fn identity(&self) -> String {
        format!("http:{}", self.cfg.model)
    }

    fn deterministic(&self) -> bool {
        false
    }

    fn complete(&mut self, messages: &[Message], tools: &[ToolSchema]) -> Result<AssistantReply, ProviderError> {
        let body = wire_request(&self.cfg.model, self.cfg.temperature, messages, tools);
        let mut resp = self
            .agent
            .post(&self.cfg.endpoint)
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .send_json(&body)
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        let json: Json = resp.body_mut().read_json().map_err(|e| ProviderError::Protocol(e.to_string()))?;
        parse_wire_response(&json)
    }
}
