//! Networked suggestion provider: submits a token as a search query and
//! parses the spelling-suggestion marker out of the response page.
//!
//! All tests run against recorded cassettes or local fixture bodies; the live
//! HTTP path is only reachable behind an explicit opt-in (see the CLI's
//! `--allow-network`).

use std::sync::Mutex;
use std::time::Duration;

use thiserror::Error;

use crate::suggest::{SuggestError, Suggestion, SuggestionProvider};

/// The marker phrase whose presence in a result page signals that the query
/// was misspelled; the suggestion text follows it.
pub const DEFAULT_MARKER: &str = "Including results for";

pub const DEFAULT_REQUEST_DELAY: Duration = Duration::from_millis(1000);
pub const DEFAULT_TIMEOUT: Duration = Duration::from_millis(10_000);

/// Placeholder in the endpoint template that receives the encoded query.
pub const QUERY_PLACEHOLDER: &str = "{}";

#[derive(Debug, Error)]
pub enum WebConfigError {
    #[error("endpoint template must contain exactly one {QUERY_PLACEHOLDER} placeholder: {0:?}")]
    BadTemplate(String),
    #[error("timeout must be greater than zero")]
    ZeroTimeout,
}

#[derive(Debug, Clone)]
pub struct WebConfig {
    /// URL template with one `{}` placeholder for the percent-encoded query.
    pub endpoint_template: String,
    /// Marker preceding the suggestion text; matched case-sensitively.
    pub marker_text: String,
    /// Minimum gap between consecutive request initiations.
    pub request_delay: Duration,
    pub timeout: Duration,
}

impl WebConfig {
    pub fn new(endpoint_template: impl Into<String>) -> Result<Self, WebConfigError> {
        let config = Self {
            endpoint_template: endpoint_template.into(),
            marker_text: DEFAULT_MARKER.to_owned(),
            request_delay: DEFAULT_REQUEST_DELAY,
            timeout: DEFAULT_TIMEOUT,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), WebConfigError> {
        if self.endpoint_template.matches(QUERY_PLACEHOLDER).count() != 1 {
            return Err(WebConfigError::BadTemplate(self.endpoint_template.clone()));
        }
        if self.timeout.is_zero() {
            return Err(WebConfigError::ZeroTimeout);
        }
        Ok(())
    }
}

/// Replaces the template placeholder with the percent-encoded token text.
pub fn build_query(endpoint_template: &str, token_text: &str) -> String {
    endpoint_template.replacen(QUERY_PLACEHOLDER, &percent_encode(token_text), 1)
}

/// RFC 3986 percent-encoding: unreserved characters pass through, everything
/// else (including spaces) is encoded as UTF-8 %XX bytes.
fn percent_encode(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for byte in text.bytes() {
        match byte {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'_' | b'.' | b'~' => {
                out.push(byte as char);
            }
            _ => out.push_str(&format!("%{byte:02X}")),
        }
    }
    out
}

/// Extracts the suggestion text following `marker_text` in a response body.
///
/// The suggestion is taken up to the next block-level boundary or line end,
/// markup tags are stripped, basic HTML entities are decoded, and whitespace
/// is collapsed. Returns `None` when the marker is absent or nothing usable
/// follows it; a malformed or empty body is "no suggestion", not an error.
pub fn parse_suggestion(body: &str, marker_text: &str) -> Option<String> {
    let start = body.find(marker_text)? + marker_text.len();
    let rest = &body[start..];

    // ASCII folding keeps byte offsets aligned with `rest`; the boundary
    // tokens are all ASCII.
    let lower = rest.to_ascii_lowercase();
    let mut end = rest.len();
    for boundary in [
        "\n", "\r", "</p", "</div", "</li", "</td", "</tr", "</h", "<br", "</body", "</html",
    ] {
        if let Some(pos) = lower.find(boundary) {
            end = end.min(pos);
        }
    }

    let fragment = &rest[..end];
    let text = decode_entities(&strip_tags(fragment));
    let collapsed = text.split_whitespace().collect::<Vec<_>>().join(" ");
    let trimmed =
        collapsed.trim_matches(|c| c == ':' || c == '"' || c == '\u{201c}' || c == '\u{201d}');
    if trimmed.is_empty() {
        None
    } else {
        Some(trimmed.to_owned())
    }
}

fn strip_tags(fragment: &str) -> String {
    let mut out = String::with_capacity(fragment.len());
    let mut in_tag = false;
    for c in fragment.chars() {
        match c {
            '<' => in_tag = true,
            '>' if in_tag => in_tag = false,
            c if !in_tag => out.push(c),
            _ => {}
        }
    }
    out
}

fn decode_entities(text: &str) -> String {
    text.replace("&nbsp;", " ")
        .replace("&quot;", "\"")
        .replace("&#39;", "'")
        .replace("&apos;", "'")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&amp;", "&")
}

/// Time source for the rate limiter. Injected so tests can verify pacing
/// without sleeping.
pub trait Clock: Send + Sync {
    fn now_millis(&self) -> u64;
    fn sleep_millis(&self, millis: u64);
}

/// Monotonic wall clock.
pub struct SystemClock {
    start: std::time::Instant,
}

impl SystemClock {
    pub fn new() -> Self {
        Self {
            start: std::time::Instant::now(),
        }
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for SystemClock {
    fn now_millis(&self) -> u64 {
        self.start.elapsed().as_millis() as u64
    }

    fn sleep_millis(&self, millis: u64) {
        std::thread::sleep(Duration::from_millis(millis));
    }
}

/// Fetches a URL and returns the response body. Injected so tests can serve
/// fixture pages.
pub trait Transport: Send + Sync {
    fn get(&self, url: &str) -> Result<String, SuggestError>;
}

/// Live HTTP transport.
#[cfg(feature = "http")]
pub struct HttpTransport {
    agent: ureq::Agent,
}

#[cfg(feature = "http")]
impl HttpTransport {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build();
        Self {
            agent: config.into(),
        }
    }
}

#[cfg(feature = "http")]
impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<String, SuggestError> {
        let mut response = self
            .agent
            .get(url)
            .call()
            .map_err(|e| SuggestError::Transport(e.to_string()))?;
        response
            .body_mut()
            .read_to_string()
            .map_err(|e| SuggestError::Transport(e.to_string()))
    }
}

/// The web-backed provider. One request is in flight at a time per instance
/// (the rate limiter serializes); run several instances for parallel modes.
pub struct WebSuggester {
    config: WebConfig,
    transport: Box<dyn Transport>,
    clock: Box<dyn Clock>,
    /// Initiation time of the previous request, in clock milliseconds.
    last_request: Mutex<Option<u64>>,
}

impl WebSuggester {
    #[cfg(feature = "http")]
    pub fn new(config: WebConfig) -> Self {
        let timeout = config.timeout;
        Self::with_parts(
            config,
            Box::new(HttpTransport::new(timeout)),
            Box::new(SystemClock::new()),
        )
    }

    pub fn with_parts(
        config: WebConfig,
        transport: Box<dyn Transport>,
        clock: Box<dyn Clock>,
    ) -> Self {
        config.validate().expect("web provider config is valid");
        Self {
            config,
            transport,
            clock,
            last_request: Mutex::new(None),
        }
    }

    pub fn config(&self) -> &WebConfig {
        &self.config
    }
}

impl SuggestionProvider for WebSuggester {
    fn id(&self) -> &str {
        "web"
    }

    fn suggest(&self, query: &str) -> Result<Option<Suggestion>, SuggestError> {
        if query.trim().is_empty() {
            return Err(SuggestError::EmptyQuery);
        }
        // Holding the lock across the request keeps one request in flight per
        // instance and enforces the initiation gap.
        let mut last = self.last_request.lock().expect("rate limiter lock");
        let delay = self.config.request_delay.as_millis() as u64;
        if let Some(previous) = *last {
            let due = previous + delay;
            let now = self.clock.now_millis();
            if now < due {
                self.clock.sleep_millis(due - now);
            }
        }
        *last = Some(self.clock.now_millis());

        let url = build_query(&self.config.endpoint_template, query);
        let body = self.transport.get(&url)?;
        drop(last);

        match parse_suggestion(&body, &self.config.marker_text) {
            Some(corrected) => Ok(Suggestion::new(query, corrected, "web")),
            None => Ok(None),
        }
    }
}
