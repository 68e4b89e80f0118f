//! Surveillance retrieval from an OpenSky-style state-vector API, with a
//! file-backed provider for offline and deterministic runs.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::sync::{Arc, LazyLock, Mutex};
use std::time::{Duration, Instant};

use base64::Engine;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::callsign::{parse_icao, IcaoCallsign};
use crate::error::{CruError, Result};
use crate::matcher::SurveillanceSnapshot;

pub const DEFAULT_RADIUS_KM: f64 = 100.0;
pub const DEFAULT_WINDOW_S: u64 = 30;
const KM_PER_DEGREE: f64 = 111.32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurveillanceQuery {
    /// Seconds since the Unix epoch.
    pub timestamp: i64,
    pub lat: f64,
    pub lon: f64,
    pub radius_km: f64,
    /// Half-width of the time window.
    pub window_s: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub lamin: f64,
    pub lamax: f64,
    pub lomin: f64,
    pub lomax: f64,
}

impl BoundingBox {
    pub fn contains(&self, lat: f64, lon: f64) -> bool {
        (self.lamin..=self.lamax).contains(&lat) && (self.lomin..=self.lomax).contains(&lon)
    }
}

impl SurveillanceQuery {
    pub fn new(timestamp: i64, lat: f64, lon: f64) -> Self {
        SurveillanceQuery {
            timestamp,
            lat,
            lon,
            radius_km: DEFAULT_RADIUS_KM,
            window_s: DEFAULT_WINDOW_S,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(-90.0..=90.0).contains(&self.lat) {
            return Err(CruError::InvalidConfig(format!("latitude {} out of range", self.lat)));
        }
        if !(-180.0..=180.0).contains(&self.lon) {
            return Err(CruError::InvalidConfig(format!("longitude {} out of range", self.lon)));
        }
        if !(self.radius_km.is_finite() && self.radius_km > 0.0) {
            return Err(CruError::InvalidConfig("radius_km must be positive".into()));
        }
        Ok(())
    }

    /// Flat-earth box around the centre, clamped to valid coordinates.
    pub fn bbox(&self) -> BoundingBox {
        let dlat = self.radius_km / KM_PER_DEGREE;
        let cos = self.lat.to_radians().cos();
        let dlon = if cos < 1e-6 {
            180.0
        } else {
            (self.radius_km / (KM_PER_DEGREE * cos)).min(180.0)
        };
        BoundingBox {
            lamin: (self.lat - dlat).max(-90.0),
            lamax: (self.lat + dlat).min(90.0),
            lomin: (self.lon - dlon).max(-180.0),
            lomax: (self.lon + dlon).min(180.0),
        }
    }

    pub fn in_window(&self, time: i64) -> bool {
        time.abs_diff(self.timestamp) <= self.window_s
    }
}

/// One aircraft position report with the raw call-sign string.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub callsign: Option<String>,
    pub lat: Option<f64>,
    pub lon: Option<f64>,
    pub time: i64,
}

pub trait SurveillanceProvider: Send + Sync {
    /// State vectors around the query; callers apply the final filtering.
    fn states(&self, query: &SurveillanceQuery) -> Result<Vec<StateVector>>;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FetchResult {
    pub snapshot: SurveillanceSnapshot,
    /// Entries whose call-sign was missing or failed the ICAO grammar.
    pub dropped: usize,
}

/// Trims ADS-B padding, uppercases and validates a raw call-sign.
pub fn normalize_callsign(raw: &str) -> Option<IcaoCallsign> {
    parse_icao(&raw.trim().to_ascii_uppercase()).ok()
}

/// Call-signs of all state vectors inside the query box and time window,
/// sorted and deduplicated.
pub fn fetch_surveillance(query: &SurveillanceQuery, provider: &dyn SurveillanceProvider) -> Result<FetchResult> {
    query.validate()?;
    let bbox = query.bbox();
    let mut seen = BTreeSet::new();
    let mut dropped = 0;
    for state in provider.states(query)? {
        if !query.in_window(state.time) {
            continue;
        }
        if let (Some(lat), Some(lon)) = (state.lat, state.lon) {
            if !bbox.contains(lat, lon) {
                continue;
            }
        }
        match state.callsign.as_deref().and_then(normalize_callsign) {
            Some(cs) => {
                seen.insert(cs);
            }
            None => dropped += 1,
        }
    }
    Ok(FetchResult {
        snapshot: SurveillanceSnapshot::new(seen.into_iter().collect()),
        dropped,
    })
}

#[derive(Debug, Deserialize)]
struct FixtureFrame {
    time: i64,
    #[serde(default)]
    states: Vec<FixtureState>,
}

#[derive(Debug, Deserialize)]
struct FixtureState {
    callsign: Option<String>,
    lat: Option<f64>,
    lon: Option<f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Fixture {
    One(FixtureFrame),
    Many(Vec<FixtureFrame>),
}

/// Serves state vectors from a JSON fixture: one
/// `{"time": .., "states": [{"callsign", "lat", "lon"}]}` frame or an
/// array of them.
#[derive(Debug, Clone, Default)]
pub struct OfflineProvider {
    states: Vec<StateVector>,
}

impl OfflineProvider {
    pub fn from_json(text: &str) -> Result<Self> {
        let fixture: Fixture =
            serde_json::from_str(text).map_err(|e| CruError::MalformedResponse(format!("fixture: {e}")))?;
        let frames = match fixture {
            Fixture::One(f) => vec![f],
            Fixture::Many(v) => v,
        };
        let states = frames
            .into_iter()
            .flat_map(|f| {
                f.states.into_iter().map(move |s| StateVector {
                    callsign: s.callsign,
                    lat: s.lat,
                    lon: s.lon,
                    time: f.time,
                })
            })
            .collect();
        Ok(OfflineProvider { states })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| CruError::io(path, e))?;
        Self::from_json(&text)
    }
}

impl SurveillanceProvider for OfflineProvider {
    fn states(&self, _query: &SurveillanceQuery) -> Result<Vec<StateVector>> {
        Ok(self.states.clone())
    }
}

/// API credentials; the password never appears in `Debug` output.
#[derive(Clone, PartialEq, Eq)]
pub struct Credentials {
    pub username: String,
    password: String,
}

impl Credentials {
    pub const USERNAME_VAR: &'static str = "OPENSKY_USERNAME";
    pub const PASSWORD_VAR: &'static str = "OPENSKY_PASSWORD";

    pub fn new(username: impl Into<String>, password: impl Into<String>) -> Self {
        Credentials {
            username: username.into(),
            password: password.into(),
        }
    }

    /// Reads both variables; `None` unless both are set and non-empty.
    pub fn from_env() -> Option<Self> {
        let user = std::env::var(Self::USERNAME_VAR).ok().filter(|s| !s.is_empty())?;
        let pass = std::env::var(Self::PASSWORD_VAR).ok().filter(|s| !s.is_empty())?;
        Some(Self::new(user, pass))
    }

    fn header(&self) -> String {
        let raw = format!("{}:{}", self.username, self.password);
        format!("Basic {}", base64::engine::general_purpose::STANDARD.encode(raw))
    }
}

impl fmt::Debug for Credentials {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Credentials")
            .field("username", &self.username)
            .field("password", &"<redacted>")
            .finish()
    }
}

/// Token bucket shared by every HTTP provider that uses [`global_limiter`].
#[derive(Debug)]
pub struct RateLimiter {
    rate_per_s: f64,
    burst: f64,
    state: Mutex<(f64, Instant)>,
}

impl RateLimiter {
    pub fn new(rate_per_s: f64, burst: u32) -> Self {
        let burst = f64::from(burst.max(1));
        RateLimiter {
            rate_per_s,
            burst,
            state: Mutex::new((burst, Instant::now())),
        }
    }

    /// Blocks until a token is available.
    pub fn acquire(&self) {
        loop {
            let wait = {
                let mut st = self.state.lock().unwrap_or_else(|e| e.into_inner());
                let now = Instant::now();
                let refill = now.duration_since(st.1).as_secs_f64() * self.rate_per_s;
                st.0 = (st.0 + refill).min(self.burst);
                st.1 = now;
                if st.0 >= 1.0 {
                    st.0 -= 1.0;
                    return;
                }
                Duration::from_secs_f64((1.0 - st.0) / self.rate_per_s)
            };
            std::thread::sleep(wait);
        }
    }
}

pub fn global_limiter() -> Arc<RateLimiter> {
    static LIMITER: LazyLock<Arc<RateLimiter>> = LazyLock::new(|| Arc::new(RateLimiter::new(1.0, 4)));
    LIMITER.clone()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HttpConfig {
    pub base_url: String,
    pub timeout_s: f64,
    /// Attempts per query, the first one included.
    pub max_attempts: u32,
    pub initial_backoff_ms: u64,
    pub max_backoff_ms: u64,
}

impl Default for HttpConfig {
    fn default() -> Self {
        HttpConfig {
            base_url: "https://opensky-network.org/api".into(),
            timeout_s: 20.0,
            max_attempts: 4,
            initial_backoff_ms: 500,
            max_backoff_ms: 8000,
        }
    }
}

impl HttpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_attempts == 0 {
            return Err(CruError::InvalidConfig("max_attempts must be at least 1".into()));
        }
        if !(self.timeout_s.is_finite() && self.timeout_s > 0.0) {
            return Err(CruError::InvalidConfig("timeout_s must be positive".into()));
        }
        Ok(())
    }

    /// Sleep before retry `attempt` (1-based): doubling from the initial
    /// backoff, capped.
    pub fn backoff(&self, attempt: u32) -> Duration {
        let factor = 1u64 << (attempt.saturating_sub(1)).min(20);
        Duration::from_millis(self.initial_backoff_ms.saturating_mul(factor).min(self.max_backoff_ms))
    }
}

/// `GET {base_url}/states/all` with `time`, `lamin`, `lamax`, `lomin`,
/// `lomax`. Returned states are stamped with the query timestamp.
pub struct HttpProvider {
    config: HttpConfig,
    credentials: Option<Credentials>,
    limiter: Arc<RateLimiter>,
    agent: ureq::Agent,
}

impl fmt::Debug for HttpProvider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HttpProvider")
            .field("config", &self.config)
            .field("credentials", &self.credentials)
            .finish_non_exhaustive()
    }
}

enum Attempt {
    Retry(String),
    Fail(CruError),
}

impl HttpProvider {
    pub fn new(config: HttpConfig, credentials: Option<Credentials>) -> Result<Self> {
        config.validate()?;
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs_f64(config.timeout_s)))
            .build()
            .new_agent();
        Ok(HttpProvider {
            config,
            credentials,
            limiter: global_limiter(),
            agent,
        })
    }

    pub fn with_limiter(mut self, limiter: Arc<RateLimiter>) -> Self {
        self.limiter = limiter;
        self
    }

    fn attempt(&self, query: &SurveillanceQuery) -> std::result::Result<String, Attempt> {
        let b = query.bbox();
        let url = format!("{}/states/all", self.config.base_url.trim_end_matches('/'));
        let mut req = self
            .agent
            .get(&url)
            .query("time", query.timestamp.to_string())
            .query("lamin", b.lamin.to_string())
            .query("lamax", b.lamax.to_string())
            .query("lomin", b.lomin.to_string())
            .query("lomax", b.lomax.to_string());
        if let Some(c) = &self.credentials {
            req = req.header("Authorization", c.header());
        }
        self.limiter.acquire();
        let mut resp = req.call().map_err(|e| Attempt::Retry(e.to_string()))?;
        let status = resp.status().as_u16();
        match status {
            200..=299 => resp
                .body_mut()
                .read_to_string()
                .map_err(|e| Attempt::Retry(format!("reading body: {e}"))),
            429 => Err(Attempt::Fail(CruError::QuotaExceeded)),
            500..=599 => Err(Attempt::Retry(format!("HTTP {status}"))),
            _ => Err(Attempt::Fail(CruError::ProviderUnavailable(format!(
                "HTTP {status} from {url}"
            )))),
        }
    }
}

/// Parses a `states/all` body: `states` is an array of positional arrays
/// (index 1 call-sign, 5 longitude, 6 latitude) or null.
pub fn parse_states_response(body: &str, time: i64) -> Result<Vec<StateVector>> {
    let v: Value = serde_json::from_str(body).map_err(|e| CruError::MalformedResponse(e.to_string()))?;
    let states = match v.get("states") {
        None | Some(Value::Null) => return Ok(Vec::new()),
        Some(Value::Array(a)) => a,
        Some(_) => return Err(CruError::MalformedResponse("`states` is not an array".into())),
    };
    states
        .iter()
        .map(|s| {
            let row = s
                .as_array()
                .ok_or_else(|| CruError::MalformedResponse("state vector is not an array".into()))?;
            Ok(StateVector {
                callsign: row.get(1).and_then(Value::as_str).map(str::to_string),
                lon: row.get(5).and_then(Value::as_f64),
                lat: row.get(6).and_then(Value::as_f64),
                time,
            })
        })
        .collect()
}

impl SurveillanceProvider for HttpProvider {
    fn states(&self, query: &SurveillanceQuery) -> Result<Vec<StateVector>> {
        let mut last = String::new();
        for attempt in 1..=self.config.max_attempts {
            match self.attempt(query) {
                Ok(body) => return parse_states_response(&body, query.timestamp),
                Err(Attempt::Fail(e)) => return Err(e),
                Err(Attempt::Retry(reason)) => {
                    log::warn!("surveillance request attempt {attempt} failed: {reason}");
                    last = reason;
                    if attempt < self.config.max_attempts {
                        std::thread::sleep(self.config.backoff(attempt));
                    }
                }
            }
        }
        Err(CruError::ProviderUnavailable(format!(
            "{} attempts failed, last: {last}",
            self.config.max_attempts
        )))
    }
}
