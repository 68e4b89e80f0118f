//! Run configuration file and the manifest written next to every output.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::augment::AugmentConfig;
use crate::error::{CruError, Result};
use crate::matcher::MatchConfig;
use crate::osn::{HttpConfig, DEFAULT_RADIUS_KM, DEFAULT_WINDOW_S};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FetchConfig {
    pub radius_km: f64,
    pub window_s: u64,
    pub http: HttpConfig,
}

impl Default for FetchConfig {
    fn default() -> Self {
        FetchConfig {
            radius_km: DEFAULT_RADIUS_KM,
            window_s: DEFAULT_WINDOW_S,
            http: HttpConfig::default(),
        }
    }
}

/// Everything a subcommand can be configured with. Field names mirror the
/// library config structs; command-line flags override file values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub augment: AugmentConfig,
    pub matcher: MatchConfig,
    pub fetch: FetchConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CruError::InvalidConfig(e.to_string()))
    }

    /// Reads a TOML config, or the `config` of a JSON run manifest.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| CruError::io(path, e))?;
        if path.extension().is_some_and(|e| e == "json") {
            let manifest: RunManifest =
                serde_json::from_str(&text).map_err(|e| CruError::InvalidConfig(format!("{}: {e}", path.display())))?;
            let mut cfg = manifest.config;
            cfg.seed = cfg.seed.or(manifest.seed);
            return Ok(cfg);
        }
        Self::from_toml(&text).map_err(|e| match e {
            CruError::InvalidConfig(m) => CruError::InvalidConfig(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.augment.validate()?;
        self.matcher.validate()?;
        self.fetch.http.validate()
    }
}

pub fn unix_millis() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Provenance record serialized alongside an output artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub seed: Option<u64>,
    pub config: RunConfig,
    /// Subcommand options that are not part of the config file.
    #[serde(default)]
    pub options: serde_json::Map<String, serde_json::Value>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub started_at_ms: u64,
    pub finished_at_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realized_wer: Option<f64>,
}

impl RunManifest {
    pub fn new(subcommand: &str, config: RunConfig) -> Self {
        RunManifest {
            tool: "cru".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: subcommand.into(),
            seed: config.seed,
            config,
            options: serde_json::Map::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            started_at_ms: unix_millis(),
            finished_at_ms: 0,
            realized_wer: None,
        }
    }

    pub fn option(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("option serializes");
        self.options.insert(key.into(), v);
    }

    /// `<artifact>.manifest.json`
    pub fn path_for(artifact: &Path) -> PathBuf {
        let mut name = artifact.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| CruError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Stamps the finish time and writes the manifest next to `artifact`.
    pub fn write_for(&mut self, artifact: &Path) -> Result<PathBuf> {
        self.finished_at_ms = unix_millis();
        let path = Self::path_for(artifact);
        let text = serde_json::to_string_pretty(self)? + "\n";
        std::fs::write(&path, text).map_err(|e| CruError::io(&path, e))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spoken::VariantKind;

    #[test]
    fn toml_with_nesting_and_defaults() {
        let cfg = RunConfig::from_toml(
            r#"
seed = 42

[augment]
size = 100
variant_distribution = { full = 0.9, grouped_number = 0.1 }

[augment.surveillance]
size_mean = 10.0

[augment.noise]
target_wer = 7.0

[matcher]
threshold = 0.6
kinds = ["full"]
"#,
        )
        .unwrap();
        assert_eq!(cfg.seed, Some(42));
        assert_eq!(cfg.augment.size, Some(100));
        assert_eq!(cfg.augment.variant_distribution[&VariantKind::GroupedNumber], 0.1);
        assert_eq!(cfg.augment.surveillance.size_mean, 10.0);
        assert_eq!(cfg.augment.surveillance.identifier_dup_rate, 1.45);
        assert_eq!(cfg.augment.noise.as_ref().unwrap().target_wer, Some(7.0));
        assert_eq!(cfg.matcher.threshold, 0.6);
        assert_eq!(cfg.matcher.kinds, vec![VariantKind::Full]);
        assert_eq!(cfg.fetch.radius_km, DEFAULT_RADIUS_KM);
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_toml("sed = 1").is_err());
        assert!(RunConfig::from_toml("[matcher]\nthreshhold = 0.2").is_err());
    }

    #[test]
    fn manifest_round_trip_as_config() {
        let dir = tempfile::tempdir().unwrap();
        let artifact = dir.path().join("corpus.jsonl");
        let mut cfg = RunConfig {
            seed: Some(9),
            ..Default::default()
        };
        cfg.augment.set_target_wer(30.0);
        let mut m = RunManifest::new("augment", cfg.clone());
        m.option("size", 10);
        let path = m.write_for(&artifact).unwrap();
        assert_eq!(path, dir.path().join("corpus.jsonl.manifest.json"));
        let back = RunConfig::load(&path).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(RunManifest::read(&path).unwrap().options["size"], 10);
    }
}
