//! The JSON scenario file: a line scenario plus everything the commands
//! need to probe and diagnose it.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use osaas_core::diagnosis::DiagnosisOptions;
use osaas_core::formats::builtin_catalog;
use osaas_core::probe::{symmetric_offsets, DEFAULT_STEP_GHZ};
use osaas_core::{CatalogEntry, MediaChannel, ProbeConfig, Scenario, SweepPlan};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

fn default_step() -> f64 {
    DEFAULT_STEP_GHZ
}

fn default_trials() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSettings {
    /// Swept slot; the span of the scenario's media channels when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot: Option<MediaChannel>,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_trials")]
    pub trials_per_point: u32,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            slot: None,
            step: default_step(),
            trials_per_point: default_trials(),
        }
    }
}

/// Layout of a crosstalk scan over the scenario's media channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrosstalkSettings {
    /// Probe id for the swept middle slot.
    pub center_probe: String,
    /// Probe id for every other slot.
    pub side_probe: String,
    /// Carrier offsets in GHz; edge to edge of the middle slot in sweep steps when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offsets: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    /// Free text, e.g. which parameters are fitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub scenario: Scenario,
    pub probes: Vec<ProbeConfig>,
    #[serde(default)]
    pub sweep: SweepSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crosstalk: Option<CrosstalkSettings>,
    /// Deployable entries for the carrier plan; the built-in catalog when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<Vec<CatalogEntry>>,
    #[serde(default)]
    pub diagnosis: DiagnosisOptions<f64>,
}

/// Command-line overrides applied after loading.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub step: Option<f64>,
    pub trials: Option<u32>,
    pub seed: Option<u64>,
}

/// Parses JSON strictly. Errors name the field path and the position.
pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::validation(format!("{what}: at `{path}`: {inner}"))
    })?;
    de.end()
        .map_err(|e| CliError::validation(format!("{what}: {e}")))?;
    Ok(value)
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// A validated scenario file and the hash of the bytes it came from.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub file: ScenarioFile,
    pub sha256: String,
}

/// Reads, parses and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<LoadedScenario> {
    let text = read_text(path)?;
    let file: ScenarioFile = parse_json(&text, &path.display().to_string())?;
    file.validate()?;
    Ok(LoadedScenario {
        file,
        sha256: sha256_hex(text.as_bytes()),
    })
}

/// Reads a JSON list of catalog entries.
pub fn load_catalog(path: &Path) -> Result<Vec<CatalogEntry>> {
    let catalog: Vec<CatalogEntry> = parse_json(&read_text(path)?, &path.display().to_string())?;
    validate_catalog(&catalog)?;
    Ok(catalog)
}

fn validate_catalog(catalog: &[CatalogEntry]) -> Result<()> {
    if catalog.is_empty() {
        return Err(CliError::validation("catalog is empty"));
    }
    let mut seen = HashSet::new();
    for e in catalog {
        e.validate()?;
        if !seen.insert(e.id.as_str()) {
            return Err(CliError::validation(format!(
                "catalog: duplicate entry id `{}`",
                e.id
            )));
        }
    }
    Ok(())
}

fn in_context(ctx: &str, e: osaas_core::Error) -> CliError {
    CliError::validation(format!("{ctx}: {e}"))
}

impl ScenarioFile {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::validation(format!(
                "schema_version: expected {SCHEMA_VERSION}, got {}",
                self.schema_version
            )));
        }
        self.scenario
            .validate()
            .map_err(|e| in_context("scenario", e))?;

        if self.probes.is_empty() {
            return Err(CliError::validation(
                "probes: at least one probe is required",
            ));
        }
        let mut ids = HashSet::new();
        for (i, p) in self.probes.iter().enumerate() {
            p.validate()
                .map_err(|e| in_context(&format!("probes[{i}]"), e))?;
            if !ids.insert(p.id()) {
                return Err(CliError::validation(format!(
                    "probes[{i}]: duplicate probe id `{}`",
                    p.id()
                )));
            }
        }

        let span = self.scenario.span();
        if let Some(slot) = &self.sweep.slot {
            slot.validate().map_err(|e| in_context("sweep.slot", e))?;
            if !(span.contains(slot.start()) && span.contains(slot.end())) {
                return Err(CliError::validation(format!(
                    "sweep.slot [{}, {}] must lie inside the media channels [{}, {}]",
                    slot.start(),
                    slot.end(),
                    span.start(),
                    span.end()
                )));
            }
        }
        self.sweep_plan()
            .validate()
            .map_err(|e| in_context("sweep", e))?;

        if let Some(x) = &self.crosstalk {
            for (field, id) in [
                ("center_probe", &x.center_probe),
                ("side_probe", &x.side_probe),
            ] {
                if !ids.contains(id.as_str()) {
                    return Err(CliError::validation(format!(
                        "crosstalk.{field}: no probe with id `{id}`"
                    )));
                }
            }
            let n = self.scenario.media_channels.len();
            if n < 3 || n.is_multiple_of(2) {
                return Err(CliError::validation(format!(
                    "crosstalk: needs an odd number (>= 3) of media channels, scenario has {n}"
                )));
            }
            let offsets = self.crosstalk_offsets().unwrap_or_default();
            if offsets.is_empty() {
                return Err(CliError::validation("crosstalk.offsets: must not be empty"));
            }
            let half = self.middle_slot().width / 2.0;
            if let Some(o) = offsets.iter().find(|o| !(o.abs() <= half)) {
                return Err(CliError::validation(format!(
                    "crosstalk.offsets: {o} GHz exceeds the middle slot half-width {half} GHz"
                )));
            }
        }

        if let Some(c) = &self.catalog {
            validate_catalog(c).map_err(|e| CliError::validation(format!("catalog: {e}")))?;
        }

        let d = &self.diagnosis;
        let checks = [
            ("penalty_threshold_db", d.penalty_threshold_db > 0.0),
            (
                "plan_guard",
                d.plan_guard >= 0.0 && d.plan_guard.is_finite(),
            ),
            ("guard_max_penalty_db", d.guard_max_penalty_db > 0.0),
            (
                "guard_link_gsnr_db",
                d.guard_link_gsnr_db.is_none_or(f64::is_finite),
            ),
            ("pre_emphasis_clip_db", d.pre_emphasis_clip_db >= 0.0),
        ];
        if let Some((name, _)) = checks.iter().find(|(_, ok)| !ok) {
            return Err(CliError::validation(format!(
                "diagnosis.{name}: out of range"
            )));
        }
        if d.metric != self.scenario.metric {
            return Err(CliError::validation(
                "diagnosis.metric must match scenario.metric (the recommender uses the line's thresholds)",
            ));
        }
        Ok(())
    }

    pub fn apply(&mut self, o: Overrides) -> Result<()> {
        if let Some(step) = o.step {
            self.sweep.step = step;
        }
        if let Some(trials) = o.trials {
            self.sweep.trials_per_point = trials;
        }
        if let Some(seed) = o.seed {
            self.scenario.seed = seed;
        }
        self.validate()
    }

    pub fn sweep_plan(&self) -> SweepPlan {
        SweepPlan {
            slot: self.sweep.slot.unwrap_or_else(|| self.scenario.span()),
            probes: self.probes.clone(),
            step: self.sweep.step,
            trials_per_point: self.sweep.trials_per_point,
        }
    }

    pub fn catalog(&self) -> Vec<CatalogEntry> {
        self.catalog.clone().unwrap_or_else(builtin_catalog)
    }

    pub fn probe(&self, id: &str) -> Option<&ProbeConfig> {
        self.probes.iter().find(|p| p.id() == id)
    }

    fn middle_slot(&self) -> MediaChannel {
        let mut slots = self.scenario.media_channels.clone();
        slots.sort_by(|a, b| a.center.total_cmp(&b.center));
        slots[slots.len() / 2]
    }

    /// Offsets of the crosstalk scan, if one is configured.
    pub fn crosstalk_offsets(&self) -> Option<Vec<f64>> {
        let x = self.crosstalk.as_ref()?;
        Some(
            x.offsets
                .clone()
                .unwrap_or_else(|| symmetric_offsets(self.middle_slot().width, self.sweep.step)),
        )
    }
}
