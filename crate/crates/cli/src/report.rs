//! Report documents written by the commands. Each embeds the full
//! configuration it was computed from.

use osaas_core::diagnosis::{CarrierPlan, DiagnosisReport};
use osaas_core::{CatalogEntry, CrosstalkScan, SweepResult};
use serde::{Deserialize, Serialize};

use crate::scenario_file::ScenarioFile;

pub const TOOL_NAME: &str = "osaas";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportHeader {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// SHA-256 of the scenario file bytes.
    pub scenario_sha256: String,
}

impl ReportHeader {
    pub fn new(command: &str, scenario_sha256: &str) -> Self {
        Self {
            tool: TOOL_NAME.to_owned(),
            version: TOOL_VERSION.to_owned(),
            command: command.to_owned(),
            scenario_sha256: scenario_sha256.to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepReport {
    pub header: ReportHeader,
    /// Configuration after command-line overrides.
    pub config: ScenarioFile,
    pub sweep: SweepResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseReport {
    pub header: ReportHeader,
    pub config: ScenarioFile,
    pub catalog: Vec<CatalogEntry>,
    pub sweep: SweepResult,
    pub diagnosis: DiagnosisReport<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrosstalkReport {
    pub header: ReportHeader,
    pub config: ScenarioFile,
    pub scan: CrosstalkScan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecommendReport {
    pub header: ReportHeader,
    pub config: ScenarioFile,
    pub catalog: Vec<CatalogEntry>,
    pub plan: CarrierPlan<f64>,
}
