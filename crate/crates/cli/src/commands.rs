//! The command pipelines, independent of argument parsing.

use std::path::Path;

use osaas_core::diagnosis::{diagnose, recommend_carriers};
use osaas_core::line::open_session;
use osaas_core::probe::{crosstalk_scan, run_sweep};
use osaas_core::{CatalogEntry, MultiChannelBed, SweepResult};

use crate::error::{CliError, Result};
use crate::report::{CrosstalkReport, DiagnoseReport, RecommendReport, ReportHeader, SweepReport};
use crate::scenario_file::{
    load_catalog, load_scenario, parse_json, read_text, LoadedScenario, Overrides, ScenarioFile,
};

fn loaded(path: &Path, o: Overrides) -> Result<LoadedScenario> {
    let mut l = load_scenario(path)?;
    l.file.apply(o)?;
    Ok(l)
}

fn sweep_of(file: &ScenarioFile) -> Result<SweepResult> {
    let mut session = open_session(&file.scenario)?;
    Ok(run_sweep(&mut session, &file.sweep_plan())?)
}

pub fn cmd_validate(path: &Path) -> Result<ScenarioFile> {
    Ok(load_scenario(path)?.file)
}

pub fn cmd_sweep(path: &Path, o: Overrides) -> Result<SweepReport> {
    let l = loaded(path, o)?;
    let sweep = sweep_of(&l.file)?;
    Ok(SweepReport {
        header: ReportHeader::new("sweep", &l.sha256),
        config: l.file,
        sweep,
    })
}

fn diagnosis_of(
    header: ReportHeader,
    config: ScenarioFile,
    sweep: SweepResult,
    catalog: Vec<CatalogEntry>,
) -> Result<DiagnoseReport> {
    let diagnosis = diagnose(&sweep, &catalog, &config.diagnosis)?;
    Ok(DiagnoseReport {
        header,
        config,
        catalog,
        sweep,
        diagnosis,
    })
}

/// Diagnoses a fresh sweep of a scenario file.
pub fn cmd_diagnose(path: &Path, o: Overrides, catalog: Option<&Path>) -> Result<DiagnoseReport> {
    let l = loaded(path, o)?;
    let catalog = match catalog {
        Some(p) => load_catalog(p)?,
        None => l.file.catalog(),
    };
    let sweep = sweep_of(&l.file)?;
    diagnosis_of(
        ReportHeader::new("diagnose", &l.sha256),
        l.file,
        sweep,
        catalog,
    )
}

/// Diagnoses the sweep stored in an earlier sweep report.
pub fn cmd_diagnose_report(report: &Path, catalog: Option<&Path>) -> Result<DiagnoseReport> {
    let r: SweepReport = parse_json(&read_text(report)?, &report.display().to_string())?;
    r.config.validate()?;
    let catalog = match catalog {
        Some(p) => load_catalog(p)?,
        None => r.config.catalog(),
    };
    let header = ReportHeader::new("diagnose", &r.header.scenario_sha256);
    diagnosis_of(header, r.config, r.sweep, catalog)
}

pub fn cmd_crosstalk(path: &Path, o: Overrides) -> Result<CrosstalkReport> {
    let l = loaded(path, o)?;
    let file = &l.file;
    let settings = file.crosstalk.as_ref().ok_or_else(|| {
        CliError::validation("crosstalk: the scenario file has no `crosstalk` section")
    })?;
    let probe = |id: &str| file.probe(id).cloned().expect("validated probe reference");
    let bed = MultiChannelBed::new(file.scenario.clone())?;
    let offsets = file.crosstalk_offsets().expect("crosstalk section present");
    let scan = crosstalk_scan(
        &bed,
        &probe(&settings.center_probe),
        &probe(&settings.side_probe),
        &offsets,
        file.sweep.trials_per_point,
    )?;
    Ok(CrosstalkReport {
        header: ReportHeader::new("crosstalk", &l.sha256),
        config: l.file,
        scan,
    })
}

pub fn cmd_recommend(path: &Path, o: Overrides, catalog: Option<&Path>) -> Result<RecommendReport> {
    let l = loaded(path, o)?;
    let catalog = match catalog {
        Some(p) => load_catalog(p)?,
        None => l.file.catalog(),
    };
    let sweep = sweep_of(&l.file)?;
    let plan = recommend_carriers(
        &sweep,
        &catalog,
        l.file.diagnosis.plan_guard,
        &l.file.scenario.metric,
    )?;
    Ok(RecommendReport {
        header: ReportHeader::new("recommend", &l.sha256),
        config: l.file,
        catalog,
        plan,
    })
}
