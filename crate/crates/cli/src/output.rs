//! JSON and CSV rendering and atomic file output.

use std::io::{self, Write};
use std::path::Path;

use osaas_core::probe::Penalty;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::report::{CrosstalkReport, DiagnoseReport, RecommendReport, SweepReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)
        .map_err(|e| CliError::validation(format!("serialization: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::validation(format!("csv: {e}"));
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    w.into_inner()
        .map_err(|e| CliError::validation(format!("csv: {e}")))
}

/// One row per (probe, carrier).
pub fn sweep_csv(r: &SweepReport) -> Result<Vec<u8>> {
    let center = r.sweep.slot.center;
    let rows = r.sweep.curves.iter().flat_map(|c| {
        c.points.iter().map(move |p| {
            vec![
                c.probe.id().to_owned(),
                p.carrier.to_string(),
                (p.carrier - center).to_string(),
                opt(p.sample.value()),
                opt(p.q_db),
                p.sample.is_outage().to_string(),
            ]
        })
    });
    csv_bytes(
        &[
            "probe_id",
            "carrier_ghz",
            "offset_ghz",
            "gsnr_db",
            "q_db",
            "outage",
        ],
        rows,
    )
}

/// Per-probe penalty curves, one row per (probe, carrier).
pub fn diagnose_csv(r: &DiagnoseReport) -> Result<Vec<u8>> {
    let center = r.sweep.slot.center;
    let rows = r.diagnosis.per_probe_penalty_curves.iter().flat_map(|c| {
        c.points.iter().map(move |(f, pen)| {
            vec![
                c.probe_id.clone(),
                f.to_string(),
                (f - center).to_string(),
                opt(pen.value()),
                matches!(pen, Penalty::Outage).to_string(),
            ]
        })
    });
    csv_bytes(
        &[
            "probe_id",
            "carrier_ghz",
            "offset_ghz",
            "penalty_db",
            "outage",
        ],
        rows,
    )
}

/// One row per (offset, channel).
pub fn crosstalk_csv(r: &CrosstalkReport) -> Result<Vec<u8>> {
    let scan = &r.scan;
    let rows = scan.offsets.iter().enumerate().flat_map(|(i, off)| {
        scan.channels.iter().map(move |ch| {
            vec![
                off.to_string(),
                ch.index.to_string(),
                ch.probe_id.clone(),
                opt(ch.gsnr[i].value()),
                opt(ch.penalty[i].value()),
                matches!(ch.penalty[i], Penalty::Outage).to_string(),
            ]
        })
    });
    csv_bytes(
        &[
            "offset_ghz",
            "channel",
            "probe_id",
            "gsnr_db",
            "penalty_db",
            "outage",
        ],
        rows,
    )
}

/// One row per planned carrier.
pub fn recommend_csv(r: &RecommendReport) -> Result<Vec<u8>> {
    let rows = r.plan.carriers.iter().map(|c| {
        vec![
            c.center.to_string(),
            c.entry_id.clone(),
            c.symbol_rate.to_string(),
            c.net_data_rate.to_string(),
            c.occupied_width.to_string(),
            c.predicted_gsnr_db.to_string(),
            c.required_gsnr_db.to_string(),
            c.margin_db.to_string(),
        ]
    });
    csv_bytes(
        &[
            "center_ghz",
            "entry_id",
            "symbol_rate_gbd",
            "net_data_rate_gbps",
            "occupied_width_ghz",
            "predicted_gsnr_db",
            "required_gsnr_db",
            "margin_db",
        ],
        rows,
    )
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// or to stdout when no path is given.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    let Some(path) = path else {
        let mut out = io::stdout().lock();
        return out
            .write_all(bytes)
            .and_then(|()| out.flush())
            .map_err(|e| CliError::io("<stdout>", e));
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes)
        .and_then(|()| tmp.as_file().sync_all())
        .map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
