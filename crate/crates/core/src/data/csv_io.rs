//! Voyage CSV (`voyage/1`): knots, degrees and kilowatts on disk, SI inside.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};

use crate::domain::{EnvironmentState, VoyageRecord};
use crate::error::{Error, Result};
use crate::units::{deg_to_rad, knots_to_ms, ms_to_knots, rad_to_deg, wrap_two_pi};

pub const VOYAGE_SCHEMA: &str = "voyage/1";

pub const REQUIRED_COLUMNS: [&str; 13] = [
    "timestamp",
    "stw_kn",
    "sog_kn",
    "heading_deg",
    "draft_aft_m",
    "draft_fwd_m",
    "displacement_t",
    "wind_speed_rel_kn",
    "wind_dir_rel_deg",
    "sig_wave_height_m",
    "wave_peak_period_s",
    "wave_dir_rel_deg",
    "brake_power_kw",
];

pub const OPTIONAL_COLUMNS: [&str; 3] = ["water_density", "air_density", "water_depth_m"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    /// 1-based data row (the header is row 0).
    pub row: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RejectionReport {
    pub rejections: Vec<Rejection>,
}

impl RejectionReport {
    pub fn is_empty(&self) -> bool {
        self.rejections.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rejections.len()
    }
}

impl fmt::Display for RejectionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rejections {
            writeln!(f, "row {}: {}", r.row, r.reason)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ingested {
    pub records: Vec<VoyageRecord>,
    pub report: RejectionReport,
}

struct Columns {
    index: HashMap<String, usize>,
}

impl Columns {
    fn get<'a>(&self, row: &'a csv::StringRecord, name: &str) -> Option<&'a str> {
        self.index
            .get(name)
            .and_then(|&i| row.get(i))
            .map(str::trim)
    }

    fn number(&self, row: &csv::StringRecord, name: &str) -> std::result::Result<f64, String> {
        let raw = self
            .get(row, name)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| format!("missing {name}"))?;
        let x: f64 = raw
            .parse()
            .map_err(|_| format!("{name} is not a number ({raw:?})"))?;
        if !x.is_finite() {
            return Err(format!("{name} is not finite"));
        }
        Ok(x)
    }

    fn optional(
        &self,
        row: &csv::StringRecord,
        name: &str,
    ) -> std::result::Result<Option<f64>, String> {
        match self.get(row, name) {
            None | Some("") => Ok(None),
            Some(_) => self.number(row, name).map(Some),
        }
    }
}

fn parse_row(cols: &Columns, row: &csv::StringRecord) -> std::result::Result<VoyageRecord, String> {
    let ts = cols
        .get(row, "timestamp")
        .filter(|s| !s.is_empty())
        .ok_or("missing timestamp")?;
    let timestamp = DateTime::parse_from_rfc3339(ts)
        .map_err(|e| format!("bad timestamp {ts:?}: {e}"))?
        .with_timezone(&Utc);
    let n = |name| cols.number(row, name);
    let stw_kn = n("stw_kn")?;
    let sog_kn = n("sog_kn")?;
    let heading = n("heading_deg")?;
    let draft_aft = n("draft_aft_m")?;
    let draft_fwd = n("draft_fwd_m")?;
    let displacement = n("displacement_t")?;
    let wind_kn = n("wind_speed_rel_kn")?;
    let wind_dir = n("wind_dir_rel_deg")?;
    let h_s = n("sig_wave_height_m")?;
    let t_p = n("wave_peak_period_s")?;
    let wave_dir = n("wave_dir_rel_deg")?;
    let power_kw = n("brake_power_kw")?;
    let water_density = cols.optional(row, "water_density")?;
    let air_density = cols.optional(row, "air_density")?;
    let water_depth = cols.optional(row, "water_depth_m")?;

    let checks = [
        (stw_kn < 0.0, "stw < 0"),
        (sog_kn < 0.0, "sog < 0"),
        (draft_aft <= 0.0, "draft_aft <= 0"),
        (draft_fwd <= 0.0, "draft_fwd <= 0"),
        (displacement <= 0.0, "displacement <= 0"),
        (wind_kn < 0.0, "wind_speed_rel < 0"),
        (h_s < 0.0, "sig_wave_height < 0"),
        (t_p <= 0.0, "wave_peak_period <= 0"),
        (power_kw < 0.0, "brake_power < 0"),
        (
            water_density.is_some_and(|d| d <= 0.0),
            "water_density <= 0",
        ),
        (air_density.is_some_and(|d| d <= 0.0), "air_density <= 0"),
        (water_depth.is_some_and(|d| d <= 0.0), "water_depth <= 0"),
    ];
    if let Some((_, reason)) = checks.iter().find(|(bad, _)| *bad) {
        return Err(reason.to_string());
    }

    let mut environment = EnvironmentState::new(
        knots_to_ms(wind_kn),
        deg_to_rad(wind_dir),
        h_s,
        t_p,
        deg_to_rad(wave_dir),
    );
    if let Some(d) = water_density {
        environment.water_density = d;
    }
    if let Some(d) = air_density {
        environment.air_density = d;
    }
    Ok(VoyageRecord {
        timestamp,
        stw: knots_to_ms(stw_kn),
        sog: knots_to_ms(sog_kn),
        heading: wrap_two_pi(deg_to_rad(heading)),
        draft_aft,
        draft_fwd,
        displacement,
        environment,
        brake_power: power_kw * 1000.0,
        water_depth,
    })
}

/// Parses a voyage CSV. Rows that fail to parse or violate physical bounds
/// are collected in the report instead of aborting the read.
pub fn read_csv(reader: impl Read) -> Result<Ingested> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let index: HashMap<String, usize> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| (h.trim().to_string(), i))
        .collect();
    let missing: Vec<&str> = REQUIRED_COLUMNS
        .iter()
        .copied()
        .filter(|c| !index.contains_key(*c))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Schema(format!(
            "voyage CSV is missing columns: {}",
            missing.join(", ")
        )));
    }
    let cols = Columns { index };
    let mut out = Ingested::default();
    for (i, row) in rdr.records().enumerate() {
        let row_no = i + 1;
        match row
            .map_err(|e| e.to_string())
            .and_then(|r| parse_row(&cols, &r))
        {
            Ok(rec) => out.records.push(rec),
            Err(reason) => out.report.rejections.push(Rejection {
                row: row_no,
                reason,
            }),
        }
    }
    Ok(out)
}

pub fn ingest_csv(path: impl AsRef<Path>) -> Result<Ingested> {
    read_csv(std::fs::File::open(path)?)
}

fn timestamp_text(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

/// Writes records in the `voyage/1` layout. Densities are always written;
/// the depth column is left empty for records without a depth.
pub fn write_csv(writer: impl Write, records: &[VoyageRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let header: Vec<&str> = REQUIRED_COLUMNS
        .iter()
        .chain(OPTIONAL_COLUMNS.iter())
        .copied()
        .collect();
    w.write_record(&header)?;
    for r in records {
        let e = &r.environment;
        let mut row = vec![
            timestamp_text(&r.timestamp),
            ms_to_knots(r.stw).to_string(),
            ms_to_knots(r.sog).to_string(),
            rad_to_deg(r.heading).to_string(),
            r.draft_aft.to_string(),
            r.draft_fwd.to_string(),
            r.displacement.to_string(),
            ms_to_knots(e.wind_speed_rel).to_string(),
            rad_to_deg(e.wind_dir_rel).to_string(),
            e.sig_wave_height.to_string(),
            e.wave_peak_period.to_string(),
            rad_to_deg(e.wave_dir_rel).to_string(),
            (r.brake_power / 1000.0).to_string(),
            e.water_density.to_string(),
            e.air_density.to_string(),
        ];
        row.push(r.water_depth.map(|d| d.to_string()).unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(path: impl AsRef<Path>, records: &[VoyageRecord]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(std::io::BufWriter::new(file), records)
}
