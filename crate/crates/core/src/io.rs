//! Cohort, feature matrix and catalog files.
//!
//! Cohorts are stored one JSON object per line. Feature matrices are CSV
//! with the catalog's feature names as header and a trailing `readmitted`
//! column holding `0`/`1`. Everything else (catalogs, profiles, models,
//! evaluation results) is pretty-printed JSON.

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cohort::{Cohort, Episode, NocOutcome, ShiftRecord, Timestamp};
use crate::error::{Error, Result};
use crate::features::{Dataset, FeatureCatalog, FeatureVector};

pub const LABEL_COLUMN: &str = "readmitted";

mod rfc3339 {
    use chrono::{DateTime, SecondsFormat};
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::cohort::Timestamp;

    pub fn serialize<S: Serializer>(t: &Timestamp, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&t.to_rfc3339_opts(SecondsFormat::AutoSi, false))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Timestamp, D::Error> {
        let text = String::deserialize(d)?;
        DateTime::parse_from_rfc3339(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShiftRow {
    #[serde(with = "rfc3339")]
    start_time: Timestamp,
    duration_hours: f64,
    nurse_experience_years: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PainControlRow {
    initial: u8,
    expected: u8,
    #[serde(rename = "final")]
    final_rating: u8,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EpisodeRow {
    episode_id: String,
    age_years: u32,
    #[serde(with = "rfc3339")]
    admission_time: Timestamp,
    #[serde(with = "rfc3339")]
    discharge_time: Timestamp,
    shifts: Vec<ShiftRow>,
    pain_control: PainControlRow,
    nanda_domains: Vec<crate::taxonomy::NandaDomain>,
    nanda_classes: Vec<crate::taxonomy::NandaClass>,
    nic_domains: Vec<crate::taxonomy::NicDomain>,
    nic_classes: Vec<crate::taxonomy::NicClass>,
    readmitted: bool,
}

impl From<&Episode> for EpisodeRow {
    fn from(e: &Episode) -> Self {
        EpisodeRow {
            episode_id: e.episode_id.clone(),
            age_years: e.age_years,
            admission_time: e.admission_time,
            discharge_time: e.discharge_time,
            shifts: e
                .shifts
                .iter()
                .map(|s| ShiftRow {
                    start_time: s.start_time,
                    duration_hours: s.duration_hours,
                    nurse_experience_years: s.nurse_experience_years,
                })
                .collect(),
            pain_control: PainControlRow {
                initial: e.pain_control.initial_rating,
                expected: e.pain_control.expected_rating,
                final_rating: e.pain_control.final_rating,
            },
            nanda_domains: e.nanda_domains.iter().copied().collect(),
            nanda_classes: e.nanda_classes.iter().copied().collect(),
            nic_domains: e.nic_domains.iter().copied().collect(),
            nic_classes: e.nic_classes.iter().copied().collect(),
            readmitted: e.readmitted,
        }
    }
}

fn unique_set<T: Ord + Copy + std::fmt::Display>(
    field: &str,
    items: Vec<T>,
) -> std::result::Result<BTreeSet<T>, String> {
    let mut set = BTreeSet::new();
    for item in items {
        if !set.insert(item) {
            return Err(format!("{field} lists {item} more than once"));
        }
    }
    Ok(set)
}

impl EpisodeRow {
    fn into_episode(self) -> std::result::Result<Episode, String> {
        Ok(Episode {
            episode_id: self.episode_id,
            age_years: self.age_years,
            admission_time: self.admission_time,
            discharge_time: self.discharge_time,
            shifts: self
                .shifts
                .into_iter()
                .map(|s| ShiftRecord {
                    start_time: s.start_time,
                    duration_hours: s.duration_hours,
                    nurse_experience_years: s.nurse_experience_years,
                })
                .collect(),
            pain_control: NocOutcome::pain_control(
                self.pain_control.initial,
                self.pain_control.expected,
                self.pain_control.final_rating,
            ),
            nanda_domains: unique_set("nanda_domains", self.nanda_domains)?,
            nanda_classes: unique_set("nanda_classes", self.nanda_classes)?,
            nic_domains: unique_set("nic_domains", self.nic_domains)?,
            nic_classes: unique_set("nic_classes", self.nic_classes)?,
            readmitted: self.readmitted,
        })
    }
}

/// Serializes one episode as a single-line JSON record.
pub fn episode_to_line(e: &Episode) -> String {
    serde_json::to_string(&EpisodeRow::from(e)).expect("episode records always serialize")
}

/// Parses one JSON record into an (unvalidated) episode.
pub fn episode_from_line(line: &str) -> std::result::Result<Episode, String> {
    let row: EpisodeRow = serde_json::from_str(line).map_err(|e| e.to_string())?;
    row.into_episode()
}

/// Reads a cohort file. Record order is preserved; every record must parse,
/// validate, and carry a unique id.
pub fn load_cohort(path: impl AsRef<Path>) -> Result<Cohort> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_cohort(BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn read_cohort(reader: impl BufRead) -> Result<Cohort> {
    let mut episodes = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io("<cohort>", e))?;
        if line.trim().is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "empty record".into(),
            });
        }
        let episode = episode_from_line(&line).map_err(|message| Error::Parse {
            line: line_no,
            message,
        })?;
        episodes.push(episode);
    }
    Cohort::new(episodes)
}

pub fn write_cohort(cohort: &Cohort, mut writer: impl Write) -> std::io::Result<()> {
    for e in cohort.episodes() {
        writer.write_all(episode_to_line(e).as_bytes())?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

pub fn save_cohort(cohort: &Cohort, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_cohort(cohort, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

/// Writes the feature matrix: header row of feature names plus
/// `readmitted`, then one row of tokens per vector.
pub fn write_feature_matrix(data: &Dataset, writer: impl Write) -> Result<()> {
    let to_err = |e: csv::Error| Error::MalformedMatrix(e.to_string());
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = data.catalog.names().collect();
    header.push(LABEL_COLUMN);
    w.write_record(&header).map_err(to_err)?;
    for (row, &label) in data.rows.iter().zip(&data.labels) {
        data.catalog.check(row)?;
        let mut cells = data.catalog.tokens(row);
        cells.push(if label { "1" } else { "0" });
        w.write_record(&cells).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::io("<matrix>", e))
}

pub fn save_feature_matrix(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_feature_matrix(data, BufWriter::new(file))
}

/// Reads a feature matrix. The catalog is rebuilt from the header, so every
/// column must name a known feature and every cell must be one of its tokens.
pub fn read_feature_matrix(reader: impl std::io::Read) -> Result<Dataset> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = r.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| Error::MalformedMatrix(e.to_string()))?,
        None => return Err(Error::MalformedMatrix("missing header row".into())),
    };
    let names: Vec<&str> = header.iter().collect();
    match names.last() {
        Some(&LABEL_COLUMN) => {}
        _ => {
            return Err(Error::MalformedMatrix(format!(
                "last header column must be {LABEL_COLUMN:?}"
            )))
        }
    }
    let catalog = FeatureCatalog::from_names(&names[..names.len() - 1])?;
    let width = names.len();

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| Error::MalformedMatrix(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != width {
            return Err(Error::WidthMismatch {
                line,
                expected: width,
                found: rec.len(),
            });
        }
        let mut codes = Vec::with_capacity(width - 1);
        for (feature, token) in catalog.features().iter().zip(rec.iter()) {
            let code = feature.code_of(token).ok_or_else(|| Error::UnknownToken {
                line,
                feature: feature.name.clone(),
                token: token.to_owned(),
            })?;
            codes.push(code);
        }
        let label = match &rec[width - 1] {
            "1" => true,
            "0" => false,
            other => {
                return Err(Error::UnknownToken {
                    line,
                    feature: LABEL_COLUMN.into(),
                    token: other.to_owned(),
                })
            }
        };
        rows.push(FeatureVector::new(codes));
        labels.push(label);
    }
    Dataset::new(catalog, rows, labels)
}

pub fn load_feature_matrix(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_feature_matrix(BufReader::new(file))
}

pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        message: format!("{}: {e}", path.display()),
    })
}

pub fn save_catalog(catalog: &FeatureCatalog, path: impl AsRef<Path>) -> Result<()> {
    write_json(catalog, path)
}

pub fn load_catalog(path: impl AsRef<Path>) -> Result<FeatureCatalog> {
    read_json(path)
}
