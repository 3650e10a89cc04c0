//! CSV and JSON result files.
//!
//! CSV has one row per (series, step) with columns `step, mean_regret,
//! stderr, label`. JSON holds the same series together with the configs that
//! produced them. Floats are written in shortest round-trip form, so reading
//! either file back reproduces the aggregates exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::regret::Aggregate;
use crate::error::{Error, Result};

pub const RESULT_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::invalid(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ExperimentConfig>,
    pub aggregate: Aggregate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultSet {
    pub v: u32,
    pub name: String,
    pub series: Vec<Series>,
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    step: u64,
    mean_regret: f64,
    stderr: f64,
    label: String,
}

impl ResultSet {
    pub fn new(name: impl Into<String>, series: Vec<Series>) -> Self {
        Self {
            v: RESULT_FORMAT_VERSION,
            name: name.into(),
            series,
        }
    }

    pub fn export(&self, path: impl AsRef<Path>, format: Format) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        match format {
            Format::Csv => self.write_csv(file).map_err(|e| csv_error(path, e)),
            Format::Json => {
                let mut out = BufWriter::new(file);
                serde_json::to_writer_pretty(&mut out, self).map_err(|e| Error::json(path, e))?;
                out.write_all(b"\n").and_then(|_| out.flush()).map_err(|e| Error::io(path, e))
            }
        }
    }

    /// Writes the CSV form to any sink.
    pub fn write_csv<W: Write>(&self, sink: W) -> std::result::Result<(), csv::Error> {
        let mut writer = csv::Writer::from_writer(sink);
        if self.series.iter().all(|s| s.aggregate.is_empty()) {
            writer.write_record(["step", "mean_regret", "stderr", "label"])?;
        }
        for s in &self.series {
            for (i, (&mean, &se)) in s.aggregate.mean.iter().zip(&s.aggregate.stderr).enumerate() {
                writer.serialize(CsvRow {
                    step: i as u64 + 1,
                    mean_regret: mean,
                    stderr: se,
                    label: s.label.clone(),
                })?;
            }
        }
        writer.flush()?;
        Ok(())
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let set: ResultSet = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
        if set.v != RESULT_FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(set.v));
        }
        Ok(set)
    }

    /// Reads a CSV export. Configs are not part of the CSV form and come back
    /// as `None`; run counts come back as 0.
    pub fn load_csv(path: impl AsRef<Path>, name: impl Into<String>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
        let mut series: Vec<Series> = Vec::new();
        for row in reader.deserialize::<CsvRow>() {
            let row = row.map_err(|e| csv_error(path, e))?;
            if series.last().is_none_or(|s| s.label != row.label) {
                series.push(Series {
                    label: row.label.clone(),
                    config: None,
                    aggregate: Aggregate::default(),
                });
            }
            let agg = &mut series.last_mut().expect("pushed above").aggregate;
            agg.mean.push(row.mean_regret);
            agg.stderr.push(row.stderr);
        }
        Ok(ResultSet::new(name, series))
    }
}

fn csv_error(path: &Path, source: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::config::InstanceSpec;
    use crate::agents::AgentConfig;

    fn sample() -> ResultSet {
        let config = ExperimentConfig::new(
            InstanceSpec::Fixed2x2 { observabilities: None },
            vec![AgentConfig::pa_leader(0.025, 1), AgentConfig::pa_follower(0.025, 25)],
            3,
        );
        ResultSet::new(
            "demo",
            vec![
                Series {
                    label: "a".into(),
                    config: Some(config),
                    aggregate: Aggregate {
                        runs: 2,
                        mean: vec![0.1, 0.1 + 0.2, 1.0 / 3.0],
                        stderr: vec![0.0, 1e-17, 2.5],
                    },
                },
                Series {
                    label: "b, quoted".into(),
                    config: None,
                    aggregate: Aggregate {
                        runs: 2,
                        mean: vec![f64::MIN_POSITIVE, 7.0, 123456.789],
                        stderr: vec![0.3, 0.0, 0.1],
                    },
                },
            ],
        )
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let set = sample();
        set.export(&path, Format::Json).unwrap();
        assert_eq!(ResultSet::load_json(&path).unwrap(), set);
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let set = sample();
        set.export(&path, Format::Csv).unwrap();
        let back = ResultSet::load_csv(&path, "demo").unwrap();
        for (a, b) in set.series.iter().zip(&back.series) {
            assert_eq!(a.label, b.label);
            assert_eq!(a.aggregate.mean, b.aggregate.mean);
            assert_eq!(a.aggregate.stderr, b.aggregate.stderr);
        }
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("step,mean_regret,stderr,label\n"));
        assert_eq!(text.lines().count(), 7);
    }

    #[test]
    fn empty_result_is_header_only() {
        let mut buf = Vec::new();
        ResultSet::new("empty", vec![]).write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "step,mean_regret,stderr,label\n");
    }

    #[test]
    fn io_errors_carry_path() {
        let err = sample().export("/nonexistent/dir/r.csv", Format::Csv).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/r.csv"));
    }

    #[test]
    fn format_parsing() {
        assert_eq!("CSV".parse::<Format>().unwrap(), Format::Csv);
        assert!("xml".parse::<Format>().is_err());
    }
}
