//! File formats.
//!
//! * Unitary: `{ "dim": M, "entries": [[re, im], ...] }`, row-major; an
//!   ensemble file is a JSON array of such objects.
//! * Distribution: `{ "M": .., "N": .., "entries": [{ "s": [..], "p": .. }, ..] }`
//!   with an optional `"config"` object, or CSV with columns `s0 .. s{M-1}, p`.
//! * Tables: JSON `{ "columns": [..], "rows": [[..], ..] }` or CSV.
//!
//! CSV files may start with `# config: {json}` lines, which readers skip.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::haar_unitary::UnitaryMatrix;
use crate::interference::{DistinguishabilityModel, OccupationVector, OutcomeDistribution};

const CONFIG_PREFIX: &str = "# config: ";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitaryFile {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl From<&UnitaryMatrix> for UnitaryFile {
    fn from(u: &UnitaryMatrix) -> Self {
        UnitaryFile {
            dim: u.dim(),
            entries: u.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl From<UnitaryMatrix> for UnitaryFile {
    fn from(u: UnitaryMatrix) -> Self {
        UnitaryFile::from(&u)
    }
}

impl TryFrom<UnitaryFile> for UnitaryMatrix {
    type Error = Error;

    fn try_from(f: UnitaryFile) -> Result<Self> {
        let entries = f
            .entries
            .iter()
            .map(|&[re, im]| num_complex::Complex64::new(re, im))
            .collect();
        UnitaryMatrix::new(f.dim, entries)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Reads one unitary object, an array of them, or an object whose
/// `"unitaries"` field is such an array.
pub fn read_unitaries(path: &Path) -> Result<Vec<UnitaryMatrix>> {
    parse_unitaries(&fs::read_to_string(path)?)
}

pub fn parse_unitaries(text: &str) -> Result<Vec<UnitaryMatrix>> {
    let value: Value = serde_json::from_str(text)?;
    let files: Vec<UnitaryFile> = match value {
        Value::Array(_) => serde_json::from_value(value)?,
        Value::Object(mut map) if map.contains_key("unitaries") => {
            serde_json::from_value(map.remove("unitaries").expect("checked"))?
        }
        other => vec![serde_json::from_value(other)?],
    };
    files.into_iter().map(UnitaryMatrix::try_from).collect()
}

pub fn read_gram(path: &Path) -> Result<DistinguishabilityModel> {
    read_json(path)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionEntry {
    pub s: OccupationVector,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionFile {
    #[serde(rename = "M")]
    pub modes: usize,
    #[serde(rename = "N")]
    pub photons: usize,
    pub entries: Vec<DistributionEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<Value>,
}

impl DistributionFile {
    pub fn new(dist: &OutcomeDistribution, config: Option<Value>) -> Self {
        DistributionFile {
            modes: dist.modes(),
            photons: dist.photons(),
            entries: dist
                .iter()
                .map(|(s, p)| DistributionEntry { s: s.clone(), p })
                .collect(),
            config,
        }
    }

    pub fn into_distribution(self) -> Result<OutcomeDistribution> {
        let entries = self.entries.into_iter().map(|e| (e.s, e.p)).collect();
        OutcomeDistribution::new(self.modes, self.photons, entries)
    }
}

pub fn distribution_to_json(dist: &OutcomeDistribution, config: Option<Value>) -> Result<String> {
    to_json_string(&DistributionFile::new(dist, config))
}

pub fn distribution_from_json(text: &str) -> Result<OutcomeDistribution> {
    serde_json::from_str::<DistributionFile>(text)?.into_distribution()
}

fn config_line(config: Option<&Value>) -> Result<String> {
    Ok(match config {
        Some(c) => format!("{CONFIG_PREFIX}{}\n", serde_json::to_string(c)?),
        None => String::new(),
    })
}

pub fn distribution_to_csv(dist: &OutcomeDistribution, config: Option<&Value>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (0..dist.modes()).map(|j| format!("s{j}")).collect();
    header.push("p".into());
    w.write_record(&header)?;
    for (s, p) in dist.iter() {
        let mut row: Vec<String> = s.counts().iter().map(|c| c.to_string()).collect();
        row.push(p.to_string());
        w.write_record(&row)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)
        .expect("csv output is utf-8");
    Ok(config_line(config)? + &body)
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
}

/// Reads columns `s0 .. s{M-1}` and `p`; other columns are ignored.
pub fn distribution_from_csv(text: &str) -> Result<OutcomeDistribution> {
    let mut r = csv_reader(text);
    let headers = r.headers()?.clone();
    let mut count_cols = Vec::new();
    for j in 0.. {
        match headers.iter().position(|h| h == format!("s{j}")) {
            Some(c) => count_cols.push(c),
            None => break,
        }
    }
    let p_col = headers.iter().position(|h| h == "p");
    let (modes, p_col) = match p_col {
        Some(p) if !count_cols.is_empty() => (count_cols.len(), p),
        _ => return Err(Error::invalid("distribution CSV needs columns s0..s{M-1} and p")),
    };
    let mut entries = Vec::new();
    for record in r.records() {
        let record = record?;
        let counts = count_cols
            .iter()
            .map(|&c| record[c].trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::invalid(format!("bad count in distribution CSV: {e}")))?;
        let p = record[p_col]
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::invalid(format!("bad probability in distribution CSV: {e}")))?;
        entries.push((OccupationVector::new(counts), p));
    }
    let photons = entries
        .first()
        .map(|(s, _)| s.total())
        .ok_or_else(|| Error::invalid("distribution CSV has no rows"))?;
    OutcomeDistribution::new(modes, photons, entries)
}

/// Reads the JSON config echoed in a CSV comment line, if any.
pub fn csv_config(text: &str) -> Result<Option<Value>> {
    match text.lines().find_map(|l| l.strip_prefix(CONFIG_PREFIX)) {
        Some(json) => Ok(Some(serde_json::from_str(json)?)),
        None => Ok(None),
    }
}

/// Column-labelled rows of numbers or strings.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, config: Option<&Value>) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell_text))?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)
            .expect("csv output is utf-8");
        Ok(config_line(config)? + &body)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv_reader(text);
        let mut table = Table::new(r.headers()?.iter());
        for record in r.records() {
            table.rows.push(record?.iter().map(parse_cell).collect());
        }
        Ok(table)
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn parse_cell(s: &str) -> Value {
    if s.is_empty() {
        return Value::Null;
    }
    match serde_json::from_str::<Value>(s) {
        Ok(v @ (Value::Number(_) | Value::Bool(_))) => v,
        _ => Value::String(s.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar_unitary::{sample_haar, RandomSeed};
    use crate::interference::{full_distribution, InputConfiguration, PhotonStatistics};
    use serde_json::json;

    fn sample_dist() -> OutcomeDistribution {
        let u = sample_haar(4, RandomSeed::new(3)).unwrap();
        full_distribution(&u, &InputConfiguration::first(3), &PhotonStatistics::Indistinguishable)
            .unwrap()
    }

    #[test]
    fn unitary_round_trip() {
        let us: Vec<UnitaryMatrix> =
            (0..3).map(|i| sample_haar(3, RandomSeed::new(i)).unwrap()).collect();
        let files: Vec<UnitaryFile> = us.iter().map(UnitaryFile::from).collect();
        let text = to_json_string(&files).unwrap();
        assert_eq!(parse_unitaries(&text).unwrap(), us);
        let one = to_json_string(&files[0]).unwrap();
        assert_eq!(parse_unitaries(&one).unwrap(), vec![us[0].clone()]);
    }

    #[test]
    fn non_unitary_file_rejected() {
        let text = r#"{"dim": 2, "entries": [[1,0],[1,0],[0,0],[1,0]]}"#;
        assert!(matches!(parse_unitaries(text), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn distribution_json_round_trip() {
        let d = sample_dist();
        let text = distribution_to_json(&d, Some(json!({"seed": 3}))).unwrap();
        assert_eq!(distribution_from_json(&text).unwrap(), d);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["M"], 4);
        assert_eq!(v["entries"].as_array().unwrap().len(), 20);
    }

    #[test]
    fn distribution_csv_ignores_extra_columns() {
        let text = "s0,s1,p,std_error\n1,0,0.25,0.1\n0,1,0.75,0.1\n";
        let d = distribution_from_csv(text).unwrap();
        assert_eq!(d.get(&OccupationVector::new(vec![0, 1])), 0.75);
        assert!(distribution_from_csv("a,b\n1,2\n").is_err());
    }

    #[test]
    fn distribution_csv_round_trip() {
        let d = sample_dist();
        let cfg = json!({"M": 4, "seed": 3});
        let text = distribution_to_csv(&d, Some(&cfg)).unwrap();
        assert!(text.starts_with("# config: "));
        assert_eq!(distribution_from_csv(&text).unwrap(), d);
        assert_eq!(csv_config(&text).unwrap(), Some(cfg));
    }

    #[test]
    fn table_round_trip() {
        let mut t = Table::new(["n", "label", "p"]);
        t.push(vec![json!(0), json!("indist"), json!(0.1)]);
        t.push(vec![json!(-3), json!("dist"), json!(1.0 / 3.0)]);
        let text = t.to_csv(None).unwrap();
        assert_eq!(Table::from_csv(&text).unwrap(), t);
        let j = to_json_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<Table>(&j).unwrap(), t);
    }

    #[test]
    fn gram_round_trip() {
        let g = DistinguishabilityModel::uniform_overlap(3, 0.4).unwrap();
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<DistinguishabilityModel>(&text).unwrap(), g);
        assert!(serde_json::from_str::<DistinguishabilityModel>(
            r#"{"dim": 2, "entries": [[1,0],[2,0],[2,0],[1,0]]}"#
        )
        .is_err());
    }
}
