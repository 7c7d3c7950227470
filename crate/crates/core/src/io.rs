//! File schemas for functions, measures and reports.
//!
//! All files are JSON objects tagged with `format` and `schema_version`.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::function::SampledFunction;
use crate::functionals::{DistanceProfile, ThresholdEstimate};
use crate::generate::Kind;
use crate::measures::GridMeasure;
use crate::verification::{BdgReport, ConsistencyReport, PredecessorReport, RatioReport};

pub const SCHEMA_VERSION: u32 = 1;
pub const FUNCTION_FORMAT: &str = "zygdist-function";
pub const MEASURE_FORMAT: &str = "zygdist-measure";
pub const REPORT_FORMAT: &str = "zygdist-report";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<Kind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_oracle: Option<f64>,
}

impl Metadata {
    pub fn generated(kind: &Kind, seed: u64) -> Self {
        let (classification, oracle) = kind.classification();
        Self {
            generator: Some(kind.clone()),
            seed: Some(seed),
            classification: Some(classification.to_string()),
            distance_oracle: oracle,
        }
    }
}

fn check_header(format: &str, version: u32, expected: &str) -> Result<()> {
    if format != expected {
        return Err(Error::Input(format!(
            "format: expected \"{expected}\", found \"{format}\""
        )));
    }
    if version != SCHEMA_VERSION {
        return Err(Error::Input(format!(
            "schema_version: expected {SCHEMA_VERSION}, found {version}"
        )));
    }
    Ok(())
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed file: {e}")))
}

fn render<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serialisable");
    text.push('\n');
    text
}

/// `2^depth + 1` samples of a function on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionFile {
    pub format: String,
    pub schema_version: u32,
    pub depth: u32,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

impl FunctionFile {
    pub fn new(f: &SampledFunction<f64>, metadata: Option<Metadata>) -> Self {
        Self {
            format: FUNCTION_FORMAT.to_string(),
            schema_version: SCHEMA_VERSION,
            depth: f.depth(),
            values: f.values().to_vec(),
            metadata,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: Self = parse(text)?;
        file.validate()?;
        Ok(file)
    }

    pub fn validate(&self) -> Result<()> {
        check_header(&self.format, self.schema_version, FUNCTION_FORMAT)?;
        if self.depth < 1 || self.depth > 24 {
            return Err(Error::Input(format!("depth: {} is outside 1..=24", self.depth)));
        }
        let expected = (1usize << self.depth) + 1;
        if self.values.len() != expected {
            return Err(Error::Input(format!(
                "values: length must be 2^depth + 1 = {expected}, found {}",
                self.values.len()
            )));
        }
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!("values: entry {i} is not finite")));
        }
        Ok(())
    }

    pub fn to_function(&self) -> Result<SampledFunction<f64>> {
        self.validate()?;
        SampledFunction::new(self.depth, self.values.clone())
    }

    pub fn render(&self) -> String {
        render(self)
    }
}

/// Cell masses of a measure on `[0, 1)^dim`, row-major with axis 0 slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub format: String,
    pub schema_version: u32,
    pub dim: u32,
    pub depth: u32,
    pub masses: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

impl MeasureFile {
    pub fn new(mu: &GridMeasure<f64>, metadata: Option<Metadata>) -> Self {
        Self {
            format: MEASURE_FORMAT.to_string(),
            schema_version: SCHEMA_VERSION,
            dim: mu.dim(),
            depth: mu.depth(),
            masses: mu.masses().to_vec(),
            metadata,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: Self = parse(text)?;
        file.validate()?;
        Ok(file)
    }

    pub fn validate(&self) -> Result<()> {
        check_header(&self.format, self.schema_version, MEASURE_FORMAT)?;
        if self.dim < 1 || self.dim > 4 {
            return Err(Error::Input(format!("dim: {} is outside 1..=4", self.dim)));
        }
        if self.depth < 1 || self.dim * (self.depth + 1) > 26 {
            return Err(Error::Input(format!(
                "depth: {} is too fine for dimension {}",
                self.depth, self.dim
            )));
        }
        let expected = 1usize << (self.dim * self.depth);
        if self.masses.len() != expected {
            return Err(Error::Input(format!(
                "masses: length must be 2^(dim depth) = {expected}, found {}",
                self.masses.len()
            )));
        }
        if let Some(i) = self.masses.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!("masses: entry {i} is not finite")));
        }
        Ok(())
    }

    pub fn to_measure(&self) -> Result<GridMeasure<f64>> {
        self.validate()?;
        GridMeasure::new(self.dim, self.depth, self.masses.clone())
    }

    pub fn render(&self) -> String {
        render(self)
    }
}

/// Either kind of input file, told apart by its `format` tag.
#[derive(Debug, Clone, PartialEq)]
pub enum InputFile {
    Function(FunctionFile),
    Measure(MeasureFile),
}

impl InputFile {
    pub fn parse(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            format: Option<String>,
        }
        let header: Header = parse(text)?;
        match header.format.as_deref() {
            Some(FUNCTION_FORMAT) => FunctionFile::parse(text).map(InputFile::Function),
            Some(MEASURE_FORMAT) => MeasureFile::parse(text).map(InputFile::Measure),
            Some(other) => Err(Error::Input(format!("format: unknown tag \"{other}\""))),
            None => Err(Error::Input("format: missing".to_string())),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: &str, bytes: &[u8]) -> Self {
        Self {
            path: path.to_string(),
            sha256: sha256_hex(bytes),
        }
    }
}

/// How a number in a report was obtained.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Method {
    pub estimator: String,
    pub grid: String,
    pub depths: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

impl Method {
    pub fn new(estimator: &str, grid: &str, depths: &[u32]) -> Self {
        Self {
            estimator: estimator.to_string(),
            grid: grid.to_string(),
            depths: depths.to_vec(),
            tau: None,
        }
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = Some(tau);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub quantity: String,
    pub value: f64,
    pub method: Method,
}

impl Estimate {
    pub fn new(quantity: &str, value: f64, method: Method) -> Self {
        Self {
            quantity: quantity.to_string(),
            value,
            method,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TidyRow {
    pub epsilon: f64,
    pub depth: u32,
    pub value: f64,
}

/// A distance profile as a tidy `(epsilon, depth, value)` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileTable {
    pub functional: String,
    pub note: String,
    pub rows: Vec<TidyRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<ThresholdEstimate>,
}

impl From<&DistanceProfile> for ProfileTable {
    fn from(profile: &DistanceProfile) -> Self {
        let rows = profile
            .epsilons
            .iter()
            .zip(&profile.values)
            .flat_map(|(&epsilon, row)| {
                profile
                    .depths
                    .iter()
                    .zip(row)
                    .map(move |(&depth, &value)| TidyRow {
                        epsilon,
                        depth,
                        value,
                    })
            })
            .collect();
        Self {
            functional: profile.functional.clone(),
            note: profile.note.clone(),
            rows,
            estimate: profile.estimate.clone(),
        }
    }
}

impl ProfileTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("functional,epsilon,depth,value\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.functional, r.epsilon, r.depth, r.value
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verification {
    Ratio(RatioReport),
    Predecessor(PredecessorReport),
    Bdg(BdgReport),
    Consistency(ConsistencyReport),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Inconclusive,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub format: String,
    pub schema_version: u32,
    pub command: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputDigest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub status: Status,
    pub estimates: Vec<Estimate>,
    pub profiles: Vec<ProfileTable>,
    pub checks: Vec<Check>,
    pub verification: Vec<Verification>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

impl Report {
    pub fn new(command: Vec<String>) -> Self {
        Self {
            format: REPORT_FORMAT.to_string(),
            schema_version: SCHEMA_VERSION,
            command,
            input: None,
            seed: None,
            status: Status::Ok,
            estimates: Vec::new(),
            profiles: Vec::new(),
            checks: Vec::new(),
            verification: Vec::new(),
            wall_time_seconds: None,
        }
    }

    pub fn estimate(&mut self, quantity: &str, value: f64, method: Method) {
        self.estimates.push(Estimate::new(quantity, value, method));
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        if !passed {
            self.status = Status::Failed;
        }
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn parse(text: &str) -> Result<Self> {
        let report: Self = parse(text)?;
        check_header(&report.format, report.schema_version, REPORT_FORMAT)?;
        Ok(report)
    }

    pub fn render(&self) -> String {
        render(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    #[test]
    fn function_roundtrip() {
        let f = generate::hat::<f64>(3).unwrap();
        let kind = Kind::Hat;
        let file = FunctionFile::new(&f, Some(Metadata::generated(&kind, 0)));
        let text = file.render();
        let back = FunctionFile::parse(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_function().unwrap(), f);
        assert!(matches!(InputFile::parse(&text).unwrap(), InputFile::Function(_)));
    }

    #[test]
    fn violated_invariants_are_named() {
        let bad = r#"{"format":"zygdist-function","schema_version":1,"depth":2,"values":[0,1,0]}"#;
        let err = FunctionFile::parse(bad).unwrap_err().to_string();
        assert!(err.contains("2^depth + 1"), "{err}");
        let bad = r#"{"format":"zygdist-function","schema_version":9,"depth":1,"values":[0,1,0]}"#;
        assert!(FunctionFile::parse(bad).unwrap_err().to_string().contains("schema_version"));
        let bad = r#"{"format":"zygdist-measure","schema_version":1,"dim":1,"depth":1,"masses":[1]}"#;
        assert!(MeasureFile::parse(bad).unwrap_err().to_string().contains("masses"));
        assert!(FunctionFile::parse("{").is_err());
        let extra = r#"{"format":"zygdist-function","schema_version":1,"depth":1,"values":[0,1,0],"x":1}"#;
        assert!(FunctionFile::parse(extra).is_err());
    }

    #[test]
    fn measure_roundtrip() {
        let mu = generate::cascade(2, 3, &[0.25], 4).unwrap();
        let file = MeasureFile::new(&mu, None);
        assert_eq!(MeasureFile::parse(&file.render()).unwrap().to_measure().unwrap(), mu);
    }

    #[test]
    fn digest_is_sha256() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn report_omits_absent_wall_time() {
        let mut r = Report::new(vec!["seminorm".into()]);
        r.estimate("zygmund", 0.0, Method::new("grid", "dyadic", &[4]));
        let text = r.render();
        assert!(!text.contains("wall_time"));
        assert_eq!(Report::parse(&text).unwrap(), r);
    }

    #[test]
    fn tidy_rows() {
        let p = DistanceProfile::tabulate("D", &[2.0, 1.0], &[3, 4], "", |e, d| Ok(e * d as f64))
            .unwrap();
        let t = ProfileTable::from(&p);
        assert_eq!(t.rows.len(), 4);
        assert_eq!(t.rows[0], TidyRow { epsilon: 1.0, depth: 3, value: 3.0 });
        assert!(t.to_csv().starts_with("functional,epsilon,depth,value\nD,1,3,3\n"));
    }
}
