use std::path::{Path, PathBuf};

use focklab::frames::QNorm;
use focklab::Weight;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config is not valid JSON: {0}")]
    Json(serde_json::Error),
    #[error("config must be a JSON object")]
    NotAnObject,
    #[error("invalid `{field}`: {source}")]
    Field {
        field: &'static str,
        source: serde_json::Error,
    },
    #[error("invalid experiment section: {0}")]
    Command(serde_json::Error),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridSpec {
    /// `n × n` grid on the square of half-width `half` around `center`.
    Square {
        n: usize,
        half: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    /// Square `n × n` grid clipped to the disk of radius `radius`.
    Disk { n: usize, radius: f64 },
    Hex { radius: f64, spacing: f64 },
    Points { points: Vec<[f64; 2]> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    /// `aℤ × bℤ` inside the closed disk of radius `radius`; `b` defaults to `a`.
    Lattice {
        a: f64,
        #[serde(default)]
        b: Option<f64>,
        #[serde(default)]
        radius: Option<f64>,
    },
    /// Point CSV (`x,y` rows); relative paths are taken from the config's directory.
    Csv { path: PathBuf },
    Points { points: Vec<[f64; 2]> },
    /// Fekete configuration of the given degree for the run's weight.
    Fekete { degree: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairs {
    #[default]
    Diagonal,
    All,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassKind {
    #[default]
    Kernel,
    Curvature,
}

fn origin() -> Vec<[f64; 2]> {
    vec![[0.0, 0.0]]
}

fn default_refine_steps() -> usize {
    focklab::fekete::DEFAULT_REFINE_STEPS
}

fn default_functions() -> usize {
    20
}

fn all_q() -> Vec<QNorm> {
    vec![QNorm::One, QNorm::Two, QNorm::Inf]
}

fn default_trials() -> usize {
    focklab::frames::wiener::DEFAULT_TRIALS
}

fn default_terms() -> usize {
    11
}

fn default_translate_grid() -> GridSpec {
    GridSpec::Disk { n: 25, radius: 3.0 }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelTable {
    /// Model degree; `null` selects the closed-form kernel.
    #[serde(rename = "N", default)]
    pub n: Option<usize>,
    pub grid: GridSpec,
    #[serde(default)]
    pub pairs: Pairs,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Density {
    pub set: SetSpec,
    pub radii: Vec<f64>,
    #[serde(default = "origin")]
    pub centers: Vec<[f64; 2]>,
    #[serde(default)]
    pub mass: MassKind,
    #[serde(rename = "N", default)]
    pub n: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fekete {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default = "default_refine_steps")]
    pub refine_steps: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameBounds {
    pub degrees: Vec<usize>,
    pub set: SetSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpBounds {
    pub set: SetSpec,
    #[serde(rename = "N", default)]
    pub n: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalizedFrame {
    #[serde(rename = "N")]
    pub n: usize,
    pub delta: Vec<f64>,
    #[serde(default = "default_functions")]
    pub functions: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Wiener {
    #[serde(rename = "N")]
    pub n: usize,
    pub set: SetSpec,
    #[serde(default = "all_q")]
    pub q: Vec<QNorm>,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Deform {
    #[serde(rename = "N")]
    pub n: usize,
    pub set: SetSpec,
    pub schedule: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sharp {
    #[serde(rename = "N")]
    pub n: usize,
    pub epsilon: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslateCheck {
    pub shifts: Vec<[f64; 2]>,
    /// Number of series coefficients of each random test function.
    #[serde(default = "default_terms")]
    pub terms: usize,
    #[serde(default = "default_translate_grid")]
    pub grid: GridSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    KernelTable(KernelTable),
    Density(Density),
    Fekete(Fekete),
    FrameBounds(FrameBounds),
    InterpBounds(InterpBounds),
    LocalizedFrame(LocalizedFrame),
    Wiener(Wiener),
    Deform(Deform),
    Sharp(Sharp),
    TranslateCheck(TranslateCheck),
}

#[derive(Clone, Debug)]
pub struct Config {
    pub command: Command,
    pub weight: Weight,
    pub seed: u64,
    pub output: OutputSpec,
    /// Directory that relative paths inside the config refer to.
    pub base_dir: PathBuf,
}

fn take_field<T: serde::de::DeserializeOwned>(
    obj: &mut Map<String, Value>,
    field: &'static str,
) -> Result<Option<T>, ConfigError> {
    obj.remove(field)
        .map(|v| serde_json::from_value(v).map_err(|source| ConfigError::Field { field, source }))
        .transpose()
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Config::parse(&text, base_dir)
    }

    pub fn parse(text: &str, base_dir: PathBuf) -> Result<Config, ConfigError> {
        let value: Value = serde_json::from_str(text).map_err(ConfigError::Json)?;
        let Value::Object(mut obj) = value else {
            return Err(ConfigError::NotAnObject);
        };
        let weight = take_field(&mut obj, "weight")?.unwrap_or_else(Weight::standard);
        let seed = take_field(&mut obj, "seed")?.unwrap_or(0);
        let output = take_field(&mut obj, "output")?.unwrap_or_default();
        let command = serde_json::from_value(Value::Object(obj)).map_err(ConfigError::Command)?;
        Ok(Config {
            command,
            weight,
            seed,
            output,
            base_dir,
        })
    }

    /// Fully resolved config as echoed into outputs. The output path is a destination
    /// rather than a parameter and is left out.
    pub fn echo(&self) -> Value {
        let mut v = serde_json::to_value(&self.command).expect("command serializes");
        let obj = v.as_object_mut().expect("tagged command is an object");
        obj.insert("weight".into(), serde_json::to_value(&self.weight).expect("weight serializes"));
        obj.insert("seed".into(), self.seed.into());
        obj.insert("output".into(), serde_json::json!({ "format": self.output.format }));
        v
    }
}

pub fn config_hash(echo: &Value) -> String {
    hex::encode(Sha256::digest(serde_json::to_vec(echo).expect("config serializes")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Config, ConfigError> {
        Config::parse(s, PathBuf::new())
    }

    #[test]
    fn defaults_are_materialized() {
        let c = parse(r#"{"command":"fekete","N":5}"#).unwrap();
        let e = c.echo();
        assert_eq!(e["refine_steps"], 100);
        assert_eq!(e["seed"], 0);
        assert_eq!(e["weight"]["family"], "gaussian");
        assert_eq!(e["output"]["format"], "json");
        assert_eq!(e["command"], "fekete");
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(parse(r#"{"command":"fekete","N":5,"bogus":1}"#).is_err());
        assert!(parse(r#"{"command":"sharp","N":5,"epsilon":0.2,"output":{"fmt":"csv"}}"#).is_err());
        assert!(parse(
            r#"{"command":"density","radii":[1],"set":{"kind":"lattice","a":1,"c":2}}"#
        )
        .is_err());
        assert!(parse(r#"{"command":"nope"}"#).is_err());
        assert!(parse(r#"[1]"#).is_err());
    }

    #[test]
    fn echo_reparses_to_same_hash() {
        let c = parse(r#"{"command":"wiener","N":4,"set":{"kind":"lattice","a":0.8},"seed":3}"#).unwrap();
        let e = c.echo();
        let again = parse(&e.to_string()).unwrap();
        assert_eq!(config_hash(&e), config_hash(&again.echo()));
    }

    #[test]
    fn output_path_not_echoed() {
        let a = parse(r#"{"command":"sharp","N":5,"epsilon":0.2,"output":{"path":"x.json"}}"#).unwrap();
        let b = parse(r#"{"command":"sharp","N":5,"epsilon":0.2}"#).unwrap();
        assert_eq!(config_hash(&a.echo()), config_hash(&b.echo()));
    }
}
