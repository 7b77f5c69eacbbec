//! Manifests, input loading and atomic output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] spexp::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {detail}")]
    Parse { path: PathBuf, detail: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    /// 0 success, 1 failed checks, 2 input error, 3 infeasible, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        use spexp::Error as E;
        match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Core(E::InstanceTooLarge { .. } | E::InfeasibleConfiguration(_) | E::NonSmoothConfiguration { .. }) => 3,
            CliError::Core(E::NumericalFailure { .. }) => 4,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Everything needed to rerun a command.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: &'static str,
    pub params: Value,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub seed_derivation: &'static str,
}

impl RunManifest {
    pub fn new(subcommand: &'static str, params: &impl Serialize, seed: Option<u64>) -> Self {
        RunManifest {
            subcommand,
            params: serde_json::to_value(params).expect("flags serialize"),
            seed,
            version: env!("CARGO_PKG_VERSION"),
            seed_derivation: "each candidate, restart or instance j draws from ChaCha8(seed) on stream j",
        }
    }
}

/// The result object with a `manifest` key added (or wrapped as
/// `{manifest, result}` when the result is not an object).
pub fn with_manifest(result: &impl Serialize, manifest: &RunManifest) -> Value {
    let manifest = serde_json::to_value(manifest).expect("manifest serializes");
    match serde_json::to_value(result).expect("results serialize") {
        Value::Object(mut map) => {
            map.insert("manifest".into(), manifest);
            Value::Object(map)
        }
        other => {
            let mut map = Map::new();
            map.insert("manifest".into(), manifest);
            map.insert("result".into(), other);
            Value::Object(map)
        }
    }
}

/// Writes `bytes` to `path` via a sibling temporary file and a rename, or to
/// stdout when `path` is `None`.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    let io = |p: &Path| {
        let p = p.to_path_buf();
        move |source| CliError::Io { path: p, source }
    };
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        out.write_all(bytes).map_err(io(Path::new("<stdout>")))?;
        return out.flush().map_err(io(Path::new("<stdout>")));
    };
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes).map_err(io(&tmp))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(path)(e)
    })
}

pub fn write_json(path: Option<&Path>, value: &Value) -> CliResult<()> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("values serialize");
    bytes.push(b'\n');
    write_output(path, &bytes)
}

pub fn read_value(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })
}

pub fn parse_value<T: DeserializeOwned>(path: &Path, value: Value) -> CliResult<T> {
    serde_json::from_value(value).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    parse_value(path, read_value(path)?)
}
