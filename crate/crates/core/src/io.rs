//! Persistence and export: versioned JSON solution files, CSV tables and run manifests.
//!
//! Every write goes to a temporary file in the destination directory and is renamed
//! into place, so readers never observe a partial file. Floats in JSON use the shortest
//! representation that parses back to the same bits; CSV uses 17 significant digits.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{energy_density, AnsatzParams, CylPoint, EnergyConfig};
use crate::ode::{Classification, PoleFit, ProfileSolution, ScanTable, SolveConfig};
use crate::topology::gauge_potential;

pub const FORMAT_VERSION: u32 = 1;
pub const TOOL_NAME: &str = "faddeev";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    /// SHA-256 of the canonical JSON of `(params, config)`.
    pub config_hash: String,
}

impl Provenance {
    pub fn new(config_hash: String) -> Self {
        Self {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            config_hash,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Samples {
    pub rho: Vec<f64>,
    pub g: Vec<f64>,
    pub gp: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub format_version: u32,
    pub params: AnsatzParams,
    pub config: SolveConfig,
    pub classification: Classification,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pole_fit: Option<PoleFit>,
    pub samples: Samples,
    pub provenance: Provenance,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn config_hash(params: &AnsatzParams, config: &SolveConfig) -> String {
    let canonical = serde_json::to_vec(&(params, config)).expect("plain data serializes");
    sha256_hex(&canonical)
}

impl SolutionFile {
    pub fn from_solution(sol: &ProfileSolution) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            params: *sol.params(),
            config: *sol.config(),
            classification: sol.classification(),
            pole_fit: sol.pole_fit().copied(),
            samples: Samples {
                rho: sol.rho().to_vec(),
                g: sol.g().to_vec(),
                gp: sol.gp().to_vec(),
            },
            provenance: Provenance::new(config_hash(sol.params(), sol.config())),
        }
    }

    pub fn to_solution(&self) -> Result<ProfileSolution> {
        let s = &self.samples;
        if s.rho.len() != s.g.len() || s.rho.len() != s.gp.len() {
            return Err(Error::Format(format!(
                "sample columns differ in length ({}, {}, {})",
                s.rho.len(),
                s.g.len(),
                s.gp.len()
            )));
        }
        Ok(ProfileSolution::from_parts(
            self.params,
            self.config,
            self.classification,
            s.rho.clone(),
            s.g.clone(),
            s.gp.clone(),
        )?
        .with_pole_fit(self.pole_fit))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read_to_string(path)?;
        let probe: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        let version = probe
            .get("format_version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::Format(format!("{}: missing format_version", path.display())))?;
        if version != FORMAT_VERSION as u64 {
            return Err(Error::Format(format!(
                "{}: format_version {version} is not supported (expected {FORMAT_VERSION})",
                path.display()
            )));
        }
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }
}

pub fn save_solution(path: &Path, sol: &ProfileSolution) -> Result<()> {
    SolutionFile::from_solution(sol).save(path)
}

pub fn load_solution(path: &Path) -> Result<ProfileSolution> {
    SolutionFile::load(path)?.to_solution()
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::NotFound {
        Error::MissingInput(path.display().to_string())
    } else {
        Error::Io(format!("{}: {e}", path.display()))
    }
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

/// Writes `bytes` to a sibling temporary file, syncs it and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{}: not a file path", path.display())))?
        .to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::Io(format!("{}: {e}", path.display()))
    })
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, to_json_pretty(value)?.as_bytes())
}

/// 17 significant digits, enough to reproduce every `f64` exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv(header: &str, rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_f64).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Columns `rho,g,gp,f` with `f = g²/(1+g²)`.
pub fn profile_csv(sol: &ProfileSolution) -> String {
    let rows = (0..sol.len()).map(|i| {
        let g = sol.g()[i];
        vec![sol.rho()[i], g, sol.gp()[i], g * g / (1.0 + g * g)]
    });
    csv("rho,g,gp,f", rows)
}

/// Columns `rho,e` with the static energy density on the sample radii.
pub fn energy_csv(sol: &ProfileSolution, cfg: &EnergyConfig) -> Result<String> {
    let rows = sol
        .rho()
        .iter()
        .map(|&r| {
            Ok(vec![
                r,
                energy_density(&CylPoint::new(r, 0.0, 0.0)?, sol, cfg)?,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(csv("rho,e", rows.into_iter()))
}

/// Columns `rho,hopf_integrand` with `ρ·A·B`, so that
/// `Q = (4π²/16π²) ∫ hopf_integrand dρ` up to the tail beyond the last sample.
pub fn integrand_csv(sol: &ProfileSolution) -> Result<String> {
    let rows = sol
        .rho()
        .iter()
        .map(|&r| {
            let gd = gauge_potential(&CylPoint::new(r, 0.0, 0.0)?, sol)?;
            Ok(vec![r, r * gd.a.dot(&gd.b_curl)])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(csv("rho,hopf_integrand", rows.into_iter()))
}

/// Header `c_lead,classification,rho0`; `rho0` is empty for non-singular rows.
pub fn scan_csv(table: &ScanTable) -> String {
    let mut out = String::from("c_lead,classification,rho0\n");
    for row in &table.rows {
        let rho0 = row.outcome.rho0().map(fmt_f64).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_f64(row.c_lead),
            row.outcome.label(),
            rho0
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub subcommand: String,
    pub resolved_config: serde_json::Value,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub wall_time_seconds: f64,
    pub exit_status: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
    pub provenance: Provenance,
}
