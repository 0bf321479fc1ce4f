//! CSV and JSON artifacts.
//!
//! Every CSV starts with a `# latclock scenario=<name> seed=<seed>` comment
//! line followed by a header row. Floats are written in shortest round-trip
//! exponent form so identical runs produce identical bytes. Only the run
//! manifest carries a timestamp.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{FrequencyTrace, NoiseSpec};
use crate::prep::StageRow;
use crate::servo::LockRecord;
use crate::spectroscopy::Spectrum;
use crate::stability::StabilityCurve;

pub const TRACE_SCHEMA: &str = "latclock.trace/1";
pub const MANIFEST_SCHEMA: &str = "latclock.manifest/1";

/// Which scenario and seed produced an artifact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub scenario: String,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(scenario: impl Into<String>, seed: Option<u64>) -> Self {
        Provenance {
            scenario: scenario.into(),
            seed,
        }
    }

    fn comment(&self) -> String {
        match self.seed {
            Some(s) => format!("# latclock scenario={} seed={}\n", self.scenario, s),
            None => format!("# latclock scenario={} seed=none\n", self.scenario),
        }
    }
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn write_rows<I>(path: &Path, prov: &Provenance, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    out.write_all(prov.comment().as_bytes())
        .map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(out);
    let wrap = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    w.write_record(header).map_err(wrap)?;
    for r in rows {
        w.write_record(&r).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// JSON sidecar describing a trace CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub schema: String,
    pub label: String,
    pub dt: f64,
    pub len: usize,
    pub seed: Option<u64>,
    pub stream_id: Option<u64>,
    pub scenario: String,
    pub noise: Option<NoiseSpec>,
}

/// Sidecar path for a trace CSV: same stem, `.json` extension.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes `index,y` rows plus the JSON sidecar. Returns both paths.
pub fn write_trace(
    path: &Path,
    trace: &FrequencyTrace,
    prov: &Provenance,
    noise: Option<&NoiseSpec>,
) -> Result<[PathBuf; 2]> {
    write_rows(
        path,
        prov,
        &["index", "y"],
        trace
            .samples
            .iter()
            .enumerate()
            .map(|(i, y)| vec![i.to_string(), num(*y)]),
    )?;
    let meta = TraceMeta {
        schema: TRACE_SCHEMA.into(),
        label: trace.label.clone(),
        dt: trace.dt,
        len: trace.len(),
        seed: trace.seed,
        stream_id: trace.stream_id,
        scenario: prov.scenario.clone(),
        noise: noise.copied(),
    };
    let side = sidecar_path(path);
    write_json(&side, &meta)?;
    Ok([path.to_path_buf(), side])
}

/// Reads a trace written by [`write_trace`]. The sidecar supplies `dt`.
pub fn read_trace(path: &Path) -> Result<FrequencyTrace> {
    let side = sidecar_path(path);
    let text = std::fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    let meta: TraceMeta = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", side.display())))?;
    if meta.schema != TRACE_SCHEMA {
        return Err(Error::Parse(format!(
            "{}: unsupported schema {}",
            side.display(),
            meta.schema
        )));
    }
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file);
    let mut samples = Vec::with_capacity(meta.len);
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let y = rec
            .get(1)
            .and_then(|s| s.trim().parse::<f64>().ok())
            .ok_or_else(|| Error::Parse(format!("{}: bad sample on data row {}", path.display(), row + 1)))?;
        samples.push(y);
    }
    if samples.len() != meta.len {
        return Err(Error::Parse(format!(
            "{}: sidecar declares {} samples, file holds {}",
            path.display(),
            meta.len,
            samples.len()
        )));
    }
    let mut trace = FrequencyTrace::new(samples, meta.dt, meta.label)?;
    trace.seed = meta.seed;
    trace.stream_id = meta.stream_id;
    Ok(trace)
}

pub fn write_curve(path: &Path, curve: &StabilityCurve, prov: &Provenance) -> Result<()> {
    write_rows(
        path,
        prov,
        &["tau_s", "sigma_y", "count"],
        curve
            .taus
            .iter()
            .zip(&curve.sigmas)
            .zip(&curve.counts)
            .map(|((t, s), c)| vec![num(*t), num(*s), c.to_string()]),
    )
}

pub fn write_spectrum(path: &Path, spectrum: &Spectrum, prov: &Provenance) -> Result<()> {
    write_rows(
        path,
        prov,
        &["detuning_Hz", "excitation_fraction"],
        spectrum
            .detunings
            .iter()
            .zip(&spectrum.excitation_fractions)
            .map(|(f, p)| vec![num(*f), num(*p)]),
    )
}

pub fn write_stages(path: &Path, rows: &[StageRow], prov: &Provenance) -> Result<()> {
    write_rows(
        path,
        prov,
        &["stage", "duration_s", "atom_number", "temperature_K"],
        rows.iter().map(|r| {
            vec![
                r.stage.to_string(),
                num(r.duration),
                num(r.atom_number),
                num(r.temperature),
            ]
        }),
    )
}

pub fn write_lock_records(path: &Path, records: &[LockRecord], prov: &Provenance) -> Result<()> {
    write_rows(
        path,
        prov,
        &["cycle", "side", "excitation_fraction", "error_Hz", "correction_Hz"],
        records.iter().map(|r| {
            vec![
                r.cycle.to_string(),
                if r.side.sign() > 0.0 { "+" } else { "-" }.to_string(),
                num(r.excitation),
                num(r.error),
                num(r.correction),
            ]
        }),
    )
}

/// Two-column `x,y` table for auxiliary curves such as a field profile.
pub fn write_xy(path: &Path, header: [&str; 2], points: &[(f64, f64)], prov: &Provenance) -> Result<()> {
    write_rows(path, prov, &header, points.iter().map(|(x, y)| vec![num(*x), num(*y)]))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Per-run manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub version: String,
    pub command: String,
    pub provenance: Provenance,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub files: Vec<String>,
    pub warnings: Vec<String>,
    pub scenario: Option<serde_json::Value>,
}

impl Manifest {
    pub fn new(command: &str, prov: Provenance, scenario: Option<serde_json::Value>) -> Self {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Manifest {
            schema: MANIFEST_SCHEMA.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            provenance: prov,
            timestamp,
            files: Vec::new(),
            warnings: Vec::new(),
            scenario,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        let mut t = FrequencyTrace::new(vec![1.25e-15, -3.0e-16, 0.1 + 0.2, f64::MIN_POSITIVE], 0.5, "lo").unwrap();
        t.seed = Some(7);
        t.stream_id = Some(1);
        write_trace(&path, &t, &Provenance::new("unit", Some(7)), None).unwrap();
        let back = read_trace(&path).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn csv_names_scenario_and_seed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curve.csv");
        let c = StabilityCurve {
            taus: vec![1.0, 2.0],
            sigmas: vec![1e-15, 7e-16],
            counts: vec![10, 5],
        };
        write_curve(&path, &c, &Provenance::new("sr-breadboard", Some(42))).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# latclock scenario=sr-breadboard seed=42"));
        assert_eq!(lines.next(), Some("tau_s,sigma_y,count"));
        assert_eq!(lines.next(), Some("1e0,1e-15,10"));
    }

    #[test]
    fn missing_sidecar_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bare.csv");
        std::fs::write(&path, "index,y\n0,1e0\n").unwrap();
        assert!(matches!(read_trace(&path), Err(Error::Io { .. })));
    }

    #[test]
    fn length_mismatch_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let t = FrequencyTrace::new(vec![1.0, 2.0, 3.0], 1.0, "x").unwrap();
        write_trace(&path, &t, &Provenance::new("unit", None), None).unwrap();
        std::fs::write(&path, "index,y\n0,1e0\n").unwrap();
        assert!(matches!(read_trace(&path), Err(Error::Parse(_))));
    }
}
