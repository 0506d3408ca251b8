//! File formats: the binary data-cube, CSV exports, PGM heatmaps, SVG
//! line plots, and the run manifest.
//!
//! Everything written here is deterministic for a given input: floats go
//! through Rust's shortest-roundtrip formatting and the heatmap scaling
//! depends only on the data, so re-running a stage reproduces files byte
//! for byte.

use ndarray::{Array2, Array4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::cfar::Detection;
use crate::doa::AngleSpectrum;
use crate::scene::RadarParams;
use crate::specproc::RangeDopplerMap;
use crate::synth::DataCube;

const CUBE_MAGIC: &[u8; 8] = b"FMCWCUBE";
const CUBE_VERSION: u32 = 1;
const HEADER_LEN: usize = 64;

// Heatmap pixels span this many dB below the map maximum.
const PGM_FLOOR_DB: f64 = 80.0;

/// File I/O errors.
#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    BadCube { path: PathBuf, message: String },
    #[error("{path}:{line}: {message}")]
    BadCsv { path: PathBuf, line: usize, message: String },
    #[error("manifest: {0}")]
    Json(#[from] serde_json::Error),
}

fn file_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::File { path: path.to_path_buf(), source }
}

/// Hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

// ─── data cube ───────────────────────────────────────────────────────────

/// Rounds every sample to the nearest 32-bit float (the cube file's
/// precision) while keeping the in-memory type. Running this before any
/// processing makes in-memory results byte-identical to results computed
/// from a reloaded cube file.
pub fn quantize_to_f32(cube: &mut DataCube) {
    cube.data
        .mapv_inplace(|v| Complex64::new(v.re as f32 as f64, v.im as f32 as f64));
}

/// Writes the cube file: a 64-byte header (magic, version, dimensions,
/// waveform constants, zero padding) followed by interleaved `(re, im)`
/// 32-bit little-endian floats, sample index fastest, then chirp,
/// channel, CPI.
pub fn write_cube(path: &Path, cube: &DataCube) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path).map_err(file_err(path))?);
    let radar = &cube.radar;
    let (n_cpi, n_rx, n_chirps, n_samples) = cube.dims();

    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(CUBE_MAGIC);
    header.extend_from_slice(&CUBE_VERSION.to_le_bytes());
    header.extend_from_slice(&(n_samples as u32).to_le_bytes());
    header.extend_from_slice(&(n_chirps as u32).to_le_bytes());
    header.extend_from_slice(&(n_rx as u32).to_le_bytes());
    header.extend_from_slice(&(n_cpi as u32).to_le_bytes());
    header.extend_from_slice(&radar.sample_rate().to_le_bytes());
    header.extend_from_slice(&radar.chirp_period.to_le_bytes());
    header.extend_from_slice(&radar.fc.to_le_bytes());
    header.extend_from_slice(&radar.bandwidth.to_le_bytes());
    header.resize(HEADER_LEN, 0);
    w.write_all(&header).map_err(file_err(path))?;

    // The memory layout already matches the file's index order.
    for v in cube.data.iter() {
        w.write_all(&(v.re as f32).to_le_bytes()).map_err(file_err(path))?;
        w.write_all(&(v.im as f32).to_le_bytes()).map_err(file_err(path))?;
    }
    w.flush().map_err(file_err(path))
}

/// A reloaded cube file. The header carries no array geometry beyond the
/// channel count, so callers pair it with the scenario before using it.
#[derive(Debug)]
pub struct CubeFile {
    pub n_samples: usize,
    pub n_chirps: usize,
    pub n_rx: usize,
    pub n_cpi: usize,
    pub sample_rate: f64,
    pub chirp_period: f64,
    pub fc: f64,
    pub bandwidth: f64,
    pub data: Array4<Complex64>,
}

impl CubeFile {
    /// True when the header matches a scenario's radar constants and
    /// channel count, which is what stage caching requires.
    pub fn matches(&self, radar: &RadarParams, n_rx: usize) -> bool {
        self.n_samples == radar.n_samples
            && self.n_chirps == radar.n_chirps
            && self.n_cpi == radar.n_cpi
            && self.n_rx == n_rx
            && self.sample_rate == radar.sample_rate()
            && self.chirp_period == radar.chirp_period
            && self.fc == radar.fc
            && self.bandwidth == radar.bandwidth
    }
}

pub fn read_cube(path: &Path) -> Result<CubeFile, IoError> {
    let bad = |message: String| IoError::BadCube { path: path.to_path_buf(), message };
    let mut r = BufReader::new(File::open(path).map_err(file_err(path))?);
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)
        .map_err(|_| bad(format!("shorter than the {HEADER_LEN}-byte header")))?;
    if &header[0..8] != CUBE_MAGIC {
        return Err(bad("bad magic, not a cube file".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(header[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(header[o..o + 8].try_into().unwrap());
    let version = u32_at(8);
    if version != CUBE_VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let n_samples = u32_at(12) as usize;
    let n_chirps = u32_at(16) as usize;
    let n_rx = u32_at(20) as usize;
    let n_cpi = u32_at(24) as usize;
    let count = n_cpi
        .checked_mul(n_rx)
        .and_then(|v| v.checked_mul(n_chirps))
        .and_then(|v| v.checked_mul(n_samples))
        .ok_or_else(|| bad("dimension overflow".into()))?;

    let mut payload = Vec::new();
    r.read_to_end(&mut payload).map_err(file_err(path))?;
    if payload.len() != count * 8 {
        return Err(bad(format!(
            "payload is {} bytes, dimensions require {}",
            payload.len(),
            count * 8
        )));
    }
    let mut samples = Vec::with_capacity(count);
    for chunk in payload.chunks_exact(8) {
        let re = f32::from_le_bytes(chunk[0..4].try_into().unwrap()) as f64;
        let im = f32::from_le_bytes(chunk[4..8].try_into().unwrap()) as f64;
        samples.push(Complex64::new(re, im));
    }
    let data = Array4::from_shape_vec((n_cpi, n_rx, n_chirps, n_samples), samples)
        .expect("length checked above");
    Ok(CubeFile {
        n_samples,
        n_chirps,
        n_rx,
        n_cpi,
        sample_rate: f64_at(28),
        chirp_period: f64_at(36),
        fc: f64_at(44),
        bandwidth: f64_at(52),
        data,
    })
}

// ─── CSV ─────────────────────────────────────────────────────────────────

/// Linear power to decibels, clamped away from `log(0)`.
pub fn db(linear: f64) -> f64 {
    10.0 * linear.max(f64::MIN_POSITIVE).log10()
}

const DETECTIONS_HEADER: &str = "cpi,range_bin,doppler_bin,range_m,vel_mps,power_db,threshold_db";

/// Detections CSV, one row per detection, powers in dB.
pub fn write_detections_csv(path: &Path, detections: &[Detection]) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path).map_err(file_err(path))?);
    writeln!(w, "{DETECTIONS_HEADER}").map_err(file_err(path))?;
    for d in detections {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            d.cpi_index,
            d.range_bin,
            d.doppler_bin,
            d.range_m,
            d.vel_mps,
            db(d.cell_power),
            db(d.threshold)
        )
        .map_err(file_err(path))?;
    }
    w.flush().map_err(file_err(path))
}

/// Reads a detections CSV back. Index columns are exact; the dB power
/// columns round-trip only to floating-point accuracy, so downstream
/// consumers key on the indices.
pub fn read_detections_csv(path: &Path) -> Result<Vec<Detection>, IoError> {
    let bad = |line: usize, message: String| IoError::BadCsv { path: path.to_path_buf(), line, message };
    let r = BufReader::new(File::open(path).map_err(file_err(path))?);
    let mut detections = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line.map_err(file_err(path))?;
        let lineno = idx + 1;
        if idx == 0 {
            if line != DETECTIONS_HEADER {
                return Err(bad(lineno, format!("unexpected header '{line}'")));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(bad(lineno, format!("expected 7 columns, got {}", fields.len())));
        }
        let parse_usize = |s: &str, what: &str| {
            s.parse::<usize>().map_err(|e| bad(lineno, format!("{what}: {e}")))
        };
        let parse_f64 =
            |s: &str, what: &str| s.parse::<f64>().map_err(|e| bad(lineno, format!("{what}: {e}")));
        detections.push(Detection {
            cpi_index: parse_usize(fields[0], "cpi")?,
            range_bin: parse_usize(fields[1], "range_bin")?,
            doppler_bin: parse_usize(fields[2], "doppler_bin")?,
            range_m: parse_f64(fields[3], "range_m")?,
            vel_mps: parse_f64(fields[4], "vel_mps")?,
            cell_power: 10f64.powf(parse_f64(fields[5], "power_db")? / 10.0),
            threshold: 10f64.powf(parse_f64(fields[6], "threshold_db")? / 10.0),
        });
    }
    Ok(detections)
}

/// Real matrix as CSV: one `#`-prefixed metadata line, then row-major
/// comma-separated values, one matrix row per line.
pub fn write_matrix_csv(
    path: &Path,
    matrix: &Array2<f64>,
    meta: &[(&str, String)],
) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path).map_err(file_err(path))?);
    let tags: Vec<String> = meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
    writeln!(w, "# {}", tags.join(" ")).map_err(file_err(path))?;
    for row in matrix.rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", cells.join(",")).map_err(file_err(path))?;
    }
    w.flush().map_err(file_err(path))
}

/// Range-Doppler power map as CSV (rows = range bins, columns = Doppler
/// bins) with the axis scales in the metadata line.
pub fn write_rd_map_csv(path: &Path, map: &RangeDopplerMap) -> Result<(), IoError> {
    let (rows, cols) = map.power.dim();
    write_matrix_csv(
        path,
        &map.power,
        &[
            ("cpi", map.cpi_index.to_string()),
            ("rows", rows.to_string()),
            ("cols", cols.to_string()),
            ("range_start_m", map.range_axis.start.to_string()),
            ("range_step_m", map.range_axis.step.to_string()),
            ("vel_start_mps", map.velocity_axis.start.to_string()),
            ("vel_step_mps", map.velocity_axis.step.to_string()),
        ],
    )
}

/// Angle spectrum CSV: `# method=<tag>` then `angle_deg, power_linear,
/// power_db` rows.
pub fn write_angle_spectrum_csv(path: &Path, spec: &AngleSpectrum) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path).map_err(file_err(path))?);
    writeln!(w, "# method={}", spec.method).map_err(file_err(path))?;
    writeln!(w, "angle_deg,power_linear,power_db").map_err(file_err(path))?;
    for (angle, power) in spec.angles_deg.iter().zip(&spec.power) {
        writeln!(w, "{},{},{}", angle, power, db(*power)).map_err(file_err(path))?;
    }
    w.flush().map_err(file_err(path))
}

/// Reads an angle-spectrum CSV: the method tag plus
/// `(angle_deg, power_linear, power_db)` rows.
pub fn read_angle_spectrum_csv(path: &Path) -> Result<(String, Vec<(f64, f64, f64)>), IoError> {
    let bad = |line: usize, message: String| IoError::BadCsv { path: path.to_path_buf(), line, message };
    let r = BufReader::new(File::open(path).map_err(file_err(path))?);
    let mut method = String::new();
    let mut rows = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line.map_err(file_err(path))?;
        let lineno = idx + 1;
        match idx {
            0 => {
                method = line
                    .strip_prefix("# method=")
                    .ok_or_else(|| bad(lineno, format!("expected '# method=...', got '{line}'")))?
                    .to_string();
            }
            1 => {
                if line != "angle_deg,power_linear,power_db" {
                    return Err(bad(lineno, format!("unexpected header '{line}'")));
                }
            }
            _ => {
                if line.is_empty() {
                    continue;
                }
                let fields: Vec<&str> = line.split(',').collect();
                if fields.len() != 3 {
                    return Err(bad(lineno, format!("expected 3 columns, got {}", fields.len())));
                }
                let mut nums = [0.0f64; 3];
                for (slot, field) in nums.iter_mut().zip(&fields) {
                    *slot = field.parse().map_err(|e| bad(lineno, format!("{e}")))?;
                }
                rows.push((nums[0], nums[1], nums[2]));
            }
        }
    }
    if method.is_empty() {
        return Err(bad(1, "file is empty".into()));
    }
    Ok((method, rows))
}

// ─── PGM heatmap ─────────────────────────────────────────────────────────

/// 16-bit PGM (P5) heatmap: log power relative to the map maximum,
/// floored 80 dB down, the maximum mapped to 65535. Matrix row 0 is the
/// top raster row.
pub fn write_pgm(path: &Path, matrix: &Array2<f64>) -> Result<(), IoError> {
    let (rows, cols) = matrix.dim();
    let mut w = BufWriter::new(File::create(path).map_err(file_err(path))?);
    write!(w, "P5\n{cols} {rows}\n65535\n").map_err(file_err(path))?;
    let max = matrix.iter().copied().fold(0.0f64, f64::max);
    for value in matrix.iter() {
        let pixel = if max > 0.0 && *value > 0.0 {
            let rel_db = 10.0 * (value / max).log10();
            let unit = ((rel_db + PGM_FLOOR_DB) / PGM_FLOOR_DB).clamp(0.0, 1.0);
            (unit * 65535.0).round() as u16
        } else {
            0
        };
        w.write_all(&pixel.to_be_bytes()).map_err(file_err(path))?;
    }
    w.flush().map_err(file_err(path))
}

// ─── SVG line plot ───────────────────────────────────────────────────────

/// Renders an angle-spectrum CSV's rows as a self-contained SVG line
/// plot (dB axis, 80 dB window below the peak).
pub fn write_angle_spectrum_svg(
    path: &Path,
    method: &str,
    rows: &[(f64, f64, f64)],
) -> Result<(), IoError> {
    if rows.is_empty() {
        return Err(IoError::BadCsv {
            path: path.to_path_buf(),
            line: 0,
            message: "no data rows to plot".into(),
        });
    }
    let (width, height) = (800.0, 500.0);
    let (left, right, top, bottom) = (70.0, 20.0, 40.0, 60.0);
    let x_min = rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let x_max = rows.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let y_max = rows.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max);
    let y_min = y_max - PGM_FLOOR_DB;
    let x_span = (x_max - x_min).max(f64::MIN_POSITIVE);

    let to_x = |a: f64| left + (a - x_min) / x_span * (width - left - right);
    let to_y = |d: f64| {
        let clamped = d.clamp(y_min, y_max);
        top + (y_max - clamped) / PGM_FLOOR_DB * (height - top - bottom)
    };
    let points: Vec<String> = rows
        .iter()
        .map(|r| format!("{:.2},{:.2}", to_x(r.0), to_y(r.2)))
        .collect();

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width} {height}\" \
         font-family=\"sans-serif\" font-size=\"14\">\n"
    ));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\">angle spectrum ({method})</text>\n",
        width / 2.0
    ));
    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{left}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n",
        height - bottom,
        width - right
    ));
    svg.push_str(&format!(
        "<line x1=\"{left}\" y1=\"{top}\" x2=\"{left}\" y2=\"{}\" stroke=\"black\"/>\n",
        height - bottom
    ));
    for (value, anchor) in [(x_min, "start"), (0.0, "middle"), (x_max, "end")] {
        if value < x_min || value > x_max {
            continue;
        }
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{}\" text-anchor=\"{anchor}\">{value:.1}</text>\n",
            to_x(value),
            height - bottom + 20.0
        ));
    }
    for value in [y_max, y_min] {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{:.2}\" text-anchor=\"end\">{value:.1}</text>\n",
            left - 8.0,
            to_y(value) + 5.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">angle (deg)</text>\n",
        (left + width - right) / 2.0,
        height - 15.0
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">power (dB)</text>\n",
        (top + height - bottom) / 2.0
    ));
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n",
        points.join(" ")
    ));
    svg.push_str("</svg>\n");

    let mut w = BufWriter::new(File::create(path).map_err(file_err(path))?);
    w.write_all(svg.as_bytes()).map_err(file_err(path))?;
    w.flush().map_err(file_err(path))
}

// ─── manifest ────────────────────────────────────────────────────────────

/// What one stage produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: String,
    pub seconds: f64,
    /// File names relative to the run's output directory.
    pub outputs: Vec<String>,
}

/// Record of one pipeline run: what ran, from which scenario (by path
/// and content hash), and which files each stage wrote.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub scenario_path: String,
    pub scenario_sha256: String,
    pub out_dir: String,
    pub stages: Vec<StageReport>,
}

impl RunManifest {
    /// Every output file, in stage order.
    pub fn all_outputs(&self) -> Vec<&str> {
        self.stages
            .iter()
            .flat_map(|s| s.outputs.iter().map(String::as_str))
            .collect()
    }
}

pub fn write_manifest(path: &Path, manifest: &RunManifest) -> Result<(), IoError> {
    let text = serde_json::to_string_pretty(manifest)?;
    std::fs::write(path, text + "\n").map_err(file_err(path))
}

pub fn read_manifest(path: &Path) -> Result<RunManifest, IoError> {
    let text = std::fs::read_to_string(path).map_err(file_err(path))?;
    Ok(serde_json::from_str(&text)?)
}
