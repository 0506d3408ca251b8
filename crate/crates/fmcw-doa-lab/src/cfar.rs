//! Cell-averaging constant-false-alarm-rate detection on range-Doppler
//! power maps.
//!
//! Each cell under test is compared against `a` times the mean power of
//! the training cells around it: a square outer window with a square guard
//! region cut out of its middle (defaults 9x9 over 5x5, so 56 training
//! cells). The factor `a = M (pfa^(-1/M) - 1)` makes the false-alarm
//! probability exactly `pfa` on exponentially distributed noise power,
//! independent of the noise level.
//!
//! Everything here works on linear power. Convert to dB for display only;
//! averaging dB values estimates the wrong noise power.

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

use crate::specproc::RangeDopplerMap;

/// Detector configuration. Half-widths are per axis in cells, so the
/// outer window spans `2 * train_half + 1` cells per side and the guard
/// region `2 * guard_half + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CfarConfig {
    #[serde(default = "default_guard_half")]
    pub guard_half: usize,
    #[serde(default = "default_train_half")]
    pub train_half: usize,
    #[serde(default = "default_pfa")]
    pub pfa: f64,
    #[serde(default)]
    pub edge_policy: EdgePolicy,
}

fn default_guard_half() -> usize {
    2
}
fn default_train_half() -> usize {
    4
}
fn default_pfa() -> f64 {
    1.0e-3
}

impl Default for CfarConfig {
    fn default() -> Self {
        CfarConfig {
            guard_half: default_guard_half(),
            train_half: default_train_half(),
            pfa: default_pfa(),
            edge_policy: EdgePolicy::Skip,
        }
    }
}

impl CfarConfig {
    /// Training-cell count `M`: outer window minus the guard region.
    pub fn training_cells(&self) -> usize {
        let outer = 2 * self.train_half + 1;
        let inner = 2 * self.guard_half + 1;
        outer * outer - inner * inner
    }
}

/// What happens where the window would leave the map. `Skip` never tests
/// border cells; it is the only policy, kept as an enum so the scenario
/// format names it explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgePolicy {
    #[default]
    Skip,
}

/// One cell that exceeded its adaptive threshold. `cell_power` and
/// `threshold` are linear; `cell_power > threshold` always holds.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub cpi_index: usize,
    pub range_bin: usize,
    pub doppler_bin: usize,
    pub range_m: f64,
    pub vel_mps: f64,
    pub cell_power: f64,
    pub threshold: f64,
}

/// Detector errors.
#[derive(Debug, thiserror::Error)]
pub enum CfarError {
    #[error("threshold factor needs M >= 1 and pfa in (0, 1], got M = {m}, pfa = {pfa}")]
    BadThresholdDomain { m: usize, pfa: f64 },
    #[error("window geometry needs train_half ({train_half}) > guard_half ({guard_half})")]
    BadWindow { train_half: usize, guard_half: usize },
    #[error("map is {rows}x{cols} but the window spans {span} cells per side")]
    MapTooSmall { rows: usize, cols: usize, span: usize },
}

/// Threshold scale factor `a = M (pfa^(-1/M) - 1)`.
///
/// Evaluated as `M expm1(-ln(pfa) / M)`, which is the same quantity but
/// exact at `pfa = 1` (returns 0: every tested cell alarms) and accurate
/// for pfa near 1 where the direct power form cancels.
pub fn threshold_factor(m: usize, pfa: f64) -> Result<f64, CfarError> {
    if m < 1 || !pfa.is_finite() || pfa <= 0.0 || pfa > 1.0 {
        return Err(CfarError::BadThresholdDomain { m, pfa });
    }
    Ok(m as f64 * f64::exp_m1(-pfa.ln() / m as f64))
}

/// Runs the detector over one range-Doppler map.
///
/// Cells whose full window does not fit inside the map are never tested.
/// Detections come out in scan order (range bin, then Doppler bin). The
/// training sums use a summed-area table, so the cost is one pass over
/// the map regardless of window size.
pub fn ca_cfar_2d(map: &RangeDopplerMap, cfg: &CfarConfig) -> Result<Vec<Detection>, CfarError> {
    if cfg.train_half <= cfg.guard_half {
        return Err(CfarError::BadWindow { train_half: cfg.train_half, guard_half: cfg.guard_half });
    }
    let (rows, cols) = map.power.dim();
    let span = 2 * cfg.train_half + 1;
    if rows < span || cols < span {
        return Err(CfarError::MapTooSmall { rows, cols, span });
    }
    let m = cfg.training_cells();
    let a = threshold_factor(m, cfg.pfa)?;

    // sat[i][j] = sum of power over the [0, i) x [0, j) corner.
    let mut sat = Array2::<f64>::zeros((rows + 1, cols + 1));
    for i in 0..rows {
        for j in 0..cols {
            sat[[i + 1, j + 1]] =
                map.power[[i, j]] + sat[[i, j + 1]] + sat[[i + 1, j]] - sat[[i, j]];
        }
    }
    // Inclusive rectangle sum.
    let rect = |r0: usize, c0: usize, r1: usize, c1: usize| -> f64 {
        sat[[r1 + 1, c1 + 1]] - sat[[r0, c1 + 1]] - sat[[r1 + 1, c0]] + sat[[r0, c0]]
    };

    let (t, g) = (cfg.train_half, cfg.guard_half);
    let mut detections = Vec::new();
    for r in t..rows - t {
        for c in t..cols - t {
            let outer = rect(r - t, c - t, r + t, c + t);
            let inner = rect(r - g, c - g, r + g, c + g);
            let noise = (outer - inner) / m as f64;
            let threshold = a * noise;
            let power = map.power[[r, c]];
            if power > threshold {
                detections.push(Detection {
                    cpi_index: map.cpi_index,
                    range_bin: r,
                    doppler_bin: c,
                    range_m: map.range_at(r),
                    vel_mps: map.velocity_at(c),
                    cell_power: power,
                    threshold,
                });
            }
        }
    }
    Ok(detections)
}

/// Merges 8-connected detections (within one CPI) into clusters and keeps
/// each cluster's strongest cell. Already-isolated detections pass
/// through, so applying this twice changes nothing.
pub fn cluster_detections(detections: &[Detection]) -> Vec<Detection> {
    let index: HashMap<(usize, usize, usize), usize> = detections
        .iter()
        .enumerate()
        .map(|(i, d)| ((d.cpi_index, d.range_bin, d.doppler_bin), i))
        .collect();

    let mut visited = HashSet::new();
    let mut peaks = Vec::new();
    for start in 0..detections.len() {
        if visited.contains(&start) {
            continue;
        }
        // Flood fill over the 8-neighborhood, tracking the strongest cell.
        let mut stack = vec![start];
        visited.insert(start);
        let mut best = start;
        while let Some(i) = stack.pop() {
            if detections[i].cell_power > detections[best].cell_power {
                best = i;
            }
            let d = &detections[i];
            for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let r = d.range_bin as i64 + dr;
                    let c = d.doppler_bin as i64 + dc;
                    if r < 0 || c < 0 {
                        continue;
                    }
                    if let Some(&j) = index.get(&(d.cpi_index, r as usize, c as usize)) {
                        if visited.insert(j) {
                            stack.push(j);
                        }
                    }
                }
            }
        }
        peaks.push(detections[best].clone());
    }
    peaks.sort_by_key(|d| (d.cpi_index, d.range_bin, d.doppler_bin));
    peaks
}
