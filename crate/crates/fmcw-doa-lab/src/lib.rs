//! Multi-channel FMCW radar simulation and estimation toolkit.
//!
//! # Overview
//!
//! This crate simulates the beat signal of a sawtooth FMCW radar with one
//! transmitter and a uniform linear receive array, then recovers target
//! range, radial velocity, and direction of arrival from that signal:
//!
//! ```text
//!   scene ──► synth ──► specproc ──► cfar ──► doa
//!   (JSON)   (data     (range /     (CA-CFAR  (FFT beam scan,
//!            cube)      Doppler      cells)    MUSIC, sparse
//!                       maps)                  recovery)
//! ```
//!
//! * [`scene`]: scenario configuration, which is waveform constants, array
//!   geometry, target truth, detector and estimator settings.
//! * [`synth`]: beat-signal model and data-cube synthesis with
//!   reproducible noise.
//! * [`specproc`]: radix-2 FFT kernel, range profiles, range-Doppler maps.
//! * [`cfar`]: cell-averaging CFAR detection on the power maps.
//! * [`doa`]: angle estimation from array snapshots via FFT beamforming,
//!   MUSIC with a hand-rolled Hermitian eigensolver, and an l1-regularized
//!   sparse solver on a steering dictionary.
//! * [`io`]: binary cube files, CSV/PGM exports, SVG spectrum plots.
//! * [`pipeline`]: staged runner behind the `fmcw-doa-lab` binary.
//!
//! The `examples/` directory exercises every stage on a bundled two-target
//! automotive scenario; each example is runnable on its own.
//!
//! # Example
//!
//! ```
//! use fmcw_doa_lab::{scene, synth, specproc};
//!
//! let text = r#"{
//!     "radar": { "fc": 77.0e9, "B": 150.0e6, "T": 10.0e-6,
//!                "n_samples": 64, "n_chirps": 16, "n_cpi": 1 },
//!     "array": { "n_rx": 4 },
//!     "targets": [ { "range_m": 20.0, "vel_mps": 5.0, "angle_deg": 12.0 } ]
//! }"#;
//! let scenario = scene::parse_scenario(text).unwrap();
//! assert!(scene::validate(&scenario).is_empty());
//!
//! let cube = synth::synthesize(&scenario).unwrap();
//! let (maps, _rd) = specproc::range_doppler(&cube, specproc::Window::Rect).unwrap();
//! let (range_bin, _, _) = maps[0].peak();
//! let expected = (20.0 / scenario.radar.range_resolution()).round() as usize;
//! assert_eq!(range_bin, expected);
//! ```

pub mod cfar;
pub mod doa;
pub mod io;
pub mod pipeline;
pub mod scene;
pub mod specproc;
pub mod synth;

/// Propagation speed used for every range/Doppler conversion, in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
