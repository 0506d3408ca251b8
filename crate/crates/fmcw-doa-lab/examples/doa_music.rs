//! Subspace direction finding: estimate the snapshot covariance, split
//! signal from noise eigenvectors, and scan the MUSIC pseudospectrum.
//!
//! Two targets sit in the same range bin only 5 degrees apart, closer
//! than the array beamwidth, which is exactly where the subspace method
//! earns its keep. The small velocity split keeps their chirp-to-chirp
//! phases decorrelated; two perfectly coherent returns would collapse
//! the covariance to rank one and hide the second source.
//!
//! Run with `cargo run --example doa_music`.

use fmcw_doa_lab::cfar::{ca_cfar_2d, cluster_detections};
use fmcw_doa_lab::doa::{covariance, extract_snapshots, hermitian_eig, music_pseudospectrum};
use fmcw_doa_lab::scene::parse_scenario;
use fmcw_doa_lab::specproc::{range_doppler, range_profile, Window};
use fmcw_doa_lab::synth::synthesize;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = r#"{
        "radar": { "fc": 77.0e9, "B": 150.0e6, "T": 10.0e-6,
                   "n_samples": 256, "n_chirps": 256, "n_cpi": 1,
                   "snr_db": 20.0, "rng_seed": 3 },
        "array": { "n_rx": 8, "rx_spacing_wl": 0.5, "tx_offset_wl": 2.0 },
        "targets": [
            { "range_m": 60.0, "vel_mps": 0.0, "angle_deg": -2.0 },
            { "range_m": 60.0, "vel_mps": 0.7, "angle_deg":  3.0 }
        ],
        "doa": { "music_sources": 2 }
    }"#;
    let scenario = parse_scenario(text)?;
    let cube = synthesize(&scenario)?;
    let (maps, _) = range_doppler(&cube, Window::Hann)?;
    let rp = range_profile(&cube, Window::Hann)?;
    let detections = cluster_detections(&ca_cfar_2d(&maps[0], &scenario.cfar)?);
    println!("{} detection(s); both targets share one cell", detections.len());

    let snap = extract_snapshots(&rp, &detections[0])?;
    let r = covariance(&snap);

    // The eigenvalue ladder shows the model order: two source
    // eigenvalues well above six noise-level ones.
    let (values, _) = hermitian_eig(&r)?;
    let ratios: Vec<String> = values.iter().map(|v| format!("{:.1}", v / values[7])).collect();
    println!("eigenvalue spread (vs smallest): {}", ratios.join(", "));

    let d = scenario.doa.music_sources.unwrap_or(1);
    let spec = music_pseudospectrum(&r, d, &scenario.doa.grid(), &scenario.array)?;
    let mut angles: Vec<f64> = spec.top_peaks(d).iter().map(|p| p.angle_deg).collect();
    angles.sort_by(f64::total_cmp);
    println!(
        "pseudospectrum peaks: {} deg (truth -2 and +3, grid step {} deg)",
        angles.iter().map(|a| format!("{a:+.1}")).collect::<Vec<_>>().join(", "),
        scenario.doa.grid_step_deg
    );
    Ok(())
}
