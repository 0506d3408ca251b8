//! Time the three angle estimators on the same snapshots and show what
//! each one sees: the beam scan is fastest but merges close targets,
//! the subspace and sparse methods split them.
//!
//! Run with `cargo run --example compare_methods`.

use fmcw_doa_lab::cfar::{ca_cfar_2d, cluster_detections};
use fmcw_doa_lab::doa::{
    build_dictionary, covariance, cs_angle_spectrum, extract_snapshots, fft_angle_spectrum,
    music_pseudospectrum, AngleSpectrum,
};
use fmcw_doa_lab::scene::parse_scenario;
use fmcw_doa_lab::specproc::{range_doppler, range_profile, Window};
use fmcw_doa_lab::synth::synthesize;
use std::time::Instant;

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
    let snap = extract_snapshots(&rp, &detections[0])?;

    let array = &scenario.array;
    let doa = &scenario.doa;
    let dict = build_dictionary(&doa.cs_grid(), array);
    let grid = doa.grid();

    // Resolved means each truth angle has its own peak within half the
    // separation; a lone mainlobe or a peak plus sidelobe does not count.
    let truths = [-2.0, 3.0];
    let report = move |name: &str, seconds: f64, spec: &AngleSpectrum| {
        let mut angles: Vec<f64> = spec.top_peaks(2).iter().map(|p| p.angle_deg).collect();
        angles.sort_by(f64::total_cmp);
        let list = angles.iter().map(|a| format!("{a:+.1}")).collect::<Vec<_>>().join(", ");
        let mut used = [false; 2];
        let hits = truths
            .iter()
            .filter(|&&t| {
                for (i, &a) in angles.iter().enumerate() {
                    if !used[i] && (a - t).abs() <= 2.5 {
                        used[i] = true;
                        return true;
                    }
                }
                false
            })
            .count();
        println!(
            "{name:<6} {seconds:>9.4} s   peaks [{list}] deg   {}",
            if hits == 2 { "resolved" } else { "merged" }
        );
    };

    println!("two equal targets at -2 and +3 deg, one range-Doppler cell:");
    let t = Instant::now();
    let fft = fft_angle_spectrum(&snap, array, doa.fft_size)?;
    report("fft", t.elapsed().as_secs_f64(), &fft);

    let t = Instant::now();
    let music = music_pseudospectrum(&covariance(&snap), 2, &grid, array)?;
    report("music", t.elapsed().as_secs_f64(), &music);

    let t = Instant::now();
    let cs = cs_angle_spectrum(&snap, &dict, doa)?;
    report("cs", t.elapsed().as_secs_f64(), &cs);
    Ok(())
}
