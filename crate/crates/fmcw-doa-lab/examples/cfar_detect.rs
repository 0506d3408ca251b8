//! Run the cell-averaging CFAR detector over a range-Doppler map and
//! merge the hits into one detection per target.
//!
//! Run with `cargo run --example cfar_detect`.

use fmcw_doa_lab::cfar::{ca_cfar_2d, cluster_detections, threshold_factor};
use fmcw_doa_lab::io::db;
use fmcw_doa_lab::scene::parse_scenario;
use fmcw_doa_lab::specproc::{range_doppler, Window};
use fmcw_doa_lab::synth::synthesize;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = r#"{
        "radar": { "fc": 77.0e9, "B": 150.0e6, "T": 10.0e-6,
                   "n_samples": 256, "n_chirps": 256, "n_cpi": 1,
                   "snr_db": 20.0, "rng_seed": 7 },
        "array": { "n_rx": 8 },
        "targets": [
            { "range_m": 50.0,  "vel_mps":  10.0, "angle_deg": -15.0 },
            { "range_m": 100.0, "vel_mps": -15.0, "angle_deg":  10.0 }
        ],
        "cfar": { "guard_half": 2, "train_half": 4, "pfa": 1.0e-3 }
    }"#;
    let scenario = parse_scenario(text)?;
    let cfg = &scenario.cfar;

    // 9x9 window minus 5x5 guard block = 56 training cells. The factor
    // scales their mean so that pure noise crosses it with rate pfa.
    let m = cfg.training_cells();
    let a = threshold_factor(m, cfg.pfa)?;
    println!("{m} training cells, pfa {:.0e} -> threshold factor {a:.3} ({:.2} dB)", cfg.pfa, db(a));

    let cube = synthesize(&scenario)?;
    let (maps, _) = range_doppler(&cube, Window::Hann)?;
    let raw = ca_cfar_2d(&maps[0], cfg)?;
    let clustered = cluster_detections(&raw);
    println!("{} cells over threshold, {} clusters after merging", raw.len(), clustered.len());

    println!("{:>10} {:>10} {:>10} {:>12}", "range", "velocity", "power", "margin");
    for det in &clustered {
        println!(
            "{:>8.1} m {:>7.2} m/s {:>7.1} dB {:>9.1} dB",
            det.range_m,
            det.vel_mps,
            db(det.cell_power),
            db(det.cell_power / det.threshold)
        );
    }
    for t in &scenario.targets {
        println!("truth: {:.1} m, {:+.1} m/s", t.range_m, t.vel_mps);
    }
    Ok(())
}
