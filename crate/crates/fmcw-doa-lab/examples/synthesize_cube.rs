//! Simulate a two-target automotive scene and store the raw data cube.
//!
//! Run with `cargo run --example synthesize_cube`.

use fmcw_doa_lab::io::{quantize_to_f32, sha256_hex, write_cube};
use fmcw_doa_lab::scene::parse_scenario;
use fmcw_doa_lab::synth::synthesize;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // 77 GHz sawtooth FMCW front end, 8-channel receive array, two
    // point targets. `snr_db` adds complex white noise per channel;
    // the seed makes the cube reproducible bit for bit.
    let text = r#"{
        "radar": { "fc": 77.0e9, "B": 150.0e6, "T": 10.0e-6,
                   "n_samples": 256, "n_chirps": 256, "n_cpi": 2,
                   "snr_db": 20.0, "rng_seed": 7 },
        "array": { "n_rx": 8, "rx_spacing_wl": 0.5, "tx_offset_wl": 2.0 },
        "targets": [
            { "range_m": 50.0,  "vel_mps":  10.0, "angle_deg": -15.0 },
            { "range_m": 100.0, "vel_mps": -15.0, "angle_deg":  10.0 }
        ]
    }"#;
    let scenario = parse_scenario(text)?;
    let radar = &scenario.radar;
    println!(
        "waveform: {:.0} GHz carrier, {:.0} MHz sweep, {:.0} us chirp",
        radar.fc / 1e9,
        radar.bandwidth / 1e6,
        radar.chirp_period * 1e6
    );
    println!(
        "resolution: {:.3} m in range (max {:.1} m), {:.3} m/s in velocity (max {:.1} m/s)",
        radar.range_resolution(),
        radar.max_range(),
        radar.velocity_resolution(),
        radar.max_velocity()
    );

    let t0 = std::time::Instant::now();
    let mut cube = synthesize(&scenario)?;
    let (n_cpi, n_rx, n_chirps, n_samples) = cube.dims();
    println!(
        "synthesized {n_cpi} CPI x {n_rx} channels x {n_chirps} chirps x {n_samples} samples in {:.2?}",
        t0.elapsed()
    );

    // Two unit targets plus 20 dB noise: mean power sits near 2.01.
    let mean_power: f64 =
        cube.data.iter().map(|v| v.norm_sqr()).sum::<f64>() / cube.data.len() as f64;
    println!("mean sample power {mean_power:.4} (two unit targets + noise)");

    // The file format stores each component as f32; quantizing in memory
    // first keeps later stages identical whether they reload or not.
    quantize_to_f32(&mut cube);
    let path = std::env::temp_dir().join("fmcw-doa-lab-cube.bin");
    write_cube(&path, &cube)?;
    let bytes = std::fs::read(&path)?;
    println!("wrote {} ({} bytes, sha256 {})", path.display(), bytes.len(), &sha256_hex(&bytes)[..16]);
    Ok(())
}
