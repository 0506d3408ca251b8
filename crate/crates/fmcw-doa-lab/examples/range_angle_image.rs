//! Build a range-angle image: MUSIC evaluated at every range bin of one
//! CPI, exported as CSV and a 16-bit grayscale picture.
//!
//! Run with `cargo run --example range_angle_image`.

use fmcw_doa_lab::doa::range_angle_map;
use fmcw_doa_lab::io::{write_matrix_csv, write_pgm};
use fmcw_doa_lab::scene::parse_scenario;
use fmcw_doa_lab::specproc::{range_profile, Window};
use fmcw_doa_lab::synth::synthesize;
use ndarray::Axis;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = r#"{
        "radar": { "fc": 77.0e9, "B": 150.0e6, "T": 10.0e-6,
                   "n_samples": 256, "n_chirps": 256, "n_cpi": 1,
                   "snr_db": 20.0, "rng_seed": 7 },
        "array": { "n_rx": 8, "rx_spacing_wl": 0.5, "tx_offset_wl": 2.0 },
        "targets": [
            { "range_m": 50.0,  "vel_mps":  10.0, "angle_deg": -15.0 },
            { "range_m": 100.0, "vel_mps": -15.0, "angle_deg":  10.0 }
        ],
        "doa": { "grid_step_deg": 0.5 }
    }"#;
    let scenario = parse_scenario(text)?;
    let cube = synthesize(&scenario)?;
    let rp = range_profile(&cube, Window::Hann)?;

    let grid = scenario.doa.grid();
    let t0 = std::time::Instant::now();
    let image = range_angle_map(rp.index_axis(Axis(0), 0), &scenario.array, 1, &grid)?;
    println!(
        "{} range bins x {} angles in {:.2?}",
        image.nrows(),
        image.ncols(),
        t0.elapsed()
    );

    // The two brightest rows should be the target ranges, each peaking
    // at its own angle. Rows adjacent to one already taken are the same
    // target's mainlobe spill, so skip them.
    let mut rows: Vec<(usize, f64)> =
        image.axis_iter(Axis(0)).enumerate().map(|(r, row)| (r, row.sum())).collect();
    rows.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut picked: Vec<usize> = Vec::new();
    for &(bin, _) in rows.iter() {
        if picked.len() == 2 {
            break;
        }
        if picked.iter().any(|&p| bin.abs_diff(p) <= 2) {
            continue;
        }
        picked.push(bin);
    }
    picked.sort_unstable();
    for &bin in &picked {
        let row = image.index_axis(Axis(0), bin);
        let best = row.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap();
        println!(
            "range bin {bin} ({:.1} m): angle peak {:+.1} deg",
            bin as f64 * scenario.radar.range_resolution(),
            grid[best]
        );
    }

    let csv = std::env::temp_dir().join("fmcw-doa-lab-range-angle.csv");
    let pgm = std::env::temp_dir().join("fmcw-doa-lab-range-angle.pgm");
    write_matrix_csv(
        &csv,
        &image,
        &[
            ("rows", image.nrows().to_string()),
            ("cols", image.ncols().to_string()),
            ("angle_min_deg", grid[0].to_string()),
            ("angle_step_deg", scenario.doa.grid_step_deg.to_string()),
        ],
    )?;
    write_pgm(&pgm, &image)?;
    println!("wrote {} and {}", csv.display(), pgm.display());
    Ok(())
}
