//! Transmission-eigenvalue detection from far-field data: the probe-averaged
//! LSM indicator peaks where the far-field equation loses solvability.
//!
//! cargo run --release --example te_scan -- [k_min] [k_max] [h] [cell_average_sub] [eps_factor] [step]

use std::time::Instant;

use translab::forward::{ContrastSampling, Medium, SolverOptions};
use translab::geometry::{Domain, GridSpec, Point};
use translab::lsm::{te_scan, TeScanOptions};

fn main() -> translab::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let arg = |i: usize, d: f64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let (k_min, k_max, h) = (arg(1, 7.2), arg(2, 7.6), arg(3, 0.05));
    let sub = arg(4, 0.0) as usize;
    let (eps_factor, step) = (arg(5, 1e-3), arg(6, 0.02));

    let disk = Domain::disk(Point::ORIGIN, 1.0)?;
    let mut med = Medium::constant(disk.clone(), 1.0)?;
    if sub > 0 {
        med = med.with_sampling(ContrastSampling::CellAverage { sub })?;
    }
    let spec = GridSpec::covering(&disk, h, 3)?;
    // the centre sees radial modes, the rings see the higher orders
    let mut probes = vec![Point::ORIGIN];
    for r in [0.3, 0.6] {
        probes.extend((0..8).map(|i| Point::from_polar(r, i as f64 * std::f64::consts::FRAC_PI_4)));
    }

    let t0 = Instant::now();
    let scan = te_scan(
        &med,
        (k_min, k_max),
        step,
        &probes,
        &spec,
        &SolverOptions::default(),
        &TeScanOptions { eps_factor, ..Default::default() },
    )?;
    for (k, v) in scan.ks.iter().zip(&scan.curve) {
        println!("{k:.3}  {v:.5e}");
    }
    println!("median level {:.4e}", scan.median);
    for p in &scan.peaks {
        println!("peak at k = {:.4} (grid {:.3}), prominence {:.3e}", p.k, p.k_grid, p.prominence);
    }
    println!("elapsed {:.1} s", t0.elapsed().as_secs_f64());
    Ok(())
}
