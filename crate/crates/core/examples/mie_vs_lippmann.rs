//! Lippmann–Schwinger solve for a plane wave on the unit disk, compared with
//! the exact Mie series.
//!
//! cargo run --release --example mie_vs_lippmann -- [h] [cell_average_sub]

use std::time::Instant;

use num_complex::Complex64;
use translab::forward::{
    far_field, solve_scattering, ComplexField2D, ContrastSampling, IncidentField, Medium, MieDisk, SolverOptions,
};
use translab::geometry::{Domain, GridSpec, Point};

fn main() -> translab::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let h: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.02);
    let sub: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0);
    let (k, v) = (2.0, 1.0);

    let disk = Domain::disk(Point::ORIGIN, 1.0)?;
    let mut med = Medium::constant(disk.clone(), v)?;
    if sub > 0 {
        med = med.with_sampling(ContrastSampling::CellAverage { sub })?;
    }
    let spec = GridSpec::covering(&disk, h, 3)?;
    let inc = IncidentField::plane_wave_angle(0.0);

    let t0 = Instant::now();
    let sol = solve_scattering(&med, k, &inc, &spec, &SolverOptions::default())?;
    let elapsed = t0.elapsed().as_secs_f64();

    let mie = MieDisk::new(1.0, v, k, Point::new(1.0, 0.0), 30)?;
    let exact = ComplexField2D::from_fn(spec, sol.scattered.mask.clone(), |p| mie.total(p) - mie.incident(p));
    let all = vec![true; spec.len()];
    let err_us = sol.scattered.relative_error_on(&exact, &all)?;

    let dirs = translab::forward::equispaced_directions(128);
    let ff = far_field(&med, k, &sol.total, &dirs)?;
    let (mut num, mut den) = (0.0, 0.0);
    for (d, f) in dirs.iter().zip(&ff) {
        let e = mie.far_field(d.angle());
        num += (f - e).norm_sqr();
        den += e.norm_sqr();
    }
    let err_ff = (num / den).sqrt();

    println!("h = {h}, unknowns = {}, method = {:?}", sol.report.unknowns, sol.report.method);
    println!("iterations = {}, residual = {:.2e}", sol.report.iterations, sol.report.relative_residual);
    println!("scattered-field rel. L2 error = {err_us:.4}");
    println!("far-field rel. L2 error       = {err_ff:.4}");
    println!("u_inf(0) computed {:.5}, exact {:.5}", ff[0], mie.far_field(0.0));
    println!("solve time {elapsed:.1} s");
    let _ = Complex64::new(0.0, 0.0);
    Ok(())
}
