//! Regularized Herglotz approximation of transmission eigenfunctions. On a
//! disk v is itself a Bessel wave and the density stays bounded; on the
//! square the corners force the density norm up as the regularization shrinks.
//!
//! cargo run --release --example herglotz_fit -- [cells] [V] [directions]

use translab::forward::Medium;
use translab::geometry::{Domain, GridSpec, Point};
use translab::herglotz::{density_growth_profile, DensityGrowthProfile, DirectionQuadrature};
use translab::probes::smallest_radial_root;
use translab::teig::{qep_assemble, qep_solve, radial_eigenpair, recover_pair, QepOptions};

fn show(name: &str, p: &DensityGrowthProfile) {
    println!("{name}");
    println!("{:>8} {:>12} {:>12}", "alpha", "rel error", "||g||");
    for r in &p.rows {
        println!("{:>8.0e} {:>12.3e} {:>12.4e}", r.alpha, r.relative_error, r.density_norm);
    }
    println!("growth ratio {:.3}, strictly increasing: {}\n", p.growth_ratio, p.norm_strictly_increasing);
}

fn main() -> translab::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let arg = |i: usize, d: f64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let (cells, v, n) = (arg(1, 40.0) as usize, arg(2, 2.0), arg(3, 64.0) as usize);
    let quad = DirectionQuadrature::new(n)?;
    let alphas: Vec<f64> = (2..=8).map(|e| 10f64.powi(-e)).collect();
    let h = 1.0 / cells as f64;

    let disk = Domain::disk(Point::ORIGIN, 0.5)?;
    let k = smallest_radial_root(0, 0.5, v)?;
    let (pair, _) = radial_eigenpair(0, k, 0.5, v, &GridSpec::covering(&disk, h, 3)?)?;
    show(&format!("disk, m = 0, k = {k:.5}"), &density_growth_profile(&pair.v, k, &quad, &alphas)?);

    let square = Medium::constant(Domain::square(Point::ORIGIN, 1.0)?, v)?;
    let spec = GridSpec::new(Point::new(-3.0 * h, -3.0 * h), h, cells + 7, cells + 7)?;
    let disc = qep_assemble(&square, &spec)?;
    let modes = qep_solve(&disc, (1.0, 400.0), usize::MAX, &QepOptions::default())?;
    if let Some(m) = modes.iter().find(|m| m.is_real()) {
        let pair = recover_pair(&m.w, m.lambda.re, &disc)?;
        show(&format!("square, k = {:.5}", pair.k), &density_growth_profile(&pair.v, pair.k, &quad, &alphas)?);
    }
    Ok(())
}
