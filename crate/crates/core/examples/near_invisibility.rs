//! Near-invisibility at a transmission eigenvalue: Herglotz waves that
//! approximate the eigenfunction v scatter almost nothing, while a generic
//! Herglotz wave at another wavenumber does.
//!
//! cargo run --release --example near_invisibility -- [V] [m] [h] [directions]

use num_complex::Complex64;
use translab::forward::{Medium, SolverOptions};
use translab::geometry::{Domain, GridSpec, Point};
use translab::herglotz::{DirectionQuadrature, FitProblem, HerglotzDensity};
use translab::probes::{smallest_radial_root, InvisibilityProbe};
use translab::teig::radial_eigenpair;

fn main() -> translab::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let arg = |i: usize, d: f64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let (v, m, h, n) = (arg(1, 1.0), arg(2, 0.0) as usize, arg(3, 0.05), arg(4, 64.0) as usize);

    let med = Medium::constant(Domain::disk(Point::ORIGIN, 1.0)?, v)?;
    let spec = GridSpec::covering(&med.domain, h, 3)?;
    let quad = DirectionQuadrature::new(n)?;
    let opts = SolverOptions::default();

    let k = smallest_radial_root(m, 1.0, v)?;
    let (pair, _) = radial_eigenpair(m, k, 1.0, v, &spec)?;
    let problem = FitProblem::new(&pair.v, k, &quad)?;
    let probe = InvisibilityProbe::new(&med, k, &spec, &opts, n, Some(&[k]))?;
    println!("k = {k:.6} (m = {m})");
    println!("{:>8} {:>12} {:>12} {:>12}", "alpha", "fit error", "||g||", "||u_inf||");
    for e in 2..=6 {
        let fit = problem.solve(10f64.powi(-e))?;
        let rep = probe.defect(&fit.density, fit.error)?;
        println!("{:>8.0e} {:>12.3e} {:>12.4e} {:>12.4e}", fit.alpha, fit.relative_error, rep.density_norm, rep.far_field_norm);
    }

    // plane-wave superposition g ≡ 1 away from any eigenvalue
    let control_k = k + 2.0;
    let g = HerglotzDensity::from_fn(quad, |_| Complex64::new(1.0, 0.0));
    let rep = InvisibilityProbe::new(&med, control_k, &spec, &opts, n, None)?.defect(&g, 0.0)?;
    println!("control g = 1 at k = {control_k:.3}: ||u_inf|| = {:.4e}", rep.far_field_norm);
    Ok(())
}
