//! Transmission eigenvalues of a disk by separation of variables, with the
//! residuals of the sampled eigenpairs on a few grids.
//!
//! cargo run --release --example te_radial -- [V] [radius] [k_max] [m_max]

use translab::forward::Medium;
use translab::geometry::{Domain, GridSpec, Point};
use translab::teig::{radial_eigenpair, radial_te_roots, te_residual};

fn main() -> translab::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let arg = |i: usize, d: f64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let (v, radius, k_max, m_max) = (arg(1, 1.0), arg(2, 1.0), arg(3, 12.0), arg(4, 10.0) as usize);

    let roots = radial_te_roots(m_max, 0.5 / radius, k_max, radius, v)?;
    println!("{:>3} {:>12} {:>10}", "m", "k", "|d_m(k)|");
    for r in &roots {
        println!("{:>3} {:>12.8} {:>10.1e}", r.m, r.k, r.residual);
    }

    let med = Medium::constant(Domain::disk(Point::ORIGIN, radius)?, v)?;
    let Some(first) = roots.first() else {
        println!("no roots below k = {k_max}");
        return Ok(());
    };
    println!("\nresiduals of the m = {} pair at k = {:.6}", first.m, first.k);
    println!("{:>7} {:>10} {:>10} {:>10}", "h", "pde", "dirichlet", "neumann");
    for h in [0.04, 0.02, 0.01] {
        let spec = GridSpec::covering(&med.domain, h * radius, 3)?;
        let (pair, _) = radial_eigenpair(first.m, first.k, radius, v, &spec)?;
        let res = te_residual(&pair, &med, first.k)?;
        println!("{h:>7} {:>10.3e} {:>10.3e} {:>10.3e}", res.pde(), res.trace_dirichlet, res.trace_neumann);
    }
    Ok(())
}
