//! Boundary localization of disk transmission eigenfunctions: the share of
//! the L² mass within eps of the boundary for growing angular order.
//!
//! cargo run --release --example surface_localization -- [m_max] [eps] [h] [V]

use translab::forward::Medium;
use translab::geometry::{Domain, GridSpec, Point};
use translab::probes::localization_scan;

fn main() -> translab::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let arg = |i: usize, d: f64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let (m_max, eps, h, v) = (arg(1, 30.0) as usize, arg(2, 0.1), arg(3, 0.02), arg(4, 1.0));

    let med = Medium::constant(Domain::disk(Point::ORIGIN, 1.0)?, v)?;
    let spec = GridSpec::covering(&med.domain, h, 3)?;
    println!("{:>3} {:>10} {:>8} {:>8} {:>8}", "m", "k", "rho(u)", "rho(v)", "max");
    for r in localization_scan(&med, m_max, eps, &spec)? {
        println!("{:>3} {:>10.4} {:>8.3} {:>8.3} {:>8.3}", r.m, r.k, r.rho_u, r.rho_v, r.running_max);
    }
    Ok(())
}
