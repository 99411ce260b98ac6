//! Corner probes on the unit square: ball averages of |v| at each corner
//! against an interior reference, for the first few real transmission
//! eigenfunctions.
//!
//! cargo run --release --example corner_vanishing -- [cells] [V] [modes]

use translab::forward::Medium;
use translab::geometry::{corners, Domain, GridSpec, Point};
use translab::probes::corner::min_admissible_radius;
use translab::probes::corner_profile;
use translab::teig::{qep_assemble, qep_solve, recover_pair, QepOptions};

fn main() -> translab::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let arg = |i: usize, d: f64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let (cells, v, modes) = (arg(1, 40.0) as usize, arg(2, 2.0), arg(3, 5.0) as usize);

    let domain = Domain::square(Point::ORIGIN, 1.0)?;
    let h = 1.0 / cells as f64;
    let spec = GridSpec::new(Point::new(-3.0 * h, -3.0 * h), h, cells + 7, cells + 7)?;
    let med = Medium::constant(domain.clone(), v)?;
    let disc = qep_assemble(&med, &spec)?;
    let found = qep_solve(&disc, (1.0, 400.0), usize::MAX, &QepOptions::default())?;

    for m in found.iter().filter(|m| m.is_real()).take(modes) {
        let pair = recover_pair(&m.w, m.lambda.re, &disc)?;
        // the smallest ball must still hold enough nodes at every corner
        let cs = corners(&domain);
        let r_min = cs.iter().map(|c| min_admissible_radius(&pair.v, c.vertex)).fold(0.05, f64::max);
        let radii = [0.2, 0.1, r_min];
        print!("k = {:.4}  corner/interior at r = {r_min:.4}:", pair.k);
        for c in cs {
            let prof = corner_profile(&pair.v, &domain, &c, &radii)?;
            print!("  {:.3}", prof.corner_to_interior()[2]);
        }
        println!();
    }
    Ok(())
}
