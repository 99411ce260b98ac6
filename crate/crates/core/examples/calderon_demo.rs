//! Contrast recovery from products of complex geometrical optics solutions
//! on a periodic grid, with the algebraic checks on the CGO vectors.
//!
//! cargo run --release --example calderon_demo -- [n] [amplitude] [radius]

use translab::geometry::{GridSpec, Point};
use translab::probes::cgo::bilinear;
use translab::probes::{calderon_recover, cgo_pair, smooth_bump, XiLattice};

fn main() -> translab::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let arg = |i: usize, d: f64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let (n, amplitude, radius) = (arg(1, 32.0) as usize, arg(2, 1.5), arg(3, 0.6));

    let spec = GridSpec::new(Point::new(-1.0, -1.0), 2.0 / n as f64, n, n)?;
    let dv = smooth_bump(&spec, Point::new(0.1, -0.15), radius, amplitude);
    let lattice = XiLattice::conjugate(&spec);
    let res = calderon_recover(&spec, &dv, &lattice)?;
    println!("{n}x{n} grid, lattice spacing ({:.4}, {:.4})", lattice.dxi, lattice.dyi);
    println!("relative L2 error {:.2e}, imaginary residue {:.2e}", res.relative_error, res.imaginary_residue);

    for xi in [Point::new(1.0, 0.0), Point::new(3.0, -4.0), Point::new(50.0, 20.0)] {
        let c = cgo_pair(xi);
        println!(
            "ξ = ({:>5}, {:>5}): ρ1·ρ1 = {:.1e}, ρ2·ρ2 = {:.1e}, |ρ1 + ρ2 - iξ| = {:.1e}",
            xi.x,
            xi.y,
            bilinear(c.rho1, c.rho1).norm(),
            bilinear(c.rho2, c.rho2).norm(),
            ((c.rho1[0] + c.rho2[0]).im - xi.x).hypot((c.rho1[1] + c.rho2[1]).im - xi.y)
        );
    }
    Ok(())
}
