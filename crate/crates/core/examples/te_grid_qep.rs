//! Transmission eigenvalues on a grid from the clamped fourth-order pencil,
//! compared with the disk oracle when the domain is a disk.
//!
//! cargo run --release --example te_grid_qep -- [disk|square] [cells_per_unit] [V] [modes]

use std::time::Instant;

use translab::forward::Medium;
use translab::geometry::{Domain, GridSpec, Point};
use translab::teig::{qep_assemble, qep_solve, radial_te_roots, recover_pair, QepOptions};

fn main() -> translab::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let shape = args.get(1).map(String::as_str).unwrap_or("disk");
    let cells: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(20);
    let v: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let modes: usize = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(6);

    let (domain, spec, lambda_guess) = match shape {
        "square" => {
            let d = Domain::square(Point::ORIGIN, 1.0)?;
            // nodes on the edges, three margin cells
            let h = 1.0 / cells as f64;
            let spec = GridSpec::new(Point::new(-3.0 * h, -3.0 * h), h, cells + 7, cells + 7)?;
            (d, spec, None)
        }
        _ => {
            let d = Domain::disk(Point::ORIGIN, 1.0)?;
            let spec = GridSpec::covering(&d, 1.0 / cells as f64, 3)?;
            let roots = radial_te_roots(30, 0.5, 20.0, 1.0, v)?;
            (d, spec, roots.first().map(|r| r.k * r.k))
        }
    };
    let med = Medium::constant(domain, v)?;
    let t0 = Instant::now();
    let disc = qep_assemble(&med, &spec)?;
    let window = match lambda_guess {
        Some(l) => (0.5 * l, 3.0 * l),
        None => (1.0, 400.0),
    };
    println!("{shape}: {} unknowns, window [{:.2}, {:.2}]", disc.dim(), window.0, window.1);
    let found = qep_solve(&disc, window, usize::MAX, &QepOptions::default())?;
    println!("solve {:.1} s", t0.elapsed().as_secs_f64());
    if let Some(l) = lambda_guess {
        println!("oracle smallest λ = {l:.5} (k = {:.5})", l.sqrt());
    }
    let complex: Vec<_> = found.iter().filter(|m| !m.is_real()).collect();
    println!("{} eigenvalues in window, {} complex", found.len(), complex.len());
    for m in complex.iter().filter(|m| m.lambda.im > 0.0) {
        println!("  complex pair {:.5} ± {:.5}i", m.lambda.re, m.lambda.im);
    }
    for m in found.iter().filter(|m| m.is_real()).take(modes) {
        let pair = recover_pair(&m.w, m.lambda.re, &disc)?;
        let r = pair.residuals.as_ref().unwrap();
        println!(
            "λ = {:.5}  k = {:.5}  pencil res {:.2e}  pde {:.2e}/{:.2e}  trace {:.2e}/{:.2e}",
            m.lambda.re,
            m.lambda.re.sqrt(),
            m.residual,
            r.pde_u,
            r.pde_v,
            r.trace_dirichlet,
            r.trace_neumann
        );
    }
    Ok(())
}
