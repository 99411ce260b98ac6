//! Linear Sampling reconstruction of a unit disk from synthetic far-field data.
//!
//! cargo run --release --example lsm_imaging -- [k] [h] [noise]

use std::time::Instant;

use translab::forward::{Medium, SolverOptions};
use translab::geometry::{Domain, GridSpec, Point};
use translab::herglotz::{assemble_far_field_matrix, DirectionQuadrature};
use translab::lsm::{add_relative_noise, classify, indicator_map, jaccard, median, Cutoff, SamplingMesh};

fn main() -> translab::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let k: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2.0);
    let h: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0.05);
    let noise: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0.0);

    let t0 = Instant::now();
    let disk = Domain::disk(Point::ORIGIN, 1.0)?;
    let med = Medium::constant(disk.clone(), 1.0)?;
    let spec = GridSpec::covering(&disk, h, 3)?;
    let quad = DirectionQuadrature::new(64)?;
    let mut f = assemble_far_field_matrix(&med, k, &quad, &spec, &SolverOptions::default())?;
    if noise > 0.0 {
        f = add_relative_noise(&f, noise, 1);
    }
    println!("far-field matrix: circulant defect {:.2e}, reciprocity defect {:.2e}", f.circulant_defect(), f.reciprocity_defect()?);

    let mesh = SamplingMesh::square(-2.0, 2.0, 41)?;
    let mut res = indicator_map(&f, &mesh, None)?;
    let (mask, c0) = classify(&mut res, Cutoff::Auto)?;
    let truth: Vec<bool> = mesh.points().iter().map(|&z| disk.contains(z)).collect();

    let inside: Vec<f64> = res.indicator.iter().zip(&truth).filter(|(_, &t)| t).map(|(v, _)| *v).collect();
    let outside: Vec<f64> = res.indicator.iter().zip(&truth).filter(|(_, &t)| !t).map(|(v, _)| *v).collect();
    println!("eps = {:.3e}, cutoff = {c0:.4e}", res.eps);
    println!("median I inside {:.4e}, outside {:.4e}", median(&inside), median(&outside));
    println!("Jaccard(mask, disk) = {:.3}", jaccard(&mask, &truth));

    for j in (0..41).step_by(2).rev() {
        let row: String = (0..41).map(|i| if mask[j * 41 + i] { '#' } else { '.' }).collect();
        println!("{row}");
    }
    println!("elapsed {:.1} s", t0.elapsed().as_secs_f64());
    Ok(())
}
