//! Far-field matrix of a penetrable disk: reciprocity, rotational symmetry
//! and a JSON round trip.
//!
//! cargo run --release --example far_field_matrix -- [k] [V] [directions] [h]

use translab::cli_io::{far_field_json, parse_far_field_json};
use translab::forward::{Medium, SolverOptions};
use translab::geometry::{Domain, GridSpec, Point};
use translab::herglotz::{assemble_far_field_matrix, DirectionQuadrature};

fn main() -> translab::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let arg = |i: usize, d: f64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let (k, v, n, h) = (arg(1, 2.0), arg(2, 1.0), arg(3, 32.0) as usize, arg(4, 0.05));

    let med = Medium::constant(Domain::disk(Point::ORIGIN, 1.0)?, v)?;
    let spec = GridSpec::covering(&med.domain, h, 3)?;
    let quad = DirectionQuadrature::new(n)?;
    let f = assemble_far_field_matrix(&med, k, &quad, &spec, &SolverOptions::default())?;

    println!("N = {n}, ||F||_F = {:.6}", f.frobenius());
    println!("reciprocity defect  {:.2e}", f.reciprocity_defect()?);
    // a centred disk makes F circulant up to discretization
    println!("circulant defect    {:.2e}", f.circulant_defect());
    println!("forward scattering  F(0,0) = {:.6}", f.get(0, 0));
    println!("backscattering      F(N/2,0) = {:.6}", f.get(n / 2, 0));

    let text = far_field_json(&f);
    let back = parse_far_field_json(&text)?;
    println!("JSON: {} bytes, round trip exact: {}", text.len(), back.entries == f.entries);
    Ok(())
}
