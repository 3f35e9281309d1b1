//! Cartesian products of one-dimensional configurations factor:
//! E(product) = prod_m (E_m + 1) - 1. Among cuboid lattices of fixed
//! covolume the square is optimal.
//!
//! Run with: `cargo run --release --example tensor_products`

use lattice_energy::energy;
use lattice_energy::geometry::{GaussianPotential, Lattice, PeriodicConfig};
use lattice_energy::configs;
use nalgebra::DVector;

fn main() -> Result<(), lattice_energy::Error> {
    let pot = GaussianPotential::raw(1.0)?;

    // a two-shift 1D factor times a plain 1D lattice
    let line_a = PeriodicConfig::new(
        Lattice::diagonal(&[1.0])?,
        vec![DVector::zeros(1), DVector::from_vec(vec![0.4])],
    )?;
    let line_b = PeriodicConfig::lattice_only(Lattice::diagonal(&[1.5])?);
    let factors = vec![line_a, line_b];
    let tensor = energy::energy_tensor(&factors, &pot, 1e-12)?;
    let product = configs::tensor_product(&factors)?;
    let direct = energy::energy_direct(&product, &pot, 1e-12)?;
    println!("two-shift line x scaled line:");
    println!("  tensor route {:.14}", tensor.value);
    println!("  direct route {:.14}", direct.value);
    println!("  gap          {:.2e}", (tensor.value - direct.value).abs());

    println!("\ncuboid scan at fixed covolume (diag(beta, 1/beta)), raw alpha = 1:");
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..21 {
        let beta = 10f64.powf(-0.3 + 0.6 * i as f64 / 20.0);
        let factors = vec![
            PeriodicConfig::lattice_only(Lattice::diagonal(&[beta])?),
            PeriodicConfig::lattice_only(Lattice::diagonal(&[1.0 / beta])?),
        ];
        let e = energy::energy_tensor(&factors, &pot, 1e-12)?.value;
        if e < best.0 {
            best = (e, beta);
        }
        println!("  beta = {beta:.4}   E = {e:.10}");
    }
    println!("minimum at beta = {:.4} (the square lattice)", best.1);
    Ok(())
}
