//! Optimal shift for the union of two copies of a lattice: rectangular
//! lattices are minimized by the half-cell shift, the hexagonal lattice by
//! its deep hole (giving the honeycomb).
//!
//! Run with: `cargo run --release --example union2_shift_optimum`

use lattice_energy::geometry::{GaussianPotential, Lattice};
use lattice_energy::{configs, optimize};

fn main() -> Result<(), lattice_energy::Error> {
    for alpha in [0.5, 2.0, 100.0] {
        let pot = GaussianPotential::raw(alpha)?;
        let rect = Lattice::diagonal(&[1.0, 2.0])?;
        let m = optimize::minimize_shift_union2(&rect, &pot, 1e-12, 64)?;
        println!(
            "rect diag(1,2), alpha={alpha:<6}: argmin (basis coords) = ({:.9}, {:.9}), E = {:.10}",
            m.argmin.coords()[0],
            m.argmin.coords()[1],
            m.energy.value
        );
    }
    println!();
    for alpha in [0.5, 2.0] {
        let pot = GaussianPotential::raw(alpha)?;
        let hex = configs::hexagonal_lattice_unit();
        let m = optimize::minimize_shift_union2(&hex, &pot, 1e-12, 64)?;
        println!(
            "hexagonal, alpha={alpha:<6}: argmin = ({:.9}, {:.9})  — a deep hole (m/3, m/3)",
            m.argmin.coords()[0],
            m.argmin.coords()[1]
        );
    }
    println!();
    let holes = configs::deep_holes(&configs::hexagonal_lattice_unit())?;
    for (i, h) in holes.iter().enumerate() {
        let t = configs::hexagonal_lattice_unit().basis_coords(h);
        println!("deep hole {i}: basis coords ({:.9}, {:.9})", t[0], t[1]);
    }
    Ok(())
}
