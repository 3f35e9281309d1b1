//! The square lattice beats the unit-density lattice that arises from the
//! three-shift union Z^2 + {0, (1/3,1/3), (2/3,2/3)}. For widths below 1
//! the margin is transported by the exact self-duality of unit-covolume
//! lattices, margin(alpha) = margin(1/alpha) / alpha.
//!
//! Run with: `cargo run --release --example square_vs_gamma_x0`

use lattice_energy::energy;
use lattice_energy::geometry::{GaussianPotential, Lattice, PeriodicConfig};
use lattice_energy::{configs, verify};

fn main() -> Result<(), lattice_energy::Error> {
    let gamma = configs::gamma_x0_lattice();
    println!("gamma_x0 covolume = {:.12}", gamma.covolume());
    let alt = Lattice::from_columns(&[
        vec![(2.0 / 3.0_f64).sqrt(), 0.0],
        vec![(2.0 / 3.0_f64).sqrt() * 0.5, (2.0 / 3.0_f64).sqrt() * 1.5],
    ])?;
    println!(
        "congruent to sqrt(2/3) [[1, 1/2], [0, 3/2]] Z^2: {}",
        gamma.congruent(&alt, 1e-12)?
    );

    println!("\nalpha (pi-scaled) | margin E(gamma_x0) - E(Z^2) | budget | lower-bound surplus");
    for alpha in verify::default_alpha_grid(13) {
        let (margin, budget) = verify::square_gamma_margin(alpha, 1e-12)?;
        let (lb, _, _) = verify::gamma_x0_lower_bound_margin(alpha);
        println!("  {alpha:<12.4e} {margin:>14.6e} {budget:>12.3e} {lb:>14.6e}");
    }

    println!("\nplain energies at alpha = 1:");
    let pot = GaussianPotential::pi_scaled(1.0)?;
    let e_sq = energy::energy_direct(&PeriodicConfig::lattice_only(Lattice::integer(2)), &pot, 1e-12)?;
    let e_g = energy::energy_direct(&PeriodicConfig::lattice_only(gamma), &pot, 1e-12)?;
    println!("  E(Z^2)       = {:.12}", e_sq.value);
    println!("  E(gamma_x0)  = {:.12}", e_g.value);
    Ok(())
}
