//! Three shifted copies of the square lattice: the objective F, its
//! critical points, and the comparison at alpha = 3.5 where a non-critical
//! configuration beats the critical one.
//!
//! Run with: `cargo run --release --example union3_critical_points`

use lattice_energy::energy;
use lattice_energy::geometry::GaussianPotential;
use lattice_energy::optimize::{self, TorusPoint};
use lattice_energy::configs;

fn main() -> Result<(), lattice_energy::Error> {
    println!("critical residuals of the symmetric equations (should vanish):");
    for alpha in [0.5, 2.0, 30.0] {
        for point in [[1.0 / 3.0, 1.0 / 3.0], [1.0 / 3.0, 2.0 / 3.0]] {
            let r = optimize::critical_residual(&TorusPoint::new(point.to_vec()), alpha, 1e-12)?;
            println!(
                "  alpha={alpha:<5} x=({:.4}, {:.4}): residual = ({:+.2e}, {:+.2e})",
                point[0], point[1], r[0], r[1]
            );
        }
    }
    let r = optimize::critical_residual(&TorusPoint::new(vec![0.25, 0.5]), 3.5, 1e-12)?;
    println!(
        "  alpha=3.5   z=(0.25, 0.50): residual = ({:+.2e}, {:+.2e})  — not critical",
        r[0], r[1]
    );

    println!("\nenergies at alpha = 3.5 (pi-scaled, density 3):");
    let pot = GaussianPotential::pi_scaled(3.5)?;
    let crit = configs::union3_square([1.0 / 3.0, 1.0 / 3.0], [2.0 / 3.0, 2.0 / 3.0])?;
    let z = configs::union3_square([0.25, 0.5], [0.75, 0.5])?;
    println!(
        "  critical pair (1/3,1/3),(2/3,2/3): E = {:.6}",
        energy::energy_direct(&crit, &pot, 1e-12)?.value
    );
    println!(
        "  z pair (1/4,1/2),(3/4,1/2):        E = {:.6}",
        energy::energy_direct(&z, &pot, 1e-12)?.value
    );

    let m = optimize::minimize_union3(3.5, 1e-10, 48)?;
    println!(
        "  grid + descent minimum:            E = {:.6} at x=({:.6}, {:.6}), y=({:.6}, {:.6})",
        m.energy.value,
        m.x.coords()[0],
        m.x.coords()[1],
        m.y.coords()[0],
        m.y.coords()[1]
    );
    println!("  (heuristic = {}; global optimality is not certified)", m.heuristic);
    Ok(())
}
