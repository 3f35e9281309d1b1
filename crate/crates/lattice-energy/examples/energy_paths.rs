//! The four evaluation routes for the Gaussian energy — direct lattice sum,
//! Poisson-summed dual series, tensor factorization and the cubic-AGM
//! identity — cross-checked against each other with certified bounds.
//!
//! Run with: `cargo run --release --example energy_paths`

use lattice_energy::energy;
use lattice_energy::geometry::{GaussianPotential, Lattice, PeriodicConfig};
use lattice_energy::configs;

fn main() -> Result<(), lattice_energy::Error> {
    let pot = GaussianPotential::raw(1.0)?;

    println!("direct vs dual on named configurations at alpha = 1:");
    for (label, cfg) in [
        ("square", configs::square(1.0)?),
        ("hexagonal", configs::hexagonal(1.0)?),
        ("honeycomb", configs::honeycomb(1.0)?),
        (
            "three-shift union",
            configs::union3_square([1.0 / 3.0, 1.0 / 3.0], [2.0 / 3.0, 2.0 / 3.0])?,
        ),
    ] {
        let d = energy::energy_direct(&cfg, &pot, 1e-12)?;
        let p = energy::energy_dual(&cfg, &pot, 1e-12)?;
        println!(
            "  {label:<18} direct {:.14} (r={:.1})   dual {:.14} (r={:.1})   gap {:.1e}",
            d.value,
            d.radius,
            p.value,
            p.radius,
            (d.value - p.value).abs()
        );
    }

    println!("\ntensor factorization for a cuboid lattice diag(2, 1/2):");
    let factors = vec![
        PeriodicConfig::lattice_only(Lattice::diagonal(&[2.0])?),
        PeriodicConfig::lattice_only(Lattice::diagonal(&[0.5])?),
    ];
    let tensor = energy::energy_tensor(&factors, &pot, 1e-12)?;
    let direct = energy::energy_direct(
        &PeriodicConfig::lattice_only(Lattice::diagonal(&[2.0, 0.5])?),
        &pot,
        1e-12,
    )?;
    println!(
        "  tensor {:.14}   direct {:.14}   gap {:.1e}",
        tensor.value,
        direct.value,
        (tensor.value - direct.value).abs()
    );

    println!("\ncubic-AGM route for the unit-density honeycomb (pi-scaled widths):");
    for alpha in [0.3, 1.0, 3.0] {
        let agm = energy::honeycomb_energy_agm(alpha, 1e-12)?;
        let direct = energy::energy_direct(
            &configs::honeycomb(1.0)?,
            &GaussianPotential::pi_scaled(alpha)?,
            1e-12,
        )?;
        println!(
            "  alpha={alpha:<4} agm {:.14}   direct {:.14}   gap {:.1e}",
            agm.value,
            direct.value,
            (agm.value - direct.value).abs()
        );
    }

    println!("\narithmetic step of the cubic AGM, residual |3a(q^3) - a(q) - 2b(q)|:");
    for q in [1e-6, 0.1, 0.5] {
        println!("  q={q:<8} residual {:.3e}", energy::cubic_agm_identity(q, 1e-12)?);
    }
    Ok(())
}
