//! Traces the two critical curves c1 and c2 in the unit square and counts
//! their crossings. Writes an SVG per parameter into the working directory.
//!
//! For generic widths the curves cross in exactly four points. Extra
//! transversal crossings appear inside two parameter windows whose edges
//! are tangencies of the curves: (2.492, 3.39901) and (10.12477, ...].
//!
//! Run with: `cargo run --release --example critical_curves`

use lattice_energy::optimize;
use lattice_energy::svg;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for alpha in [0.1, 2.0, 3.0, 3.5, 30.0] {
        let set = optimize::trace_curves(alpha, 512)?;
        println!(
            "alpha = {alpha:<5}: {} chain(s) per curve, {} intersection(s)",
            set.c1.len(),
            set.intersections.len()
        );
        for inter in &set.intersections {
            println!(
                "    ({:.9}, {:.9})   residual ({:+.1e}, {:+.1e})",
                inter.point[0], inter.point[1], inter.residual[0], inter.residual[1]
            );
        }
        let path = format!("curves_alpha_{alpha}.svg");
        std::fs::write(&path, svg::render_curves(&set))?;
        println!("    wrote {path}");
    }

    println!("\nasymptotic shape check: c1 approaches the lines x1 = 1/3, 2/3");
    for alpha in [0.05, 0.01] {
        let dev = optimize::asymptotic_curve_check(alpha)?;
        println!("  alpha = {alpha:<5}: max deviation {dev:.3e}");
    }
    Ok(())
}
