//! Runs the whole verification suite with slightly coarsened settings and
//! prints the report table. Equivalent to `lattice-energy verify`.
//!
//! Run with: `cargo run --release --example verify_all`

use lattice_energy::verify;

fn main() {
    let tol = verify::Tolerances {
        alpha_grid_points: 100,
        curve_grid: 384,
        ..Default::default()
    };
    let reports = verify::run_all(&tol);
    for r in &reports {
        println!(
            "{} {:<32} worst margin {:>12.3e}  budget {:>10.3e}  [{}]",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.worst_margin,
            r.error_budget,
            r.grid
        );
        for note in &r.notes {
            println!("       {note}");
        }
        if let Some(e) = &r.error {
            println!("       error: {e}");
        }
    }
    let all = reports.iter().all(|r| r.pass);
    println!("\nall checks pass: {all}");
    std::process::exit(if all { 0 } else { 1 });
}
