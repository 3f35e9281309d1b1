//! N points on the circle minimize the periodic Gaussian energy exactly
//! when they are equispaced.
//!
//! Run with: `cargo run --release --example one_dimensional_optimality`

use lattice_energy::optimize;

fn main() -> Result<(), lattice_energy::Error> {
    for n in 2..=5 {
        for alpha in [0.5, 2.0] {
            let shifts = optimize::minimize_1d(n, alpha, 1e-10)?;
            let gaps: Vec<String> = (0..n)
                .map(|i| {
                    let g = if i + 1 < n {
                        shifts[i + 1] - shifts[i]
                    } else {
                        1.0 - shifts[i] + shifts[0]
                    };
                    format!("{g:.9}")
                })
                .collect();
            println!(
                "N={n} alpha={alpha:<4}: shifts {:?} gaps [{}]  (1/N = {:.9})",
                shifts
                    .iter()
                    .map(|s| format!("{s:.6}"))
                    .collect::<Vec<_>>(),
                gaps.join(", "),
                1.0 / n as f64
            );
        }
    }
    Ok(())
}
