//! Jacobi theta-3 in series and triple-product form, Montgomery's Q, and
//! the explicit bound envelopes.
//!
//! Run with: `cargo run --release --example theta_functions`

use lattice_energy::special;

fn main() -> Result<(), lattice_energy::Error> {
    println!("theta3(x, alpha) by series and by triple product:");
    for (x, alpha) in [(0.0, 1.0), (0.3, 0.7), (0.25, 2.0), (0.5, 0.2)] {
        let series = special::theta3(x, alpha, 1e-14)?;
        let product = special::theta3_product(x, alpha, 1e-14)?;
        println!(
            "  x={x:<5} alpha={alpha:<4} series {:.15} ({} terms)  product {:.15} ({} factors)  gap {:.1e}",
            series.value,
            series.terms_used,
            product.value,
            product.terms_used,
            (series.value - product.value).abs()
        );
    }

    println!("\nordering theta3(0) >= theta3(x) >= theta3(1/2) at alpha = 1:");
    for x in [0.0, 0.1, 0.25, 0.4, 0.5] {
        println!("  theta3({x:<4}) = {:.12}", special::theta3(x, 1.0, 1e-14)?.value);
    }

    println!("\nMontgomery's Q with its envelopes A(alpha) <= Q <= B(alpha):");
    for alpha in [0.5, 1.0, 2.0] {
        let (a, b) = special::q_bound_envelopes(alpha);
        let q0 = special::q_function(0.0, alpha, 1e-12)?;
        let qq = special::q_function(0.25, alpha, 1e-12)?;
        let qh = special::q_function(0.5, alpha, 1e-12)?;
        println!(
            "  alpha={alpha:<4} A={a:.6e}  Q(0)={q0:.6e}  Q(1/4)={qq:.6e}  Q(1/2)={qh:.6e}  B={b:.6e}"
        );
    }

    println!("\nenvelopes for the one-dimensional theta-like sum f_Z(x):");
    for alpha in [0.5, 1.0, 2.0, 4.0] {
        let (g, h) = special::f_bound_envelopes(alpha);
        println!("  alpha={alpha:<4} g={g:.8}  h={h:.8}");
    }
    Ok(())
}
