//! SVG scatter plots of the named configurations.
//!
//! Run with: `cargo run --release --example render_configurations`

use lattice_energy::configs;
use lattice_energy::svg;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (name, spec) in [
        ("square", "square"),
        ("hexagonal", "hexagonal@1"),
        ("honeycomb", "honeycomb"),
        ("gamma_x0_union", "union3:1/3,1/3;2/3,2/3"),
    ] {
        let cfg = configs::parse_config(spec)?;
        let path = format!("render_{name}.svg");
        std::fs::write(&path, svg::render_config(&cfg, 3.0))?;
        let count = svg::points_within_radius(&cfg, 3.0).len();
        println!(
            "{name:<16} density {:.3}, {count} points within radius 3 -> {path}",
            cfg.density()
        );
    }
    Ok(())
}
