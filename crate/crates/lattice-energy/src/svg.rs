//! Minimal hand-emitted SVG rendering: configuration scatter plots and the
//! critical-curve figure. No plotting dependencies; the files are small and
//! reproducible.

use crate::geometry::PeriodicConfig;
use crate::optimize::CurveSet;

/// Lattice points of each shift class within the given radius, as
/// `(shift index, point)` pairs. 2D only.
pub fn points_within_radius(config: &PeriodicConfig, radius: f64) -> Vec<(usize, [f64; 2])> {
    assert_eq!(config.dim(), 2, "rendering is 2D only");
    let lat = config.lattice();
    let inv = lat.inv_basis();
    let basis = lat.basis();
    let mut out = Vec::new();
    for (class, shift) in config.shifts().iter().enumerate() {
        let c = inv * shift;
        let r0 = (inv.row(0)[0].powi(2) + inv.row(0)[1].powi(2)).sqrt();
        let r1 = (inv.row(1)[0].powi(2) + inv.row(1)[1].powi(2)).sqrt();
        let span0 = (r0 * radius + c[0].abs()).ceil() as i64 + 1;
        let span1 = (r1 * radius + c[1].abs()).ceil() as i64 + 1;
        for n0 in -span0..=span0 {
            for n1 in -span1..=span1 {
                let x = basis[(0, 0)] * n0 as f64 + basis[(0, 1)] * n1 as f64 + shift[0];
                let y = basis[(1, 0)] * n0 as f64 + basis[(1, 1)] * n1 as f64 + shift[1];
                if x * x + y * y <= radius * radius {
                    out.push((class, [x, y]));
                }
            }
        }
    }
    out
}

const CLASS_STYLES: [&str; 3] = [
    r#"fill="black""#,
    r#"fill="none" stroke="black" stroke-width="0.03""#,
    r#"fill="gray""#,
];

/// Scatter plot of a configuration; each shift class gets its own marker
/// style (solid dot, ring, gray dot).
pub fn render_config(config: &PeriodicConfig, radius: f64) -> String {
    let pts = points_within_radius(config, radius);
    let size = 640.0;
    let scale = size / (2.0 * radius);
    let mut s = String::new();
    s.push_str(&format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    ));
    s.push('\n');
    s.push_str(&format!(
        r#"<rect width="{size}" height="{size}" fill="white"/>"#
    ));
    s.push('\n');
    let marker_r = (0.07 * scale).max(2.0);
    for (class, [x, y]) in pts {
        let cx = (x + radius) * scale;
        let cy = (radius - y) * scale;
        let style = CLASS_STYLES[class % CLASS_STYLES.len()];
        let style = style.replace("0.03", &format!("{}", (0.02 * scale).max(1.0)));
        s.push_str(&format!(
            r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{marker_r:.3}" {style} data-class="{class}"/>"#
        ));
        s.push('\n');
    }
    s.push_str("</svg>\n");
    s
}

/// The two critical curves in the unit square: c1 solid, c2 dashed,
/// intersections marked with circles.
pub fn render_curves(set: &CurveSet) -> String {
    let size = 640.0;
    let mut s = String::new();
    s.push_str(&format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    ));
    s.push('\n');
    s.push_str(&format!(
        r#"<rect width="{size}" height="{size}" fill="white" stroke="black"/>"#
    ));
    s.push('\n');
    let map = |p: [f64; 2]| ((p[0] * size), ((1.0 - p[1]) * size));
    let mut emit_chains = |chains: &Vec<Vec<[f64; 2]>>, style: &str| {
        for chain in chains {
            if chain.len() < 2 {
                continue;
            }
            let pts: Vec<String> = chain
                .iter()
                .map(|&p| {
                    let (x, y) = map(p);
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            s.push_str(&format!(
                r#"<polyline points="{}" fill="none" {style}/>"#,
                pts.join(" ")
            ));
            s.push('\n');
        }
    };
    emit_chains(&set.c1, r#"stroke="black" stroke-width="1.5""#);
    emit_chains(
        &set.c2,
        r#"stroke="gray" stroke-width="1.5" stroke-dasharray="6 4""#,
    );
    for inter in &set.intersections {
        let (x, y) = map(inter.point);
        s.push_str(&format!(
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="6" fill="none" stroke="red" stroke-width="2" class="intersection"/>"#
        ));
        s.push('\n');
    }
    s.push_str(&format!(
        r#"<text x="10" y="20" font-family="monospace" font-size="14">alpha = {}, intersections = {}</text>"#,
        set.alpha,
        set.intersections.len()
    ));
    s.push('\n');
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configs;

    #[test]
    fn honeycomb_render_contains_both_classes() {
        let cfg = configs::honeycomb(1.0).unwrap();
        let svg = render_config(&cfg, 2.5);
        assert!(svg.contains(r#"data-class="0""#));
        assert!(svg.contains(r#"data-class="1""#));
    }

    #[test]
    fn square_lattice_point_count() {
        let cfg = configs::square(1.0).unwrap();
        let pts = points_within_radius(&cfg, 1.1);
        // origin plus the four unit neighbors
        assert_eq!(pts.len(), 5);
    }

    #[test]
    fn point_count_tracks_density() {
        let cfg = configs::honeycomb(1.0).unwrap();
        let radius = 8.0;
        let pts = points_within_radius(&cfg, radius);
        let expected = cfg.density() * std::f64::consts::PI * radius * radius;
        let slack = 8.0 * radius; // boundary effects
        assert!(
            (pts.len() as f64 - expected).abs() < slack,
            "count {} vs expected {expected:.1}",
            pts.len()
        );
    }
}
