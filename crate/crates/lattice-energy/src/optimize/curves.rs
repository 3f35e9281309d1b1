//! Critical-curve tracing for the three-shift problem.
//!
//! The symmetric critical equations factor through `sqrt(alpha) f'(u) =
//! -sin(2 pi u) Q(u; 1/alpha)`; away from the zeros of the sine the two
//! equations become the curves
//!
//! ```text
//! c1: f(x2) Q(x1) + 2 cos(2 pi x1) Q(2 x1) f(2 x2) = 0
//! c2: f(x1) Q(x2) + 2 cos(2 pi x2) Q(2 x2) f(2 x1) = 0
//! ```
//!
//! (Q arguments carry the parameter `1/alpha`). The common prefactor
//! `4 pi exp(-pi/alpha)` of Q is divided out, so the traced functions stay
//! representable for all parameters of interest. Zero sets are extracted by
//! marching squares on an `n x n` grid over the closed unit square, each
//! vertex is refined along its grid edge by a safeguarded secant iteration,
//! and curve-curve crossings are polished with a damped Newton iteration on
//! the actual critical residual.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::energy;
use crate::error::{Error, Result};
use crate::special;

use super::TorusPoint;

/// A polished crossing of c1 and c2 with its critical-equation residual.
#[derive(Debug, Clone, Copy)]
pub struct Intersection {
    pub point: [f64; 2],
    pub residual: [f64; 2],
}

/// Polyline approximations of the two critical curves and their common
/// points.
#[derive(Debug, Clone)]
pub struct CurveSet {
    pub alpha: f64,
    pub grid_n: usize,
    pub c1: Vec<Vec<[f64; 2]>>,
    pub c2: Vec<Vec<[f64; 2]>>,
    pub intersections: Vec<Intersection>,
}

impl CurveSet {
    /// Distance from a point to the nearest segment of the given curve.
    pub fn distance_to_curve(&self, curve: usize, p: [f64; 2]) -> f64 {
        let chains = if curve == 1 { &self.c1 } else { &self.c2 };
        let mut best = f64::INFINITY;
        for chain in chains {
            for w in chain.windows(2) {
                best = best.min(point_segment_distance(p, w[0], w[1]));
            }
            if chain.len() == 1 {
                let q = chain[0];
                best = best.min(((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt());
            }
        }
        best
    }
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    };
    let d = [ap[0] - t * ab[0], ap[1] - t * ab[1]];
    (d[0] * d[0] + d[1] * d[1]).sqrt()
}

/// Edge of the marching grid: horizontal edges vary x1, vertical ones x2.
/// Indices are *not* wrapped, so chains terminate at the square boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct EdgeKey {
    horizontal: bool,
    i: usize,
    j: usize,
}

struct TracedCurve {
    crossings: HashMap<EdgeKey, [f64; 2]>,
    segments: Vec<(EdgeKey, EdgeKey)>,
    cell_segments: HashMap<(usize, usize), Vec<usize>>,
}

/// Safeguarded secant root refinement on a bracketing interval.
fn refine_root(g: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, mut ga: f64, mut gb: f64) -> f64 {
    if ga == 0.0 {
        return a;
    }
    if gb == 0.0 {
        return b;
    }
    if ga.signum() == gb.signum() {
        // no bracket (can happen with table round-off at a grazing contact)
        return 0.5 * (a + b);
    }
    for _ in 0..60 {
        if (b - a).abs() < 1e-13 {
            break;
        }
        // secant candidate, safeguarded into the central 90% of the bracket
        let mut m = (a * gb - b * ga) / (gb - ga);
        let lo = a + 0.05 * (b - a);
        let hi = b - 0.05 * (b - a);
        if !m.is_finite() || m < lo || m > hi {
            m = 0.5 * (a + b);
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
            gb = gm;
        }
    }
    0.5 * (a + b)
}

/// Marching squares over the closed unit square with periodic grid tables.
/// `node(i, j)` must be exact on the seam (`node(n, j) == node(0, j)`), and
/// `gxy` is the same function evaluated off-grid for edge refinement and
/// saddle disambiguation.
fn march(n: usize, node: &dyn Fn(usize, usize) -> f64, gxy: &dyn Fn(f64, f64) -> f64) -> TracedCurve {
    let h = 1.0 / n as f64;
    let mut crossings: HashMap<EdgeKey, [f64; 2]> = HashMap::new();
    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    let mut cell_segments: HashMap<(usize, usize), Vec<usize>> = HashMap::new();

    let crossing_for = |key: EdgeKey,
                            crossings: &mut HashMap<EdgeKey, [f64; 2]>|
     -> [f64; 2] {
        if let Some(p) = crossings.get(&key) {
            return *p;
        }
        let p = if key.horizontal {
            let x2 = key.j as f64 * h;
            let (lo, glo, ghi) = (key.i as f64 * h, node(key.i, key.j), node(key.i + 1, key.j));
            let root = refine_root(&|x1| gxy(x1, x2), lo, lo + h, glo, ghi);
            [root, x2]
        } else {
            let x1 = key.i as f64 * h;
            let (lo, glo, ghi) = (key.j as f64 * h, node(key.i, key.j), node(key.i, key.j + 1));
            let root = refine_root(&|x2| gxy(x1, x2), lo, lo + h, glo, ghi);
            [x1, root]
        };
        crossings.insert(key, p);
        p
    };

    for i in 0..n {
        for j in 0..n {
            let v00 = node(i, j);
            let v10 = node(i + 1, j);
            let v01 = node(i, j + 1);
            let v11 = node(i + 1, j + 1);
            let code = (usize::from(v00 >= 0.0))
                | (usize::from(v10 >= 0.0) << 1)
                | (usize::from(v11 >= 0.0) << 2)
                | (usize::from(v01 >= 0.0) << 3);
            if code == 0 || code == 15 {
                continue;
            }
            let bottom = EdgeKey { horizontal: true, i, j };
            let top = EdgeKey { horizontal: true, i, j: j + 1 };
            let left = EdgeKey { horizontal: false, i, j };
            let right = EdgeKey { horizontal: false, i: i + 1, j };
            let mut emit = |a: EdgeKey, b: EdgeKey| {
                crossing_for(a, &mut crossings);
                crossing_for(b, &mut crossings);
                segments.push((a, b));
                cell_segments.entry((i, j)).or_default().push(segments.len() - 1);
            };
            match code {
                1 | 14 => emit(left, bottom),
                2 | 13 => emit(bottom, right),
                3 | 12 => emit(left, right),
                4 | 11 => emit(right, top),
                6 | 9 => emit(bottom, top),
                7 | 8 => emit(left, top),
                5 => {
                    // corners v00 and v11 positive; the center decides how
                    // the two contour arcs pair up
                    if gxy((i as f64 + 0.5) * h, (j as f64 + 0.5) * h) >= 0.0 {
                        emit(left, top);
                        emit(bottom, right);
                    } else {
                        emit(left, bottom);
                        emit(right, top);
                    }
                }
                10 => {
                    if gxy((i as f64 + 0.5) * h, (j as f64 + 0.5) * h) >= 0.0 {
                        emit(left, bottom);
                        emit(right, top);
                    } else {
                        emit(left, top);
                        emit(bottom, right);
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    TracedCurve {
        crossings,
        segments,
        cell_segments,
    }
}

/// Chains segments into polylines: every edge touches at most two segments,
/// so the segment graph decomposes into paths and loops.
fn assemble_polylines(curve: &TracedCurve) -> Vec<Vec<[f64; 2]>> {
    let mut adjacency: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (idx, (a, b)) in curve.segments.iter().enumerate() {
        adjacency.entry(*a).or_default().push(idx);
        adjacency.entry(*b).or_default().push(idx);
    }
    let mut used = vec![false; curve.segments.len()];
    let mut chains = Vec::new();
    // open chains first (edges of degree 1), then remaining loops
    let mut starts: Vec<EdgeKey> = adjacency
        .iter()
        .filter(|(_, segs)| segs.len() == 1)
        .map(|(k, _)| *k)
        .collect();
    starts.sort_by_key(|k| (k.horizontal, k.i, k.j));
    let mut all_edges: Vec<EdgeKey> = adjacency.keys().copied().collect();
    all_edges.sort_by_key(|k| (k.horizontal, k.i, k.j));
    for start in starts.into_iter().chain(all_edges) {
        let first_seg = adjacency[&start].iter().find(|&&s| !used[s]);
        let Some(&seg0) = first_seg else { continue };
        let mut chain = vec![start];
        let mut current = start;
        let mut seg = seg0;
        loop {
            used[seg] = true;
            let (a, b) = curve.segments[seg];
            let next = if a == current { b } else { a };
            chain.push(next);
            current = next;
            match adjacency[&current].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        if chain.len() >= 2 {
            chains.push(chain.iter().map(|k| curve.crossings[k]).collect());
        }
    }
    chains
}

fn segment_intersection(
    a1: [f64; 2],
    b1: [f64; 2],
    a2: [f64; 2],
    b2: [f64; 2],
) -> Option<[f64; 2]> {
    let r = [b1[0] - a1[0], b1[1] - a1[1]];
    let s = [b2[0] - a2[0], b2[1] - a2[1]];
    let denom = r[0] * s[1] - r[1] * s[0];
    if denom.abs() < 1e-300 {
        return None;
    }
    let qp = [a2[0] - a1[0], a2[1] - a1[1]];
    let t = (qp[0] * s[1] - qp[1] * s[0]) / denom;
    let u = (qp[0] * r[1] - qp[1] * r[0]) / denom;
    if (-0.05..=1.05).contains(&t) && (-0.05..=1.05).contains(&u) {
        Some([a1[0] + t * r[0], a1[1] + t * r[1]])
    } else {
        None
    }
}

/// Critical residual computed through direct line sums (`f` and `f'` from
/// the Gaussian series); fast and smooth enough for Newton.
fn residual_direct(x: [f64; 2], a_exp: f64, tol: f64) -> Result<[f64; 2]> {
    let fval = |u: f64| -> Result<(f64, f64)> {
        let (v, _, d) = energy::f_line_with_derivative(u, a_exp, tol)?;
        Ok((v, d))
    };
    let (f_x1, fp_x1) = fval(x[0])?;
    let (f_x2, fp_x2) = fval(x[1])?;
    let (f_2x1, fp_2x1) = fval(2.0 * x[0])?;
    let (f_2x2, fp_2x2) = fval(2.0 * x[1])?;
    Ok([
        fp_x1 * f_x2 + fp_2x1 * f_2x2,
        f_x1 * fp_x2 + f_2x1 * fp_2x2,
    ])
}

/// Damped Newton on the critical residual with finite-difference Jacobian.
fn polish_intersection(start: [f64; 2], a_exp: f64) -> Option<[f64; 2]> {
    let tol = 1e-14;
    let mut x = start;
    let mut r = residual_direct(x, a_exp, tol).ok()?;
    let norm = |v: [f64; 2]| v[0].abs().max(v[1].abs());
    let fd = 1e-7;
    for _ in 0..60 {
        if norm(r) < 1e-13 {
            break;
        }
        let rp1 = residual_direct([x[0] + fd, x[1]], a_exp, tol).ok()?;
        let rm1 = residual_direct([x[0] - fd, x[1]], a_exp, tol).ok()?;
        let rp2 = residual_direct([x[0], x[1] + fd], a_exp, tol).ok()?;
        let rm2 = residual_direct([x[0], x[1] - fd], a_exp, tol).ok()?;
        let j00 = (rp1[0] - rm1[0]) / (2.0 * fd);
        let j10 = (rp1[1] - rm1[1]) / (2.0 * fd);
        let j01 = (rp2[0] - rm2[0]) / (2.0 * fd);
        let j11 = (rp2[1] - rm2[1]) / (2.0 * fd);
        let det = j00 * j11 - j01 * j10;
        if det.abs() < 1e-300 {
            return None;
        }
        let dx = [(r[0] * j11 - r[1] * j01) / det, (j00 * r[1] - j10 * r[0]) / det];
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..25 {
            let cand = [x[0] - lambda * dx[0], x[1] - lambda * dx[1]];
            if let Ok(rc) = residual_direct(cand, a_exp, tol) {
                if norm(rc) < norm(r) {
                    x = cand;
                    r = rc;
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if norm(r) < 1e-9 {
        Some(x)
    } else {
        None
    }
}

/// Max-norm distance of two points on the unit torus.
fn torus_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    let mut d = 0.0f64;
    for k in 0..2 {
        let mut t = (a[k] - b[k]).abs() % 1.0;
        if t > 0.5 {
            t = 1.0 - t;
        }
        d = d.max(t);
    }
    d
}

/// Traces the two critical curves on a `grid_n x grid_n` grid (minimum 64)
/// and polishes curve-curve crossings into critical points.
pub fn trace_curves(alpha: f64, grid_n: usize) -> Result<CurveSet> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Validation(format!("alpha must be positive, got {alpha}")));
    }
    let n = grid_n.max(64);
    let a_exp = PI * alpha;
    let table_tol = 1e-13;
    // periodic tables: values at i/n for i in 0..n, indexed mod n
    let mut f_tab = Vec::with_capacity(n);
    let mut s_tab = Vec::with_capacity(n);
    let mut cos_tab = Vec::with_capacity(n);
    for i in 0..n {
        let x = i as f64 / n as f64;
        f_tab.push(energy::f_line(x, a_exp, table_tol)?.0);
        s_tab.push(special::q_function_scaled(x, 1.0 / alpha, table_tol)?);
        cos_tab.push((2.0 * PI * x).cos());
    }
    let f_of = |x: f64| energy::f_line(x, a_exp, table_tol).map(|v| v.0);
    let s_of = |x: f64| special::q_function_scaled(x, 1.0 / alpha, table_tol);

    let g1_node = |i: usize, j: usize| -> f64 {
        f_tab[j % n] * s_tab[i % n] + 2.0 * cos_tab[i % n] * s_tab[(2 * i) % n] * f_tab[(2 * j) % n]
    };
    let g2_node = |i: usize, j: usize| -> f64 {
        f_tab[i % n] * s_tab[j % n] + 2.0 * cos_tab[j % n] * s_tab[(2 * j) % n] * f_tab[(2 * i) % n]
    };
    let g1_xy = |x1: f64, x2: f64| -> f64 {
        let (f2, f22) = (f_of(x2).unwrap_or(f64::NAN), f_of(2.0 * x2).unwrap_or(f64::NAN));
        let (s1, s21) = (s_of(x1).unwrap_or(f64::NAN), s_of(2.0 * x1).unwrap_or(f64::NAN));
        f2 * s1 + 2.0 * (2.0 * PI * x1).cos() * s21 * f22
    };
    let g2_xy = |x1: f64, x2: f64| g1_xy(x2, x1);

    let h = 1.0 / n as f64;
    // c2 is the coordinate swap of c1; trace both explicitly so every chain
    // lives in the same square
    let t1 = march(n, &g1_node, &g1_xy);
    let t2 = march(n, &g2_node, &g2_xy);

    // candidate crossings cell by cell
    let mut candidates = Vec::new();
    for (cell, seg1_ids) in &t1.cell_segments {
        if let Some(seg2_ids) = t2.cell_segments.get(cell) {
            for &s1 in seg1_ids {
                for &s2 in seg2_ids {
                    let (a1, b1) = t1.segments[s1];
                    let (a2, b2) = t2.segments[s2];
                    if let Some(p) = segment_intersection(
                        t1.crossings[&a1],
                        t1.crossings[&b1],
                        t2.crossings[&a2],
                        t2.crossings[&b2],
                    ) {
                        candidates.push(p);
                    }
                }
            }
        }
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut intersections: Vec<Intersection> = Vec::new();
    for cand in candidates {
        let Some(p) = polish_intersection(cand, a_exp) else {
            continue;
        };
        if torus_distance(p, cand) > 4.0 * h {
            continue; // wandered out of its basin
        }
        let reduced = [p[0].rem_euclid(1.0), p[1].rem_euclid(1.0)];
        if intersections
            .iter()
            .any(|q| torus_distance(q.point, reduced) < 1e-4)
        {
            continue;
        }
        let residual =
            super::critical_residual(&TorusPoint::new(reduced.to_vec()), alpha, 1e-12)?;
        if residual[0].abs().max(residual[1].abs()) < 1e-8 {
            intersections.push(Intersection {
                point: reduced,
                residual,
            });
        }
    }
    intersections.sort_by(|a, b| a.point.partial_cmp(&b.point).unwrap());

    Ok(CurveSet {
        alpha,
        grid_n: n,
        c1: assemble_polylines(&t1),
        c2: assemble_polylines(&t2),
        intersections,
    })
}

/// Maximum distance of the traced c1 from the vertical lines `x1 = 1/3` and
/// `x1 = 2/3`, the asymptotic shape as alpha tends to zero.
pub fn asymptotic_curve_check(alpha: f64) -> Result<f64> {
    let set = trace_curves(alpha, 512)?;
    let mut worst = 0.0f64;
    for chain in &set.c1 {
        for p in chain {
            let d = (p[0] - 1.0 / 3.0).abs().min((p[0] - 2.0 / 3.0).abs());
            worst = worst.max(d);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_intersections_at_moderate_alpha() {
        let set = trace_curves(2.0, 256).unwrap();
        assert_eq!(set.intersections.len(), 4, "{:?}", set.intersections);
        // the four critical pairs
        for target in [
            [1.0 / 3.0, 1.0 / 3.0],
            [1.0 / 3.0, 2.0 / 3.0],
            [2.0 / 3.0, 1.0 / 3.0],
            [2.0 / 3.0, 2.0 / 3.0],
        ] {
            let found = set
                .intersections
                .iter()
                .any(|i| torus_distance(i.point, target) < 1e-6);
            assert!(found, "missing {target:?}");
        }
    }

    #[test]
    fn extra_intersections_inside_the_exceptional_window() {
        // the curves pick up eight additional crossings for parameters in
        // (2.49, 3.399); 3.0 sits safely inside
        let set = trace_curves(3.0, 256).unwrap();
        assert_eq!(set.intersections.len(), 12, "{:?}", set.intersections);
    }

    #[test]
    fn known_points_lie_on_c1() {
        for &alpha in &[0.1, 2.0, 30.0] {
            let set = trace_curves(alpha, 256).unwrap();
            for x1 in [1.0 / 3.0, 2.0 / 3.0] {
                let d = set.distance_to_curve(1, [x1, 0.0]);
                assert!(d < 1e-3, "alpha={alpha}, x1={x1}: distance {d}");
            }
        }
    }

    #[test]
    fn asymptotic_deviation_is_small() {
        let dev = asymptotic_curve_check(0.01).unwrap();
        assert!(dev < 0.02, "deviation {dev}");
    }

    #[test]
    fn asymptotic_deviation_does_not_grow_as_alpha_shrinks() {
        // at these parameters the true curve deviation (~exp(-pi/alpha)) is
        // far below the refinement noise floor, so allow the noise
        let d1 = asymptotic_curve_check(0.01).unwrap();
        let d2 = asymptotic_curve_check(0.005).unwrap();
        assert!(d2 <= d1 + 1e-9, "dev(0.005)={d2:.3e} vs dev(0.01)={d1:.3e}");
    }
}
