//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line (run with `--nocapture` to see the lines for passing
//! criteria as well).

// `!(margin > budget)` deliberately treats NaN margins as failures
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::time::Instant;

use lattice_energy::energy;
use lattice_energy::geometry::{GaussianPotential, Lattice, PeriodicConfig};
use lattice_energy::optimize::{self, TorusPoint};
use lattice_energy::{configs, verify};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(criterion: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {status} — {detail}");
    assert!(pass, "criterion {criterion}: {detail}");
}

#[test]
fn criterion_01_union3_energies_at_alpha_3_5() {
    let t0 = Instant::now();
    let pot = GaussianPotential::pi_scaled(3.5).unwrap();
    let crit = configs::union3_square([1.0 / 3.0, 1.0 / 3.0], [2.0 / 3.0, 2.0 / 3.0]).unwrap();
    let e_crit = energy::energy_direct(&crit, &pot, 1e-12).unwrap().value;
    let m = optimize::minimize_union3(3.5, 1e-10, 48).unwrap();
    let elapsed = t0.elapsed().as_secs_f64();
    let pass = (e_crit - 0.18279).abs() <= 5e-5
        && m.energy.value <= 0.17159 + 1e-4
        && m.heuristic
        && elapsed < 10.0;
    report(
        "1",
        pass,
        &format!(
            "E(critical pair) = {e_crit:.6} (target 0.18279 ± 5e-5), \
             minimizer energy = {:.6} (bound 0.17159 + 1e-4), runtime {elapsed:.2}s < 10s",
            m.energy.value
        ),
    );
}

#[test]
fn criterion_02_hexagonal_beats_honeycomb_on_the_grid() {
    let t0 = Instant::now();
    let alphas = verify::default_alpha_grid(200);
    let mut worst_margin = f64::INFINITY;
    let mut worst_ratio = f64::INFINITY;
    let mut all_positive = true;
    for &alpha in &alphas {
        let (margin, budget, max_term) = verify::hex_honeycomb_margin(alpha);
        all_positive &= margin > budget && max_term <= 0.0;
        worst_margin = worst_margin.min(margin);
        worst_ratio = worst_ratio.min(margin / budget.max(f64::MIN_POSITIVE));
    }
    let mut worst_agm = 0.0f64;
    for &alpha in &alphas {
        let agm = energy::honeycomb_energy_agm(alpha, 1e-12).unwrap();
        let direct = energy::energy_direct(
            &configs::honeycomb(1.0).unwrap(),
            &GaussianPotential::pi_scaled(alpha).unwrap(),
            1e-12,
        )
        .unwrap();
        worst_agm = worst_agm.max((agm.value - direct.value).abs());
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let pass = all_positive && worst_agm <= 1e-10 && elapsed < 30.0;
    report(
        "2",
        pass,
        &format!(
            "200 grid points: worst certified margin {worst_margin:.3e} \
             (margin/budget >= {worst_ratio:.1e}), worst AGM/direct gap {worst_agm:.3e} <= 1e-10, \
             runtime {elapsed:.2}s < 30s"
        ),
    );
}

#[test]
fn criterion_03_cubic_agm_identity() {
    let mut worst = 0.0f64;
    for &q in &[1e-6, 0.1, 0.5] {
        worst = worst.max(energy::cubic_agm_identity(q, 1e-12).unwrap());
    }
    report(
        "3",
        worst < 1e-10,
        &format!("max residual |3a(q^3) - a(q) - 2b(q)| = {worst:.3e} over q in {{1e-6, 0.1, 0.5}}"),
    );
}

#[test]
fn criterion_04_poisson_path_agreement() {
    let cases: Vec<(&str, PeriodicConfig)> = vec![
        ("square", configs::square(1.0).unwrap()),
        ("hexagonal", configs::hexagonal(1.0).unwrap()),
        ("honeycomb", configs::honeycomb(1.0).unwrap()),
        (
            "gamma_x0",
            configs::union3_square([1.0 / 3.0, 1.0 / 3.0], [2.0 / 3.0, 2.0 / 3.0]).unwrap(),
        ),
    ];
    let mut worst = 0.0f64;
    let mut pass = true;
    for &alpha in &[0.5, 1.0, 2.0] {
        let pot = GaussianPotential::raw(alpha).unwrap();
        for (label, cfg) in &cases {
            let d = energy::energy_direct(cfg, &pot, 1e-12).unwrap();
            let p = energy::energy_dual(cfg, &pot, 1e-12).unwrap();
            let gap = (d.value - p.value).abs();
            worst = worst.max(gap);
            if gap > (d.trunc_error + p.trunc_error).max(1e-10) {
                pass = false;
                println!("  {label} at alpha={alpha}: gap {gap:.3e}");
            }
        }
    }
    report(
        "4",
        pass && worst <= 1e-10,
        &format!("worst |direct - dual| = {worst:.3e} over 4 configs x 3 alphas (<= 1e-10)"),
    );
}

#[test]
fn criterion_05_union2_minimizers() {
    let mut pass = true;
    let mut detail = String::new();
    for &alpha in &[0.5, 2.0] {
        let pot = GaussianPotential::raw(alpha).unwrap();
        let rect = Lattice::diagonal(&[1.0, 2.0]).unwrap();
        let m = optimize::minimize_shift_union2(&rect, &pot, 1e-12, 64).unwrap();
        let d_rect = (m.argmin.coords()[0] - 0.5)
            .abs()
            .max((m.argmin.coords()[1] - 0.5).abs());
        let hex = configs::hexagonal_lattice_unit();
        let m = optimize::minimize_shift_union2(&hex, &pot, 1e-12, 64).unwrap();
        let c = m.argmin.coords();
        let d_hex = [(1.0 / 3.0, 1.0 / 3.0), (2.0 / 3.0, 2.0 / 3.0)]
            .iter()
            .map(|&(a, b)| (c[0] - a).abs().max((c[1] - b).abs()))
            .fold(f64::INFINITY, f64::min);
        pass &= d_rect < 1e-6 && d_hex < 1e-6;
        detail.push_str(&format!(
            "alpha={alpha}: rect offset {d_rect:.1e}, hex deep-hole offset {d_hex:.1e}; "
        ));
    }
    report("5", pass, &format!("{detail}(both < 1e-6)"));
}

#[test]
fn criterion_06_one_dimensional_equispacing() {
    // pi-scaled widths: at raw alpha = 0.5 the N = 4 splitting is ~1e-34,
    // below any double-precision resolution (see the optimizer docs)
    let mut pass = true;
    let mut worst = 0.0f64;
    for &n in &[2usize, 3, 4] {
        for &alpha in &[0.5, 2.0] {
            let shifts = optimize::minimize_1d(n, alpha, 1e-10).unwrap();
            for i in 0..n {
                let gap = if i + 1 < n {
                    shifts[i + 1] - shifts[i]
                } else {
                    1.0 - shifts[i] + shifts[0]
                };
                let dev = (gap - 1.0 / n as f64).abs();
                worst = worst.max(dev);
                pass &= dev < 1e-6;
            }
        }
    }
    report(
        "6",
        pass,
        &format!("N in {{2,3,4}} x alpha in {{0.5, 2}}: worst gap deviation {worst:.2e} < 1e-6"),
    );
}

#[test]
fn criterion_07_auxiliary_function_negativity() {
    let mut worst_g = f64::NEG_INFINITY;
    let mut worst_h = f64::NEG_INFINITY;
    for i in 1..=1000 {
        worst_g = worst_g.max(verify::aux_g(2.0 + 58.0 * i as f64 / 1000.0));
        worst_h = worst_h.max(verify::aux_h(6.0 + 54.0 * i as f64 / 1000.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_fact = 0.0f64;
    for _ in 0..100 {
        let t: f64 = rng.gen_range(0.0..1.0);
        let lhs1 = -t.powi(6) + 2.0 * t.powi(3) - t * t;
        let rhs1 = -t * t * (t - 1.0) * (t.powi(3) + t * t + t - 1.0);
        let lhs2 = -3.0 * t.powi(3) + 4.0 * t * t - t;
        let rhs2 = -t * (1.0 - t) * (1.0 - 3.0 * t);
        worst_fact = worst_fact.max((lhs1 - rhs1).abs()).max((lhs2 - rhs2).abs());
    }
    let pass = worst_g < 0.0 && worst_h < 0.0 && worst_fact <= 1e-14;
    report(
        "7",
        pass,
        &format!(
            "max g on (2,60] = {worst_g:.3e} < 0, max h on (6,60] = {worst_h:.3e} < 0, \
             worst factorization residual {worst_fact:.2e} <= 1e-14 at 100 random t"
        ),
    );
}

#[test]
fn criterion_08_square_beats_gamma_x0() {
    let alphas = verify::default_alpha_grid(200);
    let mut pass = true;
    let mut worst_margin = f64::INFINITY;
    for &alpha in &alphas {
        let (margin, budget) = verify::square_gamma_margin(alpha, 1e-12).unwrap();
        if !(margin > budget) {
            pass = false;
            println!("  alpha={alpha}: margin {margin:.3e} <= budget {budget:.3e}");
        }
        worst_margin = worst_margin.min(margin);
        let (lb, _, _) = verify::gamma_x0_lower_bound_margin(alpha);
        if lb < 0.0 {
            pass = false;
            println!("  alpha={alpha}: lower-bound margin {lb:.3e} < 0");
        }
    }
    report(
        "8",
        pass,
        &format!(
            "200 grid points: worst margin E(gamma_x0) - E(Z^2) = {worst_margin:.3e} > 0, \
             lower bound 2 exp(-2 pi alpha / 3) holds termwise"
        ),
    );
}

#[test]
fn criterion_09_critical_points_and_curve_counts() {
    // residuals at the two critical pairs
    let mut worst_residual = 0.0f64;
    for &alpha in &[0.5, 2.0, 30.0] {
        for point in [[1.0 / 3.0, 1.0 / 3.0], [1.0 / 3.0, 2.0 / 3.0]] {
            let r = optimize::critical_residual(&TorusPoint::new(point.to_vec()), alpha, 1e-12)
                .unwrap();
            worst_residual = worst_residual.max(r[0].abs()).max(r[1].abs());
        }
    }
    let residuals_ok = worst_residual < 1e-10;

    // known points on c1 within 1e-3
    let mut points_ok = true;
    let mut counts = Vec::new();
    for &alpha in &[0.1, 2.0, 30.0] {
        let set = optimize::trace_curves(alpha, 512).unwrap();
        for x1 in [1.0 / 3.0, 2.0 / 3.0] {
            points_ok &= set.distance_to_curve(1, [x1, 0.0]) < 1e-3;
        }
        counts.push((alpha, set.intersections.len()));
    }
    let count_3_5 = optimize::trace_curves(3.5, 512).unwrap().intersections.len();

    // stated expectation: exactly 4 at {0.1, 2.0, 30.0} and != 4 at 3.5.
    // The measured counts disagree at 3.5 and 30: the extra-crossing windows
    // are (2.492, 3.3990134258) and (10.1247726191, ...], verified against
    // the tangency system at 30-digit precision and an independent contour
    // pipeline. 3.5 lies just outside the first window (4 crossings) and 30
    // inside the second (12 crossings).
    let counts_as_stated =
        counts.iter().all(|&(_, c)| c == 4) && count_3_5 != 4;
    let pass = residuals_ok && points_ok && counts_as_stated;
    report(
        "9",
        pass,
        &format!(
            "worst critical residual {worst_residual:.2e} (< 1e-10: {residuals_ok}), \
             (1/3,0),(2/3,0) on c1 within 1e-3: {points_ok}, \
             measured counts {counts:?} and {count_3_5} at alpha=3.5 \
             vs stated [4,4,4]/!=4 — see the intersection-window analysis in the tracer docs"
        ),
    );
}

#[test]
fn criterion_10_tensor_factorization_and_cuboid_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_gap = 0.0f64;
    let mut pass = true;
    for _ in 0..20 {
        let factors: Vec<PeriodicConfig> = (0..2)
            .map(|_| {
                let delta: f64 = rng.gen_range(0.5..2.0);
                let j: usize = rng.gen_range(1..=3);
                let mut shifts = vec![0.0f64];
                while shifts.len() < j {
                    let s: f64 = rng.gen_range(0.1..0.9);
                    if shifts.iter().all(|t| (t - s).abs() > 0.05) {
                        shifts.push(s);
                    }
                }
                PeriodicConfig::new(
                    Lattice::diagonal(&[delta]).unwrap(),
                    shifts
                        .iter()
                        .map(|s| DVector::from_vec(vec![s * delta]))
                        .collect(),
                )
                .unwrap()
            })
            .collect();
        let alpha = rng.gen_range(0.5..2.0);
        let pot = GaussianPotential::raw(alpha).unwrap();
        let product = configs::tensor_product(&factors).unwrap();
        let direct = energy::energy_direct(&product, &pot, 1e-12).unwrap().value;
        let tensor = energy::energy_tensor(&factors, &pot, 1e-12).unwrap().value;
        let gap = (direct - tensor).abs();
        worst_gap = worst_gap.max(gap);
        pass &= gap <= 1e-10;
    }
    // cuboid scan at fixed covolume: minimum at beta1 = beta2 = 1
    let mut scan_ok = true;
    for &alpha in &[0.5, 1.0, 2.0] {
        let pot = GaussianPotential::raw(alpha).unwrap();
        let mut best = (f64::INFINITY, usize::MAX);
        for i in 0..41usize {
            let beta = 10f64.powf(-0.3 + 0.6 * i as f64 / 40.0);
            let factors = vec![
                PeriodicConfig::lattice_only(Lattice::diagonal(&[beta]).unwrap()),
                PeriodicConfig::lattice_only(Lattice::diagonal(&[1.0 / beta]).unwrap()),
            ];
            let e = energy::energy_tensor(&factors, &pot, 1e-12).unwrap().value;
            if e < best.0 {
                best = (e, i);
            }
        }
        scan_ok &= best.1 == 20;
    }
    report(
        "10",
        pass && scan_ok,
        &format!(
            "20 random 1D pairs: worst |direct - tensor| = {worst_gap:.3e} <= 1e-10; \
             cuboid scan minimum at the square for alpha in {{0.5, 1, 2}}: {scan_ok}"
        ),
    );
}

#[test]
fn criterion_11_montgomery_spot_check() {
    let tol = verify::Tolerances::default();
    let r = verify::check_montgomery(50, &[0.5, 1.0, 2.0], &tol);
    report(
        "11",
        r.pass,
        &format!(
            "50 sampled unit-density lattices x 3 alphas: worst margin {:.3e} (>= 0), \
             hexagonal equality margin < 1e-12; notes: {:?}",
            r.worst_margin, r.notes
        ),
    );
}

#[test]
fn criterion_12_asymptotic_curve_shape() {
    let dev = optimize::asymptotic_curve_check(0.01).unwrap();
    report(
        "12",
        dev < 0.02,
        &format!("alpha = 0.01: traced c1 within {dev:.2e} of x1 in {{1/3, 2/3}} (< 0.02)"),
    );
}
