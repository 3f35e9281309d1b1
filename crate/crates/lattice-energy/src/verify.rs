//! One-shot verification suite: every inequality and identity under study is
//! re-checked numerically with explicit error accounting.
//!
//! The two global inequalities (hexagonal vs honeycomb, square vs the
//! three-shift lattice) are evaluated through cancellation-free margin sums:
//! subtracting two nearly equal energies in floating point would drown the
//! exponentially small margins in rounding noise, so the margins are summed
//! termwise (every term has one sign) or transported to the `alpha >= 1`
//! regime by the exact self-duality of unit-covolume 2D lattices,
//! `E(Lambda; pi alpha) + 1 = (E(Lambda; pi/alpha) + 1) / alpha`.

use std::f64::consts::PI;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::configs;
use crate::energy::{self, EnergyResult};
use crate::error::{Error, Result};
use crate::geometry::{GaussianPotential, Lattice, PeriodicConfig};
use crate::optimize;
use crate::special;

/// Crossover of the two proof regimes, `sqrt(3)/pi`.
pub const CASE_CROSSOVER: f64 = 0.551_328_895_421_792_8;

/// Seed for every sampled quantity in the suite; fixed for reproducibility.
const SAMPLE_SEED: u64 = 0x4c61_7474_6963_6531;

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub grid: String,
    pub worst_margin: f64,
    pub error_budget: f64,
    pub pass: bool,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckReport {
    fn failed_with_error(name: &str, err: &Error) -> Self {
        CheckReport {
            name: name.to_string(),
            grid: String::new(),
            worst_margin: f64::NAN,
            error_budget: f64::NAN,
            pass: false,
            notes: Vec::new(),
            error: Some(err.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Absolute truncation tolerance for individual energy evaluations.
    pub energy_tol: f64,
    /// Absolute agreement tolerance between evaluation paths.
    pub path_agreement: f64,
    /// Number of alpha grid points for the two global inequalities.
    pub alpha_grid_points: usize,
    /// Marching grid for the curve tracer.
    pub curve_grid: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            energy_tol: 1e-12,
            path_agreement: 1e-10,
            alpha_grid_points: 200,
            curve_grid: 512,
        }
    }
}

impl Tolerances {
    /// Coarse variant: scales the per-evaluation tolerance and relaxes the
    /// agreement threshold accordingly (never below the defaults' ratio).
    pub fn with_energy_tol(tol: f64) -> Self {
        Tolerances {
            energy_tol: tol,
            path_agreement: (tol * 100.0).max(1e-10),
            ..Tolerances::default()
        }
    }
}

/// 200 log-spaced points in `[1e-2, 1e2]` by default.
pub fn default_alpha_grid(n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / (n - 1) as f64))
        .collect()
}

/// Auxiliary function `g(s) = e^{-s} - e^{-2s}/2 - e^{-2s/3}/2`.
pub fn aux_g(s: f64) -> f64 {
    (-s).exp() - 0.5 * (-2.0 * s).exp() - 0.5 * (-2.0 * s / 3.0).exp()
}

/// Auxiliary function `h(s) = e^{-s} - e^{-s/2}/4 - 3 e^{-3s/2}/4`.
pub fn aux_h(s: f64) -> f64 {
    (-s).exp() - 0.25 * (-s / 2.0).exp() - 0.75 * (-1.5 * s).exp()
}

/// Termwise margin sum over the hexagonal quadratic form
/// `q(k,l) = k^2 + kl + l^2`: returns `(-sum_{q != 0} w(scale * q), tail
/// bound, max term)` where each term `w(s)` is expected to be negative.
/// The tail uses `|w(s)| <= lead * exp(-decay * s)` with
/// `q(k,l) >= (k^2 + l^2)/2`.
fn hex_form_margin(
    scale: f64,
    decay: f64,
    lead: f64,
    w: impl Fn(f64) -> f64,
) -> (f64, f64, f64) {
    let beta = decay * scale;
    let q_max = (2.0 + 64.0 / beta).max(6.0);
    let m = (4.0 * q_max / 3.0).sqrt().ceil() as i64;
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut max_term = f64::NEG_INFINITY;
    for k in -m..=m {
        for l in -m..=m {
            let q = k * k + k * l + l * l;
            if q == 0 || q as f64 > q_max {
                continue;
            }
            let term = w(scale * q as f64);
            max_term = max_term.max(term);
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    }
    // sum_{q > q_max} |w| <= lead e^{-beta q_max / 2} (theta(beta/4)^2 - 1)
    let b4 = (-beta / 4.0).exp();
    let theta_bound = 1.0 + 2.0 * b4 / (1.0 - b4);
    let tail = lead * (-beta * q_max / 2.0).exp() * (theta_bound * theta_bound - 1.0);
    (-sum, tail, max_term)
}

/// Certified positive margin of the hexagonal-vs-honeycomb inequality at
/// pi-scaled parameter `alpha`:
/// `margin = E(honeycomb at unit density) - E(hexagonal)`, computed as
/// `-sum g` for `alpha >= sqrt3/pi` and as `-sum h / alpha` below, where
/// both sums have only negative terms. Returns
/// `(margin, tail budget, max summand)`.
pub fn hex_honeycomb_margin(alpha: f64) -> (f64, f64, f64) {
    if alpha >= CASE_CROSSOVER {
        let c = 2.0 * PI * alpha / 3.0_f64.sqrt();
        hex_form_margin(c, 2.0 / 3.0, 2.0, aux_g)
    } else {
        let u = 2.0 * PI / (3.0_f64.sqrt() * alpha);
        let (m2, tail, max_term) = hex_form_margin(u, 0.5, 2.0, aux_h);
        (m2 / alpha, tail / alpha, max_term)
    }
}

/// Certified margin `E(Gamma_x0) - E(Z^2)` at unit density, pi-scaled
/// parameter. For `alpha < 1` the margin is transported with the exact
/// relation `margin(alpha) = margin(1/alpha) / alpha`.
pub fn square_gamma_margin(alpha: f64, tol: f64) -> Result<(f64, f64)> {
    if alpha < 1.0 {
        let (m, b) = square_gamma_margin(1.0 / alpha, tol)?;
        return Ok((m / alpha, b / alpha));
    }
    let pot = GaussianPotential::pi_scaled(alpha)?;
    let gamma = PeriodicConfig::lattice_only(configs::gamma_x0_lattice());
    let square = PeriodicConfig::lattice_only(Lattice::integer(2));
    let mut eval_tol = tol;
    let mut last = (f64::NAN, f64::NAN);
    for _ in 0..3 {
        let eg = energy::energy_direct(&gamma, &pot, eval_tol)?;
        let ez = energy::energy_direct(&square, &pot, eval_tol)?;
        let margin = eg.value - ez.value;
        let budget = eg.trunc_error + ez.trunc_error;
        if margin > 3.0 * budget {
            return Ok((margin, budget));
        }
        // tighten the truncation until it resolves the margin
        last = (margin, budget);
        eval_tol = (margin.abs() * 1e-3).max(1e-280);
    }
    Ok(last)
}

fn energy_pair(
    cfg: &PeriodicConfig,
    pot: &GaussianPotential,
    tol: f64,
) -> Result<(EnergyResult, EnergyResult)> {
    Ok((
        energy::energy_direct(cfg, pot, tol)?,
        energy::energy_dual(cfg, pot, tol)?,
    ))
}

/// Lemma on the auxiliary functions: `g < 0` on `(2, 60]`, `h < 0` on
/// `(6, 60]`, plus the two exact polynomial factorizations behind the proof.
pub fn check_aux_g_h() -> CheckReport {
    let mut notes = Vec::new();
    let mut pass = true;
    // margin = -g resp. -h must exceed the floating-point noise of the
    // three-exponential evaluation (a few ulp of the dominant term)
    let mut worst = f64::INFINITY;
    let mut noise_at_worst = 0.0f64;
    let mut track = |m: f64, noise: f64, label: String, pass: &mut bool, notes: &mut Vec<String>| {
        if m < worst {
            worst = m;
            noise_at_worst = noise;
        }
        if m <= noise {
            *pass = false;
            notes.push(label);
        }
    };
    for i in 1..=1000 {
        let s = 2.0 + 58.0 * i as f64 / 1000.0;
        let m = -aux_g(s);
        let noise = 8.0 * f64::EPSILON
            * ((-s).exp() + 0.5 * (-2.0 * s).exp() + 0.5 * (-2.0 * s / 3.0).exp());
        track(m, noise, format!("g({s}) = {} not negative", -m), &mut pass, &mut notes);
    }
    for i in 1..=1000 {
        let s = 6.0 + 54.0 * i as f64 / 1000.0;
        let m = -aux_h(s);
        let noise = 8.0 * f64::EPSILON
            * ((-s).exp() + 0.25 * (-s / 2.0).exp() + 0.75 * (-1.5 * s).exp());
        track(m, noise, format!("h({s}) = {} not negative", -m), &mut pass, &mut notes);
    }
    // exact factorizations used in the proof, on random t
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut worst_fact = 0.0f64;
    for _ in 0..100 {
        let t: f64 = rng.gen_range(0.0..1.0);
        let lhs1 = -t.powi(6) + 2.0 * t.powi(3) - t * t;
        let rhs1 = -t * t * (t - 1.0) * (t.powi(3) + t * t + t - 1.0);
        let lhs2 = -3.0 * t.powi(3) + 4.0 * t * t - t;
        let rhs2 = -t * (1.0 - t) * (1.0 - 3.0 * t);
        worst_fact = worst_fact.max((lhs1 - rhs1).abs()).max((lhs2 - rhs2).abs());
    }
    // the cubic at t = e^{-2/3} stays below -0.087
    let t = (-2.0 / 3.0_f64).exp();
    let cubic = t.powi(3) + t * t + t - 1.0;
    if cubic >= -0.087 {
        pass = false;
        notes.push(format!("cubic at e^(-2/3) is {cubic}, expected < -0.087"));
    }
    if worst_fact > 1e-14 {
        pass = false;
        notes.push(format!("factorization residual {worst_fact:.3e} > 1e-14"));
    }
    notes.push(format!("worst factorization residual {worst_fact:.2e}"));
    CheckReport {
        name: "aux_g_h".to_string(),
        grid: "s in (2,60] and (6,60], 1000 points each; 100 random t".to_string(),
        worst_margin: worst,
        error_budget: noise_at_worst,
        pass,
        notes,
        error: None,
    }
}

/// Hexagonal vs honeycomb at unit density over the alpha grid, with the
/// case-split summand checks and the direct/AGM agreement.
pub fn check_hex_vs_honeycomb(alphas: &[f64], tol: &Tolerances) -> CheckReport {
    let name = "hex_vs_honeycomb";
    let mut notes = Vec::new();
    let mut pass = true;
    let mut worst_margin = f64::INFINITY;
    let mut worst_budget = 0.0f64;
    for &alpha in alphas {
        let (margin, budget, max_term) = hex_honeycomb_margin(alpha);
        if !(margin > budget) {
            pass = false;
            notes.push(format!("alpha={alpha}: margin {margin:.3e} <= budget {budget:.3e}"));
        }
        if max_term > 0.0 {
            pass = false;
            notes.push(format!("alpha={alpha}: positive summand {max_term:.3e}"));
        }
        if margin < worst_margin {
            worst_margin = margin;
            worst_budget = budget;
        }
    }
    // direct vs AGM honeycomb energies on the same grid
    let agm_check = || -> Result<f64> {
        let mut worst = 0.0f64;
        for &alpha in alphas {
            let agm = energy::honeycomb_energy_agm(alpha, tol.energy_tol)?;
            let direct = energy::energy_direct(
                &configs::honeycomb(1.0)?,
                &GaussianPotential::pi_scaled(alpha)?,
                tol.energy_tol,
            )?;
            worst = worst.max((agm.value - direct.value).abs());
        }
        Ok(worst)
    };
    match agm_check() {
        Ok(worst_agm) => {
            if worst_agm > tol.path_agreement {
                pass = false;
                notes.push(format!(
                    "AGM vs direct honeycomb disagreement {worst_agm:.3e} > {:.1e}",
                    tol.path_agreement
                ));
            } else {
                notes.push(format!("max AGM/direct disagreement {worst_agm:.3e}"));
            }
        }
        Err(e) => {
            return CheckReport::failed_with_error(name, &e);
        }
    }
    // both proof regimes have negative summands at the crossover
    let (m1, _, t1) = hex_form_margin(2.0 * PI * CASE_CROSSOVER / 3.0_f64.sqrt(), 2.0 / 3.0, 2.0, aux_g);
    let (m2, _, t2) = hex_form_margin(
        2.0 * PI / (3.0_f64.sqrt() * CASE_CROSSOVER),
        0.5,
        2.0,
        aux_h,
    );
    if t1 > 0.0 || t2 > 0.0 || m1 <= 0.0 || m2 <= 0.0 {
        pass = false;
        notes.push("case boundary sqrt3/pi: a summand failed to be negative".to_string());
    }
    if !(2.0 * PI * PI / 3.0 > 6.0) {
        pass = false;
        notes.push("constant check 2 pi^2 / 3 > 6 failed".to_string());
    }
    CheckReport {
        name: name.to_string(),
        grid: format!("{} log-spaced alpha in [1e-2, 1e2] (pi-scaled)", alphas.len()),
        worst_margin,
        error_budget: worst_budget,
        pass,
        notes,
        error: None,
    }
}

/// Square lattice vs the three-shift lattice at unit density, with the
/// proof's explicit lower bound.
pub fn check_square_vs_gamma_x0(alphas: &[f64], tol: &Tolerances) -> CheckReport {
    let name = "square_vs_gamma_x0";
    let mut notes = Vec::new();
    let mut pass = true;
    let mut worst_margin = f64::INFINITY;
    let mut worst_budget = 0.0f64;
    for &alpha in alphas {
        match square_gamma_margin(alpha, tol.energy_tol) {
            Ok((margin, budget)) => {
                if !(margin > budget) {
                    pass = false;
                    notes.push(format!(
                        "alpha={alpha}: margin {margin:.3e} <= budget {budget:.3e}"
                    ));
                }
                if margin < worst_margin {
                    worst_margin = margin;
                    worst_budget = budget;
                }
            }
            Err(e) => return CheckReport::failed_with_error(name, &e),
        }
        // lower bound E(Gamma_x0) >= 2 exp(-2 pi alpha / 3): the omitted
        // form values are exactly the difference, so sum them directly
        let (lb_margin, _, _) = gamma_x0_lower_bound_margin(alpha);
        if lb_margin < 0.0 {
            pass = false;
            notes.push(format!("alpha={alpha}: lower-bound margin {lb_margin:.3e} < 0"));
        }
    }
    // quartic estimate from the proof
    if !(0.4f64.powi(4) + 0.4 - 0.5 < 0.0) {
        pass = false;
        notes.push("quartic estimate 0.4^4 + 0.4 - 0.5 < 0 failed".to_string());
    }
    CheckReport {
        name: name.to_string(),
        grid: format!("{} log-spaced alpha in [1e-2, 1e2] (pi-scaled)", alphas.len()),
        worst_margin,
        error_budget: worst_budget,
        pass,
        notes,
        error: None,
    }
}

/// `E(Gamma_x0; pi alpha) - 2 exp(-2 pi alpha / 3)`, summed termwise over
/// the quadratic form `k^2 + kl + 5/2 l^2` so every term is nonnegative.
/// Returns `(margin, tail bound, term count)`.
pub fn gamma_x0_lower_bound_margin(alpha: f64) -> (f64, f64, usize) {
    let scale = 2.0 * PI * alpha / 3.0;
    let q_max = (2.0 + 64.0 / scale.min(64.0)).max(8.0);
    let m = (2.0 * q_max).sqrt().ceil() as i64;
    let mut sum = 0.0;
    let mut count = 0usize;
    for k in -m..=m {
        for l in -m..=m {
            if k == 0 && l == 0 {
                continue;
            }
            // skip the two leading terms (±1, 0): they are the bound itself
            if l == 0 && (k == 1 || k == -1) {
                continue;
            }
            let q = (k * k + k * l) as f64 + 2.5 * (l * l) as f64;
            if q > 2.0 * q_max {
                continue;
            }
            sum += (-scale * q).exp();
            count += 1;
        }
    }
    // the tail is positive too; its omission only understates the margin
    (sum, 0.0, count)
}

/// Spot check of the lattice theta minimality: sampled unit-density
/// lattices all satisfy `f_Lambda(0) >= f_hex(0)`, with equality at the
/// hexagonal lattice itself.
pub fn check_montgomery(sample_count: usize, alphas: &[f64], tol: &Tolerances) -> CheckReport {
    let name = "montgomery_theta_minimality";
    let run = || -> Result<(f64, f64, Vec<String>, bool)> {
        let mut notes = Vec::new();
        let mut pass = true;
        let hex = configs::hexagonal_lattice_unit();
        let zero = DVector::zeros(2);
        let mut lattices: Vec<(String, Lattice)> = Vec::new();
        // modular-domain grid: tau = x + i y with 0 <= x <= 1/2, |tau| >= 1
        for &x in &[0.0, 0.125, 0.25, 0.375, 0.5] {
            for &y in &[1.0, 1.3, 1.8, 2.5] {
                if x * x + y * y < 1.0 {
                    continue;
                }
                lattices.push((format!("tau={x}+{y}i"), modular_lattice(x, y)?));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ 0x6d6f6e74);
        while lattices.len() < sample_count {
            let x: f64 = rng.gen_range(0.0..0.5);
            let y: f64 = rng.gen_range(1.0..3.0);
            if x * x + y * y < 1.0 {
                continue;
            }
            lattices.push((format!("tau={x:.4}+{y:.4}i"), modular_lattice(x, y)?));
        }
        let mut worst = f64::INFINITY;
        let mut budget = 0.0f64;
        for &alpha in alphas {
            let pot = GaussianPotential::raw(alpha)?;
            let hex_cfg = PeriodicConfig::lattice_only(hex.clone());
            let f_hex = energy::f_gamma(&hex_cfg, &zero, &pot, tol.energy_tol)?;
            for (label, lat) in &lattices {
                let f = energy::f_gamma(
                    &PeriodicConfig::lattice_only(lat.clone()),
                    &zero,
                    &pot,
                    tol.energy_tol,
                )?;
                let margin = f.value - f_hex.value;
                let b = f.trunc_error + f_hex.trunc_error;
                if margin < -b {
                    pass = false;
                    notes.push(format!("{label} alpha={alpha}: margin {margin:.3e} < 0"));
                }
                if margin < worst {
                    worst = margin;
                    budget = b;
                }
            }
            // equality case: a sheared congruent copy of the hexagonal basis
            let b = hex.basis();
            let sheared = Lattice::from_columns(&[
                vec![b[(0, 0)] + b[(0, 1)], b[(1, 0)] + b[(1, 1)]],
                vec![b[(0, 1)], b[(1, 1)]],
            ])?;
            let eq_tol = tol.energy_tol.min(1e-13);
            let f_sheared = energy::f_gamma(
                &PeriodicConfig::lattice_only(sheared),
                &zero,
                &pot,
                eq_tol,
            )?;
            let f_hex_tight = energy::f_gamma(&hex_cfg, &zero, &pot, eq_tol)?;
            let eq_margin = (f_sheared.value - f_hex_tight.value).abs();
            if eq_margin > 1e-12 {
                pass = false;
                notes.push(format!(
                    "alpha={alpha}: hexagonal equality margin {eq_margin:.3e} > 1e-12"
                ));
            }
        }
        Ok((worst, budget, notes, pass))
    };
    match run() {
        Ok((worst, budget, notes, pass)) => CheckReport {
            name: name.to_string(),
            grid: format!("{sample_count} lattices x alpha in {alphas:?}"),
            worst_margin: worst,
            error_budget: budget,
            pass,
            notes,
            error: None,
        },
        Err(e) => CheckReport::failed_with_error(name, &e),
    }
}

/// Unit-covolume lattice for the modular parameter `tau = x + i y`.
fn modular_lattice(x: f64, y: f64) -> Result<Lattice> {
    let s = 1.0 / y.sqrt();
    Lattice::from_columns(&[vec![s, 0.0], vec![s * x, s * y]])
}

/// Theta ordering `theta3(0) >= theta3(x) >= theta3(1/2)` on an x grid,
/// evaluated through the cancellation-free difference series.
pub fn check_lemma_3_1(alphas: &[f64]) -> CheckReport {
    let name = "lemma_theta_ordering";
    let run = || -> Result<(f64, f64, Vec<String>, bool)> {
        let mut notes = Vec::new();
        let mut pass = true;
        let mut worst = f64::INFINITY;
        let mut budget = 0.0f64;
        let diff_tol = 1e-30;
        for &alpha in alphas {
            for i in 1..1000 {
                let x = i as f64 / 1000.0;
                let upper = special::theta3_diff(0.0, x, alpha, diff_tol)?;
                let lower = special::theta3_diff(x, 0.5, alpha, diff_tol)?;
                let scale_budget = upper.trunc_error + lower.trunc_error;
                // strict inequality except at the attained ends
                if x != 0.5 {
                    let m = lower.value;
                    if m <= scale_budget {
                        pass = false;
                        notes.push(format!("alpha={alpha} x={x}: lower margin {m:.3e}"));
                    }
                    if m < worst {
                        worst = m;
                        budget = scale_budget;
                    }
                }
                let m = upper.value;
                if m <= scale_budget {
                    pass = false;
                    notes.push(format!("alpha={alpha} x={x}: upper margin {m:.3e}"));
                }
                if m < worst {
                    worst = m;
                    budget = scale_budget;
                }
            }
            // equality cases
            let at_zero = special::theta3_diff(0.0, 0.0, alpha, diff_tol)?.value;
            let at_half = special::theta3_diff(0.5, 0.5, alpha, diff_tol)?.value;
            if at_zero != 0.0 || at_half != 0.0 {
                pass = false;
                notes.push(format!("alpha={alpha}: equality cases not exact"));
            }
        }
        Ok((worst, budget, notes, pass))
    };
    match run() {
        Ok((worst, budget, notes, pass)) => CheckReport {
            name: name.to_string(),
            grid: format!("x in (0,1) step 1e-3, alpha in {alphas:?}"),
            worst_margin: worst,
            error_budget: budget,
            pass,
            notes,
            error: None,
        },
        Err(e) => CheckReport::failed_with_error(name, &e),
    }
}

fn check_path_agreement(tol: &Tolerances) -> CheckReport {
    let name = "energy_path_agreement";
    let run = || -> Result<(f64, f64, Vec<String>, bool)> {
        let mut pass = true;
        let mut notes = Vec::new();
        let mut worst_slack = f64::INFINITY;
        let mut worst_gap = 0.0f64;
        let configs: Vec<(&str, PeriodicConfig)> = vec![
            ("square", configs::square(1.0)?),
            ("hexagonal", configs::hexagonal(1.0)?),
            ("honeycomb", configs::honeycomb(1.0)?),
            (
                "gamma_x0_union",
                configs::union3_square([1.0 / 3.0, 1.0 / 3.0], [2.0 / 3.0, 2.0 / 3.0])?,
            ),
        ];
        for &alpha in &[0.5, 1.0, 2.0] {
            let pot = GaussianPotential::raw(alpha)?;
            for (label, cfg) in &configs {
                let (d, p) = energy_pair(cfg, &pot, tol.energy_tol)?;
                let gap = (d.value - p.value).abs();
                let allowed = (d.trunc_error + p.trunc_error).max(tol.path_agreement);
                if gap > allowed {
                    pass = false;
                    notes.push(format!(
                        "{label} alpha={alpha}: |direct - dual| = {gap:.3e} > allowed {allowed:.3e}"
                    ));
                }
                worst_slack = worst_slack.min(allowed - gap);
                worst_gap = worst_gap.max(gap);
            }
        }
        notes.push(format!("worst |direct - dual| gap {worst_gap:.3e}"));
        Ok((worst_slack, 0.0, notes, pass))
    };
    match run() {
        Ok((worst, budget, notes, pass)) => CheckReport {
            name: name.to_string(),
            grid: "4 configurations x alpha in {0.5, 1, 2}".to_string(),
            worst_margin: worst,
            error_budget: budget,
            pass,
            notes,
            error: None,
        },
        Err(e) => CheckReport::failed_with_error(name, &e),
    }
}

fn check_density_trick(tol: &Tolerances) -> CheckReport {
    let name = "density_trick";
    let run = || -> Result<(f64, bool, Vec<String>)> {
        let hex = configs::hexagonal(1.0)?;
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ 0x64656e73);
        let mut worst = f64::INFINITY;
        let mut pass = true;
        let mut notes = Vec::new();
        for _ in 0..8 {
            let s: f64 = rng.gen_range(0.5..2.0);
            let alpha: f64 = rng.gen_range(0.5..2.0);
            let scaled = hex.scaled(s)?;
            let e1 = energy::energy_direct(&scaled, &GaussianPotential::raw(alpha)?, tol.energy_tol)?;
            let e2 = energy::energy_direct(
                &hex,
                &GaussianPotential::raw(alpha * s * s)?,
                tol.energy_tol,
            )?;
            let gap = (e1.value - e2.value).abs();
            let allowed = 1e-12_f64.max(2.0 * tol.energy_tol);
            worst = worst.min(allowed - gap);
            if gap > allowed {
                pass = false;
                notes.push(format!("s={s:.4} alpha={alpha:.4}: gap {gap:.3e}"));
            }
        }
        Ok((worst, pass, notes))
    };
    match run() {
        Ok((worst, pass, notes)) => CheckReport {
            name: name.to_string(),
            grid: "8 random (s, alpha)".to_string(),
            worst_margin: worst,
            error_budget: 0.0,
            pass,
            notes,
            error: None,
        },
        Err(e) => CheckReport::failed_with_error(name, &e),
    }
}

fn check_union2_decomposition(tol: &Tolerances) -> CheckReport {
    let name = "union2_energy_decomposition";
    let run = || -> Result<(f64, bool, Vec<String>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ 0x756e32);
        let mut worst = f64::INFINITY;
        let mut pass = true;
        let mut notes = Vec::new();
        let lattices = vec![
            configs::hexagonal_lattice_unit(),
            Lattice::diagonal(&[1.0, 2.0])?,
        ];
        for lat in lattices {
            for _ in 0..4 {
                let t = [rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95)];
                let cfg = configs::union2(&lat, &t)?;
                let pot = GaussianPotential::raw(rng.gen_range(0.5..2.0))?;
                let e_union = energy::energy_direct(&cfg, &pot, tol.energy_tol)?.value;
                let lat_cfg = PeriodicConfig::lattice_only(lat.clone());
                let e_lat = energy::energy_direct(&lat_cfg, &pot, tol.energy_tol)?.value;
                let x = lat.basis() * DVector::from_vec(t.to_vec());
                let f = energy::f_gamma(&lat_cfg, &x, &pot, tol.energy_tol)?.value;
                let gap = (e_union - (e_lat + f)).abs();
                let allowed = 1e-12_f64.max(4.0 * tol.energy_tol);
                worst = worst.min(allowed - gap);
                if gap > allowed {
                    pass = false;
                    notes.push(format!("gap {gap:.3e} at t={t:?}"));
                }
            }
        }
        Ok((worst, pass, notes))
    };
    match run() {
        Ok((worst, pass, notes)) => CheckReport {
            name: name.to_string(),
            grid: "2 lattices x 4 random shifts".to_string(),
            worst_margin: worst,
            error_budget: 0.0,
            pass,
            notes,
            error: None,
        },
        Err(e) => CheckReport::failed_with_error(name, &e),
    }
}

fn check_union3_formula(tol: &Tolerances) -> CheckReport {
    let name = "union3_energy_formula";
    let run = || -> Result<(f64, bool, Vec<String>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ 0x756e33);
        let mut worst = f64::INFINITY;
        let mut pass = true;
        let mut notes = Vec::new();
        for _ in 0..6 {
            let x: [f64; 2] = [rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95)];
            let y: [f64; 2] = [rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95)];
            if (x[0] - y[0]).abs() < 0.05 && (x[1] - y[1]).abs() < 0.05 {
                continue;
            }
            let alpha = rng.gen_range(0.5..2.5);
            let cfg = configs::union3_square(x, y)?;
            let direct = energy::energy_direct(
                &cfg,
                &GaussianPotential::pi_scaled(alpha)?,
                tol.energy_tol,
            )?
            .value;
            let f_val = optimize::objective_f3(x, y, alpha, tol.energy_tol)?;
            let via_f = optimize::union3_energy_from_objective(f_val, alpha, tol.energy_tol)?;
            let gap = (direct - via_f).abs();
            let allowed = 1e-10_f64.max(10.0 * tol.energy_tol);
            worst = worst.min(allowed - gap);
            if gap > allowed {
                pass = false;
                notes.push(format!("gap {gap:.3e} at x={x:?} y={y:?} alpha={alpha:.3}"));
            }
        }
        Ok((worst, pass, notes))
    };
    match run() {
        Ok((worst, pass, notes)) => CheckReport {
            name: name.to_string(),
            grid: "6 random (x, y, alpha)".to_string(),
            worst_margin: worst,
            error_budget: 0.0,
            pass,
            notes,
            error: None,
        },
        Err(e) => CheckReport::failed_with_error(name, &e),
    }
}

fn check_tensor_factorization(tol: &Tolerances) -> CheckReport {
    let name = "tensor_factorization";
    let run = || -> Result<(f64, bool, Vec<String>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ 0x74656e73);
        let mut worst = f64::INFINITY;
        let mut pass = true;
        let mut notes = Vec::new();
        for case in 0..20 {
            let factors = (0..2)
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
                    let lat = Lattice::diagonal(&[delta])?;
                    PeriodicConfig::new(
                        lat,
                        shifts
                            .iter()
                            .map(|s| DVector::from_vec(vec![s * delta]))
                            .collect(),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let alpha = rng.gen_range(0.5..2.0);
            let pot = GaussianPotential::raw(alpha)?;
            let product_cfg = configs::tensor_product(&factors)?;
            let direct = energy::energy_direct(&product_cfg, &pot, tol.energy_tol)?.value;
            let tensor = energy::energy_tensor(&factors, &pot, tol.energy_tol)?.value;
            let gap = (direct - tensor).abs();
            let allowed = 1e-10_f64.max(10.0 * tol.energy_tol);
            worst = worst.min(allowed - gap);
            if gap > allowed {
                pass = false;
                notes.push(format!("case {case}: gap {gap:.3e}"));
            }
        }
        // cuboid scan at fixed covolume: minimum at beta1 = beta2
        for &alpha in &[0.5, 1.0, 2.0] {
            let pot = GaussianPotential::raw(alpha)?;
            let mut best = (f64::INFINITY, 0usize);
            for (idx, i) in (0..41).enumerate() {
                let beta = 10f64.powf(-0.3 + 0.6 * i as f64 / 40.0);
                let factors = vec![
                    PeriodicConfig::lattice_only(Lattice::diagonal(&[beta])?),
                    PeriodicConfig::lattice_only(Lattice::diagonal(&[1.0 / beta])?),
                ];
                let e = energy::energy_tensor(&factors, &pot, tol.energy_tol)?.value;
                if e < best.0 {
                    best = (e, idx);
                }
            }
            if best.1 != 20 {
                pass = false;
                notes.push(format!(
                    "alpha={alpha}: cuboid minimum at grid index {} instead of the square",
                    best.1
                ));
            }
        }
        Ok((worst, pass, notes))
    };
    match run() {
        Ok((worst, pass, notes)) => CheckReport {
            name: name.to_string(),
            grid: "20 random 1D pairs; cuboid scan 41 points x 3 alphas".to_string(),
            worst_margin: worst,
            error_budget: 0.0,
            pass,
            notes,
            error: None,
        },
        Err(e) => CheckReport::failed_with_error(name, &e),
    }
}

fn check_cubic_agm() -> CheckReport {
    let name = "cubic_agm_identity";
    let run = || -> Result<(f64, bool, Vec<String>)> {
        let mut worst = f64::INFINITY;
        let mut pass = true;
        let mut notes = Vec::new();
        for &q in &[1e-6, 0.1, 0.5] {
            let r = energy::cubic_agm_identity(q, 1e-12)?;
            worst = worst.min(1e-10 - r);
            if r >= 1e-10 {
                pass = false;
                notes.push(format!("q={q}: residual {r:.3e}"));
            }
        }
        Ok((worst, pass, notes))
    };
    match run() {
        Ok((worst, pass, notes)) => CheckReport {
            name: name.to_string(),
            grid: "q in {1e-6, 0.1, 0.5}".to_string(),
            worst_margin: worst,
            error_budget: 0.0,
            pass,
            notes,
            error: None,
        },
        Err(e) => CheckReport::failed_with_error(name, &e),
    }
}

fn check_union2_optimizers(tol: &Tolerances) -> CheckReport {
    let name = "union2_optimizers";
    let run = || -> Result<(f64, bool, Vec<String>)> {
        let mut worst = f64::INFINITY;
        let mut pass = true;
        let mut notes = Vec::new();
        for &alpha in &[0.5, 2.0] {
            let pot = GaussianPotential::raw(alpha)?;
            let rect = Lattice::diagonal(&[1.0, 2.0])?;
            let m = optimize::minimize_shift_union2(&rect, &pot, tol.energy_tol, 64)?;
            let d = (m.argmin.coords()[0] - 0.5)
                .abs()
                .max((m.argmin.coords()[1] - 0.5).abs());
            worst = worst.min(1e-6 - d);
            if d > 1e-6 {
                pass = false;
                notes.push(format!("rect alpha={alpha}: argmin {:?}", m.argmin.coords()));
            }
            let hex = configs::hexagonal_lattice_unit();
            let m = optimize::minimize_shift_union2(&hex, &pot, tol.energy_tol, 64)?;
            let c = m.argmin.coords();
            let d_hole = [(1.0 / 3.0, 1.0 / 3.0), (2.0 / 3.0, 2.0 / 3.0)]
                .iter()
                .map(|&(a, b)| (c[0] - a).abs().max((c[1] - b).abs()))
                .fold(f64::INFINITY, f64::min);
            worst = worst.min(1e-6 - d_hole);
            if d_hole > 1e-6 {
                pass = false;
                notes.push(format!("hexagonal alpha={alpha}: argmin {c:?}"));
            }
        }
        Ok((worst, pass, notes))
    };
    match run() {
        Ok((worst, pass, notes)) => CheckReport {
            name: name.to_string(),
            grid: "rect diag(1,2) and hexagonal, alpha in {0.5, 2}".to_string(),
            worst_margin: worst,
            error_budget: 0.0,
            pass,
            notes,
            error: None,
        },
        Err(e) => CheckReport::failed_with_error(name, &e),
    }
}

fn check_equispacing(tol: &Tolerances) -> CheckReport {
    let name = "one_dimensional_equispacing";
    let run = || -> Result<(f64, bool, Vec<String>)> {
        let mut worst = f64::INFINITY;
        let mut pass = true;
        let mut notes = Vec::new();
        for &n in &[2usize, 3, 4] {
            for &alpha in &[0.5, 2.0] {
                let shifts = optimize::minimize_1d(n, alpha, tol.energy_tol)?;
                for i in 0..n {
                    let gap = if i + 1 < n {
                        shifts[i + 1] - shifts[i]
                    } else {
                        1.0 - shifts[i] + shifts[0]
                    };
                    let dev = (gap - 1.0 / n as f64).abs();
                    worst = worst.min(1e-6 - dev);
                    if dev > 1e-6 {
                        pass = false;
                        notes.push(format!("n={n} alpha={alpha}: shifts {shifts:?}"));
                    }
                }
            }
        }
        Ok((worst, pass, notes))
    };
    match run() {
        Ok((worst, pass, notes)) => CheckReport {
            name: name.to_string(),
            grid: "N in {2,3,4}, alpha in {0.5, 2}".to_string(),
            worst_margin: worst,
            error_budget: 0.0,
            pass,
            notes,
            error: None,
        },
        Err(e) => CheckReport::failed_with_error(name, &e),
    }
}

fn check_critical_points() -> CheckReport {
    let name = "union3_critical_points";
    let run = || -> Result<(f64, bool, Vec<String>)> {
        let mut worst = f64::INFINITY;
        let mut pass = true;
        let mut notes = Vec::new();
        for &alpha in &[0.5, 2.0, 30.0] {
            for point in [[1.0 / 3.0, 1.0 / 3.0], [1.0 / 3.0, 2.0 / 3.0]] {
                let r = optimize::critical_residual(
                    &optimize::TorusPoint::new(point.to_vec()),
                    alpha,
                    1e-12,
                )?;
                let m = r[0].abs().max(r[1].abs());
                worst = worst.min(1e-10 - m);
                if m >= 1e-10 {
                    pass = false;
                    notes.push(format!("alpha={alpha} {point:?}: residual {m:.3e}"));
                }
            }
        }
        // the z configuration is not critical
        let r = optimize::critical_residual(
            &optimize::TorusPoint::new(vec![0.25, 0.5]),
            3.5,
            1e-12,
        )?;
        if r[0].abs().max(r[1].abs()) < 1e-6 {
            pass = false;
            notes.push("z=(1/4,1/2) at alpha=3.5 reported as critical".to_string());
        }
        Ok((worst, pass, notes))
    };
    match run() {
        Ok((worst, pass, notes)) => CheckReport {
            name: name.to_string(),
            grid: "two critical pairs x alpha in {0.5, 2, 30}".to_string(),
            worst_margin: worst,
            error_budget: 0.0,
            pass,
            notes,
            error: None,
        },
        Err(e) => CheckReport::failed_with_error(name, &e),
    }
}

fn check_curves(tol: &Tolerances) -> CheckReport {
    let name = "critical_curves";
    let run = || -> Result<(f64, bool, Vec<String>)> {
        let mut pass = true;
        let mut notes = Vec::new();
        let mut worst = f64::INFINITY;
        // Four crossings at generic parameters. Extra crossings appear in
        // exceptional windows, one of which sits just below 3.5: the
        // tangency parameters are 3.39901342578 (verified down to the
        // tangency system) and 10.1247726191, so 3.0 lies inside the first
        // window and 30 inside the second.
        for &(alpha, expect_four, check_points) in &[
            (0.1, true, true),
            (2.0, true, true),
            (3.0, false, false),
            (5.0, true, false),
            (30.0, false, true),
        ] {
            let set = optimize::trace_curves(alpha, tol.curve_grid)?;
            let count = set.intersections.len();
            if expect_four && count != 4 {
                pass = false;
                notes.push(format!("alpha={alpha}: {count} intersections, expected 4"));
            }
            if !expect_four {
                if count <= 4 {
                    pass = false;
                    notes.push(format!(
                        "alpha={alpha}: {count} intersections, expected extra crossings"
                    ));
                } else {
                    notes.push(format!("alpha={alpha}: {count} intersections"));
                }
            }
            if check_points {
                for x1 in [1.0 / 3.0, 2.0 / 3.0] {
                    let d = set.distance_to_curve(1, [x1, 0.0]);
                    worst = worst.min(1e-3 - d);
                    if d > 1e-3 {
                        pass = false;
                        notes.push(format!("alpha={alpha}: ({x1}, 0) is {d:.2e} from c1"));
                    }
                }
            }
        }
        let dev = optimize::asymptotic_curve_check(0.01)?;
        if dev > 0.02 {
            pass = false;
            notes.push(format!("alpha=0.01: c1 deviation {dev:.3e} > 0.02"));
        } else {
            notes.push(format!("alpha=0.01: max c1 deviation {dev:.3e}"));
        }
        Ok((worst, pass, notes))
    };
    match run() {
        Ok((worst, pass, notes)) => CheckReport {
            name: name.to_string(),
            grid: "alpha in {0.1, 2, 3, 5, 30}; asymptotic alpha=0.01".to_string(),
            worst_margin: worst,
            error_budget: 0.0,
            pass,
            notes,
            error: None,
        },
        Err(e) => CheckReport::failed_with_error(name, &e),
    }
}

fn check_union3_comparison(tol: &Tolerances) -> CheckReport {
    let name = "union3_alpha_3_5_comparison";
    let run = || -> Result<(f64, bool, Vec<String>)> {
        let mut pass = true;
        let mut notes = Vec::new();
        let pot = GaussianPotential::pi_scaled(3.5)?;
        let crit = configs::union3_square([1.0 / 3.0, 1.0 / 3.0], [2.0 / 3.0, 2.0 / 3.0])?;
        let e_crit = energy::energy_direct(&crit, &pot, tol.energy_tol)?.value;
        if (e_crit - 0.18279).abs() > 5e-5 {
            pass = false;
            notes.push(format!("E(Gamma_x0) = {e_crit:.6}, expected 0.18279 +- 5e-5"));
        }
        let z = configs::union3_square([0.25, 0.5], [0.75, 0.5])?;
        let e_z = energy::energy_direct(&z, &pot, tol.energy_tol)?.value;
        if (e_z - 0.17159).abs() > 5e-5 {
            pass = false;
            notes.push(format!("E(Gamma_z) = {e_z:.6}, expected 0.17159 +- 5e-5"));
        }
        let m = optimize::minimize_union3(3.5, tol.energy_tol, 48)?;
        if m.energy.value > 0.17159 + 1e-4 {
            pass = false;
            notes.push(format!("minimizer energy {:.6} > 0.17159 + 1e-4", m.energy.value));
        }
        notes.push(format!(
            "E(Gamma_x0)={e_crit:.6}, E(Gamma_z)={e_z:.6}, found minimum {:.6}",
            m.energy.value
        ));
        Ok(((e_crit - e_z), pass, notes))
    };
    match run() {
        Ok((worst, pass, notes)) => CheckReport {
            name: name.to_string(),
            grid: "alpha = 3.5 (pi-scaled), density 3".to_string(),
            worst_margin: worst,
            error_budget: 5e-5,
            pass,
            notes,
            error: None,
        },
        Err(e) => CheckReport::failed_with_error(name, &e),
    }
}

/// Runs the full suite. Check failures are reported in the returned
/// structures, never thrown; infrastructure errors (convergence failures)
/// appear in the `error` field of the affected report.
pub fn run_all(tol: &Tolerances) -> Vec<CheckReport> {
    let alphas = default_alpha_grid(tol.alpha_grid_points);
    let jobs: Vec<Box<dyn Fn() -> CheckReport + Send + Sync>> = vec![
        Box::new(check_aux_g_h),
        Box::new({
            let a = alphas.clone();
            let t = *tol;
            move || check_hex_vs_honeycomb(&a, &t)
        }),
        Box::new({
            let a = alphas.clone();
            let t = *tol;
            move || check_square_vs_gamma_x0(&a, &t)
        }),
        Box::new({
            let t = *tol;
            move || check_montgomery(50, &[0.5, 1.0, 2.0], &t)
        }),
        Box::new(|| check_lemma_3_1(&[0.1, 1.0, 10.0])),
        Box::new({
            let t = *tol;
            move || check_path_agreement(&t)
        }),
        Box::new({
            let t = *tol;
            move || check_density_trick(&t)
        }),
        Box::new({
            let t = *tol;
            move || check_union2_decomposition(&t)
        }),
        Box::new({
            let t = *tol;
            move || check_union3_formula(&t)
        }),
        Box::new({
            let t = *tol;
            move || check_tensor_factorization(&t)
        }),
        Box::new(check_cubic_agm),
        Box::new({
            let t = *tol;
            move || check_union2_optimizers(&t)
        }),
        Box::new({
            let t = *tol;
            move || check_equispacing(&t)
        }),
        Box::new(check_critical_points),
        Box::new({
            let t = *tol;
            move || check_curves(&t)
        }),
        Box::new({
            let t = *tol;
            move || check_union3_comparison(&t)
        }),
    ];
    let mut reports: Vec<CheckReport> = jobs.par_iter().map(|job| job()).collect();
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    reports
}

/// JSON report document.
#[derive(Serialize)]
pub struct ReportDocument<'a> {
    pub all_pass: bool,
    pub checks: &'a [CheckReport],
}

pub fn report_json(reports: &[CheckReport]) -> String {
    let doc = ReportDocument {
        all_pass: reports.iter().all(|r| r.pass),
        checks: reports,
    };
    serde_json::to_string_pretty(&doc).expect("report serialization cannot fail")
}
