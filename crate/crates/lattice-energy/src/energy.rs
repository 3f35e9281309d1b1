//! Gaussian energy of periodic configurations, via four routes:
//!
//! * `energy_direct` — truncated lattice sums in real space,
//! * `energy_dual` — Poisson-summed series over the dual lattice,
//! * `energy_tensor` — factorization over 1D components for Cartesian products,
//! * `honeycomb_energy_agm` — the cubic-AGM identity for the honeycomb.
//!
//! Every truncated sum carries a certified tail bound. For a d-dimensional
//! Gaussian sum over `Lambda + x` restricted to `|point| <= R` the tail is
//! bounded by a packing argument: the translated fundamental cells of the
//! omitted points are disjoint, lie outside the ball of radius `R - D`
//! (`D = sum of basis column norms` bounds the cell diameter) and on each
//! cell `exp(-a |point|^2) <= exp(-a (|y| - D)^2)` for every cell point `y`.
//! Integrating in polar coordinates gives, with `m = R - 2D > 0`,
//!
//! ```text
//! tail <= S_{d-1}/covol * (1 + D/m)^{d-1} * I_{d-1}(a, m),
//! I_k(a, m) = int_m^inf u^k exp(-a u^2) du  (elementary upper bounds below)
//! ```

use std::f64::consts::PI;

use nalgebra::DVector;

use crate::configs;
use crate::error::{Error, Result};
use crate::geometry::{GaussianPotential, Lattice, PeriodicConfig};

/// Point-count guard for a single truncated lattice sum.
const MAX_POINTS: f64 = 2e8;

/// Which evaluation route produced an energy value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyPath {
    Direct,
    Dual,
    Tensor,
    Agm,
}

impl std::fmt::Display for EnergyPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EnergyPath::Direct => "direct",
            EnergyPath::Dual => "dual",
            EnergyPath::Tensor => "tensor",
            EnergyPath::Agm => "agm",
        };
        write!(f, "{s}")
    }
}

/// Energy value with its certified truncation bound, the truncation radius
/// that produced it and the evaluation route.
#[derive(Debug, Clone, Copy)]
pub struct EnergyResult {
    pub value: f64,
    pub trunc_error: f64,
    pub radius: f64,
    pub path: EnergyPath,
}

/// Compensated (Kahan) accumulator; the lattice sums can mix term magnitudes
/// across ~15 decades and the path-agreement tolerances are tight.
#[derive(Default, Clone, Copy)]
struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    fn add(&mut self, term: f64) {
        let y = term - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

/// Surface area of the unit sphere S^{d-1} for d = 1..=4.
fn sphere_area(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        _ => unreachable!("dimension checked by caller"),
    }
}

/// Upper bound for `int_m^inf u^k exp(-a u^2) du`, k = 0..=3.
fn gaussian_moment_bound(k: usize, a: f64, m: f64) -> f64 {
    let e = (-a * m * m).exp();
    match k {
        0 => e / (2.0 * a * m),
        1 => e / (2.0 * a),
        2 => e * (m / (2.0 * a) + 1.0 / (4.0 * a * a * m)),
        3 => e * (m * m / (2.0 * a) + 1.0 / (2.0 * a * a)),
        _ => unreachable!(),
    }
}

/// Certified bound on `sum over |B n + x| > R of exp(-a |B n + x|^2)`.
/// Requires `R > 2 D`; returns infinity otherwise so callers keep growing R.
fn lattice_tail_bound(d: usize, a: f64, covol: f64, cell_diam: f64, radius: f64) -> f64 {
    let m = radius - 2.0 * cell_diam;
    if m <= 0.0 {
        return f64::INFINITY;
    }
    let fan = (1.0 + cell_diam / m).powi(d as i32 - 1);
    sphere_area(d) / covol * fan * gaussian_moment_bound(d - 1, a, m)
}

/// Smallest radius (within a growth factor) whose tail bound is below `tol`.
fn choose_radius(d: usize, a: f64, covol: f64, cell_diam: f64, tol: f64) -> Result<f64> {
    let mut r = 2.0 * cell_diam + ((1.0 / tol).ln().max(1.0) / a).sqrt() + 1.0;
    for _ in 0..400 {
        if lattice_tail_bound(d, a, covol, cell_diam, r) <= tol {
            return Ok(r);
        }
        r *= 1.2;
    }
    Err(Error::Convergence(format!(
        "no truncation radius reaches tol {tol:.3e} for exponent {a:.3e}"
    )))
}

/// Visits every lattice point `v = B n + shift` with squared norm
/// `<= radius^2`, passing `(v, |v|^2)` to the callback. The coefficient box
/// comes from `|n_i + (B^{-1} shift)_i| <= ||row_i(B^{-1})|| * radius`, and
/// the bounds are symmetrized around the box center so that mirrored shifts
/// visit mirrored points.
fn for_each_point_r2(
    lat: &Lattice,
    shift: &DVector<f64>,
    radius: f64,
    mut visit: impl FnMut(&[f64; 4], f64),
) -> Result<()> {
    let d = lat.dim();
    if d > 4 {
        return Err(Error::UnsupportedDimension {
            dim: d,
            reason: "lattice sums implemented for d <= 4".to_string(),
        });
    }
    let inv = lat.inv_basis();
    let center = -(inv * shift);
    let mut lo = [0i64; 4];
    let mut hi = [0i64; 4];
    let mut count = 1.0f64;
    for i in 0..d {
        let row_norm: f64 = (0..d).map(|j| inv[(i, j)] * inv[(i, j)]).sum::<f64>().sqrt();
        let c = center[i].round();
        let span = (row_norm * radius + (center[i] - c).abs()).ceil() as i64 + 1;
        lo[i] = c as i64 - span;
        hi[i] = c as i64 + span;
        count *= (2 * span + 1) as f64;
    }
    if count > MAX_POINTS {
        return Err(Error::Convergence(format!(
            "lattice enumeration box of ~{count:.2e} points exceeds the cap"
        )));
    }
    let basis = lat.basis();
    let r2_max = radius * radius;
    // Hand-rolled nested loops up to d = 4; each level adds one basis column
    // times its coefficient to the accumulator.
    struct Walk<'a, F: FnMut(&[f64; 4], f64)> {
        d: usize,
        lo: [i64; 4],
        hi: [i64; 4],
        cols: [[f64; 4]; 4],
        r2_max: f64,
        visit: &'a mut F,
    }
    impl<F: FnMut(&[f64; 4], f64)> Walk<'_, F> {
        fn recurse(&mut self, level: usize, acc: [f64; 4]) {
            if level == self.d {
                let mut r2 = 0.0;
                for v in acc.iter().take(self.d) {
                    r2 += v * v;
                }
                if r2 <= self.r2_max {
                    (self.visit)(&acc, r2);
                }
                return;
            }
            for n in self.lo[level]..=self.hi[level] {
                let mut next = acc;
                for (i, cell) in next.iter_mut().enumerate().take(self.d) {
                    *cell += n as f64 * self.cols[level][i];
                }
                self.recurse(level + 1, next);
            }
        }
    }
    let mut cols = [[0.0f64; 4]; 4];
    for j in 0..d {
        for i in 0..d {
            cols[j][i] = basis[(i, j)];
        }
    }
    let mut acc = [0.0f64; 4];
    for i in 0..d {
        acc[i] = shift[i];
    }
    Walk {
        d,
        lo,
        hi,
        cols,
        r2_max,
        visit: &mut visit,
    }
    .recurse(0, acc);
    Ok(())
}

/// Truncated Gaussian sum `sum_{n} exp(-a |B n + shift|^2)` with certified
/// tail. The shift is reduced modulo the lattice first; the sum is invariant
/// and the reduced representative keeps the enumeration box small.
/// With `exclude_origin` the exact zero vector is skipped, which lets the
/// self-interaction term of a lattice energy drop out without the
/// catastrophic `1 + tiny - 1` absorption.
fn gaussian_lattice_sum_impl(
    lat: &Lattice,
    shift: &DVector<f64>,
    a: f64,
    tol: f64,
    exclude_origin: bool,
) -> Result<(f64, f64, f64)> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Validation(format!("exponent must be positive, got {a}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Validation(format!("tolerance must be positive, got {tol}")));
    }
    let d = lat.dim();
    let cell_diam: f64 = (0..d).map(|j| lat.basis().column(j).norm()).sum();
    let radius = choose_radius(d, a, lat.covolume(), cell_diam, tol)?;
    let reduced = lat.reduce_centered(shift);
    let mut acc = Kahan::default();
    for_each_point_r2(lat, &reduced, radius, |_, r2| {
        if exclude_origin && r2 == 0.0 {
            return;
        }
        acc.add((-a * r2).exp());
    })?;
    let value = acc.value();
    let tail = lattice_tail_bound(d, a, lat.covolume(), cell_diam, radius);
    if tol < value.abs() * 1e-16 {
        return Err(Error::Convergence(format!(
            "requested tolerance {tol:.3e} is below f64 resolution of value {value:.6e}"
        )));
    }
    Ok((value, tail, radius))
}

fn gaussian_lattice_sum(
    lat: &Lattice,
    shift: &DVector<f64>,
    a: f64,
    tol: f64,
) -> Result<(f64, f64, f64)> {
    gaussian_lattice_sum_impl(lat, shift, a, tol, false)
}

/// Theta-like sum `f_Gamma(x) = sum_{gamma in Gamma} exp(-a |x - gamma|^2)`.
pub fn f_gamma(
    config: &PeriodicConfig,
    x: &DVector<f64>,
    pot: &GaussianPotential,
    tol: f64,
) -> Result<EnergyResult> {
    let a = pot.raw_exponent();
    let per_shift = tol / config.num_shifts() as f64;
    let mut value = Kahan::default();
    let mut err = 0.0;
    let mut radius: f64 = 0.0;
    for s in config.shifts() {
        // |x - (lambda + s)| = |lambda + (s - x)|
        let (v, e, r) = gaussian_lattice_sum(config.lattice(), &(s - x), a, per_shift)?;
        value.add(v);
        err += e;
        radius = radius.max(r);
    }
    Ok(EnergyResult {
        value: value.value(),
        trunc_error: err,
        radius,
        path: EnergyPath::Direct,
    })
}

/// Convenience scalar version of `f_gamma` for the 1D integer lattice:
/// `f_Z(x) = sum_n exp(-a (x - n)^2)`, returning (value, certified error).
pub fn f_line(x: f64, a: f64, tol: f64) -> Result<(f64, f64)> {
    let lat = Lattice::integer(1);
    let shift = DVector::from_vec(vec![-x]);
    let (v, e, _) = gaussian_lattice_sum(&lat, &shift, a, tol)?;
    Ok((v, e))
}

/// `f_Z(x)` together with its derivative
/// `f_Z'(x) = sum_n -2 a (x - n) exp(-a (x - n)^2)`.
/// Returns `(value, certified error of the value, derivative)`.
pub fn f_line_with_derivative(x: f64, a: f64, tol: f64) -> Result<(f64, f64, f64)> {
    let lat = Lattice::integer(1);
    let shift = DVector::from_vec(vec![-x]);
    let d = lat.dim();
    let cell_diam = 1.0;
    let radius = choose_radius(d, a, 1.0, cell_diam, tol)?;
    let reduced = lat.reduce_centered(&shift);
    let mut val = Kahan::default();
    let mut deriv = Kahan::default();
    // v = n - x + (integer correction); d/dx exp(-a (x-n)^2) = 2 a v exp(-a v^2)
    for_each_point_r2(&lat, &reduced, radius, |v, r2| {
        let w = (-a * r2).exp();
        val.add(w);
        deriv.add(2.0 * a * v[0] * w);
    })?;
    let tail = lattice_tail_bound(d, a, 1.0, cell_diam, radius);
    Ok((val.value(), tail, deriv.value()))
}

/// Variable part of `f_Lambda(x)` in the Poisson-summed form, together with
/// its gradient:
///
/// ```text
/// f_var(x) = covol^{-1} (pi/a)^{d/2} sum_{mu in dual, mu != 0}
///            exp(-pi^2 |mu|^2 / a) cos(2 pi mu . x)
/// ```
///
/// `f_Lambda(x) = f_var(x) + covol^{-1} (pi/a)^{d/2}`, so the two differ by
/// a constant: same minimizers, but `f_var` is a sum of exponentially small
/// terms evaluated at full relative precision, which is what shift
/// optimization needs for wide Gaussians.
pub fn f_dual_variable(
    lat: &Lattice,
    x: &DVector<f64>,
    a: f64,
    rel_tol: f64,
) -> Result<(f64, Vec<f64>)> {
    let d = lat.dim();
    let dual = lat.dual()?;
    let a_star = PI * PI / a;
    let prefactor = (PI / a).powf(d as f64 / 2.0) / lat.covolume();
    // absolute tolerance relative to the leading dual term; for d = 3 the
    // minimal column norm over-estimates the shortest vector, which only
    // tightens the tolerance
    let shortest_sq = match d {
        1 | 2 => dual.shortest_vector_sq()?,
        _ => (0..d)
            .map(|j| dual.basis().column(j).norm_squared())
            .fold(f64::INFINITY, f64::min),
    };
    let lead = (-a_star * shortest_sq).exp();
    let tol_abs = (rel_tol * lead * prefactor).max(f64::MIN_POSITIVE * 1e20);
    let cell_diam: f64 = (0..d).map(|j| dual.basis().column(j).norm()).sum();
    let radius = choose_radius(d, a_star, dual.covolume(), cell_diam, tol_abs / prefactor)?;
    let basis = dual.basis();
    let mut value = Kahan::default();
    let mut grad = vec![Kahan::default(); d];
    let spans: Vec<i64> = (0..d)
        .map(|i| {
            let row_norm: f64 = (0..d)
                .map(|j| dual.inv_basis()[(i, j)].powi(2))
                .sum::<f64>()
                .sqrt();
            (row_norm * radius).ceil() as i64 + 1
        })
        .collect();
    let r2_max = radius * radius;
    let mut visit = |n: &[i64]| {
        if n.iter().all(|&v| v == 0) {
            return;
        }
        let mut mu = [0.0f64; 4];
        for (jcol, &nj) in n.iter().enumerate() {
            for (i, m) in mu.iter_mut().enumerate().take(d) {
                *m += nj as f64 * basis[(i, jcol)];
            }
        }
        let r2: f64 = mu.iter().take(d).map(|v| v * v).sum();
        if r2 > r2_max {
            return;
        }
        let w = (-a_star * r2).exp();
        let phase: f64 = 2.0 * PI * (0..d).map(|i| mu[i] * x[i]).sum::<f64>();
        value.add(w * phase.cos());
        for (g, m) in grad.iter_mut().zip(mu.iter()) {
            g.add(-2.0 * PI * m * w * phase.sin());
        }
    };
    match d {
        1 => {
            for i0 in -spans[0]..=spans[0] {
                visit(&[i0]);
            }
        }
        2 => {
            for i0 in -spans[0]..=spans[0] {
                for i1 in -spans[1]..=spans[1] {
                    visit(&[i0, i1]);
                }
            }
        }
        3 => {
            for i0 in -spans[0]..=spans[0] {
                for i1 in -spans[1]..=spans[1] {
                    for i2 in -spans[2]..=spans[2] {
                        visit(&[i0, i1, i2]);
                    }
                }
            }
        }
        _ => {
            return Err(Error::UnsupportedDimension {
                dim: d,
                reason: "dual-variable sums implemented for d <= 3".to_string(),
            })
        }
    }
    Ok((
        prefactor * value.value(),
        grad.into_iter().map(|k| prefactor * k.value()).collect(),
    ))
}

/// Gradient of `f_Gamma` with respect to the evaluation point `x`:
/// `grad f_Gamma(x) = sum_gamma 2 a (gamma - x) exp(-a |x - gamma|^2)`.
pub fn f_gamma_gradient(
    config: &PeriodicConfig,
    x: &DVector<f64>,
    pot: &GaussianPotential,
    tol: f64,
) -> Result<Vec<f64>> {
    let a = pot.raw_exponent();
    let d = config.dim();
    let lat = config.lattice();
    let cell_diam: f64 = (0..d).map(|j| lat.basis().column(j).norm()).sum();
    let per_shift = tol / config.num_shifts() as f64;
    let radius = choose_radius(d, a, lat.covolume(), cell_diam, per_shift)?;
    let mut grad = vec![Kahan::default(); d];
    for s in config.shifts() {
        let reduced = lat.reduce_centered(&(s - x));
        for_each_point_r2(lat, &reduced, radius, |v, r2| {
            let w = (-a * r2).exp();
            for (g, vi) in grad.iter_mut().zip(v.iter()) {
                g.add(2.0 * a * vi * w);
            }
        })?;
    }
    Ok(grad.into_iter().map(|k| k.value()).collect())
}

/// Direct-space energy
/// `E(Gamma) = (1/J) sum_{j,k} f_Lambda(x_j - x_k) - 1`.
/// The subtracted 1 cancels exactly the origin term of the diagonal
/// `f_Lambda(0)`, so the origin is skipped during summation instead: for
/// sharp Gaussians the energy is exponentially small and would otherwise be
/// absorbed by the constant.
pub fn energy_direct(
    config: &PeriodicConfig,
    pot: &GaussianPotential,
    tol: f64,
) -> Result<EnergyResult> {
    let a = pot.raw_exponent();
    let j_count = config.num_shifts();
    let per_eval = tol / j_count as f64;
    let lat = config.lattice();
    let zero = DVector::zeros(config.dim());
    let (diag, diag_err, mut radius) = gaussian_lattice_sum_impl(lat, &zero, a, per_eval, true)?;
    let mut off = Kahan::default();
    let mut err = diag_err;
    for j in 0..j_count {
        for k in (j + 1)..j_count {
            let diff = &config.shifts()[j] - &config.shifts()[k];
            let (v, e, r) = gaussian_lattice_sum(lat, &diff, a, per_eval)?;
            off.add(v);
            err += 2.0 * e / j_count as f64;
            radius = radius.max(r);
        }
    }
    let value = diag + 2.0 / j_count as f64 * off.value();
    Ok(EnergyResult {
        value,
        trunc_error: err,
        radius,
        path: EnergyPath::Direct,
    })
}

/// Poisson-summed energy over the dual lattice:
/// `E(Gamma) = (pi/a)^{d/2} / (J covol) * sum_{mu in dual} exp(-pi^2 |mu|^2 / a) |S(mu)|^2 - 1`
/// with the structure factor `S(mu) = sum_j exp(2 pi i mu . x_j)`.
pub fn energy_dual(
    config: &PeriodicConfig,
    pot: &GaussianPotential,
    tol: f64,
) -> Result<EnergyResult> {
    let a = pot.raw_exponent();
    let d = config.dim();
    let j_count = config.num_shifts() as f64;
    let lat = config.lattice();
    let dual = lat.dual()?;
    let a_star = PI * PI / a;
    let prefactor = (PI / a).powf(d as f64 / 2.0) / (j_count * lat.covolume());
    let cell_diam: f64 = (0..d).map(|j| dual.basis().column(j).norm()).sum();
    // The structure factor is bounded by J^2.
    let sum_tol = tol / (prefactor * j_count * j_count);
    let radius = choose_radius(d, a_star, dual.covolume(), cell_diam, sum_tol)?;

    // Enumerate dual points explicitly; we need the vector, not just |mu|^2,
    // for the structure factor.
    let inv = dual.inv_basis();
    let basis = dual.basis();
    let mut lo = [0i64; 4];
    let mut hi = [0i64; 4];
    let mut count = 1.0f64;
    for i in 0..d {
        let row_norm: f64 = (0..d).map(|j| inv[(i, j)] * inv[(i, j)]).sum::<f64>().sqrt();
        let span = (row_norm * radius).ceil() as i64 + 1;
        lo[i] = -span;
        hi[i] = span;
        count *= (2 * span + 1) as f64;
    }
    if count > MAX_POINTS {
        return Err(Error::Convergence(format!(
            "dual enumeration box of ~{count:.2e} points exceeds the cap"
        )));
    }
    let shifts = config.shifts();
    let mut acc = Kahan::default();
    let r2_max = radius * radius;
    let mut n = [0i64; 4];
    let mut walk = |n: &[i64; 4]| {
        let mut mu = [0.0f64; 4];
        for (jcol, &nj) in n.iter().enumerate().take(d) {
            for (i, m) in mu.iter_mut().enumerate().take(d) {
                *m += nj as f64 * basis[(i, jcol)];
            }
        }
        let r2: f64 = mu.iter().take(d).map(|v| v * v).sum();
        if r2 > r2_max {
            return;
        }
        let mut re = 0.0;
        let mut im = 0.0;
        for s in shifts {
            let phase: f64 = 2.0 * PI * (0..d).map(|i| mu[i] * s[i]).sum::<f64>();
            re += phase.cos();
            im += phase.sin();
        }
        acc.add((-a_star * r2).exp() * (re * re + im * im));
    };
    // Plain nested loops over the box (d <= 4).
    match d {
        1 => {
            for i0 in lo[0]..=hi[0] {
                n[0] = i0;
                walk(&n);
            }
        }
        2 => {
            for i0 in lo[0]..=hi[0] {
                for i1 in lo[1]..=hi[1] {
                    n[0] = i0;
                    n[1] = i1;
                    walk(&n);
                }
            }
        }
        3 => {
            for i0 in lo[0]..=hi[0] {
                for i1 in lo[1]..=hi[1] {
                    for i2 in lo[2]..=hi[2] {
                        n = [i0, i1, i2, 0];
                        walk(&n);
                    }
                }
            }
        }
        4 => {
            for i0 in lo[0]..=hi[0] {
                for i1 in lo[1]..=hi[1] {
                    for i2 in lo[2]..=hi[2] {
                        for i3 in lo[3]..=hi[3] {
                            n = [i0, i1, i2, i3];
                            walk(&n);
                        }
                    }
                }
            }
        }
        _ => {
            return Err(Error::UnsupportedDimension {
                dim: d,
                reason: "dual sums implemented for d <= 4".to_string(),
            })
        }
    }
    let tail = prefactor
        * j_count
        * j_count
        * lattice_tail_bound(d, a_star, dual.covolume(), cell_diam, radius);
    let value = prefactor * acc.value() - 1.0;
    if tol < value.abs() * 1e-16 {
        return Err(Error::Convergence(format!(
            "requested tolerance {tol:.3e} is below f64 resolution of value {value:.6e}"
        )));
    }
    Ok(EnergyResult {
        value,
        trunc_error: tail,
        radius,
        path: EnergyPath::Dual,
    })
}

/// Energy of a Cartesian product of 1D periodic configurations:
/// `E(Gamma_x) = prod_m (E_m + 1) - 1`.
pub fn energy_tensor(
    configs_1d: &[PeriodicConfig],
    pot: &GaussianPotential,
    tol: f64,
) -> Result<EnergyResult> {
    if configs_1d.is_empty() {
        return Err(Error::Validation("tensor energy needs at least one factor".into()));
    }
    if configs_1d.iter().any(|c| c.dim() != 1) {
        return Err(Error::Validation(
            "tensor energy factors must be one-dimensional".into(),
        ));
    }
    let per_factor = tol / (3.0 * configs_1d.len() as f64);
    let mut product = 1.0;
    let mut rel = 1.0;
    let mut radius: f64 = 0.0;
    for cfg in configs_1d {
        let e = energy_direct(cfg, pot, per_factor)?;
        let factor = e.value + 1.0;
        product *= factor;
        rel *= 1.0 + e.trunc_error / factor;
        radius = radius.max(e.radius);
    }
    Ok(EnergyResult {
        value: product - 1.0,
        trunc_error: product.abs() * (rel - 1.0).max(0.0) + f64::EPSILON,
        radius,
        path: EnergyPath::Tensor,
    })
}

/// Honeycomb energy at unit density through the cubic-AGM route:
/// `E_{pi alpha}(honeycomb) = (E_{pi alpha}(sqrt2 Lambda2) + E_{pi alpha}(sqrt(2/3) Lambda2)) / 2`.
/// `alpha` uses the pi-scaled convention.
pub fn honeycomb_energy_agm(alpha: f64, tol: f64) -> Result<EnergyResult> {
    let pot = GaussianPotential::pi_scaled(alpha)?;
    let hex = configs::hexagonal_lattice_unit();
    let big = PeriodicConfig::lattice_only(hex.scaled(2.0_f64.sqrt())?);
    let small = PeriodicConfig::lattice_only(hex.scaled((2.0 / 3.0_f64).sqrt())?);
    let e1 = energy_direct(&big, &pot, tol)?;
    let e2 = energy_direct(&small, &pot, tol)?;
    Ok(EnergyResult {
        value: 0.5 * (e1.value + e2.value),
        trunc_error: 0.5 * (e1.trunc_error + e2.trunc_error),
        radius: e1.radius.max(e2.radius),
        path: EnergyPath::Agm,
    })
}

/// Hexagonal-form theta sums `a(q) = sum q^{k^2+kl+l^2}` and
/// `b(q) = sum q^{k^2+kl+l^2} zeta_3^{k-l}` (real by symmetry; the cosine
/// weight is `1` for `k = l (mod 3)` and `-1/2` otherwise).
/// Returns `(a, b, imag_b, tail_bound)`.
fn hexagonal_q_sums(q: f64, tol: f64) -> Result<(f64, f64, f64, f64)> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Validation(format!("q must lie in (0,1), got {q}")));
    }
    // k^2+kl+l^2 >= (k^2+l^2)/2, so the tail outside max(|k|,|l|) <= M is
    // below 2 * T(M) * T_all for the 1D series in s = sqrt(q).
    let s = q.sqrt();
    let one_sided = |m: f64| -> f64 {
        let head = s.powf(m * m);
        let r = s.powf(2.0 * m + 1.0);
        head * r / (1.0 - r)
    };
    let t_all = 1.0 + 2.0 * s / (1.0 - s);
    let mut m = 2usize;
    while 2.0 * (2.0 * one_sided(m as f64)) * t_all > tol {
        m += 1;
        if m > 10_000 {
            return Err(Error::Convergence(format!(
                "hexagonal theta sum needs more than 10000 shells for tol {tol:.3e}"
            )));
        }
    }
    let tail = 2.0 * (2.0 * one_sided(m as f64)) * t_all;
    let lnq = q.ln();
    let mut a = Kahan::default();
    let mut b = Kahan::default();
    let mut b_im = Kahan::default();
    let mi = m as i64;
    for k in -mi..=mi {
        for l in -mi..=mi {
            let e = (k * k + k * l + l * l) as f64;
            let term = (lnq * e).exp();
            a.add(term);
            let rem = (k - l).rem_euclid(3);
            let (c, si) = match rem {
                0 => (1.0, 0.0),
                1 => (-0.5, 3.0_f64.sqrt() / 2.0),
                _ => (-0.5, -(3.0_f64.sqrt()) / 2.0),
            };
            b.add(term * c);
            b_im.add(term * si);
        }
    }
    Ok((a.value(), b.value(), b_im.value(), tail))
}

/// Residual `|3 a(q^3) - a(q) - 2 b(q)|` of the arithmetic step of the cubic
/// AGM. The imaginary part of `b` must vanish; it is checked as a sanity
/// condition.
pub fn cubic_agm_identity(q: f64, tol: f64) -> Result<f64> {
    let (a_q, b_q, b_im, tail_q) = hexagonal_q_sums(q, tol / 6.0)?;
    let (a_q3, _, _, tail_q3) = hexagonal_q_sums(q * q * q, tol / 6.0)?;
    let scale = a_q.abs().max(1.0);
    if b_im.abs() > 1e-12 * scale {
        return Err(Error::Convergence(format!(
            "imaginary part of b(q) should vanish, got {b_im:.3e}"
        )));
    }
    let _ = tail_q + 3.0 * tail_q3; // consumed budget, below tol by construction
    Ok((3.0 * a_q3 - a_q - 2.0 * b_q).abs())
}
