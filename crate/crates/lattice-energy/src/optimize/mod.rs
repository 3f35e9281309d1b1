//! Shift optimization on the torus: two-lattice unions, the three-shift
//! objective `F`, its critical equations, and 1D periodic configurations.
//!
//! Everything in this module that relates to the three-shift problem uses
//! the `exp(-pi alpha r^2)` convention: `f(u) = f_Z(u) = sum_n exp(-pi
//! alpha (u - n)^2)` and the derivative factorization
//! `sqrt(alpha) f'(u) = -sin(2 pi u) Q(u; 1/alpha)`.

mod curves;

pub use curves::{asymptotic_curve_check, trace_curves, CurveSet, Intersection};

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::energy::{self, EnergyPath, EnergyResult};
use crate::error::{Error, Result};
use crate::geometry::{GaussianPotential, Lattice, PeriodicConfig};
use crate::special;

/// Point on the torus `[0,1)^d` in lattice-basis coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint(Vec<f64>);

impl TorusPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        let reduced = coords
            .into_iter()
            .map(|c| {
                let mut t = c - c.floor();
                if t >= 1.0 {
                    t = 0.0;
                }
                t
            })
            .collect();
        Self(reduced)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// `f_Z(u)` with exponent `pi alpha`.
pub(crate) fn f_z(u: f64, alpha: f64, tol: f64) -> Result<f64> {
    Ok(energy::f_line(u, PI * alpha, tol)?.0)
}

/// Theta deviation `theta3(u; beta) - 1 = 2 sum_{k>=1} e^{-pi beta k^2}
/// cos(2 pi k u)`. For wide Gaussians the whole optimization signal lives in
/// this exponentially small quantity; summing it directly keeps full
/// relative precision where `f` itself would drown it in the constant term.
fn theta_dev(u: f64, beta: f64) -> f64 {
    let mut sum = 0.0;
    let mut k = 1usize;
    loop {
        let kf = k as f64;
        let w = (-PI * beta * kf * kf).exp();
        sum += 2.0 * w * (2.0 * PI * kf * u).cos();
        // relative cutoff against the leading weight
        if w <= (-PI * beta).exp() * 1e-20 || w == 0.0 || k > 10_000 {
            return sum;
        }
        k += 1;
    }
}

/// Derivative of [`theta_dev`]: `-4 pi sum k e^{-pi beta k^2} sin(2 pi k u)`.
fn theta_dev_prime(u: f64, beta: f64) -> f64 {
    let mut sum = 0.0;
    let mut k = 1usize;
    loop {
        let kf = k as f64;
        let w = (-PI * beta * kf * kf).exp();
        sum += -4.0 * PI * kf * w * (2.0 * PI * kf * u).sin();
        if w <= (-PI * beta).exp() * 1e-20 || w == 0.0 || k > 10_000 {
            return sum;
        }
        k += 1;
    }
}

/// `f_Z'(u)` through the factorization `sqrt(alpha) f' = -sin(2 pi u) Q(u; 1/alpha)`.
pub(crate) fn f_z_prime(u: f64, alpha: f64, tol: f64) -> Result<f64> {
    let q = special::q_function(u, 1.0 / alpha, tol)?;
    Ok(-(2.0 * PI * u).sin() * q / alpha.sqrt())
}

/// Result of a two-lattice shift optimization.
#[derive(Debug, Clone)]
pub struct Union2Minimum {
    pub argmin: TorusPoint,
    pub energy: EnergyResult,
}

/// Minimizes `E(Lambda) + f_Lambda(B t)` over the torus in basis coordinates:
/// coarse grid scan (default `grid_n = 64` per axis) followed by a damped
/// Newton polish on the analytic gradient of `f_Lambda`.
pub fn minimize_shift_union2(
    lattice: &Lattice,
    pot: &GaussianPotential,
    tol: f64,
    grid_n: usize,
) -> Result<Union2Minimum> {
    let d = lattice.dim();
    if !(1..=3).contains(&d) {
        return Err(Error::UnsupportedDimension {
            dim: d,
            reason: "union2 shift optimization implemented for d <= 3".to_string(),
        });
    }
    let n = grid_n.max(8);
    let total = n.pow(d as u32);
    if total > 20_000_000 {
        return Err(Error::Validation(format!(
            "grid of {total} points is too large"
        )));
    }
    let cfg = PeriodicConfig::lattice_only(lattice.clone());
    let eval_tol = (tol * 1e-2).min(1e-13);
    // Wide Gaussians carry their whole shift dependence in exponentially
    // small dual terms; the Poisson-summed variable part keeps those at
    // full relative precision. Sharp Gaussians are fine in real space.
    let a = pot.raw_exponent();
    let use_dual = a < 4.0 * std::f64::consts::PI;
    let objective = |t: &[f64]| -> Result<f64> {
        let x = lattice.basis() * DVector::from_vec(t.to_vec());
        if use_dual {
            Ok(energy::f_dual_variable(lattice, &x, a, 1e-12)?.0)
        } else {
            Ok(energy::f_gamma(&cfg, &x, pot, eval_tol)?.value)
        }
    };
    // deterministic parallel scan: minimum by (value, index)
    let best = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut rem = flat;
            let mut t = vec![0.0; d];
            for c in t.iter_mut().take(d) {
                *c = (rem % n) as f64 / n as f64;
                rem /= n;
            }
            let v = objective(&t).unwrap_or(f64::INFINITY);
            (v, flat)
        })
        .reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| {
                if (b.0, b.1) < (a.0, a.1) {
                    b
                } else {
                    a
                }
            },
        );
    if best.1 == usize::MAX {
        return Err(Error::Optimization("grid scan produced no finite value".to_string()));
    }
    let mut start = vec![0.0; d];
    {
        let mut rem = best.1;
        for c in start.iter_mut().take(d) {
            *c = (rem % n) as f64 / n as f64;
            rem /= n;
        }
    }
    let grad = |t: &[f64]| -> Result<Vec<f64>> {
        let x = lattice.basis() * DVector::from_vec(t.to_vec());
        let g_x = if use_dual {
            energy::f_dual_variable(lattice, &x, a, 1e-12)?.1
        } else {
            energy::f_gamma_gradient(&cfg, &x, pot, eval_tol)?
        };
        let g = lattice.basis().transpose() * DVector::from_vec(g_x);
        Ok(g.iter().copied().collect())
    };
    let polished = newton_minimize(&objective, &grad, &start, 2.0 / n as f64, 1e-11, 200)?;
    let x_min = lattice.basis() * DVector::from_vec(polished.clone());
    let f_min = energy::f_gamma(&cfg, &x_min, pot, eval_tol)?;
    let e_lat = energy::energy_direct(&cfg, pot, tol)?;
    let argmin = TorusPoint::new(polished);
    Ok(Union2Minimum {
        argmin,
        energy: EnergyResult {
            value: e_lat.value + f_min.value,
            trunc_error: e_lat.trunc_error + f_min.trunc_error,
            radius: e_lat.radius,
            path: EnergyPath::Direct,
        },
    })
}

/// Damped Newton minimization with finite-difference Hessian of the supplied
/// analytic gradient, with a golden-section coordinate-descent fallback.
/// Convergence is declared when the accepted step drops below `step_tol`
/// (the gradient scale varies over hundreds of orders of magnitude across
/// the parameter range, so a position criterion is the meaningful one).
fn newton_minimize(
    objective: &impl Fn(&[f64]) -> Result<f64>,
    gradient: &impl Fn(&[f64]) -> Result<Vec<f64>>,
    start: &[f64],
    coarse_step: f64,
    step_tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let d = start.len();
    let mut x = start.to_vec();
    // a few coordinate-descent sweeps pull the grid point into the basin
    coordinate_descent(objective, &mut x, coarse_step, 1e-9, 12)?;
    // Newton on the stationarity condition grad = 0, with step acceptance
    // by gradient-norm decrease: near strongly anisotropic minima the
    // objective improvement falls below its own ulp long before the argmin
    // is located, while the gradient components keep full relative accuracy.
    let h = 1e-6;
    let mut g = gradient(&x)?;
    let norm = |v: &[f64]| v.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let mut last_step = f64::INFINITY;
    for _ in 0..max_iter {
        let gnorm = norm(&g);
        if gnorm == 0.0 {
            return Ok(x);
        }
        // finite-difference Jacobian of the gradient
        let mut hess = DMatrix::zeros(d, d);
        for j in 0..d {
            let mut xp = x.to_vec();
            xp[j] += h;
            let gp = gradient(&xp)?;
            let mut xm = x.to_vec();
            xm[j] -= h;
            let gm = gradient(&xm)?;
            for i in 0..d {
                hess[(i, j)] = (gp[i] - gm[i]) / (2.0 * h);
            }
        }
        let rhs = DVector::from_vec(g.clone());
        let step = hess
            .lu()
            .solve(&rhs)
            .unwrap_or_else(|| &rhs * (coarse_step / rhs.norm().max(f64::MIN_POSITIVE)));
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..24 {
            let cand: Vec<f64> = (0..d).map(|i| x[i] - lambda * step[i]).collect();
            let g_cand = gradient(&cand)?;
            if norm(&g_cand) < gnorm {
                x = cand;
                g = g_cand;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            // stationary within evaluation noise
            return Ok(x);
        }
        last_step = lambda * step.amax();
        if last_step < step_tol {
            return Ok(x);
        }
    }
    if last_step < 1e-6 {
        return Ok(x);
    }
    Err(Error::Optimization(format!(
        "descent did not converge; best iterate {x:?} with last step {last_step:.3e}"
    )))
}

/// Cyclic coordinate descent with golden-section line search.
fn coordinate_descent(
    objective: &impl Fn(&[f64]) -> Result<f64>,
    x: &mut [f64],
    initial_step: f64,
    step_tol: f64,
    max_sweeps: usize,
) -> Result<()> {
    let d = x.len();
    let mut span = initial_step;
    for _ in 0..max_sweeps {
        let mut moved = 0.0f64;
        for i in 0..d {
            let base = x.to_vec();
            let f1d = |t: f64| -> Result<f64> {
                let mut y = base.clone();
                y[i] = t;
                objective(&y)
            };
            let t = golden_section(&f1d, x[i] - span, x[i] + span, step_tol * 0.25)?;
            moved = moved.max((t - x[i]).abs());
            x[i] = t;
        }
        if moved < step_tol {
            break;
        }
        span = (moved * 4.0).max(step_tol * 16.0);
    }
    Ok(())
}

/// Golden-section search for the minimum of a unimodal-ish 1D slice.
fn golden_section(
    f: &impl Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<f64> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Objective for three shifted copies of Z^2:
/// `F(x, y) = f(x1) f(x2) + f(y1) f(y2) + f(x1 - y1) f(x2 - y2)`.
pub fn objective_f3(x: [f64; 2], y: [f64; 2], alpha: f64, tol: f64) -> Result<f64> {
    let f = |u: f64| f_z(u, alpha, tol);
    Ok(f(x[0])? * f(x[1])? + f(y[0])? * f(y[1])? + f(x[0] - y[0])? * f(x[1] - y[1])?)
}

/// Energy of the three-shift union through the objective:
/// `E = f(0)^2 + (2/3) F - 1` (density 3, exponent `pi alpha`).
pub fn union3_energy_from_objective(f_value: f64, alpha: f64, tol: f64) -> Result<f64> {
    let f0 = f_z(0.0, alpha, tol)?;
    Ok(f0 * f0 + 2.0 / 3.0 * f_value - 1.0)
}

/// The two residuals of the symmetric critical equations (`y = x*`):
/// `f'(x1) f(x2) + f'(2 x1) f(2 x2)` and `f(x1) f'(x2) + f(2 x1) f'(2 x2)`,
/// with `f'` evaluated through the Q factorization.
pub fn critical_residual(x: &TorusPoint, alpha: f64, tol: f64) -> Result<[f64; 2]> {
    if x.dim() != 2 {
        return Err(Error::Validation("critical residual needs a 2D point".to_string()));
    }
    let (x1, x2) = (x.coords()[0], x.coords()[1]);
    let f = |u: f64| f_z(u, alpha, tol);
    let fp = |u: f64| f_z_prime(u, alpha, tol);
    Ok([
        fp(x1)? * f(x2)? + fp(2.0 * x1)? * f(2.0 * x2)?,
        f(x1)? * fp(x2)? + f(2.0 * x1)? * fp(2.0 * x2)?,
    ])
}

/// Result of the heuristic three-shift minimization. `heuristic` is always
/// true: the grid-plus-descent search certifies nothing about global
/// optimality.
#[derive(Debug, Clone)]
pub struct Union3Minimum {
    pub x: TorusPoint,
    pub y: TorusPoint,
    pub energy: EnergyResult,
    pub objective: f64,
    pub heuristic: bool,
}

/// Minimizes `F(x, y)` over the 4-torus: exhaustive grid scan (default 48
/// points per axis, using the `F(x,y) = F(y,x)` symmetry) followed by damped
/// Newton descent from the best grid cells. Reported canonically as the
/// lexicographically smallest representative of the symmetry orbit.
pub fn minimize_union3(alpha: f64, tol: f64, grid_n: usize) -> Result<Union3Minimum> {
    let n = grid_n.max(8);
    let eval_tol = (tol * 1e-2).min(1e-13);
    // The minimization works on the variable part of F. With
    // g(u) = theta3(u; 1/alpha) - 1 the objective satisfies
    //   alpha F(x, y) = 3 + sum over the three pairs of (g_a + g_b + g_a g_b),
    // and the bracketed sum carries the whole shift dependence at full
    // relative precision even when g is exponentially small.
    let beta = 1.0 / alpha;
    let g_tab: Vec<f64> = (0..n).map(|i| theta_dev(i as f64 / n as f64, beta)).collect();
    let pair = |a: f64, b: f64| a + b + a * b;
    let g_at = |i: usize| g_tab[i % n];
    // scan flat indices with flat(x) <= flat(y), using F(x,y) = F(y,x)
    let per_x = n * n;
    let best = (0..per_x)
        .into_par_iter()
        .map(|fx| {
            let (i1, i2) = (fx / n, fx % n);
            let mut local = (f64::INFINITY, usize::MAX);
            for fy in fx..per_x {
                let (j1, j2) = (fy / n, fy % n);
                let v = pair(g_at(i1), g_at(i2))
                    + pair(g_at(j1), g_at(j2))
                    + pair(g_at(n + i1 - j1), g_at(n + i2 - j2));
                let flat = fx * per_x + fy;
                if (v, flat) < local {
                    local = (v, flat);
                }
            }
            local
        })
        .reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| if (b.0, b.1) < (a.0, a.1) { b } else { a },
        );
    if best.1 == usize::MAX {
        return Err(Error::Optimization("union3 grid scan failed".to_string()));
    }
    let fx = best.1 / per_x;
    let fy = best.1 % per_x;
    let start = vec![
        (fx / n) as f64 / n as f64,
        (fx % n) as f64 / n as f64,
        (fy / n) as f64 / n as f64,
        (fy % n) as f64 / n as f64,
    ];
    let f_var = |v: &[f64]| -> Result<f64> {
        let g = |u: f64| theta_dev(u, beta);
        Ok(pair(g(v[0]), g(v[1]))
            + pair(g(v[2]), g(v[3]))
            + pair(g(v[0] - v[2]), g(v[1] - v[3])))
    };
    let gradient = |v: &[f64]| -> Result<Vec<f64>> {
        let g = |u: f64| theta_dev(u, beta);
        let gp = |u: f64| theta_dev_prime(u, beta);
        let (x1, x2, y1, y2) = (v[0], v[1], v[2], v[3]);
        let (d1, d2) = (x1 - y1, x2 - y2);
        Ok(vec![
            gp(x1) * (1.0 + g(x2)) + gp(d1) * (1.0 + g(d2)),
            (1.0 + g(x1)) * gp(x2) + (1.0 + g(d1)) * gp(d2),
            gp(y1) * (1.0 + g(y2)) - gp(d1) * (1.0 + g(d2)),
            (1.0 + g(y1)) * gp(y2) - (1.0 + g(d1)) * gp(d2),
        ])
    };
    let polished = newton_minimize(&f_var, &gradient, &start, 2.0 / n as f64, 1e-12, 300)?;
    let f_value = (3.0 + f_var(&polished)?) / alpha;
    let (xc, yc) = canonical_union3([polished[0], polished[1]], [polished[2], polished[3]]);
    let e = union3_energy_from_objective(f_value, alpha, eval_tol)?;
    Ok(Union3Minimum {
        x: TorusPoint::new(xc.to_vec()),
        y: TorusPoint::new(yc.to_vec()),
        energy: EnergyResult {
            value: e,
            trunc_error: 10.0 * eval_tol,
            radius: f64::NAN,
            path: EnergyPath::Direct,
        },
        objective: f_value,
        heuristic: true,
    })
}

/// Lexicographically smallest representative of the symmetry orbit of the
/// three-shift configuration `{0, x, y}`: re-basing at any of the three
/// shifts, the symmetries of Z^2 acting coordinatewise (signs and the
/// coordinate swap), and the order of the pair.
fn canonical_union3(x: [f64; 2], y: [f64; 2]) -> ([f64; 2], [f64; 2]) {
    let frac = |v: f64| {
        let mut t = v - v.floor();
        if t >= 1.0 {
            t = 0.0;
        }
        // collapse values within grid noise of 1 back to 0
        if (1.0 - t).abs() < 1e-12 {
            t = 0.0;
        }
        t
    };
    let mut best: Option<[f64; 4]> = None;
    let rebased = [
        (x, y),
        ([frac(-x[0]), frac(-x[1])], [frac(y[0] - x[0]), frac(y[1] - x[1])]),
        ([frac(x[0] - y[0]), frac(x[1] - y[1])], [frac(-y[0]), frac(-y[1])]),
    ];
    for (a, b) in rebased {
        for swap_pair in [false, true] {
            let (p, q) = if swap_pair { (b, a) } else { (a, b) };
            for swap_coord in [false, true] {
                let (p, q) = if swap_coord {
                    ([p[1], p[0]], [q[1], q[0]])
                } else {
                    (p, q)
                };
                for s1 in [1.0, -1.0] {
                    for s2 in [1.0, -1.0] {
                        let cand = [
                            frac(s1 * p[0]),
                            frac(s2 * p[1]),
                            frac(s1 * q[0]),
                            frac(s2 * q[1]),
                        ];
                        let better = match best {
                            None => true,
                            Some(b) => cand < b,
                        };
                        if better {
                            best = Some(cand);
                        }
                    }
                }
            }
        }
    }
    let b = best.expect("orbit is nonempty");
    ([b[0], b[1]], [b[2], b[3]])
}

/// Minimizes the N-point 1D periodic energy
/// `E = (1/N) sum_{j,k} f_Z(x_j - x_k) - 1` (exponent `pi alpha`) over
/// shifts with `x_1 = 0` pinned, since the energy is invariant under global
/// shifts. Returns the sorted shifts.
///
/// The energy is minimized in its Fourier form: with structure factors
/// `S_k = sum_j exp(2 pi i k x_j)` and `q = exp(-pi/alpha)`,
///
/// ```text
/// E = sqrt(1/alpha)/N * (N + 2 sum_{k>=1} q^{k^2} |S_k|^2) - 1,
/// ```
///
/// so it suffices to minimize `Phi = sum_k q^{k^2} |S_k|^2`. All terms are
/// nonnegative and evaluated at full relative precision, which keeps the
/// near-degenerate valleys of the N = 4 problem resolvable.
pub fn minimize_1d(n_points: usize, alpha: f64, tol: f64) -> Result<Vec<f64>> {
    if !(2..=8).contains(&n_points) {
        return Err(Error::Validation(format!(
            "1D minimization supports 2..=8 points, got {n_points}"
        )));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Validation(format!("alpha must be positive, got {alpha}")));
    }
    let free = n_points - 1;
    // harmonic weights q^{k^2}; cut off relative to the leading weight
    let beta = 1.0 / alpha;
    let mut weights = Vec::new();
    for k in 1..=400usize {
        let w = (-PI * beta * (k * k) as f64).exp();
        weights.push(w);
        if w <= weights[0] * 1e-26 || w == 0.0 {
            break;
        }
    }
    let phi = |shifts_free: &[f64]| -> f64 {
        let mut total = 0.0;
        for (k, w) in weights.iter().enumerate() {
            let kf = (k + 1) as f64;
            let mut re = 1.0; // pinned shift at 0
            let mut im = 0.0;
            for &x in shifts_free {
                let (s, c) = (2.0 * PI * kf * x).sin_cos();
                re += c;
                im += s;
            }
            total += w * (re * re + im * im);
        }
        total
    };
    let phi_grad = |shifts_free: &[f64]| -> Vec<f64> {
        let mut g = vec![0.0; shifts_free.len()];
        for (k, w) in weights.iter().enumerate() {
            let kf = (k + 1) as f64;
            let mut re = 1.0;
            let mut im = 0.0;
            for &x in shifts_free {
                let (s, c) = (2.0 * PI * kf * x).sin_cos();
                re += c;
                im += s;
            }
            // d|S_k|^2 / dx_m = -4 pi k Im(e^{2 pi i k x_m} conj(S_k))
            for (gm, &x) in g.iter_mut().zip(shifts_free.iter()) {
                let (s, c) = (2.0 * PI * kf * x).sin_cos();
                *gm += w * (-4.0) * PI * kf * (s * re - c * im);
            }
        }
        g
    };
    // Grid resolution: a multiple of N so the equispaced configuration is
    // itself a grid point (otherwise the scan can start in the wrong
    // basin), as large as a ~1e7-point budget allows.
    let n_grid = match free {
        1 => 192,
        2 => 96,
        3 => 48,
        _ => {
            let mut m = n_points;
            while (((m + n_points) as f64).powi(free as i32)) <= 8e6 {
                m += n_points;
            }
            m
        }
    };
    let total = n_grid.pow(free as u32);
    let best = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut rem = flat;
            let mut v = vec![0.0f64; free];
            for s in v.iter_mut() {
                *s = (rem % n_grid) as f64 / n_grid as f64;
                rem /= n_grid;
            }
            (phi(&v), flat)
        })
        .reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| if (b.0, b.1) < (a.0, a.1) { b } else { a },
        );
    let mut start = vec![0.0f64; free];
    {
        let mut rem = best.1;
        for v in start.iter_mut() {
            *v = (rem % n_grid) as f64 / n_grid as f64;
            rem /= n_grid;
        }
    }
    let objective = |v: &[f64]| -> Result<f64> { Ok(phi(v)) };
    let gradient = |v: &[f64]| -> Result<Vec<f64>> { Ok(phi_grad(v)) };
    let step_tol = (tol * 1e-3).clamp(1e-14, 1e-9);
    let polished = newton_minimize(&objective, &gradient, &start, 2.0 / n_grid as f64, step_tol, 300)?;
    let mut shifts: Vec<f64> = std::iter::once(0.0)
        .chain(polished.iter().map(|v| {
            let mut t = v - v.floor();
            if t >= 1.0 {
                t = 0.0;
            }
            t
        }))
        .collect();
    shifts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(shifts)
}
