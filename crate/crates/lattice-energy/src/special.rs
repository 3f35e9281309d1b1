//! Jacobi theta-3, its triple product, Montgomery's Q function and the
//! explicit bound envelopes used by the verification suite.
//!
//! Conventions: `theta3(x, alpha) = sum_k exp(-pi alpha k^2) exp(2 pi i k x)`
//! restricted to real arguments, i.e. the classical `vartheta_3(x; i alpha)`.
//! All truncations carry certified tail bounds derived from geometric-ratio
//! estimates: for `k > K` the term ratio of `exp(-pi alpha k^2)` is at most
//! `r = exp(-pi alpha (2K+1))`, so one tail side is bounded by
//! `exp(-pi alpha K^2) r / (1 - r)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Hard cap on series terms / product factors before reporting a
/// convergence failure.
const MAX_TERMS: usize = 1_000_000;

/// Constant `22002/11000` from the explicit bounds on `f_Z`.
const F_ENVELOPE_C: f64 = 22002.0 / 11000.0;

/// A truncated series value with a certified absolute truncation bound.
#[derive(Debug, Clone, Copy)]
pub struct ThetaValue {
    pub value: f64,
    pub trunc_error: f64,
    pub terms_used: usize,
}

fn check_params(alpha: f64, tol: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Validation(format!(
            "theta parameter must be positive, got {alpha}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Validation(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// Reduces `x` into `[0, 1)`; the defining series is exactly 1-periodic, so
/// reducing first makes the implementation exactly periodic as well.
fn reduce_period(x: f64) -> f64 {
    let mut t = x - x.floor();
    if t >= 1.0 {
        t = 0.0;
    }
    t
}

/// Two-sided tail bound for `sum_{|k|>K} exp(-pi alpha k^2)` (coefficients
/// of modulus <= 1 on each side are absorbed by the caller's factor 2).
fn theta_tail(alpha: f64, k: usize) -> f64 {
    let kf = k as f64;
    let head = (-PI * alpha * kf * kf).exp();
    let r = (-PI * alpha * (2.0 * kf + 1.0)).exp();
    2.0 * head * r / (1.0 - r)
}

/// Smallest `K` with `theta_tail(alpha, K) <= tol`.
fn theta_terms_needed(alpha: f64, tol: f64) -> Result<usize> {
    // Analytic starting guess, then refine upward.
    let guess = ((4.0 / tol).ln().max(1.0) / (PI * alpha)).sqrt().ceil() as usize;
    let mut k = guess.clamp(1, MAX_TERMS);
    while theta_tail(alpha, k) > tol {
        k += 1;
        if k > MAX_TERMS {
            return Err(Error::Convergence(format!(
                "theta series needs more than {MAX_TERMS} terms for tol {tol:.3e} at alpha {alpha:.3e}"
            )));
        }
    }
    // The guess may overshoot; walk back down for a tight count.
    while k > 1 && theta_tail(alpha, k - 1) <= tol {
        k -= 1;
    }
    Ok(k)
}

/// Jacobi theta-3 via the cosine series,
/// `1 + 2 sum_{k>=1} exp(-pi alpha k^2) cos(2 pi k x)`.
pub fn theta3(x: f64, alpha: f64, tol: f64) -> Result<ThetaValue> {
    check_params(alpha, tol)?;
    let xr = reduce_period(x);
    let k_max = theta_terms_needed(alpha, tol)?;
    let mut sum = 0.0;
    let mut comp = 0.0; // Kahan compensation
    for k in 1..=k_max {
        let kf = k as f64;
        let term = 2.0 * (-PI * alpha * kf * kf).exp() * (2.0 * PI * kf * xr).cos();
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(ThetaValue {
        value: 1.0 + sum,
        trunc_error: theta_tail(alpha, k_max),
        terms_used: 2 * k_max + 1,
    })
}

/// Difference `theta3(x, alpha) - theta3(y, alpha)` evaluated termwise with
/// the product form `cos A - cos B = -2 sin((A+B)/2) sin((A-B)/2)`, which
/// keeps full relative accuracy even when the two values agree to within
/// double-precision rounding.
pub fn theta3_diff(x: f64, y: f64, alpha: f64, tol: f64) -> Result<ThetaValue> {
    check_params(alpha, tol)?;
    let k_max = theta_terms_needed(alpha, tol / 2.0)?;
    let mut sum = 0.0;
    let mut comp = 0.0;
    for k in 1..=k_max {
        let kf = k as f64;
        let weight = 2.0 * (-PI * alpha * kf * kf).exp();
        let term = weight * (-2.0) * (PI * kf * (x + y)).sin() * (PI * kf * (x - y)).sin();
        let z = term - comp;
        let t = sum + z;
        comp = (t - sum) - z;
        sum = t;
    }
    Ok(ThetaValue {
        value: sum,
        trunc_error: 2.0 * theta_tail(alpha, k_max),
        terms_used: k_max,
    })
}

/// Derivative `d/dx theta3(x, alpha) = -4 pi sum_{k>=1} k exp(-pi alpha k^2)
/// sin(2 pi k x)`, with a certified tail. Used as an independent route to
/// `f'` in tests.
pub fn theta3_dx(x: f64, alpha: f64, tol: f64) -> Result<ThetaValue> {
    check_params(alpha, tol)?;
    let xr = reduce_period(x);
    // Tail: 4 pi sum_{k>K} k q^{k^2} <= 4 pi (K+1) q^{(K+1)^2} / (1 - rho)
    // with term ratio rho <= 2 q^{2K+3} once (k+1)/k <= 2.
    let tail = |k: usize| -> f64 {
        let kf = k as f64;
        let rho = 2.0 * (-PI * alpha * (2.0 * kf + 3.0)).exp();
        if rho >= 0.5 {
            return f64::INFINITY;
        }
        4.0 * PI * (kf + 1.0) * (-PI * alpha * (kf + 1.0) * (kf + 1.0)).exp() / (1.0 - rho)
    };
    let mut k_max = 1usize;
    while tail(k_max) > tol {
        k_max += 1;
        if k_max > MAX_TERMS {
            return Err(Error::Convergence(format!(
                "theta derivative series needs more than {MAX_TERMS} terms for tol {tol:.3e}"
            )));
        }
    }
    let mut sum = 0.0;
    let mut comp = 0.0;
    for k in 1..=k_max {
        let kf = k as f64;
        let term = -4.0 * PI * kf * (-PI * alpha * kf * kf).exp() * (2.0 * PI * kf * xr).sin();
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(ThetaValue {
        value: sum,
        trunc_error: tail(k_max),
        terms_used: k_max,
    })
}

/// Jacobi triple product evaluation of theta-3:
/// `prod_{k>=1} (1 - q^{2k}) (1 + 2 q^{2k-1} cos(2 pi x) + q^{2(2k-1)})`
/// with `q = exp(-pi alpha)`. Factors are multiplied until the k-th factor
/// deviates from 1 by less than `tol/10`; the dropped log-tail is bounded
/// geometrically.
pub fn theta3_product(x: f64, alpha: f64, tol: f64) -> Result<ThetaValue> {
    check_params(alpha, tol)?;
    let xr = reduce_period(x);
    let q = (-PI * alpha).exp();
    let c = (2.0 * PI * xr).cos();
    let mut p = 1.0;
    let mut k = 0usize;
    loop {
        k += 1;
        if k > MAX_TERMS {
            return Err(Error::Convergence(format!(
                "triple product needs more than {MAX_TERMS} factors for tol {tol:.3e}"
            )));
        }
        let q2k = (-2.0 * PI * alpha * k as f64).exp();
        let q2k1 = (-PI * alpha * (2.0 * k as f64 - 1.0)).exp();
        let factor = (1.0 - q2k) * (1.0 + 2.0 * q2k1 * c + q2k1 * q2k1);
        p *= factor;
        // |1 - factor| <= q2k + (2 q2k1 + q2k1^2)(1 + q2k)
        let dev = q2k + (2.0 * q2k1 + q2k1 * q2k1) * (1.0 + q2k);
        if dev < tol / 10.0 {
            break;
        }
    }
    // Sum of deviation bounds for the dropped factors j > k:
    //   sum q^{2j} = q^{2k+2}/(1-q^2),  sum 2 q^{2j-1} = 2 q^{2k+1}/(1-q^2),
    //   sum q^{4j-2} = q^{4k+2}/(1-q^4),
    // each multiplied by at most (1 + q^2) from the cross term.
    let q2 = q * q;
    let dev_sum = (1.0 + q2)
        * (q.powi(2 * k as i32 + 2) / (1.0 - q2)
            + 2.0 * q.powi(2 * k as i32 + 1) / (1.0 - q2)
            + q.powi(4 * k as i32 + 2) / (1.0 - q2 * q2));
    // |ln(1+u)| <= |u| / (1-|u|); the first dropped deviation already meets
    // the tol/10 stop rule, so 1-|u| >= 1 - tol/10 >= 1/2 for sane tol.
    let log_tail = dev_sum / (1.0 - (tol / 10.0).min(0.5));
    let trunc_error = p.abs() * log_tail.exp_m1().abs();
    Ok(ThetaValue {
        value: p,
        trunc_error,
        terms_used: k,
    })
}

/// Shared core for Montgomery's Q. Having pulled the full triple product in
/// front, the l-sum collapses to
/// `Q(x; alpha) = 4 pi theta3(x, alpha) sum_{l>=1} q^{2l-1} / m_l(x)` with
/// `m_l = 1 + 2 q^{2l-1} cos(2 pi x) + q^{2(2l-1)} = |1 + q^{2l-1} e^{2 pi i x}|^2 > 0`.
/// With `scaled = true` the weight is `q^{2l-2}` instead, i.e. the returned
/// value is `Q / (4 pi q)`, which stays in range for arbitrarily large alpha.
fn q_sum(x: f64, alpha: f64, tol_sum: f64, scaled: bool) -> Result<(f64, usize)> {
    let q = (-PI * alpha).exp();
    let c = (2.0 * PI * reduce_period(x)).cos();
    let mut sum = 0.0;
    let mut l = 0usize;
    loop {
        l += 1;
        if l > MAX_TERMS {
            return Err(Error::Convergence(format!(
                "Q series needs more than {MAX_TERMS} terms for tol {tol_sum:.3e}"
            )));
        }
        let q2l1 = (-PI * alpha * (2.0 * l as f64 - 1.0)).exp();
        let m = 1.0 + 2.0 * q2l1 * c + q2l1 * q2l1;
        let weight = if scaled {
            (-PI * alpha * (2.0 * l as f64 - 2.0)).exp()
        } else {
            q2l1
        };
        sum += weight / m;
        // Tail over j > l with m_j >= (1 - q^{2l+1})^2:
        //   plain:  sum q^{2j-1}/m_j <= q^{2l+1} / ((1-q^2)(1-q^{2l+1})^2)
        //   scaled: sum q^{2j-2}/m_j <= q^{2l}   / (same denominator)
        let next = (-PI * alpha * (2.0 * l as f64 + 1.0)).exp();
        let denom = (1.0 - q * q) * (1.0 - next) * (1.0 - next);
        let lead = if scaled {
            (-PI * alpha * 2.0 * l as f64).exp()
        } else {
            next
        };
        if lead / denom <= tol_sum {
            return Ok((sum, l));
        }
    }
}

/// Montgomery's `Q(x; alpha)`: 1-periodic, even and positive; it appears in
/// the derivative factorization `sqrt(alpha) f'(x) = -sin(2 pi x) Q(x; 1/alpha)`.
pub fn q_function(x: f64, alpha: f64, tol: f64) -> Result<f64> {
    check_params(alpha, tol)?;
    let q = (-PI * alpha).exp();
    // theta3(x) <= theta3(0) <= 1 + 2q/(1-q): crude but certified bound used
    // to split the error budget between the two factors.
    let t3_bound = 1.0 + 2.0 * q / (1.0 - q);
    let (s, _) = q_sum(x, alpha, tol / (8.0 * PI * t3_bound), false)?;
    let t3 = theta3(x, alpha, tol / (8.0 * PI * (s + 1.0)))?;
    Ok(4.0 * PI * t3.value * s)
}

/// `Q(x; alpha) / (4 pi exp(-pi alpha))`, the form used in the critical-curve
/// equations where only ratios of Q values enter. The common prefactor
/// cancels there, and dividing it out keeps everything representable even
/// when `exp(-pi alpha)` underflows.
pub fn q_function_scaled(x: f64, alpha: f64, tol: f64) -> Result<f64> {
    check_params(alpha, tol)?;
    let (s, _) = q_sum(x, alpha, tol / 100.0, true)?;
    let t3 = theta3(x, alpha, tol / (100.0 * (s + 1.0)))?;
    Ok(t3.value * s)
}

/// Explicit envelopes `g(alpha) <= f_Z(x; alpha) <= h(alpha)` (the `f` here
/// uses the `exp(-pi alpha r^2)` convention). Two branches at `alpha = 1`.
pub fn f_bound_envelopes(alpha: f64) -> (f64, f64) {
    if alpha < 1.0 {
        let e = (-PI / alpha).exp();
        let root = alpha.powf(-0.5);
        (root * (1.0 - F_ENVELOPE_C * e), root * (1.0 + F_ENVELOPE_C * e))
    } else {
        (
            2.0 * (-PI * alpha / 4.0).exp(),
            1.0 + F_ENVELOPE_C * (-PI * alpha).exp(),
        )
    }
}

/// Explicit envelopes `A(alpha) <= Q(x; alpha) <= B(alpha)`; the constants
/// `1 -+ 1/3000` enter on the `alpha >= 1` branch.
pub fn q_bound_envelopes(alpha: f64) -> (f64, f64) {
    if alpha < 1.0 {
        let p = alpha.powf(-1.5);
        (p * (-PI / (4.0 * alpha)).exp(), p)
    } else {
        let base = 4.0 * PI * (-PI * alpha).exp();
        ((1.0 - 1.0 / 3000.0) * base, (1.0 + 1.0 / 3000.0) * base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta3_matches_brute_force_at_origin() {
        // brute-force symmetric sum |k| <= 20 as an independent oracle
        let mut brute = 1.0;
        for k in 1..=20 {
            brute += 2.0 * (-PI * (k * k) as f64).exp();
        }
        let v = theta3(0.0, 1.0, 1e-15).unwrap();
        assert!((v.value - brute).abs() < 1e-15, "value {} vs brute {}", v.value, brute);
        assert!((v.value - 1.086434811213308).abs() < 1e-14);
    }

    #[test]
    fn theta3_periodicity_is_exact_for_exact_inputs() {
        // x and x+1 both exactly representable
        for &x in &[0.25, 0.5, 0.125, 0.75] {
            let a = theta3(x, 0.7, 1e-13).unwrap().value;
            let b = theta3(x + 1.0, 0.7, 1e-13).unwrap().value;
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn theta3_ordering_on_grid() {
        // theta3(0) >= theta3(x) >= theta3(1/2)
        let alpha = 1.0;
        let top = theta3(0.0, alpha, 1e-13).unwrap().value;
        let bottom = theta3(0.5, alpha, 1e-13).unwrap().value;
        for i in 0..100 {
            let x = i as f64 / 100.0;
            let v = theta3(x, alpha, 1e-13).unwrap().value;
            assert!(v <= top + 1e-12 && v >= bottom - 1e-12, "x={x}");
        }
    }

    #[test]
    fn product_and_series_agree() {
        let a = theta3(0.3, 0.7, 1e-14).unwrap();
        let b = theta3_product(0.3, 0.7, 1e-14).unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
        assert!((a.value - b.value).abs() <= a.trunc_error + b.trunc_error + 1e-13);
    }

    #[test]
    fn product_minimum_at_half_period() {
        let half = theta3_product(0.5, 1.0, 1e-13).unwrap().value;
        let quarter = theta3_product(0.25, 1.0, 1e-13).unwrap().value;
        assert!(half < quarter);
    }

    #[test]
    fn theta3_large_alpha_two_term_bracket() {
        let v = theta3(0.0, 10.0, 1e-18).unwrap().value;
        let lead = 2.0 * (-10.0 * PI).exp();
        assert!(v - 1.0 >= lead);
        assert!(v - 1.0 <= 1.05 * lead);
    }

    #[test]
    fn theta3_diff_resolves_tiny_differences() {
        // At alpha = 10 adjacent grid values differ by ~1e-18, far below the
        // resolution of the plain series.
        let d = theta3_diff(0.0, 1e-3, 10.0, 1e-25).unwrap();
        assert!(d.value > 0.0);
        assert!(d.value < 1e-15);
        let expected = 2.0 * (-10.0 * PI).exp() * (1.0 - (2.0 * PI * 1e-3).cos());
        assert!((d.value - expected).abs() < 1e-3 * expected);
    }

    #[test]
    fn unattainable_tolerance_errors_out() {
        // Needs ~sqrt(ln(1/tol)/(pi alpha)) > 1e6 terms.
        let r = theta3(0.0, 1e-13, 1e-12);
        assert!(matches!(r, Err(Error::Convergence(_))));
    }

    #[test]
    fn q_is_symmetric_and_periodic() {
        for &x in &[0.1, 0.23, 0.4] {
            let a = q_function(x, 0.8, 1e-12).unwrap();
            let b = q_function(-x, 0.8, 1e-12).unwrap();
            let c = q_function(x + 1.0, 0.8, 1e-12).unwrap();
            assert!((a - b).abs() < 1e-11 * a.abs());
            assert!((a - c).abs() < 1e-11 * a.abs());
            assert!(a > 0.0);
        }
    }

    #[test]
    fn q_matches_theta_derivative() {
        // -theta3'(x; alpha) / sin(2 pi x) == Q(x; alpha)
        for &(x, alpha) in &[(0.2, 1.3), (0.37, 0.6), (0.11, 2.0)] {
            let q = q_function(x, alpha, 1e-12).unwrap();
            let dt = theta3_dx(x, alpha, 1e-14).unwrap().value;
            let reference = -dt / (2.0 * PI * x).sin();
            assert!(
                (q - reference).abs() < 1e-10 * reference.abs().max(1.0),
                "x={x} alpha={alpha}: {q} vs {reference}"
            );
        }
    }

    #[test]
    fn q_scaled_matches_q_where_both_are_representable() {
        for &(x, alpha) in &[(0.2, 1.0), (0.3, 2.0), (0.45, 0.5)] {
            let q = q_function(x, alpha, 1e-13).unwrap();
            let s = q_function_scaled(x, alpha, 1e-13).unwrap();
            let rebuilt = 4.0 * PI * (-PI * alpha).exp() * s;
            assert!((q - rebuilt).abs() < 1e-11 * q.abs());
        }
    }

    #[test]
    fn q_scaled_survives_huge_parameters() {
        // exp(-pi alpha) underflows here; the scaled form must stay finite.
        let s = q_function_scaled(0.3, 200.0, 1e-12).unwrap();
        assert!(s.is_finite() && s > 0.0);
        assert!((s - 1.0).abs() < 1e-6);
    }

    #[test]
    fn f_envelopes_match_displayed_branches() {
        let (g, h) = f_bound_envelopes(2.0);
        assert!((g - 2.0 * (-PI / 2.0 * 2.0 / 2.0).exp()).abs() < 1e-15); // 2 e^{-pi/2}
        assert!((h - (1.0 + F_ENVELOPE_C * (-2.0 * PI).exp())).abs() < 1e-15);
        let (g, h) = f_bound_envelopes(0.5);
        let root = 2.0_f64.sqrt();
        assert!((g - root * (1.0 - F_ENVELOPE_C * (-2.0 * PI).exp())).abs() < 1e-13);
        assert!((h - root * (1.0 + F_ENVELOPE_C * (-2.0 * PI).exp())).abs() < 1e-13);
    }

    #[test]
    fn q_envelopes_match_displayed_branches() {
        let (a, b) = q_bound_envelopes(2.0);
        let base = 4.0 * PI * (-2.0 * PI).exp();
        assert!((a - (1.0 - 1.0 / 3000.0) * base).abs() < 1e-15);
        assert!((b - (1.0 + 1.0 / 3000.0) * base).abs() < 1e-15);
        let (a, b) = q_bound_envelopes(0.25);
        assert!((a - 8.0 * (-PI).exp()).abs() < 1e-13); // 4^{3/2} e^{-pi}
        assert!((b - 8.0).abs() < 1e-13); // 4^{3/2}
        for &alpha in &[0.1, 0.5, 0.9, 1.0, 1.5, 4.0, 20.0] {
            let (a, b) = q_bound_envelopes(alpha);
            assert!(a <= b);
        }
    }
}
