//! Property tests for the structural invariants.

use lattice_energy::energy;
use lattice_energy::geometry::{GaussianPotential, Lattice, PeriodicConfig};
use lattice_energy::special;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn well_conditioned_basis() -> impl Strategy<Value = DMatrix<f64>> {
    // random 2x2 bases with determinant bounded away from zero
    (
        -2.0f64..2.0,
        -2.0f64..2.0,
        -2.0f64..2.0,
        -2.0f64..2.0,
    )
        .prop_map(|(a, b, c, d)| DMatrix::from_row_slice(2, 2, &[a, b, c, d]))
        .prop_filter("nonsingular", |m| {
            let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            let scale = m.column(0).norm() * m.column(1).norm();
            scale > 0.1 && det.abs() > 0.2 * scale
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dual_of_dual_is_congruent(basis in well_conditioned_basis()) {
        let lat = Lattice::from_basis(basis).unwrap();
        let double_dual = lat.dual().unwrap().dual().unwrap();
        prop_assert!(lat.congruent(&double_dual, 1e-9).unwrap());
    }

    #[test]
    fn covolumes_of_dual_pair_multiply_to_one(basis in well_conditioned_basis()) {
        let lat = Lattice::from_basis(basis).unwrap();
        let dual = lat.dual().unwrap();
        let product = lat.covolume() * dual.covolume();
        prop_assert!((product - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalization_hits_target_density(basis in well_conditioned_basis(), rho in 0.2f64..5.0) {
        let cfg = PeriodicConfig::lattice_only(Lattice::from_basis(basis).unwrap());
        let scaled = cfg.normalized_to_density(rho).unwrap();
        prop_assert!((scaled.density() - rho).abs() < 1e-12 * rho);
        let again = scaled.normalized_to_density(rho).unwrap();
        prop_assert!((again.density() - rho).abs() < 1e-12 * rho);
        // idempotence: rescaling by the same density keeps the basis
        let diff = (again.lattice().basis() - scaled.lattice().basis()).norm();
        prop_assert!(diff < 1e-12 * scaled.lattice().basis().norm());
    }

    #[test]
    fn lattice_vector_shifts_are_rejected(m in -3i64..=3, n in -3i64..=3) {
        let lat = Lattice::integer(2);
        let shift = DVector::from_vec(vec![m as f64, n as f64]);
        let r = PeriodicConfig::new(lat, vec![DVector::zeros(2), shift]);
        prop_assert!(r.is_err());
    }

    #[test]
    fn theta_series_and_product_agree_within_certified_errors(
        x in 0.0f64..1.0,
        alpha in 0.05f64..20.0,
    ) {
        let series = special::theta3(x, alpha, 1e-13).unwrap();
        let product = special::theta3_product(x, alpha, 1e-13).unwrap();
        let gap = (series.value - product.value).abs();
        prop_assert!(
            gap <= series.trunc_error + product.trunc_error + 1e-12,
            "gap {gap:.3e} exceeds certified budget"
        );
    }

    #[test]
    fn theta_is_exactly_periodic_on_dyadic_points(k in 0u32..1024) {
        // x and x+1 exactly representable
        let x = k as f64 / 1024.0;
        let a = special::theta3(x, 0.9, 1e-13).unwrap().value;
        let b = special::theta3(x + 1.0, 0.9, 1e-13).unwrap().value;
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn energy_stays_above_minus_one(
        sx in 0.05f64..0.95,
        sy in 0.05f64..0.95,
        alpha in 0.3f64..5.0,
    ) {
        let lat = Lattice::integer(2);
        let cfg = PeriodicConfig::new(
            lat,
            vec![DVector::zeros(2), DVector::from_vec(vec![sx, sy])],
        ).unwrap();
        let pot = GaussianPotential::raw(alpha).unwrap();
        let e = energy::energy_direct(&cfg, &pot, 1e-10).unwrap();
        prop_assert!(e.value > -1.0);
    }

    #[test]
    fn lattice_energy_is_positive(alpha in 0.3f64..5.0, s in 0.5f64..2.0) {
        let cfg = PeriodicConfig::lattice_only(Lattice::integer(2).scaled(s).unwrap());
        let pot = GaussianPotential::raw(alpha).unwrap();
        let e = energy::energy_direct(&cfg, &pot, 1e-10).unwrap();
        prop_assert!(e.value > 0.0);
    }

    #[test]
    fn direct_and_dual_paths_agree(
        alpha in 0.4f64..4.0,
        sx in 0.1f64..0.9,
        sy in 0.1f64..0.9,
    ) {
        let cfg = PeriodicConfig::new(
            Lattice::integer(2),
            vec![DVector::zeros(2), DVector::from_vec(vec![sx, sy])],
        ).unwrap();
        let pot = GaussianPotential::raw(alpha).unwrap();
        let d = energy::energy_direct(&cfg, &pot, 1e-12).unwrap();
        let p = energy::energy_dual(&cfg, &pot, 1e-12).unwrap();
        prop_assert!((d.value - p.value).abs() <= d.trunc_error + p.trunc_error + 1e-12);
    }
}

#[test]
fn theta_is_strictly_decreasing_on_first_half_period() {
    // consecutive differences on a 1e-3 grid, taken through the
    // cancellation-free difference series
    for &alpha in &[0.2, 1.0, 5.0] {
        for i in 0..500 {
            let x0 = i as f64 * 1e-3;
            let x1 = (i + 1) as f64 * 1e-3;
            let d = special::theta3_diff(x0, x1, alpha, 1e-30).unwrap();
            assert!(
                d.value > d.trunc_error,
                "alpha={alpha}: theta3({x0}) - theta3({x1}) = {:.3e} not positive",
                d.value
            );
        }
    }
}
