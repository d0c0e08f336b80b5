//! Algebraic laws of the coefficient arithmetic, checked over random
//! trigonometric polynomials.

use num_complex::Complex64;
use proptest::prelude::*;
use torusq::fourier::{FourierSeries, LatticeIndex};

type F = FourierSeries<f64>;

const TOL: f64 = 1e-12;

fn series(dim: usize, radius: i64, max_modes: usize) -> impl Strategy<Value = F> {
    prop::collection::vec(
        (
            prop::collection::vec(-radius..=radius, dim),
            -1.0..1.0f64,
            -1.0..1.0f64,
        ),
        0..=max_modes,
    )
    .prop_map(move |entries| {
        F::from_coeffs(
            dim,
            entries
                .into_iter()
                .map(|(mode, re, im)| (LatticeIndex(mode), Complex64::new(re, im))),
        )
    })
}

fn real_series(dim: usize, radius: i64, max_modes: usize) -> impl Strategy<Value = F> {
    series(dim, radius, max_modes).prop_map(|f| {
        f.add(&f.conjugate()).unwrap().scale(Complex64::new(0.5, 0.0))
    })
}

fn dim_and_triple() -> impl Strategy<Value = (F, F, F)> {
    (1..=3usize).prop_flat_map(|dim| {
        (
            series(dim, 3, 4),
            series(dim, 3, 4),
            series(dim, 3, 4),
        )
    })
}

proptest! {
    #[test]
    fn convolution_commutes((f, g, _) in dim_and_triple()) {
        let fg = f.convolve_mul(&g).unwrap();
        let gf = g.convolve_mul(&f).unwrap();
        prop_assert!(fg.sub(&gf).unwrap().max_abs_coeff() <= TOL);
    }

    #[test]
    fn convolution_associates((f, g, h) in dim_and_triple()) {
        let lhs = f.convolve_mul(&g).unwrap().convolve_mul(&h).unwrap();
        let rhs = f.convolve_mul(&g.convolve_mul(&h).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs_coeff() <= TOL);
    }

    #[test]
    fn addition_distributes((f, g, h) in dim_and_triple()) {
        let lhs = f.add(&g).unwrap().convolve_mul(&h).unwrap();
        let rhs = f
            .convolve_mul(&h)
            .unwrap()
            .add(&g.convolve_mul(&h).unwrap())
            .unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs_coeff() <= TOL);
    }

    #[test]
    fn derivative_satisfies_leibniz((f, g, _) in dim_and_triple()) {
        let dim = f.dim();
        for axis in 0..dim {
            let lhs = f.convolve_mul(&g).unwrap().angle_derivative(axis).unwrap();
            let rhs = f
                .angle_derivative(axis)
                .unwrap()
                .convolve_mul(&g)
                .unwrap()
                .add(&f.convolve_mul(&g.angle_derivative(axis).unwrap()).unwrap())
                .unwrap();
            prop_assert!(lhs.sub(&rhs).unwrap().max_abs_coeff() <= TOL);
        }
    }

    #[test]
    fn products_of_real_series_are_real(
        (f, g) in (1..=2usize).prop_flat_map(|d| (real_series(d, 3, 4), real_series(d, 3, 4)))
    ) {
        prop_assert!(f.is_real(TOL) && g.is_real(TOL));
        prop_assert!(f.convolve_mul(&g).unwrap().is_real(TOL));
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(
        (f, g, angles) in (1..=2usize).prop_flat_map(|d| (
            series(d, 4, 5),
            series(d, 4, 5),
            prop::collection::vec(0.0..std::f64::consts::TAU, d),
        ))
    ) {
        let direct = f.convolve_mul(&g).unwrap().evaluate(&angles);
        let pointwise = f.evaluate(&angles) * g.evaluate(&angles);
        prop_assert!((direct - pointwise).norm() <= TOL);

        let sum = f.add(&g).unwrap().evaluate(&angles);
        prop_assert!((sum - (f.evaluate(&angles) + g.evaluate(&angles))).norm() <= TOL);
    }

    #[test]
    fn record_round_trip((f, _, _) in dim_and_triple()) {
        let back = F::from_records(f.dim(), &f.to_records()).unwrap();
        prop_assert!(f.sub(&back).unwrap().max_abs_coeff() <= 1e-15);
    }
}
