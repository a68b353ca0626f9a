use bimult::factorize::{col_wnorm, row_wnorm, square_sums, FactorFamily};
use bimult::linalg::{psd_project, schatten_norm, svd, Schatten};
use bimult::multiplier::{apply_schur, apply_tau, OpLeg, PairSymbol};
use bimult::norms::gamma2;
use bimult::rng;
use bimult::symbols::{embed_schur, sup_norm, SchurSymbol};
use bimult::{CMatrix, Complex64};
use proptest::prelude::*;

fn matrix(max: usize) -> impl Strategy<Value = CMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), r * c).prop_map(move |v| {
            CMatrix::from_vec(
                r,
                c,
                v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect(),
            )
            .unwrap()
        })
    })
}

fn dims() -> impl Strategy<Value = [usize; 3]> {
    (1..=3usize, 1..=3usize, 1..=3usize).prop_map(|(a, b, c)| [a, b, c])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schatten_norms_are_ordered(a in matrix(6)) {
        let n1 = schatten_norm(&a, Schatten::One).unwrap();
        let n2 = schatten_norm(&a, Schatten::Two).unwrap();
        let ninf = schatten_norm(&a, Schatten::Inf).unwrap();
        prop_assert!(n1 + 1e-12 >= n2 && n2 + 1e-12 >= ninf);
        prop_assert!((n2 - a.frobenius()).abs() <= 1e-10 * (1.0 + n2));
    }

    #[test]
    fn svd_reconstructs(a in matrix(6)) {
        let d = svd(&a).unwrap();
        prop_assert!(d.reconstruct().max_diff(&a) <= 1e-10 * (1.0 + a.max_abs()));
        prop_assert!(d.sigma.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn psd_projection_is_idempotent(a in matrix(5)) {
        let n = a.rows().min(a.cols());
        let h = a.block(0, 0, n, n).hermitian_part();
        let p = psd_project(&h).unwrap();
        prop_assert!(psd_project(&p).unwrap().max_diff(&p) <= 1e-10 * (1.0 + p.max_abs()));
    }

    #[test]
    fn embedded_schur_agrees(d in dims(), seed in any::<u64>()) {
        let s = SchurSymbol::random(d, seed);
        let mut g = rng::seeded(seed, 1);
        let x = rng::gaussian_matrix(&mut g, d[1], d[0]);
        let y = rng::gaussian_matrix(&mut g, d[2], d[1]);
        let a = apply_tau(&embed_schur(&s), &y, &x).unwrap();
        let b = apply_schur(&s, &y, &x).unwrap();
        prop_assert!(a.max_diff(&b) <= 1e-12 * (1.0 + b.max_abs()));
    }

    #[test]
    fn schur_s2_bound_holds(d in dims(), seed in any::<u64>()) {
        // ‖Λ(y, x)‖₂ ≤ sup|s| ‖x‖₂ ‖y‖₂
        let s = SchurSymbol::random(d, seed);
        let mut g = rng::seeded(seed, 2);
        let x = rng::gaussian_matrix(&mut g, d[1], d[0]);
        let y = rng::gaussian_matrix(&mut g, d[2], d[1]);
        let out = apply_schur(&s, &y, &x).unwrap();
        prop_assert!(out.frobenius() <= sup_norm(&s) * x.frobenius() * y.frobenius() * (1.0 + 1e-12));
    }

    #[test]
    fn square_sums_bounded(d in dims(), m in 1..4usize, seed in any::<u64>()) {
        let mut g = rng::seeded(seed, 3);
        let pair = |g: &mut rng::Rng, op, da: usize, db: usize| {
            PairSymbol::from_vec(op, [da, db], rng::gaussian_vec(g, (da * db).pow(2))).unwrap()
        };
        let a = (0..m).map(|_| pair(&mut g, OpLeg::Second, d[0], d[1])).collect();
        let b = (0..m).map(|_| pair(&mut g, OpLeg::First, d[1], d[2])).collect();
        let f = FactorFamily::new(a, b).unwrap();
        let x = rng::gaussian_matrix(&mut g, d[1], d[0]);
        let y = rng::gaussian_matrix(&mut g, d[2], d[1]);
        let x = x.scale_real(1.0 / x.frobenius());
        let y = y.scale_real(1.0 / y.frobenius());
        let (sa, sb) = square_sums(&f, &x, &y).unwrap();
        let (r, c) = (row_wnorm(&f), col_wnorm(&f));
        prop_assert!(sa <= r * r + 1e-10 * (1.0 + r * r));
        prop_assert!(sb <= c * c + 1e-10 * (1.0 + c * c));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gamma2_between_max_entry_and_frobenius(a in matrix(3)) {
        prop_assume!(a.max_abs() > 1e-3);
        let g = gamma2(&a, 1e-8).unwrap();
        prop_assert!(g.value >= a.max_abs() * (1.0 - 1e-8));
        prop_assert!(g.value <= a.frobenius() * (1.0 + 1e-8));
        prop_assert!(g.lower_bound <= g.value * (1.0 + 1e-9));
        prop_assert!(g.value - g.lower_bound <= 1e-6 * g.value);
    }

    #[test]
    fn gamma2_is_homogeneous(a in matrix(3), t in 0.1..10.0f64) {
        prop_assume!(a.max_abs() > 1e-3);
        let g1 = gamma2(&a, 1e-9).unwrap().value;
        let g2 = gamma2(&a.scale_real(t), 1e-9).unwrap().value;
        prop_assert!((g2 - t * g1).abs() <= 1e-6 * t * g1);
    }
}
