use num_complex::Complex64;
use num_traits::One;
use proptest::prelude::*;
use theta_forge::algebra::{ratio, BigRat};
use theta_forge::partitions::{partitions_up_to, Partition};
use theta_forge::thetanum::{residual, ExactP0, ThetaContext, ThetaField};

fn complex() -> impl Strategy<Value = Complex64> {
    (0.6f64..1.6, -3.14f64..3.14).prop_map(|(r, a)| Complex64::from_polar(r, a))
}

fn nome() -> impl Strategy<Value = ThetaContext> {
    (0.05f64..0.5, -3.14f64..3.14).prop_map(|(r, a)| ThetaContext::new(Complex64::from_polar(r, a)).unwrap())
}

fn rational() -> impl Strategy<Value = BigRat> {
    (-12i64..=12, 1i64..=12)
        .prop_filter("not 0 or +-1", |(a, b)| *a != 0 && a.abs() != *b)
        .prop_map(|(a, b)| ratio(a, b))
}

proptest! {
    #[test]
    fn theta_inversion(x in complex(), ctx in nome()) {
        let l = ctx.theta(x.inv()).unwrap();
        let r = -ctx.theta(x).unwrap() / x;
        prop_assert!(residual(l, r) < 1e-11);
    }

    #[test]
    fn theta_quasi_periodicity(x in complex(), ctx in nome()) {
        let l = ctx.theta(ctx.p() * x).unwrap();
        let r = -ctx.theta(x).unwrap() / x;
        prop_assert!(residual(l, r) < 1e-11);
    }

    #[test]
    fn pochhammer_lengths_add(a in complex(), q in complex(), ctx in nome(), m in -4i64..5, n in -4i64..5) {
        let joint = ctx.theta_poch(a, q, m + n);
        let split = ctx.theta_poch(a, q, m).and_then(|x| Ok(x * ctx.theta_poch(a * q.powi(m as i32), q, n)?));
        if let (Ok(l), Ok(r)) = (joint, split) {
            prop_assert!(residual(l, r) < 1e-10);
        }
    }

    #[test]
    fn exact_pochhammer_is_a_finite_product(a in rational(), q in rational(), n in 0i64..6) {
        let f = ExactP0;
        let mut want = BigRat::one();
        let mut aq = a.clone();
        for _ in 0..n {
            want *= BigRat::one() - &aq;
            aq *= &q;
        }
        prop_assert_eq!(f.poch(&a, &q, n).unwrap(), want);
    }

    #[test]
    fn conjugation_reverses_dominance(i in 0usize..30, j in 0usize..30) {
        let ps = partitions_up_to(6, 6);
        let (a, b): (&Partition, &Partition) = (&ps[i % ps.len()], &ps[j % ps.len()]);
        prop_assert_eq!(a.conjugate().conjugate(), a.clone());
        prop_assert_eq!(a.conjugate().weight(), a.weight());
        if a.weight() == b.weight() {
            prop_assert_eq!(a.dominated_by(b), b.conjugate().dominated_by(&a.conjugate()));
        }
    }
}
